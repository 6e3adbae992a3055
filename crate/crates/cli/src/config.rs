//! Run settings resolved from flags, an optional TOML file and defaults, in
//! that order of precedence. The environment is never consulted.

use std::path::{Path, PathBuf};

use dicke_core::{EvalOptions, InequalityKind, LossKind, Precision};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::record::Format;

/// Keys accepted in a `--config` file. All are optional.
///
/// ```toml
/// format = "json"
/// jobs = 4
/// precision = "extended"
/// plot = true
/// timing = false
/// model = "particle"
/// inequality = "mabk"
/// angles = "ansatz"
/// out_dir = "results"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub precision: Option<Precision>,
    pub plot: Option<bool>,
    pub timing: Option<bool>,
    pub model: Option<LossKind>,
    pub inequality: Option<InequalityKind>,
    pub angles: Option<AngleMode>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AngleMode {
    Ansatz,
    Optimize,
    Explicit,
}

/// Settings shared by all subcommands after precedence is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub format: Format,
    pub jobs: usize,
    pub precision: Precision,
    pub plot: bool,
    pub timing: bool,
    pub model: LossKind,
    pub inequality: InequalityKind,
    /// `None` when neither flag nor file chose; subcommands pick their own
    /// default.
    pub angles: Option<AngleMode>,
    pub out: Option<PathBuf>,
    pub out_dir: PathBuf,
}

/// Values given on the command line; `None` and `false` mean "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlagConfig {
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub precision: Option<Precision>,
    pub plot: bool,
    pub timing: bool,
    pub model: Option<LossKind>,
    pub inequality: Option<InequalityKind>,
    pub angles: Option<AngleMode>,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    pub fn resolve(flags: FlagConfig, file: FileConfig) -> CliResult<Self> {
        let jobs = flags.jobs.or(file.jobs).unwrap_or_else(default_jobs);
        if jobs == 0 {
            return Err(CliError::usage("jobs must be at least 1"));
        }
        Ok(RunConfig {
            format: flags.format.or(file.format).unwrap_or_default(),
            jobs,
            precision: flags.precision.or(file.precision).unwrap_or_default(),
            plot: flags.plot || file.plot.unwrap_or(false),
            timing: flags.timing || file.timing.unwrap_or(false),
            model: flags.model.or(file.model).unwrap_or(LossKind::Excitation),
            inequality: flags
                .inequality
                .or(file.inequality)
                .unwrap_or(InequalityKind::Hardy),
            angles: flags.angles.or(file.angles),
            out: flags.out,
            out_dir: flags
                .out_dir
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from("results")),
        })
    }

    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            precision: self.precision,
            ..EvalOptions::default()
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::resolve(FlagConfig::default(), FileConfig::default())
            .expect("defaults are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig::parse(
            "format = \"json\"\njobs = 3\nprecision = \"extended\"\nmodel = \"particle\"",
        )
        .unwrap();
        let flags = FlagConfig {
            jobs: Some(5),
            ..FlagConfig::default()
        };
        let cfg = RunConfig::resolve(flags, file).unwrap();
        assert_eq!(cfg.jobs, 5);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.precision, Precision::Extended);
        assert_eq!(cfg.model, LossKind::Particle);
        assert_eq!(cfg.inequality, InequalityKind::Hardy);
        assert_eq!(cfg.angles, None);
        assert_eq!(cfg.out_dir, PathBuf::from("results"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileConfig::parse("threads = 2").is_err());
        assert!(FileConfig::parse("angles = \"sometimes\"").is_err());
    }

    #[test]
    fn zero_jobs_is_a_usage_error() {
        let flags = FlagConfig {
            jobs: Some(0),
            ..FlagConfig::default()
        };
        let err = RunConfig::resolve(flags, FileConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_USAGE);
    }
}
