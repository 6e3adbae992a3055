//! One output row per `(n, k, model, inequality)` and its CSV/JSON forms.

use std::fmt;
use std::str::FromStr;

use dicke_core::{InequalityKind, LossKind, ThresholdResult};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "k",
    "model",
    "inequality",
    "threshold",
    "alpha0",
    "alpha1",
    "method",
    "flags",
    "seconds",
];

/// Flag attached to rows whose computation failed.
pub const ERROR_FLAG: &str = "error";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub k: usize,
    pub model: LossKind,
    pub inequality: InequalityKind,
    /// Loss probability, or `m* / n` for particle loss.
    pub threshold: f64,
    /// Particle loss: lost parties `m*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lost: Option<usize>,
    pub alpha0: f64,
    pub alpha1: f64,
    pub method: String,
    pub flags: Vec<String>,
    /// Wall time, only recorded on request so that files stay reproducible.
    pub seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn from_result(r: &ThresholdResult, seconds: Option<f64>) -> Self {
        SweepRecord {
            n: r.n,
            k: r.k,
            model: r.model,
            inequality: r.kind,
            threshold: r.threshold,
            lost: r.lost,
            alpha0: r.angles.alpha0,
            alpha1: r.angles.alpha1,
            method: r.method.to_string(),
            flags: r.flags.iter().map(|f| f.to_string()).collect(),
            seconds,
            error: None,
        }
    }

    /// A row for a tuple whose computation failed.
    pub fn failed(
        n: usize,
        k: usize,
        model: LossKind,
        inequality: InequalityKind,
        error: &dicke_core::Error,
        seconds: Option<f64>,
    ) -> Self {
        SweepRecord {
            n,
            k,
            model,
            inequality,
            threshold: 0.0,
            lost: None,
            alpha0: 0.0,
            alpha1: 0.0,
            method: "failed".into(),
            flags: vec![ERROR_FLAG.into()],
            seconds,
            error: Some(error.to_string()),
        }
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    pub fn is_failed(&self) -> bool {
        self.has_flag(ERROR_FLAG)
    }

    /// Ordering key for files: ascending `n`, then `k`, then model and
    /// inequality.
    pub fn sort_key(&self) -> (usize, usize, u8, u8) {
        let model = match self.model {
            LossKind::Excitation => 0,
            LossKind::Particle => 1,
        };
        let ineq = match self.inequality {
            InequalityKind::Hardy => 0,
            InequalityKind::Mabk => 1,
        };
        (self.n, self.k, model, ineq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// parses back to the rounded value.
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float");
    format!("{rounded}")
}

pub fn to_csv(records: &[SweepRecord]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Mismatch(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.k.to_string(),
            r.model.to_string(),
            r.inequality.to_string(),
            format_float(r.threshold),
            format_float(r.alpha0),
            format_float(r.alpha1),
            r.method.clone(),
            r.flags.join(";"),
            r.seconds.map(format_float).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Mismatch(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Parses CSV written by [`to_csv`]. Particle rows recover `lost` as
/// `round(threshold * n)`; error messages are not part of the CSV schema.
pub fn from_csv(text: &str) -> CliResult<Vec<SweepRecord>> {
    let bad = |msg: String| CliError::usage(format!("csv: {msg}"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        fn parse<T: FromStr>(s: &str, what: &str) -> CliResult<T> {
            s.parse()
                .map_err(|_| CliError::usage(format!("csv: bad {what} '{s}'")))
        }
        let model = match field(2) {
            "excitation" => LossKind::Excitation,
            "particle" => LossKind::Particle,
            other => return Err(bad(format!("unknown model '{other}'"))),
        };
        let n: usize = parse(field(0), "n")?;
        let threshold: f64 = parse(field(4), "threshold")?;
        let flags: Vec<String> = field(8)
            .split(';')
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        let failed = flags.iter().any(|f| f == ERROR_FLAG);
        let lost =
            (model == LossKind::Particle && !failed && !flags.iter().any(|f| f == "no-violation"))
                .then(|| (threshold * n as f64).round() as usize);
        out.push(SweepRecord {
            n,
            k: parse(field(1), "k")?,
            model,
            inequality: parse::<InequalityKind>(field(3), "inequality")?,
            threshold,
            lost,
            alpha0: parse(field(5), "alpha0")?,
            alpha1: parse(field(6), "alpha1")?,
            method: field(7).to_string(),
            flags,
            seconds: match field(9) {
                "" => None,
                s => Some(parse(s, "seconds")?),
            },
            error: None,
        });
    }
    Ok(out)
}

pub fn to_json(records: &[SweepRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> CliResult<Vec<SweepRecord>> {
    serde_json::from_str(text).map_err(|e| CliError::usage(format!("json: {e}")))
}

pub fn render(records: &[SweepRecord], format: Format) -> CliResult<String> {
    match format {
        Format::Csv => to_csv(records),
        Format::Json => Ok(to_json(records)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepRecord {
        SweepRecord {
            n: 30,
            k: 2,
            model: LossKind::Particle,
            inequality: InequalityKind::Hardy,
            threshold: 7.0 / 30.0,
            lost: Some(7),
            alpha0: 0.123456789012345,
            alpha1: -2.9,
            method: "grid-then-local".into(),
            flags: vec!["fallback".into(), "unstable".into()],
            seconds: None,
            error: None,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(0.123456789012345), "0.123456789012");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(2.5e-7), "0.00000025");
        let once = format_float(std::f64::consts::PI);
        assert_eq!(format_float(once.parse().unwrap()), once);
    }

    #[test]
    fn csv_layout() {
        let text = to_csv(&[sample()]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "30,2,particle,hardy,0.233333333333,0.123456789012,-2.9,grid-then-local,fallback;unstable,"
        );
    }

    #[test]
    fn csv_round_trip_at_csv_precision() {
        let r = sample();
        let back = from_csv(&to_csv(std::slice::from_ref(&r)).unwrap()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].lost, Some(7));
        assert_eq!(back[0].flags, r.flags);
        assert_eq!(to_csv(&back).unwrap(), to_csv(&[r]).unwrap());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut r = sample();
        r.seconds = Some(0.1 + 0.2);
        let back = from_json(&to_json(&[r.clone()])).unwrap();
        assert_eq!(back, vec![r]);
    }

    #[test]
    fn rejects_foreign_headers() {
        assert!(from_csv("a,b\n1,2\n").is_err());
    }
}
