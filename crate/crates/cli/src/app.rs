//! Subcommand implementations. Every number printed or written is the
//! library result itself; formatting never recomputes.

use std::io::Write;

use dicke_core::{
    ansatz_angles, ansatz_family, hardy_value_mixture, make_pure, threshold_excitation,
    threshold_particle, AngleSource, BellValue, DickeLabel, InequalityKind, LossKind, LossModel,
    MeasurementPair, ThresholdOptions,
};
use serde::Serialize;

use crate::args::{Cli, Command, EvalArgs, ProblemArgs, SweepArgs, ThresholdArgs, VerifyArgs};
use crate::config::{AngleMode, FileConfig, RunConfig};
use crate::error::{CliError, CliResult};
use crate::plot::{render_svg, Chart, Series};
use crate::record::{render, Format, SweepRecord};
use crate::reproduce::{reproduce, write_file, Context};
use crate::sweep::{grid_tasks, run_tasks, validate};
use crate::verify::{run_verify, VerifyOptions};

/// Resolves configuration and runs the parsed command, writing reports to
/// `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(cli.flag_config(), file)?;
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, &cfg, out),
        Command::Threshold(a) => cmd_threshold(a, &cfg, out),
        Command::Sweep(a) => cmd_sweep(a, &cfg, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Reproduce(a) => {
            let ctx = Context {
                opts: ThresholdOptions {
                    eval: cfg.eval_options(),
                    ..ThresholdOptions::default()
                },
                jobs: cfg.jobs,
                timing: cfg.timing,
            };
            let rep = reproduce(a.target, &ctx)?;
            for path in rep.write(&cfg.out_dir, cfg.format, cfg.plot)? {
                emit(out, format!("wrote {}\n", path.display()))?;
            }
            emit(out, rep.summary())?;
            rep.into_result().map(drop)
        }
    }
}

fn emit(out: &mut dyn Write, text: impl AsRef<str>) -> CliResult<()> {
    out.write_all(text.as_ref().as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn explicit_angles(p: &ProblemArgs) -> CliResult<Option<MeasurementPair>> {
    match (p.alpha0, p.alpha1) {
        (Some(a0), Some(a1)) => Ok(Some(MeasurementPair::new(a0, a1)?)),
        (None, None) => Ok(None),
        _ => Err(CliError::usage("--alpha0 and --alpha1 go together")),
    }
}

/// Angle source from `--angles`, the explicit pair and the configured mode.
fn angle_source(p: &ProblemArgs, cfg: &RunConfig, default: AngleMode) -> CliResult<AngleSource> {
    let explicit = explicit_angles(p)?;
    let mode = match (p.angles, explicit) {
        (Some(mode), _) => mode,
        (None, Some(_)) => AngleMode::Explicit,
        (None, None) => cfg.angles.unwrap_or(default),
    };
    match (mode, explicit) {
        (AngleMode::Explicit, Some(a)) => Ok(AngleSource::Explicit(a)),
        (AngleMode::Explicit, None) => Err(CliError::usage(
            "explicit angles need --alpha0 and --alpha1",
        )),
        (_, Some(_)) => Err(CliError::usage(
            "--alpha0/--alpha1 conflict with --angles ansatz|optimize",
        )),
        (AngleMode::Ansatz, None) => Ok(AngleSource::Ansatz),
        (AngleMode::Optimize, None) => Ok(AngleSource::Optimize),
    }
}

#[derive(Debug, Serialize)]
struct EvalReport {
    n: usize,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    loss: Option<LossModel>,
    alpha0: f64,
    alpha1: f64,
    bell: BellValue,
}

fn cmd_eval(a: &EvalArgs, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let label = DickeLabel::new(a.n, a.k)?;
    let loss = match (a.problem.model.map(LossKind::from), a.p, a.m) {
        (None | Some(LossKind::Excitation), Some(p), None) => Some(LossModel::ExcitationLoss { p }),
        (None | Some(LossKind::Particle), None, Some(m)) => Some(LossModel::ParticleLoss { m }),
        (None, None, None) => None,
        (Some(LossKind::Excitation), _, _) => {
            return Err(CliError::usage("--model excitation takes --p"))
        }
        (Some(LossKind::Particle), _, _) => {
            return Err(CliError::usage("--model particle takes --m"))
        }
        _ => return Err(CliError::usage("give at most one of --p and --m")),
    };
    let pure = make_pure(label);
    let state = match loss {
        Some(l) => l.apply(&pure)?,
        None => pure,
    };
    let kind = a
        .problem
        .inequality
        .map(InequalityKind::from)
        .unwrap_or(cfg.inequality);
    let angles = match angle_source(&a.problem, cfg, AngleMode::Ansatz)? {
        AngleSource::Explicit(x) => x,
        AngleSource::Ansatz => {
            // The measured system is what survives particle loss.
            let fam = ansatz_family(kind, a.k).ok_or_else(|| {
                CliError::usage(format!("no ansatz family for {kind} with k = {}", a.k))
            })?;
            ansatz_angles(fam, state.n())?
        }
        AngleSource::Optimize => {
            return Err(CliError::usage("eval takes explicit or ansatz angles"));
        }
    };
    let value = match kind {
        InequalityKind::Hardy => hardy_value_mixture(&state, &angles)?,
        InequalityKind::Mabk => {
            dicke_core::bell::mabk_value_mixture_with(&state, &angles, &cfg.eval_options())?
        }
    };
    let report = EvalReport {
        n: a.n,
        k: a.k,
        loss,
        alpha0: angles.alpha0,
        alpha1: angles.alpha1,
        bell: value,
    };
    let text = match cfg.format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
        Format::Csv => {
            let mut s = format!(
                "inequality={kind}\nn={}\nk={}\nparties={}\nalpha0={}\nalpha1={}\nvalue={}\nlocal_bound={}\n",
                a.n, a.k, value.n, angles.alpha0, angles.alpha1, value.value, value.local_bound
            );
            if let Some(ls) = value.log_scale {
                s.push_str(&format!("log_scale={ls}\n"));
            }
            s.push_str(&format!(
                "normalized={}\nviolated={}\n",
                value.normalized(),
                value.violated
            ));
            if value.fallback {
                s.push_str("fallback=true\n");
            }
            s
        }
    };
    match &cfg.out {
        Some(path) => write_file(path, &text),
        None => emit(out, text),
    }
}

fn threshold_options(p: &ProblemArgs, cfg: &RunConfig) -> CliResult<ThresholdOptions> {
    Ok(ThresholdOptions {
        source: angle_source(p, cfg, AngleMode::Optimize)?,
        eval: cfg.eval_options(),
        ..ThresholdOptions::default()
    })
}

fn write_records(records: &[SweepRecord], cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let text = render(records, cfg.format)?;
    match &cfg.out {
        Some(path) => {
            write_file(path, &text)?;
            emit(
                out,
                format!("wrote {} ({} rows)\n", path.display(), records.len()),
            )
        }
        None => emit(out, text),
    }
}

fn cmd_threshold(a: &ThresholdArgs, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let opts = threshold_options(&a.problem, cfg)?;
    let start = std::time::Instant::now();
    let r = match cfg.model {
        LossKind::Excitation => threshold_excitation(a.n, a.k, cfg.inequality, &opts)?,
        LossKind::Particle => threshold_particle(a.n, a.k, cfg.inequality, &opts)?,
    };
    let seconds = cfg.timing.then(|| start.elapsed().as_secs_f64());
    write_records(&[SweepRecord::from_result(&r, seconds)], cfg, out)
}

fn sweep_chart(records: &[SweepRecord], ns: &[usize]) -> Chart {
    let ok = || records.iter().filter(|r| !r.is_failed());
    let y = |r: &SweepRecord| r.threshold;
    let series = if ns.len() == 1 {
        vec![Series {
            label: format!("n = {}", ns[0]),
            points: ok().map(|r| (r.k as f64, y(r))).collect(),
        }]
    } else {
        let mut ks: Vec<usize> = records.iter().map(|r| r.k).collect();
        ks.sort_unstable();
        ks.dedup();
        ks.iter()
            .map(|&k| Series {
                label: format!("k = {k}"),
                points: ok()
                    .filter(|r| r.k == k)
                    .map(|r| (r.n as f64, y(r)))
                    .collect(),
            })
            .collect()
    };
    let first = records.first();
    Chart {
        title: first.map_or_else(String::new, |r| {
            format!("{} loss, {}", r.model, r.inequality)
        }),
        x_label: if ns.len() == 1 { "k" } else { "n" }.into(),
        y_label: "threshold".into(),
        log_x: false,
        series,
    }
}

fn cmd_sweep(a: &SweepArgs, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let opts = threshold_options(&a.problem, cfg)?;
    let tasks = grid_tasks(&a.n.0, &a.k.0, cfg.model, cfg.inequality);
    validate(&tasks, &opts)?;
    if cfg.plot && cfg.out.is_none() {
        return Err(CliError::usage("--plot needs --out"));
    }
    let records = run_tasks(&tasks, &opts, cfg.jobs, cfg.timing)?;
    write_records(&records, cfg, out)?;
    if let (true, Some(path)) = (cfg.plot, &cfg.out) {
        let svg = path.with_extension("svg");
        write_file(&svg, &render_svg(&sweep_chart(&records, &a.n.0))?)?;
        emit(out, format!("wrote {}\n", svg.display()))?;
    }
    let failed = records.iter().filter(|r| r.is_failed()).count();
    if failed > 0 {
        return Err(CliError::Mismatch(format!(
            "{failed} of {} rows failed; see the error flag",
            records.len()
        )));
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let report = run_verify(&VerifyOptions {
        max_n: a.max_n,
        cases: a.cases,
        seed: a.seed,
        lhv: a.lhv,
    })?;
    emit(out, report.to_string())?;
    report.into_result().map(drop)
}
