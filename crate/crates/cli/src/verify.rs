//! Cross-checks of the fast evaluators against the dense simulator.

use std::f64::consts::PI;
use std::fmt;

use dicke_core::bell::mabk_normalized;
use dicke_core::oracle::{
    apply_amplitude_damping, bell_from_tensor, build_dicke, joint_probabilities, lhv_extremes,
    trace_out, DensityMatrix, LHV_CAP, TENSOR_CAP,
};
use dicke_core::{
    hardy_value, make_pure, DickeLabel, DickeMixture, EvalOptions, InequalityKind, MeasurementPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 0x5eed;
/// Above this size each party count gets at most [`LARGE_N_CASES`] angle
/// pairs; dense tensors grow as `4^n`.
const LARGE_N: usize = 8;
const LARGE_N_CASES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub max_n: usize,
    pub cases: usize,
    pub seed: u64,
    pub lhv: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_n: 8,
            cases: 50,
            seed: DEFAULT_SEED,
            lhv: false,
        }
    }
}

/// One named check: the worst deviation seen and the first failing case.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub cases: usize,
    pub max_deviation: f64,
    pub failure: Option<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            tolerance,
            cases: 0,
            max_deviation: 0.0,
            failure: None,
        }
    }

    fn record(&mut self, deviation: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as a failure.
        if deviation.is_nan() || deviation > self.max_deviation {
            self.max_deviation = deviation;
        }
        if (deviation.is_nan() || deviation > self.tolerance) && self.failure.is_none() {
            self.failure = Some(format!("{}: deviation {deviation:e}", case()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<5} {:<26} cases={:<6} max_dev={:.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_deviation,
            self.tolerance
        )?;
        if let Some(why) = &self.failure {
            write!(f, "  [{why}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `Ok` when every check passed, otherwise a mismatch naming the
    /// failing tuples.
    pub fn into_result(self) -> CliResult<VerifyReport> {
        if self.passed() {
            return Ok(self);
        }
        let failing: Vec<String> = self
            .checks
            .iter()
            .filter_map(|c| c.failure.as_ref().map(|f| format!("{}: {f}", c.name)))
            .collect();
        Err(CliError::Mismatch(failing.join("\n")))
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn weights_diff(a: &DickeMixture, b: &DickeMixture) -> f64 {
    if a.n() != b.n() {
        return f64::INFINITY;
    }
    (0..=a.n())
        .map(|l| (a.weight(l) - b.weight(l)).abs())
        .fold(0.0, f64::max)
}

fn rho(n: usize, k: usize) -> dicke_core::Result<DensityMatrix> {
    Ok(DensityMatrix::from_pure(&build_dicke(n, k)?))
}

/// Runs the suite for `2 <= n <= max_n`.
pub fn run_verify(opts: &VerifyOptions) -> CliResult<VerifyReport> {
    if opts.max_n > TENSOR_CAP {
        return Err(dicke_core::Error::Resource {
            what: "verify party count",
            value: opts.max_n,
            cap: TENSOR_CAP,
        }
        .into());
    }
    if opts.max_n < 2 {
        return Err(CliError::usage("verify needs --max-n >= 2"));
    }
    if opts.cases == 0 {
        return Err(CliError::usage("verify needs at least one angle case"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let eval = EvalOptions::default();
    let mut hardy = Check::new("hardy-vs-tensor", 1e-9);
    let mut mabk = Check::new("mabk-vs-tensor", 1e-9);
    let mut particle = Check::new("particle-loss-vs-trace", 1e-10);
    let mut damping = Check::new("w-damping-vs-kraus", 1e-12);
    let mut exc_comp = Check::new("excitation-composition", 1e-12);
    let mut part_comp = Check::new("particle-composition", 1e-12);
    let mut flip = Check::new("flip-symmetry", 1e-12);

    for n in 2..=opts.max_n {
        let cases = if n > LARGE_N {
            opts.cases.min(LARGE_N_CASES)
        } else {
            opts.cases
        };
        let states: Vec<DensityMatrix> = (0..=n).map(|k| rho(n, k)).collect::<Result<_, _>>()?;
        for _ in 0..cases {
            let a = MeasurementPair::new(rng.random_range(-PI..PI), rng.random_range(-PI..PI))?;
            for (k, state) in states.iter().enumerate() {
                let t = joint_probabilities(state, &a)?;
                let h = hardy_value(n, k, &a)?;
                hardy.record(
                    relative(h, bell_from_tensor(&t, InequalityKind::Hardy)),
                    || format!("n={n} k={k} {a}"),
                );
                let m = mabk_normalized(n, k, &a, &eval)?.value * 2f64.powi(n as i32);
                mabk.record(
                    relative(m, bell_from_tensor(&t, InequalityKind::Mabk)),
                    || format!("n={n} k={k} {a}"),
                );
            }
        }
        for (k, state) in states.iter().enumerate() {
            let pure = make_pure(DickeLabel::new(n, k)?);
            for m in 1..n {
                let model = DensityMatrix::from_mixture(&pure.particle_loss(m)?)?;
                let dense = trace_out(state, m)?;
                particle.record(model.max_abs_diff(&dense), || format!("n={n} k={k} m={m}"));
                for m2 in 0..n - m {
                    let twice = pure.particle_loss(m)?.particle_loss(m2)?;
                    part_comp.record(weights_diff(&twice, &pure.particle_loss(m + m2)?), || {
                        format!("n={n} k={k} m1={m} m2={m2}")
                    });
                }
                let flipped = pure.flipped().particle_loss(m)?.flipped();
                flip.record(weights_diff(&flipped, &pure.particle_loss(m)?), || {
                    format!("n={n} k={k} m={m}")
                });
            }
            for (p1, p2) in [(0.1, 0.2), (0.3, 0.45), (0.0, 0.7), (0.9, 0.5)] {
                let twice = pure.excitation_loss(p1)?.excitation_loss(p2)?;
                let once = pure.excitation_loss(1.0 - (1.0 - p1) * (1.0 - p2))?;
                exc_comp.record(weights_diff(&twice, &once), || {
                    format!("n={n} k={k} p1={p1} p2={p2}")
                });
            }
        }
        for p in [0.0, 0.05, 0.17, 0.5, 0.83, 1.0] {
            let dense = apply_amplitude_damping(&states[1], p)?;
            let model = DensityMatrix::from_mixture(
                &make_pure(DickeLabel::new(n, 1)?).excitation_loss(p)?,
            )?;
            damping.record(dense.max_abs_diff(&model), || format!("n={n} p={p}"));
        }
    }

    let mut checks = vec![hardy, mabk, particle, damping, exc_comp, part_comp, flip];
    if opts.lhv {
        let mut lhv = Check::new("lhv-bounds", 0.0);
        for n in 1..=opts.max_n.min(LHV_CAP) {
            let e = lhv_extremes(n)?;
            let excess = e.max_hardy.max(e.max_abs_mabk - 2f64.powi(n as i32));
            lhv.cases += e.strategies - 1;
            lhv.record(excess.max(0.0), || {
                format!(
                    "n={n}: max Hardy {}, max |MABK| {}",
                    e.max_hardy, e.max_abs_mabk
                )
            });
        }
        checks.push(lhv);
    }
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_verify(&VerifyOptions {
            max_n: 4,
            cases: 5,
            lhv: true,
            ..VerifyOptions::default()
        })
        .unwrap();
        assert!(report.passed(), "{report}");
        let lhv = report.check("lhv-bounds").unwrap();
        assert_eq!(lhv.cases, 4 + 16 + 64 + 256);
        assert_eq!(lhv.max_deviation, 0.0);
    }

    #[test]
    fn caps_and_usage() {
        let big = VerifyOptions {
            max_n: 13,
            ..VerifyOptions::default()
        };
        assert_eq!(run_verify(&big).unwrap_err().exit_code(), 3);
        let tiny = VerifyOptions {
            max_n: 1,
            ..VerifyOptions::default()
        };
        assert_eq!(run_verify(&tiny).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn failures_name_the_case() {
        let mut c = Check::new("demo", 1e-3);
        c.record(1e-4, || unreachable!());
        c.record(f64::NAN, || "n=3".into());
        assert!(!c.passed());
        assert!(c.failure.as_deref().unwrap().starts_with("n=3"));
        let report = VerifyReport { checks: vec![c] };
        assert_eq!(report.into_result().unwrap_err().exit_code(), 1);
    }
}
