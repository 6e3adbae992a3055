//! Loss thresholds: the largest loss parameter for which violating
//! measurement angles are found.
//!
//! For excitation loss the Bell value of the lossy state is
//! `V(p) = sum_l C(k,l) (1-p)^l p^(k-l) S_l(angles)`, a polynomial in `p`
//! whose coefficients depend only on the angles. The threshold is
//! `sup_angles t(angles)` with `t(angles) = sup { p : V(p) violates }`, and
//! `t` itself is what the angle optimizer maximizes: one search over angles
//! instead of an angle search at every probe of `p`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angles::MeasurementPair;
use crate::ansatz::{ansatz_angles, AnsatzFamily};
use crate::bell::{
    hardy_component, mabk_component, AngleTrig, EvalOptions, InequalityKind, Precision,
    VIOLATION_TOL,
};
use crate::error::{Error, Result};
use crate::optimize::{optimize_angles, OptimizerConfig, Seed};
use crate::state::{make_pure, DickeLabel, LossKind};

/// Step of the descending coarse scan over `p`.
pub const SCAN_STEP: f64 = 0.01;
/// Width at which bisection of a violation boundary stops.
pub const BISECTION_TOL: f64 = 1e-12;
/// Offset below the threshold at which the witness is re-verified.
pub const CERTIFY_OFFSET: f64 = 1e-6;
/// Disagreement between standard and extended evaluation flagged as unstable.
pub const INSTABILITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Angles fixed by an ansatz family.
    AnsatzOnly,
    /// Grid and zoom ranking followed by local refinement.
    GridThenLocal,
    /// Angles supplied by the caller.
    Explicit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::AnsatzOnly => "ansatz-only",
            Method::GridThenLocal => "grid-then-local",
            Method::Explicit => "explicit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// No violation even without loss.
    NoViolation,
    /// The exact arithmetic path evaluated the witness.
    Fallback,
    /// Standard and extended precision disagree at the witness.
    Unstable,
    /// The witness does not violate `CERTIFY_OFFSET` below the threshold.
    Uncertified,
    /// The violating set in `p` is not a single interval.
    NonMonotone,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::NoViolation => "no-violation",
            Flag::Fallback => "fallback",
            Flag::Unstable => "unstable",
            Flag::Uncertified => "uncertified",
            Flag::NonMonotone => "non-monotone",
        })
    }
}

/// Where the measurement angles come from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum AngleSource {
    /// The ansatz family for the inequality and `k`; no optimization.
    Ansatz,
    /// Grid and local search, seeded with the ansatz when one exists.
    #[default]
    Optimize,
    Explicit(MeasurementPair),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub source: AngleSource,
    pub eval: EvalOptions,
    pub optimizer: OptimizerConfig,
}

impl ThresholdOptions {
    pub fn with_source(source: AngleSource) -> Self {
        ThresholdOptions {
            source,
            ..ThresholdOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub n: usize,
    pub k: usize,
    pub kind: InequalityKind,
    pub model: LossKind,
    /// Excitation loss: the loss probability. Particle loss: `m* / n`.
    pub threshold: f64,
    /// Particle loss: the largest number of lost parties `m*`.
    pub lost: Option<usize>,
    /// Particle loss: surviving parties `n - m*`.
    pub surviving: Option<usize>,
    pub angles: MeasurementPair,
    /// Normalized Bell value of the lossy state at the witness angles and the
    /// threshold (Hardy value or `M / 2^n`).
    pub bell_value_at_witness: f64,
    pub method: Method,
    pub evaluations: usize,
    pub flags: Vec<Flag>,
    /// Violating intervals of `p` at the witness angles (excitation loss).
    pub intervals: Vec<(f64, f64)>,
}

impl ThresholdResult {
    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Validates a label for threshold searches: `n >= 2` and `1 <= k <= n - 1`.
pub fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!(
            "need at least two parties, got n = {n}"
        )));
    }
    if k == 0 || k >= n {
        return Err(Error::domain(format!(
            "thresholds need 1 <= k <= n - 1, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Rejects MABK party counts above the configured cap.
pub fn check_cap(kind: InequalityKind, n: usize, eval: &EvalOptions) -> Result<()> {
    if kind == InequalityKind::Mabk && n > eval.mabk_cap {
        return Err(Error::Resource {
            what: "MABK party count",
            value: n,
            cap: eval.mabk_cap,
        });
    }
    Ok(())
}

/// The ansatz family used for `kind` at `k` excitations, if one exists.
pub fn ansatz_family(kind: InequalityKind, k: usize) -> Option<AnsatzFamily> {
    match kind {
        InequalityKind::Hardy => AnsatzFamily::hardy(k),
        InequalityKind::Mabk => (k == 1).then_some(AnsatzFamily::MabkW),
    }
}

/// Normalized component values `S_l` (Hardy) or `M_l / 2^n` (MABK) of the
/// pure Dicke states `|n, l>`, `l = 0..=k`.
#[derive(Debug, Clone, Copy)]
struct Components {
    n: usize,
    k: usize,
    kind: InequalityKind,
    eval: EvalOptions,
}

impl Components {
    fn values(&self, angles: &MeasurementPair) -> (Vec<f64>, bool) {
        let trig = AngleTrig::new(angles);
        let mut fallback = false;
        let values = (0..=self.k)
            .map(|l| match self.kind {
                InequalityKind::Hardy => hardy_component(self.n, l, &trig),
                InequalityKind::Mabk => {
                    let e = mabk_component(self.n, l, &trig, &self.eval);
                    fallback |= e.fallback;
                    e.value
                }
            })
            .collect();
        (values, fallback)
    }
}

/// The loss polynomial `V(p)` for fixed angles.
struct LossCurve {
    kind: InequalityKind,
    values: Vec<f64>,
    ln_binom: Vec<f64>,
}

impl LossCurve {
    fn new(kind: InequalityKind, values: Vec<f64>) -> Self {
        let k = values.len() - 1;
        let ln_binom = (0..=k)
            .map(|l| crate::combinatorics::log_binomial(k as u64, l as i64))
            .collect();
        LossCurve {
            kind,
            values,
            ln_binom,
        }
    }

    fn value(&self, p: f64) -> f64 {
        let k = self.values.len() - 1;
        if p <= 0.0 {
            return self.values[k];
        }
        if p >= 1.0 {
            return self.values[0];
        }
        let (lk, ll) = ((-p).ln_1p(), p.ln());
        self.values
            .iter()
            .enumerate()
            .map(|(l, s)| s * (self.ln_binom[l] + l as f64 * lk + (k - l) as f64 * ll).exp())
            .sum()
    }

    fn margin(&self, p: f64) -> f64 {
        let v = self.value(p);
        match self.kind {
            InequalityKind::Hardy => v,
            InequalityKind::Mabk => v.abs() - 1.0,
        }
    }

    fn violates(&self, p: f64) -> bool {
        match self.kind {
            InequalityKind::Hardy => self.value(p) > VIOLATION_TOL,
            InequalityKind::Mabk => self.value(p).abs() > 1.0 + VIOLATION_TOL,
        }
    }

    /// Boundary between a violating `good` and a non-violating `bad` point.
    fn bisect(&self, mut good: f64, mut bad: f64) -> f64 {
        while (bad - good).abs() > BISECTION_TOL {
            let mid = 0.5 * (good + bad);
            if self.violates(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    }

    fn scan_points() -> Vec<f64> {
        let steps = (1.0 / SCAN_STEP).round() as usize;
        (0..=steps)
            .map(|i| 1.0 - i as f64 * SCAN_STEP)
            .map(|p| p.max(0.0))
            .collect()
    }

    /// Largest violating `p` found by the descending scan and bisection.
    fn sup_violation(&self) -> Option<f64> {
        let pts = Self::scan_points();
        for (i, &p) in pts.iter().enumerate() {
            if self.violates(p) {
                return Some(if i == 0 {
                    1.0
                } else {
                    self.bisect(p, pts[i - 1])
                });
            }
        }
        None
    }

    /// All violating intervals resolved by the scan.
    fn intervals(&self) -> Vec<(f64, f64)> {
        let mut pts = Self::scan_points();
        pts.reverse();
        let mut out = Vec::new();
        let mut start: Option<f64> = None;
        for (i, &p) in pts.iter().enumerate() {
            let v = self.violates(p);
            match (v, start) {
                (true, None) => {
                    start = Some(if i == 0 {
                        p
                    } else {
                        self.bisect(p, pts[i - 1])
                    });
                }
                (false, Some(s)) => {
                    out.push((s, self.bisect(pts[i - 1], p)));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, 1.0));
        }
        out
    }

    /// Objective for the angle search: the threshold when the lossless state
    /// violates, otherwise a negative surrogate that rewards approaching it.
    fn objective(&self) -> f64 {
        match self.sup_violation() {
            Some(t) => t,
            None => -1.0 - (-self.margin(0.0).min(0.0)).ln_1p(),
        }
    }
}

/// Closed threshold ratio for the W state at fixed angles: the loss
/// probability at which `(1-p) V_1 + p V_0` reaches the local bound.
pub fn threshold_excitation_w(
    n: usize,
    kind: InequalityKind,
    angles: &MeasurementPair,
) -> Result<f64> {
    threshold_excitation_w_with(n, kind, angles, &EvalOptions::default())
}

pub fn threshold_excitation_w_with(
    n: usize,
    kind: InequalityKind,
    angles: &MeasurementPair,
    eval: &EvalOptions,
) -> Result<f64> {
    check_nk(n, 1)?;
    check_cap(kind, n, eval)?;
    let comps = Components {
        n,
        k: 1,
        kind,
        eval: *eval,
    };
    let (v, _) = comps.values(angles);
    let (v0, v1) = (v[0], v[1]);
    let denom = v0 - v1;
    let ratio = match kind {
        InequalityKind::Hardy => {
            if v1 <= VIOLATION_TOL {
                return Ok(0.0);
            }
            if denom.abs() < 1e-300 {
                return Err(Error::Degenerate(denom));
            }
            // (1-p) v1 + p v0 = 0
            -v1 / denom
        }
        InequalityKind::Mabk => {
            if v1.abs() <= 1.0 + VIOLATION_TOL {
                return Ok(0.0);
            }
            if denom.abs() < 1e-300 {
                return Err(Error::Degenerate(denom));
            }
            // Both crossings (1-p) v1 + p v0 = +-1; the one on the side of v1
            // bounds the violating interval that starts at p = 0.
            let sigma = v1.signum();
            let crossing = (sigma - v1) / denom;
            if crossing < 0.0 {
                1.0
            } else {
                crossing
            }
        }
    };
    Ok(ratio.clamp(0.0, 1.0))
}

fn seeds_for(kind: InequalityKind, n: usize, k: usize) -> Result<Vec<Seed>> {
    Ok(match ansatz_family(kind, k) {
        Some(fam) => vec![Seed::new(ansatz_angles(fam, n)?, 0.5 / (n as f64).sqrt())],
        None => Vec::new(),
    })
}

fn resolve_angles<F>(
    kind: InequalityKind,
    n: usize,
    k: usize,
    opts: &ThresholdOptions,
    objective: F,
) -> Result<(MeasurementPair, Method, usize)>
where
    F: FnMut(&MeasurementPair) -> Result<f64>,
{
    match opts.source {
        AngleSource::Explicit(a) => Ok((a, Method::Explicit, 1)),
        AngleSource::Ansatz => {
            let fam = ansatz_family(kind, k).ok_or_else(|| {
                Error::domain(format!("no ansatz family for {kind} with k = {k}"))
            })?;
            Ok((ansatz_angles(fam, n)?, Method::AnsatzOnly, 1))
        }
        AngleSource::Optimize => {
            let seeds = seeds_for(kind, n, k)?;
            let out = optimize_angles(objective, n, &seeds, &opts.optimizer)?;
            Ok((out.angles, Method::GridThenLocal, out.evaluations))
        }
    }
}

/// Excitation-loss threshold of `|n, k>`.
pub fn threshold_excitation(
    n: usize,
    k: usize,
    kind: InequalityKind,
    opts: &ThresholdOptions,
) -> Result<ThresholdResult> {
    check_nk(n, k)?;
    check_cap(kind, n, &opts.eval)?;
    let comps = Components {
        n,
        k,
        kind,
        eval: opts.eval,
    };
    let objective = |a: &MeasurementPair| -> Result<f64> {
        Ok(LossCurve::new(kind, comps.values(a).0).objective())
    };
    let (angles, method, evaluations) = resolve_angles(kind, n, k, opts, objective)?;

    let (values, fallback) = comps.values(&angles);
    let curve = LossCurve::new(kind, values.clone());
    let mut flags = Vec::new();
    if fallback {
        flags.push(Flag::Fallback);
    }
    let intervals = curve.intervals();
    let threshold = match curve.sup_violation() {
        Some(t) => t,
        None => {
            flags.push(Flag::NoViolation);
            0.0
        }
    };
    if intervals.len() > 1 || intervals.first().is_some_and(|iv| iv.0 > 0.0) {
        flags.push(Flag::NonMonotone);
    }
    if threshold > 0.0 && !curve.violates((threshold - CERTIFY_OFFSET).max(0.0)) {
        flags.push(Flag::Uncertified);
    }
    if kind == InequalityKind::Mabk && opts.eval.precision == Precision::Standard {
        let exact = Components {
            eval: EvalOptions {
                precision: Precision::Extended,
                ..opts.eval
            },
            ..comps
        };
        let t_exact = LossCurve::new(kind, exact.values(&angles).0)
            .sup_violation()
            .unwrap_or(0.0);
        if (t_exact - threshold).abs() > INSTABILITY_TOL {
            flags.push(Flag::Unstable);
        }
    }
    flags.sort();
    Ok(ThresholdResult {
        n,
        k,
        kind,
        model: LossKind::Excitation,
        threshold,
        lost: None,
        surviving: None,
        angles,
        bell_value_at_witness: curve.value(threshold),
        method,
        evaluations,
        flags,
        intervals,
    })
}

/// Particle-loss threshold of `|n, k>`: the largest number `m*` of lost
/// parties for which violating angles are found, searched downwards from
/// `m = n - 2`.
///
/// Flipping `|0> <-> |1>` on every party maps setting `alpha` to
/// `pi - alpha` and `|n, k>` to `|n, n-k>`, and particle loss commutes with
/// the flip; `k > n/2` is therefore computed as `n - k` with mirrored angles,
/// which makes the two thresholds agree exactly.
pub fn threshold_particle(
    n: usize,
    k: usize,
    kind: InequalityKind,
    opts: &ThresholdOptions,
) -> Result<ThresholdResult> {
    check_nk(n, k)?;
    check_cap(kind, n, &opts.eval)?;
    let mirrored = 2 * k > n;
    let kk = if mirrored { n - k } else { k };
    let mut source_opts = *opts;
    if let AngleSource::Explicit(a) = opts.source {
        if mirrored {
            source_opts.source = AngleSource::Explicit(mirror(&a));
        }
    }
    let pure = make_pure(DickeLabel::new(n, kk)?);
    let mut evaluations = 0usize;
    let mut found = None;
    let mut last = None;
    for m in (0..=n - 2).rev() {
        let state = pure.particle_loss(m)?;
        let nf = state.n();
        let margin_at = |a: &MeasurementPair| -> Result<(f64, bool)> {
            let trig = AngleTrig::new(a);
            let mut v = 0.0;
            let mut fallback = false;
            for (l, w) in state.iter() {
                v += w * match kind {
                    InequalityKind::Hardy => hardy_component(nf, l, &trig),
                    InequalityKind::Mabk => {
                        let e = mabk_component(nf, l, &trig, &opts.eval);
                        fallback |= e.fallback;
                        e.value
                    }
                };
            }
            Ok((v, fallback))
        };
        let objective = |a: &MeasurementPair| -> Result<f64> {
            let (v, _) = margin_at(a)?;
            Ok(match kind {
                InequalityKind::Hardy => v,
                InequalityKind::Mabk => v.abs() - 1.0,
            })
        };
        // The ansatz is fitted to the pure state on n parties; as a seed it
        // is only meaningful without loss.
        let (angles, method, used) = match source_opts.source {
            AngleSource::Optimize if m > 0 => {
                let out = optimize_angles(objective, nf, &[], &opts.optimizer)?;
                (out.angles, Method::GridThenLocal, out.evaluations)
            }
            _ => resolve_angles(kind, nf, kk, &source_opts, objective)?,
        };
        evaluations += used;
        let (v, fallback) = margin_at(&angles)?;
        let violated = match kind {
            InequalityKind::Hardy => v > VIOLATION_TOL,
            InequalityKind::Mabk => v.abs() > 1.0 + VIOLATION_TOL,
        };
        last = Some((angles, v, method, fallback));
        if violated {
            found = Some((m, angles, v, method, fallback));
            break;
        }
    }
    let mut flags = Vec::new();
    let (lost, angles, value, method, fallback) = match found {
        Some((m, a, v, method, fb)) => (Some(m), a, v, method, fb),
        None => {
            flags.push(Flag::NoViolation);
            let (a, v, method, fb) = last.expect("at least one m probed");
            (None, a, v, method, fb)
        }
    };
    if fallback {
        flags.push(Flag::Fallback);
    }
    flags.sort();
    Ok(ThresholdResult {
        n,
        k,
        kind,
        model: LossKind::Particle,
        threshold: lost.map_or(0.0, |m| m as f64 / n as f64),
        lost,
        surviving: lost.map(|m| n - m),
        angles: if mirrored { mirror(&angles) } else { angles },
        bell_value_at_witness: value,
        method,
        evaluations,
        flags,
        intervals: Vec::new(),
    })
}

fn mirror(a: &MeasurementPair) -> MeasurementPair {
    MeasurementPair::new(
        std::f64::consts::PI - a.alpha0,
        std::f64::consts::PI - a.alpha1,
    )
    .expect("finite")
}
