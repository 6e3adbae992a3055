//! The multipartite Hardy expression and the MABK expression evaluated on
//! Dicke mixtures under symmetric equatorial measurements.
//!
//! Hardy probabilities project onto `cos(theta)|0> + sin(theta)|1>` with
//! `theta = alpha / 2`, so the Hardy closed form is written in half-angles.
//! Correlators use the full Bloch angles.
//!
//! MABK values are handled in normalized form `M / 2^n`, so the local bound
//! is 1 for every `n`. Because all parties share the settings, the sum over
//! input vectors collapses onto `x = |x|`, and the complex generating operator
//! `A_0 - i A_1` turns the `n + 1` remaining terms into `min(k, n - k) + 1`
//! terms:
//!
//! ```text
//! sum_x C(n,x) beta(x,n) E(x) = 2^((n+1)/2) Re[ w^(n+1) <n,k|(A_0 - i A_1)^{(x) n}|n,k> ]
//! <n,k|B^{(x) n}|n,k> = sum_r C(k,r) C(n-k,r) (-1)^(k-r) u^(n-2r) v^(2r)
//! ```
//!
//! with `w = e^{i pi/4}`, `u = c0 - i c1`, `v = s0 - i s1`. The explicit sum
//! over `x` using [`symmetric_correlator`] is kept as an independent route.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angles::MeasurementPair;
use crate::combinatorics::{
    ln_choose, ln_pow, ComplexAccumulator, SignedAccumulator, SignedLog, TrigLog,
};
use crate::error::{Error, Result};
use crate::exact::{binomial, Dyadic, GaussianDyadic};
use crate::state::DickeMixture;

/// Tolerance used by the violation flags.
pub const VIOLATION_TOL: f64 = 1e-12;
/// Default party cap for MABK evaluation.
pub const DEFAULT_MABK_CAP: usize = 2000;
/// Default cancellation ratio above which the exact path takes over.
pub const DEFAULT_CANCELLATION_LIMIT: f64 = 1e6;
/// Above this many parties MABK values are reported normalized.
const MABK_LINEAR_MAX_N: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityKind {
    Hardy,
    Mabk,
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityKind::Hardy => "hardy",
            InequalityKind::Mabk => "mabk",
        })
    }
}

impl FromStr for InequalityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hardy" => Ok(InequalityKind::Hardy),
            "mabk" => Ok(InequalityKind::Mabk),
            other => Err(Error::domain(format!("unknown inequality '{other}'"))),
        }
    }
}

/// Arithmetic used for sums prone to cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// `f64` in the log domain, falling back to exact arithmetic when the
    /// cancellation ratio exceeds the configured limit.
    #[default]
    Standard,
    /// Always exact dyadic arithmetic.
    Extended,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::domain(format!("unknown precision '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub precision: Precision,
    /// `None` disables the exact fallback in standard precision.
    pub cancellation_limit: Option<f64>,
    pub mabk_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            precision: Precision::Standard,
            cancellation_limit: Some(DEFAULT_CANCELLATION_LIMIT),
            mabk_cap: DEFAULT_MABK_CAP,
        }
    }
}

impl EvalOptions {
    fn wants_exact(&self, cancellation: f64) -> bool {
        match self.precision {
            Precision::Extended => true,
            Precision::Standard => self
                .cancellation_limit
                .is_some_and(|limit| cancellation.is_nan() || cancellation > limit),
        }
    }
}

/// A value together with whether the exact path produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub fallback: bool,
}

/// Bell value of a state at given angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellValue {
    pub kind: InequalityKind,
    pub n: usize,
    /// Hardy value, or the signed MABK sum. For MABK with `n > 60` this is the
    /// sum divided by `2^n` and `log_scale = n ln 2`.
    pub value: f64,
    pub local_bound: f64,
    pub violated: bool,
    pub log_scale: Option<f64>,
    /// True when the exact fallback evaluated any component.
    pub fallback: bool,
}

impl BellValue {
    fn hardy(n: usize, value: f64) -> Self {
        BellValue {
            kind: InequalityKind::Hardy,
            n,
            value,
            local_bound: 0.0,
            violated: value > VIOLATION_TOL,
            log_scale: None,
            fallback: false,
        }
    }

    fn mabk(n: usize, normalized: f64, fallback: bool) -> Self {
        let violated = normalized.abs() > 1.0 + VIOLATION_TOL;
        if n <= MABK_LINEAR_MAX_N {
            let bound = 2f64.powi(n as i32);
            BellValue {
                kind: InequalityKind::Mabk,
                n,
                value: normalized * bound,
                local_bound: bound,
                violated,
                log_scale: None,
                fallback,
            }
        } else {
            BellValue {
                kind: InequalityKind::Mabk,
                n,
                value: normalized,
                local_bound: 1.0,
                violated,
                log_scale: Some(n as f64 * LN_2),
                fallback,
            }
        }
    }

    /// Value divided by the local bound for MABK; the Hardy value itself.
    pub fn normalized(&self) -> f64 {
        match self.kind {
            InequalityKind::Hardy => self.value,
            InequalityKind::Mabk => self.value / self.local_bound,
        }
    }

    /// Signed distance to the local bound in normalized units; positive
    /// exactly when the inequality is violated (up to the tolerance).
    pub fn margin(&self) -> f64 {
        match self.kind {
            InequalityKind::Hardy => self.value,
            InequalityKind::Mabk => self.normalized().abs() - 1.0,
        }
    }
}

fn check_label(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!(
            "need at least two parties, got n = {n}"
        )));
    }
    if k > n {
        return Err(Error::InvalidLabel { n, k });
    }
    Ok(())
}

/// Trigonometric data of a measurement pair, computed once per angle pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AngleTrig {
    /// Half-angle data used by the Hardy expression.
    pub half: [TrigLog; 2],
    /// Full-angle data used by correlators.
    pub full: [TrigLog; 2],
}

impl AngleTrig {
    pub fn new(angles: &MeasurementPair) -> Self {
        let (t0, t1) = angles.half_angles();
        AngleTrig {
            half: [TrigLog::new(t0), TrigLog::new(t1)],
            full: [TrigLog::new(angles.alpha0), TrigLog::new(angles.alpha1)],
        }
    }
}

fn exp_term(ln_coeff: f64, factors: &[(SignedLog, u64)]) -> SignedLog {
    let mut acc = SignedLog::new(1.0, ln_coeff);
    for &(base, e) in factors {
        acc = acc * base.powu(e);
    }
    acc
}

pub(crate) fn hardy_component(n: usize, k: usize, trig: &AngleTrig) -> f64 {
    let [t0, t1] = trig.half;
    let (c0, s0, c1, s1) = (t0.cos, t0.sin, t1.cos, t1.sin);
    let (ni, ki) = (n as i64, k as i64);
    let ln_norm = ln_choose(ni, ki);
    let nk = (n - k) as u64;
    let ku = k as u64;

    let all_zero = exp_term(ln_norm, &[(c0, 2 * nk), (s0, 2 * ku)]).to_f64();
    let all_one = exp_term(ln_norm, &[(s1, 2 * nk), (c1, 2 * ku)]).to_f64();

    // Amplitude of outcome 0...0 when exactly one party uses setting 1,
    // scaled by sqrt(n / C(n,k)) so that its square is the summed probability.
    let half = 0.5 * ((n as f64).ln() - ln_norm);
    let mut amp = 0.0;
    if k >= 1 {
        amp += exp_term(
            ln_choose(ni - 1, ki - 1) + half,
            &[(c0, nk), (s1, 1), (s0, ku - 1)],
        )
        .to_f64();
    }
    if k < n {
        amp += exp_term(
            ln_choose(ni - 1, ki) + half,
            &[(c0, nk - 1), (c1, 1), (s0, ku)],
        )
        .to_f64();
    }
    all_zero - amp * amp - all_one
}

/// Hardy value `S_n(rho_{n,k})` at the given angles.
pub fn hardy_value(n: usize, k: usize, angles: &MeasurementPair) -> Result<f64> {
    check_label(n, k)?;
    Ok(hardy_component(n, k, &AngleTrig::new(angles)))
}

/// Literal two-line Hardy forms for the W state and the vacuum, in plain
/// floating point. Intended for small `n` cross-checks.
pub fn hardy_w_closed(n: usize, angles: &MeasurementPair) -> f64 {
    let (t0, t1) = angles.half_angles();
    let (s0, c0) = t0.sin_cos();
    let (s1, c1) = t1.sin_cos();
    let nf = n as f64;
    let n = n as i32;
    let bracket = c0.powi(n - 1) * s1 + (nf - 1.0) * c0.powi(n - 2) * s0 * c1;
    nf * c0.powi(2 * (n - 1)) * s0 * s0 - nf * c1 * c1 * s1.powi(2 * (n - 1)) - bracket * bracket
}

pub fn hardy_vacuum_closed(n: usize, angles: &MeasurementPair) -> f64 {
    let (t0, t1) = angles.half_angles();
    let c0 = t0.cos();
    let (s1, c1) = t1.sin_cos();
    let nf = n as f64;
    let n = n as i32;
    c0.powi(2 * n) - nf * c0.powi(2 * (n - 1)) * c1 * c1 - s1.powi(2 * n)
}

/// Hardy value of a mixture; the expression is linear in the state.
pub fn hardy_value_mixture(state: &DickeMixture, angles: &MeasurementPair) -> Result<BellValue> {
    let n = state.n();
    check_label(n, 0)?;
    let trig = AngleTrig::new(angles);
    let value = state
        .iter()
        .map(|(l, w)| w * hardy_component(n, l, &trig))
        .sum();
    Ok(BellValue::hardy(n, value))
}

/// `beta(x, N)` as `(sign, log2 |beta|)`; the magnitude is always an integer
/// power of two.
pub fn beta_parts(x: usize, parties: usize) -> (i8, i64) {
    let m = (1 + parties as i64 - 2 * x as i64).rem_euclid(8);
    if parties % 2 == 1 {
        let e = (parties as i64 + 1) / 2;
        match m {
            0 => (1, e),
            4 => (-1, e),
            _ => (0, e),
        }
    } else {
        let e = parties as i64 / 2;
        match m {
            1 | 7 => (1, e),
            _ => (-1, e),
        }
    }
}

/// `beta(x, N) = 2^((N+1)/2) cos(pi/4 (1 + N - 2x))`, evaluated exactly.
pub fn beta_coefficient(x: usize, parties: usize) -> f64 {
    let (sign, e) = beta_parts(x, parties);
    sign as f64 * 2f64.powi(e as i32)
}

fn check_correlator_args(n_f: usize, k: usize, x: usize) -> Result<()> {
    if n_f == 0 {
        return Err(Error::domain("correlator needs at least one party"));
    }
    if k > n_f {
        return Err(Error::InvalidLabel { n: n_f, k });
    }
    if x > n_f {
        return Err(Error::domain(format!(
            "{x} parties on setting 1 exceeds {n_f} parties"
        )));
    }
    Ok(())
}

/// Index ranges of the correlator double sum.
fn correlator_terms(n_f: i64, k: i64, x: i64) -> impl Iterator<Item = (i64, i64)> {
    (0..=k.min(n_f - k)).flat_map(move |r| {
        let lo = (2 * r + x - n_f).max(0);
        let hi = (2 * r).min(x);
        (lo..=hi).map(move |q| (r, q))
    })
}

fn correlator_standard(n_f: usize, k: usize, x: usize, trig: &AngleTrig) -> (f64, f64) {
    let [t0, t1] = trig.full;
    let (c0, s0, c1, s1) = (t0.cos, t0.sin, t1.cos, t1.sin);
    let (n, k, x) = (n_f as i64, k as i64, x as i64);
    let ln_norm = ln_choose(n, k);
    let mut acc = SignedAccumulator::default();
    for (r, q) in correlator_terms(n, k, x) {
        let ln_coeff = ln_choose(n - x, 2 * r - q)
            + ln_choose(x, q)
            + ln_choose(2 * r, r)
            + ln_choose(n - 2 * r, k - r)
            - ln_norm;
        let sign = if (k - r) % 2 == 0 { 1.0 } else { -1.0 };
        let term = exp_term(
            ln_coeff,
            &[
                (c0, (n + q - x - 2 * r) as u64),
                (s0, (2 * r - q) as u64),
                (c1, (x - q) as u64),
                (s1, q as u64),
            ],
        );
        acc.add(SignedLog::new(sign * term.sign, term.ln));
    }
    let out = acc.finish();
    (out.value.to_f64(), out.cancellation)
}

/// Exact trigonometric powers for the dyadic paths.
struct ExactTrig {
    c0: Vec<Dyadic>,
    s0: Vec<Dyadic>,
    c1: Vec<Dyadic>,
    s1: Vec<Dyadic>,
}

impl ExactTrig {
    fn new(trig: &AngleTrig, max: usize) -> Self {
        let [t0, t1] = trig.full;
        ExactTrig {
            c0: Dyadic::from_f64(t0.c).powers(max),
            s0: Dyadic::from_f64(t0.s).powers(max),
            c1: Dyadic::from_f64(t1.c).powers(max),
            s1: Dyadic::from_f64(t1.s).powers(max),
        }
    }
}

/// `C(n_f, k) * E(x)` exactly.
fn correlator_numerator_exact(n_f: usize, k: usize, x: usize, pw: &ExactTrig) -> Dyadic {
    let (n, ki, xi) = (n_f as i64, k as i64, x as i64);
    let mut acc = Dyadic::zero();
    for (r, q) in correlator_terms(n, ki, xi) {
        let coeff = binomial((n - xi) as u64, (2 * r - q) as u64)
            * binomial(xi as u64, q as u64)
            * binomial(2 * r as u64, r as u64)
            * binomial((n - 2 * r) as u64, (ki - r) as u64);
        let mut coeff = BigInt::from(coeff);
        if (ki - r) % 2 == 1 {
            coeff = -coeff;
        }
        let term = pw.c0[(n + q - xi - 2 * r) as usize]
            .mul(&pw.s0[(2 * r - q) as usize])
            .mul(&pw.c1[(xi - q) as usize])
            .mul(&pw.s1[q as usize])
            .mul_int(&coeff);
        acc = acc.add(&term);
    }
    acc
}

fn correlator_with(
    n_f: usize,
    k: usize,
    x: usize,
    trig: &AngleTrig,
    opts: &EvalOptions,
) -> Evaluated {
    if opts.precision == Precision::Standard {
        let (value, cancellation) = correlator_standard(n_f, k, x, trig);
        if !opts.wants_exact(cancellation) {
            return Evaluated {
                value,
                fallback: false,
            };
        }
    }
    let pw = ExactTrig::new(trig, n_f);
    let num = correlator_numerator_exact(n_f, k, x, &pw);
    Evaluated {
        value: num.div_to_f64(&binomial(n_f as u64, k as u64)),
        fallback: true,
    }
}

/// Correlator `E(x_vec)` of `|n_f, k>` for any input vector with `x` ones.
pub fn symmetric_correlator(
    n_f: usize,
    k: usize,
    x: usize,
    angles: &MeasurementPair,
) -> Result<f64> {
    symmetric_correlator_with(n_f, k, x, angles, &EvalOptions::default()).map(|e| e.value)
}

pub fn symmetric_correlator_with(
    n_f: usize,
    k: usize,
    x: usize,
    angles: &MeasurementPair,
    opts: &EvalOptions,
) -> Result<Evaluated> {
    check_correlator_args(n_f, k, x)?;
    Ok(correlator_with(n_f, k, x, &AngleTrig::new(angles), opts))
}

fn mabk_generating_standard(n: usize, k: usize, trig: &AngleTrig) -> (f64, f64) {
    let [t0, t1] = trig.full;
    let (c0, s0, c1, s1) = (t0.c, t0.s, t1.c, t1.s);
    // u/sqrt2 and v/sqrt2 have modulus at most 1.
    let ln_u = 0.5 * (c0 * c0 + c1 * c1).ln() - 0.5 * LN_2;
    let ln_v = 0.5 * (s0 * s0 + s1 * s1).ln() - 0.5 * LN_2;
    let arg_u = (-c1).atan2(c0);
    let arg_v = (-s1).atan2(s0);
    let (ni, ki) = (n as i64, k as i64);
    let base_phase = ((n + 1) % 8) as f64 * PI / 4.0;
    let mut acc = ComplexAccumulator::default();
    for r in 0..=ki.min(ni - ki) {
        let eu = (ni - 2 * r) as u64;
        let ev = (2 * r) as u64;
        let ln = ln_choose(ki, r) + ln_choose(ni - ki, r) + ln_pow(ln_u, eu) + ln_pow(ln_v, ev);
        let phase = base_phase
            + eu as f64 * arg_u
            + ev as f64 * arg_v
            + if (ki - r) % 2 == 0 { 0.0 } else { PI };
        acc.add_polar(ln, phase);
    }
    let (scale, z, _) = acc.finish();
    if z.re == 0.0 && z.im == 0.0 {
        return (0.0, 1.0);
    }
    let value = SQRT_2 * scale.exp() * z.re;
    // The local bound is 1, so cancellation is judged against max(|m|, 1).
    (value, SQRT_2 * acc.abs_sum() / value.abs().max(1.0))
}

fn mabk_generating_exact(n: usize, k: usize, trig: &AngleTrig) -> f64 {
    let [t0, t1] = trig.full;
    let u = GaussianDyadic::new(Dyadic::from_f64(t0.c), Dyadic::from_f64(-t1.c));
    let v = GaussianDyadic::new(Dyadic::from_f64(t0.s), Dyadic::from_f64(-t1.s));
    let r_max = k.min(n - k);
    let upow = u.powers(n);
    let v2 = v.mul(&v);
    let v2pow = v2.powers(r_max);
    let mut g = GaussianDyadic::zero();
    for r in 0..=r_max {
        let mut coeff =
            BigInt::from(binomial(k as u64, r as u64) * binomial((n - k) as u64, r as u64));
        if (k - r) % 2 == 1 {
            coeff = -coeff;
        }
        g = g.add(&upow[n - 2 * r].mul(&v2pow[r]).mul_int(&coeff));
    }
    // sqrt2 Re[w^(n+1) g] / 2^(n/2), with every factor kept dyadic.
    let scaled = if n % 2 == 1 {
        g.mul_i_pow(n.div_ceil(2) as i64).shl(-((n as i64 - 1) / 2))
    } else {
        let one_plus_i = GaussianDyadic::new(Dyadic::one(), Dyadic::one());
        g.mul_i_pow((n / 2) as i64)
            .mul(&one_plus_i)
            .shl(-(n as i64 / 2))
    };
    scaled.re.to_f64()
}

pub(crate) fn mabk_component(
    n: usize,
    k: usize,
    trig: &AngleTrig,
    opts: &EvalOptions,
) -> Evaluated {
    if opts.precision == Precision::Standard {
        let (value, cancellation) = mabk_generating_standard(n, k, trig);
        if !opts.wants_exact(cancellation) {
            return Evaluated {
                value,
                fallback: false,
            };
        }
    }
    Evaluated {
        value: mabk_generating_exact(n, k, trig),
        fallback: true,
    }
}

fn check_mabk(n: usize, opts: &EvalOptions) -> Result<()> {
    check_label(n, 0)?;
    if n > opts.mabk_cap {
        return Err(Error::Resource {
            what: "MABK party count",
            value: n,
            cap: opts.mabk_cap,
        });
    }
    Ok(())
}

/// Normalized MABK sum `M / 2^n` of the pure state `|n, k>`.
pub fn mabk_normalized(
    n: usize,
    k: usize,
    angles: &MeasurementPair,
    opts: &EvalOptions,
) -> Result<Evaluated> {
    check_mabk(n, opts)?;
    if k > n {
        return Err(Error::InvalidLabel { n, k });
    }
    Ok(mabk_component(n, k, &AngleTrig::new(angles), opts))
}

/// Signed MABK value of a mixture with default options.
pub fn mabk_value_mixture(state: &DickeMixture, angles: &MeasurementPair) -> Result<BellValue> {
    mabk_value_mixture_with(state, angles, &EvalOptions::default())
}

pub fn mabk_value_mixture_with(
    state: &DickeMixture,
    angles: &MeasurementPair,
    opts: &EvalOptions,
) -> Result<BellValue> {
    let n = state.n();
    check_mabk(n, opts)?;
    let trig = AngleTrig::new(angles);
    let mut value = 0.0;
    let mut fallback = false;
    for (l, w) in state.iter() {
        let e = mabk_component(n, l, &trig, opts);
        value += w * e.value;
        fallback |= e.fallback;
    }
    Ok(BellValue::mabk(n, value, fallback))
}

/// Normalized MABK value of a mixture through the explicit sum
/// `sum_x C(n,x) beta(x,n) E_mix(x) / 2^n` over correlators.
pub fn mabk_correlator_sum(
    state: &DickeMixture,
    angles: &MeasurementPair,
    opts: &EvalOptions,
) -> Result<Evaluated> {
    let n = state.n();
    check_mabk(n, opts)?;
    let trig = AngleTrig::new(angles);
    if opts.precision == Precision::Standard {
        let mut acc = SignedAccumulator::default();
        let mut fallback = false;
        for x in 0..=n {
            let (sign, log2_beta) = beta_parts(x, n);
            if sign == 0 {
                continue;
            }
            let mut e_mix = 0.0;
            for (l, w) in state.iter() {
                let e = correlator_with(n, l, x, &trig, opts);
                fallback |= e.fallback;
                e_mix += w * e.value;
            }
            let ln = ln_choose(n as i64, x as i64) + (log2_beta - n as i64) as f64 * LN_2;
            acc.add(SignedLog::new(sign as f64, ln) * SignedLog::from_f64(e_mix));
        }
        let out = acc.finish();
        let value = out.value.to_f64();
        let cancellation = out.cancellation * value.abs() / value.abs().max(1.0);
        if !opts.wants_exact(cancellation) {
            return Ok(Evaluated { value, fallback });
        }
    }
    let pw = ExactTrig::new(&trig, n);
    let mut value = 0.0;
    for (l, w) in state.iter() {
        let mut acc = Dyadic::zero();
        for x in 0..=n {
            let (sign, log2_beta) = beta_parts(x, n);
            if sign == 0 {
                continue;
            }
            let coeff = BigInt::from(binomial(n as u64, x as u64)) * sign as i32;
            let term = correlator_numerator_exact(n, l, x, &pw)
                .mul_int(&coeff)
                .shl(log2_beta - n as i64);
            acc = acc.add(&term);
        }
        value += w * acc.div_to_f64(&binomial(n as u64, l as u64));
    }
    Ok(Evaluated {
        value,
        fallback: true,
    })
}

/// `log2` of the factor relating the closed forms below to the literal sum:
/// `sum_x C(n,x) beta(x,n) E(x) = 2^((n+1)/2) * closed form`.
pub fn closed_form_log2_scale(n: usize) -> f64 {
    0.5 * (n as f64 + 1.0)
}

fn real_part_checked(z: Complex64, scale: f64) -> Result<f64> {
    let scale = scale.max(f64::MIN_POSITIVE);
    if z.im.abs() > 1e-9 * scale {
        return Err(Error::ImaginaryResidual {
            residual: z.im.abs(),
            scale,
        });
    }
    Ok(z.re)
}

/// Closed-form MABK expression of the vacuum, in the closed-form scale.
pub fn mabk_closed_vacuum(n: usize, angles: &MeasurementPair) -> Result<f64> {
    check_label(n, 0)?;
    let (c0, c1) = (angles.alpha0.cos(), angles.alpha1.cos());
    let i = Complex64::i();
    let nn = n as i32;
    let a = Complex64::new(c0, c1).powi(nn);
    let b = i * Complex64::new(c1, c0).powi(nn);
    let phase = Complex64::from_polar(0.5, -((n + 1) as f64) * PI / 4.0);
    let z = phase * (a + b);
    real_part_checked(z, 0.5 * (a.norm() + b.norm()))
}

/// Closed-form MABK expression of the W state, in the closed-form scale.
///
/// The overall prefactor is `sqrt2 (1+i) e^{-i n pi/4} / (4 (c0^2 + c1^2)^2)`;
/// the expression is singular only when both cosines vanish.
pub fn mabk_closed_w(n: usize, angles: &MeasurementPair) -> Result<f64> {
    check_label(n, 1)?;
    let (s0, c0) = angles.alpha0.sin_cos();
    let (s1, c1) = angles.alpha1.sin_cos();
    let rho = c0 * c0 + c1 * c1;
    if rho < 1e-8 {
        return Err(Error::SingularAngle {
            alpha0: angles.alpha0,
            alpha1: angles.alpha1,
        });
    }
    let i = Complex64::i();
    let nn = n as i32;
    let nf = n as f64;
    let cross = c0 * c1 + s0 * s1;
    let first = Complex64::new(c0, c1).powi(2)
        * Complex64::new(c1, c0).powi(nn)
        * (2.0 * i * cross + nf * Complex64::new(s0, -s1).powi(2));
    let second = Complex64::new(c0, -c1).powi(2)
        * Complex64::new(c0, c1).powi(nn)
        * (2.0 * cross + i * nf * Complex64::new(s0, s1).powi(2));
    let prefactor = Complex64::new(1.0, 1.0)
        * Complex64::from_polar(1.0, -nf * PI / 4.0)
        * (SQRT_2 / (4.0 * rho * rho));
    let z = prefactor * (first - second);
    let scale = SQRT_2 / (4.0 * rho * rho) * SQRT_2 * (first.norm() + second.norm());
    real_part_checked(z, scale)
}

/// The closed forms rescaled to the normalized sum `M / 2^n`.
pub fn mabk_closed_normalized(n: usize, k: usize, angles: &MeasurementPair) -> Result<f64> {
    let raw = match k {
        0 => mabk_closed_vacuum(n, angles)?,
        1 => mabk_closed_w(n, angles)?,
        _ => return Err(Error::domain("closed MABK forms exist for k = 0, 1 only")),
    };
    // 2^((n+1)/2) / 2^n = 2^((1-n)/2)
    Ok(raw * SQRT_2 * FRAC_1_SQRT_2.powi(n as i32))
}
