//! Log-domain combinatorics and signed accumulation shared by every module.

use std::sync::OnceLock;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// Largest argument for which `n!` is a finite `f64`.
const EXACT_FACTORIAL_MAX: usize = 170;
const TABLE_LEN: usize = 1 << 15;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(TABLE_LEN);
        let mut fact = 1.0f64;
        for i in 0..TABLE_LEN {
            if i > 0 && i <= EXACT_FACTORIAL_MAX {
                fact *= i as f64;
            }
            if i <= EXACT_FACTORIAL_MAX {
                table.push(fact.ln());
            } else {
                table.push(ln_gamma(i as f64 + 1.0));
            }
        }
        table
    })
}

/// `ln(a!)`.
pub fn ln_factorial(a: u64) -> f64 {
    let table = ln_factorial_table();
    match usize::try_from(a) {
        Ok(i) if i < table.len() => table[i],
        _ => ln_gamma(a as f64 + 1.0),
    }
}

/// `ln C(a, b)`, with `-inf` when `b < 0` or `b > a`.
pub fn log_binomial(a: u64, b: i64) -> f64 {
    if b < 0 || b as u64 > a {
        return f64::NEG_INFINITY;
    }
    let b = b as u64;
    ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)
}

/// `ln C(a, b)` for signed arguments; `-inf` whenever the coefficient vanishes.
pub(crate) fn ln_choose(a: i64, b: i64) -> f64 {
    if a < 0 {
        return f64::NEG_INFINITY;
    }
    log_binomial(a as u64, b)
}

/// `exponent * ln_base`, treating `0 * -inf` as `0` so that `0^0 = 1`.
#[inline]
pub(crate) fn ln_pow(ln_base: f64, exponent: u64) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        exponent as f64 * ln_base
    }
}

/// A real number carried as `sign * exp(ln)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: SignedLog = SignedLog { sign: 1.0, ln: 0.0 };

    pub fn new(sign: f64, ln: f64) -> Self {
        if sign == 0.0 || ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                ln,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::new(x.signum(), x.abs().ln())
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn powu(self, exponent: u64) -> SignedLog {
        if exponent == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let sign = if exponent.is_multiple_of(2) {
            1.0
        } else {
            self.sign
        };
        Self::new(sign, exponent as f64 * self.ln)
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.ln.exp()
        }
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, other: SignedLog) -> SignedLog {
        Self::new(self.sign * other.sign, self.ln + other.ln)
    }
}

/// Cosine and sine of an angle with accurate logarithms of their magnitudes.
#[derive(Debug, Clone, Copy)]
pub struct TrigLog {
    pub cos: SignedLog,
    pub sin: SignedLog,
    pub c: f64,
    pub s: f64,
}

impl TrigLog {
    pub fn new(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        // ln|cos| = 0.5 ln(1 - sin^2) loses nothing when |sin| is small, and
        // symmetrically for ln|sin|.
        let ln_c = if s.abs() < 0.5 {
            0.5 * (-s * s).ln_1p()
        } else {
            c.abs().ln()
        };
        let ln_s = if c.abs() < 0.5 {
            0.5 * (-c * c).ln_1p()
        } else {
            s.abs().ln()
        };
        TrigLog {
            cos: SignedLog::new(if c == 0.0 { 0.0 } else { c.signum() }, ln_c),
            sin: SignedLog::new(if s == 0.0 { 0.0 } else { s.signum() }, ln_s),
            c,
            s,
        }
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }
}

/// Result of a signed log-domain summation.
#[derive(Debug, Clone, Copy)]
pub struct Accumulated {
    pub value: SignedLog,
    /// `sum |terms| / |sum terms|`; 1 without cancellation, `inf` on exact
    /// cancellation of non-zero terms.
    pub cancellation: f64,
}

/// Streaming sum of [`SignedLog`] terms, grouped by sign and rescaled to the
/// largest magnitude seen so far.
#[derive(Debug, Clone, Copy)]
pub struct SignedAccumulator {
    scale: f64,
    pos: Neumaier,
    neg: Neumaier,
}

impl Default for SignedAccumulator {
    fn default() -> Self {
        SignedAccumulator {
            scale: f64::NEG_INFINITY,
            pos: Neumaier::default(),
            neg: Neumaier::default(),
        }
    }
}

impl SignedAccumulator {
    pub fn add(&mut self, term: SignedLog) {
        if term.is_zero() {
            return;
        }
        if term.ln > self.scale {
            if self.scale > f64::NEG_INFINITY {
                let factor = (self.scale - term.ln).exp();
                self.pos.scale(factor);
                self.neg.scale(factor);
            }
            self.scale = term.ln;
        }
        let mag = (term.ln - self.scale).exp();
        if term.sign > 0.0 {
            self.pos.add(mag);
        } else {
            self.neg.add(mag);
        }
    }

    pub fn finish(&self) -> Accumulated {
        if self.scale == f64::NEG_INFINITY {
            return Accumulated {
                value: SignedLog::ZERO,
                cancellation: 1.0,
            };
        }
        let p = self.pos.value();
        let n = self.neg.value();
        let diff = p - n;
        let total = p + n;
        let cancellation = if diff == 0.0 {
            f64::INFINITY
        } else {
            total / diff.abs()
        };
        Accumulated {
            value: SignedLog::new(diff.signum(), self.scale + diff.abs().ln()),
            cancellation,
        }
    }
}

/// Streaming sum of complex terms given as `exp(ln) * e^{i phase}`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexAccumulator {
    scale: f64,
    re: Neumaier,
    im: Neumaier,
    abs: Neumaier,
}

impl Default for ComplexAccumulator {
    fn default() -> Self {
        ComplexAccumulator {
            scale: f64::NEG_INFINITY,
            re: Neumaier::default(),
            im: Neumaier::default(),
            abs: Neumaier::default(),
        }
    }
}

impl ComplexAccumulator {
    pub fn add_polar(&mut self, ln: f64, phase: f64) {
        if ln == f64::NEG_INFINITY {
            return;
        }
        if ln > self.scale {
            if self.scale > f64::NEG_INFINITY {
                let factor = (self.scale - ln).exp();
                self.re.scale(factor);
                self.im.scale(factor);
                self.abs.scale(factor);
            }
            self.scale = ln;
        }
        let mag = (ln - self.scale).exp();
        let (s, c) = phase.sin_cos();
        self.re.add(mag * c);
        self.im.add(mag * s);
        self.abs.add(mag);
    }

    /// `sum |terms|`.
    pub fn abs_sum(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            0.0
        } else {
            self.scale.exp() * self.abs.value()
        }
    }

    /// Returns `(ln scale, scaled sum, cancellation)` so that the sum equals
    /// `exp(ln scale) * scaled sum`.
    pub fn finish(&self) -> (f64, Complex64, f64) {
        if self.scale == f64::NEG_INFINITY {
            return (0.0, Complex64::new(0.0, 0.0), 1.0);
        }
        let z = Complex64::new(self.re.value(), self.im.value());
        let norm = z.norm();
        let cancellation = if norm == 0.0 {
            f64::INFINITY
        } else {
            self.abs.value() / norm
        };
        (self.scale, z, cancellation)
    }
}
