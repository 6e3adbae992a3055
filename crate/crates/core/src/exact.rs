//! Exact dyadic arithmetic used as the extended-precision path.
//!
//! Every finite `f64` is a dyadic rational `m * 2^e`, and the correlator and
//! MABK sums only add, multiply and scale such numbers by integers and powers
//! of two. Carrying big-integer mantissas therefore evaluates those sums
//! exactly at the given (rounded) cosines and sines; the only rounding left is
//! the final conversion back to `f64`.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `mantissa * 2^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: 0,
        }
    }

    pub fn from_int(value: BigInt) -> Self {
        Dyadic {
            mantissa: value,
            exponent: 0,
        }
        .normalized()
    }

    /// Exact decomposition of a finite float.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic conversion of non-finite value");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let mut mantissa = BigInt::from(mant);
        if negative {
            mantissa = -mantissa;
        }
        Dyadic {
            mantissa,
            exponent: exp,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return self;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exponent: self.exponent + other.exponent,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Dyadic {
        Dyadic {
            mantissa: &self.mantissa * k,
            exponent: self.exponent,
        }
        .normalized()
    }

    /// Multiplies by `2^shift`.
    pub fn shl(&self, shift: i64) -> Dyadic {
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + shift,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (lo, hi) = if self.exponent <= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (hi.exponent - lo.exponent) as usize;
        Dyadic {
            mantissa: &lo.mantissa + (&hi.mantissa << shift),
            exponent: lo.exponent,
        }
        .normalized()
    }

    /// Powers `self^0 ..= self^max`.
    pub fn powers(&self, max: usize) -> Vec<Dyadic> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(Dyadic::one());
        for i in 1..=max {
            let next = out[i - 1].mul(self);
            out.push(next);
        }
        out
    }

    /// Correctly scaled `f64` approximation of `self / denominator`.
    pub fn div_to_f64(&self, denominator: &BigUint) -> f64 {
        assert!(!denominator.is_zero(), "division by zero");
        if self.is_zero() {
            return 0.0;
        }
        let num = self.mantissa.abs().to_biguint().expect("non-negative");
        // Keep ~80 quotient bits so the final rounding dominates the error.
        let shift = 80 + denominator.bits() as i64 - num.bits() as i64;
        let q = if shift >= 0 {
            (num << shift as usize) / denominator
        } else {
            num / (denominator << (-shift) as usize)
        };
        let qbits = q.bits() as i64;
        let drop = (qbits - 64).max(0);
        let top = (q >> drop as usize).to_f64().expect("fits");
        let value = ldexp(top, self.exponent - shift + drop);
        if self.mantissa.sign() == Sign::Minus {
            -value
        } else {
            value
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.div_to_f64(&BigUint::one())
    }
}

/// `x * 2^e` without intermediate overflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Gaussian dyadic `re + i im`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianDyadic {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl GaussianDyadic {
    pub fn new(re: Dyadic, im: Dyadic) -> Self {
        GaussianDyadic { re, im }
    }

    pub fn one() -> Self {
        GaussianDyadic::new(Dyadic::one(), Dyadic::zero())
    }

    pub fn zero() -> Self {
        GaussianDyadic::new(Dyadic::zero(), Dyadic::zero())
    }

    pub fn mul(&self, other: &GaussianDyadic) -> GaussianDyadic {
        let re = self.re.mul(&other.re).add(&self.im.mul(&other.im).neg());
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        GaussianDyadic::new(re, im)
    }

    pub fn add(&self, other: &GaussianDyadic) -> GaussianDyadic {
        GaussianDyadic::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn mul_int(&self, k: &BigInt) -> GaussianDyadic {
        GaussianDyadic::new(self.re.mul_int(k), self.im.mul_int(k))
    }

    pub fn shl(&self, shift: i64) -> GaussianDyadic {
        GaussianDyadic::new(self.re.shl(shift), self.im.shl(shift))
    }

    /// Multiplies by `i^power`.
    pub fn mul_i_pow(&self, power: i64) -> GaussianDyadic {
        match power.rem_euclid(4) {
            0 => self.clone(),
            1 => GaussianDyadic::new(self.im.neg(), self.re.clone()),
            2 => GaussianDyadic::new(self.re.neg(), self.im.neg()),
            _ => GaussianDyadic::new(self.im.clone(), self.re.neg()),
        }
    }

    pub fn powers(&self, max: usize) -> Vec<GaussianDyadic> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(GaussianDyadic::one());
        for i in 1..=max {
            let next = out[i - 1].mul(self);
            out.push(next);
        }
        out
    }
}

/// Exact binomial coefficient.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc = acc * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    acc
}

/// Row `C(a, 0..=a)` of Pascal's triangle.
pub fn binomial_row(a: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(a as usize + 1);
    row.push(BigUint::one());
    for i in 0..a {
        let next = &row[i as usize] * BigUint::from(a - i) / BigUint::from(i + 1);
        row.push(next);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        for x in [1.0, -0.1, 3.5e-300, 1.7e300, f64::MIN_POSITIVE / 8.0, 0.0] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn exact_cancellation() {
        let big = Dyadic::from_f64(1e20);
        let one = Dyadic::from_f64(1.0);
        let s = big.add(&one).add(&big.neg());
        assert_eq!(s.to_f64(), 1.0);
    }

    #[test]
    fn division_rounds_correctly() {
        let x = Dyadic::from_int(BigInt::from(1));
        assert_eq!(x.div_to_f64(&BigUint::from(3u32)), 1.0 / 3.0);
        let y = Dyadic::from_f64(-10.0);
        assert_eq!(y.div_to_f64(&BigUint::from(4u32)), -2.5);
    }

    #[test]
    fn gaussian_units() {
        let z = GaussianDyadic::new(Dyadic::from_f64(1.0), Dyadic::from_f64(2.0));
        let iz = z.mul_i_pow(1);
        assert_eq!(iz.re.to_f64(), -2.0);
        assert_eq!(iz.im.to_f64(), 1.0);
        let sq = z.mul(&z);
        assert_eq!((sq.re.to_f64(), sq.im.to_f64()), (-3.0, 4.0));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        let row = binomial_row(5);
        let expected: Vec<BigUint> = [1u32, 5, 10, 10, 5, 1].iter().map(|&v| v.into()).collect();
        assert_eq!(row, expected);
    }
}
