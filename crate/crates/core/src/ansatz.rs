//! Closed-form measurement-angle families in `n`.
//!
//! The Hardy families are fitted in units of `pi` for the projector
//! half-angle: the formula value `f_j(n)` gives `theta_j = pi f_j(n)`, hence
//! Bloch angle `alpha_j = 2 pi f_j(n)`. The MABK family gives Bloch angles
//! directly. [`ansatz_formula`] exposes the bare formula values.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::angles::MeasurementPair;
use crate::error::{Error, Result};

/// Fitted `(q0, q1)` for `k = 3..=6`.
pub const HARDY_K3TO6_COEFFICIENTS: [(usize, f64, f64); 4] = [
    (3, 1.63, 4.72),
    (4, 1.47, 3.77),
    (5, 1.34, 3.07),
    (6, 1.24, 2.66),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnsatzFamily {
    HardyW,
    MabkW,
    HardyK2,
    HardyK3to6 { q0: f64, q1: f64 },
}

impl AnsatzFamily {
    /// The Hardy family fitted for `k` excitations, if any.
    pub fn hardy(k: usize) -> Option<AnsatzFamily> {
        match k {
            1 => Some(AnsatzFamily::HardyW),
            2 => Some(AnsatzFamily::HardyK2),
            _ => HARDY_K3TO6_COEFFICIENTS
                .iter()
                .find(|c| c.0 == k)
                .map(|&(_, q0, q1)| AnsatzFamily::HardyK3to6 { q0, q1 }),
        }
    }

    fn is_hardy(&self) -> bool {
        !matches!(self, AnsatzFamily::MabkW)
    }
}

/// Bare formula values `(f0(n), f1(n))`.
pub fn ansatz_formula(family: AnsatzFamily, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("ansatz needs n >= 1"));
    }
    let rn = (n as f64).sqrt();
    Ok(match family {
        AnsatzFamily::HardyW => (
            FRAC_PI_2 - (7.0 * n as f64).sqrt().atan(),
            1.0 - (12.0 * n as f64).sqrt().atan() / PI,
        ),
        AnsatzFamily::HardyK2 => (
            FRAC_PI_2 - (1.97 * rn).atan(),
            0.5 * (PI + 3.0) - (6.93 * rn).atan(),
        ),
        AnsatzFamily::HardyK3to6 { q0, q1 } => {
            if !(q0 > 0.0 && q1 > 0.0) {
                return Err(Error::domain(format!(
                    "ansatz coefficients must be positive, got ({q0}, {q1})"
                )));
            }
            (
                FRAC_PI_2 - (q0 * rn).atan(),
                0.5 * (PI + 1.0) - (q1 * rn).atan(),
            )
        }
        AnsatzFamily::MabkW => match n % 4 {
            0 => (
                FRAC_PI_2 + (1.25 * rn).atan(),
                FRAC_PI_2 - (4.0 / 9.0 * rn).atan(),
            ),
            1 => (
                FRAC_PI_2 + (0.72 * rn).atan(),
                FRAC_PI_2 - (4.0 / 3.0 * rn).atan(),
            ),
            2 => (
                FRAC_PI_2 - (0.72 * rn).atan(),
                -FRAC_PI_2 + (4.0 / 3.0 * rn).atan(),
            ),
            _ => (
                FRAC_PI_2 - (0.75 * rn).atan(),
                FRAC_PI_2 + (4.0 / 3.0 * rn).atan(),
            ),
        },
    })
}

/// Measurement angles of an ansatz family at `n` parties.
pub fn ansatz_angles(family: AnsatzFamily, n: usize) -> Result<MeasurementPair> {
    let (f0, f1) = ansatz_formula(family, n)?;
    if family.is_hardy() {
        MeasurementPair::from_half_angles(PI * f0, PI * f1)
    } else {
        MeasurementPair::new(f0, f1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{hardy_value, mabk_normalized, EvalOptions};

    #[test]
    fn formula_values() {
        let (f0, f1) = ansatz_formula(AnsatzFamily::HardyW, 1).unwrap();
        assert!((f0 - (FRAC_PI_2 - 7f64.sqrt().atan())).abs() < 1e-15);
        assert!((f1 - (1.0 - 12f64.sqrt().atan() / PI)).abs() < 1e-15);
        let (m0, _) = ansatz_formula(AnsatzFamily::MabkW, 6).unwrap();
        assert!((m0 - (FRAC_PI_2 - (0.72 * 6f64.sqrt()).atan())).abs() < 1e-15);
        let fam = AnsatzFamily::hardy(3).unwrap();
        assert_eq!(fam, AnsatzFamily::HardyK3to6 { q0: 1.63, q1: 4.72 });
        let (g0, g1) = ansatz_formula(fam, 10_000).unwrap();
        assert!((g0 - (FRAC_PI_2 - 163f64.atan())).abs() < 1e-15);
        assert!((g1 - (0.5 * (PI + 1.0) - 472f64.atan())).abs() < 1e-15);
        assert!(AnsatzFamily::hardy(7).is_none());
        assert!(ansatz_formula(AnsatzFamily::HardyK3to6 { q0: -1.0, q1: 1.0 }, 4).is_err());
    }

    #[test]
    fn hardy_ansatz_violates_for_few_excitations() {
        // For k >= 4 the fitted angles certify violation only after some
        // loss, so the pure state is checked for k <= 3.
        for k in 1..=3 {
            let fam = AnsatzFamily::hardy(k).unwrap();
            for n in [50usize, 1000, 10_000] {
                let a = ansatz_angles(fam, n).unwrap();
                assert!(hardy_value(n, k, &a).unwrap() > 0.0, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn mabk_ansatz_violates_off_multiples_of_four() {
        let opts = EvalOptions::default();
        for n in [5usize, 6, 7, 101, 102, 103] {
            let a = ansatz_angles(AnsatzFamily::MabkW, n).unwrap();
            let m = mabk_normalized(n, 1, &a, &opts).unwrap().value;
            assert!(m.abs() > 1.0, "n={n}: {m}");
        }
    }
}
