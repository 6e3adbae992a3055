use num_complex::Complex64;

use super::{check_cap, DensityMatrix, TENSOR_CAP};
use crate::angles::MeasurementPair;
use crate::bell::{beta_coefficient, InequalityKind};
use crate::error::{Error, Result};

/// `P(a|x)` for all input strings `x` and outcome strings `a`, stored at
/// `x * 2^n + a`. Bit `n - 1 - q` of `x` is the setting of party `q`; the
/// same bit of `a` is its outcome, 0 for `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTensor {
    n: usize,
    values: Vec<f64>,
}

impl ProbabilityTensor {
    pub(crate) fn from_values(n: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1 << (2 * n));
        ProbabilityTensor { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.values[(x << self.n) + a]
    }

    /// Checks entry ranges and that every conditional distribution sums to 1.
    pub fn validate(&self) -> Result<()> {
        let outcomes = 1usize << self.n;
        for x in 0..outcomes {
            let row = &self.values[x * outcomes..(x + 1) * outcomes];
            if let Some(v) = row.iter().find(|v| !(-1e-12..=1.0 + 1e-12).contains(*v)) {
                return Err(Error::domain(format!(
                    "probability {v} out of range at x = {x}"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::domain(format!("P(.|x = {x}) sums to {total}")));
            }
        }
        Ok(())
    }

    /// `E(x) = sum_a (prod_i a_i) P(a|x)`.
    pub fn correlator(&self, x: usize) -> f64 {
        (0..1usize << self.n)
            .map(|a| {
                let p = self.get(x, a);
                if a.count_ones() % 2 == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum()
    }

    /// Applies the party permutation `perm` (party `q` moves to `perm[q]`)
    /// to inputs and outcomes simultaneously.
    pub fn permuted(&self, perm: &[usize]) -> ProbabilityTensor {
        assert_eq!(perm.len(), self.n, "permutation length");
        let n = self.n;
        let map = |bits: usize| {
            (0..n).fold(0usize, |acc, q| {
                if bits >> (n - 1 - q) & 1 == 1 {
                    acc | 1 << (n - 1 - perm[q])
                } else {
                    acc
                }
            })
        };
        let mut values = vec![0.0; self.values.len()];
        for x in 0..1usize << n {
            for a in 0..1usize << n {
                values[(map(x) << n) + map(a)] = self.get(x, a);
            }
        }
        ProbabilityTensor { n, values }
    }
}

/// The two-outcome projectors `(I + a A_x) / 2` as real symmetric 2x2
/// matrices, indexed `[x][outcome bit]`.
fn projectors(angles: &MeasurementPair) -> [[[[f64; 2]; 2]; 2]; 2] {
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    for (x, alpha) in [angles.alpha0, angles.alpha1].into_iter().enumerate() {
        let (s, c) = alpha.sin_cos();
        for (bit, a) in [1.0, -1.0].into_iter().enumerate() {
            out[x][bit] = [
                [0.5 * (1.0 + a * c), 0.5 * a * s],
                [0.5 * a * s, 0.5 * (1.0 - a * c)],
            ];
        }
    }
    out
}

/// `P(a|x) = tr(rho (x)_i P^{a_i}_{x_i})` by contracting one qubit at a
/// time: the row/column bit pair of qubit `q` becomes its (input, outcome)
/// pair.
pub fn joint_probabilities(
    state: &DensityMatrix,
    angles: &MeasurementPair,
) -> Result<ProbabilityTensor> {
    let n = state.n();
    check_cap("probability tensor parties", n, TENSOR_CAP)?;
    let proj = projectors(angles);
    let dim = state.dim();
    let mut data: Vec<Complex64> = (0..dim * dim)
        .map(|i| state.get(i / dim, i % dim))
        .collect();
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        for r in (0..dim).filter(|r| r & bit == 0) {
            for c in (0..dim).filter(|c| c & bit == 0) {
                let idx = |i: usize, j: usize| (r | (i * bit)) * dim + (c | (j * bit));
                let old = [
                    [data[idx(0, 0)], data[idx(0, 1)]],
                    [data[idx(1, 0)], data[idx(1, 1)]],
                ];
                for x in 0..2 {
                    for a in 0..2 {
                        let p = &proj[x][a];
                        // sum_{i,j} rho_{ij} P_{ji}
                        let v = old[0][0] * p[0][0]
                            + old[0][1] * p[1][0]
                            + old[1][0] * p[0][1]
                            + old[1][1] * p[1][1];
                        data[idx(x, a)] = v;
                    }
                }
            }
        }
    }
    let values = data.iter().map(|z| z.re).collect();
    Ok(ProbabilityTensor::from_values(n, values))
}

/// `P(0..0|0..0) - sum_q P(0..0|e_q) - P(1..1|1..1)`, with outcome label
/// "0" meaning `+1`.
pub fn hardy_from_tensor(t: &ProbabilityTensor) -> f64 {
    let n = t.n();
    let all = (1usize << n) - 1;
    let middle: f64 = (0..n).map(|q| t.get(1 << q, 0)).sum();
    t.get(0, 0) - middle - t.get(all, all)
}

/// Signed `sum_x beta(|x|, n) E(x)` over all `2^n` input strings.
pub fn mabk_from_tensor(t: &ProbabilityTensor) -> f64 {
    let n = t.n();
    (0..1usize << n)
        .map(|x| beta_coefficient(x.count_ones() as usize, n) * t.correlator(x))
        .sum()
}

pub fn bell_from_tensor(t: &ProbabilityTensor, kind: InequalityKind) -> f64 {
    match kind {
        InequalityKind::Hardy => hardy_from_tensor(t),
        InequalityKind::Mabk => mabk_from_tensor(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::build_dicke;

    fn rho(n: usize, k: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&build_dicke(n, k).unwrap())
    }

    #[test]
    fn z_eigenstate_is_deterministic() {
        let t = joint_probabilities(&rho(3, 0), &MeasurementPair::new(0.0, 0.3).unwrap()).unwrap();
        assert!((t.get(0, 0) - 1.0).abs() < 1e-15);
        t.validate().unwrap();
    }

    #[test]
    fn x_measurement_on_two_party_w() {
        // (|01> + |10>)/sqrt2 is the +1 eigenstate of X (x) X with
        // <X (x) I> = 0, so P(++) = P(--) = 1/2.
        let half_pi = std::f64::consts::FRAC_PI_2;
        let t =
            joint_probabilities(&rho(2, 1), &MeasurementPair::new(half_pi, 0.0).unwrap()).unwrap();
        assert!((t.get(0, 0b00) - 0.5).abs() < 1e-15);
        assert!((t.get(0, 0b11) - 0.5).abs() < 1e-15);
        assert!(t.get(0, 0b01).abs() < 1e-15);
        assert!(t.get(0, 0b10).abs() < 1e-15);
    }

    #[test]
    fn vacuum_hardy_at_zero_angles() {
        for n in 2..=6 {
            let t =
                joint_probabilities(&rho(n, 0), &MeasurementPair::new(0.0, 0.0).unwrap()).unwrap();
            assert!((hardy_from_tensor(&t) - (1.0 - n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_cap() {
        let big = DensityMatrix {
            n: 11,
            data: Vec::new(),
        };
        let a = MeasurementPair::new(0.0, 0.0).unwrap();
        assert!(joint_probabilities(&big, &a).unwrap_err().is_resource());
    }
}
