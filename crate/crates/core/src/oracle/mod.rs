//! Dense brute-force simulator for small `n`, used as ground truth.
//!
//! Basis index bit `n - 1 - q` is qubit `q`, so qubit 0 is the most
//! significant bit and [`trace_out`] removes the least significant ones.
//! Outcome `+1` is stored as bit 0, which is the label "0" of the Hardy
//! expression.

mod lhv;
mod tensor;

pub use lhv::{deterministic_tensor, lhv_extremes, LhvExtremes, LHV_CAP};
pub use tensor::{
    bell_from_tensor, hardy_from_tensor, joint_probabilities, mabk_from_tensor, ProbabilityTensor,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::state::DickeMixture;

/// Largest qubit count for states and density matrices.
pub const STATE_CAP: usize = 12;
/// Largest party count for full probability tensors.
pub const TENSOR_CAP: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Resource {
            what,
            value: n,
            cap,
        });
    }
    Ok(())
}

/// A pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `|n, k>` with amplitude `C(n,k)^(-1/2)` on every string of weight `k`.
pub fn build_dicke(n: usize, k: usize) -> Result<DenseState> {
    check_cap("dense state qubits", n, STATE_CAP)?;
    if n == 0 {
        return Err(Error::domain("a Dicke state needs at least one party"));
    }
    if k > n {
        return Err(Error::InvalidLabel { n, k });
    }
    let count = binomial(n as u64, k as u64);
    let amp = 1.0
        / num_traits::ToPrimitive::to_f64(&count)
            .expect("small")
            .sqrt();
    let amplitudes = (0..1usize << n)
        .map(|i| {
            if i.count_ones() as usize == k {
                Complex64::new(amp, 0.0)
            } else {
                ZERO
            }
        })
        .collect();
    Ok(DenseState { n, amplitudes })
}

/// Adds `w |n,l><n,l|` to a row-major `2^n x 2^n` matrix.
fn add_dicke_projector(data: &mut [Complex64], n: usize, l: usize, w: f64) -> Result<()> {
    let psi = build_dicke(n, l)?;
    let dim = 1usize << n;
    let support: Vec<usize> = (0..dim).filter(|&i| psi.amplitudes[i] != ZERO).collect();
    for &r in &support {
        for &c in &support {
            data[r * dim + c] += w * psi.amplitudes[r] * psi.amplitudes[c].conj();
        }
    }
    Ok(())
}

/// A density matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &DenseState) -> Self {
        let a = &state.amplitudes;
        let data = a
            .iter()
            .flat_map(|&r| a.iter().map(move |&c| r * c.conj()))
            .collect();
        DensityMatrix { n: state.n, data }
    }

    /// `sum_l w_l |n,l><n,l|`.
    pub fn from_mixture(mixture: &DickeMixture) -> Result<Self> {
        let n = mixture.n();
        check_cap("density matrix qubits", n, STATE_CAP)?;
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for (l, w) in mixture.iter() {
            add_dicke_projector(&mut data, n, l, w)?;
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_row_slice(dim, dim, &self.data);
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::domain(format!("not Hermitian: deviation {herm:e}")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::domain(format!("trace {tr} differs from 1")));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -1e-10 {
            return Err(Error::domain(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    /// Largest entrywise deviation from another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.n, other.n, "size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Populations `<n,l|rho|n,l>` for `l = 0..=n`.
    pub fn dicke_weights(&self) -> Result<Vec<f64>> {
        (0..=self.n)
            .map(|l| {
                let psi = build_dicke(self.n, l)?;
                let dim = self.dim();
                let support: Vec<usize> = (0..dim).filter(|&i| psi.amplitudes[i] != ZERO).collect();
                let mut acc = ZERO;
                for &r in &support {
                    for &c in &support {
                        acc += psi.amplitudes[r].conj() * self.get(r, c) * psi.amplitudes[c];
                    }
                }
                Ok(acc.re)
            })
            .collect()
    }

    /// Projection onto the Dicke basis: the populations, and the Frobenius
    /// norm of `rho - sum_l w_l |n,l><n,l|`. The populations sum to less
    /// than one when `rho` leaves the symmetric subspace.
    pub fn dicke_projection(&self) -> Result<DickeProjection> {
        let weights = self.dicke_weights()?;
        let dim = self.dim();
        let mut model = vec![ZERO; dim * dim];
        for (l, &w) in weights.iter().enumerate() {
            add_dicke_projector(&mut model, self.n, l, w)?;
        }
        let residual = self
            .data
            .iter()
            .zip(&model)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        Ok(DickeProjection { weights, residual })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DickeProjection {
    pub weights: Vec<f64>,
    pub residual: f64,
}

/// Applies `K0 = |0><0| + sqrt(1-p)|1><1|`, `K1 = sqrt(p)|0><1|` to every
/// qubit, one qubit at a time.
pub fn apply_amplitude_damping(state: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "damping probability {p} outside [0, 1]"
        )));
    }
    let mut out = state.clone();
    let dim = out.dim();
    let keep = (1.0 - p).sqrt();
    for q in 0..out.n {
        let bit = 1usize << (out.n - 1 - q);
        for r in (0..dim).filter(|r| r & bit == 0) {
            for c in (0..dim).filter(|c| c & bit == 0) {
                let i00 = r * dim + c;
                let i01 = r * dim + (c | bit);
                let i10 = (r | bit) * dim + c;
                let i11 = (r | bit) * dim + (c | bit);
                let old11 = out.data[i11];
                out.data[i00] += p * old11;
                out.data[i01] *= keep;
                out.data[i10] *= keep;
                out.data[i11] = (1.0 - p) * old11;
            }
        }
    }
    Ok(out)
}

/// Partial trace over the last `m` qubits.
pub fn trace_out(state: &DensityMatrix, m: usize) -> Result<DensityMatrix> {
    if m >= state.n {
        return Err(Error::domain(format!(
            "cannot trace out {m} of {} qubits",
            state.n
        )));
    }
    let n = state.n - m;
    let dim = 1usize << n;
    let env = 1usize << m;
    let mut data = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            data[r * dim + c] = (0..env).map(|e| state.get(r * env + e, c * env + e)).sum();
        }
    }
    Ok(DensityMatrix { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_pure, DickeLabel};

    fn rho(n: usize, k: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&build_dicke(n, k).unwrap())
    }

    #[test]
    fn dicke_amplitudes() {
        let w = build_dicke(2, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w.amplitudes()[1].re - h).abs() < 1e-15);
        assert!((w.amplitudes()[2].re - h).abs() < 1e-15);
        assert_eq!(w.amplitudes()[0], ZERO);
        let v = build_dicke(3, 0).unwrap();
        assert_eq!(v.amplitudes()[0].re, 1.0);
        let d = build_dicke(4, 2).unwrap();
        let six: Vec<_> = d.amplitudes().iter().filter(|a| a.re > 0.0).collect();
        assert_eq!(six.len(), 6);
        assert!(six.iter().all(|a| (a.re - 1.0 / 6f64.sqrt()).abs() < 1e-15));
        assert!(build_dicke(13, 1).unwrap_err().is_resource());
        assert!(build_dicke(3, 4).is_err());
    }

    #[test]
    fn damping_of_w_is_the_binomial_mixture() {
        for n in 2..=6 {
            for p in [0.0, 0.17, 0.5, 1.0] {
                let out = apply_amplitude_damping(&rho(n, 1), p).unwrap();
                let model = make_pure(DickeLabel::new(n, 1).unwrap())
                    .excitation_loss(p)
                    .unwrap();
                let expected = DensityMatrix::from_mixture(&model).unwrap();
                assert!(out.max_abs_diff(&expected) < 1e-12, "n={n} p={p}");
                assert!((out.trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_out_of_w() {
        let reduced = trace_out(&rho(4, 1), 1).unwrap();
        let model = DickeMixture::new(3, [(1, 0.75), (0, 0.25)]).unwrap();
        let expected = DensityMatrix::from_mixture(&model).unwrap();
        assert!(reduced.max_abs_diff(&expected) < 1e-12);
        assert_eq!(trace_out(&rho(3, 1), 0).unwrap(), rho(3, 1));
        assert!(trace_out(&rho(3, 1), 3).is_err());
    }

    #[test]
    fn outputs_are_valid_states() {
        let damped = apply_amplitude_damping(&rho(4, 2), 0.3).unwrap();
        damped.validate().unwrap();
        trace_out(&damped, 2).unwrap().validate().unwrap();
    }
}
