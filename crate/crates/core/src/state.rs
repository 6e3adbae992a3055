//! Dicke states, Dicke mixtures and the two loss channels.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{ln_choose, ln_pow, log_binomial};
use crate::error::{Error, Result};

/// Tolerance on the total weight of a mixture.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Weights down to this negative value are treated as round-off and clamped.
pub const NEGATIVE_WEIGHT_TOL: f64 = -1e-15;

/// The pure symmetric Dicke state `|n, k>`: `n` parties, `k` excitations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DickeLabel {
    n: usize,
    k: usize,
}

impl DickeLabel {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("a Dicke state needs at least one party"));
        }
        if k > n {
            return Err(Error::InvalidLabel { n, k });
        }
        Ok(DickeLabel { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl fmt::Display for DickeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}>", self.n, self.k)
    }
}

/// Probability-weighted mixture of Dicke states on a common number of parties.
///
/// Both loss channels map Dicke mixtures to Dicke mixtures, so this is the
/// only state representation the evaluation code needs. Only excitation
/// counts with non-zero weight are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeMixture {
    n: usize,
    weights: BTreeMap<usize, f64>,
}

impl DickeMixture {
    /// Builds a mixture, clamping round-off negatives and renormalizing.
    pub fn new(n: usize, weights: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("a Dicke mixture needs at least one party"));
        }
        let mut map = BTreeMap::new();
        for (l, w) in weights {
            if l > n {
                return Err(Error::InvalidLabel { n, k: l });
            }
            if !w.is_finite() {
                return Err(Error::domain(format!("non-finite weight {w} at l = {l}")));
            }
            if w < NEGATIVE_WEIGHT_TOL {
                return Err(Error::domain(format!("negative weight {w} at l = {l}")));
            }
            *map.entry(l).or_insert(0.0) += w.max(0.0);
        }
        map.retain(|_, w| *w > 0.0);
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::domain(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        for w in map.values_mut() {
            *w /= total;
        }
        Ok(DickeMixture { n, weights: map })
    }

    /// Internal constructor for channel outputs whose weights are
    /// non-negative by construction and sum to one up to round-off.
    fn from_channel(n: usize, mut weights: BTreeMap<usize, f64>) -> Self {
        weights.retain(|_, w| *w > 0.0);
        let total: f64 = weights.values().sum();
        debug_assert!((total - 1.0).abs() < 1e-9, "channel output sums to {total}");
        for w in weights.values_mut() {
            *w /= total;
        }
        DickeMixture { n, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(excitation count, weight)` pairs in increasing excitation order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&l, &w)| (l, w))
    }

    pub fn weight(&self, l: usize) -> f64 {
        self.weights.get(&l).copied().unwrap_or(0.0)
    }

    /// Largest excitation count carrying weight.
    pub fn max_excitation(&self) -> usize {
        self.weights.keys().next_back().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Each component `(k, w)` sends weight `w C(k,l) (1-p)^l p^(k-l)` to `l`:
    /// every excitation is lost independently with probability `p`.
    pub fn excitation_loss(&self, p: f64) -> Result<DickeMixture> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!(
                "loss probability {p} outside [0, 1]"
            )));
        }
        let ln_keep = (-p).ln_1p();
        let ln_lose = p.ln();
        let mut out = BTreeMap::new();
        for (k, w) in self.iter() {
            for l in 0..=k {
                let ln_w = log_binomial(k as u64, l as i64)
                    + ln_pow(ln_keep, l as u64)
                    + ln_pow(ln_lose, (k - l) as u64);
                let contribution = w * ln_w.exp();
                if contribution > 0.0 {
                    *out.entry(l).or_insert(0.0) += contribution;
                }
            }
        }
        Ok(DickeMixture::from_channel(self.n, out))
    }

    /// Partial trace over `m` parties; component `(k, w)` sends weight
    /// `w C(n-m, l) C(m, k-l) / C(n, k)` to `l` on `n - m` parties.
    pub fn particle_loss(&self, m: usize) -> Result<DickeMixture> {
        if m >= self.n {
            return Err(Error::domain(format!(
                "cannot trace out {m} of {} parties",
                self.n
            )));
        }
        let n = self.n as i64;
        let nf = n - m as i64;
        let m = m as i64;
        let mut out = BTreeMap::new();
        for (k, w) in self.iter() {
            let k = k as i64;
            let ln_norm = ln_choose(n, k);
            for l in (k - m).max(0)..=k.min(nf) {
                let ln_w = ln_choose(nf, l) + ln_choose(m, k - l) - ln_norm;
                let contribution = w * ln_w.exp();
                if contribution > 0.0 {
                    *out.entry(l as usize).or_insert(0.0) += contribution;
                }
            }
        }
        Ok(DickeMixture::from_channel(nf as usize, out))
    }

    /// Relabels `|0> <-> |1>`: weight at `l` moves to `n - l`.
    pub fn flipped(&self) -> DickeMixture {
        DickeMixture {
            n: self.n,
            weights: self.iter().map(|(l, w)| (self.n - l, w)).collect(),
        }
    }
}

/// The point mass on `|n, k>`.
pub fn make_pure(label: DickeLabel) -> DickeMixture {
    DickeMixture {
        n: label.n,
        weights: BTreeMap::from([(label.k, 1.0)]),
    }
}

/// Which loss channel acts on the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Excitation,
    Particle,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Excitation => "excitation",
            LossKind::Particle => "particle",
        })
    }
}

/// A loss channel together with its strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LossModel {
    ExcitationLoss { p: f64 },
    ParticleLoss { m: usize },
}

impl LossModel {
    pub fn kind(&self) -> LossKind {
        match self {
            LossModel::ExcitationLoss { .. } => LossKind::Excitation,
            LossModel::ParticleLoss { .. } => LossKind::Particle,
        }
    }

    pub fn apply(&self, state: &DickeMixture) -> Result<DickeMixture> {
        match *self {
            LossModel::ExcitationLoss { p } => state.excitation_loss(p),
            LossModel::ParticleLoss { m } => state.particle_loss(m),
        }
    }
}
