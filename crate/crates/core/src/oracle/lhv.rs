use super::tensor::{hardy_from_tensor, mabk_from_tensor, ProbabilityTensor};
use crate::error::{Error, Result};

/// Largest party count for exhaustive strategy enumeration (`4^n` strategies).
pub const LHV_CAP: usize = 6;

/// Tensor of the deterministic strategy in which party `q` answers
/// `outcomes[q][x]` (true for `-1`) to input `x`.
pub fn deterministic_tensor(outcomes: &[[bool; 2]]) -> ProbabilityTensor {
    let n = outcomes.len();
    let mut values = vec![0.0; 1 << (2 * n)];
    for x in 0..1usize << n {
        let a = (0..n).fold(0usize, |acc, q| {
            let setting = x >> (n - 1 - q) & 1;
            if outcomes[q][setting] {
                acc | 1 << (n - 1 - q)
            } else {
                acc
            }
        });
        values[(x << n) + a] = 1.0;
    }
    ProbabilityTensor::from_values(n, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhvExtremes {
    pub strategies: usize,
    pub max_hardy: f64,
    pub max_abs_mabk: f64,
}

/// Largest Hardy value and largest `|MABK|` over all deterministic local
/// strategies. All quantities are integers, so the evaluation is exact.
pub fn lhv_extremes(n: usize) -> Result<LhvExtremes> {
    if n == 0 || n > LHV_CAP {
        return Err(Error::Resource {
            what: "LHV enumeration parties",
            value: n,
            cap: LHV_CAP,
        });
    }
    let mut max_hardy = f64::NEG_INFINITY;
    let mut max_abs_mabk = 0.0f64;
    let total = 1usize << (2 * n);
    for code in 0..total {
        let outcomes: Vec<[bool; 2]> = (0..n)
            .map(|q| {
                let c = code >> (2 * q) & 3;
                [c & 1 == 1, c & 2 == 2]
            })
            .collect();
        let t = deterministic_tensor(&outcomes);
        max_hardy = max_hardy.max(hardy_from_tensor(&t));
        max_abs_mabk = max_abs_mabk.max(mabk_from_tensor(&t).abs());
    }
    Ok(LhvExtremes {
        strategies: total,
        max_hardy,
        max_abs_mabk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_tight() {
        for n in 1..=3 {
            let e = lhv_extremes(n).unwrap();
            assert_eq!(e.strategies, 1 << (2 * n));
            assert_eq!(e.max_hardy, 0.0);
            assert_eq!(e.max_abs_mabk, 2f64.powi(n as i32));
        }
        assert!(lhv_extremes(7).unwrap_err().is_resource());
    }
}
