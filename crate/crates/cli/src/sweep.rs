//! Batches of threshold computations run on a bounded worker pool.

use std::str::FromStr;
use std::time::Instant;

use dicke_core::threshold::{check_cap, check_nk};
use dicke_core::{
    threshold_excitation, threshold_particle, InequalityKind, LossKind, ThresholdOptions,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::record::SweepRecord;

/// Inclusive integer set given as `a`, `a..b` or `a,b,c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSet(pub Vec<usize>);

impl FromStr for IntSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("'{t}' is not a non-negative integer"))
        };
        let values: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<Result<_, _>>()?
        };
        if values.is_empty() {
            return Err("empty set".into());
        }
        Ok(IntSet(values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub n: usize,
    pub k: usize,
    pub model: LossKind,
    pub inequality: InequalityKind,
}

impl Task {
    pub fn new(n: usize, k: usize, model: LossKind, inequality: InequalityKind) -> Self {
        Task {
            n,
            k,
            model,
            inequality,
        }
    }

    fn run(&self, opts: &ThresholdOptions, timing: bool) -> SweepRecord {
        let start = Instant::now();
        let result = match self.model {
            LossKind::Excitation => threshold_excitation(self.n, self.k, self.inequality, opts),
            LossKind::Particle => threshold_particle(self.n, self.k, self.inequality, opts),
        };
        let seconds = timing.then(|| start.elapsed().as_secs_f64());
        match result {
            Ok(r) => SweepRecord::from_result(&r, seconds),
            Err(e) => SweepRecord::failed(self.n, self.k, self.model, self.inequality, &e, seconds),
        }
    }
}

/// Cartesian product of `ns` and `ks` in ascending order.
pub fn grid_tasks(
    ns: &[usize],
    ks: &[usize],
    model: LossKind,
    inequality: InequalityKind,
) -> Vec<Task> {
    let mut tasks: Vec<Task> = ns
        .iter()
        .flat_map(|&n| ks.iter().map(move |&k| Task::new(n, k, model, inequality)))
        .collect();
    tasks.sort_by_key(|t| (t.n, t.k));
    tasks.dedup();
    tasks
}

/// Rejects tuples outside the domain of the threshold operations before any
/// work starts.
pub fn validate(tasks: &[Task], opts: &ThresholdOptions) -> CliResult<()> {
    if tasks.is_empty() {
        return Err(CliError::usage("nothing to compute"));
    }
    for t in tasks {
        check_nk(t.n, t.k)?;
        check_cap(t.inequality, t.n, &opts.eval)?;
    }
    Ok(())
}

/// Runs every task with at most `jobs` workers. Output order follows
/// [`SweepRecord::sort_key`] regardless of scheduling.
pub fn run_tasks(
    tasks: &[Task],
    opts: &ThresholdOptions,
    jobs: usize,
    timing: bool,
) -> CliResult<Vec<SweepRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::usage(format!("worker pool: {e}")))?;
    let mut records: Vec<SweepRecord> =
        pool.install(|| tasks.par_iter().map(|t| t.run(opts, timing)).collect());
    records.sort_by_key(SweepRecord::sort_key);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_sets() {
        assert_eq!("2..5".parse::<IntSet>().unwrap().0, vec![2, 3, 4, 5]);
        assert_eq!("4..4".parse::<IntSet>().unwrap().0, vec![4]);
        assert_eq!(
            "100,200, 500".parse::<IntSet>().unwrap().0,
            vec![100, 200, 500]
        );
        assert_eq!("7".parse::<IntSet>().unwrap().0, vec![7]);
        assert!("5..2".parse::<IntSet>().is_err());
        assert!("a..3".parse::<IntSet>().is_err());
        assert!("-1".parse::<IntSet>().is_err());
    }

    #[test]
    fn validation() {
        let opts = ThresholdOptions::default();
        let ok = grid_tasks(&[4], &[1, 3], LossKind::Excitation, InequalityKind::Hardy);
        validate(&ok, &opts).unwrap();
        let bad = grid_tasks(&[4], &[4], LossKind::Excitation, InequalityKind::Hardy);
        assert_eq!(validate(&bad, &opts).unwrap_err().exit_code(), 2);
        let big = grid_tasks(&[5000], &[1], LossKind::Excitation, InequalityKind::Mabk);
        assert_eq!(validate(&big, &opts).unwrap_err().exit_code(), 3);
        assert!(validate(&[], &opts).is_err());
    }

    #[test]
    fn job_count_does_not_change_output() {
        let tasks = grid_tasks(&[6, 5], &[1, 2], LossKind::Particle, InequalityKind::Mabk);
        let opts = ThresholdOptions::default();
        let one = run_tasks(&tasks, &opts, 1, false).unwrap();
        let three = run_tasks(&tasks, &opts, 3, false).unwrap();
        assert_eq!(one, three);
        assert_eq!(
            one.iter().map(|r| (r.n, r.k)).collect::<Vec<_>>(),
            vec![(5, 1), (5, 2), (6, 1), (6, 2)]
        );
    }
}
