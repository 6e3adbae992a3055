//! Deterministic maximization over measurement-angle pairs.
//!
//! A coarse uniform grid, optional caller seeds and a "zoom" set concentrated
//! near the angles `0, +-pi/2, pi` (where optima sit at large `n`, at
//! distances of order `1/sqrt(n)`) are ranked; the best few starts are then
//! refined with Nelder-Mead.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angles::MeasurementPair;
use crate::bell::{AngleTrig, EvalOptions, InequalityKind};
use crate::error::{Error, Result};
use crate::state::DickeMixture;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Points per axis of the uniform grid over `(-pi, pi]`.
    pub grid: usize,
    /// Add the zoom seeds for this many parties or more.
    pub zoom_min_n: usize,
    /// Grid or zoom points refined in addition to the caller seeds.
    pub refine_top: usize,
    /// Simplex diameter (radians) at which refinement stops.
    pub xtol: f64,
    /// Objective evaluations per refinement.
    pub max_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid: 64,
            zoom_min_n: 16,
            refine_top: 6,
            xtol: 1e-10,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub angles: MeasurementPair,
    pub value: f64,
    /// Best value over the grid and zoom points alone.
    pub grid_value: f64,
    pub evaluations: usize,
}

/// A start point with its initial simplex scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub angles: MeasurementPair,
    pub step: f64,
}

impl Seed {
    pub fn new(angles: MeasurementPair, step: f64) -> Self {
        Seed { angles, step }
    }
}

/// `alpha_i = -pi + 2 pi (i + 1) / size` on both axes.
pub fn grid_points(size: usize) -> Vec<MeasurementPair> {
    let axis: Vec<f64> = (0..size)
        .map(|i| -PI + TAU * (i + 1) as f64 / size as f64)
        .collect();
    let mut out = Vec::with_capacity(size * size);
    for &a0 in &axis {
        for &a1 in &axis {
            out.push(MeasurementPair {
                alpha0: a0,
                alpha1: a1,
            });
        }
    }
    out
}

const ZOOM_SCALES: [f64; 9] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

/// Axis values `c +- 2 atan(s / sqrt(n))` around `c in {0, pi/2, pi, -pi/2}`,
/// paired with the local step size.
fn zoom_axis(n: usize) -> Vec<(f64, f64)> {
    let rn = (n as f64).sqrt();
    let mut axis = Vec::new();
    for c in [0.0, FRAC_PI_2, PI, -FRAC_PI_2] {
        axis.push((c, 1.0 / rn));
        for s in ZOOM_SCALES {
            let d = 2.0 * (s / rn).atan();
            axis.push((c + d, 0.5 * d));
            axis.push((c - d, 0.5 * d));
        }
    }
    axis
}

pub fn zoom_seeds(n: usize) -> Vec<Seed> {
    let axis = zoom_axis(n);
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for &(a0, d0) in &axis {
        for &(a1, d1) in &axis {
            let angles = MeasurementPair::new(a0, a1).expect("finite");
            out.push(Seed::new(angles, d0.min(d1)));
        }
    }
    out
}

fn pair(x: [f64; 2]) -> MeasurementPair {
    MeasurementPair::new(x[0], x[1]).expect("finite simplex vertex")
}

/// Nelder-Mead maximization on the torus, starting from a right simplex.
fn nelder_mead<F>(
    f: &mut F,
    seed: &Seed,
    xtol: f64,
    max_evals: usize,
) -> Result<(MeasurementPair, f64, usize)>
where
    F: FnMut(&MeasurementPair) -> Result<f64>,
{
    let mut evals = 0usize;
    let mut eval = |x: [f64; 2], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(&pair(x))?;
        // Minimize the negative; NaN is treated as the worst possible value.
        Ok(if v.is_nan() { f64::INFINITY } else { -v })
    };
    let x0 = [seed.angles.alpha0, seed.angles.alpha1];
    let h = seed.step;
    let mut simplex = [x0, [x0[0] + h, x0[1]], [x0[0], x0[1] + h]];
    let mut fv = [0.0; 3];
    for i in 0..3 {
        fv[i] = eval(simplex[i], &mut evals)?;
    }
    while evals < max_evals {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
        fv = [fv[idx[0]], fv[idx[1]], fv[idx[2]]];

        let diameter = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| (simplex[i][0] - simplex[j][0]).hypot(simplex[i][1] - simplex[j][1]))
            .fold(0.0, f64::max);
        if diameter < xtol {
            break;
        }

        let c = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                c[0] + t * (simplex[2][0] - c[0]),
                c[1] + t * (simplex[2][1] - c[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = eval(xr, &mut evals)?;
        if fr < fv[0] {
            let xe = along(-2.0);
            let fe = eval(xe, &mut evals)?;
            if fe < fr {
                simplex[2] = xe;
                fv[2] = fe;
            } else {
                simplex[2] = xr;
                fv[2] = fr;
            }
        } else if fr < fv[1] {
            simplex[2] = xr;
            fv[2] = fr;
        } else {
            let (xc, fc) = if fr < fv[2] {
                let xc = along(-0.5);
                (xc, eval(xc, &mut evals)?)
            } else {
                let xc = along(0.5);
                (xc, eval(xc, &mut evals)?)
            };
            if fc < fv[2].min(fr) {
                simplex[2] = xc;
                fv[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    fv[i] = eval(simplex[i], &mut evals)?;
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&a, &b| fv[a].total_cmp(&fv[b]))
        .expect("three vertices");
    Ok((pair(simplex[best]), -fv[best], evals))
}

/// Maximizes `objective` from the caller seeds, the uniform grid and, for
/// `n >= zoom_min_n`, the zoom set. Ties keep the earliest candidate, so the
/// result is deterministic.
pub fn optimize_angles<F>(
    mut objective: F,
    n: usize,
    seeds: &[Seed],
    config: &OptimizerConfig,
) -> Result<OptimizeOutcome>
where
    F: FnMut(&MeasurementPair) -> Result<f64>,
{
    if seeds.is_empty() && config.grid == 0 {
        return Err(Error::domain("optimizer needs at least one seed or a grid"));
    }
    let mut evaluations = 0usize;
    let grid_step = PI / config.grid.max(1) as f64;
    let mut scanned: Vec<(f64, Seed)> = Vec::new();
    for angles in grid_points(config.grid) {
        evaluations += 1;
        scanned.push((objective(&angles)?, Seed::new(angles, grid_step)));
    }
    if n >= config.zoom_min_n {
        for seed in zoom_seeds(n) {
            evaluations += 1;
            scanned.push((objective(&seed.angles)?, seed));
        }
    }
    // Stable sort: equal values keep generation order.
    scanned.sort_by(|a, b| b.0.total_cmp(&a.0));
    let grid_value = scanned.first().map_or(f64::NEG_INFINITY, |s| s.0);

    let mut starts: Vec<Seed> = seeds.to_vec();
    starts.extend(scanned.iter().take(config.refine_top).map(|s| s.1));

    let mut best: Option<(MeasurementPair, f64)> = scanned.first().map(|s| (s.1.angles, s.0));
    for seed in &starts {
        let (angles, value, used) =
            nelder_mead(&mut objective, seed, config.xtol, config.max_evals)?;
        evaluations += used;
        if best.is_none_or(|b| value > b.1) {
            best = Some((angles, value));
        }
    }
    let (angles, value) = best.expect("at least one candidate");
    Ok(OptimizeOutcome {
        angles,
        value,
        grid_value,
        evaluations,
    })
}

/// How far a state is from the local bound at given angles: the Hardy value,
/// or `|M| / 2^n - 1`. Positive exactly on violation.
pub fn bell_margin(
    state: &DickeMixture,
    kind: InequalityKind,
    angles: &MeasurementPair,
    eval: &EvalOptions,
) -> Result<f64> {
    let trig = AngleTrig::new(angles);
    let n = state.n();
    let mut v = 0.0;
    for (l, w) in state.iter() {
        v += w * match kind {
            InequalityKind::Hardy => crate::bell::hardy_component(n, l, &trig),
            InequalityKind::Mabk => crate::bell::mabk_component(n, l, &trig, eval).value,
        };
    }
    Ok(match kind {
        InequalityKind::Hardy => v,
        InequalityKind::Mabk => v.abs() - 1.0,
    })
}

/// Maximizes the Bell margin of a fixed state.
pub fn optimize_bell(
    state: &DickeMixture,
    kind: InequalityKind,
    seeds: &[Seed],
    config: &OptimizerConfig,
    eval: &EvalOptions,
) -> Result<OptimizeOutcome> {
    if kind == InequalityKind::Mabk && state.n() > eval.mabk_cap {
        return Err(Error::Resource {
            what: "MABK party count",
            value: state.n(),
            cap: eval.mabk_cap,
        });
    }
    optimize_angles(
        |a| bell_margin(state, kind, a, eval),
        state.n(),
        seeds,
        config,
    )
}
