//! Exhaustive grid search over small simplices, used as ground truth for
//! the solver and for the q-minimizers.
//!
//! Grid nodes are integer compositions `k/n` of the simplex, floored into
//! the open simplex the same way solver iterates are.

use rayon::prelude::*;

use crate::error::{Result, VoiError};
use crate::leakage::{g_functional, leakage_with, CsiszarConfig};
use crate::problem::{ActionDistribution, Channel, LeakageSpec, Prior, Problem};
use crate::simplex::floor_normalize;

/// Cap on `|X|·(|A| − 1)`, the dimension of the channel polytope.
pub const MAX_CHANNEL_DIM: usize = 4;
/// Cap on the number of grid evaluations.
pub const MAX_EVALUATIONS: f64 = 1e8;
/// Slack on the constraint comparisons, absorbing roundoff in leakage values
/// of exactly independent channels.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Step on each simplex coordinate; `1/resolution` is rounded to an
    /// integer number of steps.
    pub resolution: f64,
}

impl GridSpec {
    pub fn new(resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution <= 0.5) {
            return Err(VoiError::InvalidConfig(format!(
                "grid resolution {resolution} must lie in (0, 0.5]"
            )));
        }
        Ok(GridSpec { resolution })
    }

    pub fn steps(&self) -> usize {
        (1.0 / self.resolution).round() as usize
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { resolution: 0.002 }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of points of the `parts`-simplex grid with `steps` steps.
pub fn simplex_grid_size(parts: usize, steps: usize) -> f64 {
    binomial(steps + parts - 1, parts - 1)
}

/// All points of the simplex grid, floored.
pub fn simplex_grid(parts: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, steps: usize, out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            let mut v: Vec<f64> = cur.iter().map(|&k| k as f64 / steps as f64).collect();
            floor_normalize(&mut v);
            out.push(v);
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, steps, out);
        }
    }
    rec(0, steps, &mut cur, steps, &mut out);
    out
}

/// `(E[ℓ], L)` for every channel on the grid of a problem, computed once and
/// queried for many budgets.
#[derive(Debug, Clone)]
pub struct ChannelTable {
    entries: Vec<(f64, f64)>,
}

impl ChannelTable {
    pub fn build(problem: &Problem, grid: &GridSpec) -> Result<Self> {
        let (nx, na) = (problem.n_inputs(), problem.n_actions());
        if nx * (na - 1) > MAX_CHANNEL_DIM {
            return Err(VoiError::GridTooLarge(format!(
                "|X|·(|A|−1) = {} exceeds {MAX_CHANNEL_DIM}",
                nx * (na - 1)
            )));
        }
        let steps = grid.steps();
        let count = simplex_grid_size(na, steps).powi(nx as i32);
        if count > MAX_EVALUATIONS {
            return Err(VoiError::GridTooLarge(format!(
                "{count:.3e} channels at resolution {} exceeds {MAX_EVALUATIONS:e}",
                grid.resolution
            )));
        }
        let rows = simplex_grid(na, steps);
        let m = rows.len();
        let total = m.pow(nx as u32);
        let cfg = CsiszarConfig::default();
        let entries = (0..total)
            .into_par_iter()
            .map(|mut idx| {
                let mut data = Vec::with_capacity(nx * na);
                for _ in 0..nx {
                    data.extend_from_slice(&rows[idx % m]);
                    idx /= m;
                }
                let ch = Channel::from_weights(nx, na, data);
                let el = ch.expected_loss(&problem.prior, &problem.loss);
                leakage_with(&problem.leakage, &problem.prior, &ch, &cfg).map(|l| (el, l))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelTable { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `min E[ℓ]` over grid channels with `L ≤ rate`.
    pub fn min_loss(&self, rate: f64) -> Result<f64> {
        self.entries
            .iter()
            .filter(|(_, l)| *l <= rate + FEASIBILITY_SLACK)
            .map(|(e, _)| *e)
            .min_by(f64::total_cmp)
            .ok_or_else(|| VoiError::InvalidConfig(format!("no grid channel has leakage ≤ {rate}")))
    }

    /// `min L` over grid channels with `E[ℓ] ≤ u`.
    pub fn min_leakage(&self, u: f64) -> Result<f64> {
        self.entries
            .iter()
            .filter(|(e, _)| *e <= u + FEASIBILITY_SLACK)
            .map(|(_, l)| *l)
            .min_by(f64::total_cmp)
            .ok_or_else(|| VoiError::InvalidConfig(format!("no grid channel has expected loss ≤ {u}")))
    }
}

/// Grid estimate of `U(R) = min { E[ℓ] : L(X → A) ≤ R }`.
pub fn brute_force_u(problem: &Problem, rate: f64, grid: &GridSpec) -> Result<f64> {
    ChannelTable::build(problem, grid)?.min_loss(rate)
}

/// Grid estimate of the inverse `R(U) = min { L(X → A) : E[ℓ] ≤ U }`.
pub fn brute_force_r_of_u(problem: &Problem, u: f64, grid: &GridSpec) -> Result<f64> {
    ChannelTable::build(problem, grid)?.min_leakage(u)
}

/// Minimizes `G(channel, ·)` over the q-grid; `|A| ≤ 3`.
pub fn grid_min_q(
    spec: &LeakageSpec,
    prior: &Prior,
    channel: &Channel,
    grid: &GridSpec,
) -> Result<(ActionDistribution, f64)> {
    let na = channel.n_actions();
    if na > 3 {
        return Err(VoiError::GridTooLarge(format!("q-grid needs |A| ≤ 3, got {na}")));
    }
    let steps = grid.steps();
    if simplex_grid_size(na, steps) > MAX_EVALUATIONS {
        return Err(VoiError::GridTooLarge(format!("q-grid at resolution {} is too fine", grid.resolution)));
    }
    let best = simplex_grid(na, steps)
        .into_par_iter()
        .map(|q| {
            let q = ActionDistribution::from_weights(q);
            g_functional(spec, prior, channel, &q).map(|g| (q, g.value))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is never empty");
    Ok(best)
}
