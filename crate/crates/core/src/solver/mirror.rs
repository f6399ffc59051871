//! Generic p-step: entropic mirror descent on `F_β(·, q)` with Armijo
//! backtracking. Slower than the measure-specific updates but makes no use
//! of their structure, so it doubles as a cross-check.

use crate::error::{Result, VoiError};
use crate::problem::{ActionDistribution, Channel, LeakageSpec, LossMatrix, Prior};
use crate::simplex::log_sum_exp;

use super::kkt::{kkt_residual_p, stationarity_terms};
use super::{f_beta, InnerConfig};

const ARMIJO: f64 = 1e-4;

#[allow(clippy::too_many_arguments)]
pub fn p_update_mirror(
    spec: &LeakageSpec,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
    start: &Channel,
) -> Result<Channel> {
    let (nx, na) = (loss.n_inputs(), loss.n_actions());
    let px = prior.probs();
    let mut p = start.clone();
    let mut f = f_beta(spec, prior, loss, &p, q, beta)?;
    let mut eta = 1.0;
    let mut residual = f64::INFINITY;
    for _ in 0..inner.mirror_max_iter {
        residual = kkt_residual_p(spec, prior, loss, &p, q, beta)?.0;
        if residual <= inner.mirror_tol {
            return Ok(p);
        }
        let g = stationarity_terms(spec, prior, loss, &p, q, beta)?;
        let mut accepted = false;
        for _ in 0..200 {
            let mut data = Vec::with_capacity(nx * na);
            for (row, gx) in p.rows().zip(&g) {
                let logits: Vec<f64> = row.iter().zip(gx).map(|(pa, ga)| pa.ln() - eta * ga).collect();
                let lse = log_sum_exp(&logits);
                data.extend(logits.iter().map(|l| (l - lse).exp()));
            }
            let cand = Channel::from_weights(nx, na, data);
            let decrease: f64 = cand
                .rows()
                .zip(p.rows())
                .zip(&g)
                .zip(px)
                .map(|(((c, o), gx), w)| {
                    w * c.iter().zip(o).zip(gx).map(|((ci, oi), gi)| gi * (ci - oi)).sum::<f64>()
                })
                .sum();
            let fc = f_beta(spec, prior, loss, &cand, q, beta)?;
            if fc <= f + ARMIJO * decrease {
                p = cand;
                f = fc;
                eta *= 2.0;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(VoiError::NoConvergence { iterations: inner.mirror_max_iter, residual })
}
