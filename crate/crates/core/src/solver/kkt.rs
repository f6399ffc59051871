//! First-order optimality certificates for the two blocks of `F_β`.

use crate::error::{Result, VoiError};
use crate::leakage::g_gradient_q;
use crate::problem::{ActionDistribution, Channel, LeakageSpec, LossMatrix, Prior};
use crate::simplex::simplex_kkt_residual;

/// Row-normalized partial derivatives `∂F_β/∂p(a|x) / p_X(x)` at `(p, q)`.
///
/// Stationarity of row `x` on the simplex reads
/// `terms[x][a] + λ_x = 0` on the support and `≥ 0` off it.
pub fn stationarity_terms(
    spec: &LeakageSpec,
    prior: &Prior,
    loss: &LossMatrix,
    channel: &Channel,
    q: &ActionDistribution,
    beta: f64,
) -> Result<Vec<Vec<f64>>> {
    if prior.len() != channel.n_inputs()
        || loss.n_inputs() != channel.n_inputs()
        || loss.n_actions() != channel.n_actions()
        || q.len() != channel.n_actions()
    {
        return Err(VoiError::DimensionMismatch("stationarity terms: shapes disagree".into()));
    }
    let q = q.probs();
    let px = prior.probs();
    let na = q.len();
    let rows: Vec<&[f64]> = channel.rows().collect();
    let mut out: Vec<Vec<f64>> = loss.rows().map(<[f64]>::to_vec).collect();
    if beta == 0.0 {
        return Ok(out);
    }
    match spec {
        LeakageSpec::Shannon => {
            for (t, r) in out.iter_mut().zip(&rows) {
                for a in 0..na {
                    t[a] += beta * ((r[a] / q[a]).ln() + 1.0);
                }
            }
        }
        LeakageSpec::F(f) => {
            for (t, r) in out.iter_mut().zip(&rows) {
                for a in 0..na {
                    t[a] += beta * f.deriv(r[a] / q[a]);
                }
            }
        }
        LeakageSpec::Arimoto(o) | LeakageSpec::Sibson(o) | LeakageSpec::Csiszar(o) => {
            let al = o.value();
            let scale = al * beta / (al - 1.0);
            // (p/q)^{α−1}, shared by all three
            let pow: Vec<Vec<f64>> =
                rows.iter().map(|r| (0..na).map(|a| (r[a] / q[a]).powf(al - 1.0)).collect()).collect();
            // Σ_a p^α q^{1−α} per row
            let w: Vec<f64> =
                rows.iter().zip(&pow).map(|(r, pw)| (0..na).map(|a| r[a] * pw[a]).sum()).collect();
            match spec {
                LeakageSpec::Csiszar(_) => {
                    for x in 0..out.len() {
                        for a in 0..na {
                            out[x][a] += scale * pow[x][a] / w[x];
                        }
                    }
                }
                LeakageSpec::Sibson(_) => {
                    let total: f64 = px.iter().zip(&w).map(|(p, wx)| p * wx).sum();
                    for x in 0..out.len() {
                        for a in 0..na {
                            out[x][a] += scale * pow[x][a] / total;
                        }
                    }
                }
                _ => {
                    let total: f64 = px.iter().zip(&w).map(|(p, wx)| p.powf(al) * wx).sum();
                    for x in 0..out.len() {
                        let lift = px[x].powf(al - 1.0);
                        for a in 0..na {
                            out[x][a] += scale * lift * pow[x][a] / total;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Largest per-row simplex KKT violation of the p-block, with the row
/// multipliers `λ_x = −Σ_a p(a|x)·terms[x][a]`.
pub fn kkt_residual_p(
    spec: &LeakageSpec,
    prior: &Prior,
    loss: &LossMatrix,
    channel: &Channel,
    q: &ActionDistribution,
    beta: f64,
) -> Result<(f64, Vec<f64>)> {
    let terms = stationarity_terms(spec, prior, loss, channel, q, beta)?;
    let mut worst = 0.0_f64;
    let mut lambdas = Vec::with_capacity(terms.len());
    for (t, r) in terms.iter().zip(channel.rows()) {
        worst = worst.max(simplex_kkt_residual(r, t));
        lambdas.push(-r.iter().zip(t).map(|(p, g)| p * g).sum::<f64>());
    }
    Ok((worst, lambdas))
}

/// Simplex KKT violation of `min_q G(p, q)` and its multiplier.
pub fn kkt_residual_q(
    spec: &LeakageSpec,
    prior: &Prior,
    channel: &Channel,
    q: &ActionDistribution,
) -> (f64, f64) {
    let grad = g_gradient_q(spec, prior, channel, q);
    let lambda = -q.probs().iter().zip(&grad).map(|(w, g)| w * g).sum::<f64>();
    (simplex_kkt_residual(q.probs(), &grad), lambda)
}
