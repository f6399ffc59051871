//! The five leakage measures, their variational functionals `G(p, q)` and
//! the minimizers over `q`.
//!
//! Each measure is `L(p_X, p_{A|X}) = min_q G(p_{A|X}, q)`:
//!
//! | measure   | `G(p, q)`                                   |
//! |-----------|---------------------------------------------|
//! | Shannon   | `D(p_X p ‖ p_X q)`                          |
//! | f-leakage | `D_f(p_X p ‖ p_X q)`                        |
//! | Arimoto   | `D_α(p_X p ‖ u_X q) − D_α(p_X ‖ u_X)`       |
//! | Sibson    | `D_α(p_X p ‖ p_X q)`                        |
//! | Csiszár   | `E_X[D_α(p(·|X) ‖ q)]`                      |
//!
//! All but Csiszár's have a closed-form minimizer. Csiszár's is found by a
//! multiplicative fixed-point iteration with a certified stationarity
//! residual.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VoiError};
use crate::generator::FGenerator;
use crate::measures::{
    arimoto_conditional_entropy, f_divergence, kl_divergence, renyi_divergence, renyi_entropy,
    JointDistribution,
};
use crate::problem::{ActionDistribution, Channel, LeakageSpec, Prior};
use crate::simplex::{floor_normalize, log_sum_exp, simplex_kkt_residual};

/// Settings of the Csiszár q-iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsiszarConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the full multiplicative step `q ← q·c^{1/α}`.
    pub damping: f64,
}

impl Default for CsiszarConfig {
    fn default() -> Self {
        CsiszarConfig { tol: 1e-10, max_iter: 5000, damping: 1.0 }
    }
}

/// Value of `G(p_{A|X}, q_A)` for a given measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEvaluation {
    pub value: f64,
    pub measure: LeakageSpec,
}

fn rows(channel: &Channel) -> Vec<&[f64]> {
    channel.rows().collect()
}

fn product_mass(prior: &[f64], q: &[f64]) -> Vec<f64> {
    prior.iter().flat_map(|&px| q.iter().map(move |&qa| px * qa)).collect()
}

fn check_dims(prior: &Prior, channel: &Channel) -> Result<()> {
    if prior.len() != channel.n_inputs() {
        return Err(VoiError::DimensionMismatch(format!(
            "prior has {} symbols, channel has {} rows",
            prior.len(),
            channel.n_inputs()
        )));
    }
    Ok(())
}

pub fn optimal_q_shannon(prior: &Prior, channel: &Channel) -> ActionDistribution {
    ActionDistribution::from_weights(channel.marginal(prior))
}

/// Mutual information `I(X; A)`.
pub fn shannon_mi(prior: &Prior, channel: &Channel) -> f64 {
    let q = optimal_q_shannon(prior, channel);
    let joint = JointDistribution::new(prior, channel);
    kl_divergence(joint.mass(), &product_mass(prior.probs(), q.probs()))
        .expect("floored marginal has full support")
}

/// Closed-form minimizer of `D_f(p_X p ‖ p_X q)` over `q`.
pub fn optimal_q_f(f: &FGenerator, prior: &Prior, channel: &Channel) -> ActionDistribution {
    ActionDistribution::from_weights(f.minimizer_weights(prior.probs(), &rows(channel)))
}

pub fn f_leakage(f: &FGenerator, prior: &Prior, channel: &Channel) -> f64 {
    let q = optimal_q_f(f, prior, channel);
    let joint = JointDistribution::new(prior, channel);
    f_divergence(f, joint.mass(), &product_mass(prior.probs(), q.probs()))
        .expect("floored minimizer has full support")
}

fn order(alpha: f64) -> Result<f64> {
    crate::problem::Order::new(alpha).map(|o| o.value())
}

/// Minimizer of the Arimoto functional:
/// `q(a) ∝ (Σ_x p_X(x)^α p(a|x)^α)^{1/α}`.
pub fn optimal_q_arimoto(alpha: f64, prior: &Prior, channel: &Channel) -> Result<ActionDistribution> {
    let alpha = order(alpha)?;
    let w = (0..channel.n_actions())
        .map(|a| {
            channel
                .rows()
                .zip(prior.probs())
                .map(|(r, &px)| (px * r[a]).powf(alpha))
                .sum::<f64>()
                .powf(1.0 / alpha)
        })
        .collect();
    Ok(ActionDistribution::from_weights(w))
}

/// Arimoto's mutual information `H_α(X) − H_α^A(X|A)`.
pub fn arimoto_mi(alpha: f64, prior: &Prior, channel: &Channel) -> Result<f64> {
    let h = renyi_entropy(alpha, prior.probs())?;
    let hc = arimoto_conditional_entropy(alpha, &JointDistribution::new(prior, channel))?;
    Ok(h - hc)
}

/// Minimizer of the Sibson functional:
/// `q(a) ∝ (Σ_x p_X(x) p(a|x)^α)^{1/α}`.
pub fn optimal_q_sibson(alpha: f64, prior: &Prior, channel: &Channel) -> Result<ActionDistribution> {
    let alpha = order(alpha)?;
    let w = (0..channel.n_actions())
        .map(|a| {
            channel
                .rows()
                .zip(prior.probs())
                .map(|(r, &px)| px * r[a].powf(alpha))
                .sum::<f64>()
                .powf(1.0 / alpha)
        })
        .collect();
    Ok(ActionDistribution::from_weights(w))
}

/// Sibson's mutual information `(α/(α−1)) log Σ_a (Σ_x p_X p(a|x)^α)^{1/α}`.
pub fn sibson_mi(alpha: f64, prior: &Prior, channel: &Channel) -> Result<f64> {
    let alpha = order(alpha)?;
    let s: f64 = (0..channel.n_actions())
        .map(|a| {
            channel
                .rows()
                .zip(prior.probs())
                .map(|(r, &px)| px * r[a].powf(alpha))
                .sum::<f64>()
                .powf(1.0 / alpha)
        })
        .sum();
    Ok(alpha / (alpha - 1.0) * s.ln())
}

/// `c_a = Σ_x p_X(x) p(a|x)^α q(a)^{−α} / Σ_{a'} p(a'|x)^α q(a')^{1−α}`,
/// evaluated in the log domain. Stationarity of the Csiszár functional is
/// `c_a = 1` for every `a`.
fn csiszar_ratios(alpha: f64, prior: &[f64], rows: &[&[f64]], log_q: &[f64]) -> Vec<f64> {
    let n = log_q.len();
    let mut c = vec![0.0; n];
    let mut terms = vec![0.0; n];
    for (row, &px) in rows.iter().zip(prior) {
        for a in 0..n {
            terms[a] = alpha * row[a].ln() + (1.0 - alpha) * log_q[a];
        }
        let log_w = log_sum_exp(&terms);
        for a in 0..n {
            c[a] += px * (alpha * (row[a].ln() - log_q[a]) - log_w).exp();
        }
    }
    c
}

/// KKT residual of the Csiszár q-stationarity equation at `q`.
pub fn csiszar_q_residual(alpha: f64, prior: &Prior, channel: &Channel, q: &ActionDistribution) -> f64 {
    let log_q: Vec<f64> = q.probs().iter().map(|v| v.ln()).collect();
    let grad: Vec<f64> =
        csiszar_ratios(alpha, prior.probs(), &rows(channel), &log_q).into_iter().map(|c| -c).collect();
    simplex_kkt_residual(q.probs(), &grad)
}

/// Minimizer of `E_X[D_α(p(·|X) ‖ q)]` over `q`.
///
/// Iterates `q ← q·c^{d/α}` (normalized) from the marginal, with `c` the
/// stationarity ratios above and `d` the damping, until the KKT residual
/// drops to `cfg.tol`.
pub fn optimal_q_csiszar(
    alpha: f64,
    prior: &Prior,
    channel: &Channel,
    cfg: &CsiszarConfig,
) -> Result<ActionDistribution> {
    let alpha = order(alpha)?;
    check_dims(prior, channel)?;
    let rows = rows(channel);
    let mut q = optimal_q_shannon(prior, channel).probs().to_vec();
    let step = cfg.damping / alpha;
    let mut residual = f64::INFINITY;
    for _ in 0..=cfg.max_iter {
        let log_q: Vec<f64> = q.iter().map(|v| v.ln()).collect();
        let c = csiszar_ratios(alpha, prior.probs(), &rows, &log_q);
        let grad: Vec<f64> = c.iter().map(|v| -v).collect();
        residual = simplex_kkt_residual(&q, &grad);
        if residual <= cfg.tol {
            return Ok(ActionDistribution::from_weights(q));
        }
        let m = log_q.iter().zip(&c).map(|(lq, ci)| lq + step * ci.ln()).fold(f64::NEG_INFINITY, f64::max);
        for ((qa, lq), ci) in q.iter_mut().zip(&log_q).zip(&c) {
            *qa = (lq + step * ci.ln() - m).exp();
        }
        floor_normalize(&mut q);
    }
    Err(VoiError::NoConvergence { iterations: cfg.max_iter, residual })
}

/// Csiszár's mutual information of order α.
pub fn csiszar_mi(alpha: f64, prior: &Prior, channel: &Channel) -> Result<f64> {
    csiszar_mi_with(alpha, prior, channel, &CsiszarConfig::default())
}

pub fn csiszar_mi_with(alpha: f64, prior: &Prior, channel: &Channel, cfg: &CsiszarConfig) -> Result<f64> {
    let q = optimal_q_csiszar(alpha, prior, channel, cfg)?;
    csiszar_g(alpha, prior, channel, q.probs())
}

fn csiszar_g(alpha: f64, prior: &Prior, channel: &Channel, q: &[f64]) -> Result<f64> {
    channel.rows().zip(prior.probs()).map(|(r, &px)| renyi_divergence(alpha, r, q).map(|d| px * d)).sum()
}

/// The variational functional `G(p_{A|X}, q_A)` of `spec`.
pub fn g_functional(
    spec: &LeakageSpec,
    prior: &Prior,
    channel: &Channel,
    q: &ActionDistribution,
) -> Result<GEvaluation> {
    check_dims(prior, channel)?;
    if q.len() != channel.n_actions() {
        return Err(VoiError::DimensionMismatch("q and channel disagree on |A|".into()));
    }
    let joint = JointDistribution::new(prior, channel);
    let value = match spec {
        LeakageSpec::Shannon => kl_divergence(joint.mass(), &product_mass(prior.probs(), q.probs()))?,
        LeakageSpec::F(f) => f_divergence(f, joint.mass(), &product_mass(prior.probs(), q.probs()))?,
        LeakageSpec::Arimoto(a) => {
            let u = vec![1.0 / prior.len() as f64; prior.len()];
            renyi_divergence(a.value(), joint.mass(), &product_mass(&u, q.probs()))?
                - renyi_divergence(a.value(), prior.probs(), &u)?
        }
        LeakageSpec::Sibson(a) => {
            renyi_divergence(a.value(), joint.mass(), &product_mass(prior.probs(), q.probs()))?
        }
        LeakageSpec::Csiszar(a) => csiszar_g(a.value(), prior, channel, q.probs())?,
    };
    Ok(GEvaluation { value, measure: *spec })
}

/// Gradient of `G(p, ·)` with respect to `q` at `q`.
pub fn g_gradient_q(
    spec: &LeakageSpec,
    prior: &Prior,
    channel: &Channel,
    q: &ActionDistribution,
) -> Vec<f64> {
    let q = q.probs();
    let px = prior.probs();
    let n = q.len();
    match spec {
        LeakageSpec::Shannon => {
            let m = channel.marginal(prior);
            (0..n).map(|a| -m[a] / q[a]).collect()
        }
        LeakageSpec::F(f) => (0..n)
            .map(|a| {
                channel
                    .rows()
                    .zip(px)
                    .map(|(r, &p)| {
                        let t = r[a] / q[a];
                        p * (f.f(t) - t * f.deriv(t))
                    })
                    .sum()
            })
            .collect(),
        LeakageSpec::Arimoto(o) | LeakageSpec::Sibson(o) => {
            let al = o.value();
            let arimoto = matches!(spec, LeakageSpec::Arimoto(_));
            let weight = |p: f64| if arimoto { p.powf(al) } else { p };
            let mut num = vec![0.0; n];
            let mut total = 0.0;
            for (r, &p) in channel.rows().zip(px) {
                for a in 0..n {
                    let v = weight(p) * r[a].powf(al) * q[a].powf(-al);
                    num[a] += v;
                    total += v * q[a];
                }
            }
            num.into_iter().map(|v| -v / total).collect()
        }
        LeakageSpec::Csiszar(o) => {
            let log_q: Vec<f64> = q.iter().map(|v| v.ln()).collect();
            csiszar_ratios(o.value(), px, &rows(channel), &log_q).into_iter().map(|c| -c).collect()
        }
    }
}

/// `argmin_q G(p, q)` for the given measure.
pub fn optimal_q(
    spec: &LeakageSpec,
    prior: &Prior,
    channel: &Channel,
    cfg: &CsiszarConfig,
) -> Result<ActionDistribution> {
    check_dims(prior, channel)?;
    match spec {
        LeakageSpec::Shannon => Ok(optimal_q_shannon(prior, channel)),
        LeakageSpec::F(f) => Ok(optimal_q_f(f, prior, channel)),
        LeakageSpec::Arimoto(a) => optimal_q_arimoto(a.value(), prior, channel),
        LeakageSpec::Sibson(a) => optimal_q_sibson(a.value(), prior, channel),
        LeakageSpec::Csiszar(a) => optimal_q_csiszar(a.value(), prior, channel, cfg),
    }
}

/// The leakage `L(X → A)` through its canonical formula.
pub fn leakage(spec: &LeakageSpec, prior: &Prior, channel: &Channel) -> Result<f64> {
    leakage_with(spec, prior, channel, &CsiszarConfig::default())
}

pub fn leakage_with(
    spec: &LeakageSpec,
    prior: &Prior,
    channel: &Channel,
    cfg: &CsiszarConfig,
) -> Result<f64> {
    check_dims(prior, channel)?;
    match spec {
        LeakageSpec::Shannon => Ok(shannon_mi(prior, channel)),
        LeakageSpec::F(f) => Ok(f_leakage(f, prior, channel)),
        LeakageSpec::Arimoto(a) => arimoto_mi(a.value(), prior, channel),
        LeakageSpec::Sibson(a) => sibson_mi(a.value(), prior, channel),
        LeakageSpec::Csiszar(a) => csiszar_mi_with(a.value(), prior, channel, cfg),
    }
}
