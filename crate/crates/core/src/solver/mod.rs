//! Alternating minimization of `F_β(p, q) = E[ℓ] + β·G(p, q)`.

mod kkt;
mod mirror;
mod update;

pub use kkt::{kkt_residual_p, kkt_residual_q, stationarity_terms};
pub use mirror::p_update_mirror;
pub use update::{
    p_update, p_update_arimoto, p_update_csiszar, p_update_f, p_update_shannon, p_update_sibson,
    p_update_zero_beta,
};

use serde::{Deserialize, Serialize};

use crate::error::{Result, VoiError};
use crate::leakage::{g_functional, leakage_with, optimal_q, CsiszarConfig};
use crate::problem::{ActionDistribution, Channel, LeakageSpec, LossMatrix, Prior, Problem};

/// Tolerances of the inner solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerConfig {
    /// Iteration cap of every scalar root search.
    pub max_iter: usize,
    pub max_bracket_doublings: usize,
    pub csiszar: CsiszarConfig,
    pub mirror_tol: f64,
    pub mirror_max_iter: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig {
            max_iter: 500,
            max_bracket_doublings: 200,
            csiszar: CsiszarConfig::default(),
            mirror_tol: 1e-7,
            mirror_max_iter: 100_000,
        }
    }
}

/// How the p-block is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PMethod {
    /// Measure-specific stationarity solve.
    #[default]
    Exact,
    /// Entropic mirror descent, warm-started at the previous channel.
    Mirror,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub beta: f64,
    /// Stop once `|F_k − F_{k−1}|` is at most this.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Additionally required of both KKT residuals before stopping, unless
    /// the objective has stopped moving altogether.
    pub kkt_tol: f64,
    /// Starting channel; uniform when absent.
    pub p_init: Option<Channel>,
    pub p_method: PMethod,
    /// Weight of the fresh p-step against the previous channel, in `(0, 1]`.
    pub damping: f64,
    pub inner: InnerConfig,
}

impl SolverConfig {
    pub fn new(beta: f64) -> Self {
        SolverConfig {
            beta,
            epsilon: 1e-9,
            max_iter: 100_000,
            kkt_tol: 1e-7,
            p_init: None,
            p_method: PMethod::Exact,
            damping: 1.0,
            inner: InnerConfig::default(),
        }
    }

    fn validate(&self, problem: &Problem) -> Result<()> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(VoiError::InvalidConfig(format!("beta = {} must be finite and ≥ 0", self.beta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(VoiError::InvalidConfig(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(VoiError::InvalidConfig(format!("damping = {} must lie in (0, 1]", self.damping)));
        }
        if let Some(p) = &self.p_init {
            if p.n_inputs() != problem.n_inputs() || p.n_actions() != problem.n_actions() {
                return Err(VoiError::DimensionMismatch("initial channel has the wrong shape".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    /// `F_0, F_1, …` including the initial value.
    pub f_values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Lagrange multipliers at the returned point.
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    /// One per input row, for `Σ_a p(a|x) = 1`.
    pub rows: Vec<f64>,
    /// For `Σ_a q(a) = 1` in `min_q G`.
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    pub beta: f64,
    pub channel: Channel,
    pub q: ActionDistribution,
    pub trace: SolverTrace,
    /// Leakage of the returned channel through the measure's own formula.
    pub r_beta: f64,
    pub expected_loss: f64,
    pub f_final: f64,
    pub kkt_residual_p: f64,
    pub kkt_residual_q: f64,
    pub multipliers: Multipliers,
    /// Whether `G` is jointly convex for this measure.
    pub certified: bool,
}

/// `E[ℓ] + β·G(p, q)`.
pub fn f_beta(
    spec: &LeakageSpec,
    prior: &Prior,
    loss: &LossMatrix,
    channel: &Channel,
    q: &ActionDistribution,
    beta: f64,
) -> Result<f64> {
    let el = channel.expected_loss(prior, loss);
    if beta == 0.0 {
        return Ok(el);
    }
    Ok(el + beta * g_functional(spec, prior, channel, q)?.value)
}

fn step_p(
    problem: &Problem,
    config: &SolverConfig,
    q: &ActionDistribution,
    current: &Channel,
) -> Result<Channel> {
    let (spec, prior, loss) = (&problem.leakage, &problem.prior, &problem.loss);
    match config.p_method {
        PMethod::Exact => p_update(spec, prior, loss, q, config.beta, &config.inner),
        PMethod::Mirror => p_update_mirror(spec, prior, loss, q, config.beta, &config.inner, current),
    }
}

/// Zero-gap rounds tolerated without KKT progress before giving up.
const STALL_PATIENCE: usize = 100;

/// Runs the alternation from `config.p_init` (uniform by default): `q` is
/// first set to `argmin_q G(p_0, ·)`, then each round replaces `p` by the
/// minimizer of `F_β(·, q)` and `q` by `argmin_q G(p, ·)`.
///
/// Stops once `|F_k − F_{k−1}| ≤ ε` and both KKT residuals are within
/// `kkt_tol`. Returns [`VoiError::NotConverged`] carrying the last iterate
/// when `max_iter` rounds pass without that, or when `F` has stopped moving
/// and the KKT residuals no longer shrink.
pub fn alternate_minimize(problem: &Problem, config: &SolverConfig) -> Result<SolverResult> {
    config.validate(problem)?;
    let (spec, prior, loss) = (&problem.leakage, &problem.prior, &problem.loss);
    let csz = &config.inner.csiszar;
    let beta = config.beta;

    let mut p =
        config.p_init.clone().unwrap_or_else(|| Channel::uniform(problem.n_inputs(), problem.n_actions()));
    let mut q = optimal_q(spec, prior, &p, csz)?;
    let mut f = f_beta(spec, prior, loss, &p, &q, beta)?;
    let mut f_values = vec![f];
    let mut iterations = 0;
    let mut converged = false;
    // zero-gap rounds without KKT progress
    let mut stalled = 0;
    let mut best_kkt = f64::INFINITY;

    while iterations < config.max_iter {
        let fresh = step_p(problem, config, &q, &p)?;
        p = if config.damping < 1.0 { fresh.mix(config.damping, &p)? } else { fresh };
        q = optimal_q(spec, prior, &p, csz)?;
        let f_next = f_beta(spec, prior, loss, &p, &q, beta)?;
        iterations += 1;
        f_values.push(f_next);
        let gap = (f_next - f).abs();
        f = f_next;
        if gap <= config.epsilon {
            let kp = kkt_residual_p(spec, prior, loss, &p, &q, beta)?.0;
            let kq = kkt_residual_q(spec, prior, &p, &q).0;
            if kp <= config.kkt_tol && kq <= config.kkt_tol {
                converged = true;
                break;
            }
            // F is flat at roundoff level; keep going while the certificate
            // still improves, stop once it has plateaued
            if gap == 0.0 {
                let k = kp.max(kq);
                if k < best_kkt * (1.0 - 1e-3) {
                    best_kkt = k;
                    stalled = 0;
                } else {
                    stalled += 1;
                    if stalled >= STALL_PATIENCE {
                        break;
                    }
                }
            }
        }
    }

    let (kkt_p, rows) = kkt_residual_p(spec, prior, loss, &p, &q, beta)?;
    let (kkt_q, lambda_q) = kkt_residual_q(spec, prior, &p, &q);
    let result = SolverResult {
        beta,
        r_beta: leakage_with(spec, prior, &p, csz)?,
        expected_loss: p.expected_loss(prior, loss),
        f_final: f,
        kkt_residual_p: kkt_p,
        kkt_residual_q: kkt_q,
        multipliers: Multipliers { rows, q: lambda_q },
        certified: spec.convexity_certified(),
        trace: SolverTrace { f_values, iterations, converged },
        channel: p,
        q,
    };
    if converged {
        Ok(result)
    } else {
        Err(VoiError::NotConverged(Box::new(result)))
    }
}
