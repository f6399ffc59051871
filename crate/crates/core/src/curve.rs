//! The value-of-information curve `V(R) = U(0) − U(R)`, traced by sweeping
//! β, and the mechanism that attains a point on it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VoiError};
use crate::leakage::leakage_with;
use crate::problem::{Channel, LossMatrix, Prior, Problem};
use crate::simplex::argmin;
use crate::solver::{alternate_minimize, SolverConfig, SolverResult};

/// One solved point of the curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub beta: f64,
    /// Leakage `R_β` in nats.
    pub r: f64,
    /// `U(R_β)`.
    pub u: f64,
    /// `U(0) − U(R_β)`.
    pub v: f64,
    pub f_final: f64,
    pub iterations: usize,
    pub kkt_p: f64,
    pub kkt_q: f64,
    pub certified: bool,
    pub converged: bool,
}

/// Deterministic map from output symbols to actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRule {
    pub choice: Vec<usize>,
}

/// Optimal mechanism `p*_{Y|X}` obtained by merging actions with equal
/// posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    /// `|X| × |Y|` channel.
    pub map: Channel,
    /// Output symbol `t(a)` of every action.
    pub class_of: Vec<usize>,
    /// Posterior `p_{X|A}(·|a)` of the first action in each class.
    pub posteriors: Vec<Vec<f64>>,
}

impl Mechanism {
    pub fn n_outputs(&self) -> usize {
        self.posteriors.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AchievabilityReport {
    /// Average gain of the mechanism under its Bayes decision rule.
    pub gain: f64,
    /// `U(0) − U(R_β)` from the solver.
    pub target_gain: f64,
    /// Leakage of the mechanism.
    pub leakage: f64,
    pub r_beta: f64,
}

/// `min_a E_X[ℓ(X, a)]`.
pub fn bayes_risk_no_data(prior: &Prior, loss: &LossMatrix) -> f64 {
    let risks = action_risks(prior, loss, |_| 1.0);
    risks[argmin(&risks)]
}

fn action_risks(prior: &Prior, loss: &LossMatrix, weight: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..loss.n_actions())
        .map(|a| prior.probs().iter().enumerate().map(|(x, px)| px * weight(x) * loss.get(x, a)).sum())
        .collect()
}

/// Gain `min_a E[ℓ(X,a)] − E_Y[min_a E[ℓ(X,a) | Y]]` of observing `Y`
/// through `channel`, with the Bayes rule attaining it.
pub fn average_gain(prior: &Prior, channel: &Channel, loss: &LossMatrix) -> Result<(f64, DecisionRule)> {
    if prior.len() != channel.n_inputs() || prior.len() != loss.n_inputs() {
        return Err(VoiError::DimensionMismatch("prior, channel and loss disagree on |X|".into()));
    }
    let mut risk = 0.0;
    let mut choice = Vec::with_capacity(channel.n_actions());
    for y in 0..channel.n_actions() {
        // joint-weighted risks; dividing by p(y) would not change the argmin
        let risks = action_risks(prior, loss, |x| channel.get(x, y));
        let a = argmin(&risks);
        risk += risks[a];
        choice.push(a);
    }
    Ok((bayes_risk_no_data(prior, loss) - risk, DecisionRule { choice }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Log,
    Linear,
}

/// `steps` values of β between `min` and `max`, largest first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default = "log_scale")]
    pub scale: GridScale,
}

fn log_scale() -> GridScale {
    GridScale::Log
}

impl BetaGrid {
    pub fn log(min: f64, max: f64, steps: usize) -> Self {
        BetaGrid { min, max, steps, scale: GridScale::Log }
    }

    pub fn betas(&self) -> Result<Vec<f64>> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.min >= 0.0
            && self.max >= self.min
            && self.steps >= 1
            && !(self.scale == GridScale::Log && self.min == 0.0);
        if !ok {
            return Err(VoiError::InvalidConfig(format!("invalid beta grid {self:?}")));
        }
        if self.steps == 1 {
            return Ok(vec![self.max]);
        }
        let n = self.steps - 1;
        let mut out: Vec<f64> = (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                match self.scale {
                    GridScale::Log => (self.max.ln() + t * (self.min.ln() - self.max.ln())).exp(),
                    GridScale::Linear => self.max + t * (self.min - self.max),
                }
            })
            .collect();
        out[0] = self.max;
        out[n] = self.min;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    /// Used for every point with `beta` replaced.
    pub solver: SolverConfig,
    /// Start each solve from the previous point's channel.
    pub warm_start: bool,
    /// Successive points whose leakage differs by less than this are dropped.
    pub dedup_tol: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig { solver: SolverConfig::new(1.0), warm_start: true, dedup_tol: 1e-9 }
    }
}

fn point_of(res: &SolverResult, u0: f64, converged: bool) -> CurvePoint {
    CurvePoint {
        beta: res.beta,
        r: res.r_beta,
        u: res.expected_loss,
        v: u0 - res.expected_loss,
        f_final: res.f_final,
        iterations: res.trace.iterations,
        kkt_p: res.kkt_residual_p,
        kkt_q: res.kkt_residual_q,
        certified: res.certified,
        converged,
    }
}

fn solve_point(problem: &Problem, cfg: SolverConfig) -> Result<(SolverResult, bool)> {
    match alternate_minimize(problem, &cfg) {
        Ok(r) => Ok((r, true)),
        Err(VoiError::NotConverged(r)) => Ok((*r, false)),
        Err(e) => Err(e),
    }
}

/// Solves every β (which must be non-negative and non-increasing) and
/// returns each kept point with its full solver result. Runs that hit the
/// iteration cap are kept and flagged.
pub fn trace_curve_results(
    problem: &Problem,
    betas: &[f64],
    config: &CurveConfig,
) -> Result<Vec<(CurvePoint, SolverResult)>> {
    if betas.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(VoiError::InvalidConfig("beta values must be finite and ≥ 0".into()));
    }
    if betas.windows(2).any(|w| w[1] > w[0]) {
        return Err(VoiError::InvalidConfig("beta grid must be sorted in descending order".into()));
    }
    let u0 = bayes_risk_no_data(&problem.prior, &problem.loss);
    let with_beta = |b: f64, init: Option<Channel>| {
        let mut c = config.solver.clone();
        c.beta = b;
        if init.is_some() {
            c.p_init = init;
        }
        c
    };
    let solved: Vec<(SolverResult, bool)> = if config.warm_start {
        let mut out = Vec::with_capacity(betas.len());
        let mut prev: Option<Channel> = None;
        for &b in betas {
            let (r, ok) = solve_point(problem, with_beta(b, prev.take()))?;
            prev = Some(r.channel.clone());
            out.push((r, ok));
        }
        out
    } else {
        betas.par_iter().map(|&b| solve_point(problem, with_beta(b, None))).collect::<Result<_>>()?
    };
    let mut kept: Vec<(CurvePoint, SolverResult)> = Vec::with_capacity(solved.len());
    for (res, ok) in solved {
        if let Some((last, _)) = kept.last() {
            if (res.r_beta - last.r).abs() < config.dedup_tol {
                continue;
            }
        }
        kept.push((point_of(&res, u0, ok), res));
    }
    Ok(kept)
}

pub fn trace_curve(problem: &Problem, betas: &[f64], config: &CurveConfig) -> Result<Vec<CurvePoint>> {
    Ok(trace_curve_results(problem, betas, config)?.into_iter().map(|(p, _)| p).collect())
}

fn by_rate(points: &[CurvePoint]) -> Vec<&CurvePoint> {
    let mut v: Vec<&CurvePoint> = points.iter().collect();
    v.sort_by(|a, b| a.r.total_cmp(&b.r));
    v
}

/// Largest drop of `v` between points taken in increasing `r`.
pub fn monotonicity_violation(points: &[CurvePoint]) -> f64 {
    by_rate(points).windows(2).map(|w| w[0].v - w[1].v).fold(0.0, f64::max)
}

/// Largest amount by which a point falls below the chord through its two
/// neighbours in increasing `r`.
pub fn concavity_violation(points: &[CurvePoint]) -> f64 {
    by_rate(points)
        .windows(3)
        .filter(|w| w[2].r > w[0].r)
        .map(|w| {
            let t = (w[1].r - w[0].r) / (w[2].r - w[0].r);
            w[0].v + t * (w[2].v - w[0].v) - w[1].v
        })
        .fold(0.0, f64::max)
}

/// Merges actions whose posteriors `p_{X|A}(·|a)` agree within `merge_tol`
/// in the sup norm, in action order, and pushes the channel through the
/// merge.
pub fn build_mechanism(result: &SolverResult, prior: &Prior, merge_tol: f64) -> Result<Mechanism> {
    let ch = &result.channel;
    if prior.len() != ch.n_inputs() {
        return Err(VoiError::DimensionMismatch("prior and channel disagree on |X|".into()));
    }
    let px = prior.probs();
    let nx = ch.n_inputs();
    let mut posteriors: Vec<Vec<f64>> = Vec::new();
    let mut class_of = Vec::with_capacity(ch.n_actions());
    for a in 0..ch.n_actions() {
        let col: Vec<f64> = (0..nx).map(|x| px[x] * ch.get(x, a)).collect();
        let s: f64 = col.iter().sum();
        let post: Vec<f64> = col.iter().map(|v| v / s).collect();
        let found = posteriors.iter().position(|rep| {
            rep.iter().zip(&post).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max) <= merge_tol
        });
        match found {
            Some(y) => class_of.push(y),
            None => {
                class_of.push(posteriors.len());
                posteriors.push(post);
            }
        }
    }
    let ny = posteriors.len();
    let mut data = vec![0.0; nx * ny];
    for x in 0..nx {
        for (a, &y) in class_of.iter().enumerate() {
            data[x * ny + y] += ch.get(x, a);
        }
    }
    Ok(Mechanism { map: Channel::from_weights(nx, ny, data), class_of, posteriors })
}

/// Checks that the mechanism attains the solver's point: its gain equals
/// `U(0) − U(R_β)` and its leakage does not exceed `R_β`, both within 1e-6.
pub fn verify_achievability(
    problem: &Problem,
    result: &SolverResult,
    mechanism: &Mechanism,
) -> Result<AchievabilityReport> {
    const TOL: f64 = 1e-6;
    let (gain, _) = average_gain(&problem.prior, &mechanism.map, &problem.loss)?;
    let target_gain = bayes_risk_no_data(&problem.prior, &problem.loss) - result.expected_loss;
    let leak = leakage_with(&problem.leakage, &problem.prior, &mechanism.map, &Default::default())?;
    let report = AchievabilityReport { gain, target_gain, leakage: leak, r_beta: result.r_beta };
    if (gain - target_gain).abs() > TOL {
        return Err(VoiError::AchievabilityViolation(format!(
            "mechanism gain {gain} differs from U(0) − U(R) = {target_gain}"
        )));
    }
    if leak > result.r_beta + TOL {
        return Err(VoiError::AchievabilityViolation(format!(
            "mechanism leakage {leak} exceeds R = {}",
            result.r_beta
        )));
    }
    Ok(report)
}
