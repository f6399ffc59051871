//! Minimizers of `F_β(·, q)` over the channel for fixed `q`.
//!
//! Shannon has the closed softmax form. f-leakage is solved row by row by
//! locating the row multiplier on a monotone bracket. The Rényi-type
//! measures share one structure: every stationary row has the shape
//! `p(a|x) ∝ q(a)·s_a^{1/(α−1)}` with `s_a = |ℓ(x,a) + λ_x|`, and the
//! normalizing constants are tied together by one scalar equation, so the
//! update reduces to nested one-dimensional root finding.

use crate::error::{Result, VoiError};
use crate::generator::FGenerator;
use crate::problem::{ActionDistribution, Channel, LeakageSpec, LossMatrix, Prior};
use crate::roots::brent;
use crate::simplex::{argmin, log_sum_exp};

use super::InnerConfig;

fn check_inputs(prior: &Prior, loss: &LossMatrix, q: &ActionDistribution) -> Result<()> {
    if prior.len() != loss.n_inputs() || q.len() != loss.n_actions() {
        return Err(VoiError::DimensionMismatch("prior, loss and q disagree on alphabet sizes".into()));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(VoiError::InvalidConfig(format!("beta = {beta} must be finite and ≥ 0")));
    }
    Ok(())
}

/// The `β = 0` minimizer: each row on its lowest-loss action (lowest index
/// on ties), then floored.
pub fn p_update_zero_beta(loss: &LossMatrix) -> Channel {
    let (nx, na) = (loss.n_inputs(), loss.n_actions());
    let mut data = vec![0.0; nx * na];
    for (x, row) in loss.rows().enumerate() {
        data[x * na + argmin(row)] = 1.0;
    }
    Channel::from_weights(nx, na, data)
}

/// `p(a|x) ∝ q(a)·exp(−ℓ(x,a)/β)`.
pub fn p_update_shannon(
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
) -> Result<Channel> {
    check_inputs(prior, loss, q)?;
    check_beta(beta)?;
    if beta == 0.0 {
        return Ok(p_update_zero_beta(loss));
    }
    let (nx, na) = (loss.n_inputs(), loss.n_actions());
    let mut data = Vec::with_capacity(nx * na);
    let mut logits = vec![0.0; na];
    for row in loss.rows() {
        for a in 0..na {
            logits[a] = q.probs()[a].ln() - row[a] / beta;
        }
        let lse = log_sum_exp(&logits);
        data.extend(logits.iter().map(|l| (l - lse).exp()));
    }
    Ok(Channel::from_weights(nx, na, data))
}

/// Solves `ℓ(x,a) + β f′(p(a|x)/q(a)) + λ_x = 0` with `Σ_a p(a|x) = 1` for
/// every row.
///
/// Writing the slope level as `f′(1) + z/β` with `z ∈ [0, max ℓ − min ℓ]`
/// brackets the root exactly: at `z = 0` every ratio is at most one and at
/// the top every ratio is at least one. Slopes below the range of `f′` give
/// zero mass, which is the complementary-slackness solution when `f′(0⁺)`
/// is finite.
pub fn p_update_f(
    f: &FGenerator,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
) -> Result<Channel> {
    check_inputs(prior, loss, q)?;
    check_beta(beta)?;
    if beta == 0.0 {
        return Ok(p_update_zero_beta(loss));
    }
    let (nx, na) = (loss.n_inputs(), loss.n_actions());
    let q = q.probs();
    let base = f.deriv(1.0);
    let mut data = Vec::with_capacity(nx * na);
    for row in loss.rows() {
        let lmin = row.iter().copied().fold(f64::INFINITY, f64::min);
        let d: Vec<f64> = row.iter().map(|l| l - lmin).collect();
        let spread = d.iter().copied().fold(0.0, f64::max);
        let mass = |z: f64| -> f64 {
            q.iter().zip(&d).map(|(qa, da)| qa * f.ratio_for_slope(base + (z - da) / beta)).sum()
        };
        let (mut lo, mut hi) = (0.0, spread);
        let mut it = 0;
        while hi - lo > 0.0 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let m = mass(mid);
            if m.is_nan() {
                return Err(VoiError::NoRoot(format!("{}: mass is NaN at z = {mid}", f.name())));
            }
            if m < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            it += 1;
            if it > inner.max_iter {
                return Err(VoiError::NoRoot(format!("{}: bisection did not close", f.name())));
            }
        }
        let z = 0.5 * (lo + hi);
        let mut p: Vec<f64> =
            q.iter().zip(&d).map(|(qa, da)| qa * f.ratio_for_slope(base + (z - da) / beta)).collect();
        if p.iter().any(|v| !v.is_finite()) {
            // the root sits where one ratio diverges: put the row on that action
            let slope_hi = f.slope_range().1;
            p = d.iter().map(|da| if base + (z - da) / beta >= slope_hi { 1.0 } else { 0.0 }).collect();
        }
        let s: f64 = p.iter().sum();
        if !(s > 0.0) {
            return Err(VoiError::NoRoot(format!("{}: row mass vanished", f.name())));
        }
        data.extend(p);
    }
    Ok(Channel::from_weights(nx, na, data))
}

/// One row of a Rényi-type stationary point, parameterized by a shift:
/// `s_a = d_a + u` for α < 1 and `s_a = max(0, u − d_a)` for α > 1, where
/// `d_a = ℓ(x,a) − min_a ℓ(x,a)`.
///
/// For α > 1 the row mass behaves like `s^{1/(α−1)}`, so an entry whose
/// shift is near zero is extremely sensitive to it. The shift is therefore
/// held as `u = base + w` with `base` the nearest breakpoint `d_j ≤ u`,
/// which keeps `s_j = w` free of cancellation.
struct RenyiRow<'a> {
    log_q: &'a [f64],
    d: Vec<f64>,
    spread: f64,
    e: f64,
    small: bool,
}

#[derive(Debug, Clone, Copy)]
struct Shift {
    base: f64,
    w: f64,
}

impl Shift {
    fn at(u: f64) -> Self {
        Shift { base: 0.0, w: u }
    }
}

struct RowEval {
    /// `log Σ_a q s^e`
    log_n: f64,
    /// `Σ q s^{e+1} / Σ q s^e`
    ratio: f64,
}

impl<'a> RenyiRow<'a> {
    fn new(alpha: f64, log_q: &'a [f64], loss_row: &[f64]) -> Self {
        let lmin = loss_row.iter().copied().fold(f64::INFINITY, f64::min);
        let d: Vec<f64> = loss_row.iter().map(|l| l - lmin).collect();
        let spread = d.iter().copied().fold(0.0, f64::max);
        RenyiRow { log_q, d, spread, e: 1.0 / (alpha - 1.0), small: alpha < 1.0 }
    }

    fn shift(&self, sh: Shift, a: usize) -> f64 {
        if self.small {
            self.d[a] + sh.w
        } else if self.d[a] <= sh.base {
            (sh.base - self.d[a]) + sh.w
        } else {
            (sh.base + sh.w - self.d[a]).max(0.0)
        }
    }

    fn log_weights(&self, sh: Shift) -> Vec<f64> {
        (0..self.d.len())
            .map(|a| {
                let s = self.shift(sh, a);
                if s > 0.0 {
                    self.log_q[a] + self.e * s.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect()
    }

    fn eval(&self, sh: Shift) -> RowEval {
        let lw = self.log_weights(sh);
        let log_n = log_sum_exp(&lw);
        let ratio = lw.iter().enumerate().map(|(a, l)| (l - log_n).exp() * self.shift(sh, a)).sum();
        RowEval { log_n, ratio }
    }

    fn probs(&self, sh: Shift) -> Vec<f64> {
        let lw = self.log_weights(sh);
        let log_n = log_sum_exp(&lw);
        lw.iter().map(|l| (l - log_n).exp()).collect()
    }

    /// Finds the shift with `g = 0`, `g` monotone in `u`, given a bracket
    /// `[lo, hi]` whose upper end is on the far side of the root. A lower
    /// end at or below zero is pulled toward zero by halving until the sign
    /// changes.
    fn solve<G: Fn(&RowEval) -> f64>(&self, g: G, lo: f64, hi: f64, inner: &InnerConfig) -> Result<Shift> {
        let f = |u: f64| g(&self.eval(Shift::at(u)));
        let ghi = f(hi);
        if ghi == 0.0 {
            return Ok(Shift::at(hi));
        }
        let mut lo = lo;
        let mut hi = hi;
        if lo <= 0.0 {
            lo = hi;
            let mut tries = 0;
            loop {
                lo *= 0.5;
                let v = f(lo);
                if v == 0.0 {
                    return Ok(Shift::at(lo));
                }
                if v.signum() != ghi.signum() {
                    break;
                }
                tries += 1;
                if tries > 2000 || lo == 0.0 {
                    return Err(VoiError::NoRoot("row shift bracket collapsed at zero".into()));
                }
            }
        }
        if self.small {
            return brent(f, lo, hi, 0.0, inner.max_iter).map(Shift::at);
        }
        // narrow to one piece between breakpoints, then solve relative to it
        let mut breaks: Vec<f64> = self.d.iter().copied().filter(|&b| b > lo && b < hi).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        for b in breaks {
            let v = f(b);
            if v == 0.0 {
                return Ok(Shift { base: b, w: 0.0 });
            }
            if v.signum() == ghi.signum() {
                hi = b;
                break;
            }
            lo = b;
        }
        let base = self.d.iter().copied().filter(|&b| b <= lo).fold(0.0, f64::max);
        let fw = |w: f64| g(&self.eval(Shift { base, w }));
        let w = brent(fw, lo - base, hi - base, 0.0, inner.max_iter)?;
        Ok(Shift { base, w })
    }

    /// Row with `Σ q s^{e+1} / Σ q s^e = c`.
    fn solve_ratio(&self, c: f64, inner: &InnerConfig) -> Result<Shift> {
        // the ratio is a weighted mean of s, which lies in [u, u + spread]
        // for α < 1 and in [u − spread, u] for α > 1
        let (lo, hi) = if self.small { (c - self.spread, c) } else { (c, c + self.spread) };
        if lo == hi {
            return Ok(Shift::at(c));
        }
        self.solve(|r| r.ratio - c, lo, hi, inner)
    }

    /// Row with `log Σ q s^e = t`.
    fn solve_log_norm(&self, t: f64, inner: &InnerConfig) -> Result<Shift> {
        // Σ q s^e lies between (u ± spread)^e and u^e
        let tau = (t / self.e).exp();
        if !tau.is_finite() || tau == 0.0 {
            return Err(VoiError::NoRoot(format!("row normalizer target {t} out of range")));
        }
        let (lo, hi) = if self.small { (tau - self.spread, tau) } else { (tau, tau + self.spread) };
        if lo == hi {
            return Ok(Shift::at(tau));
        }
        self.solve(|r| r.log_n - t, lo, hi, inner)
    }
}

fn renyi_rows<'a>(alpha: f64, log_q: &'a [f64], loss: &LossMatrix) -> Vec<RenyiRow<'a>> {
    loss.rows().map(|r| RenyiRow::new(alpha, log_q, r)).collect()
}

fn assemble(rows: &[RenyiRow<'_>], shifts: &[Shift], na: usize) -> Channel {
    let data = rows.iter().zip(shifts).flat_map(|(r, &u)| r.probs(u)).collect();
    Channel::from_weights(rows.len(), na, data)
}

/// p-update for Csiszár's functional: rows decouple and each solves
/// `Σ q s^{e+1}/Σ q s^e = αβ/|α−1|`.
pub fn p_update_csiszar(
    alpha: f64,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
) -> Result<Channel> {
    check_inputs(prior, loss, q)?;
    check_beta(beta)?;
    let alpha = crate::problem::Order::new(alpha)?.value();
    if beta == 0.0 {
        return Ok(p_update_zero_beta(loss));
    }
    let log_q: Vec<f64> = q.probs().iter().map(|v| v.ln()).collect();
    let rows = renyi_rows(alpha, &log_q, loss);
    let c = alpha * beta / (alpha - 1.0).abs();
    let shifts = rows.iter().map(|r| r.solve_ratio(c, inner)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(&rows, &shifts, loss.n_actions()))
}

/// Shared p-update for Sibson (`row_scale = 1`) and Arimoto
/// (`row_scale = p_X`): each row satisfies `Σ q s^e = row_scale/κ` for one
/// common `κ`, which is fixed by `Σ_x p_X(x)·Σ q s^{e+1}/Σ q s^e = αβ/|α−1|`.
fn p_update_coupled(
    alpha: f64,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
    arimoto: bool,
) -> Result<Channel> {
    check_inputs(prior, loss, q)?;
    check_beta(beta)?;
    let alpha = crate::problem::Order::new(alpha)?.value();
    if beta == 0.0 {
        return Ok(p_update_zero_beta(loss));
    }
    let log_q: Vec<f64> = q.probs().iter().map(|v| v.ln()).collect();
    let rows = renyi_rows(alpha, &log_q, loss);
    let px = prior.probs();
    let log_scale: Vec<f64> = px.iter().map(|p| if arimoto { p.ln() } else { 0.0 }).collect();
    let c = alpha * beta / (alpha - 1.0).abs();

    let shifts_for = |log_kappa: f64| -> Result<Vec<Shift>> {
        rows.iter().zip(&log_scale).map(|(r, ls)| r.solve_log_norm(ls - log_kappa, inner)).collect()
    };
    let excess = |log_kappa: f64| -> f64 {
        match shifts_for(log_kappa) {
            Ok(us) => rows.iter().zip(&us).zip(px).map(|((r, &u), p)| p * r.eval(u).ratio).sum::<f64>() - c,
            Err(_) => f64::NAN,
        }
    };

    // start where the first row alone would satisfy the scalar equation
    let u0 = rows[0].solve_ratio(c, inner)?;
    let k0 = log_scale[0] - rows[0].eval(u0).log_n;
    let g0 = excess(k0);
    if g0 == 0.0 {
        return Ok(assemble(&rows, &shifts_for(k0)?, loss.n_actions()));
    }
    if g0.is_nan() {
        return Err(VoiError::NoRoot("coupled p-update: initial evaluation failed".into()));
    }
    let mut step = 1.0;
    let mut other = None;
    for _ in 0..inner.max_bracket_doublings {
        for k in [k0 - step, k0 + step] {
            let g = excess(k);
            if g == 0.0 || (g.is_finite() && g.signum() != g0.signum()) {
                other = Some(k);
                break;
            }
        }
        if other.is_some() {
            break;
        }
        step *= 2.0;
    }
    let k1 = other.ok_or_else(|| VoiError::NoRoot("coupled p-update: bracket expansion exhausted".into()))?;
    let (lo, hi) = if k0 < k1 { (k0, k1) } else { (k1, k0) };
    let k = brent(excess, lo, hi, 0.0, inner.max_iter)?;
    Ok(assemble(&rows, &shifts_for(k)?, loss.n_actions()))
}

pub fn p_update_sibson(
    alpha: f64,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
) -> Result<Channel> {
    p_update_coupled(alpha, prior, loss, q, beta, inner, false)
}

pub fn p_update_arimoto(
    alpha: f64,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
) -> Result<Channel> {
    p_update_coupled(alpha, prior, loss, q, beta, inner, true)
}

/// Measure-specific minimizer of `F_β(·, q)`.
pub fn p_update(
    spec: &LeakageSpec,
    prior: &Prior,
    loss: &LossMatrix,
    q: &ActionDistribution,
    beta: f64,
    inner: &InnerConfig,
) -> Result<Channel> {
    match spec {
        LeakageSpec::Shannon => p_update_shannon(prior, loss, q, beta),
        LeakageSpec::F(f) => p_update_f(f, prior, loss, q, beta, inner),
        LeakageSpec::Arimoto(a) => p_update_arimoto(a.value(), prior, loss, q, beta, inner),
        LeakageSpec::Sibson(a) => p_update_sibson(a.value(), prior, loss, q, beta, inner),
        LeakageSpec::Csiszar(a) => p_update_csiszar(a.value(), prior, loss, q, beta, inner),
    }
}
