//! Convex generators `f` of f-divergences, with the derivative and inverse
//! derivative needed by the stationarity equations of f-leakage.

use crate::error::{Result, VoiError};

/// Generator of an f-divergence `D_f(p‖q) = Σ q f(p/q)`.
///
/// Every kind satisfies `f(1) = 0` and is convex on `(0, ∞)`, with `f′`
/// strictly increasing from [`FGenerator::slope_range`]`.0` to `.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FGenerator {
    /// `t log t`
    Kl,
    /// `−log t`
    ReverseKl,
    /// `2(1 − √t)`
    SquaredHellinger,
    /// `(t − 1)²`
    PearsonChi2,
    /// `1/t − 1`
    NeymanChi2,
    /// `(t^α − 1)/(α − 1)`, α > 0, α ≠ 1
    HellingerOrder(f64),
    /// `4(1 − t^{(α+1)/2})/(1 − α²)`, α > −1, α ≠ 1
    AlphaDivergence(f64),
}

impl FGenerator {
    /// Checks the order parameter of the parameterized kinds.
    pub fn validated(self) -> Result<Self> {
        match self {
            FGenerator::HellingerOrder(a) if !(a.is_finite() && a > 0.0 && a != 1.0) => {
                Err(VoiError::BadOrder(a))
            }
            FGenerator::AlphaDivergence(a) if !(a.is_finite() && a > -1.0 && a != 1.0) => {
                Err(VoiError::BadOrder(a))
            }
            g => Ok(g),
        }
    }

    pub fn order(&self) -> Option<f64> {
        match *self {
            FGenerator::HellingerOrder(a) | FGenerator::AlphaDivergence(a) => Some(a),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            FGenerator::Kl => "kl".into(),
            FGenerator::ReverseKl => "reverse_kl".into(),
            FGenerator::SquaredHellinger => "squared_hellinger".into(),
            FGenerator::PearsonChi2 => "pearson_chi2".into(),
            FGenerator::NeymanChi2 => "neyman_chi2".into(),
            FGenerator::HellingerOrder(a) => format!("hellinger_order(alpha={a})"),
            FGenerator::AlphaDivergence(a) => format!("alpha_divergence(alpha={a})"),
        }
    }

    /// `f(t)` for `t ≥ 0`; may be `+∞` at `t = 0`.
    pub fn f(&self, t: f64) -> f64 {
        match *self {
            FGenerator::Kl => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            FGenerator::ReverseKl => -t.ln(),
            FGenerator::SquaredHellinger => 2.0 * (1.0 - t.sqrt()),
            FGenerator::PearsonChi2 => (t - 1.0) * (t - 1.0),
            FGenerator::NeymanChi2 => 1.0 / t - 1.0,
            FGenerator::HellingerOrder(a) => (t.powf(a) - 1.0) / (a - 1.0),
            FGenerator::AlphaDivergence(a) => 4.0 * (1.0 - t.powf((a + 1.0) / 2.0)) / (1.0 - a * a),
        }
    }

    /// `f′(t)` for `t > 0`.
    pub fn deriv(&self, t: f64) -> f64 {
        match *self {
            FGenerator::Kl => t.ln() + 1.0,
            FGenerator::ReverseKl => -1.0 / t,
            FGenerator::SquaredHellinger => -1.0 / t.sqrt(),
            FGenerator::PearsonChi2 => 2.0 * (t - 1.0),
            FGenerator::NeymanChi2 => -1.0 / (t * t),
            FGenerator::HellingerOrder(a) => a * t.powf(a - 1.0) / (a - 1.0),
            FGenerator::AlphaDivergence(a) => -2.0 * t.powf((a - 1.0) / 2.0) / (1.0 - a),
        }
    }

    /// Open range `(lo, hi)` of `f′` over `t ∈ (0, ∞)`.
    pub fn slope_range(&self) -> (f64, f64) {
        const INF: f64 = f64::INFINITY;
        const NINF: f64 = f64::NEG_INFINITY;
        match *self {
            FGenerator::Kl => (NINF, INF),
            FGenerator::ReverseKl | FGenerator::SquaredHellinger | FGenerator::NeymanChi2 => (NINF, 0.0),
            FGenerator::PearsonChi2 => (-2.0, INF),
            FGenerator::HellingerOrder(a) | FGenerator::AlphaDivergence(a) => {
                if a < 1.0 {
                    (NINF, 0.0)
                } else {
                    (0.0, INF)
                }
            }
        }
    }

    /// `(f′)⁻¹(s)` for `s` strictly inside [`slope_range`](Self::slope_range).
    pub fn inv_deriv(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.slope_range();
        if !(s > lo && s < hi) {
            return Err(VoiError::DomainViolation(format!(
                "{}: slope {s} outside ({lo}, {hi})",
                self.name()
            )));
        }
        Ok(self.inv_deriv_unchecked(s))
    }

    fn inv_deriv_unchecked(&self, s: f64) -> f64 {
        match *self {
            FGenerator::Kl => (s - 1.0).exp(),
            FGenerator::ReverseKl => -1.0 / s,
            FGenerator::SquaredHellinger => 1.0 / (s * s),
            FGenerator::PearsonChi2 => 1.0 + s / 2.0,
            FGenerator::NeymanChi2 => (-1.0 / s).sqrt(),
            FGenerator::HellingerOrder(a) => (s * (a - 1.0) / a).powf(1.0 / (a - 1.0)),
            FGenerator::AlphaDivergence(a) => (s * (a - 1.0) / 2.0).powf(2.0 / (a - 1.0)),
        }
    }

    /// Monotone extension of `(f′)⁻¹` to the whole real line: `0` at or
    /// below the bottom of the slope range and `+∞` at or above the top.
    ///
    /// The zero branch is the complementary-slackness solution of the
    /// stationarity equation under `p ≥ 0` when `f′(0⁺)` is finite.
    pub fn ratio_for_slope(&self, s: f64) -> f64 {
        let (lo, hi) = self.slope_range();
        if s <= lo {
            0.0
        } else if s >= hi {
            f64::INFINITY
        } else {
            self.inv_deriv_unchecked(s)
        }
    }

    /// The minimizer `argmin_q D_f(p_X p_{A|X} ‖ p_X q)` as unnormalized
    /// weights, given the channel rows and prior.
    pub(crate) fn minimizer_weights(&self, prior: &[f64], rows: &[&[f64]]) -> Vec<f64> {
        let n_actions = rows[0].len();
        let col = |g: &dyn Fn(f64) -> f64| -> Vec<f64> {
            (0..n_actions).map(|a| rows.iter().zip(prior).map(|(r, &px)| px * g(r[a])).sum()).collect()
        };
        match *self {
            FGenerator::Kl => col(&|p| p),
            FGenerator::ReverseKl => {
                let g = col(&|p| p.ln());
                let m = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                g.iter().map(|v| (v - m).exp()).collect()
            }
            // D_f here is 2 − 2 Σ_a √q_a Σ_x p_X √p, maximized (Cauchy–Schwarz)
            // at √q ∝ Σ_x p_X √p.
            FGenerator::SquaredHellinger => col(&f64::sqrt).iter().map(|c| c * c).collect(),
            FGenerator::PearsonChi2 => col(&|p| p * p).iter().map(|v| v.sqrt()).collect(),
            FGenerator::NeymanChi2 => col(&|p| 1.0 / p).iter().map(|v| 1.0 / v).collect(),
            FGenerator::HellingerOrder(a) => col(&|p| p.powf(a)).iter().map(|v| v.powf(1.0 / a)).collect(),
            FGenerator::AlphaDivergence(a) => {
                let g = (a + 1.0) / 2.0;
                col(&|p| p.powf(g)).iter().map(|v| v.powf(1.0 / g)).collect()
            }
        }
    }
}
