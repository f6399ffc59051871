//! Value of information under an information-leakage budget.
//!
//! For a prior `p_X`, a loss `ℓ(x, a)` and a leakage measure `L`, the value
//! of information at rate `R` is `V(R) = U(0) − U(R)` with
//! `U(R) = min { E[ℓ(X, A)] : L(X → A) ≤ R }`. The minimum is traced through
//! its Lagrangian `F_β(p, q) = E[ℓ] + β·G(p, q)`, minimized by alternating
//! over the channel `p` and the auxiliary output law `q`.
//!
//! ```
//! use voi::{alternate_minimize, LeakageSpec, LossMatrix, Prior, Problem, SolverConfig};
//!
//! let problem = Problem::new(
//!     Prior::uniform(2).unwrap(),
//!     LossMatrix::hamming(2),
//!     LeakageSpec::Shannon,
//! )
//! .unwrap();
//! let res = alternate_minimize(&problem, &SolverConfig::new(1.0)).unwrap();
//! assert!((res.expected_loss - 0.268_941_421_369_995_1).abs() < 1e-8);
//! ```

// NaN-rejecting guards are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod generator;
pub mod leakage;
pub mod measures;
pub mod oracle;
pub mod problem;
pub mod roots;
pub mod simplex;
pub mod solver;

pub use curve::{
    average_gain, bayes_risk_no_data, build_mechanism, trace_curve, verify_achievability, BetaGrid,
    CurveConfig, CurvePoint, DecisionRule, Mechanism,
};
pub use error::{Result, VoiError};
pub use generator::FGenerator;
pub use leakage::{leakage, optimal_q, CsiszarConfig};
pub use problem::{ActionDistribution, Channel, LeakageSpec, LossMatrix, Order, Prior, Problem};
pub use solver::{alternate_minimize, f_beta, PMethod, SolverConfig, SolverResult};
