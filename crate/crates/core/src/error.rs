use thiserror::Error;

use crate::solver::SolverResult;

pub type Result<T> = std::result::Result<T, VoiError>;

#[derive(Debug, Error)]
pub enum VoiError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative loss {value} at (x={x}, a={a})")]
    NegativeLoss { x: usize, a: usize, value: f64 },

    #[error("non-finite loss at (x={x}, a={a})")]
    NonFiniteLoss { x: usize, a: usize },

    #[error("not a distribution: {0}")]
    NotADistribution(String),

    #[error("bad order α = {0}; orders must be positive, finite and different from 1")]
    BadOrder(f64),

    #[error("support violation at index {index}: q = 0 where p > 0")]
    SupportViolation { index: usize },

    #[error("inner iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("alternating minimization stopped after {} iterations without reaching the gap", .0.trace.iterations)]
    NotConverged(Box<SolverResult>),

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("inverse derivative evaluated outside its domain: {0}")]
    DomainViolation(String),

    #[error("grid too large: {0}")]
    GridTooLarge(String),

    #[error("achievability violated: {0}")]
    AchievabilityViolation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
