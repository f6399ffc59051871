//! Domain types: priors, losses, channels, action distributions and the
//! leakage specification tying them into a [`Problem`].
//!
//! Every probability object is validated on construction and kept strictly
//! positive: channel and action-distribution entries below
//! [`P_FLOOR`](crate::simplex::P_FLOOR) are raised to the floor and the row is
//! renormalized. Losses are in arbitrary non-negative units; all information
//! quantities are in nats.

use serde::Serialize;

use crate::error::{Result, VoiError};
use crate::generator::FGenerator;
use crate::simplex::{floor_normalize, normalize};

/// Tolerance on the total mass of user-supplied distributions. Accepted
/// inputs are renormalized exactly afterwards.
pub const INPUT_MASS_TOL: f64 = 1e-9;

fn check_mass(what: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(VoiError::NotADistribution(format!("{what} is empty")));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(VoiError::NotADistribution(format!(
                "{what}[{i}] = {x} is not a non-negative number"
            )));
        }
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > INPUT_MASS_TOL {
        return Err(VoiError::NotADistribution(format!("{what} has total mass {s}")));
    }
    Ok(())
}

/// Prior `p_X` over the source alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prior(Vec<f64>);

impl Prior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_mass("prior", &probs)?;
        if probs.len() < 2 {
            return Err(VoiError::NotADistribution("prior needs at least two symbols".into()));
        }
        if let Some(i) = probs.iter().position(|&p| p == 0.0) {
            return Err(VoiError::NotADistribution(format!("prior[{i}] has zero mass; remove the symbol")));
        }
        let mut probs = probs;
        normalize(&mut probs);
        Ok(Prior(probs))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Loss `ℓ(x, a)`, stored row-major with rows indexed by `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossMatrix {
    n_inputs: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl LossMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_inputs = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        if n_inputs == 0 || n_actions == 0 {
            return Err(VoiError::DimensionMismatch("loss matrix is empty".into()));
        }
        let mut values = Vec::with_capacity(n_inputs * n_actions);
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != n_actions {
                return Err(VoiError::DimensionMismatch(format!(
                    "loss row {x} has {} entries, expected {n_actions}",
                    row.len()
                )));
            }
            for (a, v) in row.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(VoiError::NonFiniteLoss { x, a });
                }
                if v < 0.0 {
                    return Err(VoiError::NegativeLoss { x, a, value: v });
                }
                values.push(v);
            }
        }
        Ok(LossMatrix { n_inputs, n_actions, values })
    }

    /// 0/1 loss on an `n × n` alphabet.
    pub fn hamming(n: usize) -> Self {
        let rows = (0..n).map(|x| (0..n).map(|a| if a == x { 0.0 } else { 1.0 }).collect()).collect();
        Self::new(rows).expect("hamming loss is valid")
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.n_actions..(x + 1) * self.n_actions]
    }

    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.values[x * self.n_actions + a]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n_actions)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }
}

/// Row-stochastic conditional distribution `p_{A|X}` with strictly positive
/// entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    n_inputs: usize,
    n_actions: usize,
    data: Vec<f64>,
}

impl Channel {
    /// Validates user rows (non-negative, each summing to one) and floors
    /// zero entries into the open simplex.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_inputs = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        if n_inputs == 0 || n_actions == 0 {
            return Err(VoiError::DimensionMismatch("channel is empty".into()));
        }
        let mut data = Vec::with_capacity(n_inputs * n_actions);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n_actions {
                return Err(VoiError::DimensionMismatch(format!(
                    "channel row {x} has {} entries, expected {n_actions}",
                    row.len()
                )));
            }
            check_mass(&format!("channel row {x}"), row)?;
            data.extend_from_slice(row);
        }
        Ok(Self::from_weights(n_inputs, n_actions, data))
    }

    /// Builds a channel from non-negative row weights, normalizing and
    /// flooring every row. Rows must have positive total weight.
    pub(crate) fn from_weights(n_inputs: usize, n_actions: usize, mut data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n_inputs * n_actions);
        for row in data.chunks_mut(n_actions) {
            floor_normalize(row);
        }
        Channel { n_inputs, n_actions, data }
    }

    /// Uniform channel, the default starting point of the solver.
    pub fn uniform(n_inputs: usize, n_actions: usize) -> Self {
        assert!(n_inputs >= 1 && n_actions >= 1, "channel sizes must be positive");
        Channel { n_inputs, n_actions, data: vec![1.0 / n_actions as f64; n_inputs * n_actions] }
    }

    /// Channel whose every row equals `row`, i.e. output independent of input.
    pub fn independent(n_inputs: usize, row: &[f64]) -> Result<Self> {
        Self::from_rows(vec![row.to_vec(); n_inputs])
    }

    /// Deterministic channel sending `x` to action `x mod |A|`.
    pub fn identity_like(n_inputs: usize, n_actions: usize) -> Self {
        let mut data = vec![0.0; n_inputs * n_actions];
        for x in 0..n_inputs {
            data[x * n_actions + x % n_actions] = 1.0;
        }
        Self::from_weights(n_inputs, n_actions, data)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.n_actions..(x + 1) * self.n_actions]
    }

    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.data[x * self.n_actions + a]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_actions)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Output marginal `Σ_x p_X(x) p(a|x)`.
    pub fn marginal(&self, prior: &Prior) -> Vec<f64> {
        let mut m = vec![0.0; self.n_actions];
        for (row, &px) in self.rows().zip(prior.probs()) {
            for (ma, &p) in m.iter_mut().zip(row) {
                *ma += px * p;
            }
        }
        m
    }

    /// Markov composition `X → A → Z` as the matrix product `self · next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.n_actions != next.n_inputs {
            return Err(VoiError::DimensionMismatch(format!(
                "cannot compose {}×{} with {}×{}",
                self.n_inputs, self.n_actions, next.n_inputs, next.n_actions
            )));
        }
        let mut data = vec![0.0; self.n_inputs * next.n_actions];
        for (x, row) in self.rows().enumerate() {
            let out = &mut data[x * next.n_actions..(x + 1) * next.n_actions];
            for (a, &p) in row.iter().enumerate() {
                for (o, &r) in out.iter_mut().zip(next.row(a)) {
                    *o += p * r;
                }
            }
        }
        Ok(Self::from_weights(self.n_inputs, next.n_actions, data))
    }

    /// Convex combination `λ·self + (1−λ)·other`.
    pub fn mix(&self, lambda: f64, other: &Channel) -> Result<Channel> {
        if self.n_inputs != other.n_inputs || self.n_actions != other.n_actions {
            return Err(VoiError::DimensionMismatch("mixing channels of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        Ok(Self::from_weights(self.n_inputs, self.n_actions, data))
    }

    /// Expected loss `E_{X,A}[ℓ(X, A)]` under `p_X × self`.
    pub fn expected_loss(&self, prior: &Prior, loss: &LossMatrix) -> f64 {
        self.rows()
            .zip(loss.rows())
            .zip(prior.probs())
            .map(|((p, l), &px)| px * p.iter().zip(l).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_error(&self) -> f64 {
        self.rows().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Strictly positive distribution `q_A` over actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionDistribution(Vec<f64>);

impl ActionDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_mass("action distribution", &probs)?;
        Ok(Self::from_weights(probs))
    }

    /// Normalizes non-negative weights (positive total) and floors.
    pub(crate) fn from_weights(mut w: Vec<f64>) -> Self {
        floor_normalize(&mut w);
        ActionDistribution(w)
    }

    pub fn uniform(n: usize) -> Self {
        ActionDistribution(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Order parameter α of a Rényi-type measure: positive, finite, not 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Order(f64);

impl Order {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
            return Err(VoiError::BadOrder(alpha));
        }
        Ok(Order(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which information-leakage measure constrains the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeakageSpec {
    Shannon,
    F(FGenerator),
    Arimoto(Order),
    Sibson(Order),
    Csiszar(Order),
}

impl LeakageSpec {
    /// True when the variational functional `G` is jointly convex, which is
    /// what guarantees global convergence of the alternating scheme.
    pub fn convexity_certified(&self) -> bool {
        match self {
            LeakageSpec::Shannon | LeakageSpec::F(_) => true,
            LeakageSpec::Arimoto(a) | LeakageSpec::Sibson(a) | LeakageSpec::Csiszar(a) => a.value() <= 1.0,
        }
    }

    pub fn order(&self) -> Option<f64> {
        match self {
            LeakageSpec::Arimoto(a) | LeakageSpec::Sibson(a) | LeakageSpec::Csiszar(a) => Some(a.value()),
            LeakageSpec::F(f) => f.order(),
            LeakageSpec::Shannon => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            LeakageSpec::Shannon => "shannon".into(),
            LeakageSpec::F(f) => format!("f:{}", f.name()),
            LeakageSpec::Arimoto(a) => format!("arimoto(alpha={})", a.value()),
            LeakageSpec::Sibson(a) => format!("sibson(alpha={})", a.value()),
            LeakageSpec::Csiszar(a) => format!("csiszar(alpha={})", a.value()),
        }
    }
}

/// A complete decision problem: prior, loss and leakage constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub prior: Prior,
    pub loss: LossMatrix,
    pub leakage: LeakageSpec,
}

impl Problem {
    pub fn new(prior: Prior, loss: LossMatrix, leakage: LeakageSpec) -> Result<Self> {
        validate_problem(Problem { prior, loss, leakage })
    }

    pub fn n_inputs(&self) -> usize {
        self.prior.len()
    }

    pub fn n_actions(&self) -> usize {
        self.loss.n_actions()
    }

    /// Practical upper bound on the leakage: the measure evaluated at the
    /// deterministic channel `x ↦ x mod |A|`. Only used to place β grids and
    /// rate queries, never for correctness.
    pub fn leakage_cap(&self) -> Result<f64> {
        let ch = Channel::identity_like(self.n_inputs(), self.n_actions());
        crate::leakage::leakage(&self.leakage, &self.prior, &ch)
    }
}

/// Checks dimension agreement between prior and loss. The component types
/// already enforce their own invariants on construction.
pub fn validate_problem(p: Problem) -> Result<Problem> {
    if p.prior.len() != p.loss.n_inputs() {
        return Err(VoiError::DimensionMismatch(format!(
            "prior has {} symbols but the loss matrix has {} rows",
            p.prior.len(),
            p.loss.n_inputs()
        )));
    }
    Ok(p)
}

/// Uniform channel with `|X|` rows and `|A|` columns.
pub fn uniform_channel(n_inputs: usize, n_actions: usize) -> Channel {
    Channel::uniform(n_inputs, n_actions)
}
