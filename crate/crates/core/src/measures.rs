//! Entropies and divergences in nats.
//!
//! Divergences reject a zero reference mass under positive mass instead of
//! extending by continuity; callers working with floored channels never hit
//! that case.

use crate::error::{Result, VoiError};
use crate::generator::FGenerator;
use crate::problem::{Channel, Prior};

fn check_order(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        Err(VoiError::BadOrder(alpha))
    } else {
        Ok(())
    }
}

fn check_support(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(VoiError::DimensionMismatch(format!(
            "divergence arguments have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    match p.iter().zip(q).position(|(&pi, &qi)| pi > 0.0 && qi <= 0.0) {
        Some(index) => Err(VoiError::SupportViolation { index }),
        None => Ok(()),
    }
}

/// `H(p) = −Σ p log p` with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Rényi entropy `(1/(1−α)) log Σ p^α`.
pub fn renyi_entropy(alpha: f64, p: &[f64]) -> Result<f64> {
    check_order(alpha)?;
    let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
    Ok(s.ln() / (1.0 - alpha))
}

/// Joint mass `p_{X,A}(x, a)`, row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    n_inputs: usize,
    n_actions: usize,
    mass: Vec<f64>,
}

impl JointDistribution {
    pub fn new(prior: &Prior, channel: &Channel) -> Self {
        let mass = channel
            .rows()
            .zip(prior.probs())
            .flat_map(|(row, &px)| row.iter().map(move |&p| px * p))
            .collect();
        JointDistribution { n_inputs: channel.n_inputs(), n_actions: channel.n_actions(), mass }
    }

    /// Raw joint masses; zeros are allowed.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_inputs = rows.len();
        let n_actions = rows.first().map_or(0, Vec::len);
        if n_inputs == 0 || n_actions == 0 || rows.iter().any(|r| r.len() != n_actions) {
            return Err(VoiError::DimensionMismatch("ragged or empty joint".into()));
        }
        let mass: Vec<f64> = rows.into_iter().flatten().collect();
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(VoiError::NotADistribution("negative joint mass".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(VoiError::NotADistribution(format!("joint has total mass {total}")));
        }
        Ok(JointDistribution { n_inputs, n_actions, mass })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, x: usize, a: usize) -> f64 {
        self.mass[x * self.n_actions + a]
    }
}

/// Arimoto's conditional entropy
/// `(α/(1−α)) log Σ_a (Σ_x p_{X,A}(x,a)^α)^{1/α}`.
pub fn arimoto_conditional_entropy(alpha: f64, joint: &JointDistribution) -> Result<f64> {
    check_order(alpha)?;
    let s: f64 = (0..joint.n_actions())
        .map(|a| {
            (0..joint.n_inputs())
                .map(|x| joint.get(x, a))
                .filter(|&m| m > 0.0)
                .map(|m| m.powf(alpha))
                .sum::<f64>()
                .powf(1.0 / alpha)
        })
        .sum();
    Ok(alpha / (1.0 - alpha) * s.ln())
}

/// `D_f(p‖q) = Σ q f(p/q)`.
pub fn f_divergence(f: &FGenerator, p: &[f64], q: &[f64]) -> Result<f64> {
    check_support(p, q)?;
    Ok(p.iter().zip(q).filter(|(_, &qi)| qi > 0.0).map(|(&pi, &qi)| qi * f.f(pi / qi)).sum())
}

/// Kullback–Leibler divergence `Σ p log(p/q)`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_support(p, q)?;
    Ok(p.iter().zip(q).filter(|(&pi, _)| pi > 0.0).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum())
}

/// Rényi divergence `(1/(α−1)) log Σ p^α q^{1−α}`.
pub fn renyi_divergence(alpha: f64, p: &[f64], q: &[f64]) -> Result<f64> {
    check_order(alpha)?;
    check_support(p, q)?;
    let s: f64 = p
        .iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi.powf(alpha) * qi.powf(1.0 - alpha))
        .sum();
    Ok(s.ln() / (alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&[0.5, 0.5]) - LN_2).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]), 0.0);
        assert!((shannon_entropy(&[0.9, 0.1]) - 0.325_082_973_391_448_2).abs() < 1e-12);
    }

    #[test]
    fn renyi_entropy_examples() {
        for alpha in [0.3, 2.0, 5.0] {
            let h = renyi_entropy(alpha, &[0.25; 4]).unwrap();
            assert!((h - 4f64.ln()).abs() < 1e-12);
        }
        assert_eq!(renyi_entropy(2.0, &[1.0, 0.0]).unwrap(), 0.0);
        assert!((renyi_entropy(2.0, &[0.5, 0.5]).unwrap() - LN_2).abs() < 1e-15);
        assert!(matches!(renyi_entropy(1.0, &[0.5, 0.5]), Err(VoiError::BadOrder(_))));
    }

    #[test]
    fn arimoto_conditional_examples() {
        let indep = JointDistribution::from_rows(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        assert!((arimoto_conditional_entropy(2.0, &indep).unwrap() - LN_2).abs() < 1e-12);
        let det = JointDistribution::from_rows(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        for alpha in [0.5, 2.0] {
            assert!(arimoto_conditional_entropy(alpha, &det).unwrap().abs() < 1e-12);
        }
        let bsc = JointDistribution::from_rows(vec![vec![0.45, 0.05], vec![0.05, 0.45]]).unwrap();
        // −2·log(2·√0.205)
        let h = arimoto_conditional_entropy(2.0, &bsc).unwrap();
        assert!((h - 0.198_450_938_723_838_1).abs() < 1e-12, "{h}");
    }

    #[test]
    fn f_divergence_examples() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(f_divergence(&FGenerator::NeymanChi2, &p, &p).unwrap(), 0.0);
        assert!((f_divergence(&FGenerator::Kl, &[1.0, 0.0], &[0.5, 0.5]).unwrap() - LN_2).abs() < 1e-15);
        let chi = f_divergence(&FGenerator::PearsonChi2, &[0.75, 0.25], &[0.5, 0.5]).unwrap();
        assert!((chi - 0.25).abs() < 1e-15);
        assert!(matches!(
            f_divergence(&FGenerator::Kl, &[0.5, 0.5], &[1.0, 0.0]),
            Err(VoiError::SupportViolation { index: 1 })
        ));
    }

    #[test]
    fn renyi_divergence_examples() {
        let p = [0.2, 0.8];
        assert!(renyi_divergence(0.5, &p, &p).unwrap().abs() < 1e-15);
        let d = renyi_divergence(2.0, &[0.75, 0.25], &[0.5, 0.5]).unwrap();
        assert!((d - 1.25f64.ln()).abs() < 1e-15);
        assert!(renyi_divergence(1.0, &p, &p).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn divergences_nonnegative(p in simplex(4), q in simplex(4), alpha in prop_oneof![0.1f64..0.99, 1.01f64..4.0]) {
            prop_assert!(kl_divergence(&p, &q).unwrap() >= -1e-12);
            prop_assert!(renyi_divergence(alpha, &p, &q).unwrap() >= -1e-12);
            for g in [FGenerator::ReverseKl, FGenerator::SquaredHellinger, FGenerator::PearsonChi2,
                      FGenerator::NeymanChi2, FGenerator::HellingerOrder(alpha), FGenerator::AlphaDivergence(alpha)] {
                prop_assert!(f_divergence(&g, &p, &q).unwrap() >= -1e-12);
            }
        }

        #[test]
        fn renyi_tends_to_kl(p in simplex(3), q in simplex(3)) {
            let kl = kl_divergence(&p, &q).unwrap();
            for alpha in [1.0 - 1e-5, 1.0 + 1e-5] {
                prop_assert!((renyi_divergence(alpha, &p, &q).unwrap() - kl).abs() <= 1e-4);
            }
        }

        #[test]
        fn renyi_hellinger_identity(p in simplex(3), q in simplex(3)) {
            for alpha in [0.3, 0.7, 2.0, 3.0] {
                let d = renyi_divergence(alpha, &p, &q).unwrap();
                let h = f_divergence(&FGenerator::HellingerOrder(alpha), &p, &q).unwrap();
                let via = (1.0 + (alpha - 1.0) * h).ln() / (alpha - 1.0);
                prop_assert!((d - via).abs() <= 1e-10);
            }
        }
    }
}
