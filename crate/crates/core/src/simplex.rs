//! Small helpers for vectors living on the probability simplex.

/// Lower bound kept on every channel and action-distribution entry so that
/// iterates stay in the open simplex.
pub const P_FLOOR: f64 = 1e-12;

/// Scales `v` so it sums to one. Returns the original sum.
pub fn normalize(v: &mut [f64]) -> f64 {
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    s
}

/// Normalizes `v`, raises entries below [`P_FLOOR`] to the floor and
/// renormalizes.
pub fn floor_normalize(v: &mut [f64]) {
    normalize(v);
    let mut raised = false;
    for x in v.iter_mut() {
        if !(*x >= P_FLOOR) {
            *x = P_FLOOR;
            raised = true;
        }
    }
    if raised {
        normalize(v);
    }
}

pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Index of the smallest value, lowest index on ties.
pub fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// KKT residual of `min_w h(w)` over the simplex given the gradient `grad`
/// at the point `w`.
///
/// The multiplier is eliminated by the `w`-weighted mean `ν` of the gradient.
/// Dual feasibility requires `grad[a] ≥ ν` everywhere and complementary
/// slackness requires `w[a]·(grad[a] − ν) = 0`; the returned value is the
/// largest violation of either.
pub fn simplex_kkt_residual(w: &[f64], grad: &[f64]) -> f64 {
    let nu: f64 = w.iter().zip(grad).map(|(wi, gi)| wi * gi).sum();
    w.iter().zip(grad).fold(0.0_f64, |worst, (&wi, &gi)| {
        let dev = gi - nu;
        let r = if dev < 0.0 { -dev } else { wi * dev };
        worst.max(r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_keeps_sum() {
        let mut v = vec![1.0, 0.0, 0.0];
        floor_normalize(&mut v);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn argmin_ties_lowest() {
        assert_eq!(argmin(&[1.0, 0.5, 0.5]), 1);
    }

    #[test]
    fn kkt_residual_zero_at_constant_gradient() {
        assert_eq!(simplex_kkt_residual(&[0.3, 0.7], &[2.0, 2.0]), 0.0);
        // boundary entry with larger gradient is fine
        assert!(simplex_kkt_residual(&[1.0 - 1e-12, 1e-12], &[0.0, 5.0]) < 1e-10);
        // any entry below the multiplier is a violation
        assert!(simplex_kkt_residual(&[0.5, 0.5], &[0.0, 1.0]) >= 0.5);
    }
}
