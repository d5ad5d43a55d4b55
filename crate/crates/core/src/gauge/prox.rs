use crate::error::Result;
use crate::gauge::{ensure_dim, ensure_finite, ensure_positive, Gauge};
use crate::Vector;

/// Moreau proximal map of `t·g` at `x`.
pub fn moreau_prox(g: &dyn Gauge, t: f64, x: &Vector) -> Result<Vector> {
    ensure_positive("prox parameter t", t)?;
    ensure_dim(g.dim(), x)?;
    ensure_finite("x", x)?;
    g.moreau_prox(t, x)
}

pub fn soft_threshold(x: &Vector, t: f64) -> Vector {
    x.map(|v| v.signum() * (v.abs() - t).max(0.0))
}

/// Euclidean projection onto the ℓ₁ ball of radius `r`.
///
/// Sort-and-threshold: with `u` the magnitudes sorted in decreasing order, the
/// threshold is `θ = (Σ_{i≤ρ} u_i − r)/ρ` for the largest `ρ` with
/// `u_ρ > (Σ_{i≤ρ} u_i − r)/ρ`.
pub fn project_l1_ball(x: &Vector, r: f64) -> Vector {
    if x.lp_norm(1) <= r {
        return x.clone();
    }
    if r <= 0.0 {
        return Vector::zeros(x.len());
    }
    let mut u: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let candidate = (cumsum - r) / (j + 1) as f64;
        if uj > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    soft_threshold(x, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold_by_one() {
        let x = Vector::from_vec(vec![3.0, -0.5]);
        assert_eq!(soft_threshold(&x, 1.0), Vector::from_vec(vec![2.0, 0.0]));
    }

    #[test]
    fn l1_ball_axis_point() {
        let x = Vector::from_vec(vec![2.0, 0.0]);
        assert_eq!(project_l1_ball(&x, 1.0), Vector::from_vec(vec![1.0, 0.0]));
    }

    #[test]
    fn l1_ball_matches_kkt() {
        // (3, 1, -2) onto radius 2: θ solves (3-θ) + (2-θ) = 2 with 1 ≤ θ → θ = 1.5
        let x = Vector::from_vec(vec![3.0, 1.0, -2.0]);
        let p = project_l1_ball(&x, 2.0);
        let expected = Vector::from_vec(vec![1.5, 0.0, -0.5]);
        assert!((p - expected).norm() < 1e-15);
    }

    #[test]
    fn l1_ball_inside_and_zero_radius() {
        let x = Vector::from_vec(vec![0.2, -0.3]);
        assert_eq!(project_l1_ball(&x, 1.0), x);
        assert_eq!(project_l1_ball(&x, 0.0), Vector::zeros(2));
    }
}
