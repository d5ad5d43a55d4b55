use serde::{Deserialize, Serialize};

use crate::envelope::{gradient_from_prox, polar_prox, PolarProxResult};
use crate::error::{GaugeError, Result};
use crate::gauge::{ensure_dim, ensure_finite, ensure_positive, GaugeKind, SharedGauge};
use crate::{Matrix, Vector};

const MULTIPLIER_BISECTIONS: usize = 200;

/// Residual gauge `ρ` of the constraint `ρ(b − Ax) ≤ σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualGauge {
    /// `δ_{0}`: equality constraints `Ax = b`.
    Zero,
    /// Euclidean norm: `‖b − Ax‖ ≤ σ`.
    L2,
}

impl ResidualGauge {
    pub fn from_gauge(rho: &SharedGauge) -> Result<Self> {
        match rho.kind() {
            GaugeKind::ZeroIndicator => Ok(ResidualGauge::Zero),
            GaugeKind::L2 => Ok(ResidualGauge::L2),
            other => Err(GaugeError::Unsupported(format!(
                "residual gauge must be the origin indicator or the 2-norm, got {other:?}"
            ))),
        }
    }

    pub fn eval(self, v: &Vector) -> f64 {
        match self {
            ResidualGauge::Zero if v.iter().all(|&x| x == 0.0) => 0.0,
            ResidualGauge::Zero => f64::INFINITY,
            ResidualGauge::L2 => v.norm(),
        }
    }

    /// `ρ°`: identically zero for `δ_{0}`, the 2-norm for the 2-norm.
    pub fn polar_eval(self, y: &Vector) -> f64 {
        match self {
            ResidualGauge::Zero => 0.0,
            ResidualGauge::L2 => y.norm(),
        }
    }
}

/// `minimize κ(x) + α‖x‖ subject to ρ(b − Ax) ≤ σ` and its gauge dual
/// `minimize (κ°)_α(Aᵀy) subject to ⟨b, y⟩ − σρ°(y) ≥ 1`.
#[derive(Debug, Clone)]
pub struct GaugeDualProblem {
    kappa: SharedGauge,
    kappa_polar: SharedGauge,
    rho: ResidualGauge,
    a: Matrix,
    b: Vector,
    sigma: f64,
    alpha: f64,
}

#[derive(Debug, Clone)]
pub struct DualEvaluation {
    pub value: f64,
    pub gradient: Vector,
    pub envelope: PolarProxResult,
}

impl GaugeDualProblem {
    pub fn new(
        kappa: SharedGauge,
        rho: ResidualGauge,
        a: Matrix,
        b: Vector,
        sigma: f64,
        alpha: f64,
    ) -> Result<Self> {
        let kappa_polar = kappa.polar().ok_or_else(|| {
            GaugeError::Unsupported(format!("{:?} has no closed-form polar", kappa.kind()))
        })?;
        if a.ncols() != kappa.dim() {
            return Err(GaugeError::DimensionMismatch {
                expected: kappa.dim(),
                got: a.ncols(),
            });
        }
        ensure_dim(a.nrows(), &b)?;
        ensure_finite("b", &b)?;
        if let Some(i) = a.iter().position(|v| !v.is_finite()) {
            return Err(GaugeError::NonFinite { what: "A", index: i });
        }
        if b.iter().all(|&v| v == 0.0) {
            return Err(GaugeError::InvalidInput("b must be nonzero".into()));
        }
        ensure_positive("alpha", alpha)?;
        if !(sigma.is_finite() && sigma >= 0.0 && sigma < rho.eval(&b)) {
            return Err(GaugeError::InvalidInput(format!(
                "sigma must lie in [0, rho(b)), got {sigma}"
            )));
        }
        Ok(GaugeDualProblem {
            kappa,
            kappa_polar,
            rho,
            a,
            b,
            sigma,
            alpha,
        })
    }

    pub fn kappa(&self) -> &SharedGauge {
        &self.kappa
    }

    pub fn kappa_polar(&self) -> &SharedGauge {
        &self.kappa_polar
    }

    pub fn rho(&self) -> ResidualGauge {
        self.rho
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Same data with a different regularization weight.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        Ok(GaugeDualProblem {
            alpha,
            ..self.clone()
        })
    }

    /// `max{ρ(b − Ax) − σ, 0}`; for `ρ = δ_{0}` the distance `‖b − Ax‖`.
    pub fn feasibility_residual(&self, x: &Vector) -> f64 {
        let r = &self.b - &self.a * x;
        match self.rho {
            ResidualGauge::Zero => r.norm(),
            ResidualGauge::L2 => (r.norm() - self.sigma).max(0.0),
        }
    }

    /// Left side of the dual constraint, `⟨b, y⟩ − σρ°(y)`.
    pub fn constraint_value(&self, y: &Vector) -> f64 {
        self.b.dot(y) - self.sigma * self.rho.polar_eval(y)
    }

    pub fn is_dual_feasible(&self, y: &Vector, tol: f64) -> bool {
        self.constraint_value(y) >= 1.0 - tol
    }

    /// Feasible start on the constraint boundary, along `b`.
    pub fn initial_point(&self) -> Vector {
        let nb = self.b.norm();
        let t = match self.rho {
            ResidualGauge::Zero => 1.0 / (nb * nb),
            ResidualGauge::L2 => 1.0 / (nb * (nb - self.sigma)),
        };
        &self.b * t
    }

    /// Euclidean projection onto `{y : ⟨b, y⟩ − σρ°(y) ≥ 1}`.
    ///
    /// For the 2-norm case the projection of an infeasible `y` is
    /// `z = w(1 − μσ/‖w‖)` with `w = y + μb`, where the multiplier `μ > 0`
    /// makes the constraint active; `μ` is found by bisection.
    pub fn project_dual_feasible(&self, y: &Vector) -> Vector {
        if self.constraint_value(y) >= 1.0 {
            return y.clone();
        }
        match self.rho {
            ResidualGauge::Zero => {
                let gap = 1.0 - self.b.dot(y);
                y + &self.b * (gap / self.b.norm_squared())
            }
            ResidualGauge::L2 => self.project_soc(y),
        }
    }

    fn project_soc(&self, y: &Vector) -> Vector {
        let z_of = |mu: f64| {
            let w = y + &self.b * mu;
            let nw = w.norm();
            if nw <= mu * self.sigma {
                return None;
            }
            Some(&w * (1.0 - mu * self.sigma / nw))
        };
        let slack = |mu: f64| match z_of(mu) {
            Some(z) => self.constraint_value(&z) - 1.0,
            None => -1.0,
        };
        let mut hi = 1.0 / self.b.norm_squared();
        while slack(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..MULTIPLIER_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slack(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        z_of(hi).expect("upper multiplier gives a feasible point")
    }

    /// Dual objective `(κ°)_α(Aᵀy)` without its gradient.
    pub fn dual_value(&self, y: &Vector) -> Result<f64> {
        Ok(polar_prox(self.kappa_polar.as_ref(), self.alpha, &self.a.tr_mul(y))?.value)
    }

    pub fn evaluate(&self, y: &Vector) -> Result<DualEvaluation> {
        ensure_dim(self.b.len(), y)?;
        let u = self.a.tr_mul(y);
        let envelope = polar_prox(self.kappa_polar.as_ref(), self.alpha, &u)?;
        let g = gradient_from_prox(self.alpha, &u, &envelope)?;
        Ok(DualEvaluation {
            value: envelope.value,
            gradient: &self.a * g.gradient,
            envelope,
        })
    }

    /// `x̂ = [(1/r)/(κ(p) + α‖p‖)]·p` with `p = prox_{rκ}(Aᵀy)` and `r` the
    /// dual objective at `y`.
    pub fn recover_primal(&self, y: &Vector, r: f64) -> Result<Vector> {
        let u = self.a.tr_mul(y);
        let p = self.kappa.moreau_prox(r, &u)?;
        let denom = self.kappa.eval(&p) + self.alpha * p.norm();
        if !(denom > 0.0 && denom.is_finite()) || r <= 0.0 {
            return Err(GaugeError::NonDifferentiable {
                value: r,
                floor: 0.0,
            });
        }
        Ok(p * ((1.0 / r) / denom))
    }

    pub fn primal_objective(&self, x: &Vector) -> f64 {
        self.kappa.eval(x) + self.alpha * x.norm()
    }
}

/// Dual objective value and gradient `A∇(κ°)_α(Aᵀy)`.
pub fn dual_objective(p: &GaugeDualProblem, y: &Vector) -> Result<(f64, Vector)> {
    let e = p.evaluate(y)?;
    Ok((e.value, e.gradient))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::gauge::{Norm, NormGauge};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn l1(n: usize) -> SharedGauge {
        Arc::new(NormGauge::new(Norm::L1, n))
    }

    #[test]
    fn identity_map_reuses_linf_example() {
        let p = GaugeDualProblem::new(l1(2), ResidualGauge::Zero, Matrix::identity(2, 2), v(&[1.0, 0.0]), 0.0, 1.0).unwrap();
        let (value, grad) = dual_objective(&p, &v(&[3.0, 1.0])).unwrap();
        assert_abs_diff_eq!(value, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!((grad - v(&[0.5, 0.0])).norm(), 0.0, epsilon = 1e-12);
        let (doubled, _) = dual_objective(&p, &v(&[6.0, 2.0])).unwrap();
        assert_abs_diff_eq!(doubled, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_map_has_no_gradient() {
        let p = GaugeDualProblem::new(l1(2), ResidualGauge::Zero, Matrix::zeros(1, 2), v(&[1.0]), 0.0, 1.0).unwrap();
        assert_eq!(p.dual_value(&v(&[4.0])).unwrap(), 0.0);
        assert!(matches!(dual_objective(&p, &v(&[4.0])), Err(GaugeError::NonDifferentiable { .. })));
    }

    #[test]
    fn construction_checks() {
        let a = Matrix::identity(2, 2);
        assert!(GaugeDualProblem::new(l1(2), ResidualGauge::Zero, a.clone(), v(&[0.0, 0.0]), 0.0, 1.0).is_err());
        assert!(GaugeDualProblem::new(l1(2), ResidualGauge::L2, a.clone(), v(&[3.0, 4.0]), 5.0, 1.0).is_err());
        assert!(GaugeDualProblem::new(l1(2), ResidualGauge::L2, a.clone(), v(&[3.0, 4.0]), 4.9, 1.0).is_ok());
        assert!(GaugeDualProblem::new(l1(3), ResidualGauge::Zero, a.clone(), v(&[1.0, 0.0]), 0.0, 1.0).is_err());
        assert!(GaugeDualProblem::new(l1(2), ResidualGauge::Zero, a, v(&[1.0, 0.0]), 0.0, -1.0).is_err());
    }

    #[test]
    fn halfspace_projection() {
        let p = GaugeDualProblem::new(l1(2), ResidualGauge::Zero, Matrix::identity(2, 2), v(&[1.0, 1.0]), 0.0, 1.0).unwrap();
        let z = p.project_dual_feasible(&v(&[0.0, 0.0]));
        assert_abs_diff_eq!((z - v(&[0.5, 0.5])).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(p.project_dual_feasible(&v(&[2.0, 0.0])), v(&[2.0, 0.0]));
        assert_abs_diff_eq!(p.constraint_value(&p.initial_point()), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn second_order_projection_is_a_projection() {
        let b = v(&[2.0, 1.0, -0.5]);
        let p = GaugeDualProblem::new(l1(3), ResidualGauge::L2, Matrix::identity(3, 3), b, 0.8, 1.0).unwrap();
        assert_abs_diff_eq!(p.constraint_value(&p.initial_point()), 1.0, epsilon = 1e-12);
        let y = v(&[-1.0, 0.3, 2.0]);
        let z = p.project_dual_feasible(&y);
        assert_abs_diff_eq!(p.constraint_value(&z), 1.0, epsilon = 1e-10);
        // variational inequality against feasible points
        for c in [p.initial_point() * 3.0, v(&[1.0, 1.0, 0.0]), v(&[5.0, -2.0, 1.0])] {
            assert!(p.is_dual_feasible(&c, 0.0));
            assert!((&y - &z).dot(&(c - &z)) <= 1e-10);
        }
    }
}
