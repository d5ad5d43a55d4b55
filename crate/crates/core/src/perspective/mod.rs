//! Perspective transforms `f^π(x, λ) = λf(x/λ)` of nonnegative convex `f`,
//! the projected polar envelope `p_{α,f}(x) = f^π_α(x, 1)` with its projected
//! polar proximal map, and the two minimization schemes built on them.

mod algorithms;
mod descriptor;
mod halfplane;
mod shifted_l1;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::envelope::{gradient_from_prox, polar_prox, PolarProxResult};
use crate::error::Result;
use crate::gauge::{ensure_dim, ensure_radius, Gauge, GaugeKind};
use crate::Vector;

pub use algorithms::{run_ema, run_p4a, EmaOptions, EmaReport, EmaStep, P4AOptions, P4AReport, PerspectiveRecord};
pub use descriptor::{LiftedDescriptor, LiftedKind};
pub use halfplane::SmoothedL1Halfplane;
pub use shifted_l1::ShiftedL1;

pub type SharedLifted = Arc<dyn LiftedFunction>;

/// A nonnegative closed convex `f` with `inf f > 0`, exposed through its
/// perspective. Lifted points are `(x, λ)` stored as one vector of length
/// `dim() + 1` with `λ` last.
pub trait LiftedFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn base_eval(&self, x: &Vector) -> f64;

    /// `rec f`, the `λ = 0` branch of the perspective.
    fn recession_eval(&self, x: &Vector) -> f64;

    fn perspective_eval(&self, x: &Vector, lambda: f64) -> f64 {
        if lambda < 0.0 {
            f64::INFINITY
        } else if lambda == 0.0 {
            self.recession_eval(x)
        } else {
            let v = self.base_eval(&(x / lambda));
            if v.is_infinite() {
                v
            } else {
                lambda * v
            }
        }
    }

    /// Euclidean projection of a lifted point onto `[f^π ≤ r]`.
    fn lifted_level_projection(&self, point: &Vector, r: f64) -> Result<Vector>;

    /// Projection onto `cl dom f^π`; `None` when that is all of the lifted space.
    fn lifted_domain_projection(&self, _point: &Vector) -> Option<Vector> {
        None
    }

    /// Accuracy of `lifted_level_projection`; zero when exact.
    fn projection_resolution(&self) -> f64 {
        0.0
    }

    /// `(inf f, a minimizer)` when known in closed form.
    fn known_minimum(&self) -> Option<(f64, Vector)> {
        None
    }
}

pub(crate) fn split(point: &Vector) -> (Vector, f64) {
    let n = point.len() - 1;
    (point.rows(0, n).into_owned(), point[n])
}

pub(crate) fn join(x: &Vector, lambda: f64) -> Vector {
    let mut p = Vector::zeros(x.len() + 1);
    p.rows_mut(0, x.len()).copy_from(x);
    p[x.len()] = lambda;
    p
}

/// `f^π` as a gauge on the lifted space.
#[derive(Debug, Clone)]
pub struct LiftedGauge {
    inner: SharedLifted,
}

impl LiftedGauge {
    pub fn new(inner: SharedLifted) -> Self {
        LiftedGauge { inner }
    }

    pub fn inner(&self) -> &SharedLifted {
        &self.inner
    }
}

impl Gauge for LiftedGauge {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }

    fn kind(&self) -> GaugeKind {
        GaugeKind::Lifted
    }

    fn eval(&self, point: &Vector) -> f64 {
        let (x, lambda) = split(point);
        self.inner.perspective_eval(&x, lambda)
    }

    fn project_level_set(&self, point: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        ensure_dim(self.dim(), point)?;
        self.inner.lifted_level_projection(point, r)
    }

    fn project_domain(&self, point: &Vector) -> Option<Vector> {
        self.inner.lifted_domain_projection(point)
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn projection_resolution(&self) -> f64 {
        self.inner.projection_resolution()
    }
}

/// `p_{α,f}(x)` together with `rpprox(x) = (x̄, λ̄)`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectedEnvelope {
    pub value: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub x_bar: Vector,
    pub lambda_bar: f64,
    #[serde(skip)]
    pub prox: PolarProxResult,
}

pub fn projected_polar_envelope(lf: &SharedLifted, alpha: f64, x: &Vector) -> Result<ProjectedEnvelope> {
    ensure_dim(lf.dim(), x)?;
    let g = LiftedGauge::new(lf.clone());
    let prox = polar_prox(&g, alpha, &join(x, 1.0))?;
    let (x_bar, lambda_bar) = split(&prox.prox_point);
    Ok(ProjectedEnvelope {
        value: prox.value,
        x_bar,
        lambda_bar,
        prox,
    })
}

/// Gradient of `x ↦ f^π_α(x, 1)`: the `x`-block of the lifted envelope
/// gradient at `(x, 1)`.
pub fn projected_envelope_gradient(
    lf: &SharedLifted,
    alpha: f64,
    x: &Vector,
) -> Result<(ProjectedEnvelope, Vector)> {
    let env = projected_polar_envelope(lf, alpha, x)?;
    let g = gradient_from_prox(alpha, &join(x, 1.0), &env.prox)?;
    let grad = g.gradient.rows(0, x.len()).into_owned();
    Ok((env, grad))
}
