use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gauge::prox::{project_l1_ball, soft_threshold};
use crate::gauge::{ensure_radius, Gauge, GaugeKind, SharedGauge};
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }
}

/// ℓ₁, ℓ₂ or ℓ∞ norm on a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormGauge {
    norm: Norm,
    dim: usize,
}

impl NormGauge {
    pub fn new(norm: Norm, dim: usize) -> Self {
        assert!(dim >= 1, "norm gauge needs dim >= 1");
        NormGauge { norm, dim }
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }
}

impl Gauge for NormGauge {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> GaugeKind {
        match self.norm {
            Norm::L1 => GaugeKind::L1,
            Norm::L2 => GaugeKind::L2,
            Norm::Linf => GaugeKind::Linf,
        }
    }

    fn eval(&self, x: &Vector) -> f64 {
        match self.norm {
            Norm::L1 => x.lp_norm(1),
            Norm::L2 => x.norm(),
            Norm::Linf => x.amax(),
        }
    }

    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        Ok(match self.norm {
            Norm::L1 => project_l1_ball(x, r),
            Norm::L2 => {
                let nx = x.norm();
                if nx <= r {
                    x.clone()
                } else {
                    x * (r / nx)
                }
            }
            Norm::Linf => x.map(|v| v.clamp(-r, r)),
        })
    }

    fn polar(&self) -> Option<SharedGauge> {
        Some(Arc::new(NormGauge::new(self.norm.dual(), self.dim)))
    }

    fn is_continuous(&self) -> bool {
        true
    }

    fn moreau_prox(&self, t: f64, x: &Vector) -> Result<Vector> {
        Ok(match self.norm {
            Norm::L1 => soft_threshold(x, t),
            Norm::L2 => {
                let nx = x.norm();
                if nx <= t {
                    Vector::zeros(x.len())
                } else {
                    x * (1.0 - t / nx)
                }
            }
            // Moreau decomposition with the dual ball: x − P_{[‖·‖₁ ≤ t]}(x)
            Norm::Linf => x - project_l1_ball(x, t),
        })
    }
}

/// `s·g` for a positive factor `s`.
#[derive(Debug, Clone)]
pub struct ScaledGauge {
    factor: f64,
    inner: SharedGauge,
}

impl ScaledGauge {
    pub fn new(factor: f64, inner: SharedGauge) -> Self {
        assert!(
            factor.is_finite() && factor > 0.0,
            "scale factor must be positive"
        );
        ScaledGauge { factor, inner }
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn inner(&self) -> &SharedGauge {
        &self.inner
    }
}

impl Gauge for ScaledGauge {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn kind(&self) -> GaugeKind {
        GaugeKind::Scaled
    }

    fn eval(&self, x: &Vector) -> f64 {
        let v = self.inner.eval(x);
        if v.is_infinite() {
            v
        } else {
            self.factor * v
        }
    }

    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        self.inner.project_level_set(x, r / self.factor)
    }

    fn project_domain(&self, x: &Vector) -> Option<Vector> {
        self.inner.project_domain(x)
    }

    fn polar(&self) -> Option<SharedGauge> {
        let inner_polar = self.inner.polar()?;
        Some(Arc::new(ScaledGauge::new(1.0 / self.factor, inner_polar)))
    }

    fn is_continuous(&self) -> bool {
        self.inner.is_continuous()
    }

    fn moreau_prox(&self, t: f64, x: &Vector) -> Result<Vector> {
        self.inner.moreau_prox(t * self.factor, x)
    }

    fn projection_resolution(&self) -> f64 {
        self.inner.projection_resolution()
    }
}

/// Indicator of the origin, `δ_{0}`. Used as the residual gauge of equality
/// constraints.
#[derive(Debug, Clone, Copy)]
pub struct ZeroIndicator {
    dim: usize,
}

impl ZeroIndicator {
    pub fn new(dim: usize) -> Self {
        ZeroIndicator { dim }
    }
}

impl Gauge for ZeroIndicator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> GaugeKind {
        GaugeKind::ZeroIndicator
    }

    fn eval(&self, x: &Vector) -> f64 {
        if x.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        Ok(Vector::zeros(x.len()))
    }

    fn project_domain(&self, x: &Vector) -> Option<Vector> {
        Some(Vector::zeros(x.len()))
    }

    fn polar(&self) -> Option<SharedGauge> {
        Some(Arc::new(ZeroFunction::new(self.dim)))
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn moreau_prox(&self, _t: f64, x: &Vector) -> Result<Vector> {
        Ok(Vector::zeros(x.len()))
    }
}

/// The identically-zero gauge; polar of `δ_{0}`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroFunction {
    dim: usize,
}

impl ZeroFunction {
    pub fn new(dim: usize) -> Self {
        ZeroFunction { dim }
    }
}

impl Gauge for ZeroFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> GaugeKind {
        GaugeKind::ZeroFunction
    }

    fn eval(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        Ok(x.clone())
    }

    fn polar(&self) -> Option<SharedGauge> {
        Some(Arc::new(ZeroIndicator::new(self.dim)))
    }

    fn is_continuous(&self) -> bool {
        true
    }

    fn moreau_prox(&self, _t: f64, x: &Vector) -> Result<Vector> {
        Ok(x.clone())
    }
}
