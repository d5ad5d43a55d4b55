//! Gauges: nonnegative, positively homogeneous convex functions that vanish at
//! the origin, exposed through evaluation and Euclidean level-set projection.
//!
//! `+∞` is encoded as `f64::INFINITY` and marks points outside the domain; a
//! gauge never returns `NaN`.

mod cone;
mod descriptor;
mod norms;
mod prox;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GaugeError, Result};
use crate::Vector;

pub use cone::{Cone, ConeIndicator, LinearConeGauge, DYKSTRA_MAX_SWEEPS};
pub use descriptor::{ConeDescriptor, GaugeDescriptor};
pub use norms::{Norm, NormGauge, ScaledGauge, ZeroFunction, ZeroIndicator};
pub use prox::{moreau_prox, project_l1_ball, soft_threshold};

pub type SharedGauge = Arc<dyn Gauge>;

/// Tag used to pick closed-form fast paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeKind {
    L1,
    L2,
    Linf,
    ConeIndicator,
    LinearCone,
    ZeroIndicator,
    ZeroFunction,
    Scaled,
    Lifted,
    Custom,
}

pub trait Gauge: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn kind(&self) -> GaugeKind {
        GaugeKind::Custom
    }

    /// Value of the gauge, `f64::INFINITY` outside the domain.
    fn eval(&self, x: &Vector) -> f64;

    /// Euclidean projection onto the level set `[κ ≤ r]`, `r ≥ 0`.
    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector>;

    /// Projection onto the closure of the domain. `None` means the domain is
    /// the whole space.
    fn project_domain(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    /// Closed-form polar gauge, when one is known.
    fn polar(&self) -> Option<SharedGauge> {
        None
    }

    /// True when the gauge is finite everywhere.
    fn is_continuous(&self) -> bool;

    /// `argmin_z { κ(z) + ‖x − z‖² / (2t) }`.
    fn moreau_prox(&self, _t: f64, _x: &Vector) -> Result<Vector> {
        Err(GaugeError::Unsupported(format!(
            "Moreau prox is not implemented for {:?}",
            self.kind()
        )))
    }

    /// Accuracy of `project_level_set`; zero for exact projections.
    fn projection_resolution(&self) -> f64 {
        0.0
    }
}

/// Feasibility tolerance for level-set membership at radius `r`.
pub fn tol_feas(r: f64) -> f64 {
    1e-9 * (1.0 + r.abs())
}

pub(crate) fn ensure_finite(what: &'static str, x: &Vector) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(GaugeError::NonFinite { what, index }),
        None => Ok(()),
    }
}

pub(crate) fn ensure_dim(expected: usize, x: &Vector) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(GaugeError::DimensionMismatch {
            expected,
            got: x.len(),
        })
    }
}

pub(crate) fn ensure_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GaugeError::InvalidInput(format!(
            "{what} must be positive and finite, got {v}"
        )))
    }
}

pub(crate) fn ensure_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(GaugeError::InvalidInput(format!(
            "level-set radius must be finite and nonnegative, got {r}"
        )))
    }
}
