use std::fmt;
use std::sync::Arc;

use crate::error::{GaugeError, Result};
use crate::gauge::{ensure_radius, Gauge, GaugeKind, SharedGauge};
use crate::Vector;

pub const DYKSTRA_MAX_SWEEPS: usize = 10_000;
const DYKSTRA_MOVE_TOL: f64 = 1e-12;

type ProjectFn = dyn Fn(&Vector) -> Vector + Send + Sync;

/// A closed convex cone given by its Euclidean projection.
#[derive(Clone)]
pub enum Cone {
    NonnegativeOrthant,
    /// `{x : ⟨a, x⟩ ≤ 0}`.
    Halfspace { normal: Vector },
    Custom {
        name: String,
        project: Arc<ProjectFn>,
    },
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cone::NonnegativeOrthant => write!(f, "NonnegativeOrthant"),
            Cone::Halfspace { normal } => write!(f, "Halfspace({:?})", normal.as_slice()),
            Cone::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Cone {
    pub fn halfspace(normal: Vector) -> Result<Self> {
        if normal.norm() == 0.0 || normal.iter().any(|v| !v.is_finite()) {
            return Err(GaugeError::InvalidInput(
                "halfspace normal must be finite and nonzero".into(),
            ));
        }
        Ok(Cone::Halfspace { normal })
    }

    pub fn custom<F>(name: impl Into<String>, project: F) -> Self
    where
        F: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        Cone::Custom {
            name: name.into(),
            project: Arc::new(project),
        }
    }

    pub fn project(&self, x: &Vector) -> Vector {
        match self {
            Cone::NonnegativeOrthant => x.map(|v| v.max(0.0)),
            Cone::Halfspace { normal } => {
                let s = normal.dot(x);
                if s <= 0.0 {
                    x.clone()
                } else {
                    x - normal * (s / normal.norm_squared())
                }
            }
            Cone::Custom { project, .. } => project(x),
        }
    }

    /// Projection onto the polar cone via `x = P_K(x) + P_{K°}(x)`.
    pub fn project_polar(&self, x: &Vector) -> Vector {
        match self {
            Cone::NonnegativeOrthant => x.map(|v| v.min(0.0)),
            Cone::Halfspace { normal } => {
                let s = normal.dot(x);
                if s <= 0.0 {
                    Vector::zeros(x.len())
                } else {
                    normal * (s / normal.norm_squared())
                }
            }
            Cone::Custom { .. } => x - self.project(x),
        }
    }

    pub fn polar(&self) -> Cone {
        let this = self.clone();
        let name = match self {
            Cone::NonnegativeOrthant => "nonpositive orthant".to_string(),
            Cone::Halfspace { .. } => "ray".to_string(),
            Cone::Custom { name, .. } => format!("polar of {name}"),
        };
        Cone::custom(name, move |x| this.project_polar(x))
    }

    pub fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.distance(x) <= 1e-9 * (1.0 + x.norm())
    }
}

/// Indicator of a closed convex cone, `δ_K`.
#[derive(Debug, Clone)]
pub struct ConeIndicator {
    cone: Cone,
    dim: usize,
}

impl ConeIndicator {
    pub fn new(cone: Cone, dim: usize) -> Self {
        ConeIndicator { cone, dim }
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }
}

impl Gauge for ConeIndicator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> GaugeKind {
        GaugeKind::ConeIndicator
    }

    fn eval(&self, x: &Vector) -> f64 {
        if self.cone.contains(x) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        Ok(self.cone.project(x))
    }

    fn project_domain(&self, x: &Vector) -> Option<Vector> {
        Some(self.cone.project(x))
    }

    fn polar(&self) -> Option<SharedGauge> {
        Some(Arc::new(ConeIndicator::new(self.cone.polar(), self.dim)))
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn moreau_prox(&self, _t: f64, x: &Vector) -> Result<Vector> {
        Ok(self.cone.project(x))
    }
}

/// `κ(z) = ⟨c, z⟩ + δ_K(z)` with `c` in the dual cone of `K`.
#[derive(Debug, Clone)]
pub struct LinearConeGauge {
    c: Vector,
    cone: Cone,
}

impl LinearConeGauge {
    pub fn new(c: Vector, cone: Cone) -> Result<Self> {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(GaugeError::InvalidInput("c must be finite".into()));
        }
        if let Cone::Halfspace { normal } = &cone {
            if normal.len() != c.len() {
                return Err(GaugeError::DimensionMismatch {
                    expected: c.len(),
                    got: normal.len(),
                });
            }
        }
        let g = LinearConeGauge { c, cone };
        #[cfg(debug_assertions)]
        g.debug_check_dual_cone();
        Ok(g)
    }

    pub fn c(&self) -> &Vector {
        &self.c
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    #[cfg(debug_assertions)]
    fn debug_check_dual_cone(&self) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..64 {
            let z = Vector::from_fn(self.c.len(), |_, _| rng.random_range(-1.0..1.0));
            let pz = self.cone.project(&z);
            debug_assert!(
                self.c.dot(&pz) >= -1e-9 * (1.0 + pz.norm() * self.c.norm()),
                "c is not in the dual cone of K"
            );
        }
    }

    fn project_halfspace(&self, u: &Vector, r: f64) -> Vector {
        let s = self.c.dot(u);
        if s <= r {
            u.clone()
        } else {
            u - &self.c * ((s - r) / self.c.norm_squared())
        }
    }

    /// Dykstra's alternating projections onto `K ∩ {⟨c, u⟩ ≤ r}`.
    fn dykstra(&self, x: &Vector, r: f64) -> Result<Vector> {
        let tol = DYKSTRA_MOVE_TOL * (1.0 + x.norm());
        let n = x.len();
        let mut iterate = x.clone();
        let mut p = Vector::zeros(n);
        let mut q = Vector::zeros(n);
        let mut last_move = f64::INFINITY;
        for _ in 0..DYKSTRA_MAX_SWEEPS {
            let y = self.cone.project(&(&iterate + &p));
            p = &iterate + &p - &y;
            let next = self.project_halfspace(&(&y + &q), r);
            q = &y + &q - &next;
            last_move = (&next - &iterate).norm();
            iterate = next;
            if last_move < tol {
                return Ok(iterate);
            }
        }
        Err(GaugeError::DykstraNotConverged {
            sweeps: DYKSTRA_MAX_SWEEPS,
            residual: last_move,
            last_iterate: iterate,
        })
    }
}

impl Gauge for LinearConeGauge {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn kind(&self) -> GaugeKind {
        GaugeKind::LinearCone
    }

    fn eval(&self, x: &Vector) -> f64 {
        if self.cone.contains(x) {
            self.c.dot(x).max(0.0)
        } else {
            f64::INFINITY
        }
    }

    fn project_level_set(&self, x: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        if self.c.norm_squared() == 0.0 {
            return Ok(self.cone.project(x));
        }
        let pk = self.cone.project(x);
        if self.c.dot(&pk) <= r {
            // P_K(x) already satisfies the halfspace, so it is the projection
            // onto the intersection as well.
            return Ok(pk);
        }
        self.dykstra(x, r)
    }

    fn project_domain(&self, x: &Vector) -> Option<Vector> {
        Some(self.cone.project(x))
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn moreau_prox(&self, t: f64, x: &Vector) -> Result<Vector> {
        Ok(self.cone.project(&(x - &self.c * t)))
    }
}
