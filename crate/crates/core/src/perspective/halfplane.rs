use std::f64::consts::FRAC_PI_2;

use crate::error::{GaugeError, Result};
use crate::gauge::{ensure_positive, ensure_radius};
use crate::oracle::{grid_minimize, GridSpec};
use crate::perspective::{split, LiftedFunction};
use crate::Vector;

const ARC_POINTS: usize = 41;
const ARC_ROUNDS: usize = 12;
const ARC_SHRINK: f64 = 0.2;

/// `f(x) = κ(x) + δ_C(x)` on the plane with `κ(x) = √(‖x‖₁² + ε‖x‖₂²)` and
/// `C = {x : x₁ ≥ 1}`.
///
/// `κ` is strongly convex, `inf f = √(1 + ε)` at `(1, 0)`, and
/// `f^π(x, λ) = κ(x)` on `{0 ≤ λ ≤ x₁}` (the `λ = 0` slice being `C∞ = {x₁ ≥ 0}`).
#[derive(Debug, Clone, Copy)]
pub struct SmoothedL1Halfplane {
    eps: f64,
}

impl SmoothedL1Halfplane {
    pub fn new(eps: f64) -> Result<Self> {
        ensure_positive("eps", eps)?;
        Ok(SmoothedL1Halfplane { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn kappa(&self, z1: f64, z2: f64) -> f64 {
        let l1 = z1.abs() + z2.abs();
        (l1 * l1 + self.eps * (z1 * z1 + z2 * z2)).sqrt()
    }

    fn arc_grid() -> GridSpec {
        GridSpec::new(vec![-FRAC_PI_2], vec![FRAC_PI_2])
            .with_points(ARC_POINTS)
            .with_rounds(ARC_ROUNDS)
            .with_shrink(ARC_SHRINK)
    }
}

fn check_dim(x: &Vector) -> bool {
    x.len() == 2
}

impl LiftedFunction for SmoothedL1Halfplane {
    fn dim(&self) -> usize {
        2
    }

    fn base_eval(&self, x: &Vector) -> f64 {
        if !check_dim(x) || x[0] < 1.0 {
            return f64::INFINITY;
        }
        self.kappa(x[0], x[1])
    }

    fn recession_eval(&self, x: &Vector) -> f64 {
        if !check_dim(x) || x[0] < 0.0 {
            return f64::INFINITY;
        }
        self.kappa(x[0], x[1])
    }

    fn perspective_eval(&self, x: &Vector, lambda: f64) -> f64 {
        if !check_dim(x) || lambda < 0.0 || x[0] < lambda {
            return f64::INFINITY;
        }
        self.kappa(x[0], x[1])
    }

    /// For fixed `z` the best `μ` is `clamp(λ₀, 0, z₁)`, which leaves a planar
    /// problem over `D = {κ(z) ≤ r, z₁ ≥ 0}`. When its unconstrained minimizer
    /// misses `D`, the answer lies on the boundary: the arc of the `κ`-sphere
    /// (searched over its polar angle on a refined grid) or the segment on the
    /// `z₂` axis (closed form).
    fn lifted_level_projection(&self, point: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        if point.len() != 3 {
            return Err(GaugeError::DimensionMismatch { expected: 3, got: point.len() });
        }
        let (x, l0) = split(point);
        let (x1, x2) = (x[0], x[1]);
        let mu = |z1: f64| l0.clamp(0.0, z1.max(0.0));
        let cost = |z1: f64, z2: f64| {
            let m = mu(z1);
            (z1 - x1).powi(2) + (z2 - x2).powi(2) + (l0 - m).powi(2)
        };
        let lift = |z1: f64, z2: f64| Vector::from_vec(vec![z1, z2, mu(z1)]);
        if r == 0.0 {
            return Ok(Vector::zeros(3));
        }

        let u1 = if l0 > 0.0 && x1 < l0 { 0.5 * (x1 + l0) } else { x1 };
        if u1 >= 0.0 && self.kappa(u1, x2) <= r {
            return Ok(lift(u1, x2));
        }

        let seg_half = r / (1.0 + self.eps).sqrt();
        let seg = (0.0, x2.clamp(-seg_half, seg_half));
        let arc_point = |t: f64| {
            let (s, c) = t.sin_cos();
            let scale = r / self.kappa(c, s);
            (scale * c, scale * s)
        };
        let arc = grid_minimize(
            |t| {
                if t[0].abs() > FRAC_PI_2 {
                    return f64::INFINITY;
                }
                let (z1, z2) = arc_point(t[0]);
                cost(z1, z2)
            },
            &Self::arc_grid(),
        )?;
        let (a1, a2) = arc_point(arc.point[0]);
        let best = if cost(a1.max(0.0), a2) <= cost(seg.0, seg.1) {
            (a1.max(0.0), a2)
        } else {
            seg
        };
        Ok(lift(best.0, best.1))
    }

    /// Projection onto the cone `{0 ≤ λ ≤ x₁}` in the `(x₁, λ)` plane.
    fn lifted_domain_projection(&self, point: &Vector) -> Option<Vector> {
        let (a, b) = (point[0], point[2]);
        let (p1, pl) = if 0.0 <= b && b <= a {
            (a, b)
        } else {
            let on_floor = (a.max(0.0), 0.0);
            let m = (0.5 * (a + b)).max(0.0);
            let on_diag = (m, m);
            let d = |p: (f64, f64)| (p.0 - a).powi(2) + (p.1 - b).powi(2);
            if d(on_floor) <= d(on_diag) {
                on_floor
            } else {
                on_diag
            }
        };
        Some(Vector::from_vec(vec![p1, point[1], pl]))
    }

    /// Radius-relative accuracy of the arc search.
    fn projection_resolution(&self) -> f64 {
        let cell = Self::arc_grid().final_cell()[0];
        cell / (1.0 + self.eps).sqrt()
    }

    fn known_minimum(&self) -> Option<(f64, Vector)> {
        Some(((1.0 + self.eps).sqrt(), Vector::from_vec(vec![1.0, 0.0])))
    }
}
