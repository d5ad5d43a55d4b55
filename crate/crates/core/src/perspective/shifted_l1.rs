use crate::error::Result;
use crate::gauge::{ensure_positive, ensure_radius, soft_threshold};
use crate::perspective::{join, split, LiftedFunction};
use crate::Vector;

/// `f(x) = ‖x‖₁ + c`, so `f^π(x, λ) = ‖x‖₁ + cλ` for `λ ≥ 0`, `inf f = c`
/// and `argmin f = {0}`.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedL1 {
    c: f64,
    dim: usize,
}

impl ShiftedL1 {
    pub fn new(c: f64, dim: usize) -> Result<Self> {
        ensure_positive("shift c", c)?;
        if dim == 0 {
            return Err(crate::GaugeError::InvalidInput("dim must be >= 1".into()));
        }
        Ok(ShiftedL1 { c, dim })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl LiftedFunction for ShiftedL1 {
    fn dim(&self) -> usize {
        self.dim
    }

    fn base_eval(&self, x: &Vector) -> f64 {
        x.lp_norm(1) + self.c
    }

    fn recession_eval(&self, x: &Vector) -> f64 {
        x.lp_norm(1)
    }

    fn perspective_eval(&self, x: &Vector, lambda: f64) -> f64 {
        if lambda < 0.0 {
            f64::INFINITY
        } else {
            x.lp_norm(1) + self.c * lambda
        }
    }

    /// Projection onto `{(z, μ) : μ ≥ 0, ‖z‖₁ + cμ ≤ r}`.
    ///
    /// The solution is `z = soft(x, θ)`, `μ = (μ₀ − cθ)₊` where `θ ≥ 0` solves
    /// the piecewise-linear equation `Σ(|x_i| − θ)₊ + c(μ₀ − cθ)₊ = r`,
    /// located exactly by scanning its breakpoints.
    fn lifted_level_projection(&self, point: &Vector, r: f64) -> Result<Vector> {
        ensure_radius(r)?;
        let (x, mu0) = split(point);
        let c = self.c;
        if x.lp_norm(1) + c * mu0.max(0.0) <= r {
            return Ok(join(&x, mu0.max(0.0)));
        }
        // pieces (breakpoint, intercept, slope): each active piece contributes
        // intercept − slope·θ while θ is below its breakpoint
        let mut pieces: Vec<(f64, f64, f64)> = x.iter().map(|v| (v.abs(), v.abs(), 1.0)).collect();
        if mu0 > 0.0 {
            pieces.push((mu0 / c, c * mu0, c * c));
        }
        pieces.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
        let (mut intercept, mut slope) = (0.0, 0.0);
        let mut theta = 0.0;
        for (j, &(bp, a, s)) in pieces.iter().enumerate() {
            intercept += a;
            slope += s;
            let next = pieces.get(j + 1).map_or(0.0, |p| p.0);
            let candidate = (intercept - r) / slope;
            if candidate >= next {
                theta = candidate.min(bp);
                break;
            }
        }
        let z = soft_threshold(&x, theta);
        Ok(join(&z, (mu0 - c * theta).max(0.0)))
    }

    fn lifted_domain_projection(&self, point: &Vector) -> Option<Vector> {
        let (x, lambda) = split(point);
        Some(join(&x, lambda.max(0.0)))
    }

    fn known_minimum(&self) -> Option<(f64, Vector)> {
        Some((self.c, Vector::zeros(self.dim)))
    }
}
