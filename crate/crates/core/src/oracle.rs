//! Brute-force reference computations for tests and check suites: refined grid
//! minimization, grid projection and a sampled polar gauge. Nothing on a
//! solver's hot path calls into this module.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GaugeError, Result};
use crate::gauge::Gauge;
use crate::Vector;

const PARALLEL_THRESHOLD: usize = 2048;

/// Box grid with local refinement. Each refinement round re-centres the box on
/// the incumbent and multiplies its half-widths by `shrink`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: usize,
    pub rounds: usize,
    pub shrink: f64,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 41;
    pub const DEFAULT_ROUNDS: usize = 3;
    pub const DEFAULT_SHRINK: f64 = 0.2;

    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        GridSpec {
            lower,
            upper,
            points: Self::DEFAULT_POINTS,
            rounds: Self::DEFAULT_ROUNDS,
            shrink: Self::DEFAULT_SHRINK,
        }
    }

    pub fn cube(center: &Vector, half_width: f64) -> Self {
        GridSpec::new(
            center.iter().map(|c| c - half_width).collect(),
            center.iter().map(|c| c + half_width).collect(),
        )
    }

    /// Angle grid used by [`polar_eval_oracle`]: `θ ∈ [0, 2π]` in 2-D,
    /// `(θ, φ) ∈ [0, π] × [0, 2π]` in 3-D.
    pub fn directions(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(GridSpec::new(vec![0.0], vec![2.0 * PI]).with_points(41)),
            3 => Ok(GridSpec::new(vec![0.0, 0.0], vec![PI, 2.0 * PI])),
            _ => Err(GaugeError::Unsupported(format!(
                "direction grids exist for dim 2 and 3, not {dim}"
            ))),
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn with_shrink(mut self, shrink: f64) -> Self {
        self.shrink = shrink;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Cell widths of the last refinement round.
    pub fn final_cell(&self) -> Vec<f64> {
        let factor = self.shrink.powi(self.rounds as i32) / (self.points - 1) as f64;
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) * factor)
            .collect()
    }

    /// Largest final cell width relative to the initial box width.
    pub fn relative_resolution(&self) -> f64 {
        self.shrink.powi(self.rounds as i32) / (self.points - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 || d > 3 {
            return Err(GaugeError::Unsupported(format!(
                "grid oracles support 1 to 3 dimensions, got {d}"
            )));
        }
        if self.upper.len() != d {
            return Err(GaugeError::DimensionMismatch {
                expected: d,
                got: self.upper.len(),
            });
        }
        if self.points < 3 {
            return Err(GaugeError::InvalidInput("grid needs >= 3 points per dimension".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(GaugeError::InvalidInput("shrink factor must lie in (0,1)".into()));
        }
        if self
            .lower
            .iter()
            .zip(&self.upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u))
        {
            return Err(GaugeError::InvalidInput("grid bounds must be finite with lower <= upper".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMinimum {
    #[serde(serialize_with = "crate::serialize_vector")]
    pub point: Vector,
    pub value: f64,
    /// Cell widths of the final round.
    pub cell: Vec<f64>,
    /// Incumbent value after each round (initial sweep first).
    pub round_values: Vec<f64>,
}

fn sweep<F>(objective: &F, center: &[f64], half: &[f64], points: usize) -> (Vector, f64)
where
    F: Fn(&Vector) -> f64 + Sync,
{
    let d = center.len();
    let count = points.pow(d as u32);
    let fill = |buf: &mut Vector, mut k: usize| {
        for i in 0..d {
            let idx = k % points;
            k /= points;
            buf[i] = center[i] - half[i] + 2.0 * half[i] * idx as f64 / (points - 1) as f64;
        }
    };
    let value_at = |buf: &mut Vector, k: usize| {
        fill(buf, k);
        let v = objective(buf);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let values: Vec<f64> = if count >= PARALLEL_THRESHOLD {
        (0..count)
            .into_par_iter()
            .map_init(|| Vector::zeros(d), |buf, k| value_at(buf, k))
            .collect()
    } else {
        let mut buf = Vector::zeros(d);
        (0..count).map(|k| value_at(&mut buf, k)).collect()
    };
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = k;
        }
    }
    let mut point = Vector::zeros(d);
    fill(&mut point, best);
    (point, values[best])
}

/// Minimizes `objective` over the refined grid.
pub fn grid_minimize<F>(objective: F, grid: &GridSpec) -> Result<GridMinimum>
where
    F: Fn(&Vector) -> f64 + Sync,
{
    grid.validate()?;
    let mut center: Vec<f64> = grid
        .lower
        .iter()
        .zip(&grid.upper)
        .map(|(l, u)| 0.5 * (l + u))
        .collect();
    let mut half: Vec<f64> = grid
        .lower
        .iter()
        .zip(&grid.upper)
        .map(|(l, u)| 0.5 * (u - l))
        .collect();
    let (mut point, mut value) = sweep(&objective, &center, &half, grid.points);
    let mut round_values = vec![value];
    for _ in 0..grid.rounds {
        center = point.iter().copied().collect();
        half.iter_mut().for_each(|h| *h *= grid.shrink);
        let (p, v) = sweep(&objective, &center, &half, grid.points);
        if v < value {
            point = p;
            value = v;
        }
        round_values.push(value);
    }
    let cell = half.iter().map(|h| 2.0 * h / (grid.points - 1) as f64).collect();
    Ok(GridMinimum {
        point,
        value,
        cell,
        round_values,
    })
}

/// Nearest grid point (after refinement) satisfying `membership`.
pub fn grid_project<M>(membership: M, x: &Vector, grid: &GridSpec) -> Result<Vector>
where
    M: Fn(&Vector) -> bool + Sync,
{
    if x.len() != grid.dim() {
        return Err(GaugeError::DimensionMismatch {
            expected: grid.dim(),
            got: x.len(),
        });
    }
    let best = grid_minimize(
        |z| {
            if membership(z) {
                (z - x).norm_squared()
            } else {
                f64::INFINITY
            }
        },
        grid,
    )?;
    if best.value.is_finite() {
        Ok(best.point)
    } else {
        Err(GaugeError::NoFeasiblePoint)
    }
}

fn direction(angles: &Vector) -> Vector {
    match angles.len() {
        1 => Vector::from_vec(vec![angles[0].cos(), angles[0].sin()]),
        _ => {
            let (theta, phi) = (angles[0], angles[1]);
            Vector::from_vec(vec![
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ])
        }
    }
}

/// Sampled `sup{⟨x, y⟩ : κ(x) ≤ 1}` over boundary points `d/κ(d)` of the unit
/// level set, `d` ranging over the direction grid. A lower bound on `κ°(y)`.
pub fn polar_eval_oracle(g: &dyn Gauge, y: &Vector, grid: &GridSpec) -> Result<f64> {
    let d = g.dim();
    if d > 3 {
        return Err(GaugeError::Unsupported(format!(
            "brute-force polar needs dim <= 3, got {d}"
        )));
    }
    if y.len() != d {
        return Err(GaugeError::DimensionMismatch {
            expected: d,
            got: y.len(),
        });
    }
    // contribution of a unit direction: the ray {t·u} meets [κ ≤ 1] up to t = 1/κ(u)
    let ray_support = |u: &Vector| {
        let k = g.eval(u);
        let s = u.dot(y);
        if k.is_infinite() {
            0.0
        } else if k <= 0.0 {
            if s > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            (s / k).max(0.0)
        }
    };
    if d == 1 {
        let up = ray_support(&Vector::from_vec(vec![1.0]));
        let down = ray_support(&Vector::from_vec(vec![-1.0]));
        return Ok(up.max(down));
    }
    if grid.dim() != d - 1 {
        return Err(GaugeError::InvalidInput(format!(
            "a {d}-D polar needs a {}-D angle grid",
            d - 1
        )));
    }
    let best = grid_minimize(|angles| -ray_support(&direction(angles)), grid)?;
    Ok((-best.value).max(0.0))
}
