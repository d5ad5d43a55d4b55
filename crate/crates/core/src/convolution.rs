//! Max convolution `(κ₁◇κ₂)(x) = inf_z max{κ₁(z), κ₂(x − z)}` by refined grid
//! search, and sampled checks of its polar, level-sum and Minkowski-sum
//! identities. Desk scale only (dimension ≤ 3, the set checks need 2-D).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GaugeError, Result};
use crate::gauge::{ensure_dim, ensure_finite, Gauge, SharedGauge};
use crate::oracle::{grid_minimize, polar_eval_oracle, GridSpec};
use crate::Vector;

#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionWitness {
    pub value: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub splitter: Vector,
    pub attained: bool,
    /// Largest final cell width of the search grid.
    pub cell: f64,
}

/// Default search box for the splitter: centred at `x/2` with half-width
/// `‖x‖`, so it contains both trivial splits `z = 0` and `z = x`.
pub fn convolution_grid(x: &Vector) -> GridSpec {
    let half = x.norm().max(f64::MIN_POSITIVE);
    GridSpec::cube(&(x * 0.5), half)
}

/// Grid resolution of [`convolution_grid`] relative to `‖x‖`: the final cell
/// width divided by the norm of the point.
pub fn convolution_resolution(grid: &GridSpec) -> f64 {
    2.0 * grid.relative_resolution()
}

pub fn max_convolve(
    g1: &dyn Gauge,
    g2: &dyn Gauge,
    x: &Vector,
    grid: &GridSpec,
) -> Result<ConvolutionWitness> {
    if g1.dim() != g2.dim() {
        return Err(GaugeError::DimensionMismatch {
            expected: g1.dim(),
            got: g2.dim(),
        });
    }
    ensure_dim(g1.dim(), x)?;
    ensure_finite("x", x)?;
    if x.len() > 3 {
        return Err(GaugeError::Unsupported(format!(
            "grid max convolution needs dim <= 3, got {}",
            x.len()
        )));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Ok(ConvolutionWitness {
            value: 0.0,
            splitter: x.clone(),
            attained: true,
            cell: 0.0,
        });
    }
    let best = grid_minimize(|z| g1.eval(z).max(g2.eval(&(x - z))), grid)?;
    let cell = best.cell.iter().copied().fold(0.0, f64::max);
    Ok(ConvolutionWitness {
        value: best.value,
        attained: best.value.is_finite(),
        splitter: best.point,
        cell,
    })
}

/// `κ₁◇κ₂` as a gauge that can only be evaluated. Each evaluation is a grid
/// search over [`convolution_grid`].
#[derive(Debug, Clone)]
pub struct MaxConvolution {
    g1: SharedGauge,
    g2: SharedGauge,
    points: usize,
    rounds: usize,
    shrink: f64,
}

impl MaxConvolution {
    pub fn new(g1: SharedGauge, g2: SharedGauge) -> Result<Self> {
        if g1.dim() != g2.dim() {
            return Err(GaugeError::DimensionMismatch {
                expected: g1.dim(),
                got: g2.dim(),
            });
        }
        Ok(MaxConvolution {
            g1,
            g2,
            points: GridSpec::DEFAULT_POINTS,
            rounds: GridSpec::DEFAULT_ROUNDS,
            shrink: GridSpec::DEFAULT_SHRINK,
        })
    }

    pub fn grid(&self, x: &Vector) -> GridSpec {
        convolution_grid(x)
            .with_points(self.points)
            .with_rounds(self.rounds)
            .with_shrink(self.shrink)
    }

    pub fn resolution(&self) -> f64 {
        convolution_resolution(&self.grid(&Vector::from_element(self.g1.dim(), 1.0)))
    }

    pub fn witness(&self, x: &Vector) -> Result<ConvolutionWitness> {
        max_convolve(self.g1.as_ref(), self.g2.as_ref(), x, &self.grid(x))
    }
}

impl Gauge for MaxConvolution {
    fn dim(&self) -> usize {
        self.g1.dim()
    }

    fn eval(&self, x: &Vector) -> f64 {
        self.witness(x).map_or(f64::INFINITY, |w| w.value)
    }

    fn project_level_set(&self, _x: &Vector, _r: f64) -> Result<Vector> {
        Err(GaugeError::Unsupported(
            "max convolution is evaluated by grid search only".into(),
        ))
    }

    fn polar(&self) -> Option<SharedGauge> {
        None
    }

    fn is_continuous(&self) -> bool {
        self.g1.is_continuous() || self.g2.is_continuous()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarIdentitySample {
    #[serde(serialize_with = "crate::serialize_vector")]
    pub y: Vector,
    /// Sampled polar of the convolution.
    pub oracle: f64,
    /// `κ₁°(y) + κ₂°(y)`.
    pub polar_sum: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarIdentityReport {
    pub samples: Vec<PolarIdentitySample>,
    pub max_deviation: f64,
    pub resolution: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Compares the sampled polar of `κ₁◇κ₂` with `κ₁° + κ₂°` at each sample.
/// Deviations are relative to the polar sum; the threshold is twice the
/// relative resolution of the convolution grid.
pub fn check_polar_identity(
    g1: &SharedGauge,
    g2: &SharedGauge,
    samples: &[Vector],
) -> Result<PolarIdentityReport> {
    let (p1, p2) = match (g1.polar(), g2.polar()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(GaugeError::Unsupported(
                "polar identity check needs closed-form polars".into(),
            ))
        }
    };
    let conv = MaxConvolution::new(g1.clone(), g2.clone())?;
    let directions = GridSpec::directions(conv.dim())?;
    let samples = samples
        .par_iter()
        .map(|y| {
            let polar_sum = p1.eval(y) + p2.eval(y);
            let oracle = polar_eval_oracle(&conv, y, &directions)?;
            let deviation = if polar_sum == 0.0 {
                oracle.abs()
            } else {
                (oracle - polar_sum).abs() / polar_sum
            };
            Ok(PolarIdentitySample {
                y: y.clone(),
                oracle,
                polar_sum,
                deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = samples.iter().map(|s| s.deviation).fold(0.0, f64::max);
    let resolution = conv.resolution();
    let threshold = 2.0 * resolution;
    Ok(PolarIdentityReport {
        samples,
        max_deviation,
        resolution,
        threshold,
        passed: max_deviation <= threshold,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSumSample {
    #[serde(serialize_with = "crate::serialize_vector")]
    pub point: Vector,
    pub value: f64,
    /// Some when the point lies clearly inside the strict level set.
    pub decomposes: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSumReport {
    pub lambda: f64,
    pub margin: f64,
    pub samples: Vec<LevelSumSample>,
    pub sums_checked: usize,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Sampled check of `[(κ₁◇κ₂) < λ] = [κ₁ < λ] + [κ₂ < λ]` in 2-D.
///
/// Each sample clearly inside the left side must split, via the grid witness,
/// into strict-level-set members. Each pair of consecutive samples lying in
/// `[κ₁ < λ]` and `[κ₂ < λ]` respectively must sum into the left side. Points
/// within `margin` (twice the grid cell) of the level are not classified.
pub fn check_level_sum(
    g1: &dyn Gauge,
    g2: &dyn Gauge,
    lambda: f64,
    samples: &[Vector],
) -> Result<LevelSumReport> {
    if g1.dim() != 2 || g2.dim() != 2 {
        return Err(GaugeError::Unsupported(
            "level-sum check is implemented in 2-D".into(),
        ));
    }
    crate::gauge::ensure_positive("lambda", lambda)?;
    let mut failures = Vec::new();
    let mut margin: f64 = 0.0;
    let mut rows = Vec::with_capacity(samples.len());
    for x in samples {
        let w = max_convolve(g1, g2, x, &convolution_grid(x))?;
        let m = 2.0 * w.cell;
        margin = margin.max(m);
        let decomposes = if w.value < lambda - m {
            let z = &w.splitter;
            let ok = g1.eval(z) < lambda && g2.eval(&(x - z)) < lambda;
            if !ok {
                failures.push(format!(
                    "point {:?} has value {} but its witness does not split",
                    x.as_slice(),
                    w.value
                ));
            }
            Some(ok)
        } else {
            None
        };
        rows.push(LevelSumSample {
            point: x.clone(),
            value: w.value,
            decomposes,
        });
    }
    let mut sums_checked = 0;
    for (i, a) in samples.iter().enumerate() {
        let b = &samples[(i + 1) % samples.len()];
        if !(g1.eval(a) < lambda && g2.eval(b) < lambda) {
            continue;
        }
        sums_checked += 1;
        let s = a + b;
        let w = max_convolve(g1, g2, &s, &convolution_grid(&s))?;
        let m = 2.0 * w.cell;
        margin = margin.max(m);
        if w.value >= lambda + m {
            failures.push(format!(
                "sum {:?} of strict-level members has value {}",
                s.as_slice(),
                w.value
            ));
        }
    }
    Ok(LevelSumReport {
        lambda,
        margin,
        samples: rows,
        sums_checked,
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MinkowskiReport {
    /// Largest support-function gap over the test directions.
    pub hausdorff_estimate: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn boundary_samples(radial: impl Fn(&Vector) -> f64 + Sync, count: usize) -> Vec<Vector> {
    (0..count)
        .into_par_iter()
        .map(|j| {
            let t = 2.0 * PI * j as f64 / count as f64;
            let u = Vector::from_vec(vec![t.cos(), t.sin()]);
            let k = radial(&u);
            u / k
        })
        .collect()
}

fn max_gap(points: &[Vector]) -> f64 {
    (0..points.len())
        .map(|j| (&points[(j + 1) % points.len()] - &points[j]).norm())
        .fold(0.0, f64::max)
}

fn support(points: &[Vector], u: &Vector) -> f64 {
    points.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max)
}

/// Compares the unit level set of `κ₁◇κ₂` with `[κ₁ ≤ 1] + [κ₂ ≤ 1]` through
/// their support functions, both sides built from `count` boundary samples.
/// The tolerance adds the largest gap between consecutive boundary samples of
/// each set to the grid error of the convolution values.
pub fn check_minkowski_sum(
    g1: &SharedGauge,
    g2: &SharedGauge,
    count: usize,
) -> Result<MinkowskiReport> {
    if g1.dim() != 2 || g2.dim() != 2 {
        return Err(GaugeError::Unsupported(
            "Minkowski-sum check is implemented in 2-D".into(),
        ));
    }
    if count < 8 {
        return Err(GaugeError::InvalidInput("need at least 8 boundary samples".into()));
    }
    let conv = MaxConvolution::new(g1.clone(), g2.clone())?;
    let b1 = boundary_samples(|u| g1.eval(u), count);
    let b2 = boundary_samples(|u| g2.eval(u), count);
    let bc = boundary_samples(|u| conv.eval(u), count);
    let radius = bc.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let tolerance =
        max_gap(&b1) + max_gap(&b2) + max_gap(&bc) + 2.0 * conv.resolution() * radius;
    let hausdorff_estimate = (0..4 * count)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / (4 * count) as f64;
            let u = Vector::from_vec(vec![t.cos(), t.sin()]);
            (support(&bc, &u) - support(&b1, &u) - support(&b2, &u)).abs()
        })
        .fold(0.0, f64::max);
    Ok(MinkowskiReport {
        hausdorff_estimate,
        tolerance,
        passed: hausdorff_estimate <= tolerance,
    })
}
