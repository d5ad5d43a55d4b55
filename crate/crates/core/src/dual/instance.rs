//! Problem instance files:
//!
//! ```json
//! { "A": [[1, 1]], "b": [1], "sigma": 0, "alpha": 0.1,
//!   "kappa": { "kind": "l1", "dim": 2 }, "rho": { "kind": "zero", "dim": 1 } }
//! ```
//!
//! `A` is either a list of rows or a flat row-major array with `len(b)` rows.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dual::problem::{GaugeDualProblem, ResidualGauge};
use crate::error::{GaugeError, Result};
use crate::gauge::{GaugeDescriptor, Norm};
use crate::{Matrix, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    #[serde(rename = "A")]
    pub a: MatrixData,
    pub b: Vec<f64>,
    pub sigma: f64,
    pub alpha: f64,
    pub kappa: GaugeDescriptor,
    pub rho: GaugeDescriptor,
}

impl ProblemInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            GaugeError::InvalidInput(format!(
                "instance at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances serialize")
    }

    pub fn matrix(&self) -> Result<Matrix> {
        let m = self.b.len();
        if m == 0 {
            return Err(GaugeError::InvalidInput("b is empty".into()));
        }
        match &self.a {
            MatrixData::Rows(rows) => {
                if rows.len() != m {
                    return Err(GaugeError::DimensionMismatch {
                        expected: m,
                        got: rows.len(),
                    });
                }
                let n = rows[0].len();
                if let Some(bad) = rows.iter().find(|r| r.len() != n) {
                    return Err(GaugeError::DimensionMismatch {
                        expected: n,
                        got: bad.len(),
                    });
                }
                Ok(Matrix::from_fn(m, n, |i, j| rows[i][j]))
            }
            MatrixData::Flat(data) => {
                if data.is_empty() || data.len() % m != 0 {
                    return Err(GaugeError::InvalidInput(format!(
                        "flat A has {} entries, not a multiple of {m} rows",
                        data.len()
                    )));
                }
                Ok(Matrix::from_row_slice(m, data.len() / m, data))
            }
        }
    }

    /// Builds the problem, optionally overriding the instance's `alpha`.
    pub fn to_problem(&self, alpha: Option<f64>) -> Result<GaugeDualProblem> {
        let a = self.matrix()?;
        let kappa = self.kappa.build()?;
        let rho = self.rho.build()?;
        if rho.dim() != self.b.len() {
            return Err(GaugeError::DimensionMismatch {
                expected: self.b.len(),
                got: rho.dim(),
            });
        }
        GaugeDualProblem::new(
            kappa,
            ResidualGauge::from_gauge(&rho)?,
            a,
            Vector::from_column_slice(&self.b),
            self.sigma,
            alpha.unwrap_or(self.alpha),
        )
    }
}

/// Basis-pursuit instance `Ax = b` with a known sparse generator `x₀`.
#[derive(Debug, Clone)]
pub struct SparseInstance {
    pub instance: ProblemInstance,
    pub generator: Vector,
}

/// Gaussian `m×n` matrix and a `k`-sparse Gaussian generator, `b = Ax₀`,
/// with `κ = ℓ₁`, `ρ = δ_{0}`, `σ = 0`.
pub fn generate_sparse_instance(m: usize, n: usize, k: usize, alpha: f64, seed: u64) -> Result<SparseInstance> {
    if m == 0 || n == 0 || k == 0 || k > n {
        return Err(GaugeError::InvalidInput(format!(
            "need 1 <= k <= n and m >= 1, got m={m} n={n} k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Matrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
    let mut x0 = Vector::zeros(n);
    for j in sample(&mut rng, n, k) {
        let v: f64 = StandardNormal.sample(&mut rng);
        x0[j] = v.signum() * (1.0 + v.abs());
    }
    let b = &a * &x0;
    let rows = (0..m).map(|i| a.row(i).iter().copied().collect()).collect();
    Ok(SparseInstance {
        instance: ProblemInstance {
            a: MatrixData::Rows(rows),
            b: b.iter().copied().collect(),
            sigma: 0.0,
            alpha,
            kappa: GaugeDescriptor::norm(Norm::L1, n),
            rho: GaugeDescriptor::zero(m),
        },
        generator: x0,
    })
}
