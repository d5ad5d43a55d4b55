use serde::{Deserialize, Serialize};

use crate::error::{GaugeError, Result};
use crate::gauge::{ensure_finite, ensure_positive};
use crate::perspective::{projected_envelope_gradient, projected_polar_envelope, SharedLifted};
use crate::Vector;

fn default_stop_tol(x0: &Vector) -> f64 {
    1e-8 * (1.0 + x0.norm())
}

/// One iteration of P⁴A or EMA: `p(x_k)`, `‖x_{k+1} − x_k‖` and the `λ`
/// component of `rpprox(x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerspectiveRecord {
    pub iter: usize,
    pub p_value: f64,
    pub step_gap: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct P4AOptions {
    /// Stop once `‖x_{k+1} − x_k‖` drops to this; defaults to `1e-8(1 + ‖x₀‖)`.
    pub stop_tol: Option<f64>,
    pub max_iter: usize,
    /// `λ` at or below this marks the limit as degenerate.
    pub lambda_floor: f64,
    /// Relative slack allowed when checking `p(x_{k+1}) ≤ p(x_k)`.
    pub monotone_slack: f64,
}

impl Default for P4AOptions {
    fn default() -> Self {
        P4AOptions {
            stop_tol: None,
            max_iter: 10_000,
            lambda_floor: 1e-10,
            monotone_slack: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct P4AReport {
    pub converged: bool,
    pub iterations: usize,
    pub stop_tol: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub x: Vector,
    pub lambda: f64,
    /// `p` at the final iterate.
    pub value: f64,
    /// `x / λ`, the recovered minimizer of `f`; absent when `λ` is degenerate.
    #[serde(serialize_with = "serialize_opt_vector")]
    pub candidate: Option<Vector>,
    pub degenerate: bool,
    /// `‖rpprox(x) − (x, λ)‖` at the final pair.
    pub fixed_point_gap: f64,
    /// Largest observed `p(x_{k+1}) − p(x_k)`.
    pub max_increase: f64,
    pub monotone: bool,
    #[serde(skip)]
    pub trace: Vec<PerspectiveRecord>,
}

fn serialize_opt_vector<S: serde::Serializer>(v: &Option<Vector>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_seq(v.iter()),
        None => s.serialize_none(),
    }
}

fn recover(x: &Vector, lambda: f64, floor: f64) -> Option<Vector> {
    (lambda > floor).then(|| x / lambda)
}

/// Projected polar proximal point algorithm: `(x_{k+1}, λ_{k+1}) = rpprox(x_k)`.
pub fn run_p4a(lf: &SharedLifted, alpha: f64, x0: &Vector, opts: &P4AOptions) -> Result<P4AReport> {
    ensure_positive("alpha", alpha)?;
    ensure_finite("x0", x0)?;
    let stop_tol = opts.stop_tol.unwrap_or_else(|| default_stop_tol(x0));
    ensure_positive("stop_tol", stop_tol)?;

    let mut x = x0.clone();
    let mut env = projected_polar_envelope(lf, alpha, &x)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut max_increase = f64::NEG_INFINITY;
    let mut monotone = true;
    for k in 0..opts.max_iter {
        let gap = (&env.x_bar - &x).norm();
        trace.push(PerspectiveRecord {
            iter: k,
            p_value: env.value,
            step_gap: gap,
            lambda: env.lambda_bar,
        });
        x = env.x_bar.clone();
        let next = projected_polar_envelope(lf, alpha, &x)?;
        let increase = next.value - env.value;
        max_increase = max_increase.max(increase);
        if increase > opts.monotone_slack * (1.0 + env.value.abs()) {
            monotone = false;
        }
        env = next;
        if gap <= stop_tol {
            converged = true;
            break;
        }
    }
    // `env` now holds rpprox of the final iterate
    let lambda = trace.last().map_or(env.lambda_bar, |r| r.lambda);
    let fixed_point_gap = ((&env.x_bar - &x).norm_squared() + (env.lambda_bar - lambda).powi(2)).sqrt();
    Ok(P4AReport {
        converged,
        iterations: trace.len(),
        stop_tol,
        candidate: recover(&x, lambda, opts.lambda_floor),
        degenerate: lambda <= opts.lambda_floor,
        x,
        lambda,
        value: env.value,
        fixed_point_gap,
        max_increase: if trace.len() > 1 { max_increase } else { 0.0 },
        monotone,
        trace,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmaOptions {
    /// Armijo parameter in `(0, 1)`.
    pub sigma: f64,
    /// Trial step lengths `β_k`, used cyclically.
    pub betas: Vec<f64>,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Stop once `‖∇p(x_k)‖` drops to this; defaults to `1e-8(1 + ‖x₀‖)`.
    pub stop_tol: Option<f64>,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub lambda_floor: f64,
}

impl Default for EmaOptions {
    fn default() -> Self {
        EmaOptions {
            sigma: 0.5,
            betas: vec![1.0],
            beta_min: 1e-3,
            beta_max: 1e3,
            stop_tol: None,
            max_iter: 50_000,
            max_halvings: 60,
            lambda_floor: 1e-10,
        }
    }
}

impl EmaOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(GaugeError::InvalidInput(format!("sigma must lie in (0, 1), got {}", self.sigma)));
        }
        ensure_positive("beta_min", self.beta_min)?;
        if self.beta_max.partial_cmp(&self.beta_min).is_none_or(|o| o.is_lt()) {
            return Err(GaugeError::InvalidInput("beta_max must be >= beta_min".into()));
        }
        if self.betas.is_empty() {
            return Err(GaugeError::InvalidInput("betas must not be empty".into()));
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b >= self.beta_min && **b <= self.beta_max)) {
            return Err(GaugeError::InvalidInput(format!(
                "beta {b} outside [{}, {}]",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }
}

/// An accepted EMA step `x_{k+1} = x_k − 2^{−t}β∇p(x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmaStep {
    pub iter: usize,
    pub beta: f64,
    pub halvings: usize,
    pub p_before: f64,
    pub p_after: f64,
    pub grad_norm_sq: f64,
}

impl EmaStep {
    pub fn step_length(&self) -> f64 {
        self.beta * 0.5f64.powi(self.halvings as i32)
    }

    /// `p(x_k) − σ2^{−t}β‖∇p(x_k)‖²`.
    pub fn armijo_bound(&self, sigma: f64) -> f64 {
        self.p_before - sigma * self.step_length() * self.grad_norm_sq
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmaReport {
    pub converged: bool,
    /// Stopped early because the accepted steps no longer move `x`.
    pub stalled: bool,
    pub iterations: usize,
    pub stop_tol: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub x: Vector,
    pub value: f64,
    pub grad_norm: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub x_bar: Vector,
    pub lambda_bar: f64,
    #[serde(serialize_with = "serialize_opt_vector")]
    pub candidate: Option<Vector>,
    #[serde(skip)]
    pub steps: Vec<EmaStep>,
    #[serde(skip)]
    pub trace: Vec<PerspectiveRecord>,
}

/// Gradient descent on `p_{α,f}` with the halving Armijo rule, finishing with
/// one `rpprox` to recover `x̄/λ̄`.
pub fn run_ema(lf: &SharedLifted, alpha: f64, x0: &Vector, opts: &EmaOptions) -> Result<EmaReport> {
    ensure_positive("alpha", alpha)?;
    ensure_finite("x0", x0)?;
    opts.validate()?;
    let stop_tol = opts.stop_tol.unwrap_or_else(|| default_stop_tol(x0));
    ensure_positive("stop_tol", stop_tol)?;

    let mut x = x0.clone();
    let mut steps = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut stalled = false;
    let mut last_gap = 0.0;
    let (mut env, mut grad) = projected_envelope_gradient(lf, alpha, &x)?;
    for k in 0..opts.max_iter {
        let g2 = grad.norm_squared();
        trace.push(PerspectiveRecord {
            iter: k,
            p_value: env.value,
            step_gap: last_gap,
            lambda: env.lambda_bar,
        });
        if g2.sqrt() <= stop_tol {
            converged = true;
            break;
        }
        let beta = opts.betas[k % opts.betas.len()];
        let mut halvings = 0;
        let trial = loop {
            let step = beta * 0.5f64.powi(halvings as i32);
            let y = &x - step * &grad;
            let p = projected_polar_envelope(lf, alpha, &y)?.value;
            if p <= env.value - opts.sigma * step * g2 {
                break (y, p, step);
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(GaugeError::LineSearchFailure { halvings });
            }
        };
        steps.push(EmaStep {
            iter: k,
            beta,
            halvings,
            p_before: env.value,
            p_after: trial.1,
            grad_norm_sq: g2,
        });
        last_gap = trial.2 * g2.sqrt();
        x = trial.0;
        (env, grad) = projected_envelope_gradient(lf, alpha, &x)?;
        // accepted steps below rounding leave x fixed from here on
        if last_gap <= f64::EPSILON * (1.0 + x.norm()) {
            stalled = true;
            break;
        }
    }
    if !converged {
        trace.push(PerspectiveRecord {
            iter: steps.len(),
            p_value: env.value,
            step_gap: last_gap,
            lambda: env.lambda_bar,
        });
    }
    Ok(EmaReport {
        converged,
        stalled,
        iterations: steps.len(),
        stop_tol,
        candidate: recover(&env.x_bar, env.lambda_bar, opts.lambda_floor),
        value: env.value,
        grad_norm: grad.norm(),
        x_bar: env.x_bar,
        lambda_bar: env.lambda_bar,
        x,
        steps,
        trace,
    })
}
