use serde::{Deserialize, Serialize};

use crate::dual::problem::{GaugeDualProblem, ResidualGauge};
use crate::error::{GaugeError, Result};
use crate::gauge::ensure_positive;
use crate::trace::{IterationRecord, IterationTrace};
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub step_tol: f64,
    pub max_iter: usize,
    pub armijo_c1: f64,
    pub backtrack: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub max_halvings: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            step_tol: 1e-8,
            max_iter: 50_000,
            armijo_c1: 1e-4,
            backtrack: 0.5,
            step_min: 1e-8,
            step_max: 1e8,
            max_halvings: 60,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("step_tol", self.step_tol)?;
        ensure_positive("step_min", self.step_min)?;
        ensure_positive("step_max", self.step_max)?;
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 1.0) {
            return Err(GaugeError::InvalidInput("armijo_c1 must lie in (0,1)".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(GaugeError::InvalidInput("backtrack must lie in (0,1)".into()));
        }
        if self.step_min > self.step_max {
            return Err(GaugeError::InvalidInput("step_min exceeds step_max".into()));
        }
        Ok(())
    }

    fn clip(&self, t: f64) -> f64 {
        if t.is_finite() {
            t.clamp(self.step_min, self.step_max)
        } else {
            self.step_max
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    GaugeDual,
    Lagrange,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub alpha: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub dual_solution: Vector,
    pub dual_value: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub primal_solution: Vector,
    pub primal_value: f64,
    /// `primal_value × dual_value`; absent for the Lagrange pairing.
    pub duality_product: Option<f64>,
    pub feasibility_residual: f64,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip)]
    pub trace: IterationTrace,
}

/// Projected gradient with Armijo backtracking and Barzilai–Borwein initial
/// steps on the smooth gauge dual, followed by primal recovery.
pub fn solve_gauge_dual(p: &GaugeDualProblem, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let mut y = p.initial_point();
    let mut cur = p.evaluate(&y).map_err(|e| match e {
        GaugeError::NonDifferentiable { .. } => GaugeError::Infeasible(
            "dual objective vanishes at the start; Ax = b has no solution along b".into(),
        ),
        other => other,
    })?;
    let mut trace = IterationTrace::default();
    trace.push(IterationRecord {
        iter: 0,
        objective: cur.value,
        step: 0.0,
        grad_norm: cur.gradient.norm(),
    });
    let mut t = opts.clip(y.norm().max(1.0) / cur.gradient.norm());
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let mut trial_step = t;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = p.project_dual_feasible(&(&y - &cur.gradient * trial_step));
            let d = &trial - &y;
            match p.evaluate(&trial) {
                Ok(e) if e.value
                    <= cur.value + opts.armijo_c1 * cur.gradient.dot(&d) + roundoff(cur.value) =>
                {
                    accepted = Some((trial, e));
                    break;
                }
                Ok(_) | Err(GaugeError::NonDifferentiable { .. }) => trial_step *= opts.backtrack,
                Err(e) => return Err(e),
            }
        }
        let Some((next, e)) = accepted else {
            return Err(GaugeError::LineSearchFailure {
                halvings: opts.max_halvings,
            });
        };
        iterations += 1;
        let s = &next - &y;
        let r = &e.gradient - &cur.gradient;
        let sr = s.dot(&r);
        t = if sr > 0.0 {
            opts.clip(s.norm_squared() / sr)
        } else {
            opts.clip(2.0 * trial_step)
        };
        trace.push(IterationRecord {
            iter: iterations,
            objective: e.value,
            step: trial_step,
            grad_norm: s.norm() / trial_step,
        });
        let moved = s.norm();
        let threshold = opts.step_tol * (1.0 + y.norm());
        y = next;
        cur = e;
        if moved <= threshold {
            converged = true;
            break;
        }
    }

    let r = cur.value;
    let x = p.recover_primal(&y, r)?;
    let primal_value = p.primal_objective(&x);
    Ok(SolveReport {
        method: SolveMethod::GaugeDual,
        alpha: p.alpha(),
        feasibility_residual: p.feasibility_residual(&x),
        duality_product: Some(primal_value * r),
        dual_solution: y,
        dual_value: r,
        primal_solution: x,
        primal_value,
        converged,
        iterations,
        trace,
    })
}

/// Slack for the sufficient-decrease test: a few ulps of the current value, so
/// that steps whose decrease is below rounding are not rejected forever.
fn roundoff(value: f64) -> f64 {
    4.0 * f64::EPSILON * value.abs()
}

/// `h(y) = −⟨b, y⟩ + (1/2α)·dist²_{[κ° ≤ 1]}(Aᵀy)` and its gradient.
fn lagrange_smooth(p: &GaugeDualProblem, y: &Vector) -> Result<(f64, Vector)> {
    let u = p.a().tr_mul(y);
    let proj = p.kappa_polar().project_level_set(&u, 1.0)?;
    let d = u - proj;
    let alpha = p.alpha();
    Ok((
        -p.b().dot(y) + d.norm_squared() / (2.0 * alpha),
        p.a() * d / alpha - p.b(),
    ))
}

/// Prox of `t·σρ°`.
fn lagrange_prox(p: &GaugeDualProblem, t: f64, y: Vector) -> Vector {
    match p.rho() {
        ResidualGauge::Zero => y,
        ResidualGauge::L2 => {
            let tau = t * p.sigma();
            let n = y.norm();
            if n <= tau {
                Vector::zeros(y.len())
            } else {
                y * (1.0 - tau / n)
            }
        }
    }
}

/// Proximal-gradient ascent on the Lagrange dual of
/// `minimize κ(x) + (α/2)‖x‖² subject to ρ(b − Ax) ≤ σ`, with recovery
/// `x̄ = prox_{κ/α}(Aᵀȳ/α)`.
pub fn solve_lagrange_baseline(p: &GaugeDualProblem, opts: &SolverOptions) -> Result<SolveReport> {
    opts.validate()?;
    let nonsmooth = |y: &Vector| p.sigma() * p.rho().polar_eval(y);
    let mut y = Vector::zeros(p.b().len());
    let (mut h, mut g) = lagrange_smooth(p, &y)?;
    let mut trace = IterationTrace::default();
    trace.push(IterationRecord {
        iter: 0,
        objective: h + nonsmooth(&y),
        step: 0.0,
        grad_norm: g.norm(),
    });
    let mut t = opts.clip(1.0 / g.norm().max(f64::MIN_POSITIVE));
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let mut trial_step = t;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = lagrange_prox(p, trial_step, &y - &g * trial_step);
            let d = &trial - &y;
            let (h_trial, g_trial) = lagrange_smooth(p, &trial)?;
            if h_trial <= h + g.dot(&d) + d.norm_squared() / (2.0 * trial_step) + roundoff(h) {
                accepted = Some((trial, h_trial, g_trial));
                break;
            }
            trial_step *= opts.backtrack;
        }
        let Some((next, h_next, g_next)) = accepted else {
            return Err(GaugeError::LineSearchFailure {
                halvings: opts.max_halvings,
            });
        };
        iterations += 1;
        let s = &next - &y;
        let sr = s.dot(&(&g_next - &g));
        t = if sr > 0.0 {
            opts.clip(s.norm_squared() / sr)
        } else {
            opts.clip(2.0 * trial_step)
        };
        trace.push(IterationRecord {
            iter: iterations,
            objective: h_next + nonsmooth(&next),
            step: trial_step,
            grad_norm: s.norm() / trial_step,
        });
        let moved = s.norm();
        let threshold = opts.step_tol * (1.0 + y.norm());
        y = next;
        h = h_next;
        g = g_next;
        if moved <= threshold {
            converged = true;
            break;
        }
    }

    let alpha = p.alpha();
    let x = p.kappa().moreau_prox(1.0 / alpha, &(p.a().tr_mul(&y) / alpha))?;
    let primal_value = p.kappa().eval(&x) + 0.5 * alpha * x.norm_squared();
    Ok(SolveReport {
        method: SolveMethod::Lagrange,
        alpha,
        dual_value: -(h + nonsmooth(&y)),
        feasibility_residual: p.feasibility_residual(&x),
        dual_solution: y,
        primal_solution: x,
        primal_value,
        duality_product: None,
        converged,
        iterations,
        trace,
    })
}
