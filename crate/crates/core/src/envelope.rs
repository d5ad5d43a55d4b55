//! Polar envelope `κ_α(x) = inf_z max{κ(z), ‖x − z‖/α}` and the polar proximal
//! map `pprox_{ακ}(x)`, its unique minimizer.
//!
//! The generic path first tries the domain projection `ȳ = P_{dom κ}(x)`; if
//! `κ(ȳ) < ‖x − ȳ‖/α` that is the answer. Otherwise the value is the positive
//! root of `φ(r) = α²r² − ‖x − P_{[κ≤r]}(x)‖²`, which is strictly increasing,
//! and the prox is the level-set projection at that root.

use serde::Serialize;

use crate::error::{GaugeError, Result};
use crate::gauge::{ensure_dim, ensure_finite, ensure_positive, tol_feas, Gauge, GaugeKind};
use crate::Vector;

const BRACKET_DOUBLINGS: usize = 64;
const MAX_BISECTIONS: usize = 1100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxCase {
    DomainProjection,
    LevelSetRoot,
    ZeroEnvelope,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarProxResult {
    pub value: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub prox_point: Vector,
    pub case: ProxCase,
    /// `|φ(value)|` for `LevelSetRoot`, zero otherwise.
    pub root_residual: f64,
    pub root_iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeGradient {
    pub value: f64,
    #[serde(serialize_with = "crate::serialize_vector")]
    pub gradient: Vector,
    /// `⟨x, x − pprox(x)⟩`, positive wherever the gradient exists.
    pub inner_product_check: f64,
}

/// Envelope values at or below this are treated as nondifferentiable points.
pub fn grad_floor(alpha: f64, x: &Vector) -> f64 {
    1e-8 * (1.0 + x.norm() / alpha)
}

/// Acceptance bound on the root residual for an initial bracket `[0, r_hi]`.
pub fn root_tol(r_hi: f64) -> f64 {
    1e-10 * (1.0 + r_hi)
}

fn validate(g: &dyn Gauge, alpha: f64, x: &Vector) -> Result<()> {
    ensure_positive("alpha", alpha)?;
    ensure_dim(g.dim(), x)?;
    ensure_finite("x", x)
}

fn zero_envelope(x: &Vector) -> PolarProxResult {
    PolarProxResult {
        value: 0.0,
        prox_point: x.clone(),
        case: ProxCase::ZeroEnvelope,
        root_residual: 0.0,
        root_iterations: 0,
    }
}

fn closed_form(x: &Vector, value: f64, prox_point: Vector, alpha: f64) -> PolarProxResult {
    let residual = ((alpha * value).powi(2) - (x - &prox_point).norm_squared()).abs();
    PolarProxResult {
        value,
        prox_point,
        case: ProxCase::LevelSetRoot,
        root_residual: residual,
        root_iterations: 0,
    }
}

/// Polar proximal map with closed-form fast paths for `ℓ∞`, `ℓ₂` and cone
/// indicators; everything else goes through [`polar_prox_generic`].
pub fn polar_prox(g: &dyn Gauge, alpha: f64, x: &Vector) -> Result<PolarProxResult> {
    validate(g, alpha, x)?;
    match g.kind() {
        GaugeKind::Linf => Ok(linf_prox(alpha, x)),
        GaugeKind::L2 => {
            if x.iter().all(|&v| v == 0.0) {
                return Ok(zero_envelope(x));
            }
            Ok(closed_form(x, x.norm() / (1.0 + alpha), x / (1.0 + alpha), alpha))
        }
        GaugeKind::ConeIndicator => {
            let p = g
                .project_domain(x)
                .expect("cone indicators project onto their cone");
            let dist = (x - &p).norm();
            if dist == 0.0 {
                return Ok(zero_envelope(x));
            }
            Ok(PolarProxResult {
                value: dist / alpha,
                prox_point: p,
                case: ProxCase::DomainProjection,
                root_residual: 0.0,
                root_iterations: 0,
            })
        }
        _ => polar_prox_generic(g, alpha, x),
    }
}

/// Case analysis plus bracketed bisection, using only `eval`,
/// `project_domain` and `project_level_set`.
pub fn polar_prox_generic(g: &dyn Gauge, alpha: f64, x: &Vector) -> Result<PolarProxResult> {
    validate(g, alpha, x)?;
    if let Some(y) = g.project_domain(x) {
        let d = (x - &y).norm() / alpha;
        if g.eval(&y) < d - tol_feas(d) {
            return Ok(PolarProxResult {
                value: d,
                prox_point: y,
                case: ProxCase::DomainProjection,
                root_residual: 0.0,
                root_iterations: 0,
            });
        }
    }
    if g.eval(x) == 0.0 {
        return Ok(zero_envelope(x));
    }

    let phi = |r: f64| -> Result<f64> {
        let p = g.project_level_set(x, r)?;
        Ok((alpha * r).powi(2) - (x - p).norm_squared())
    };

    let mut hi = (x.norm() / alpha).max(1.0);
    let mut history = vec![hi];
    let mut phi_hi = phi(hi)?;
    while phi_hi < 0.0 {
        if history.len() > BRACKET_DOUBLINGS {
            return Err(GaugeError::BracketFailure { history });
        }
        hi *= 2.0;
        history.push(hi);
        phi_hi = phi(hi)?;
    }
    if hi == 0.0 {
        return Ok(zero_envelope(x));
    }

    let mut lo = 0.0;
    let mut phi_lo = phi(lo)?;
    let mut iterations = 0;
    let width_floor = 1e-3 * g.projection_resolution();
    while iterations < MAX_BISECTIONS && phi_hi != 0.0 && phi_lo != 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= width_floor {
            break;
        }
        iterations += 1;
        let phi_mid = phi(mid)?;
        if phi_mid >= 0.0 {
            hi = mid;
            phi_hi = phi_mid;
        } else {
            lo = mid;
            phi_lo = phi_mid;
        }
    }
    let (r, residual) = if phi_lo.abs() < phi_hi.abs() && lo > 0.0 {
        (lo, phi_lo.abs())
    } else {
        (hi, phi_hi.abs())
    };
    Ok(PolarProxResult {
        value: r,
        prox_point: g.project_level_set(x, r)?,
        case: ProxCase::LevelSetRoot,
        root_residual: residual,
        root_iterations: iterations,
    })
}

/// `ℓ∞` polar prox by a breakpoint scan over the sorted magnitudes.
///
/// With `a` the magnitudes in decreasing order and `k` active coordinates,
/// `α²r² = Σ_{i≤k}(a_i − r)²` is a quadratic in `r`; the active count is the
/// first `k` with `φ(a_{k+1}) ≤ 0`.
pub fn linf_polar_prox_fast(alpha: f64, x: &Vector) -> Result<PolarProxResult> {
    ensure_positive("alpha", alpha)?;
    ensure_finite("x", x)?;
    Ok(linf_prox(alpha, x))
}

fn linf_prox(alpha: f64, x: &Vector) -> PolarProxResult {
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_unstable_by(|p, q| q.total_cmp(p));
    if a.first().is_none_or(|&m| m == 0.0) {
        return zero_envelope(x);
    }
    let a2 = alpha * alpha;
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut r = 0.0;
    for k in 1..=a.len() {
        let ak = a[k - 1];
        s1 += ak;
        s2 += ak * ak;
        let next = a.get(k).copied().unwrap_or(0.0);
        let kf = k as f64;
        let phi_next = a2 * next * next - (s2 - 2.0 * next * s1 + kf * next * next);
        if phi_next <= 0.0 {
            let disc = (s1 * s1 + s2 * (a2 - kf)).max(0.0);
            r = s2 / (s1 + disc.sqrt());
            break;
        }
    }
    let prox = x.map(|v| v.clamp(-r, r));
    closed_form(x, r, prox, alpha)
}

pub fn polar_envelope(g: &dyn Gauge, alpha: f64, x: &Vector) -> Result<f64> {
    Ok(polar_prox(g, alpha, x)?.value)
}

/// `∇κ_α(x) = ‖x − x̄‖ / (α⟨x, x − x̄⟩) · (x − x̄)` with `x̄ = pprox_{ακ}(x)`.
pub fn polar_envelope_gradient(g: &dyn Gauge, alpha: f64, x: &Vector) -> Result<EnvelopeGradient> {
    let res = polar_prox(g, alpha, x)?;
    gradient_from_prox(alpha, x, &res)
}

pub(crate) fn gradient_from_prox(
    alpha: f64,
    x: &Vector,
    res: &PolarProxResult,
) -> Result<EnvelopeGradient> {
    let floor = grad_floor(alpha, x);
    if res.value <= floor {
        return Err(GaugeError::NonDifferentiable {
            value: res.value,
            floor,
        });
    }
    let d = x - &res.prox_point;
    let ip = x.dot(&d);
    if ip <= 0.0 {
        return Err(GaugeError::NonDifferentiable {
            value: res.value,
            floor,
        });
    }
    Ok(EnvelopeGradient {
        value: res.value,
        gradient: &d * (d.norm() / (alpha * ip)),
        inner_product_check: ip,
    })
}

/// Moreau envelope `min_z κ(z) + ‖x − z‖²/(2t)`, evaluated at the Moreau prox.
pub fn moreau_envelope(g: &dyn Gauge, t: f64, x: &Vector) -> Result<f64> {
    let p = crate::gauge::moreau_prox(g, t, x)?;
    Ok(g.eval(&p) + (x - p).norm_squared() / (2.0 * t))
}
