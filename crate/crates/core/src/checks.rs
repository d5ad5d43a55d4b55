//! Seeded invariant suites for each module, as run by `polargauge check`.
//!
//! Every item compares an implementation against a closed form, an
//! independent oracle, or a structural property, and records the observed
//! error next to the tolerance it was held to.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::convolution::{check_level_sum, check_minkowski_sum, check_polar_identity};
use crate::dual::{generate_sparse_instance, solve_gauge_dual, solve_lagrange_baseline, SolverOptions};
use crate::envelope::{
    linf_polar_prox_fast, polar_envelope, polar_envelope_gradient, polar_prox, polar_prox_generic,
    ProxCase,
};
use crate::error::{GaugeError, Result};
use crate::gauge::{Cone, ConeIndicator, Gauge, LinearConeGauge, Norm, NormGauge, SharedGauge};
use crate::oracle::{grid_minimize, GridSpec};
use crate::perspective::{
    projected_envelope_gradient, projected_polar_envelope, run_ema, run_p4a, EmaOptions, LiftedGauge,
    P4AOptions, SharedLifted, ShiftedL1, SmoothedL1Halfplane,
};
use crate::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Envelope,
    Convolution,
    Duality,
    Perspective,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "envelope" => Ok(Suite::Envelope),
            "convolution" => Ok(Suite::Convolution),
            "duality" => Ok(Suite::Duality),
            "perspective" => Ok(Suite::Perspective),
            "all" => Ok(Suite::All),
            other => Err(GaugeError::InvalidInput(format!("unknown suite '{other}'"))),
        }
    }
}

/// Tolerances used by the suites; each may be overridden by name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub root: f64,
    pub gradient: f64,
    pub lipschitz: f64,
    pub homogeneity: f64,
    pub fast_path: f64,
    pub cone: f64,
    pub duality: f64,
    pub feasibility: f64,
    pub baseline: f64,
    pub monotone: f64,
    pub value_gap: f64,
    pub step_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-9,
            gradient: 1e-5,
            lipschitz: 1e-12,
            homogeneity: 1e-9,
            fast_path: 1e-8,
            cone: 1e-12,
            duality: 1e-5,
            feasibility: 1e-6,
            baseline: 1e-3,
            monotone: 1e-12,
            value_gap: 1e-4,
            step_gap: 1e-3,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 12] = [
        "root",
        "gradient",
        "lipschitz",
        "homogeneity",
        "fast_path",
        "cone",
        "duality",
        "feasibility",
        "baseline",
        "monotone",
        "value_gap",
        "step_gap",
    ];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(GaugeError::InvalidInput(format!(
                "tolerance '{key}' must be positive and finite, got {value}"
            )));
        }
        let slot = match key {
            "root" => &mut self.root,
            "gradient" => &mut self.gradient,
            "lipschitz" => &mut self.lipschitz,
            "homogeneity" => &mut self.homogeneity,
            "fast_path" => &mut self.fast_path,
            "cone" => &mut self.cone,
            "duality" => &mut self.duality,
            "feasibility" => &mut self.feasibility,
            "baseline" => &mut self.baseline,
            "monotone" => &mut self.monotone,
            "value_gap" => &mut self.value_gap,
            "step_gap" => &mut self.step_gap,
            _ => {
                return Err(GaugeError::InvalidInput(format!(
                    "unknown tolerance '{key}' (known: {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Worst observed error, in the units of `tolerance`.
    pub observed: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

struct Recorder<'a> {
    suite: Suite,
    report: &'a mut CheckReport,
}

impl Recorder<'_> {
    /// Passes when `observed ≤ tolerance`.
    fn bound(&mut self, name: &str, observed: f64, tolerance: f64, detail: impl Into<String>) {
        self.report.items.push(CheckItem {
            suite: self.suite,
            name: name.to_string(),
            passed: observed <= tolerance,
            observed,
            tolerance,
            detail: detail.into(),
        });
    }

    fn flag(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        self.bound(name, if ok { 0.0 } else { 1.0 }, 0.0, detail);
    }

    fn error(&mut self, name: &str, err: &GaugeError) {
        self.flag(name, false, format!("error: {err}"));
    }
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Central differences with step `h` in every coordinate.
pub fn central_difference<F>(f: F, x: &Vector, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> Result<f64>,
{
    let mut g = Vector::zeros(x.len());
    let mut y = x.clone();
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let up = f(&y)?;
        y[i] = x[i] - h;
        let down = f(&y)?;
        y[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    Ok(g)
}

fn norm(n: Norm, dim: usize) -> SharedGauge {
    Arc::new(NormGauge::new(n, dim))
}

fn catalog(dim: usize) -> Vec<(&'static str, SharedGauge)> {
    vec![
        ("l1", norm(Norm::L1, dim)),
        ("l2", norm(Norm::L2, dim)),
        ("linf", norm(Norm::Linf, dim)),
        (
            "linear_cone",
            Arc::new(LinearConeGauge::new(Vector::from_element(dim, 1.0), Cone::NonnegativeOrthant).unwrap()),
        ),
        ("orthant_indicator", Arc::new(ConeIndicator::new(Cone::NonnegativeOrthant, dim))),
    ]
}

pub fn run_suite(suite: Suite, seed: u64, tol: &Tolerances) -> CheckReport {
    let mut report = CheckReport::default();
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Envelope, Suite::Convolution, Suite::Duality, Suite::Perspective],
        Suite::Envelope => &[Suite::Envelope],
        Suite::Convolution => &[Suite::Convolution],
        Suite::Duality => &[Suite::Duality],
        Suite::Perspective => &[Suite::Perspective],
    };
    for &s in suites {
        let mut rec = Recorder { suite: s, report: &mut report };
        match s {
            Suite::Envelope => envelope_suite(&mut rec, seed, tol),
            Suite::Convolution => convolution_suite(&mut rec, seed),
            Suite::Duality => duality_suite(&mut rec, tol),
            Suite::Perspective => perspective_suite(&mut rec, seed, tol),
            Suite::All => unreachable!(),
        }
    }
    report
}

fn envelope_suite(rec: &mut Recorder, seed: u64, tol: &Tolerances) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = 0.7;

    let mut worst = 0.0f64;
    let mut failure = None;
    for (name, g) in catalog(5) {
        for _ in 0..40 {
            let x = 2.0 * gaussian_vector(&mut rng, 5);
            match polar_prox(g.as_ref(), alpha, &x) {
                Ok(res) if res.case == ProxCase::LevelSetRoot => {
                    let p = g.project_level_set(&x, res.value).unwrap();
                    let phi = ((alpha * res.value).powi(2) - (&x - p).norm_squared()).abs();
                    worst = worst.max(phi / (1.0 + res.value.powi(2)));
                }
                Ok(_) => {}
                Err(e) => failure = Some(format!("{name}: {e}")),
            }
        }
    }
    match failure {
        Some(f) => rec.flag("root residual", false, f),
        None => rec.bound("root residual", worst, tol.root, "|α²r² − ‖x − P(x)‖²| / (1 + r²), catalog gauges, n = 5"),
    }

    let lifted = LiftedGauge::new(Arc::new(ShiftedL1::new(1.0, 4).unwrap()));
    let (l2, linf) = (NormGauge::new(Norm::L2, 5), NormGauge::new(Norm::Linf, 5));
    let gauges: Vec<(&str, &dyn Gauge)> = vec![("l2", &l2), ("linf", &linf), ("lifted shifted l1", &lifted)];
    for (name, g) in gauges {
        let label = format!("gradient vs finite differences ({name})");
        let mut worst = 0.0f64;
        let mut tested = 0;
        while tested < 25 {
            let x = 2.0 * gaussian_vector(&mut rng, g.dim());
            let grad = match polar_envelope_gradient(g, alpha, &x) {
                Ok(gr) if gr.value > 0.1 => gr.gradient,
                Ok(_) => continue,
                Err(e) => return rec.error(&label, &e),
            };
            let h = 1e-6 * (1.0 + x.norm());
            match central_difference(|y| polar_envelope(g, alpha, y), &x, h) {
                Ok(fd) => worst = worst.max((&grad - fd).norm() / grad.norm()),
                Err(e) => return rec.error(&label, &e),
            }
            tested += 1;
        }
        rec.bound(&label, worst, tol.gradient, "relative error at 25 points with κ_α > 0.1");
    }

    let l1 = NormGauge::new(Norm::L1, 5);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let x = 3.0 * gaussian_vector(&mut rng, 5);
        let y = &x + 0.5 * gaussian_vector(&mut rng, 5);
        let (fx, fy) = (polar_envelope(&l1, alpha, &x).unwrap(), polar_envelope(&l1, alpha, &y).unwrap());
        let bound = (&x - &y).norm() / alpha;
        if bound > 0.0 {
            worst = worst.max((fx - fy).abs() / bound - 1.0);
        }
    }
    rec.bound("lipschitz 1/α", worst.max(0.0), tol.lipschitz, "max(|Δκ_α| α / ‖Δx‖) − 1 over 1000 pairs (l1)");

    let mut worst = 0.0f64;
    for (_, g) in catalog(5) {
        for _ in 0..10 {
            let x = gaussian_vector(&mut rng, 5);
            let base = polar_prox(g.as_ref(), alpha, &x).unwrap();
            for t in [0.5, 2.0, 10.0] {
                let scaled = polar_prox(g.as_ref(), alpha, &(t * &x)).unwrap();
                let dv = (scaled.value - t * base.value).abs() / (1.0 + t * base.value);
                let dp = (&scaled.prox_point - t * &base.prox_point).norm() / (1.0 + t * base.prox_point.norm());
                worst = worst.max(dv).max(dp);
            }
        }
    }
    rec.bound("homogeneity", worst, tol.homogeneity, "envelope and prox under t ∈ {0.5, 2, 10}");

    let mut worst = 0.0f64;
    for n in [2, 10, 100] {
        let g = NormGauge::new(Norm::Linf, n);
        for _ in 0..30 {
            let x = gaussian_vector(&mut rng, n);
            let fast = linf_polar_prox_fast(alpha, &x).unwrap();
            let slow = polar_prox_generic(&g, alpha, &x).unwrap();
            worst = worst
                .max((fast.value - slow.value).abs())
                .max((fast.prox_point - slow.prox_point).amax());
        }
    }
    rec.bound("linf fast path vs bisection", worst, tol.fast_path, "n ∈ {2, 10, 100}");

    let orthant = ConeIndicator::new(Cone::NonnegativeOrthant, 6);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = gaussian_vector(&mut rng, 6);
        let p = x.map(|v| v.max(0.0));
        let res = polar_prox(&orthant, alpha, &x).unwrap();
        worst = worst
            .max((res.value - (&x - &p).norm() / alpha).abs())
            .max((res.prox_point - p).amax());
    }
    rec.bound("cone indicator", worst, tol.cone, "κ_α = dist/α and pprox = projection, orthant");

    let g = NormGauge::new(Norm::Linf, 4);
    let mut monotone = true;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = gaussian_vector(&mut rng, 4);
        let values: Vec<f64> = [1.0, 0.1, 0.01, 0.001]
            .iter()
            .map(|&a| polar_envelope(&g, a, &x).unwrap())
            .collect();
        monotone &= values.windows(2).all(|w| w[1] >= w[0]);
        let k = g.eval(&x);
        worst = worst.max((values[3] - k).abs() / (1.0 + k));
    }
    rec.flag("monotone in α", monotone, "κ_α(x) nondecreasing as α decreases (linf)");
    rec.bound("recovery at α = 0.001", worst, 0.01, "|κ_α − κ| / (1 + κ), linf");

    let mut worst = 0.0f64;
    for (name, g) in catalog(2) {
        for _ in 0..8 {
            let x = 2.0 * gaussian_vector(&mut rng, 2);
            let value = polar_envelope(g.as_ref(), alpha, &x).unwrap();
            let grid = GridSpec::cube(&x, x.norm().max(1e-3));
            let best = grid_minimize(|z| g.eval(z).max((&x - z).norm() / alpha), &grid).unwrap();
            let cell = best.cell.iter().map(|c| c * c).sum::<f64>().sqrt();
            // the objective is Lipschitz with constant max(1/α, Lip κ) on its domain
            let lip = (1.0 / alpha).max(3.0);
            let err = (best.value - value) / (lip * cell);
            if best.value < value - 1e-12 {
                rec.flag("grid oracle", false, format!("{name}: grid beat envelope at {x:?}"));
                return;
            }
            worst = worst.max(err);
        }
    }
    rec.bound("grid oracle", worst, 1.0, "(grid min − κ_α) in units of Lipschitz × cell diagonal, 2-D catalog");
}

fn convolution_suite(rec: &mut Recorder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vector> = (0..8)
        .map(|_| {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Vector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect();
    for (name, a, b) in [
        ("l1, l2", Norm::L1, Norm::L2),
        ("l2, l2", Norm::L2, Norm::L2),
        ("linf, l2", Norm::Linf, Norm::L2),
    ] {
        let label = format!("polar identity ({name})");
        match check_polar_identity(&norm(a, 2), &norm(b, 2), &samples) {
            Ok(r) => rec.bound(&label, r.max_deviation, r.threshold, "relative deviation vs 2 × grid resolution"),
            Err(e) => rec.error(&label, &e),
        }
    }
    let pts: Vec<Vector> = (0..8).map(|_| 1.5 * gaussian_vector(&mut rng, 2)).collect();
    match check_level_sum(&NormGauge::new(Norm::L1, 2), &NormGauge::new(Norm::Linf, 2), 1.0, &pts) {
        Ok(r) => rec.flag("level sum", r.passed, format!("{} points", pts.len())),
        Err(e) => rec.error("level sum", &e),
    }
    match check_minkowski_sum(&norm(Norm::L2, 2), &norm(Norm::L1, 2), 64) {
        Ok(r) => rec.bound("minkowski sum", r.hausdorff_estimate, r.tolerance, "unit ball of ℓ₂◇ℓ₁ vs B₂ + B₁"),
        Err(e) => rec.error("minkowski sum", &e),
    }
}

fn duality_suite(rec: &mut Recorder, tol: &Tolerances) {
    let inst = match generate_sparse_instance(5, 12, 3, 0.1, 7) {
        Ok(i) => i,
        Err(e) => return rec.error("instance", &e),
    };
    let problem = match inst.instance.to_problem(None) {
        Ok(p) => p,
        Err(e) => return rec.error("instance", &e),
    };
    let opts = SolverOptions::default();
    let report = match solve_gauge_dual(&problem, &opts) {
        Ok(r) => r,
        Err(e) => return rec.error("gauge dual", &e),
    };
    rec.flag("gauge dual converged", report.converged, format!("{} iterations", report.iterations));
    let product = report.duality_product.unwrap_or(f64::NAN);
    rec.bound("duality product", (product - 1.0).abs(), tol.duality, format!("product {product}"));
    let bnorm = problem.b().norm();
    rec.bound(
        "primal feasibility",
        report.feasibility_residual / (1.0 + bnorm),
        tol.feasibility,
        "‖Ax̂ − b‖ / (1 + ‖b‖)",
    );
    rec.flag("trace nonincreasing", report.trace.is_nonincreasing(0.0), "dual objective per iteration");

    let fine = match problem.with_alpha(0.01) {
        Ok(p) => p,
        Err(e) => return rec.error("baseline", &e),
    };
    match (solve_gauge_dual(&fine, &opts), solve_lagrange_baseline(&fine, &opts)) {
        (Ok(gd), Ok(lg)) => rec.bound(
            "lagrange baseline agreement",
            (&gd.primal_solution - &lg.primal_solution).norm(),
            tol.baseline,
            "‖x̂_gauge − x̄_lagrange‖ at α = 0.01",
        ),
        (Err(e), _) | (_, Err(e)) => rec.error("lagrange baseline agreement", &e),
    }
}

fn perspective_suite(rec: &mut Recorder, seed: u64, tol: &Tolerances) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = 1.0;
    let shifted: SharedLifted = Arc::new(ShiftedL1::new(1.0, 10).unwrap());
    let x0 = gaussian_vector(&mut rng, 10);

    match run_p4a(&shifted, alpha, &x0, &P4AOptions { monotone_slack: tol.monotone, ..P4AOptions::default() }) {
        Ok(r) => {
            rec.bound("p4a monotone", r.max_increase.max(0.0), tol.monotone * (1.0 + x0.norm()), "largest p(x_{k+1}) − p(x_k)");
            let gap = r.candidate.as_ref().map_or(f64::INFINITY, |c| shifted.base_eval(c) - 1.0);
            rec.bound("p4a value gap", gap, tol.value_gap, "f(x_*/λ_*) − inf f, shifted l1");
            rec.bound("p4a fixed point", r.fixed_point_gap, 10.0 * r.stop_tol, "‖rpprox(x_*) − (x_*, λ_*)‖");
        }
        Err(e) => rec.error("p4a", &e),
    }

    let hp: SharedLifted = Arc::new(SmoothedL1Halfplane::new(0.5).unwrap());
    let start = Vector::from_vec(vec![3.0, -2.0]);
    match run_p4a(&hp, 0.1, &start, &P4AOptions::default()) {
        Ok(r) => {
            let mut x = r.x.clone();
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let env = projected_polar_envelope(&hp, 0.1, &x).unwrap();
                worst = worst.max((&env.x_bar - &x).norm());
                x = env.x_bar;
            }
            rec.bound("p4a vanishing steps", worst, tol.step_gap, format!("last 10 gaps after {} iterations", r.iterations));
            let (inf, _) = hp.known_minimum().unwrap();
            let gap = r.candidate.as_ref().map_or(f64::INFINITY, |c| hp.base_eval(c) - inf);
            rec.bound("p4a value gap (halfplane)", gap, tol.value_gap, "f(x_*/λ_*) − inf f");
        }
        Err(e) => rec.error("p4a halfplane", &e),
    }

    let opts = EmaOptions::default();
    match run_ema(&shifted, alpha, &x0, &opts) {
        Ok(r) => {
            rec.bound("ema gradient", r.grad_norm, 1e-6, "‖∇p‖ at termination");
            let armijo = r.steps.iter().all(|s| s.p_after <= s.armijo_bound(opts.sigma));
            rec.flag("ema armijo", armijo, format!("{} accepted steps", r.steps.len()));
            let gap = r.candidate.as_ref().map_or(f64::INFINITY, |c| shifted.base_eval(c) - 1.0);
            rec.bound("ema value gap", gap, tol.value_gap, "f(x̄/λ̄) − inf f");
        }
        Err(e) => rec.error("ema", &e),
    }

    let mut min_p = f64::INFINITY;
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let x = 2.0 * gaussian_vector(&mut rng, 10);
        match projected_envelope_gradient(&shifted, alpha, &x) {
            Ok((env, grad)) => {
                min_p = min_p.min(env.value);
                let h = 1e-6 * (1.0 + x.norm());
                let fd = central_difference(|y| projected_polar_envelope(&shifted, alpha, y).map(|e| e.value), &x, h);
                if let Ok(fd) = fd {
                    worst = worst.max((&grad - fd).norm() / grad.norm().max(1e-300));
                }
            }
            Err(e) => return rec.error("projected gradient", &e),
        }
    }
    rec.flag("positivity", min_p > 0.0, format!("min p = {min_p:.3e}"));
    rec.bound("projected gradient vs finite differences", worst, tol.gradient, "x-block of lifted gradient");

    // λx* minimizes p with λ = 1/(1 + α f(x*))
    let (inf, xstar) = hp.known_minimum().unwrap();
    let lam = 1.0 / (1.0 + 0.1 * inf);
    let center = lam * xstar;
    let p_center = projected_polar_envelope(&hp, 0.1, &center).map(|e| e.value).unwrap_or(f64::NAN);
    let mut below = 0.0f64;
    for i in -4..=4 {
        for j in -4..=4 {
            let z = &center + Vector::from_vec(vec![0.05 * i as f64, 0.05 * j as f64]);
            if let Ok(e) = projected_polar_envelope(&hp, 0.1, &z) {
                below = below.max(p_center - e.value);
            }
        }
    }
    rec.bound("scaled minimizer", below, 1e-9, "max(p(λx*) − p(z)) over a 9 × 9 grid around λx*");
}
