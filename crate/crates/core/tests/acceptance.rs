//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use polargauge::checks::{central_difference, gaussian_vector};
use polargauge::convolution::check_polar_identity;
use polargauge::dual::{solve_gauge_dual, solve_lagrange_baseline, ProblemInstance, SolverOptions};
use polargauge::envelope::{
    linf_polar_prox_fast, polar_envelope, polar_envelope_gradient, polar_prox, polar_prox_generic, ProxCase,
};
use polargauge::gauge::{Cone, ConeIndicator, Gauge, LinearConeGauge, Norm, NormGauge, SharedGauge};
use polargauge::oracle::{grid_minimize, GridSpec};
use polargauge::perspective::{
    projected_polar_envelope, run_ema, run_p4a, EmaOptions, LiftedGauge, P4AOptions, SharedLifted, ShiftedL1,
    SmoothedL1Halfplane,
};
use polargauge::Vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
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
            "linear cone",
            Arc::new(LinearConeGauge::new(Vector::from_element(dim, 1.0), Cone::NonnegativeOrthant).unwrap()),
        ),
        ("orthant indicator", Arc::new(ConeIndicator::new(Cone::NonnegativeOrthant, dim))),
    ]
}

fn lifted_shifted_l1(n: usize) -> LiftedGauge {
    LiftedGauge::new(Arc::new(ShiftedL1::new(1.0, n).unwrap()))
}

fn linf_closed_form() -> Outcome {
    let x = Vector::from_vec(vec![3.0, 1.0]);
    let g2 = NormGauge::new(Norm::Linf, 2);
    let fast = linf_polar_prox_fast(1.0, &x).unwrap();
    let slow = polar_prox_generic(&g2, 1.0, &x).unwrap();
    let expected = Vector::from_vec(vec![1.5, 1.0]);
    let example_err = [
        (fast.value - 1.5).abs(),
        (slow.value - 1.5).abs(),
        (&fast.prox_point - &expected).amax(),
        (&slow.prox_point - &expected).amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut fast_time = Duration::ZERO;
    let start = Instant::now();
    for n in [2, 10, 100] {
        let g = NormGauge::new(Norm::Linf, n);
        for _ in 0..1000 {
            let x = r.random_range(0.1..10.0) * gaussian_vector(&mut r, n);
            let t = Instant::now();
            let a = linf_polar_prox_fast(1.0, &x).unwrap();
            fast_time += t.elapsed();
            let b = polar_prox_generic(&g, 1.0, &x).unwrap();
            worst = worst.max((a.value - b.value).abs()).max((a.prox_point - b.prox_point).amax());
        }
    }
    let total = start.elapsed();
    outcome(
        example_err <= 1e-9 && worst <= 1e-8 && total < Duration::from_secs(1),
        format!(
            "(3,1): err {example_err:.1e} (tol 1e-9); fast vs bisection max diff {worst:.1e} (tol 1e-8) on 3000 vectors; \
             fast path {:.1} ms, total {:.0} ms (limit 1 s)",
            fast_time.as_secs_f64() * 1e3,
            total.as_secs_f64() * 1e3
        ),
    )
}

fn cone_indicator() -> Outcome {
    let mut r = rng(2);
    let g = ConeIndicator::new(Cone::NonnegativeOrthant, 6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = gaussian_vector(&mut r, 6);
        let alpha = r.random_range(0.05..5.0);
        let p = x.map(|v| v.max(0.0));
        let res = polar_prox(&g, alpha, &x).unwrap();
        worst = worst
            .max((res.value - (&x - &p).norm() / alpha).abs())
            .max((res.prox_point - p).amax());
    }
    outcome(worst <= 1e-12, format!("orthant, 100 points: max error {worst:.1e} (tol 1e-12)"))
}

fn root_residual() -> Outcome {
    let mut r = rng(3);
    let mut gauges: Vec<(String, Arc<dyn Gauge>)> =
        catalog(5).into_iter().map(|(n, g)| (n.to_string(), g)).collect();
    gauges.push(("lifted shifted l1".into(), Arc::new(lifted_shifted_l1(4))));
    gauges.push((
        "lifted halfplane".into(),
        Arc::new(LiftedGauge::new(Arc::new(SmoothedL1Halfplane::new(0.5).unwrap()))),
    ));
    let (mut worst, mut count) = (0.0f64, 0);
    for (_, g) in &gauges {
        for _ in 0..200 {
            let x = 2.0 * gaussian_vector(&mut r, g.dim());
            let alpha = r.random_range(0.05..3.0);
            let res = polar_prox(g.as_ref(), alpha, &x).unwrap();
            if res.case != ProxCase::LevelSetRoot {
                continue;
            }
            let p = g.project_level_set(&x, res.value).unwrap();
            let phi = ((alpha * res.value).powi(2) - (&x - p).norm_squared()).abs();
            worst = worst.max(phi / (1.0 + res.value.powi(2)));
            count += 1;
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{count} level-set roots over {} gauges: max |φ(r̄)|/(1+r̄²) {worst:.1e} (tol 1e-9)", gauges.len()),
    )
}

fn gradient_checks() -> Outcome {
    let mut r = rng(4);
    let l2 = NormGauge::new(Norm::L2, 5);
    let linf = NormGauge::new(Norm::Linf, 5);
    let lifted = lifted_shifted_l1(4);
    let mut parts = Vec::new();
    let mut passed = true;
    for (name, g) in [("l2", &l2 as &dyn Gauge), ("linf", &linf), ("lifted shifted l1", &lifted)] {
        let (mut worst, mut tested) = (0.0f64, 0);
        while tested < 200 {
            let x = 2.0 * gaussian_vector(&mut r, g.dim());
            let alpha = r.random_range(0.2..2.0);
            let Ok(grad) = polar_envelope_gradient(g, alpha, &x) else { continue };
            if grad.value <= 0.1 {
                continue;
            }
            let h = 1e-6 * (1.0 + x.norm());
            let fd = central_difference(|y| polar_envelope(g, alpha, y), &x, h).unwrap();
            worst = worst.max((&grad.gradient - fd).norm() / grad.gradient.norm());
            tested += 1;
        }
        passed &= worst <= 1e-5;
        parts.push(format!("{name} {worst:.1e}"));
    }
    outcome(passed, format!("max relative error at 200 points each: {} (tol 1e-5)", parts.join(", ")))
}

fn lipschitz_and_homogeneity() -> Outcome {
    let mut r = rng(5);
    let gauges = catalog(4);
    let mut lip = f64::NEG_INFINITY;
    for k in 0..10_000 {
        let g = &gauges[k % gauges.len()].1;
        let alpha = r.random_range(0.05..3.0);
        let x = 3.0 * gaussian_vector(&mut r, 4);
        let y = &x + r.random_range(0.01..2.0) * gaussian_vector(&mut r, 4);
        let d = (&x - &y).norm();
        let diff = (polar_envelope(g.as_ref(), alpha, &x).unwrap() - polar_envelope(g.as_ref(), alpha, &y).unwrap()).abs();
        lip = lip.max(diff * alpha / d);
    }
    let mut hom = 0.0f64;
    for (_, g) in &gauges {
        for _ in 0..50 {
            let x = gaussian_vector(&mut r, 4);
            let alpha = r.random_range(0.05..3.0);
            let base = polar_prox(g.as_ref(), alpha, &x).unwrap();
            for t in [0.5, 2.0, 10.0] {
                let s = polar_prox(g.as_ref(), alpha, &(t * &x)).unwrap();
                let scale_v = (t * base.value).max(f64::MIN_POSITIVE);
                let scale_p = (t * base.prox_point.norm()).max(f64::MIN_POSITIVE);
                let dv = if base.value == 0.0 { s.value } else { (s.value - t * base.value).abs() / scale_v };
                let dp = if base.prox_point.norm() == 0.0 {
                    s.prox_point.norm()
                } else {
                    (&s.prox_point - t * &base.prox_point).norm() / scale_p
                };
                hom = hom.max(dv).max(dp);
            }
        }
    }
    outcome(
        lip <= 1.0 + 1e-12 && hom <= 1e-9,
        format!("max |Δκ_α|·α/‖Δx‖ = {lip:.15} over 10000 pairs (limit 1+1e-12); homogeneity rel err {hom:.1e} (tol 1e-9)"),
    )
}

fn polar_identity() -> Outcome {
    let samples: Vec<Vector> = (0..50)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64 + 0.37) / 50.0;
            Vector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect();
    let mut parts = Vec::new();
    let (mut passed, mut threshold) = (true, 0.0);
    for (name, a, b) in [("l1/l2", Norm::L1, Norm::L2), ("l2/l2", Norm::L2, Norm::L2), ("linf/l2", Norm::Linf, Norm::L2)] {
        let rep = check_polar_identity(&norm(a, 2), &norm(b, 2), &samples).unwrap();
        passed &= rep.max_deviation <= 2.0 * rep.resolution;
        threshold = 2.0 * rep.resolution;
        parts.push(format!("{name} {:.1e}", rep.max_deviation));
    }
    outcome(passed, format!("max relative deviation at 50 directions: {} (threshold {threshold:.1e})", parts.join(", ")))
}

fn gauge_dual() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/bp_5x12.json");
    let inst = ProblemInstance::from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    let p = inst.to_problem(Some(0.1)).unwrap();
    let opts = SolverOptions::default();
    let t = Instant::now();
    let rep = solve_gauge_dual(&p, &opts).unwrap();
    let elapsed = t.elapsed();
    let product = rep.duality_product.unwrap_or(f64::NAN);
    let feas_tol = 1e-6 * (1.0 + p.b().norm());
    let fine = p.with_alpha(0.01).unwrap();
    let gd = solve_gauge_dual(&fine, &opts).unwrap();
    let lg = solve_lagrange_baseline(&fine, &opts).unwrap();
    let dist = (&gd.primal_solution - &lg.primal_solution).norm();
    outcome(
        rep.converged
            && (product - 1.0).abs() <= 1e-5
            && rep.feasibility_residual <= feas_tol
            && elapsed < Duration::from_secs(5)
            && dist <= 1e-3,
        format!(
            "converged {} in {} iters ({:.2} ms); product {product:.12}; ‖Ax̂−b‖ {:.1e} (tol {feas_tol:.1e}); \
             baseline distance at α=0.01 {dist:.1e} (tol 1e-3)",
            rep.converged,
            rep.iterations,
            elapsed.as_secs_f64() * 1e3,
            rep.feasibility_residual
        ),
    )
}

fn seeded_x0() -> Vector {
    gaussian_vector(&mut rng(42), 10)
}

fn p4a_shifted() -> Outcome {
    let lf: SharedLifted = Arc::new(ShiftedL1::new(1.0, 10).unwrap());
    let rep = run_p4a(&lf, 1.0, &seeded_x0(), &P4AOptions::default()).unwrap();
    let increase = rep.trace.windows(2).map(|w| w[1].p_value - w[0].p_value).fold(f64::NEG_INFINITY, f64::max);
    let increase = increase.max(rep.value - rep.trace.last().unwrap().p_value);
    let gap = rep.candidate.as_ref().map_or(f64::INFINITY, |c| lf.base_eval(c) - 1.0);
    outcome(
        increase <= 1e-12 && gap <= 1e-4,
        format!(
            "{} iterations; max p increase {increase:.1e} (slack 1e-12); f(x_*/λ_*) − inf f = {gap:.1e} (tol 1e-4)",
            rep.iterations
        ),
    )
}

fn vanishing_steps() -> Outcome {
    let lf: SharedLifted = Arc::new(SmoothedL1Halfplane::new(0.5).unwrap());
    let alpha = 0.1;
    let rep = run_p4a(&lf, alpha, &Vector::from_vec(vec![3.0, -2.0]), &P4AOptions::default()).unwrap();
    // continue the sequence past the stopping test for ten more iterations
    let mut x = rep.x.clone();
    let mut gaps = Vec::new();
    for _ in 0..10 {
        let env = projected_polar_envelope(&lf, alpha, &x).unwrap();
        gaps.push((&env.x_bar - &x).norm());
        x = env.x_bar;
    }
    let total = rep.iterations + gaps.len();
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    outcome(
        total <= 10_000 && worst <= 1e-3,
        format!("{total} iterations; last 10 step gaps max {worst:.1e} (tol 1e-3)"),
    )
}

fn ema_shifted() -> Outcome {
    let lf: SharedLifted = Arc::new(ShiftedL1::new(1.0, 10).unwrap());
    let opts = EmaOptions::default();
    let rep = run_ema(&lf, 1.0, &seeded_x0(), &opts).unwrap();
    let armijo = rep.steps.iter().all(|s| {
        let step = s.beta * 2f64.powi(-(s.halvings as i32));
        s.p_after <= s.p_before - opts.sigma * step * s.grad_norm_sq
    });
    let gap = rep.candidate.as_ref().map_or(f64::INFINITY, |c| lf.base_eval(c) - 1.0);
    outcome(
        rep.grad_norm <= 1e-6 && gap <= 1e-4 && armijo,
        format!(
            "{} steps; ‖∇p‖ {:.1e} (tol 1e-6); f gap {gap:.1e} (tol 1e-4); Armijo holds at every step: {armijo}",
            rep.steps.len(),
            rep.grad_norm
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(11);
    let mut parts = Vec::new();
    let mut passed = true;
    for (name, g) in catalog(2) {
        let (mut worst, mut beaten) = (0.0f64, 0);
        for _ in 0..50 {
            let x = 2.0 * gaussian_vector(&mut r, 2);
            let alpha = r.random_range(0.2..2.0);
            let res = polar_prox(g.as_ref(), alpha, &x).unwrap();
            // ‖pprox(x)‖ ≤ ‖x‖, so this box holds every candidate minimizer
            let grid = GridSpec::cube(&res.prox_point, 2.0 * x.norm().max(1e-9));
            let best = grid_minimize(|z| g.eval(z).max((&x - z).norm() / alpha), &grid).unwrap();
            let cell = best.cell.iter().copied().fold(0.0, f64::max);
            if best.value < res.value - 1e-12 * (1.0 + res.value) {
                beaten += 1;
            }
            worst = worst.max((best.value - res.value).abs() / cell);
        }
        passed &= worst <= 1.0 && beaten == 0;
        parts.push(format!("{name} {worst:.1e}"));
    }
    outcome(
        passed,
        format!("max |grid min − κ_α| in final-cell units, 50 points each: {} (tol 1)", parts.join(", ")),
    )
}

fn monotone_recovery() -> Outcome {
    let mut r = rng(12);
    let g = NormGauge::new(Norm::Linf, 5);
    let (mut monotone, mut worst) = (true, 0.0f64);
    for _ in 0..20 {
        let x = 2.0 * gaussian_vector(&mut r, 5);
        let v: Vec<f64> = [1.0, 0.1, 0.01, 0.001].iter().map(|&a| polar_envelope(&g, a, &x).unwrap()).collect();
        monotone &= v.windows(2).all(|w| w[1] >= w[0]);
        let k = g.eval(&x);
        worst = worst.max((v[3] - k).abs() / (1.0 + k));
    }
    outcome(
        monotone && worst <= 0.01,
        format!("monotone in α: {monotone}; max |κ_0.001 − κ|/(1+κ) {worst:.1e} (tol 1e-2)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("linf polar prox closed form and fast path", linf_closed_form),
        ("cone indicator envelope", cone_indicator),
        ("root equation residual", root_residual),
        ("gradient vs finite differences", gradient_checks),
        ("Lipschitz and homogeneity sweeps", lipschitz_and_homogeneity),
        ("polar identity of max convolution", polar_identity),
        ("gauge dual basis pursuit", gauge_dual),
        ("P4A on shifted l1", p4a_shifted),
        ("vanishing P4A steps", vanishing_steps),
        ("EMA on shifted l1", ema_shifted),
        ("oracle equivalence in 2-D", oracle_equivalence),
        ("monotone recovery in alpha", monotone_recovery),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        if !out.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} [{:.2} s]: {}",
            k + 1,
            if out.passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
