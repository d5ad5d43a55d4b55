use std::path::{Path, PathBuf};

use polargauge::checks::{gaussian_vector, run_suite, Suite, Tolerances};
use polargauge::dual::{solve_gauge_dual, solve_lagrange_baseline, ProblemInstance, SolveReport, SolverOptions};
use polargauge::envelope::{moreau_envelope, polar_envelope, polar_envelope_gradient, polar_prox};
use polargauge::gauge::GaugeDescriptor;
use polargauge::perspective::{
    run_ema, run_p4a, EmaOptions, LiftedDescriptor, P4AOptions, PerspectiveRecord, SharedLifted,
};
use polargauge::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::io::{json_arg, parse_overrides, parse_vector, read, write_json, write_rows};
use crate::{CheckArgs, ContourArgs, EmaArgs, EnvelopeArgs, P4aArgs, Perspective, SolveArgs};

fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {value}")))
    }
}

pub fn envelope(a: &EnvelopeArgs) -> Result<(), CliError> {
    parse_overrides(&a.common.tol_override, &[])?;
    let alpha = positive("alpha", a.alpha)?;
    let g = GaugeDescriptor::from_json(&json_arg(&a.gauge)?)?.build()?;
    let x = parse_vector(&a.x)?;
    let prox = polar_prox(g.as_ref(), alpha, &x)?;
    let (gradient, note) = match polar_envelope_gradient(g.as_ref(), alpha, &x) {
        Ok(gr) => (Some(gr), None),
        Err(e @ polargauge::GaugeError::NonDifferentiable { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let report = json!({
        "alpha": alpha,
        "x": x.as_slice(),
        "kappa": g.eval(&x),
        "prox": prox,
        "gradient": gradient,
        "gradient_note": note,
    });
    write_json(&report, a.common.out.as_ref())
}

#[derive(Serialize)]
struct ContourRow {
    x1: f64,
    x2: f64,
    kappa: f64,
    moreau_envelope: f64,
    polar_envelope: f64,
}

pub fn contour(a: &ContourArgs) -> Result<(), CliError> {
    parse_overrides(&a.common.tol_override, &[])?;
    let alpha = positive("alpha", a.alpha)?;
    let g = GaugeDescriptor::from_json(&json_arg(&a.gauge)?)?.build()?;
    if g.dim() != 2 {
        return Err(CliError::Usage(format!("contour needs a 2-D gauge, got dim {}", g.dim())));
    }
    if a.lower.partial_cmp(&a.upper) != Some(std::cmp::Ordering::Less) || a.resolution < 2 {
        return Err(CliError::Usage("need lower < upper and resolution >= 2".into()));
    }
    let n = a.resolution;
    let coord = |k: usize| a.lower + (a.upper - a.lower) * k as f64 / (n - 1) as f64;
    let rows: Vec<Vec<ContourRow>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = Vector::from_vec(vec![coord(j), coord(i)]);
                    Ok(ContourRow {
                        x1: x[0],
                        x2: x[1],
                        kappa: g.eval(&x),
                        moreau_envelope: moreau_envelope(g.as_ref(), alpha, &x)?,
                        polar_envelope: polar_envelope(g.as_ref(), alpha, &x)?,
                    })
                })
                .collect::<polargauge::Result<Vec<_>>>()
        })
        .collect::<polargauge::Result<_>>()?;
    let rows: Vec<ContourRow> = rows.into_iter().flatten().collect();
    let out = crate::io::sink(a.common.out.as_ref())?;
    polargauge::trace::write_csv(&rows, out)?;
    Ok(())
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}

fn method_name(lagrange: bool) -> &'static str {
    if lagrange {
        "lagrange"
    } else {
        "gauge_dual"
    }
}

pub fn solve(a: &SolveArgs, lagrange_first: bool) -> Result<(), CliError> {
    let mut opts = SolverOptions::default();
    for (_, value) in parse_overrides(&a.common.tol_override, &["step_tol"])? {
        opts.step_tol = value;
    }
    if let Some(cap) = a.max_iter {
        opts.max_iter = cap;
    }
    if let Some(alpha) = a.alpha {
        positive("alpha", alpha)?;
    }
    let instance = ProblemInstance::from_json(&read(&a.instance)?)?;
    let problem = instance.to_problem(a.alpha)?;

    let mut order = vec![lagrange_first];
    if a.compare {
        order.push(!lagrange_first);
    }
    let mut reports: Vec<(bool, SolveReport)> = Vec::new();
    for lagrange in order {
        let rep = if lagrange {
            solve_lagrange_baseline(&problem, &opts)?
        } else {
            solve_gauge_dual(&problem, &opts)?
        };
        eprintln!(
            "{}: converged {} in {} iterations, duality product {}, feasibility residual {:.3e}",
            method_name(lagrange),
            rep.converged,
            rep.iterations,
            rep.duality_product.map_or("n/a".into(), |p| format!("{p:.12}")),
            rep.feasibility_residual
        );
        reports.push((lagrange, rep));
    }

    if let Some(path) = &a.trace {
        for (k, (lagrange, rep)) in reports.iter().enumerate() {
            let target = if k == 0 { path.clone() } else { suffixed(path, method_name(*lagrange)) };
            write_rows(&rep.trace.records, &target)?;
        }
    }
    let mut body = serde_json::Map::new();
    for (lagrange, rep) in &reports {
        body.insert(method_name(*lagrange).into(), serde_json::to_value(rep).map_err(std::io::Error::from)?);
    }
    write_json(&body, a.common.out.as_ref())?;

    let stalled: Vec<&str> = reports.iter().filter(|(_, r)| !r.converged).map(|(l, _)| method_name(*l)).collect();
    if stalled.is_empty() {
        Ok(())
    } else {
        Err(CliError::NonConvergence(format!("not converged: {}", stalled.join(", "))))
    }
}

fn start(run: &Perspective, seed: u64) -> Result<(SharedLifted, f64, Vector), CliError> {
    let alpha = positive("alpha", run.alpha)?;
    let lf = LiftedDescriptor::from_json(&json_arg(&run.function)?)?.build()?;
    let x0 = match &run.x0 {
        Some(text) => parse_vector(text)?,
        None => gaussian_vector(&mut ChaCha8Rng::seed_from_u64(seed), lf.dim()),
    };
    Ok((lf, alpha, x0))
}

fn finish(converged: bool, stalled: bool, trace: &[PerspectiveRecord], run: &Perspective) -> Result<(), CliError> {
    if let Some(path) = &run.trace {
        write_rows(trace, path)?;
    }
    if converged {
        Ok(())
    } else if stalled {
        Err(CliError::NonConvergence("steps stopped moving x before the stopping test was met".into()))
    } else {
        Err(CliError::NonConvergence("iteration cap reached before the stopping test".into()))
    }
}

pub fn p4a(a: &P4aArgs) -> Result<(), CliError> {
    let mut opts = P4AOptions::default();
    for (key, value) in parse_overrides(&a.common.tol_override, &["stop_tol", "monotone_slack"])? {
        match key.as_str() {
            "stop_tol" => opts.stop_tol = Some(value),
            _ => opts.monotone_slack = value,
        }
    }
    if let Some(cap) = a.run.max_iter {
        opts.max_iter = cap;
    }
    let (lf, alpha, x0) = start(&a.run, a.common.seed)?;
    let rep = run_p4a(&lf, alpha, &x0, &opts)?;
    write_json(&rep, a.common.out.as_ref())?;
    if !rep.monotone {
        if let Some(path) = &a.run.trace {
            write_rows(&rep.trace, path)?;
        }
        return Err(CliError::Invariant(format!("p increased by {:e} between iterates", rep.max_increase)));
    }
    finish(rep.converged, false, &rep.trace, &a.run)
}

pub fn ema(a: &EmaArgs) -> Result<(), CliError> {
    let mut opts = EmaOptions { sigma: a.sigma, betas: a.beta.clone(), ..EmaOptions::default() };
    for (_, value) in parse_overrides(&a.common.tol_override, &["stop_tol"])? {
        opts.stop_tol = Some(value);
    }
    if let Some(cap) = a.run.max_iter {
        opts.max_iter = cap;
    }
    let lo = opts.betas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = opts.betas.iter().copied().fold(0.0, f64::max);
    opts.beta_min = opts.beta_min.min(lo);
    opts.beta_max = opts.beta_max.max(hi);
    let (lf, alpha, x0) = start(&a.run, a.common.seed)?;
    let rep = run_ema(&lf, alpha, &x0, &opts)?;
    write_json(&rep, a.common.out.as_ref())?;
    finish(rep.converged, rep.stalled, &rep.trace, &a.run)
}

pub fn check(a: &CheckArgs) -> Result<(), CliError> {
    let suite = Suite::parse(&a.suite)?;
    let mut tol = Tolerances::default();
    for (key, value) in parse_overrides(&a.common.tol_override, &Tolerances::KEYS)? {
        tol.set(&key, value)?;
    }
    let report = run_suite(suite, a.common.seed, &tol);
    for item in &report.items {
        eprintln!(
            "{} {:?}/{}: {:.3e} (tol {:.1e}) {}",
            if item.passed { "PASS" } else { "FAIL" },
            item.suite,
            item.name,
            item.observed,
            item.tolerance,
            item.detail
        );
    }
    if let Some(path) = &a.common.out {
        write_json(&report, Some(path))?;
    }
    let failures: Vec<&str> = report.failures().map(|i| i.name.as_str()).collect();
    if failures.is_empty() {
        eprintln!("{} checks passed", report.items.len());
        Ok(())
    } else {
        Err(CliError::Invariant(format!("{} check(s) failed: {}", failures.len(), failures.join(", "))))
    }
}
