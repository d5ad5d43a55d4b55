use std::sync::Arc;

use polargauge::perspective::{
    projected_polar_envelope, run_ema, run_p4a, EmaOptions, P4AOptions, SharedLifted,
    ShiftedL1, SmoothedL1Halfplane,
};
use polargauge::trace::write_csv;
use polargauge::{GaugeError, Vector};

fn shifted(c: f64, n: usize) -> SharedLifted {
    Arc::new(ShiftedL1::new(c, n).unwrap())
}

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

#[test]
fn p4a_from_two_minus_one() {
    let lf = shifted(1.0, 2);
    let rep = run_p4a(&lf, 1.0, &v(&[2.0, -1.0]), &P4AOptions::default()).unwrap();
    assert!(rep.converged && rep.monotone);
    assert!(rep.trace.windows(2).all(|w| w[1].p_value <= w[0].p_value + 1e-12));
    assert_eq!(rep.candidate.unwrap(), Vector::zeros(2));
    assert!(rep.fixed_point_gap <= 10.0 * rep.stop_tol);
}

#[test]
fn scaled_minimizer_is_fixed_immediately() {
    // x* = 0, so τx* = 0 is already a minimizer of p
    let lf = shifted(1.0, 3);
    let rep = run_p4a(&lf, 1.0, &Vector::zeros(3), &P4AOptions::default()).unwrap();
    assert_eq!(rep.iterations, 1);
    assert_eq!(rep.trace[0].step_gap, 0.0);
    assert!((rep.lambda - 0.5).abs() <= 1e-14);
}

#[test]
fn ema_from_two_minus_one() {
    let lf = shifted(1.0, 2);
    let opts = EmaOptions::default();
    let rep = run_ema(&lf, 1.0, &v(&[2.0, -1.0]), &opts).unwrap();
    assert!(rep.converged);
    for s in &rep.steps {
        assert!(s.p_after <= s.armijo_bound(opts.sigma));
    }
    assert!(lf.base_eval(&rep.candidate.unwrap()) <= 1.0 + 1e-4);
}

#[test]
fn ema_accepts_tiny_steps_without_backtracking() {
    let lf = shifted(1.0, 2);
    let opts = EmaOptions {
        betas: vec![1e-6],
        beta_min: 1e-6,
        max_iter: 5,
        ..EmaOptions::default()
    };
    let rep = run_ema(&lf, 1.0, &v(&[2.0, -1.0]), &opts).unwrap();
    assert_eq!(rep.steps.len(), 5);
    assert!(rep.steps.iter().all(|s| s.halvings == 0));
    assert!(!rep.converged);
}

#[test]
fn ema_rejects_bad_sigma() {
    let lf = shifted(1.0, 2);
    let opts = EmaOptions { sigma: 1.5, ..EmaOptions::default() };
    let err = run_ema(&lf, 1.0, &v(&[2.0, -1.0]), &opts).unwrap_err();
    assert!(matches!(err, GaugeError::InvalidInput(_)));
}

#[test]
fn halfplane_instance_recovers_known_minimizer() {
    let lf: SharedLifted = Arc::new(SmoothedL1Halfplane::new(0.5).unwrap());
    for alpha in [1.0, 0.1] {
        let rep = run_p4a(&lf, alpha, &v(&[3.0, -2.0]), &P4AOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.max_increase <= 1e-12 * (1.0 + rep.trace[0].p_value));
        let cand = rep.candidate.unwrap();
        assert!(lf.base_eval(&cand) <= 1.5f64.sqrt() + 1e-4);
        assert!((rep.lambda - 1.0 / (1.0 + alpha * 1.5f64.sqrt())).abs() <= 1e-6);
    }
}

#[test]
fn envelope_value_at_origin_balances_shift() {
    for (c, alpha) in [(1.0, 1.0), (3.0, 0.2), (0.5, 2.0)] {
        let env = projected_polar_envelope(&shifted(c, 4), alpha, &Vector::zeros(4)).unwrap();
        assert!((env.value - c / (1.0 + alpha * c)).abs() <= 1e-14);
        assert!((env.lambda_bar - 1.0 / (1.0 + alpha * c)).abs() <= 1e-14);
    }
}

#[test]
fn trace_csv_columns() {
    let lf = shifted(1.0, 2);
    let rep = run_p4a(&lf, 1.0, &v(&[2.0, -1.0]), &P4AOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_csv(&rep.trace, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("iter,p_value,step_gap,lambda\n"));
    assert_eq!(text.lines().count(), rep.trace.len() + 1);
}

#[test]
fn ema_stops_when_steps_underflow() {
    let lf: SharedLifted = Arc::new(SmoothedL1Halfplane::new(0.5).unwrap());
    let rep = run_ema(&lf, 0.1, &v(&[3.0, -2.0]), &EmaOptions::default()).unwrap();
    assert!(rep.converged || rep.stalled);
    assert!(rep.iterations < 1000);
    assert!(lf.base_eval(&rep.candidate.unwrap()) <= 1.5f64.sqrt() + 1e-4);
}
