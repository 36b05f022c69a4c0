use infppl::corpus::get;
use infppl::{
    estimate, importance, run_density, run_trials, ContinuousDist, EngineError, InfNum, Mode, Outcome, Program,
    RunOptions, Transform,
};

fn opts(threads: usize) -> RunOptions {
    RunOptions { threads: Some(threads), prune: false }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let p = get("bmi_m").unwrap().program().clone();
    let a = estimate(&p, Mode::Weighted, 20_000, 17, &opts(1)).unwrap();
    let b = estimate(&p, Mode::Weighted, 20_000, 17, &opts(8)).unwrap();
    let c = estimate(&p, Mode::Weighted, 20_000, 17, &RunOptions::default()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = estimate(&p, Mode::Weighted, 20_000, 18, &opts(1)).unwrap();
    assert_ne!(a.value, other.value);
}

#[test]
fn finite_and_eps_widths_share_draws() {
    let e = get("example2").unwrap();
    let at_eps = run_trials(e.program(), Mode::Weighted, 2000, 3, &opts(2)).unwrap();
    let at_w = run_trials(&e.at_width(InfNum::from_real(0.01)), Mode::Weighted, 2000, 3, &opts(5)).unwrap();
    for (a, b) in at_eps.iter().zip(&at_w) {
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}

#[test]
fn estimate_has_order_zero_and_tracks_dominant_trials() {
    let e = get("intro_m").unwrap();
    let records = run_trials(e.program(), Mode::Weighted, 50_000, 1, &opts(4)).unwrap();
    let est = importance(50_000, e.program(), 1).unwrap();
    assert_eq!(est.min_order, 0);
    assert!(records.iter().all(|r| r.weight.order() <= 1));
    let tails: Vec<f64> = records.iter().filter(|r| r.weight.order() == 0).map(|r| r.value).collect();
    assert_eq!(est.effective_trials as usize, tails.len());
    let mean = tails.iter().sum::<f64>() / tails.len() as f64;
    assert!((est.value - mean).abs() < 1e-12);
    assert!(est.std_error > 0.0 && est.std_error < 0.01);
}

#[test]
fn scaling_every_width_leaves_single_observe_programs_unchanged() {
    let e = get("example3").unwrap();
    let base = importance(30_000, e.program(), 5).unwrap();
    for factor in [1e-3, 0.5, 7.0, 1e4] {
        let scaled = importance(30_000, &e.at_width(InfNum::new(factor, 1)), 5).unwrap();
        assert!(((scaled.value - base.value) / base.value).abs() < 1e-12, "factor {factor}");
        assert_eq!(scaled.min_order, 1);
    }
}

#[test]
fn density_matches_weighted_for_one_unconditional_observe() {
    let e = get("example3").unwrap();
    let w = importance(30_000, e.program(), 6).unwrap();
    let d = run_density(30_000, e.program(), 6).unwrap();
    assert!(((w.value - d.value) / w.value).abs() < 1e-9);
}

#[test]
fn affine_reparameterisation_keeps_weights() {
    let t = Transform::affine(100.0, 0.0).unwrap();
    let base = ContinuousDist::normal(1.7, 0.5).unwrap();
    let lik = ContinuousDist::normal(2.0, 0.1).unwrap();
    let original = Program::new(InfNum::EPS, move |ctx, w| {
        let h = ctx.draw(&base);
        ctx.observe_at(&lik, h, w)?;
        Ok(h)
    });
    let t2 = t.clone();
    let moved = Program::new(InfNum::EPS, move |ctx, w| {
        let pushed_base = t2.push_dist(base)?;
        let pushed_lik = t2.push_dist(lik)?;
        let h = ctx.draw(&pushed_base);
        let interval = t2.push_interval(&infppl::Interval::new(t2.invert(h), w)?)?;
        ctx.observe(&pushed_lik, interval)?;
        Ok(h / 100.0)
    });
    let a = run_trials(&original, Mode::Weighted, 5000, 2, &opts(3)).unwrap();
    let b = run_trials(&moved, Mode::Weighted, 5000, 2, &opts(3)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.weight.order(), y.weight.order());
        assert!(((x.weight.coeff() - y.weight.coeff()) / x.weight.coeff()).abs() < 1e-9);
    }
}

/// Standard error of the difference of two independent estimates.
fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

#[test]
fn rejection_agrees_with_importance_at_finite_widths() {
    let cases: [(&str, f64); 6] = [
        ("two_dice", 0.0),
        ("dice_coin", 0.0),
        ("example1", 1.0),
        ("example2", 0.1),
        ("example3", 1.0),
        ("bmi_m", 1.0),
    ];
    for (name, width) in cases {
        let p = get(name).unwrap().at_width(InfNum::from_real(width));
        let imp = estimate(&p, Mode::Weighted, 100_000, 31, &RunOptions::default()).unwrap();
        let rej = estimate(&p, Mode::Rejection, 100_000, 31, &RunOptions::default()).unwrap();
        let gap = (imp.value - rej.value).abs();
        assert!(
            gap <= 3.0 * combined(imp.std_error, rej.std_error),
            "{name}: importance {} ± {}, rejection {} ± {}",
            imp.value,
            imp.std_error,
            rej.value,
            rej.std_error
        );
    }
}

#[test]
fn pruning_is_estimate_preserving() {
    let p = get("intro_m").unwrap().program().clone();
    let plain = estimate(&p, Mode::Weighted, 40_000, 2, &opts(4)).unwrap();
    let pruned = estimate(&p, Mode::Weighted, 40_000, 2, &RunOptions { threads: Some(4), prune: true }).unwrap();
    assert_eq!(plain, pruned);
    let records = run_trials(&p, Mode::Weighted, 40_000, 2, &RunOptions { threads: Some(1), prune: true }).unwrap();
    assert!(records.iter().any(|r| r.outcome == Outcome::Pruned));
}

#[test]
fn rejection_refuses_eps_corpus_programs() {
    let p = get("intro_m").unwrap().program().clone();
    assert!(matches!(
        estimate(&p, Mode::Rejection, 1000, 1, &RunOptions::default()),
        Err(EngineError::InfinitesimalUnderRejection(_))
    ));
}
