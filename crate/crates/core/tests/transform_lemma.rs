use infppl::{prob, Continuous, ContinuousDist, InfNum, Interval, RealInterval, Sampler, Transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sigmoid() -> Transform {
    Transform::custom(
        "sigmoid",
        |x: f64| 1.0 / (1.0 + (-x).exp()),
        |x: f64| {
            let e = (-x.abs()).exp();
            e / ((1.0 + e) * (1.0 + e))
        },
        |y: f64| (y / (1.0 - y)).ln(),
        |y: f64| 1.0 / (y * (1.0 - y)),
        RealInterval::REAL_LINE,
        RealInterval::open(0.0, 1.0),
    )
    .unwrap()
}

fn real_line_transforms() -> Vec<Transform> {
    let affine_cm = Transform::affine(100.0, 0.0).unwrap();
    let affine_odd = Transform::affine(0.37, -4.0).unwrap();
    vec![
        affine_cm.clone(),
        affine_odd.clone(),
        Transform::exp(),
        sigmoid(),
        Transform::compose(&Transform::exp(), &affine_odd).unwrap(),
        Transform::compose(&affine_cm, &Transform::exp()).unwrap(),
        Transform::compose(&Transform::log(), &Transform::exp()).unwrap(),
    ]
}

fn positive_transforms() -> Vec<Transform> {
    vec![
        Transform::log(),
        Transform::compose(&Transform::affine(2.5, 1.0).unwrap(), &Transform::log()).unwrap(),
    ]
}

fn real_line_dists() -> Vec<ContinuousDist> {
    vec![
        ContinuousDist::normal(1.7, 0.5).unwrap(),
        ContinuousDist::normal(-1.0, 2.0).unwrap(),
        ContinuousDist::cauchy(0.0, 1.0).unwrap(),
        ContinuousDist::uniform(-2.0, 1.0).unwrap(),
        ContinuousDist::beta(2.0, 3.0).unwrap(),
    ]
}

fn positive_dists() -> Vec<ContinuousDist> {
    vec![
        ContinuousDist::log_normal(0.5, 0.7).unwrap(),
        ContinuousDist::uniform(0.5, 3.0).unwrap(),
    ]
}

fn random_interval(d: &ContinuousDist, rng: &mut ChaCha8Rng, infinitesimal: bool) -> Interval {
    let mid = d.sample(rng);
    if infinitesimal {
        let order = rng.random_range(1..=2);
        Interval::new(mid, InfNum::new(rng.random_range(0.1..5.0), order)).unwrap()
    } else {
        let width = rng.random_range(0.01..1.0) * mid.abs().max(0.5);
        Interval::finite(mid, width).unwrap()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn interval_probability_is_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut cases = 0;
    while cases < 200 {
        let positive = rng.random_bool(0.3);
        let (ts, ds) = if positive {
            (positive_transforms(), positive_dists())
        } else {
            (real_line_transforms(), real_line_dists())
        };
        let t = &ts[rng.random_range(0..ts.len())];
        let d = ds[rng.random_range(0..ds.len())];
        let infinitesimal = cases % 2 == 0;
        let i = random_interval(&d, &mut rng, infinitesimal);
        let (lo, hi) = i.bounds();
        if !infinitesimal && !(t.domain().contains(lo) && t.domain().contains(hi)) {
            continue;
        }
        let td = t.push_dist(d).unwrap();
        let ti = t.push_interval(&i).unwrap();
        let before = prob(&d, &i).unwrap();
        let after = prob(&td, &ti).unwrap();
        assert_eq!(before.order(), after.order(), "{t:?} {d:?} {i}");
        assert!(rel(before.coeff(), after.coeff()) < 1e-9, "{t:?} {d:?} {i}: {before} vs {after}");
        cases += 1;
    }
}

#[test]
fn transform_tuples_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let all: Vec<(Transform, f64, f64)> = real_line_transforms()
        .into_iter()
        .map(|t| (t, -3.0, 3.0))
        .chain(positive_transforms().into_iter().map(|t| (t, 0.05, 20.0)))
        .collect();
    for (t, lo, hi) in &all {
        for _ in 0..100 {
            let x: f64 = rng.random_range(*lo..*hi);
            let h = 1e-5 * x.abs().max(1.0);
            let numeric = (t.apply(x + h) - t.apply(x - h)) / (2.0 * h);
            assert!(rel(numeric, t.deriv(x)) < 1e-5, "{} at {x}", t.name());
            assert!((t.invert(t.apply(x)) - x).abs() < 1e-9, "{} at {x}", t.name());
            let y = t.apply(x);
            assert!(rel(t.inv_deriv(y), 1.0 / t.deriv(t.invert(y))) < 1e-6, "{} at {x}", t.name());
        }
    }
}

#[test]
fn small_finite_widths_approach_the_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in real_line_transforms() {
        for _ in 0..20 {
            let mid: f64 = rng.random_range(-3.0..3.0);
            let w = 1e-6;
            let image = t.push_interval(&Interval::finite(mid, w).unwrap()).unwrap();
            assert!(rel(image.width().coeff() / w, t.deriv(mid)) < 1e-3, "{} at {mid}", t.name());
        }
    }
}

#[test]
fn exp_of_normal_is_log_normal() {
    let td = Transform::exp().push_dist(ContinuousDist::normal(10.0, 5.0).unwrap()).unwrap();
    let ln = ContinuousDist::log_normal(10.0, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let y = ln.sample(&mut rng);
        assert!((td.cdf(y) - ln.cdf(y)).abs() < 1e-9);
        assert!(rel(td.pdf(y), ln.pdf(y)) < 1e-9);
    }
    let median = Transform::exp().push_dist(ContinuousDist::normal(0.0, 1.0).unwrap()).unwrap();
    assert!((median.cdf(1.0) - 0.5).abs() < 1e-15);
}

#[test]
fn centimetre_normal() {
    let td = Transform::affine(100.0, 0.0)
        .unwrap()
        .push_dist(ContinuousDist::normal(1.7, 0.5).unwrap())
        .unwrap();
    let cm = ContinuousDist::normal(170.0, 50.0).unwrap();
    for k in -40..=40 {
        let y = 170.0 + 5.0 * k as f64;
        assert!((td.cdf(y) - cm.cdf(y)).abs() < 1e-9);
    }
}
