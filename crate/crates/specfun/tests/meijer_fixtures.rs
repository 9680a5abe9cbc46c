use std::time::Instant;

use specfun::fixtures::{self, MeijerFixture};
use specfun::{lower_incomplete_gamma, meijer_g, meijer_g_residue_tail, MeijerGSpec};

fn load() -> Vec<MeijerFixture> {
    fixtures::parse(fixtures::REFERENCE).unwrap()
}

#[test]
fn fixtures_match_reference() {
    let cases = load();
    assert!(cases.len() >= 20);
    assert!(cases.iter().any(|c| (c.spec.m(), c.spec.n(), c.spec.p(), c.spec.q()) == (1, 6, 6, 3)));
    assert!(cases.iter().any(|c| (c.spec.m(), c.spec.n(), c.spec.p(), c.spec.q()) == (1, 3, 3, 2)));
    assert!(cases.iter().any(|c| (c.spec.m(), c.spec.n(), c.spec.p(), c.spec.q()) == (2, 4, 4, 4)));
    let start = Instant::now();
    let mut failures = Vec::new();
    for c in &cases {
        let got = meijer_g(&c.spec, c.z).unwrap();
        let rel = ((got - c.expected) / c.expected).abs();
        if rel > c.rel_tol {
            failures.push(format!("line {}: got {got:e}, expected {:e}, rel {rel:e}", c.line, c.expected));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn reflected_evaluation_agrees() {
    for c in load() {
        let direct = meijer_g(&c.spec, c.z).unwrap();
        let flipped = meijer_g(&c.spec.reflected(), 1.0 / c.z).unwrap();
        assert!(((direct - flipped) / direct).abs() <= 1e-7, "line {}: {direct:e} vs {flipped:e}", c.line);
    }
}

#[test]
fn incomplete_gamma_grid() {
    let start = Instant::now();
    for &a in &[0.5, 1.0, 2.5] {
        for &z in &[0.1, 1.0, 10.0] {
            let spec = MeijerGSpec::new(1, 1, &[1.0], &[a, 0.0]).unwrap();
            let g = meijer_g(&spec, z).unwrap();
            let reference = lower_incomplete_gamma(a, z).unwrap();
            assert!(((g - reference) / reference).abs() <= 1e-8);
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn cdf_kernel_is_monotone() {
    for k in [0usize, 1, 4, 17] {
        let spec = MeijerGSpec::new(1, 1, &[1.0], &[(1.0 + k as f64) / 2.0, 0.0]).unwrap();
        let mut last = 0.0;
        for i in 1..60 {
            let v = meijer_g(&spec, 0.05 * i as f64 * i as f64).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}

fn sop_kernel(r: usize, k: usize, s: usize) -> MeijerGSpec {
    let delta = |n: usize, a: f64| (0..n).map(|i| (a + i as f64) / n as f64).collect::<Vec<_>>();
    let mut a = delta(r, 1.0);
    a.extend(delta(2, 1.0 - s as f64));
    let mut b = delta(r, (1.0 + k as f64) / 2.0);
    b.extend(delta(r, 0.0));
    MeijerGSpec::new(r, r + 2, &a, &b).unwrap()
}

#[test]
fn residue_tail_leading_behaviour() {
    for (r, k) in [(1usize, 0usize), (1, 3), (2, 0), (2, 2), (2, 4)] {
        let spec = sop_kernel(r, k, 3);
        let z = 1e-12;
        let tail = meijer_g_residue_tail(&spec, z).unwrap();
        assert!(!tail.regularized, "r={r} k={k}");
        let full = meijer_g(&spec, z).unwrap();
        assert!(((tail.value - full) / full).abs() <= 1e-5, "r={r} k={k}: {} vs {full}", tail.value);
    }
    let tail = meijer_g_residue_tail(&sop_kernel(2, 1, 3), 1e-3).unwrap();
    assert!(tail.regularized);
    assert!(tail.value.is_finite());
}
