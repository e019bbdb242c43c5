use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use sl2h::*;

fn pair(l: i64, n: i64) -> TypePair {
    TypePair::new(l, n).unwrap()
}

fn rule() -> RadialRule {
    RadialRule::uniform(0.0, 5.0, 1.0, 32).unwrap()
}

/// Shared (2,2) engine; the kernel rows are cached inside it.
fn engine22() -> &'static SpectralEngine {
    static ENGINE: OnceLock<SpectralEngine> = OnceLock::new();
    ENGINE
        .get_or_init(|| SpectralEngine::calibrated(pair(2, 2), rule(), SpectralGrid::new(40.0, 2049).unwrap()).unwrap())
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_and_inverse_are_linear(
        are in -3.0..3.0f64, aim in -3.0..3.0f64, b in -3.0..3.0f64,
        w1 in 0.0..5.0f64, w2 in 0.0..5.0f64,
    ) {
        let e = engine22();
        let alpha = Complex64::new(are, aim);
        let f = RadialProfile::bump(pair(2, 2), rule(), 0.4, 2.2, w1, 1.0).unwrap();
        let g = RadialProfile::bump(pair(2, 2), rule(), 1.0, 3.5, w2, 1.0).unwrap();
        let combo: Vec<Complex64> = f.values().iter().zip(g.values()).map(|(x, y)| x * alpha + y * b).collect();
        let h = f.with_values(combo).unwrap();

        let (sf, sg, sh) = (e.forward(&f).unwrap(), e.forward(&g).unwrap(), e.forward(&h).unwrap());
        let want: Vec<Complex64> = sf.hat_h().iter().zip(sg.hat_h()).map(|(x, y)| x * alpha + y * b).collect();
        let scale = 1.0 + alpha.norm() * sf.sup_norm() + b.abs() * sg.sup_norm();
        prop_assert!(max_diff(sh.hat_h(), &want) <= 1e-12 * scale);
        let bw = sf.hat_b()[&1] * alpha + sg.hat_b()[&1] * b;
        prop_assert!((sh.hat_b()[&1] - bw).norm() <= 1e-12 * scale);

        let (uf, ug, uh) = (e.inverse(&sf).unwrap(), e.inverse(&sg).unwrap(), e.inverse(&sh).unwrap());
        let want: Vec<Complex64> = uf.values().iter().zip(ug.values()).map(|(x, y)| x * alpha + y * b).collect();
        prop_assert!(max_diff(uh.values(), &want) <= 1e-12 * scale);
    }
}

#[test]
fn real_trivial_type_profile_has_conjugate_symmetric_transform() {
    let grid = SpectralGrid::new(40.0, 2049).unwrap();
    let e = SpectralEngine::calibrated(pair(0, 0), rule(), grid.clone()).unwrap();
    let f = RadialProfile::from_fn(
        pair(0, 0),
        rule(),
        |t| Complex64::new(profile::bump(t, 0.3, 2.7) * (1.0 + t), 0.0),
        Some((0.3, 2.7)),
    )
    .unwrap();
    let s = e.forward(&f).unwrap();
    let h = s.hat_h();
    let last = h.len() - 1;
    let worst = (0..h.len())
        .map(|j| (h[j] - h[last - j].conj()).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10 * s.sup_norm(), "{worst:e}");
}

#[test]
fn discrete_coefficient_is_stable_under_radial_refinement() {
    let eta = EtaTable::for_pair(pair(2, 2)).unwrap();
    let coarse = RadialRule::uniform(0.0, 6.0, 1.0, 64).unwrap();
    let a = forward_discrete(
        &RadialProfile::bump(pair(2, 2), coarse.clone(), 0.5, 2.5, 1.0, 1.0).unwrap(),
        1,
        &eta,
    )
    .unwrap();
    let fine = coarse.refined();
    let b = forward_discrete(
        &RadialProfile::bump(pair(2, 2), fine, 0.5, 2.5, 1.0, 1.0).unwrap(),
        1,
        &eta,
    )
    .unwrap();
    assert!((a - b).norm() < 1e-6 * b.norm(), "{a} vs {b}");
}

#[test]
fn zero_profile_plancherel_is_all_zero() {
    let e = engine22();
    let r = e.plancherel_check(&RadialProfile::zero(pair(2, 2), rule())).unwrap();
    assert_eq!((r.lhs, r.rhs, r.rel_err), (0.0, 0.0, 0.0));
}

#[test]
fn spectral_json_roundtrip_is_exact() {
    let e = engine22();
    let f = RadialProfile::bump(pair(2, 2), rule(), 0.5, 2.5, 3.0, 1.0).unwrap();
    let s = e.forward(&f).unwrap();
    let text = serde_json::to_string(&s.to_json()).unwrap();
    let back = SpectralData::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, s);
}

#[test]
fn plancherel_at_moderate_resolution() {
    let e = engine22();
    let f = RadialProfile::bump(pair(2, 2), rule(), 0.5, 3.5, 0.0, 1.0).unwrap();
    let r = e.plancherel_check(&f).unwrap();
    assert!(r.rel_err < 1e-4, "{}", r.rel_err);
}

#[test]
fn unresolved_transform_is_reported_by_the_adaptive_path() {
    // A narrow, fast-oscillating bump cannot be resolved by the coarse radial rule.
    let f = RadialProfile::bump(pair(0, 0), rule(), 1.0, 1.2, 20.0, 1.0).unwrap();
    let out = forward_adaptive(&f, &SpectralGrid::new(20.0, 1025).unwrap(), &EtaTable::new(), 1e-10, 4).unwrap();
    assert!(!out.converged);
    assert!(out.data.grid().lambda_max() <= rule().max_resolved_frequency());
}
