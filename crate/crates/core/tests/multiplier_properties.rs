use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use sl2h::*;

fn pair(l: i64, n: i64) -> TypePair {
    TypePair::new(l, n).unwrap()
}

fn rule() -> RadialRule {
    RadialRule::uniform(0.0, 6.0, 1.0, 64).unwrap()
}

/// At the reference resolution, where the roundtrip tolerance is 1e-4.
fn engine44() -> &'static SpectralEngine {
    static ENGINE: OnceLock<SpectralEngine> = OnceLock::new();
    ENGINE.get_or_init(|| {
        SpectralEngine::calibrated(pair(4, 4), rule(), SpectralGrid::new(120.0, 8193).unwrap()).unwrap()
    })
}

fn bump44() -> RadialProfile {
    RadialProfile::bump(pair(4, 4), rule(), 0.5, 2.5, 1.0, 1.0).unwrap()
}

fn sup_rel(a: &RadialProfile, b: &RadialProfile) -> f64 {
    let scale = b.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let err = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    err / scale
}

fn rational() -> MultiplierSymbol {
    MultiplierSymbol::new(
        "rational",
        |l| Complex64::new(1.0 / (1.0 + l * l), 0.0),
        |k| Ok(Complex64::new(1.0 / (1.0 + (k * k) as f64), 0.0)),
    )
}

#[test]
fn identity_and_zero_symbols() {
    let e = engine44();
    let f = bump44();
    let same = e
        .apply(&MultiplierSymbol::constant(Complex64::new(1.0, 0.0)), &f)
        .unwrap();
    assert!(sup_rel(&same, &f) < 1e-4);
    let zero = e
        .apply(&MultiplierSymbol::constant(Complex64::new(0.0, 0.0)), &f)
        .unwrap();
    assert!(zero.values().iter().all(|v| v.norm() == 0.0));
    let one = e.apply_spectral(&SpectralFunction::constant(1.0), &f).unwrap();
    assert!(sup_rel(&one, &f) < 1e-4);
    let sob = e.sobolev(0.0, &f).unwrap();
    assert!(sup_rel(&sob, &f) < 1e-4);
}

#[test]
fn short_heat_time_is_close_to_identity() {
    let e = engine44();
    let f = bump44();
    let out = e.heat(1e-6, &f).unwrap();
    assert!(sup_rel(&out, &f) < 1e-3);
}

#[test]
fn spectral_composition_is_exact_before_inversion() {
    let e = engine44();
    let s = e.forward(&bump44()).unwrap();
    let lin = SpectralFunction::power(1.0).to_symbol();
    let one = SpectralFunction::constant(1.0).to_symbol();
    let twice = s
        .map(|l| lin.at_lambda(l), |k| lin.at_discrete(k))
        .unwrap()
        .map(|l| one.at_lambda(l), |k| one.at_discrete(k))
        .unwrap();
    let once = s.map(|l| lin.at_lambda(l), |k| lin.at_discrete(k)).unwrap();
    assert_eq!(twice, once);
    let prod = lin.product(&rational());
    let chained = s
        .map(|l| rational().at_lambda(l), |k| rational().at_discrete(k))
        .unwrap()
        .map(|l| lin.at_lambda(l), |k| lin.at_discrete(k))
        .unwrap();
    let direct = s.map(|l| prod.at_lambda(l), |k| prod.at_discrete(k)).unwrap();
    for (a, b) in chained.hat_h().iter().zip(direct.hat_h()) {
        assert!((a - b).norm() <= 1e-15 * a.norm().max(1e-300));
    }
}

#[test]
fn heat_grows_at_the_third_discrete_point() {
    let sym = SpectralFunction::heat(0.7).to_symbol();
    let v = sym.at_discrete(3).unwrap();
    assert!((v.re - (1.4f64).exp()).abs() < 1e-13 * (1.4f64).exp());
}

#[test]
fn sobolev_rejects_fractional_power_at_negative_base() {
    let e = engine44();
    let err = e.sobolev(0.5, &bump44()).unwrap_err();
    assert!(err.to_string().contains('3'), "{err}");
    assert!(e.sobolev(-1.0, &bump44()).is_ok());
}

#[test]
fn multiplier_bound_is_stable_under_refinement() {
    let grid = SpectralGrid::default();
    let base = multiplier_norm_bound(&rational(), 2.0, 4.0, pair(0, 0), &grid)
        .unwrap()
        .bound;
    for finer in [grid.extended(), grid.densified(), grid.extended().densified()] {
        let b = multiplier_norm_bound(&rational(), 2.0, 4.0, pair(0, 0), &finer)
            .unwrap()
            .bound;
        assert!(base.is_finite() && (b - base).abs() < 0.01 * base, "{base} vs {b}");
    }
}

#[test]
fn heat_bound_with_discrete_spectrum_grows_like_the_third_point() {
    // r = 1/4: the m = 3 term is e^{2t} 3^{1/4} and dominates for large t.
    for t in [5.0, 10.0, 20.0] {
        let b = heat_bound(t, 2.0, 4.0, pair(4, 4)).unwrap().bound;
        let lead = (2.0 * t).exp() * 3f64.powf(0.25);
        assert!((b / lead - 1.0).abs() < 1e-3, "t = {t}: {b} vs {lead}");
    }
}

#[test]
fn spectral_bound_with_zero_exponent_is_sup_plus_discrete_sum() {
    let phi = SpectralFunction::heat(0.5);
    let b = spectral_norm_bound(&phi, 2.0, 2.0, pair(2, 2)).unwrap().bound;
    // sup over s ≥ 1/4 of e^{−s/2} plus the m = 1 term e^{0}.
    let want = (-0.125f64).exp() + 1.0;
    assert!((b - want).abs() < 1e-10, "{b} vs {want}");
}

proptest! {
    #[test]
    fn heat_bound_is_nonincreasing_on_short_times(t in 1e-4..0.99f64, dt in 1e-4..0.01f64, p in 1.1..2.0f64, q in 2.0..6.0f64) {
        let s = (t + dt).min(1.0);
        let a = heat_bound(t, p, q, pair(0, 0)).unwrap().bound;
        let b = heat_bound(s, p, q, pair(0, 0)).unwrap().bound;
        prop_assert!(b <= a * (1.0 + 1e-14));
    }

    #[test]
    fn multiplier_bound_is_homogeneous(c in 1e-3..1e3f64) {
        let grid = SpectralGrid::new(40.0, 2049).unwrap();
        let base = multiplier_norm_bound(&rational(), 1.5, 3.0, pair(4, 4), &grid).unwrap().bound;
        let scaled = multiplier_norm_bound(&rational().scaled(c), 1.5, 3.0, pair(4, 4), &grid).unwrap().bound;
        prop_assert!((scaled - c * base).abs() <= 1e-10 * c * base);
    }

    #[test]
    fn closed_form_supremum_matches_numerical_maximum(t in 0.01..10.0f64, alpha in 0.5..4.0f64, r in 0.25..2.0f64) {
        let closed = gaussian_power_sup(t, alpha, r);
        let numeric = multiplier::log_sup(|x| Ok((-t * x * x).exp() * x.powf(alpha / r)), 1e-6, 1e4).unwrap();
        prop_assert!((numeric - closed).abs() <= 1e-8 * closed);
    }
}
