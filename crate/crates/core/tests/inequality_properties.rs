use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use sl2h::inequality::{paley_weight_norm, Check, Weight};
use sl2h::*;

fn pair(l: i64, n: i64) -> TypePair {
    TypePair::new(l, n).unwrap()
}

fn res() -> Resolution {
    Resolution::default()
}

fn engine(l: i64, n: i64) -> &'static SpectralEngine {
    static E00: OnceLock<SpectralEngine> = OnceLock::new();
    static E44: OnceLock<SpectralEngine> = OnceLock::new();
    let cell = if l == 0 { &E00 } else { &E44 };
    cell.get_or_init(|| SpectralEngine::calibrated(pair(l, n), res().rule, res().grid).unwrap())
}

fn member(l: i64, n: i64, k: usize) -> RadialProfile {
    TestFamily::default_for(pair(l, n), TestFamily::DEFAULT_SEED).members[k]
        .profile(pair(l, n), &res().rule)
        .unwrap()
}

fn rational() -> MultiplierSymbol {
    MultiplierSymbol::new(
        "rational",
        |l| Complex64::new(1.0 / (1.0 + l * l), 0.0),
        |k| Ok(Complex64::new(1.0 / (1.0 + (k * k) as f64), 0.0)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ratios_are_scale_invariant(re in -50.0..50.0f64, im in -50.0..50.0f64, k in 0usize..20, four in proptest::bool::ANY) {
        prop_assume!(re.hypot(im) > 1e-3);
        let c = Complex64::new(re, im);
        let (l, n) = if four { (4, 4) } else { (0, 0) };
        let e = engine(l, n);
        let f = member(l, n, k);
        let g = f.scaled(c);
        let psi = PsiWeight::Rational(1.0);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs();
        prop_assert!(close(hausdorff_young_check(e, &f, 1.5).unwrap().ratio, hausdorff_young_check(e, &g, 1.5).unwrap().ratio));
        prop_assert!(close(paley_check(e, &f, &psi, 1.5).unwrap().ratio, paley_check(e, &g, &psi, 1.5).unwrap().ratio));
        prop_assert!(close(hyp_check(e, &f, &psi, 1.5, 2.25).unwrap().ratio, hyp_check(e, &g, &psi, 1.5, 2.25).unwrap().ratio));
        let (sf, sg) = (e.forward(&f).unwrap(), e.forward(&g).unwrap());
        prop_assert!(close(
            dual_hausdorff_young_check(e, &sf, 1.25).unwrap().ratio,
            dual_hausdorff_young_check(e, &sg, 1.25).unwrap().ratio
        ));
    }
}

/// `(1 + λ²)^{−1} + (1 + λ²)^{−2}`, pointwise above `rational:1`.
struct Bumped;

impl Weight for Bumped {
    fn at(&self, lambda: f64) -> f64 {
        let r = 1.0 / (1.0 + lambda * lambda);
        r + r * r
    }
}

#[test]
fn larger_weight_never_lowers_the_right_hand_side() {
    let grid = res().grid;
    let psi = PsiWeight::Rational(1.0);
    for (l, n) in [(0, 0), (4, 4)] {
        let e = engine(l, n);
        let f = member(l, n, 3);
        let base_norm = paley_weight_norm(&psi, pair(l, n), &grid).unwrap();
        for p in [1.25, 1.5, 1.9] {
            let base = paley_check(e, &f, &psi, p).unwrap();
            let larger = [
                paley_check(e, &f, &Bumped, p).unwrap(),
                paley_check(e, &f, &psi.scaled(2.0), p).unwrap(),
            ];
            for big in larger {
                assert!(big.rhs >= base.rhs * (1.0 - 1e-12), "{big:?} vs {base:?} at p = {p}");
            }
            let hyp = hyp_check(e, &f, &psi, p, 0.5 * (p + p / (p - 1.0))).unwrap();
            let hyp_big = hyp_check(e, &f, &psi.scaled(3.0), p, 0.5 * (p + p / (p - 1.0))).unwrap();
            assert!(hyp_big.rhs >= hyp.rhs * (1.0 - 1e-12));
        }
        assert!(paley_weight_norm(&psi.scaled(2.0), pair(l, n), &grid).unwrap() >= base_norm);
    }
}

#[test]
fn endpoint_ratios_are_bounded_by_one() {
    // sup|f̂| ≤ ‖f‖₁ and ‖f‖_∞ ≤ ∫|f̂| dν̃, up to quadrature error.
    let e = engine(0, 0);
    for k in [0, 5, 9, 15] {
        let f = member(0, 0, k);
        assert!(hausdorff_young_check(e, &f, 1.0).unwrap().ratio <= 1.0 + 1e-6);
        let s = e.forward(&f).unwrap();
        assert!(dual_hausdorff_young_check(e, &s, 1.0).unwrap().ratio <= 1.0 + 1e-6);
    }
}

#[test]
fn paley_and_interior_hyp_are_stable_under_refinement() {
    let fam = TestFamily::default_for(pair(0, 0), TestFamily::DEFAULT_SEED);
    let psi = PsiWeight::Rational(1.0);
    let paley = run_family(Check::Paley { p: 1.5, psi }, &fam, &res()).unwrap();
    assert!(
        paley.max_ratio.is_finite() && paley.refinement_delta < 0.01,
        "{paley:?}"
    );
    let hyp = run_family(Check::Hyp { p: 1.5, b: 2.25, psi }, &fam, &res()).unwrap();
    assert!(hyp.max_ratio.is_finite() && hyp.refinement_delta < 0.01, "{hyp:?}");
    // The interior exponent sits between the two endpoint scales.
    let hy = run_family(Check::Hy { p: 1.5 }, &fam, &res()).unwrap();
    let lo = paley.max_ratio.min(hy.max_ratio);
    let hi = paley.max_ratio.max(hy.max_ratio);
    assert!(hyp.max_ratio > 0.1 * lo && hyp.max_ratio < 10.0 * hi);
}

#[test]
fn identity_lower_bound_reaches_one_at_p_two() {
    let fam = TestFamily::new(
        pair(0, 0),
        vec![BumpSpec {
            t0: 0.5,
            t1: 2.5,
            omega: 0.0,
            amplitude: 1.0,
        }],
    )
    .unwrap();
    let reference = Resolution::new(res().rule, SpectralGrid::new(120.0, 8193).unwrap());
    let one = MultiplierSymbol::constant(Complex64::new(1.0, 0.0));
    let lb = operator_norm_lower_bound(&one, 2.0, 2.0, &fam, &reference).unwrap();
    assert!(lb >= 1.0 - 1e-4, "{lb}");
}

#[test]
fn fitted_constant_is_stable_across_two_refinements() {
    // Start coarse: T_m smooths, so the ratio is insensitive to the spectral tail.
    let base = Resolution::new(
        RadialRule::uniform(0.0, 6.0, 1.0, 32).unwrap(),
        SpectralGrid::new(30.0, 2049).unwrap(),
    );
    let fam = TestFamily::default_for(pair(0, 0), TestFamily::DEFAULT_SEED);
    let m = rational();
    let mut fits = Vec::new();
    let mut r = base;
    for _ in 0..3 {
        let lower = operator_norm_lower_bound(&m, 2.0, 4.0, &fam, &r).unwrap();
        let upper = multiplier_norm_bound(&m, 2.0, 4.0, pair(0, 0), &r.grid).unwrap().bound;
        fits.push(lower / upper);
        r = r.refined();
    }
    assert!(fits.iter().all(|c| c.is_finite() && *c > 0.0));
    for w in fits.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.01 * w[0], "{fits:?}");
    }
}
