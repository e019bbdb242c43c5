use num_complex::Complex64;
use proptest::prelude::*;
use sl2h::profile::bump;
use sl2h::*;

fn samples(rule: &RadialRule, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    rule.nodes().iter().map(|&t| f(t)).collect()
}

proptest! {
    #[test]
    fn radial_integration_is_linear(
        alpha in -10.0..10.0f64,
        beta in -10.0..10.0f64,
        w1 in 0.0..8.0f64,
        w2 in 0.0..8.0f64,
    ) {
        let rule = RadialRule::uniform(0.0, 4.0, 1.0, 24).unwrap();
        let f = samples(&rule, |t| Complex64::from_polar(bump(t, 0.3, 2.0), w1 * t));
        let g = samples(&rule, |t| Complex64::from_polar((-t).exp(), -w2 * t));
        let combo: Vec<Complex64> = f.iter().zip(&g).map(|(a, b)| a * alpha + b * beta).collect();
        let lhs = integrate_radial(&combo, &rule).unwrap();
        let (i_f, i_g) = (integrate_radial(&f, &rule).unwrap(), integrate_radial(&g, &rule).unwrap());
        let rhs = i_f * alpha + i_g * beta;
        let scale = alpha.abs() * i_f.norm() + beta.abs() * i_g.norm() + 1.0;
        prop_assert!((lhs - rhs).norm() <= 1e-14 * scale);
    }

    #[test]
    fn periodic_rule_is_exact_for_low_characters(k in -6i64..=6, refine in 0usize..3) {
        let mut rule = PeriodicRule::new(16).unwrap();
        for _ in 0..refine {
            rule = rule.refined();
        }
        let v = integrate_periodic(|th| Complex64::from_polar(1.0, k as f64 * th), &rule).unwrap();
        let want = if k == 0 { 1.0 } else { 0.0 };
        prop_assert!((v - want).norm() < 1e-14);
    }
}

/// Bumps are flat but not analytic at their support edges, so Gauss–Legendre
/// converges sub-exponentially; refinement must still shrink the change.
#[test]
fn refinement_converges_for_bump_integrands() {
    for (t0, t1, omega) in [(0.2, 1.0, 0.0), (0.5, 2.5, 5.0), (1.0, 3.5, 12.0)] {
        let f = |t: f64| Complex64::from_polar(bump(t, t0, t1), omega * t);
        let mut rule = RadialRule::uniform(0.0, 4.0, 1.0, 32).unwrap();
        let mut values = Vec::new();
        for _ in 0..4 {
            values.push(integrate_radial(&samples(&rule, f), &rule).unwrap());
            rule = rule.refined();
        }
        let changes: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm() / w[1].norm()).collect();
        assert!(
            changes.windows(2).all(|c| c[1] < 0.1 * c[0] || c[1] < 1e-14),
            "({t0},{t1},{omega}): {changes:?}"
        );
        assert!(changes[2] < 1e-8, "({t0},{t1},{omega}): {changes:?}");
    }
}
