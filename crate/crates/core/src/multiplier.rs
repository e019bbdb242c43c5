//! Fourier and spectral multipliers and the bound functionals for their
//! `L^p → L^q` norms.
//!
//! A Fourier multiplier with symbol `m` acts by `T_m f = inverse(m · forward f)`.
//! A spectral multiplier `φ(Ω)` is the Fourier multiplier with symbol
//! `φ((1 + ζ²)/4)`: `φ((1 + λ²)/4)` on the principal series and
//! `φ((1 − m²)/4)` at the discrete parameter `ζ = i·m`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::SpectralGrid;
use crate::profile::RadialProfile;
use crate::spectrum::{gamma_of, weak_type_functional, ParityClass, TypePair};
use crate::transform::SpectralEngine;

type ContinuousRule = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
type DiscreteRule = Arc<dyn Fn(i64) -> Result<Complex64> + Send + Sync>;
type ScalarRule = Arc<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;

/// A function on `ℝ ∪ iΓ`.
#[derive(Clone)]
pub struct MultiplierSymbol {
    name: String,
    continuous: ContinuousRule,
    discrete: DiscreteRule,
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSymbol").field("name", &self.name).finish()
    }
}

impl MultiplierSymbol {
    pub fn new<C, D>(name: impl Into<String>, continuous: C, discrete: D) -> Self
    where
        C: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(i64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            continuous: Arc::new(continuous),
            discrete: Arc::new(discrete),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("const:{c}"), move |_| c, move |_| Ok(c))
    }

    /// Real rule on `ℝ` with explicit values at discrete points; points
    /// missing from `values` are an error when queried.
    pub fn with_values<C>(name: impl Into<String>, continuous: C, values: Vec<(i64, Complex64)>) -> Self
    where
        C: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let name = name.into();
        let label = name.clone();
        Self::new(name, continuous, move |m| {
            values
                .iter()
                .find(|(k, _)| *k == m)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::invalid(format!("symbol '{label}' has no value at discrete point {m}")))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn at_lambda(&self, lambda: f64) -> Complex64 {
        (self.continuous)(lambda)
    }

    pub fn at_discrete(&self, m: i64) -> Result<Complex64> {
        (self.discrete)(m)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let (a, b) = (self.continuous.clone(), self.discrete.clone());
        Self::new(format!("{c}*{}", self.name), move |l| a(l) * c, move |m| Ok(b(m)? * c))
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        let (a1, b1) = (self.continuous.clone(), self.discrete.clone());
        let (a2, b2) = (other.continuous.clone(), other.discrete.clone());
        Self::new(
            format!("{}*{}", self.name, other.name),
            move |l| a1(l) * a2(l),
            move |m| Ok(b1(m)? * b2(m)?),
        )
    }
}

/// A function `s ↦ φ(s)` of the Casimir spectral value.
#[derive(Clone)]
pub struct SpectralFunction {
    name: String,
    rule: ScalarRule,
    monotone: bool,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("name", &self.name)
            .field("monotone", &self.monotone)
            .finish()
    }
}

impl SpectralFunction {
    /// `monotone` asserts that `|φ|` is non-increasing on `[1/4, ∞)` with limit 0.
    pub fn new<F>(name: impl Into<String>, rule: F, monotone: bool) -> Self
    where
        F: Fn(f64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            rule: Arc::new(rule),
            monotone,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:{c}"), move |_| Ok(Complex64::new(c, 0.0)), c == 0.0)
    }

    /// `e^{-ts}`.
    pub fn heat(t: f64) -> Self {
        Self::new(
            format!("heat:{t}"),
            move |s| Ok(Complex64::new((-t * s).exp(), 0.0)),
            t > 0.0,
        )
    }

    /// `s^a`, with `0^a` rejected for `a < 0` and negative bases rejected for non-integer `a`.
    pub fn power(a: f64) -> Self {
        Self::new(format!("power:{a}"), move |s| real_power(s, a), a < 0.0)
    }

    /// `(1 + s)^a`.
    pub fn sobolev(a: f64) -> Self {
        Self::new(format!("sobolev:{a}"), move |s| real_power(1.0 + s, a), a < 0.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn eval(&self, s: f64) -> Result<Complex64> {
        (self.rule)(s)
    }

    /// The Fourier multiplier `ζ ↦ φ((1 + ζ²)/4)`.
    pub fn to_symbol(&self) -> MultiplierSymbol {
        let (a, b) = (self.rule.clone(), self.rule.clone());
        MultiplierSymbol::new(
            format!("spectral:{}", self.name),
            move |l| a(0.25 * (1.0 + l * l)).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
            move |m| {
                let s = 0.25 * (1.0 - (m * m) as f64);
                b(s).map_err(|e| Error::SymbolUndefined {
                    m,
                    argument: s,
                    reason: e.to_string(),
                })
            },
        )
    }

    /// Check the monotonicity flag on a logarithmic grid of `[1/4, 1/4 + e^40]`.
    pub fn check_monotone(&self) -> Result<()> {
        if !self.monotone {
            return Err(Error::invalid(format!(
                "spectral function '{}' is not flagged monotone",
                self.name
            )));
        }
        let mut prev = f64::INFINITY;
        // Log grid out to s ≈ e^40 so slowly decaying symbols (short heat times) are seen to vanish.
        for k in 0..=5200 {
            let s = 0.25 + (k as f64 * 0.01 - 12.0).exp();
            let v = self.eval(s)?.norm();
            if v > prev * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::invalid(format!("|{}| increases near s = {s}", self.name)));
            }
            prev = v;
        }
        if prev > 1e-6 * self.eval(0.25)?.norm().max(1e-300) && prev > 1e-12 {
            return Err(Error::invalid(format!("|{}| does not tend to zero", self.name)));
        }
        Ok(())
    }
}

fn real_power(base: f64, a: f64) -> Result<Complex64> {
    if base == 0.0 && a < 0.0 {
        return Err(Error::invalid(format!("0^{a} is undefined")));
    }
    if base < 0.0 && a.fract() != 0.0 {
        return Err(Error::invalid(format!(
            "negative base {base} with non-integer exponent {a}"
        )));
    }
    Ok(Complex64::new(base.powf(a), 0.0))
}

impl SpectralEngine {
    /// `T_m f`.
    pub fn apply(&self, m: &MultiplierSymbol, f: &RadialProfile) -> Result<RadialProfile> {
        let data = self.forward(f)?.map(|l| m.at_lambda(l), |k| m.at_discrete(k))?;
        self.inverse(&data)
    }

    /// `φ(Ω) f`.
    pub fn apply_spectral(&self, phi: &SpectralFunction, f: &RadialProfile) -> Result<RadialProfile> {
        self.apply(&phi.to_symbol(), f)
    }

    /// `e^{tΩ} f`.
    pub fn heat(&self, t: f64, f: &RadialProfile) -> Result<RadialProfile> {
        if !(t > 0.0) {
            return Err(Error::invalid(format!("heat time must be positive, got {t}")));
        }
        self.apply_spectral(&SpectralFunction::heat(t), f)
    }

    /// `(1 − Ω)^a f`.
    pub fn sobolev(&self, a: f64, f: &RadialProfile) -> Result<RadialProfile> {
        self.apply_spectral(&SpectralFunction::sobolev(a), f)
    }
}

/// `T_m f` on a fresh engine (η from the Schur identity).
pub fn apply_fourier_multiplier(m: &MultiplierSymbol, f: &RadialProfile, grid: &SpectralGrid) -> Result<RadialProfile> {
    SpectralEngine::calibrated(f.pair(), f.rule().clone(), grid.clone())?.apply(m, f)
}

/// `φ(Ω) f` on a fresh engine.
pub fn apply_spectral_multiplier(
    phi: &SpectralFunction,
    f: &RadialProfile,
    grid: &SpectralGrid,
) -> Result<RadialProfile> {
    apply_fourier_multiplier(&phi.to_symbol(), f, grid)
}

/// `e^{tΩ} f` on a fresh engine.
pub fn heat_propagator(t: f64, f: &RadialProfile, grid: &SpectralGrid) -> Result<RadialProfile> {
    SpectralEngine::calibrated(f.pair(), f.rule().clone(), grid.clone())?.heat(t, f)
}

/// `(1 − Ω)^a f` on a fresh engine.
pub fn sobolev_operator(a: f64, f: &RadialProfile, grid: &SpectralGrid) -> Result<RadialProfile> {
    SpectralEngine::calibrated(f.pair(), f.rule().clone(), grid.clone())?.sobolev(a, f)
}

/// A bound value and its parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: f64,
    pub terms: BoundTerms,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundTerms {
    /// Continuous-spectrum term.
    pub continuous: f64,
    /// Sum over the discrete parameters.
    pub discrete: f64,
    /// `1/p − 1/q`.
    pub exponent: f64,
}

fn exponent(p: f64, q: f64) -> Result<f64> {
    if !(1.0 < p && p <= 2.0 && 2.0 <= q && q.is_finite()) {
        return Err(Error::invalid(format!(
            "need 1 < p <= 2 <= q < inf, got p = {p}, q = {q}"
        )));
    }
    Ok(1.0 / p - 1.0 / q)
}

/// `sup_α α (∫_{|m|>α} μ)^{1/p−1/q} + Σ_{m∈Γ} |m(i·m)| |m|^{1/p−1/q}`
/// (existential constants omitted). Infinite when the weak term diverges.
pub fn multiplier_norm_bound(
    m: &MultiplierSymbol,
    p: f64,
    q: f64,
    pair: TypePair,
    grid: &SpectralGrid,
) -> Result<BoundReport> {
    let r = exponent(p, q)?;
    let abs = |l: f64| m.at_lambda(l).norm();
    let continuous = weak_type_functional(&abs, pair.tau(), grid, r)?;
    let mut discrete = 0.0;
    for &k in gamma_of(pair).members() {
        discrete += m.at_discrete(k)?.norm() * (k.abs() as f64).powf(r);
    }
    Ok(BoundReport {
        bound: continuous + discrete,
        terms: BoundTerms {
            continuous,
            discrete,
            exponent: r,
        },
    })
}

/// `Σ_{m∈Γ} |φ((1−m²)/4)| |m|^r + max(sup_{1/4<s≤1/2} |φ(s)|(s−1/4)^{e r}, sup_{s≥1/2} |φ(s)|(s−1/4)^r)`
/// with `r = 1/p − 1/q` and `e = 3/2` for the even series, `1/2` for the odd one.
pub fn spectral_norm_bound(phi: &SpectralFunction, p: f64, q: f64, pair: TypePair) -> Result<BoundReport> {
    let r = exponent(p, q)?;
    phi.check_monotone()?;
    let near_exp = match pair.tau() {
        ParityClass::Plus => 1.5 * r,
        ParityClass::Minus => 0.5 * r,
    };
    let weighted = |u: f64, e: f64| -> Result<f64> { Ok(phi.eval(0.25 + u)?.norm() * u.powf(e)) };
    let near = log_sup(|u| weighted(u, near_exp), 1e-14, 0.25)?;
    let far = log_sup(|u| weighted(u, r), 0.25, 1e12)?;
    let mut discrete = 0.0;
    for &k in gamma_of(pair).members() {
        let s = 0.25 * (1.0 - (k * k) as f64);
        let v = phi.eval(s).map_err(|e| Error::SymbolUndefined {
            m: k,
            argument: s,
            reason: e.to_string(),
        })?;
        discrete += v.norm() * (k.abs() as f64).powf(r);
    }
    let continuous = near.max(far);
    Ok(BoundReport {
        bound: continuous + discrete,
        terms: BoundTerms {
            continuous,
            discrete,
            exponent: r,
        },
    })
}

/// Maximum of `g` on `[lo, hi]` over a logarithmic grid, refined by golden
/// section in `ln u` around the best grid point.
pub fn log_sup<G>(g: G, lo: f64, hi: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    const POINTS: usize = 4000;
    let (a, b) = (lo.ln(), hi.ln());
    let x = |k: usize| a + (b - a) * k as f64 / (POINTS - 1) as f64;
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..POINTS {
        let v = g(x(k).exp())?;
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let (mut l, mut h) = (x(best_k.saturating_sub(1)), x((best_k + 1).min(POINTS - 1)));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = h - ratio * (h - l);
    let mut d = l + ratio * (h - l);
    let (mut gc, mut gd) = (g(c.exp())?, g(d.exp())?);
    for _ in 0..200 {
        if (h - l).abs() < 1e-13 {
            break;
        }
        if gc > gd {
            h = d;
            d = c;
            gd = gc;
            c = h - ratio * (h - l);
            gc = g(c.exp())?;
        } else {
            l = c;
            c = d;
            gc = gd;
            d = l + ratio * (h - l);
            gd = g(d.exp())?;
        }
    }
    Ok(best.max(gc).max(gd))
}

/// Piecewise heat-semigroup bound with constants normalized to one:
/// `Σ_{m∈Γ} e^{−t(1−m²)/4}|m|^r + t^{−r}` for `t ≤ 1`,
/// `… + e^{−t/4} t^{−3r/2}` for `t > 1`, `r = 1/p − 1/q`.
pub fn heat_bound(t: f64, p: f64, q: f64, pair: TypePair) -> Result<BoundReport> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("t must be positive, got {t}")));
    }
    let r = exponent(p, q)?;
    let continuous = if t <= 1.0 {
        t.powf(-r)
    } else {
        (-t / 4.0).exp() * t.powf(-1.5 * r)
    };
    let discrete = gamma_of(pair)
        .members()
        .iter()
        .map(|&k| (-t * 0.25 * (1.0 - (k * k) as f64)).exp() * (k.abs() as f64).powf(r))
        .sum();
    Ok(BoundReport {
        bound: continuous + discrete,
        terms: BoundTerms {
            continuous,
            discrete,
            exponent: r,
        },
    })
}

/// `sup_{x>0} e^{−tx²} x^{α/r} = e^{−α/2r} (α/(2rt))^{α/2r}`.
pub fn gaussian_power_sup(t: f64, alpha: f64, r: f64) -> f64 {
    let k = alpha / (2.0 * r);
    (-k).exp() * (k / t).powf(k)
}
