//! Ratio checks for Hausdorff–Young, Paley and Hausdorff–Young–Paley type
//! inequalities, and empirical lower bounds for multiplier norms.
//!
//! Every inequality here holds up to an unspecified constant, so a check
//! reports `LHS / RHS` per test function and the drift of the largest ratio
//! under one refinement of the discretization.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::MultiplierSymbol;
use crate::numerics::{RadialRule, SpectralGrid};
use crate::profile::RadialProfile;
use crate::spectrum::{
    gamma_of, plancherel_density, weak_sup_norm, TypePair, DISCRETE_NORMALIZATION, PRINCIPAL_NORMALIZATION,
};
use crate::spherical::EtaTable;
use crate::transform::{lp_norm, SpectralData, SpectralEngine};

/// Radial rule and spectral grid used together for one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub rule: RadialRule,
    pub grid: SpectralGrid,
}

impl Resolution {
    pub fn new(rule: RadialRule, grid: SpectralGrid) -> Self {
        Self { rule, grid }
    }

    /// Doubles the spectral range at fixed spacing and the radial nodes per panel.
    ///
    /// Both go together: the radial rule must resolve `e^{iλt}` at the new range.
    pub fn refined(&self) -> Self {
        Self {
            rule: self.rule.refined(),
            grid: self.grid.extended(),
        }
    }
}

impl Default for Resolution {
    /// `[0, 6]` at 64 nodes per unit and the default spectral grid.
    fn default() -> Self {
        Self {
            rule: RadialRule::uniform(0.0, 6.0, 1.0, 64).expect("valid default rule"),
            grid: SpectralGrid::default(),
        }
    }
}

/// One smooth bump `amplitude · b(t) · e^{iωt}` supported on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub t0: f64,
    pub t1: f64,
    pub omega: f64,
    pub amplitude: f64,
}

impl BumpSpec {
    pub fn profile(&self, pair: TypePair, rule: &RadialRule) -> Result<RadialProfile> {
        RadialProfile::bump(pair, rule.clone(), self.t0, self.t1, self.omega, self.amplitude)
    }
}

/// A list of bumps of one type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub pair: TypePair,
    pub members: Vec<BumpSpec>,
}

impl TestFamily {
    pub const DEFAULT_SIZE: usize = 20;
    pub const DEFAULT_SEED: u64 = 1;

    pub fn new(pair: TypePair, members: Vec<BumpSpec>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("test family is empty"));
        }
        for b in &members {
            if !(0.0 <= b.t0 && b.t0 < b.t1) || (pair.l() != pair.n() && b.t0 == 0.0) {
                return Err(Error::invalid(format!(
                    "bad bump support [{}, {}] for type {pair}",
                    b.t0, b.t1
                )));
            }
        }
        Ok(Self { pair, members })
    }

    /// Twenty bumps with centres in `[0.5, 4]`, support lengths in `[0.2, 1]`
    /// and modulations `ω ∈ {0, 2, 5}`, drawn from a seeded generator. Supports
    /// start at `t ≥ 0.05`.
    pub fn default_for(pair: TypePair, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..Self::DEFAULT_SIZE)
            .map(|k| {
                let width: f64 = rng.gen_range(0.2..=1.0);
                let lo = (0.5f64).max(0.5 * width + 0.05);
                let centre: f64 = rng.gen_range(lo..=4.0);
                BumpSpec {
                    t0: centre - 0.5 * width,
                    t1: centre + 0.5 * width,
                    omega: [0.0, 2.0, 5.0][k % 3],
                    amplitude: 1.0,
                }
            })
            .collect();
        Self { pair, members }
    }

    pub fn profiles(&self, rule: &RadialRule) -> Result<Vec<RadialProfile>> {
        self.members.iter().map(|b| b.profile(self.pair, rule)).collect()
    }
}

/// Non-negative weight `ψ` on the spectrum; at a discrete point `i·m` it is
/// evaluated at `|m|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PsiWeight {
    /// `(1 + λ²)^{−a}`.
    Rational(f64),
    /// `c`.
    Constant(f64),
}

impl PsiWeight {
    pub fn eval(&self, lambda: f64) -> f64 {
        match *self {
            PsiWeight::Rational(a) => (1.0 + lambda * lambda).powf(-a),
            PsiWeight::Constant(c) => c,
        }
    }

    /// Pointwise scaling, used to compare a weight with a larger one.
    pub fn scaled(&self, c: f64) -> ScaledPsi {
        ScaledPsi { base: *self, factor: c }
    }
}

impl fmt::Display for PsiWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiWeight::Rational(a) => write!(f, "rational:{a}"),
            PsiWeight::Constant(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for PsiWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("psi must look like rational:<a> or const:<c>, got '{s}'")))?;
        let v: f64 = arg
            .parse()
            .map_err(|_| Error::invalid(format!("bad number '{arg}' in psi '{s}'")))?;
        let psi = match kind {
            "rational" if v > 0.0 => PsiWeight::Rational(v),
            "const" if v >= 0.0 => PsiWeight::Constant(v),
            _ => return Err(Error::invalid(format!("unsupported psi '{s}'"))),
        };
        Ok(psi)
    }
}

impl From<PsiWeight> for String {
    fn from(p: PsiWeight) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PsiWeight {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// `c · ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPsi {
    pub base: PsiWeight,
    pub factor: f64,
}

/// A weight function usable by the Paley-type checks.
pub trait Weight: Sync {
    fn at(&self, lambda: f64) -> f64;
}

impl Weight for PsiWeight {
    fn at(&self, lambda: f64) -> f64 {
        self.eval(lambda)
    }
}

impl Weight for ScaledPsi {
    fn at(&self, lambda: f64) -> f64 {
        self.factor * self.base.eval(lambda)
    }
}

/// Which inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "which", rename_all = "kebab-case")]
pub enum Check {
    Hy { p: f64 },
    DualHy { p: f64 },
    Paley { p: f64, psi: PsiWeight },
    Hyp { p: f64, b: f64, psi: PsiWeight },
}

/// One test function's sides of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEntry {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioEntry {
    fn new(lhs: f64, rhs: f64) -> Result<Self> {
        if !(rhs > 0.0) {
            return Err(Error::invalid("right-hand side vanishes; ratio undefined"));
        }
        let ratio = lhs / rhs;
        if !ratio.is_finite() {
            return Err(Error::NonFinite {
                what: "inequality ratio",
                index: 0,
            });
        }
        Ok(Self { lhs, rhs, ratio })
    }
}

/// Ratios over a family at two resolutions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub check: Check,
    pub members: Vec<RatioEntry>,
    pub max_ratio: f64,
    pub refined_members: Vec<RatioEntry>,
    pub refined_max_ratio: f64,
    /// `|refined_max − max| / max`.
    pub refinement_delta: f64,
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// `(∫ |S|^r dν̃)^{1/r}`, the supremum for `r = ∞`.
pub fn spectral_norm(s: &SpectralData, r: f64) -> f64 {
    if r.is_infinite() {
        s.sup_norm()
    } else {
        s.measure_of_power(r).powf(1.0 / r)
    }
}

/// `(∫ |S|^b ψ^{b·e} dν̃)^{1/b}` with `ψ(i·m) = ψ(|m|)`.
fn weighted_spectral_norm<W: Weight + ?Sized>(s: &SpectralData, psi: &W, e: f64, b: f64) -> f64 {
    let grid = s.grid();
    let tau = s.pair().tau();
    let mut cont = 0.0;
    for (j, v) in s.hat_h().iter().enumerate() {
        let l = grid.lambda(j);
        cont += grid.weight(j) * plancherel_density(tau, l) * (v.norm() * psi.at(l).powf(e)).powf(b);
    }
    let disc: f64 = s
        .hat_b()
        .iter()
        .map(|(&m, v)| (v.norm() * psi.at(m.abs() as f64).powf(e)).powf(b) * m.abs() as f64)
        .sum();
    (PRINCIPAL_NORMALIZATION * cont + DISCRETE_NORMALIZATION * disc).powf(1.0 / b)
}

/// `‖ψ‖_{τ,∞} + Σ_{m∈Γ} ψ(|m|)|m|`, rejected when the weak norm is infinite.
pub fn paley_weight_norm<W: Weight + ?Sized>(psi: &W, pair: TypePair, grid: &SpectralGrid) -> Result<f64> {
    let weak = weak_sup_norm(|l| psi.at(l), pair.tau(), grid)?;
    if weak.is_infinite() {
        return Err(Error::InfiniteWeakNorm);
    }
    let disc: f64 = gamma_of(pair)
        .members()
        .iter()
        .map(|&m| psi.at(m.abs() as f64) * m.abs() as f64)
        .sum();
    Ok(weak + disc)
}

fn check_p(p: f64, lo_closed: bool) -> Result<()> {
    let lo_ok = if lo_closed { p >= 1.0 } else { p > 1.0 };
    if !(lo_ok && p <= 2.0) {
        return Err(Error::invalid(format!("p = {p} is outside the admissible range")));
    }
    Ok(())
}

/// `(∫ |F f|^{p'} dν̃)^{1/p'}` against `‖f‖_p`.
pub fn hausdorff_young_check(engine: &SpectralEngine, f: &RadialProfile, p: f64) -> Result<RatioEntry> {
    check_p(p, true)?;
    let s = engine.forward(f)?;
    RatioEntry::new(spectral_norm(&s, conjugate_exponent(p)), lp_norm(f, p)?)
}

/// `‖inverse(S)‖_{p'}` against `(∫ |S|^p dν̃)^{1/p}`.
pub fn dual_hausdorff_young_check(engine: &SpectralEngine, s: &SpectralData, p: f64) -> Result<RatioEntry> {
    check_p(p, true)?;
    let f = engine.inverse(s)?;
    RatioEntry::new(lp_norm(&f, conjugate_exponent(p))?, spectral_norm(s, p))
}

/// `(∫ |F f|^p ψ^{2−p} dν̃)^{1/p}` against `(‖ψ‖_{τ,∞} + Σψ(k)|k|)^{(2−p)/p} ‖f‖_p`.
pub fn paley_check<W: Weight + ?Sized>(
    engine: &SpectralEngine,
    f: &RadialProfile,
    psi: &W,
    p: f64,
) -> Result<RatioEntry> {
    check_p(p, false)?;
    let norm = paley_weight_norm(psi, engine.pair(), engine.grid())?;
    paley_with_norm(engine, f, psi, p, norm)
}

fn paley_with_norm<W: Weight + ?Sized>(
    engine: &SpectralEngine,
    f: &RadialProfile,
    psi: &W,
    p: f64,
    norm: f64,
) -> Result<RatioEntry> {
    let s = engine.forward(f)?;
    let lhs = weighted_spectral_norm(&s, psi, (2.0 - p) / p, p);
    RatioEntry::new(lhs, norm.powf((2.0 - p) / p) * lp_norm(f, p)?)
}

/// `(∫ (|F f| ψ^{1/b−1/p'})^b dν̃)^{1/b}` against
/// `(‖ψ‖_{τ,∞} + Σψ(k)|k|)^{1/b−1/p'} ‖f‖_p`, for `p ≤ b ≤ p'`.
pub fn hyp_check<W: Weight + ?Sized>(
    engine: &SpectralEngine,
    f: &RadialProfile,
    psi: &W,
    p: f64,
    b: f64,
) -> Result<RatioEntry> {
    check_p(p, false)?;
    let norm = paley_weight_norm(psi, engine.pair(), engine.grid())?;
    hyp_with_norm(engine, f, psi, p, b, norm)
}

fn hyp_with_norm<W: Weight + ?Sized>(
    engine: &SpectralEngine,
    f: &RadialProfile,
    psi: &W,
    p: f64,
    b: f64,
    norm: f64,
) -> Result<RatioEntry> {
    let q = conjugate_exponent(p);
    if !(p <= b && b <= q) {
        return Err(Error::invalid(format!("b = {b} must lie in [{p}, {q}]")));
    }
    let e = 1.0 / b - 1.0 / q;
    let s = engine.forward(f)?;
    let lhs = if b.is_infinite() {
        s.sup_norm()
    } else {
        weighted_spectral_norm(&s, psi, e, b)
    };
    RatioEntry::new(lhs, norm.powf(e) * lp_norm(f, p)?)
}

fn entries_at(check: &Check, family: &TestFamily, res: &Resolution, eta: &EtaTable) -> Result<Vec<RatioEntry>> {
    let engine = SpectralEngine::new(family.pair, res.rule.clone(), res.grid.clone(), eta)?;
    let profiles = family.profiles(&res.rule)?;
    let norm = match check {
        Check::Paley { psi, .. } | Check::Hyp { psi, .. } => paley_weight_norm(psi, family.pair, &res.grid)?,
        _ => 0.0,
    };
    profiles
        .par_iter()
        .map(|f| match *check {
            Check::Hy { p } => hausdorff_young_check(&engine, f, p),
            Check::DualHy { p } => {
                check_p(p, true)?;
                dual_hausdorff_young_check(&engine, &engine.forward(f)?, p)
            }
            Check::Paley { p, psi } => {
                check_p(p, false)?;
                paley_with_norm(&engine, f, &psi, p, norm)
            }
            Check::Hyp { p, b, psi } => {
                check_p(p, false)?;
                hyp_with_norm(&engine, f, &psi, p, b, norm)
            }
        })
        .collect()
}

fn max_ratio(entries: &[RatioEntry]) -> f64 {
    entries.iter().map(|e| e.ratio).fold(0.0, f64::max)
}

/// Run `check` over `family` at `res` and at `res.refined()`.
pub fn run_family(check: Check, family: &TestFamily, res: &Resolution) -> Result<RatioReport> {
    let eta = EtaTable::for_pair(family.pair)?;
    let members = entries_at(&check, family, res, &eta)?;
    let refined_members = entries_at(&check, family, &res.refined(), &eta)?;
    let max = max_ratio(&members);
    let refined_max = max_ratio(&refined_members);
    let refinement_delta = if max == 0.0 {
        0.0
    } else {
        (refined_max - max).abs() / max
    };
    Ok(RatioReport {
        check,
        members,
        max_ratio: max,
        refined_members,
        refined_max_ratio: refined_max,
        refinement_delta,
    })
}

/// `max_f ‖T_m f‖_q / ‖f‖_p` over the family.
pub fn operator_norm_lower_bound(
    m: &MultiplierSymbol,
    p: f64,
    q: f64,
    family: &TestFamily,
    res: &Resolution,
) -> Result<f64> {
    if !(1.0 < p && p <= 2.0 && 2.0 <= q && q.is_finite()) {
        return Err(Error::invalid(format!(
            "need 1 < p <= 2 <= q < inf, got p = {p}, q = {q}"
        )));
    }
    let engine = SpectralEngine::calibrated(family.pair, res.rule.clone(), res.grid.clone())?;
    let ratios: Vec<f64> = family
        .profiles(&res.rule)?
        .par_iter()
        .map(|f| -> Result<f64> {
            let out = engine.apply(m, f)?;
            let den = lp_norm(f, p)?;
            if den == 0.0 {
                return Ok(0.0);
            }
            Ok(lp_norm(&out, q)? / den)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `c · f` for a family member, used by the homogeneity checks.
pub fn scaled_profile(f: &RadialProfile, c: f64) -> RadialProfile {
    f.scaled(Complex64::new(c, 0.0))
}
