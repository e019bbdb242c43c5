//! Heat flow for the Casimir operator and Picard solvers for
//! `u(t) = u₀ + ∫₀ᵗ |Bu(τ)|^p dτ` (heat) and
//! `u(t) = u₀ + t u₁ + ∫₀ᵗ (t − τ) Ψ(τ) |Bu(τ)|^p dτ` (wave).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::MultiplierSymbol;
use crate::numerics::{cumulative_uniform, gauss_legendre};
use crate::profile::RadialProfile;
use crate::transform::{lp_norm, SpectralEngine};

/// Solution snapshots on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyState {
    pub times: Vec<f64>,
    pub snapshots: Vec<RadialProfile>,
    /// `L²` defect of the integral equation at each time node.
    pub residuals: Vec<f64>,
    /// Scaled sup-in-time `L²` change of every Picard step.
    pub increments: Vec<f64>,
}

impl CauchyState {
    pub fn iterations(&self) -> usize {
        self.increments.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// `sup_t ‖u(t)‖₂`.
    pub fn sup_l2(&self) -> Result<f64> {
        self.snapshots
            .iter()
            .map(|u| lp_norm(u, 2.0))
            .try_fold(0.0, |acc, n| Ok(f64::max(acc, n?)))
    }
}

/// How the nonlinearity is read for types other than `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMode {
    /// Only `(l, n) = (0, 0)`, where `|Bu|^p` stays in the same type.
    #[default]
    Biinvariant,
    /// Any type; `|Bu|^p` is sampled on the diagonal flow and relabelled with
    /// the input's type although it is bi-invariant as a function on the group.
    /// Spelled `paper-literal` on the command line; `relabelled` also parses.
    #[serde(rename = "paper-literal", alias = "relabelled")]
    Relabelled,
}

impl fmt::Display for SolverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverMode::Biinvariant => "biinvariant",
            SolverMode::Relabelled => "paper-literal",
        })
    }
}

impl FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "biinvariant" => Ok(SolverMode::Biinvariant),
            "paper-literal" | "relabelled" => Ok(SolverMode::Relabelled),
            _ => Err(Error::invalid(format!(
                "mode must be biinvariant or paper-literal, got '{s}'"
            ))),
        }
    }
}

/// Discretization and stopping rule of the Picard solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub mode: SolverMode,
    /// Uniform time steps per unit time (at least four steps in total).
    pub steps_per_unit: usize,
    /// Stop when `sup_t ‖u_{j+1}(t) − u_j(t)‖₂ / max(1, sup_t ‖u_{j+1}(t)‖₂)` falls below this.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            mode: SolverMode::Biinvariant,
            steps_per_unit: 128,
            tol: 1e-8,
            max_iterations: 100,
        }
    }
}

impl PicardOptions {
    fn validate(&self) -> Result<()> {
        if self.steps_per_unit == 0 || !(self.tol > 0.0) || self.max_iterations == 0 {
            return Err(Error::invalid(
                "solver needs positive steps, tolerance and iteration cap",
            ));
        }
        Ok(())
    }

    /// Uniform nodes on `[0, horizon]`.
    pub fn time_nodes(&self, horizon: f64) -> Vec<f64> {
        let steps = ((self.steps_per_unit as f64 * horizon).ceil() as usize).max(4);
        (0..=steps).map(|k| horizon * k as f64 / steps as f64).collect()
    }
}

/// The coefficient `Ψ(t)` of the wave equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum WaveCoefficients {
    /// `Ψ ≡ c`.
    Constant(f64),
    /// `Ψ(t) = c (1 + t)^{−γ}`.
    Decay { c: f64, gamma: f64 },
}

impl WaveCoefficients {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            WaveCoefficients::Constant(c) => c,
            WaveCoefficients::Decay { c, gamma } => c * (1.0 + t).powf(-gamma),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            WaveCoefficients::Constant(c) | WaveCoefficients::Decay { c, .. } => c == 0.0,
        }
    }

    /// `‖Ψ‖_{L²(0,T)}`.
    pub fn l2_norm(&self, horizon: f64) -> f64 {
        match *self {
            WaveCoefficients::Constant(c) => c.abs() * horizon.sqrt(),
            WaveCoefficients::Decay { c, gamma } => {
                let e = 1.0 - 2.0 * gamma;
                let int = if e.abs() < 1e-12 {
                    (1.0 + horizon).ln()
                } else {
                    ((1.0 + horizon).powf(e) - 1.0) / e
                };
                c.abs() * int.sqrt()
            }
        }
    }
}

impl fmt::Display for WaveCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveCoefficients::Constant(c) => write!(f, "const:{c}"),
            WaveCoefficients::Decay { c, gamma } => write!(f, "decay:{c}:{gamma}"),
        }
    }
}

impl FromStr for WaveCoefficients {
    type Err = Error;

    /// `const:<c>` or `decay:<c>:<gamma>` with `c ≥ 0`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| -> Result<f64> {
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid(format!("bad number '{x}' in '{s}'")))
        };
        let psi = match parts.as_slice() {
            ["const", c] => WaveCoefficients::Constant(num(c)?),
            ["decay", c, g] => WaveCoefficients::Decay {
                c: num(c)?,
                gamma: num(g)?,
            },
            _ => {
                return Err(Error::invalid(format!(
                    "psi must be const:<c> or decay:<c>:<gamma>, got '{s}'"
                )))
            }
        };
        match psi {
            WaveCoefficients::Constant(c) | WaveCoefficients::Decay { c, .. } if c < 0.0 => {
                Err(Error::invalid("Ψ must be non-negative"))
            }
            _ => Ok(psi),
        }
    }
}

impl From<WaveCoefficients> for String {
    fn from(w: WaveCoefficients) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for WaveCoefficients {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn require_profile(engine: &SpectralEngine, u: &RadialProfile, what: &str) -> Result<()> {
    if u.pair() != engine.pair() || u.rule().nodes() != engine.rule().nodes() {
        return Err(Error::invalid(format!(
            "{what} does not live on the engine's type and radial grid"
        )));
    }
    Ok(())
}

/// `u(t) = e^{tΩ} u₀` at each requested time; residuals are zero.
pub fn linear_heat_solve(engine: &SpectralEngine, u0: &RadialProfile, times: &[f64]) -> Result<CauchyState> {
    require_profile(engine, u0, "initial datum")?;
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("times must be positive and strictly increasing"));
    }
    let data = engine.forward(u0)?;
    let snapshots = times
        .iter()
        .map(|&t| {
            let evolved = data.map(
                |l| Complex64::new((-0.25 * t * (1.0 + l * l)).exp(), 0.0),
                |m| Ok(Complex64::new((-0.25 * t * (1.0 - (m * m) as f64)).exp(), 0.0)),
            )?;
            engine.inverse(&evolved)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CauchyState {
        times: times.to_vec(),
        residuals: vec![0.0; times.len()],
        increments: Vec::new(),
        snapshots,
    })
}

// |B u(τ_k)|^p at every radial node, for every time node.
fn nonlinearity(engine: &SpectralEngine, b: &MultiplierSymbol, p: f64, u: &[RadialProfile]) -> Result<Vec<Vec<f64>>> {
    u.par_iter()
        .map(|uk| {
            let bu = engine.apply(b, uk)?;
            Ok(bu.values().iter().map(|v| v.norm().powf(p)).collect())
        })
        .collect()
}

// Per radial node i, the cumulative time integrals of weight(τ)·g[k][i].
fn cumulative<W: Fn(f64) -> f64>(g: &[Vec<f64>], times: &[f64], weight: W) -> Vec<Vec<f64>> {
    let h = times[1] - times[0];
    let radial = g[0].len();
    let mut out = vec![vec![0.0; radial]; times.len()];
    for i in 0..radial {
        let col: Vec<f64> = (0..times.len()).map(|k| weight(times[k]) * g[k][i]).collect();
        for (k, v) in cumulative_uniform(&col, h).into_iter().enumerate() {
            out[k][i] = v;
        }
    }
    out
}

fn sup_difference(a: &[RadialProfile], b: &[RadialProfile]) -> Result<(f64, f64)> {
    let mut diff = 0.0f64;
    let mut size = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let d: Vec<Complex64> = x.values().iter().zip(y.values()).map(|(p, q)| p - q).collect();
        diff = diff.max(lp_norm(&x.with_values(d)?, 2.0)?);
        size = size.max(lp_norm(x, 2.0)?);
    }
    Ok((diff, size))
}

/// The right-hand side of a Picard map evaluated on `u`.
type PicardMap<'a> = dyn Fn(&[RadialProfile]) -> Result<Vec<RadialProfile>> + Sync + 'a;

fn picard(
    initial: Vec<RadialProfile>,
    map: &PicardMap<'_>,
    opts: &PicardOptions,
) -> Result<(Vec<RadialProfile>, Vec<f64>)> {
    let mut u = initial;
    let mut increments = Vec::new();
    for _ in 0..opts.max_iterations {
        let next = map(&u)?;
        let (diff, size) = sup_difference(&next, &u)?;
        let inc = diff / size.max(1.0);
        increments.push(inc);
        u = next;
        if !inc.is_finite() {
            break;
        }
        if inc < opts.tol {
            return Ok((u, increments));
        }
    }
    Err(Error::NotConverged {
        iterations: increments.len(),
        increment: increments.last().copied().unwrap_or(f64::NAN),
    })
}

fn check_mode(engine: &SpectralEngine, opts: &PicardOptions, p: f64, horizon: f64) -> Result<()> {
    opts.validate()?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must satisfy 1 < p < inf, got {p}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if opts.mode == SolverMode::Biinvariant && !engine.pair().is_biinvariant() {
        return Err(Error::invalid(format!(
            "biinvariant mode needs type (0, 0), got {}; use paper-literal mode",
            engine.pair()
        )));
    }
    Ok(())
}

// u0 + t·u1 + rhs[k] at time node k.
fn assemble(u0: &RadialProfile, u1: Option<&RadialProfile>, t: f64, rhs: &[f64]) -> Result<RadialProfile> {
    let values = (0..u0.values().len())
        .map(|i| {
            let drift = u1.map_or(Complex64::new(0.0, 0.0), |v| v.values()[i] * t);
            u0.values()[i] + drift + rhs[i]
        })
        .collect();
    u0.with_values(values)
}

fn residuals(u: &[RadialProfile], rebuilt: &[RadialProfile]) -> Result<Vec<f64>> {
    u.iter()
        .zip(rebuilt)
        .map(|(x, y)| {
            let d: Vec<Complex64> = x.values().iter().zip(y.values()).map(|(p, q)| p - q).collect();
            lp_norm(&x.with_values(d)?, 2.0)
        })
        .collect()
}

/// Picard iteration for `u(t) = u₀ + ∫₀ᵗ |Bu(τ)|^p dτ` on `[0, horizon]`.
///
/// Fails with [`Error::NotConverged`] when the iteration cap is reached,
/// which is the expected outcome well beyond the existence time.
pub fn nonlinear_heat_solve(
    engine: &SpectralEngine,
    u0: &RadialProfile,
    b: &MultiplierSymbol,
    p: f64,
    horizon: f64,
    opts: &PicardOptions,
) -> Result<CauchyState> {
    require_profile(engine, u0, "initial datum")?;
    check_mode(engine, opts, p, horizon)?;
    let times = opts.time_nodes(horizon);
    let map = |u: &[RadialProfile]| -> Result<Vec<RadialProfile>> {
        let g = nonlinearity(engine, b, p, u)?;
        let int = cumulative(&g, &times, |_| 1.0);
        times.iter().zip(&int).map(|(&t, r)| assemble(u0, None, t, r)).collect()
    };
    let (u, increments) = picard(vec![u0.clone(); times.len()], &map, opts)?;
    let residuals = residuals(&u, &map(&u)?)?;
    Ok(CauchyState {
        times,
        snapshots: u,
        residuals,
        increments,
    })
}

/// Picard iteration for `u(t) = u₀ + t u₁ + ∫₀ᵗ (t − τ) Ψ(τ) |Bu(τ)|^p dτ`.
#[allow(clippy::too_many_arguments)]
pub fn nonlinear_wave_solve(
    engine: &SpectralEngine,
    u0: &RadialProfile,
    u1: &RadialProfile,
    psi: &WaveCoefficients,
    b: &MultiplierSymbol,
    p: f64,
    horizon: f64,
    opts: &PicardOptions,
) -> Result<CauchyState> {
    require_profile(engine, u0, "initial datum")?;
    require_profile(engine, u1, "initial velocity")?;
    check_mode(engine, opts, p, horizon)?;
    let times = opts.time_nodes(horizon);
    let map = |u: &[RadialProfile]| -> Result<Vec<RadialProfile>> {
        if psi.is_zero() {
            let zero = vec![0.0; u0.values().len()];
            return times.iter().map(|&t| assemble(u0, Some(u1), t, &zero)).collect();
        }
        let g = nonlinearity(engine, b, p, u)?;
        // ∫₀ᵗ (t − τ) h = t ∫₀ᵗ h − ∫₀ᵗ τ h.
        let first = cumulative(&g, &times, |s| psi.eval(s));
        let second = cumulative(&g, &times, |s| s * psi.eval(s));
        times
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let r: Vec<f64> = first[k].iter().zip(&second[k]).map(|(a, b)| t * a - b).collect();
                assemble(u0, Some(u1), t, &r)
            })
            .collect()
    };
    let initial: Vec<RadialProfile> = times
        .iter()
        .map(|&t| assemble(u0, Some(u1), t, &vec![0.0; u0.values().len()]))
        .collect::<Result<_>>()?;
    let (u, increments) = picard(initial, &map, opts)?;
    let residuals = residuals(&u, &map(&u)?)?;
    Ok(CauchyState {
        times,
        snapshots: u,
        residuals,
        increments,
    })
}

/// `T* = √(c² − 1) / (c^p ‖u₀‖₂)`; infinite for `u₀ = 0`.
pub fn heat_existence_time(u0_l2: f64, c: f64, p: f64) -> Result<f64> {
    if !(c > 1.0) || !(p > 1.0) || !(u0_l2 >= 0.0) {
        return Err(Error::invalid(format!(
            "need c > 1, p > 1, ||u0|| >= 0; got c = {c}, p = {p}, ||u0|| = {u0_l2}"
        )));
    }
    if u0_l2 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((c * c - 1.0).sqrt() / (c.powf(p) * u0_l2))
}

/// `T* = min_{v ∈ {u₀, u₁}} ((c − 1) / (‖Ψ‖² c^p ‖v‖^{2p−2}))^{1/3}`; a zero
/// norm makes its term infinite.
pub fn wave_existence_time(u0_l2: f64, u1_l2: f64, psi_l2: f64, c: f64, p: f64) -> Result<f64> {
    if !(c > 1.0) || !(p > 1.0) || !(u0_l2 >= 0.0) || !(u1_l2 >= 0.0) || !(psi_l2 >= 0.0) {
        return Err(Error::invalid("need c > 1, p > 1 and non-negative norms"));
    }
    let term = |v: f64| {
        let den = psi_l2 * psi_l2 * c.powf(p) * v.powf(2.0 * p - 2.0);
        if den == 0.0 {
            f64::INFINITY
        } else {
            ((c - 1.0) / den).cbrt()
        }
    };
    Ok(term(u0_l2).min(term(u1_l2)))
}

/// Global-existence smallness condition at horizon `T`:
/// `c^{p−1} ‖u₀‖^{2p−2} ≤ T^{γ₀ − γ̃}` with `γ̃ = 3 − 2γ + γ₀ p`.
pub fn global_smallness_check(gamma: f64, gamma0: f64, c: f64, p: f64, u0_l2: f64, horizon: f64) -> Result<bool> {
    if !(gamma > 1.5) {
        return Err(Error::invalid(format!("need gamma > 3/2, got {gamma}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::invalid(format!("need 1 < p < inf, got {p}")));
    }
    if !(gamma0 > 0.0 && gamma0 < (2.0 * gamma - 3.0) / p) {
        return Err(Error::invalid(format!(
            "need 0 < gamma0 < (2 gamma - 3)/p = {}, got {gamma0}",
            (2.0 * gamma - 3.0) / p
        )));
    }
    if !(c > 0.0) || !(u0_l2 >= 0.0) || !(horizon > 0.0) {
        return Err(Error::invalid("need c > 0, ||u0|| >= 0 and T > 0"));
    }
    let tilde = 3.0 - 2.0 * gamma + gamma0 * p;
    Ok(c.powf(p - 1.0) * u0_l2.powf(2.0 * p - 2.0) <= horizon.powf(gamma0 - tilde))
}

/// `‖Ψ‖_{L²(0,T)}` by Gauss–Legendre quadrature, for coefficients given as closures.
pub fn time_l2_norm<F: Fn(f64) -> f64>(psi: F, horizon: f64) -> f64 {
    let (x, w) = gauss_legendre(64);
    let half = 0.5 * horizon;
    let s: f64 = x.iter().zip(&w).map(|(x, w)| w * psi(half * (x + 1.0)).powi(2)).sum();
    (half * s).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::SpectralFunction;
    use crate::numerics::{RadialRule, SpectralGrid};
    use crate::spectrum::TypePair;

    fn engine(l: i64, n: i64) -> SpectralEngine {
        SpectralEngine::calibrated(
            TypePair::new(l, n).unwrap(),
            RadialRule::uniform(0.0, 5.0, 1.0, 32).unwrap(),
            SpectralGrid::new(30.0, 1025).unwrap(),
        )
        .unwrap()
    }

    fn bump(e: &SpectralEngine, amp: f64) -> RadialProfile {
        RadialProfile::bump(e.pair(), e.rule().clone(), 0.5, 2.5, 0.0, amp).unwrap()
    }

    #[test]
    fn existence_time_values() {
        assert!((heat_existence_time(1.0, 2f64.sqrt(), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(heat_existence_time(0.0, 2.0, 2.0).unwrap(), f64::INFINITY);
        assert!(heat_existence_time(1.0, 1.0, 2.0).is_err());
        let w = wave_existence_time(1.0, 1.0, 1.0, 2.0, 2.0).unwrap();
        assert!((w - 0.25f64.cbrt()).abs() < 1e-15);
        assert!((w - 0.62996).abs() < 1e-5);
        assert_eq!(
            wave_existence_time(0.3, 2.0, 1.0, 2.0, 3.0).unwrap(),
            wave_existence_time(2.0, 0.3, 1.0, 2.0, 3.0).unwrap()
        );
        assert!(wave_existence_time(1.0, 1.0, 2.0, 2.0, 2.0).unwrap() < w);
        assert_eq!(wave_existence_time(0.0, 0.0, 1.0, 2.0, 2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn smallness_condition() {
        assert!(global_smallness_check(2.0, 0.25, 2.0, 2.0, 0.0, 100.0).unwrap());
        assert!(!global_smallness_check(2.0, 0.25, 2.0, 2.0, 100.0, 1.0).unwrap());
        assert!(global_smallness_check(1.0, 0.25, 2.0, 2.0, 1.0, 1.0).is_err());
        assert!(global_smallness_check(2.0, 0.6, 2.0, 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn wave_coefficient_norms() {
        let c: WaveCoefficients = "const:2".parse().unwrap();
        assert!((c.l2_norm(4.0) - 4.0).abs() < 1e-15);
        let d: WaveCoefficients = "decay:1.5:2".parse().unwrap();
        let numeric = time_l2_norm(|t| d.eval(t), 3.0);
        assert!((d.l2_norm(3.0) - numeric).abs() < 1e-12);
        assert!("const:-1".parse::<WaveCoefficients>().is_err());
        assert!("cosine:1".parse::<WaveCoefficients>().is_err());
    }

    #[test]
    fn zero_data_and_zero_symbol() {
        let e = engine(0, 0);
        let zero = RadialProfile::zero(e.pair(), e.rule().clone());
        let b = SpectralFunction::heat(1.0).to_symbol();
        let s = nonlinear_heat_solve(&e, &zero, &b, 2.0, 0.1, &PicardOptions::default()).unwrap();
        assert!(s.snapshots.iter().all(|u| u.values().iter().all(|v| v.norm() == 0.0)));
        let u0 = bump(&e, 1.0);
        let nothing = MultiplierSymbol::constant(Complex64::new(0.0, 0.0));
        let s = nonlinear_heat_solve(&e, &u0, &nothing, 2.0, 0.1, &PicardOptions::default()).unwrap();
        assert_eq!(s.iterations(), 1);
        assert!(s.snapshots.iter().all(|u| u.values() == u0.values()));
    }

    #[test]
    fn wave_without_forcing_is_linear_in_time() {
        let e = engine(0, 0);
        let (u0, u1) = (bump(&e, 1.0), bump(&e, -0.5));
        let b = SpectralFunction::heat(1.0).to_symbol();
        let psi = WaveCoefficients::Constant(0.0);
        let s = nonlinear_wave_solve(&e, &u0, &u1, &psi, &b, 2.0, 0.3, &PicardOptions::default()).unwrap();
        assert_eq!(s.iterations(), 1);
        for (t, u) in s.times.iter().zip(&s.snapshots) {
            for i in 0..u.values().len() {
                let exact = u0.values()[i] + u1.values()[i] * *t;
                assert!((u.values()[i] - exact).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn biinvariant_mode_rejects_other_types() {
        let e = engine(2, 2);
        let u0 = bump(&e, 1.0);
        let b = SpectralFunction::heat(1.0).to_symbol();
        assert!(nonlinear_heat_solve(&e, &u0, &b, 2.0, 0.1, &PicardOptions::default()).is_err());
        let literal = PicardOptions {
            mode: SolverMode::Relabelled,
            ..PicardOptions::default()
        };
        let s = nonlinear_heat_solve(&e, &u0, &b, 2.0, 0.05, &literal).unwrap();
        assert!(s.max_residual() < 1e-6);
    }

    #[test]
    fn heat_picard_converges_below_existence_time() {
        let e = engine(0, 0);
        let u0 = bump(&e, 0.5);
        let norm = lp_norm(&u0, 2.0).unwrap();
        let horizon = heat_existence_time(norm, 2f64.sqrt(), 2.0).unwrap() / 2.0;
        let b = SpectralFunction::heat(1.0).to_symbol();
        let s = nonlinear_heat_solve(&e, &u0, &b, 2.0, horizon, &PicardOptions::default()).unwrap();
        assert!(s.iterations() < 100);
        assert!(s.max_residual() < 1e-6, "{}", s.max_residual());
        // Contraction: increments shrink.
        assert!(s.increments.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn linear_heat_decays_for_trivial_type() {
        let e = engine(0, 0);
        let u0 = bump(&e, 1.0);
        let s = linear_heat_solve(&e, &u0, &[0.1, 0.5, 1.0, 2.0]).unwrap();
        let norms: Vec<f64> = s.snapshots.iter().map(|u| lp_norm(u, 2.0).unwrap()).collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]));
        assert!(linear_heat_solve(&e, &u0, &[0.5, 0.1]).is_err());
    }
}
