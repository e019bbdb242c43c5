//! The spherical Fourier transform of `(l, n)`-type functions, its inverse,
//! the Plancherel identity and `L^p` norms.
//!
//! With `φ = φ^{l,n}` and the Haar weight `Δ`,
//!
//! ```text
//! f̂_H(λ) = ∫_0^∞ f(a_t) φ_λ(a_{-t}) Δ(t) dt,       λ ∈ ℝ,
//! f̂_B(m) = ∫_0^∞ f(a_t) ψ_{im}(a_{-t}) Δ(t) dt,    m ∈ Γ_{l,n},
//! f(a_t) = (1/4π) ∫ f̂_H(λ) φ^{n,l}_λ(a_t) μ(λ) dλ + (1/2π) Σ_m f̂_B(m) ψ^{n,l}_{im}(a_t) |m|,
//! ```
//!
//! where `φ_λ(a_{-t}) = e^{i(n−l)π/2} φ_λ(a_t)`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::haar_weight;
use crate::numerics::{check_finite, RadialRule, SpectralGrid};
use crate::profile::RadialProfile;
use crate::spectrum::{gamma_of, plancherel_density, TypePair, DISCRETE_NORMALIZATION, PRINCIPAL_NORMALIZATION};
use crate::spherical::{discrete_closed_form, phi_on_grid, phi_radial, quarter_turn, EtaTable, SphericalParams};

/// Principal-series samples on a grid plus the discrete-series values.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pair: TypePair,
    grid: SpectralGrid,
    hat_h: Vec<Complex64>,
    hat_b: BTreeMap<i64, Complex64>,
}

impl SpectralData {
    pub fn new(
        pair: TypePair,
        grid: SpectralGrid,
        hat_h: Vec<Complex64>,
        hat_b: BTreeMap<i64, Complex64>,
    ) -> Result<Self> {
        if hat_h.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} principal samples for a grid of {}",
                hat_h.len(),
                grid.len()
            )));
        }
        check_finite(&hat_h, "principal spectral data")?;
        let keys: Vec<i64> = hat_b.keys().copied().collect();
        if keys != gamma_of(pair).members() {
            return Err(Error::invalid(format!(
                "discrete keys {keys:?} do not match the discrete spectrum of {pair}"
            )));
        }
        let disc: Vec<Complex64> = hat_b.values().copied().collect();
        check_finite(&disc, "discrete spectral data")?;
        Ok(Self {
            pair,
            grid,
            hat_h,
            hat_b,
        })
    }

    pub fn zero(pair: TypePair, grid: SpectralGrid) -> Self {
        let hat_b = gamma_of(pair)
            .members()
            .iter()
            .map(|&m| (m, Complex64::new(0.0, 0.0)))
            .collect();
        Self {
            pair,
            hat_h: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
            hat_b,
        }
    }

    pub fn pair(&self) -> TypePair {
        self.pair
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn hat_h(&self) -> &[Complex64] {
        &self.hat_h
    }

    pub fn hat_b(&self) -> &BTreeMap<i64, Complex64> {
        &self.hat_b
    }

    /// Pointwise product with a symbol given on the grid and at the discrete points.
    pub fn map<C, D>(&self, continuous: C, discrete: D) -> Result<Self>
    where
        C: Fn(f64) -> Complex64,
        D: Fn(i64) -> Result<Complex64>,
    {
        let hat_h = (0..self.grid.len())
            .map(|j| self.hat_h[j] * continuous(self.grid.lambda(j)))
            .collect();
        let mut hat_b = BTreeMap::new();
        for (&m, &v) in &self.hat_b {
            hat_b.insert(m, v * discrete(m)?);
        }
        Self::new(self.pair, self.grid.clone(), hat_h, hat_b)
    }

    /// `∫ |S|^p dν̃`, the spectral-measure integral of `|S|^p`.
    pub fn measure_of_power(&self, p: f64) -> f64 {
        let tau = self.pair.tau();
        let cont: f64 = (0..self.grid.len())
            .map(|j| self.grid.weight(j) * plancherel_density(tau, self.grid.lambda(j)) * self.hat_h[j].norm().powf(p))
            .sum();
        let disc: f64 = self.hat_b.iter().map(|(m, v)| v.norm().powf(p) * m.abs() as f64).sum();
        PRINCIPAL_NORMALIZATION * cont + DISCRETE_NORMALIZATION * disc
    }

    /// `(1/4π) ∫ |f̂_H|² μ dλ`.
    pub fn principal_energy(&self) -> f64 {
        let tau = self.pair.tau();
        let cont: f64 = (0..self.grid.len())
            .map(|j| self.grid.weight(j) * plancherel_density(tau, self.grid.lambda(j)) * self.hat_h[j].norm_sqr())
            .sum();
        PRINCIPAL_NORMALIZATION * cont
    }

    /// `(1/2π) Σ |f̂_B(m)|² |m|`.
    pub fn discrete_energy(&self) -> f64 {
        DISCRETE_NORMALIZATION
            * self
                .hat_b
                .iter()
                .map(|(m, v)| v.norm_sqr() * m.abs() as f64)
                .sum::<f64>()
    }

    /// `sup |S|` over the grid and the discrete points.
    pub fn sup_norm(&self) -> f64 {
        self.hat_h
            .iter()
            .chain(self.hat_b.values())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Share of `∫ |f̂_H|² μ` carried by the outer eighth of the grid on each side.
    pub fn tail_fraction(&self) -> f64 {
        let tau = self.pair.tau();
        let cut = 0.875 * self.grid.lambda_max();
        let (mut tail, mut total) = (0.0, 0.0);
        for j in 0..self.grid.len() {
            let l = self.grid.lambda(j);
            let v = self.grid.weight(j) * plancherel_density(tau, l) * self.hat_h[j].norm_sqr();
            total += v;
            if l.abs() > cut {
                tail += v;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    pub fn to_json(&self) -> Value {
        let discrete: serde_json::Map<String, Value> = self
            .hat_b
            .iter()
            .map(|(m, v)| (m.to_string(), json!([v.re, v.im])))
            .collect();
        json!({
            "l": self.pair.l(),
            "n": self.pair.n(),
            "lambda": self.grid.lambdas(),
            "hat_H": self.hat_h.iter().map(|v| json!([v.re, v.im])).collect::<Vec<_>>(),
            "discrete": discrete,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::invalid(format!("spectral data: {what}"));
        let int = |key: &str| {
            value
                .get(key)
                .and_then(Value::as_i64)
                .ok_or_else(|| bad(&format!("missing integer '{key}'")))
        };
        let pair = TypePair::new(int("l")?, int("n")?)?;
        let lambdas: Vec<f64> = value
            .get("lambda")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing 'lambda'"))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| bad("non-numeric lambda")))
            .collect::<Result<_>>()?;
        if lambdas.len() < 3 {
            return Err(bad("lambda grid too short"));
        }
        let grid = SpectralGrid::new(-lambdas[0], lambdas.len())?;
        for (j, &l) in lambdas.iter().enumerate() {
            if (l - grid.lambda(j)).abs() > 1e-9 * grid.lambda_max() {
                return Err(bad("lambda grid must be uniform and symmetric"));
            }
        }
        let pair_of = |v: &Value| -> Result<Complex64> {
            let a = v
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| bad("values must be [re, im]"))?;
            let re = a[0].as_f64().ok_or_else(|| bad("non-numeric value"))?;
            let im = a[1].as_f64().ok_or_else(|| bad("non-numeric value"))?;
            Ok(Complex64::new(re, im))
        };
        let hat_h = value
            .get("hat_H")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing 'hat_H'"))?
            .iter()
            .map(pair_of)
            .collect::<Result<Vec<_>>>()?;
        let mut hat_b = BTreeMap::new();
        if let Some(map) = value.get("discrete").and_then(Value::as_object) {
            for (k, v) in map {
                let m: i64 = k.parse().map_err(|_| bad("discrete keys must be integers"))?;
                hat_b.insert(m, pair_of(v)?);
            }
        }
        Self::new(pair, grid, hat_h, hat_b)
    }
}

/// Precomputed kernel tables for one type pair, radial rule and spectral grid.
///
/// Rows of `φ^{l,n}_λ(a_t)` over the grid are computed on first use and
/// shared; independent rows are filled in parallel.
pub struct SpectralEngine {
    pair: TypePair,
    rule: RadialRule,
    grid: SpectralGrid,
    eta: BTreeMap<i64, f64>,
    rows: Vec<OnceLock<Vec<Complex64>>>,
    // φ^{l,n}_{i|m|}(a_t) and φ^{n,l}_{i|m|}(a_t) on the radial nodes.
    discrete_rows: BTreeMap<i64, (Vec<f64>, Vec<f64>)>,
}

impl std::fmt::Debug for SpectralEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralEngine")
            .field("pair", &self.pair)
            .field("nodes", &self.rule.len())
            .field("lambda_max", &self.grid.lambda_max())
            .field("samples", &self.grid.len())
            .field("eta", &self.eta)
            .finish()
    }
}

impl SpectralEngine {
    pub fn new(pair: TypePair, rule: RadialRule, grid: SpectralGrid, eta: &EtaTable) -> Result<Self> {
        let gamma = gamma_of(pair);
        let mut etas = BTreeMap::new();
        let mut discrete_rows = BTreeMap::new();
        for &m in gamma.members() {
            etas.insert(m, eta.require(pair, m)?);
            let k = m.abs();
            let fwd = rule
                .nodes()
                .iter()
                .map(|&t| discrete_closed_form(pair, k, t))
                .collect::<Result<Vec<_>>>()?;
            let inv = rule
                .nodes()
                .iter()
                .map(|&t| discrete_closed_form(pair.swapped(), k, t))
                .collect::<Result<Vec<_>>>()?;
            discrete_rows.insert(m, (fwd, inv));
        }
        let rows = (0..rule.len()).map(|_| OnceLock::new()).collect();
        Ok(Self {
            pair,
            rule,
            grid,
            eta: etas,
            rows,
            discrete_rows,
        })
    }

    /// Engine with `η` from the Schur identity for every discrete parameter.
    pub fn calibrated(pair: TypePair, rule: RadialRule, grid: SpectralGrid) -> Result<Self> {
        Self::new(pair, rule, grid, &EtaTable::for_pair(pair)?)
    }

    pub fn pair(&self) -> TypePair {
        self.pair
    }

    pub fn rule(&self) -> &RadialRule {
        &self.rule
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn eta(&self, m: i64) -> Option<f64> {
        self.eta.get(&m).copied()
    }

    fn row(&self, i: usize) -> &[Complex64] {
        self.rows[i].get_or_init(|| phi_on_grid(self.pair, self.rule.nodes()[i], &self.grid))
    }

    fn fill_rows(&self, indices: &[usize]) {
        indices.par_iter().for_each(|&i| {
            self.row(i);
        });
    }

    fn check_profile(&self, f: &RadialProfile) -> Result<()> {
        if f.pair() != self.pair {
            return Err(Error::invalid(format!(
                "profile has type {} but the engine handles {}",
                f.pair(),
                self.pair
            )));
        }
        if f.rule().panels() != self.rule.panels() || f.rule().per_panel() != self.rule.per_panel() {
            return Err(Error::invalid("profile grid differs from the engine's radial rule"));
        }
        Ok(())
    }

    /// Both parts of the transform on the engine's grid.
    pub fn forward(&self, f: &RadialProfile) -> Result<SpectralData> {
        self.check_profile(f)?;
        let phase = quarter_turn(self.pair.n() - self.pair.l());
        let active: Vec<usize> = (0..self.rule.len())
            .filter(|&i| f.values()[i] != Complex64::new(0.0, 0.0))
            .collect();
        self.fill_rows(&active);
        let coeff: Vec<Complex64> = active
            .iter()
            .map(|&i| f.values()[i] * (self.rule.weights()[i] * haar_weight(self.rule.nodes()[i])))
            .collect();
        let mut hat_h = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (&i, &c) in active.iter().zip(&coeff) {
            for (h, r) in hat_h.iter_mut().zip(self.row(i)) {
                *h += c * r;
            }
        }
        for h in hat_h.iter_mut() {
            *h *= phase;
        }
        let mut hat_b = BTreeMap::new();
        for (&m, (fwd, _)) in &self.discrete_rows {
            let s: Complex64 = active.iter().zip(&coeff).map(|(&i, &c)| c * fwd[i]).sum();
            hat_b.insert(m, s * phase * self.eta[&m]);
        }
        SpectralData::new(self.pair, self.grid.clone(), hat_h, hat_b)
    }

    fn check_data(&self, s: &SpectralData) -> Result<()> {
        if s.pair != self.pair || s.grid != self.grid {
            return Err(Error::invalid(
                "spectral data does not match the engine's pair and grid",
            ));
        }
        Ok(())
    }

    /// Inversion formula on the engine's radial nodes.
    pub fn inverse(&self, s: &SpectralData) -> Result<RadialProfile> {
        self.check_data(s)?;
        let all: Vec<usize> = (0..self.rule.len()).collect();
        self.fill_rows(&all);
        let weighted = self.weighted_principal(s);
        let values = all
            .par_iter()
            .map(|&i| {
                let row = self.row(i);
                let cont: Complex64 = weighted.iter().zip(row).map(|(w, r)| w * r.conj()).sum();
                let mut v = cont * PRINCIPAL_NORMALIZATION;
                for (&m, (_, inv)) in &self.discrete_rows {
                    v += s.hat_b[&m] * (DISCRETE_NORMALIZATION * self.eta[&m] * inv[i] * m.abs() as f64);
                }
                v
            })
            .collect();
        RadialProfile::new(self.pair, self.rule.clone(), values, None)
    }

    // w_j μ_j Ŝ_j conj(e^{i(n−l)π/2}); the row conjugate supplies φ^{n,l}.
    fn weighted_principal(&self, s: &SpectralData) -> Vec<Complex64> {
        let tau = self.pair.tau();
        let phase = quarter_turn(self.pair.n() - self.pair.l()).conj();
        (0..self.grid.len())
            .map(|j| s.hat_h[j] * phase * (self.grid.weight(j) * plancherel_density(tau, self.grid.lambda(j))))
            .collect()
    }

    /// Inversion formula at an arbitrary radial coordinate `t ≥ 0`.
    pub fn inverse_at(&self, s: &SpectralData, t: f64) -> Result<Complex64> {
        self.check_data(s)?;
        inverse_with_eta(s, t, &self.eta)
    }

    /// `‖f‖₂²` against the spectral side of the Plancherel identity.
    pub fn plancherel_check(&self, f: &RadialProfile) -> Result<PlancherelReport> {
        let lhs = lp_norm(f, 2.0)?.powi(2);
        let data = self.forward(f)?;
        let rhs = data.principal_energy() + data.discrete_energy();
        let rel_err = if lhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / lhs };
        Ok(PlancherelReport { lhs, rhs, rel_err })
    }
}

fn inverse_with_eta(s: &SpectralData, t: f64, eta: &BTreeMap<i64, f64>) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("radial coordinate must be >= 0, got {t}")));
    }
    let pair = s.pair;
    let tau = pair.tau();
    let swapped = pair.swapped();
    let row = phi_on_grid(swapped, t, &s.grid);
    let mut cont = Complex64::new(0.0, 0.0);
    for (j, (h, r)) in s.hat_h.iter().zip(&row).enumerate() {
        cont += h * r * (s.grid.weight(j) * plancherel_density(tau, s.grid.lambda(j)));
    }
    let mut v = cont * PRINCIPAL_NORMALIZATION;
    for (&m, &b) in &s.hat_b {
        let e = eta.get(&m).copied().ok_or(Error::Uncalibrated {
            l: pair.l(),
            n: pair.n(),
            m,
        })?;
        let k = m.abs();
        let psi = if t == 0.0 {
            phi_radial(&SphericalParams::discrete(swapped, m)?, 0.0)?.re
        } else {
            discrete_closed_form(swapped, k, t)?
        };
        v += b * (DISCRETE_NORMALIZATION * e * psi * k as f64);
    }
    Ok(v)
}

/// Both sides of the Plancherel identity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PlancherelReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// `f̂_H(λ)` at a single spectral parameter.
pub fn forward_principal(f: &RadialProfile, lambda: f64) -> Result<Complex64> {
    let pair = f.pair();
    let params = SphericalParams::principal(pair, lambda)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&t, &w), &v) in f.nodes().iter().zip(f.rule().weights()).zip(f.values()) {
        if v != Complex64::new(0.0, 0.0) {
            acc += v * phi_radial(&params, t)? * (w * haar_weight(t));
        }
    }
    Ok(acc * quarter_turn(pair.n() - pair.l()))
}

/// `f̂_B(m)`.
pub fn forward_discrete(f: &RadialProfile, m: i64, eta: &EtaTable) -> Result<Complex64> {
    let pair = f.pair();
    let params = SphericalParams::discrete(pair, m)?;
    let e = eta.require(pair, m)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&t, &w), &v) in f.nodes().iter().zip(f.rule().weights()).zip(f.values()) {
        if v != Complex64::new(0.0, 0.0) {
            acc += v * phi_radial(&params, t)? * (w * haar_weight(t));
        }
    }
    Ok(acc * quarter_turn(pair.n() - pair.l()) * e)
}

/// Inversion formula at `a_t`.
pub fn inverse(s: &SpectralData, t: f64, eta: &EtaTable) -> Result<Complex64> {
    let mut etas = BTreeMap::new();
    for &m in s.hat_b.keys() {
        etas.insert(m, eta.require(s.pair, m)?);
    }
    inverse_with_eta(s, t, &etas)
}

/// `(∫ |f(a_t)|^p Δ(t) dt)^{1/p}`, or the largest sample for `p = ∞`.
pub fn lp_norm(f: &RadialProfile, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mut acc = 0.0;
    for ((&t, &w), v) in f.nodes().iter().zip(f.rule().weights()).zip(f.values()) {
        acc += w * haar_weight(t) * v.norm().powf(p);
    }
    Ok(acc.powf(1.0 / p))
}

/// Plancherel check on a fresh engine with `η` from the Schur identity.
pub fn plancherel_check(f: &RadialProfile, grid: &SpectralGrid) -> Result<PlancherelReport> {
    SpectralEngine::calibrated(f.pair(), f.rule().clone(), grid.clone())?.plancherel_check(f)
}

/// Result of [`forward_adaptive`].
#[derive(Debug, Clone)]
pub struct AdaptiveTransform {
    pub data: SpectralData,
    /// False when the range cap was reached with the tail still too large.
    pub converged: bool,
    pub tail_fraction: f64,
}

/// Forward transform with the spectral range doubled (same spacing) until the
/// outer band carries less than `tail_tol` of `∫|f̂_H|²μ`, at most
/// `max_doublings` times and never beyond what the profile's radial rule
/// resolves ([`RadialRule::max_resolved_frequency`]).
pub fn forward_adaptive(
    f: &RadialProfile,
    grid: &SpectralGrid,
    eta: &EtaTable,
    tail_tol: f64,
    max_doublings: usize,
) -> Result<AdaptiveTransform> {
    let mut grid = grid.clone();
    let mut doublings = 0;
    loop {
        let engine = SpectralEngine::new(f.pair(), f.rule().clone(), grid.clone(), eta)?;
        let data = engine.forward(f)?;
        let tail = data.tail_fraction();
        let resolvable = 2.0 * grid.lambda_max() <= f.rule().max_resolved_frequency();
        if tail < tail_tol || doublings == max_doublings || !resolvable {
            return Ok(AdaptiveTransform {
                converged: tail < tail_tol,
                tail_fraction: tail,
                data,
            });
        }
        grid = grid.extended();
        doublings += 1;
    }
}
