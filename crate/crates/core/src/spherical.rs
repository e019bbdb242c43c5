//! Matrix coefficients of the principal and discrete series.
//!
//! For a type pair `(l, n)` and spectral parameter `λ`,
//!
//! ```text
//! φ^{l,n}_λ(x) = ∫_K e^{-(iλ+1) H(xk)} e^{-ilθ} e^{inϕ(xk)} dk,   k = rotation(θ),
//! ```
//!
//! where `H(xk)` and `ϕ(xk)` are the diagonal-flow and rotation parts of the
//! Iwasawa decomposition of `xk`. The function is of type `(n, l)`:
//! `φ(k_{θ1} a_t k_{θ2}) = e^{inθ1} φ(a_t) e^{ilθ2}`, so it is enough to know it
//! on the diagonal flow.
//!
//! On `a_t` the integrand is symmetric under `θ ↦ π − θ` up to conjugation of
//! the character part, which gives
//!
//! ```text
//! φ^{l,n}_λ(a_t) = (2/π) ∫_0^{π/2} e^{-(iλ+1)H} cos(nϕ − lθ) dθ.
//! ```
//!
//! The integral is a sum `Σ r_j e^{-iλ H_j}` with real weights. For small `t`
//! the nodes are the equispaced circle nodes; for larger `t` the integrand
//! concentrates near `θ = π/2` and the substitution `cot θ = e^{-2t} sinh w`
//! followed by the trapezoid rule in `w` keeps it spectrally accurate.
//!
//! At the discrete parameters `λ = i|m|` the integral suffers cancellation for
//! large `t` and a terminating hypergeometric closed form is used instead,
//! with its normalization matched against the quadrature at moderate `t`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{cartan, haar_weight, iwasawa, rotation, CartanCoords, GroupElement};
use crate::numerics::{integrate_periodic, PeriodicRule, RadialRule, SpectralGrid};
use crate::spectrum::{gamma_of, ParityClass, TypePair};

/// Below this radius the equispaced circle rule is used.
pub const SMALL_T: f64 = 0.5;

/// Half-width of the `w` window beyond `2t`; the integrand decays like `e^{-|w|}`.
const W_TAIL: f64 = 36.0;

/// `e^{iπk/2}` for integer `k`, exact.
pub fn quarter_turn(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Pair and spectral parameter of a matrix coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalParams {
    pair: TypePair,
    lambda: Complex64,
}

impl SphericalParams {
    pub fn new(pair: TypePair, lambda: Complex64) -> Result<Self> {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::invalid("spectral parameter must be finite"));
        }
        Ok(Self { pair, lambda })
    }

    pub fn principal(pair: TypePair, lambda: f64) -> Result<Self> {
        Self::new(pair, Complex64::new(lambda, 0.0))
    }

    /// `λ = i|m|` for a discrete parameter `m`.
    pub fn discrete(pair: TypePair, m: i64) -> Result<Self> {
        if !gamma_of(pair).contains(m) {
            return Err(discrete_error(pair, m));
        }
        Self::new(pair, Complex64::new(0.0, m.abs() as f64))
    }

    pub fn pair(&self) -> TypePair {
        self.pair
    }

    pub fn tau(&self) -> ParityClass {
        self.pair.tau()
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    // |m| when λ = i|m| for some m in Γ.
    fn discrete_index(&self) -> Option<i64> {
        if self.lambda.re != 0.0 || self.lambda.im <= 0.0 || self.lambda.im.fract() != 0.0 {
            return None;
        }
        let k = self.lambda.im as i64;
        let gamma = gamma_of(self.pair);
        (gamma.contains(k) || gamma.contains(-k)).then_some(k)
    }
}

fn discrete_error(pair: TypePair, m: i64) -> Error {
    if gamma_of(pair).is_empty() {
        Error::NoDiscreteSpectrum {
            l: pair.l(),
            n: pair.n(),
        }
    } else {
        Error::NotDiscreteParameter {
            l: pair.l(),
            n: pair.n(),
            m,
        }
    }
}

/// Quadrature resolution for the radial integral; higher levels are finer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Level(u32);

impl Level {
    /// Resolution adequate for `|λ| ≤ lambda_abs`.
    pub(crate) fn for_lambda(lambda_abs: f64) -> Self {
        let mut k = 0;
        // Trapezoid step 0.2·2^-k must stay below 2.5/|λ|; the circle rule
        // needs 256·2^k ≥ 6.4|λ|, which is the same threshold.
        while 0.2 / f64::from(1u32 << k) > 2.5 / lambda_abs.max(1e-300) && k < 20 {
            k += 1;
        }
        Level(k)
    }

    pub(crate) fn finer(self) -> Self {
        Level(self.0 + 1)
    }
}

/// Nodes `H_j` and real weights `r_j` with `φ^{l,n}_λ(a_t) = Σ r_j e^{-iλ H_j}`.
#[derive(Debug, Clone)]
pub(crate) struct RadialKernel {
    pub(crate) h: Vec<f64>,
    pub(crate) r: Vec<f64>,
}

impl RadialKernel {
    /// Kernel for `t ≥ 0`.
    pub(crate) fn new(pair: TypePair, t: f64, level: Level) -> Self {
        if t <= SMALL_T {
            Self::circle(pair, t, PeriodicRule::DEFAULT_NODES << level.0)
        } else {
            Self::substituted(pair, t, 0.2 / f64::from(1u32 << level.0))
        }
    }

    fn point(pair: TypePair, t: f64, c: f64, s: f64, theta: f64) -> (f64, f64) {
        let a = t.exp() * c;
        let b = (-t).exp() * s;
        let e2h = a * a + b * b;
        let phi = b.atan2(a);
        let char_part = (pair.n() as f64 * phi - pair.l() as f64 * theta).cos();
        (0.5 * e2h.ln(), char_part / e2h.sqrt())
    }

    fn circle(pair: TypePair, t: f64, nodes: usize) -> Self {
        // π-periodic integrand: M = nodes/2 points on [0, π), paired j ↔ M − j.
        let m = nodes / 2;
        let quarter = m / 2;
        let mut h = Vec::with_capacity(quarter + 1);
        let mut r = Vec::with_capacity(quarter + 1);
        for j in 0..=quarter {
            let theta = PI * j as f64 / m as f64;
            let (s, c) = if j == quarter { (1.0, 0.0) } else { theta.sin_cos() };
            let (hj, g) = Self::point(pair, t, c, s, theta);
            let mult = if j == 0 || j == quarter { 1.0 } else { 2.0 };
            h.push(hj);
            r.push(mult * g / m as f64);
        }
        Self { h, r }
    }

    fn substituted(pair: TypePair, t: f64, step: f64) -> Self {
        let q = (-2.0 * t).exp();
        let count = ((2.0 * t + W_TAIL) / step).ceil() as usize;
        let mut h = Vec::with_capacity(count + 1);
        let mut r = Vec::with_capacity(count + 1);
        for j in 0..=count {
            let w = j as f64 * step;
            let cot = q * w.sinh();
            let norm = cot.hypot(1.0);
            let (c, s) = (cot / norm, 1.0 / norm);
            let jac = q * w.cosh() / (norm * norm);
            let theta = s.atan2(c);
            let (hj, g) = Self::point(pair, t, c, s, theta);
            let mult = if j == 0 { 1.0 } else { 2.0 };
            h.push(hj);
            r.push(mult * step / PI * jac * g);
        }
        Self { h, r }
    }

    pub(crate) fn eval(&self, lambda: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&hj, &rj) in self.h.iter().zip(&self.r) {
            acc += rj * (Complex64::new(0.0, -1.0) * lambda * hj).exp();
        }
        acc
    }

    /// `φ` at `λ_k = lambda0 + k·step`, `k < count`, written to `out`.
    pub(crate) fn sweep(&self, lambda0: f64, step: f64, out: &mut [Complex64]) {
        const RESET: usize = 64;
        let n = self.h.len();
        let mut ur = vec![0.0; n];
        let mut ui = vec![0.0; n];
        let mut cr = vec![0.0; n];
        let mut ci = vec![0.0; n];
        for j in 0..n {
            let (s, c) = (step * self.h[j]).sin_cos();
            cr[j] = c;
            ci[j] = -s;
        }
        for (k, slot) in out.iter_mut().enumerate() {
            if k % RESET == 0 {
                let lambda = lambda0 + k as f64 * step;
                for j in 0..n {
                    let (s, c) = (lambda * self.h[j]).sin_cos();
                    ur[j] = c;
                    ui[j] = -s;
                }
            }
            let (mut ar, mut ai) = (0.0, 0.0);
            for j in 0..n {
                ar += self.r[j] * ur[j];
                ai += self.r[j] * ui[j];
            }
            *slot = Complex64::new(ar, ai);
            for j in 0..n {
                let (x, y) = (ur[j], ui[j]);
                ur[j] = x * cr[j] - y * ci[j];
                ui[j] = x * ci[j] + y * cr[j];
            }
        }
    }
}

/// `φ^{l,n}_λ(a_t)` for real `t` of either sign.
pub fn phi_radial(params: &SphericalParams, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::invalid("t must be finite"));
    }
    let pair = params.pair;
    if t < 0.0 {
        // a_{-t} = k_{π/2} a_t k_{-π/2} and φ is of (n,l) type.
        let v = phi_radial(params, -t)?;
        return Ok(quarter_turn(pair.n() - pair.l()) * v);
    }
    if t > 0.0 {
        if let Some(k) = params.discrete_index() {
            return Ok(Complex64::new(discrete_closed_form(pair, k, t)?, 0.0));
        }
    }
    let level = Level::for_lambda(params.lambda.norm());
    Ok(RadialKernel::new(pair, t, level).eval(params.lambda))
}

/// `φ^{l,n}_λ(a_t)` at every node of a spectral grid (real `λ`).
///
/// Uses `φ_{-λ} = conj(φ_λ)` for real `λ` and sweeps the nonnegative half of
/// the grid by rotation, rebuilding the quadrature only when `|λ|` crosses a
/// resolution threshold.
pub fn phi_on_grid(pair: TypePair, t: f64, grid: &SpectralGrid) -> Vec<Complex64> {
    let zero = grid.zero_index();
    let step = grid.step();
    let ta = t.abs();
    let mut half = vec![Complex64::new(0.0, 0.0); zero + 1];
    let mut k = 0;
    while k <= zero {
        let level = Level::for_lambda(k as f64 * step);
        let mut end = k;
        while end < zero && Level::for_lambda((end + 1) as f64 * step) == level {
            end += 1;
        }
        RadialKernel::new(pair, ta, level).sweep(k as f64 * step, step, &mut half[k..=end]);
        k = end + 1;
    }
    let phase = if t < 0.0 {
        quarter_turn(pair.n() - pair.l())
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, v) in half.iter().enumerate() {
        out[zero + k] = phase * v;
        out[zero - k] = phase * v.conj();
    }
    out
}

/// `φ` at a point given in Cartan coordinates.
pub fn phi(params: &SphericalParams, x: &CartanCoords) -> Result<Complex64> {
    let radial = phi_radial(params, x.t)?;
    let pair = params.pair;
    let left = Complex64::from_polar(1.0, pair.n() as f64 * x.theta1);
    let right = Complex64::from_polar(1.0, pair.l() as f64 * x.theta2);
    Ok(left * radial * right)
}

/// `φ` at a group element, through its Cartan decomposition.
pub fn phi_at(params: &SphericalParams, x: &GroupElement) -> Result<Complex64> {
    phi(params, &cartan(x))
}

/// `φ` by quadrature of the defining integral over the full circle, with the
/// Iwasawa decomposition of `x·k` computed numerically at every node.
pub fn phi_by_iwasawa(params: &SphericalParams, x: &GroupElement, rule: &PeriodicRule) -> Result<Complex64> {
    let (l, n) = (params.pair.l() as f64, params.pair.n() as f64);
    let lambda = params.lambda;
    integrate_periodic(
        |theta| {
            let xk = *x * rotation(theta);
            let iw = iwasawa(&xk);
            let decay = (-(Complex64::new(0.0, 1.0) * lambda + 1.0) * iw.t).exp();
            decay * Complex64::from_polar(1.0, -l * theta) * Complex64::from_polar(1.0, n * iw.theta)
        },
        rule,
    )
}

/// `φ` with a convergence check: the value is recomputed at the next finer
/// quadrature level and must agree to within `tol` (absolute).
pub fn phi_checked(params: &SphericalParams, x: &CartanCoords, tol: f64) -> Result<Complex64> {
    let v = phi(params, x)?;
    if x.t == 0.0 || params.discrete_index().is_some() {
        return Ok(v);
    }
    let level = Level::for_lambda(params.lambda.norm());
    let t = x.t.abs();
    let coarse = RadialKernel::new(params.pair, t, level).eval(params.lambda);
    let fine = RadialKernel::new(params.pair, t, level.finer()).eval(params.lambda);
    let change = (fine - coarse).norm();
    if change > tol {
        return Err(Error::Quadrature(format!(
            "node doubling changed phi by {change:e} at t = {}, lambda = {}",
            x.t, params.lambda
        )));
    }
    Ok(v)
}

/// The elementary spherical function `φ^{0,0}_λ(a_t)`, real for real `λ`.
pub fn phi_elementary(lambda: f64, t: f64) -> Result<f64> {
    let params = SphericalParams::principal(TypePair::new(0, 0)?, lambda)?;
    let v = phi_radial(&params, t)?;
    if v.im.abs() > 1e-13 * v.re.abs().max(1.0) {
        return Err(Error::Quadrature(format!(
            "elementary spherical function has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Shape of `φ^{l,n}_{ik}(a_t)`, `t > 0`, up to a constant:
/// `tanh^α t · sech^{k+1} t · ₂F₁(−N, b; α+1; tanh² t)`
/// with `α = |l−n|/2`, `β = |l+n|/2`, `b = (α+β+1+k)/2`, `N = (β−α−k−1)/2`.
fn discrete_shape(pair: TypePair, k: i64, t: f64) -> f64 {
    let alpha = (pair.l() - pair.n()).abs() as f64 / 2.0;
    let beta = (pair.l() + pair.n()).abs() as f64 / 2.0;
    let kf = k as f64;
    let b = 0.5 * (alpha + beta + 1.0 + kf);
    let degree = ((beta - alpha - kf - 1.0) / 2.0).round() as i64;
    let th = t.tanh();
    let x = th * th;
    let mut term = 1.0;
    let mut poly = 1.0;
    for j in 0..degree {
        let jf = j as f64;
        term *= (jf - degree as f64) * (b + jf) / ((alpha + 1.0 + jf) * (jf + 1.0)) * x;
        poly += term;
    }
    let sech = 1.0 / t.cosh();
    th.powf(alpha) * sech.powi((k + 1) as i32) * poly
}

type ConstantCache = Mutex<HashMap<(i64, i64, i64), f64>>;

fn constant_cache() -> &'static ConstantCache {
    static CACHE: OnceLock<ConstantCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const MATCH_POINTS: [f64; 4] = [0.5, 0.8, 1.1, 1.4];

/// Normalization of the closed form, fitted to the quadrature by least squares.
fn discrete_constant(pair: TypePair, k: i64) -> Result<f64> {
    let key = (pair.l(), pair.n(), k);
    if let Some(&c) = constant_cache().lock().expect("cache lock").get(&key) {
        return Ok(c);
    }
    let lambda = Complex64::new(0.0, k as f64);
    let level = Level::for_lambda(k as f64).finer();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut samples = Vec::new();
    for &t in &MATCH_POINTS {
        let q = RadialKernel::new(pair, t, level).eval(lambda).re;
        let s = discrete_shape(pair, k, t);
        num += q * s;
        den += s * s;
        samples.push((q, s));
    }
    let c = num / den;
    let scale = samples.iter().map(|(q, _)| q.abs()).fold(0.0, f64::max);
    let misfit = samples.iter().map(|(q, s)| (q - c * s).abs()).fold(0.0, f64::max);
    if !(c.is_finite() && misfit <= 1e-10 * scale) {
        return Err(Error::Quadrature(format!(
            "closed form for {pair} at i{k} does not match quadrature (misfit {misfit:e})"
        )));
    }
    constant_cache().lock().expect("cache lock").insert(key, c);
    Ok(c)
}

/// `φ^{l,n}_{ik}(a_t)` for `t ≥ 0` and `±k ∈ Γ_{l,n}`.
pub(crate) fn discrete_closed_form(pair: TypePair, k: i64, t: f64) -> Result<f64> {
    Ok(discrete_constant(pair, k)? * discrete_shape(pair, k, t))
}

/// Calibrated constants `η^{l,n}(m)` with `η^{l,n} = η^{n,l} > 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EtaTable {
    entries: BTreeMap<(i64, i64, i64), EtaEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaEntry {
    pub l: i64,
    pub n: i64,
    pub m: i64,
    pub eta: f64,
    pub tol: f64,
}

#[derive(Serialize, Deserialize)]
struct EtaDocument {
    entries: Vec<EtaEntry>,
}

impl EtaTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(pair: TypePair, m: i64) -> (i64, i64, i64) {
        (pair.l().min(pair.n()), pair.l().max(pair.n()), m)
    }

    pub fn get(&self, pair: TypePair, m: i64) -> Option<f64> {
        self.entries.get(&Self::key(pair, m)).map(|e| e.eta)
    }

    /// Like [`EtaTable::get`] but with the uncalibrated error.
    pub fn require(&self, pair: TypePair, m: i64) -> Result<f64> {
        self.get(pair, m).ok_or(Error::Uncalibrated {
            l: pair.l(),
            n: pair.n(),
            m,
        })
    }

    /// Add an entry. Existing entries are never overwritten; a conflicting
    /// value is an error.
    pub fn insert(&mut self, pair: TypePair, m: i64, eta: f64, tol: f64) -> Result<()> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::invalid(format!("eta must be positive, got {eta}")));
        }
        let key = Self::key(pair, m);
        if let Some(old) = self.entries.get(&key) {
            if ((old.eta - eta) / old.eta).abs() > old.tol.max(tol) {
                return Err(Error::invalid(format!(
                    "eta for {pair}, m = {m} already recorded as {} (new value {eta})",
                    old.eta
                )));
            }
            return Ok(());
        }
        self.entries.insert(
            key,
            EtaEntry {
                l: key.0,
                n: key.1,
                m,
                eta,
                tol,
            },
        );
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = &EtaEntry> {
        self.entries.values()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EtaDocument {
            entries: self.entries.values().copied().collect(),
        })
        .expect("eta table serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: EtaDocument =
            serde_json::from_value(value.clone()).map_err(|e| Error::invalid(format!("bad eta table: {e}")))?;
        let mut table = Self::new();
        for e in doc.entries {
            table.insert(TypePair::new(e.l, e.n)?, e.m, e.eta, e.tol)?;
        }
        Ok(table)
    }

    /// Table holding the Schur-identity values for every discrete parameter of `pair`.
    pub fn for_pair(pair: TypePair) -> Result<Self> {
        let mut table = Self::new();
        for &m in gamma_of(pair).members() {
            table.insert(pair, m, eta_from_schur(pair, m)?, SCHUR_TOL)?;
        }
        Ok(table)
    }
}

/// `ψ^{l,n}_{im}(x) = η^{l,n}(m) φ^{l,n}_{i|m|}(x)`.
pub fn psi_discrete(pair: TypePair, m: i64, x: &CartanCoords, eta: &EtaTable) -> Result<Complex64> {
    let params = SphericalParams::discrete(pair, m)?;
    let e = eta.require(pair, m)?;
    Ok(phi(&params, x)? * e)
}

const SCHUR_TOL: f64 = 1e-10;

/// `η²` from `∫_G ψ^{l,n}_{im}(x) ψ^{n,l}_{im}(x⁻¹) dx = 2π/|m|`, the identity
/// that makes the inversion formula reproduce spectral data concentrated at `i·m`.
pub fn eta_from_schur(pair: TypePair, m: i64) -> Result<f64> {
    if !gamma_of(pair).contains(m) {
        return Err(discrete_error(pair, m));
    }
    let k = m.abs();
    // The integrand decays like e^{-2k t}.
    let t_max = (40.0 / k as f64).max(8.0);
    let rule = RadialRule::uniform(0.0, t_max, 0.5, 32)?;
    let swapped = pair.swapped();
    let mut integral = 0.0;
    for (&t, &w) in rule.nodes().iter().zip(rule.weights()) {
        integral += w * haar_weight(t) * discrete_closed_form(pair, k, t)? * discrete_closed_form(swapped, k, t)?;
    }
    let integral = quarter_turn(pair.n() - pair.l()) * integral;
    let fail = |reason: String| Error::CalibrationFailure {
        l: pair.l(),
        n: pair.n(),
        m,
        reason,
    };
    if integral.im.abs() > 1e-12 * integral.re.abs() {
        return Err(fail(format!("pairing integral {integral} is not real")));
    }
    let eta2 = 2.0 * PI / (k as f64 * integral.re);
    if !(eta2 > 0.0 && eta2.is_finite()) {
        return Err(fail(format!("pairing integral {integral} gives eta^2 = {eta2}")));
    }
    Ok(eta2.sqrt())
}

/// Result of [`calibrate_eta`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCalibration {
    pub l: i64,
    pub n: i64,
    pub m: i64,
    /// Calibrated value.
    pub eta: f64,
    /// Independent estimate from each reference profile.
    pub per_profile: Vec<f64>,
    /// Largest relative deviation of a per-profile estimate from `eta`.
    pub spread: f64,
}

/// Calibrate `η^{l,n}(m)`.
///
/// The value comes from the Schur-type identity ([`eta_from_schur`]). Each
/// reference profile gives an independent estimate: the part of `‖f‖₂²` not
/// accounted for by the principal series and the other discrete parameters
/// must equal `(1/2π)|m| η² |∫ f φ^{l,n}_{i|m|} Δ|²`. All estimates must agree
/// with the returned value to `tol` (relative), otherwise calibration fails.
pub fn calibrate_eta(
    pair: TypePair,
    m: i64,
    reference_profiles: &[crate::profile::RadialProfile],
    grid: &crate::numerics::SpectralGrid,
    tol: f64,
) -> Result<EtaCalibration> {
    use crate::transform::SpectralEngine;

    let fail = |reason: String| Error::CalibrationFailure {
        l: pair.l(),
        n: pair.n(),
        m,
        reason,
    };
    if !gamma_of(pair).contains(m) {
        return Err(discrete_error(pair, m));
    }
    if reference_profiles.len() < 2 {
        return Err(Error::invalid("calibration needs at least two reference profiles"));
    }
    let eta = eta_from_schur(pair, m)?;
    let table = EtaTable::for_pair(pair)?;
    let mut per_profile = Vec::with_capacity(reference_profiles.len());
    let mut engine: Option<SpectralEngine> = None;
    for f in reference_profiles {
        if f.pair() != pair {
            return Err(Error::invalid(format!(
                "reference profile has type {} not {pair}",
                f.pair()
            )));
        }
        // Profiles usually share one rule, and with it the cached kernel rows.
        if engine.as_ref().is_none_or(|e| e.rule() != f.rule()) {
            engine = Some(SpectralEngine::new(pair, f.rule().clone(), grid.clone(), &table)?);
        }
        let data = engine.as_ref().expect("engine was just built").forward(f)?;
        let norm2 = crate::transform::lp_norm(f, 2.0)?.powi(2);
        let principal = data.principal_energy();
        let mut others = 0.0;
        let mut own = None;
        for (&k, &v) in data.hat_b() {
            if k == m {
                own = Some(v / eta);
            } else {
                others += crate::spectrum::DISCRETE_NORMALIZATION * v.norm_sqr() * k.abs() as f64;
            }
        }
        let pairing = own.expect("forward covers every discrete parameter").norm_sqr();
        if pairing < 1e-8 * norm2 {
            return Err(fail(
                "reference profile has no component at this discrete parameter".into(),
            ));
        }
        let deficit = norm2 - principal - others;
        let eta2 = deficit / (crate::spectrum::DISCRETE_NORMALIZATION * m.abs() as f64 * pairing);
        if !(eta2 > 0.0) {
            return Err(fail(format!("negative Plancherel deficit {deficit:e}")));
        }
        per_profile.push(eta2.sqrt());
    }
    let spread = per_profile.iter().map(|e| ((e - eta) / eta).abs()).fold(0.0, f64::max);
    if spread > tol {
        return Err(fail(format!(
            "reference profiles disagree: estimates {per_profile:?} vs {eta} (spread {spread:e})"
        )));
    }
    Ok(EtaCalibration {
        l: pair.l(),
        n: pair.n(),
        m,
        eta,
        per_profile,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::diag_flow;

    fn pair(l: i64, n: i64) -> TypePair {
        TypePair::new(l, n).unwrap()
    }

    #[test]
    fn identity_is_delta() {
        for l in -4..=4 {
            for n in -4..=4 {
                if (l - n) % 2 != 0 {
                    continue;
                }
                for lambda in [
                    Complex64::new(0.0, 0.0),
                    Complex64::new(5.0, 0.0),
                    Complex64::new(0.0, 1.0),
                ] {
                    let p = SphericalParams::new(pair(l, n), lambda).unwrap();
                    let v = phi_radial(&p, 0.0).unwrap();
                    let want = if l == n { 1.0 } else { 0.0 };
                    assert!((v - want).norm() < 1e-13, "({l},{n}) {lambda}: {v}");
                }
            }
        }
    }

    #[test]
    fn diagonal_path_matches_generic_iwasawa_path() {
        let rule = PeriodicRule::new(4096).unwrap();
        for (l, n) in [(0, 0), (2, 0), (1, 3), (-2, 4), (3, 3)] {
            for t in [0.2, 0.7, 1.5] {
                for lambda in [0.0, 1.3, 4.0] {
                    let p = SphericalParams::principal(pair(l, n), lambda).unwrap();
                    let fast = phi_radial(&p, t).unwrap();
                    let slow = phi_by_iwasawa(&p, &diag_flow(t), &rule).unwrap();
                    assert!(
                        (fast - slow).norm() < 1e-12,
                        "({l},{n}) t={t} λ={lambda}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn type_rule_matches_generic_path() {
        let rule = PeriodicRule::new(4096).unwrap();
        let p = SphericalParams::principal(pair(2, -2), 0.9).unwrap();
        let x = CartanCoords {
            theta1: 0.4,
            t: 0.6,
            theta2: 2.1,
        };
        let via_type = phi(&p, &x).unwrap();
        let generic = phi_by_iwasawa(&p, &x.element(), &rule).unwrap();
        assert!((via_type - generic).norm() < 1e-12);
    }

    #[test]
    fn negative_t_by_conjugation() {
        let rule = PeriodicRule::new(4096).unwrap();
        let p = SphericalParams::principal(pair(1, 3), 0.5).unwrap();
        let v = phi_radial(&p, -0.8).unwrap();
        let g = phi_by_iwasawa(&p, &diag_flow(-0.8), &rule).unwrap();
        assert!((v - g).norm() < 1e-12);
    }

    #[test]
    fn both_branches_agree_at_switch() {
        for (l, n) in [(0, 0), (2, 4), (-1, 1)] {
            for lambda in [0.0, 10.0, 55.0] {
                let t = SMALL_T;
                let lv = Level::for_lambda(lambda);
                let a = RadialKernel::circle(pair(l, n), t, PeriodicRule::DEFAULT_NODES << lv.0)
                    .eval(Complex64::new(lambda, 0.0));
                let b = RadialKernel::substituted(pair(l, n), t, 0.2 / f64::from(1u32 << lv.0))
                    .eval(Complex64::new(lambda, 0.0));
                assert!((a - b).norm() < 1e-12, "({l},{n}) λ={lambda}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn node_doubling_is_stable() {
        for (l, n) in [(0, 0), (2, 2), (4, 2), (-3, 1)] {
            for &t in &[0.3, 1.0, 3.0, 8.0, 20.0] {
                for &lambda in &[0.0, 3.0, 20.0, 60.0] {
                    let p = SphericalParams::principal(pair(l, n), lambda).unwrap();
                    phi_checked(&p, &CartanCoords::radial(t), 1e-10).unwrap();
                }
            }
        }
    }

    #[test]
    fn sweep_matches_pointwise() {
        let k = RadialKernel::new(pair(2, 0), 2.0, Level(2));
        let mut out = vec![Complex64::new(0.0, 0.0); 300];
        k.sweep(-10.0, 0.1, &mut out);
        for (i, v) in out.iter().enumerate() {
            let direct = k.eval(Complex64::new(-10.0 + 0.1 * i as f64, 0.0));
            assert!((v - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn grid_rows_match_pointwise() {
        let grid = SpectralGrid::new(30.0, 301).unwrap();
        for (l, n) in [(0, 0), (2, 4), (-3, 1)] {
            for t in [0.0, 0.3, 2.2, -1.4] {
                let row = phi_on_grid(pair(l, n), t, &grid);
                for j in (0..grid.len()).step_by(17) {
                    let p = SphericalParams::principal(pair(l, n), grid.lambda(j)).unwrap();
                    let v = phi_radial(&p, t).unwrap();
                    assert!((row[j] - v).norm() < 1e-13, "({l},{n}) t={t} j={j}");
                }
            }
        }
    }

    #[test]
    fn swapped_pair_is_conjugate_up_to_phase() {
        // φ^{n,l}_λ(a_t) = conj(e^{i(n-l)π/2} φ^{l,n}_λ(a_t)) for real λ.
        for (l, n) in [(2, 0), (1, 3), (-2, 4), (5, -1), (4, 4)] {
            for t in [0.3, 1.1, 4.0] {
                for lambda in [0.0, 0.7, 6.0] {
                    let a = phi_radial(&SphericalParams::principal(pair(l, n), lambda).unwrap(), t).unwrap();
                    let b = phi_radial(&SphericalParams::principal(pair(n, l), lambda).unwrap(), t).unwrap();
                    let want = (quarter_turn(n - l) * a).conj();
                    assert!((b - want).norm() < 1e-13, "({l},{n}) t={t} λ={lambda}: {b} vs {want}");
                }
            }
        }
    }

    #[test]
    fn elementary_examples() {
        assert!((phi_elementary(3.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        for t in [0.4, 2.0, 7.0] {
            let a = phi_elementary(2.5, t).unwrap();
            let b = phi_elementary(-2.5, t).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        // (0, 10) against ten times as many nodes.
        let p = SphericalParams::principal(pair(0, 0), 0.0).unwrap();
        let coarse = phi_radial(&p, 10.0).unwrap();
        let fine = RadialKernel::substituted(pair(0, 0), 10.0, 0.02).eval(Complex64::new(0.0, 0.0));
        assert!((coarse - fine).norm() < 1e-10);
    }

    #[test]
    fn closed_form_matches_quadrature_where_both_are_accurate() {
        for (l, n, m) in [
            (2, 2, 1),
            (4, 4, 1),
            (4, 4, 3),
            (4, 2, 1),
            (2, 4, 1),
            (3, 5, 2),
            (-4, -4, -3),
            (6, 4, 3),
        ] {
            let p = SphericalParams::discrete(pair(l, n), m).unwrap();
            for t in [0.3, 0.9, 1.7, 2.5] {
                let closed = phi_radial(&p, t).unwrap();
                let quad = RadialKernel::new(pair(l, n), t, Level(3)).eval(p.lambda());
                assert!(
                    (closed - quad).norm() < 1e-11,
                    "({l},{n},{m}) t={t}: {closed} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn known_discrete_coefficients() {
        let p = SphericalParams::discrete(pair(2, 2), 1).unwrap();
        let p3 = SphericalParams::discrete(pair(4, 4), 3).unwrap();
        let p1 = SphericalParams::discrete(pair(4, 4), 1).unwrap();
        for t in [0.5, 3.0, 9.0] {
            let sech = 1.0 / f64::cosh(t);
            let th = t.tanh();
            assert!((phi_radial(&p, t).unwrap().re - sech * sech).abs() < 1e-14);
            assert!((phi_radial(&p3, t).unwrap().re - sech.powi(4)).abs() < 1e-14);
            let want = sech * sech * (1.0 - 3.0 * th * th);
            assert!((phi_radial(&p1, t).unwrap().re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn discrete_params_validated() {
        assert!(matches!(
            SphericalParams::discrete(pair(0, 4), 1),
            Err(Error::NoDiscreteSpectrum { .. })
        ));
        assert!(matches!(
            SphericalParams::discrete(pair(4, 4), 2),
            Err(Error::NotDiscreteParameter { .. })
        ));
    }

    #[test]
    fn psi_requires_calibration() {
        let table = EtaTable::new();
        let err = psi_discrete(pair(2, 2), 1, &CartanCoords::radial(0.0), &table);
        assert!(matches!(err, Err(Error::Uncalibrated { .. })));
        let table = EtaTable::for_pair(pair(2, 2)).unwrap();
        let v = psi_discrete(pair(2, 2), 1, &CartanCoords::radial(0.0), &table).unwrap();
        assert!((v.re - table.get(pair(2, 2), 1).unwrap()).abs() < 1e-13);
        let far = psi_discrete(pair(2, 2), 1, &CartanCoords::radial(30.0), &table).unwrap();
        assert!(far.norm() < 1e-20);
    }

    #[test]
    fn schur_eta_is_root_pi() {
        // Observed regularity of the calibration; the per-profile Plancherel
        // estimates in the transform tests confirm it independently.
        for (l, n, m) in [(2, 2, 1), (4, 4, 1), (4, 4, 3), (2, 4, 1), (3, 5, 2), (-3, -3, -2)] {
            let eta = eta_from_schur(pair(l, n), m).unwrap();
            assert!((eta * eta - PI).abs() < 1e-10, "({l},{n},{m}) eta^2 = {}", eta * eta);
        }
    }

    #[test]
    fn eta_table_roundtrip_and_append_only() {
        let table = EtaTable::for_pair(pair(4, 4)).unwrap();
        let json = table.to_json();
        let back = EtaTable::from_json(&json).unwrap();
        assert_eq!(table, back);
        let mut t = back;
        assert!(t.insert(pair(4, 4), 1, 2.0, 1e-6).is_err());
        assert!(t.insert(pair(4, 4), 1, t.get(pair(4, 4), 1).unwrap(), 1e-6).is_ok());
        assert_eq!(t.get(pair(4, 4), 3), t.get(pair(4, 4), 3));
        assert!(t.insert(pair(2, 2), 1, -1.0, 1e-6).is_err());
    }

    #[test]
    fn eta_symmetric_lookup() {
        let table = EtaTable::for_pair(pair(2, 4)).unwrap();
        assert_eq!(table.get(pair(2, 4), 1), table.get(pair(4, 2), 1));
    }
}
