//! Type pairs, the discrete parameter set, the Plancherel density and the
//! spectral measure.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SpectralGrid;

/// Normalization of the continuous part of the spectral measure, with Haar
/// measure `Δ(t) dt dk1 dk2` and `∫ dk = 1`.
pub const PRINCIPAL_NORMALIZATION: f64 = 1.0 / (4.0 * PI);

/// Normalization of the discrete part of the spectral measure.
pub const DISCRETE_NORMALIZATION: f64 = 1.0 / (2.0 * PI);

/// Even (`Plus`) or odd (`Minus`) principal series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityClass {
    Plus,
    Minus,
}

impl ParityClass {
    pub fn of(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            ParityClass::Plus
        } else {
            ParityClass::Minus
        }
    }
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::Plus => "plus",
            ParityClass::Minus => "minus",
        })
    }
}

impl std::str::FromStr for ParityClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" | "even" => Ok(ParityClass::Plus),
            "minus" | "-" | "odd" => Ok(ParityClass::Minus),
            other => Err(Error::invalid(format!("unknown parity class '{other}'"))),
        }
    }
}

/// The type `(l, n)` of a function: left and right rotation characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct TypePair {
    l: i64,
    n: i64,
}

#[derive(Deserialize)]
struct RawPair {
    l: i64,
    n: i64,
}

impl TryFrom<RawPair> for TypePair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        TypePair::new(raw.l, raw.n)
    }
}

impl TypePair {
    pub fn new(l: i64, n: i64) -> Result<Self> {
        if (l - n).rem_euclid(2) != 0 {
            return Err(Error::ParityMismatch { l, n });
        }
        Ok(Self { l, n })
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn tau(&self) -> ParityClass {
        ParityClass::of(self.l)
    }

    /// `(n, l)`.
    pub fn swapped(&self) -> Self {
        Self { l: self.n, n: self.l }
    }

    pub fn is_biinvariant(&self) -> bool {
        self.l == 0 && self.n == 0
    }
}

impl fmt::Display for TypePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.l, self.n)
    }
}

/// Discrete parameters `m` (standing for `k = i·m`) of a type pair, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteSpectrum {
    members: Vec<i64>,
}

impl DiscreteSpectrum {
    pub fn members(&self) -> &[i64] {
        &self.members
    }

    pub fn contains(&self, m: i64) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }
}

/// Integers of parity opposite to `l, n` strictly between `0` and
/// `min(l, n)` (both positive) or between `max(l, n)` and `0` (both negative).
pub fn gamma_set(l: i64, n: i64) -> Result<DiscreteSpectrum> {
    let pair = TypePair::new(l, n)?;
    Ok(gamma_of(pair))
}

pub fn gamma_of(pair: TypePair) -> DiscreteSpectrum {
    let (l, n) = (pair.l, pair.n);
    let opposite = |k: i64| (k - l).rem_euclid(2) == 1;
    let members = if l > 0 && n > 0 {
        (1..l.min(n)).filter(|&k| opposite(k)).collect()
    } else if l < 0 && n < 0 {
        (l.max(n) + 1..0).filter(|&k| opposite(k)).collect()
    } else {
        Vec::new()
    };
    DiscreteSpectrum { members }
}

/// `μ(τ₊, λ) = (λπ/2) tanh(λπ/2)`, `μ(τ₋, λ) = (λπ/2) coth(λπ/2)`.
pub fn plancherel_density(tau: ParityClass, lambda: f64) -> f64 {
    let x = 0.5 * PI * lambda;
    match tau {
        ParityClass::Plus => x * x.tanh(),
        ParityClass::Minus => {
            if x.abs() < 0.5 * PI * 1e-3 {
                let x2 = x * x;
                1.0 + x2 / 3.0 - x2 * x2 / 45.0
            } else {
                x / x.tanh()
            }
        }
    }
}

/// `∫ F dν̃ = (1/4π) ∫ F(λ) μ(τ,λ) dλ + (1/2π) Σ_{m∈Γ} F(i·m) |m|`.
///
/// `continuous` is sampled on the grid; `discrete` is queried at each `m`.
pub fn spectral_measure_integral<C, D>(
    continuous: C,
    discrete: D,
    pair: TypePair,
    grid: &SpectralGrid,
) -> Result<Complex64>
where
    C: Fn(f64) -> Complex64,
    D: Fn(i64) -> Complex64,
{
    let samples: Vec<Complex64> = grid.lambdas().into_iter().map(continuous).collect();
    let gamma = gamma_of(pair);
    let disc: Vec<(i64, Complex64)> = gamma.members().iter().map(|&m| (m, discrete(m))).collect();
    integrate_spectral_samples(&samples, &disc, pair.tau(), grid)
}

/// Same measure applied to values already sampled on `grid`.
pub fn integrate_spectral_samples(
    samples: &[Complex64],
    discrete: &[(i64, Complex64)],
    tau: ParityClass,
    grid: &SpectralGrid,
) -> Result<Complex64> {
    if samples.len() != grid.len() {
        return Err(Error::invalid("spectral samples do not match the grid"));
    }
    crate::numerics::check_finite(samples, "spectral samples")?;
    let mut cont = Complex64::new(0.0, 0.0);
    for (j, f) in samples.iter().enumerate() {
        cont += f * (grid.weight(j) * plancherel_density(tau, grid.lambda(j)));
    }
    let mut disc = Complex64::new(0.0, 0.0);
    for (i, &(m, v)) in discrete.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                what: "discrete spectral value",
                index: i,
            });
        }
        disc += v * m.abs() as f64;
    }
    Ok(cont * PRINCIPAL_NORMALIZATION + disc * DISCRETE_NORMALIZATION)
}

/// Number of logarithmically spaced levels used for weak-type suprema.
pub const ALPHA_LEVELS: usize = 512;

/// `sup_α α (∫_{ψ≥α} μ dλ)^exponent` over a logarithmic α-grid, with `ψ`
/// given by samples on `grid` (linear between nodes).
pub fn weak_type_sup(samples: &[f64], tau: ParityClass, grid: &SpectralGrid, exponent: f64) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::invalid("samples do not match the spectral grid"));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "weak-norm samples",
            index: i,
        });
    }
    if let Some(i) = samples.iter().position(|&v| v < 0.0) {
        return Err(Error::invalid(format!(
            "negative sample {} at λ = {}",
            samples[i],
            grid.lambda(i)
        )));
    }
    let max = samples.iter().copied().fold(0.0, f64::max);
    let min_pos = samples
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Ok(0.0);
    }
    let lambdas = grid.lambdas();
    let mu: Vec<f64> = lambdas.iter().map(|&l| plancherel_density(tau, l)).collect();
    let mut best = 0.0f64;
    let span = (max / min_pos).ln();
    for k in 0..ALPHA_LEVELS {
        let alpha = if k == 0 {
            min_pos
        } else if k + 1 == ALPHA_LEVELS {
            max
        } else {
            min_pos * (span * k as f64 / (ALPHA_LEVELS - 1) as f64).exp()
        };
        let measure = level_set_measure(samples, &lambdas, &mu, alpha);
        if measure > 0.0 {
            best = best.max(alpha * measure.powf(exponent));
        }
    }
    Ok(best)
}

// ∫_{ψ≥α} μ with ψ and μ linear on each grid cell. Using ψ ≥ α rather than
// ψ > α leaves the supremum over α unchanged and keeps α = min ψ meaningful.
fn level_set_measure(psi: &[f64], lambdas: &[f64], mu: &[f64], alpha: f64) -> f64 {
    let mut total = 0.0;
    for j in 0..psi.len() - 1 {
        let (p0, p1) = (psi[j] - alpha, psi[j + 1] - alpha);
        let h = lambdas[j + 1] - lambdas[j];
        if p0 >= 0.0 && p1 >= 0.0 {
            total += 0.5 * h * (mu[j] + mu[j + 1]);
        } else if p0 >= 0.0 || p1 >= 0.0 {
            // Fraction of the cell on the nonnegative side, adjacent to that end.
            let frac = if p0 >= 0.0 { p0 / (p0 - p1) } else { p1 / (p1 - p0) };
            let (mu_end, mu_cut) = if p0 >= 0.0 {
                (mu[j], mu[j] + frac * (mu[j + 1] - mu[j]))
            } else {
                (mu[j + 1], mu[j + 1] + frac * (mu[j] - mu[j + 1]))
            };
            total += 0.5 * frac * h * (mu_end + mu_cut);
        }
    }
    total
}

/// `‖ψ‖_{τ,∞} = sup_α α ∫_{ψ>α} μ(τ,λ) dλ`.
///
/// Returns `f64::INFINITY` when the value grows by more than 10% after
/// doubling the spectral range, the numerical signature of a level set with
/// infinite measure.
pub fn weak_sup_norm<F>(psi: F, tau: ParityClass, grid: &SpectralGrid) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    weak_type_functional(&psi, tau, grid, 1.0)
}

/// `sup_α α (∫_{ψ>α} μ)^exponent` with the same divergence test as
/// [`weak_sup_norm`].
pub fn weak_type_functional<F>(psi: &F, tau: ParityClass, grid: &SpectralGrid, exponent: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let sample = |g: &SpectralGrid| -> Vec<f64> { g.lambdas().into_iter().map(psi).collect() };
    let base = weak_type_sup(&sample(grid), tau, grid, exponent)?;
    let wide = grid.extended();
    let extended = weak_type_sup(&sample(&wide), tau, &wide, exponent)?;
    if extended > 1.1 * base {
        return Ok(f64::INFINITY);
    }
    Ok(base)
}
