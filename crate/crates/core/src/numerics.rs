//! Quadrature rules and grids.
//!
//! Three rules cover every integral in the crate: an equispaced trapezoid rule
//! on the circle (the normalized measure on the rotation subgroup), composite
//! Gauss–Legendre on the radial half line, and a symmetric uniform grid in the
//! spectral parameter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::haar_weight;

pub(crate) fn check_finite(values: &[Complex64], what: &'static str) -> Result<()> {
    match values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the three-term recurrence; nodes are returned in
/// increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equispaced trapezoid rule for the normalized measure on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicRule {
    node_count: usize,
}

impl PeriodicRule {
    pub const DEFAULT_NODES: usize = 256;

    pub fn new(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::invalid("periodic rule needs at least one node"));
        }
        Ok(Self { node_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn node(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.node_count as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.node_count).map(|j| self.node(j)).collect()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.node_count as f64
    }

    pub fn refined(&self) -> Self {
        Self {
            node_count: 2 * self.node_count,
        }
    }
}

impl Default for PeriodicRule {
    fn default() -> Self {
        Self {
            node_count: Self::DEFAULT_NODES,
        }
    }
}

/// Trapezoid sum of `f` over the circle, normalized to total mass one.
pub fn integrate_periodic<F>(f: F, rule: &PeriodicRule) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..rule.node_count {
        let v = f(rule.node(j));
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                what: "periodic integrand",
                index: j,
            });
        }
        acc += v;
    }
    Ok(acc * rule.weight())
}

/// Composite Gauss–Legendre rule on a union of panels inside `[0, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRule {
    panels: Vec<(f64, f64)>,
    per_panel: usize,
    t_max: f64,
    #[serde(skip)]
    nodes: Vec<f64>,
    #[serde(skip)]
    weights: Vec<f64>,
}

impl RadialRule {
    pub const DEFAULT_T_MAX: f64 = 25.0;
    pub const DEFAULT_PER_PANEL: usize = 64;

    /// Rule built from explicit panels, which must be disjoint, ordered and
    /// lie in `[0, t_max]`.
    pub fn from_panels(panels: Vec<(f64, f64)>, per_panel: usize, t_max: f64) -> Result<Self> {
        if per_panel == 0 {
            return Err(Error::invalid("radial rule needs at least one node per panel"));
        }
        if panels.is_empty() {
            return Err(Error::invalid("radial rule needs at least one panel"));
        }
        let mut prev = 0.0;
        for &(lo, hi) in &panels {
            if !(lo.is_finite() && hi.is_finite()) || lo < prev || lo >= hi || hi > t_max {
                return Err(Error::invalid(format!("bad panel [{lo}, {hi}] for t_max = {t_max}")));
            }
            prev = hi;
        }
        let (x, w) = gauss_legendre(per_panel);
        let mut nodes = Vec::with_capacity(panels.len() * per_panel);
        let mut weights = Vec::with_capacity(panels.len() * per_panel);
        for &(lo, hi) in &panels {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Ok(Self {
            panels,
            per_panel,
            t_max,
            nodes,
            weights,
        })
    }

    /// Panels of length `panel_len` covering `[lo, hi]`, last panel shortened.
    pub fn uniform(lo: f64, hi: f64, panel_len: f64, per_panel: usize) -> Result<Self> {
        if !(panel_len > 0.0) || !(hi > lo) || lo < 0.0 {
            return Err(Error::invalid(format!(
                "bad radial interval [{lo}, {hi}] with panel length {panel_len}"
            )));
        }
        let mut panels = Vec::new();
        let mut a = lo;
        while a < hi - 1e-12 {
            let b = (a + panel_len).min(hi);
            panels.push((a, b));
            a = b;
        }
        Self::from_panels(panels, per_panel, hi)
    }

    pub fn panels(&self) -> &[(f64, f64)] {
        &self.panels
    }

    pub fn per_panel(&self) -> usize {
        self.per_panel
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest `|λ|` for which `e^{iλt}` is integrated reliably: about two
    /// nodes per unit of phase on the longest panel.
    pub fn max_resolved_frequency(&self) -> f64 {
        let longest = self.panels.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
        2.0 * self.per_panel as f64 / longest
    }

    /// Same panels, twice the nodes per panel.
    pub fn refined(&self) -> Self {
        Self::from_panels(self.panels.clone(), 2 * self.per_panel, self.t_max).expect("refining a valid rule")
    }

    /// Rebuild the node tables, e.g. after deserialization.
    pub fn rebuilt(self) -> Result<Self> {
        Self::from_panels(self.panels, self.per_panel, self.t_max)
    }

    /// `Σ w_i f_i weight(t_i)`.
    pub fn integrate_weighted<W>(&self, samples: &[Complex64], weight: W) -> Result<Complex64>
    where
        W: Fn(f64) -> f64,
    {
        if samples.len() != self.nodes.len() {
            return Err(Error::invalid(format!(
                "{} samples for a rule with {} nodes",
                samples.len(),
                self.nodes.len()
            )));
        }
        check_finite(samples, "radial samples")?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ((&t, &w), &f)) in self.nodes.iter().zip(&self.weights).zip(samples).enumerate() {
            let g = weight(t);
            if !g.is_finite() {
                return Err(Error::NonFinite {
                    what: "radial weight",
                    index: i,
                });
            }
            acc += f * (w * g);
        }
        Ok(acc)
    }
}

impl Default for RadialRule {
    fn default() -> Self {
        Self::uniform(0.0, Self::DEFAULT_T_MAX, 1.0, Self::DEFAULT_PER_PANEL).expect("default radial rule")
    }
}

/// `∫ f(t) Δ(t) dt` with the Haar weight `Δ(t) = 2 sinh 2t`.
pub fn integrate_radial(samples: &[Complex64], rule: &RadialRule) -> Result<Complex64> {
    rule.integrate_weighted(samples, haar_weight)
}

/// Uniform symmetric grid `λ_j = -λ_max + j h` with trapezoid weights.
///
/// The sample count is odd so that `λ = 0` is a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    lambda_max: f64,
    samples: usize,
}

impl SpectralGrid {
    pub const DEFAULT_LAMBDA_MAX: f64 = 60.0;
    pub const DEFAULT_SAMPLES: usize = 4097;

    pub fn new(lambda_max: f64, samples: usize) -> Result<Self> {
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(Error::invalid(format!("lambda_max must be positive, got {lambda_max}")));
        }
        if samples < 3 || samples.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "spectral grid needs an odd sample count >= 3, got {samples}"
            )));
        }
        Ok(Self { lambda_max, samples })
    }

    /// Grid with spacing close to `step` on `[-lambda_max, lambda_max]`.
    pub fn with_step(lambda_max: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::invalid("spectral step must be positive"));
        }
        let half = (lambda_max / step).ceil().max(1.0) as usize;
        Self::new(lambda_max, 2 * half + 1)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        2.0 * self.lambda_max / (self.samples - 1) as f64
    }

    /// Index of the node `λ = 0`.
    pub fn zero_index(&self) -> usize {
        self.samples / 2
    }

    pub fn lambda(&self, j: usize) -> f64 {
        let k = j as f64 - self.zero_index() as f64;
        k * self.step()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.lambda(j)).collect()
    }

    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.samples {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.weight(j)).collect()
    }

    /// Twice the range at the same spacing.
    pub fn extended(&self) -> Self {
        Self {
            lambda_max: 2.0 * self.lambda_max,
            samples: 2 * self.samples - 1,
        }
    }

    /// Same range, half the spacing.
    pub fn densified(&self) -> Self {
        Self {
            lambda_max: self.lambda_max,
            samples: 2 * self.samples - 1,
        }
    }
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self {
            lambda_max: Self::DEFAULT_LAMBDA_MAX,
            samples: Self::DEFAULT_SAMPLES,
        }
    }
}

/// Cumulative integrals `∫_{x_0}^{x_k} g` on a uniform grid, for every `k`.
///
/// Each step integrates the cubic through the four nearest nodes, giving a
/// fourth-order scheme; with fewer than four nodes it falls back to the
/// trapezoid rule.
pub fn cumulative_uniform(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 4 {
        for k in 1..n {
            out[k] = out[k - 1] + 0.5 * h * (values[k - 1] + values[k]);
        }
        return out;
    }
    for k in 1..n {
        // Step [x_{k-1}, x_k]; stencil of four consecutive nodes containing it.
        let s = (k as isize - 2).clamp(0, n as isize - 4) as usize;
        let c = step_weights(k - 1 - s);
        let inc: f64 = (0..4).map(|j| c[j] * values[s + j]).sum();
        out[k] = out[k - 1] + h * inc;
    }
    out
}

// Weights for ∫ over [x_j, x_{j+1}] of the cubic interpolant on nodes 0..3 (unit spacing).
fn step_weights(j: usize) -> [f64; 4] {
    match j {
        0 => [9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0],
        1 => [-1.0 / 24.0, 13.0 / 24.0, 13.0 / 24.0, -1.0 / 24.0],
        2 => [1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0, 9.0 / 24.0],
        _ => unreachable!(),
    }
}
