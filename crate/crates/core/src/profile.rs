//! Radial profiles: an `(l, n)`-type function stored through its values on
//! the diagonal flow.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{check_finite, RadialRule};
use crate::spectrum::TypePair;

/// Samples `f(a_t)` on the nodes of a radial rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pair: TypePair,
    rule: RadialRule,
    values: Vec<Complex64>,
    support: Option<(f64, f64)>,
}

impl RadialProfile {
    /// `support`, when given, is an interval outside of which the function
    /// vanishes identically.
    pub fn new(pair: TypePair, rule: RadialRule, values: Vec<Complex64>, support: Option<(f64, f64)>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::invalid(format!(
                "{} values for {} radial nodes",
                values.len(),
                rule.len()
            )));
        }
        check_finite(&values, "profile values")?;
        if let Some((lo, hi)) = support {
            if !(lo <= hi) || lo < 0.0 {
                return Err(Error::invalid(format!("bad support [{lo}, {hi}]")));
            }
        }
        Ok(Self {
            pair,
            rule,
            values,
            support,
        })
    }

    pub fn from_fn<F>(pair: TypePair, rule: RadialRule, f: F, support: Option<(f64, f64)>) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = rule.nodes().iter().map(|&t| f(t)).collect();
        Self::new(pair, rule, values, support)
    }

    /// Zero function on `rule`.
    pub fn zero(pair: TypePair, rule: RadialRule) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); rule.len()];
        Self {
            pair,
            rule,
            values,
            support: Some((0.0, 0.0)),
        }
    }

    /// `amplitude · b(t) · e^{iωt}` with `b` the smooth bump
    /// `exp(1 − 1/(1 − s²))`, `s = (2t − t0 − t1)/(t1 − t0)`, on `[t0, t1]`.
    pub fn bump(pair: TypePair, rule: RadialRule, t0: f64, t1: f64, omega: f64, amplitude: f64) -> Result<Self> {
        if !(0.0 <= t0 && t0 < t1) {
            return Err(Error::invalid(format!("bad bump support [{t0}, {t1}]")));
        }
        if pair.l() != pair.n() && t0 == 0.0 {
            return Err(Error::invalid("bumps of type l != n must vanish near the identity"));
        }
        Self::from_fn(
            pair,
            rule,
            |t| Complex64::from_polar(amplitude * bump(t, t0, t1), omega * t),
            Some((t0, t1)),
        )
    }

    pub fn pair(&self) -> TypePair {
        self.pair
    }

    pub fn rule(&self) -> &RadialRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn is_compact(&self) -> bool {
        self.support.is_some()
    }

    /// Relabel the type pair, keeping the samples.
    pub fn with_pair(mut self, pair: TypePair) -> Self {
        self.pair = pair;
        self
    }

    /// Same grid, new values; support is forgotten.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Self::new(self.pair, self.rule.clone(), values, None)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            pair: self.pair,
            rule: self.rule.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            support: self.support,
        }
    }

    /// Interval on which samples determine the function.
    pub fn grid_range(&self) -> (f64, f64) {
        let lo = self.rule.panels().first().map(|p| p.0).unwrap_or(0.0);
        (lo, self.rule.t_max())
    }

    /// `f(a_t)` for `t ≥ 0` by cubic interpolation through the four nearest nodes.
    pub fn value_at(&self, t: f64) -> Result<Complex64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::invalid(format!("radial coordinate must be >= 0, got {t}")));
        }
        if let Some((lo, hi)) = self.support {
            if t < lo || t > hi {
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
        let (lo, hi) = self.grid_range();
        if t < lo || t > hi {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        let nodes = self.rule.nodes();
        let n = nodes.len();
        if n < 4 {
            return Err(Error::invalid("interpolation needs at least four nodes"));
        }
        let idx = nodes.partition_point(|&x| x < t);
        let start = idx.saturating_sub(2).min(n - 4);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in start..start + 4 {
            let mut basis = 1.0;
            for k in start..start + 4 {
                if k != j {
                    basis *= (t - nodes[k]) / (nodes[j] - nodes[k]);
                }
            }
            acc += self.values[j] * basis;
        }
        Ok(acc)
    }
}

/// `exp(1 − 1/(1 − s²))` on `(t0, t1)`, zero elsewhere; peak value 1.
pub fn bump(t: f64, t0: f64, t1: f64) -> f64 {
    let s = (2.0 * t - t0 - t1) / (t1 - t0);
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule() -> RadialRule {
        RadialRule::uniform(0.0, 4.0, 1.0, 32).unwrap()
    }

    #[test]
    fn bump_shape() {
        assert_eq!(bump(1.5, 1.0, 2.0), 1.0);
        assert_eq!(bump(1.0, 1.0, 2.0), 0.0);
        assert_eq!(bump(2.5, 1.0, 2.0), 0.0);
        assert!(bump(1.2, 1.0, 2.0) > 0.0);
    }

    #[test]
    fn interpolation_is_accurate_and_exact_at_nodes() {
        let pair = TypePair::new(0, 0).unwrap();
        let f = RadialProfile::from_fn(pair, rule(), |t| Complex64::new((t * 1.3).sin(), t), None).unwrap();
        for (i, &t) in f.nodes().iter().enumerate() {
            assert_eq!(f.value_at(t).unwrap(), f.values()[i]);
        }
        for t in [0.0, 0.013, 1.0, 2.71, 3.999] {
            let v = f.value_at(t).unwrap();
            assert!((v - Complex64::new((t * 1.3).sin(), t)).norm() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn out_of_range_behaviour() {
        let pair = TypePair::new(2, 2).unwrap();
        let compact = RadialProfile::bump(pair, rule(), 1.0, 3.0, 0.0, 1.0).unwrap();
        assert_eq!(compact.value_at(10.0).unwrap(), Complex64::new(0.0, 0.0));
        let open = compact.with_values(compact.values().to_vec()).unwrap();
        assert!(matches!(open.value_at(10.0), Err(Error::OutOfRange { .. })));
        assert!(open.value_at(-1.0).is_err());
    }

    #[test]
    fn validation() {
        let pair = TypePair::new(2, 0).unwrap();
        assert!(RadialProfile::bump(pair, rule(), 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(RadialProfile::bump(pair, rule(), 2.0, 1.0, 0.0, 1.0).is_err());
        assert!(RadialProfile::new(pair, rule(), vec![Complex64::new(0.0, 0.0); 3], None).is_err());
        let mut v = vec![Complex64::new(0.0, 0.0); rule().len()];
        v[0].re = f64::INFINITY;
        assert!(RadialProfile::new(pair, rule(), v, None).is_err());
    }
}
