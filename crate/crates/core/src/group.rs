//! Elements of SL(2,R) and their Iwasawa and Cartan coordinates.
//!
//! Conventions:
//!
//! * `rotation(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`
//! * `diag_flow(t) = diag(e^t, e^-t)`
//! * `shear(v) = [[1, v], [0, 1]]`
//!
//! Every element factors uniquely as `rotation(θ)·diag_flow(t)·shear(v)`
//! (Iwasawa) and as `rotation(θ1)·diag_flow(t)·rotation(θ2)` with `t ≥ 0`
//! (Cartan, unique up to the tie-breaks described on [`cartan`]).

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;

/// Unimodularity tolerance for [`GroupElement::new`].
pub const DET_TOL: f64 = 1e-12;

/// A real 2×2 matrix `[[a, b], [c, d]]` with determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("group element has non-finite entries"));
        }
        let g = Self { a, b, c, d };
        let det = g.det();
        if (det - 1.0).abs() > DET_TOL * (1.0 + g.max_abs_entry().powi(2)) {
            return Err(Error::invalid(format!("determinant {det} is not 1")));
        }
        Ok(g)
    }

    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// `ad − bc`, compensated (Kahan) so that cancellation between large
    /// entries costs no more than the rounding of the entries themselves.
    pub fn det(&self) -> f64 {
        let w = self.b * self.c;
        let e = (-self.b).mul_add(self.c, w);
        let f = self.a.mul_add(self.d, -w);
        f + e
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Largest entrywise difference.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
            .max((self.d - other.d).abs())
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, o: GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

pub fn rotation(theta: f64) -> GroupElement {
    let (s, c) = theta.sin_cos();
    GroupElement {
        a: c,
        b: s,
        c: -s,
        d: c,
    }
}

pub fn diag_flow(t: f64) -> GroupElement {
    GroupElement {
        a: t.exp(),
        b: 0.0,
        c: 0.0,
        d: (-t).exp(),
    }
}

pub fn shear(v: f64) -> GroupElement {
    GroupElement {
        a: 1.0,
        b: v,
        c: 0.0,
        d: 1.0,
    }
}

/// `x = rotation(theta)·diag_flow(t)·shear(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IwasawaCoords {
    pub theta: f64,
    pub t: f64,
    pub v: f64,
}

impl IwasawaCoords {
    pub fn element(&self) -> GroupElement {
        rotation(self.theta) * diag_flow(self.t) * shear(self.v)
    }
}

/// `x = rotation(theta1)·diag_flow(t)·rotation(theta2)` with `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanCoords {
    pub theta1: f64,
    pub t: f64,
    pub theta2: f64,
}

impl CartanCoords {
    pub fn radial(t: f64) -> Self {
        Self {
            theta1: 0.0,
            t,
            theta2: 0.0,
        }
    }

    pub fn element(&self) -> GroupElement {
        rotation(self.theta1) * diag_flow(self.t) * rotation(self.theta2)
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Iwasawa coordinates, `theta` in `[0, 2π)`.
///
/// `e^{2t} = a² + c²`, `e^{iθ} = (a − ic)/e^t` and `v = (ab + cd)/(a² + c²)`.
pub fn iwasawa(x: &GroupElement) -> IwasawaCoords {
    let r2 = x.a * x.a + x.c * x.c;
    IwasawaCoords {
        theta: wrap_angle((-x.c).atan2(x.a)),
        t: 0.5 * r2.ln(),
        v: (x.a * x.b + x.c * x.d) / r2,
    }
}

/// Below this spread of singular values the element is treated as a rotation.
const CARTAN_DEGENERATE: f64 = 1e-13;

/// Cartan coordinates from the singular value decomposition.
///
/// Tie-breaks: when `t = 0` the result is `(θ, 0, 0)` with `θ ∈ [0, 2π)`.
/// Otherwise the simultaneous shift `(θ1 + π, θ2 + π)` is removed by
/// requiring `θ1 ∈ [0, π)`, and `θ2 ∈ [0, 2π)`.
pub fn cartan(x: &GroupElement) -> CartanCoords {
    // Closed-form 2×2 SVD: x = R(φ) diag(σ1, σ2) R(ψ) with R the
    // counter-clockwise rotation, which is rotation(-angle) here.
    let e = 0.5 * (x.a + x.d);
    let f = 0.5 * (x.a - x.d);
    let g = 0.5 * (x.c + x.b);
    let h = 0.5 * (x.c - x.b);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let sigma1 = q + r;
    if r <= CARTAN_DEGENERATE * q {
        // x = R(α) with α = atan2(h, e), i.e. rotation(-α).
        return CartanCoords {
            theta1: wrap_angle(-h.atan2(e)),
            t: 0.0,
            theta2: 0.0,
        };
    }
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let phi = 0.5 * (a2 + a1);
    let psi = 0.5 * (a2 - a1);
    let mut theta1 = wrap_angle(-phi);
    let mut theta2 = wrap_angle(-psi);
    if theta1 >= PI {
        theta1 -= PI;
        theta2 = wrap_angle(theta2 + PI);
    }
    CartanCoords {
        theta1,
        t: sigma1.ln().max(0.0),
        theta2,
    }
}

/// Haar density in the radial coordinate, `Δ(t) = 2 sinh 2t`.
pub fn haar_weight(t: f64) -> f64 {
    2.0 * (2.0 * t).sinh()
}

/// Value of the `(l, n)`-type function with radial profile `profile` at
/// `k_{θ1} a_t k_{θ2}`: `e^{ilθ1} f(a_t) e^{inθ2}`.
pub fn extend_type(profile: &RadialProfile, coords: &CartanCoords) -> Result<Complex64> {
    let pair = profile.pair();
    let f = profile.value_at(coords.t)?;
    Ok(Complex64::from_polar(1.0, pair.l() as f64 * coords.theta1)
        * f
        * Complex64::from_polar(1.0, pair.n() as f64 * coords.theta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RadialRule;
    use crate::spectrum::TypePair;

    #[test]
    fn constructors() {
        assert_eq!(rotation(0.0), GroupElement::IDENTITY);
        let x = diag_flow(2f64.ln() / 2.0);
        assert!((x.a - 2f64.sqrt()).abs() < 1e-15 && (x.d - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(shear(3.0), GroupElement::new(1.0, 3.0, 0.0, 1.0).unwrap());
    }

    #[test]
    fn new_rejects_non_unimodular() {
        assert!(GroupElement::new(1.0, 1.0, 0.0, 2.0).is_err());
        assert!(GroupElement::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn iwasawa_examples() {
        let c = iwasawa(&GroupElement::IDENTITY);
        assert_eq!((c.theta, c.t, c.v), (0.0, 0.0, 0.0));
        let c = iwasawa(&GroupElement::new(1.0, 1.0, 1.0, 2.0).unwrap());
        assert!((c.theta - 7.0 * PI / 4.0).abs() < 1e-15);
        assert!((c.t - 0.346_573_590_279_972_6).abs() < 1e-15);
        assert!((c.v - 1.5).abs() < 1e-15);
        let x = rotation(0.7) * diag_flow(1.3) * shear(-2.1);
        let c = iwasawa(&x);
        assert!((c.theta - 0.7).abs() < 1e-14);
        assert!((c.t - 1.3).abs() < 1e-14);
        assert!((c.v + 2.1).abs() < 1e-13);
    }

    #[test]
    fn cartan_examples() {
        let c = cartan(&diag_flow(1.5));
        assert!((c.t - 1.5).abs() < 1e-15);
        assert!(c.theta1.abs() < 1e-15 && c.theta2.abs() < 1e-15);
        let c = cartan(&rotation(0.4));
        assert_eq!(c.t, 0.0);
        assert!((c.theta1 - 0.4).abs() < 1e-15);
        assert_eq!(c.theta2, 0.0);

        let x = GroupElement::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let c = cartan(&x);
        // σ1 of [[1,1],[1,2]] is the larger eigenvalue (3+√5)/2 of the symmetric matrix.
        let sigma = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((c.t - sigma.ln()).abs() < 1e-14);
        assert!(c.element().distance(&x) < 1e-12);
        assert!((0.0..PI).contains(&c.theta1));
    }

    #[test]
    fn cartan_of_flow_on_negative_axis() {
        let x = diag_flow(-0.8);
        let c = cartan(&x);
        assert!((c.t - 0.8).abs() < 1e-14);
        assert!(c.element().distance(&x) < 1e-13);
    }

    #[test]
    fn extend_type_examples() {
        let rule = RadialRule::uniform(0.0, 3.0, 1.0, 16).unwrap();
        let f = |pair| RadialProfile::bump(TypePair::new(pair, 0).unwrap(), rule.clone(), 0.5, 2.5, 1.0, 1.0).unwrap();
        let f00 = f(0);
        let at = |th1, th2| CartanCoords {
            theta1: th1,
            t: 1.2,
            theta2: th2,
        };
        let base = f00.value_at(1.2).unwrap();
        assert_eq!(extend_type(&f00, &at(0.0, 0.0)).unwrap(), base);
        assert!((extend_type(&f00, &at(0.7, 2.0)).unwrap() - base).norm() < 1e-15);
        let f20 = f(2);
        let v = extend_type(&f20, &at(PI / 2.0, 0.3)).unwrap();
        assert!((v + f20.value_at(1.2).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn haar_weight_values() {
        assert_eq!(haar_weight(0.0), 0.0);
        assert!((haar_weight(1.0) - 7.253_720_815_694_037).abs() < 1e-12);
        assert_eq!(haar_weight(-1.0), -haar_weight(1.0));
    }
}
