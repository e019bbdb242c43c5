//! Harmonic analysis of `(l, n)`-type functions on SL(2,R).
//!
//! A function `f` on SL(2,R) is of type `(l, n)` when
//! `f(k_θ x k_ϑ) = e^{ilθ} f(x) e^{inϑ}` for rotations `k_θ`, `k_ϑ`. Such a
//! function is fixed by its values on the diagonal flow `a_t`, which is how
//! this crate stores it ([`RadialProfile`]).
//!
//! The crate provides:
//!
//! * group structure: Iwasawa and Cartan coordinates ([`group`]);
//! * the discrete parameter set, Plancherel density and weak-type norms ([`spectrum`]);
//! * principal and discrete series matrix coefficients ([`spherical`]);
//! * the spherical Fourier transform, its inverse and Plancherel checks ([`transform`]);
//! * Fourier and spectral multipliers and their `L^p → L^q` bound functionals ([`multiplier`]);
//! * numerical checks of Hausdorff–Young and Paley type inequalities ([`inequality`]);
//! * heat flow and Picard solvers for nonlinear heat and wave equations ([`pde`]).
//!
//! ```
//! use sl2h::{gamma_set, plancherel_density, ParityClass};
//!
//! assert_eq!(gamma_set(4, 4).unwrap().members(), &[1, 3]);
//! assert_eq!(plancherel_density(ParityClass::Minus, 0.0), 1.0);
//! ```

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod group;
pub mod inequality;
pub mod multiplier;
pub mod numerics;
pub mod pde;
pub mod profile;
pub mod spectrum;
pub mod spherical;
pub mod transform;

pub use error::{Error, Result};
pub use group::{
    cartan, diag_flow, extend_type, haar_weight, iwasawa, rotation, shear, CartanCoords, GroupElement, IwasawaCoords,
};
pub use inequality::{
    dual_hausdorff_young_check, hausdorff_young_check, hyp_check, operator_norm_lower_bound, paley_check, run_family,
    BumpSpec, Check, PsiWeight, RatioEntry, RatioReport, Resolution, TestFamily,
};
pub use multiplier::{
    apply_fourier_multiplier, apply_spectral_multiplier, gaussian_power_sup, heat_bound, heat_propagator,
    multiplier_norm_bound, sobolev_operator, spectral_norm_bound, BoundReport, MultiplierSymbol, SpectralFunction,
};
pub use numerics::{integrate_periodic, integrate_radial, PeriodicRule, RadialRule, SpectralGrid};
pub use pde::{
    global_smallness_check, heat_existence_time, linear_heat_solve, nonlinear_heat_solve, nonlinear_wave_solve,
    wave_existence_time, CauchyState, PicardOptions, SolverMode, WaveCoefficients,
};
pub use profile::RadialProfile;
pub use spectrum::{
    gamma_set, plancherel_density, spectral_measure_integral, weak_sup_norm, DiscreteSpectrum, ParityClass, TypePair,
};
pub use spherical::{
    calibrate_eta, phi, phi_at, phi_elementary, phi_radial, psi_discrete, EtaCalibration, EtaTable, SphericalParams,
};
pub use transform::{
    forward_adaptive, forward_discrete, forward_principal, inverse, lp_norm, plancherel_check, PlancherelReport,
    SpectralData, SpectralEngine,
};

// The guide's code blocks run as doctests so the two cannot drift apart.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/group.md")]
    mod group {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/spherical.md")]
    mod spherical {}
    #[doc = include_str!("../../../book/src/transform.md")]
    mod transform {}
    #[doc = include_str!("../../../book/src/multipliers.md")]
    mod multipliers {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/cauchy.md")]
    mod cauchy {}
    #[doc = include_str!("../../../book/src/accuracy.md")]
    mod accuracy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
