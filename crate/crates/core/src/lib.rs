//! Numerical laboratory for the expanding and collapsing homologous stars of
//! the mass-critical (γ = 4/3) gravitational Euler–Poisson system.
//!
//! * [`profiles`] — enthalpy profiles `w_δ` from the generalized Lane-Emden equation.
//! * [`homogeneous`] — the radius dynamics `λ²λ̈ = δ`, classification and time frames.
//! * [`spectral`] — weighted operators `𝓛_{δ,k}`, `𝒮`, spectra and structural identities.
//! * [`simulator`] — perturbation evolution in the self-similar and linear-rate frames.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod grid;
pub mod homogeneous;
pub mod io;
pub mod numerics;
pub mod profiles;
pub mod simulator;
pub mod spectral;
