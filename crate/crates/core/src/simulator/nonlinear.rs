//! The nonlinear operator `F_w` and the quadratic remainder `N_δ`.

use super::jet::{Jet, Scalar, JET_LEN};
use super::{Background, SimError, Simulator};
use crate::grid::{d2z, dz, Parity};

/// `(1+y)^p − Σ_{n<order} C(p,n) yⁿ`, summed as a series for small `y`
/// so that the leading cancellation never happens in floating point.
pub fn binomial_remainder<S: Scalar>(p: f64, y: S, order: usize) -> S {
    if y.value().abs() < 0.1 {
        let mut coeff = 1.0;
        for n in 0..order {
            coeff *= (p - n as f64) / (n + 1) as f64;
        }
        // Horner over the tail: Σ_{n≥order} C(p,n) yⁿ = y^order (c₀ + y(c₁ + …))
        let mut coeffs = Vec::with_capacity(32);
        let mut c = coeff;
        for n in order..order + 32 {
            coeffs.push(c);
            c *= (p - n as f64) / (n + 1) as f64;
        }
        let mut acc = S::constant(0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * y + c;
        }
        let mut yp = S::constant(1.0);
        for _ in 0..order {
            yp = yp * y;
        }
        acc * yp
    } else {
        let mut acc = (y + 1.0).powf(p);
        let mut c = 1.0;
        let mut yn = S::constant(1.0);
        for n in 0..order {
            acc = acc - yn * c;
            c *= (p - n as f64) / (n + 1) as f64;
            yn = yn * y;
        }
        acc
    }
}

/// Background data at one grid point.
#[derive(Clone, Copy)]
struct Point {
    z: f64,
    w: f64,
    wp: f64,
    delta: f64,
}

/// `(w³z)⁻¹∂_z(w⁴G) = (4w'/z)G + (w/z)G'`.
fn t_op<S: Scalar>(pt: Point, g: S, dg: S) -> S {
    g * (4.0 * pt.wp / pt.z) + dg * (pt.w / pt.z)
}

/// Pointwise `N_δ[φ]` from `φ`, `φ_z`, `φ_zz`.
fn n_point<S: Scalar>(phi: S, d1: S, d2: S, pt: Point) -> S {
    let z = pt.z;
    let one_p = phi + 1.0;
    let sq = one_p * one_p;
    let phi2 = phi * phi;

    // P = φ + φ² + φ³/3 = ((1+φ)³ − 1)/3, y = z⁻²∂_z(z³P)
    let p = phi + phi2 + phi2 * phi * (1.0 / 3.0);
    let dp = d1 * sq;
    let ddp = d2 * sq + d1 * d1 * one_p * 2.0;
    let y = p * 3.0 + dp * z;
    let dy = dp * 4.0 + ddp * z;

    let g1 = phi * 3.0 + d1 * z;
    let dg1 = d1 * 4.0 + d2 * z;

    // Q = φ² + φ³/3
    let q = phi2 + phi2 * phi * (1.0 / 3.0);
    let two_phi_phi2 = phi * 2.0 + phi2;
    let dq = d1 * two_phi_phi2;
    let ddq = d2 * two_phi_phi2 + d1 * d1 * (phi * 2.0 + 2.0);
    let gq = q * 3.0 + dq * z;
    let dgq = dq * 4.0 + ddq * z;

    // R(y) = (1+y)^{-4/3} − 1 + (4/3)y, R'(y) = −(4/3)[(1+y)^{-7/3} − 1]
    let r = binomial_remainder(-4.0 / 3.0, y, 2);
    let dr = binomial_remainder(-7.0 / 3.0, y, 1) * (-4.0 / 3.0) * dy;

    let rational = (phi2 * (phi * 2.0 + 3.0) * pt.delta - (phi2 * phi2 - phi2 * 2.0) * (4.0 * pt.wp / z)) / sq;
    rational + two_phi_phi2 * t_op(pt, g1, dg1) * (4.0 / 3.0) + sq * t_op(pt, gq, dgq) * (4.0 / 3.0)
        - sq * t_op(pt, r, dr)
}

impl Background {
    fn point(&self, i: usize) -> Point {
        Point { z: self.z[i], w: self.w[i], wp: self.wp[i], delta: self.delta }
    }

    fn check_domain(&self, phi: &[f64], radius: f64) -> Result<(), SimError> {
        let sup = phi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(sup <= radius) {
            return Err(SimError::DomainExceeded { sup, radius });
        }
        Ok(())
    }

    /// `N_δ[φ]` on the grid.
    pub fn evaluate_n(&self, phi: &[f64], radius: f64) -> Result<Vec<f64>, SimError> {
        self.check_domain(phi, radius)?;
        let d1 = dz(phi, self.h, Parity::Even);
        let d2 = d2z(phi, self.h, Parity::Even);
        Ok((0..self.n).map(|i| n_point(phi[i], d1[i], d2[i], self.point(i))).collect())
    }

    /// `N_δ` of a field given by its Taylor coefficients in frame time.
    pub fn evaluate_n_jet(&self, coeffs: &[Vec<f64>], radius: f64) -> Result<Vec<Jet>, SimError> {
        self.check_domain(&coeffs[0], radius)?;
        let jets = |fields: Vec<Vec<f64>>| -> Vec<Jet> {
            (0..self.n)
                .map(|i| {
                    let mut c = [0.0; JET_LEN];
                    for (m, f) in fields.iter().enumerate() {
                        c[m] = f[i];
                    }
                    Jet(c)
                })
                .collect()
        };
        let phi = jets(coeffs.to_vec());
        let d1 = jets(coeffs.iter().map(|c| dz(c, self.h, Parity::Even)).collect());
        let d2 = jets(coeffs.iter().map(|c| d2z(c, self.h, Parity::Even)).collect());
        Ok((0..self.n).map(|i| n_point(phi[i], d1[i], d2[i], self.point(i))).collect())
    }

    /// `F_w[ψ] = ψ²(w³z)⁻¹∂_z(w⁴J^{-4/3}) + ψ⁻²z⁻³∫₀ᶻ4πw³s²ds` with `J = ψ²(ψ + zψ_z)`.
    ///
    /// The enclosed mass is taken from the integrated profile equation,
    /// `∫₀ᶻ4πw³s² = −4z²w' − δz³`, which holds to the accuracy of the profile.
    pub fn evaluate_f(&self, psi: &[f64]) -> Result<Vec<f64>, SimError> {
        let d1 = dz(psi, self.h, Parity::Even);
        let d2 = d2z(psi, self.h, Parity::Even);
        (0..self.n)
            .map(|i| {
                let Point { z, w, wp, delta } = self.point(i);
                let (p, p1, p2) = (psi[i], d1[i], d2[i]);
                let stretch = p + z * p1;
                if !(p > 0.0 && stretch > 0.0) {
                    return Err(SimError::JacobianCollapse { z });
                }
                let j = p * p * stretch;
                let dj = 2.0 * p * p1 * stretch + p * p * (2.0 * p1 + z * p2);
                let pressure = 4.0 * wp / z * j.powf(-4.0 / 3.0) - 4.0 / 3.0 * w / z * j.powf(-7.0 / 3.0) * dj;
                let gravity = (-4.0 * wp / z - delta) / (p * p);
                Ok(p * p * pressure + gravity)
            })
            .collect()
    }
}

impl Simulator {
    /// `N_δ[φ]`, or zero in a linearized run.
    pub fn evaluate_n(&self, phi: &[f64]) -> Result<Vec<f64>, SimError> {
        if self.config.linearized {
            return Ok(vec![0.0; phi.len()]);
        }
        self.bg.evaluate_n(phi, self.config.domain_radius)
    }

    pub fn evaluate_f(&self, psi: &[f64]) -> Result<Vec<f64>, SimError> {
        self.bg.evaluate_f(psi)
    }
}
