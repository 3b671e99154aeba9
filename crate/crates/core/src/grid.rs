//! Cell-centred grid on `[0, 1]` with the weighted quadratures of the
//! perturbation theory and the finite-difference stencils shared by the
//! spectral and evolution modules.
//!
//! Cells are `[ih, (i+1)h]` with centres `z_i = (i + ½)h`; no node sits on
//! either the center or the vacuum boundary. Fields are even in `z` about the
//! origin, so the ghost value left of the first cell is a mirror image; to the
//! right of the last cell a cubic extrapolation is used (the degenerate flux
//! form never needs it, only the non-conservative stencils do).

use serde::{Deserialize, Serialize};

use crate::numerics::quad::GaussRule;
use crate::profiles::EnthalpyProfile;

/// Reflection symmetry of a field about `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Self::Even => Self::Odd,
            Self::Odd => Self::Even,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Self::Even => 1.0,
            Self::Odd => -1.0,
        }
    }
}

/// Grid with the `(·,·)_{δ,k}` quadrature weights `∫_cell w^{3+k} z⁴ dz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGrid {
    pub k: usize,
    pub h: f64,
    /// Cell centres.
    pub nodes: Vec<f64>,
    pub quad_weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn new(profile: &EnthalpyProfile, k: usize, n: usize) -> Self {
        let h = 1.0 / n as f64;
        let nodes = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        let p = 3 + k as i32;
        let quad_weights = cell_integrals(n, |z| profile.eval(z).w.powi(p) * z.powi(4));
        Self { k, h, nodes, quad_weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(f, g)_{δ,k}`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.quad_weights.iter().zip(f).zip(g).map(|((m, a), b)| m * a * b).sum()
    }

    /// `‖f‖²_{δ,k}`.
    pub fn norm2(&self, f: &[f64]) -> f64 {
        self.inner(f, f)
    }

    /// `(f, 1)_{δ,k}`.
    pub fn mean(&self, f: &[f64]) -> f64 {
        self.quad_weights.iter().zip(f).map(|(m, a)| m * a).sum()
    }
}

/// Exact-to-quadrature cell integrals of a weight function.
pub fn cell_integrals<F: Fn(f64) -> f64>(n: usize, f: F) -> Vec<f64> {
    let rule = GaussRule::new(6);
    let h = 1.0 / n as f64;
    (0..n).map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, &f)).collect()
}

/// Cubic extrapolation to the ghost cell right of the last cell.
fn right_ghost(f: &[f64]) -> f64 {
    let n = f.len();
    4.0 * f[n - 1] - 6.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]
}

fn with_ghosts(f: &[f64], parity: Parity) -> (f64, f64) {
    (parity.sign() * f[0], right_ghost(f))
}

/// Central first derivative; the result has the opposite parity.
pub fn dz(f: &[f64], h: f64, parity: Parity) -> Vec<f64> {
    let n = f.len();
    let (gl, gr) = with_ghosts(f, parity);
    (0..n)
        .map(|i| {
            let a = if i == 0 { gl } else { f[i - 1] };
            let b = if i + 1 == n { gr } else { f[i + 1] };
            (b - a) / (2.0 * h)
        })
        .collect()
}

/// Central second derivative; parity is preserved.
pub fn d2z(f: &[f64], h: f64, parity: Parity) -> Vec<f64> {
    let n = f.len();
    let (gl, gr) = with_ghosts(f, parity);
    (0..n)
        .map(|i| {
            let a = if i == 0 { gl } else { f[i - 1] };
            let b = if i + 1 == n { gr } else { f[i + 1] };
            (b - 2.0 * f[i] + a) / (h * h)
        })
        .collect()
}

/// `∂_z^m` applied repeatedly to an even field.
pub fn dz_power(f: &[f64], h: f64, m: usize) -> Vec<f64> {
    let mut out = f.to_vec();
    let mut parity = Parity::Even;
    for _ in 0..m {
        out = dz(&out, h, parity);
        parity = parity.flip();
    }
    out
}

/// `𝒮φ = φ'' + (4/z)φ'` for an even field on the cell-centred grid.
///
/// In the first cell the mirror ghost turns the stencil into
/// `5(φ₁ − φ₀)/h²`, the discrete form of the center limit `𝒮φ(0) = 5φ''(0)`.
pub fn apply_s(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let gr = right_ghost(f);
    (0..n)
        .map(|i| {
            let z = (i as f64 + 0.5) * h;
            let a = if i == 0 { f[0] } else { f[i - 1] };
            let b = if i + 1 == n { gr } else { f[i + 1] };
            (b - 2.0 * f[i] + a) / (h * h) + 4.0 / z * (b - a) / (2.0 * h)
        })
        .collect()
}

/// Convenience wrapper taking the grid.
pub fn apply_s_on(field: &[f64], grid: &WeightedGrid) -> Vec<f64> {
    apply_s(field, grid.h)
}
