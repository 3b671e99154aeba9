//! Weighted linearized operators `𝓛_{δ,k}ψ = −(4/3)(w^{3+k}z⁴)^{-1}∂_z(w^{4+k}z⁴∂_zψ)`
//! and their spectra.
//!
//! The operator is discretized in flux form on the cell-centred grid:
//! face fluxes carry `(4/3)w^{4+k}z⁴`, which vanishes at both ends (at the
//! center through `z⁴`, at the vacuum boundary through `w`), so no boundary
//! condition is imposed anywhere. The stiffness matrix `S` is symmetric
//! tridiagonal with zero row sums, and the mass matrix `M` holds the cell
//! integrals of `w^{3+k}z⁴`; the discrete operator is `M⁻¹S`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{apply_s, cell_integrals, dz, Parity, WeightedGrid};
use crate::numerics::tridiag;
use crate::profiles::EnthalpyProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigensolver did not converge (pair {index}, residual {residual:e})")]
    ConvergenceFailure { index: usize, residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl SpectralError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ConvergenceFailure { .. } => "ConvergenceFailure",
            Self::InvalidInput(_) => "InvalidInput",
        }
    }
}

/// Discrete `𝓛_{δ,k}` as the pencil `(S, M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub k: usize,
    pub grid: WeightedGrid,
    /// Diagonal of the symmetric stiffness matrix.
    pub diag: Vec<f64>,
    /// Off-diagonal of the stiffness matrix (`off[i]` couples cells `i`, `i+1`).
    pub off: Vec<f64>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.grid.quad_weights
    }

    /// `S v`, evaluated as a difference of face fluxes so constants map to exactly zero.
    pub fn stiffness_apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let flux: Vec<f64> = (0..n - 1).map(|i| -self.off[i] * (v[i + 1] - v[i])).collect();
        (0..n)
            .map(|i| {
                let left = if i > 0 { flux[i - 1] } else { 0.0 };
                let right = if i + 1 < n { flux[i] } else { 0.0 };
                left - right
            })
            .collect()
    }

    /// `𝓛_{δ,k} v ≈ M⁻¹ S v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.stiffness_apply(v).iter().zip(self.mass()).map(|(a, m)| a / m).collect()
    }

    /// Dense copy of `S` (row-major), for diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }

    /// `max|S − Sᵀ| / max|S|` of the dense representation.
    pub fn asymmetry(&self) -> f64 {
        let a = self.to_dense();
        let n = a.len();
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                num = num.max((a[i][j] - a[j][i]).abs());
                den = den.max(a[i][j].abs());
            }
        }
        num / den
    }

    /// Symmetric tridiagonal `M^{-1/2} S M^{-1/2}`.
    fn symmetrized(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.mass();
        let d = self.diag.iter().zip(m).map(|(a, m)| a / m).collect();
        let e = self.off.iter().enumerate().map(|(i, a)| a / (m[i] * m[i + 1]).sqrt()).collect();
        (d, e)
    }
}

/// Face coefficients `(4/3)w^{4+k}z⁴/h` at the interior faces `z = (i+1)h`.
fn face_fluxes(profile: &EnthalpyProfile, k: usize, n: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    (1..n)
        .map(|i| {
            let z = i as f64 * h;
            4.0 / 3.0 * profile.eval(z).w.powi(4 + k as i32) * z.powi(4) / h
        })
        .collect()
}

pub fn assemble_l(profile: &EnthalpyProfile, k: usize, n: usize) -> Result<OperatorMatrix, SpectralError> {
    if n < 16 {
        return Err(SpectralError::InvalidInput(format!("N = {n} < 16")));
    }
    let grid = WeightedGrid::new(profile, k, n);
    let kf = face_fluxes(profile, k, n);
    let diag = (0..n).map(|i| if i > 0 { kf[i - 1] } else { 0.0 } + if i + 1 < n { kf[i] } else { 0.0 }).collect();
    let off = kf.iter().map(|v| -v).collect();
    Ok(OperatorMatrix { k, grid, diag, off })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub k: usize,
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors at the cell centres, `(v_i, v_j)_{δ,k} = δ_ij`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖M^{-1/2}(Sv − μMv)‖` per pair.
    pub residuals: Vec<f64>,
}

pub fn eigen_decompose(op: &OperatorMatrix, n_eigs: usize) -> Result<SpectralDecomposition, SpectralError> {
    let n = op.dim();
    if n_eigs == 0 || n_eigs > n {
        return Err(SpectralError::InvalidInput(format!("n_eigs = {n_eigs} with N = {n}")));
    }
    let (d, e) = op.symmetrized();
    let (lo, hi) = tridiag::gershgorin(&d, &e);
    let scale = lo.abs().max(hi.abs());
    let mut eigenvalues = Vec::with_capacity(n_eigs);
    let mut units: Vec<Vec<f64>> = Vec::with_capacity(n_eigs);
    let mut residuals = Vec::with_capacity(n_eigs);
    for j in 0..n_eigs {
        let mu = tridiag::kth_eigenvalue(&d, &e, j);
        let u = tridiag::eigenvector(&d, &e, mu, &units);
        let r: f64 = tridiag::matvec(&d, &e, &u).iter().zip(&u).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
        if !(r <= 1e-9 * scale) {
            return Err(SpectralError::ConvergenceFailure { index: j, residual: r });
        }
        eigenvalues.push(mu);
        units.push(u);
        residuals.push(r);
    }
    let m = op.mass();
    let eigenvectors = units.iter().map(|u| u.iter().zip(m).map(|(a, m)| a / m.sqrt()).collect()).collect();
    Ok(SpectralDecomposition { k: op.k, eigenvalues, eigenvectors, residuals })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub mu1: f64,
    /// `b = −√(2|δ|)` for `δ < 0`, zero otherwise.
    pub b: f64,
    /// `b² < (2/3)μ₁`.
    pub predicate: bool,
    /// Mean-zero coercivity constant `μ₂ = μ₁ − (3/2)b²`.
    pub mu2: f64,
}

pub fn gap_conditions(decomp: &SpectralDecomposition, delta: f64) -> Result<GapReport, SpectralError> {
    let mu1 = *decomp
        .eigenvalues
        .get(1)
        .ok_or_else(|| SpectralError::InvalidInput("need at least two eigenvalues".into()))?;
    let b = if delta < 0.0 { -(2.0 * delta.abs()).sqrt() } else { 0.0 };
    Ok(GapReport { mu1, b, predicate: b * b < 2.0 / 3.0 * mu1, mu2: mu1 - 1.5 * b * b })
}

/// A polynomial in `z²`: `Σ c_j z^{2j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenPolynomial(pub Vec<f64>);

impl EvenPolynomial {
    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * z * z + c)
    }
}

/// Coefficient `a_k = −(4/3)[(5+4k)w'' + 4w'/z]` of the commutator identity.
pub fn commutator_a(profile: &EnthalpyProfile, k: usize, z: f64) -> f64 {
    let p = profile.eval(z);
    -4.0 / 3.0 * ((5.0 + 4.0 * k as f64) * p.wpp + 4.0 * p.wp / z)
}

/// Coefficient `b_k = −(4/3)(2+2k)[w''' − 4(w'' − w'/z)/z]`.
pub fn commutator_b(profile: &EnthalpyProfile, k: usize, z: f64) -> f64 {
    let p = profile.eval(z);
    let c = 2.0 + 2.0 * k as f64;
    -4.0 / 3.0 * c * (profile.third_derivative(z) - 4.0 * (p.wpp - p.wp / z) / z)
}

/// Largest `‖𝒮𝓛_{2k}ψ − 𝓛_{2k+2}𝒮ψ − a_{k+1}𝒮ψ − b_{k+1}ψ'‖_{δ,2k+2}` over the test fields,
/// all operators taken in their discrete form on an `N`-cell grid.
pub fn commutator_residual(
    profile: &EnthalpyProfile,
    k: usize,
    n: usize,
    test_fields: &[EvenPolynomial],
) -> Result<f64, SpectralError> {
    let lo = assemble_l(profile, 2 * k, n)?;
    let hi = assemble_l(profile, 2 * k + 2, n)?;
    let h = 1.0 / n as f64;
    let z = &lo.grid.nodes;
    let a: Vec<f64> = z.iter().map(|&z| commutator_a(profile, k + 1, z)).collect();
    let b: Vec<f64> = z.iter().map(|&z| commutator_b(profile, k + 1, z)).collect();
    let mut worst: f64 = 0.0;
    for f in test_fields {
        let psi: Vec<f64> = z.iter().map(|&z| f.eval(z)).collect();
        let lhs = apply_s(&lo.apply(&psi), h);
        let s_psi = apply_s(&psi, h);
        let l_s = hi.apply(&s_psi);
        let d_psi = dz(&psi, h, Parity::Even);
        let r: Vec<f64> = (0..n).map(|i| lhs[i] - l_s[i] - a[i] * s_psi[i] - b[i] * d_psi[i]).collect();
        worst = worst.max(hi.grid.norm2(&r).sqrt());
    }
    Ok(worst)
}

/// Windows (in `z` and `1 − z`) for reading off the boundary asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleWindows {
    pub center: (f64, f64),
    pub boundary: (f64, f64),
    pub samples: usize,
}

impl Default for LiouvilleWindows {
    fn default() -> Self {
        Self { center: (1e-3, 1e-2), boundary: (1e-4, 1e-3), samples: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSamples {
    pub k: usize,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub q: Vec<f64>,
    pub y_plus: f64,
    /// `q·y²` at the innermost center sample.
    pub center_limit: f64,
    /// `q·(y₊ − y)²` at the innermost boundary sample.
    pub boundary_limit: f64,
    /// Largest relative spread of `q·y²` across the center window.
    pub center_spread: f64,
    pub boundary_spread: f64,
    /// The predicted boundary constant `(7+2k)(5+2k)/4`.
    pub boundary_expected: f64,
}

/// Schrödinger potential `q(y)` of the Liouville-transformed operator.
///
/// With `dy/dz = √(3/(4w))`, `W = w^{a}`, `a = (7+2k)/4`, the potential is
/// `q = (2a(2a−1)/3)w'²/w + (4a/3)w'' + (16a+4)/3·w'/z + (8/3)w/z²`.
pub fn liouville_potential(profile: &EnthalpyProfile, k: usize, windows: &LiouvilleWindows) -> PotentialSamples {
    let a = (7.0 + 2.0 * k as f64) / 4.0;
    let q_at = |z: f64| {
        let p = profile.eval(z);
        2.0 * a * (2.0 * a - 1.0) / 3.0 * p.wp * p.wp / p.w
            + 4.0 * a / 3.0 * p.wpp
            + (16.0 * a + 4.0) / 3.0 * p.wp / z
            + 8.0 / 3.0 * p.w / (z * z)
    };
    // y₊ − y(z) = ∫_z^1 √(3/(4w)) by the substitution z = 1 − t², which removes the edge singularity.
    let rule = crate::numerics::quad::GaussRule::new(10);
    let tail = |z: f64| {
        let tmax = (1.0 - z).max(0.0).sqrt();
        rule.composite(0.0, tmax, 64, |t| {
            let zz = 1.0 - t * t;
            if t == 0.0 {
                0.0
            } else {
                2.0 * t * (0.75 / profile.eval(zz).w).sqrt()
            }
        })
    };
    let y_plus = tail(0.0);
    let geo = |lo: f64, hi: f64, m: usize| -> Vec<f64> {
        (0..m).map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64)).collect()
    };
    let m = windows.samples.max(4);
    let mut z: Vec<f64> = geo(windows.center.0, windows.center.1, m / 4);
    z.extend(
        (1..m / 2)
            .map(|i| windows.center.1 + (1.0 - windows.boundary.1 - windows.center.1) * i as f64 / (m / 2) as f64),
    );
    z.extend(geo(windows.boundary.1, windows.boundary.0, m / 4).into_iter().map(|d| 1.0 - d));
    let y: Vec<f64> = z.iter().map(|&zz| y_plus - tail(zz)).collect();
    let q: Vec<f64> = z.iter().map(|&zz| q_at(zz)).collect();

    let center: Vec<f64> = (0..m / 4).map(|i| q[i] * y[i] * y[i]).collect();
    let nb = z.len();
    let boundary: Vec<f64> = (nb - m / 4..nb).map(|i| q[i] * (y_plus - y[i]).powi(2)).collect();
    let spread = |v: &[f64], target: f64| v.iter().map(|x| ((x - target) / target).abs()).fold(0.0, f64::max);
    let boundary_expected = (7.0 + 2.0 * k as f64) * (5.0 + 2.0 * k as f64) / 4.0;
    PotentialSamples {
        k,
        center_limit: center[0],
        boundary_limit: *boundary.last().expect("samples"),
        center_spread: spread(&center, 2.0),
        boundary_spread: spread(&boundary, boundary_expected),
        boundary_expected,
        z,
        y,
        q,
        y_plus,
    }
}

/// `∫_cell w^{3+k}z⁴` check value for the grid weights: the analytic total `∫₀¹ w^{3+k}z⁴`.
pub fn weight_total(profile: &EnthalpyProfile, k: usize) -> f64 {
    cell_integrals(256, |z| profile.eval(z).w.powi(3 + k as i32) * z.powi(4)).iter().sum()
}

/// `4π∫w³z²` written through the grid of index 0 — used as a sanity link to the mass.
pub fn grid_mass(profile: &EnthalpyProfile, n: usize) -> f64 {
    4.0 * PI * cell_integrals(n, |z| profile.eval(z).w.powi(3) * z * z).iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::solve_profile;

    #[test]
    fn constants_lie_in_the_kernel_exactly() {
        let p = solve_profile(0.0, 1e-12).unwrap();
        let op = assemble_l(&p, 1, 64).unwrap();
        let r = op.apply(&vec![1.0; 64]);
        assert!(r.iter().all(|v| v.abs() < 1e-9));
        assert_eq!(op.asymmetry(), 0.0);
    }

    #[test]
    fn quadratic_form_is_the_gradient_energy() {
        let p = solve_profile(0.0, 1e-12).unwrap();
        let err = |n: usize| {
            let op = assemble_l(&p, 0, n).unwrap();
            let g1 = WeightedGrid::new(&p, 1, n);
            let phi: Vec<f64> = op.grid.nodes.iter().map(|z| z * z).collect();
            let dphi: Vec<f64> = op.grid.nodes.iter().map(|z| 2.0 * z).collect();
            let lhs = op.grid.inner(&op.apply(&phi), &phi);
            let rhs = 4.0 / 3.0 * g1.norm2(&dphi);
            (lhs - rhs).abs() / rhs
        };
        let (e1, e2) = (err(128), err(256));
        assert!(e1 < 1e-3 && e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn eigenvalues_agree_with_a_dense_reference() {
        let p = solve_profile(-0.05, 1e-12).unwrap();
        let op = assemble_l(&p, 0, 48).unwrap();
        let dec = eigen_decompose(&op, 5).unwrap();
        let (d, e) = op.symmetrized();
        let dense = nalgebra::DMatrix::from_fn(48, 48, |i, j| {
            if i == j {
                d[i]
            } else if i + 1 == j {
                e[i]
            } else if j + 1 == i {
                e[j]
            } else {
                0.0
            }
        });
        let mut reference: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in dec.eigenvalues.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-8 * reference[47], "{a} vs {b}");
        }
    }
}
