//! Conserved energy, the energy constraint and the high-order norms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::jet::JET_LEN;
use super::nonlinear::binomial_remainder;
use super::{PerturbationState, SimError, Simulator, MAX_NORM_ORDER};
use crate::grid::{apply_s, dz, dz_power, Parity};
use crate::homogeneous::Frame;

/// The four terms of the physical energy, including the frame factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyComponents {
    pub kinetic: f64,
    pub delta_term: f64,
    pub internal: f64,
    pub gravitational: f64,
}

impl EnergyComponents {
    pub fn total(&self) -> f64 {
        self.kinetic + self.delta_term + self.internal + self.gravitational
    }

    /// Sum of magnitudes: the natural yardstick for relative errors in `E`.
    pub fn scale(&self) -> f64 {
        self.kinetic.abs() + self.delta_term.abs() + self.internal.abs() + self.gravitational.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub order: usize,
    /// `ℰ` (self-similar) or `𝓔̃` (linear-rate), truncated at `order`.
    pub high_order: f64,
    /// Auxiliary energy `ℰ_aux = ‖φ‖² + Σ_j ‖∂ₛ^{j+1}φ‖² + ‖∂ₛʲ∂_zφ‖²_{δ,1}` (self-similar only).
    pub auxiliary: Option<f64>,
    /// `𝒟̃ = Σ_j (λ̃_τ/2)‖𝒮ʲφ_τ‖²_{δ,2j}` (linear-rate only).
    pub dissipation: Option<f64>,
    /// `λ^{1/2}‖φ̇‖_δ`.
    pub weighted_velocity: f64,
}

impl Simulator {
    fn rate(&self, state: &PerturbationState) -> f64 {
        state.lambda_dot / state.lambda
    }

    /// `J = (1+φ)²(1+φ+zφ_z)` written as `1 + y`.
    fn stretch_y(&self, phi: &[f64]) -> Result<Vec<f64>, SimError> {
        let d = dz(phi, self.bg.h, Parity::Even);
        (0..self.bg.n)
            .map(|i| {
                let (p, z) = (phi[i], self.bg.z[i]);
                let y = (1.0 + p).powi(3) - 1.0 + z * d[i] * (1.0 + p).powi(2);
                if !(1.0 + p > 0.0 && 1.0 + p + z * d[i] > 0.0) {
                    return Err(SimError::JacobianCollapse { z });
                }
                Ok(y)
            })
            .collect()
    }

    /// Physical energy `E(1+φ, φ̇)` of the state, term by term.
    pub fn physical_energy(&self, state: &PerturbationState) -> Result<EnergyComponents, SimError> {
        let bg = &self.bg;
        let m0 = &bg.grids[0].quad_weights;
        let r = self.rate(state);
        let lam = state.lambda;
        let kin_pref = match state.frame {
            Frame::SelfSimilar => 2.0 * PI / lam,
            Frame::LinearRate => 2.0 * PI,
        };
        let y = self.stretch_y(&state.phi)?;
        let (mut kin, mut dl, mut int, mut grav) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..bg.n {
            let psi = 1.0 + state.phi[i];
            kin += m0[i] * (state.phi_dot[i] + r * psi).powi(2);
            dl += m0[i] / psi;
            int += bg.w4z2[i] * (1.0 + y[i]).powf(-1.0 / 3.0);
            grav += bg.dw4z3[i] / psi;
        }
        Ok(EnergyComponents {
            kinetic: kin_pref * kin,
            delta_term: 4.0 * PI * bg.delta / lam * dl,
            internal: 12.0 * PI / lam * int,
            gravitational: 4.0 * PI / lam * grav,
        })
    }

    /// `E(1, 0)` on the state's background.
    pub fn background_energy(&self, state: &PerturbationState) -> Result<EnergyComponents, SimError> {
        let n = self.bg.n;
        let zero = PerturbationState { phi: vec![0.0; n], phi_dot: vec![0.0; n], ..state.clone() };
        self.physical_energy(&zero)
    }

    /// Kinetic and potential parts of the quadratic remainder of `E`:
    /// `‖φ̇ + rφ‖²` and `2∫(δ + 4w'/z)φ²/(1+φ) w³z⁴ + 6∫(J^{-1/3} − 1 + y/3)w⁴z²`.
    fn remainder_parts(&self, state: &PerturbationState) -> Result<(f64, f64), SimError> {
        let bg = &self.bg;
        let m0 = &bg.grids[0].quad_weights;
        let r = self.rate(state);
        let y = self.stretch_y(&state.phi)?;
        let (mut kin, mut pot) = (0.0, 0.0);
        for i in 0..bg.n {
            let p = state.phi[i];
            kin += m0[i] * (state.phi_dot[i] + r * p).powi(2);
            let frac = p * p / (1.0 + p);
            pot += 2.0 * (bg.delta * m0[i] + bg.dw4z3[i]) * frac;
            pot += 6.0 * bg.w4z2[i] * binomial_remainder(-1.0 / 3.0, y[i], 2);
        }
        Ok((kin, pot))
    }

    /// Quadratic functional `𝒥[φ]` (self-similar) or `𝒥̃[φ]` (linear-rate).
    pub fn j_functional(&self, state: &PerturbationState) -> Result<f64, SimError> {
        let (kin, pot) = self.remainder_parts(state)?;
        Ok(match state.frame {
            Frame::SelfSimilar => (kin + pot) / (2.0 * self.b),
            Frame::LinearRate => 0.5 * (kin + pot / state.lambda),
        })
    }

    /// `κ = (E(1+φ, φ̇) − E(1, 0))/4π`.
    pub fn kappa(&self, state: &PerturbationState) -> Result<f64, SimError> {
        Ok((self.physical_energy(state)?.total() - self.background_energy(state)?.total()) / (4.0 * PI))
    }

    /// Residual of the linearized energy identity.
    ///
    /// Self-similar: `|(3/2)b(φ,1)_δ − (φ_s,1)_δ + 𝒥[φ]|`, which vanishes on the
    /// zero-energy surface. Linear-rate: `|(ẽ − 3δ/λ̃)(φ,1)_δ + (λ̃_τ/λ̃)(φ_τ,1)_δ − κ + 𝒥̃[φ]|`
    /// with `κ` taken from the initial data.
    pub fn constraint_residual(&self, state: &PerturbationState, kappa: f64) -> Result<f64, SimError> {
        let mphi = self.bg.mean(&state.phi);
        let mdot = self.bg.mean(&state.phi_dot);
        let j = self.j_functional(state)?;
        Ok(match state.frame {
            Frame::SelfSimilar => (1.5 * self.b * mphi - mdot + j).abs(),
            Frame::LinearRate => {
                let r = self.rate(state);
                let d = self.bg.delta;
                let e_tilde = r * r + 2.0 * d / state.lambda;
                ((e_tilde - 3.0 * d / state.lambda) * mphi + r * mdot - kappa + j).abs()
            }
        })
    }

    /// Shift the constant part of `φ̇` so that `E(1+φ, φ̇) = E(1, 0)`.
    ///
    /// `E` is quadratic in the shift `α`: `Aα² + Bα + C = 0`; the root of smaller
    /// magnitude is taken (computed in the cancellation-free form `C/q`).
    pub fn project_zero_energy(&self, state: &PerturbationState) -> Result<(PerturbationState, f64), SimError> {
        let target = self.background_energy(state)?.total();
        let comps = self.physical_energy(state)?;
        let c = comps.total() - target;
        let kin_pref = match state.frame {
            Frame::SelfSimilar => 2.0 * PI / state.lambda,
            Frame::LinearRate => 2.0 * PI,
        };
        let r = self.rate(state);
        let a = kin_pref * self.bg.unit_mass();
        let v: Vec<f64> = state.phi_dot.iter().zip(&state.phi).map(|(d, p)| d + r * (1.0 + p)).collect();
        let bcoef = 2.0 * kin_pref * self.bg.mean(&v);
        let disc = bcoef * bcoef - 4.0 * a * c;
        if disc < 0.0 {
            return Err(SimError::NoRealRoot { discriminant: disc });
        }
        let alpha = if c == 0.0 {
            0.0
        } else {
            let q = -0.5 * (bcoef + bcoef.signum() * disc.sqrt());
            c / q
        };
        let mut out = state.clone();
        out.phi_dot.iter_mut().for_each(|v| *v += alpha);
        // one Newton polish against the discrete energy
        let resid = self.physical_energy(&out)?.total() - target;
        let slope = 2.0 * a * alpha + bcoef;
        if slope != 0.0 && resid.abs() > self.config.projection_tol * comps.scale() {
            let d = resid / slope;
            out.phi_dot.iter_mut().for_each(|v| *v -= d);
            return Ok((out, alpha - d));
        }
        Ok((out, alpha))
    }

    /// Taylor coefficients `c_m = ∂ₛᵐφ/m!`, `m ≤ order + 1`, generated from the equation of motion.
    fn time_jet(&self, state: &PerturbationState, order: usize) -> Result<Vec<Vec<f64>>, SimError> {
        let n = self.bg.n;
        let d = self.bg.delta;
        let mut c = vec![state.phi.clone(), state.phi_dot.clone()];
        for m in 0..order {
            let nonlinear = if self.config.linearized {
                vec![0.0; n]
            } else {
                let jets = self.bg.evaluate_n_jet(&c[..=m], self.config.domain_radius)?;
                jets.iter().map(|j| j.0[m]).collect()
            };
            let lc = self.bg.op.apply(&c[m]);
            let denom = ((m + 2) * (m + 1)) as f64;
            let next = (0..n)
                .map(|i| {
                    (0.5 * self.b * (m + 1) as f64 * c[m + 1][i] - 3.0 * d * c[m][i] - lc[i] + nonlinear[i]) / denom
                })
                .collect();
            c.push(next);
        }
        debug_assert!(c.len() <= JET_LEN);
        Ok(c)
    }

    /// Truncated high-order norms of the state.
    pub fn norm_energy(&self, state: &PerturbationState, order: usize) -> Result<NormReport, SimError> {
        let max = self.config.norm_order.min(MAX_NORM_ORDER);
        if order > max {
            return Err(SimError::OrderUnavailable { order, max });
        }
        let bg = &self.bg;
        let h = bg.h;
        let weighted_velocity = (state.lambda * bg.norm2(0, &state.phi_dot)).sqrt();
        match state.frame {
            Frame::SelfSimilar => {
                let jet = self.time_jet(state, order)?;
                let mut fact = 1.0;
                let dt: Vec<Vec<f64>> = jet
                    .into_iter()
                    .enumerate()
                    .map(|(m, c)| {
                        if m > 0 {
                            fact *= m as f64;
                        }
                        c.into_iter().map(|v| v * fact).collect()
                    })
                    .collect();
                // table[m][k] = ∂ₛᵐ∂_zᵏφ
                let table: Vec<Vec<Vec<f64>>> =
                    dt.iter().map(|f| (0..=order + 1).map(|k| dz_power(f, h, k)).collect()).collect();
                let mut high = 0.0;
                for j in 0..=order {
                    for k in 0..=j {
                        high += bg.norm2(k, &table[j - k + 1][k]);
                        high += bg.norm2(k + 1, &table[j - k][k + 1]);
                        high += bg.norm2(k, &table[j - k][k]);
                    }
                }
                let mut aux = bg.norm2(0, &state.phi);
                for j in 0..=order {
                    aux += bg.norm2(0, &table[j + 1][0]) + bg.norm2(1, &table[j][1]);
                }
                Ok(NormReport { order, high_order: high, auxiliary: Some(aux), dissipation: None, weighted_velocity })
            }
            Frame::LinearRate => {
                let mut s_phi = state.phi.clone();
                let mut s_dot = state.phi_dot.clone();
                let (mut high, mut diss) = (0.0, 0.0);
                for j in 0..=order {
                    let kin = bg.norm2(2 * j, &s_dot);
                    high += state.lambda * kin + bg.norm2(2 * j, &s_phi);
                    high += bg.norm2(2 * j + 1, &dz(&s_phi, h, Parity::Even));
                    diss += 0.5 * state.lambda_dot * kin;
                    if j < order {
                        s_phi = apply_s(&s_phi, h);
                        s_dot = apply_s(&s_dot, h);
                    }
                }
                Ok(NormReport { order, high_order: high, auxiliary: None, dissipation: Some(diss), weighted_velocity })
            }
        }
    }

    /// `Σ_{j≤J}‖𝒮ʲf‖²_{δ,2j}` — the square of the `𝔥ᴶ_{δ,0}` norm.
    pub fn s_norm2(&self, f: &[f64], order: usize) -> f64 {
        let mut g = f.to_vec();
        let mut acc = 0.0;
        for j in 0..=order {
            acc += self.bg.norm2(2 * j, &g);
            if j < order {
                g = apply_s(&g, self.bg.h);
            }
        }
        acc
    }
}
