//! Families of initial perturbations, scaled to a requested high-order energy.

use serde::{Deserialize, Serialize};

use super::{PerturbationState, SimError, Simulator};
use crate::homogeneous::Frame;
use crate::spectral::eigen_decompose;

/// Shape of `φ₀` (the velocity starts at zero; in the self-similar frame
/// its constant part is then fixed by the zero-energy projection).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialShape {
    /// The `index`-th eigenvector of `𝓛_δ`, normalized in `‖·‖_δ`.
    Eigenmode { index: usize },
    /// `constant + v_index`.
    ConstantPlusMode { constant: f64, index: usize },
    /// Smooth even bump `exp(−((z² − c²)/width²)²)`.
    Bump { center: f64, width: f64 },
}

/// Which component of the state carries the shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSlot {
    /// `φ₀ = a·shape`, `φ₁ = 0`.
    #[default]
    Position,
    /// `φ₀ = 0`, `φ₁ = a·shape`.
    Velocity,
}

/// Bisection steps used by [`Simulator::scaled_initial`].
pub const SHAPE_SCAN: usize = 60;

impl InitialShape {
    pub fn field(&self, sim: &Simulator) -> Result<Vec<f64>, SimError> {
        let mode = |index: usize| -> Result<Vec<f64>, SimError> {
            let dec = eigen_decompose(&sim.bg.op, index + 1)?;
            Ok(dec.eigenvectors[index].clone())
        };
        Ok(match *self {
            Self::Eigenmode { index } => mode(index)?,
            Self::ConstantPlusMode { constant, index } => mode(index)?.into_iter().map(|v| v + constant).collect(),
            Self::Bump { center, width } => {
                sim.bg.z.iter().map(|z| (-((z * z - center * center) / (width * width)).powi(2)).exp()).collect()
            }
        })
    }
}

impl Simulator {
    /// State with `a·shape` in the given slot (projected to zero energy in
    /// the self-similar frame).
    pub fn shaped_state(&self, shape: &[f64], amplitude: f64, slot: DataSlot) -> Result<PerturbationState, SimError> {
        let scaled: Vec<f64> = shape.iter().map(|v| amplitude * v).collect();
        let zero = vec![0.0; self.bg.n];
        let s = match slot {
            DataSlot::Position => self.initial_state(scaled, zero)?,
            DataSlot::Velocity => self.initial_state(zero, scaled)?,
        };
        Ok(match s.frame {
            Frame::SelfSimilar => self.project_zero_energy(&s)?.0,
            Frame::LinearRate => s,
        })
    }

    /// Scale `shape` (in the position slot) so that the high-order norm of
    /// the initial state equals `target`.
    pub fn scaled_initial(&self, shape: &InitialShape, target: f64) -> Result<PerturbationState, SimError> {
        self.scaled_initial_in(shape, target, DataSlot::Position)
    }

    pub fn scaled_initial_in(
        &self,
        shape: &InitialShape,
        target: f64,
        slot: DataSlot,
    ) -> Result<PerturbationState, SimError> {
        if !(target > 0.0) {
            return Err(SimError::InvalidConfig(format!("target energy {target} must be positive")));
        }
        let f = shape.field(self)?;
        let energy = |a: f64| -> Result<f64, SimError> {
            Ok(self.norm_energy(&self.shaped_state(&f, a, slot)?, self.config.norm_order)?.high_order)
        };
        // the norm is close to quadratic in the amplitude; bisect in log a
        let e1 = energy(1e-3)?;
        let guess = 1e-3 * (target / e1).sqrt();
        let (mut lo, mut hi) = (guess / 4.0, guess * 4.0);
        for _ in 0..SHAPE_SCAN {
            let mid = (lo * hi).sqrt();
            if energy(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-13 {
                break;
            }
        }
        self.shaped_state(&f, (lo * hi).sqrt(), slot)
    }
}
