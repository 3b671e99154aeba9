//! Evolution of perturbations of expanding homogeneous stars in similarity
//! variables.
//!
//! Two frames are supported. In the self-similar frame (`s`, with
//! `dλ̄/ds = −bλ̄`, `b = −√(2|δ|)`) the perturbation obeys
//! `φ_ss = ½bφ_s − 3δφ − 𝓛_δφ + N_δ[φ]`; in the linear-rate frame (`τ`)
//! it obeys `λ̃φ_ττ = −λ̃_τφ_τ − 3δφ − 𝓛_δφ + N_δ[φ]` while the background
//! radius follows `λ̃_ττ = λ̃_τ²/λ̃ + δ`. The linear part uses the flux-form
//! operator of [`crate::spectral`]; the remainder `N_δ` is evaluated from
//! its explicit polynomial expansion, so small perturbations never suffer
//! cancellation against the background.

mod data;
mod energy;
mod jet;
mod nonlinear;
mod run;

pub use data::{DataSlot, InitialShape, SHAPE_SCAN};
pub use energy::{EnergyComponents, NormReport};
pub use jet::{Jet, Scalar, JET_LEN};
pub use nonlinear::binomial_remainder;
pub use run::{fit_decay, DecayReport, DiagnosticRecord, DiagnosticsSeries, Snapshot, ThetaLimitReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{cell_integrals, WeightedGrid};
use crate::homogeneous::{classify, ClassKind, Frame, HomogeneousError, HomogeneousParams};
use crate::profiles::EnthalpyProfile;
use crate::spectral::{assemble_l, OperatorMatrix, SpectralError};

/// Highest supported truncation order of the high-order norms.
pub const MAX_NORM_ORDER: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("flow-map Jacobian lost positivity at z = {z}")]
    JacobianCollapse { z: f64 },
    #[error("sup |φ| = {sup} exceeds the expansion radius {radius}")]
    DomainExceeded { sup: f64, radius: f64 },
    #[error("time step {dt} exceeds the stability bound {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("non-finite values at frame time {time}")]
    NanDetected { time: f64 },
    #[error("norm {norm:e} exceeded the blow-up ceiling at frame time {time}")]
    BlowUpDetected { time: f64, norm: f64 },
    #[error("no real velocity shift reaches zero energy (discriminant {discriminant:e})")]
    NoRealRoot { discriminant: f64 },
    #[error("norm order {order} unavailable (maximum {max})")]
    OrderUnavailable { order: usize, max: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Homogeneous(#[from] HomogeneousError),
}

impl SimError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::JacobianCollapse { .. } => "JacobianCollapse",
            Self::DomainExceeded { .. } => "DomainExceeded",
            Self::CflViolation { .. } => "CFLViolation",
            Self::NanDetected { .. } => "NaNDetected",
            Self::BlowUpDetected { .. } => "BlowUpDetected",
            Self::NoRealRoot { .. } => "NoRealRoot",
            Self::OrderUnavailable { .. } => "OrderUnavailable",
            Self::InsufficientData(_) => "InsufficientData",
            Self::InvalidConfig(_) => "InvalidConfig",
            Self::Spectral(e) => e.name(),
            Self::Homogeneous(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub frame: Frame,
    pub delta: f64,
    /// Number of grid cells.
    pub n: usize,
    /// Courant number relative to the sound speed `√((4/3)w/λ)`.
    pub cfl: f64,
    /// Largest step regardless of the Courant bound (keeps the frame ODE resolved).
    pub dt_max: f64,
    pub t_end: f64,
    pub norm_order: usize,
    /// Background data; required in the linear-rate frame.
    pub homog: Option<HomogeneousParams>,
    /// Record diagnostics every `stride` steps.
    pub stride: usize,
    /// Store the field every `snapshot_interval` units of frame time, if set.
    pub snapshot_interval: Option<f64>,
    pub blowup_ceiling: f64,
    /// Largest `sup|φ|` for which the polynomial expansion of `N_δ` is used.
    pub domain_radius: f64,
    /// Drop `N_δ` (linearized evolution).
    pub linearized: bool,
    /// Hold `λ̃ = 1`, `λ̃_τ = 0` (linear-rate frame only).
    pub freeze_background: bool,
    pub max_retries: usize,
    /// Target for `|E|` after zero-energy projection, relative to the energy scale.
    pub projection_tol: f64,
}

impl SimConfig {
    fn base(frame: Frame, delta: f64, n: usize, t_end: f64) -> Self {
        Self {
            frame,
            delta,
            n,
            cfl: 0.5,
            dt_max: 0.01,
            t_end,
            norm_order: 2,
            homog: None,
            stride: 20,
            snapshot_interval: None,
            blowup_ceiling: 1e6,
            domain_radius: 0.5,
            linearized: false,
            freeze_background: false,
            max_retries: 3,
            projection_tol: 1e-12,
        }
    }

    pub fn self_similar(delta: f64, n: usize, t_end: f64) -> Self {
        Self::base(Frame::SelfSimilar, delta, n, t_end)
    }

    pub fn linear_rate(homog: HomogeneousParams, n: usize, t_end: f64) -> Self {
        Self { homog: Some(homog), ..Self::base(Frame::LinearRate, homog.delta, n, t_end) }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if self.n < 16 {
            return bad(format!("N = {} < 16", self.n));
        }
        if !(self.cfl > 0.0 && self.dt_max > 0.0 && self.t_end >= 0.0) {
            return bad("cfl, dt_max must be positive and t_end non-negative".into());
        }
        if self.norm_order > MAX_NORM_ORDER {
            return Err(SimError::OrderUnavailable { order: self.norm_order, max: MAX_NORM_ORDER });
        }
        if self.stride == 0 || self.snapshot_interval.is_some_and(|dt| !(dt > 0.0)) {
            return bad("stride and snapshot interval must be positive".into());
        }
        match self.frame {
            Frame::SelfSimilar => {
                if !(self.delta < 0.0) {
                    return bad(format!("self-similar frame needs delta < 0, got {}", self.delta));
                }
            }
            Frame::LinearRate => {
                let h = self
                    .homog
                    .ok_or_else(|| SimError::InvalidConfig("linear-rate frame needs homogeneous data".into()))?;
                h.validate()?;
                if (h.delta - self.delta).abs() > 1e-12 {
                    return bad(format!("background delta {} differs from {}", h.delta, self.delta));
                }
                let kind = classify(&h).kind;
                if !self.freeze_background && !matches!(kind, ClassKind::LinearExpansion | ClassKind::AffineExpansion) {
                    return bad(format!("background is {}, not a linear expansion", kind.label()));
                }
            }
        }
        Ok(())
    }
}

/// Profile data sampled on the simulation grid.
#[derive(Debug, Clone)]
pub struct Background {
    pub delta: f64,
    pub n: usize,
    pub h: f64,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub wp: Vec<f64>,
    /// `𝓛_δ` (weight index 0).
    pub op: OperatorMatrix,
    /// Quadratures `(·,·)_{δ,k}` for `k = 0..=2·MAX_NORM_ORDER+1`.
    pub grids: Vec<WeightedGrid>,
    /// Cell integrals of `w⁴z²`.
    pub w4z2: Vec<f64>,
    /// Cell integrals of `∂_z(w⁴)z³`.
    pub dw4z3: Vec<f64>,
    /// Largest sound speed `√((4/3)w)`.
    pub max_speed: f64,
}

impl Background {
    pub fn new(profile: &EnthalpyProfile, n: usize) -> Result<Self, SimError> {
        let op = assemble_l(profile, 0, n)?;
        let h = op.grid.h;
        let z = op.grid.nodes.clone();
        let pts: Vec<_> = z.iter().map(|&z| profile.eval(z)).collect();
        let grids = (0..=2 * MAX_NORM_ORDER + 1)
            .map(|k| if k == 0 { op.grid.clone() } else { WeightedGrid::new(profile, k, n) })
            .collect();
        let w4z2 = cell_integrals(n, |z| profile.eval(z).w.powi(4) * z * z);
        let dw4z3 = cell_integrals(n, |z| {
            let p = profile.eval(z);
            4.0 * p.w.powi(3) * p.wp * z.powi(3)
        });
        Ok(Self {
            delta: profile.delta,
            n,
            h,
            w: pts.iter().map(|p| p.w).collect(),
            wp: pts.iter().map(|p| p.wp).collect(),
            max_speed: (4.0 / 3.0 * profile.center_value.max(pts[0].w)).sqrt(),
            z,
            op,
            grids,
            w4z2,
            dw4z3,
        })
    }

    /// `(f, g)_{δ,k}`.
    pub fn inner(&self, k: usize, f: &[f64], g: &[f64]) -> f64 {
        self.grids[k].inner(f, g)
    }

    pub fn norm2(&self, k: usize, f: &[f64]) -> f64 {
        self.grids[k].norm2(f)
    }

    /// `(f, 1)_δ`.
    pub fn mean(&self, f: &[f64]) -> f64 {
        self.grids[0].mean(f)
    }

    /// `‖1‖²_δ`.
    pub fn unit_mass(&self) -> f64 {
        self.grids[0].quad_weights.iter().sum()
    }
}

/// Perturbation `φ = ψ − 1` (or `θ − 1`) with its frame-time derivative and the
/// background factors `λ` and `dλ/dσ` of the frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationState {
    pub frame: Frame,
    pub time: f64,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub lambda: f64,
    pub lambda_dot: f64,
}

impl PerturbationState {
    pub fn is_finite(&self) -> bool {
        self.lambda.is_finite()
            && self.lambda_dot.is_finite()
            && self.phi.iter().chain(&self.phi_dot).all(|v| v.is_finite())
    }

    pub fn sup_phi(&self) -> f64 {
        self.phi.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A configured evolution problem: background, grid and frame.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub config: SimConfig,
    pub bg: Background,
    pub profile: EnthalpyProfile,
    /// `b = −√(2|δ|)` (zero outside the self-similar frame).
    pub b: f64,
}

impl Simulator {
    pub fn new(profile: &EnthalpyProfile, config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        if (profile.delta - config.delta).abs() > 1e-8 * config.delta.abs().max(1.0) {
            return Err(SimError::InvalidConfig(format!(
                "profile delta {} does not match configured {}",
                profile.delta, config.delta
            )));
        }
        let bg = Background::new(profile, config.n)?;
        let b = match config.frame {
            Frame::SelfSimilar => -(2.0 * profile.delta.abs()).sqrt(),
            Frame::LinearRate => 0.0,
        };
        Ok(Self { config, bg, profile: profile.clone(), b })
    }

    /// δ of the background profile (the configured value up to solver tolerance).
    pub fn delta(&self) -> f64 {
        self.bg.delta
    }

    /// State with the given fields at frame time zero on the unperturbed background.
    pub fn initial_state(&self, phi: Vec<f64>, phi_dot: Vec<f64>) -> Result<PerturbationState, SimError> {
        let n = self.bg.n;
        if phi.len() != n || phi_dot.len() != n {
            return Err(SimError::InvalidConfig(format!("fields must have {n} samples")));
        }
        let (lambda, lambda_dot) = match self.config.frame {
            Frame::SelfSimilar => (1.0, -self.b),
            Frame::LinearRate if self.config.freeze_background => (1.0, 0.0),
            Frame::LinearRate => {
                let h = self.config.homog.expect("validated");
                (h.lambda0, h.lambda0 * h.lambda1)
            }
        };
        let state = PerturbationState { frame: self.config.frame, time: 0.0, phi, phi_dot, lambda, lambda_dot };
        self.check_admissible(&state)?;
        Ok(state)
    }

    pub fn zero_state(&self) -> PerturbationState {
        let n = self.bg.n;
        self.initial_state(vec![0.0; n], vec![0.0; n]).expect("zero data is admissible")
    }

    /// `1 + φ > 0` and `1 + φ + zφ_z > 0` everywhere.
    pub fn check_admissible(&self, state: &PerturbationState) -> Result<(), SimError> {
        let d = crate::grid::dz(&state.phi, self.bg.h, crate::grid::Parity::Even);
        for i in 0..self.bg.n {
            let psi = 1.0 + state.phi[i];
            if !(psi > 0.0 && psi + self.bg.z[i] * d[i] > 0.0) {
                return Err(SimError::JacobianCollapse { z: self.bg.z[i] });
            }
        }
        Ok(())
    }
}
