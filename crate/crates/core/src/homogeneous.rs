//! Homogeneous (homologous) radius dynamics `λ²λ̈ = δ`.
//!
//! The first integral `e = λ̇² + 2δ/λ` (the effective energy) organizes the
//! dynamics: for `δ < 0` it is a radial Kepler problem with `GM = |δ|`, so
//! collapse times are available in closed form and serve as cross-checks for
//! the integrator. The module also builds the similarity time frames
//! `s = ∫λ^{-3/2}dt` and `τ = ∫λ^{-1}dt` used by the perturbation simulator.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::fit::fit_line;
use crate::numerics::ode::{integrate, Crossing, OdeError, OdeOptions};
use crate::numerics::quad::GaussRule;
use crate::profiles::EnthalpyProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomogeneousError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("integration failed: {0}")]
    StepFailure(#[from] OdeError),
    #[error("not enough samples in the fit window ({0})")]
    InsufficientData(usize),
    #[error("profile has delta = {profile} but parameters have delta = {params}")]
    DeltaMismatch { profile: f64, params: f64 },
    #[error("trajectory is not expanding")]
    NotExpanding,
}

impl HomogeneousError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::InvalidParams(_) => "InvalidParams",
            Self::StepFailure(_) => "StepFailure",
            Self::InsufficientData(_) => "InsufficientData",
            Self::DeltaMismatch { .. } => "DeltaMismatch",
            Self::NotExpanding => "NotExpanding",
        }
    }
}

/// Initial data `λ(0) = λ₀`, `λ̇(0) = λ₁` for a given `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogeneousParams {
    pub delta: f64,
    pub lambda0: f64,
    pub lambda1: f64,
}

impl HomogeneousParams {
    pub fn new(delta: f64, lambda0: f64, lambda1: f64) -> Result<Self, HomogeneousError> {
        let p = Self { delta, lambda0, lambda1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HomogeneousError> {
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(HomogeneousError::InvalidParams(format!("lambda0 = {} must be positive", self.lambda0)));
        }
        if !self.delta.is_finite() || !self.lambda1.is_finite() {
            return Err(HomogeneousError::InvalidParams("non-finite parameter".into()));
        }
        Ok(())
    }

    /// The self-similar (zero effective energy) expanding branch for `δ < 0`.
    pub fn self_similar(delta: f64, lambda0: f64) -> Self {
        Self { delta, lambda0, lambda1: (2.0 * delta.abs() / lambda0).sqrt() }
    }
}

/// `e = λ₁² + 2δ/λ₀`.
pub fn effective_energy(p: &HomogeneousParams) -> f64 {
    p.lambda1 * p.lambda1 + 2.0 * p.delta / p.lambda0
}

/// Threshold velocity `λ₁* = √(2|δ|/λ₀)` separating expansion from collapse when `δ < 0`.
pub fn critical_velocity(p: &HomogeneousParams) -> f64 {
    (2.0 * p.delta.abs() / p.lambda0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassKind {
    SelfSimilarExpansion,
    SelfSimilarCollapse,
    LinearExpansion,
    LinearCollapse,
    AffineExpansion,
    LaneEmdenSteady,
}

impl ClassKind {
    pub fn is_expanding(self) -> bool {
        matches!(self, Self::SelfSimilarExpansion | Self::LinearExpansion | Self::AffineExpansion)
    }

    pub fn is_collapsing(self) -> bool {
        matches!(self, Self::SelfSimilarCollapse | Self::LinearCollapse)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::SelfSimilarExpansion => "self-similar expansion",
            Self::SelfSimilarCollapse => "self-similar collapse",
            Self::LinearExpansion => "linear expansion",
            Self::LinearCollapse => "linear collapse",
            Self::AffineExpansion => "affine expansion",
            Self::LaneEmdenSteady => "Lane-Emden steady state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: ClassKind,
    /// `λ₁*`, present only when `δ < 0`.
    pub lambda1_star: Option<f64>,
    /// Closed-form collapse time for collapsing data.
    pub collapse_time: Option<f64>,
    pub effective_energy: f64,
}

/// Relative tolerance used to decide `λ₁ = ±λ₁*`.
const BRANCH_TOL: f64 = 1e-12;

pub fn classify(p: &HomogeneousParams) -> Classification {
    let e = effective_energy(p);
    let (d, l1) = (p.delta, p.lambda1);
    let star = (d < 0.0).then(|| critical_velocity(p));
    let kind = if d > 0.0 {
        ClassKind::LinearExpansion
    } else if d == 0.0 {
        match l1.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => ClassKind::AffineExpansion,
            Some(std::cmp::Ordering::Less) => ClassKind::LinearCollapse,
            _ => ClassKind::LaneEmdenSteady,
        }
    } else {
        let s = star.expect("set for negative delta");
        if (l1 - s).abs() <= BRANCH_TOL * s {
            ClassKind::SelfSimilarExpansion
        } else if l1 > s {
            ClassKind::LinearExpansion
        } else if (l1 + s).abs() <= BRANCH_TOL * s || l1 > -s {
            // Non-positive effective energy: bound orbit or the parabolic infall branch.
            ClassKind::SelfSimilarCollapse
        } else {
            ClassKind::LinearCollapse
        }
    };
    Classification { kind, lambda1_star: star, collapse_time: collapse_time_closed_form(p, kind), effective_energy: e }
}

/// Exact time to reach `λ = 0` for collapsing data (radial Kepler orbits for `δ < 0`).
pub fn collapse_time_closed_form(p: &HomogeneousParams, kind: ClassKind) -> Option<f64> {
    if !kind.is_collapsing() {
        return None;
    }
    let (l0, l1) = (p.lambda0, p.lambda1);
    if p.delta == 0.0 {
        return Some(l0 / -l1);
    }
    let gm = p.delta.abs();
    let e = effective_energy(p);
    let scale = BRANCH_TOL * (2.0 * gm / l0);
    if e.abs() <= scale && l1 < 0.0 {
        return Some(2.0 * l0 / (3.0 * -l1));
    }
    if e < 0.0 {
        // λ = a(1 − cos η), t = √(a³/GM)(η − sin η); collapse at η = 2π.
        let a = gm / -e;
        let c = (1.0 - l0 / a).clamp(-1.0, 1.0);
        let mut eta0 = c.acos();
        if l1 < 0.0 {
            eta0 = 2.0 * PI - eta0;
        }
        Some((a.powi(3) / gm).sqrt() * (2.0 * PI - eta0 + eta0.sin()))
    } else {
        // λ = a(cosh η − 1), t = √(a³/GM)(sinh η − η); infall reaches η = 0.
        let a = gm / e;
        let eta0 = (1.0 + l0 / a).acosh();
        Some((a.powi(3) / gm).sqrt() * (eta0.sinh() - eta0))
    }
}

/// Integration settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LambdaConfig {
    /// Collapse floor as a fraction of `λ₀`.
    pub floor_ratio: f64,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        Self { floor_ratio: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTrajectory {
    pub params: HomogeneousParams,
    pub times: Vec<f64>,
    pub lambda: Vec<f64>,
    pub lambdadot: Vec<f64>,
    /// Cumulative `∫λ^{-3/2}dt`.
    pub s: Vec<f64>,
    /// Cumulative `∫λ^{-1}dt`.
    pub tau: Vec<f64>,
    pub effective_energy: f64,
    pub collapse_time: Option<f64>,
}

impl LambdaTrajectory {
    /// Largest relative violation of `λ̇² + 2δ/λ = e` over the samples.
    pub fn energy_drift(&self) -> f64 {
        let d = self.params.delta;
        self.lambda
            .iter()
            .zip(&self.lambdadot)
            .map(|(&l, &ld)| {
                let kin = ld * ld;
                let pot = 2.0 * d / l;
                let scale = kin.max(pot.abs()).max(self.effective_energy.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (kin + pot - self.effective_energy).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

pub fn integrate_lambda(p: &HomogeneousParams, t_end: f64, tol: f64) -> Result<LambdaTrajectory, HomogeneousError> {
    integrate_lambda_with(p, t_end, tol, &LambdaConfig::default())
}

pub fn integrate_lambda_with(
    p: &HomogeneousParams,
    t_end: f64,
    tol: f64,
    cfg: &LambdaConfig,
) -> Result<LambdaTrajectory, HomogeneousError> {
    p.validate()?;
    if !(t_end > 0.0) || !(tol > 0.0) {
        return Err(HomogeneousError::InvalidParams(format!("t_end = {t_end}, tol = {tol}")));
    }
    let d = p.delta;
    let floor = cfg.floor_ratio * p.lambda0;
    let rhs = move |_t: f64, y: &[f64; 4]| [y[1], d / (y[0] * y[0]), y[0].powf(-1.5), 1.0 / y[0]];
    let opts = OdeOptions { rtol: tol, atol: tol * 1e-3, max_steps: 5_000_000, ..OdeOptions::default() };
    let sol = integrate(
        rhs,
        0.0,
        [p.lambda0, p.lambda1, 0.0, 0.0],
        t_end,
        &opts,
        Some((move |_t: f64, y: &[f64; 4]| y[0] - floor, Crossing::Falling)),
        |_, _| false,
    )?;
    let mut times = vec![0.0];
    let mut ys = vec![[p.lambda0, p.lambda1, 0.0, 0.0]];
    for st in &sol.steps {
        if st.t1() <= sol.t_final {
            times.push(st.t1());
            ys.push(st.y1);
        }
    }
    if *times.last().unwrap() < sol.t_final {
        times.push(sol.t_final);
        ys.push(sol.y_final);
    }
    let collapse_time = sol.event.map(|(te, y)| {
        let (l, ld) = (y[0], y[1].abs());
        if d < 0.0 {
            te + 2.0 * l / (3.0 * ld)
        } else {
            te + l / ld
        }
    });
    Ok(LambdaTrajectory {
        params: *p,
        times,
        lambda: ys.iter().map(|y| y[0]).collect(),
        lambdadot: ys.iter().map(|y| y[1]).collect(),
        s: ys.iter().map(|y| y[2]).collect(),
        tau: ys.iter().map(|y| y[3]).collect(),
        effective_energy: effective_energy(p),
        collapse_time,
    })
}

/// Closed-form self-similar expansion `(λ₀^{3/2} + (3/2)λ₀^{1/2}λ₁t)^{2/3}`.
pub fn self_similar_lambda(p: &HomogeneousParams, t: f64) -> f64 {
    (p.lambda0.powf(1.5) + 1.5 * p.lambda0.sqrt() * p.lambda1 * t).powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub kind: ClassKind,
    /// Log-log slope of λ against t (expansion) or against T − t (collapse).
    pub exponent: f64,
    pub exponent_stderr: f64,
    /// Final velocity (the expansion-rate limit estimate).
    pub limit_velocity: f64,
    /// Linear fit `λ ≈ c₁(1 + c₂t)` over the window (expansion only).
    pub c1: f64,
    pub c2: f64,
}

/// Fraction of samples, from the end, used by asymptotic fits.
pub const FIT_WINDOW: f64 = 0.25;

pub fn fit_asymptotics(traj: &LambdaTrajectory, kind: ClassKind) -> Result<RateReport, HomogeneousError> {
    let n = traj.times.len();
    let start = ((1.0 - FIT_WINDOW) * n as f64).floor() as usize;
    let idx: Vec<usize> = (start..n).collect();
    let mut report = RateReport {
        kind,
        exponent: 0.0,
        exponent_stderr: 0.0,
        limit_velocity: *traj.lambdadot.last().unwrap_or(&0.0),
        c1: f64::NAN,
        c2: f64::NAN,
    };
    if kind.is_collapsing() {
        let t_c = traj.collapse_time.ok_or(HomogeneousError::InsufficientData(0))?;
        let (x, y): (Vec<f64>, Vec<f64>) = idx
            .iter()
            .filter(|&&i| t_c - traj.times[i] > 0.0)
            .map(|&i| ((t_c - traj.times[i]).ln(), traj.lambda[i].ln()))
            .unzip();
        if x.len() < 8 {
            return Err(HomogeneousError::InsufficientData(x.len()));
        }
        let f = fit_line(&x, &y).ok_or(HomogeneousError::InsufficientData(x.len()))?;
        report.exponent = f.slope;
        report.exponent_stderr = f.slope_stderr;
    } else {
        let sel: Vec<usize> = idx.into_iter().filter(|&i| traj.times[i] > 0.0).collect();
        if sel.len() < 8 {
            return Err(HomogeneousError::InsufficientData(sel.len()));
        }
        let lx: Vec<f64> = sel.iter().map(|&i| traj.times[i].ln()).collect();
        let ly: Vec<f64> = sel.iter().map(|&i| traj.lambda[i].ln()).collect();
        let f = fit_line(&lx, &ly).ok_or(HomogeneousError::InsufficientData(sel.len()))?;
        report.exponent = f.slope;
        report.exponent_stderr = f.slope_stderr;
        let t: Vec<f64> = sel.iter().map(|&i| traj.times[i]).collect();
        let l: Vec<f64> = sel.iter().map(|&i| traj.lambda[i]).collect();
        let lin = fit_line(&t, &l).ok_or(HomogeneousError::InsufficientData(sel.len()))?;
        report.c1 = lin.intercept;
        report.c2 = lin.slope / lin.intercept;
    }
    Ok(report)
}

/// Energy of the homogeneous star, `e·∫₀¹2πw³z⁴dz`.
pub fn physical_energy(p: &HomogeneousParams, profile: &EnthalpyProfile) -> Result<f64, HomogeneousError> {
    if (profile.delta - p.delta).abs() > 1e-8 * p.delta.abs().max(1.0) {
        return Err(HomogeneousError::DeltaMismatch { profile: profile.delta, params: p.delta });
    }
    Ok(effective_energy(p) * 2.0 * PI * moment_w3_z4(profile))
}

/// `∫₀¹ w³z⁴ dz`.
pub fn moment_w3_z4(profile: &EnthalpyProfile) -> f64 {
    let rule = GaussRule::new(4);
    let n = profile.intervals();
    let h = 1.0 / n as f64;
    (0..n).map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, |z| profile.eval(z).w.powi(3) * z.powi(4))).sum()
}

/// Grid of classifications over `(δ, λ₁)` plus the analytic E = 0 parabola.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMap {
    pub lambda0: f64,
    pub deltas: Vec<f64>,
    pub lambda1s: Vec<f64>,
    /// `kinds[j][i]` classifies `(deltas[i], lambda1s[j])`.
    pub kinds: Vec<Vec<ClassKind>>,
    /// Samples `(δ, λ₁*)` of the upper branch `λ₁ = √(2|δ|/λ₀)`, `δ ≤ 0`.
    pub parabola: Vec<(f64, f64)>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn bifurcation_scan(
    delta_range: (f64, f64),
    lambda1_range: (f64, f64),
    lambda0: f64,
    resolution: (usize, usize),
) -> Result<ClassificationMap, HomogeneousError> {
    if !(lambda0 > 0.0) || resolution.0 == 0 || resolution.1 == 0 {
        return Err(HomogeneousError::InvalidParams("scan needs lambda0 > 0 and a nonempty grid".into()));
    }
    let deltas = linspace(delta_range.0, delta_range.1, resolution.0);
    let lambda1s = linspace(lambda1_range.0, lambda1_range.1, resolution.1);
    let kinds: Vec<Vec<ClassKind>> = lambda1s
        .par_iter()
        .map(|&l1| {
            deltas.iter().map(|&d| classify(&HomogeneousParams { delta: d, lambda0, lambda1: l1 }).kind).collect()
        })
        .collect();
    let d_lo = delta_range.0.min(0.0);
    let parabola = linspace(d_lo, 0.0, 4 * resolution.0.max(32))
        .into_iter()
        .map(|d| (d, (2.0 * d.abs() / lambda0).sqrt()))
        .collect();
    Ok(ClassificationMap { lambda0, deltas, lambda1s, kinds, parabola })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    SelfSimilar,
    LinearRate,
}

/// A trajectory re-expressed in a similarity time `σ` (`s` or `τ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMap {
    pub frame: Frame,
    pub t: Vec<f64>,
    pub sigma: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `dλ/dσ`.
    pub lambda_sigma: Vec<f64>,
}

pub fn reparam_time(traj: &LambdaTrajectory, frame: Frame) -> Result<FrameMap, HomogeneousError> {
    let last = traj.lambdadot.last().copied().unwrap_or(0.0);
    if traj.collapse_time.is_some() || last <= 0.0 || traj.times.len() < 2 {
        return Err(HomogeneousError::NotExpanding);
    }
    let (sigma, power) = match frame {
        Frame::SelfSimilar => (traj.s.clone(), 1.5),
        Frame::LinearRate => (traj.tau.clone(), 1.0),
    };
    let lambda_sigma = traj.lambda.iter().zip(&traj.lambdadot).map(|(l, ld)| ld * l.powf(power)).collect();
    Ok(FrameMap { frame, t: traj.times.clone(), sigma, lambda: traj.lambda.clone(), lambda_sigma })
}

impl FrameMap {
    fn power(&self) -> f64 {
        match self.frame {
            Frame::SelfSimilar => 1.5,
            Frame::LinearRate => 1.0,
        }
    }

    fn locate(&self, sigma: f64) -> (usize, f64, f64) {
        let n = self.sigma.len();
        let i = self.sigma.partition_point(|&v| v < sigma).clamp(1, n - 1) - 1;
        let h = self.sigma[i + 1] - self.sigma[i];
        (i, h, (sigma - self.sigma[i]) / h)
    }

    /// `λ` at frame time `σ` by Hermite interpolation.
    pub fn lambda_at(&self, sigma: f64) -> f64 {
        let (i, h, t) = self.locate(sigma);
        hermite(t, h, self.lambda[i], self.lambda[i + 1], self.lambda_sigma[i], self.lambda_sigma[i + 1])
    }

    /// Physical time `t(σ)` (inverse lookup), using `dt/dσ = λ^{p}`.
    pub fn t_at(&self, sigma: f64) -> f64 {
        let (i, h, t) = self.locate(sigma);
        let p = self.power();
        hermite(t, h, self.t[i], self.t[i + 1], self.lambda[i].powf(p), self.lambda[i + 1].powf(p))
    }

    /// Frame time `σ(t)`, using `dσ/dt = λ^{-p}`.
    pub fn sigma_at(&self, time: f64) -> f64 {
        let n = self.t.len();
        let i = self.t.partition_point(|&v| v < time).clamp(1, n - 1) - 1;
        let h = self.t[i + 1] - self.t[i];
        let p = self.power();
        hermite(
            (time - self.t[i]) / h,
            h,
            self.sigma[i],
            self.sigma[i + 1],
            self.lambda[i].powf(-p),
            self.lambda[i + 1].powf(-p),
        )
    }
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + h * (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + h * (t3 - t2) * d1
}

/// Growth-rate envelope of the linear-rate frame: `β₁ = max(√ẽ, |λ₁|)`, `β₂ = min(…)`.
pub fn linear_rate_exponents(p: &HomogeneousParams) -> (f64, f64) {
    let e = effective_energy(p).max(0.0);
    let b_tilde = e.sqrt();
    let b_prime = (e - 2.0 * p.delta / p.lambda0).max(0.0).sqrt();
    (b_tilde.max(b_prime), b_tilde.min(b_prime))
}

/// Extremes of `(λ̃ + λ̃_τ)e^{−β₂τ}` (should stay bounded below) and
/// `(λ̃ + λ̃_τ)e^{−β₁τ}` (should stay bounded above) over the samples.
pub fn exponential_envelope(p: &HomogeneousParams, map: &FrameMap) -> (f64, f64) {
    let (b1, b2) = linear_rate_exponents(p);
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for i in 0..map.sigma.len() {
        let v = map.lambda[i] + map.lambda_sigma[i];
        lower = lower.min(v * (-b2 * map.sigma[i]).exp());
        upper = upper.max(v * (-b1 * map.sigma[i]).exp());
    }
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(d: f64, l0: f64, l1: f64) -> HomogeneousParams {
        HomogeneousParams::new(d, l0, l1).unwrap()
    }

    #[test]
    fn effective_energy_examples() {
        assert_eq!(effective_energy(&hp(-0.5, 1.0, 1.0)), 0.0);
        assert_eq!(effective_energy(&hp(0.0, 1.0, 2.0)), 4.0);
        assert_eq!(effective_energy(&hp(1.0, 2.0, 0.0)), 1.0);
    }

    #[test]
    fn case_split() {
        assert_eq!(classify(&hp(0.5, 1.0, 0.0)).kind, ClassKind::LinearExpansion);
        assert_eq!(classify(&hp(-0.5, 1.0, 1.0)).kind, ClassKind::SelfSimilarExpansion);
        assert_eq!(classify(&hp(-0.5, 1.0, -1.0)).kind, ClassKind::SelfSimilarCollapse);
        assert_eq!(classify(&hp(-0.5, 1.0, 2.0)).kind, ClassKind::LinearExpansion);
        assert_eq!(classify(&hp(-0.5, 1.0, -2.0)).kind, ClassKind::LinearCollapse);
        assert_eq!(classify(&hp(0.0, 1.0, 1.0)).kind, ClassKind::AffineExpansion);
        assert_eq!(classify(&hp(0.0, 1.0, 0.0)).kind, ClassKind::LaneEmdenSteady);
        assert_eq!(classify(&hp(0.0, 1.0, -1.0)).kind, ClassKind::LinearCollapse);
        let c = classify(&hp(-0.5, 1.0, 0.0));
        assert_eq!(c.kind, ClassKind::SelfSimilarCollapse);
        assert!(c.collapse_time.unwrap() > 0.0);
        assert_eq!(c.lambda1_star, Some(1.0));
        assert_eq!(classify(&hp(0.5, 1.0, 0.0)).lambda1_star, None);
    }

    #[test]
    fn parabolic_infall_time_is_exact() {
        // λ = (1 − 1.5t)^{2/3} reaches zero at t = 2/3.
        let t = classify(&hp(-0.5, 1.0, -1.0)).collapse_time.unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bound_orbit_from_rest_has_kepler_time() {
        // Radial free fall from rest: T = (π/2)√(λ₀³/(2GM)).
        let t = classify(&hp(-0.5, 1.0, 0.0)).collapse_time.unwrap();
        assert!((t - PI / 2.0).abs() < 1e-13, "{t}");
    }

    #[test]
    fn frame_interpolation_is_consistent() {
        let p = HomogeneousParams::self_similar(-0.5, 1.0);
        let tr = integrate_lambda(&p, 10.0, 1e-12).unwrap();
        let m = reparam_time(&tr, Frame::SelfSimilar).unwrap();
        let s = 0.5 * m.sigma.last().unwrap();
        let t = m.t_at(s);
        assert!((m.sigma_at(t) - s).abs() < 1e-9);
    }
}
