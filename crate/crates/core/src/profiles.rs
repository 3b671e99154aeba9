//! Enthalpy profiles of the homogeneous stars.
//!
//! The generalized Lane-Emden problem `w'' + 2w'/z + πw³ = −3δ/4`,
//! `w'(0) = 0`, `w(1) = 0` is solved by shooting on the unnormalized problem
//! (`w(0) = 1`, source `δ̂`) up to its first zero `z̄`, then rescaling
//! `w_β(z) = β·w(βz)` with `β = z̄`, which maps the support to `[0, 1]` and the
//! source to `δ = δ̂·β³`.
//!
//! The map `δ̂ ↦ δ` is not monotone: it rises from the lower admissible edge
//! (where the first zero degenerates into a tangency) through `δ = 0` up to a
//! fold and then falls back along a second branch of compact, low-mass
//! profiles. Only the primary branch below the fold, on which the mass is a
//! decreasing function of `δ`, is used.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{csv_table, parse_csv_table};
use crate::numerics::ode::{integrate, Crossing, OdeError, OdeOptions, OdeSolution};
use crate::numerics::quad::GaussRule;
use crate::numerics::roots::brent;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("no zero of w found for delta_hat = {delta_hat} (searched to z = {z_reached})")]
    NoZeroFound { delta_hat: f64, z_reached: f64 },
    #[error("shooting integrator failed: {0}")]
    StepFailure(#[from] OdeError),
    #[error("delta = {target} lies below the admissible range ({})", edge_note(.delta_star_estimate))]
    BelowDeltaStar { target: f64, delta_star_estimate: Option<f64> },
    #[error("delta = {target} lies above the fold of the primary branch (delta_max = {delta_max})")]
    AboveFold { target: f64, delta_max: f64 },
    #[error("root finder did not converge for target {target}")]
    NonConvergence { target: f64 },
    #[error("mass {mass} outside the computable range [{min}, {max}]")]
    OutOfRange { mass: f64, min: f64, max: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed profile record: {0}")]
    Malformed(String),
}

impl ProfileError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NoZeroFound { .. } => "NoZeroFound",
            Self::StepFailure(_) => "StepFailure",
            Self::BelowDeltaStar { .. } => "BelowDeltaStar",
            Self::AboveFold { .. } => "AboveFold",
            Self::NonConvergence { .. } => "NonConvergence",
            Self::OutOfRange { .. } => "OutOfRange",
            Self::InvalidInput(_) => "InvalidInput",
            Self::Malformed(_) => "Malformed",
        }
    }
}

fn edge_note(estimate: &Option<f64>) -> String {
    match estimate {
        Some(d) => format!("lower edge observed near {d}"),
        None => "below the configured search floor".into(),
    }
}

/// Knobs of the shooting and root-finding machinery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileConfig {
    /// Give up on a zero beyond this radius of the unnormalized problem.
    pub z_max: f64,
    /// Number of uniform intervals of the rescaled profile grid.
    pub grid_intervals: usize,
    /// Most negative `δ̂` tried when searching the lower edge.
    pub delta_hat_min: f64,
    /// Largest `δ̂` tried when searching for the fold.
    pub delta_hat_max: f64,
    /// Targets below this are rejected without a search.
    pub delta_lower_bound: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { z_max: 200.0, grid_intervals: 4096, delta_hat_min: -1.0, delta_hat_max: 1.0e4, delta_lower_bound: -20.0 }
    }
}

/// Unnormalized shooting solution on `[0, z̄]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawProfile {
    pub delta_hat: f64,
    pub zbar: f64,
    pub nodes: Vec<f64>,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
    pub a2: f64,
}

/// Rescaled profile `w_δ` on `[0, 1]` sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnthalpyProfile {
    pub delta: f64,
    pub nodes: Vec<f64>,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
    pub wprime_at_1: f64,
    pub beta: f64,
    pub center_value: f64,
}

const STEP_OFF: f64 = 1e-6;
const ZBAR_GUESS: f64 = 3.9;

/// Series coefficients `w = 1 + a2 z² + a4 z⁴ + …` of the unnormalized problem.
fn center_series(delta_hat: f64) -> (f64, f64) {
    let a2 = -(0.75 * delta_hat + PI) / 6.0;
    let a4 = -3.0 * PI * a2 / 20.0;
    (a2, a4)
}

struct Shot {
    zbar: f64,
    wprime_zbar: f64,
    solution: OdeSolution<2>,
    z0: f64,
}

fn shoot(delta_hat: f64, tol: f64, cfg: &ProfileConfig) -> Result<Shot, ProfileError> {
    let (a2, a4) = center_series(delta_hat);
    let z0 = STEP_OFF * ZBAR_GUESS;
    let y0 = [1.0 + a2 * z0 * z0 + a4 * z0.powi(4), 2.0 * a2 * z0 + 4.0 * a4 * z0.powi(3)];
    let src = 0.75 * delta_hat;
    let rhs = move |z: f64, y: &[f64; 2]| [y[1], -2.0 * y[1] / z - PI * y[0].powi(3) - src];
    // Lyapunov function: nonincreasing in z, and nonnegative whenever w = 0.
    // Once w turns upward with H < 0 the profile can never reach zero.
    let lyapunov = move |y: &[f64; 2]| 0.5 * y[1] * y[1] + 0.25 * PI * y[0].powi(4) + src * y[0];
    let opts = OdeOptions { rtol: tol, atol: tol, h_init: Some(z0), max_steps: 2_000_000, ..OdeOptions::default() };
    let sol =
        integrate(rhs, z0, y0, cfg.z_max, &opts, Some((|_z: f64, y: &[f64; 2]| y[0], Crossing::Falling)), |_z, y| {
            y[1] > 0.0 && lyapunov(y) < 0.0
        })?;
    match sol.event {
        Some((zbar, y)) => Ok(Shot { zbar, wprime_zbar: y[1], solution: sol, z0 }),
        None => Err(ProfileError::NoZeroFound { delta_hat, z_reached: sol.t_final }),
    }
}

/// Evaluate the shot on `[0, z̄]`, using the center series below the step-off radius.
fn shot_eval(shot: &Shot, delta_hat: f64, z: f64) -> (f64, f64) {
    if z >= shot.zbar {
        return (0.0, shot.wprime_zbar);
    }
    if z <= shot.z0 {
        let (a2, a4) = center_series(delta_hat);
        return (1.0 + a2 * z * z + a4 * z.powi(4), 2.0 * a2 * z + 4.0 * a4 * z.powi(3));
    }
    let y = shot.solution.eval(z);
    (y[0], y[1])
}

/// `δ̂ ↦ (δ, M)` from a single shot, without sampling.
fn delta_and_mass(delta_hat: f64, tol: f64, cfg: &ProfileConfig) -> Result<(f64, f64), ProfileError> {
    let s = shoot(delta_hat, tol, cfg)?;
    let beta = s.zbar;
    let delta = delta_hat * beta.powi(3);
    Ok((delta, -4.0 * beta * beta * s.wprime_zbar - delta))
}

/// Integrate the unnormalized problem from the center to its first zero.
pub fn solve_raw(delta_hat: f64, tol: f64) -> Result<RawProfile, ProfileError> {
    solve_raw_with(delta_hat, tol, &ProfileConfig::default())
}

pub fn solve_raw_with(delta_hat: f64, tol: f64, cfg: &ProfileConfig) -> Result<RawProfile, ProfileError> {
    if !(tol > 0.0) || !delta_hat.is_finite() {
        return Err(ProfileError::InvalidInput(format!("delta_hat = {delta_hat}, tol = {tol}")));
    }
    let shot = shoot(delta_hat, tol, cfg)?;
    let n = cfg.grid_intervals.max(8);
    let nodes: Vec<f64> = (0..=n).map(|i| shot.zbar * i as f64 / n as f64).collect();
    let (mut w, mut wprime): (Vec<f64>, Vec<f64>) = nodes.iter().map(|&z| shot_eval(&shot, delta_hat, z)).unzip();
    w[0] = 1.0;
    wprime[0] = 0.0;
    w[n] = 0.0;
    wprime[n] = shot.wprime_zbar;
    Ok(RawProfile { delta_hat, zbar: shot.zbar, nodes, w, wprime, a2: center_series(delta_hat).0 })
}

/// Similarity rescaling onto the unit support.
pub fn rescale_to_unit(raw: &RawProfile) -> EnthalpyProfile {
    let beta = raw.zbar;
    let nodes: Vec<f64> = raw.nodes.iter().map(|z| z / beta).collect();
    let w: Vec<f64> = raw.w.iter().map(|v| beta * v).collect();
    let wprime: Vec<f64> = raw.wprime.iter().map(|v| beta * beta * v).collect();
    let mut nodes = nodes;
    *nodes.last_mut().expect("nonempty grid") = 1.0;
    EnthalpyProfile {
        delta: raw.delta_hat * beta.powi(3),
        wprime_at_1: *wprime.last().expect("nonempty grid"),
        center_value: w[0],
        nodes,
        w,
        wprime,
        beta,
    }
}

/// Edges of the primary branch in `δ̂`, and the corresponding `δ` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    /// Most negative `δ̂` at which a zero was still found.
    pub delta_hat_lower: f64,
    /// First `δ̂` at which no zero was found (upper end of the existence bracket).
    pub delta_hat_no_zero: f64,
    /// Empirical lower edge δ* (the δ reached at `delta_hat_lower`).
    pub delta_star_estimate: f64,
    /// Mass at the lower edge, the largest computable mass.
    pub mass_max: f64,
    /// `δ̂` at the fold of `δ̂ ↦ δ`.
    pub delta_hat_fold: f64,
    /// Largest attainable δ on the primary branch.
    pub delta_fold: f64,
    /// Mass at the fold, the smallest mass on the primary branch.
    pub mass_min: f64,
}

/// Bisect the existence boundary of the first zero on the negative side.
fn lower_edge(tol: f64, cfg: &ProfileConfig) -> Result<(f64, f64), ProfileError> {
    let mut ok = 0.0;
    let mut bad = None;
    let mut d = -1e-4;
    while d >= cfg.delta_hat_min {
        match shoot(d, tol, cfg) {
            Ok(_) => ok = d,
            Err(ProfileError::NoZeroFound { .. }) => {
                bad = Some(d);
                break;
            }
            Err(e) => return Err(e),
        }
        d *= 1.5;
    }
    let Some(mut bad) = bad else {
        return Ok((ok, cfg.delta_hat_min));
    };
    while (ok - bad).abs() > 1e-13 * ok.abs().max(1e-3) {
        let mid = 0.5 * (ok + bad);
        match shoot(mid, tol, cfg) {
            Ok(_) => ok = mid,
            Err(ProfileError::NoZeroFound { .. }) => bad = mid,
            Err(e) => return Err(e),
        }
    }
    Ok((ok, bad))
}

/// Locate the fold of `δ̂ ↦ δ` by a geometric scan followed by golden-section refinement.
fn fold(tol: f64, cfg: &ProfileConfig) -> Result<(f64, f64), ProfileError> {
    let g = |d: f64| delta_and_mass(d, tol, cfg).map(|(delta, _)| delta);
    let mut pts = vec![(0.0, 0.0)];
    let mut d = 0.05;
    loop {
        let v = g(d)?;
        pts.push((d, v));
        let n = pts.len();
        if n >= 3 && pts[n - 1].1 < pts[n - 2].1 {
            break;
        }
        d *= 1.5;
        if d > cfg.delta_hat_max {
            let (d, v) = *pts.last().expect("nonempty");
            return Ok((d, v));
        }
    }
    let n = pts.len();
    let (mut a, mut b) = (pts[n - 3].0, pts[n - 1].0);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    while (b - a) > 1e-9 * b {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Empirically determine the primary branch: the lower edge δ* and the fold.
pub fn primary_branch(tol: f64, cfg: &ProfileConfig) -> Result<BranchReport, ProfileError> {
    let (lo, no_zero) = lower_edge(tol, cfg)?;
    let (delta_star_estimate, mass_max) = delta_and_mass(lo, tol, cfg)?;
    let (hat_fold, delta_fold) = fold(tol, cfg)?;
    let (_, mass_min) = delta_and_mass(hat_fold, tol, cfg)?;
    Ok(BranchReport {
        delta_hat_lower: lo,
        delta_hat_no_zero: no_zero,
        delta_star_estimate,
        mass_max,
        delta_hat_fold: hat_fold,
        delta_fold,
        mass_min,
    })
}

/// Find `δ̂` on the primary branch with `δ̂·z̄(δ̂)³ = delta_target`.
pub fn delta_hat_for(delta_target: f64, tol: f64, cfg: &ProfileConfig) -> Result<f64, ProfileError> {
    if !delta_target.is_finite() || !(tol > 0.0) {
        return Err(ProfileError::InvalidInput(format!("delta = {delta_target}, tol = {tol}")));
    }
    if delta_target == 0.0 {
        return Ok(0.0);
    }
    let shoot_tol = tol.min(1e-10);
    let ftol = tol * delta_target.abs().max(1.0);
    let g = |d: f64| delta_and_mass(d, shoot_tol, cfg).map(|(delta, _)| delta - delta_target);
    let solve = |a: f64, fa: f64, b: f64, fb: f64| -> Result<f64, ProfileError> {
        brent(g, a, fa, b, fb, 1e-15, ftol, 200)?.ok_or(ProfileError::NonConvergence { target: delta_target })
    };
    if delta_target > 0.0 {
        let mut prev = (0.0, -delta_target);
        let mut history = vec![prev];
        let mut d = 0.05 * delta_target.min(1.0);
        while d <= cfg.delta_hat_max {
            let f = g(d)?;
            if f >= 0.0 {
                return solve(prev.0, prev.1, d, f);
            }
            if f < prev.1 && history.len() >= 2 {
                // Passed the fold without reaching the target: refine the maximum.
                let (hat_fold, delta_fold) = fold(shoot_tol, cfg)?;
                if delta_fold < delta_target {
                    return Err(ProfileError::AboveFold { target: delta_target, delta_max: delta_fold });
                }
                let (a, fa) = history[history.len() - 2];
                return solve(a, fa, hat_fold, delta_fold - delta_target);
            }
            prev = (d, f);
            history.push(prev);
            d *= 1.5;
        }
        Err(ProfileError::NonConvergence { target: delta_target })
    } else {
        if delta_target < cfg.delta_lower_bound {
            return Err(ProfileError::BelowDeltaStar { target: delta_target, delta_star_estimate: None });
        }
        let mut ok = (0.0, -delta_target);
        let mut d = -1e-4;
        let mut bad = None;
        while d >= cfg.delta_hat_min {
            match g(d) {
                Ok(f) if f <= 0.0 => return solve(ok.0, ok.1, d, f),
                Ok(f) => ok = (d, f),
                Err(ProfileError::NoZeroFound { .. }) => {
                    bad = Some(d);
                    break;
                }
                Err(e) => return Err(e),
            }
            d *= 1.5;
        }
        let Some(mut bad) = bad else {
            return Err(ProfileError::NonConvergence { target: delta_target });
        };
        // Shrink onto the existence edge, watching for the target on the way.
        while (ok.0 - bad).abs() > 1e-13 * ok.0.abs().max(1e-3) {
            let mid = 0.5 * (ok.0 + bad);
            match g(mid) {
                Ok(f) if f <= 0.0 => return solve(ok.0, ok.1, mid, f),
                Ok(f) => ok = (mid, f),
                Err(ProfileError::NoZeroFound { .. }) => bad = mid,
                Err(e) => return Err(e),
            }
        }
        Err(ProfileError::BelowDeltaStar { target: delta_target, delta_star_estimate: Some(ok.1 + delta_target) })
    }
}

/// The profile `w_δ` for a requested δ on the primary branch.
pub fn solve_profile(delta_target: f64, tol: f64) -> Result<EnthalpyProfile, ProfileError> {
    solve_profile_with(delta_target, tol, &ProfileConfig::default())
}

pub fn solve_profile_with(delta_target: f64, tol: f64, cfg: &ProfileConfig) -> Result<EnthalpyProfile, ProfileError> {
    let hat = delta_hat_for(delta_target, tol, cfg)?;
    let raw = solve_raw_with(hat, tol.min(1e-10), cfg)?;
    let mut p = rescale_to_unit(&raw);
    if delta_target == 0.0 {
        p.delta = 0.0;
    }
    Ok(p)
}

/// Total mass `M(δ) = −4 w'(1) − δ`.
pub fn mass_of(profile: &EnthalpyProfile) -> f64 {
    -4.0 * profile.wprime_at_1 - profile.delta
}

/// Invert the (decreasing) mass curve on the primary branch.
pub fn delta_for_mass(mass: f64, tol: f64) -> Result<f64, ProfileError> {
    delta_for_mass_with(mass, tol, &ProfileConfig::default())
}

pub fn delta_for_mass_with(mass: f64, tol: f64, cfg: &ProfileConfig) -> Result<f64, ProfileError> {
    let shoot_tol = 1e-12;
    let branch = primary_branch(shoot_tol, cfg)?;
    if !(mass >= branch.mass_min && mass <= branch.mass_max) {
        return Err(ProfileError::OutOfRange { mass, min: branch.mass_min, max: branch.mass_max });
    }
    let f = |d: f64| delta_and_mass(d, shoot_tol, cfg).map(|(_, m)| m - mass);
    let (a, b) = (branch.delta_hat_lower, branch.delta_hat_fold);
    let hat = brent(f, a, branch.mass_max - mass, b, branch.mass_min - mass, 1e-15, 0.25 * tol, 200)?
        .ok_or(ProfileError::NonConvergence { target: mass })?;
    if hat.abs() < 1e-300 {
        return Ok(0.0);
    }
    Ok(delta_and_mass(hat, shoot_tol, cfg)?.0)
}

/// Derivative data of a profile at an arbitrary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub w: f64,
    pub wp: f64,
    pub wpp: f64,
}

impl EnthalpyProfile {
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    fn spacing(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    /// `w''` from the differential equation, with the center limit `w''(0) = −(πw³ + 3δ/4)/3`.
    pub fn second_derivative(&self, z: f64, w: f64, wp: f64) -> f64 {
        if z == 0.0 {
            -(PI * w.powi(3) + 0.75 * self.delta) / 3.0
        } else {
            -2.0 * wp / z - PI * w.powi(3) - 0.75 * self.delta
        }
    }

    /// Cubic Hermite interpolation of `(w, w')` and `(w', w'')` between grid nodes.
    pub fn eval(&self, z: f64) -> ProfilePoint {
        let n = self.intervals();
        let h = self.spacing();
        let z = z.clamp(0.0, 1.0);
        let i = ((z / h) as usize).min(n - 1);
        let (z0, z1) = (self.nodes[i], self.nodes[i + 1]);
        let t = (z - z0) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        let (w0, w1, p0, p1) = (self.w[i], self.w[i + 1], self.wprime[i], self.wprime[i + 1]);
        let s0 = self.second_derivative(z0, w0, p0);
        let s1 = self.second_derivative(z1, w1, p1);
        let w = h00 * w0 + h * h10 * p0 + h01 * w1 + h * h11 * p1;
        let wp = h00 * p0 + h * h10 * s0 + h01 * p1 + h * h11 * s1;
        ProfilePoint { w, wp, wpp: self.second_derivative(z, w, wp) }
    }

    /// `w'''` from the differentiated equation; a series is used very close to the center.
    pub fn third_derivative(&self, z: f64) -> f64 {
        let p = self.eval(z);
        if z < 1e-3 {
            let a1 = self.center_value;
            let a2 = -(PI * a1.powi(3) + 0.75 * self.delta) / 6.0;
            let a4 = -3.0 * PI * a1 * a1 * a2 / 20.0;
            return 24.0 * a4 * z;
        }
        -2.0 * p.wpp / z + 2.0 * p.wp / (z * z) - 3.0 * PI * p.w * p.w * p.wp
    }

    /// `4π∫₀¹ w³ z² dz` by composite Gauss–Legendre quadrature on the Hermite interpolant.
    pub fn mass_quadrature(&self) -> f64 {
        let rule = GaussRule::new(4);
        let h = self.spacing();
        4.0 * PI
            * (0..self.intervals())
                .map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, |z| self.eval(z).w.powi(3) * z * z))
                .sum::<f64>()
    }

    /// Discrepancy between the boundary-slope mass and the quadrature mass.
    pub fn mass_identity_residual(&self) -> f64 {
        mass_of(self) - self.mass_quadrature()
    }

    /// One-sided fourth-order difference estimate of `w'(1)` from the samples.
    pub fn wprime_at_1_difference(&self) -> f64 {
        let n = self.intervals();
        let h = self.spacing();
        let w = &self.w;
        (25.0 * w[n] - 48.0 * w[n - 1] + 36.0 * w[n - 2] - 16.0 * w[n - 3] + 3.0 * w[n - 4]) / (12.0 * h)
    }

    /// Check the profile invariants; returns a description of the first violation.
    pub fn validate(&self, tol: f64) -> Result<(), String> {
        let n = self.nodes.len();
        if n < 5 || self.w.len() != n || self.wprime.len() != n {
            return Err("inconsistent sample lengths".into());
        }
        if self.nodes[0] != 0.0 || (self.nodes[n - 1] - 1.0).abs() > tol {
            return Err("grid must span [0, 1]".into());
        }
        if self.w[n - 1].abs() > tol {
            return Err(format!("w(1) = {}", self.w[n - 1]));
        }
        if let Some(i) = (0..n - 1).find(|&i| self.w[i] <= 0.0) {
            return Err(format!("w not positive at z = {}", self.nodes[i]));
        }
        if self.wprime[0].abs() > tol {
            return Err(format!("w'(0) = {}", self.wprime[0]));
        }
        if !(self.wprime_at_1 < 0.0 && self.wprime_at_1.is_finite()) {
            return Err(format!("physical vacuum violated: w'(1) = {}", self.wprime_at_1));
        }
        Ok(())
    }

    pub fn to_record(&self) -> ProfileRecord {
        ProfileRecord {
            format: RECORD_FORMAT.into(),
            version: RECORD_VERSION,
            delta: self.delta,
            beta: self.beta,
            wprime_at_1: self.wprime_at_1,
            center_value: self.center_value,
            nodes: self.nodes.clone(),
            w: self.w.clone(),
            wprime: self.wprime.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("profile record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let rec: ProfileRecord = serde_json::from_str(text).map_err(|e| ProfileError::Malformed(e.to_string()))?;
        Self::from_record(rec)
    }

    pub fn from_record(rec: ProfileRecord) -> Result<Self, ProfileError> {
        if rec.format != RECORD_FORMAT || rec.version != RECORD_VERSION {
            return Err(ProfileError::Malformed(format!("unsupported record {} v{}", rec.format, rec.version)));
        }
        let p = Self {
            delta: rec.delta,
            nodes: rec.nodes,
            w: rec.w,
            wprime: rec.wprime,
            wprime_at_1: rec.wprime_at_1,
            beta: rec.beta,
            center_value: rec.center_value,
        };
        p.validate(1e-9).map_err(ProfileError::Malformed)?;
        Ok(p)
    }

    /// CSV with columns `z,w,wprime`.
    pub fn to_csv(&self) -> String {
        csv_table(&["z", "w", "wprime"], &[&self.nodes, &self.w, &self.wprime])
    }

    /// Rebuild a profile from its CSV samples and the value of δ.
    pub fn from_csv(text: &str, delta: f64) -> Result<Self, ProfileError> {
        let (header, cols) = parse_csv_table(text).map_err(ProfileError::Malformed)?;
        if header != ["z", "w", "wprime"] {
            return Err(ProfileError::Malformed(format!("unexpected header {header:?}")));
        }
        let mut cols = cols.into_iter();
        let (nodes, w, wprime) = (cols.next().unwrap(), cols.next().unwrap(), cols.next().unwrap());
        let p = Self {
            delta,
            wprime_at_1: *wprime.last().ok_or_else(|| ProfileError::Malformed("empty".into()))?,
            beta: w[0],
            center_value: w[0],
            nodes,
            w,
            wprime,
        };
        p.validate(1e-9).map_err(ProfileError::Malformed)?;
        Ok(p)
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0, t3 - 2.0 * t2 + t, -2.0 * t3 + 3.0 * t2, t3 - t2)
}

pub const RECORD_FORMAT: &str = "homolog-enthalpy-profile";
pub const RECORD_VERSION: u32 = 1;

/// Versioned serialization record of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub format: String,
    pub version: u32,
    pub delta: f64,
    pub beta: f64,
    pub wprime_at_1: f64,
    pub center_value: f64,
    pub nodes: Vec<f64>,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
}
