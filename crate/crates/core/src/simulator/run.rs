//! Time stepping, diagnostics and post-processing of runs.

use serde::{Deserialize, Serialize};

use super::{PerturbationState, SimError, Simulator};
use crate::homogeneous::{Frame, HomogeneousParams};
use crate::io::csv_table;
use crate::numerics::fit::fit_line;

/// Time derivative of the full first-order system.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub lambda: f64,
    pub lambda_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub time: f64,
    pub energy: f64,
    pub high_order: f64,
    pub auxiliary: Option<f64>,
    pub dissipation: Option<f64>,
    pub mean_phi: f64,
    pub mean_phi_dot: f64,
    pub constraint: f64,
    pub kappa: Option<f64>,
    pub lambda: f64,
    pub weighted_velocity: f64,
    pub sup_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub lambda: f64,
    pub lambda_dot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub frame: Frame,
    pub records: Vec<DiagnosticRecord>,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub retries: usize,
    /// Energy scale `Σ|E-terms|` of the initial state, for relative drift.
    pub energy_scale: f64,
}

impl DiagnosticsSeries {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }

    pub fn high_order(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.high_order).collect()
    }

    /// `max_t |E(t) − E(0)| / (scale · max(t_end, 1))`.
    pub fn energy_drift_rate(&self) -> f64 {
        let Some(first) = self.records.first() else { return 0.0 };
        let span = self.records.last().map_or(0.0, |r| r.time).max(1.0);
        let dev = self.records.iter().map(|r| (r.energy - first.energy).abs()).fold(0.0, f64::max);
        dev / (self.energy_scale.max(f64::MIN_POSITIVE) * span)
    }

    pub fn to_csv(&self) -> String {
        let opt = |f: fn(&DiagnosticRecord) -> Option<f64>| -> Vec<f64> {
            self.records.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect()
        };
        let col = |f: fn(&DiagnosticRecord) -> f64| -> Vec<f64> { self.records.iter().map(f).collect() };
        let columns = vec![
            col(|r| r.time),
            col(|r| r.energy),
            col(|r| r.high_order),
            opt(|r| r.auxiliary),
            opt(|r| r.dissipation),
            col(|r| r.mean_phi),
            col(|r| r.mean_phi_dot),
            col(|r| r.constraint),
            opt(|r| r.kappa),
            col(|r| r.lambda),
            col(|r| r.weighted_velocity),
            col(|r| r.sup_phi),
        ];
        let refs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
        csv_table(
            &[
                "time",
                "energy",
                "high_order",
                "auxiliary",
                "dissipation",
                "mean_phi",
                "mean_phi_dot",
                "constraint",
                "kappa",
                "lambda",
                "weighted_velocity",
                "sup_phi",
            ],
            &refs,
        )
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

impl Simulator {
    pub fn rhs(&self, state: &PerturbationState) -> Result<Derivative, SimError> {
        let d = self.bg.delta;
        let lphi = self.bg.op.apply(&state.phi);
        let nl = self.evaluate_n(&state.phi)?;
        let accel_num = |i: usize| -3.0 * d * state.phi[i] - lphi[i] + nl[i];
        let n = self.bg.n;
        Ok(match state.frame {
            Frame::SelfSimilar => Derivative {
                phi: state.phi_dot.clone(),
                phi_dot: (0..n).map(|i| 0.5 * self.b * state.phi_dot[i] + accel_num(i)).collect(),
                lambda: -self.b * state.lambda,
                lambda_dot: -self.b * state.lambda_dot,
            },
            Frame::LinearRate => {
                let (lam, lam_t) = (state.lambda, state.lambda_dot);
                let (dl, ddl) =
                    if self.config.freeze_background { (0.0, 0.0) } else { (lam_t, lam_t * lam_t / lam + d) };
                Derivative {
                    phi: state.phi_dot.clone(),
                    phi_dot: (0..n).map(|i| (-lam_t * state.phi_dot[i] + accel_num(i)) / lam).collect(),
                    lambda: dl,
                    lambda_dot: ddl,
                }
            }
        })
    }

    /// Courant bound `h√λ/c_max` (with `λ = 1` in the self-similar frame).
    pub fn stability_limit(&self, state: &PerturbationState) -> f64 {
        let factor = match state.frame {
            Frame::SelfSimilar => 1.0,
            Frame::LinearRate => state.lambda,
        };
        self.bg.h * factor.sqrt() / self.bg.max_speed
    }

    /// Step size the driver uses for the given state.
    pub fn time_step(&self, state: &PerturbationState) -> f64 {
        (self.config.cfl * self.stability_limit(state)).min(self.config.dt_max)
    }

    fn advance(&self, s: &PerturbationState, k: &Derivative, a: f64) -> PerturbationState {
        PerturbationState {
            frame: s.frame,
            time: s.time + a,
            phi: axpy(&s.phi, a, &k.phi),
            phi_dot: axpy(&s.phi_dot, a, &k.phi_dot),
            lambda: s.lambda + a * k.lambda,
            lambda_dot: s.lambda_dot + a * k.lambda_dot,
        }
    }

    /// One classical fourth-order Runge–Kutta step.
    pub fn step(&self, state: &PerturbationState, dt: f64) -> Result<PerturbationState, SimError> {
        let limit = self.stability_limit(state);
        if dt > limit * (1.0 + 1e-12) {
            return Err(SimError::CflViolation { dt, limit });
        }
        let k1 = self.rhs(state)?;
        let k2 = self.rhs(&self.advance(state, &k1, 0.5 * dt))?;
        let k3 = self.rhs(&self.advance(state, &k2, 0.5 * dt))?;
        let k4 = self.rhs(&self.advance(state, &k3, dt))?;
        let n = self.bg.n;
        let comb = |a: &[f64], b: &[f64], c: &[f64], d: &[f64], y: &[f64]| -> Vec<f64> {
            (0..n).map(|i| y[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
        };
        let next = PerturbationState {
            frame: state.frame,
            time: state.time + dt,
            phi: comb(&k1.phi, &k2.phi, &k3.phi, &k4.phi, &state.phi),
            phi_dot: comb(&k1.phi_dot, &k2.phi_dot, &k3.phi_dot, &k4.phi_dot, &state.phi_dot),
            lambda: state.lambda + dt / 6.0 * (k1.lambda + 2.0 * k2.lambda + 2.0 * k3.lambda + k4.lambda),
            lambda_dot: state.lambda_dot
                + dt / 6.0 * (k1.lambda_dot + 2.0 * k2.lambda_dot + 2.0 * k3.lambda_dot + k4.lambda_dot),
        };
        if !next.is_finite() {
            return Err(SimError::NanDetected { time: state.time });
        }
        Ok(next)
    }

    fn record(&self, state: &PerturbationState, kappa: Option<f64>) -> Result<DiagnosticRecord, SimError> {
        let e = self.physical_energy(state)?;
        let norms = self.norm_energy(state, self.config.norm_order)?;
        let constraint = self.constraint_residual(state, kappa.unwrap_or(0.0))?;
        Ok(DiagnosticRecord {
            time: state.time,
            energy: e.total(),
            high_order: norms.high_order,
            auxiliary: norms.auxiliary,
            dissipation: norms.dissipation,
            mean_phi: self.bg.mean(&state.phi),
            mean_phi_dot: self.bg.mean(&state.phi_dot),
            constraint,
            kappa,
            lambda: state.lambda,
            weighted_velocity: norms.weighted_velocity,
            sup_phi: state.sup_phi(),
        })
    }

    fn snapshot(state: &PerturbationState) -> Snapshot {
        Snapshot {
            time: state.time,
            phi: state.phi.clone(),
            phi_dot: state.phi_dot.clone(),
            lambda: state.lambda,
            lambda_dot: state.lambda_dot,
        }
    }

    /// Advance `initial` to `config.t_end` (measured from the initial frame time).
    pub fn run(&self, initial: &PerturbationState) -> Result<(DiagnosticsSeries, PerturbationState), SimError> {
        self.check_admissible(initial)?;
        let kappa = match initial.frame {
            Frame::LinearRate => Some(self.kappa(initial)?),
            Frame::SelfSimilar => None,
        };
        let mut series = DiagnosticsSeries {
            frame: initial.frame,
            records: vec![self.record(initial, kappa)?],
            snapshots: Vec::new(),
            steps: 0,
            retries: 0,
            energy_scale: self.physical_energy(initial)?.scale(),
        };
        let snap_every = self.config.snapshot_interval;
        let mut next_snap = snap_every.map(|dt| initial.time + dt);
        if snap_every.is_some() {
            series.snapshots.push(Self::snapshot(initial));
        }
        let t_stop = initial.time + self.config.t_end;
        let tol = 1e-12 * t_stop.abs().max(1.0);
        let mut state = initial.clone();
        while state.time < t_stop - tol {
            // land exactly on snapshot times so the Cauchy sequence is uniformly spaced
            let horizon = next_snap.map_or(t_stop, |t| t.min(t_stop));
            let mut dt = self.time_step(&state).min(horizon - state.time);
            let mut attempt = 0;
            state = loop {
                match self.step(&state, dt) {
                    Ok(s) => break s,
                    Err(SimError::NanDetected { .. }) if attempt < self.config.max_retries => {
                        attempt += 1;
                        series.retries += 1;
                        dt *= 0.5;
                    }
                    Err(e) => return Err(e),
                }
            };
            series.steps += 1;
            let last = state.time >= t_stop - tol;
            if series.steps.is_multiple_of(self.config.stride) || last {
                let rec = self.record(&state, kappa)?;
                if !(rec.high_order <= self.config.blowup_ceiling) {
                    return Err(SimError::BlowUpDetected { time: state.time, norm: rec.high_order });
                }
                series.records.push(rec);
            }
            if let (Some(interval), Some(t)) = (snap_every, next_snap) {
                if state.time >= t - tol {
                    series.snapshots.push(Self::snapshot(&state));
                    next_snap = Some(t + interval);
                }
            }
        }
        Ok((series, state))
    }

    /// Restart from `θ_∞` at rest on the homogeneous background reached by
    /// `at` (same `λ̃`, `λ̃_τ`) and evolve for `t_end`. A genuine limit is
    /// nearly stationary there, so the velocity it generates stays small.
    pub fn restart_from_limit(
        &self,
        limit: &ThetaLimitReport,
        at: &PerturbationState,
        t_end: f64,
    ) -> Result<(DiagnosticsSeries, PerturbationState), SimError> {
        if at.frame != Frame::LinearRate {
            return Err(SimError::InvalidConfig("the theta limit lives in the linear-rate frame".into()));
        }
        let mut config = self.config.clone();
        config.t_end = t_end;
        config.snapshot_interval = None;
        if !config.freeze_background {
            config.homog = Some(HomogeneousParams::new(self.delta(), at.lambda, at.lambda_dot / at.lambda)?);
        }
        let sim = Simulator::new(&self.profile, config)?;
        let phi = limit.theta_inf.iter().map(|t| t - 1.0).collect();
        let mut start = sim.initial_state(phi, vec![0.0; self.bg.n])?;
        start.time = at.time;
        sim.run(&start)
    }

    /// Cauchy analysis of stored snapshots for the `θ_∞` limit.
    pub fn theta_limit(&self, snapshots: &[Snapshot]) -> Result<ThetaLimitReport, SimError> {
        if snapshots.len() < 3 {
            return Err(SimError::InsufficientData(format!("{} snapshots, need at least 3", snapshots.len())));
        }
        let order = self.config.norm_order;
        let differences: Vec<f64> = snapshots
            .windows(2)
            .map(|w| {
                let d: Vec<f64> = w[1].phi.iter().zip(&w[0].phi).map(|(a, b)| a - b).collect();
                self.s_norm2(&d, order).sqrt()
            })
            .collect();
        let ratios = differences.windows(2).map(|w| w[1] / w[0]).collect();
        let last = snapshots.last().expect("non-empty");
        Ok(ThetaLimitReport {
            theta_inf: last.phi.iter().map(|p| 1.0 + p).collect(),
            times: snapshots.iter().map(|s| s.time).collect(),
            differences,
            ratios,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaLimitReport {
    /// Final snapshot `θ = 1 + φ` as the estimate of the limit.
    pub theta_inf: Vec<f64>,
    pub times: Vec<f64>,
    /// `‖θ(τₙ₊₁) − θ(τₙ)‖` in the `𝔥ᴶ_{δ,0}` norm.
    pub differences: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl ThetaLimitReport {
    /// Exponential fit of the Cauchy differences (indexed by the later
    /// snapshot time) over `window`.
    pub fn tail_decay(&self, window: (f64, f64)) -> Result<DecayReport, SimError> {
        fit_decay(&self.times[1..], &self.differences, window)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `c` in `ℰ ≈ A e^{−cs}`.
    pub rate: f64,
    pub log_amplitude: f64,
    pub rms_residual: f64,
    pub points: usize,
    /// Every sample in the window is strictly below its predecessor.
    pub strictly_decreasing: bool,
}

/// Least-squares fit of `log values` against `times` over `window`.
pub fn fit_decay(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayReport, SimError> {
    let (t, v): (Vec<f64>, Vec<f64>) =
        times.iter().zip(values).filter(|(t, _)| **t >= window.0 && **t <= window.1).map(|(t, v)| (*t, *v)).unzip();
    if t.len() < 3 {
        return Err(SimError::InsufficientData(format!("{} samples in window {:?}", t.len(), window)));
    }
    if v.iter().any(|v| !(*v > 0.0)) {
        return Err(SimError::InsufficientData("non-positive samples cannot be log-fitted".into()));
    }
    let logs: Vec<f64> = v.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&t, &logs).ok_or_else(|| SimError::InsufficientData("degenerate window".into()))?;
    Ok(DecayReport {
        rate: -fit.slope,
        log_amplitude: fit.intercept,
        rms_residual: fit.rms_residual,
        points: t.len(),
        strictly_decreasing: v.windows(2).all(|w| w[1] < w[0]),
    })
}
