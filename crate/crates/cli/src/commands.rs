//! One function per subcommand. Each resolves and validates all of its
//! settings first (usage errors), then writes the manifest, computes, and
//! writes its artifacts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use homolog_core::homogeneous::{
    bifurcation_scan, classify, fit_asymptotics, integrate_lambda, reparam_time, Frame, HomogeneousParams,
};
use homolog_core::io::{csv_table, parse_csv_table};
use homolog_core::profiles::{mass_of, solve_profile_with, EnthalpyProfile, ProfileConfig};
use homolog_core::simulator::{
    fit_decay, DataSlot, DiagnosticsSeries, InitialShape, PerturbationState, SimConfig, Simulator,
};
use homolog_core::spectral::{assemble_l, eigen_decompose, gap_conditions, liouville_potential, LiouvilleWindows};

use crate::args::*;
use crate::manifest::{sibling, Run};
use crate::settings::{require, Settings};
use crate::svg::{emit_svg, kind_code, PlotSource, Style};
use crate::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Profile(a) => profile(a),
        Command::MassCurve(a) => mass_curve(a),
        Command::Lambda(a) => lambda(a),
        Command::Bifurcation(a) => bifurcation(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Liouville(a) => liouville(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::DecayFit(a) => decay_fit(a),
    }
}

/// Default tolerance of the profile solver.
const PROFILE_TOL: f64 = 1e-12;
/// Default number of intervals of the profile grid.
const PROFILE_INTERVALS: usize = 4096;

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    require(v.is_finite(), || format!("--{name} must be finite, got {v}"))
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    require(v > 0.0 && v.is_finite(), || format!("--{name} must be positive, got {v}"))
}

/// Resolve `tol` and the profile grid shared by every profile-backed command.
fn profile_settings(s: &mut Settings, common: &Common, grid_key: &str) -> Result<(f64, ProfileConfig), CliError> {
    let tol = s.value("tol", common.tol, PROFILE_TOL)?;
    positive("tol", tol)?;
    let intervals = s.value(grid_key, None, PROFILE_INTERVALS)?;
    require(intervals >= 64, || format!("{grid_key} must be at least 64"))?;
    Ok((tol, ProfileConfig { grid_intervals: intervals, ..ProfileConfig::default() }))
}

fn solve(delta: f64, tol: f64, cfg: &ProfileConfig) -> Result<EnthalpyProfile, CliError> {
    Ok(solve_profile_with(delta, tol, cfg)?)
}

fn profile(a: ProfileArgs) -> Result<(), CliError> {
    let mut s = Settings::load("profiles", a.common.config.as_deref())?;
    let delta = s.value("delta", a.common.delta, 0.0)?;
    finite("delta", delta)?;
    let n = s.value("n", a.common.n, PROFILE_INTERVALS)?;
    require(n >= 64, || format!("--n must be at least 64, got {n}"))?;
    let tol = s.value("tol", a.common.tol, PROFILE_TOL)?;
    positive("tol", tol)?;
    let out = s.output(a.common.out, "profile.csv")?;
    let cfg = ProfileConfig { grid_intervals: n, ..ProfileConfig::default() };
    Run::start("profile", &s, &out)?.execute(|run| {
        let p = solve(delta, tol, &cfg)?;
        run.write(&out, &p.to_csv())?;
        run.write(&sibling(&out, "profile.json"), &p.to_json())?;
        run.write_json(
            &sibling(&out, "summary.json"),
            &json!({
                "delta": p.delta,
                "mass": mass_of(&p),
                "wprime_at_1": p.wprime_at_1,
                "beta": p.beta,
                "mass_identity_residual": p.mass_identity_residual(),
            }),
        )?;
        Ok(None)
    })
}

/// Centered differences inside, one-sided at the ends.
fn gradient(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (y[b] - y[a]) / (x[b] - x[a])
        })
        .collect()
}

fn mass_curve(a: MassCurveArgs) -> Result<(), CliError> {
    let mut s = Settings::load("profiles", a.common.config.as_deref())?;
    let lo = s.value("delta_min", a.delta_min, -0.5)?;
    let hi = s.value("delta_max", a.delta_max, 2.0)?;
    require(lo.is_finite() && hi.is_finite() && lo < hi, || format!("need delta_min < delta_max, got [{lo}, {hi}]"))?;
    let samples = s.value("samples", a.samples, 41_usize)?;
    require(samples >= 3, || "--samples must be at least 3".into())?;
    let tol = s.value("tol", a.common.tol, PROFILE_TOL)?;
    positive("tol", tol)?;
    let n = s.value("n", a.common.n, PROFILE_INTERVALS)?;
    require(n >= 64, || "--n must be at least 64".into())?;
    let cfg = ProfileConfig { grid_intervals: n, ..ProfileConfig::default() };
    let out = s.output(a.common.out, "mass_curve.csv")?;
    Run::start("mass-curve", &s, &out)?.execute(|run| {
        let deltas: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
        let masses: Vec<f64> =
            deltas.par_iter().map(|&d| solve(d, tol, &cfg).map(|p| mass_of(&p))).collect::<Result<_, _>>()?;
        let slope = gradient(&deltas, &masses);
        run.write(&out, &csv_table(&["delta", "mass", "dmass_ddelta"], &[&deltas, &masses, &slope]))?;
        run.write_json(
            &sibling(&out, "summary.json"),
            &json!({
                "samples": samples,
                "strictly_decreasing": masses.windows(2).all(|w| w[1] < w[0]),
                "mass_range": [masses.iter().copied().fold(f64::INFINITY, f64::min),
                               masses.iter().copied().fold(f64::NEG_INFINITY, f64::max)],
            }),
        )?;
        Ok(None)
    })
}

fn lambda(a: LambdaArgs) -> Result<(), CliError> {
    let mut s = Settings::load("homogeneous", a.common.config.as_deref())?;
    let delta = s.value("delta", a.common.delta, -0.5)?;
    let lambda0 = s.value("lambda0", a.lambda0, 1.0)?;
    let lambda1 = s.value("lambda1", a.lambda1, 1.0)?;
    let t_end = s.value("t_end", a.t_end, 10.0)?;
    let tol = s.value("tol", a.common.tol, 1e-10)?;
    positive("t_end", t_end)?;
    positive("tol", tol)?;
    let params = HomogeneousParams::new(delta, lambda0, lambda1).map_err(|e| CliError::Usage(e.to_string()))?;
    let out = s.output(a.common.out, "lambda.csv")?;
    Run::start("lambda", &s, &out)?.execute(|run| {
        let class = classify(&params);
        let traj = integrate_lambda(&params, t_end, tol)?;
        run.write(
            &out,
            &csv_table(
                &["t", "lambda", "lambdadot", "s", "tau"],
                &[&traj.times, &traj.lambda, &traj.lambdadot, &traj.s, &traj.tau],
            ),
        )?;
        let rates = fit_asymptotics(&traj, class.kind).map_err(|e| e.name());
        let frames = [Frame::SelfSimilar, Frame::LinearRate].map(|f| {
            reparam_time(&traj, f)
                .ok()
                .map(|m| json!({ "final_sigma": m.sigma.last(), "final_lambda_sigma": m.lambda_sigma.last() }))
        });
        run.write_json(
            &sibling(&out, "summary.json"),
            &json!({
                "params": params,
                "class": class.kind.label(),
                "classification": class,
                "energy_drift": traj.energy_drift(),
                "collapse_time": traj.collapse_time,
                "asymptotics": match rates { Ok(r) => json!(r), Err(name) => json!({ "error": name }) },
                "self_similar_frame": frames[0],
                "linear_rate_frame": frames[1],
            }),
        )?;
        Ok(Some(traj.times.len()))
    })
}

fn bifurcation(a: BifurcationArgs) -> Result<(), CliError> {
    let mut s = Settings::load("homogeneous", a.common.config.as_deref())?;
    let d = (s.value("delta_min", a.delta_min, -1.0)?, s.value("delta_max", a.delta_max, 1.0)?);
    let l = (s.value("lambda1_min", a.lambda1_min, -2.0)?, s.value("lambda1_max", a.lambda1_max, 2.0)?);
    let lambda0 = s.value("lambda0", a.lambda0, 1.0)?;
    let res = (s.value("n_delta", a.n_delta, 121_usize)?, s.value("n_lambda1", a.n_lambda1, 121_usize)?);
    require(d.0 <= d.1 && l.0 <= l.1, || "ranges must satisfy min <= max".into())?;
    positive("lambda0", lambda0)?;
    require(res.0 > 0 && res.1 > 0, || "the scan needs at least one sample per axis".into())?;
    let out = s.output(a.common.out, "bifurcation.csv")?;
    Run::start("bifurcation", &s, &out)?.execute(|run| {
        let map = bifurcation_scan(d, l, lambda0, res)?;
        let mut cols: [Vec<f64>; 3] = Default::default();
        for (j, row) in map.kinds.iter().enumerate() {
            for (i, kind) in row.iter().enumerate() {
                cols[0].push(map.deltas[i]);
                cols[1].push(map.lambda1s[j]);
                cols[2].push(kind_code(*kind) as f64);
            }
        }
        run.write(&out, &csv_table(&["delta", "lambda1", "kind"], &[&cols[0], &cols[1], &cols[2]]))?;
        let svg = emit_svg(&PlotSource::Bifurcation(&map), &Style::default())?;
        run.write(&sibling(&out, "svg"), &svg)?;
        let legend: Vec<_> = (0..6)
            .filter_map(crate::svg::kind_from_code)
            .map(|k| json!({ "code": kind_code(k), "label": k.label() }))
            .collect();
        run.write_json(&sibling(&out, "summary.json"), &json!({ "lambda0": lambda0, "legend": legend }))?;
        Ok(None)
    })
}

fn spectrum(a: SpectrumArgs) -> Result<(), CliError> {
    let mut s = Settings::load("spectral", a.common.config.as_deref())?;
    let delta = s.value("delta", a.common.delta, 0.0)?;
    finite("delta", delta)?;
    let ks = s.value("k", a.k, vec![0_usize])?;
    require(!ks.is_empty(), || "--k needs at least one index".into())?;
    let n = s.value("n", a.common.n, 512_usize)?;
    require(n >= 16, || "--n must be at least 16".into())?;
    let n_eigs = s.value("n_eigs", a.n_eigs, 6_usize)?;
    require((2..=n).contains(&n_eigs), || format!("--n-eigs must lie in [2, {n}]"))?;
    let (tol, cfg) = profile_settings(&mut s, &a.common, "grid_intervals")?;
    let out = s.output(a.common.out, "spectrum.csv")?;
    Run::start("spectrum", &s, &out)?.execute(|run| {
        let p = solve(delta, tol, &cfg)?;
        let decomps = ks
            .par_iter()
            .map(|&k| -> Result<_, CliError> {
                let d = eigen_decompose(&assemble_l(&p, k, n)?, n_eigs)?;
                let gap = gap_conditions(&d, delta)?;
                Ok((k, d, gap))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut header = vec!["delta".to_string(), "k".into(), "N".into()];
        header.extend((0..n_eigs).map(|i| format!("mu_{i}")));
        let mut cols = vec![vec![delta; ks.len()], ks.iter().map(|&k| k as f64).collect(), vec![n as f64; ks.len()]];
        cols.extend((0..n_eigs).map(|i| decomps.iter().map(|(_, d, _)| d.eigenvalues[i]).collect::<Vec<_>>()));
        let head: Vec<&str> = header.iter().map(String::as_str).collect();
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        run.write(&out, &csv_table(&head, &refs))?;
        let summary: Vec<_> = decomps
            .iter()
            .map(|(k, d, gap)| json!({ "k": k, "eigenvalues": d.eigenvalues, "residuals": d.residuals, "gap": gap }))
            .collect();
        run.write_json(&sibling(&out, "summary.json"), &json!({ "delta": delta, "n": n, "operators": summary }))?;
        Ok(None)
    })
}

fn liouville(a: LiouvilleArgs) -> Result<(), CliError> {
    let mut s = Settings::load("spectral", a.common.config.as_deref())?;
    let delta = s.value("delta", a.common.delta, 0.0)?;
    finite("delta", delta)?;
    let k = s.value("k", a.k, 0_usize)?;
    let (tol, cfg) = profile_settings(&mut s, &a.common, "grid_intervals")?;
    let out = s.output(a.common.out, "liouville.csv")?;
    Run::start("liouville", &s, &out)?.execute(|run| {
        let p = solve(delta, tol, &cfg)?;
        let q = liouville_potential(&p, k, &LiouvilleWindows::default());
        run.write(&out, &csv_table(&["y", "q"], &[&q.y, &q.q]))?;
        run.write_json(
            &sibling(&out, "summary.json"),
            &json!({
                "delta": delta,
                "k": k,
                "y_plus": q.y_plus,
                "center_limit": q.center_limit,
                "center_expected": 2.0,
                "center_spread": q.center_spread,
                "boundary_limit": q.boundary_limit,
                "boundary_expected": q.boundary_expected,
                "boundary_spread": q.boundary_spread,
            }),
        )?;
        Ok(None)
    })
}

/// A fully resolved and validated perturbation run.
#[derive(Debug, Clone, Serialize)]
struct RunPlan {
    config: SimConfig,
    shape: InitialShape,
    slot: DataSlot,
    energy: f64,
    fit_start: f64,
    tol: f64,
    profile_cfg: ProfileConfig,
}

fn run_plan(s: &mut Settings, common: &Common, r: &RunArgs) -> Result<RunPlan, CliError> {
    let frame = s.value("frame", r.frame, FrameArg::SelfSimilar)?;
    let delta = s.value("delta", common.delta, -0.05)?;
    let n = s.value("n", common.n, 256_usize)?;
    let t_end = s.value("t_end", r.t_end, 10.0)?;
    finite("delta", delta)?;
    positive("t_end", t_end)?;
    require(n >= 16, || "--n must be at least 16".into())?;
    let mut config = match frame {
        FrameArg::SelfSimilar => SimConfig::self_similar(delta, n, t_end),
        FrameArg::LinearRate => {
            let l0 = s.value("lambda0", r.lambda0, 1.0)?;
            let l1 = s.value("lambda1", r.lambda1, 1.0)?;
            let h = HomogeneousParams::new(delta, l0, l1).map_err(|e| CliError::Usage(e.to_string()))?;
            SimConfig::linear_rate(h, n, t_end)
        }
    };
    config.cfl = s.value("cfl", r.cfl, config.cfl)?;
    config.dt_max = s.value("dt_max", r.dt_max, config.dt_max)?;
    config.stride = s.value("stride", r.stride, config.stride)?;
    config.norm_order = s.value("norm_order", r.norm_order, config.norm_order)?;
    config.snapshot_interval = s.optional("snapshot_interval", r.snapshot_interval)?;
    config.linearized = s.value("linearized", r.linearized, false)?;
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let index = s.value("mode_index", r.mode_index, 1_usize)?;
    let shape = match s.value("shape", r.shape, ShapeArg::Eigenmode)? {
        ShapeArg::Eigenmode => InitialShape::Eigenmode { index },
        ShapeArg::ConstantPlusMode => {
            InitialShape::ConstantPlusMode { constant: s.value("constant", r.constant, 0.0)?, index }
        }
        ShapeArg::Bump => InitialShape::Bump {
            center: s.value("bump_center", r.bump_center, 0.3)?,
            width: s.value("bump_width", r.bump_width, 0.25)?,
        },
    };
    require(index < n, || format!("--mode-index must be below {n}"))?;
    let slot = match s.value("slot", r.slot, SlotArg::Position)? {
        SlotArg::Position => DataSlot::Position,
        SlotArg::Velocity => DataSlot::Velocity,
    };
    let energy = s.value("energy", r.energy, 1e-6)?;
    positive("energy", energy)?;
    let fit_start = s.value("fit_start", r.fit_start, t_end / 3.0)?;
    require(fit_start.is_finite() && fit_start < t_end, || "--fit-start must lie before t_end".into())?;
    let (tol, profile_cfg) = profile_settings(s, common, "grid_intervals")?;
    Ok(RunPlan { config, shape, slot, energy, fit_start, tol, profile_cfg })
}

/// Versioned record of a perturbation state (snapshots and final states).
#[derive(Serialize)]
struct StateRecord<'a> {
    format: &'static str,
    version: u32,
    delta: f64,
    z: &'a [f64],
    #[serde(flatten)]
    state: &'a PerturbationState,
}

struct RunOutcome {
    series: DiagnosticsSeries,
    summary: serde_json::Value,
}

fn execute_plan(plan: &RunPlan, run: &mut Run, primary: &Path) -> Result<RunOutcome, CliError> {
    let profile = solve(plan.config.delta, plan.tol, &plan.profile_cfg)?;
    let sim = Simulator::new(&profile, plan.config.clone())?;
    let init = sim.scaled_initial_in(&plan.shape, plan.energy, plan.slot)?;
    let (series, fin) = sim.run(&init)?;
    run.write(primary, &series.to_csv())?;
    let record = StateRecord {
        format: "homolog-perturbation-state",
        version: 1,
        delta: plan.config.delta,
        z: &sim.bg.z,
        state: &fin,
    };
    run.write_json(&sibling(primary, "final.json"), &record)?;

    let (times, values) = (series.times(), series.high_order());
    let window = (plan.fit_start, plan.config.t_end + 1e-9);
    let decay = fit_decay(&times, &values, window);
    if let Ok(fit) = &decay {
        let time_label = match plan.config.frame {
            Frame::SelfSimilar => "s",
            Frame::LinearRate => "τ",
        };
        let source = PlotSource::Decay { times: &times, values: &values, fit, window, time_label };
        run.write(&sibling(primary, "svg"), &emit_svg(&source, &Style::default())?)?;
    }
    let theta = if series.snapshots.len() >= 3 {
        let rep = sim.theta_limit(&series.snapshots)?;
        Some(json!({ "times": rep.times, "differences": rep.differences, "ratios": rep.ratios }))
    } else {
        None
    };
    let first = series.records.first().expect("run records its initial state");
    let last = series.records.last().expect("run records its initial state");
    let summary = json!({
        "steps": series.steps,
        "retries": series.retries,
        "energy_drift_rate": series.energy_drift_rate(),
        "initial_high_order": first.high_order,
        "final_high_order": last.high_order,
        "max_constraint": series.records.iter().map(|r| r.constraint).fold(0.0, f64::max),
        "max_weighted_velocity": series.records.iter().map(|r| r.weighted_velocity).fold(0.0, f64::max),
        "decay": match &decay { Ok(d) => json!(d), Err(e) => json!({ "error": e.name() }) },
        "theta_limit": theta,
    });
    run.write_json(&sibling(primary, "summary.json"), &summary)?;
    Ok(RunOutcome { series, summary })
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let mut s = Settings::load("simulator", a.common.config.as_deref())?;
    let plan = run_plan(&mut s, &a.common, &a.run)?;
    let out = s.output(a.common.out.clone(), "diagnostics.csv")?;
    Run::start("simulate", &s, &out)?.execute(|run| {
        let outcome = execute_plan(&plan, run, &out)?;
        Ok(Some(outcome.series.steps))
    })
}

fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let mut s = Settings::load("simulator", a.common.config.as_deref())?;
    let base = run_plan(&mut s, &a.common, &a.run)?;
    let deltas = s.value("deltas", a.deltas, vec![base.config.delta])?;
    let energies = s.value("energies", a.energies, vec![base.energy])?;
    require(!deltas.is_empty() && !energies.is_empty(), || "the sweep is empty".into())?;
    let default_workers = std::thread::available_parallelism().map_or(1, usize::from);
    let workers = s.value("workers", a.workers, default_workers)?;
    require(workers > 0, || "--workers must be positive".into())?;
    let dir = s.output(a.common.out.clone(), "sweep")?;

    let mut plans = Vec::new();
    for &d in &deltas {
        for &e in &energies {
            let mut p = base.clone();
            p.config.delta = d;
            if let Some(h) = p.config.homog.as_mut() {
                h.delta = d;
            }
            p.energy = e;
            p.config.validate().map_err(|err| CliError::Usage(format!("delta = {d}: {err}")))?;
            positive("energies", e)?;
            plans.push(p);
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build a pool of {workers} workers: {e}")))?;

    Run::start_at("sweep", &s, dir.join("manifest.json"))?.execute(|run| {
        let results: Vec<(usize, Result<serde_json::Value, CliError>)> = pool.install(|| {
            plans
                .par_iter()
                .enumerate()
                .map(|(i, plan)| {
                    let run_dir = dir.join(format!("run-{i:03}"));
                    let primary = run_dir.join("diagnostics.csv");
                    let mut local = Settings::empty("simulator");
                    let echo = serde_json::to_value(plan).expect("plans serialize");
                    let _ = local.value("plan", None, echo);
                    let result = Run::start_at("sweep-run", &local, run_dir.join("manifest.json"))
                        .and_then(|r| {
                            let mut summary = serde_json::Value::Null;
                            r.execute(|run| {
                                let o = execute_plan(plan, run, &primary)?;
                                summary = o.summary;
                                Ok(Some(o.series.steps))
                            })
                            .map(|()| summary)
                        });
                    (i, result)
                })
                .collect()
        });
        let mut idx: [Vec<f64>; 6] = Default::default();
        let mut entries = Vec::new();
        for (i, result) in &results {
            let plan = &plans[*i];
            let get = |v: &serde_json::Value, path: &[&str]| -> f64 {
                path.iter().try_fold(v, |v, k| v.get(k)).and_then(serde_json::Value::as_f64).unwrap_or(f64::NAN)
            };
            let (ok, summary) = match result {
                Ok(v) => (1.0, v.clone()),
                Err(e) => (0.0, json!({ "error": e.name() })),
            };
            idx[0].push(*i as f64);
            idx[1].push(plan.config.delta);
            idx[2].push(plan.energy);
            idx[3].push(ok);
            idx[4].push(get(&summary, &["decay", "rate"]));
            idx[5].push(get(&summary, &["energy_drift_rate"]));
            entries.push(json!({ "run": format!("run-{i:03}"), "delta": plan.config.delta, "energy": plan.energy, "result": summary }));
        }
        let refs: Vec<&[f64]> = idx.iter().map(Vec::as_slice).collect();
        run.write(&dir.join("index.csv"), &csv_table(&["run", "delta", "energy", "ok", "decay_rate", "energy_drift_rate"], &refs))?;
        run.write_json(&dir.join("index.json"), &entries)?;
        if let Some((_, Err(e))) = results.iter().find(|(_, r)| r.is_err()) {
            return Err(CliError::Compute { name: e.name(), message: format!("at least one sweep run failed: {e}") });
        }
        Ok(Some(plans.len()))
    })
}

fn decay_fit(a: DecayFitArgs) -> Result<(), CliError> {
    let mut s = Settings::load("simulator", a.common.config.as_deref())?;
    let input: PathBuf = s
        .optional("input", a.input)?
        .ok_or_else(|| CliError::Usage("decay-fit needs --input <diagnostics CSV>".into()))?;
    let column = s.value("column", a.column, "high_order".to_string())?;
    let time_column = s.value("time_column", a.time_column, "time".to_string())?;
    let start = s.optional("window_start", a.window_start)?;
    let end = s.optional("window_end", a.window_end)?;
    let text = std::fs::read_to_string(&input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let out = s.output(a.common.out, "decay.json")?;
    Run::start("decay-fit", &s, &out)?.execute(|run| {
        let malformed = |m: String| CliError::Compute { name: "MalformedInput", message: m };
        let (header, cols) = parse_csv_table(&text).map_err(malformed)?;
        let find = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| malformed(format!("no column {name} in {}", input.display())))
        };
        let (t, v) = (&cols[find(&time_column)?], &cols[find(&column)?]);
        let window = (
            start.unwrap_or_else(|| t.first().copied().unwrap_or(0.0)),
            end.unwrap_or_else(|| t.last().copied().unwrap_or(0.0) + 1e-9),
        );
        let fit = fit_decay(t, v, window)?;
        let source = PlotSource::Decay { times: t, values: v, fit: &fit, window, time_label: &time_column };
        run.write(&sibling(&out, "svg"), &emit_svg(&source, &Style::default())?)?;
        run.write_json(&out, &json!({ "input": input, "column": column, "window": [window.0, window.1], "fit": fit }))?;
        Ok(None)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_is_exact_on_lines() {
        let x = [0.0, 0.5, 1.5, 2.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        assert!(gradient(&x, &y).iter().all(|g| (g - 3.0).abs() < 1e-14));
    }
}
