//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p homolog-core --test acceptance`.

mod common;

use std::error::Error;
use std::f64::consts::PI;

use rayon::prelude::*;

use homolog_core::homogeneous::{
    classify, fit_asymptotics, integrate_lambda, linear_rate_exponents, self_similar_lambda, HomogeneousParams,
};
use homolog_core::profiles::{mass_of, primary_branch, solve_profile, solve_raw, EnthalpyProfile, ProfileConfig};
use homolog_core::simulator::{fit_decay, DataSlot, InitialShape, SimConfig, Simulator};
use homolog_core::spectral::{
    assemble_l, commutator_residual, eigen_decompose, gap_conditions, liouville_potential, EvenPolynomial,
    LiouvilleWindows,
};

type Outcome = Result<(bool, String), Box<dyn Error + Send + Sync>>;
type Criterion = (&'static str, fn() -> Outcome);

/// Deltas used by the perturbation runs.
const SIM_DELTAS: [f64; 4] = [-0.05, -0.02, 0.0, 0.5];

fn profile(delta: f64) -> Result<EnthalpyProfile, Box<dyn Error + Send + Sync>> {
    Ok(solve_profile(delta, 1e-12)?)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn lane_emden_fidelity() -> Outcome {
    let (xi1, dtheta) = common::lane_emden_oracle();
    let (zbar_ref, slope_ref) = (xi1 / PI.sqrt(), xi1 * xi1 * dtheta / PI.sqrt());
    let raw = solve_raw(0.0, 1e-12)?;
    let slope = raw.zbar.powi(2) * raw.wprime.last().copied().unwrap_or(f64::NAN);
    let (e_zbar, e_slope) = (rel(raw.zbar, zbar_ref), rel(slope, slope_ref));
    let mut ok = e_zbar <= 1e-6 && e_slope <= 1e-6;
    let mut worst: f64 = 0.0;
    for delta in [-0.05, 0.0, 0.5, 2.0] {
        let p = profile(delta)?;
        ok &= p.intervals() == 4096;
        worst = worst.max(p.mass_identity_residual().abs());
    }
    ok &= worst <= 1e-8;
    Ok((
        ok,
        format!("zbar rel err {e_zbar:.1e}, slope rel err {e_slope:.1e}, worst mass identity residual {worst:.1e}"),
    ))
}

fn mass_monotonicity() -> Outcome {
    let branch = primary_branch(1e-12, &ProfileConfig::default())?;
    // keep a margin from the two ends of the branch, where dM/dδ is singular
    let (lo, hi) = (branch.delta_star_estimate + 0.25, branch.delta_fold - 0.25);
    let h = 1e-4;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..20 {
        let d = lo + (hi - lo) * i as f64 / 19.0;
        let slope = (mass_of(&profile(d + h)?) - mass_of(&profile(d - h)?)) / (2.0 * h);
        worst = worst.max(slope);
    }
    Ok((worst < 0.0, format!("20 samples over [{lo:.3}, {hi:.3}], largest dM/dδ = {worst:.4e}")))
}

fn homogeneous_dynamics() -> Outcome {
    let (mut worst_err, mut worst_drift): (f64, f64) = (0.0, 0.0);
    for (d, l0) in [(-0.5, 1.0), (-0.05, 1.0), (-0.3, 2.0)] {
        let p = HomogeneousParams::self_similar(d, l0);
        let tr = integrate_lambda(&p, 100.0, 1e-12)?;
        for (&t, &l) in tr.times.iter().zip(&tr.lambda) {
            worst_err = worst_err.max(rel(l, self_similar_lambda(&p, t)));
        }
        worst_drift = worst_drift.max(tr.energy_drift());
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for d in [-0.1, -0.5, -2.0] {
        for l1 in [-1.5, -0.5, 0.0, 0.4] {
            let p = HomogeneousParams::new(d, 1.0, l1)?;
            let tr = integrate_lambda(&p, 1e3, 1e-12)?;
            let r = fit_asymptotics(&tr, classify(&p).kind)?;
            lo = lo.min(r.exponent);
            hi = hi.max(r.exponent);
            worst_drift = worst_drift.max(tr.energy_drift());
        }
    }
    let ok = worst_err <= 1e-8 && lo >= 0.64 && hi <= 0.70 && worst_drift <= 1e-10;
    Ok((
        ok,
        format!("closed-form rel err {worst_err:.1e}, collapse exponents [{lo:.4}, {hi:.4}], drift {worst_drift:.1e}"),
    ))
}

fn spectral_gap() -> Outcome {
    let mut ok = true;
    let (mut mu0_ratio, mut variation, mut mu1_change): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut margin = f64::INFINITY;
    for delta in SIM_DELTAS {
        let p = profile(delta)?;
        for k in [0, 1, 2] {
            let mut mu1 = [0.0; 2];
            for (slot, n) in [512, 1024].into_iter().enumerate() {
                let dec = eigen_decompose(&assemble_l(&p, k, n)?, 2)?;
                let (mu, v0) = (&dec.eigenvalues, &dec.eigenvectors[0]);
                mu0_ratio = mu0_ratio.max(mu[0].abs() / mu[1]);
                let mean = v0.iter().sum::<f64>() / n as f64;
                variation = variation.max(v0.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs());
                mu1[slot] = mu[1];
                if n == 512 {
                    let gap = gap_conditions(&dec, delta)?;
                    ok &= gap.predicate;
                    margin = margin.min(2.0 / 3.0 * mu[1] - 2.0 * delta.min(0.0).abs());
                }
            }
            mu1_change = mu1_change.max(rel(mu1[0], mu1[1]));
        }
    }
    ok &= mu0_ratio <= 1e-6 && variation <= 1e-4 && mu1_change <= 0.01 && margin > 0.0;
    Ok((
        ok,
        format!(
            "|mu0|/mu1 {mu0_ratio:.1e}, eigvec0 variation {variation:.1e}, mu1 change {:.3}%, min (2/3)mu1 - b^2 = {margin:.3}",
            100.0 * mu1_change
        ),
    ))
}

fn commutator_and_liouville() -> Outcome {
    let fields = [EvenPolynomial(vec![0.0, 1.0]), EvenPolynomial(vec![0.0, 1.0, 1.0])];
    let mut min_order = f64::INFINITY;
    let (mut center_err, mut boundary_err): (f64, f64) = (0.0, 0.0);
    for delta in [-0.05, 0.0, 0.5] {
        let p = profile(delta)?;
        for k in [0, 1, 2] {
            let r: Vec<f64> =
                [256, 512, 1024].iter().map(|&n| commutator_residual(&p, k, n, &fields)).collect::<Result<_, _>>()?;
            min_order = min_order.min((r[0] / r[1]).log2()).min((r[1] / r[2]).log2());
            let s = liouville_potential(&p, k, &LiouvilleWindows::default());
            let expected = (7.0 + 2.0 * k as f64) * (5.0 + 2.0 * k as f64) / 4.0;
            center_err = center_err.max(rel(s.center_limit, 2.0));
            boundary_err = boundary_err.max(rel(s.boundary_limit, expected));
        }
    }
    let ok = min_order >= 1.8 && center_err <= 0.05 && boundary_err <= 0.05;
    Ok((
        ok,
        format!("min commutator order {min_order:.3}, Liouville rel err center {center_err:.2e} boundary {boundary_err:.2e}"),
    ))
}

fn simulator_structure() -> Outcome {
    let delta = -0.05;
    let p = profile(delta)?;
    let ss = |n: usize, t_end: f64| Simulator::new(&p, SimConfig::self_similar(delta, n, t_end));

    // steady state
    let sim = ss(128, 1.0)?;
    let zero = sim.zero_state();
    let (series, fin) = sim.run(&zero)?;
    let steady = fin.phi.iter().chain(&fin.phi_dot).all(|v| *v == 0.0)
        && series.records.iter().all(|r| r.high_order == 0.0 && r.energy.abs() <= 1e-13 * series.energy_scale);

    // energy drift at N = 512
    let mut cfg = SimConfig::self_similar(delta, 512, 4.0);
    cfg.stride = 50;
    let sim = Simulator::new(&p, cfg)?;
    let (series, _) = sim.run(&sim.scaled_initial(&InitialShape::Eigenmode { index: 1 }, 1e-6)?)?;
    let drift = series.energy_drift_rate();

    // defining identity F[1+φ] = −δ + 𝓛φ + 2δφ − N[φ] up to discretization error
    let smooth = |sim: &Simulator, a: f64| -> Vec<f64> {
        sim.bg.z.iter().map(|z| a * (0.3 + z * z - 0.8 * z.powi(4) + 0.2 * (3.0 * z * z).cos())).collect()
    };
    let mut residuals = Vec::new();
    for n in [128, 256, 512, 1024] {
        let sim = ss(n, 1.0)?;
        let phi = smooth(&sim, 1e-3);
        let psi: Vec<f64> = phi.iter().map(|v| 1.0 + v).collect();
        let (f, l, nl) = (sim.evaluate_f(&psi)?, sim.bg.op.apply(&phi), sim.evaluate_n(&phi)?);
        let d = sim.delta();
        let r: Vec<f64> = (0..n).map(|i| f[i] - (-d + l[i] + 2.0 * d * phi[i] - nl[i])).collect();
        residuals.push(sim.bg.norm2(0, &r).sqrt());
    }
    let convergent = residuals.windows(2).all(|w| w[1] < w[0] / 3.0);

    // quadratic scaling
    let sim = ss(512, 1.0)?;
    let n_norm = |a: f64| -> Result<f64, Box<dyn Error + Send + Sync>> {
        Ok(sim.bg.norm2(0, &sim.evaluate_n(&smooth(&sim, a))?).sqrt())
    };
    let j = |a: f64| -> Result<f64, Box<dyn Error + Send + Sync>> {
        Ok(sim.j_functional(&sim.initial_state(smooth(&sim, a), vec![0.0; 512])?)?)
    };
    let (n_ratio, j_ratio) = (n_norm(1e-3)? / n_norm(5e-4)?, j(1e-3)? / j(5e-4)?);
    let quadratic = (n_ratio - 4.0).abs() <= 0.8 && (j_ratio - 4.0).abs() <= 0.8;

    let ok = steady && drift <= 1e-6 && convergent && quadratic;
    let residuals: Vec<String> = residuals.iter().map(|r| format!("{r:.1e}")).collect();
    Ok((
        ok,
        format!(
            "steady {steady}, drift {drift:.1e}/unit time, identity residuals [{}], ratios N {n_ratio:.3} J {j_ratio:.3}",
            residuals.join(", ")
        ),
    ))
}

fn growing_mode() -> Outcome {
    let mut worst: f64 = 0.0;
    for delta in [-0.02, -0.05] {
        let mut cfg = SimConfig::self_similar(delta, 128, 3.0);
        cfg.linearized = true;
        let sim = Simulator::new(&profile(delta)?, cfg)?;
        let (eps, b) = (1e-3, sim.b);
        let mut st = sim.initial_state(vec![eps; 128], vec![-b * eps; 128])?;
        while st.time < 3.0 - 1e-12 {
            let dt = sim.time_step(&st).min(3.0 - st.time);
            st = sim.step(&st, dt)?;
            let exact = eps * (-b * st.time).exp();
            worst = st.phi.iter().fold(worst, |w, v| w.max(rel(*v, exact)));
        }
    }
    Ok((worst <= 1e-4, format!("max rel deviation from e^(-bs) over s in [0, 3]: {worst:.1e}")))
}

fn self_similar_decay() -> Outcome {
    let delta = -0.05;
    let p = profile(delta)?;
    let mut rates = Vec::new();
    let mut ok = true;
    for n in [512, 1024] {
        let mut cfg = SimConfig::self_similar(delta, n, 12.0);
        cfg.stride = 25;
        let sim = Simulator::new(&p, cfg)?;
        let init = sim.scaled_initial(&InitialShape::Eigenmode { index: 1 }, 1e-6)?;
        let energy = sim.physical_energy(&init)?;
        ok &= energy.total().abs() <= 1e-10 * energy.scale();
        let (series, _) = sim.run(&init)?;
        ok &= rel(series.records[0].high_order, 1e-6) <= 1e-6;
        let fit = fit_decay(&series.times(), &series.high_order(), (4.0, 12.0))?;
        ok &= fit.rate > 0.0 && fit.strictly_decreasing;
        rates.push(fit.rate);
    }
    let spread = rel(rates[0], rates[1]);
    ok &= spread <= 0.2;
    Ok((ok, format!("rates N=512 {:.5}, N=1024 {:.5} (spread {:.2}%)", rates[0], rates[1], 100.0 * spread)))
}

fn linear_expansion() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for delta in [-0.02, 0.0, 0.5] {
        let homog = HomogeneousParams::new(delta, 1.0, 1.0)?;
        let (_, beta2) = linear_rate_exponents(&homog);
        let mut cfg = SimConfig::linear_rate(homog, 512, 8.0);
        cfg.stride = 10;
        cfg.snapshot_interval = Some(0.5);
        let sim = Simulator::new(&profile(delta)?, cfg)?;
        let init = sim.scaled_initial_in(&InitialShape::Eigenmode { index: 1 }, 1e-6, DataSlot::Velocity)?;
        let (series, fin) = sim.run(&init)?;
        let first = &series.records[0];
        let e_ratio = series.records.iter().map(|r| r.high_order).fold(0.0, f64::max) / first.high_order;
        let v_ratio = series.records.iter().map(|r| r.weighted_velocity).fold(0.0, f64::max) / first.weighted_velocity;

        let limit = sim.theta_limit(&series.snapshots)?;
        let tail = limit.tail_decay((16.0 / 3.0, 8.0 + 1e-9))?;
        let geometric = tail.strictly_decreasing && tail.rate > 0.0;

        let (restart, _) = sim.restart_from_limit(&limit, &fin, 2.0)?;
        let r_ratio = restart.records.iter().map(|r| r.weighted_velocity).fold(0.0, f64::max) / first.weighted_velocity;

        ok &= e_ratio <= 10.0 && v_ratio <= 3.0 && geometric && r_ratio <= 2.0;
        details.push(format!(
            "δ={delta}: E/E0 {e_ratio:.3}, vel {v_ratio:.3}, Cauchy rate {:.3} (β₂/2 {:.3}), restart vel {r_ratio:.1e}",
            tail.rate,
            beta2 / 2.0
        ));
    }
    Ok((ok, details.join("; ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("lane-emden fidelity", lane_emden_fidelity),
        ("mass monotonicity", mass_monotonicity),
        ("homogeneous dynamics", homogeneous_dynamics),
        ("spectral gap", spectral_gap),
        ("commutator and liouville", commutator_and_liouville),
        ("simulator structure", simulator_structure),
        ("growing mode", growing_mode),
        ("self-similar decay", self_similar_decay),
        ("linear expansion", linear_expansion),
    ];
    let results: Vec<(bool, String)> =
        criteria.par_iter().map(|(_, check)| check().unwrap_or_else(|e| (false, format!("error: {e}")))).collect();
    let mut failed = Vec::new();
    for (i, ((name, _), (pass, detail))) in criteria.iter().zip(&results).enumerate() {
        println!("criterion {} [{name}]: {} — {detail}", i + 1, if *pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
