use std::path::Path;
use std::process::Command;

use homolog_cli::dispatch;
use homolog_cli::manifest::{RunManifest, RunStatus};
use homolog_cli::svg::{bifurcation_plot, decay_plot, emit_svg, Layer, PlotSource, Style, SvgError};
use homolog_core::homogeneous::{bifurcation_scan, ClassificationMap};
use homolog_core::io::{csv_table, parse_csv_table};
use homolog_core::simulator::fit_decay;

fn run(args: &[&str]) -> i32 {
    dispatch(std::iter::once("homolog").chain(args.iter().copied()))
}

fn manifest(path: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn manifests_in(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with("manifest.json"))
        .count()
}

#[test]
fn profile_writes_csv_and_a_finalized_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    assert_eq!(run(&["profile", "--delta", "0", "--n", "1024", "--out", out.to_str().unwrap()]), 0);
    let (header, cols) = parse_csv_table(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(header, ["z", "w", "wprime"]);
    assert_eq!(cols[0].len(), 1025);
    let m = manifest(&dir.path().join("w.manifest.json"));
    assert_eq!((m.command.as_str(), m.status), ("profile", RunStatus::Ok));
    assert_eq!(m.config["n"], serde_json::json!(1024));
    assert!(m.outputs.contains(&out));
    assert_eq!(manifests_in(dir.path()), 1);
}

#[test]
fn identical_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a/m.csv");
    let b = dir.path().join("b/m.csv");
    for out in [&a, &b] {
        let args = ["mass-curve", "--delta-min", "-0.04", "--delta-max", "1", "--samples", "4", "--n", "512", "--out"];
        let mut v: Vec<&str> = args.to_vec();
        v.push(out.to_str().unwrap());
        assert_eq!(run(&v), 0);
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let (_, cols) = parse_csv_table(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert!(cols[2].iter().all(|d| *d < 0.0), "mass must decrease with delta");
}

#[test]
fn usage_errors_exit_2_without_starting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["simulate", "--frame", "self-similar", "--delta", "0.1", "--out", o]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    assert_eq!(run(&[]), 2);
    assert_eq!(run(&["profile", "--n", "ten"]), 2);
    assert_eq!(run(&["decay-fit", "--out", o]), 2);
    assert_eq!(run(&["spectrum", "--n-eigs", "1", "--out", o]), 2);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0, "nothing may be written");
    assert_eq!(run(&["--help"]), 0);
}

#[test]
fn computational_errors_exit_1_and_mark_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    assert_eq!(run(&["profile", "--delta", "-30", "--out", out.to_str().unwrap()]), 1);
    let m = manifest(&dir.path().join("p.manifest.json"));
    assert_eq!(m.status, RunStatus::Failed);
    assert_eq!(m.error.as_deref(), Some("BelowDeltaStar"));
    assert!(!out.exists());
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[spectral]\ndelta = 0.5\nn = 64\nn_eigs = 3\nk = [0, 2]\n").unwrap();
    let out = dir.path().join("s.csv");
    let (c, o) = (cfg.to_str().unwrap(), out.to_str().unwrap());
    assert_eq!(run(&["spectrum", "--config", c, "--n", "128", "--out", o]), 0);
    let (header, cols) = parse_csv_table(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(header, ["delta", "k", "N", "mu_0", "mu_1", "mu_2"]);
    assert_eq!((cols[0][0], cols[1].clone(), cols[2][0]), (0.5, vec![0.0, 2.0], 128.0));
    assert!(cols[3].iter().zip(&cols[4]).all(|(m0, m1)| m0.abs() <= 1e-6 * m1));
    let m = manifest(&dir.path().join("s.manifest.json"));
    assert_eq!(m.config_file.as_deref(), Some(cfg.as_path()));
    assert_eq!(m.config["n"], serde_json::json!(128));
    assert_eq!(m.config["delta"], serde_json::json!(0.5));
}

#[test]
fn liouville_and_lambda_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.csv");
    assert_eq!(run(&["liouville", "--delta", "0", "--k", "1", "--out", q.to_str().unwrap()]), 0);
    let (header, _) = parse_csv_table(&std::fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!(header, ["y", "q"]);
    let s = json(&dir.path().join("q.summary.json"));
    let (lim, want) = (s["boundary_limit"].as_f64().unwrap(), s["boundary_expected"].as_f64().unwrap());
    assert!((lim - want).abs() < 0.05 * want);

    let l = dir.path().join("l.csv");
    assert_eq!(run(&["lambda", "--delta", "-0.5", "--lambda1", "1", "--t-end", "50", "--out", l.to_str().unwrap()]), 0);
    let s = json(&dir.path().join("l.summary.json"));
    assert_eq!(s["class"], "self-similar expansion");
    let p = s["asymptotics"]["exponent"].as_f64().unwrap();
    assert!((0.64..=0.70).contains(&p));
}

#[test]
fn simulate_and_refit_the_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run/diag.csv");
    let args = ["simulate", "--delta", "-0.05", "--n", "64", "--t-end", "3", "--stride", "5", "--out"];
    let mut v: Vec<&str> = args.to_vec();
    v.push(out.to_str().unwrap());
    assert_eq!(run(&v), 0);
    let run_dir = out.parent().unwrap();
    for f in ["diag.csv", "diag.summary.json", "diag.final.json", "diag.svg", "diag.manifest.json"] {
        assert!(run_dir.join(f).exists(), "{f} missing");
    }
    let m = manifest(&run_dir.join("diag.manifest.json"));
    assert!(m.steps.unwrap() > 0);
    let summary = json(&run_dir.join("diag.summary.json"));
    let rate = summary["decay"]["rate"].as_f64().unwrap();

    let fit = dir.path().join("fit.json");
    let (i, f) = (out.to_str().unwrap(), fit.to_str().unwrap());
    assert_eq!(run(&["decay-fit", "--input", i, "--window-start", "1", "--out", f]), 0);
    let refit = json(&fit)["fit"]["rate"].as_f64().unwrap();
    assert!((rate - refit).abs() < 1e-12, "{rate} vs {refit}");
    assert_eq!(run(&["decay-fit", "--input", i, "--column", "nope", "--out", f]), 1);
}

#[test]
fn sweep_is_independent_of_the_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut index = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}"));
        let args = format!(
            "sweep --frame linear-rate --deltas -0.02,0,0.5 --energies 1e-6 --n 48 --t-end 1 --slot velocity \
             --workers {workers} --out {}",
            out.display()
        );
        let code = run(&args.split_whitespace().collect::<Vec<_>>());
        assert_eq!(code, 0);
        assert_eq!(manifests_in(&out), 1);
        for r in 0..3 {
            assert_eq!(manifests_in(&out.join(format!("run-{r:03}"))), 1);
        }
        index.push(std::fs::read_to_string(out.join("index.csv")).unwrap());
    }
    assert_eq!(index[0], index[1]);
    let (_, cols) = parse_csv_table(&index[0]).unwrap();
    assert_eq!(cols[1], vec![-0.02, 0.0, 0.5]);
    assert!(cols[3].iter().all(|ok| *ok == 1.0));
}

#[test]
fn sweep_rejects_a_self_similar_run_with_positive_delta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sw");
    assert_eq!(run(&["sweep", "--deltas", "-0.05,0.1", "--n", "32", "--out", out.to_str().unwrap()]), 2);
    assert!(!out.exists());
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(homolog_cli::OUT_ENV, dir.path());
    let code = run(&["bifurcation", "--n-delta", "9", "--n-lambda1", "7"]);
    std::env::remove_var(homolog_cli::OUT_ENV);
    assert_eq!(code, 0);
    let (header, cols) =
        parse_csv_table(&std::fs::read_to_string(dir.path().join("bifurcation.csv")).unwrap()).unwrap();
    assert_eq!(header, ["delta", "lambda1", "kind"]);
    assert_eq!(cols[0].len(), 63);
    assert!(std::fs::read_to_string(dir.path().join("bifurcation.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn bifurcation_parabola_passes_through_the_critical_point() {
    let map = bifurcation_scan((-1.0, 1.0), (-2.0, 2.0), 1.0, (41, 41)).unwrap();
    let plot = bifurcation_plot(&map).unwrap();
    let star = plot
        .layers
        .iter()
        .find_map(|l| match l {
            Layer::Line { points, dashed: false, .. } => Some(points.clone()),
            _ => None,
        })
        .unwrap();
    // interpolate the λ₁* polyline at δ = −0.5
    let i = star.windows(2).position(|w| w[0].0 <= -0.5 && -0.5 <= w[1].0).unwrap();
    let ((x0, y0), (x1, y1)) = (star[i], star[i + 1]);
    let at = y0 + (y1 - y0) * (-0.5 - x0) / (x1 - x0);
    assert!((at - 1.0).abs() < 1e-3, "{at}");

    // and the rendered curve goes through the pixel of (−0.5, 1)
    let style = Style::default();
    let svg = plot.render(&style);
    let (px, py) = plot.to_pixel(&style, -0.5, 1.0);
    let line = svg.lines().find(|l| l.contains("<polyline") && l.contains("λ₁*")).unwrap();
    let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    let nearest = pts
        .split(' ')
        .map(|p| {
            let (a, b) = p.split_once(',').unwrap();
            ((a.parse::<f64>().unwrap() - px).powi(2) + (b.parse::<f64>().unwrap() - py).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(nearest < 2.0, "{nearest}px");
    assert!(svg.contains("stroke-dasharray"), "the e = 0 parabola is dashed");
}

#[test]
fn empty_data_cannot_be_plotted() {
    let empty = ClassificationMap { lambda0: 1.0, deltas: vec![], lambda1s: vec![], kinds: vec![], parabola: vec![] };
    assert_eq!(bifurcation_plot(&empty).unwrap_err(), SvgError::EmptyData);
    let err = emit_svg(&PlotSource::Bifurcation(&empty), &Style::default()).unwrap_err();
    assert_eq!(err.name(), "EmptyData");
    let fit = fit_decay(&[0.0, 1.0, 2.0], &[1.0, 0.5, 0.25], (0.0, 2.0)).unwrap();
    assert_eq!(decay_plot(&[], &[], &fit, (0.0, 1.0), "s").unwrap_err(), SvgError::EmptyData);
}

#[test]
fn decay_legend_reports_the_fitted_slope() {
    let s: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
    let e: Vec<f64> = s.iter().map(|t| 2e-6 * (-0.3 * t).exp()).collect();
    let fit = fit_decay(&s, &e, (0.0, 10.0)).unwrap();
    let svg = emit_svg(
        &PlotSource::Decay { times: &s, values: &e, fit: &fit, window: (0.0, 10.0), time_label: "s" },
        &Style::default(),
    )
    .unwrap();
    assert!(svg.contains("slope -0.3000"), "legend lacks the slope");

    // the same through the command line
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    std::fs::write(&csv, csv_table(&["time", "high_order"], &[&s, &e])).unwrap();
    let out = dir.path().join("fit.json");
    assert_eq!(run(&["decay-fit", "--input", csv.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let rate = json(&out)["fit"]["rate"].as_f64().unwrap();
    assert!((rate - 0.3).abs() < 1e-12);
    assert!(std::fs::read_to_string(dir.path().join("fit.svg")).unwrap().contains("slope -0.3000"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_homolog");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let ok = Command::new(bin).args(["profile", "--delta", "0", "--n", "1024", "--out"]).arg(&out).status().unwrap();
    assert_eq!(ok.code(), Some(0));
    let usage = Command::new(bin).args(["simulate", "--frame", "self-similar", "--delta", "0.1"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let unknown = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));
    let failed =
        Command::new(bin).args(["profile", "--delta", "-30", "--out"]).arg(dir.path().join("p.csv")).output().unwrap();
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("BelowDeltaStar"));
}
