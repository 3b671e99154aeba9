use homolog_core::homogeneous::*;
use homolog_core::profiles::solve_profile;

const TOL: f64 = 1e-12;

#[test]
fn self_similar_branch_matches_the_closed_form() {
    for (d, l0) in [(-0.5, 1.0), (-0.05, 1.0), (-0.3, 2.0)] {
        let p = HomogeneousParams::self_similar(d, l0);
        let tr = integrate_lambda(&p, 100.0, TOL).unwrap();
        let worst = tr
            .times
            .iter()
            .zip(&tr.lambda)
            .map(|(&t, &l)| ((l - self_similar_lambda(&p, t)) / l).abs())
            .fold(0.0, f64::max);
        println!("delta = {d}: max rel error {worst:e}, drift {:e}", tr.energy_drift());
        assert!(worst <= 1e-8);
        assert!(tr.energy_drift() <= 1e-10);
    }
}

#[test]
fn affine_expansion_is_linear() {
    let p = HomogeneousParams::new(0.0, 1.0, 1.0).unwrap();
    let tr = integrate_lambda(&p, 50.0, TOL).unwrap();
    for (&t, &l) in tr.times.iter().zip(&tr.lambda) {
        assert!((l - (1.0 + t)).abs() <= 1e-10 * (1.0 + t));
    }
}

#[test]
fn effective_energy_is_conserved() {
    for (d, l1) in [(0.5, 0.0), (1.0, -0.3), (-0.5, 2.0), (-0.5, 0.3), (-0.2, -1.0), (0.0, 3.0)] {
        let p = HomogeneousParams::new(d, 1.0, l1).unwrap();
        let tr = integrate_lambda(&p, 30.0, TOL).unwrap();
        assert!(tr.energy_drift() <= 1e-10, "({d}, {l1}): {:e}", tr.energy_drift());
    }
}

#[test]
fn collapse_exponent_is_two_thirds() {
    for d in [-0.1, -0.5, -2.0] {
        for l1 in [-1.5, -0.5, 0.0, 0.4] {
            let p = HomogeneousParams::new(d, 1.0, l1).unwrap();
            let c = classify(&p);
            assert!(c.kind.is_collapsing(), "({d}, {l1}) -> {:?}", c.kind);
            let tr = integrate_lambda(&p, 1e3, TOL).unwrap();
            let t_c = tr.collapse_time.expect("collapses");
            let exact = c.collapse_time.unwrap();
            assert!((t_c - exact).abs() <= 1e-8 * exact, "T = {t_c} vs {exact}");
            let r = fit_asymptotics(&tr, c.kind).unwrap();
            assert!((0.64..=0.70).contains(&r.exponent), "({d}, {l1}): exponent {}", r.exponent);
        }
    }
}

#[test]
fn linear_collapse_at_zero_delta_has_unit_exponent() {
    let p = HomogeneousParams::new(0.0, 1.0, -1.0).unwrap();
    let tr = integrate_lambda(&p, 10.0, TOL).unwrap();
    assert!((tr.collapse_time.unwrap() - 1.0).abs() < 1e-10);
    let r = fit_asymptotics(&tr, ClassKind::LinearCollapse).unwrap();
    assert!((r.exponent - 1.0).abs() < 1e-6);
}

#[test]
fn expansion_asymptotics() {
    let p = HomogeneousParams::self_similar(-0.5, 1.0);
    let tr = integrate_lambda(&p, 100.0, TOL).unwrap();
    let r = fit_asymptotics(&tr, ClassKind::SelfSimilarExpansion).unwrap();
    assert!((r.exponent - 2.0 / 3.0).abs() < 0.02, "{}", r.exponent);

    let p = HomogeneousParams::new(1.0, 1.0, 0.0).unwrap();
    let tr = integrate_lambda(&p, 1e4, TOL).unwrap();
    let r = fit_asymptotics(&tr, ClassKind::LinearExpansion).unwrap();
    // λ̇ → √e from below
    assert!((r.limit_velocity - effective_energy(&p).sqrt()).abs() < 0.02);
    // the fitted asymptotic slope c₁c₂ is the same limiting speed
    assert!((r.c1 * r.c2 - effective_energy(&p).sqrt()).abs() < 0.02, "slope {}", r.c1 * r.c2);
}

#[test]
fn self_similar_frame_grows_exponentially() {
    for d in [-0.02, -0.05, -0.5] {
        let p = HomogeneousParams::self_similar(d, 1.0);
        let b = -(2.0 * d.abs()).sqrt();
        let tr = integrate_lambda(&p, 200.0, TOL).unwrap();
        let m = reparam_time(&tr, Frame::SelfSimilar).unwrap();
        let worst = m.sigma.iter().zip(&m.lambda).map(|(&s, &l)| ((l - (-b * s).exp()) / l).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-6, "delta = {d}: {worst:e}");
    }
}

#[test]
fn linear_rate_frame_asymptotics_and_envelope() {
    for (d, l1) in [(0.1, 0.5), (0.5, 1.0), (-0.02, 1.0), (0.0, 1.0), (1.0, 0.0)] {
        let p = HomogeneousParams::new(d, 1.0, l1).unwrap();
        let tr = integrate_lambda(&p, 2e4, TOL).unwrap();
        let m = reparam_time(&tr, Frame::LinearRate).unwrap();
        let n = m.sigma.len();
        let (s1, l1v) = (m.sigma[n - 1], m.lambda[n - 1].ln());
        let (s0, l0v) = (m.sigma[n / 2], m.lambda[n / 2].ln());
        let rate = (l1v - l0v) / (s1 - s0);
        let bt = effective_energy(&p).sqrt();
        assert!((rate - bt).abs() < 0.05 * bt, "({d}, {l1}): rate {rate} vs {bt}");
        let (lo, hi) = exponential_envelope(&p, &m);
        assert!(lo > 0.1 && hi < 10.0, "({d}, {l1}): envelope [{lo}, {hi}]");
    }
}

#[test]
fn classification_is_scale_invariant() {
    for &(d, l0, l1) in &[(-0.5, 1.0, 1.0), (-0.5, 1.0, 0.2), (-0.3, 2.0, -2.0), (0.2, 1.0, -0.1), (0.0, 1.0, 0.0)] {
        let base = classify(&HomogeneousParams::new(d, l0, l1).unwrap()).kind;
        for a in [0.25, 3.0, 10.0] {
            let scaled = HomogeneousParams { delta: d, lambda0: a * l0, lambda1: l1 / a.sqrt() };
            assert_eq!(classify(&scaled).kind, base, "a = {a}");
        }
    }
}

#[test]
fn homogeneous_energy_signs() {
    let prof = solve_profile(-0.5, 1e-12).unwrap();
    let ss = HomogeneousParams::self_similar(prof.delta, 1.0);
    assert!(physical_energy(&ss, &prof).unwrap().abs() < 1e-12);
    let lin = HomogeneousParams { lambda1: 2.0, ..ss };
    assert!(physical_energy(&lin, &prof).unwrap() > 0.0);
    let prof0 = solve_profile(0.0, 1e-12).unwrap();
    let e1 = physical_energy(&HomogeneousParams::new(0.0, 1.0, 0.7).unwrap(), &prof0).unwrap();
    let e2 = physical_energy(&HomogeneousParams::new(0.0, 1.0, 1.4).unwrap(), &prof0).unwrap();
    assert!((e2 / e1 - 4.0).abs() < 1e-14);
    assert!(matches!(physical_energy(&ss, &prof0), Err(HomogeneousError::DeltaMismatch { .. })));
}

#[test]
fn bifurcation_scan_matches_the_diagram() {
    let map = bifurcation_scan((-1.0, 1.0), (-2.0, 2.0), 1.0, (41, 41)).unwrap();
    let i0 = map.deltas.iter().position(|&d| d == 0.0).unwrap();
    let j0 = map.lambda1s.iter().position(|&l| l == 0.0).unwrap();
    assert_eq!(map.kinds[j0][i0], ClassKind::LaneEmdenSteady);
    for (j, row) in map.kinds.iter().enumerate() {
        for (i, k) in row.iter().enumerate() {
            if map.deltas[i] > 0.0 {
                assert!(k.is_expanding(), "({}, {}) -> {k:?}", map.deltas[i], map.lambda1s[j]);
            }
        }
    }
    for &(d, l1) in &map.parabola {
        if d < 0.0 {
            let k = classify(&HomogeneousParams { delta: d, lambda0: 1.0, lambda1: l1 }).kind;
            assert_eq!(k, ClassKind::SelfSimilarExpansion);
        }
    }
}
