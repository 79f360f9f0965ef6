use capture_core::closed_form::InitialConditions;
use capture_core::oracle::{
    classify_fate, find_xc_bisection, find_xc_in, integrate, trace_separatrix, Direction, Fate, IntegratorConfig,
    PhaseState,
};
use capture_core::rational::to_f64;
use capture_core::{CoefficientTable, SeparatrixExpansion};

#[test]
fn fate_switches_once_along_the_rest_locus() {
    let cfg = IntegratorConfig::default();
    let fates: Vec<Fate> = (0..50)
        .map(|i| 0.02 + 1.48 * i as f64 / 49.0)
        .map(|x0| classify_fate(InitialConditions::at_rest(x0), &cfg).unwrap().fate)
        .collect();
    assert!(!fates.contains(&Fate::Undecided));
    let switch = fates.iter().position(|&f| f == Fate::Capture).unwrap();
    assert!(fates[..switch].iter().all(|&f| f == Fate::Escape));
    assert!(fates[switch..].iter().all(|&f| f == Fate::Capture));
}

#[test]
fn trace_and_bisection_agree() {
    let cfg = IntegratorConfig::default();
    let trace = trace_separatrix(1e-6, &cfg).unwrap();
    let bisect = find_xc_bisection(&cfg, 1e-8).unwrap();
    assert!((trace.xc - bisect.xc).abs() < 1e-7, "{} vs {}", trace.xc, bisect.xc);
    assert!(bisect.lo <= trace.xc + 1e-8 && trace.xc - 1e-8 <= bisect.hi);
}

#[test]
fn tightening_tolerances_stays_within_estimate() {
    let cfg = IntegratorConfig::default();
    let trace = trace_separatrix(1e-6, &cfg).unwrap();
    for factor in [1e-1, 1e-2] {
        let tight = trace_separatrix(1e-6, &cfg.scale_tolerances(factor)).unwrap();
        assert!(
            (trace.xc - tight.xc).abs() <= trace.error_estimate,
            "factor {factor}: shift {} vs estimate {}",
            (trace.xc - tight.xc).abs(),
            trace.error_estimate
        );
    }
    assert!(trace.error_estimate < 1e-7);
}

#[test]
fn smaller_seed_moves_crossing_by_seeding_error() {
    // The two-term seed is off the separatrix by O(δ³).
    let cfg = IntegratorConfig::default();
    let a = trace_separatrix(1e-4, &cfg).unwrap();
    let b = trace_separatrix(1e-6, &cfg).unwrap();
    assert!((a.xc - b.xc).abs() < 1e-8);
}

#[test]
fn traced_curve_matches_series_near_origin() {
    // Independent check of the oracle: where the series converges well, the
    // numerical separatrix and the exact expansion must coincide.
    let cfg = IntegratorConfig::default();
    let trace = trace_separatrix(1e-6, &cfg).unwrap();
    let sep = SeparatrixExpansion::new(30);
    let b: Vec<f64> = CoefficientTable::generate(30).coeffs().iter().map(to_f64).collect();
    let mut checked = 0;
    for s in &trace.polyline {
        let z = trace.delta * (-s.t).exp();
        if z > 0.05 && z < 0.15 {
            let (x, u) = sep.eval_f64(z).unwrap();
            assert!((x - s.x).abs() < 1e-8, "z = {z}: {x} vs {}", s.x);
            assert!((u - s.u).abs() < 1e-8, "z = {z}: {u} vs {}", s.u);
            // Same curve regardless of parametrisation: solve x(z) = s.x.
            let (mut lo, mut hi) = (0.0, 0.3);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if eval_series(&b, mid).0 < s.x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (_, u_on_curve) = eval_series(&b, 0.5 * (lo + hi));
            assert!((u_on_curve - s.u).abs() < 1e-10, "x = {}: {u_on_curve} vs {}", s.x, s.u);
            checked += 1;
        }
    }
    assert!(checked > 3);
}

/// `x = Σ B_n (-1)^n z^{n+1}` and `u = -z dx/dz` in floating point.
fn eval_series(b: &[f64], z: f64) -> (f64, f64) {
    let (mut x, mut u) = (0.0, 0.0);
    for (n, &bn) in b.iter().enumerate().rev() {
        let c = if n % 2 == 0 { bn } else { -bn };
        x = x * z + c;
        u = u * z - c * (n + 1) as f64;
    }
    (x * z, u * z)
}

#[test]
fn escaping_trajectories_eventually_decrease() {
    let cfg = IntegratorConfig {
        t_max: 60.0,
        ..Default::default()
    };
    for &(x0, u0) in &[(0.5, 0.1), (0.3, 0.2), (0.55, -0.3), (0.1, 0.0)] {
        let fate = classify_fate(InitialConditions::new(x0, u0), &cfg).unwrap();
        assert_eq!(fate.fate, Fate::Escape, "({x0}, {u0})");
        let traj = integrate(PhaseState::new(0.0, x0, u0), &cfg, Direction::Forward).unwrap();
        let peak = traj
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.x.total_cmp(&b.1.x))
            .unwrap()
            .0;
        let tail = &traj.samples[peak..];
        assert!(tail.windows(2).all(|w| w[1].x <= w[0].x), "({x0}, {u0})");
        assert!(tail.iter().all(|s| s.x > 0.0));
    }
}

#[test]
fn release_above_threshold_is_captured_quickly() {
    let cfg = IntegratorConfig::default();
    let r = classify_fate(InitialConditions::at_rest(0.62), &cfg).unwrap();
    assert_eq!(r.fate, Fate::Capture);
    let r = classify_fate(InitialConditions::at_rest(0.59), &cfg).unwrap();
    assert_eq!(r.fate, Fate::Escape);
}

#[test]
fn undecided_probe_is_an_error_in_bisection() {
    let cfg = IntegratorConfig {
        t_max: 1e-3,
        ..Default::default()
    };
    assert!(find_xc_in(0.5, 0.7, &cfg, 1e-3).is_err());
}

#[test]
fn backward_integration_retraces_forward() {
    let cfg = IntegratorConfig {
        t_max: 3.0,
        ..Default::default()
    };
    let fwd = integrate(PhaseState::new(0.0, 0.4, -0.1), &cfg, Direction::Forward).unwrap();
    let end = *fwd.samples.last().unwrap();
    let back = integrate(end, &cfg, Direction::Backward).unwrap();
    let start = back.samples.last().unwrap();
    assert!((start.t).abs() < 1e-12);
    assert!((start.x - 0.4).abs() < 1e-8 && (start.u + 0.1).abs() < 1e-8);
}
