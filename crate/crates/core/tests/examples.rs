use phasebound::bounds::PriorDistribution;
use phasebound::estimator::{preset, simulate, EstimationReport, Policy, SimulationConfig};

fn run(name: &str, k: u32, m: u32, trials: usize, seed: u64) -> EstimationReport {
    let spec = preset(name, k, m, None).unwrap();
    let cfg = SimulationConfig {
        trials,
        seed,
        ..Default::default()
    };
    simulate(&spec, &PriorDistribution::Uniform2Pi, &cfg).unwrap().0
}

fn closed_form(r: &EstimationReport, name: &str) -> f64 {
    r.bounds.closed_forms.iter().find(|b| b.name == name).unwrap().value
}

/// `1/√(Σ_k M Δ_k²)`: the rms error allowed by the summed Fisher information
/// of the two-outcome fringes.
fn fisher_floor(k: u32, m: u32) -> f64 {
    let info: f64 = (0..k).map(|j| m as f64 * 4f64.powi(j as i32)).sum();
    info.sqrt().recip()
}

#[test]
fn linear_multipass_k6_m4() {
    let r = run("linear_multipass", 6, 4, 2000, 7);
    let bound = closed_form(&r, "linear_multipass");
    assert!(r.epsilon.value >= bound, "{} < {bound}", r.epsilon.value);
    assert!(r.epsilon.value >= r.bounds.error_lower);
    assert!(r.bounds.error_respects_bound);
}

#[test]
fn linear_multipass_k8_m8_sits_at_the_fisher_floor() {
    let r = run("linear_multipass", 8, 8, 4000, 1);
    let eps = r.epsilon.value;
    assert!(eps >= closed_form(&r, "linear_multipass"));
    assert!(eps >= r.bounds.error_lower);
    // the entropic bounds are not attained here; the gap is the Fisher limit
    let floor = fisher_floor(8, 8);
    assert!((2.38e-3..2.40e-3).contains(&floor));
    assert!(eps > 0.9 * floor && eps < 1.5 * floor, "eps {eps}, floor {floor}");
}

#[test]
fn fisher_floor_tracks_the_adaptive_scheme() {
    for (k, m) in [(5, 4), (6, 8)] {
        let r = run("linear_multipass", k, m, 3000, 3);
        let floor = fisher_floor(k, m);
        assert!(
            r.epsilon.value > 0.9 * floor && r.epsilon.value < 1.6 * floor,
            "K={k} M={m}: {}",
            r.epsilon.value
        );
    }
}

#[test]
fn no_measurement() {
    let r = run("none", 0, 1, 1000, 1);
    let target = std::f64::consts::PI / 3f64.sqrt();
    assert!((r.epsilon.value - target).abs() < 3.0 * r.epsilon.se);
    assert!((target - 1.8138).abs() < 1e-4);
}

#[test]
fn determinism_across_thread_pools() {
    let spec = preset("quadratic_iterative", 4, 3, None).unwrap();
    let cfg = SimulationConfig {
        trials: 700,
        seed: 42,
        mi_bins: Some(8),
        ..Default::default()
    };
    let prior = PriorDistribution::wrapped_gaussian(0.5, 1.0).unwrap();
    let go = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| simulate(&spec, &prior, &cfg).unwrap())
    };
    let (a, ra) = go(1);
    let (b, rb) = go(3);
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    let json_a = serde_json::to_string(&a).unwrap();
    let json_b = serde_json::to_string(&b).unwrap();
    assert_eq!(json_a, json_b);
}

#[test]
fn every_policy_respects_the_bounds() {
    for (name, policy) in [
        ("linear_multipass", Policy::Adaptive),
        ("linear_multipass", Policy::Slope),
        ("linear_multipass", Policy::Nonadaptive),
        ("linear_multipass", Policy::Bitwise),
        ("roy_iterative", Policy::Adaptive),
        ("quadratic_iterative", Policy::Adaptive),
    ] {
        let spec = preset(name, 5, 4, None).unwrap();
        let cfg = SimulationConfig {
            trials: 1000,
            seed: 5,
            policy,
            mi_bins: Some(8),
            ..Default::default()
        };
        let (r, _) = simulate(&spec, &PriorDistribution::Uniform2Pi, &cfg).unwrap();
        assert!(r.bounds.error_respects_bound, "{name} {policy:?}");
        assert_eq!(r.bounds.information_respects_bound, Some(true), "{name} {policy:?}");
        assert!(r.sandwich.holds(), "{name} {policy:?}: {:?}", r.sandwich);
    }
}
