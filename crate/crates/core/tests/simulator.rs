use ellg::coupled::{constraint_residual, embed};
use ellg::geometry::dot;
use ellg::simulator::{
    check_energy_bound, initialize, mumag_m0, run, run_from, Discretization, InitialData, SimConfig,
};
use ellg::Error;

fn uniform(n: usize, t: f64, k: f64) -> SimConfig {
    SimConfig { init: InitialData::Uniform, ..SimConfig::new(n, t, k) }
}

#[test]
fn initial_magnetization_examples() {
    assert_eq!(mumag_m0([0.5, 0.5, 0.5]), [0.0, 0.0, 1.0]);
    assert_eq!(mumag_m0([0.0, 0.0, 0.0]), [0.0, 0.0, -1.0]);
    let m = mumag_m0([0.6, 0.45, 0.1]);
    assert!((dot(m, m) - 1.0).abs() < 1e-14);
}

#[test]
fn initial_pair_is_admissible() {
    let disc = Discretization::new(3, 4).unwrap();
    let cfg = SimConfig::new(3, 0.1, 0.1);
    let s = initialize(&cfg, &disc).unwrap();
    let (h, l) = embed(&s.x, &disc.space).unwrap();
    assert!(constraint_residual(&h, &l, &disc.space).unwrap() <= 1e-14);
    assert!(s.m.values.iter().all(|&v| (dot(v, v) - 1.0).abs() < 1e-14));
}

#[test]
fn uniform_state_is_stationary() {
    let out = run(&uniform(2, 0.05, 0.01)).unwrap();
    assert!(out.state.m.values.iter().all(|&v| v == [0.0, 0.0, 1.0]));
    assert!(out.state.x.coeffs.iter().all(|&c| c == 0.0));
    let d = &out.diagnostics;
    assert_eq!(d.records.len(), 6);
    assert!(d.records.iter().all(|r| r.grad_m_l2 == 0.0 && r.h_l2 == 0.0));
    for e in &d.energy {
        assert_eq!(e.increments, 0.0);
        assert_eq!(e.velocity, 0.0);
        assert_eq!(e.exchange, d.energy[0].exchange);
    }
}

#[test]
fn runs_are_bitwise_deterministic() {
    let cfg = SimConfig::new(2, 0.03, 0.01);
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.diagnostics, b.diagnostics);
    assert_eq!(a.state, b.state);
}

#[test]
fn magnitude_ledger_telescopes() {
    let cfg = SimConfig::new(2, 0.05, 0.01);
    let disc = Discretization::new(2, 4).unwrap();
    let s0 = initialize(&cfg, &disc).unwrap();
    let mut worst_constraint = 0.0f64;
    let out = run_from(&cfg, &disc, s0, |s, _| {
        let (h, l) = embed(&s.x, &disc.space).unwrap();
        worst_constraint = worst_constraint.max(constraint_residual(&h, &l, &disc.space).unwrap());
    })
    .unwrap();
    assert!(worst_constraint <= 1e-12);
    let ledger = &out.diagnostics.magnitude_ledger;
    for (z, v) in out.state.m.values.iter().enumerate() {
        assert!((dot(*v, *v) - 1.0 - ledger[z]).abs() <= 1e-10);
    }
    let rec = out.diagnostics.records.last().unwrap();
    let max_ledger = ledger.iter().cloned().fold(0.0, f64::max);
    assert!((rec.max_m_norm.powi(2) - 1.0 - max_ledger).abs() <= 1e-10);
}

#[test]
fn energy_bound_for_both_theta_regimes() {
    for theta in [1.0, 0.6] {
        let cfg = SimConfig { theta, energy_cap: Some(1e4), ..SimConfig::new(2, 0.1, 0.01) };
        let out = run(&cfg).unwrap();
        let rep = out.energy.unwrap();
        assert!(rep.passed);
        let again = check_energy_bound(&out.diagnostics, 1e4);
        assert_eq!(again, rep);
    }
}

#[test]
fn energy_cap_violation_is_reported() {
    let cfg = SimConfig { energy_cap: Some(1.0), ..SimConfig::new(2, 0.02, 0.01) };
    assert!(matches!(run(&cfg), Err(Error::EnergyBound { .. })));
}

#[test]
fn invalid_configs_rejected() {
    assert!(SimConfig::new(2, 0.1, 0.03).validate().is_err());
    assert!(SimConfig { theta: 1.2, ..SimConfig::new(2, 0.1, 0.01) }.validate().is_err());
    assert!(SimConfig::new(0, 0.1, 0.01).validate().is_err());
}

#[test]
fn record_count_is_steps_plus_one() {
    let out = run(&uniform(1, 0.1, 0.025)).unwrap();
    assert_eq!(out.diagnostics.records.len(), 5);
    assert_eq!(out.diagnostics.energy.len(), 5);
    assert!((out.diagnostics.records[4].t - 0.1).abs() < 1e-15);
}
