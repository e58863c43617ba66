// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Cross-module checks: evolved states against the closed-form concurrence
//! expressions and against independently frozen steady-state values.

use entsim::coupling::CouplingRates;
use entsim::dynamics::{evolve, steady_state, DriveParams, EvolutionConfig, Generator};
use entsim::entanglement::{concurrence_recip, concurrence_unidir, wootters, ConcurrenceTrace};
use entsim::DensityMatrix;
use num_complex::Complex64;

#[test]
fn reciprocal_evolution_matches_the_closed_form_concurrence() {
    // Symmetric rates, one qubit excited: the evolved Wootters concurrence
    // must track the reciprocal closed form.
    let (g11, g12c, gs) = (1.0, 0.6, 0.5);
    let rates =
        CouplingRates::two_qubit([[g11, g12c], [g12c, g11]], [[0.0, gs], [gs, 0.0]]).unwrap();
    let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
    let cfg = EvolutionConfig::fixed(8.0, g11).unwrap();
    let traj = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg).unwrap();
    let mut worst = 0.0f64;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let num = wootters(state).unwrap();
        let ana = concurrence_recip(*t, g11, g12c, gs).unwrap();
        worst = worst.max((num - ana).abs());
    }
    assert!(worst < 1e-6, "worst deviation {worst:.3e}");
}

#[test]
fn unidirectional_evolution_peaks_where_the_closed_form_says() {
    let (g11, g21) = (1.0, 0.9);
    let rates = CouplingRates::two_qubit([[g11, 0.0], [g21, g11]], [[0.0; 2]; 2]).unwrap();
    let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
    let cfg = EvolutionConfig::fixed(8.0, g11).unwrap();
    let traj = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg).unwrap();
    let trace = ConcurrenceTrace::from_trajectory(&traj).unwrap();
    let mut worst = 0.0f64;
    for (t, c) in trace.t.iter().zip(&trace.c) {
        let ana = concurrence_unidir(*t, g11, g21, 0.0).unwrap();
        worst = worst.max((c - ana).abs());
    }
    assert!(worst < 1e-6, "worst deviation {worst:.3e}");
    let (t_max, c_max) = trace.max_point().unwrap();
    assert!((t_max * g11 - 1.0).abs() < 0.01, "peak at {t_max}");
    assert!((c_max - 0.9 / std::f64::consts::E).abs() < 1e-4);
}

#[test]
fn coherent_coupling_produces_rabi_nodes_at_the_expected_period() {
    // Purely coherent symmetric coupling: concurrence vanishes every
    // pi / (2 g12) and peaks in between.
    let (g11, gs) = (1.0, 2.5);
    let rates = CouplingRates::two_qubit([[g11, 0.0], [0.0, g11]], [[0.0, gs], [gs, 0.0]]).unwrap();
    let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
    let period = std::f64::consts::PI / (2.0 * gs);
    let cfg = EvolutionConfig::new(4.0 * period, 1e-4, entsim::Method::FixedRk4, 10).unwrap();
    let traj = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg).unwrap();
    let trace = ConcurrenceTrace::from_trajectory(&traj).unwrap();
    let mut worst = 0.0f64;
    for (t, c) in trace.t.iter().zip(&trace.c) {
        let ana = concurrence_recip(*t, g11, 0.0, gs).unwrap();
        worst = worst.max((c - ana).abs());
    }
    assert!(worst < 1e-6, "worst deviation {worst:.3e}");
    for k in 1..=4 {
        let node = k as f64 * period;
        // The trace minimum near a node lands on the recorded sample closest
        // to the zero; its value is bounded by the slope 2 g12 times half a
        // recording step.
        let (t_min, c_min) = trace
            .t
            .iter()
            .zip(&trace.c)
            .filter(|(t, _)| (**t - node).abs() < 0.45 * period)
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(t, c)| (*t, *c))
            .unwrap();
        assert!((t_min - node).abs() < 0.01 * node, "node {k} at {t_min}, expected {node}");
        assert!(c_min < 3e-3, "node {k}: C = {c_min}");
        let mid = node - 0.5 * period;
        let c_mid = trace
            .t
            .iter()
            .zip(&trace.c)
            .min_by(|a, b| (a.0 - mid).abs().partial_cmp(&(b.0 - mid).abs()).unwrap())
            .map(|(_, c)| *c)
            .unwrap();
        assert!(c_mid > 0.05, "antinode {k}: C = {c_mid}");
    }
}

#[test]
fn pumped_steady_state_concurrence_matches_frozen_values() {
    // Forward-coupled pair under equal resonant pumping; values frozen from
    // an independent null-space computation.
    let rates = CouplingRates::two_qubit([[1.0, 0.0], [0.9, 1.0]], [[0.0; 2]; 2]).unwrap();
    let cases = [
        (0.05, 0.05, 0.008694736169, 0.989987208),
        (0.2, 0.2, 0.083768133420, 0.858580736),
        (0.4, 0.4, 0.055690670280, 0.606453407),
        (0.8, 0.8, 0.0, 0.362955682),
        (0.12, 0.30, 0.016511431512, f64::NAN),
    ];
    for (o1, o2, c_want, rho11_want) in cases {
        let drive = DriveParams {
            omega1: Complex64::new(o1, 0.0),
            omega2: Complex64::new(o2, 0.0),
            delta_l: 0.0,
        };
        let ss = steady_state(Generator::Rates(&rates), &drive).unwrap();
        let c = wootters(&ss).unwrap();
        assert!((c - c_want).abs() < 1e-9, "omega ({o1}, {o2}): C = {c}");
        if rho11_want.is_finite() {
            assert!((ss.entry(0, 0).re - rho11_want).abs() < 1e-8);
        }
    }
}
