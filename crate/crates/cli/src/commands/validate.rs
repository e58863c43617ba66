// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parse and cross-check a scenario without running any evolution or field
//! scans. Writes nothing; prints one line per check.

use entsim::coupling::rwa_check;
use entsim::materials::{passivity_check, permittivity};

use crate::error::Result;
use crate::scenario::Scenario;

pub fn run_validate(scenario: &Scenario) -> Result<()> {
    println!("scenario {} ({})", scenario.file.name, &scenario.hash[..12]);

    let units = scenario.units()?;
    println!(
        "  units: omega0 = {} rad/s, gamma11 = {} rad/s",
        units.omega0, units.gamma11
    );

    let [x1, x2] = scenario.positions(&units)?;
    println!("  qubits: x1 = {x1} m, x2 = {x2} m (separation {} m)", x2 - x1);

    if scenario.file.materials.is_some() {
        let plasma = scenario.plasma(&units)?;
        let tensor = permittivity(&plasma, units.omega0)?;
        let report = passivity_check(&tensor)?;
        println!(
            "  materials: e11 = {}, e12 = {}, e33 = {}, passive = {}",
            tensor.e11, tensor.e12, tensor.e33, report.passive
        );
        scenario.opaque()?;
    }

    let built = scenario.build_rates(&units)?;
    println!(
        "  rates ({}): gamma_tilde_21 = {}, g_tilde_21 = {}, gamma_tilde_12 = {}, g_tilde_12 = {}",
        built.meta.source,
        built.meta.gamma_tilde_21,
        built.meta.g_tilde_21,
        built.meta.gamma_tilde_12,
        built.meta.g_tilde_12
    );

    let rwa = rwa_check(&built.rates, units.omega0);
    println!(
        "  rwa_check: ok = {} (max_ratio = {}, threshold = {})",
        rwa.ok, rwa.max_ratio, rwa.threshold
    );

    scenario.drive(&units)?;
    scenario.initial_state()?;
    let cfg = scenario.evolution_config(&units)?;
    println!(
        "  evolution: t_end = {} s, dt = {} s, stride = {}",
        cfg.t_end, cfg.dt, cfg.record_stride
    );

    println!("  ok");
    Ok(())
}
