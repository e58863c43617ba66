// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Coupling-rate construction: absolute and normalized rate matrices, the
//! rotating-wave sanity check and, for the interface source, the full
//! normalized profile along the surface.

use std::path::Path;

use serde::Serialize;

use entsim::coupling::rwa_check;
use entsim::greens2d::normalized_rates_profile;

use crate::error::Result;
use crate::output::{self, fmt_f, CsvWriter, RunRecord};
use crate::scenario::{linspace, RateMeta, Scenario};

#[derive(Serialize)]
struct RatesDoc {
    scenario_name: String,
    scenario_hash: String,
    tool_version: String,
    /// Row-major 2x2 dissipative and coherent rate matrices (rad/s).
    gamma_rad_s: [[f64; 2]; 2],
    g_rad_s: [[f64; 2]; 2],
    gamma_tilde: [[f64; 2]; 2],
    g_tilde: [[f64; 2]; 2],
    rwa_ok: bool,
    rwa_max_ratio: f64,
    rwa_threshold: f64,
    meta: RateMeta,
}

pub fn run_rates(scenario: &Scenario, out_dir: &Path) -> Result<()> {
    output::ensure_out_dir(out_dir)?;
    let mut record = RunRecord::new(&scenario.file.name, &scenario.hash, "rates");

    let units = scenario.units()?;
    let built = scenario.build_rates(&units)?;
    let rwa = rwa_check(&built.rates, units.omega0);
    let g11 = built.rates.gamma[[0, 0]];

    let mut csv = CsvWriter::create(
        &out_dir.join("rates.csv"),
        &scenario.hash,
        &["i", "j", "gamma_rad_s", "g_rad_s", "gamma_tilde", "g_tilde"],
    );
    for i in 0..2 {
        for j in 0..2 {
            let gamma = built.rates.gamma[[i, j]];
            let g = built.rates.g[[i, j]];
            csv.row(&[
                (i + 1).to_string(),
                (j + 1).to_string(),
                fmt_f(gamma),
                fmt_f(g),
                fmt_f(gamma / g11),
                fmt_f(g / g11),
            ]);
        }
    }
    record.outputs.push("rates.csv".to_owned());
    csv.finish()?;

    let pick = |m: &ndarray::Array2<f64>, s: f64| {
        [[m[[0, 0]] / s, m[[0, 1]] / s], [m[[1, 0]] / s, m[[1, 1]] / s]]
    };
    let doc = RatesDoc {
        scenario_name: scenario.file.name.clone(),
        scenario_hash: scenario.hash.clone(),
        tool_version: output::TOOL_VERSION.to_owned(),
        gamma_rad_s: pick(&built.rates.gamma, 1.0),
        g_rad_s: pick(&built.rates.g, 1.0),
        gamma_tilde: pick(&built.rates.gamma, g11),
        g_tilde: pick(&built.rates.g, g11),
        rwa_ok: rwa.ok,
        rwa_max_ratio: rwa.max_ratio,
        rwa_threshold: rwa.threshold,
        meta: built.meta.clone(),
    };
    let json_path = out_dir.join("rates.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&doc)?)
        .map_err(|e| crate::error::CliError::Io(format!("{}: {e}", json_path.display())))?;
    record.outputs.push("rates.json".to_owned());

    if scenario.file.rates.source == "greens2d" {
        let geom = scenario.interface_geometry(&units)?;
        let grid = &scenario.file.grid;
        let xs = linspace(
            grid.x_min.length(&units)?,
            grid.x_max.length(&units)?,
            grid.points,
        )?;
        let profile = normalized_rates_profile(&geom, &xs, units.omega0)?;
        let lam0 = units.lam0();
        let mut csv = CsvWriter::create(
            &out_dir.join("profile.csv"),
            &scenario.hash,
            &["x_m", "x_over_lam0", "gamma_tilde", "g_tilde"],
        );
        for (idx, &x) in profile.x.iter().enumerate() {
            csv.row(&[
                fmt_f(x),
                fmt_f(x / lam0),
                fmt_f(profile.gamma_ratio[idx]),
                fmt_f(profile.g_ratio[idx]),
            ]);
        }
        record.outputs.push("profile.csv".to_owned());
        csv.finish()?;
    }

    record.rate_meta = Some(built.meta.clone());
    if !rwa.ok {
        record.notes.push(format!(
            "rwa_check failed: max_ratio {} above threshold {}",
            rwa.max_ratio, rwa.threshold
        ));
    }
    record.write(out_dir)?;

    println!(
        "rates ({}): gamma_tilde_21 = {}, g_tilde_21 = {}, rwa ok = {}",
        built.meta.source, built.meta.gamma_tilde_21, built.meta.g_tilde_21, rwa.ok
    );
    Ok(())
}
