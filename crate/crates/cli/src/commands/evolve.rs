// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation evolution: density-matrix trajectory, the concurrence
//! trace and, when the rates are one way and undriven from the right-excited
//! state, the closed-form comparison curve.

use std::path::Path;

use entsim::dynamics::{analytic_unidirectional, evolve};
use entsim::entanglement::{concurrence_unidir, ConcurrenceTrace};
use entsim::{DensityMatrix, Generator, Trajectory};

use crate::error::Result;
use crate::output::{self, fmt_f, CsvWriter, RunRecord, StatsRecord};
use crate::scenario::{BuiltRates, Scenario};

pub fn run_evolve(scenario: &Scenario, out_dir: &Path) -> Result<()> {
    output::ensure_out_dir(out_dir)?;
    let mut record = RunRecord::new(&scenario.file.name, &scenario.hash, "evolve");

    let units = scenario.units()?;
    let built = scenario.build_rates(&units)?;
    let drive = scenario.drive(&units)?;
    let rho0 = scenario.initial_state()?;
    let cfg = scenario.evolution_config(&units)?;

    let traj = match evolve(&rho0, Generator::Rates(&built.rates), &drive, &cfg) {
        Ok(t) => t,
        Err(e) => {
            record.failed = Some(e.to_string());
            record.rate_meta = Some(built.meta.clone());
            record.write(out_dir)?;
            return Err(e.into());
        }
    };

    write_trajectory(&out_dir.join("trajectory.csv"), &scenario.hash, &traj)?;
    record.outputs.push("trajectory.csv".to_owned());

    let trace = ConcurrenceTrace::from_trajectory(&traj)?;
    let mut csv = CsvWriter::create(
        &out_dir.join("concurrence.csv"),
        &scenario.hash,
        &["t_s", "concurrence", "source"],
    );
    for (t, c) in trace.t.iter().zip(&trace.c) {
        csv.row(&[fmt_f(*t), fmt_f(*c), trace.source.tag().to_owned()]);
    }
    record.outputs.push("concurrence.csv".to_owned());
    csv.finish()?;

    if let Some(max) = trace.max_point() {
        record
            .notes
            .push(format!("max concurrence {} at t = {} s", max.1, max.0));
    }

    if unidirectional_comparison_applies(scenario, &built, &drive, &rho0) {
        let gamma11 = built.rates.gamma[[0, 0]];
        let gamma21 = built.rates.gamma[[1, 0]];
        let g21 = built.rates.g[[1, 0]];
        let mut worst = 0.0f64;
        let mut csv = CsvWriter::create(
            &out_dir.join("analytic.csv"),
            &scenario.hash,
            &["t_s", "concurrence_analytic", "source"],
        );
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let reference = analytic_unidirectional(*t, gamma11, gamma21, g21)?;
            let diff = &state.matrix() - &reference.matrix();
            let dev = diff.iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(dev);
            csv.row(&[
                fmt_f(*t),
                fmt_f(concurrence_unidir(*t, gamma11, gamma21, g21)?),
                "analytic_unidir".to_owned(),
            ]);
        }
        record.outputs.push("analytic.csv".to_owned());
        csv.finish()?;
        record
            .notes
            .push(format!("max deviation from analytic solution: {worst}"));
    }

    record.stats = Some(StatsRecord::from(&traj.stats));
    record.rate_meta = Some(built.meta.clone());
    record.write(out_dir)?;

    println!(
        "evolve: {} samples over {} s, max concurrence {}",
        traj.len(),
        cfg.t_end,
        trace.max_point().map(|p| p.1).unwrap_or(0.0)
    );
    Ok(())
}

/// The closed-form curve holds for an undriven one-way chain with equal
/// self rates, started from the right-excited product state.
fn unidirectional_comparison_applies(
    scenario: &Scenario,
    built: &BuiltRates,
    drive: &entsim::DriveParams,
    rho0: &DensityMatrix,
) -> bool {
    let r = &built.rates;
    let state4 = match DensityMatrix::basis_state(4, 3) {
        Ok(s) => s,
        Err(_) => return false,
    };
    let same_initial = (&rho0.matrix() - &state4.matrix())
        .iter()
        .all(|z| z.norm() < 1e-12);
    drive.is_zero()
        && scenario.file.initial.state != "custom"
        && same_initial
        && r.gamma[[0, 1]] == 0.0
        && r.g[[0, 1]] == 0.0
        && (r.gamma[[1, 1]] - r.gamma[[0, 0]]).abs() < 1e-12 * r.gamma[[0, 0]]
}

fn write_trajectory(path: &Path, hash: &str, traj: &Trajectory) -> Result<()> {
    let mut header: Vec<String> = vec!["t_s".to_owned()];
    for i in 1..=4 {
        for j in 1..=4 {
            header.push(format!("rho_re_{i}{j}"));
            header.push(format!("rho_im_{i}{j}"));
        }
    }
    for i in 1..=4 {
        header.push(format!("pop{i}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = CsvWriter::create(path, hash, &header_refs);
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let mut row = Vec::with_capacity(header.len());
        row.push(fmt_f(*t));
        let m = state.matrix();
        for i in 0..4 {
            for j in 0..4 {
                row.push(fmt_f(m[[i, j]].re));
                row.push(fmt_f(m[[i, j]].im));
            }
        }
        for p in state.populations() {
            row.push(fmt_f(p));
        }
        csv.row(&row);
    }
    csv.finish()?;
    Ok(())
}
