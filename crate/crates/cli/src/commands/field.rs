// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Field scan along the interface: total, pole-residue and incident parts of
//! the out-of-plane magnetic field on an x grid, with per-point quadrature
//! error estimates.

use std::path::Path;

use entsim::greens2d::field_profile;

use crate::error::Result;
use crate::output::{self, fmt_f, CsvWriter, RunRecord};
use crate::scenario::{linspace, Scenario};

pub fn run_field(scenario: &Scenario, out_dir: &Path) -> Result<()> {
    output::ensure_out_dir(out_dir)?;
    let mut record = RunRecord::new(&scenario.file.name, &scenario.hash, "field");

    let units = scenario.units()?;
    let geom = scenario.interface_geometry(&units)?;
    let omega = scenario.probe_omega(&units)?;
    let grid = &scenario.file.grid;
    let xs = linspace(
        grid.x_min.length(&units)?,
        grid.x_max.length(&units)?,
        grid.points,
    )?;
    let y = match &grid.y {
        Some(q) => q.length(&units)?,
        None => geom.source_height,
    };

    let profile = field_profile(&geom, &xs, y, omega, grid.rel_tol)?;

    // A point is flagged when its error estimate exceeds the requested
    // relative tolerance against the field scale of the whole scan.
    let scale = profile
        .hz_total
        .iter()
        .map(|h| h.norm())
        .fold(0.0f64, f64::max);
    let tol = grid.rel_tol * scale;
    let lam0 = units.lam0();

    let mut csv = CsvWriter::create(
        &out_dir.join("field.csv"),
        &scenario.hash,
        &[
            "x_m",
            "x_over_lam0",
            "hz_total_re",
            "hz_total_im",
            "hz_residue_re",
            "hz_residue_im",
            "hz_incident_re",
            "hz_incident_im",
            "quad_abs_error",
            "flagged",
        ],
    );
    let mut flagged = 0usize;
    for (idx, &x) in profile.x.iter().enumerate() {
        let bad = profile.quad_abs_error[idx] > tol;
        flagged += bad as usize;
        csv.row(&[
            fmt_f(x),
            fmt_f(x / lam0),
            fmt_f(profile.hz_total[idx].re),
            fmt_f(profile.hz_total[idx].im),
            fmt_f(profile.hz_residue[idx].re),
            fmt_f(profile.hz_residue[idx].im),
            fmt_f(profile.hz_incident[idx].re),
            fmt_f(profile.hz_incident[idx].im),
            fmt_f(profile.quad_abs_error[idx]),
            (bad as u8).to_string(),
        ]);
    }
    record.outputs.push("field.csv".to_owned());
    csv.finish()?;

    if flagged > 0 {
        record.notes.push(format!(
            "{flagged} of {} points exceeded the quadrature tolerance",
            xs.len()
        ));
    }
    record.write(out_dir)?;

    println!(
        "field: {} points at y = {} m, {} flagged",
        xs.len(),
        y,
        flagged
    );
    Ok(())
}
