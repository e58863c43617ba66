// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dispersion scan: bulk TE/TM wavenumbers of the magnetized plasma and all
//! surface-wave poles of the interface, per probe frequency. A frequency
//! where either computation fails produces a flagged row instead of
//! aborting the scan.

use std::path::Path;

use entsim::greens2d::{default_search_window, find_spp_poles};
use entsim::materials::bulk_wavenumbers;

use crate::error::Result;
use crate::output::{self, fmt_f, CsvWriter, RunRecord};
use crate::scenario::{linspace, Scenario};

pub fn run_dispersion(scenario: &Scenario, out_dir: &Path) -> Result<()> {
    output::ensure_out_dir(out_dir)?;
    let mut record = RunRecord::new(&scenario.file.name, &scenario.hash, "dispersion");

    let units = scenario.units()?;
    let plasma = scenario.plasma(&units)?;
    let geom = scenario.interface_geometry(&units)?;
    let d = &scenario.file.dispersion;
    let omegas = linspace(
        d.omega_min.angular(&units)?,
        d.omega_max.angular(&units)?,
        d.points,
    )?;
    if omegas[0] <= 0.0 {
        return Err(crate::error::CliError::validation(
            "dispersion: frequencies must be positive",
        ));
    }

    let mut disp = CsvWriter::create(
        &out_dir.join("dispersion.csv"),
        &scenario.hash,
        &[
            "omega_rad_s",
            "omega_over_w0",
            "k_te_re",
            "k_te_im",
            "k_tm_re",
            "k_tm_im",
            "n_poles",
            "flagged",
        ],
    );
    let mut poles_csv = CsvWriter::create(
        &out_dir.join("poles.csv"),
        &scenario.hash,
        &[
            "omega_rad_s",
            "omega_over_w0",
            "kx_re",
            "kx_im",
            "residue_re",
            "residue_im",
            "direction",
        ],
    );

    let mut failures = 0usize;
    let mut total_poles = 0usize;
    for &omega in &omegas {
        let bulk = bulk_wavenumbers(&plasma, omega);
        let poles = find_spp_poles(&geom, omega, &default_search_window(omega));
        let flagged = bulk.is_err() || poles.is_err();
        failures += flagged as usize;

        let (k_te, k_tm) = bulk.unwrap_or((
            num_complex::Complex64::new(f64::NAN, f64::NAN),
            num_complex::Complex64::new(f64::NAN, f64::NAN),
        ));
        let pole_list = poles.unwrap_or_default();
        total_poles += pole_list.len();

        disp.row(&[
            fmt_f(omega),
            fmt_f(omega / units.omega0),
            fmt_f(k_te.re),
            fmt_f(k_te.im),
            fmt_f(k_tm.re),
            fmt_f(k_tm.im),
            pole_list.len().to_string(),
            (flagged as u8).to_string(),
        ]);
        for p in &pole_list {
            poles_csv.row(&[
                fmt_f(omega),
                fmt_f(omega / units.omega0),
                fmt_f(p.kx.re),
                fmt_f(p.kx.im),
                fmt_f(p.residue.re),
                fmt_f(p.residue.im),
                p.direction.to_string(),
            ]);
        }
    }
    record.outputs.push("dispersion.csv".to_owned());
    disp.finish()?;
    record.outputs.push("poles.csv".to_owned());
    poles_csv.finish()?;

    if failures > 0 {
        record
            .notes
            .push(format!("{failures} of {} frequencies flagged", omegas.len()));
    }
    record.write(out_dir)?;

    println!(
        "dispersion: {} frequencies, {} poles, {} flagged",
        omegas.len(),
        total_poles,
        failures
    );
    Ok(())
}
