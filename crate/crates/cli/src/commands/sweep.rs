// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps: one row per point, evaluated concurrently, rows emitted
//! in sweep order. Pumped points report the steady-state concurrence from
//! the linear solver; undriven points report the transient maximum.

use std::path::Path;

use rayon::prelude::*;

use entsim::dynamics::{evolve, steady_state};
use entsim::entanglement::{wootters, ConcurrenceTrace};
use entsim::{EvolutionConfig, Generator, Method};

use crate::error::{CliError, Result};
use crate::output::{self, fmt_f, CsvWriter, RunRecord};
use crate::quantity::Quantity;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Re-derive each steady state by long-time integration as a cross-check.
    pub by_integration: bool,
}

struct SweepPoint {
    idx: usize,
    value: Quantity,
    value2: Option<Quantity>,
}

struct SweepRow {
    value_si: f64,
    value2_si: f64,
    gamma_tilde_21: f64,
    g_tilde_21: f64,
    c_ss: f64,
    c_ss_by_integration: f64,
    c_max: f64,
    t_max_s: f64,
}

pub fn run_sweep(scenario: &Scenario, out_dir: &Path, opts: SweepOptions) -> Result<()> {
    output::ensure_out_dir(out_dir)?;
    let mut record = RunRecord::new(&scenario.file.name, &scenario.hash, "sweep");

    let sweep = scenario
        .file
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::validation("sweep: scenario has no [sweep] section"))?;
    if sweep.values.is_empty() {
        return Err(CliError::validation("sweep: values must be nonempty"));
    }
    if sweep.parameter2.is_some() != sweep.values2.is_some() {
        return Err(CliError::validation(
            "sweep: parameter2 and values2 go together",
        ));
    }

    let mut points = Vec::new();
    match &sweep.values2 {
        None => {
            for (i, v) in sweep.values.iter().enumerate() {
                points.push(SweepPoint { idx: i, value: *v, value2: None });
            }
        }
        Some(values2) => {
            if values2.is_empty() {
                return Err(CliError::validation("sweep: values2 must be nonempty"));
            }
            for (i, v1) in sweep.values.iter().enumerate() {
                for (j, v2) in values2.iter().enumerate() {
                    points.push(SweepPoint {
                        idx: i * values2.len() + j,
                        value: *v1,
                        value2: Some(*v2),
                    });
                }
            }
        }
    }

    // Indexed parallel collect keeps sweep order; errors surface afterwards.
    let results: Vec<Result<SweepRow>> = points
        .par_iter()
        .map(|point| evaluate_point(scenario, sweep_params(sweep), point, opts))
        .collect();
    let rows: Vec<SweepRow> = results.into_iter().collect::<Result<_>>()?;

    let mut csv = CsvWriter::create(
        &out_dir.join("sweep.csv"),
        &scenario.hash,
        &[
            "idx",
            "value",
            "value_si",
            "value2",
            "value2_si",
            "gamma_tilde_21",
            "g_tilde_21",
            "c_ss",
            "c_ss_by_integration",
            "c_max",
            "t_max_s",
        ],
    );
    for (point, row) in points.iter().zip(&rows) {
        csv.row(&[
            point.idx.to_string(),
            fmt_f(point.value.value),
            fmt_f(row.value_si),
            fmt_f(point.value2.map(|q| q.value).unwrap_or(f64::NAN)),
            fmt_f(row.value2_si),
            fmt_f(row.gamma_tilde_21),
            fmt_f(row.g_tilde_21),
            fmt_f(row.c_ss),
            fmt_f(row.c_ss_by_integration),
            fmt_f(row.c_max),
            fmt_f(row.t_max_s),
        ]);
    }
    record.outputs.push("sweep.csv".to_owned());
    csv.finish()?;

    record.notes.push(match &sweep.parameter2 {
        Some(p2) => format!(
            "swept {} ({} values) x {} ({} values)",
            sweep.parameter,
            sweep.values.len(),
            p2,
            sweep.values2.as_ref().map(Vec::len).unwrap_or(0)
        ),
        None => format!("swept {} ({} values)", sweep.parameter, sweep.values.len()),
    });
    if opts.by_integration {
        record
            .notes
            .push("steady states cross-checked by long-time integration".to_owned());
    }
    record.write(out_dir)?;

    println!("sweep: {} points written", points.len());
    Ok(())
}

fn sweep_params(sweep: &crate::scenario::SweepSection) -> (&str, Option<&str>) {
    (sweep.parameter.as_str(), sweep.parameter2.as_deref())
}

/// Resolve the swept quantity to SI units for the output row.
fn value_si(path: &str, q: Quantity, units: &crate::quantity::Units) -> Result<f64> {
    if path.starts_with("drive.") {
        q.angular_or_rate(units)
    } else if path == "evolution.t_end" {
        q.time(units)
    } else {
        q.angular(units)
    }
}

fn evaluate_point(
    base: &Scenario,
    (param, param2): (&str, Option<&str>),
    point: &SweepPoint,
    opts: SweepOptions,
) -> Result<SweepRow> {
    let mut scenario = base.clone();
    scenario.set_parameter(param, point.value)?;
    if let Some(v2) = point.value2 {
        let p2 = param2.expect("checked: values2 implies parameter2");
        scenario.set_parameter(p2, v2)?;
    }

    let units = scenario.units()?;
    let built = scenario.build_rates(&units)?;
    let drive = scenario.drive(&units)?;
    let gamma11 = built.rates.gamma[[0, 0]];

    let mut row = SweepRow {
        value_si: value_si(param, point.value, &units)?,
        value2_si: match (point.value2, param2) {
            (Some(v2), Some(p2)) => value_si(p2, v2, &units)?,
            _ => f64::NAN,
        },
        gamma_tilde_21: built.meta.gamma_tilde_21,
        g_tilde_21: built.meta.g_tilde_21,
        c_ss: f64::NAN,
        c_ss_by_integration: f64::NAN,
        c_max: f64::NAN,
        t_max_s: f64::NAN,
    };

    if drive.is_zero() {
        let rho0 = scenario.initial_state()?;
        let cfg = scenario.evolution_config(&units)?;
        let traj = evolve(&rho0, Generator::Rates(&built.rates), &drive, &cfg)?;
        let trace = ConcurrenceTrace::from_trajectory(&traj)?;
        if let Some((t, c)) = trace.max_point() {
            row.c_max = c;
            row.t_max_s = t;
        }
    } else if drive.delta_l == 0.0 {
        let ss = steady_state(Generator::Rates(&built.rates), &drive)?;
        row.c_ss = wootters(&ss)?;
        if opts.by_integration {
            let rho0 = scenario.initial_state()?;
            let cfg = EvolutionConfig::new(
                60.0 / gamma11,
                scenario.evolution_config(&units)?.dt,
                Method::AdaptiveRk45,
                1_000_000,
            )?;
            let traj = evolve(&rho0, Generator::Rates(&built.rates), &drive, &cfg)?;
            row.c_ss_by_integration = wootters(traj.final_state())?;
        }
    }
    // Detuned pumped points leave every concurrence column as nan: the
    // steady-state solver needs a time-independent generator.

    Ok(row)
}
