// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files: a single TOML tree describing materials, geometry,
//! qubits, the rate source, the drive and the evolution window.
//!
//! Unit conventions follow [`crate::quantity`]: bare numbers in rate-like
//! fields are multiples of `rates.gamma11`, bare times are multiples of
//! `1/gamma11`, and the `w0`/`lam0` suffixes scale with the qubit
//! transition. The optional `[expect]` table is opaque to the commands; the
//! bundled regression tests read it.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use entsim::coupling::{
    chiral_to_rates, plasmonic_1d_rates, rates_from_green, rates_from_normalized,
};
use entsim::greens2d::{self, normalized_rates_profile};
use entsim::{
    ChiralParams, CouplingRates, DensityMatrix, DriveParams, EvolutionConfig, GreenSample,
    InterfaceGeometry, Method, OpaqueMedium, PlasmaParams, Qubit,
};

use crate::error::{CliError, Result};
use crate::output;
use crate::quantity::{Quantity, Units};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub qubits: QubitsSection,
    #[serde(default)]
    pub materials: Option<MaterialsSection>,
    #[serde(default)]
    pub geometry: GeometrySection,
    pub rates: RatesSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub dispersion: DispersionSection,
    /// Expected-properties manifest for bundled scenarios; commands ignore it.
    #[serde(default)]
    pub expect: Option<toml::Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitsSection {
    /// Transition frequency; must carry an absolute unit.
    pub transition_freq: Quantity,
    #[serde(default = "default_dipole")]
    pub dipole: Quantity,
    /// Dipole orientation (unnormalized); in-plane transverse by default.
    #[serde(default = "default_dipole_axis")]
    pub dipole_axis: [f64; 3],
    #[serde(default)]
    pub separation: Option<Quantity>,
    /// Explicit positions along the interface; overrides `separation`.
    #[serde(default)]
    pub positions: Option<Vec<Quantity>>,
}

fn default_dipole() -> Quantity {
    Quantity::parse("60 D").expect("literal")
}

fn default_dipole_axis() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsSection {
    pub plasma: PlasmaSection,
    #[serde(default = "default_eps_opaque")]
    pub eps_opaque: ComplexSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasmaSection {
    pub plasma_freq: Quantity,
    #[serde(default = "zero_quantity")]
    pub cyclotron_freq: Quantity,
    #[serde(default = "zero_quantity")]
    pub collision_freq: Quantity,
}

fn zero_quantity() -> Quantity {
    Quantity::bare(0.0)
}

fn default_eps_opaque() -> ComplexSpec {
    ComplexSpec::Real(-2.0)
}

/// A complex number written as a plain float or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn complex(self) -> Complex64 {
        match self {
            ComplexSpec::Real(re) => Complex64::new(re, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// `infinite_2d` (half-space interface model) or `external_green`
    /// (rates ingested from a file, no field model).
    #[serde(default = "default_geometry_kind")]
    pub kind: String,
    #[serde(default = "default_source_height")]
    pub source_height: Quantity,
    /// Field/dispersion probe frequency; defaults to the transition.
    #[serde(default)]
    pub probe_freq: Option<Quantity>,
}

fn default_geometry_kind() -> String {
    "infinite_2d".to_owned()
}

fn default_source_height() -> Quantity {
    Quantity::parse("0.1 lam0").expect("literal")
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            kind: default_geometry_kind(),
            source_height: default_source_height(),
            probe_freq: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    /// One of `greens2d`, `plasmonic_1d`, `chiral`, `direct`, `file`.
    pub source: String,
    /// Absolute self decay rate; the scale behind every `_tilde` number.
    #[serde(default = "default_gamma11")]
    pub gamma11: Quantity,
    #[serde(default)]
    pub direct: Option<DirectSection>,
    #[serde(default)]
    pub chiral: Option<ChiralSection>,
    #[serde(default)]
    pub plasmonic_1d: Option<Plasmonic1dSection>,
    #[serde(default)]
    pub file: Option<FileSection>,
}

fn default_gamma11() -> Quantity {
    Quantity::parse("900 MHz").expect("literal")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSection {
    /// Full rate matrix in units of `gamma11`.
    pub gamma_tilde: [[f64; 2]; 2],
    #[serde(default)]
    pub g_tilde: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiralSection {
    /// Right- and left-going decay rates in units of `gamma11`.
    pub gamma_r_tilde: f64,
    pub gamma_l_tilde: f64,
    /// Propagation phases `k (x2 - x1)` in radians, defined modulo 2 pi.
    pub phase_r: f64,
    pub phase_l: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plasmonic1dSection {
    /// Surface-wave shares of the self rate per direction.
    pub beta12: f64,
    pub beta21: f64,
    /// `Re k (x2 - x1)` and `Im k (x2 - x1)` for the right-going wave.
    pub phase_r: f64,
    #[serde(default)]
    pub attenuation_r: f64,
    /// Left-going values default to the right-going ones.
    #[serde(default)]
    pub phase_l: Option<f64>,
    #[serde(default)]
    pub attenuation_l: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSection {
    /// Green-sample JSON, resolved relative to the scenario file.
    pub path: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default = "zero_quantity")]
    pub omega1: Quantity,
    #[serde(default = "zero_quantity")]
    pub omega2: Quantity,
    #[serde(default = "zero_quantity")]
    pub detuning: Quantity,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection {
            omega1: zero_quantity(),
            omega2: zero_quantity(),
            detuning: zero_quantity(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `state1`..`state4`, `bell`, or `custom` with `rho_re`/`rho_im`.
    #[serde(default = "default_initial_state")]
    pub state: String,
    #[serde(default)]
    pub rho_re: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub rho_im: Option<Vec<Vec<f64>>>,
}

fn default_initial_state() -> String {
    "state4".to_owned()
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection { state: default_initial_state(), rho_re: None, rho_im: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(default = "default_t_end")]
    pub t_end: Quantity,
    #[serde(default = "default_dt")]
    pub dt: Quantity,
    /// `fixed_rk4` or `adaptive_rk45`.
    #[serde(default = "default_method")]
    pub method: String,
    /// Samples kept every this many steps; 0 picks a stride that records
    /// about two thousand samples.
    #[serde(default)]
    pub record_stride: usize,
}

fn default_t_end() -> Quantity {
    Quantity::bare(8.0)
}

fn default_dt() -> Quantity {
    Quantity::bare(1e-3)
}

fn default_method() -> String {
    "fixed_rk4".to_owned()
}

impl Default for EvolutionSection {
    fn default() -> Self {
        EvolutionSection {
            t_end: default_t_end(),
            dt: default_dt(),
            method: default_method(),
            record_stride: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_x_min")]
    pub x_min: Quantity,
    #[serde(default = "default_x_max")]
    pub x_max: Quantity,
    #[serde(default = "default_grid_points")]
    pub points: usize,
    /// Field evaluation height; defaults to the source height.
    #[serde(default)]
    pub y: Option<Quantity>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_x_min() -> Quantity {
    Quantity::parse("-2 lam0").expect("literal")
}

fn default_x_max() -> Quantity {
    Quantity::parse("2 lam0").expect("literal")
}

fn default_grid_points() -> usize {
    400
}

fn default_rel_tol() -> f64 {
    1e-8
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            x_min: default_x_min(),
            x_max: default_x_max(),
            points: default_grid_points(),
            y: None,
            rel_tol: default_rel_tol(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionSection {
    #[serde(default = "default_omega_min")]
    pub omega_min: Quantity,
    #[serde(default = "default_omega_max")]
    pub omega_max: Quantity,
    #[serde(default = "default_dispersion_points")]
    pub points: usize,
}

fn default_omega_min() -> Quantity {
    Quantity::parse("0.90 w0").expect("literal")
}

fn default_omega_max() -> Quantity {
    Quantity::parse("1.10 w0").expect("literal")
}

fn default_dispersion_points() -> usize {
    41
}

impl Default for DispersionSection {
    fn default() -> Self {
        DispersionSection {
            omega_min: default_omega_min(),
            omega_max: default_omega_max(),
            points: default_dispersion_points(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<Quantity>,
    #[serde(default)]
    pub parameter2: Option<String>,
    #[serde(default)]
    pub values2: Option<Vec<Quantity>>,
}

/// A parsed scenario plus its canonical hash and the directory it came
/// from (for resolving relative data paths).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub hash: String,
    pub base_dir: PathBuf,
}

/// Coupling rates plus provenance recorded into run metadata.
#[derive(Debug, Clone)]
pub struct BuiltRates {
    pub rates: CouplingRates,
    pub meta: RateMeta,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateMeta {
    pub source: String,
    pub gamma11_rad_s: f64,
    pub gamma_tilde_21: f64,
    pub g_tilde_21: f64,
    pub gamma_tilde_12: f64,
    pub g_tilde_12: f64,
    /// Offset of the self-rate proxy point for field-derived rates (m).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_offset_m: Option<f64>,
    /// Surface-wave share of the self rate for the 1D model (rad/s).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_spp_share: Option<f64>,
    /// Set when the source fixes propagation phases only modulo 2 pi.
    pub phase_mod_2pi: bool,
}

impl RateMeta {
    fn from_rates(source: &str, rates: &CouplingRates) -> Self {
        let g11 = rates.gamma[[0, 0]];
        RateMeta {
            source: source.to_owned(),
            gamma11_rad_s: g11,
            gamma_tilde_21: rates.gamma[[1, 0]] / g11,
            g_tilde_21: rates.g[[1, 0]] / g11,
            gamma_tilde_12: rates.gamma[[0, 1]] / g11,
            g_tilde_12: rates.g[[0, 1]] / g11,
            self_offset_m: None,
            gamma_spp_share: None,
            phase_mod_2pi: false,
        }
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file: ScenarioFile = toml::from_str(&text)?;
        let value: toml::Value = toml::from_str(&text)?;
        let hash = output::scenario_hash(&value);
        let base_dir = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        let s = Scenario { file, hash, base_dir };
        s.check()?;
        Ok(s)
    }

    /// Structural checks that need no unit resolution.
    fn check(&self) -> Result<()> {
        let r = &self.file.rates;
        let sections = [
            ("direct", r.direct.is_some()),
            ("chiral", r.chiral.is_some()),
            ("plasmonic_1d", r.plasmonic_1d.is_some()),
            ("file", r.file.is_some()),
        ];
        for (name, present) in sections {
            let wanted = r.source == name;
            if wanted && !present {
                return Err(CliError::Validation(format!(
                    "rates: source '{name}' needs a [rates.{name}] table"
                )));
            }
            if !wanted && present {
                return Err(CliError::Validation(format!(
                    "rates: [rates.{name}] conflicts with source '{}'",
                    r.source
                )));
            }
        }
        match r.source.as_str() {
            "greens2d" | "plasmonic_1d" | "chiral" | "direct" | "file" => {}
            other => {
                return Err(CliError::Validation(format!(
                    "rates: unknown source '{other}'"
                )))
            }
        }
        if r.source == "greens2d" && self.file.materials.is_none() {
            return Err(CliError::validation(
                "rates: greens2d source needs a [materials] section",
            ));
        }
        match self.file.geometry.kind.as_str() {
            "infinite_2d" => {}
            "external_green" => {
                if r.source != "file" {
                    return Err(CliError::validation(
                        "geometry: external_green pairs with rates source 'file'",
                    ));
                }
            }
            other => {
                return Err(CliError::Validation(format!(
                    "geometry: unknown kind '{other}'"
                )))
            }
        }
        Ok(())
    }

    pub fn units(&self) -> Result<Units> {
        let omega0 = self.file.qubits.transition_freq.absolute_angular()?;
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(CliError::validation(
                "qubits: transition frequency must be positive",
            ));
        }
        let interim = Units { omega0, gamma11: f64::NAN };
        let gamma11 = self.file.rates.gamma11.angular(&interim)?;
        if !(gamma11 > 0.0) || !gamma11.is_finite() {
            return Err(CliError::validation("rates: gamma11 must be positive"));
        }
        Ok(Units { omega0, gamma11 })
    }

    pub fn positions(&self, u: &Units) -> Result<[f64; 2]> {
        let q = &self.file.qubits;
        let xs = match (&q.positions, &q.separation) {
            (Some(p), None) => {
                if p.len() != 2 {
                    return Err(CliError::validation(
                        "qubits: positions must list exactly two values",
                    ));
                }
                [p[0].length(u)?, p[1].length(u)?]
            }
            (None, Some(s)) => {
                let s = s.length(u)?;
                [-0.5 * s, 0.5 * s]
            }
            (None, None) => {
                let s = Quantity::parse("2.4 um").expect("literal").length(u)?;
                [-0.5 * s, 0.5 * s]
            }
            (Some(_), Some(_)) => {
                return Err(CliError::validation(
                    "qubits: give either positions or separation, not both",
                ))
            }
        };
        if !(xs[1] > xs[0]) {
            return Err(CliError::validation("qubits: requires x2 > x1"));
        }
        Ok(xs)
    }

    fn materials_section(&self) -> Result<&MaterialsSection> {
        self.file.materials.as_ref().ok_or_else(|| {
            CliError::validation("scenario has no [materials] section")
        })
    }

    pub fn plasma(&self, u: &Units) -> Result<PlasmaParams> {
        let m = self.materials_section()?;
        Ok(PlasmaParams::new(
            m.plasma.plasma_freq.angular(u)?,
            m.plasma.cyclotron_freq.angular(u)?,
            m.plasma.collision_freq.angular(u)?,
        )?)
    }

    pub fn opaque(&self) -> Result<OpaqueMedium> {
        let m = self.materials_section()?;
        let medium = OpaqueMedium { eps: m.eps_opaque.complex() };
        medium.validate()?;
        Ok(medium)
    }

    pub fn interface_geometry(&self, u: &Units) -> Result<InterfaceGeometry> {
        if self.file.geometry.kind != "infinite_2d" {
            return Err(CliError::validation(
                "this command needs the infinite_2d interface geometry",
            ));
        }
        Ok(InterfaceGeometry::new(
            self.plasma(u)?,
            self.opaque()?,
            self.file.geometry.source_height.length(u)?,
        )?)
    }

    pub fn probe_omega(&self, u: &Units) -> Result<f64> {
        match &self.file.geometry.probe_freq {
            Some(q) => {
                let w = q.angular(u)?;
                if !(w > 0.0) {
                    return Err(CliError::validation(
                        "geometry: probe frequency must be positive",
                    ));
                }
                Ok(w)
            }
            None => Ok(u.omega0),
        }
    }

    /// Construct the coupling rates from whichever source the scenario
    /// names. The greens2d route evaluates the interface field at the two
    /// separations and at the self-offset point.
    pub fn build_rates(&self, u: &Units) -> Result<BuiltRates> {
        let r = &self.file.rates;
        let [x1, x2] = self.positions(u)?;
        let dx = x2 - x1;
        match r.source.as_str() {
            "direct" => {
                let d = r.direct.as_ref().expect("checked");
                let scale = |m: &[[f64; 2]; 2], s: f64| {
                    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
                };
                let rates = CouplingRates::two_qubit(
                    scale(&d.gamma_tilde, u.gamma11),
                    scale(&d.g_tilde, u.gamma11),
                )?;
                Ok(BuiltRates { meta: RateMeta::from_rates("direct", &rates), rates })
            }
            "chiral" => {
                let c = r.chiral.as_ref().expect("checked");
                let params = ChiralParams {
                    gamma_r: c.gamma_r_tilde * u.gamma11,
                    gamma_l: c.gamma_l_tilde * u.gamma11,
                    k_r: c.phase_r / dx,
                    k_l: c.phase_l / dx,
                    x1,
                    x2,
                };
                let rates = chiral_to_rates(&params)?;
                let mut meta = RateMeta::from_rates("chiral", &rates);
                meta.phase_mod_2pi = true;
                Ok(BuiltRates { rates, meta })
            }
            "plasmonic_1d" => {
                let p = r.plasmonic_1d.as_ref().expect("checked");
                let k_right = Complex64::new(p.phase_r, p.attenuation_r) / dx;
                let k_left = Complex64::new(
                    p.phase_l.unwrap_or(p.phase_r),
                    p.attenuation_l.unwrap_or(p.attenuation_r),
                ) / dx;
                let built =
                    plasmonic_1d_rates(p.beta12, p.beta21, u.gamma11, k_right, k_left, x1, x2)?;
                let mut meta = RateMeta::from_rates("plasmonic_1d", &built.rates);
                meta.phase_mod_2pi = true;
                meta.gamma_spp_share = Some(built.gamma_spp_share);
                Ok(BuiltRates { rates: built.rates, meta })
            }
            "file" => {
                let f = r.file.as_ref().expect("checked");
                let samples = read_green_file(&self.base_dir.join(&f.path))?;
                let qubits = self.green_qubits(u)?;
                let rates = rates_from_green(&qubits, &samples)?;
                Ok(BuiltRates { meta: RateMeta::from_rates("file", &rates), rates })
            }
            "greens2d" => {
                let geom = self.interface_geometry(u)?;
                let profile = normalized_rates_profile(&geom, &[dx, -dx], u.omega0)?;
                let rates = rates_from_normalized(
                    u.gamma11,
                    profile.gamma_ratio[0],
                    profile.g_ratio[0],
                    profile.gamma_ratio[1],
                    profile.g_ratio[1],
                )?;
                let mut meta = RateMeta::from_rates("greens2d", &rates);
                meta.self_offset_m = Some(greens2d::self_offset(u.omega0));
                Ok(BuiltRates { rates, meta })
            }
            _ => unreachable!("checked at load"),
        }
    }

    fn green_qubits(&self, u: &Units) -> Result<Vec<Qubit>> {
        let [x1, x2] = self.positions(u)?;
        let d = self.file.qubits.dipole.dipole()?;
        let axis = self.file.qubits.dipole_axis;
        let norm = (axis.iter().map(|a| a * a).sum::<f64>()).sqrt();
        if !(norm > 0.0) {
            return Err(CliError::validation("qubits: dipole axis must be nonzero"));
        }
        let dip = [d * axis[0] / norm, d * axis[1] / norm, d * axis[2] / norm];
        Ok(vec![
            Qubit { position: [x1, 0.0, 0.0], dipole: dip, transition_omega0: u.omega0 },
            Qubit { position: [x2, 0.0, 0.0], dipole: dip, transition_omega0: u.omega0 },
        ])
    }

    pub fn drive(&self, u: &Units) -> Result<DriveParams> {
        let d = &self.file.drive;
        let drive = DriveParams {
            omega1: Complex64::new(d.omega1.angular_or_rate(u)?, 0.0),
            omega2: Complex64::new(d.omega2.angular_or_rate(u)?, 0.0),
            delta_l: d.detuning.angular_or_rate(u)?,
        };
        drive.validate()?;
        Ok(drive)
    }

    pub fn initial_state(&self) -> Result<DensityMatrix> {
        let i = &self.file.initial;
        let state = match i.state.as_str() {
            "state1" => DensityMatrix::basis_state(4, 0)?,
            "state2" => DensityMatrix::basis_state(4, 1)?,
            "state3" => DensityMatrix::basis_state(4, 2)?,
            "state4" => DensityMatrix::basis_state(4, 3)?,
            "bell" => DensityMatrix::bell_gg_ee(),
            "custom" => {
                let re = i.rho_re.as_ref().ok_or_else(|| {
                    CliError::validation("initial: custom state needs rho_re")
                })?;
                let zeros = vec![vec![0.0; 4]; 4];
                let im = i.rho_im.as_ref().unwrap_or(&zeros);
                if re.len() != 4
                    || im.len() != 4
                    || re.iter().chain(im.iter()).any(|row| row.len() != 4)
                {
                    return Err(CliError::validation("initial: rho must be 4x4"));
                }
                let mut rho = Array2::zeros((4, 4));
                for a in 0..4 {
                    for b in 0..4 {
                        rho[[a, b]] = Complex64::new(re[a][b], im[a][b]);
                    }
                }
                DensityMatrix::new(rho)?
            }
            other => {
                return Err(CliError::Validation(format!(
                    "initial: unknown state '{other}'"
                )))
            }
        };
        Ok(state)
    }

    pub fn evolution_config(&self, u: &Units) -> Result<EvolutionConfig> {
        let e = &self.file.evolution;
        let t_end = e.t_end.time(u)?;
        let dt = e.dt.time(u)?;
        let method = match e.method.as_str() {
            "fixed_rk4" => Method::FixedRk4,
            "adaptive_rk45" => Method::AdaptiveRk45,
            other => {
                return Err(CliError::Validation(format!(
                    "evolution: unknown method '{other}'"
                )))
            }
        };
        let stride = if e.record_stride > 0 {
            e.record_stride
        } else {
            let n_steps = (t_end / dt).ceil().max(1.0);
            ((n_steps / 2000.0).ceil() as usize).max(1)
        };
        Ok(EvolutionConfig::new(t_end, dt, method, stride)?)
    }

    /// Point a sweep parameter path at a new value.
    pub fn set_parameter(&mut self, path: &str, q: Quantity) -> Result<()> {
        let f = &mut self.file;
        match path {
            "drive.omega1" => f.drive.omega1 = q,
            "drive.omega2" => f.drive.omega2 = q,
            "drive.detuning" => f.drive.detuning = q,
            "rates.gamma11" => f.rates.gamma11 = q,
            "evolution.t_end" => f.evolution.t_end = q,
            "materials.plasma.plasma_freq"
            | "materials.plasma.cyclotron_freq"
            | "materials.plasma.collision_freq" => {
                let m = f.materials.as_mut().ok_or_else(|| {
                    CliError::validation("sweep: scenario has no [materials] section")
                })?;
                match path.rsplit('.').next().unwrap() {
                    "plasma_freq" => m.plasma.plasma_freq = q,
                    "cyclotron_freq" => m.plasma.cyclotron_freq = q,
                    _ => m.plasma.collision_freq = q,
                }
            }
            other => {
                return Err(CliError::Validation(format!(
                    "sweep: unknown parameter path '{other}' (supported: drive.omega1, \
                     drive.omega2, drive.detuning, rates.gamma11, evolution.t_end, \
                     materials.plasma.plasma_freq, materials.plasma.cyclotron_freq, \
                     materials.plasma.collision_freq)"
                )))
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct GreenFileSample {
    i: usize,
    j: usize,
    omega_hz: f64,
    #[serde(rename = "G")]
    g: Vec<Vec<[f64; 2]>>,
    unit: String,
}

/// Green-sample ingestion: a JSON array of
/// `{"i", "j", "omega_hz", "G": 3x3 of [re, im], "unit": "per_meter"}`.
pub fn read_green_file(path: &Path) -> Result<Vec<GreenSample>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let raw: Vec<GreenFileSample> = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("green file {}: {e}", path.display())))?;
    let mut out = Vec::with_capacity(raw.len());
    for s in raw {
        if s.unit != "per_meter" {
            return Err(CliError::Validation(format!(
                "green file: unsupported unit '{}'",
                s.unit
            )));
        }
        if s.g.len() != 3 || s.g.iter().any(|row| row.len() != 3) {
            return Err(CliError::validation("green file: G must be 3x3"));
        }
        let mut g = Array2::zeros((3, 3));
        for a in 0..3 {
            for b in 0..3 {
                g[[a, b]] = Complex64::new(s.g[a][b][0], s.g[a][b][1]);
            }
        }
        out.push(GreenSample {
            i: s.i,
            j: s.j,
            omega: 2.0 * std::f64::consts::PI * s.omega_hz,
            g,
        });
    }
    Ok(out)
}

/// Linearly spaced grid used by the field and dispersion commands.
pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(b > a) {
        return Err(CliError::validation(
            "grid: needs at least two points with max > min",
        ));
    }
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| a + step * i as f64).collect())
}
