//! Configuration, command drivers and table emitters behind the
//! `monopole-qes` binary.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{
    effective_potential, linear_radii, DefectGeometry, Family, FluxField, PotentialSpec,
};
use crate::oracle::{verify_analytic, RadialGrid};
use crate::spectra::{
    degeneracy_report, energy_general_potential, spectrum_record, DEFAULT_DEGENERACY_TOL,
};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exit {
    Ok = 0,
    VerifyFailed = 1,
    Config = 2,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn worst(self, other: Exit) -> Exit {
        if other.code() > self.code() { other } else { self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("format: expected csv or json, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    Spectrum,
    Potential,
    Verify,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Potential => "potential",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// One `v_eff` column per combination instead of long format.
    #[serde(default)]
    pub wide: bool,
}

/// Extra values to scan; missing lists fall back to the scalar keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub alphas: Option<Vec<f64>>,
    pub phis: Option<Vec<f64>>,
    /// Orbital numbers for `potential`.
    pub ls: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Phi,
    Alpha,
    L,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

fn one() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    DEFAULT_DEGENERACY_TOL
}

/// A run described as one flat JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: Family,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub phi_quanta: f64,
    #[serde(default = "one")]
    pub charge: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub beta_1: f64,
    #[serde(default)]
    pub beta_m1: f64,
    #[serde(default)]
    pub beta_m2: f64,
    #[serde(default)]
    pub v0: f64,
    pub omega: Option<f64>,
    pub d_e: Option<f64>,
    pub r0: Option<f64>,
    pub eta_c: Option<f64>,
    /// `(n, l)` pairs.
    #[serde(default)]
    pub modes: Vec<(u32, u32)>,
    pub grid: Option<GridConfig>,
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub scan: ScanConfig,
    pub sweep: Option<SweepConfig>,
    /// Degeneracy tolerance for `l` sweeps.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Report complex-`j` combinations as skipped instead of failing.
    #[serde(default)]
    pub skip_nonphysical: bool,
    /// Negative-control hook: scales analytic energies by `1 + corrupt_energy`
    /// before verification.
    #[serde(default)]
    pub corrupt_energy: f64,
}

impl RunConfig {
    pub fn new(case: Family) -> Self {
        Self {
            case,
            alpha: 1.0,
            mass: 1.0,
            phi_quanta: 0.0,
            charge: 1.0,
            beta: 0.0,
            beta_1: 0.0,
            beta_m1: 0.0,
            beta_m2: 0.0,
            v0: 0.0,
            omega: None,
            d_e: None,
            r0: None,
            eta_c: None,
            modes: Vec::new(),
            grid: None,
            profile: None,
            scan: ScanConfig::default(),
            sweep: None,
            tolerance: DEFAULT_DEGENERACY_TOL,
            skip_nonphysical: false,
            corrupt_energy: 0.0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry_at(self.alpha)?;
        self.flux_at(self.phi_quanta)?;
        self.potential()?;
        for &(n, _) in &self.modes {
            if n == 0 {
                return Err(Error::Config("modes: radial mode n starts at 1".into()));
            }
        }
        for &a in self.scan.alphas.iter().flatten() {
            self.geometry_at(a).map_err(|e| Error::Config(format!("scan.alphas: {e}")))?;
        }
        for &p in self.scan.phis.iter().flatten() {
            self.flux_at(p).map_err(|e| Error::Config(format!("scan.phis: {e}")))?;
        }
        if let Some(g) = &self.grid {
            RadialGrid::new(g.r_min, g.r_max, g.points)?;
        }
        if let Some(p) = &self.profile {
            linear_radii(p.r_min, p.r_max, p.points).map_err(|e| Error::Config(format!("profile: {e}")))?;
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance: must be positive".into()));
        }
        if !self.corrupt_energy.is_finite() {
            return Err(Error::Config("corrupt_energy: must be finite".into()));
        }
        Ok(())
    }

    fn geometry_at(&self, alpha: f64) -> Result<DefectGeometry> {
        DefectGeometry::new(alpha, self.mass).map_err(|e| Error::Config(format!("alpha/mass: {e}")))
    }

    fn flux_at(&self, phi: f64) -> Result<FluxField> {
        FluxField::with_charge(phi, self.charge)
            .map_err(|e| Error::Config(format!("phi_quanta/charge: {e}")))
    }

    fn alphas(&self) -> Vec<f64> {
        self.scan.alphas.clone().unwrap_or_else(|| vec![self.alpha])
    }

    fn phis(&self) -> Vec<f64> {
        self.scan.phis.clone().unwrap_or_else(|| vec![self.phi_quanta])
    }

    /// The potential named by `case`, rejecting coefficients it does not use.
    pub fn potential(&self) -> Result<PotentialSpec> {
        let unused = |keys: &[(&str, f64)]| -> Result<()> {
            for (k, v) in keys {
                if *v != 0.0 {
                    return Err(Error::Config(format!("{k}: not used by case `{}`", self.case)));
                }
            }
            Ok(())
        };
        let required = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::Config(format!("{key}: required by case `{}`", self.case)))
        };
        let no_molecular = || -> Result<()> {
            for (k, v) in [("omega", self.omega), ("d_e", self.d_e), ("r0", self.r0), ("eta_c", self.eta_c)] {
                if v.is_some() {
                    return Err(Error::Config(format!("{k}: not used by case `{}`", self.case)));
                }
            }
            Ok(())
        };
        let spec = match self.case {
            Family::General => {
                no_molecular()?;
                PotentialSpec::general(self.beta, self.beta_1, self.beta_m1, self.beta_m2, self.v0)
            }
            Family::MieOscillator => {
                no_molecular()?;
                unused(&[("beta_1", self.beta_1)])?;
                PotentialSpec::mie_oscillator(self.beta, self.beta_m1, self.beta_m2, self.v0)
            }
            Family::Pseudoharmonic => {
                no_molecular()?;
                unused(&[("beta_1", self.beta_1), ("beta_m1", self.beta_m1)])?;
                PotentialSpec::pseudoharmonic(self.beta, self.beta_m2, self.v0)
            }
            Family::Kratzer | Family::ModifiedKratzer => {
                unused(&self.scalar_coefficients())?;
                if self.eta_c.is_some() {
                    return Err(Error::Config(format!("eta_c: not used by case `{}`", self.case)));
                }
                let omega = self.omega.unwrap_or(1.0);
                let (d_e, r0) = (required("d_e", self.d_e)?, required("r0", self.r0)?);
                if self.case == Family::Kratzer {
                    PotentialSpec::kratzer(omega, d_e, r0)
                } else {
                    PotentialSpec::modified_kratzer(omega, d_e, r0)
                }
            }
            Family::Coulomb => {
                unused(&self.scalar_coefficients())?;
                if self.d_e.is_some() || self.r0.is_some() {
                    return Err(Error::Config("d_e/r0: not used by case `coulomb`".into()));
                }
                let eta = required("eta_c", self.eta_c)?;
                if !(eta > 0.0) {
                    return Err(Error::Config(format!("eta_c: must be positive, got {eta}")));
                }
                PotentialSpec::coulomb(self.omega.unwrap_or(1.0), eta)
            }
        };
        crate::model::reduce_potential(&spec, self.mass)
            .map_err(|e| Error::Config(format!("coefficients: {e}")))?;
        Ok(spec)
    }

    fn scalar_coefficients(&self) -> [(&'static str, f64); 5] {
        [
            ("beta", self.beta),
            ("beta_1", self.beta_1),
            ("beta_m1", self.beta_m1),
            ("beta_m2", self.beta_m2),
            ("v0", self.v0),
        ]
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: serde_json::Value,
}

/// `x` with 12 significant digits, `%g` style (no trailing zeros).
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format_number(*v),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

impl OutputTable {
    fn new(header: &[&str], metadata: serde_json::Value) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of column `name`.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else { return Vec::new() };
        self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Header row plus data rows, Unix line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(csv_field).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    /// Appends the rows of tables with an identical header.
    pub fn concat(tables: Vec<OutputTable>) -> Result<OutputTable> {
        let mut iter = tables.into_iter();
        let Some(mut first) = iter.next() else {
            return Err(Error::Config("no configuration to run".into()));
        };
        let mut runs = vec![first.metadata.clone()];
        for t in iter {
            if t.header != first.header {
                return Err(Error::Inconsistent("tables with different columns".into()));
            }
            runs.push(t.metadata);
            first.rows.extend(t.rows);
        }
        if runs.len() > 1 {
            first.metadata = json!({ "runs": runs });
        }
        Ok(first)
    }
}

fn metadata(command: Command, cfg: &RunConfig) -> serde_json::Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command.name(),
        "config": cfg,
    })
}

/// Constrained level per requested mode (and per scanned alpha / phi).
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<OutputTable> {
    cfg.validate()?;
    let spec = cfg.potential()?;
    let mut table = OutputTable::new(
        &["n", "l", "alpha", "phi", "j", "param", "param_value", "energy"],
        metadata(Command::Spectrum, cfg),
    );
    for alpha in cfg.alphas() {
        let geom = cfg.geometry_at(alpha)?;
        for phi in cfg.phis() {
            let flux = cfg.flux_at(phi)?;
            for &(n, l) in &cfg.modes {
                let rec = spectrum_record(n, l, &spec, &geom, &flux)?;
                table.rows.push(vec![
                    n.into(),
                    l.into(),
                    alpha.into(),
                    phi.into(),
                    rec.angular_index.into(),
                    rec.constraint.param.name().into(),
                    rec.constraint.value.into(),
                    rec.energy.into(),
                ]);
            }
        }
    }
    Ok(table)
}

/// Effective-potential profiles for every `(alpha, phi, l)` combination.
pub fn cmd_potential(cfg: &RunConfig) -> Result<OutputTable> {
    cfg.validate()?;
    let spec = cfg.potential()?;
    let profile = cfg
        .profile
        .as_ref()
        .ok_or_else(|| Error::Config("profile: required by `potential`".into()))?;
    let radii = linear_radii(profile.r_min, profile.r_max, profile.points)?;
    let ls = cfg.scan.ls.clone().unwrap_or_else(|| {
        let mut ls: Vec<u32> = cfg.modes.iter().map(|m| m.1).collect();
        ls.dedup();
        if ls.is_empty() { vec![0] } else { ls }
    });
    let mut combos = Vec::new();
    for alpha in cfg.alphas() {
        for phi in cfg.phis() {
            for &l in &ls {
                combos.push((alpha, phi, l));
            }
        }
    }
    let curves = combos
        .par_iter()
        .map(|&(alpha, phi, l)| {
            let geom = cfg.geometry_at(alpha)?;
            let flux = cfg.flux_at(phi)?;
            radii
                .iter()
                .map(|&r| effective_potential(&spec, &geom, l, &flux, r))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let meta = metadata(Command::Potential, cfg);
    if profile.wide {
        let names: Vec<String> = combos
            .iter()
            .map(|(a, p, l)| format!("v_eff[alpha={}|phi={}|l={l}]", format_number(*a), format_number(*p)))
            .collect();
        let mut header = vec!["r"];
        header.extend(names.iter().map(String::as_str));
        let mut table = OutputTable::new(&header, meta);
        for (i, &r) in radii.iter().enumerate() {
            let mut row = vec![Cell::Num(r)];
            row.extend(curves.iter().map(|c| Cell::Num(c[i])));
            table.rows.push(row);
        }
        Ok(table)
    } else {
        let mut table = OutputTable::new(&["alpha", "phi", "l", "r", "v_eff"], meta);
        for ((alpha, phi, l), curve) in combos.iter().zip(&curves) {
            for (&r, &v) in radii.iter().zip(curve) {
                table.rows.push(vec![(*alpha).into(), (*phi).into(), (*l).into(), r.into(), v.into()]);
            }
        }
        Ok(table)
    }
}

pub const VERIFY_HEADER: [&str; 13] = [
    "case",
    "n",
    "l",
    "alpha",
    "phi",
    "analytic_E",
    "matched_E",
    "rel_gap",
    "node_count",
    "spectral_index",
    "residual",
    "converged",
    "status",
];

fn verify_row(cfg: &RunConfig, spec: &PotentialSpec, n: u32, l: u32, alpha: f64, phi: f64) -> (Vec<Cell>, Exit) {
    let head = |status: String, exit: Exit| {
        let nan = Cell::Num(f64::NAN);
        let row = vec![
            cfg.case.name().into(),
            n.into(),
            l.into(),
            alpha.into(),
            phi.into(),
            nan.clone(),
            nan.clone(),
            nan.clone(),
            Cell::Int(-1),
            Cell::Int(-1),
            nan,
            false.into(),
            status.into(),
        ];
        (row, exit)
    };
    let run = || -> Result<_> {
        let geom = cfg.geometry_at(alpha)?;
        let flux = cfg.flux_at(phi)?;
        let mut rec = spectrum_record(n, l, spec, &geom, &flux)?;
        rec.energy *= 1.0 + cfg.corrupt_energy;
        let grid = match &cfg.grid {
            Some(g) => Some(RadialGrid::new(g.r_min, g.r_max, g.points)?),
            None => None,
        };
        verify_analytic(&rec, spec, &geom, &flux, grid.as_ref())
    };
    match run() {
        Ok(rep) => {
            let exit = if rep.converged { Exit::Ok } else { Exit::VerifyFailed };
            let row = vec![
                cfg.case.name().into(),
                n.into(),
                l.into(),
                alpha.into(),
                phi.into(),
                rep.target_energy.into(),
                rep.matched_energy.into(),
                rep.rel_gap.into(),
                rep.node_count.into(),
                rep.spectral_index.into(),
                rep.residual_norm.into(),
                rep.converged.into(),
                if rep.converged { "ok" } else { "mismatch" }.into(),
            ];
            (row, exit)
        }
        Err(Error::ComplexIndex { j_squared }) if cfg.skip_nonphysical => {
            head(format!("skipped: complex j (j^2 = {j_squared})"), Exit::Ok)
        }
        Err(e @ Error::ComplexIndex { .. }) => head(format!("non-physical: {e}"), Exit::Config),
        Err(e) if e.is_configuration() => head(format!("error: {e}"), Exit::Config),
        Err(e) => head(format!("failed: {e}"), Exit::VerifyFailed),
    }
}

/// Certifies every requested level against the numerical oracle. The exit
/// status is the worst over all rows.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(OutputTable, Exit)> {
    cfg.validate()?;
    let spec = cfg.potential()?;
    let mut jobs = Vec::new();
    for alpha in cfg.alphas() {
        for phi in cfg.phis() {
            for &(n, l) in &cfg.modes {
                jobs.push((n, l, alpha, phi));
            }
        }
    }
    let results: Vec<(Vec<Cell>, Exit)> = jobs
        .par_iter()
        .map(|&(n, l, alpha, phi)| verify_row(cfg, &spec, n, l, alpha, phi))
        .collect();
    let mut table = OutputTable::new(&VERIFY_HEADER, metadata(Command::Verify, cfg));
    let mut exit = Exit::Ok;
    for (row, e) in results {
        exit = exit.worst(e);
        table.rows.push(row);
    }
    Ok((table, exit))
}

fn sweep_values(s: &SweepConfig) -> Result<Vec<f64>> {
    let finite = s.start.is_finite() && s.stop.is_finite() && s.step.is_finite();
    if !finite || !(s.step > 0.0) || s.stop < s.start {
        return Err(Error::Config(format!(
            "sweep: need start <= stop and step > 0, got {}..{} step {}",
            s.start, s.stop, s.step
        )));
    }
    let count = ((s.stop - s.start) / s.step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::Config("sweep: more than 10^6 points".into()));
    }
    Ok((0..count).map(|i| s.start + s.step * i as f64).collect())
}

/// Energies along one axis. `phi` adds the periodicity partner
/// `E_{n,l-nu}(Phi_0)` with `nu = round(Phi - Phi_0)`; `l` adds the nearest
/// level gap and a collision flag.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<OutputTable> {
    cfg.validate()?;
    let spec = cfg.potential()?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep: required by `sweep`".into()))?;
    let values = sweep_values(sweep)?;
    let meta = metadata(Command::Sweep, cfg);
    match sweep.axis {
        SweepAxis::Phi => {
            let geom = cfg.geometry_at(cfg.alpha)?;
            let base = sweep.start;
            cfg.flux_at(base).map_err(|e| Error::Config(format!("sweep.start: {e}")))?;
            let jobs: Vec<(u32, u32, f64)> = cfg
                .modes
                .iter()
                .flat_map(|&(n, l)| values.iter().map(move |&p| (n, l, p)))
                .collect();
            let rows = jobs
                .par_iter()
                .map(|&(n, l, phi)| -> Result<Vec<Cell>> {
                    let here = spectrum_record(n, l, &spec, &geom, &cfg.flux_at(phi)?)?;
                    let nu = (phi - base).round() as i64;
                    let partner_l = l as i64 - nu;
                    // A negative partner l shares l' with l = 0 at a larger flux.
                    let (pl, pflux) = if partner_l >= 0 {
                        (partner_l as u32, base)
                    } else {
                        (0, base - partner_l as f64)
                    };
                    let partner = spectrum_record(n, pl, &spec, &geom, &cfg.flux_at(pflux)?)?;
                    Ok(vec![
                        n.into(),
                        l.into(),
                        phi.into(),
                        here.energy.into(),
                        nu.into(),
                        partner_l.into(),
                        partner.energy.into(),
                        (here.energy - partner.energy).into(),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = OutputTable::new(
                &["n", "l", "phi", "energy", "nu", "partner_l", "partner_energy", "difference"],
                meta,
            );
            table.rows = rows;
            Ok(table)
        }
        SweepAxis::Alpha => {
            let flux = cfg.flux_at(cfg.phi_quanta)?;
            let jobs: Vec<(u32, u32, f64)> = cfg
                .modes
                .iter()
                .flat_map(|&(n, l)| values.iter().map(move |&a| (n, l, a)))
                .collect();
            let rows = jobs
                .par_iter()
                .map(|&(n, l, alpha)| -> Result<Vec<Cell>> {
                    let geom = cfg
                        .geometry_at(alpha)
                        .map_err(|e| Error::Config(format!("sweep: {e}")))?;
                    let e = energy_general_potential(n, l, &spec, &geom, &flux)?;
                    Ok(vec![n.into(), l.into(), alpha.into(), e.into()])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = OutputTable::new(&["n", "l", "alpha", "energy"], meta);
            table.rows = rows;
            Ok(table)
        }
        SweepAxis::L => {
            let flux = cfg.flux_at(cfg.phi_quanta)?;
            let ls: Vec<u32> = values
                .iter()
                .map(|v| {
                    if *v < 0.0 || v.fract() != 0.0 {
                        Err(Error::Config(format!("sweep: l values must be non-negative integers, got {v}")))
                    } else {
                        Ok(*v as u32)
                    }
                })
                .collect::<Result<_>>()?;
            let l_max = *ls.last().unwrap_or(&0);
            let mut ns: Vec<u32> = cfg.modes.iter().map(|m| m.0).collect();
            ns.sort_unstable();
            ns.dedup();
            let mut jobs = Vec::new();
            for alpha in cfg.alphas() {
                for &n in &ns {
                    jobs.push((alpha, n));
                }
            }
            let blocks = jobs
                .par_iter()
                .map(|&(alpha, n)| -> Result<Vec<Vec<Cell>>> {
                    let geom = cfg.geometry_at(alpha)?;
                    let rep = degeneracy_report(n, l_max.max(1), &spec, &geom, &flux, cfg.tolerance)?;
                    let chosen: Vec<(u32, f64)> =
                        rep.levels.iter().copied().filter(|(l, _)| ls.contains(l)).collect();
                    Ok(chosen
                        .iter()
                        .map(|&(l, e)| {
                            let gap = chosen
                                .iter()
                                .filter(|(k, _)| *k != l)
                                .map(|(_, f)| (f - e).abs())
                                .fold(f64::INFINITY, f64::min);
                            let collision = rep.collisions.iter().any(|&(a, b)| {
                                (a == l && ls.contains(&b)) || (b == l && ls.contains(&a))
                            });
                            vec![alpha.into(), n.into(), l.into(), e.into(), gap.into(), collision.into()]
                        })
                        .collect())
                })
                .collect::<Result<Vec<_>>>()?;
            let mut table = OutputTable::new(
                &["alpha", "n", "l", "energy", "nearest_gap", "collision"],
                meta,
            );
            table.rows = blocks.into_iter().flatten().collect();
            Ok(table)
        }
    }
}

/// Runs `command` over every configuration and concatenates the tables.
pub fn run(command: Command, configs: &[RunConfig]) -> Result<(OutputTable, Exit)> {
    let mut tables = Vec::with_capacity(configs.len());
    let mut exit = Exit::Ok;
    for cfg in configs {
        let table = match command {
            Command::Spectrum => cmd_spectrum(cfg)?,
            Command::Potential => cmd_potential(cfg)?,
            Command::Sweep => cmd_sweep(cfg)?,
            Command::Verify => {
                let (t, e) = cmd_verify(cfg)?;
                exit = exit.worst(e);
                t
            }
        };
        tables.push(table);
    }
    Ok((OutputTable::concat(tables)?, exit))
}

pub const PRESETS: [&str; 14] = [
    "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "coulomb", "kratzer",
    "suite", "certification", "phi-sweep", "l-sweep",
];

fn figure(linear: bool, panel: char) -> RunConfig {
    let mut cfg = RunConfig::new(if linear { Family::General } else { Family::MieOscillator });
    cfg.beta = 1.0;
    cfg.beta_m1 = 1.0;
    cfg.beta_m2 = 1.0;
    cfg.v0 = 1.0;
    if linear {
        cfg.beta_1 = 1.0;
    }
    cfg.profile = Some(ProfileConfig { r_min: 0.5, r_max: 5.0, points: 100, wide: false });
    let sweep4 = vec![0.4, 0.6, 0.8, 1.0];
    match panel {
        'a' => {
            cfg.phi_quanta = 0.75;
            cfg.scan.alphas = Some(sweep4);
            cfg.scan.ls = Some(vec![1]);
        }
        'b' => {
            cfg.alpha = 0.75;
            cfg.scan.phis = Some(vec![0.25, 0.5, 0.75, 1.0]);
            cfg.scan.ls = Some(vec![1]);
        }
        'c' => {
            cfg.alpha = 0.75;
            cfg.phi_quanta = if linear { 0.75 } else { 1.0 };
            cfg.scan.ls = Some(vec![0, 1, 2, 3]);
        }
        _ => {
            cfg.scan.alphas = Some(sweep4);
            cfg.scan.ls = Some(vec![1]);
        }
    }
    cfg
}

/// Representative parameters for each family in verification runs.
pub fn family_config(case: Family) -> RunConfig {
    let mut cfg = RunConfig::new(case);
    match case {
        Family::MieOscillator => {
            cfg.beta = 1.0;
            cfg.beta_m1 = 1.0;
            cfg.beta_m2 = 1.0;
            cfg.v0 = 1.0;
        }
        Family::General => {
            cfg.beta = 1.0;
            cfg.beta_1 = 1.0;
            cfg.beta_m1 = -1.0;
            cfg.beta_m2 = 1.0;
            cfg.v0 = 1.0;
        }
        Family::Pseudoharmonic => {
            cfg.beta = 1.0;
            cfg.beta_m2 = 1.0;
        }
        Family::Kratzer | Family::ModifiedKratzer => {
            cfg.d_e = Some(1.0);
            cfg.r0 = Some(1.0);
        }
        Family::Coulomb => {
            cfg.eta_c = Some(1.0);
        }
    }
    cfg
}

/// Families covered by the verification presets.
pub const VERIFY_FAMILIES: [Family; 5] = [
    Family::MieOscillator,
    Family::Kratzer,
    Family::ModifiedKratzer,
    Family::Coulomb,
    Family::General,
];

fn verification(ls: &[u32], phis: &[f64], alphas: &[f64]) -> Vec<RunConfig> {
    VERIFY_FAMILIES
        .iter()
        .map(|&case| {
            let mut cfg = family_config(case);
            cfg.modes = [1, 2].iter().flat_map(|&n| ls.iter().map(move |&l| (n, l))).collect();
            cfg.scan.alphas = Some(alphas.to_vec());
            cfg.scan.phis = Some(phis.to_vec());
            cfg.skip_nonphysical = true;
            cfg
        })
        .collect()
}

/// Named configurations.
pub fn preset(name: &str) -> Result<Vec<RunConfig>> {
    let cfgs = match name {
        "fig1a" | "fig1b" | "fig1c" | "fig1d" | "fig2a" | "fig2b" | "fig2c" | "fig2d" => {
            let linear = name.starts_with("fig2");
            vec![figure(linear, name.chars().last().unwrap_or('a'))]
        }
        "coulomb" => {
            let mut cfg = family_config(Family::Coulomb);
            cfg.modes = vec![(1, 0), (2, 0)];
            vec![cfg]
        }
        "kratzer" => {
            let mut cfg = family_config(Family::Kratzer);
            cfg.modes = vec![(1, 0), (2, 0)];
            vec![cfg]
        }
        "suite" => verification(&[0, 1], &[0.0], &[1.0, 0.75]),
        "certification" => verification(&[0, 1, 2], &[0.0, 0.5, 0.75], &[1.0, 0.75, 0.5]),
        "phi-sweep" => {
            let mut cfg = family_config(Family::MieOscillator);
            cfg.alpha = 0.75;
            cfg.modes = vec![(1, 1)];
            cfg.sweep = Some(SweepConfig { axis: SweepAxis::Phi, start: 0.0, stop: 2.0, step: 0.1 });
            vec![cfg]
        }
        "l-sweep" => {
            let mut cfg = family_config(Family::MieOscillator);
            cfg.modes = vec![(1, 0)];
            cfg.scan.alphas = Some(vec![1.0, 0.6]);
            cfg.sweep = Some(SweepConfig { axis: SweepAxis::L, start: 0.0, stop: 4.0, step: 1.0 });
            vec![cfg]
        }
        other => {
            return Err(Error::Config(format!(
                "preset: unknown `{other}` (known: {})",
                PRESETS.join(", ")
            )))
        }
    };
    for cfg in &cfgs {
        cfg.validate()?;
    }
    Ok(cfgs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(2.5), "2.5");
        assert_eq!(format_number(0.7000000000000001), "0.7");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_number(-1.5e-7), "-1.5e-7");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(100.0), "100");
    }

    #[test]
    fn coulomb_spectrum_rows() {
        let t = cmd_spectrum(&preset("coulomb").unwrap()[0]).unwrap();
        let e = t.numbers("energy");
        assert!((e[0] - 2.5).abs() < 1e-12 && (e[1] - 0.7).abs() < 1e-12);
        assert!(t.to_csv().starts_with("n,l,alpha,phi,j,param,param_value,energy\n1,0,1,0,0.5,omega,1,2.5\n"));
    }

    #[test]
    fn empty_modes_give_header_only() {
        let cfg = family_config(Family::Kratzer);
        let t = cmd_spectrum(&cfg).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.to_csv().lines().count(), 1);
    }

    #[test]
    fn config_errors_name_the_key() {
        let err = RunConfig::from_json(r#"{"case": "kratzer", "r0": 1}"#).unwrap_err();
        assert!(err.to_string().contains("d_e"), "{err}");
        let err = RunConfig::from_json(r#"{"case": "coulomb", "eta_c": 1, "betta": 2}"#).unwrap_err();
        assert!(err.to_string().contains("betta"), "{err}");
        assert!(err.is_configuration());
        let err = RunConfig::from_json(r#"{"case": "mie_oscillator", "alpha": 1.5}"#).unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
        let err = RunConfig::from_json(r#"{"case": "mie_oscillator", "d_e": 1}"#).unwrap_err();
        assert!(err.to_string().contains("d_e"), "{err}");
    }

    #[test]
    fn figure_profiles_have_one_block_per_curve() {
        let t = cmd_potential(&preset("fig1a").unwrap()[0]).unwrap();
        assert_eq!(t.rows.len(), 400);
        let t = cmd_potential(&preset("fig1c").unwrap()[0]).unwrap();
        assert_eq!(t.numbers("l").iter().filter(|l| **l == 3.0).count(), 100);
    }

    #[test]
    fn wide_profile_layout() {
        let mut cfg = preset("fig2d").unwrap().remove(0);
        cfg.profile.as_mut().unwrap().wide = true;
        let t = cmd_potential(&cfg).unwrap();
        assert_eq!(t.header.len(), 5);
        assert_eq!(t.rows.len(), 100);
    }

    #[test]
    fn phi_sweep_partner_difference_vanishes_at_integer_offsets() {
        let t = cmd_sweep(&preset("phi-sweep").unwrap()[0]).unwrap();
        assert_eq!(t.rows.len(), 21);
        for (phi, d) in t.numbers("phi").iter().zip(t.numbers("difference")) {
            let off = (phi - phi.round()).abs() < 1e-9;
            if off {
                assert!(d.abs() < 1e-12, "phi {phi}: {d}");
            }
        }
    }

    #[test]
    fn alpha_sweep_is_monotone_for_mie() {
        let mut cfg = family_config(Family::MieOscillator);
        cfg.modes = vec![(1, 1)];
        cfg.sweep = Some(SweepConfig { axis: SweepAxis::Alpha, start: 0.4, stop: 1.0, step: 0.05 });
        let e = cmd_sweep(&cfg).unwrap().numbers("energy");
        assert_eq!(e.len(), 13);
        assert!(e.windows(2).all(|w| w[1] != w[0]));
        let increasing = e.windows(2).all(|w| w[1] > w[0]);
        let decreasing = e.windows(2).all(|w| w[1] < w[0]);
        assert!(increasing || decreasing);
    }

    #[test]
    fn bad_sweep_range_is_a_config_error() {
        let mut cfg = preset("phi-sweep").unwrap().remove(0);
        cfg.sweep.as_mut().unwrap().step = -0.1;
        assert!(cmd_sweep(&cfg).unwrap_err().is_configuration());
    }

    #[test]
    fn complex_index_is_non_physical() {
        let mut cfg = family_config(Family::Coulomb);
        cfg.alpha = 0.5;
        cfg.phi_quanta = 0.5;
        cfg.modes = vec![(1, 0)];
        let (t, exit) = cmd_verify(&cfg).unwrap();
        assert_eq!(exit, Exit::Config);
        let status = t.column("status").unwrap();
        assert!(matches!(&t.rows[0][status], Cell::Text(s) if s.starts_with("non-physical")));
        cfg.skip_nonphysical = true;
        assert_eq!(cmd_verify(&cfg).unwrap().1, Exit::Ok);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = cmd_spectrum(&preset("kratzer").unwrap()[0]).unwrap();
        let back: OutputTable = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.rows, t.rows);
    }
}
