//! Experiment configuration, run orchestration and file output.
//!
//! Subcommands: `simulate`, `predict`, `spectrum`, `compare`, `profile`.
//! A run writes a CSV table and a JSON manifest next to it; the manifest
//! embeds the full configuration and can be passed back via `--config`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{decompose_noise_runs, run_ensemble, EnsembleRun, EnsembleSpec, InitialState};
use crate::error::{Error, Result};
use crate::grid::{forward_transform, TimeGrid};
use crate::integrator::{PropagationConfig, ResponseMode, Scheme};
use crate::noise::NoiseSettings;
use crate::physics::{Dispersion, FiberConfig, LorentzianComponent, RamanModel, Scales};
use crate::solitons::{
    bright_field, overlap_integral, predict_bright_jitter, predict_dark_jitter, BrightSolitonParams, DarkSolitonParams,
    JitterPrediction, SolitonKind,
};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "SOLITON_JITTER_OUT";

pub const JITTER_COLUMNS: [&str; 6] = [
    "zeta",
    "x_meters",
    "var_dimensionless",
    "var_seconds2",
    "std_err",
    "n_traj",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanSpec {
    /// Inline Lorentzian lines; ignored when `table` is set.
    #[serde(default = "default_lines")]
    pub components: Vec<LorentzianComponent>,
    /// JSON file holding an array of lines, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    /// Defaults to the fiber temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

fn default_lines() -> Vec<LorentzianComponent> {
    vec![LorentzianComponent::SINGLE_LINE]
}

impl Default for RamanSpec {
    fn default() -> Self {
        Self {
            components: default_lines(),
            table: None,
            temperature: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_points: usize,
    pub tau_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSpec {
    pub d_zeta: f64,
    pub total_zeta: f64,
    pub snapshot_every: f64,
    pub response_mode: ResponseMode,
    #[serde(default)]
    pub scheme: Scheme,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSpec {
    pub kind: SolitonKind,
    /// Bright amplitude, or dark depth (1 = black).
    #[serde(rename = "A")]
    pub amplitude: f64,
    /// Dark background amplitude.
    #[serde(default = "one")]
    pub phi0: f64,
    #[serde(rename = "V", default)]
    pub velocity: f64,
}

fn one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_trajectories: usize,
    pub master_seed: u64,
    /// Leading trajectories replayed at half the step for the certificate.
    #[serde(default = "default_certify")]
    pub certify_trajectories: usize,
    #[serde(default = "default_true")]
    pub phase_match: bool,
}

fn default_certify() -> usize {
    32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseToggles {
    pub vacuum: bool,
    pub gain: bool,
    pub raman: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub fiber: FiberConfig,
    #[serde(default)]
    pub raman: RamanSpec,
    pub grid: GridSpec,
    pub propagation: PropagationSpec,
    pub soliton: SolitonSpec,
    pub ensemble: EnsembleConfig,
    pub noise: NoiseToggles,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// 500 fs bright soliton in dispersion-shifted fiber, all noise on, to ≈10 km.
    pub fn bright_500fs() -> Self {
        Self {
            fiber: FiberConfig::dispersion_shifted_500fs(),
            raman: RamanSpec::default(),
            grid: GridSpec {
                n_points: 1024,
                tau_max: 20.0,
            },
            propagation: PropagationSpec {
                d_zeta: 0.005,
                total_zeta: 22.7,
                snapshot_every: 1.135,
                response_mode: ResponseMode::Delayed,
                scheme: Scheme::Fourth,
            },
            soliton: SolitonSpec {
                kind: SolitonKind::Bright,
                amplitude: 1.0,
                phi0: 1.0,
                velocity: 0.0,
            },
            ensemble: EnsembleConfig {
                n_trajectories: 1000,
                master_seed: 1,
                certify_trajectories: default_certify(),
                phase_match: true,
            },
            noise: NoiseToggles {
                vacuum: true,
                gain: true,
                raman: true,
            },
            output: OutputSpec::default(),
        }
    }

    /// Same fiber with normal dispersion and a black-soliton pair.
    pub fn dark_500fs() -> Self {
        let mut c = Self::bright_500fs();
        c.fiber.k2 = c.fiber.k2.abs();
        c.grid.tau_max = 40.0;
        c.soliton = SolitonSpec {
            kind: SolitonKind::Dark,
            amplitude: 1.0,
            phi0: 1.0,
            velocity: 0.0,
        };
        c
    }

    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        // a manifest carries the config under "config"
        let value = match value.get("config") {
            Some(inner) if value.get("version").is_some() => inner.clone(),
            _ => value,
        };
        let mut config: Self = serde_json::from_value(value).map_err(|e| Error::Config(format!("config: {e}")))?;
        if let (Some(table), Some(dir)) = (&config.raman.table, base_dir) {
            if table.is_relative() {
                config.raman.table = Some(dir.join(table));
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.fiber.validate()?;
        if self.ensemble.n_trajectories < 1 {
            return Err(Error::param("ensemble.n_trajectories", "must be >= 1"));
        }
        match (self.soliton.kind, self.fiber.dispersion()) {
            (SolitonKind::Bright, Dispersion::Normal) => {
                return Err(Error::param(
                    "fiber.k2",
                    "bright solitons need anomalous dispersion (k2 < 0)",
                ))
            }
            (SolitonKind::Dark, Dispersion::Anomalous) => {
                return Err(Error::param(
                    "fiber.k2",
                    "dark solitons need normal dispersion (k2 > 0)",
                ))
            }
            _ => {}
        }
        self.ensemble_spec().map(|_| ())
    }

    pub fn scales(&self) -> Result<Scales> {
        self.fiber.derive_scales()
    }

    pub fn raman_model(&self) -> Result<RamanModel> {
        let lines = match &self.raman.table {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read Raman table {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("Raman table {}: {e}", path.display())))?
            }
            None => self.raman.components.clone(),
        };
        let temperature = self.raman.temperature.unwrap_or(self.fiber.temperature);
        RamanModel::new(lines, temperature, self.fiber.t0)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.n_points, self.grid.tau_max)
    }

    pub fn noise_settings(&self) -> Result<NoiseSettings> {
        let s = self.scales()?;
        Ok(NoiseSettings {
            vacuum: self.noise.vacuum,
            gain: self.noise.gain,
            raman: self.noise.raman,
            n_bar: s.n_bar,
            alpha_g: s.alpha_g,
            alpha_a: s.alpha_a,
            master_seed: self.ensemble.master_seed,
        })
    }

    pub fn propagation_config(&self) -> Result<PropagationConfig> {
        let p = &self.propagation;
        let config = PropagationConfig {
            dzeta: p.d_zeta,
            total_zeta: p.total_zeta,
            snapshot_every: p.snapshot_every,
            dispersion: self.fiber.dispersion(),
            response: p.response_mode,
            noise: self.noise_settings()?,
            scheme: p.scheme,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn initial_state(&self) -> InitialState {
        match self.soliton.kind {
            SolitonKind::Bright => InitialState::Bright(BrightSolitonParams {
                amplitude: self.soliton.amplitude,
                velocity: self.soliton.velocity,
                position: 0.0,
                phase: 0.0,
            }),
            SolitonKind::Dark => InitialState::DarkPair(DarkSolitonParams {
                background: self.soliton.phi0,
                depth: self.soliton.amplitude,
                position: 0.0,
                phase: 0.0,
            }),
        }
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec> {
        let grid = self.time_grid()?;
        let spec = EnsembleSpec {
            propagation: self.propagation_config()?,
            raman: self.raman_model()?,
            initial: self.initial_state(),
            n_trajectories: self.ensemble.n_trajectories,
            certify_trajectories: self.ensemble.certify_trajectories.min(self.ensemble.n_trajectories),
            phase_match: self.ensemble.phase_match,
            grid,
        };
        // surface window and band problems before any long run
        spec.initial.field(&spec.grid)?;
        if spec.propagation.response == ResponseMode::Delayed || spec.propagation.noise.raman {
            spec.raman.check_resolved(&spec.grid)?;
        }
        Ok(spec)
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.directory.clone())
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("soliton-jitter-out"))
    }

    /// Applies command-line overrides.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.ensemble.master_seed = seed;
        }
        if let Some(n) = o.trajectories {
            self.ensemble.n_trajectories = n;
        }
        if let Some(list) = &o.noise {
            self.noise = parse_noise_list(list)?;
        }
        if let Some(r) = o.response {
            self.propagation.response_mode = r.into();
        }
        if let Some(out) = &o.out {
            self.output.directory = Some(out.clone());
        }
        Ok(())
    }
}

/// `vacuum,gain,raman` (any subset), `all` or `none`.
pub fn parse_noise_list(list: &str) -> Result<NoiseToggles> {
    let mut t = NoiseToggles {
        vacuum: false,
        gain: false,
        raman: false,
    };
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "vacuum" => t.vacuum = true,
            "gain" => t.gain = true,
            "raman" => t.raman = true,
            "all" => {
                t = NoiseToggles {
                    vacuum: true,
                    gain: true,
                    raman: true,
                }
            }
            "none" => {}
            other => {
                return Err(Error::param(
                    "noise",
                    format!("unknown source `{other}` (expected vacuum, gain, raman, all or none)"),
                ))
            }
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ResponseArg {
    Instantaneous,
    Delayed,
}

impl From<ResponseArg> for ResponseMode {
    fn from(r: ResponseArg) -> Self {
        match r {
            ResponseArg::Instantaneous => ResponseMode::Instantaneous,
            ResponseArg::Delayed => ResponseMode::Delayed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trajectories: Option<usize>,
    pub noise: Option<String>,
    pub response: Option<ResponseArg>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateSummary {
    pub d_zeta: f64,
    pub trajectories: usize,
    pub max_field_error: f64,
    pub max_relative_position_error: f64,
}

impl CertificateSummary {
    fn from_run(run: &EnsembleRun) -> Option<Self> {
        run.certificate.as_ref().map(|c| Self {
            d_zeta: c.dzeta,
            trajectories: c.trajectories,
            max_field_error: c.max_field_error,
            max_relative_position_error: c.max_relative_error(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DerivedScales {
    pub x0_meters: f64,
    pub n_bar: f64,
    pub alpha_g: f64,
    pub fluorescence_at_zero: f64,
    pub overlap_integral: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub derived: DerivedScales,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub certificates: Vec<(String, Option<CertificateSummary>)>,
}

fn derived(config: &ExperimentConfig) -> Result<DerivedScales> {
    let s = config.scales()?;
    let model = config.raman_model()?;
    Ok(DerivedScales {
        x0_meters: s.x0,
        n_bar: s.n_bar,
        alpha_g: s.alpha_g,
        fluorescence_at_zero: model.fluorescence_at_zero(),
        overlap_integral: overlap_integral(&model, measured_amplitude(config))?,
    })
}

fn measured_amplitude(config: &ExperimentConfig) -> f64 {
    match config.soliton.kind {
        SolitonKind::Bright => config.soliton.amplitude,
        SolitonKind::Dark => config.soliton.phi0,
    }
}

fn fmt_num(out: &mut String, v: f64) {
    // shortest round-trip form keeps files byte-stable
    let _ = write!(out, "{v:e}");
}

/// One jitter table in the documented CSV layout.
pub fn jitter_csv(config: &ExperimentConfig, run: &EnsembleRun) -> Result<String> {
    let s = config.scales()?;
    let t0 = config.fiber.t0;
    let r = &run.result;
    let mut out = JITTER_COLUMNS.join(",");
    out.push('\n');
    for k in 0..r.zetas.len() {
        let row = [
            r.zetas[k],
            r.zetas[k] * s.x0,
            r.variance[k],
            r.variance[k] * t0 * t0,
            r.std_error[k],
        ];
        for v in row {
            fmt_num(&mut out, v);
            out.push(',');
        }
        let _ = writeln!(out, "{}", r.n_trajectories());
    }
    Ok(out)
}

/// Analytic predictions over the snapshot grid; the variance column sums the
/// enabled components.
pub fn prediction_rows(config: &ExperimentConfig) -> Result<Vec<JitterPrediction>> {
    let s = config.scales()?;
    let model = config.raman_model()?;
    let amp = measured_amplitude(config);
    let overlap = overlap_integral(&model, amp)?;
    let zetas = config.propagation_config()?.snapshot_zetas();
    zetas
        .into_iter()
        .map(|z| match config.soliton.kind {
            SolitonKind::Bright => predict_bright_jitter(z, amp, s.alpha_g, overlap, s.n_bar),
            SolitonKind::Dark => predict_dark_jitter(z, amp, s.alpha_g, overlap, s.n_bar),
        })
        .collect()
}

pub fn prediction_csv(config: &ExperimentConfig) -> Result<String> {
    let s = config.scales()?;
    let t0 = config.fiber.t0;
    let n = config.noise;
    let mut header: Vec<&str> = JITTER_COLUMNS.to_vec();
    if n.vacuum {
        header.push("vacuum");
    }
    if n.gain {
        header.push("gordon_haus");
    }
    if n.raman {
        header.push("raman");
    }
    let mut out = header.join(",");
    out.push('\n');
    for p in prediction_rows(config)? {
        let mut parts = Vec::new();
        if n.vacuum {
            parts.push(p.vacuum);
        }
        if n.gain {
            parts.push(p.gordon_haus);
        }
        if n.raman {
            parts.push(p.raman);
        }
        let var: f64 = parts.iter().sum();
        for v in [p.zeta, p.zeta * s.x0, var, var * t0 * t0, 0.0] {
            fmt_num(&mut out, v);
            out.push(',');
        }
        out.push('0');
        for v in parts {
            out.push(',');
            fmt_num(&mut out, v);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Fluorescence, Raman gain and the reference soliton power spectrum on the grid band.
pub fn spectrum_csv(config: &ExperimentConfig) -> Result<String> {
    let grid = config.time_grid()?;
    let model = config.raman_model()?;
    let t0 = config.fiber.t0;
    let soliton = bright_field(
        &BrightSolitonParams {
            amplitude: measured_amplitude(config),
            ..Default::default()
        },
        &grid,
    )?;
    let spec = forward_transform(&soliton);
    let mut out = String::from("omega,frequency_thz,fluorescence,raman_gain,soliton_spectrum\n");
    for (k, w) in grid.sorted_frequencies() {
        for v in [
            w,
            w / (2.0 * std::f64::consts::PI * t0) / 1e12,
            model.fluorescence(w),
            model.raman_gain(w),
        ] {
            fmt_num(&mut out, v);
            out.push(',');
        }
        fmt_num(&mut out, spec.values[k].norm_sqr());
        out.push('\n');
    }
    Ok(out)
}

/// Ensembles produced by one `simulate` call, labelled by noise family.
pub struct SimulationOutput {
    pub runs: Vec<(String, EnsembleRun)>,
}

pub fn simulate(config: &ExperimentConfig, decompose: bool) -> Result<SimulationOutput> {
    config.validate()?;
    let spec = config.ensemble_spec()?;
    let runs = if decompose {
        let d = decompose_noise_runs(&spec)?;
        vec![
            ("vacuum".to_string(), d.vacuum_only),
            ("gordon_haus".to_string(), d.gordon_haus_only),
            ("raman".to_string(), d.raman_only),
            ("total".to_string(), d.total),
        ]
    } else {
        vec![("jitter".to_string(), run_ensemble(&spec)?)]
    };
    Ok(SimulationOutput { runs })
}

fn write_manifest(
    dir: &Path,
    command: &str,
    config: &ExperimentConfig,
    outputs: Vec<String>,
    certificates: Vec<(String, Option<CertificateSummary>)>,
) -> Result<PathBuf> {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        seed: config.ensemble.master_seed,
        config: config.clone(),
        derived: derived(config)?,
        outputs,
        certificates,
    };
    let path = dir.join(format!("{command}_manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}

/// Runs the ensemble(s) and writes `<label>.csv` plus `simulate_manifest.json`.
pub fn run_simulate(config: &ExperimentConfig, dir: &Path, decompose: bool) -> Result<Vec<PathBuf>> {
    let output = simulate(config, decompose)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut names = Vec::new();
    let mut certs = Vec::new();
    for (label, run) in &output.runs {
        let name = format!("{label}.csv");
        let path = dir.join(&name);
        fs::write(&path, jitter_csv(config, run)?)?;
        certs.push((label.clone(), CertificateSummary::from_run(run)));
        names.push(name);
        paths.push(path);
    }
    paths.push(write_manifest(dir, "simulate", config, names, certs)?);
    Ok(paths)
}

pub fn run_predict(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    fs::create_dir_all(dir)?;
    let path = dir.join("prediction.csv");
    fs::write(&path, prediction_csv(config)?)?;
    let manifest = write_manifest(dir, "predict", config, vec!["prediction.csv".into()], Vec::new())?;
    Ok(vec![path, manifest])
}

pub fn run_spectrum(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    fs::create_dir_all(dir)?;
    let path = dir.join("spectrum.csv");
    fs::write(&path, spectrum_csv(config)?)?;
    let manifest = write_manifest(dir, "spectrum", config, vec!["spectrum.csv".into()], Vec::new())?;
    Ok(vec![path, manifest])
}

/// A parsed CSV: header names and numeric rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let csv_err = |e: csv::Error| Error::Config(format!("CSV: {e}"));
        let header: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if header.iter().all(String::is_empty) {
            return Err(Error::Config("empty CSV".into()));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = record
                .map_err(csv_err)?
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Config(format!("CSV row {}: `{s}`: {e}", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("CSV has no `{name}` column")))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub zeta: f64,
    pub numeric: f64,
    pub analytic: f64,
    pub ratio: f64,
    /// Standard error of the ratio from the numeric side.
    pub ratio_std_err: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub sigma: f64,
    pub rel_tol: f64,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.within)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("zeta,numeric,analytic,ratio,ratio_std_err,within\n");
        for r in &self.rows {
            for v in [r.zeta, r.numeric, r.analytic, r.ratio, r.ratio_std_err] {
                fmt_num(&mut out, v);
                out.push(',');
            }
            let _ = writeln!(out, "{}", u8::from(r.within));
        }
        out
    }
}

/// Row-wise `var_dimensionless` ratio of two jitter tables. A row passes when
/// the difference is within `sigma` combined standard errors or within
/// `rel_tol` relative to the analytic value.
pub fn compare_tables(numeric: &Table, analytic: &Table, sigma: f64, rel_tol: f64) -> Result<CompareReport> {
    let (zn, za) = (numeric.column("zeta")?, analytic.column("zeta")?);
    if zn.len() != za.len() || zn.iter().zip(&za).any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(1.0)) {
        return Err(Error::SnapshotMismatch("zeta columns differ".into()));
    }
    let (vn, va) = (
        numeric.column("var_dimensionless")?,
        analytic.column("var_dimensionless")?,
    );
    let (sn, sa) = (numeric.column("std_err")?, analytic.column("std_err")?);
    let rows = (0..zn.len())
        .map(|k| {
            let ratio = if va[k] != 0.0 {
                vn[k] / va[k]
            } else if vn[k] == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            let se = (sn[k] * sn[k] + sa[k] * sa[k]).sqrt();
            let diff = (vn[k] - va[k]).abs();
            CompareRow {
                zeta: zn[k],
                numeric: vn[k],
                analytic: va[k],
                ratio,
                ratio_std_err: if va[k] != 0.0 { sn[k] / va[k].abs() } else { 0.0 },
                within: diff <= sigma * se || diff <= rel_tol * va[k].abs(),
            }
        })
        .collect();
    Ok(CompareReport { rows, sigma, rel_tol })
}

#[derive(Debug, Parser)]
#[command(name = "soliton-jitter", version, about = "Quantum timing jitter of fiber solitons")]
pub struct Cli {
    /// Experiment config (JSON); a manifest from an earlier run also works.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: config, then $SOLITON_JITTER_OUT]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trajectories: Option<usize>,
    /// Comma list of vacuum,gain,raman (or all, none).
    #[arg(long, global = true)]
    pub noise: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub response: Option<ResponseArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo ensemble; writes jitter CSV(s) and a manifest.
    Simulate {
        /// Run vacuum, Gordon-Haus, Raman and total families separately.
        #[arg(long)]
        decompose: bool,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Analytic jitter prediction on the same zeta grid.
    Predict,
    /// Fluorescence, Raman gain and soliton spectrum.
    Spectrum,
    /// Compare a simulated jitter CSV against a prediction CSV.
    Compare {
        simulated: PathBuf,
        predicted: PathBuf,
        /// Allowed deviation in standard errors.
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        /// Allowed relative deviation, used when it is looser.
        #[arg(long, default_value_t = 0.0)]
        rel_tol: f64,
    },
    /// Print a built-in config profile.
    Profile {
        #[arg(value_enum, default_value = "bright")]
        kind: ProfileArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Bright,
    Dark,
}

/// Exit status: 0 success, 1 comparison outside thresholds, 2 error.
pub fn run(cli: Cli) -> Result<i32> {
    let overrides = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        trajectories: cli.trajectories,
        noise: cli.noise.clone(),
        response: cli.response,
    };
    let load = || -> Result<ExperimentConfig> {
        let mut config = match &cli.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::bright_500fs(),
        };
        config.apply(&overrides)?;
        config.validate()?;
        Ok(config)
    };
    match &cli.command {
        Command::Simulate { decompose, threads } => {
            let config = load()?;
            let dir = config.output_dir(cli.out.as_deref());
            let paths = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*n)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?
                    .install(|| run_simulate(&config, &dir, *decompose))?,
                None => run_simulate(&config, &dir, *decompose)?,
            };
            report_paths(&paths);
        }
        Command::Predict => {
            let config = load()?;
            report_paths(&run_predict(&config, &config.output_dir(cli.out.as_deref()))?);
        }
        Command::Spectrum => {
            let config = load()?;
            report_paths(&run_spectrum(&config, &config.output_dir(cli.out.as_deref()))?);
        }
        Command::Compare {
            simulated,
            predicted,
            sigma,
            rel_tol,
        } => {
            let report = compare_tables(&Table::read(simulated)?, &Table::read(predicted)?, *sigma, *rel_tol)?;
            let csv = report.to_csv();
            print!("{csv}");
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("compare.csv"), &csv)?;
            }
            let failed = report.rows.iter().filter(|r| !r.within).count();
            eprintln!(
                "{} of {} rows within thresholds",
                report.rows.len() - failed,
                report.rows.len()
            );
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Profile { kind } => {
            let config = match kind {
                ProfileArg::Bright => ExperimentConfig::bright_500fs(),
                ProfileArg::Dark => ExperimentConfig::dark_500fs(),
            };
            println!("{}", config.to_json());
        }
    }
    Ok(0)
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

/// Binary entry point.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
