//! Command-line front end: argument parsing, config resolution, command
//! dispatch and output.

pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use aiot_link::range::{self, RegionOptions};
use aiot_link::rf::reader_sensitivity;
use aiot_link::scenario::{preset_names, CoverageReport, SweepPoint};
use aiot_link::targets::{targets_table, validate_device, Violation};
use aiot_link::{
    boundary, coverage_sweep, evaluate_deployment, link_feasible, preset_scenario, Axis, BoundaryPoint,
    Configuration, DeviceType, FeasibilityResult, GridSpec, LinkGeometry, OperatingRegion, RangeLimits, Reach,
    Spacing, SweepParameter,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{Format, RunConfig, SweepSpec};
use crate::error::{exit, CliError};
use crate::output::{csv_bool, csv_number, csv_optional, csv_table, json_document};

#[derive(Debug, Parser)]
#[command(name = "aiot", version, about = "Ambient-IoT backscatter link budget, range and coverage analysis")]
pub struct Cli {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Significant digits of emitted numbers (default 6, max 17)
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Preset scenario name (see `scenario --list`)
    #[arg(long)]
    pub preset: Option<String>,
    /// Device class A, B or C (replaces the preset's tag)
    #[arg(long)]
    pub device: Option<DeviceType>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Exciter-tag axis start, m
    #[arg(long, allow_hyphen_values = true)]
    pub d1_min: Option<f64>,
    /// Exciter-tag axis end, m
    #[arg(long, allow_hyphen_values = true)]
    pub d1_max: Option<f64>,
    /// Exciter-tag axis cell count
    #[arg(long)]
    pub n1: Option<usize>,
    /// linear or log (default linear)
    #[arg(long, value_parser = parse_spacing)]
    pub d1_spacing: Option<Spacing>,
    /// Tag-reader axis start, m
    #[arg(long, allow_hyphen_values = true)]
    pub d2_min: Option<f64>,
    /// Tag-reader axis end, m
    #[arg(long, allow_hyphen_values = true)]
    pub d2_max: Option<f64>,
    /// Tag-reader axis cell count
    #[arg(long)]
    pub n2: Option<usize>,
    /// linear or log (default log)
    #[arg(long, value_parser = parse_spacing)]
    pub d2_spacing: Option<Spacing>,
    /// Largest allowed number of grid cells
    #[arg(long)]
    pub cell_cap: Option<u64>,
}

fn parse_spacing(s: &str) -> Result<Spacing, String> {
    match s {
        "linear" => Ok(Spacing::Linear),
        "log" | "logarithmic" => Ok(Spacing::Logarithmic),
        other => Err(format!("unknown spacing '{other}', expected linear or logarithmic")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Link budget at fixed distances
    Budget {
        #[command(flatten)]
        source: SourceArgs,
        /// Exciter-tag distance, m
        #[arg(long, allow_hyphen_values = true)]
        d1: Option<f64>,
        /// Tag-reader distance, m
        #[arg(long, allow_hyphen_values = true)]
        d2: Option<f64>,
    },
    /// Maximum power-up and reader distances
    Range {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, allow_hyphen_values = true)]
        d1: Option<f64>,
    },
    /// Operating region over a (d1, d2) grid
    Region {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// List or show preset scenarios
    Scenario {
        #[arg(long)]
        list: bool,
        name: Option<String>,
        #[arg(long)]
        device: Option<DeviceType>,
    },
    /// Coverage of a multi-node deployment (from --config)
    Deploy {
        /// exciter_tx_power, reader_sensitivity, tag_modulation_factor or carrier_frequency
        #[arg(long)]
        sweep: Option<SweepParameter>,
        /// Comma-separated sweep values
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Check a device against the design targets; exits 4 on violations
    Validate {
        #[command(flatten)]
        source: SourceArgs,
        /// Peak power consumption while transmitting/receiving, W
        #[arg(long)]
        peak_power_w: Option<f64>,
        /// Claimed supported data rate, bit/s
        #[arg(long)]
        data_rate_bps: Option<f64>,
        /// Print the design targets table instead
        #[arg(long)]
        table: bool,
    },
}

/// Bytes produced by a successful command and the exit code to report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: Vec<u8>,
    pub exit_code: u8,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(body: Vec<u8>) -> Self {
        Self {
            body,
            exit_code: exit::OK,
            warnings: Vec::new(),
        }
    }
}

/// Captured result of a full invocation, for tests and embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub exit_code: u8,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

/// Parses `args` (including the program name), runs the command and writes
/// the output to `--out` when given. Nothing is written on failure.
pub fn invoke<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    exit_code: code,
                    stdout: Vec::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    exit_code: code,
                    stdout: text.into_bytes(),
                    stderr: String::new(),
                }
            };
        }
    };
    let out = cli.out.clone();
    match run(cli) {
        Err(e) => Invocation {
            exit_code: e.exit_code(),
            stdout: Vec::new(),
            stderr: format!("error: {e}\n"),
        },
        Ok(outcome) => {
            let mut stderr: String = outcome.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
            let stdout = match out {
                Some(path) => match std::fs::File::create(&path).and_then(|mut f| f.write_all(&outcome.body)) {
                    Ok(()) => Vec::new(),
                    Err(e) => {
                        stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                        return Invocation {
                            exit_code: exit::IO,
                            stdout: Vec::new(),
                            stderr,
                        };
                    }
                },
                None => outcome.body,
            };
            Invocation {
                exit_code: outcome.exit_code,
                stdout,
                stderr,
            }
        }
    }
}

/// Merges flags over the config file and dispatches.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.format = Some(f);
    }
    if let Some(p) = cli.precision {
        cfg.precision = Some(p);
    }
    match cli.command {
        Command::Budget { source, d1, d2 } => {
            apply_source(&mut cfg, source);
            override_opt(&mut cfg.d1_m, d1);
            override_opt(&mut cfg.d2_m, d2);
            budget(&cfg)
        }
        Command::Range { source, d1 } => {
            apply_source(&mut cfg, source);
            override_opt(&mut cfg.d1_m, d1);
            range_cmd(&cfg)
        }
        Command::Region { source, grid } => {
            apply_source(&mut cfg, source);
            apply_grid(&mut cfg, grid)?;
            region(&cfg)
        }
        Command::Scenario { list, name, device } => scenario(&cfg, list, name, device),
        Command::Deploy { sweep, values } => {
            match (sweep, values.is_empty()) {
                (Some(parameter), _) => cfg.sweep = Some(SweepSpec { parameter, values }),
                (None, false) => return Err(CliError::Config("--values needs --sweep".into())),
                (None, true) => {}
            }
            deploy(&cfg)
        }
        Command::Validate {
            source,
            peak_power_w,
            data_rate_bps,
            table,
        } => {
            if table {
                return targets(&cfg);
            }
            apply_source(&mut cfg, source);
            override_opt(&mut cfg.peak_power_w, peak_power_w);
            override_opt(&mut cfg.data_rate_bps, data_rate_bps);
            validate(&cfg)
        }
    }
}

fn override_opt<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

fn apply_source(cfg: &mut RunConfig, source: SourceArgs) {
    if source.preset.is_some() {
        cfg.preset = source.preset;
        cfg.profiles = None;
    }
    override_opt(&mut cfg.device, source.device);
}

/// Default region grid: d1 linear over [0.5, 10] m, d2 logarithmic over
/// [1, 1000] m, 100 cells each.
pub fn default_grid() -> GridSpec {
    GridSpec {
        d1: Axis::linear(0.5, 10.0, 100),
        d2: Axis::logarithmic(1.0, 1000.0, 100),
    }
}

fn apply_grid(cfg: &mut RunConfig, g: GridArgs) -> Result<(), CliError> {
    let mut grid = cfg.grid.unwrap_or_else(default_grid);
    override_axis(&mut grid.d1, g.d1_min, g.d1_max, g.n1, g.d1_spacing);
    override_axis(&mut grid.d2, g.d2_min, g.d2_max, g.n2, g.d2_spacing);
    grid.validate().map_err(CliError::from_model)?;
    cfg.grid = Some(grid);
    override_opt(&mut cfg.cell_cap, g.cell_cap);
    Ok(())
}

fn override_axis(axis: &mut Axis, min: Option<f64>, max: Option<f64>, n: Option<usize>, spacing: Option<Spacing>) {
    axis.min_m = min.unwrap_or(axis.min_m);
    axis.max_m = max.unwrap_or(axis.max_m);
    axis.count = n.unwrap_or(axis.count);
    axis.spacing = spacing.unwrap_or(axis.spacing);
}

#[derive(Serialize)]
struct BudgetRecord {
    d1_m: f64,
    d2_m: f64,
    configuration: Configuration,
    #[serde(flatten)]
    link: FeasibilityResult,
}

fn budget(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    let (setup, provenance) = cfg.link_setup()?;
    let d1 = cfg.require_d1()?;
    let configuration = cfg.configuration.unwrap_or_default();
    let d2 = match (configuration, cfg.d2_m) {
        (Configuration::Monostatic, None) => d1,
        _ => cfg.require_d2()?,
    };
    let geometry = LinkGeometry::new(d1, d2, setup.gamma_forward, setup.gamma_reverse, setup.carrier, configuration)
        .map_err(CliError::from_model)?;
    let link = link_feasible(&setup.exciter, &setup.tag, &setup.reader, &geometry).map_err(CliError::from_model)?;
    let record = BudgetRecord {
        d1_m: d1,
        d2_m: d2,
        configuration,
        link,
    };
    let body = match cfg.format() {
        Format::Json => {
            let mut resolved = cfg.resolved(&setup);
            resolved.d2_m = Some(d2);
            json_document("budget", Some(&resolved), provenance.as_ref(), &record, digits)?
        }
        Format::Csv => {
            let n = |x| csv_number(x, digits);
            csv_table(
                &[
                    "device_type",
                    "uplink",
                    "d1_m",
                    "d2_m",
                    "tag_power_dbm",
                    "reader_power_dbm",
                    "powered",
                    "powerup_margin_db",
                    "detected",
                    "detection_margin_db",
                    "feasible",
                ],
                [vec![
                    link.device_type.to_string(),
                    uplink_label(&link),
                    n(d1),
                    n(d2),
                    csv_optional(link.tag_power_dbm, digits),
                    n(link.reader_power_dbm),
                    csv_bool(link.powered).into(),
                    csv_optional(link.powerup_margin_db, digits),
                    csv_bool(link.detected).into(),
                    n(link.detection_margin_db),
                    csv_bool(link.feasible).into(),
                ]],
            )?
        }
    };
    Ok(Outcome::ok(body))
}

fn uplink_label(link: &FeasibilityResult) -> String {
    serde_json::to_value(link.uplink)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

#[derive(Serialize)]
struct RangeRecord {
    device_type: DeviceType,
    d1_m: f64,
    /// `null` when no power-up constraint applies.
    max_powerup_d1_m: Option<f64>,
    powered: bool,
    max_d2_m: f64,
}

fn range_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    let (setup, provenance) = cfg.link_setup()?;
    let d1 = cfg.require_d1()?;
    let limits = RangeLimits::new(&setup).map_err(CliError::from_model)?;
    let reach = limits.max_d2_at(d1).map_err(CliError::from_model)?;
    let record = RangeRecord {
        device_type: setup.tag.device_type(),
        d1_m: d1,
        max_powerup_d1_m: limits.max_powerup_d1.meters(),
        powered: reach.powered,
        max_d2_m: reach.max_d2_m,
    };
    let body = match cfg.format() {
        Format::Json => json_document("range", Some(&cfg.resolved(&setup)), provenance.as_ref(), &record, digits)?,
        Format::Csv => csv_table(
            &["device_type", "d1_m", "max_powerup_d1_m", "powered", "max_d2_m"],
            [vec![
                record.device_type.to_string(),
                csv_number(d1, digits),
                match limits.max_powerup_d1 {
                    Reach::Bounded(m) => csv_number(m, digits),
                    Reach::Unbounded => "unbounded".into(),
                },
                csv_bool(reach.powered).into(),
                csv_number(reach.max_d2_m, digits),
            ]],
        )?,
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct RegionDocument<'a> {
    device_type: DeviceType,
    grid: &'a GridSpec,
    config_fingerprint: &'a str,
    max_powerup_d1_m: Option<f64>,
    feasible_cells: usize,
    d1_m: &'a [f64],
    d2_m: &'a [f64],
    feasible: Vec<Vec<u8>>,
    powerup_margin_db: Vec<Vec<Option<f64>>>,
    detection_margin_db: Vec<Vec<f64>>,
    boundary: Vec<BoundaryPoint>,
}

fn matrix<T: Copy, U>(region: &OperatingRegion, data: &[T], f: impl Fn(T) -> U) -> Vec<Vec<U>> {
    data.chunks(region.cols()).map(|row| row.iter().map(|&v| f(v)).collect()).collect()
}

/// Serializes a region as row-major CSV: one row per cell, d1 outer, d2 inner.
pub fn region_csv(region: &OperatingRegion, digits: usize) -> Result<Vec<u8>, CliError> {
    let d1: Vec<String> = region.d1_m.iter().map(|&v| csv_number(v, digits)).collect();
    let d2: Vec<String> = region.d2_m.iter().map(|&v| csv_number(v, digits)).collect();
    let rows = (0..region.rows()).flat_map(|i| (0..region.cols()).map(move |j| (i, j))).map(|(i, j)| {
        let k = region.index(i, j);
        [
            d1[i].clone(),
            d2[j].clone(),
            csv_bool(region.feasible[k]).to_string(),
            csv_optional(region.powerup_margin_db[k], digits),
            csv_number(region.detection_margin_db[k], digits),
        ]
    });
    csv_table(&["d1_m", "d2_m", "feasible", "powerup_margin_db", "detection_margin_db"], rows)
}

fn region(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    let (setup, provenance) = cfg.link_setup()?;
    let grid = cfg.grid.unwrap_or_else(default_grid);
    let options = RegionOptions {
        cell_cap: cfg.cell_cap(),
        ..Default::default()
    };
    let region = range::compute_region_with(&setup, &grid, &options).map_err(CliError::from_model)?;
    let body = match cfg.format() {
        Format::Csv => region_csv(&region, digits)?,
        Format::Json => {
            let limits = RangeLimits::new(&setup).map_err(CliError::from_model)?;
            let doc = RegionDocument {
                device_type: region.device_type,
                grid: &region.grid,
                config_fingerprint: &region.config_fingerprint,
                max_powerup_d1_m: limits.max_powerup_d1.meters(),
                feasible_cells: region.feasible_count(),
                d1_m: &region.d1_m,
                d2_m: &region.d2_m,
                feasible: matrix(&region, &region.feasible, u8::from),
                powerup_margin_db: matrix(&region, &region.powerup_margin_db, |v| v),
                detection_margin_db: matrix(&region, &region.detection_margin_db, |v| v),
                boundary: boundary(&region),
            };
            let mut resolved = cfg.resolved(&setup);
            resolved.grid = Some(grid);
            json_document("region", Some(&resolved), provenance.as_ref(), &doc, digits)?
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct ScenarioRecord {
    scenario: aiot_link::Scenario,
    /// Sensitivity implied by the scenario's noise budget.
    noise_sensitivity_dbm: f64,
    max_powerup_d1_m: Option<f64>,
}

fn scenario(cfg: &RunConfig, list: bool, name: Option<String>, device: Option<DeviceType>) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    if list || name.is_none() {
        let names = preset_names();
        let body = match cfg.format() {
            Format::Json => json_document("scenario", None::<&()>, None::<&()>, &names, digits)?,
            Format::Csv => csv_table(&["name"], names.iter().map(|n| [*n]))?,
        };
        return Ok(Outcome::ok(body));
    }
    let mut s = preset_scenario(name.as_deref().unwrap_or_default()).map_err(CliError::from_model)?;
    if let Some(d) = device.or(cfg.device) {
        s = s.with_device(d);
    }
    let limits = RangeLimits::new(&s.link_setup()).map_err(CliError::from_model)?;
    let record = ScenarioRecord {
        noise_sensitivity_dbm: reader_sensitivity(&s.noise).dbm(),
        max_powerup_d1_m: limits.max_powerup_d1.meters(),
        scenario: s,
    };
    let body = match cfg.format() {
        Format::Json => json_document("scenario", None::<&()>, None::<&()>, &record, digits)?,
        Format::Csv => {
            let s = &record.scenario;
            let n = |x| csv_number(x, digits);
            csv_table(
                &[
                    "name",
                    "topology",
                    "environment",
                    "device_type",
                    "exciter_tx_power_dbm",
                    "exciter_gain_dbi",
                    "reader_gain_dbi",
                    "sensitivity_dbm",
                    "tag_gain_dbi",
                    "gamma_forward",
                    "gamma_reverse",
                    "frequency_hz",
                    "max_powerup_d1_m",
                ],
                [vec![
                    s.name.clone(),
                    s.topology.number().to_string(),
                    format!("{:?}", s.environment).to_lowercase(),
                    s.tag.device_type().to_string(),
                    n(s.exciter.tx_power.dbm()),
                    n(s.exciter.antenna_gain.dbi()),
                    n(s.reader.antenna_gain.dbi()),
                    n(s.reader.sensitivity.dbm()),
                    n(s.tag.antenna_gain().dbi()),
                    n(s.gamma_forward),
                    n(s.gamma_reverse),
                    n(s.carrier.frequency_hz()),
                    csv_optional(record.max_powerup_d1_m, digits),
                ]],
            )?
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
#[serde(untagged)]
enum DeployResult {
    Coverage(CoverageReport),
    Sweep { parameter: SweepParameter, points: Vec<SweepPoint> },
}

fn deploy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    if cfg.preset.is_some() || cfg.profiles.is_some() {
        return Err(CliError::Config(
            "deploy takes its profiles from 'deployment'; remove 'preset'/'profiles'".into(),
        ));
    }
    let dep = cfg
        .deployment
        .as_ref()
        .ok_or_else(|| CliError::Config("deploy needs a 'deployment' block in --config".into()))?;
    dep.validate().map_err(CliError::from_model)?;
    let mut warnings = Vec::new();
    let result = match &cfg.sweep {
        Some(spec) => DeployResult::Sweep {
            parameter: spec.parameter,
            points: coverage_sweep(dep, spec.parameter, &spec.values).map_err(CliError::from_model)?,
        },
        None => {
            let report = evaluate_deployment(dep).map_err(CliError::from_model)?;
            warnings.extend(report.clamps.iter().map(|c| c.to_string()));
            DeployResult::Coverage(report)
        }
    };
    let body = match (cfg.format(), &result) {
        (Format::Json, _) => json_document("deploy", Some(cfg), None::<&()>, &result, digits)?,
        (Format::Csv, DeployResult::Sweep { points, .. }) => csv_table(
            &["value", "coverage_fraction"],
            points
                .iter()
                .map(|p| [csv_number(p.value, digits), csv_number(p.coverage_fraction, digits)]),
        )?,
        (Format::Csv, DeployResult::Coverage(report)) => csv_table(
            &[
                "tag",
                "exciter",
                "reader",
                "d1_m",
                "d2_m",
                "powered",
                "powerup_margin_db",
                "detected",
                "detection_margin_db",
                "feasible",
            ],
            report.per_tag.iter().map(|c| {
                [
                    c.tag.to_string(),
                    c.exciter.to_string(),
                    c.reader.to_string(),
                    csv_number(c.d1_m, digits),
                    csv_number(c.d2_m, digits),
                    csv_bool(c.result.powered).into(),
                    csv_optional(c.result.powerup_margin_db, digits),
                    csv_bool(c.result.detected).into(),
                    csv_number(c.result.detection_margin_db, digits),
                    csv_bool(c.result.feasible).into(),
                ]
            }),
        )?,
    };
    Ok(Outcome {
        body,
        exit_code: exit::OK,
        warnings,
    })
}

#[derive(Serialize)]
struct ValidationRecord {
    device_type: DeviceType,
    peak_power_w: Option<f64>,
    data_rate_bps: f64,
    passed: bool,
    violations: Vec<Violation>,
}

fn validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    let (setup, provenance) = cfg.link_setup()?;
    let rate = cfg
        .data_rate_bps
        .ok_or_else(|| CliError::Config("data_rate_bps is required for validate".into()))?;
    let violations = validate_device(&setup.tag, rate);
    let record = ValidationRecord {
        device_type: setup.tag.device_type(),
        peak_power_w: setup.tag.peak_power_consumption_w(),
        data_rate_bps: rate,
        passed: violations.is_empty(),
        violations,
    };
    let body = match cfg.format() {
        Format::Json => json_document("validate", Some(&cfg.resolved(&setup)), provenance.as_ref(), &record, digits)?,
        Format::Csv => csv_table(
            &["rule", "observed", "limit", "message"],
            record.violations.iter().map(|v| {
                [
                    v.rule.to_string(),
                    csv_number(v.observed, digits),
                    csv_number(v.limit, digits),
                    v.message.clone(),
                ]
            }),
        )?,
    };
    Ok(Outcome {
        body,
        exit_code: if record.passed { exit::OK } else { exit::VIOLATIONS },
        warnings: Vec::new(),
    })
}

fn targets(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let digits = cfg.precision()?;
    let table = targets_table();
    let body = match cfg.format() {
        Format::Json => json_document("validate", None::<&()>, None::<&()>, &table, digits)?,
        Format::Csv => {
            let value = serde_json::to_value(&table).map_err(|e| CliError::Config(e.to_string()))?;
            let mut rows = Vec::new();
            flatten_json("", &value, &mut rows);
            csv_table(&["key", "value"], rows.into_iter().map(|(k, v)| [k, v]))?
        }
    };
    Ok(Outcome::ok(body))
}

fn flatten_json(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        serde_json::Value::Object(m) => m.iter().for_each(|(k, v)| flatten_json(&key(k), v, out)),
        serde_json::Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten_json(&key(&i.to_string()), v, out)),
        serde_json::Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
