//! JSON run configuration and its resolution into model inputs.

use std::path::Path;

use aiot_link::range::DEFAULT_CELL_CAP;
use aiot_link::{preset_scenario, Configuration, Deployment, DeviceType, GridSpec, LinkSetup, SweepParameter};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Everything a run needs. Command-line flags override fields read from
/// `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Named preset scenario; exclusive with `profiles`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Swaps the preset's tag for the baseline profile of this class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<DeviceType>,
    /// Inline profiles; exclusive with `preset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<LinkSetup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub configuration: Option<Configuration>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deployment: Option<Deployment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_rate_bps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
}

/// Where the link profiles of a run came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub preset: String,
    pub preset_table_version: u32,
    /// Preset numbers are modeling assumptions, not measured values.
    pub note: &'static str,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn precision(&self) -> Result<usize, CliError> {
        let p = self.precision.unwrap_or(DEFAULT_PRECISION);
        if (1..=MAX_PRECISION).contains(&p) {
            Ok(p)
        } else {
            Err(CliError::Config(format!("precision must be in 1..={MAX_PRECISION}, got {p}")))
        }
    }

    pub fn cell_cap(&self) -> u64 {
        self.cell_cap.unwrap_or(DEFAULT_CELL_CAP)
    }

    /// Resolves the link profiles from exactly one of `preset` or `profiles`.
    pub fn link_setup(&self) -> Result<(LinkSetup, Option<Provenance>), CliError> {
        let mut setup = match (&self.preset, &self.profiles) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either 'preset' or 'profiles', not both".into()))
            }
            (None, None) => return Err(CliError::Config("one of 'preset' or 'profiles' is required".into())),
            (None, Some(p)) => {
                if self.device.is_some() {
                    return Err(CliError::Config(
                        "'device' applies to presets only; set the tag in 'profiles' instead".into(),
                    ));
                }
                p.validate().map_err(CliError::from_model)?;
                (*p, None)
            }
            (Some(name), None) => {
                let mut scenario = preset_scenario(name).map_err(CliError::from_model)?;
                if let Some(d) = self.device {
                    scenario = scenario.with_device(d);
                }
                let provenance = Provenance {
                    preset: scenario.name.clone(),
                    preset_table_version: scenario.preset_table_version,
                    note: "preset numeric defaults are modeling assumptions",
                };
                (scenario.link_setup(), Some(provenance))
            }
        };
        if let Some(w) = self.peak_power_w {
            setup.0.tag = setup
                .0
                .tag
                .with_peak_power(w)
                .map_err(|e| CliError::Config(format!("peak_power_w: {e}")))?;
        }
        Ok(setup)
    }

    pub fn require_d1(&self) -> Result<f64, CliError> {
        require_distance("d1_m", self.d1_m)
    }

    pub fn require_d2(&self) -> Result<f64, CliError> {
        require_distance("d2_m", self.d2_m)
    }

    /// Copy of the config with the link source replaced by inline profiles,
    /// so that it re-runs without the preset table.
    pub fn resolved(&self, setup: &LinkSetup) -> Self {
        Self {
            preset: None,
            device: None,
            profiles: Some(*setup),
            peak_power_w: None,
            ..self.clone()
        }
    }
}

fn require_distance(field: &str, value: Option<f64>) -> Result<f64, CliError> {
    match value {
        None => Err(CliError::Config(format!("{field} is required"))),
        Some(d) if !(d.is_finite() && d > 0.0) => {
            Err(CliError::Config(format!("{field} must be a positive distance in meters, got {d}")))
        }
        Some(d) => Ok(d),
    }
}
