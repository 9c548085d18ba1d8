//! UE-illumination preset scenarios and multi-node deployment coverage.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{
    link_feasible, path_loss_exponent, Configuration, DeploymentTopology, DeviceType, ExciterProfile,
    FeasibilityResult, LinkGeometry, LinkSetup, ReaderProfile, TagProfile,
};
use crate::range::Execution;
use crate::rf::{Carrier, GainDbi, NoiseSpec, PowerDbm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    Outdoor,
    Indoor,
}

impl Environment {
    /// Path-loss exponent assumed for hops in this environment.
    pub fn default_gamma(self) -> f64 {
        match self {
            Environment::Outdoor => 3.0,
            Environment::Indoor => 2.5,
        }
    }
}

/// Version of the [`PRESETS`] table. Bump whenever a default changes.
pub const PRESET_TABLE_VERSION: u32 = 1;

pub const PRESET_FREQUENCY_HZ: f64 = 900e6;
pub const PRESET_SENSITIVITY_DBM: f64 = -112.0;
pub const PRESET_NOISE_FIGURE_DB: f64 = 6.0;
pub const PRESET_FADE_MARGIN_DB: f64 = 10.0;
pub const PRESET_BANDWIDTH_HZ: f64 = 15e3;
pub const PRESET_SNR_MIN_DB: f64 = 4.3;

/// Numeric defaults of one preset. The exciter is a UE in every preset;
/// the reader varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetDefaults {
    pub name: &'static str,
    pub topology: DeploymentTopology,
    pub environment: Environment,
    pub exciter_tx_power_dbm: f64,
    pub exciter_gain_dbi: f64,
    pub reader_gain_dbi: f64,
}

pub const PRESETS: [PresetDefaults; 3] = [
    PresetDefaults {
        name: "outdoor-ue-to-macro",
        topology: DeploymentTopology::BsAssistedSplit,
        environment: Environment::Outdoor,
        exciter_tx_power_dbm: 23.0,
        exciter_gain_dbi: 0.0,
        reader_gain_dbi: 8.0,
    },
    PresetDefaults {
        name: "indoor-ue-to-smallcell",
        topology: DeploymentTopology::BsAssistedSplit,
        environment: Environment::Indoor,
        exciter_tx_power_dbm: 23.0,
        exciter_gain_dbi: 0.0,
        reader_gain_dbi: 5.0,
    },
    PresetDefaults {
        name: "indoor-ue-to-ue",
        topology: DeploymentTopology::UeDirect,
        environment: Environment::Indoor,
        exciter_tx_power_dbm: 23.0,
        exciter_gain_dbi: 0.0,
        reader_gain_dbi: 0.0,
    },
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

/// A complete, self-describing link scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub topology: DeploymentTopology,
    pub environment: Environment,
    pub exciter: ExciterProfile,
    pub reader: ReaderProfile,
    pub tag: TagProfile,
    pub gamma_forward: f64,
    pub gamma_reverse: f64,
    pub carrier: Carrier,
    /// Receiver noise budget behind the reader sensitivity.
    pub noise: NoiseSpec,
    pub preset_table_version: u32,
}

impl Scenario {
    /// Replaces the tag with the baseline profile of `device`.
    pub fn with_device(mut self, device: DeviceType) -> Self {
        self.tag = TagProfile::baseline(device);
        self
    }

    pub fn link_setup(&self) -> LinkSetup {
        LinkSetup {
            exciter: self.exciter,
            tag: self.tag,
            reader: self.reader,
            gamma_forward: self.gamma_forward,
            gamma_reverse: self.gamma_reverse,
            carrier: self.carrier,
        }
    }
}

/// Looks up a preset by name. The preset's tag is the type A baseline.
pub fn preset_scenario(name: &str) -> Result<Scenario> {
    let p = PRESETS.iter().find(|p| p.name == name).ok_or_else(|| Error::UnknownPreset {
        name: name.to_string(),
        valid: preset_names().join(", "),
    })?;
    let gamma = p.environment.default_gamma();
    Ok(Scenario {
        name: p.name.to_string(),
        topology: p.topology,
        environment: p.environment,
        exciter: ExciterProfile {
            tx_power: PowerDbm::new(p.exciter_tx_power_dbm)?,
            antenna_gain: GainDbi::new(p.exciter_gain_dbi)?,
        },
        reader: ReaderProfile {
            antenna_gain: GainDbi::new(p.reader_gain_dbi)?,
            sensitivity: PowerDbm::new(PRESET_SENSITIVITY_DBM)?,
        },
        tag: TagProfile::baseline(DeviceType::A),
        gamma_forward: gamma,
        gamma_reverse: gamma,
        carrier: Carrier::from_frequency(PRESET_FREQUENCY_HZ)?,
        noise: NoiseSpec::new(
            PRESET_NOISE_FIGURE_DB,
            PRESET_FADE_MARGIN_DB,
            PRESET_BANDWIDTH_HZ,
            PRESET_SNR_MIN_DB,
        )?,
        preset_table_version: PRESET_TABLE_VERSION,
    })
}

/// Distances below this are clamped: the far-field model breaks down.
pub const MIN_DISTANCE_M: f64 = 0.1;

/// A positioned node in a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node<P> {
    pub position: [f64; 2],
    pub profile: P,
    /// Extra path loss in dB applied to every hop touching this node
    /// (stands in for antenna height and local clutter).
    #[serde(default)]
    pub extra_loss_db: f64,
}

impl<P> Node<P> {
    pub fn at(position: [f64; 2], profile: P) -> Self {
        Self {
            position,
            profile,
            extra_loss_db: 0.0,
        }
    }

    fn distance_to<Q>(&self, other: &Node<Q>) -> f64 {
        let dx = self.position[0] - other.position[0];
        let dy = self.position[1] - other.position[1];
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Deployment {
    pub exciters: Vec<Node<ExciterProfile>>,
    pub readers: Vec<Node<ReaderProfile>>,
    pub tags: Vec<Node<TagProfile>>,
    pub gamma_forward: f64,
    pub gamma_reverse: f64,
    pub carrier: Carrier,
}

impl Deployment {
    pub fn validate(&self) -> Result<()> {
        for (kind, n) in [
            ("exciter", self.exciters.len()),
            ("reader", self.readers.len()),
            ("tag", self.tags.len()),
        ] {
            if n == 0 {
                return Err(Error::InvalidDeployment(format!("at least one {kind} is required")));
            }
        }
        let nodes = self
            .exciters
            .iter()
            .map(|n| ("exciter", n.position, n.extra_loss_db))
            .chain(self.readers.iter().map(|n| ("reader", n.position, n.extra_loss_db)))
            .chain(self.tags.iter().map(|n| ("tag", n.position, n.extra_loss_db)));
        for (kind, pos, extra) in nodes {
            if !pos.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidDeployment(format!("{kind} position {pos:?} is not finite")));
            }
            if !extra.is_finite() {
                return Err(Error::InvalidDeployment(format!("{kind} extra_loss_db {extra} is not finite")));
            }
        }
        path_loss_exponent("gamma_forward", self.gamma_forward)?;
        path_loss_exponent("gamma_reverse", self.gamma_reverse)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum NodeRef {
    Exciter(usize),
    Reader(usize),
}

/// A hop shorter than [`MIN_DISTANCE_M`] that was evaluated at the clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceClamp {
    pub tag: usize,
    pub node: NodeRef,
    pub distance_m: f64,
    pub clamped_to_m: f64,
}

impl fmt::Display for DistanceClamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tag {} to {:?}: distance {} m clamped to {} m",
            self.tag, self.node, self.distance_m, self.clamped_to_m
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagCoverage {
    pub tag: usize,
    pub exciter: usize,
    pub reader: usize,
    pub d1_m: f64,
    pub d2_m: f64,
    pub result: FeasibilityResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub per_tag: Vec<TagCoverage>,
    pub coverage_fraction: f64,
    pub clamps: Vec<DistanceClamp>,
}

pub fn evaluate_deployment(dep: &Deployment) -> Result<CoverageReport> {
    evaluate_deployment_with(dep, Execution::default())
}

/// For every tag, evaluates every (exciter, reader) pair and keeps the one
/// with the largest limiting margin. Ties go to the lowest exciter index,
/// then the lowest reader index.
pub fn evaluate_deployment_with(dep: &Deployment, execution: Execution) -> Result<CoverageReport> {
    dep.validate()?;
    let per_tag: Vec<(TagCoverage, Vec<DistanceClamp>)> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..dep.tags.len())
                .into_par_iter()
                .map(|t| evaluate_tag(dep, t))
                .collect::<Result<_>>()?
        }
        _ => (0..dep.tags.len()).map(|t| evaluate_tag(dep, t)).collect::<Result<_>>()?,
    };
    let covered = per_tag.iter().filter(|(c, _)| c.result.feasible).count();
    let coverage_fraction = covered as f64 / dep.tags.len() as f64;
    let (per_tag, clamps): (Vec<_>, Vec<_>) = per_tag.into_iter().unzip();
    Ok(CoverageReport {
        per_tag,
        coverage_fraction,
        clamps: clamps.into_iter().flatten().collect(),
    })
}

fn clamp_distance(tag: usize, node: NodeRef, d: f64, clamps: &mut Vec<DistanceClamp>) -> f64 {
    if d < MIN_DISTANCE_M {
        clamps.push(DistanceClamp {
            tag,
            node,
            distance_m: d,
            clamped_to_m: MIN_DISTANCE_M,
        });
        MIN_DISTANCE_M
    } else {
        d
    }
}

fn evaluate_tag(dep: &Deployment, t: usize) -> Result<(TagCoverage, Vec<DistanceClamp>)> {
    let tag = &dep.tags[t];
    let mut clamps = Vec::new();
    let d1s: Vec<f64> = dep
        .exciters
        .iter()
        .enumerate()
        .map(|(i, e)| clamp_distance(t, NodeRef::Exciter(i), e.distance_to(tag), &mut clamps))
        .collect();
    let d2s: Vec<f64> = dep
        .readers
        .iter()
        .enumerate()
        .map(|(j, r)| clamp_distance(t, NodeRef::Reader(j), r.distance_to(tag), &mut clamps))
        .collect();

    let mut best: Option<TagCoverage> = None;
    for (i, exciter) in dep.exciters.iter().enumerate() {
        let forward_loss = exciter.extra_loss_db + tag.extra_loss_db;
        let exciter_profile = ExciterProfile {
            tx_power: exciter.profile.tx_power.offset(-forward_loss)?,
            ..exciter.profile
        };
        for (j, reader) in dep.readers.iter().enumerate() {
            let reverse_loss = tag.extra_loss_db + reader.extra_loss_db;
            let reader_profile = ReaderProfile {
                antenna_gain: reader.profile.antenna_gain.offset(-reverse_loss)?,
                ..reader.profile
            };
            let geometry = LinkGeometry::new(
                d1s[i],
                d2s[j],
                dep.gamma_forward,
                dep.gamma_reverse,
                dep.carrier,
                Configuration::Bistatic,
            )?;
            let result = link_feasible(&exciter_profile, &tag.profile, &reader_profile, &geometry)?;
            let better = best
                .as_ref()
                .is_none_or(|b| result.limiting_margin_db() > b.result.limiting_margin_db());
            if better {
                best = Some(TagCoverage {
                    tag: t,
                    exciter: i,
                    reader: j,
                    d1_m: d1s[i],
                    d2_m: d2s[j],
                    result,
                });
            }
        }
    }
    Ok((best.expect("deployment has exciters and readers"), clamps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Transmit power of every exciter, dBm.
    ExciterTxPower,
    /// Sensitivity of every reader, dBm.
    ReaderSensitivity,
    /// Modulation factor of every backscatter tag.
    TagModulationFactor,
    /// Carrier frequency, Hz.
    CarrierFrequency,
}

impl std::str::FromStr for SweepParameter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exciter_tx_power" => Ok(Self::ExciterTxPower),
            "reader_sensitivity" => Ok(Self::ReaderSensitivity),
            "tag_modulation_factor" => Ok(Self::TagModulationFactor),
            "carrier_frequency" => Ok(Self::CarrierFrequency),
            other => Err(format!(
                "unknown sweep parameter '{other}', expected one of exciter_tx_power, \
                 reader_sensitivity, tag_modulation_factor, carrier_frequency"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub coverage_fraction: f64,
}

/// Returns a copy of `dep` with `parameter` set to `value` on every
/// affected node. Active tags have no modulation factor and are skipped.
pub fn apply_sweep_value(dep: &Deployment, parameter: SweepParameter, value: f64) -> Result<Deployment> {
    let mut out = dep.clone();
    match parameter {
        SweepParameter::ExciterTxPower => {
            let p = PowerDbm::new(value)?;
            out.exciters.iter_mut().for_each(|e| e.profile.tx_power = p);
        }
        SweepParameter::ReaderSensitivity => {
            let s = PowerDbm::new(value)?;
            out.readers.iter_mut().for_each(|r| r.profile.sensitivity = s);
        }
        SweepParameter::TagModulationFactor => {
            for t in out.tags.iter_mut().filter(|t| t.profile.device_type() != DeviceType::C) {
                t.profile = t.profile.with_modulation_factor(value)?;
            }
        }
        SweepParameter::CarrierFrequency => out.carrier = Carrier::from_frequency(value)?,
    }
    Ok(out)
}

pub fn coverage_sweep(dep: &Deployment, parameter: SweepParameter, values: &[f64]) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::EmptySweep);
    }
    values
        .iter()
        .map(|&value| {
            let report = evaluate_deployment(&apply_sweep_value(dep, parameter, value)?)?;
            Ok(SweepPoint {
                value,
                coverage_fraction: report.coverage_fraction,
            })
        })
        .collect()
}
