//! Two-hop backscatter link budget.
//!
//! The forward hop carries exciter power to the tag; the reverse hop
//! carries the modulated reflection to the reader:
//!
//! ```text
//! A        = P_T * G_T / d1^γf
//! B        = G_tag * (λ / 4π)^2
//! P_tag    = A * B
//! P_reader = A * B^2 * G_R * M / d2^γr
//! ```
//!
//! Distances are in meters against an implicit 1 m reference distance, so
//! that γ = 2 reduces the forward hop to the Friis equation. All products
//! are evaluated in the linear domain (mW) and converted to dBm at the end.
//!
//! Active (type C) devices have no backscatter hop. Their uplink uses the
//! same path-loss form as a one-hop link, `P_dev * G_tag * G_R * (λ/4π)^2 / d2^γ`.
//! That budget is a model extension, and results carry
//! [`UplinkKind::ActiveExtension`] so it stays labeled as such.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};
use crate::rf::{Carrier, GainDbi, PowerDbm};

/// Default modulation factor of a passive tag.
pub const DEFAULT_M_PASSIVE: f64 = 0.25;
/// Default modulation factor of a semi-passive tag.
pub const DEFAULT_M_SEMI_PASSIVE: f64 = 1.0;
/// Power-up threshold commonly assumed for passive RFID-class tags, dBm.
pub const DEFAULT_POWERUP_THRESHOLD_DBM: f64 = -19.0;
/// Omni-directional baseline tag antenna gain, dBi.
pub const DEFAULT_TAG_GAIN_DBI: f64 = 2.0;
/// Transmit power assumed for an active tag when none is given, dBm.
pub const DEFAULT_ACTIVE_TX_POWER_DBM: f64 = -10.0;

/// Ambient-IoT device class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeviceType {
    /// Passive: no energy storage, backscatter only, powered by the exciter.
    A,
    /// Semi-passive: limited storage, backscatter possibly with reflection gain.
    B,
    /// Active: limited storage, generates its own carrier.
    C,
}

impl DeviceType {
    pub const ALL: [DeviceType; 3] = [DeviceType::A, DeviceType::B, DeviceType::C];

    pub fn description(self) -> &'static str {
        match self {
            DeviceType::A => "passive",
            DeviceType::B => "semi-passive",
            DeviceType::C => "active",
        }
    }
}

impl fmt::Display for DeviceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DeviceType::A => "A",
            DeviceType::B => "B",
            DeviceType::C => "C",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for DeviceType {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(DeviceType::A),
            "B" => Ok(DeviceType::B),
            "C" => Ok(DeviceType::C),
            other => Err(format!("unknown device type '{other}', expected A, B or C")),
        }
    }
}

/// Network topology a scenario belongs to. Metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeploymentTopology {
    /// Device talks bidirectionally with a base station.
    BsDirect,
    /// Device talks bidirectionally with an intermediate node (relay, IAB, UE, repeater).
    BsViaIntermediate,
    /// Device receives from one of {BS, assisting node} and transmits to the other.
    BsAssistedSplit,
    /// Device talks bidirectionally with a UE.
    UeDirect,
}

impl DeploymentTopology {
    pub fn number(self) -> u8 {
        match self {
            DeploymentTopology::BsDirect => 1,
            DeploymentTopology::BsViaIntermediate => 2,
            DeploymentTopology::BsAssistedSplit => 3,
            DeploymentTopology::UeDirect => 4,
        }
    }
}

/// An ambient-IoT device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TagFields", into = "TagFields")]
pub struct TagProfile {
    device_type: DeviceType,
    antenna_gain: GainDbi,
    modulation_factor: f64,
    powerup_threshold: Option<PowerDbm>,
    tx_power: Option<PowerDbm>,
    peak_power_consumption_w: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TagFields {
    device_type: DeviceType,
    antenna_gain_dbi: GainDbi,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulation_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    powerup_threshold_dbm: Option<PowerDbm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tx_power_dbm: Option<PowerDbm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    peak_power_consumption_w: Option<f64>,
}

impl TryFrom<TagFields> for TagProfile {
    type Error = Error;
    fn try_from(f: TagFields) -> Result<Self> {
        let m = f.modulation_factor.unwrap_or(match f.device_type {
            DeviceType::A => DEFAULT_M_PASSIVE,
            DeviceType::B | DeviceType::C => DEFAULT_M_SEMI_PASSIVE,
        });
        let tag = TagProfile::new(
            f.device_type,
            f.antenna_gain_dbi,
            m,
            f.powerup_threshold_dbm,
            f.tx_power_dbm,
        )?;
        match f.peak_power_consumption_w {
            Some(w) => tag.with_peak_power(w),
            None => Ok(tag),
        }
    }
}

impl From<TagProfile> for TagFields {
    fn from(t: TagProfile) -> Self {
        Self {
            device_type: t.device_type,
            antenna_gain_dbi: t.antenna_gain,
            modulation_factor: (t.device_type != DeviceType::C).then_some(t.modulation_factor),
            powerup_threshold_dbm: t.powerup_threshold,
            tx_power_dbm: t.tx_power,
            peak_power_consumption_w: t.peak_power_consumption_w,
        }
    }
}

impl TagProfile {
    /// Validates the per-type field rules: a power-up threshold exactly for
    /// type A, a transmit power exactly for type C, and M in (0, 1] unless
    /// the device is type B.
    pub fn new(
        device_type: DeviceType,
        antenna_gain: GainDbi,
        modulation_factor: f64,
        powerup_threshold: Option<PowerDbm>,
        tx_power: Option<PowerDbm>,
    ) -> Result<Self> {
        positive("modulation_factor", modulation_factor)?;
        if modulation_factor > 1.0 && device_type != DeviceType::B {
            return Err(Error::InvalidTag(format!(
                "modulation factor {modulation_factor} > 1 requires reflection gain, \
                 which only type B devices have"
            )));
        }
        match (device_type, powerup_threshold.is_some()) {
            (DeviceType::A, false) => {
                return Err(Error::InvalidTag("type A requires a power-up threshold".into()))
            }
            (DeviceType::B | DeviceType::C, true) => {
                return Err(Error::InvalidTag(format!(
                    "type {device_type} has no RF power-up threshold"
                )))
            }
            _ => {}
        }
        match (device_type, tx_power.is_some()) {
            (DeviceType::C, false) => {
                return Err(Error::InvalidTag("type C requires a transmit power".into()))
            }
            (DeviceType::A | DeviceType::B, true) => {
                return Err(Error::InvalidTag(format!(
                    "type {device_type} does not transmit actively"
                )))
            }
            _ => {}
        }
        Ok(Self {
            device_type,
            antenna_gain,
            modulation_factor,
            powerup_threshold,
            tx_power,
            peak_power_consumption_w: None,
        })
    }

    pub fn passive(antenna_gain: GainDbi, modulation_factor: f64, powerup_threshold: PowerDbm) -> Result<Self> {
        Self::new(DeviceType::A, antenna_gain, modulation_factor, Some(powerup_threshold), None)
    }

    pub fn semi_passive(antenna_gain: GainDbi, modulation_factor: f64) -> Result<Self> {
        Self::new(DeviceType::B, antenna_gain, modulation_factor, None, None)
    }

    pub fn active(antenna_gain: GainDbi, tx_power: PowerDbm) -> Result<Self> {
        Self::new(DeviceType::C, antenna_gain, DEFAULT_M_SEMI_PASSIVE, None, Some(tx_power))
    }

    /// Baseline profile for a device class: 2 dBi omni antenna, M = 0.25 and
    /// P_thr = -19 dBm for type A, M = 1 for type B, -10 dBm transmit power
    /// for type C.
    pub fn baseline(device_type: DeviceType) -> Self {
        let gain = GainDbi::new(DEFAULT_TAG_GAIN_DBI).unwrap();
        let tag = match device_type {
            DeviceType::A => Self::passive(
                gain,
                DEFAULT_M_PASSIVE,
                PowerDbm::new(DEFAULT_POWERUP_THRESHOLD_DBM).unwrap(),
            ),
            DeviceType::B => Self::semi_passive(gain, DEFAULT_M_SEMI_PASSIVE),
            DeviceType::C => Self::active(gain, PowerDbm::new(DEFAULT_ACTIVE_TX_POWER_DBM).unwrap()),
        };
        tag.expect("baseline profiles are valid")
    }

    pub fn with_peak_power(mut self, watts: f64) -> Result<Self> {
        positive("peak_power_consumption_w", watts)?;
        self.peak_power_consumption_w = Some(watts);
        Ok(self)
    }

    pub fn with_modulation_factor(self, m: f64) -> Result<Self> {
        let tag = Self::new(self.device_type, self.antenna_gain, m, self.powerup_threshold, self.tx_power)?;
        Ok(Self {
            peak_power_consumption_w: self.peak_power_consumption_w,
            ..tag
        })
    }

    pub fn with_antenna_gain(mut self, gain: GainDbi) -> Self {
        self.antenna_gain = gain;
        self
    }

    pub fn device_type(&self) -> DeviceType {
        self.device_type
    }

    pub fn antenna_gain(&self) -> GainDbi {
        self.antenna_gain
    }

    pub fn modulation_factor(&self) -> f64 {
        self.modulation_factor
    }

    pub fn powerup_threshold(&self) -> Option<PowerDbm> {
        self.powerup_threshold
    }

    pub fn tx_power(&self) -> Option<PowerDbm> {
        self.tx_power
    }

    pub fn peak_power_consumption_w(&self) -> Option<f64> {
        self.peak_power_consumption_w
    }
}

/// RF source illuminating the tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExciterProfile {
    #[serde(rename = "tx_power_dbm")]
    pub tx_power: PowerDbm,
    #[serde(rename = "antenna_gain_dbi")]
    pub antenna_gain: GainDbi,
}

/// Receiver of the tag's uplink.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReaderProfile {
    #[serde(rename = "antenna_gain_dbi")]
    pub antenna_gain: GainDbi,
    #[serde(rename = "sensitivity_dbm")]
    pub sensitivity: PowerDbm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Configuration {
    /// Exciter and reader are the same device.
    Monostatic,
    #[default]
    Bistatic,
}

pub(crate) fn path_loss_exponent(field: &'static str, gamma: f64) -> Result<f64> {
    finite(field, gamma)?;
    if gamma < 1.0 {
        return Err(Error::OutOfRange {
            field,
            value: gamma,
            range: "[1, inf)",
        });
    }
    Ok(gamma)
}

/// Distances, path-loss exponents and carrier of one exciter-tag-reader link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryFields", into = "GeometryFields")]
pub struct LinkGeometry {
    d1: f64,
    d2: f64,
    gamma_forward: f64,
    gamma_reverse: f64,
    carrier: Carrier,
    configuration: Configuration,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFields {
    d1_m: f64,
    d2_m: f64,
    gamma_forward: f64,
    gamma_reverse: f64,
    carrier: Carrier,
    #[serde(default)]
    configuration: Configuration,
}

impl TryFrom<GeometryFields> for LinkGeometry {
    type Error = Error;
    fn try_from(f: GeometryFields) -> Result<Self> {
        LinkGeometry::new(f.d1_m, f.d2_m, f.gamma_forward, f.gamma_reverse, f.carrier, f.configuration)
    }
}

impl From<LinkGeometry> for GeometryFields {
    fn from(g: LinkGeometry) -> Self {
        Self {
            d1_m: g.d1,
            d2_m: g.d2,
            gamma_forward: g.gamma_forward,
            gamma_reverse: g.gamma_reverse,
            carrier: g.carrier,
            configuration: g.configuration,
        }
    }
}

impl LinkGeometry {
    pub fn new(
        d1: f64,
        d2: f64,
        gamma_forward: f64,
        gamma_reverse: f64,
        carrier: Carrier,
        configuration: Configuration,
    ) -> Result<Self> {
        positive("d1", d1)?;
        positive("d2", d2)?;
        path_loss_exponent("gamma_forward", gamma_forward)?;
        path_loss_exponent("gamma_reverse", gamma_reverse)?;
        if configuration == Configuration::Monostatic {
            if d1 != d2 {
                return Err(Error::InvalidGeometry(format!(
                    "monostatic link needs d1 = d2, got {d1} and {d2}"
                )));
            }
            if gamma_forward != gamma_reverse {
                return Err(Error::InvalidGeometry(format!(
                    "monostatic link needs one path-loss exponent, got {gamma_forward} and {gamma_reverse}"
                )));
            }
        }
        Ok(Self {
            d1,
            d2,
            gamma_forward,
            gamma_reverse,
            carrier,
            configuration,
        })
    }

    pub fn bistatic(d1: f64, d2: f64, gamma_forward: f64, gamma_reverse: f64, carrier: Carrier) -> Result<Self> {
        Self::new(d1, d2, gamma_forward, gamma_reverse, carrier, Configuration::Bistatic)
    }

    pub fn monostatic(distance: f64, gamma: f64, carrier: Carrier) -> Result<Self> {
        Self::new(distance, distance, gamma, gamma, carrier, Configuration::Monostatic)
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    pub fn gamma_forward(&self) -> f64 {
        self.gamma_forward
    }

    pub fn gamma_reverse(&self) -> f64 {
        self.gamma_reverse
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn configuration(&self) -> Configuration {
        self.configuration
    }
}

/// Which uplink budget produced the reader-side power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UplinkKind {
    Backscatter,
    /// One-hop active transmission (type C), a model extension.
    ActiveExtension,
}

/// Outcome of checking both link conditions. Margins are reported even
/// when the link fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub device_type: DeviceType,
    pub uplink: UplinkKind,
    /// Exciter power received at the tag; absent for type C.
    pub tag_power_dbm: Option<f64>,
    pub reader_power_dbm: f64,
    pub powered: bool,
    /// Tag power minus power-up threshold; type A only.
    pub powerup_margin_db: Option<f64>,
    pub detected: bool,
    pub detection_margin_db: f64,
    pub feasible: bool,
}

impl FeasibilityResult {
    /// The binding (smaller) of the two margins.
    pub fn limiting_margin_db(&self) -> f64 {
        match self.powerup_margin_db {
            Some(p) => p.min(self.detection_margin_db),
            None => self.detection_margin_db,
        }
    }
}

/// Forward-hop factor A = P_T G_T / d1^γ in mW.
pub fn factor_a(exciter: &ExciterProfile, d1: f64, gamma: f64) -> Result<f64> {
    positive("d1", d1)?;
    finite("gamma", gamma)?;
    Ok(exciter.tx_power.to_mw() * exciter.antenna_gain.to_linear() / d1.powf(gamma))
}

/// Tag aperture factor B = G_tag (λ/4π)².
pub fn factor_b(tag: &TagProfile, carrier: &Carrier) -> f64 {
    tag.antenna_gain.to_linear() * carrier.aperture_factor()
}

fn to_dbm(mw: f64) -> Result<PowerDbm> {
    PowerDbm::from_mw(mw)
}

/// Exciter power received at the tag.
pub fn forward_link_power(exciter: &ExciterProfile, tag: &TagProfile, geometry: &LinkGeometry) -> Result<PowerDbm> {
    let a = factor_a(exciter, geometry.d1, geometry.gamma_forward)?;
    to_dbm(a * factor_b(tag, &geometry.carrier))
}

/// Backscattered power received at the reader. Rejects type C tags.
pub fn backscatter_link_power(
    exciter: &ExciterProfile,
    tag: &TagProfile,
    reader: &ReaderProfile,
    geometry: &LinkGeometry,
) -> Result<PowerDbm> {
    if tag.device_type == DeviceType::C {
        return Err(Error::WrongDeviceType {
            expected: "A or B",
            actual: DeviceType::C,
        });
    }
    let a = factor_a(exciter, geometry.d1, geometry.gamma_forward)?;
    let b = factor_b(tag, &geometry.carrier);
    let reverse = reader.antenna_gain.to_linear() * tag.modulation_factor / geometry.d2.powf(geometry.gamma_reverse);
    to_dbm(a * b * b * reverse)
}

/// One-hop uplink of an active (type C) tag.
pub fn active_uplink_power(
    tag: &TagProfile,
    reader: &ReaderProfile,
    d2: f64,
    gamma: f64,
    carrier: &Carrier,
) -> Result<PowerDbm> {
    let tx = match (tag.device_type, tag.tx_power) {
        (DeviceType::C, Some(tx)) => tx,
        (actual, _) => {
            return Err(Error::WrongDeviceType {
                expected: "C",
                actual,
            })
        }
    };
    positive("d2", d2)?;
    finite("gamma", gamma)?;
    let mw = tx.to_mw() * factor_b(tag, carrier) * reader.antenna_gain.to_linear() / d2.powf(gamma);
    to_dbm(mw)
}

/// Checks power-up at the tag (type A only) and detection at the reader.
/// Zero margin counts as success.
pub fn link_feasible(
    exciter: &ExciterProfile,
    tag: &TagProfile,
    reader: &ReaderProfile,
    geometry: &LinkGeometry,
) -> Result<FeasibilityResult> {
    let (uplink, tag_power, reader_power) = match tag.device_type {
        DeviceType::A | DeviceType::B => (
            UplinkKind::Backscatter,
            Some(forward_link_power(exciter, tag, geometry)?),
            backscatter_link_power(exciter, tag, reader, geometry)?,
        ),
        DeviceType::C => (
            UplinkKind::ActiveExtension,
            None,
            active_uplink_power(tag, reader, geometry.d2, geometry.gamma_reverse, &geometry.carrier)?,
        ),
    };
    let powerup_margin_db = match (tag.powerup_threshold, tag_power) {
        (Some(thr), Some(p)) => Some(p.dbm() - thr.dbm()),
        _ => None,
    };
    let powered = powerup_margin_db.is_none_or(|m| m >= 0.0);
    let detection_margin_db = reader_power.dbm() - reader.sensitivity.dbm();
    let detected = detection_margin_db >= 0.0;
    Ok(FeasibilityResult {
        device_type: tag.device_type,
        uplink,
        tag_power_dbm: tag_power.map(PowerDbm::dbm),
        reader_power_dbm: reader_power.dbm(),
        powered,
        powerup_margin_db,
        detected,
        detection_margin_db,
        feasible: powered && detected,
    })
}

/// Exciter, tag and reader profiles plus propagation parameters, without
/// distances. Shared input of the range, region and coverage evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSetup {
    pub exciter: ExciterProfile,
    pub tag: TagProfile,
    pub reader: ReaderProfile,
    pub gamma_forward: f64,
    pub gamma_reverse: f64,
    pub carrier: Carrier,
}

impl LinkSetup {
    pub fn validate(&self) -> Result<()> {
        path_loss_exponent("gamma_forward", self.gamma_forward)?;
        path_loss_exponent("gamma_reverse", self.gamma_reverse)?;
        Ok(())
    }

    pub fn geometry(&self, d1: f64, d2: f64) -> Result<LinkGeometry> {
        LinkGeometry::bistatic(d1, d2, self.gamma_forward, self.gamma_reverse, self.carrier)
    }

    pub fn evaluate(&self, d1: f64, d2: f64) -> Result<FeasibilityResult> {
        link_feasible(&self.exciter, &self.tag, &self.reader, &self.geometry(d1, d2)?)
    }
}
