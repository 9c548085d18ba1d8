//! 3GPP ambient-IoT design targets and checks against them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::link::{DeviceType, TagProfile};

pub const TARGETS_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositioningTarget {
    pub accuracy_m: f64,
    /// Fraction of fixes that must meet `accuracy_m`.
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignTargets {
    pub version: u32,
    /// Type A power consumption while transmitting/receiving, W.
    pub max_power_type_a_w: f64,
    /// Type C power consumption, W.
    pub max_power_type_c_w: f64,
    /// The maximum supported data rate must be at least this, bit/s.
    pub data_rate_max_floor_bps: f64,
    /// The minimum supported data rate must be at least this, bit/s.
    pub data_rate_min_floor_bps: f64,
    pub positioning_indoor: PositioningTarget,
    /// "Several tens of meters", read as 50 m.
    pub positioning_outdoor: PositioningTarget,
    pub harvester_output_min_w: f64,
    /// "A few hundred µW", read as 500 µW.
    pub harvester_output_max_w: f64,
    /// Targets that cannot be checked numerically.
    pub notes: Vec<String>,
}

pub fn targets_table() -> DesignTargets {
    DesignTargets {
        version: TARGETS_VERSION,
        max_power_type_a_w: 1e-6,
        max_power_type_c_w: 1e-3,
        data_rate_max_floor_bps: 5_000.0,
        data_rate_min_floor_bps: 100.0,
        positioning_indoor: PositioningTarget {
            accuracy_m: 3.0,
            confidence: 0.9,
        },
        positioning_outdoor: PositioningTarget {
            accuracy_m: 50.0,
            confidence: 0.9,
        },
        harvester_output_min_w: 1e-6,
        harvester_output_max_w: 500e-6,
        notes: vec![
            "Device A complexity comparable to UHF RFID ISO18000-6C (EPC C1G2)".into(),
            "Device A complexity < Device B complexity < Device C complexity".into(),
            "Device C complexity orders of magnitude lower than NB-IoT".into(),
            "Outdoor positioning 'several tens of meters' encoded as 50 m".into(),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    PowerTypeA,
    PowerTypeB,
    PowerTypeC,
    PowerOrdering,
    DataRateMin,
    DataRateMax,
}

impl RuleId {
    /// The design target the rule checks.
    pub fn target(self) -> &'static str {
        match self {
            RuleId::PowerTypeA => "3GPP A-IoT target: Device A power consumption <= 1 uW while transmitting/receiving",
            RuleId::PowerTypeB => "3GPP A-IoT target: Device B power consumption below Device C's, which is <= 1 mW",
            RuleId::PowerTypeC => "3GPP A-IoT target: Device C power consumption <= 1 mW",
            RuleId::PowerOrdering => "3GPP A-IoT target: P(Device A) <= P(Device B) < P(Device C)",
            RuleId::DataRateMin => "3GPP A-IoT target: supported data rate not less than 0.1 kbps",
            RuleId::DataRateMax => "3GPP A-IoT target: supported data rate span tops out at 5 kbps",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("rule ids serialize");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: RuleId,
    pub observed: f64,
    pub limit: f64,
    pub message: String,
}

impl Violation {
    fn new(rule: RuleId, observed: f64, limit: f64, detail: &str) -> Self {
        Self {
            rule,
            observed,
            limit,
            message: format!("{detail} ({})", rule.target()),
        }
    }
}

fn normalize(mut v: Vec<Violation>) -> Vec<Violation> {
    v.sort_by(|a, b| a.rule.cmp(&b.rule).then(a.observed.total_cmp(&b.observed)));
    v.dedup();
    v
}

/// Checks a device's peak power consumption against its class limit and
/// the claimed data rate against the supported [0.1, 5] kbps span. A
/// profile without a power figure gets no power check.
pub fn validate_device(tag: &TagProfile, claimed_data_rate_bps: f64) -> Vec<Violation> {
    let t = targets_table();
    let mut out = Vec::new();
    if let Some(w) = tag.peak_power_consumption_w() {
        match tag.device_type() {
            DeviceType::A if w > t.max_power_type_a_w => out.push(Violation::new(
                RuleId::PowerTypeA,
                w,
                t.max_power_type_a_w,
                &format!("type A draws {w} W"),
            )),
            DeviceType::B if w >= t.max_power_type_c_w => out.push(Violation::new(
                RuleId::PowerTypeB,
                w,
                t.max_power_type_c_w,
                &format!("type B draws {w} W, not below the type C bound"),
            )),
            DeviceType::C if w > t.max_power_type_c_w => out.push(Violation::new(
                RuleId::PowerTypeC,
                w,
                t.max_power_type_c_w,
                &format!("type C draws {w} W"),
            )),
            _ => {}
        }
    }
    let rate = claimed_data_rate_bps;
    if rate.is_nan() || rate < t.data_rate_min_floor_bps {
        out.push(Violation::new(
            RuleId::DataRateMin,
            rate,
            t.data_rate_min_floor_bps,
            &format!("claimed data rate {rate} bit/s"),
        ));
    } else if rate > t.data_rate_max_floor_bps {
        out.push(Violation::new(
            RuleId::DataRateMax,
            rate,
            t.data_rate_max_floor_bps,
            &format!("claimed data rate {rate} bit/s"),
        ));
    }
    normalize(out)
}

/// Checks observed power figures of the three classes against the
/// ordering P_A <= P_B < P_C. The weaker `<=` admits both the "much less
/// than" and "less or equal" readings of the first relation.
pub fn validate_power_ordering(p_a_w: f64, p_b_w: f64, p_c_w: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if p_a_w.partial_cmp(&p_b_w).is_none_or(|o| o.is_gt()) {
        out.push(Violation::new(
            RuleId::PowerOrdering,
            p_b_w,
            p_a_w,
            &format!("type B draws {p_b_w} W, below type A's {p_a_w} W"),
        ));
    }
    if p_b_w.partial_cmp(&p_c_w).is_none_or(|o| o.is_ge()) {
        out.push(Violation::new(
            RuleId::PowerOrdering,
            p_b_w,
            p_c_w,
            &format!("type B draws {p_b_w} W, not below type C's {p_c_w} W"),
        ));
    }
    normalize(out)
}
