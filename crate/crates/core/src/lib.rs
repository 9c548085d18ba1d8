//! Link-budget feasibility, range limits, operating regions and deployment
//! coverage for ambient-IoT backscatter and energy-harvesting devices.
//!
//! * [`rf`]: dB conversions, Q-function, SNR from BER, reader sensitivity.
//! * [`link`]: forward/backscatter/active link powers and feasibility.
//! * [`range`]: closed-form range limits and (d1, d2) operating regions.
//! * [`scenario`]: preset UE-illumination scenarios and deployment coverage.
//! * [`targets`]: design targets and device validation.
//!
//! Grid and deployment evaluation run on rayon when the `parallel` feature
//! (on by default) is enabled; results are identical either way.

pub mod error;
pub mod link;
pub mod range;
pub mod rf;
pub mod scenario;
pub mod targets;

pub use error::{Error, Result};
pub use link::{
    active_uplink_power, backscatter_link_power, factor_a, factor_b, forward_link_power, link_feasible,
    Configuration, DeploymentTopology, DeviceType, ExciterProfile, FeasibilityResult, LinkGeometry, LinkSetup,
    ReaderProfile, TagProfile, UplinkKind,
};
pub use range::{
    boundary, compute_region, compute_region_with, max_powerup_distance, max_reader_distance, Axis,
    BoundaryPoint, Execution, GridSpec, OperatingRegion, RangeLimits, Reach, ReaderReach, RegionOptions, Spacing,
};
pub use rf::{Carrier, GainDbi, ModulationSpec, NoiseSpec, PowerDbm};
pub use scenario::{
    coverage_sweep, evaluate_deployment, preset_scenario, CoverageReport, Deployment, Node, Scenario,
    SweepParameter,
};
pub use targets::{targets_table, validate_device, DesignTargets, Violation};
