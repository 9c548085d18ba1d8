//! Closed-form range limits and (d1, d2) operating-region grids.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{positive, Error, Result};
use crate::link::{self, factor_a, factor_b, path_loss_exponent, DeviceType, ExciterProfile, LinkSetup, ReaderProfile, TagProfile};
use crate::rf::Carrier;

/// Default cap on the number of cells a region may hold.
pub const DEFAULT_CELL_CAP: u64 = 4_000_000;

/// A distance limit that may not exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reach {
    Bounded(f64),
    /// No constraint applies (devices without an RF power-up threshold).
    Unbounded,
}

impl Reach {
    pub fn meters(self) -> Option<f64> {
        match self {
            Reach::Bounded(m) => Some(m),
            Reach::Unbounded => None,
        }
    }

    pub fn admits(self, d: f64) -> bool {
        match self {
            Reach::Bounded(m) => d <= m,
            Reach::Unbounded => true,
        }
    }
}

/// Largest exciter-tag distance at which a type A tag still powers up:
/// `d1* = (P_T G_T B / P_thr)^(1/γ)`. Types B and C are unbounded.
pub fn max_powerup_distance(exciter: &ExciterProfile, tag: &TagProfile, gamma: f64, carrier: &Carrier) -> Result<Reach> {
    path_loss_exponent("gamma", gamma)?;
    let Some(threshold) = tag.powerup_threshold() else {
        return Ok(Reach::Unbounded);
    };
    let at_one_meter = factor_a(exciter, 1.0, gamma)? * factor_b(tag, carrier);
    Ok(Reach::Bounded((at_one_meter / threshold.to_mw()).powf(1.0 / gamma)))
}

/// Reader-side reach for a fixed exciter-tag distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReaderReach {
    /// False when a type A tag cannot power up at this d1.
    pub powered: bool,
    /// Largest tag-reader distance meeting the reader sensitivity; 0 when unpowered.
    pub max_d2_m: f64,
}

/// `d2* = (A B² G_R M / S)^(1/γr)` for backscatter tags, and the one-hop
/// equivalent `(P_dev B G_R / S)^(1/γr)` for active tags.
#[allow(clippy::too_many_arguments)]
pub fn max_reader_distance(
    exciter: &ExciterProfile,
    tag: &TagProfile,
    reader: &ReaderProfile,
    d1: f64,
    gamma_forward: f64,
    gamma_reverse: f64,
    carrier: &Carrier,
) -> Result<ReaderReach> {
    positive("d1", d1)?;
    path_loss_exponent("gamma_forward", gamma_forward)?;
    path_loss_exponent("gamma_reverse", gamma_reverse)?;
    let b = factor_b(tag, carrier);
    let g_r = reader.antenna_gain.to_linear();
    let at_one_meter = match tag.device_type() {
        DeviceType::A | DeviceType::B => {
            if !max_powerup_distance(exciter, tag, gamma_forward, carrier)?.admits(d1) {
                return Ok(ReaderReach {
                    powered: false,
                    max_d2_m: 0.0,
                });
            }
            factor_a(exciter, d1, gamma_forward)? * b * b * g_r * tag.modulation_factor()
        }
        DeviceType::C => tag.tx_power().expect("type C carries a tx power").to_mw() * b * g_r,
    };
    Ok(ReaderReach {
        powered: true,
        max_d2_m: (at_one_meter / reader.sensitivity.to_mw()).powf(1.0 / gamma_reverse),
    })
}

/// Range limits of one link setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeLimits {
    setup: LinkSetup,
    pub max_powerup_d1: Reach,
}

impl RangeLimits {
    pub fn new(setup: &LinkSetup) -> Result<Self> {
        setup.validate()?;
        Ok(Self {
            setup: *setup,
            max_powerup_d1: max_powerup_distance(&setup.exciter, &setup.tag, setup.gamma_forward, &setup.carrier)?,
        })
    }

    pub fn max_d2_at(&self, d1: f64) -> Result<ReaderReach> {
        let s = &self.setup;
        max_reader_distance(&s.exciter, &s.tag, &s.reader, d1, s.gamma_forward, s.gamma_reverse, &s.carrier)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Logarithmic,
}

/// One grid axis: `count` equal cells over `[min_m, max_m]`, equal in
/// either linear or logarithmic measure. Cells are sampled at their centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min_m: f64,
    pub max_m: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(min_m: f64, max_m: f64, count: usize) -> Self {
        Self {
            min_m,
            max_m,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn logarithmic(min_m: f64, max_m: f64, count: usize) -> Self {
        Self {
            min_m,
            max_m,
            count,
            spacing: Spacing::Logarithmic,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min_m.is_finite() && self.max_m.is_finite() && self.min_m > 0.0 && self.min_m < self.max_m) {
            return Err(Error::InvalidGrid(format!(
                "{name} axis needs 0 < min < max, got [{}, {}]",
                self.min_m, self.max_m
            )));
        }
        if self.count < 2 {
            return Err(Error::InvalidGrid(format!(
                "{name} axis needs at least 2 cells, got {}",
                self.count
            )));
        }
        Ok(())
    }

    /// Cell-center coordinates in ascending order.
    pub fn centers(&self) -> Vec<f64> {
        let n = self.count as f64;
        (0..self.count)
            .map(|i| {
                let t = (i as f64 + 0.5) / n;
                match self.spacing {
                    Spacing::Linear => self.min_m + t * (self.max_m - self.min_m),
                    Spacing::Logarithmic => (self.min_m.ln() + t * (self.max_m / self.min_m).ln()).exp(),
                }
            })
            .collect()
    }

    /// Width of the cell containing `d`, relative to `d`.
    pub fn relative_cell_width(&self, d: f64) -> f64 {
        match self.spacing {
            Spacing::Linear => (self.max_m - self.min_m) / self.count as f64 / d,
            Spacing::Logarithmic => (self.max_m / self.min_m).powf(1.0 / self.count as f64) - 1.0,
        }
    }
}

/// Discretization of the (d1, d2) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub d1: Axis,
    pub d2: Axis,
}

impl GridSpec {
    pub fn new(d1: Axis, d2: Axis) -> Result<Self> {
        let grid = Self { d1, d2 };
        grid.validate()?;
        Ok(grid)
    }

    /// Linear d1 axis and logarithmic d2 axis.
    pub fn with_defaults(d1_range: (f64, f64), n1: usize, d2_range: (f64, f64), n2: usize) -> Result<Self> {
        Self::new(Axis::linear(d1_range.0, d1_range.1, n1), Axis::logarithmic(d2_range.0, d2_range.1, n2))
    }

    pub fn validate(&self) -> Result<()> {
        self.d1.validate("d1")?;
        self.d2.validate("d2")
    }

    pub fn cell_count(&self) -> u64 {
        self.d1.count as u64 * self.d2.count as u64
    }
}

/// How grid cells are scheduled. Both strategies produce identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rows in parallel via rayon; sequential when built without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionOptions {
    pub cell_cap: u64,
    pub execution: Execution,
}

impl Default for RegionOptions {
    fn default() -> Self {
        Self {
            cell_cap: DEFAULT_CELL_CAP,
            execution: Execution::default(),
        }
    }
}

/// Feasibility and margins over a (d1, d2) grid, stored row-major with d1
/// as the row index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingRegion {
    pub grid: GridSpec,
    pub device_type: DeviceType,
    pub d1_m: Vec<f64>,
    pub d2_m: Vec<f64>,
    pub feasible: Vec<bool>,
    /// `None` for devices without a power-up threshold.
    pub powerup_margin_db: Vec<Option<f64>>,
    pub detection_margin_db: Vec<f64>,
    /// SHA-256 over the setup and grid.
    pub config_fingerprint: String,
}

impl OperatingRegion {
    pub fn rows(&self) -> usize {
        self.d1_m.len()
    }

    pub fn cols(&self) -> usize {
        self.d2_m.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.cols() + j
    }

    pub fn is_feasible(&self, i: usize, j: usize) -> bool {
        self.feasible[self.index(i, j)]
    }

    pub fn feasible_count(&self) -> usize {
        self.feasible.iter().filter(|f| **f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_count() == 0
    }
}

pub fn fingerprint(setup: &LinkSetup, grid: &GridSpec) -> String {
    let bytes = serde_json::to_vec(&(setup, grid)).expect("setup serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn compute_region(setup: &LinkSetup, grid: &GridSpec) -> Result<OperatingRegion> {
    compute_region_with(setup, grid, &RegionOptions::default())
}

pub fn compute_region_with(setup: &LinkSetup, grid: &GridSpec, options: &RegionOptions) -> Result<OperatingRegion> {
    setup.validate()?;
    grid.validate()?;
    let cells = grid.cell_count();
    if cells > options.cell_cap {
        return Err(Error::GridTooLarge {
            cells,
            cap: options.cell_cap,
        });
    }
    let d1s = grid.d1.centers();
    let d2s = grid.d2.centers();
    let rows = evaluate_rows(setup, &d1s, &d2s, options.execution)?;

    let n = cells as usize;
    let mut feasible = Vec::with_capacity(n);
    let mut powerup = Vec::with_capacity(n);
    let mut detection = Vec::with_capacity(n);
    for r in rows.iter().flatten() {
        feasible.push(r.feasible);
        powerup.push(r.powerup_margin_db);
        detection.push(r.detection_margin_db);
    }
    Ok(OperatingRegion {
        grid: *grid,
        device_type: setup.tag.device_type(),
        d1_m: d1s,
        d2_m: d2s,
        feasible,
        powerup_margin_db: powerup,
        detection_margin_db: detection,
        config_fingerprint: fingerprint(setup, grid),
    })
}

fn evaluate_row(setup: &LinkSetup, d1: f64, d2s: &[f64]) -> Result<Vec<link::FeasibilityResult>> {
    d2s.iter().map(|&d2| setup.evaluate(d1, d2)).collect()
}

fn evaluate_rows(
    setup: &LinkSetup,
    d1s: &[f64],
    d2s: &[f64],
    execution: Execution,
) -> Result<Vec<Vec<link::FeasibilityResult>>> {
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            d1s.par_iter().map(|&d1| evaluate_row(setup, d1, d2s)).collect()
        }
        _ => d1s.iter().map(|&d1| evaluate_row(setup, d1, d2s)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub d1_m: f64,
    pub d2_m: f64,
}

/// Largest feasible d2 for every d1 row that has a feasible cell, in d1 order.
pub fn boundary(region: &OperatingRegion) -> Vec<BoundaryPoint> {
    (0..region.rows())
        .filter_map(|i| {
            (0..region.cols())
                .rev()
                .find(|&j| region.is_feasible(i, j))
                .map(|j| BoundaryPoint {
                    d1_m: region.d1_m[i],
                    d2_m: region.d2_m[j],
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::{GainDbi, PowerDbm};

    fn setup(device: DeviceType, tx_dbm: f64) -> LinkSetup {
        LinkSetup {
            exciter: ExciterProfile {
                tx_power: PowerDbm::new(tx_dbm).unwrap(),
                antenna_gain: GainDbi::ISOTROPIC,
            },
            tag: TagProfile::baseline(device),
            reader: ReaderProfile {
                antenna_gain: GainDbi::new(8.0).unwrap(),
                sensitivity: PowerDbm::new(-112.0).unwrap(),
            },
            gamma_forward: 3.0,
            gamma_reverse: 3.0,
            carrier: Carrier::from_frequency(900e6).unwrap(),
        }
    }

    /// Log-space bisection for the distance where a decreasing power
    /// function crosses `target_dbm`.
    fn crossing(f: impl Fn(f64) -> f64, target_dbm: f64) -> f64 {
        let (mut lo, mut hi) = (1e-4_f64.ln(), 1e8_f64.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid.exp()) >= target_dbm {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    #[test]
    fn powerup_distance_examples() {
        let s = setup(DeviceType::A, 23.0);
        let d = max_powerup_distance(&s.exciter, &s.tag, 3.0, &s.carrier).unwrap().meters().unwrap();
        let oracle = crossing(|d1| s.evaluate(d1, 1.0).unwrap().tag_power_dbm.unwrap(), -19.0);
        assert!((d / 2.604 - 1.0).abs() < 0.005, "{d}");
        assert!((d / oracle - 1.0).abs() < 1e-9);
        let d2 = max_powerup_distance(&s.exciter, &s.tag, 2.0, &s.carrier).unwrap().meters().unwrap();
        assert!((d2 / 4.20 - 1.0).abs() < 0.005, "{d2}");

        // Tag power at 1 m equals the threshold exactly.
        let at_one = s.evaluate(1.0, 1.0).unwrap().tag_power_dbm.unwrap();
        let mut t = s;
        t.tag = TagProfile::passive(t.tag.antenna_gain(), 0.25, PowerDbm::new(at_one).unwrap()).unwrap();
        let d = max_powerup_distance(&t.exciter, &t.tag, 3.0, &t.carrier).unwrap().meters().unwrap();
        assert!((d - 1.0).abs() < 1e-12);

        let b = setup(DeviceType::B, 23.0);
        assert_eq!(max_powerup_distance(&b.exciter, &b.tag, 3.0, &b.carrier).unwrap(), Reach::Unbounded);
    }

    #[test]
    fn reader_distance_examples() {
        let b = setup(DeviceType::B, 23.0);
        let reach = RangeLimits::new(&b).unwrap().max_d2_at(2.0).unwrap();
        assert!(reach.powered);
        assert!((reach.max_d2_m / 314.0 - 1.0).abs() < 0.01, "{}", reach.max_d2_m);
        let oracle = crossing(|d2| b.evaluate(2.0, d2).unwrap().reader_power_dbm, -112.0);
        assert!((reach.max_d2_m / oracle - 1.0).abs() < 1e-9);

        let a = setup(DeviceType::A, 23.0);
        let reach = RangeLimits::new(&a).unwrap().max_d2_at(2.0).unwrap();
        assert!((reach.max_d2_m / 198.0 - 1.0).abs() < 0.01, "{}", reach.max_d2_m);

        let unpowered = RangeLimits::new(&a).unwrap().max_d2_at(5.0).unwrap();
        assert_eq!(
            unpowered,
            ReaderReach {
                powered: false,
                max_d2_m: 0.0
            }
        );

        let mut z = b;
        let at_one = b.evaluate(2.0, 1.0).unwrap().reader_power_dbm;
        z.reader.sensitivity = PowerDbm::new(at_one).unwrap();
        let reach = RangeLimits::new(&z).unwrap().max_d2_at(2.0).unwrap();
        assert!((reach.max_d2_m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn active_reader_distance_ignores_d1() {
        let c = setup(DeviceType::C, 23.0);
        let limits = RangeLimits::new(&c).unwrap();
        let near = limits.max_d2_at(1.0).unwrap();
        let far = limits.max_d2_at(1000.0).unwrap();
        assert_eq!(near, far);
        let oracle = crossing(|d2| c.evaluate(1.0, d2).unwrap().reader_power_dbm, -112.0);
        assert!((near.max_d2_m / oracle - 1.0).abs() < 1e-9);
    }

    #[test]
    fn axis_centers() {
        let lin = Axis::linear(0.0 + 1.0, 3.0, 4).centers();
        assert_eq!(lin, vec![1.25, 1.75, 2.25, 2.75]);
        let log = Axis::logarithmic(1.0, 100.0, 2).centers();
        assert!((log[0] - 10f64.powf(0.5)).abs() < 1e-12);
        assert!((log[1] - 10f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::with_defaults((0.0, 1.0), 4, (1.0, 10.0), 4).is_err());
        assert!(GridSpec::with_defaults((2.0, 1.0), 4, (1.0, 10.0), 4).is_err());
        assert!(GridSpec::with_defaults((1.0, 2.0), 1, (1.0, 10.0), 4).is_err());
        assert!(GridSpec::with_defaults((1.0, 2.0), 2, (1.0, f64::INFINITY), 4).is_err());
    }

    #[test]
    fn cell_cap_is_enforced() {
        let grid = GridSpec::with_defaults((0.5, 10.0), 100, (1.0, 1000.0), 100).unwrap();
        let opts = RegionOptions {
            cell_cap: 9_999,
            ..Default::default()
        };
        assert_eq!(
            compute_region_with(&setup(DeviceType::A, 23.0), &grid, &opts),
            Err(Error::GridTooLarge { cells: 10_000, cap: 9_999 })
        );
    }

    #[test]
    fn type_a_region_truncates_at_powerup_limit() {
        let s = setup(DeviceType::A, 23.0);
        let grid = GridSpec::with_defaults((0.5, 10.0), 60, (1.0, 1000.0), 60).unwrap();
        let region = compute_region(&s, &grid).unwrap();
        let limit = 2.603_627_7;
        assert!(!region.is_empty());
        for i in 0..region.rows() {
            for j in 0..region.cols() {
                if region.is_feasible(i, j) {
                    assert!(region.d1_m[i] <= limit);
                }
            }
        }
        let edge = boundary(&region);
        assert!(edge.last().unwrap().d1_m <= limit);
        assert!(edge.last().unwrap().d1_m + (10.0 - 0.5) / 60.0 > limit);
    }

    #[test]
    fn type_b_region_contains_type_a() {
        let grid = GridSpec::with_defaults((0.5, 10.0), 40, (1.0, 1000.0), 40).unwrap();
        let a = compute_region(&setup(DeviceType::A, 23.0), &grid).unwrap();
        let b = compute_region(&setup(DeviceType::B, 23.0), &grid).unwrap();
        assert!(a.feasible.iter().zip(&b.feasible).all(|(fa, fb)| !fa || *fb));
        assert!(b.feasible_count() > a.feasible_count());
    }

    #[test]
    fn hopeless_transmit_power_gives_empty_region() {
        let grid = GridSpec::with_defaults((0.5, 10.0), 20, (1.0, 1000.0), 20).unwrap();
        let region = compute_region(&setup(DeviceType::B, -100.0), &grid).unwrap();
        assert!(region.is_empty());
        assert!(boundary(&region).is_empty());
    }

    #[test]
    fn single_cell_boundary() {
        let s = setup(DeviceType::B, 23.0);
        let grid = GridSpec::with_defaults((1.0, 3.0), 2, (1.0, 1e6), 2).unwrap();
        let mut region = compute_region(&s, &grid).unwrap();
        region.feasible = vec![true, false, false, false];
        assert_eq!(boundary(&region).len(), 1);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let grid = GridSpec::with_defaults((0.5, 10.0), 37, (1.0, 1000.0), 41).unwrap();
        let s = setup(DeviceType::A, 23.0);
        let seq = compute_region_with(&s, &grid, &RegionOptions { execution: Execution::Sequential, ..Default::default() }).unwrap();
        let par = compute_region_with(&s, &grid, &RegionOptions { execution: Execution::Parallel, ..Default::default() }).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.config_fingerprint.len(), 64);
    }
}
