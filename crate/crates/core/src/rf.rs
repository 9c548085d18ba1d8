//! Scalar RF math: decibel conversions, carrier wavelength, the Gaussian
//! tail function and its inverse, SNR requirements derived from a target
//! bit error rate, and reader reference sensitivity.

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density at the 290 K reference temperature, dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Absolute tolerance of [`q_inverse`] on its argument.
pub const Q_INVERSE_TOLERANCE: f64 = 1e-12;

/// Converts a decibel value to a linear power ratio.
pub fn db_to_linear(db: f64) -> Result<f64> {
    finite("dB value", db)?;
    Ok(10f64.powf(db / 10.0))
}

/// Converts a strictly positive linear power ratio to decibels.
pub fn linear_to_db(ratio: f64) -> Result<f64> {
    positive("linear ratio", ratio)?;
    Ok(10.0 * ratio.log10())
}

pub fn dbm_to_mw(power: PowerDbm) -> f64 {
    power.to_mw()
}

pub fn mw_to_dbm(mw: f64) -> Result<PowerDbm> {
    PowerDbm::from_mw(mw)
}

/// Power level in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PowerDbm(f64);

impl PowerDbm {
    pub fn new(dbm: f64) -> Result<Self> {
        finite("power (dBm)", dbm).map(Self)
    }

    pub fn from_mw(mw: f64) -> Result<Self> {
        positive("power (mW)", mw)?;
        Self::new(10.0 * mw.log10())
    }

    pub fn dbm(self) -> f64 {
        self.0
    }

    pub fn to_mw(self) -> f64 {
        10f64.powf(self.0 / 10.0)
    }

    /// Shifts the level by `db` decibels.
    pub fn offset(self, db: f64) -> Result<Self> {
        Self::new(self.0 + db)
    }
}

impl TryFrom<f64> for PowerDbm {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PowerDbm> for f64 {
    fn from(p: PowerDbm) -> f64 {
        p.0
    }
}

/// Antenna gain in dBi.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct GainDbi(f64);

impl GainDbi {
    pub const ISOTROPIC: GainDbi = GainDbi(0.0);

    pub fn new(dbi: f64) -> Result<Self> {
        finite("gain (dBi)", dbi).map(Self)
    }

    pub fn dbi(self) -> f64 {
        self.0
    }

    pub fn to_linear(self) -> f64 {
        10f64.powf(self.0 / 10.0)
    }

    pub fn offset(self, db: f64) -> Result<Self> {
        Self::new(self.0 + db)
    }
}

impl TryFrom<f64> for GainDbi {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<GainDbi> for f64 {
    fn from(g: GainDbi) -> f64 {
        g.0
    }
}

/// RF carrier. The wavelength is derived from the frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CarrierSpec")]
pub struct Carrier {
    frequency_hz: f64,
    wavelength_m: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CarrierSpec {
    frequency_hz: f64,
    #[serde(default)]
    wavelength_m: Option<f64>,
}

impl TryFrom<CarrierSpec> for Carrier {
    type Error = Error;
    fn try_from(spec: CarrierSpec) -> Result<Self> {
        let carrier = Carrier::from_frequency(spec.frequency_hz)?;
        if let Some(wl) = spec.wavelength_m {
            if ((wl - carrier.wavelength_m) / carrier.wavelength_m).abs() > 1e-9 {
                return Err(Error::OutOfRange {
                    field: "wavelength_m",
                    value: wl,
                    range: "c / frequency_hz",
                });
            }
        }
        Ok(carrier)
    }
}

impl Carrier {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        positive("frequency_hz", frequency_hz)?;
        Ok(Self {
            frequency_hz,
            wavelength_m: SPEED_OF_LIGHT / frequency_hz,
        })
    }

    pub fn from_wavelength(wavelength_m: f64) -> Result<Self> {
        positive("wavelength_m", wavelength_m)?;
        Ok(Self {
            frequency_hz: SPEED_OF_LIGHT / wavelength_m,
            wavelength_m,
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    /// (λ/4π)², the isotropic aperture term at 1 m.
    pub fn aperture_factor(&self) -> f64 {
        let k = self.wavelength_m / (4.0 * std::f64::consts::PI);
        k * k
    }
}

/// Receiver noise budget that determines the reader reference sensitivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseSpecFields", into = "NoiseSpecFields")]
pub struct NoiseSpec {
    noise_figure_db: f64,
    fade_margin_db: f64,
    bandwidth_hz: f64,
    snr_min_db: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSpecFields {
    noise_figure_db: f64,
    fade_margin_db: f64,
    bandwidth_hz: f64,
    snr_min_db: f64,
}

impl TryFrom<NoiseSpecFields> for NoiseSpec {
    type Error = Error;
    fn try_from(f: NoiseSpecFields) -> Result<Self> {
        NoiseSpec::new(f.noise_figure_db, f.fade_margin_db, f.bandwidth_hz, f.snr_min_db)
    }
}

impl From<NoiseSpec> for NoiseSpecFields {
    fn from(n: NoiseSpec) -> Self {
        Self {
            noise_figure_db: n.noise_figure_db,
            fade_margin_db: n.fade_margin_db,
            bandwidth_hz: n.bandwidth_hz,
            snr_min_db: n.snr_min_db,
        }
    }
}

impl NoiseSpec {
    pub fn new(
        noise_figure_db: f64,
        fade_margin_db: f64,
        bandwidth_hz: f64,
        snr_min_db: f64,
    ) -> Result<Self> {
        for (field, v) in [
            ("noise_figure_db", noise_figure_db),
            ("fade_margin_db", fade_margin_db),
        ] {
            finite(field, v)?;
            if v < 0.0 {
                return Err(Error::OutOfRange {
                    field,
                    value: v,
                    range: "[0, inf)",
                });
            }
        }
        positive("bandwidth_hz", bandwidth_hz)?;
        finite("snr_min_db", snr_min_db)?;
        Ok(Self {
            noise_figure_db,
            fade_margin_db,
            bandwidth_hz,
            snr_min_db,
        })
    }

    pub fn noise_figure_db(&self) -> f64 {
        self.noise_figure_db
    }

    pub fn fade_margin_db(&self) -> f64 {
        self.fade_margin_db
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn snr_min_db(&self) -> f64 {
        self.snr_min_db
    }
}

/// Reader reference sensitivity: thermal floor plus noise figure, fade
/// margin, bandwidth and required SNR.
pub fn reader_sensitivity(noise: &NoiseSpec) -> PowerDbm {
    // Every term is finite by construction.
    PowerDbm(
        THERMAL_NOISE_DBM_PER_HZ
            + noise.noise_figure_db
            + noise.fade_margin_db
            + 10.0 * noise.bandwidth_hz.log10()
            + noise.snr_min_db,
    )
}

/// Upper-tail probability of the standard normal distribution.
pub fn q_function(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 1.0 - q_function(-x);
    }
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of [`q_function`] on (0, 1), solved by safeguarded Newton
/// iteration inside a shrinking bisection bracket.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange {
            field: "probability",
            value: p,
            range: "(0, 1)",
        });
    }
    if p > 0.5 {
        return Ok(-q_inverse(1.0 - p)?);
    }
    // Q(0) = 0.5 >= p and Q(40) underflows to 0 < p. Newton runs on
    // ln Q(x) - ln p, which stays well conditioned in the deep tail.
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    let target = p.ln();
    let mut x = 0.0;
    for _ in 0..500 {
        let q = q_function(x);
        if q == p {
            return Ok(x);
        }
        if q > p {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= Q_INVERSE_TOLERANCE {
            return Ok(0.5 * (lo + hi));
        }
        let slope = normal_pdf(x);
        let newton = if q > 0.0 && slope > 0.0 {
            x + (q.ln() - target) * q / slope
        } else {
            f64::NAN
        };
        if (newton - x).abs() < Q_INVERSE_TOLERANCE * 1e-3 {
            return Ok(newton);
        }
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(x)
}

/// Target operating point of the tag's uplink modulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModulationFields", into = "ModulationFields")]
pub struct ModulationSpec {
    bit_rate_bps: f64,
    target_ber: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModulationFields {
    bit_rate_bps: f64,
    target_ber: f64,
}

impl TryFrom<ModulationFields> for ModulationSpec {
    type Error = Error;
    fn try_from(f: ModulationFields) -> Result<Self> {
        ModulationSpec::new(f.bit_rate_bps, f.target_ber)
    }
}

impl From<ModulationSpec> for ModulationFields {
    fn from(m: ModulationSpec) -> Self {
        Self {
            bit_rate_bps: m.bit_rate_bps,
            target_ber: m.target_ber,
        }
    }
}

impl ModulationSpec {
    pub fn new(bit_rate_bps: f64, target_ber: f64) -> Result<Self> {
        positive("bit_rate_bps", bit_rate_bps)?;
        if !(target_ber > 0.0 && target_ber < 0.5) {
            return Err(Error::OutOfRange {
                field: "target_ber",
                value: target_ber,
                range: "(0, 0.5)",
            });
        }
        Ok(Self {
            bit_rate_bps,
            target_ber,
        })
    }

    pub fn bit_rate_bps(&self) -> f64 {
        self.bit_rate_bps
    }

    pub fn target_ber(&self) -> f64 {
        self.target_ber
    }
}

/// Mapping from bit error rate to required SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BerModel {
    /// Coherent binary detection, BER = Q(sqrt(2 SNR)).
    #[default]
    CoherentBinary,
}

impl BerModel {
    /// Required linear SNR for the given BER.
    pub fn required_snr_linear(self, ber: f64) -> Result<f64> {
        match self {
            BerModel::CoherentBinary => {
                let x = q_inverse(ber)?;
                if x.abs() <= Q_INVERSE_TOLERANCE {
                    Ok(0.0)
                } else {
                    Ok(x * x / 2.0)
                }
            }
        }
    }
}

/// Required SNR at the reader.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrRequirement {
    Db(f64),
    /// The target BER is met at any SNR (BER at its 0.5 limit).
    Unconstrained,
}

impl SnrRequirement {
    pub fn db(self) -> Option<f64> {
        match self {
            SnrRequirement::Db(v) => Some(v),
            SnrRequirement::Unconstrained => None,
        }
    }
}

pub fn snr_min_for_ber(modulation: &ModulationSpec) -> Result<SnrRequirement> {
    snr_min_for_ber_with(BerModel::default(), modulation)
}

pub fn snr_min_for_ber_with(model: BerModel, modulation: &ModulationSpec) -> Result<SnrRequirement> {
    let snr = model.required_snr_linear(modulation.target_ber)?;
    if snr <= 0.0 {
        Ok(SnrRequirement::Unconstrained)
    } else {
        Ok(SnrRequirement::Db(10.0 * snr.log10()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Upper normal tail by composite Simpson quadrature on [x, x + 14].
    fn tail_by_quadrature(x: f64) -> f64 {
        let (a, b, n) = (x, x + 14.0, 40_000);
        let h = (b - a) / n as f64;
        let mut acc = normal_pdf(a) + normal_pdf(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * normal_pdf(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn inverse_by_bisection(p: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if tail_by_quadrature(mid) > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_to_linear(0.0).unwrap(), 1.0);
        assert!((db_to_linear(3.0103).unwrap() - 2.0).abs() < 1e-6);
        assert!((db_to_linear(-30.0).unwrap() - 0.001).abs() < 1e-15);
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-1.0).is_err());
    }

    #[test]
    fn dbm_milliwatt_conversions() {
        assert_eq!(dbm_to_mw(PowerDbm::new(0.0).unwrap()), 1.0);
        assert!((dbm_to_mw(PowerDbm::new(23.0).unwrap()) - 199.526).abs() < 1e-3);
        assert!((dbm_to_mw(PowerDbm::new(30.0).unwrap()) - 1000.0).abs() < 1e-9);
        assert!(mw_to_dbm(0.0).is_err());
        assert!(mw_to_dbm(-2.0).is_err());
        assert!((mw_to_dbm(1000.0).unwrap().dbm() - 30.0).abs() < 1e-12);
        assert!(PowerDbm::new(f64::NAN).is_err());
    }

    #[test]
    fn q_function_matches_quadrature() {
        assert_eq!(q_function(0.0), 0.5);
        for x in [0.25, 1.0, 2.326, 3.5, 5.0] {
            let q = q_function(x);
            assert!((q - tail_by_quadrature(x)).abs() < 1e-11 * q.max(1e-3), "x={x} q={q:e} o={:e}", tail_by_quadrature(x));
        }
    }

    #[test]
    fn q_inverse_reference_points() {
        let oracle_1pct = inverse_by_bisection(0.01);
        let oracle_01pct = inverse_by_bisection(0.001);
        assert!((oracle_1pct - 2.3263).abs() < 1e-3);
        assert!((oracle_01pct - 3.0902).abs() < 1e-3);
        assert!((q_inverse(0.01).unwrap() - oracle_1pct).abs() < 1e-8);
        assert!((q_inverse(0.001).unwrap() - oracle_01pct).abs() < 1e-8);
        assert_eq!(q_inverse(0.5).unwrap(), 0.0);
        assert!((q_inverse(0.99).unwrap() + oracle_1pct).abs() < 1e-8);
    }

    #[test]
    fn q_inverse_rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(q_inverse(p).is_err(), "p={p}");
        }
    }

    #[test]
    fn q_inverse_round_trip() {
        let mut p = 1e-6;
        while p <= 0.5 {
            let x = q_inverse(p).unwrap();
            assert!((q_function(x) - p).abs() < 1e-9, "p={p}");
            p *= 1.37;
        }
        // Deep tail still resolves.
        let x = q_inverse(1e-300).unwrap();
        assert!(x > 37.0 && x < 38.0);
    }

    #[test]
    fn snr_for_one_percent_ber() {
        let m = ModulationSpec::new(10_000.0, 0.01).unwrap();
        let snr = snr_min_for_ber(&m).unwrap().db().unwrap();
        assert!((snr - 4.3).abs() < 0.05, "{snr}");
        let oracle = inverse_by_bisection(0.01);
        assert!((snr - 10.0 * (oracle * oracle / 2.0).log10()).abs() < 1e-7);
    }

    #[test]
    fn snr_for_tenth_percent_ber() {
        let m = ModulationSpec::new(10_000.0, 0.001).unwrap();
        let snr = snr_min_for_ber(&m).unwrap().db().unwrap();
        assert!((snr - 6.79).abs() < 0.05, "{snr}");
    }

    #[test]
    fn snr_near_half_ber_is_unconstrained() {
        let m = ModulationSpec::new(10_000.0, 0.5 - 1e-15).unwrap();
        assert_eq!(snr_min_for_ber(&m).unwrap(), SnrRequirement::Unconstrained);
        assert!(ModulationSpec::new(10_000.0, 0.5).is_err());
        assert!(ModulationSpec::new(10_000.0, 0.0).is_err());
        assert!(ModulationSpec::new(0.0, 0.01).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        let s = reader_sensitivity(&NoiseSpec::new(6.0, 10.0, 15_000.0, 4.3).unwrap());
        assert!((s.dbm() - (-111.94)).abs() < 0.005, "{}", s.dbm());
        let s = reader_sensitivity(&NoiseSpec::new(0.0, 0.0, 1.0, 0.0).unwrap());
        assert_eq!(s.dbm(), -174.0);
        let s = reader_sensitivity(&NoiseSpec::new(6.0, 10.0, 1e6, 4.3).unwrap());
        assert!((s.dbm() - (-93.70)).abs() < 1e-9);
    }

    #[test]
    fn noise_spec_rejects_invalid() {
        assert!(NoiseSpec::new(-1.0, 0.0, 1.0, 0.0).is_err());
        assert!(NoiseSpec::new(0.0, -1.0, 1.0, 0.0).is_err());
        assert!(NoiseSpec::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(NoiseSpec::new(0.0, 0.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn carrier_wavelength() {
        let c = Carrier::from_frequency(900e6).unwrap();
        assert!((c.wavelength_m() * c.frequency_hz() / SPEED_OF_LIGHT - 1.0).abs() < 1e-9);
        assert!((c.wavelength_m() - 0.333_102_731).abs() < 1e-9);
        assert!(Carrier::from_frequency(0.0).is_err());
        let json = serde_json::to_string(&c).unwrap();
        let back: Carrier = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Carrier>(r#"{"frequency_hz":9e8,"wavelength_m":1.0}"#).is_err());
    }
}
