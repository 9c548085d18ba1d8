use aiot_link::link::{DEFAULT_M_PASSIVE, DEFAULT_POWERUP_THRESHOLD_DBM};
use aiot_link::rf::{db_to_linear, linear_to_db, q_function, reader_sensitivity, snr_min_for_ber, ModulationSpec};
use aiot_link::*;
use proptest::prelude::*;

/// Forward power as a dB-domain sum, independent of the linear-domain path.
fn forward_db(p_t: f64, g_t: f64, g_tag: f64, freq: f64, d1: f64, gamma: f64) -> f64 {
    let lambda = 299_792_458.0 / freq;
    p_t + g_t + g_tag + 20.0 * (lambda / (4.0 * std::f64::consts::PI)).log10() - 10.0 * gamma * d1.log10()
}

fn reverse_db(fwd_db: f64, g_tag: f64, freq: f64, g_r: f64, m: f64, d2: f64, gamma: f64) -> f64 {
    let lambda = 299_792_458.0 / freq;
    fwd_db + g_tag + 20.0 * (lambda / (4.0 * std::f64::consts::PI)).log10() + g_r + 10.0 * m.log10()
        - 10.0 * gamma * d2.log10()
}

#[derive(Debug, Clone, Copy)]
struct Draw {
    p_t: f64,
    g_t: f64,
    g_tag: f64,
    g_r: f64,
    m: f64,
    freq: f64,
    gamma_f: f64,
    gamma_r: f64,
    d1: f64,
    d2: f64,
    device: DeviceType,
}

impl Draw {
    fn tag(&self) -> TagProfile {
        let g = GainDbi::new(self.g_tag).unwrap();
        match self.device {
            DeviceType::A => TagProfile::passive(g, self.m.min(1.0), PowerDbm::new(DEFAULT_POWERUP_THRESHOLD_DBM).unwrap()).unwrap(),
            DeviceType::B => TagProfile::semi_passive(g, self.m).unwrap(),
            DeviceType::C => TagProfile::active(g, PowerDbm::new(self.p_t - 30.0).unwrap()).unwrap(),
        }
    }

    fn setup(&self) -> LinkSetup {
        LinkSetup {
            exciter: ExciterProfile {
                tx_power: PowerDbm::new(self.p_t).unwrap(),
                antenna_gain: GainDbi::new(self.g_t).unwrap(),
            },
            tag: self.tag(),
            reader: ReaderProfile {
                antenna_gain: GainDbi::new(self.g_r).unwrap(),
                sensitivity: PowerDbm::new(-112.0).unwrap(),
            },
            gamma_forward: self.gamma_f,
            gamma_reverse: self.gamma_r,
            carrier: Carrier::from_frequency(self.freq).unwrap(),
        }
    }
}

fn backscatter_device() -> impl Strategy<Value = DeviceType> {
    prop_oneof![Just(DeviceType::A), Just(DeviceType::B)]
}

prop_compose! {
    fn draw()(
        p_t in -10.0..33.0f64,
        g_t in 0.0..12.0f64,
        g_tag in 0.0..12.0f64,
        g_r in 0.0..12.0f64,
        m in 0.05..1.0f64,
        freq in prop_oneof![Just(0.9e9), Just(2.4e9), Just(5.8e9)],
        gamma_f in 2.0..4.0f64,
        gamma_r in 2.0..4.0f64,
        d1 in 0.1..50.0f64,
        d2 in 0.1..2000.0f64,
        device in backscatter_device(),
    ) -> Draw {
        Draw { p_t, g_t, g_tag, g_r, m, freq, gamma_f, gamma_r, d1, d2, device }
    }
}

fn log_bisect(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (1e-6_f64.ln(), 1e9_f64.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid.exp()) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

proptest! {
    #[test]
    fn db_round_trip(x in -200.0..200.0f64) {
        let back = linear_to_db(db_to_linear(x).unwrap()).unwrap();
        prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        let mw = PowerDbm::new(x).unwrap().to_mw();
        prop_assert!(mw > 0.0);
        prop_assert!((PowerDbm::from_mw(mw).unwrap().dbm() - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn sensitivity_is_additive(
        nf in 0.0..20.0f64, f in 0.0..20.0f64, w in 1.0..1e8f64, snr in -10.0..30.0f64, delta in 0.001..10.0f64
    ) {
        let s = |nf, f, w, snr| reader_sensitivity(&NoiseSpec::new(nf, f, w, snr).unwrap()).dbm();
        let base = s(nf, f, w, snr);
        prop_assert!((s(nf + delta, f, w, snr) - base - delta).abs() < 1e-9);
        prop_assert!((s(nf, f + delta, w, snr) - base - delta).abs() < 1e-9);
        prop_assert!((s(nf, f, w, snr + delta) - base - delta).abs() < 1e-9);
        prop_assert!((s(nf, f, w * 10f64.powf(delta / 10.0), snr) - base - delta).abs() < 1e-9);
    }

    #[test]
    fn snr_decreases_with_ber(a in 1e-6..0.49f64, b in 1e-6..0.49f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let snr = |ber| snr_min_for_ber(&ModulationSpec::new(1e4, ber).unwrap()).unwrap().db().unwrap();
        prop_assert!(snr(lo) > snr(hi));
    }

    #[test]
    fn q_symmetry_and_monotonicity(x in -8.0..8.0f64, dx in 1e-3..1.0f64) {
        prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() <= 1e-12);
        prop_assert!(q_function(x + dx) < q_function(x));
    }

    #[test]
    fn linear_and_db_domains_agree(d in draw()) {
        let s = d.setup();
        let r = s.evaluate(d.d1, d.d2).unwrap();
        let m = s.tag.modulation_factor();
        let fwd = forward_db(d.p_t, d.g_t, d.g_tag, d.freq, d.d1, d.gamma_f);
        prop_assert!((r.tag_power_dbm.unwrap() - fwd).abs() < 1e-9);
        let rev = reverse_db(fwd, d.g_tag, d.freq, d.g_r, m, d.d2, d.gamma_r);
        prop_assert!((r.reader_power_dbm - rev).abs() < 1e-9);
    }

    #[test]
    fn free_space_forward_is_friis(d in draw()) {
        let s = d.setup();
        let g = LinkGeometry::bistatic(d.d1, d.d2, 2.0, 2.0, s.carrier).unwrap();
        let p = forward_link_power(&s.exciter, &s.tag, &g).unwrap().to_mw();
        let lambda = s.carrier.wavelength_m();
        let friis = s.exciter.tx_power.to_mw() * s.exciter.antenna_gain.to_linear() * s.tag.antenna_gain().to_linear()
            * (lambda / (4.0 * std::f64::consts::PI * d.d1)).powi(2);
        prop_assert!((p / friis - 1.0).abs() < 1e-12);
    }

    #[test]
    fn backscatter_depends_on_distance_product(d in draw()) {
        let mut s = d.setup();
        s.gamma_reverse = s.gamma_forward;
        let a = backscatter_link_power(&s.exciter, &s.tag, &s.reader, &s.geometry(d.d1, d.d2).unwrap()).unwrap();
        let b = backscatter_link_power(&s.exciter, &s.tag, &s.reader, &s.geometry(d.d2, d.d1).unwrap()).unwrap();
        prop_assert!((a.dbm() - b.dbm()).abs() < 1e-12 * a.dbm().abs().max(1.0));
    }

    #[test]
    fn powers_monotone(d in draw(), k in 1.01..3.0f64, dg in 0.1..6.0f64) {
        let s = d.setup();
        let base = s.evaluate(d.d1, d.d2).unwrap();
        let farther1 = s.evaluate(d.d1 * k, d.d2).unwrap();
        let farther2 = s.evaluate(d.d1, d.d2 * k).unwrap();
        prop_assert!(farther1.tag_power_dbm.unwrap() < base.tag_power_dbm.unwrap());
        prop_assert!(farther1.reader_power_dbm < base.reader_power_dbm);
        prop_assert!(farther2.reader_power_dbm < base.reader_power_dbm);
        prop_assert_eq!(farther2.tag_power_dbm, base.tag_power_dbm);

        let mut g = s;
        g.exciter.antenna_gain = g.exciter.antenna_gain.offset(dg).unwrap();
        let r = g.evaluate(d.d1, d.d2).unwrap();
        prop_assert!(r.tag_power_dbm.unwrap() > base.tag_power_dbm.unwrap());
        prop_assert!(r.reader_power_dbm > base.reader_power_dbm);

        let mut g = s;
        g.tag = g.tag.with_antenna_gain(g.tag.antenna_gain().offset(dg).unwrap());
        let r = g.evaluate(d.d1, d.d2).unwrap();
        prop_assert!(r.tag_power_dbm.unwrap() > base.tag_power_dbm.unwrap());
        prop_assert!(r.reader_power_dbm > base.reader_power_dbm);

        let mut g = s;
        g.reader.antenna_gain = g.reader.antenna_gain.offset(dg).unwrap();
        prop_assert!(g.evaluate(d.d1, d.d2).unwrap().reader_power_dbm > base.reader_power_dbm);

        let m = s.tag.modulation_factor() * 0.5;
        let mut g = s;
        g.tag = g.tag.with_modulation_factor(m).unwrap();
        prop_assert!(g.evaluate(d.d1, d.d2).unwrap().reader_power_dbm < base.reader_power_dbm);
    }

    #[test]
    fn closed_forms_match_bisection(d in draw()) {
        let s = d.setup();
        let limits = RangeLimits::new(&s).unwrap();
        if let Reach::Bounded(d1_star) = limits.max_powerup_d1 {
            let thr = s.tag.powerup_threshold().unwrap().dbm();
            let oracle = log_bisect(|x| forward_db(d.p_t, d.g_t, d.g_tag, d.freq, x, d.gamma_f), thr);
            prop_assert!((d1_star / oracle - 1.0).abs() < 1e-3);
        }
        let reach = limits.max_d2_at(d.d1).unwrap();
        if reach.powered {
            let fwd = forward_db(d.p_t, d.g_t, d.g_tag, d.freq, d.d1, d.gamma_f);
            let m = s.tag.modulation_factor();
            let oracle = log_bisect(|x| reverse_db(fwd, d.g_tag, d.freq, d.g_r, m, x, d.gamma_r), -112.0);
            prop_assert!((reach.max_d2_m / oracle - 1.0).abs() < 1e-3);
        } else {
            prop_assert!(!s.evaluate(d.d1, 1.0).unwrap().powered);
        }
    }

    #[test]
    fn max_d2_decreases_with_d1(d in draw(), k in 1.01..3.0f64) {
        let s = d.setup();
        let limits = RangeLimits::new(&s).unwrap();
        let near = limits.max_d2_at(d.d1).unwrap();
        let far = limits.max_d2_at(d.d1 * k).unwrap();
        if far.powered {
            prop_assert!(far.max_d2_m < near.max_d2_m);
        }
    }
}

fn region_setup(device: DeviceType, p_t: f64, gamma: f64) -> LinkSetup {
    let mut s = preset_scenario("outdoor-ue-to-macro").unwrap().with_device(device).link_setup();
    s.exciter.tx_power = PowerDbm::new(p_t).unwrap();
    s.gamma_forward = gamma;
    s.gamma_reverse = gamma;
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn region_feasibility_is_monotone(p_t in 0.0..33.0f64, gamma in 2.0..4.0f64, device in backscatter_device()) {
        let grid = GridSpec::with_defaults((0.5, 20.0), 30, (1.0, 3000.0), 30).unwrap();
        let region = compute_region(&region_setup(device, p_t, gamma), &grid).unwrap();
        for i in 0..region.rows() {
            for j in 0..region.cols() {
                let cell = region.index(i, j);
                let expected = region.powerup_margin_db[cell].is_none_or(|m| m >= 0.0)
                    && region.detection_margin_db[cell] >= 0.0;
                prop_assert_eq!(region.feasible[cell], expected);
                if region.is_feasible(i, j) {
                    for ii in 0..=i {
                        for jj in 0..=j {
                            prop_assert!(region.is_feasible(ii, jj));
                        }
                    }
                }
            }
        }
        let edge = boundary(&region);
        prop_assert!(edge.windows(2).all(|w| w[1].d2_m <= w[0].d2_m && w[0].d1_m < w[1].d1_m));
    }

    #[test]
    fn type_a_region_within_type_b(p_t in 0.0..33.0f64, gamma in 2.0..4.0f64, m_b in DEFAULT_M_PASSIVE..2.0f64) {
        let grid = GridSpec::with_defaults((0.5, 20.0), 25, (1.0, 3000.0), 25).unwrap();
        let a = compute_region(&region_setup(DeviceType::A, p_t, gamma), &grid).unwrap();
        let mut b_setup = region_setup(DeviceType::B, p_t, gamma);
        b_setup.tag = b_setup.tag.with_modulation_factor(m_b).unwrap();
        let b = compute_region(&b_setup, &grid).unwrap();
        prop_assert!(a.feasible.iter().zip(&b.feasible).all(|(fa, fb)| !fa || *fb));
    }
}

#[test]
fn regions_are_reproducible() {
    let grid = GridSpec::with_defaults((0.5, 10.0), 64, (1.0, 1000.0), 64).unwrap();
    let s = region_setup(DeviceType::A, 23.0, 3.0);
    let a = compute_region(&s, &grid).unwrap();
    let b = compute_region(&s, &grid).unwrap();
    assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
}

fn random_deployment(seed: u64, tags: usize) -> Deployment {
    // Small LCG keeps the layout deterministic without an RNG dependency.
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 40.0 - 20.0
    };
    let s = preset_scenario("outdoor-ue-to-macro").unwrap();
    let kinds = [DeviceType::A, DeviceType::B, DeviceType::C];
    Deployment {
        exciters: (0..3).map(|_| Node::at([next(), next()], s.exciter)).collect(),
        readers: (0..2).map(|_| Node::at([next() * 10.0, next() * 10.0], s.reader)).collect(),
        tags: (0..tags)
            .map(|k| Node::at([next(), next()], TagProfile::baseline(kinds[k % 3])))
            .collect(),
        gamma_forward: 3.0,
        gamma_reverse: 3.0,
        carrier: s.carrier,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coverage_monotone_in_nodes(seed in any::<u64>(), x in -20.0..20.0f64, y in -20.0..20.0f64) {
        let dep = random_deployment(seed, 24);
        let base = evaluate_deployment(&dep).unwrap().coverage_fraction;
        let mut more = dep.clone();
        more.exciters.push(Node::at([x, y], dep.exciters[0].profile));
        prop_assert!(evaluate_deployment(&more).unwrap().coverage_fraction >= base);
        let mut more = dep.clone();
        more.readers.push(Node::at([x * 5.0, y * 5.0], dep.readers[0].profile));
        prop_assert!(evaluate_deployment(&more).unwrap().coverage_fraction >= base);
    }

    #[test]
    fn coverage_monotone_in_power_and_sensitivity(seed in any::<u64>()) {
        let dep = random_deployment(seed, 24);
        let powers: Vec<f64> = (0..10).map(|k| 5.0 + 3.0 * k as f64).collect();
        let pts = coverage_sweep(&dep, SweepParameter::ExciterTxPower, &powers).unwrap();
        prop_assert!(pts.windows(2).all(|w| w[0].coverage_fraction <= w[1].coverage_fraction));
        let sens: Vec<f64> = (0..10).map(|k| -130.0 + 5.0 * k as f64).collect();
        let pts = coverage_sweep(&dep, SweepParameter::ReaderSensitivity, &sens).unwrap();
        prop_assert!(pts.windows(2).all(|w| w[0].coverage_fraction >= w[1].coverage_fraction));
    }

    #[test]
    fn coverage_fraction_counts_feasible_tags(seed in any::<u64>()) {
        let dep = random_deployment(seed, 17);
        let report = evaluate_deployment(&dep).unwrap();
        let feasible = report.per_tag.iter().filter(|c| c.result.feasible).count();
        prop_assert_eq!(report.coverage_fraction, feasible as f64 / 17.0);
    }
}
