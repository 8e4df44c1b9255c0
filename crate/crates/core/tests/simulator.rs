use relaycap::analytic::{
    direct_outage, exact_outage_csb, exact_outage_ir, gamma_threshold, k_relay_bound_outage,
    k_relay_expected_phases,
};
use relaycap::channel::{ChannelVariances, VarianceTriplet};
use relaycap::simulator::{
    estimate_expected_phases, estimate_outage, estimate_throughput, simulate, McConfig, MonteCarlo,
    Protocol,
};

fn inside(x: f64, (lo, hi): (f64, f64)) -> bool {
    lo <= x && x <= hi
}

#[test]
fn ir_outage_matches_exact_oracle() {
    for (i, (sd, sr, rd, g)) in [
        (1.0, 1.0, 1.0, 0.2),
        (1.0, 9.0, 2.25, 0.05),
        (0.5, 0.3, 4.0, 0.4),
        (2.0, 1.0, 0.5, 1.0),
    ]
    .into_iter()
    .enumerate()
    {
        let v = VarianceTriplet::new(sd, sr, rd).unwrap();
        let cfg = McConfig::from_threshold(v.into(), g, Protocol::Ir).unwrap();
        let est = estimate_outage(&cfg, MonteCarlo::new(2_000_000, 100 + i as u64)).unwrap();
        let exact = exact_outage_ir(g, v);
        assert!(inside(exact, est.interval(4.0)), "{exact} vs {est:?}");
        assert!(est.warning.is_none());
    }
}

#[test]
fn csb_outage_matches_min_cut_form() {
    let v = VarianceTriplet::new(1.0, 2.0, 0.5).unwrap();
    for g in [0.05, 0.3] {
        let cfg = McConfig::from_threshold(v.into(), g, Protocol::Csb).unwrap();
        let est = estimate_outage(&cfg, MonteCarlo::new(2_000_000, 21)).unwrap();
        assert!(inside(exact_outage_csb(g, v), est.interval(4.0)));
    }
}

#[test]
fn bounding_event_matches_closed_form() {
    for k in 1..=3usize {
        let v = ChannelVariances::new(1.0, vec![1.5; k], vec![0.7; k]).unwrap();
        let g = 0.4;
        let cfg = McConfig::from_threshold(v.clone(), g, Protocol::Bound).unwrap();
        let est = estimate_outage(&cfg, MonteCarlo::new(2_000_000, 30 + k as u64)).unwrap();
        assert!(
            inside(k_relay_bound_outage(g, &v), est.interval(4.0)),
            "K={k}: {} vs {est:?}",
            k_relay_bound_outage(g, &v)
        );
    }
}

#[test]
fn bounding_event_is_contained_in_protocol_outage() {
    // with common random numbers every bounding-event trial is also a
    // protocol outage
    let v = ChannelVariances::uniform(1.0, 0.8, 1.2, 3).unwrap();
    let mc = MonteCarlo::new(500_000, 8);
    let g = 0.5;
    let ir = estimate_outage(
        &McConfig::from_threshold(v.clone(), g, Protocol::Ir).unwrap(),
        mc,
    )
    .unwrap();
    let bound = estimate_outage(
        &McConfig::from_threshold(v, g, Protocol::Bound).unwrap(),
        mc,
    )
    .unwrap();
    assert!(bound.hits > 1000);
    assert!(ir.hits > bound.hits);
}

#[test]
fn expected_phases_law() {
    for (k, sd, g) in [
        (1usize, 1.0, std::f64::consts::LN_2),
        (1, 0.5, 0.2),
        (2, 1.0, 0.7),
        (3, 2.0, 1.5),
    ] {
        let v = ChannelVariances::uniform(sd, 1.3, 0.9, k).unwrap();
        let cfg = McConfig::from_threshold(v.clone(), g, Protocol::Ir).unwrap();
        let est =
            estimate_expected_phases(&cfg, MonteCarlo::new(1_000_000, 50 + k as u64)).unwrap();
        let expect = k_relay_expected_phases(g, &v);
        if k == 1 {
            assert!((expect - (1.0 + direct_outage(g, sd))).abs() < 1e-14);
        }
        // widen the 95% interval to about 4 standard errors
        let half = (est.ci_high - est.ci_low) / 2.0 * 2.05;
        assert!(
            (est.mean - expect).abs() <= half,
            "K={k}: {} vs {expect}",
            est.mean
        );
    }
}

#[test]
fn throughput_across_seeds() {
    let v = VarianceTriplet::new(1.0, 4.0, 2.0).unwrap();
    let (rate, snr) = (0.25, 1.0);
    let g = gamma_threshold(rate, snr, 2);
    let p = exact_outage_ir(g, v);
    let expect = 2.0 * rate * (1.0 - p) / (1.0 + direct_outage(g, v.sd()));
    let cfg = McConfig::from_rate(v.into(), rate, snr, Protocol::Ir).unwrap();
    let covered = (0..10)
        .filter(|&seed| {
            let est = estimate_throughput(&cfg, MonteCarlo::new(200_000, 1000 + seed)).unwrap();
            inside(expect, (est.ci_low, est.ci_high))
        })
        .count();
    // 95% intervals: 8 or fewer hits out of 10 has probability below 9%
    assert!(covered >= 8, "{covered}/10 intervals cover {expect}");
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let v = ChannelVariances::uniform(1.0, 2.0, 0.5, 2).unwrap();
    let cfg = McConfig::from_threshold(v, 0.3, Protocol::Ir).unwrap();
    // deliberately not a multiple of the block size
    let mc = MonteCarlo::new(300_001, 77);
    let reference = simulate(&cfg, mc.with_workers(1)).unwrap();
    for w in [2, 3, 4, 8] {
        assert_eq!(simulate(&cfg, mc.with_workers(w)).unwrap(), reference);
    }
    assert_eq!(simulate(&cfg, mc).unwrap(), reference);
    assert_ne!(
        simulate(&cfg, MonteCarlo::new(300_001, 78)).unwrap(),
        reference
    );
}

#[test]
fn zero_trials_and_workers_are_rejected() {
    let cfg = McConfig::from_threshold(VarianceTriplet::unit().into(), 0.1, Protocol::Ir).unwrap();
    assert!(simulate(&cfg, MonteCarlo::new(0, 1)).is_err());
    assert!(simulate(&cfg, MonteCarlo::new(10, 1).with_workers(0)).is_err());
}
