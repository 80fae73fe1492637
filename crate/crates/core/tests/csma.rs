use proptest::prelude::*;
use tvws_core::csma::{transmission_probability_by_marks, transmission_probability_from_load};
use tvws_core::montecarlo::{estimate_q, McSettings};
use tvws_core::{ContentionModel, Frame, NetworkConfig};

fn model(p: f64, h: f64, density: f64) -> ContentionModel {
    NetworkConfig {
        p_ap_w: p,
        h_ap_m: h,
        density_per_km2: density,
        ..Default::default()
    }
    .contention_model()
    .unwrap()
}

#[test]
fn detection_spot_value() {
    // Scalar evaluation of the sensing law at 5 km for a 4 W, 30 m AP pair.
    let s = model(4.0, 30.0, 1.0).detection_probability(5000.0);
    assert!((s - 0.594_827_69).abs() < 1e-7, "{s}");
    assert!(model(4.0, 30.0, 1.0).detection_probability(1.0) > 1.0 - 1e-9);
}

#[test]
fn contention_integral_against_riemann_sums() {
    // 2-D midpoint sums over a square grid around the client, r = 200 m.
    let big = model(4.0, 30.0, 1.0).contention_integral(200.0, Frame::ApCentered).unwrap();
    let small = model(0.1, 1.5, 1.0).contention_integral(200.0, Frame::ApCentered).unwrap();
    assert!((big / 1.120_115e8 - 1.0).abs() < 0.01, "{big}");
    assert!((small / 2.843_739e4 - 1.0).abs() < 0.01, "{small}");
    assert!(big / small > 10.0);
}

#[test]
fn ball_at_zero_radius_is_full_plane() {
    let m = model(1.0, 10.0, 1.0);
    let a = m.contention_integral(0.0, Frame::ClientCentered).unwrap();
    assert!((a / m.full_plane_integral() - 1.0).abs() < 1e-6);
}

// q overshoots its far value just inside the contention radius (the
// simulator reproduces the hump), so monotonicity is checked below it.
#[test]
fn q_grows_below_contention_radius() {
    for (p, h) in [(1.0, 10.0), (4.0, 1.5), (0.1, 30.0)] {
        let m = model(p, h, 1.0);
        let rc = m.contention_radius();
        let mut prev = 0.0;
        for k in 0..=20 {
            let d = 10.0 + (0.75 * rc - 10.0) * k as f64 / 20.0;
            let q = m.concurrent_transmission_probability(d).unwrap();
            assert!(q >= prev - 1e-12, "{p} {h} {d}: {q} < {prev}");
            prev = q;
        }
    }
}

#[test]
fn q_matches_simulation_at_twice_contention_radius() {
    let m = model(1.0, 10.0, 1.0);
    let d = 2.0 * m.contention_radius();
    let analytic = m.concurrent_transmission_probability(d).unwrap();
    let mc = estimate_q(&m, d, &McSettings::new(11, 10_000)).unwrap().estimates[0];
    assert!((analytic - mc.value).abs() <= 0.03, "{analytic} vs {}", mc.value);
}

#[test]
fn mean_transmission_probability_bounds() {
    let c = NetworkConfig {
        p_ap_w: 1.0,
        h_ap_m: 10.0,
        ..Default::default()
    };
    let m = c.contention_model().unwrap();
    let up = c.uplink_model().unwrap();
    let mean = m.mean_transmission_probability(&up).unwrap();
    let lo = m.transmission_probability(0.0).unwrap();
    let hi = m.transmission_probability(1e5).unwrap();
    assert!(mean >= lo && mean <= hi, "{lo} <= {mean} <= {hi}");
    let sure = |_r: f64| 1.0;
    let always = NetworkConfig { density_per_km2: 0.0, ..c }.contention_model().unwrap();
    assert!((always.transmission_probability(100.0).unwrap() - 1.0).abs() < 1e-15);
    let d = tvws_core::DeploymentModel::from_per_km2(1.0).unwrap();
    assert!(tvws_core::ServingDistance::new(&d, &sure).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_equals_mark_integral(x in 0.0f64..8000.0) {
        let a = transmission_probability_from_load(x);
        let b = transmission_probability_by_marks(x).unwrap();
        prop_assert!(((a - b) / a).abs() <= 1e-10);
    }

    #[test]
    fn pt_monotone(p in 0.1f64..3.0, h in 1.5f64..25.0, d in 0.1f64..8.0, r in 1.0f64..3000.0) {
        let m = model(p, h, d);
        let base = m.transmission_probability(r).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(m.transmission_probability(r * 1.5).unwrap() >= base - 1e-12);
        prop_assert!(model(p, h, d * 1.5).transmission_probability(r).unwrap() <= base + 1e-12);
        prop_assert!(model(p * 1.3, h, d).transmission_probability(r).unwrap() <= base + 1e-12);
        prop_assert!(model(p, h * 1.2, d).transmission_probability(r).unwrap() <= base + 1e-12);
    }

    #[test]
    fn frames_agree(p in 0.1f64..4.0, h in 1.5f64..30.0, r in 0.0f64..5000.0) {
        let m = model(p, h, 1.0);
        let a = m.contention_integral(r, Frame::ApCentered).unwrap();
        let b = m.contention_integral(r, Frame::ClientCentered).unwrap();
        prop_assert!(((a - b) / a).abs() < 1e-5, "{} vs {}", a, b);
    }
}
