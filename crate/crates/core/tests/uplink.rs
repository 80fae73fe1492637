use proptest::prelude::*;
use tvws_core::uplink::COVERAGE_VIABILITY;
use tvws_core::{DeploymentModel, NetworkConfig, UplinkModel};

fn cfg(p_ap: f64, h: f64) -> NetworkConfig {
    NetworkConfig {
        p_ap_w: p_ap,
        h_ap_m: h,
        ..Default::default()
    }
}

fn uplink(h: f64, p_c: f64, gamma_dbm: f64) -> UplinkModel {
    NetworkConfig {
        h_ap_m: h,
        p_client_w: p_c,
        uplink_threshold_dbm: gamma_dbm,
        ..Default::default()
    }
    .uplink_model()
    .unwrap()
}

#[test]
fn coverage_oracle_values() {
    // Bisection on an independent scalar evaluation of the viability law.
    let c10 = uplink(10.0, 0.1, -82.0).coverage_range(COVERAGE_VIABILITY).unwrap().unwrap();
    assert!((c10 - 345.975).abs() < 0.02, "{c10}");
    let c15 = uplink(1.5, 0.1, -82.0).coverage_range(COVERAGE_VIABILITY).unwrap().unwrap();
    assert!((c15 - 133.541).abs() < 0.02, "{c15}");
    let c30 = uplink(30.0, 0.1, -82.0).coverage_range(COVERAGE_VIABILITY).unwrap().unwrap();
    assert!(c30 > c15);
}

#[test]
fn coverage_ignores_ap_power() {
    let ranges: Vec<f64> = [0.1, 1.0, 4.0]
        .iter()
        .map(|&p| cfg(p, 30.0).uplink_model().unwrap().coverage_range(COVERAGE_VIABILITY).unwrap().unwrap())
        .collect();
    assert_eq!(ranges[0].to_bits(), ranges[1].to_bits());
    assert_eq!(ranges[1].to_bits(), ranges[2].to_bits());
}

#[test]
fn no_coverage_is_reported() {
    let up = uplink(10.0, 1e-9, -40.0);
    assert_eq!(up.coverage_range(COVERAGE_VIABILITY).unwrap(), None);
}

#[test]
fn zero_threshold_always_viable() {
    let up = uplink(10.0, 0.1, -300.0);
    assert!((up.viability_at(5000.0) - 1.0).abs() < 1e-12);
}

#[test]
fn starvation_at_full_height() {
    let dep = DeploymentModel::from_per_km2(1.0).unwrap();
    let s = uplink(30.0, 0.1, -82.0).starvation_probability(&dep).unwrap();
    assert!(s > 0.5 && s < 0.6, "{s}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn viability_monotone(h in 1.5f64..30.0, r in 1.0f64..5000.0, k in 1.001f64..3.0) {
        let up = uplink(h, 0.05, -82.0);
        let (a, b) = (up.viability_at(r), up.viability_at(r * k));
        prop_assert!(b <= a);
        if a > 1e-300 && a < 1.0 - 1e-12 {
            prop_assert!(b < a);
            prop_assert!(uplink(h, 0.06, -82.0).viability_at(r) > a);
            prop_assert!(uplink(h, 0.05, -81.0).viability_at(r) < a);
        }
    }

    #[test]
    fn starvation_decreases(d in 0.05f64..10.0, h in 1.5f64..29.0) {
        let up = uplink(h, 0.1, -82.0);
        let lo = DeploymentModel::from_per_km2(d).unwrap();
        let hi = DeploymentModel::from_per_km2(d * 1.5).unwrap();
        let s = up.starvation_probability(&lo).unwrap();
        prop_assert!(up.starvation_probability(&hi).unwrap() < s);
        prop_assert!(uplink(h + 1.0, 0.1, -82.0).starvation_probability(&lo).unwrap() < s);
    }

    #[test]
    fn thinning_integrand_is_integrable(h in 1.5f64..30.0) {
        let up = uplink(h, 0.1, -82.0);
        let end = up.support_end();
        prop_assert!(up.viability_at(end) * end < 1e-15);
    }
}
