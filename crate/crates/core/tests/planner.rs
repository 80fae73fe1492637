use std::path::PathBuf;

use proptest::prelude::*;
use tvws_core::planner::{
    channels_needed, load_households, plan_with_ase, required_ase, PlanInput,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn input(households: u64, rate: f64, area: f64) -> PlanInput {
    PlanInput {
        households,
        area_km2: area,
        per_household_mbps: rate,
        available_channels: 37,
        channel_bandwidth_mhz: 6.0,
    }
}

#[test]
fn three_row_fixture() {
    let set = load_households(fixture("three_households.csv")).unwrap();
    assert_eq!(set.len(), 3);
    // Two rows share coordinates.
    assert_eq!(set.households[0].lat, set.households[1].lat);
}

#[test]
fn sharon_springs_demand() {
    let set = load_households(fixture("sharon_springs.csv")).unwrap();
    assert_eq!(set.len(), 400);
    assert!((set.bounding_box_area_km2() - 3.0).abs() < 1e-3);
    let plan_input = PlanInput::from_households(&set, None, 10.0, 37, 6.0);
    let required = required_ase(&plan_input).unwrap();
    assert!((required - 1333.33).abs() < 1.0, "{required}");
    let plan = plan_with_ase(&plan_input, 12.0).unwrap();
    assert_eq!(plan.per_channel_ase, 72.0);
    assert_eq!(plan.channels_needed, 19);
    assert!(plan.feasible);
}

#[test]
fn explicit_area_wins() {
    let set = load_households(fixture("sharon_springs.csv")).unwrap();
    let plan_input = PlanInput::from_households(&set, Some(4.0), 10.0, 37, 6.0);
    assert_eq!(required_ase(&plan_input).unwrap(), 1000.0);
}

#[test]
fn worked_examples() {
    assert_eq!(required_ase(&input(0, 10.0, 3.0)).unwrap(), 0.0);
    assert_eq!(required_ase(&input(1, 1.0, 1.0)).unwrap(), 1.0);
    assert!(required_ase(&input(10, 1.0, 0.0)).is_err());
    assert_eq!(channels_needed(1333.0, 72.0, 37).unwrap().channels_needed, 19);
    assert_eq!(channels_needed(50.0, 72.0, 37).unwrap().channels_needed, 1);
    assert_eq!(channels_needed(0.0, 72.0, 37).unwrap().channels_needed, 0);
    let short = channels_needed(1333.0, 10.0, 37).unwrap();
    assert!(!short.feasible);
    assert_eq!(short.shortfall, 134 - 37);
    assert!(channels_needed(10.0, 0.0, 37).is_err());
}

proptest! {
    #[test]
    fn channels_monotone(req in 0.0f64..1e5, extra in 0.0f64..1e4, per in 0.1f64..500.0, k in 1.0f64..10.0) {
        let base = channels_needed(req, per, 37).unwrap().channels_needed;
        prop_assert!(channels_needed(req + extra, per, 37).unwrap().channels_needed >= base);
        prop_assert!(channels_needed(req, per * k, 37).unwrap().channels_needed <= base);
    }

    #[test]
    fn demand_is_linear(n in 0u64..100_000, rate in 0.0f64..100.0, area in 0.01f64..1000.0, k in 1u64..20) {
        let one = required_ase(&input(n, rate, area)).unwrap();
        let more_homes = required_ase(&input(n * k, rate, area)).unwrap();
        let more_rate = required_ase(&input(n, rate * k as f64, area)).unwrap();
        let tol = 1e-12 * more_homes.abs().max(1.0);
        prop_assert!((more_homes - k as f64 * one).abs() <= tol);
        prop_assert!((more_rate - k as f64 * one).abs() <= tol);
    }
}
