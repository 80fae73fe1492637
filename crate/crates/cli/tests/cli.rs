use std::path::Path;
use std::process::{Command, Output};

fn tvws(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvws"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(tvws(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(tvws(&[]).status.code(), Some(1));
    assert_eq!(tvws(&["--help"]).status.code(), Some(0));
}

#[test]
fn regulatory_cap_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hot.toml");
    std::fs::write(&path, "p_ap_w = 5\n").unwrap();
    let cfg = path.to_str().unwrap();
    let refused = tvws(&["analyze", "--config", cfg]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("FCC"));
    assert!(tvws(&["analyze", "--config", cfg, "--override-regulatory"]).status.success());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.toml");
    std::fs::write(&path, "p_ap_watts = 1\n").unwrap();
    assert_eq!(tvws(&["analyze", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn sweep_schema_and_order() {
    let out = tvws(&[
        "sweep", "--p-ap-w", "1,0.1", "--h-ap-m", "10", "--density-per-km2", "1", "--metrics", "pt,coverage",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "fingerprint,p_ap_w,h_ap_m,density_per_km2,mean_pt,coverage_range_m,starvation,\
         throughput_bps_hz,throughput_mbps,ase_bps_hz_km2,ase_mbps_km2,status"
    );
    assert_eq!(lines.len(), 3);
    // Grid order, not completion order; unrequested metrics stay blank.
    assert!(lines[1].contains(",1,10,1,"));
    assert!(lines[2].contains(",0.1,10,1,"));
    assert!(lines[1].ends_with(",,,,,,ok"));
    let again = tvws(&[
        "sweep", "--p-ap-w", "1,0.1", "--h-ap-m", "10", "--density-per-km2", "1", "--metrics", "pt,coverage",
    ]);
    assert_eq!(text.as_bytes(), again.stdout.as_slice());
}

#[test]
fn plan_from_fixture() {
    let out = tvws(&["plan", "--households", &fixture("sharon_springs.csv"), "--rate", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("channels needed:   19 of 37"), "{text}");
    assert!(text.contains("feasible:          yes"));
}

#[test]
fn plan_needs_a_demand_source() {
    assert_eq!(tvws(&["plan"]).status.code(), Some(1));
    assert_eq!(tvws(&["plan", "--count", "10"]).status.code(), Some(1));
    assert!(tvws(&["plan", "--count", "10", "--area", "1"]).status.success());
}

#[test]
fn validate_default_config_passes() {
    let out = tvws(&["validate", "--reps", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let dumps = dir.path().join("reps");
    let a = tvws(&["simulate", "--seed", "9", "--reps", "300", "--radii", "300", "--replications-dir", dumps.to_str().unwrap()]);
    let b = tvws(&["simulate", "--seed", "9", "--reps", "300", "--radii", "300"]);
    let c = tvws(&["simulate", "--seed", "10", "--reps", "300", "--radii", "300"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let dump = std::fs::read_to_string(dumps.join("pt_r_m300.csv")).unwrap();
    assert_eq!(dump.lines().count(), 301);
}
