//! Analytic metrics for one configuration and for sweeps over a grid.

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use tvws_core::uplink::COVERAGE_VIABILITY;
use tvws_core::{NetworkConfig, Result};

use crate::{Failure, GlobalArgs};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Mean transmission probability over served clients
    Pt,
    Coverage,
    Starvation,
    /// Per-AP throughput and area spectral efficiency (slowest)
    Throughput,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// AP transmit powers in W
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 1.0, 2.0, 4.0])]
    p_ap_w: Vec<f64>,

    /// AP antenna heights in m
    #[arg(long, value_delimiter = ',', default_values_t = [1.5, 3.0, 6.0, 9.0, 10.0, 15.0, 20.0, 30.0])]
    h_ap_m: Vec<f64>,

    /// AP densities in APs/km²
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
    density_per_km2: Vec<f64>,

    /// Metrics to compute; the others are left blank
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [Metric::Pt, Metric::Coverage, Metric::Starvation, Metric::Throughput])]
    metrics: Vec<Metric>,
}

pub const SWEEP_COLUMNS: [&str; 12] = [
    "fingerprint",
    "p_ap_w",
    "h_ap_m",
    "density_per_km2",
    "mean_pt",
    "coverage_range_m",
    "starvation",
    "throughput_bps_hz",
    "throughput_mbps",
    "ase_bps_hz_km2",
    "ase_mbps_km2",
    "status",
];

/// Metrics of one grid point. `None` means not requested or undefined.
#[derive(Debug, Clone, Default)]
struct Row {
    mean_pt: Option<f64>,
    coverage_range: Option<f64>,
    starvation: Option<f64>,
    throughput: Option<f64>,
    ase: Option<f64>,
}

fn evaluate(cfg: &NetworkConfig, metrics: &[Metric]) -> Result<Row> {
    let uplink = cfg.uplink_model()?;
    let mut row = Row::default();
    for m in metrics {
        match m {
            Metric::Pt => {
                row.mean_pt = Some(cfg.contention_model()?.mean_transmission_probability(&uplink)?)
            }
            Metric::Coverage => row.coverage_range = uplink.coverage_range(COVERAGE_VIABILITY)?,
            Metric::Starvation => {
                row.starvation = Some(uplink.starvation_probability(&cfg.deployment()?)?)
            }
            Metric::Throughput => {
                let sinr = cfg.sinr_model()?;
                let t = sinr.ap_throughput(&uplink)?;
                row.throughput = Some(t);
                row.ase = Some(t * cfg.density_per_km2);
            }
        }
    }
    Ok(row)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record(cfg: &NetworkConfig, outcome: &Result<Row>) -> Vec<String> {
    let bw = cfg.bandwidth_mhz;
    let mut rec = vec![
        cfg.fingerprint(),
        cfg.p_ap_w.to_string(),
        cfg.h_ap_m.to_string(),
        cfg.density_per_km2.to_string(),
    ];
    match outcome {
        Ok(r) => {
            rec.extend([
                cell(r.mean_pt),
                cell(r.coverage_range),
                cell(r.starvation),
                cell(r.throughput),
                cell(r.throughput.map(|t| t * bw)),
                cell(r.ase),
                cell(r.ase.map(|a| a * bw)),
                "ok".into(),
            ]);
        }
        Err(e) => {
            rec.extend(std::iter::repeat_n(String::new(), 7));
            rec.push(e.to_string());
        }
    }
    rec
}

pub fn sweep(global: &GlobalArgs, args: &SweepArgs) -> Result<(), Failure> {
    let base = global.network_config()?;
    let mut grid = Vec::new();
    for &density in &args.density_per_km2 {
        for &p in &args.p_ap_w {
            for &h in &args.h_ap_m {
                let cfg = NetworkConfig {
                    p_ap_w: p,
                    h_ap_m: h,
                    density_per_km2: density,
                    ..base.clone()
                };
                cfg.validate()?;
                grid.push(cfg);
            }
        }
    }
    let outcomes: Vec<Result<Row>> = grid.par_iter().map(|c| evaluate(c, &args.metrics)).collect();

    let mut w = csv::Writer::from_writer(global.output()?);
    w.write_record(SWEEP_COLUMNS)?;
    let mut failed = 0;
    for (cfg, outcome) in grid.iter().zip(&outcomes) {
        failed += usize::from(outcome.is_err());
        w.write_record(record(cfg, outcome))?;
    }
    w.flush()?;
    if failed > 0 {
        return Err(Failure::Numerical(format!(
            "{failed} of {} grid points failed; see the status column",
            grid.len()
        )));
    }
    Ok(())
}

pub fn analyze(global: &GlobalArgs) -> Result<(), Failure> {
    let cfg = global.network_config()?;
    let contention = cfg.contention_model()?;
    let uplink = cfg.uplink_model()?;
    let deployment = cfg.deployment()?;
    let bw = cfg.bandwidth_mhz;

    let mut rows: Vec<(&str, Option<f64>, &str)> = vec![
        ("contention_radius", Some(contention.contention_radius()), "m"),
        ("isolated_pt", Some(contention.isolated_transmission_probability()), "1"),
        ("coverage_range", uplink.coverage_range(COVERAGE_VIABILITY)?, "m"),
        ("uplink_marginal", Some(deployment.uplink_marginal(&uplink)?), "1"),
        ("starvation", Some(uplink.starvation_probability(&deployment)?), "1"),
    ];
    if deployment.density_per_m2() > 0.0 {
        let row = evaluate(&cfg, &[Metric::Pt, Metric::Throughput])?;
        rows.extend([
            ("mean_pt", row.mean_pt, "1"),
            ("throughput", row.throughput, "bps/Hz"),
            ("throughput", row.throughput.map(|t| t * bw), "Mbps"),
            ("ase", row.ase, "bps/Hz/km2"),
            ("ase", row.ase.map(|a| a * bw), "Mbps/km2"),
        ]);
    }

    let mut w = csv::Writer::from_writer(global.output()?);
    w.write_record(["fingerprint", "metric", "value", "unit"])?;
    let fp = cfg.fingerprint();
    for (name, value, unit) in rows {
        w.write_record([fp.as_str(), name, &cell(value), unit])?;
    }
    w.flush()?;
    Ok(())
}
