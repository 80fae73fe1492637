//! Channel budgeting from household counts or a household file.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use tvws_core::planner::{load_households, plan_with_ase, PlanInput, PlanResult};

use crate::{Failure, GlobalArgs};

#[derive(Args, Debug, Clone)]
pub struct PlanArgs {
    /// CSV of households with columns id,lat,lon
    #[arg(long, conflicts_with = "count", required_unless_present = "count")]
    households: Option<PathBuf>,

    /// Number of households, when no file is given
    #[arg(long, requires = "area")]
    count: Option<u64>,

    /// Per-household demand in Mbps
    #[arg(long, default_value_t = 10.0)]
    rate: f64,

    /// Service area in km²; overrides the household bounding box
    #[arg(long)]
    area: Option<f64>,

    /// TV channels available at the site
    #[arg(long, default_value_t = 37)]
    channels: u64,

    /// Area spectral efficiency of one channel in bps/Hz/km²
    #[arg(long, default_value_t = 12.0, conflicts_with = "model_ase")]
    ase_bps_hz_km2: f64,

    /// Use the area spectral efficiency predicted for the configured network
    #[arg(long)]
    model_ase: bool,
}

pub fn plan(global: &GlobalArgs, args: &PlanArgs) -> Result<(), Failure> {
    let cfg = global.network_config()?;
    let bandwidth = cfg.bandwidth_mhz;
    let input = match (&args.households, args.count) {
        (Some(path), _) => {
            let set = load_households(path)?;
            PlanInput::from_households(&set, args.area, args.rate, args.channels, bandwidth)
        }
        (None, Some(count)) => PlanInput {
            households: count,
            area_km2: args.area.unwrap_or(0.0),
            per_household_mbps: args.rate,
            available_channels: args.channels,
            channel_bandwidth_mhz: bandwidth,
        },
        (None, None) => return Err(Failure::Usage("need --households or --count".into())),
    };
    let ase = if args.model_ase {
        cfg.sinr_model()?.area_spectral_efficiency(&cfg.uplink_model()?)?
    } else {
        args.ase_bps_hz_km2
    };
    let result = plan_with_ase(&input, ase)?;

    print_summary(&input, ase, &result)?;
    if let Some(path) = &global.out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "households",
            "area_km2",
            "per_household_mbps",
            "required_ase_mbps_km2",
            "ase_bps_hz_km2",
            "per_channel_ase_mbps_km2",
            "channels_needed",
            "available_channels",
            "feasible",
            "shortfall",
        ])?;
        w.write_record([
            input.households.to_string(),
            input.area_km2.to_string(),
            input.per_household_mbps.to_string(),
            result.required_ase.to_string(),
            ase.to_string(),
            result.per_channel_ase.to_string(),
            result.channels_needed.to_string(),
            result.available_channels.to_string(),
            result.feasible.to_string(),
            result.shortfall.to_string(),
        ])?;
        w.flush()?;
    }
    Ok(())
}

fn print_summary(input: &PlanInput, ase: f64, r: &PlanResult) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "households:        {}", input.households)?;
    writeln!(out, "area:              {:.3} km²", input.area_km2)?;
    writeln!(out, "demand:            {:.1} Mbps/km²", r.required_ase)?;
    writeln!(out, "per channel:       {:.2} Mbps/km² ({ase:.4} bps/Hz/km²)", r.per_channel_ase)?;
    writeln!(out, "channels needed:   {} of {}", r.channels_needed, r.available_channels)?;
    if r.feasible {
        writeln!(out, "feasible:          yes")
    } else {
        writeln!(out, "feasible:          no (short by {})", r.shortfall)
    }
}
