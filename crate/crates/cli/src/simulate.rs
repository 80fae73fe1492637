//! Monte Carlo runs and the analytic-versus-simulation report.

use std::fs::File;
use std::path::{Path, PathBuf};

use clap::Args;
use tvws_core::montecarlo::{
    estimate_pt, estimate_q, estimate_sinr_ccdf, estimate_starvation, estimate_uplink_marginal,
    Estimate, McRun, McSettings,
};
use tvws_core::units::db_to_linear;
use tvws_core::NetworkConfig;

use crate::{Failure, GlobalArgs, ToleranceProfile};

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Client distances in m at which the serving AP's transmission probability is estimated
    #[arg(long, value_delimiter = ',', default_values_t = [100.0, 300.0, 700.0])]
    radii: Vec<f64>,

    /// Client distance in m for the SINR estimates
    #[arg(long, default_value_t = 200.0)]
    sinr_distance: f64,

    /// SINR thresholds in dB
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 5.0, 10.0])]
    betas_db: Vec<f64>,

    /// AP separations in m at which the concurrent transmission probability is estimated
    #[arg(long, value_delimiter = ',')]
    pair_distances: Vec<f64>,

    /// Directory for per-replication CSV dumps
    #[arg(long)]
    replications_dir: Option<PathBuf>,
}

const SIMULATE_COLUMNS: [&str; 8] = [
    "fingerprint",
    "estimator",
    "parameter",
    "value",
    "estimate",
    "stderr",
    "n",
    "mean_attempts",
];

struct Labeled {
    name: String,
    parameter: &'static str,
    value: Option<f64>,
    run: McRun,
}

fn dump(dir: &Path, runs: &[Labeled]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)?;
    for l in runs {
        let file = match l.value {
            Some(v) => format!("{}_{}{}.csv", l.name, l.parameter, v),
            None => format!("{}.csv", l.name),
        };
        l.run.write_replications_csv(File::create(dir.join(file))?)?;
    }
    Ok(())
}

pub fn simulate(global: &GlobalArgs, args: &SimulateArgs) -> Result<(), Failure> {
    let cfg = global.network_config()?;
    let settings = McSettings::new(global.seed, global.reps);
    let contention = cfg.contention_model()?;
    let uplink = cfg.uplink_model()?;
    let deployment = cfg.deployment()?;

    let mut runs = Vec::new();
    for &r in &args.radii {
        runs.push(Labeled {
            name: "pt".into(),
            parameter: "r_m",
            value: Some(r),
            run: estimate_pt(&contention, r, &settings)?,
        });
    }
    for &d in &args.pair_distances {
        runs.push(Labeled {
            name: "q".into(),
            parameter: "d_m",
            value: Some(d),
            run: estimate_q(&contention, d, &settings)?,
        });
    }
    if !args.betas_db.is_empty() {
        runs.push(Labeled {
            name: "sinr".into(),
            parameter: "r_m",
            value: Some(args.sinr_distance),
            run: estimate_sinr_ccdf(&cfg.sinr_model()?, args.sinr_distance, &args.betas_db, &settings)?,
        });
    }
    runs.push(Labeled {
        name: "starvation".into(),
        parameter: "",
        value: None,
        run: estimate_starvation(&deployment, &uplink, &settings)?,
    });
    runs.push(Labeled {
        name: "uplink_marginal".into(),
        parameter: "",
        value: None,
        run: estimate_uplink_marginal(&deployment, &uplink, &settings)?,
    });

    let fp = cfg.fingerprint();
    let mut w = csv::Writer::from_writer(global.output()?);
    w.write_record(SIMULATE_COLUMNS)?;
    for l in &runs {
        for (label, e) in l.run.labels.iter().zip(&l.run.estimates) {
            let estimator = if l.run.labels.len() > 1 {
                format!("{}:{label}", l.name)
            } else {
                l.name.clone()
            };
            w.write_record([
                fp.clone(),
                estimator,
                l.parameter.to_string(),
                l.value.map(|v| v.to_string()).unwrap_or_default(),
                e.value.to_string(),
                e.stderr.to_string(),
                e.n.to_string(),
                l.run.mean_attempts().to_string(),
            ])?;
        }
    }
    w.flush()?;
    if let Some(dir) = &args.replications_dir {
        dump(dir, &runs)?;
    }
    Ok(())
}

/// One analytic-versus-simulation comparison.
pub struct Check {
    pub quantity: String,
    pub parameter: f64,
    pub analytic: f64,
    pub simulated: Estimate,
    /// Absolute gap allowed under the fixed profile.
    pub fixed_gap: f64,
}

impl Check {
    pub fn tolerance(&self, profile: ToleranceProfile) -> f64 {
        match profile {
            ToleranceProfile::Paper => self.fixed_gap,
            ToleranceProfile::Strict => (3.0 * self.simulated.stderr).max(1e-3),
        }
    }

    pub fn passes(&self, profile: ToleranceProfile) -> bool {
        (self.analytic - self.simulated.value).abs() <= self.tolerance(profile)
    }
}

/// Transmission probability at three client distances, the SINR CCDF at
/// 200 m, concurrency at twice the contention radius, starvation and the
/// uplink marginal.
pub fn checks(cfg: &NetworkConfig, settings: &McSettings) -> tvws_core::Result<Vec<Check>> {
    let contention = cfg.contention_model()?;
    let uplink = cfg.uplink_model()?;
    let deployment = cfg.deployment()?;
    let sinr = cfg.sinr_model()?;
    let mut out = Vec::new();

    for r in [100.0, 300.0, 700.0] {
        out.push(Check {
            quantity: "pt".into(),
            parameter: r,
            analytic: contention.transmission_probability(r)?,
            simulated: estimate_pt(&contention, r, settings)?.estimates[0],
            fixed_gap: 0.03,
        });
    }

    let d = 2.0 * contention.contention_radius();
    out.push(Check {
        quantity: "q".into(),
        parameter: d,
        analytic: contention.concurrent_transmission_probability(d)?,
        simulated: estimate_q(&contention, d, settings)?.estimates[0],
        fixed_gap: 0.03,
    });

    let betas_db = [0.0, 5.0, 10.0];
    let r = 200.0;
    let profile = sinr.interference_profile(r)?;
    let run = estimate_sinr_ccdf(&sinr, r, &betas_db, settings)?;
    for (b, e) in betas_db.iter().zip(&run.estimates) {
        out.push(Check {
            quantity: "sinr_ccdf_db".into(),
            parameter: *b,
            analytic: profile.ccdf(db_to_linear(*b)),
            simulated: *e,
            fixed_gap: 0.05,
        });
    }

    out.push(Check {
        quantity: "starvation".into(),
        parameter: cfg.density_per_km2,
        analytic: uplink.starvation_probability(&deployment)?,
        simulated: estimate_starvation(&deployment, &uplink, settings)?.estimates[0],
        fixed_gap: 0.01,
    });
    out.push(Check {
        quantity: "uplink_marginal".into(),
        parameter: cfg.density_per_km2,
        analytic: deployment.uplink_marginal(&uplink)?,
        simulated: estimate_uplink_marginal(&deployment, &uplink, settings)?.estimates[0],
        fixed_gap: 0.01,
    });
    Ok(out)
}

pub fn validate(global: &GlobalArgs) -> Result<(), Failure> {
    let cfg = global.network_config()?;
    let settings = McSettings::new(global.seed, global.reps);
    let profile = global.tolerance_profile;
    let checks = checks(&cfg, &settings)?;

    let mut w = csv::Writer::from_writer(global.output()?);
    w.write_record([
        "fingerprint",
        "quantity",
        "parameter",
        "analytic",
        "simulated",
        "stderr",
        "tolerance",
        "pass",
    ])?;
    let fp = cfg.fingerprint();
    let mut failed = Vec::new();
    for c in &checks {
        let pass = c.passes(profile);
        if !pass {
            failed.push(format!("{}@{}", c.quantity, c.parameter));
        }
        w.write_record([
            fp.clone(),
            c.quantity.clone(),
            c.parameter.to_string(),
            c.analytic.to_string(),
            c.simulated.value.to_string(),
            c.simulated.stderr.to_string(),
            c.tolerance(profile).to_string(),
            pass.to_string(),
        ])?;
    }
    w.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "{} of {} checks outside tolerance: {}",
            failed.len(),
            checks.len(),
            failed.join(", ")
        )))
    }
}
