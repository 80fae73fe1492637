//! Replication-based estimators of the analytic quantities.

use std::io::Write;

use rayon::prelude::*;

use crate::csma::{ContentionModel, SIMULATION_CUTOFF_DETECTION};
use crate::deployment::DeploymentModel;
use crate::error::{Error, Result};
use crate::sinr::SinrModel;
use crate::uplink::{UplinkModel, COVERAGE_VIABILITY};

use super::contention::{transmits_among, Contention};
use super::field::{realize, ApPoint, Rect, Window};
use super::rng::{RepKey, Salt};

/// Minimum number of replications accepted by the estimators.
pub const MIN_REPLICATIONS: usize = 100;

/// Consecutive rejected attempts after which conditioned sampling gives up.
pub const MAX_ATTEMPTS: u64 = 10_000;

const SERVING_ID: u64 = u64::MAX - 1;
const PARTNER_ID: u64 = u64::MAX - 2;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        // Welford.
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for x in samples {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
        Self {
            value: mean,
            stderr: (var / n.max(1) as f64).sqrt(),
            n,
        }
    }

    /// Whether `x` lies within `k` standard errors, with a floor on the
    /// half-width for degenerate samples.
    pub fn covers(&self, x: f64, k: f64, floor: f64) -> bool {
        (self.value - x).abs() <= (k * self.stderr).max(floor)
    }
}

/// Run parameters shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub seed: u64,
    pub replications: usize,
    /// Guard band as a multiple of the contention radius.
    pub guard_factor: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            seed: 1,
            replications: 10_000,
            guard_factor: 1.0,
        }
    }
}

impl McSettings {
    pub fn new(seed: u64, replications: usize) -> Self {
        Self {
            seed,
            replications,
            ..Default::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::invalid(
                "replications",
                format!("need at least {MIN_REPLICATIONS}, got {}", self.replications),
            ));
        }
        if !(self.guard_factor >= 1.0) {
            return Err(Error::invalid(
                "guard_factor",
                format!("guard must cover the contention radius, got factor {}", self.guard_factor),
            ));
        }
        Ok(())
    }
}

/// One replication: index, attempts consumed by conditioning, outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub index: u64,
    pub attempts: u64,
    pub values: Vec<f64>,
}

/// Result of an estimator: one estimate per label plus the raw replications.
#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub labels: Vec<String>,
    pub estimates: Vec<Estimate>,
    pub replications: Vec<Replication>,
}

impl McRun {
    fn from_replications(labels: Vec<String>, replications: Vec<Replication>) -> Self {
        let estimates = (0..labels.len())
            .map(|k| Estimate::from_samples(replications.iter().map(|r| r.values[k])))
            .collect();
        Self {
            labels,
            estimates,
            replications,
        }
    }

    pub fn estimate(&self, label: &str) -> Option<Estimate> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.estimates[k])
    }

    /// Mean number of attempts per accepted replication.
    pub fn mean_attempts(&self) -> f64 {
        let total: u64 = self.replications.iter().map(|r| r.attempts).sum();
        total as f64 / self.replications.len().max(1) as f64
    }

    /// One CSV row per replication.
    pub fn write_replications_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["replication".to_string(), "attempts".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for r in &self.replications {
            let mut row = vec![r.index.to_string(), r.attempts.to_string()];
            row.extend(r.values.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn run<F>(settings: &McSettings, labels: Vec<String>, rep: F) -> Result<McRun>
where
    F: Fn(u64) -> Result<Replication> + Sync + Send,
{
    settings.check()?;
    let reps = (0..settings.replications as u64)
        .into_par_iter()
        .map(rep)
        .collect::<Result<Vec<_>>>()?;
    Ok(McRun::from_replications(labels, reps))
}

/// Retry attempts of replication `index` until `accept` yields a value.
fn conditioned<T, F>(seed: u64, index: u64, mut attempt: F) -> Result<(u64, T)>
where
    F: FnMut(RepKey) -> Option<T>,
{
    let base = RepKey::new(seed, index);
    for a in 0..MAX_ATTEMPTS {
        if let Some(v) = attempt(base.with_attempt(a)) {
            return Ok((a + 1, v));
        }
    }
    Err(Error::Rejection {
        replication: index,
        attempts: MAX_ATTEMPTS,
    })
}

fn special_ap(key: RepKey, x: f64, id: u64) -> ApPoint {
    ApPoint {
        x,
        y: 0.0,
        mark: key.uniform(Salt::Mark, &[id]),
        id,
    }
}

/// Window for contention experiments: `max(10/sqrt(lambda), 5 R_c)` plus a
/// guard of `guard_factor * R_c`.
pub fn contention_window(model: &ContentionModel, guard_factor: f64) -> Window {
    let rc = model.contention_radius();
    let lambda = model.density();
    let spread = if lambda > 0.0 { 10.0 / lambda.sqrt() } else { 0.0 };
    Window {
        half_width: spread.max(5.0 * rc),
        guard: guard_factor * rc,
    }
}

fn sensing_cutoff(model: &ContentionModel) -> f64 {
    model.distance_at_detection(SIMULATION_CUTOFF_DETECTION)
}

/// Field around an AP at the origin with the ball of radius `r` around the
/// client at `(r, 0)` emptied.
fn conditioned_field(model: &ContentionModel, key: RepKey, r: f64, rect: Rect) -> Vec<ApPoint> {
    let mut pts = realize(model.density(), key, rect);
    pts.retain(|p| p.distance_to(r, 0.0) >= r);
    pts
}

/// Fraction of realizations in which an AP whose client sits at distance
/// `r` (with no AP closer to the client) transmits.
pub fn estimate_pt(model: &ContentionModel, r: f64, settings: &McSettings) -> Result<McRun> {
    let cutoff = sensing_cutoff(model);
    run(settings, vec!["transmits".into()], |index| {
        let key = RepKey::new(settings.seed, index);
        let serving = special_ap(key, 0.0, SERVING_ID);
        let pts = conditioned_field(model, key, r, Rect::centered(cutoff));
        let tx = transmits_among(model, key, &serving, &pts);
        Ok(Replication {
            index,
            attempts: 1,
            values: vec![f64::from(u8::from(tx))],
        })
    })
}

/// Frequency with which an AP at distance `d` transmits given that the AP at
/// the origin transmits.
pub fn estimate_q(model: &ContentionModel, d: f64, settings: &McSettings) -> Result<McRun> {
    let cutoff = sensing_cutoff(model);
    let rect = Rect::around(0.0, 0.0, cutoff).union(&Rect::around(d, 0.0, cutoff));
    run(settings, vec!["partner_transmits".into()], |index| {
        let (attempts, partner_tx) = conditioned(settings.seed, index, |key| {
            let serving = special_ap(key, 0.0, SERVING_ID);
            let partner = special_ap(key, d, PARTNER_ID);
            let mut pts = realize(model.density(), key, rect);
            pts.push(partner);
            if !transmits_among(model, key, &serving, &pts) {
                return None;
            }
            pts.pop();
            pts.push(serving);
            Some(transmits_among(model, key, &partner, &pts))
        })?;
        Ok(Replication {
            index,
            attempts,
            values: vec![f64::from(u8::from(partner_tx))],
        })
    })
}

/// Labels of the SINR estimator for thresholds given in dB.
pub fn sinr_labels(betas_db: &[f64]) -> Vec<String> {
    let mut labels: Vec<String> = betas_db.iter().map(|b| format!("ccdf_{b}db")).collect();
    labels.push("rate_bps_hz".into());
    labels
}

/// Empirical SINR CCDF at a client at distance `r` from its serving AP,
/// conditioned on that AP transmitting, and the mean of `log2(1 + SINR)`.
pub fn estimate_sinr_ccdf(
    model: &SinrModel,
    r: f64,
    betas_db: &[f64],
    settings: &McSettings,
) -> Result<McRun> {
    estimate_sinr_in(model, r, betas_db, settings, None)
}

/// As [`estimate_sinr_ccdf`] with an explicit window.
pub fn estimate_sinr_in(
    model: &SinrModel,
    r: f64,
    betas_db: &[f64],
    settings: &McSettings,
    window: Option<Window>,
) -> Result<McRun> {
    let contention = model.contention();
    let window = window.unwrap_or_else(|| contention_window(contention, settings.guard_factor));
    let cutoff = sensing_cutoff(contention);
    let betas: Vec<f64> = betas_db.iter().map(|b| 10f64.powf(b / 10.0)).collect();
    let (p_ap, fading, pathloss) = (contention.ap_power(), contention.fading(), model.pathloss());
    let inner = window.inner();
    run(settings, sinr_labels(betas_db), |index| {
        let (attempts, sinr) = conditioned(settings.seed, index, |key| {
            let serving = special_ap(key, 0.0, SERVING_ID);
            let near = conditioned_field(contention, key, r, Rect::centered(cutoff));
            if !transmits_among(contention, key, &serving, &near) {
                return None;
            }
            let mut pts = conditioned_field(contention, key, r, window.outer());
            let n_field = pts.len();
            pts.push(serving);
            let c = Contention::new(contention, key, &pts);
            let interference: f64 = (0..n_field)
                .filter(|&j| inner.contains(pts[j].x, pts[j].y) && c.transmits(j))
                .map(|j| {
                    let p = &pts[j];
                    let fade = fading.from_uniform(key.uniform(Salt::Interference, &[p.id]));
                    p_ap * pathloss.gain(p.distance_to(r, 0.0)) * fade
                })
                .sum();
            let fade = fading.from_uniform(key.uniform(Salt::Signal, &[SERVING_ID]));
            let signal = p_ap * pathloss.gain(r) * fade;
            Some(signal / (model.noise_power() + interference))
        })?;
        let mut values: Vec<f64> = betas
            .iter()
            .map(|&b| f64::from(u8::from(sinr > b)))
            .collect();
        values.push((1.0 + sinr).log2());
        Ok(Replication {
            index,
            attempts,
            values,
        })
    })
}

/// Half-width of the window for client-side experiments.
fn client_window(deployment: &DeploymentModel, uplink: &UplinkModel) -> f64 {
    let coverage = uplink
        .coverage_range_closed_form(COVERAGE_VIABILITY)
        .unwrap_or_else(|| uplink.pathloss().min_distance());
    let lambda = deployment.density_per_m2();
    let spread = if lambda > 0.0 { 10.0 / lambda.sqrt() } else { 0.0 };
    spread.max(5.0 * coverage)
}

fn uplink_viable(uplink: &UplinkModel, key: RepKey, ap: &ApPoint) -> bool {
    let fade = uplink
        .fading()
        .from_uniform(key.uniform(Salt::Uplink, &[ap.id]));
    uplink.client_power() * uplink.pathloss().gain(ap.distance_to(0.0, 0.0)) * fade
        > uplink.threshold()
}

/// Fraction of clients, dropped at the window centre, that no AP can decode.
pub fn estimate_starvation(
    deployment: &DeploymentModel,
    uplink: &UplinkModel,
    settings: &McSettings,
) -> Result<McRun> {
    let half = client_window(deployment, uplink);
    run(settings, vec!["starved".into()], |index| {
        let key = RepKey::new(settings.seed, index);
        let pts = realize(deployment.density_per_m2(), key, Rect::centered(half));
        let starved = !pts.iter().any(|p| uplink_viable(uplink, key, p));
        Ok(Replication {
            index,
            attempts: 1,
            values: vec![f64::from(u8::from(starved))],
        })
    })
}

/// Fraction of clients whose uplink to the nearest AP is viable.
pub fn estimate_uplink_marginal(
    deployment: &DeploymentModel,
    uplink: &UplinkModel,
    settings: &McSettings,
) -> Result<McRun> {
    let half = client_window(deployment, uplink);
    run(settings, vec!["viable".into()], |index| {
        let key = RepKey::new(settings.seed, index);
        let pts = realize(deployment.density_per_m2(), key, Rect::centered(half));
        let nearest = pts.iter().min_by(|a, b| {
            a.distance_to(0.0, 0.0)
                .total_cmp(&b.distance_to(0.0, 0.0))
        });
        let viable = nearest.is_some_and(|p| uplink_viable(uplink, key, p));
        Ok(Replication {
            index,
            attempts: 1,
            values: vec![f64::from(u8::from(viable))],
        })
    })
}
