//! Downlink SINR distribution at a served client, expected rate, per-AP
//! throughput and area spectral efficiency.
//!
//! Interferers are the APs that win contention. Their density around the
//! serving AP is thinned by the pairwise concurrency probability `q`, which is
//! tabulated once per model.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::csma::{ConcurrencyTable, ContentionModel};
use crate::deployment::{ServingDistance, Viability};
use crate::error::{ensure_positive, Error, Result};
use crate::propagation::PathlossModel;
use crate::quad::{self, GaussLegendre, Tolerance};

/// Nodes of the rate quadrature over `t = log2(1 + beta)`.
pub const RATE_NODES: usize = 128;

/// Noise-only CCDF level at which the rate integral is truncated.
const RATE_TRUNCATION: f64 = 1e-6;

/// Radial panels of the interference integral (geometric in `v - r`).
const RADIAL_PANELS: usize = 48;

/// Angular panels on a half turn for the `q` average.
const ANGULAR_PANELS: usize = 16;

/// Downlink SINR model.
#[derive(Debug)]
pub struct SinrModel {
    contention: ContentionModel,
    pathloss: PathlossModel,
    noise: f64,
    table: OnceLock<ConcurrencyTable>,
}

impl Clone for SinrModel {
    fn clone(&self) -> Self {
        let table = OnceLock::new();
        if let Some(t) = self.table.get() {
            let _ = table.set(t.clone());
        }
        Self {
            contention: self.contention.clone(),
            pathloss: self.pathloss,
            noise: self.noise,
            table,
        }
    }
}

impl SinrModel {
    /// `pathloss` must describe the AP-to-client link; the contention model
    /// carries the AP-to-AP link.
    pub fn new(contention: ContentionModel, pathloss: PathlossModel, noise: f64) -> Result<Self> {
        Ok(Self {
            contention,
            pathloss,
            noise: ensure_positive("noise power", noise)?,
            table: OnceLock::new(),
        })
    }

    pub fn contention(&self) -> &ContentionModel {
        &self.contention
    }

    pub fn pathloss(&self) -> &PathlossModel {
        &self.pathloss
    }

    pub fn noise_power(&self) -> f64 {
        self.noise
    }

    /// The `q` table, built on first use.
    pub fn concurrency(&self) -> Result<&ConcurrencyTable> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let built = self.contention.concurrency_table()?;
        Ok(self.table.get_or_init(|| built))
    }

    fn mean_signal(&self, r: f64) -> f64 {
        self.contention.ap_power() * self.pathloss.gain(r)
    }

    /// SINR CCDF without interference: `exp(-mu beta N0 / (P g(r)))`.
    pub fn snr_ccdf(&self, beta: f64, r: f64) -> f64 {
        let mu = self.contention.fading().rate();
        (-mu * beta * self.noise / self.mean_signal(r)).exp()
    }

    /// Largest threshold with noise-only CCDF above the truncation level.
    pub fn max_threshold(&self, r: f64) -> f64 {
        let mu = self.contention.fading().rate();
        (1.0 / RATE_TRUNCATION).ln() * self.mean_signal(r) / (mu * self.noise)
    }

    /// Interference quadrature for a client at distance `r`, reusable across
    /// thresholds.
    pub fn interference_profile(&self, r: f64) -> Result<InterferenceProfile> {
        let r = r.max(self.pathloss.min_distance());
        let lambda = self.contention.density();
        let g_r = self.pathloss.gain(r);
        let mut profile = InterferenceProfile {
            snr_rate: self.contention.fading().rate() * self.noise / self.mean_signal(r),
            lambda,
            nodes: Vec::new(),
            tail: 0.0,
        };
        if lambda == 0.0 {
            return Ok(profile);
        }
        let table = self.concurrency()?;

        let scale = r
            .max(self.contention.contention_radius())
            .max(self.pathloss.breakpoint().unwrap_or(1.0));
        let v_end = r + 100.0 * scale;
        let mut edges = vec![r];
        edges.extend(quad::geometric_edges(1.0, v_end - r, RADIAL_PANELS).iter().map(|o| r + o));
        if let Some(bp) = self.pathloss.breakpoint() {
            quad::insert_breaks(&mut edges, &[bp]);
        }

        let angular = GaussLegendre::new(8);
        let theta_edges: Vec<f64> = (0..=ANGULAR_PANELS)
            .map(|k| PI * k as f64 / ANGULAR_PANELS as f64)
            .collect();
        let cosines: Vec<(f64, f64)> = angular
            .composite_nodes(&theta_edges)
            .into_iter()
            .map(|(t, w)| (t.cos(), w))
            .collect();

        let radial = GaussLegendre::new(8);
        for (v, w) in radial.composite_nodes(&edges) {
            let q_ring: f64 = cosines
                .iter()
                .map(|&(c, wt)| wt * table.eval(separation(v, r, c)))
                .sum::<f64>()
                * 2.0;
            profile
                .nodes
                .push((self.pathloss.gain(v) / g_r, w * q_ring * v));
        }

        // Beyond v_end: q is at its far value and x / (1 + x) ~ x, with a
        // power-law gain of exponent n.
        let n = self.pathloss.far_exponent();
        let ratio_end = self.pathloss.gain(v_end) / g_r;
        profile.tail = 2.0 * PI * table.far_value() * ratio_end * v_end * v_end / (n - 2.0);
        Ok(profile)
    }

    /// `P(SINR > beta)` for a client at distance `r` from its transmitting AP.
    pub fn sinr_ccdf(&self, beta: f64, r: f64) -> Result<f64> {
        if !(beta >= 0.0) {
            return Err(Error::invalid("beta", format!("must be >= 0, got {beta}")));
        }
        Ok(self.interference_profile(r)?.ccdf(beta))
    }

    /// `E[log2(1 + SINR)]` in bps/Hz at distance `r`.
    pub fn expected_rate(&self, r: f64) -> Result<f64> {
        let profile = self.interference_profile(r)?;
        let t_max = (1.0 + self.max_threshold(r)).log2();
        Ok(rate_from_ccdf(|beta| profile.ccdf(beta), t_max, &[]))
    }

    /// Rate delivered at distance `r` when the client's uplink is viable with
    /// probability `viability(r)`, with no contention.
    pub fn link_throughput(&self, r: f64, viability: &dyn Viability) -> Result<f64> {
        Ok(viability.viability(r) * self.expected_rate(r)?)
    }

    /// Per-AP throughput in bps/Hz averaged over viable clients.
    pub fn ap_throughput(&self, viability: &dyn Viability) -> Result<f64> {
        let deployment = self.contention.deployment();
        let serving = ServingDistance::new(deployment, viability)?;
        self.concurrency()?;
        serving.expect(
            |r| Ok(self.contention.transmission_probability(r)? * self.expected_rate(r)?),
            Tolerance::new(1e-7, 1e-6),
        )
    }

    /// Per-AP throughput times AP density, in bps/Hz/km².
    pub fn area_spectral_efficiency(&self, viability: &dyn Viability) -> Result<f64> {
        let density = self.contention.deployment().density_per_km2();
        if density == 0.0 {
            return Ok(0.0);
        }
        Ok(self.ap_throughput(viability)? * density)
    }
}

/// Distance between the serving AP and an interferer at distance `v` from
/// the client, with `cos_theta` the cosine of the angle between them seen
/// from the client (law of cosines).
pub fn separation(v: f64, r: f64, cos_theta: f64) -> f64 {
    (v * v + r * r - 2.0 * r * v * cos_theta).max(0.0).sqrt()
}

/// Precomputed interference integral for a fixed client distance.
#[derive(Debug, Clone)]
pub struct InterferenceProfile {
    /// `mu N0 / (P g(r))`.
    snr_rate: f64,
    lambda: f64,
    /// `(g(v) / g(r), weight)` with the weight holding `v Q(v)` and the
    /// quadrature weight.
    nodes: Vec<(f64, f64)>,
    /// Tail integral per unit threshold beyond the last node.
    tail: f64,
}

impl InterferenceProfile {
    pub fn ccdf(&self, beta: f64) -> f64 {
        if beta <= 0.0 {
            return 1.0;
        }
        let interference: f64 = self
            .nodes
            .iter()
            .map(|&(ratio, w)| {
                let x = beta * ratio;
                w * x / (1.0 + x)
            })
            .sum::<f64>()
            + self.tail * beta;
        (-self.snr_rate * beta - self.lambda * interference).exp()
    }
}

/// `int_0^t_max ccdf(2^t - 1) dt` by Gauss-Legendre, split at the given
/// points in `t`.
pub fn rate_from_ccdf<F: Fn(f64) -> f64>(ccdf: F, t_max: f64, splits: &[f64]) -> f64 {
    let rule = GaussLegendre::new(RATE_NODES);
    let mut edges = vec![0.0, t_max];
    quad::insert_breaks(&mut edges, splits);
    rule.composite(|t| ccdf(t.exp2() - 1.0), &edges)
}

/// A sampled function with the fingerprint of the configuration it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    fingerprint: String,
}

impl MetricCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, fingerprint: impl Into<String>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid("values", "length differs from grid"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "must be finite"));
        }
        Ok(Self {
            grid,
            values,
            fingerprint: fingerprint.into(),
        })
    }

    /// Evaluate `f` on `grid`.
    pub fn sample<F>(grid: Vec<f64>, fingerprint: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        use rayon::prelude::*;
        let values = grid.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values, fingerprint)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;

    fn model(p: f64, h: f64, density: f64) -> SinrModel {
        NetworkConfig {
            p_ap_w: p,
            h_ap_m: h,
            density_per_km2: density,
            ..Default::default()
        }
        .sinr_model()
        .unwrap()
    }

    #[test]
    fn zero_threshold_is_certain() {
        let m = model(1.0, 10.0, 1.0);
        assert_eq!(m.sinr_ccdf(0.0, 200.0).unwrap(), 1.0);
        assert!(m.sinr_ccdf(-1.0, 200.0).is_err());
    }

    #[test]
    fn no_interference_is_rayleigh_snr() {
        let m = model(1.0, 10.0, 0.0);
        for k in 0..10 {
            let beta = 10f64.powf(k as f64 / 2.0);
            let a = m.sinr_ccdf(beta, 800.0).unwrap();
            assert!((a - m.snr_ccdf(beta, 800.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn ccdf_decreases_in_threshold() {
        let m = model(1.0, 10.0, 1.0);
        let p = m.interference_profile(200.0).unwrap();
        let mut prev = 1.0;
        for db in [-10.0, 0.0, 5.0, 10.0, 20.0, 40.0] {
            let c = p.ccdf(10f64.powf(db / 10.0));
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn step_ccdf_rate() {
        let beta_star: f64 = 15.0;
        let t_star = (1.0 + beta_star).log2();
        let step = |b: f64| if b < beta_star { 1.0 } else { 0.0 };
        let exact = rate_from_ccdf(step, 10.0, &[t_star]);
        assert!((exact - t_star).abs() < 1e-12);
        // Without the split the error is bounded by the largest weight.
        let rough = rate_from_ccdf(step, 10.0, &[]);
        assert!((rough - t_star).abs() < 0.15);
    }

    #[test]
    fn rate_vanishes_with_noise() {
        let cfg = NetworkConfig {
            density_per_km2: 0.0,
            noise_density_dbm_hz: -60.0,
            ..Default::default()
        };
        let m = cfg.sinr_model().unwrap();
        assert!(m.expected_rate(2000.0).unwrap() < 1e-6);
    }

    #[test]
    fn curve_validation() {
        assert!(MetricCurve::new(vec![1.0, 1.0], vec![0.0, 0.0], "x").is_err());
        assert!(MetricCurve::new(vec![1.0], vec![f64::NAN], "x").is_err());
        let c = MetricCurve::sample(vec![1.0, 2.0, 3.0], "fp", |x| Ok(x * x)).unwrap();
        assert_eq!(c.values(), &[1.0, 4.0, 9.0]);
    }
}
