//! Mark-based CSMA/CA contention.
//!
//! Every AP draws a uniform back-off mark and transmits when none of the APs
//! it senses above the CCA threshold holds a smaller mark. Sensing between a
//! pair is decided by an independent exponential fade per ordered pair.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::deployment::{DeploymentModel, ServingDistance, Viability};
use crate::error::{ensure_positive, Result};
use crate::propagation::{FadingModel, PathlossModel};
use crate::quad::{self, GaussLegendre, Tolerance};

/// Detection probability that defines the contention radius.
pub const CONTENTION_DETECTION: f64 = 1e-3;

/// Detection probability below which an AP is ignored by the simulator.
pub const SIMULATION_CUTOFF_DETECTION: f64 = 1e-12;

/// Detection probability treated as zero by the plane integrals.
const NEGLIGIBLE_DETECTION: f64 = 1e-15;

/// Number of distances in the concurrency table.
pub const CONCURRENCY_TABLE_POINTS: usize = 200;

const PLANE_REL_TOL: f64 = 1e-12;
const MARK_TOL: Tolerance = Tolerance::new(1e-300, 1e-13);

/// Angular panels of the client-centred quadrature.
const CLIENT_FRAME_PANELS: usize = 64;

/// Angular panels on a quarter turn for the pair-overlap quadrature.
const OVERLAP_PANELS: usize = 16;

/// Frame in which the contention integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Radial integral around the AP with the excluded arc length in closed
    /// form.
    ApCentered,
    /// Full two-dimensional polar quadrature around the client.
    ClientCentered,
}

/// `(1 - e^(-a y)) / a`, continuous at `a = 0`.
pub(crate) fn saturating_fraction(a: f64, y: f64) -> f64 {
    let x = a * y;
    if x.abs() < 1e-300 {
        y
    } else {
        -(-x).exp_m1() / a
    }
}

/// `(1 - e^(-x)) / x`, the probability that a mark beats a Poisson number of
/// contenders with mean load `x`.
pub fn transmission_probability_from_load(x: f64) -> f64 {
    if x < 1e-8 {
        // Series: 1 - x/2 + x^2/6.
        1.0 - x / 2.0 + x * x / 6.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// The same probability computed by integrating over the mark,
/// `int_0^1 e^(-x m) dm`.
pub fn transmission_probability_by_marks(x: f64) -> Result<f64> {
    let mut edges = vec![0.0, 1.0];
    if x > 1.0 {
        // The integrand lives on [0, few/x].
        quad::insert_breaks(&mut edges, &[1.0 / x, 10.0 / x, 40.0 / x]);
    }
    Ok(quad::integrate_with_breaks(|m| (-x * m).exp(), &edges, MARK_TOL)?.value)
}

/// CSMA/CA contention among APs of a Poisson deployment.
#[derive(Debug, Clone)]
pub struct ContentionModel {
    p_ap: f64,
    sigma: f64,
    pathloss: PathlossModel,
    fading: FadingModel,
    deployment: DeploymentModel,
    full_plane: f64,
}

impl ContentionModel {
    /// `pathloss` must describe the AP-to-AP link.
    pub fn new(
        p_ap: f64,
        sigma: f64,
        pathloss: PathlossModel,
        fading: FadingModel,
        deployment: DeploymentModel,
    ) -> Result<Self> {
        let mut model = Self {
            p_ap: ensure_positive("AP power", p_ap)?,
            sigma: ensure_positive("CCA threshold", sigma)?,
            pathloss,
            fading,
            deployment,
            full_plane: 0.0,
        };
        model.full_plane = model.radial_integral(|_| 1.0, model.reach())?;
        Ok(model)
    }

    pub fn ap_power(&self) -> f64 {
        self.p_ap
    }

    pub fn cca_threshold(&self) -> f64 {
        self.sigma
    }

    pub fn pathloss(&self) -> &PathlossModel {
        &self.pathloss
    }

    pub fn fading(&self) -> &FadingModel {
        &self.fading
    }

    pub fn deployment(&self) -> &DeploymentModel {
        &self.deployment
    }

    /// Density of APs per m².
    pub fn density(&self) -> f64 {
        self.deployment.density_per_m2()
    }

    /// `S(d)`: probability that an AP senses another at distance `d`.
    pub fn detection_probability(&self, d: f64) -> f64 {
        self.fading
            .exceed_probability(self.p_ap, self.pathloss.gain(d), self.sigma)
    }

    /// Distance at which the detection probability has fallen to `level`.
    pub fn distance_at_detection(&self, level: f64) -> f64 {
        let g = self.fading.rate() * self.sigma / (self.p_ap * (1.0 / level).ln());
        let d_min = self.pathloss.min_distance();
        if g >= self.pathloss.gain(d_min) {
            d_min
        } else {
            self.pathloss.distance_at_gain(g)
        }
    }

    /// Distance where `S` drops to `1e-3`.
    pub fn contention_radius(&self) -> f64 {
        self.distance_at_detection(CONTENTION_DETECTION)
    }

    /// Distance beyond which sensing is numerically impossible.
    pub fn reach(&self) -> f64 {
        self.distance_at_detection(NEGLIGIBLE_DETECTION)
    }

    /// Distances where `S` changes character, for quadrature breakpoints.
    fn detection_breaks(&self) -> Vec<f64> {
        let mut out = vec![self.pathloss.min_distance()];
        out.extend(self.pathloss.breakpoint());
        for level in [0.5, 1e-1, CONTENTION_DETECTION, 1e-6, 1e-10] {
            out.push(self.distance_at_detection(level));
        }
        out
    }

    /// `int_0^end S(v) w(v) 2 pi v dv`.
    fn radial_integral<W: Fn(f64) -> f64>(&self, weight: W, end: f64) -> Result<f64> {
        let mut edges = vec![0.0, end];
        quad::insert_breaks(&mut edges, &self.detection_breaks());
        let scale = 2.0 * PI * end * end;
        let out = quad::integrate_with_breaks(
            |v| 2.0 * PI * v * self.detection_probability(v) * weight(v),
            &edges,
            Tolerance::new(1e-15 * scale, PLANE_REL_TOL),
        )?;
        Ok(out.value)
    }

    /// `A = int_{R^2} S(|x|) dx`: mean number of sensed APs per unit density.
    pub fn full_plane_integral(&self) -> f64 {
        self.full_plane
    }

    /// `N(r)`: integral of `S` around the AP over the plane minus the ball of
    /// radius `r` centred on a client at distance `r` from the AP.
    pub fn contention_integral(&self, r: f64, frame: Frame) -> Result<f64> {
        let r = crate::error::ensure_non_negative("client distance", r)?;
        match frame {
            Frame::ApCentered => self.contention_integral_ap_frame(r),
            Frame::ClientCentered => self.contention_integral_client_frame(r),
        }
    }

    fn contention_integral_ap_frame(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(self.full_plane);
        }
        // A point at distance v < 2r from the AP lies in the ball on an arc of
        // angular width 2 acos(v / 2r).
        let end = (2.0 * r).min(self.reach());
        let mut edges = vec![0.0, end];
        quad::insert_breaks(&mut edges, &self.detection_breaks());
        let excluded = quad::integrate_with_breaks(
            |v| {
                let arc = 2.0 * (v / (2.0 * r)).min(1.0).acos();
                v * arc * self.detection_probability(v)
            },
            &edges,
            Tolerance::new(1e-15 * self.full_plane.max(1.0), PLANE_REL_TOL),
        )?;
        Ok((self.full_plane - excluded.value).max(0.0))
    }

    fn contention_integral_client_frame(&self, r: f64) -> Result<f64> {
        let reach = self.reach();
        let angular = GaussLegendre::new(8);
        let theta_edges: Vec<f64> = (0..=CLIENT_FRAME_PANELS)
            .map(|k| PI * k as f64 / CLIENT_FRAME_PANELS as f64)
            .collect();
        let nodes = angular.composite_nodes(&theta_edges);
        let mut edges = vec![r, r + reach];
        let shifted: Vec<f64> = self.detection_breaks().iter().map(|b| r + b).collect();
        quad::insert_breaks(&mut edges, &shifted);
        let out = quad::integrate_with_breaks(
            |rho| {
                let ring: f64 = nodes
                    .iter()
                    .map(|&(theta, w)| {
                        let b2 = rho * rho + r * r - 2.0 * rho * r * theta.cos();
                        w * self.detection_probability(b2.max(0.0).sqrt())
                    })
                    .sum();
                2.0 * ring * rho
            },
            &edges,
            Tolerance::new(1e-12 * self.full_plane.max(1.0), 1e-9),
        )?;
        Ok(out.value)
    }

    /// `p_T(r)` for an AP whose client sits at distance `r` with no other AP
    /// closer to the client.
    pub fn transmission_probability(&self, r: f64) -> Result<f64> {
        let n = self.contention_integral(r, Frame::ApCentered)?;
        Ok(transmission_probability_from_load(self.density() * n))
    }

    /// `p_T(r)` through the numeric integral over the AP's own mark.
    pub fn transmission_probability_by_marks(&self, r: f64) -> Result<f64> {
        let n = self.contention_integral(r, Frame::ApCentered)?;
        transmission_probability_by_marks(self.density() * n)
    }

    /// Transmission probability of an AP with no conditioning on its
    /// surroundings.
    pub fn isolated_transmission_probability(&self) -> f64 {
        transmission_probability_from_load(self.density() * self.full_plane)
    }

    /// `p_T` averaged over the serving distance of viable clients.
    pub fn mean_transmission_probability(&self, viability: &dyn Viability) -> Result<f64> {
        let serving = ServingDistance::new(&self.deployment, viability)?;
        serving.expect(
            |r| self.transmission_probability(r),
            Tolerance::new(1e-9, 1e-9),
        )
    }

    /// `int S(|z|) S(|z - x|) dz` for two APs at distance `d`.
    pub fn pair_overlap_integral(&self, d: f64) -> Result<f64> {
        let reach = self.reach();
        let half = 0.5 * d;
        if half >= reach {
            return Ok(0.0);
        }
        let thresholds = self.detection_breaks();
        let rho_end = half + reach;
        let angular = GaussLegendre::new(8);
        let theta_edges: Vec<f64> = (0..=OVERLAP_PANELS)
            .map(|k| 0.5 * PI * k as f64 / OVERLAP_PANELS as f64)
            .collect();
        let tol = Tolerance::new(1e-12 * self.full_plane.max(1.0), 1e-10);
        let mut total = 0.0;
        for (theta, w) in angular.composite_nodes(&theta_edges) {
            let (c, s) = (theta.cos(), theta.sin());
            // Radii where the distance to either centre crosses a threshold.
            let mut crossings = Vec::new();
            for &t in thresholds.iter().chain(std::iter::once(&reach)) {
                let disc = t * t - half * half * s * s;
                if disc >= 0.0 {
                    let root = disc.sqrt();
                    crossings.extend([half * c - root, half * c + root, -half * c + root]);
                }
            }
            let mut edges = vec![0.0, rho_end];
            quad::insert_breaks(&mut edges, &crossings);
            let radial = quad::integrate_with_breaks(
                |rho| {
                    let x = rho * c;
                    let y = rho * s;
                    let d0 = ((x + half).powi(2) + y * y).sqrt();
                    let d1 = ((x - half).powi(2) + y * y).sqrt();
                    rho * self.detection_probability(d0) * self.detection_probability(d1)
                },
                &edges,
                tol,
            )?;
            total += w * radial.value;
        }
        Ok(4.0 * total)
    }

    /// `q(d)`: probability that an AP at distance `d` from a transmitting AP
    /// also transmits.
    pub fn concurrent_transmission_probability(&self, d: f64) -> Result<f64> {
        let lambda = self.density();
        let a = lambda * self.full_plane;
        let b = lambda * (2.0 * self.full_plane - self.pair_overlap_integral(d)?);
        let missed = 1.0 - self.detection_probability(d);
        Self::pair_mark_integrals(a, b, missed)
    }

    /// Mark integrals of the pair probability for loads `a` (one AP) and `b`
    /// (either AP) and mutual non-detection probability `missed`.
    fn pair_mark_integrals(a: f64, b: f64, missed: f64) -> Result<f64> {
        let mut edges = vec![0.0, 1.0];
        let scale = a.max(b);
        if scale > 1.0 {
            quad::insert_breaks(&mut edges, &[1.0 / scale, 10.0 / scale, 40.0 / scale]);
        }
        let both = quad::integrate_with_breaks(
            |m| saturating_fraction(a, 1.0 - m) * (-b * m).exp(),
            &edges,
            MARK_TOL,
        )?
        .value;
        let first = quad::integrate_with_breaks(
            |m| (-a * m).exp() * (1.0 - m + missed * m),
            &edges,
            MARK_TOL,
        )?
        .value;
        Ok((2.0 * missed * both / first).clamp(0.0, 1.0))
    }

    /// Tabulate `q` on log-spaced distances for fast lookup.
    pub fn concurrency_table(&self) -> Result<ConcurrencyTable> {
        let d_lo = self.pathloss.min_distance();
        let d_hi = (2.0 * self.reach()).max(2.0 * d_lo);
        let step = (d_hi / d_lo).ln() / (CONCURRENCY_TABLE_POINTS - 1) as f64;
        let values = (0..CONCURRENCY_TABLE_POINTS)
            .into_par_iter()
            .map(|k| self.concurrent_transmission_probability(d_lo * (step * k as f64).exp()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConcurrencyTable {
            ln_start: d_lo.ln(),
            step,
            values,
            far: self.isolated_transmission_probability(),
        })
    }
}

/// `q(d)` sampled on a log-spaced grid, linear in `ln d` between samples and
/// equal to the isolated transmission probability past the last sample.
#[derive(Debug, Clone)]
pub struct ConcurrencyTable {
    ln_start: f64,
    step: f64,
    values: Vec<f64>,
    far: f64,
}

impl ConcurrencyTable {
    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| (self.ln_start + self.step * k as f64).exp())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn far_value(&self) -> f64 {
        self.far
    }

    pub fn eval(&self, d: f64) -> f64 {
        let pos = (d.max(1e-300).ln() - self.ln_start) / self.step;
        if pos <= 0.0 {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if pos >= last as f64 {
            return self.far;
        }
        let k = pos as usize;
        let t = pos - k as f64;
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NetworkConfig;

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
    fn load_closed_form_spot_values() {
        assert_eq!(transmission_probability_from_load(0.0), 1.0);
        let v = transmission_probability_from_load(std::f64::consts::LN_2);
        assert!((v - 0.5 / std::f64::consts::LN_2).abs() < 1e-15);
        assert!((transmission_probability_from_load(1e-9) - (1.0 - 5e-10)).abs() < 1e-15);
    }

    #[test]
    fn marks_route_matches_closed_form() {
        for x in [1e-6, 0.3, 2.0, 75.0, 6000.0] {
            let a = transmission_probability_from_load(x);
            let b = transmission_probability_by_marks(x).unwrap();
            assert!(((a - b) / a).abs() < 1e-11, "{x}: {a} vs {b}");
        }
    }

    #[test]
    fn detection_limits() {
        let m = model(1.0, 10.0, 1.0);
        assert!(m.detection_probability(1.0) > 0.999_999);
        assert!(m.detection_probability(1e6) < 1e-100);
        let r = m.contention_radius();
        assert!((m.detection_probability(r) - CONTENTION_DETECTION).abs() < 1e-9);
    }

    #[test]
    fn both_frames_agree() {
        let m = model(1.0, 10.0, 1.0);
        for r in [0.0, 50.0, 400.0, 2000.0] {
            let a = m.contention_integral(r, Frame::ApCentered).unwrap();
            let b = m.contention_integral(r, Frame::ClientCentered).unwrap();
            assert!(((a - b) / a).abs() < 1e-6, "{r}: {a} vs {b}");
        }
    }

    #[test]
    fn full_plane_matches_riemann_sum() {
        let m = model(0.1, 1.5, 1.0);
        let reach = m.reach();
        let n = 200_000;
        let h = reach / n as f64;
        let sum: f64 = (0..n)
            .map(|k| {
                let v = (k as f64 + 0.5) * h;
                2.0 * PI * v * m.detection_probability(v) * h
            })
            .sum();
        assert!(((sum - m.full_plane_integral()) / sum).abs() < 1e-4);
    }

    #[test]
    fn transmission_probability_rises_with_distance() {
        let m = model(1.0, 10.0, 1.0);
        let mut prev = 0.0;
        for r in [1.0, 100.0, 500.0, 1500.0, 5000.0] {
            let p = m.transmission_probability(r).unwrap();
            assert!(p >= prev && p <= 1.0);
            prev = p;
        }
        assert_eq!(model(1.0, 10.0, 0.0).transmission_probability(300.0).unwrap(), 1.0);
    }

    #[test]
    fn q_limits() {
        let m = model(1.0, 10.0, 1.0);
        assert!(m.concurrent_transmission_probability(1.0).unwrap() < 0.01);
        let far = 10.0 * m.contention_radius();
        let q = m.concurrent_transmission_probability(far).unwrap();
        assert!((q - m.isolated_transmission_probability()).abs() < 0.02);
        // With no other APs only the pair matters.
        let lone = model(1.0, 10.0, 0.0);
        let d = lone.contention_radius();
        let ns = 1.0 - lone.detection_probability(d);
        let q = lone.concurrent_transmission_probability(d).unwrap();
        assert!((q - 2.0 * ns / (1.0 + ns)).abs() < 1e-10);
    }

    #[test]
    fn overlap_bounds() {
        let m = model(1.0, 10.0, 1.0);
        // Coincident APs: the overlap reduces to the radial integral of S².
        let squared = m
            .radial_integral(|v| m.detection_probability(v), m.reach())
            .unwrap();
        let o0 = m.pair_overlap_integral(1e-9).unwrap();
        assert!((o0 - squared).abs() / squared < 1e-6, "{o0} vs {squared}");
        assert!(o0 < m.full_plane_integral());
        let mut prev = o0;
        for d in [500.0, 2000.0, 5000.0] {
            let o = m.pair_overlap_integral(d).unwrap();
            assert!(o <= prev && o >= 0.0);
            prev = o;
        }
        assert_eq!(m.pair_overlap_integral(3.0 * m.reach()).unwrap(), 0.0);
    }

    #[test]
    fn table_interpolates_exact_values() {
        let m = model(1.0, 10.0, 1.0);
        let table = m.concurrency_table().unwrap();
        let d: Vec<f64> = table.distances().collect();
        for k in [0, 50, 120] {
            assert!((table.eval(d[k]) - table.values()[k]).abs() < 1e-12);
        }
        let mid = (d[80] * d[81]).sqrt();
        let exact = m.concurrent_transmission_probability(mid).unwrap();
        assert!((table.eval(mid) - exact).abs() < 2e-3);
        assert_eq!(table.eval(1e9), m.isolated_transmission_probability());
    }
}
