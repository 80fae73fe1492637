//! Client-to-AP uplink viability, coverage range and starvation.

use std::f64::consts::PI;

use crate::deployment::{DeploymentModel, Viability};
use crate::error::{ensure_positive, Error, Result};
use crate::propagation::{FadingModel, PathlossModel};
use crate::quad::{self, Tolerance};

/// Viability level that defines the coverage range.
pub const COVERAGE_VIABILITY: f64 = 0.1;

/// Upper search bound for distance inversions, in metres.
const MAX_RANGE_M: f64 = 1.0e6;

/// Exponent at which viability is treated as zero (e^-50 ~ 2e-22).
const NEGLIGIBLE_EXPONENT: f64 = 50.0;

/// Uplink from a client transmitting at `p_client` to an AP that needs
/// received power above `threshold`.
#[derive(Debug, Clone)]
pub struct UplinkModel {
    p_client: f64,
    threshold: f64,
    pathloss: PathlossModel,
    fading: FadingModel,
}

impl UplinkModel {
    pub fn new(
        p_client: f64,
        threshold: f64,
        pathloss: PathlossModel,
        fading: FadingModel,
    ) -> Result<Self> {
        Ok(Self {
            p_client: ensure_positive("client power", p_client)?,
            threshold: ensure_positive("uplink threshold", threshold)?,
            pathloss,
            fading,
        })
    }

    pub fn client_power(&self) -> f64 {
        self.p_client
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn pathloss(&self) -> &PathlossModel {
        &self.pathloss
    }

    pub fn fading(&self) -> &FadingModel {
        &self.fading
    }

    /// `p_U(r)`: probability the faded uplink clears the threshold.
    pub fn viability_at(&self, r: f64) -> f64 {
        self.fading
            .exceed_probability(self.p_client, self.pathloss.gain(r), self.threshold)
    }

    /// Distance where viability falls to `level`, found by bisection.
    /// `None` when the link is below `level` even at the minimum distance.
    pub fn coverage_range(&self, level: f64) -> Result<Option<f64>> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid(
                "viability level",
                format!("must lie in (0, 1), got {level}"),
            ));
        }
        let d_min = self.pathloss.min_distance();
        if self.viability_at(d_min) < level {
            return Ok(None);
        }
        quad::bisect(
            |r| self.viability_at(r) - level,
            d_min,
            MAX_RANGE_M,
            0.01,
            200,
        )
        .map(Some)
    }

    /// Closed-form coverage range via the inverse pathloss.
    pub fn coverage_range_closed_form(&self, level: f64) -> Option<f64> {
        // exp(-mu gamma / (P g)) = level  =>  g = mu gamma / (P ln(1/level))
        let g = self.fading.rate() * self.threshold / (self.p_client * (1.0 / level).ln());
        if g > self.pathloss.gain(self.pathloss.min_distance()) {
            return None;
        }
        Some(self.pathloss.distance_at_gain(g))
    }

    /// Distance beyond which viability is numerically zero.
    pub fn support_end(&self) -> f64 {
        let g = self.fading.rate() * self.threshold / (self.p_client * NEGLIGIBLE_EXPONENT);
        self.pathloss.distance_at_gain(g).min(MAX_RANGE_M)
    }

    /// Probability that no AP anywhere can decode a uniformly placed client.
    pub fn starvation_probability(&self, deployment: &DeploymentModel) -> Result<f64> {
        let lambda = deployment.density_per_m2();
        if lambda == 0.0 {
            return Ok(1.0);
        }
        let end = self.support_end();
        let mut edges = vec![0.0, end];
        quad::insert_breaks(&mut edges, &self.breaks());
        let mass = quad::integrate_with_breaks(
            |r| self.viability_at(r) * r,
            &edges,
            Tolerance::new(1e-9 * end * end, 1e-10),
        )?;
        Ok((-2.0 * PI * lambda * mass.value).exp())
    }
}

impl Viability for UplinkModel {
    fn viability(&self, r: f64) -> f64 {
        self.viability_at(r)
    }

    fn breaks(&self) -> Vec<f64> {
        let mut out = vec![self.pathloss.min_distance()];
        out.extend(self.pathloss.breakpoint());
        if let Some(c) = self.coverage_range_closed_form(COVERAGE_VIABILITY) {
            out.push(c);
        }
        out.push(self.support_end());
        out
    }
}
