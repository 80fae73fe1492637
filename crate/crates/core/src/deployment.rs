//! AP deployment statistics: nearest-AP distance law and the serving-distance
//! law of clients whose uplink to that AP is viable.
//!
//! Density crosses the public API in APs/km² and is stored per m².

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::units::{per_km2_to_per_m2, per_m2_to_per_km2};

pub use crate::config::NetworkConfig;

/// Absolute tolerance for integrals of probability densities over distance.
pub const PDF_TOLERANCE: Tolerance = Tolerance::new(1e-8, 1e-10);

/// Relative height below the peak at which the distance law is truncated.
const TAIL_CUTOFF: f64 = 1e-12;

/// Homogeneous Poisson field of APs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentModel {
    density: f64,
}

impl DeploymentModel {
    pub fn from_per_km2(density: f64) -> Result<Self> {
        if !(density.is_finite() && density >= 0.0) {
            return Err(Error::invalid(
                "density",
                format!("must be finite and >= 0 APs/km², got {density}"),
            ));
        }
        Ok(Self {
            density: per_km2_to_per_m2(density),
        })
    }

    pub fn density_per_m2(&self) -> f64 {
        self.density
    }

    pub fn density_per_km2(&self) -> f64 {
        per_m2_to_per_km2(self.density)
    }

    /// Density of the distance to the nearest AP (Rayleigh law).
    pub fn nearest_ap_distance_pdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        2.0 * PI * self.density * r * (-self.density * PI * r * r).exp()
    }

    /// Mode of the nearest-AP distance.
    pub fn mode(&self) -> Result<f64> {
        self.require_positive_density()?;
        Ok(1.0 / (2.0 * PI * self.density).sqrt())
    }

    /// Distance beyond which the nearest-AP density has fallen below
    /// `1e-12` of its peak.
    pub fn distance_cutoff(&self) -> Result<f64> {
        let mode = self.mode()?;
        // pdf(r)/pdf(mode) = (r/mode) exp(1/2 - r²/(2 mode²))
        let rel = |r: f64| {
            let x = r / mode;
            x * (0.5 - 0.5 * x * x).exp()
        };
        quad::bisect(
            |r| rel(r) - TAIL_CUTOFF,
            mode,
            mode * 20.0,
            1e-6 * mode,
            200,
        )
    }

    fn require_positive_density(&self) -> Result<()> {
        if self.density > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(
                "nearest-AP distance is undefined for an empty deployment".into(),
            ))
        }
    }

    /// Breakpoints for integrals against the distance law.
    fn breaks(&self, extra: &[f64]) -> Result<Vec<f64>> {
        let mode = self.mode()?;
        let cut = self.distance_cutoff()?;
        let mut edges = vec![0.0, cut];
        let multiples: Vec<f64> = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0]
            .iter()
            .map(|k| k * mode)
            .collect();
        quad::insert_breaks(&mut edges, &multiples);
        quad::insert_breaks(&mut edges, extra);
        Ok(edges)
    }

    /// Probability that a uniformly placed client has a viable uplink to its
    /// nearest AP.
    pub fn uplink_marginal(&self, viability: &dyn Viability) -> Result<f64> {
        let edges = self.breaks(&viability.breaks())?;
        let out = quad::integrate_with_breaks(
            |r| self.nearest_ap_distance_pdf(r) * viability.viability(r),
            &edges,
            PDF_TOLERANCE,
        )?;
        Ok(out.value.clamp(0.0, 1.0))
    }

    /// Density of the serving distance given uplink viability.
    pub fn conditional_distance_pdf(&self, r: f64, viability: &dyn Viability) -> Result<f64> {
        ServingDistance::new(self, viability).map(|s| s.pdf(r))
    }
}

/// Distance-dependent probability that a client's uplink is viable.
pub trait Viability: Sync {
    fn viability(&self, r: f64) -> f64;

    /// Distances where the viability changes character (kinks, transitions).
    fn breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Every client can associate.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysViable;

impl Viability for AlwaysViable {
    fn viability(&self, _r: f64) -> f64 {
        1.0
    }
}

impl<F: Fn(f64) -> f64 + Sync> Viability for F {
    fn viability(&self, r: f64) -> f64 {
        self(r)
    }
}

/// The serving-distance law `f_R(r) p_U(r) / P(I_u = 1)` with its
/// normalizing constant computed once.
pub struct ServingDistance<'a> {
    deployment: &'a DeploymentModel,
    viability: &'a dyn Viability,
    marginal: f64,
    edges: Vec<f64>,
}

impl<'a> ServingDistance<'a> {
    pub fn new(deployment: &'a DeploymentModel, viability: &'a dyn Viability) -> Result<Self> {
        let marginal = deployment.uplink_marginal(viability)?;
        if marginal <= 0.0 {
            return Err(Error::Domain(
                "no client can ever associate: uplink marginal is zero".into(),
            ));
        }
        let edges = deployment.breaks(&viability.breaks())?;
        Ok(Self {
            deployment,
            viability,
            marginal,
            edges,
        })
    }

    pub fn deployment(&self) -> &DeploymentModel {
        self.deployment
    }

    pub fn marginal(&self) -> f64 {
        self.marginal
    }

    pub fn pdf(&self, r: f64) -> f64 {
        self.deployment.nearest_ap_distance_pdf(r) * self.viability.viability(r) / self.marginal
    }

    /// Integration breakpoints covering the support of the law.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `E[g(R) | I_u = 1]` by adaptive quadrature.
    pub fn expect<F>(&self, mut g: F, tol: Tolerance) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let out = quad::try_integrate_with_breaks(
            |r| {
                let w = self.pdf(r);
                if w == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(w * g(r)?)
                }
            },
            &self.edges,
            tol,
        )?;
        Ok(out.value)
    }
}
