//! Network configuration and its flat key/value file form.
//!
//! Keys carry their unit in the name (`p_ap_w`, `cca_threshold_dbm`, ...).
//! Absent keys take the deployment defaults below; unknown keys are an
//! error. This is the only place where dBm values are turned into watts.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::csma::ContentionModel;
use crate::deployment::DeploymentModel;
use crate::error::{ensure_positive, Error, Result};
use crate::propagation::{FadingModel, LinkGeometry, PathlossModel};
use crate::sinr::SinrModel;
use crate::units::{dbm_to_watts, noise_power, wavelength};
use crate::uplink::UplinkModel;

/// FCC caps for fixed and portable TVWS devices.
pub const MAX_AP_POWER_W: f64 = 4.0;
pub const MAX_CLIENT_POWER_W: f64 = 0.1;
pub const MAX_AP_HEIGHT_M: f64 = 30.0;

/// Radio and regulatory parameters of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    pub frequency_mhz: f64,
    pub bandwidth_mhz: f64,
    pub p_ap_w: f64,
    pub p_client_w: f64,
    pub h_ap_m: f64,
    pub h_client_m: f64,
    pub cca_threshold_dbm: f64,
    pub uplink_threshold_dbm: f64,
    pub noise_density_dbm_hz: f64,
    pub fading_rate: f64,
    /// AP density in APs per km².
    pub density_per_km2: f64,
    pub override_regulatory: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            frequency_mhz: 600.0,
            bandwidth_mhz: 6.0,
            p_ap_w: 1.0,
            p_client_w: 0.1,
            h_ap_m: 10.0,
            h_client_m: 1.0,
            cca_threshold_dbm: -82.0,
            uplink_threshold_dbm: -82.0,
            noise_density_dbm_hz: -173.97,
            fading_rate: 1.0,
            density_per_km2: 1.0,
            override_regulatory: false,
        }
    }
}

impl NetworkConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg = Self::parse(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse without validating, so callers can adjust fields first.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat struct of scalars always serializes")
    }

    /// Short stable hash of the canonical serialization, for joining outputs.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("frequency_mhz", self.frequency_mhz)?;
        ensure_positive("bandwidth_mhz", self.bandwidth_mhz)?;
        ensure_positive("p_ap_w", self.p_ap_w)?;
        ensure_positive("p_client_w", self.p_client_w)?;
        ensure_positive("h_ap_m", self.h_ap_m)?;
        ensure_positive("h_client_m", self.h_client_m)?;
        ensure_positive("fading_rate", self.fading_rate)?;
        for (name, v) in [
            ("cca_threshold_dbm", self.cca_threshold_dbm),
            ("uplink_threshold_dbm", self.uplink_threshold_dbm),
            ("noise_density_dbm_hz", self.noise_density_dbm_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(self.density_per_km2.is_finite() && self.density_per_km2 >= 0.0) {
            return Err(Error::invalid(
                "density_per_km2",
                format!("must be finite and >= 0, got {}", self.density_per_km2),
            ));
        }
        if !self.override_regulatory {
            if self.p_ap_w > MAX_AP_POWER_W {
                return Err(Error::Regulatory(format!(
                    "p_ap_w = {} W exceeds the FCC fixed-device EIRP cap of {MAX_AP_POWER_W} W",
                    self.p_ap_w
                )));
            }
            if self.p_client_w > MAX_CLIENT_POWER_W {
                return Err(Error::Regulatory(format!(
                    "p_client_w = {} W exceeds the FCC portable-device EIRP cap of {MAX_CLIENT_POWER_W} W",
                    self.p_client_w
                )));
            }
            if self.h_ap_m > MAX_AP_HEIGHT_M {
                return Err(Error::Regulatory(format!(
                    "h_ap_m = {} m exceeds the FCC fixed-device height cap of {MAX_AP_HEIGHT_M} m",
                    self.h_ap_m
                )));
            }
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        wavelength(self.frequency_mhz * 1e6)
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_mhz * 1e6
    }

    pub fn cca_threshold_w(&self) -> f64 {
        dbm_to_watts(self.cca_threshold_dbm)
    }

    pub fn uplink_threshold_w(&self) -> f64 {
        dbm_to_watts(self.uplink_threshold_dbm)
    }

    pub fn noise_power_w(&self) -> f64 {
        noise_power(self.noise_density_dbm_hz, self.bandwidth_hz())
    }

    pub fn fading(&self) -> Result<FadingModel> {
        FadingModel::new(self.fading_rate)
    }

    pub fn deployment(&self) -> Result<DeploymentModel> {
        DeploymentModel::from_per_km2(self.density_per_km2)
    }

    /// AP-to-client link: transmitter at the AP height, receiver at client height.
    pub fn ap_client_pathloss(&self) -> Result<PathlossModel> {
        PathlossModel::dual_slope(LinkGeometry::new(
            self.wavelength_m(),
            self.h_ap_m,
            self.h_client_m,
        )?)
    }

    /// AP-to-AP link: both ends at the AP height.
    pub fn ap_ap_pathloss(&self) -> Result<PathlossModel> {
        PathlossModel::dual_slope(LinkGeometry::new(
            self.wavelength_m(),
            self.h_ap_m,
            self.h_ap_m,
        )?)
    }

    pub fn uplink_model(&self) -> Result<UplinkModel> {
        UplinkModel::new(
            self.p_client_w,
            self.uplink_threshold_w(),
            self.ap_client_pathloss()?,
            self.fading()?,
        )
    }

    pub fn contention_model(&self) -> Result<ContentionModel> {
        ContentionModel::new(
            self.p_ap_w,
            self.cca_threshold_w(),
            self.ap_ap_pathloss()?,
            self.fading()?,
            self.deployment()?,
        )
    }

    pub fn sinr_model(&self) -> Result<SinrModel> {
        SinrModel::new(
            self.contention_model()?,
            self.ap_client_pathloss()?,
            self.noise_power_w(),
        )
    }
}

/// Read and validate a config file; returns the config and its deployment.
pub fn load_config(path: impl AsRef<Path>) -> Result<(NetworkConfig, DeploymentModel)> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let cfg = NetworkConfig::from_toml_str(&text)?;
    let deployment = cfg.deployment()?;
    Ok((cfg, deployment))
}
