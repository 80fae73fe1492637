//! Channel budgeting for a rural broadband deployment.

use std::path::{Path, PathBuf};

use crate::deployment::Viability;
use crate::error::{Error, Result};
use crate::sinr::SinrModel;

/// Mean Earth radius used by the equirectangular area estimate.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Household {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

/// Households read from a CSV file.
#[derive(Debug, Clone)]
pub struct HouseholdSet {
    pub households: Vec<Household>,
}

impl HouseholdSet {
    pub fn len(&self) -> usize {
        self.households.len()
    }

    pub fn is_empty(&self) -> bool {
        self.households.is_empty()
    }

    /// Area of the lat/lon bounding box in km², equirectangular projection at
    /// the box's mean latitude.
    pub fn bounding_box_area_km2(&self) -> f64 {
        let (mut lat_lo, mut lat_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut lon_lo, mut lon_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for h in &self.households {
            lat_lo = lat_lo.min(h.lat);
            lat_hi = lat_hi.max(h.lat);
            lon_lo = lon_lo.min(h.lon);
            lon_hi = lon_hi.max(h.lon);
        }
        if self.households.is_empty() {
            return 0.0;
        }
        let mean_lat = (0.5 * (lat_lo + lat_hi)).to_radians();
        let height = EARTH_RADIUS_KM * (lat_hi - lat_lo).to_radians();
        let width = EARTH_RADIUS_KM * (lon_hi - lon_lo).to_radians() * mean_lat.cos();
        height * width
    }
}

/// Read `id,lat,lon` rows (WGS-84 decimal degrees, header required).
pub fn load_households(path: impl AsRef<Path>) -> Result<HouseholdSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let parse_error = |line: u64, reason: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        reason,
    };
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| parse_error(1, format!("missing column `{name}`")))
    };
    let (id_col, lat_col, lon_col) = (column("id")?, column("lat")?, column("lon")?);

    let mut households = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize, name: &str| {
            record
                .get(col)
                .ok_or_else(|| parse_error(line, format!("missing field `{name}`")))
        };
        let coord = |col: usize, name: &str, limit: f64| -> Result<f64> {
            let raw = field(col, name)?;
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_error(line, format!("`{name}` is not a number: {raw:?}")))?;
            if !(v.is_finite() && v.abs() <= limit) {
                return Err(parse_error(line, format!("`{name}` out of range: {v}")));
            }
            Ok(v)
        };
        households.push(Household {
            id: field(id_col, "id")?.to_string(),
            lat: coord(lat_col, "lat", 90.0)?,
            lon: coord(lon_col, "lon", 180.0)?,
        });
    }
    if households.is_empty() {
        return Err(Error::Domain(format!(
            "{}: no households in file",
            path.display()
        )));
    }
    Ok(HouseholdSet { households })
}

/// Demand side of a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanInput {
    pub households: u64,
    pub area_km2: f64,
    /// Per-household demand in Mbps.
    pub per_household_mbps: f64,
    pub available_channels: u64,
    pub channel_bandwidth_mhz: f64,
}

impl PlanInput {
    /// Build from a household file; `area_km2` overrides the bounding box.
    pub fn from_households(
        set: &HouseholdSet,
        area_km2: Option<f64>,
        per_household_mbps: f64,
        available_channels: u64,
        channel_bandwidth_mhz: f64,
    ) -> Self {
        Self {
            households: set.len() as u64,
            area_km2: area_km2.unwrap_or_else(|| set.bounding_box_area_km2()),
            per_household_mbps,
            available_channels,
            channel_bandwidth_mhz,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.area_km2.is_finite() && self.area_km2 > 0.0) {
            return Err(Error::Domain(format!(
                "area must be positive, got {} km²",
                self.area_km2
            )));
        }
        if !(self.per_household_mbps.is_finite() && self.per_household_mbps >= 0.0) {
            return Err(Error::invalid(
                "per_household_mbps",
                format!("must be >= 0, got {}", self.per_household_mbps),
            ));
        }
        if !(self.channel_bandwidth_mhz.is_finite() && self.channel_bandwidth_mhz > 0.0) {
            return Err(Error::invalid(
                "channel_bandwidth_mhz",
                format!("must be > 0, got {}", self.channel_bandwidth_mhz),
            ));
        }
        Ok(())
    }
}

/// Aggregate demand density in Mbps/km².
pub fn required_ase(input: &PlanInput) -> Result<f64> {
    input.validate()?;
    Ok(input.households as f64 * input.per_household_mbps / input.area_km2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    /// Mbps/km².
    pub required_ase: f64,
    /// Mbps/km² delivered by one channel.
    pub per_channel_ase: f64,
    pub channels_needed: u64,
    pub available_channels: u64,
    pub feasible: bool,
    /// Channels missing when infeasible.
    pub shortfall: u64,
}

/// Channels needed to carry `required` Mbps/km² when one channel carries
/// `per_channel` Mbps/km². Always rounds up.
pub fn channels_needed(required: f64, per_channel: f64, available: u64) -> Result<PlanResult> {
    if !(per_channel.is_finite() && per_channel > 0.0) {
        return Err(Error::Domain(format!(
            "per-channel ASE must be positive, got {per_channel} Mbps/km²"
        )));
    }
    if !(required.is_finite() && required >= 0.0) {
        return Err(Error::invalid(
            "required_ase",
            format!("must be >= 0, got {required}"),
        ));
    }
    let channels = (required / per_channel).ceil() as u64;
    Ok(PlanResult {
        required_ase: required,
        per_channel_ase: per_channel,
        channels_needed: channels,
        available_channels: available,
        feasible: channels <= available,
        shortfall: channels.saturating_sub(available),
    })
}

/// Per-channel ASE in Mbps/km² from a spectral efficiency in bps/Hz/km².
pub fn per_channel_ase(ase_bps_hz_km2: f64, channel_bandwidth_mhz: f64) -> f64 {
    ase_bps_hz_km2 * channel_bandwidth_mhz
}

/// Plan against the ASE predicted by the network model.
pub fn plan_with_model(
    input: &PlanInput,
    sinr: &SinrModel,
    viability: &dyn Viability,
) -> Result<PlanResult> {
    let ase = sinr.area_spectral_efficiency(viability)?;
    plan_with_ase(input, ase)
}

/// Plan against a given spectral efficiency in bps/Hz/km².
pub fn plan_with_ase(input: &PlanInput, ase_bps_hz_km2: f64) -> Result<PlanResult> {
    let required = required_ase(input)?;
    channels_needed(
        required,
        per_channel_ase(ase_bps_hz_km2, input.channel_bandwidth_mhz),
        input.available_channels,
    )
}
