//! Unit conversions used at the configuration boundary.

/// Speed of light used to derive the wavelength from the channel frequency.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

pub const SQUARE_METERS_PER_SQUARE_KM: f64 = 1.0e6;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Total thermal noise power in watts over `bandwidth_hz`.
pub fn noise_power(density_dbm_per_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(density_dbm_per_hz + 10.0 * bandwidth_hz.log10())
}

pub fn per_km2_to_per_m2(density: f64) -> f64 {
    density / SQUARE_METERS_PER_SQUARE_KM
}

pub fn per_m2_to_per_km2(density: f64) -> f64 {
    density * SQUARE_METERS_PER_SQUARE_KM
}
