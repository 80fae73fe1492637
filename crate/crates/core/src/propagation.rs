//! Pathloss, fading and received power.
//!
//! Losses are positive dB quantities; the linear quantity fed into
//! received-power and detection formulas is always the *gain*
//! `10^(-loss/10)`, capped at 1.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{ensure_positive, Error, Result};

/// Default floor for the pathloss models, in meters.
pub const DEFAULT_MIN_DISTANCE: f64 = 1.0;

/// Antenna heights and wavelength of a link. Heights are stored with
/// `h_t >= h_r`; the two-ray quantities only depend on their sum and
/// absolute difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    wavelength: f64,
    h_t: f64,
    h_r: f64,
}

impl LinkGeometry {
    pub fn new(wavelength: f64, h_t: f64, h_r: f64) -> Result<Self> {
        ensure_positive("wavelength", wavelength)?;
        ensure_positive("h_t", h_t)?;
        ensure_positive("h_r", h_r)?;
        let (h_t, h_r) = if h_t >= h_r { (h_t, h_r) } else { (h_r, h_t) };
        Ok(Self { wavelength, h_t, h_r })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn h_t(&self) -> f64 {
        self.h_t
    }

    pub fn h_r(&self) -> f64 {
        self.h_r
    }

    /// Distance at which the dual-slope exponent switches from 2.5 to 4.
    pub fn breakpoint_distance(&self) -> Result<f64> {
        let sum = self.h_t + self.h_r;
        let diff = self.h_t - self.h_r;
        let (s2, d2) = (sum * sum, diff * diff);
        let half = 0.5 * self.wavelength;
        let h2 = half * half;
        let radicand = (s2 - d2).powi(2) - 2.0 * (s2 + d2) * h2 + h2 * h2;
        if radicand <= 0.0 {
            return Err(Error::Domain(format!(
                "breakpoint radicand {radicand:.3e} <= 0 for heights {} m / {} m",
                self.h_t, self.h_r
            )));
        }
        Ok(radicand.sqrt() / self.wavelength)
    }

    /// Basic transmission loss at the breakpoint, in dB (positive).
    pub fn los_pathloss_db(&self) -> f64 {
        let ratio = self.wavelength * self.wavelength
            / (8.0 * std::f64::consts::PI * self.h_t * self.h_r);
        (20.0 * ratio.log10()).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    DualSlope {
        geometry: LinkGeometry,
        breakpoint: f64,
        los_db: f64,
    },
    /// Suburban Hata with the base-station height fixed at 30 m.
    SuburbanHata,
}

const HATA_INTERCEPT_DB: f64 = 124.3;
const HATA_SLOPE_DB: f64 = 35.23;

/// Loss in dB at a distance, with a flag telling whether the distance had to
/// be raised to the model floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossEval {
    pub loss_db: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossModel {
    law: Law,
    d_min: f64,
}

impl PathlossModel {
    pub fn dual_slope(geometry: LinkGeometry) -> Result<Self> {
        let breakpoint = geometry.breakpoint_distance()?;
        Ok(Self {
            law: Law::DualSlope {
                geometry,
                breakpoint,
                los_db: geometry.los_pathloss_db(),
            },
            d_min: DEFAULT_MIN_DISTANCE,
        })
    }

    pub fn suburban_hata() -> Self {
        Self {
            law: Law::SuburbanHata,
            d_min: DEFAULT_MIN_DISTANCE,
        }
    }

    pub fn with_min_distance(mut self, d_min: f64) -> Result<Self> {
        self.d_min = ensure_positive("d_min", d_min)?;
        Ok(self)
    }

    pub fn min_distance(&self) -> f64 {
        self.d_min
    }

    /// Breakpoint distance for the dual-slope law.
    pub fn breakpoint(&self) -> Option<f64> {
        match self.law {
            Law::DualSlope { breakpoint, .. } => Some(breakpoint),
            Law::SuburbanHata => None,
        }
    }

    /// Pathloss exponent of the outermost branch (loss slope per decade / 10).
    pub fn far_exponent(&self) -> f64 {
        match self.law {
            Law::DualSlope { .. } => 4.0,
            Law::SuburbanHata => HATA_SLOPE_DB / 10.0,
        }
    }

    pub fn geometry(&self) -> Option<LinkGeometry> {
        match self.law {
            Law::DualSlope { geometry, .. } => Some(geometry),
            Law::SuburbanHata => None,
        }
    }

    pub fn evaluate(&self, d: f64) -> PathlossEval {
        let clamped = !(d >= self.d_min);
        let d = if clamped { self.d_min } else { d };
        let loss_db = match self.law {
            Law::DualSlope {
                breakpoint, los_db, ..
            } => {
                let slope = if d < breakpoint { 25.0 } else { 40.0 };
                los_db + 20.0 + slope * (d / breakpoint).log10()
            }
            Law::SuburbanHata => HATA_INTERCEPT_DB + HATA_SLOPE_DB * (d / 1000.0).log10(),
        };
        PathlossEval { loss_db, clamped }
    }

    /// Loss in dB; distances below the floor are clamped.
    pub fn loss_db(&self, d: f64) -> f64 {
        self.evaluate(d).loss_db
    }

    /// Linear gain in (0, 1].
    pub fn gain(&self, d: f64) -> f64 {
        loss_to_gain(self.loss_db(d))
    }

    /// Smallest distance `>= d_min` whose loss reaches `loss_db`.
    pub fn distance_at_loss(&self, loss_db: f64) -> f64 {
        let d = match self.law {
            Law::DualSlope {
                breakpoint, los_db, ..
            } => {
                let excess = loss_db - los_db - 20.0;
                let slope = if excess < 0.0 { 25.0 } else { 40.0 };
                breakpoint * 10f64.powf(excess / slope)
            }
            Law::SuburbanHata => 1000.0 * 10f64.powf((loss_db - HATA_INTERCEPT_DB) / HATA_SLOPE_DB),
        };
        d.max(self.d_min)
    }

    /// Smallest distance `>= d_min` at which the gain has dropped to `gain`.
    pub fn distance_at_gain(&self, gain: f64) -> f64 {
        self.distance_at_loss(-10.0 * gain.log10())
    }
}

pub fn loss_to_gain(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0).min(1.0)
}

/// Exponential power fading with rate `rate` (mean `1/rate`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingModel {
    rate: f64,
}

impl Default for FadingModel {
    fn default() -> Self {
        Self { rate: 1.0 }
    }
}

impl FadingModel {
    pub fn new(rate: f64) -> Result<Self> {
        Ok(Self {
            rate: ensure_positive("fading rate", rate)?,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.rate
    }

    /// P(F > x).
    pub fn survival(&self, x: f64) -> f64 {
        (-self.rate * x).exp()
    }

    /// Laplace transform E[exp(-s F)].
    pub fn laplace(&self, s: f64) -> f64 {
        self.rate / (self.rate + s)
    }

    /// Inverse-CDF draw from a uniform in (0, 1].
    pub fn from_uniform(&self, u: f64) -> f64 {
        -u.ln() / self.rate
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Exp::new(self.rate)
            .expect("rate validated at construction")
            .sample(rng)
    }

    /// Probability that `power * gain * F` exceeds `threshold`.
    pub fn exceed_probability(&self, power: f64, gain: f64, threshold: f64) -> f64 {
        if threshold <= 0.0 {
            return 1.0;
        }
        let mean_rx = power * gain;
        if mean_rx <= 0.0 {
            return 0.0;
        }
        self.survival(threshold / mean_rx)
    }
}

pub fn received_power(p_tx: f64, gain: f64, fade: f64) -> f64 {
    p_tx * gain * fade
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::wavelength;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LAMBDA: f64 = 0.4997;

    fn geom(h_t: f64, h_r: f64) -> LinkGeometry {
        LinkGeometry::new(LAMBDA, h_t, h_r).unwrap()
    }

    // Hand evaluation of the breakpoint/LOS formulas (python one-liners, frozen).
    #[test]
    fn breakpoint_values() {
        assert!((geom(30.0, 1.0).breakpoint_distance().unwrap() - 238.261).abs() < 0.001);
        assert!((geom(1.5, 1.0).breakpoint_distance().unwrap() - 11.8718).abs() < 1e-3);
        let g = LinkGeometry::new(LAMBDA / 10.0, 30.0, 1.0).unwrap();
        let ratio = g.breakpoint_distance().unwrap() / geom(30.0, 1.0).breakpoint_distance().unwrap();
        assert!((ratio - 10.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn degenerate_heights_are_a_domain_error() {
        let g = LinkGeometry::new(LAMBDA, 0.2, 0.05).unwrap();
        assert!(matches!(g.breakpoint_distance(), Err(Error::Domain(_))));
        assert!(PathlossModel::dual_slope(g).is_err());
    }

    #[test]
    fn heights_are_swapped_into_order() {
        let g = LinkGeometry::new(LAMBDA, 1.0, 30.0).unwrap();
        assert_eq!(g.h_t(), 30.0);
        assert_eq!(g.h_r(), 1.0);
        assert!(LinkGeometry::new(0.0, 1.0, 1.0).is_err());
        assert!(LinkGeometry::new(LAMBDA, -1.0, 1.0).is_err());
    }

    #[test]
    fn los_loss_values() {
        assert!((geom(30.0, 1.0).los_pathloss_db() - 69.60).abs() < 0.01);
        assert!((geom(30.0, 30.0).los_pathloss_db() - 99.14).abs() < 0.01);
        let a = geom(3.0, 1.0).los_pathloss_db();
        let b = geom(30.0, 1.0).los_pathloss_db();
        assert!((b - a - 20.0).abs() < 1e-9);
    }

    #[test]
    fn dual_slope_branches() {
        let m = PathlossModel::dual_slope(geom(30.0, 1.0)).unwrap();
        let rbp = m.breakpoint().unwrap();
        let los = geom(30.0, 1.0).los_pathloss_db();
        assert!((m.loss_db(rbp) - (los + 20.0)).abs() < 1e-12);
        let below = los + 20.0 + 25.0 * ((rbp * (1.0 - 1e-15)) / rbp).log10();
        assert!((m.loss_db(rbp * (1.0 - 1e-15)) - below).abs() < 1e-9);
        assert!((m.loss_db(2.0 * rbp) - (los + 20.0 + 40.0 * 2f64.log10())).abs() < 1e-12);
        assert!((m.loss_db(2.0 * rbp) - los - 32.041).abs() < 1e-3);
    }

    #[test]
    fn hata_anchor() {
        let m = PathlossModel::suburban_hata();
        assert!((m.loss_db(1000.0) - 124.3).abs() < 1e-12);
    }

    #[test]
    fn clamping_below_floor() {
        let m = PathlossModel::dual_slope(geom(30.0, 1.0)).unwrap();
        let e = m.evaluate(0.0);
        assert!(e.clamped);
        assert_eq!(e.loss_db, m.loss_db(1.0));
        assert!(!m.evaluate(1.0).clamped);
        assert!(m.evaluate(f64::NAN).clamped);
    }

    #[test]
    fn gain_conversions() {
        assert_eq!(loss_to_gain(0.0), 1.0);
        assert!((loss_to_gain(10.0) - 0.1).abs() < 1e-15);
        assert_eq!(loss_to_gain(-5.0), 1.0);
        let m = PathlossModel::dual_slope(geom(30.0, 1.0)).unwrap();
        let g = m.gain(m.breakpoint().unwrap());
        assert!((g / 1.096_769e-9 - 1.0).abs() < 1e-5, "{g}");
    }

    #[test]
    fn inverse_distance() {
        for m in [
            PathlossModel::dual_slope(geom(30.0, 1.0)).unwrap(),
            PathlossModel::dual_slope(geom(10.0, 10.0)).unwrap(),
            PathlossModel::suburban_hata(),
        ] {
            for d in [3.0, 50.0, 400.0, 2_000.0, 40_000.0] {
                let back = m.distance_at_loss(m.loss_db(d));
                assert!((back / d - 1.0).abs() < 1e-10, "{d} -> {back}");
            }
        }
    }

    #[test]
    fn received_power_examples() {
        assert!((received_power(4.0, 1e-9, 1.0) - 4e-9).abs() < 1e-24);
        assert_eq!(received_power(1.0, 0.3, 0.0), 0.0);
        // 0.1 W client at 700 m over the 30 m / 1 m link: hand-evaluated
        // loss 89.60 + 40 log10(700 / 238.26) = 108.32 dB -> -88.3 dBm.
        let m = PathlossModel::dual_slope(geom(30.0, 1.0)).unwrap();
        let p = received_power(0.1, m.gain(700.0), 1.0);
        let dbm = crate::units::watts_to_dbm(p);
        assert!((dbm - (-88.32)).abs() < 0.02, "{dbm}");
        assert!(dbm < -82.0);
    }

    #[test]
    fn fading_mean_and_laplace() {
        let f = FadingModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| f.sample(&mut rng)).sum::<f64>() / n as f64;
        // Exp(1) has unit variance.
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "{mean}");
        assert!((f.laplace(0.0) - 1.0).abs() < 1e-15);
        assert!((f.laplace(1.0) - 0.5).abs() < 1e-15);
        let f2 = FadingModel::new(2.0).unwrap();
        assert_eq!(f2.mean(), 0.5);
        assert!(FadingModel::new(0.0).is_err());
    }

    #[test]
    fn table_frequency_wavelength() {
        assert!((wavelength(600e6) - LAMBDA).abs() < 1e-4);
    }
}
