//! Realizations of the marked Poisson field of APs.
//!
//! The plane is cut into square tiles on a lattice anchored at the origin;
//! each tile draws its own Poisson count, positions and marks from a stream
//! keyed by the tile coordinates. A larger window therefore only adds tiles
//! and leaves the points it shares with a smaller one unchanged.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::rng::{RepKey, Salt};

/// Mean number of points per tile.
const POINTS_PER_TILE: f64 = 64.0;

/// An AP of a realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApPoint {
    pub x: f64,
    pub y: f64,
    /// Back-off mark in (0, 1).
    pub mark: f64,
    /// Stable identity used to key per-pair fading.
    pub id: u64,
}

impl ApPoint {
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    /// Square of half-width `h` centred on the origin.
    pub fn centered(h: f64) -> Self {
        Self {
            x0: -h,
            y0: -h,
            x1: h,
            y1: h,
        }
    }

    pub fn around(x: f64, y: f64, h: f64) -> Self {
        Self {
            x0: x - h,
            y0: y - h,
            x1: x + h,
            y1: y + h,
        }
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Simulation window: a measured square plus a guard band around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub half_width: f64,
    pub guard: f64,
}

impl Window {
    pub fn outer(&self) -> Rect {
        Rect::centered(self.half_width + self.guard)
    }

    pub fn inner(&self) -> Rect {
        Rect::centered(self.half_width)
    }
}

/// A realized marked Poisson field.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    pub window_half_width: f64,
    pub guard: f64,
    pub points: Vec<ApPoint>,
    pub seed: u64,
}

/// Tile side for a density in APs/m².
pub fn tile_side(density: f64) -> f64 {
    (POINTS_PER_TILE / density).sqrt()
}

/// All points of the field inside `rect`.
pub fn realize(density: f64, key: RepKey, rect: Rect) -> Vec<ApPoint> {
    let mut out = Vec::new();
    if density <= 0.0 {
        return out;
    }
    let side = tile_side(density);
    let mean = density * side * side;
    let poisson = Poisson::new(mean).expect("positive mean");
    let (tx0, tx1) = ((rect.x0 / side).floor() as i64, (rect.x1 / side).floor() as i64);
    let (ty0, ty1) = ((rect.y0 / side).floor() as i64, (rect.y1 / side).floor() as i64);
    for tx in tx0..=tx1 {
        for ty in ty0..=ty1 {
            let mut rng = key.tile_rng(tx, ty);
            let count = poisson.sample(&mut rng) as u64;
            for k in 0..count {
                let x = (tx as f64 + rng.random::<f64>()) * side;
                let y = (ty as f64 + rng.random::<f64>()) * side;
                let mark = open_unit(&mut rng);
                if rect.contains(x, y) {
                    out.push(ApPoint {
                        x,
                        y,
                        mark,
                        id: key.hash(Salt::PointId, &[tx as u64, ty as u64, k]),
                    });
                }
            }
        }
    }
    out
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Realize the field on a window centred on the origin.
pub fn sample_field(density: f64, window: Window, key: RepKey) -> PointField {
    PointField {
        window_half_width: window.half_width,
        guard: window.guard,
        points: realize(density, key, window.outer()),
        seed: key.seed,
    }
}
