//! Mark-based contention on a realized field.

use crate::csma::{ContentionModel, SIMULATION_CUTOFF_DETECTION};

use super::field::ApPoint;
use super::rng::{RepKey, Salt};

/// Whether `listener` senses `talker` in realization `key`. Fading is drawn
/// independently for each ordered pair.
pub fn senses(model: &ContentionModel, key: RepKey, listener: &ApPoint, talker: &ApPoint) -> bool {
    let d = listener.distance_to(talker.x, talker.y);
    let u = key.uniform(Salt::Sense, &[listener.id, talker.id]);
    let fade = model.fading().from_uniform(u);
    model.ap_power() * model.pathloss().gain(d) * fade > model.cca_threshold()
}

/// Uniform grid over a point set, each cell sorted by mark.
struct SpatialIndex {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl SpatialIndex {
    fn new(points: &[ApPoint], cell: f64) -> Self {
        let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
        let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x);
            y1 = y1.max(p.y);
        }
        if points.is_empty() {
            (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
        }
        let nx = ((x1 - x0) / cell).floor() as usize + 1;
        let ny = ((y1 - y0) / cell).floor() as usize + 1;
        let mut cells = vec![Vec::new(); nx * ny];
        let mut index = Self {
            x0,
            y0,
            cell,
            nx,
            ny,
            cells: Vec::new(),
        };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = index.cell_of(p.x, p.y);
            cells[cy * nx + cx].push(i as u32);
        }
        for c in &mut cells {
            c.sort_by(|&a, &b| points[a as usize].mark.total_cmp(&points[b as usize].mark));
        }
        index.cells = cells;
        index
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let cx = (((x - self.x0) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = (((y - self.y0) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        (cx, cy)
    }
}

/// Transmission decisions for every AP of a realization: an AP transmits
/// when it senses no AP with a smaller mark. APs farther apart than the
/// distance where sensing probability drops below `1e-12` are ignored.
pub struct Contention<'a> {
    model: &'a ContentionModel,
    key: RepKey,
    points: &'a [ApPoint],
    cutoff: f64,
    index: SpatialIndex,
}

impl<'a> Contention<'a> {
    pub fn new(model: &'a ContentionModel, key: RepKey, points: &'a [ApPoint]) -> Self {
        let cutoff = model.distance_at_detection(SIMULATION_CUTOFF_DETECTION);
        Self {
            model,
            key,
            points,
            cutoff,
            index: SpatialIndex::new(points, cutoff),
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn transmits(&self, i: usize) -> bool {
        let me = &self.points[i];
        let (cx, cy) = self.index.cell_of(me.x, me.y);
        let cut2 = self.cutoff * self.cutoff;
        for gy in cy.saturating_sub(1)..=(cy + 1).min(self.index.ny - 1) {
            for gx in cx.saturating_sub(1)..=(cx + 1).min(self.index.nx - 1) {
                for &j in &self.index.cells[gy * self.index.nx + gx] {
                    let other = &self.points[j as usize];
                    if other.mark >= me.mark {
                        break;
                    }
                    let (dx, dy) = (other.x - me.x, other.y - me.y);
                    if dx * dx + dy * dy <= cut2 && senses(self.model, self.key, me, other) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Indices of the transmitting APs.
pub fn contention_outcome(model: &ContentionModel, key: RepKey, points: &[ApPoint]) -> Vec<usize> {
    let c = Contention::new(model, key, points);
    (0..points.len()).filter(|&i| c.transmits(i)).collect()
}

/// Whether `ap` transmits against the points of `field`, scanning all of
/// them; for a single AP this beats building an index.
pub fn transmits_among(model: &ContentionModel, key: RepKey, ap: &ApPoint, field: &[ApPoint]) -> bool {
    let cutoff = model.distance_at_detection(SIMULATION_CUTOFF_DETECTION);
    !field.iter().any(|other| {
        other.mark < ap.mark
            && other.id != ap.id
            && ap.distance_to(other.x, other.y) <= cutoff
            && senses(model, key, ap, other)
    })
}
