//! Monte Carlo oracle: marked Poisson fields, mark-based contention and
//! replication estimators with standard errors.
//!
//! Replications run in parallel; every draw is keyed by `(seed,
//! replication, attempt)` so results are identical for any thread count.

pub mod contention;
pub mod estimators;
pub mod field;
pub mod rng;

pub use contention::{contention_outcome, Contention};
pub use estimators::{
    contention_window, estimate_pt, estimate_q, estimate_sinr_ccdf, estimate_sinr_in,
    estimate_starvation, estimate_uplink_marginal, Estimate, McRun, McSettings, Replication,
};
pub use field::{sample_field, ApPoint, PointField, Rect, Window};
pub use rng::RepKey;
