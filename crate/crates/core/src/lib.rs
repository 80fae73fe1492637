//! Analytical and simulated performance of CSMA/CA networks in TV white
//! space channels.
//!
//! The analytic chain runs `propagation` -> `uplink` / `csma` -> `sinr`, with
//! `deployment` supplying the distance laws and `montecarlo` providing a
//! brute-force estimate of every analytic quantity.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csma;
pub mod deployment;
pub mod error;
pub mod montecarlo;
pub mod planner;
pub mod propagation;
pub mod quad;
pub mod sinr;
pub mod units;
pub mod uplink;

pub use config::{load_config, NetworkConfig};
pub use csma::{ConcurrencyTable, ContentionModel, Frame};
pub use deployment::{DeploymentModel, ServingDistance, Viability};
pub use error::{Error, Result};
pub use propagation::{FadingModel, LinkGeometry, PathlossModel};
pub use sinr::{MetricCurve, SinrModel};
pub use uplink::UplinkModel;
