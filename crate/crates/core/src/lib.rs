//! Extrinsic geometry of spacelike submanifolds in warped products `ε I ×ₐ Q`,
//! evaluated with truncated multivariate Taylor series.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod catalog;
pub mod error;
pub mod exprlang;
pub mod extrinsic;
pub mod identities;
pub mod immersion;
pub mod jets;
pub mod linalg;
pub mod residual;
pub mod runner;
pub mod tensor;

pub use ambient::{AmbientConfig, AmbientSpec, Interval};
pub use catalog::CatalogEntry;
pub use error::{GeomError, Result};
pub use immersion::{Immersion, ImmersionSpec};
pub use residual::{IdentityReport, PointResult, Residual};
pub use runner::{run, RunConfig, RunReport};
