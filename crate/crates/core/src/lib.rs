//! Solution-space geometry of random k-SAT: exhaustive cluster analysis,
//! coarsening to cores, the balls-in-bins stripping process, and the
//! first-moment and large-deviation bounds that locate the clustering and
//! freezing thresholds.

pub mod cli;
pub mod coarsening;
pub mod deviations;
pub mod error;
pub mod formula;
pub mod geometry;
pub mod numeric;
pub mod rates;
pub mod reference;
pub mod stripping;

pub use error::{Error, Result};
