//! Checkpoint placement for systematic fault-injection campaigns.
//!
//! Given how many injections are planned at each cycle of a golden run, pick
//! `k` checkpoint times that minimize the total fault-free forwarding work of
//! the campaign. Placement strategies:
//!
//! - [`placement::uniform_placement`]: evenly spaced, the usual baseline;
//! - [`placement::dp_placement`]: exact, `O(k n^2)` dynamic program;
//! - [`genetic::genetic_placement`]: seeded genetic search for large inputs;
//! - [`ilp::build_ilp`]: the same problem as an ILP for an external solver.
//!
//! ```
//! use ckptsel::{dp_placement, uniform_placement, FaultDistribution};
//!
//! let d = FaultDistribution::new([(0, 2), (1, 1), (3, 1)], 0, 4)?;
//! assert_eq!(uniform_placement(&d, 1).report.saved, 2);
//! let best = dp_placement(&d, 1);
//! assert_eq!(best.plan.times(), &[3]);
//! assert_eq!(best.report.saved, 3);
//! # Ok::<(), ckptsel::Error>(())
//! ```

pub mod cachesim;
pub mod distribution;
mod error;
pub mod format;
pub mod genetic;
pub mod ilp;
pub mod metrics;
pub mod placement;
pub mod synth;

pub use distribution::{CheckpointPlan, FaultDistribution, Population, Rectangle, SavingsReport};
pub use error::{Error, Result};
pub use genetic::{genetic_placement, GaConfig};
pub use metrics::{wfft, NonUniformityScore};
pub use placement::{
    dp_placement, exhaustive_placement, uniform_placement, Method, PlacementResult,
};
