//! Executable checks of the convergence and concentration theory.
//!
//! - [`saddle`]: dual certificates for the synchronous Lyapunov function.
//! - [`lyapunov`]: `V^t`, residuals, objective gaps and the `A(t)` diagnostic.
//! - [`interchange`]: the swap chain on permutations and its spectral gap.
//! - [`bounds`]: Hoeffding/Bernstein tail bounds for GoRank and their
//!   Monte-Carlo counterparts.

pub mod bounds;
pub mod interchange;
pub mod lyapunov;
pub mod saddle;

pub use bounds::{bernstein_bound, empirical_deviation, hoeffding_bound, DeviationReport};
pub use interchange::{build_interchange_chain, verify_gap_identity, GapCheck, InterchangeChain};
pub use lyapunov::{lyapunov, objective_gap, residual_norm, sync_trace, track_a, SyncTrace, SyncTraceRow};
pub use saddle::{solve_saddle_dual, SaddlePoint};
