//! Treatment-assignment designs for randomized experiments on networks with
//! interference.
//!
//! The crate covers the full pipeline used to study the Neymanian
//! difference-in-means estimator when a unit's outcome depends on how many of
//! its neighbors are treated:
//!
//! - [`graph`]: simple undirected graphs, degree statistics, edge-list IO and
//!   the random-graph generators (Erdős–Rényi, preferential attachment, and
//!   the "copies" construction that always admits a perfect quasi-coloring).
//! - [`design`]: experiment configuration, partitions, and the designs
//!   (completely randomized, within-block, partition by degree, randomized
//!   degree blocking, type-restricted), plus exhaustive enumerators.
//! - [`interference`]: symmetric interference families, Lipschitz constants,
//!   the per-edge weight `W_v(w)` and the bidegree metric `d_K`.
//! - [`outcome`]: the linear outcome model, the estimator, `t_ideal`, the
//!   interference gap `xi`, and homophily statistics.
//! - [`quasicoloring`]: bidegree measures, perfect quasi-coloring checks and
//!   search, the Wasserstein norm under `d_K`, and the constant `C_P`.
//! - [`bounds`]: closed-form bias and RMSE bounds.
//! - [`oracle`]: exact enumeration moments and seeded Monte Carlo moments.
//! - [`sim`]: desk-scale simulation runs and parameter sweeps emitting CSV.
//!
//! Inner loops (Monte Carlo replications, exhaustive enumeration, sweep
//! cells) run on rayon when the `parallel` feature is enabled. Every result
//! is a pure function of its inputs and seeds; the thread count never
//! changes an output bit.

pub mod bounds;
pub mod design;
pub mod error;
pub mod exec;
pub mod graph;
pub mod interference;
pub mod oracle;
pub mod outcome;
pub mod quasicoloring;
pub mod rng;
pub mod sim;
mod sum;

pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{DegreeStats, Graph};
