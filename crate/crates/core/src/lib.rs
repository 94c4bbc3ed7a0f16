//! Stable Max-Cut instances: generation, certification and solving.
//!
//! An instance is `γ`-stable when its maximum cut stays the unique maximum
//! under every entrywise multiplication of the weights by factors in `[1, γ]`.
//! The crate provides
//!
//! * [`graph`]: the dense weighted-graph model, cuts, perturbations, contraction;
//! * [`oracle`]: exhaustive ground truth (max cut, `γ*`, `α*`, `k*`, Cheeger);
//! * [`combinatorial`]: greedy bipartite growing and neighborhood contraction;
//! * [`spectral`]: eigensolver, spectral partitioning and sufficient conditions;
//! * [`dual`]: the min-trace dual problem and certified extended spectral solving;
//! * [`generators`]: seeded planted, random and amplified instances;
//! * [`io`]: the text graph format and generator sidecars.

pub mod combinatorial;
pub mod dual;
pub mod error;
pub mod extended;
pub mod generators;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use extended::ExtReal;
pub use graph::{cut_value, Cut, Perturbation, WeightedGraph};
pub use oracle::OracleConfig;
