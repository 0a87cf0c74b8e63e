//! Simulation lab for the random greedy q-linear process.
//!
//! The process grows a q-uniform linear hypergraph (a partial Steiner
//! system with `t = 2`) on `[n]` by repeatedly adding a uniformly random
//! q-set that shares at most one vertex with every earlier edge. This crate
//! runs the process reproducibly, measures its codegrees against the
//! predicted trajectories, and checks the surrounding combinatorics against
//! brute-force oracles.

pub mod binom;
pub mod codegree;
pub mod error;
pub mod experiment;
pub mod hypergraph;
pub mod oracle;
pub mod process;
pub mod rng;
pub mod trajectory;

pub use error::{Error, Result};
pub use hypergraph::{LinearHypergraph, SearchBudget, Vertex};
pub use process::{ProcessConfig, ProcessState, StopRule};
pub use trajectory::TrajectoryParams;
