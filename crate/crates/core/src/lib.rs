//! Executable versions of the unambiguity constructions for nondeterministic
//! logspace: prime-hash isolation of path weights, an audited unambiguous
//! reachability decider, exact path counting through weight queries, machine
//! class predicates over configuration graphs, and the accompanying
//! reductions, each checked against brute-force oracles.
//!
//! Everything operates on explicit graphs; no space bounds are enforced.

pub mod acceptance;
pub mod counting;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod isolation;
pub mod machines;
pub mod par;
pub mod ra;
pub mod reductions;

pub use error::{Error, Result};
pub use graph::{reach, Cost, DiGraph, EdgeId, Vertex, WeightFn};
pub use machines::ConfigMachine;
pub use par::Execution;
