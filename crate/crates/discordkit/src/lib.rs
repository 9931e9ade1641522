//! Two-qubit quantum correlation toolkit.
//!
//! Computes quantum discord, classical correlations, mutual information and
//! Wootters concurrence for arbitrary two-qubit density matrices, constructs
//! the extremal mixed-state families that maximize discord at fixed classical
//! correlations, and runs seeded parallel Monte Carlo surveys of random
//! states by rank.
//!
//! All entropies are in bits (base-2 logarithms). The computational basis is
//! ordered |00>, |01>, |10>, |11> everywhere, with the first label belonging
//! to qubit A and the second to qubit B.

pub mod correlations;
pub mod mcstats;
pub mod mdms;
pub mod qcore;
pub mod randstate;
pub mod statefile;

mod optimize;

pub use qcore::{QubitState, StateError, Subsystem, TwoQubitState};
