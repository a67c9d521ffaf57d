//! Simulation and synthesis toolkit for Heisenberg exchange-pulse sequences
//! on chains of spin-1/2 particles.
//!
//! The crate builds dense unitaries for pulse sequences, constructs
//! total-spin coupled bases via Clebsch-Gordan recursion, extracts and
//! classifies the effective two-qubit gate enacted on a pair of three-spin
//! encoded qubits, synthesizes the 20-pulse controlled-(n.sigma) sequence
//! from its defining constraint, and rewrites sequences under elementary
//! manipulations while checking their count and parity invariants.

pub mod coupling;
pub mod cyclotomic;
pub mod duration;
pub mod encoding;
pub mod error;
pub mod half;
pub mod operator;
pub mod pulse;
pub mod report;
pub mod rewrite;
pub mod seqfile;
pub mod synthesis;

pub use duration::{Duration, DEFAULT_MAX_DENOMINATOR};
pub use error::{Error, Result};
pub use half::Half;
pub use pulse::{ExchangePulse, PulseSequence};
