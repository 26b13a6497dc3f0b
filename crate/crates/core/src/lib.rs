//! Interaction as intersection.
//!
//! Agents are sets of fixed-length bit strings, an interaction between two
//! agents is the intersection of their sets, and the information they
//! exchange is measured with resource-bounded algorithmic complexity over a
//! small, fully specified reference machine.

pub mod aixi;
pub mod bits;
pub mod complexity;
pub mod cybernetic;
pub mod encoding;
pub mod error;
pub mod machine;
pub mod measures;
pub mod players;
pub mod quantity;
pub mod theorems;

pub use bits::BitString;
pub use complexity::{
    algorithmic_mass, levin_complexity, lz_estimate, plain_complexity, witness_bound, Budget,
    Cache, ComplexityModel, ComplexityResult, ExactBounded, LevinBounded, Lz78Estimator,
    WitnessTable,
};
pub use encoding::{decode_pair, decode_set, encode_pair, encode_set, Context};
pub use error::{Error, Result};
pub use machine::{run, Op, Program, RunKind, RunOutcome, MACHINE_VERSION};
pub use players::Player;
pub use quantity::{LogSum, Quantity};
