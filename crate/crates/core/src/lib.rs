//! Exact EFX allocations for three agents with additive valuations.
//!
//! The solver works in a symbolically perturbed order in which no agent is
//! indifferent between two distinct bundles, and moves through a sequence of
//! EFX allocations whose potential strictly increases until every good is
//! allocated. A brute-force oracle, an ε-polynomial value ring and the two
//! seven-good counterexamples come along for verification.

pub mod allocation;
pub mod bundle;
pub mod eps_poly;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod graphs;
pub mod instance;
pub mod oracle;
pub mod repro;
pub mod solver;
pub mod value;

pub use allocation::{Allocation, PhiOrder};
pub use bundle::Bundle;
pub use eps_poly::EpsPoly;
pub use error::{ContractError, FormatError};
pub use instance::{Instance, Order, PerturbedValue};
pub use solver::{solve, solve_with, CaseLabel, Solution, SolveError, SolveOptions};
pub use value::{Rational, Value};
