//! Trotter error bounds for plane-wave dual electronic-structure
//! Hamiltonians, measured in the fermionic seminorm.
//!
//! The pipeline is: build the coefficient matrices of a simulation cell
//! ([`hamiltonian`]), factor the two-body term ([`factorization`]), bound the
//! first- and second-order Trotter commutators ([`bounds`]) and turn the
//! resulting constant into phase-estimation gate counts ([`resources`]).
//! The [`oracle`] module holds exact small-system references.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod factorization;
pub mod hamiltonian;
pub mod io;
pub mod oracle;
pub mod resources;
pub mod seminorm;
pub mod telemetry;

pub use bounds::{bound_suite, BoundMethod, BoundReport};
pub use error::{Error, Result};
pub use factorization::{FactorizedPotential, Method};
pub use hamiltonian::{CoefficientMatrices, SystemSpec};
pub use resources::ResourceEstimate;
