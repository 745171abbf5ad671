//! Truncated bosonic Fock-space toolkit: ladder operators, Lie-algebra
//! realizations, coherent and squeezed states, operator identity checks and
//! the two-mode swap and cloning protocols.

pub mod error;
pub mod fock;
pub mod formulas;
pub mod lie;
pub mod protocols;
pub mod report;
pub mod states;
pub mod universal_swap;

pub use error::{Error, Result};
pub use report::Report;
