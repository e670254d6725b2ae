//! Exact computations with finitely generated DG modules over connected
//! cochain DG algebras: cohomology, minimal models, semi-free filtrations,
//! splitting of projective summands, and the invariants cone length, ghost
//! length and level.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod expr;
pub mod filtration;
pub mod generate;
pub mod homology;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod module;
pub mod quillen_suslin;
pub mod scalar;

pub use error::{DgError, Result};
