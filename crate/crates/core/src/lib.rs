//! Julg–Valette and Witten–de Rham operators on finite CAT(0) cube complexes.
//!
//! A complex is reconstructed from its 1-skeleton (a median graph) in
//! [`complex`]. [`julg_valette`] assembles the exact combinatorial operator on
//! the one-form-per-cube space, [`de_rham`] evaluates the deformed de Rham
//! spectrum block by block, [`homotopy`] interpolates between the two, and
//! [`group_action`] checks how automorphisms move the operators.

pub mod checks;
pub mod cli;
pub mod complex;
pub mod de_rham;
pub mod error;
pub mod exec;
pub mod format;
pub mod group_action;
pub mod homotopy;
pub mod julg_valette;
pub mod linalg;
pub mod operator;
pub mod scalar;
pub mod weights;

pub use complex::{BuildOptions, Cube, CubeComplex, CubeId, Graph, Hyperplane, HyperplaneId, Vertex};
pub use error::{Error, Result};
pub use exec::Execution;
pub use weights::WeightFn;
