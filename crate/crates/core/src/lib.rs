//! Exact computations for cluster algebras of acyclic affine type: seeds and
//! mutation, tubes and arcs, theta functions on the imaginary wall, the tube
//! generalized cluster algebras, and a rank-2 scattering-diagram oracle.

pub mod affine;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod gca;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod scatter2;
pub mod seeds;
pub mod theta;

pub use error::{Error, Result};
pub use lattice::{CorootVec, CoweightVec, RootVec, WeightVec};
pub use poly::{LaurentPoly, VarContext};
