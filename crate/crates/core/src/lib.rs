//! Random Schrödinger operators for interacting lattice particles: the
//! Anderson one-body operator, n-particle sectors for the three statistics,
//! the test-function and subadditivity machinery, and thermodynamic-limit
//! experiments by exact diagonalization and disorder Monte Carlo.

pub mod constructions;
pub mod disorder;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod manybody;
pub mod oneparticle;
pub mod thermo;

pub use error::{Error, Result};
