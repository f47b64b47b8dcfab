//! n-particle sectors over a region: statistics-adapted bases, the pair
//! interaction catalog, dense assembly of `H_{ω,♯}(Λ, n)`, entropy and its
//! inverse, and noninteracting levels built from the one-body spectrum.

mod basis;
mod entropy;
mod free;
mod interaction;
mod operator;

pub use basis::{
    binomial, enumerate_basis, max_packing_exhaustive, max_packing_line, sector_dimension, BasisSet,
    Statistics,
};
pub use entropy::{energy_at_entropy, entropy, entropy_rank, rounded_entropy, LOG_INTEGER_TOL};
pub use free::{free_energy_at_entropy, free_ground_energy, free_levels};
pub use interaction::{ClassFlags, InteractionKind, InteractionSpec, Tail, TemperedConstants};
pub use operator::{
    assemble_many_body, ground_state_energy, many_body_eigenpairs, many_body_spectrum, rayleigh_quotient,
    ManyBodyOperator, MAX_DENSE_DIMENSION,
};
