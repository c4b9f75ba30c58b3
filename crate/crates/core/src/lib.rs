//! Nonlinear magnetostatics finite element solver.
//!
//! The crate implements three discretizations of the magnetostatic field
//! problem on tetrahedral meshes:
//!
//! * a mixed formulation with a discontinuous flux density `b` and a
//!   continuous reduced scalar potential `psi`, where the `b` block is
//!   eliminated per element via a Schur complement after linearization,
//! * the classical reduced scalar potential formulation driven by the
//!   convex conjugate (coenergy) of the material law, and
//! * a lowest-order edge element vector potential baseline with
//!   tree-cotree gauging.
//!
//! All three are solved with the same Newton / Armijo / Jacobi-PCG stack so
//! that iteration counts are directly comparable.

pub mod benchmark;
pub mod femcore;
pub mod formulations;
pub mod material;
pub mod mesh;
pub mod solver;
pub mod sources;
pub mod sparse;

/// Vacuum permeability in H/m.
pub const MU0: f64 = 1.256_637_061_435_917_3e-6;

pub use formulations::{FieldState, Formulation, SaddleOperator, SchurSystem};
pub use material::{BhCurve, CoenergyLaw, EnergyLaw};
pub use mesh::{EdgeTable, Mesh};
pub use solver::{NewtonConfig, SolveReport};
pub use sources::SourceField;
