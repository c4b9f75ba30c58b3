//! The three discrete formulations of the magnetostatic problem.
//!
//! * [`MixedFormulation`]: discontinuous flux density b plus continuous
//!   scalar potential psi; the Newton saddle systems are reduced to a
//!   Poisson-like Schur complement on psi and b is recovered element by
//!   element.
//! * [`ScalarFormulation`]: the classical reduced scalar potential driven
//!   by the coenergy density.
//! * [`VectorFormulation`]: lowest-order edge elements for the vector
//!   potential with tree-cotree gauging.
//!
//! All assemble against the same quadrature-based discrete scalar product,
//! with the source field evaluated directly at quadrature points.

mod assembly;
mod gauge;
mod mixed;
mod scalar;
mod vector;

pub use assembly::{l2_diff_and_norm, ElementContext, RegionLaws};
pub use gauge::{tree_cotree, tree_cotree_h0, Gauge};
pub use mixed::{MixedFormulation, SaddleOperator, SchurSystem};
pub use scalar::ScalarFormulation;
pub use vector::VectorFormulation;

use thiserror::Error;

use crate::material::MaterialError;
use crate::sources::SourceError;

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error("mesh region {0} has no material law bound to it")]
    UnboundRegion(i32),
    #[error("element {tet}: A block is not positive definite (material law violates strong monotonicity)")]
    NonSpdBlock { tet: usize },
    #[error("mesh is disconnected: vertex {0} is unreachable")]
    Disconnected(usize),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

/// Which formulation a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    Mixed,
    Scalar,
    Vector,
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formulation::Mixed => write!(f, "mixed"),
            Formulation::Scalar => write!(f, "scalar"),
            Formulation::Vector => write!(f, "vector"),
        }
    }
}

/// Coefficient vectors of a discrete field iterate.
#[derive(Debug, Clone)]
pub enum FieldState {
    /// b over Q_h (per-element blocks) and psi over the Lagrange space.
    Mixed { b: Vec<f64>, psi: Vec<f64> },
    /// psi over the Lagrange space.
    Scalar { psi: Vec<f64> },
    /// a over all edges; gauged (tree) entries are zero.
    Vector { a: Vec<f64> },
}

impl FieldState {
    pub fn formulation(&self) -> Formulation {
        match self {
            FieldState::Mixed { .. } => Formulation::Mixed,
            FieldState::Scalar { .. } => Formulation::Scalar,
            FieldState::Vector { .. } => Formulation::Vector,
        }
    }
}
