//! Reference bases, quadrature and degree-of-freedom maps.
//!
//! Realizes the discrete spaces of the three formulations on the reference
//! tetrahedron {x,y,z >= 0, x+y+z <= 1}:
//!
//! * continuous Lagrange elements of degree 1 and 2 (scalar potential),
//! * discontinuous vector polynomials of degree 0 and 1 (flux density),
//! * lowest-order Whitney edge functions (vector potential),
//!
//! plus positive-weight quadrature rules defining the discrete scalar
//! product used in all assembly.

mod quad_tables;

use nalgebra::Vector3;
use thiserror::Error;

use crate::mesh::{EdgeTable, Mesh, LOCAL_EDGES};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("unsupported quadrature degree {0} (supported: 1..=6)")]
    UnsupportedDegree(usize),
}

/// Quadrature rule on the reference tet. Weights carry the reference-volume
/// measure (they sum to 1/6); physical integrals scale by the Jacobian
/// determinant.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

/// Positive-weight rule exact for polynomials up to `degree` on the
/// reference tet (conical product construction).
pub fn quadrature_tet(degree: usize) -> Result<QuadratureRule, FemError> {
    use quad_tables::*;
    let (pts, wts): (&[[f64; 3]], &[f64]) = match degree {
        1 => (&PTS_DEG1, &WTS_DEG1),
        2 => (&PTS_DEG2, &WTS_DEG2),
        3 => (&PTS_DEG3, &WTS_DEG3),
        4 => (&PTS_DEG4, &WTS_DEG4),
        5 => (&PTS_DEG5, &WTS_DEG5),
        6 => (&PTS_DEG6, &WTS_DEG6),
        d => return Err(FemError::UnsupportedDegree(d)),
    };
    Ok(QuadratureRule {
        degree,
        points: pts.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect(),
        weights: wts.to_vec(),
    })
}

fn barycentric(p: Vector3<f64>) -> [f64; 4] {
    [1.0 - p.x - p.y - p.z, p.x, p.y, p.z]
}

const GRAD_LAMBDA: [Vector3<f64>; 4] = [
    Vector3::new(-1.0, -1.0, -1.0),
    Vector3::new(1.0, 0.0, 0.0),
    Vector3::new(0.0, 1.0, 0.0),
    Vector3::new(0.0, 0.0, 1.0),
];

/// Local dimension of the Lagrange space of degree `p`.
pub fn lagrange_dim(p: usize) -> usize {
    match p {
        1 => 4,
        2 => 10,
        _ => panic!("unsupported Lagrange degree {p}"),
    }
}

/// Nodal Lagrange basis (p = 1 or 2) at a reference point: values and
/// reference gradients per local DOF. For p = 2 the DOF order is the four
/// vertices followed by the six edges in [`LOCAL_EDGES`] order.
pub fn lagrange_basis(p: usize, point: Vector3<f64>) -> (Vec<f64>, Vec<Vector3<f64>>) {
    let l = barycentric(point);
    match p {
        1 => (l.to_vec(), GRAD_LAMBDA.to_vec()),
        2 => {
            let mut vals = Vec::with_capacity(10);
            let mut grads = Vec::with_capacity(10);
            for i in 0..4 {
                vals.push(l[i] * (2.0 * l[i] - 1.0));
                grads.push(GRAD_LAMBDA[i] * (4.0 * l[i] - 1.0));
            }
            for (a, b) in LOCAL_EDGES {
                vals.push(4.0 * l[a] * l[b]);
                grads.push(4.0 * (GRAD_LAMBDA[a] * l[b] + GRAD_LAMBDA[b] * l[a]));
            }
            (vals, grads)
        }
        _ => panic!("unsupported Lagrange degree {p}"),
    }
}

/// Local dimension of the discontinuous vector space of degree `p_minus_1`.
pub fn vector_l2_dim(p_minus_1: usize) -> usize {
    match p_minus_1 {
        0 => 3,
        1 => 12,
        _ => panic!("unsupported vector degree {p_minus_1}"),
    }
}

/// Monomial-times-unit-vector basis of the discontinuous vector space:
/// {e_i} for degree 0, {1, x, y, z} x {e_1,e_2,e_3} for degree 1.
/// Components live in the global Cartesian frame; the scalar factor is a
/// reference-coordinate monomial.
pub fn vector_l2_basis(p_minus_1: usize, point: Vector3<f64>) -> Vec<Vector3<f64>> {
    let monos: &[f64] = match p_minus_1 {
        0 => &[1.0],
        1 => &[1.0, point.x, point.y, point.z],
        _ => panic!("unsupported vector degree {p_minus_1}"),
    };
    let units = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut out = Vec::with_capacity(3 * monos.len());
    for &m in monos {
        for u in units {
            out.push(u * m);
        }
    }
    out
}

/// Whitney edge functions with global orientation signs applied: reference
/// values and (constant) reference curls per local edge DOF.
pub fn nedelec0_basis(
    point: Vector3<f64>,
    signs: [i8; 6],
) -> ([Vector3<f64>; 6], [Vector3<f64>; 6]) {
    let l = barycentric(point);
    let mut vals = [Vector3::zeros(); 6];
    let mut curls = [Vector3::zeros(); 6];
    for (e, (a, b)) in LOCAL_EDGES.iter().enumerate() {
        let s = signs[e] as f64;
        vals[e] = (GRAD_LAMBDA[*b] * l[*a] - GRAD_LAMBDA[*a] * l[*b]) * s;
        curls[e] = GRAD_LAMBDA[*a].cross(&GRAD_LAMBDA[*b]) * (2.0 * s);
    }
    (vals, curls)
}

/// Finite element space selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// Continuous Lagrange space of degree p.
    Lagrange(usize),
    /// Discontinuous vector polynomials of degree p-1 (per-element blocks).
    DiscontinuousVector(usize),
    /// Lowest-order edge element space.
    EdgeLowest,
}

/// Global degree-of-freedom map: per-element global indices (row-major,
/// `local_dim` entries per tet) plus the total DOF count.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub kind: SpaceKind,
    pub num_dofs: usize,
    pub local_dim: usize,
    pub elem_dofs: Vec<usize>,
}

impl DofMap {
    pub fn dofs_of(&self, tet: usize) -> &[usize] {
        &self.elem_dofs[tet * self.local_dim..(tet + 1) * self.local_dim]
    }

    /// Coefficient vector of the constant function 1, where the space
    /// contains it (nodal Lagrange bases: all ones). Used for zero-mean
    /// handling of the scalar potential.
    pub fn constant_vector(&self) -> Option<Vec<f64>> {
        match self.kind {
            SpaceKind::Lagrange(_) => Some(vec![1.0; self.num_dofs]),
            _ => None,
        }
    }
}

/// Build the DOF map of a space on a mesh. The edge table is required for
/// Lagrange p=2 and the edge space.
pub fn build_dofmap(mesh: &Mesh, kind: SpaceKind, edges: Option<&EdgeTable>) -> DofMap {
    let nt = mesh.num_tets();
    let nv = mesh.num_vertices();
    match kind {
        SpaceKind::Lagrange(1) => DofMap {
            kind,
            num_dofs: nv,
            local_dim: 4,
            elem_dofs: mesh.tets.iter().flat_map(|t| t.verts).collect(),
        },
        SpaceKind::Lagrange(2) => {
            let et = edges.expect("edge table required for Lagrange p=2");
            let mut elem_dofs = Vec::with_capacity(nt * 10);
            for (t, row) in mesh.tets.iter().zip(&et.tet_to_edges) {
                elem_dofs.extend_from_slice(&t.verts);
                elem_dofs.extend(row.iter().map(|&(e, _)| nv + e));
            }
            DofMap { kind, num_dofs: nv + et.len(), local_dim: 10, elem_dofs }
        }
        SpaceKind::Lagrange(p) => panic!("unsupported Lagrange degree {p}"),
        SpaceKind::DiscontinuousVector(pm1) => {
            let dim = vector_l2_dim(pm1);
            DofMap {
                kind,
                num_dofs: nt * dim,
                local_dim: dim,
                elem_dofs: (0..nt * dim).collect(),
            }
        }
        SpaceKind::EdgeLowest => {
            let et = edges.expect("edge table required for the edge space");
            let elem_dofs = et
                .tet_to_edges
                .iter()
                .flat_map(|row| row.iter().map(|&(e, _)| e))
                .collect();
            DofMap { kind, num_dofs: et.len(), local_dim: 6, elem_dofs }
        }
    }
}
