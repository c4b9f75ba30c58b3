//! Shared per-element assembly context: geometry, quadrature tables and
//! cached source-field evaluations.

use nalgebra::Vector3;
use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::femcore::{lagrange_basis, quadrature_tet, vector_l2_basis, QuadratureRule};
use crate::material::{CoenergyLaw, EnergyLaw};
use crate::mesh::{ElementGeometry, Mesh};
use crate::sources::{eval_hs, SourceField};

use super::FormulationError;

/// Material laws keyed by mesh region tag. The coenergy side is derived
/// from the energy side so the two are exact conjugates.
#[derive(Debug, Clone)]
pub struct RegionLaws {
    energy: BTreeMap<i32, EnergyLaw>,
    coenergy: BTreeMap<i32, CoenergyLaw>,
}

impl RegionLaws {
    pub fn new(map: BTreeMap<i32, EnergyLaw>) -> RegionLaws {
        let coenergy = map
            .iter()
            .map(|(tag, law)| (*tag, CoenergyLaw::new(law.clone())))
            .collect();
        RegionLaws { energy: map, coenergy }
    }

    pub fn energy(&self, tag: i32) -> Result<&EnergyLaw, FormulationError> {
        self.energy.get(&tag).ok_or(FormulationError::UnboundRegion(tag))
    }

    pub fn coenergy(&self, tag: i32) -> Result<&CoenergyLaw, FormulationError> {
        self.coenergy.get(&tag).ok_or(FormulationError::UnboundRegion(tag))
    }

    /// Check every region of a mesh has a binding.
    pub fn check_regions(&self, mesh: &Mesh) -> Result<(), FormulationError> {
        for tag in mesh.region_tags() {
            self.energy(tag)?;
        }
        Ok(())
    }
}

/// Everything that is fixed for a given mesh + quadrature + source:
/// element geometry, reference basis tables at the quadrature points, and
/// the source field evaluated at every physical quadrature point.
pub struct ElementContext {
    pub rule: QuadratureRule,
    pub geom: Vec<ElementGeometry>,
    /// h_s at quadrature points, `n_tets * nq` row-major.
    pub hs: Vec<Vector3<f64>>,
    /// Lagrange values at quadrature points, `nq * n_lagrange`.
    pub lag_vals: Vec<f64>,
    /// Reference Lagrange gradients, `nq * n_lagrange`.
    pub lag_grads: Vec<Vector3<f64>>,
    /// Discontinuous vector basis at quadrature points, `nq * n_vec`.
    pub vec_basis: Vec<Vector3<f64>>,
    pub n_lagrange: usize,
    pub n_vec: usize,
}

impl ElementContext {
    /// Build the context for polynomial degree `p` with the assembly rule of
    /// degree 2p (at least the 2p-2 the discrete product requires).
    pub fn build(
        mesh: &Mesh,
        source: &SourceField,
        p: usize,
    ) -> Result<ElementContext, FormulationError> {
        let degree = (2 * p).max(2);
        debug_assert!(degree >= 2 * p.saturating_sub(1));
        let rule = quadrature_tet(degree).expect("assembly degree within table");
        let nq = rule.points.len();
        let n_lagrange = crate::femcore::lagrange_dim(p);
        let n_vec = crate::femcore::vector_l2_dim(p - 1);

        let mut lag_vals = Vec::with_capacity(nq * n_lagrange);
        let mut lag_grads = Vec::with_capacity(nq * n_lagrange);
        let mut vec_basis = Vec::with_capacity(nq * n_vec);
        for q in &rule.points {
            let (vals, grads) = lagrange_basis(p, *q);
            lag_vals.extend(vals);
            lag_grads.extend(grads);
            vec_basis.extend(vector_l2_basis(p - 1, *q));
        }

        let geom: Vec<ElementGeometry> =
            (0..mesh.num_tets()).map(|t| mesh.element_geometry(t)).collect();

        let hs = geom
            .par_iter()
            .map(|g| {
                rule.points
                    .iter()
                    .map(|q| eval_hs(source, g.map(*q)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();

        Ok(ElementContext { rule, geom, hs, lag_vals, lag_grads, vec_basis, n_lagrange, n_vec })
    }

    pub fn nq(&self) -> usize {
        self.rule.points.len()
    }

    pub fn hs_at(&self, tet: usize, q: usize) -> Vector3<f64> {
        self.hs[tet * self.nq() + q]
    }

    /// Physical gradient of Lagrange DOF `i` at quadrature point `q` on `tet`.
    pub fn grad_phys(&self, tet: usize, q: usize, i: usize) -> Vector3<f64> {
        self.geom[tet].inv_t * self.lag_grads[q * self.n_lagrange + i]
    }

    pub fn lag_val(&self, q: usize, i: usize) -> f64 {
        self.lag_vals[q * self.n_lagrange + i]
    }

    pub fn vec_val(&self, q: usize, j: usize) -> Vector3<f64> {
        self.vec_basis[q * self.n_vec + j]
    }
}

/// Elementwise L2 norm of the difference of two quadrature-point fields,
/// and the norm of the first one. `f` and `g` map (tet, quad index) to a
/// field value.
pub fn l2_diff_and_norm(
    ctx: &ElementContext,
    f: impl Fn(usize, usize) -> Vector3<f64> + Sync,
    g: impl Fn(usize, usize) -> Vector3<f64> + Sync,
) -> (f64, f64) {
    let nq = ctx.nq();
    // per-element terms are collected in element order and summed serially
    // so results do not depend on the parallel schedule
    let per_elem: Vec<(f64, f64)> = (0..ctx.geom.len())
        .into_par_iter()
        .map(|t| {
            let det = ctx.geom[t].det;
            let mut d2 = 0.0;
            let mut n2 = 0.0;
            for q in 0..nq {
                let w = ctx.rule.weights[q] * det;
                let a = f(t, q);
                let b = g(t, q);
                d2 += w * (a - b).norm_squared();
                n2 += w * a.norm_squared();
            }
            (d2, n2)
        })
        .collect();
    let (diff2, norm2) = per_elem.iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    (diff2.sqrt(), norm2.sqrt())
}
