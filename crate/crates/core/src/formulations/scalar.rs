//! Classical reduced scalar potential baseline driven by the coenergy
//! density: minimize J*(psi) = integral of w*(h_s - grad psi).
//!
//! Each Newton step assembles the weighted stiffness
//! K_ij = < H*(h) grad phi_j, grad phi_i > with H* the coenergy Hessian at
//! h = h_s - grad psi, and solves K dpsi = r with deflated Jacobi-PCG (the
//! constants span the null space). The field is recovered pointwise as
//! b = dw*/dh (h_s - grad psi).

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::femcore::{build_dofmap, DofMap, SpaceKind};
use crate::material::coenergy_eval;
use crate::mesh::Mesh;
use crate::solver::{pcg_deflated, NewtonConfig, NewtonProblem, SolverError};
use crate::sources::SourceField;
use crate::sparse::CsrMatrix;

use super::{ElementContext, FormulationError, RegionLaws};

pub struct ScalarFormulation {
    pub ctx: ElementContext,
    laws: RegionLaws,
    regions: Vec<i32>,
    pub v_map: DofMap,
    k_template: CsrMatrix,
    ones: Vec<f64>,
}

impl ScalarFormulation {
    pub fn new(
        mesh: &Mesh,
        laws: RegionLaws,
        source: &SourceField,
        p: usize,
    ) -> Result<ScalarFormulation, FormulationError> {
        laws.check_regions(mesh)?;
        let ctx = ElementContext::build(mesh, source, p)?;
        let edges = if p >= 2 { Some(crate::mesh::build_edge_table(mesh)) } else { None };
        let v_map = build_dofmap(mesh, SpaceKind::Lagrange(p), edges.as_ref());
        let regions: Vec<i32> = mesh.tets.iter().map(|t| t.region).collect();
        let pairs = (0..mesh.num_tets()).flat_map(|t| {
            let vd = v_map.dofs_of(t).to_vec();
            let vd2 = vd.clone();
            vd.into_iter().flat_map(move |i| vd2.clone().into_iter().map(move |j| (i, j)))
        });
        let k_template = CsrMatrix::from_pairs(v_map.num_dofs, v_map.num_dofs, pairs);
        let ones = vec![1.0; v_map.num_dofs];
        Ok(ScalarFormulation { ctx, laws, regions, v_map, k_template, ones })
    }

    pub fn num_psi(&self) -> usize {
        self.v_map.num_dofs
    }

    pub fn grad_psi_at(&self, psi: &[f64], tet: usize, q: usize) -> Vector3<f64> {
        let vd = self.v_map.dofs_of(tet);
        let mut out = Vector3::zeros();
        for (li, &i) in vd.iter().enumerate() {
            out += psi[i] * self.ctx.grad_phys(tet, q, li);
        }
        out
    }

    /// Total field h = h_s - grad psi at a quadrature point.
    pub fn h_at(&self, psi: &[f64], tet: usize, q: usize) -> Vector3<f64> {
        self.ctx.hs_at(tet, q) - self.grad_psi_at(psi, tet, q)
    }

    /// Recovered flux density b = dw*/dh at a quadrature point.
    pub fn b_at(&self, psi: &[f64], tet: usize, q: usize) -> Result<Vector3<f64>, FormulationError> {
        let claw = self.laws.coenergy(self.regions[tet])?;
        Ok(coenergy_eval(claw, self.h_at(psi, tet, q))?.b)
    }

    /// J*(psi) = integral of the coenergy density of h_s - grad psi.
    pub fn energy_value(&self, psi: &[f64]) -> Result<f64, FormulationError> {
        let nq = self.ctx.nq();
        let per_elem: Vec<Result<f64, FormulationError>> = (0..self.ctx.geom.len())
            .into_par_iter()
            .map(|t| {
                let claw = self.laws.coenergy(self.regions[t])?;
                let det = self.ctx.geom[t].det;
                let mut acc = 0.0;
                for q in 0..nq {
                    let w = self.ctx.rule.weights[q] * det;
                    acc += w * coenergy_eval(claw, self.h_at(psi, t, q))?.w_star;
                }
                Ok(acc)
            })
            .collect();
        let mut total = 0.0;
        for r in per_elem {
            total += r?;
        }
        Ok(total)
    }

    /// r_i = < dw*/dh (h_s - grad psi), grad phi_i > = -grad J*.
    pub fn scalar_residual(&self, psi: &[f64]) -> Result<Vec<f64>, FormulationError> {
        let nq = self.ctx.nq();
        let n_lag = self.ctx.n_lagrange;
        let locals: Vec<Result<Vec<f64>, FormulationError>> = (0..self.ctx.geom.len())
            .into_par_iter()
            .map(|t| {
                let claw = self.laws.coenergy(self.regions[t])?;
                let det = self.ctx.geom[t].det;
                let mut rloc = vec![0.0; n_lag];
                for q in 0..nq {
                    let w = self.ctx.rule.weights[q] * det;
                    let bq = coenergy_eval(claw, self.h_at(psi, t, q))?.b;
                    for i in 0..n_lag {
                        rloc[i] += w * bq.dot(&self.ctx.grad_phys(t, q, i));
                    }
                }
                Ok(rloc)
            })
            .collect();
        let mut r = vec![0.0; self.num_psi()];
        for (t, res) in locals.into_iter().enumerate() {
            let rloc = res?;
            for (li, &i) in self.v_map.dofs_of(t).iter().enumerate() {
                r[i] += rloc[li];
            }
        }
        Ok(r)
    }

    /// K_ij = < H*(h) grad phi_j, grad phi_i > at the current iterate.
    pub fn scalar_jacobian(&self, psi: &[f64]) -> Result<CsrMatrix, FormulationError> {
        let nq = self.ctx.nq();
        let n_lag = self.ctx.n_lagrange;
        let locals: Vec<Result<Vec<f64>, FormulationError>> = (0..self.ctx.geom.len())
            .into_par_iter()
            .map(|t| {
                let claw = self.laws.coenergy(self.regions[t])?;
                let det = self.ctx.geom[t].det;
                let mut kloc = vec![0.0; n_lag * n_lag];
                for q in 0..nq {
                    let w = self.ctx.rule.weights[q] * det;
                    let hess = coenergy_eval(claw, self.h_at(psi, t, q))?.hessian;
                    for j in 0..n_lag {
                        let hgj = hess * self.ctx.grad_phys(t, q, j);
                        for i in 0..n_lag {
                            kloc[i * n_lag + j] += w * hgj.dot(&self.ctx.grad_phys(t, q, i));
                        }
                    }
                }
                Ok(kloc)
            })
            .collect();
        let mut k = self.k_template.clone();
        for (t, res) in locals.into_iter().enumerate() {
            let kloc = res?;
            let vd = self.v_map.dofs_of(t);
            for (li, &i) in vd.iter().enumerate() {
                for (lj, &j) in vd.iter().enumerate() {
                    k.add(i, j, kloc[li * n_lag + lj]);
                }
            }
        }
        Ok(k)
    }
}

impl NewtonProblem for ScalarFormulation {
    fn num_unknowns(&self) -> usize {
        self.num_psi()
    }

    fn energy(&mut self, x: &[f64]) -> Result<f64, SolverError> {
        Ok(self.energy_value(x)?)
    }

    fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        Ok(self.scalar_residual(x)?)
    }

    fn direction(
        &mut self,
        x: &[f64],
        residual: &[f64],
        cfg: &NewtonConfig,
    ) -> Result<(Vec<f64>, f64, usize), SolverError> {
        let k = self.scalar_jacobian(x)?;
        let (dpsi, cg_iters) = pcg_deflated(
            &k,
            residual,
            Some(&self.ones),
            cfg.cg_tol_rel,
            cfg.cg_cap(self.num_psi()),
        )?;
        // r = -grad J*, so the slope along dpsi is -r . dpsi
        let slope: f64 = -residual.iter().zip(&dpsi).map(|(a, b)| a * b).sum::<f64>();
        Ok((dpsi, slope, cg_iters))
    }

    fn normalize(&self, x: &mut [f64]) {
        let mean: f64 = x.iter().sum::<f64>() / x.len() as f64;
        for v in x {
            *v -= mean;
        }
    }
}
