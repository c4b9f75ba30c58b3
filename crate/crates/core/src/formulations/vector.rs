//! Vector potential baseline: lowest-order edge elements with the essential
//! condition a x n = 0 (so b . n = 0, matching the other formulations) and
//! tree-cotree gauging, minimizing J(a) = integral of w(curl a) - h_s curl a.
//!
//! The curl of every Whitney function is constant per element, so the state
//! enters only through one constant flux density per tet. Boundary and tree
//! edges are fixed to zero; the interior cotree coefficients are the
//! unknowns and the Newton systems are SPD on them (no deflation needed).

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::femcore::nedelec0_basis;
use crate::material::energy_eval;
use crate::mesh::{build_edge_table, Mesh};
use crate::solver::{pcg_deflated, NewtonConfig, NewtonProblem, SolverError};
use crate::sources::SourceField;
use crate::sparse::CsrMatrix;

use super::{tree_cotree_h0, ElementContext, FormulationError, Gauge, RegionLaws};

pub struct VectorFormulation {
    pub ctx: ElementContext,
    laws: RegionLaws,
    regions: Vec<i32>,
    pub gauge: Gauge,
    /// Per-tet global edge indices with orientation signs.
    tet_edges: Vec<[(usize, i8); 6]>,
    /// Physical curls of the 6 oriented Whitney functions, constant per tet.
    curls: Vec<[Vector3<f64>; 6]>,
    /// Integral of h_s over each element.
    hs_int: Vec<Vector3<f64>>,
    pub num_edges: usize,
    k_template: CsrMatrix,
}

impl VectorFormulation {
    pub fn new(
        mesh: &Mesh,
        laws: RegionLaws,
        source: &SourceField,
    ) -> Result<VectorFormulation, FormulationError> {
        laws.check_regions(mesh)?;
        let ctx = ElementContext::build(mesh, source, 1)?;
        let edges = build_edge_table(mesh);
        let gauge = tree_cotree_h0(mesh, &edges)?;
        let regions: Vec<i32> = mesh.tets.iter().map(|t| t.region).collect();
        let nt = mesh.num_tets();

        let curls: Vec<[Vector3<f64>; 6]> = (0..nt)
            .into_par_iter()
            .map(|t| {
                let signs: [i8; 6] = std::array::from_fn(|e| edges.tet_to_edges[t][e].1);
                let (_, ref_curls) = nedelec0_basis(Vector3::zeros(), signs);
                let g = &ctx.geom[t];
                // covariant mapping: curl_phys = J curl_ref / det
                std::array::from_fn(|e| g.jacobian * ref_curls[e] / g.det)
            })
            .collect();

        let nq = ctx.nq();
        let hs_int: Vec<Vector3<f64>> = (0..nt)
            .map(|t| {
                let det = ctx.geom[t].det;
                let mut acc = Vector3::zeros();
                for q in 0..nq {
                    acc += ctx.rule.weights[q] * det * ctx.hs_at(t, q);
                }
                acc
            })
            .collect();

        let nf = gauge.num_free();
        let pairs = (0..nt).flat_map(|t| {
            let free: Vec<usize> = edges.tet_to_edges[t]
                .iter()
                .map(|&(e, _)| gauge.edge_to_free[e])
                .filter(|&f| f != usize::MAX)
                .collect();
            let free2 = free.clone();
            free.into_iter()
                .flat_map(move |i| free2.clone().into_iter().map(move |j| (i, j)))
        });
        let k_template = CsrMatrix::from_pairs(nf, nf, pairs);

        Ok(VectorFormulation {
            ctx,
            laws,
            regions,
            gauge,
            tet_edges: edges.tet_to_edges.clone(),
            curls,
            hs_int,
            num_edges: edges.len(),
            k_template,
        })
    }

    pub fn num_free(&self) -> usize {
        self.gauge.num_free()
    }

    /// Expand free coefficients into the full edge vector (tree edges zero).
    pub fn full_edge_vector(&self, x: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; self.num_edges];
        for (f, &e) in self.gauge.free_edges.iter().enumerate() {
            a[e] = x[f];
        }
        a
    }

    /// b = curl a on element `tet`, constant at lowest order.
    pub fn b_at(&self, x: &[f64], tet: usize) -> Vector3<f64> {
        let mut b = Vector3::zeros();
        for (le, &(e, _)) in self.tet_edges[tet].iter().enumerate() {
            let f = self.gauge.edge_to_free[e];
            if f != usize::MAX {
                b += x[f] * self.curls[tet][le];
            }
        }
        b
    }

    /// h(curl a) on element `tet` through the region law.
    pub fn h_at(&self, x: &[f64], tet: usize) -> Result<Vector3<f64>, FormulationError> {
        let law = self.laws.energy(self.regions[tet])?;
        Ok(energy_eval(law, self.b_at(x, tet)).h)
    }

    /// J(a) = sum over elements of vol w(curl a) - (integral of h_s) . curl a.
    pub fn energy_value(&self, x: &[f64]) -> Result<f64, FormulationError> {
        let per_elem: Vec<Result<f64, FormulationError>> = (0..self.curls.len())
            .into_par_iter()
            .map(|t| {
                let law = self.laws.energy(self.regions[t])?;
                let b = self.b_at(x, t);
                let vol = self.ctx.geom[t].volume();
                Ok(vol * energy_eval(law, b).w - self.hs_int[t].dot(&b))
            })
            .collect();
        let mut total = 0.0;
        for r in per_elem {
            total += r?;
        }
        Ok(total)
    }

    /// r_e = <h_s - h(curl a), curl (basis e)> over the free edges.
    pub fn vector_residual(&self, x: &[f64]) -> Result<Vec<f64>, FormulationError> {
        let locals: Vec<Result<[f64; 6], FormulationError>> = (0..self.curls.len())
            .into_par_iter()
            .map(|t| {
                let law = self.laws.energy(self.regions[t])?;
                let b = self.b_at(x, t);
                let vol = self.ctx.geom[t].volume();
                // integral of (h_s - h) over the tet, h constant
                let defect = self.hs_int[t] - vol * energy_eval(law, b).h;
                Ok(std::array::from_fn(|le| defect.dot(&self.curls[t][le])))
            })
            .collect();
        let mut r = vec![0.0; self.num_free()];
        for (t, res) in locals.into_iter().enumerate() {
            let rloc = res?;
            for (le, &(e, _)) in self.tet_edges[t].iter().enumerate() {
                let f = self.gauge.edge_to_free[e];
                if f != usize::MAX {
                    r[f] += rloc[le];
                }
            }
        }
        Ok(r)
    }

    /// K_ef = vol curl_e . (H(curl a) curl_f) on the free edges.
    pub fn vector_jacobian(&self, x: &[f64]) -> Result<CsrMatrix, FormulationError> {
        let locals: Vec<Result<(Matrix3<f64>, f64), FormulationError>> = (0..self.curls.len())
            .into_par_iter()
            .map(|t| {
                let law = self.laws.energy(self.regions[t])?;
                let hess = energy_eval(law, self.b_at(x, t)).hessian;
                Ok((hess, self.ctx.geom[t].volume()))
            })
            .collect();
        let mut k = self.k_template.clone();
        for (t, res) in locals.into_iter().enumerate() {
            let (hess, vol) = res?;
            for (le, &(e, _)) in self.tet_edges[t].iter().enumerate() {
                let fe = self.gauge.edge_to_free[e];
                if fe == usize::MAX {
                    continue;
                }
                let hce = hess * self.curls[t][le];
                for (lf, &(e2, _)) in self.tet_edges[t].iter().enumerate() {
                    let ff = self.gauge.edge_to_free[e2];
                    if ff != usize::MAX {
                        k.add(fe, ff, vol * hce.dot(&self.curls[t][lf]));
                    }
                }
            }
        }
        Ok(k)
    }
}

impl NewtonProblem for VectorFormulation {
    fn num_unknowns(&self) -> usize {
        self.num_free()
    }

    fn energy(&mut self, x: &[f64]) -> Result<f64, SolverError> {
        Ok(self.energy_value(x)?)
    }

    fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        Ok(self.vector_residual(x)?)
    }

    fn direction(
        &mut self,
        x: &[f64],
        residual: &[f64],
        cfg: &NewtonConfig,
    ) -> Result<(Vec<f64>, f64, usize), SolverError> {
        let k = self.vector_jacobian(x)?;
        let (da, cg_iters) = pcg_deflated(
            &k,
            residual,
            None,
            cfg.cg_tol_rel,
            cfg.cg_cap(self.num_free()),
        )?;
        let slope: f64 = -residual.iter().zip(&da).map(|(a, b)| a * b).sum::<f64>();
        Ok((da, slope, cg_iters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::EnergyLaw;
    use crate::mesh::generate_box;
    use crate::solver::newton_solve;
    use crate::MU0;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn laws(nonlinear: bool) -> RegionLaws {
        let mut map = BTreeMap::new();
        map.insert(1, EnergyLaw::Linear { mu: MU0 });
        if nonlinear {
            let curve = crate::material::BhCurve::synthetic_steel();
            map.insert(2, crate::material::fit_energy(&curve).unwrap());
        } else {
            map.insert(2, EnergyLaw::Linear { mu: MU0 });
        }
        RegionLaws::new(map)
    }

    fn source() -> SourceField {
        SourceField::square_loop(0.1, 0.9, 0.51, 1.0e4, 1.0)
    }

    #[test]
    fn gauged_dof_count() {
        // n=2 box: 26 interior edges, 1 interior vertex
        let mesh = generate_box(2, None).unwrap();
        let form = VectorFormulation::new(&mesh, laws(false), &source()).unwrap();
        assert_eq!(form.num_edges, 98);
        assert_eq!(form.num_free(), 25);
        // n=1 box: only the body diagonal is interior
        let mesh1 = generate_box(1, None).unwrap();
        let form1 = VectorFormulation::new(&mesh1, laws(false), &source()).unwrap();
        assert_eq!(form1.num_free(), 1);
    }

    #[test]
    fn stiffness_spd_on_cotree_dofs() {
        let mesh = generate_box(2, None).unwrap();
        let form = VectorFormulation::new(&mesh, laws(false), &source()).unwrap();
        let k = form.vector_jacobian(&vec![0.0; form.num_free()]).unwrap().to_dense();
        let sym_err = (&k - k.transpose()).amax();
        assert!(sym_err <= 1e-12 * k.amax());
        let eig = k.symmetric_eigenvalues();
        for i in 0..eig.len() {
            assert!(eig[i] > 0.0, "eigenvalue {} = {}", i, eig[i]);
        }
    }

    #[test]
    fn residual_is_negative_gradient() {
        let mesh = generate_box(2, Some(crate::mesh::GridBox { lo: [0, 0, 0], hi: [1, 1, 1] }))
            .unwrap();
        let form = VectorFormulation::new(&mesh, laws(true), &source()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x: Vec<f64> = (0..form.num_free()).map(|_| rng.gen_range(-0.05..0.05)).collect();
        let dir: Vec<f64> = (0..form.num_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = form.vector_residual(&x).unwrap();
        let analytic: f64 = -r.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>();
        let eps = 1e-6;
        let xp: Vec<f64> = x.iter().zip(&dir).map(|(v, d)| v + eps * d).collect();
        let xm: Vec<f64> = x.iter().zip(&dir).map(|(v, d)| v - eps * d).collect();
        let fd = (form.energy_value(&xp).unwrap() - form.energy_value(&xm).unwrap())
            / (2.0 * eps);
        assert_relative_eq!(fd, analytic, max_relative = 1e-6);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mesh = generate_box(2, None).unwrap();
        let form = VectorFormulation::new(&mesh, laws(true), &source()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let x: Vec<f64> = (0..form.num_free()).map(|_| rng.gen_range(-0.05..0.05)).collect();
        let k = form.vector_jacobian(&x).unwrap().to_dense();
        let r0 = form.vector_residual(&x).unwrap();
        let eps = 1e-7;
        let kmax = k.amax();
        for j in 0..form.num_free() {
            let mut xp = x.clone();
            xp[j] += eps;
            let rp = form.vector_residual(&xp).unwrap();
            for i in 0..form.num_free() {
                // r = -grad J so dr/da = -K
                let fd = (rp[i] - r0[i]) / eps;
                assert!(
                    (fd + k[(i, j)]).abs() <= 1e-4 * kmax,
                    "dr[{i}]/da[{j}] = {fd}, -K = {}",
                    -k[(i, j)]
                );
            }
        }
    }

    #[test]
    fn linear_problem_converges_in_one_iteration() {
        let mesh = generate_box(2, None).unwrap();
        let mut form = VectorFormulation::new(&mesh, laws(false), &source()).unwrap();
        let (_, report) = newton_solve(&mut form, None, &NewtonConfig::default()).unwrap();
        assert_eq!(report.newton_iterations, 1);
        assert_eq!(report.iterations[0].step, 1.0);
    }

    #[test]
    fn curl_constant_matches_whitney_sum() {
        // b_at must equal the signed sum of physical Whitney curls
        let mesh = generate_box(1, None).unwrap();
        let form = VectorFormulation::new(&mesh, laws(false), &source()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let x: Vec<f64> = (0..form.num_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = form.full_edge_vector(&x);
        for t in 0..mesh.num_tets() {
            let mut b = Vector3::zeros();
            for (le, &(e, _)) in form.tet_edges[t].iter().enumerate() {
                b += a[e] * form.curls[t][le];
            }
            let d = (b - form.b_at(&x, t)).norm();
            assert!(d <= 1e-13 * b.norm().max(1.0));
        }
    }
}
