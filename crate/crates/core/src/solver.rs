//! Newton method with Armijo backtracking, deflated Jacobi-preconditioned
//! conjugate gradients, and per-iteration reporting.
//!
//! All three formulations drive the same loop through [`NewtonProblem`]:
//! they provide residual, energy and the linearized solve; the loop owns
//! globalization, stopping and the solve trace. This keeps iteration-count
//! comparisons between formulations apples-to-apples.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulations::FormulationError;
use crate::sparse::CsrMatrix;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("line search failed: no sufficient decrease within {backtracks} backtracks (Jacobian inconsistent with the energy?)")]
    LineSearchFailure { backtracks: usize },
    #[error("Newton did not converge within {0} iterations")]
    MaxIterations(usize),
    #[error("direction slope {0:.3e} is not a descent direction")]
    NonDescentDirection(f64),
    #[error("CG did not reach tolerance within {0} iterations")]
    CgMaxIterations(usize),
    #[error("CG breakdown: operator not positive definite (p'Ap = {0:.3e})")]
    CgBreakdown(f64),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
}

/// Newton and linear-solver parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_iter: usize,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    pub cg_tol_rel: f64,
    /// CG iteration cap; `None` means 10x the number of unknowns.
    pub cg_max_iter: Option<usize>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol_rel: 1e-8,
            tol_abs: 1e-12,
            max_iter: 50,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 30,
            cg_tol_rel: 1e-10,
            cg_max_iter: None,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(format!("armijo_c must be in (0,1), got {}", self.armijo_c));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(format!(
                "backtrack_factor must be in (0,1), got {}",
                self.backtrack_factor
            ));
        }
        if self.tol_rel <= 0.0 || self.tol_abs <= 0.0 || self.cg_tol_rel <= 0.0 {
            return Err("tolerances must be positive".into());
        }
        Ok(())
    }

    pub fn cg_cap(&self, unknowns: usize) -> usize {
        self.cg_max_iter.unwrap_or(10 * unknowns.max(1))
    }
}

/// Mixed-formulation feasibility diagnostics of one Newton step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FeasibilityProbe {
    /// || B db ||_inf of the accepted direction.
    pub constraint_step_inf: f64,
    /// || db ||_2 of the direction.
    pub step_l2: f64,
    /// || B b ||_inf of the updated iterate.
    pub constraint_state_inf: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Residual norm at the start of the step.
    pub residual_norm: f64,
    /// Energy after the accepted update.
    pub energy: f64,
    /// Accepted step size.
    pub step: f64,
    pub backtracks: usize,
    pub cg_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<FeasibilityProbe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    LineSearchFailure,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub newton_iterations: usize,
    pub num_unknowns: usize,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub iterations: Vec<IterationRecord>,
}

impl SolveReport {
    pub fn total_cg_iterations(&self) -> usize {
        self.iterations.iter().map(|it| it.cg_iterations).sum()
    }
}

/// A nonlinear problem the Newton loop can drive.
pub trait NewtonProblem {
    fn num_unknowns(&self) -> usize;

    /// Merit (energy) functional at `x`.
    fn energy(&mut self, x: &[f64]) -> Result<f64, SolverError>;

    /// Residual vector at `x`; its Euclidean norm drives the stopping rule.
    fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>, SolverError>;

    /// Newton direction from the linearization at `x` (the residual is the
    /// one just computed). Returns (direction, energy slope along it, CG
    /// iterations used by the linear solve).
    fn direction(
        &mut self,
        x: &[f64],
        residual: &[f64],
        cfg: &NewtonConfig,
    ) -> Result<(Vec<f64>, f64, usize), SolverError>;

    /// Gauge fixing applied after every accepted update (e.g. zero-mean
    /// normalization of the scalar potential).
    fn normalize(&self, _x: &mut [f64]) {}

    /// Constraint diagnostics, where the formulation has one.
    fn feasibility(&self, _x: &[f64], _direction: &[f64]) -> Option<FeasibilityProbe> {
        None
    }
}

/// Largest step tau in {1, rho, rho^2, ...} with
/// J(x + tau d) <= J(x) + c tau slope. Returns (tau, backtracks, new energy).
pub fn armijo_search<P: NewtonProblem + ?Sized>(
    problem: &mut P,
    x: &[f64],
    j0: f64,
    direction: &[f64],
    slope: f64,
    cfg: &NewtonConfig,
) -> Result<(f64, usize, f64), SolverError> {
    if slope >= 0.0 {
        return Err(SolverError::NonDescentDirection(slope));
    }
    let mut tau = 1.0;
    let mut trial = vec![0.0; x.len()];
    for backtracks in 0..=cfg.max_backtracks {
        for i in 0..x.len() {
            trial[i] = x[i] + tau * direction[i];
        }
        let j = problem.energy(&trial)?;
        if j <= j0 + cfg.armijo_c * tau * slope {
            return Ok((tau, backtracks, j));
        }
        tau *= cfg.backtrack_factor;
    }
    Err(SolverError::LineSearchFailure { backtracks: cfg.max_backtracks })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton iteration from the zero state (or `x0`).
pub fn newton_solve<P: NewtonProblem + ?Sized>(
    problem: &mut P,
    x0: Option<Vec<f64>>,
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    let n = problem.num_unknowns();
    let mut x = x0.unwrap_or_else(|| vec![0.0; n]);
    assert_eq!(x.len(), n);
    problem.normalize(&mut x);

    let initial_energy = problem.energy(&x)?;
    let mut energy = initial_energy;
    let mut iterations = Vec::new();
    let mut initial_residual = 0.0;

    for iter in 0..=cfg.max_iter {
        let residual = problem.residual(&x)?;
        let rnorm = norm2(&residual);
        if iter == 0 {
            initial_residual = rnorm;
        }
        if rnorm <= cfg.tol_rel * initial_residual + cfg.tol_abs {
            return Ok((
                x,
                SolveReport {
                    status: SolveStatus::Converged,
                    newton_iterations: iterations.len(),
                    num_unknowns: n,
                    initial_residual,
                    final_residual: rnorm,
                    initial_energy,
                    final_energy: energy,
                    iterations,
                },
            ));
        }
        if iter == cfg.max_iter {
            break;
        }

        let (direction, slope, cg_iterations) = problem.direction(&x, &residual, cfg)?;
        let (step, backtracks, j_new) =
            armijo_search(problem, &x, energy, &direction, slope, cfg)?;
        for i in 0..n {
            x[i] += step * direction[i];
        }
        problem.normalize(&mut x);
        energy = problem.energy(&x)?;
        let feasibility = problem.feasibility(&x, &direction);
        let _ = j_new; // energy is re-evaluated after normalization
        iterations.push(IterationRecord {
            residual_norm: rnorm,
            energy,
            step,
            backtracks,
            cg_iterations,
            feasibility,
        });
    }
    Err(SolverError::MaxIterations(cfg.max_iter))
}

/// Jacobi-preconditioned conjugate gradients with optional deflation of a
/// one-dimensional null space (the constant vector of the scalar potential
/// space). Returns the solution and the iteration count.
pub fn pcg_deflated(
    a: &CsrMatrix,
    rhs: &[f64],
    deflation: Option<&[f64]>,
    tol_rel: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), SolverError> {
    let n = rhs.len();
    assert_eq!(a.n_rows, n);
    assert_eq!(a.n_cols, n);

    let project = |v: &mut [f64]| {
        if let Some(d) = deflation {
            let dd: f64 = d.iter().map(|x| x * x).sum();
            let vd: f64 = v.iter().zip(d).map(|(a, b)| a * b).sum();
            let c = vd / dd;
            for (vi, di) in v.iter_mut().zip(d) {
                *vi -= c * di;
            }
        }
    };

    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut b = rhs.to_vec();
    project(&mut b);
    let bnorm = norm2(&b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }

    let mut x = vec![0.0; n];
    let mut r = b;
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, mi)| ri * mi).collect();
    project(&mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut q = vec![0.0; n];

    for k in 0..max_iter {
        a.mul_into(&p, &mut q);
        project(&mut q);
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        if pq <= 0.0 {
            return Err(SolverError::CgBreakdown(pq));
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        if norm2(&r) <= tol_rel * bnorm {
            project(&mut x);
            return Ok((x, k + 1));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        project(&mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::CgMaxIterations(max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// J(x) = 1/2 x'Ax - b'x with SPD A: Newton converges in one step.
    struct Quadratic {
        a: DMatrix<f64>,
        b: DVector<f64>,
        scale_direction: f64,
    }

    impl NewtonProblem for Quadratic {
        fn num_unknowns(&self) -> usize {
            self.b.len()
        }
        fn energy(&mut self, x: &[f64]) -> Result<f64, SolverError> {
            let x = DVector::from_column_slice(x);
            Ok(0.5 * x.dot(&(&self.a * &x)) - self.b.dot(&x))
        }
        fn residual(&mut self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
            let x = DVector::from_column_slice(x);
            Ok((&self.b - &self.a * x).as_slice().to_vec())
        }
        fn direction(
            &mut self,
            _x: &[f64],
            residual: &[f64],
            _cfg: &NewtonConfig,
        ) -> Result<(Vec<f64>, f64, usize), SolverError> {
            let r = DVector::from_column_slice(residual);
            let d = self.a.clone().lu().solve(&r).unwrap() * self.scale_direction;
            let slope = -d.dot(&r);
            Ok((d.as_slice().to_vec(), slope, 0))
        }
    }

    fn spd(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &m * m.transpose() + DMatrix::identity(n, n) * n as f64
    }

    #[test]
    fn quadratic_energy_takes_full_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut prob = Quadratic {
            a: spd(6, &mut rng),
            b: DVector::from_fn(6, |_, _| rng.gen_range(-1.0..1.0)),
            scale_direction: 1.0,
        };
        let cfg = NewtonConfig::default();
        let (_, report) = newton_solve(&mut prob, None, &cfg).unwrap();
        assert_eq!(report.newton_iterations, 1);
        assert_eq!(report.iterations[0].step, 1.0);
        assert_eq!(report.iterations[0].backtracks, 0);
        assert_eq!(report.status, SolveStatus::Converged);
    }

    #[test]
    fn overscaled_direction_backtracks() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut prob = Quadratic {
            a: spd(4, &mut rng),
            b: DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0)),
            scale_direction: 10.0,
        };
        let cfg = NewtonConfig::default();
        let x = vec![0.0; 4];
        let j0 = prob.energy(&x).unwrap();
        let r = prob.residual(&x).unwrap();
        let (d, slope, _) = prob.direction(&x, &r, &cfg).unwrap();
        let (tau, backtracks, j) = armijo_search(&mut prob, &x, j0, &d, slope, &cfg).unwrap();
        // J(tau) = tau^2/2 d'Ad - tau b'd with d = 10 d_newton: the exact 1-D
        // minimum is at tau = 0.1, so tau in {1, .5, .25, .125, .0625} works
        // within 5 halvings
        assert!(backtracks <= 5, "backtracks = {backtracks}");
        assert!(tau < 1.0);
        assert!(j < j0);
    }

    #[test]
    fn non_descent_slope_is_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut prob = Quadratic {
            a: spd(3, &mut rng),
            b: DVector::from_element(3, 1.0),
            scale_direction: 1.0,
        };
        let cfg = NewtonConfig::default();
        let err = armijo_search(&mut prob, &[0.0; 3], 0.0, &[1.0, 0.0, 0.0], 0.5, &cfg);
        assert!(matches!(err, Err(SolverError::NonDescentDirection(_))));
    }

    #[test]
    fn zero_source_converges_without_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut prob = Quadratic {
            a: spd(5, &mut rng),
            b: DVector::zeros(5),
            scale_direction: 1.0,
        };
        let (_, report) = newton_solve(&mut prob, None, &NewtonConfig::default()).unwrap();
        assert_eq!(report.newton_iterations, 0);
    }

    #[test]
    fn pcg_identity_one_iteration() {
        let mut a = CsrMatrix::from_pairs(5, 5, (0..5).map(|i| (i, i)));
        for i in 0..5 {
            a.add(i, i, 1.0);
        }
        let rhs = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        let (x, iters) = pcg_deflated(&a, &rhs, None, 1e-12, 100).unwrap();
        assert_eq!(iters, 1);
        for (xi, bi) in x.iter().zip(&rhs) {
            assert_relative_eq!(xi, bi, epsilon = 1e-12);
        }
    }

    #[test]
    fn pcg_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10;
        let dense = spd(n, &mut rng);
        let mut a = CsrMatrix::from_pairs(
            n,
            n,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))),
        );
        for i in 0..n {
            for j in 0..n {
                a.add(i, j, dense[(i, j)]);
            }
        }
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (x, _) = pcg_deflated(&a, &rhs, None, 1e-14, 1000).unwrap();
        let exact = dense.clone().lu().solve(&DVector::from_column_slice(&rhs)).unwrap();
        for i in 0..n {
            assert_relative_eq!(x[i], exact[i], epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn pcg_deflated_singular_laplacian() {
        // path-graph Laplacian: null space = constants; consistent rhs
        let n = 6;
        let mut pairs = Vec::new();
        for i in 0..n {
            pairs.push((i, i));
            if i + 1 < n {
                pairs.push((i, i + 1));
                pairs.push((i + 1, i));
            }
        }
        let mut a = CsrMatrix::from_pairs(n, n, pairs.into_iter());
        for i in 0..n {
            let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
            a.add(i, i, deg);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        let mut rhs: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let mean = rhs.iter().sum::<f64>() / n as f64;
        for r in &mut rhs {
            *r -= mean;
        }
        let ones = vec![1.0; n];
        let (x, _) = pcg_deflated(&a, &rhs, Some(&ones), 1e-13, 1000).unwrap();
        // compare against the dense pseudoinverse
        let dense = a.to_dense();
        let pinv = dense.pseudo_inverse(1e-10).unwrap();
        let exact = pinv * DVector::from_column_slice(&rhs);
        for i in 0..n {
            assert_relative_eq!(x[i], exact[i], epsilon = 1e-9);
        }
        // zero-mean solution
        let xsum: f64 = x.iter().sum();
        assert!(xsum.abs() < 1e-10);
    }

    #[test]
    fn pcg_detects_indefinite_operator() {
        let mut a = CsrMatrix::from_pairs(2, 2, [(0, 0), (1, 1)].into_iter());
        a.add(0, 0, 1.0);
        a.add(1, 1, -1.0);
        let err = pcg_deflated(&a, &[0.0, 1.0], None, 1e-10, 10);
        assert!(matches!(err, Err(SolverError::CgBreakdown(_))));
    }
}
