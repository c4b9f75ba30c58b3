//! Debugging aid: steel-region flux density levels per formulation.

use std::collections::BTreeMap;

use magnetoforge::formulations::{
    MixedFormulation, RegionLaws, ScalarFormulation, VectorFormulation,
};
use magnetoforge::material::{fit_energy, BhCurve, EnergyLaw};
use magnetoforge::mesh::{generate_box, GridBox};
use magnetoforge::solver::{newton_solve, NewtonConfig};
use magnetoforge::sources::SourceField;
use magnetoforge::MU0;

fn main() {
    let steel = fit_energy(&BhCurve::synthetic_steel()).unwrap();
    let cfg = NewtonConfig::default();
    for &current in &[1.0e4] {
        for &n in &[4usize, 8, 12, 16] {
            let lo = (0.25 * n as f64).round() as usize;
            let mesh =
                generate_box(n, Some(GridBox { lo: [lo; 3], hi: [n - lo; 3] })).unwrap();
            let mut map = BTreeMap::new();
            map.insert(1, EnergyLaw::Linear { mu: MU0 });
            map.insert(2, EnergyLaw::Linear { mu: 500.0 * MU0 });
            let laws = RegionLaws::new(map);
            let mut loops = Vec::new();
            for &d in &[0.09, 0.115, 0.14] {
                for &z in &[0.46, 0.51, 0.56] {
                    loops.push(SourceField::square_loop(d, 1.0 - d, z, current / 9.0, 1.0));
                }
            }
            let source = SourceField::Sum(loops);

            let mut mixed = MixedFormulation::new(&mesh, laws.clone(), &source, 1).unwrap();
            let (xm, rm) = newton_solve(&mut mixed, None, &cfg).unwrap();
            let mut scalar = ScalarFormulation::new(&mesh, laws.clone(), &source, 1).unwrap();
            let (xs, rs) = newton_solve(&mut scalar, None, &cfg).unwrap();
            let mut vector = VectorFormulation::new(&mesh, laws.clone(), &source).unwrap();
            let (xv, rv) = newton_solve(&mut vector, None, &cfg).unwrap();

            let (b, _) = mixed.split(&xm);
            let (mut mm, mut ms, mut mv) = (0.0f64, 0.0f64, 0.0f64);
            // mean |b| over steel elements (element centers / constants)
            let (mut am, mut as_, mut av, mut cnt) = (0.0, 0.0, 0.0, 0);
            for t in 0..mesh.num_tets() {
                if mesh.tets[t].region != 2 {
                    continue;
                }
                cnt += 1;
                let bm: f64 =
                    (0..mixed.ctx.nq()).map(|q| mixed.b_at(b, t, q).norm()).sum::<f64>()
                        / mixed.ctx.nq() as f64;
                let bs: f64 = (0..scalar.ctx.nq())
                    .map(|q| scalar.b_at(&xs, t, q).unwrap().norm())
                    .sum::<f64>()
                    / scalar.ctx.nq() as f64;
                let bv = vector.b_at(&xv, t).norm();
                mm = mm.max(bm);
                ms = ms.max(bs);
                mv = mv.max(bv);
                am += bm;
                as_ += bs;
                av += bv;
            }
            println!(
                "I={current:>6.0} n={n}: steel mean |b| m/s/v = {:.3}/{:.3}/{:.3}  max = {:.3}/{:.3}/{:.3}  iters = {}/{}/{}",
                am / cnt as f64,
                as_ / cnt as f64,
                av / cnt as f64,
                mm,
                ms,
                mv,
                rm.newton_iterations,
                rs.newton_iterations,
                rv.newton_iterations,
            );
        }
    }
}
