//! Exploratory driver: Newton iteration counts of the three formulations on
//! the plate-in-box benchmark across mesh levels and excitation levels.

use std::collections::BTreeMap;

use magnetoforge::formulations::{
    l2_diff_and_norm, MixedFormulation, RegionLaws, ScalarFormulation, VectorFormulation,
};
use magnetoforge::material::{fit_energy, BhCurve, EnergyLaw};
use magnetoforge::mesh::{generate_box, GridBox};
use magnetoforge::solver::{newton_solve, NewtonConfig};
use magnetoforge::sources::SourceField;
use magnetoforge::MU0;

fn main() {
    let steel = fit_energy(&BhCurve::synthetic_steel()).unwrap();
    let cfg = NewtonConfig::default();

    for &current in &[1.0e5, 3.0e5, 1.0e6] {
        for &n in &[4usize, 6, 8] {
            let lo = (0.25 * n as f64).round() as usize;
            let hi = n - lo;
            let mesh = generate_box(n, Some(GridBox { lo: [lo; 3], hi: [hi; 3] })).unwrap();
            let mut map = BTreeMap::new();
            map.insert(1, EnergyLaw::Linear { mu: MU0 });
            map.insert(2, steel.clone());
            let laws = RegionLaws::new(map);
            // stranded coil: 3x3 bundle of square loops around the inclusion
            let mut loops = Vec::new();
            for &d in &[0.09, 0.115, 0.14] {
                for &z in &[0.46, 0.51, 0.56] {
                    loops.push(SourceField::square_loop(d, 1.0 - d, z, current / 9.0, 1.0));
                }
            }
            let source = SourceField::Sum(loops);

            for p in [1usize, 2] {
                let mut mixed = MixedFormulation::new(&mesh, laws.clone(), &source, p).unwrap();
                let (xm, rm) = match newton_solve(&mut mixed, None, &cfg) {
                    Ok(v) => v,
                    Err(e) => {
                        println!("I={current:.0} n={n} p={p} mixed FAILED: {e}");
                        continue;
                    }
                };
                let mut scalar =
                    ScalarFormulation::new(&mesh, laws.clone(), &source, p).unwrap();
                let (xs, rs) = match newton_solve(&mut scalar, None, &cfg) {
                    Ok(v) => v,
                    Err(e) => {
                        println!("I={current:.0} n={n} p={p} scalar FAILED: {e}");
                        continue;
                    }
                };
                let mut vector = VectorFormulation::new(&mesh, laws.clone(), &source).unwrap();
                let (xv, rv) = match newton_solve(&mut vector, None, &cfg) {
                    Ok(v) => v,
                    Err(e) => {
                        println!("I={current:.0} n={n} p={p} vector FAILED: {e}");
                        continue;
                    }
                };

                // peak |b| in steel from the mixed solution
                let (bcoef, _) = mixed.split(&xm);
                let mut bmax: f64 = 0.0;
                for t in 0..mesh.num_tets() {
                    if mesh.tets[t].region == 2 {
                        for q in 0..mixed.ctx.nq() {
                            bmax = bmax.max(mixed.b_at(bcoef, t, q).norm());
                        }
                    }
                }

                // cross-formulation field differences on the mixed quadrature
                let (b, psi) = mixed.split(&xm);
                let (h_diff, h_norm) = l2_diff_and_norm(
                    &mixed.ctx,
                    |t, q| mixed.h_at(b, t, q).unwrap(),
                    |t, q| scalar.h_at(&xs, t, q),
                );
                let (b_diff, b_norm) = l2_diff_and_norm(
                    &mixed.ctx,
                    |t, q| mixed.b_at(b, t, q),
                    |t, _q| vector.b_at(&xv, t),
                );
                println!(
                    "I={current:>6.0} n={n} p={p}: iters v/s/m = {}/{}/{}  cg v/s/m = {}/{}/{}  bmax={bmax:.3}  dh={:.4} db={:.4}",
                    rv.newton_iterations,
                    rs.newton_iterations,
                    rm.newton_iterations,
                    rv.total_cg_iterations(),
                    rs.total_cg_iterations(),
                    rm.total_cg_iterations(),
                    h_diff / h_norm,
                    b_diff / b_norm,
                );
            }
        }
        println!();
    }
}
