//! Debugging aid: per-iteration Newton traces on the plate-in-box benchmark.

use std::collections::BTreeMap;

use magnetoforge::formulations::{
    MixedFormulation, RegionLaws, ScalarFormulation, VectorFormulation,
};
use magnetoforge::material::{fit_energy, BhCurve, EnergyLaw};
use magnetoforge::mesh::{generate_box, GridBox};
use magnetoforge::solver::{newton_solve, IterationRecord, NewtonConfig};
use magnetoforge::sources::SourceField;
use magnetoforge::MU0;
use nalgebra::Vector3;

fn plate_coil(current: f64) -> SourceField {
    let mut loops = Vec::new();
    for &e in &[-0.10f64, -0.05, 0.0, 0.05, 0.10] {
        for &y in &[0.38f64, 0.44, 0.50, 0.56, 0.62] {
            let (xl, xr) = (0.30 - e, 0.70 + e);
            let (zb, zt) = (0.16 - 0.5 * e, 0.84 + 0.5 * e);
            let verts = vec![
                Vector3::new(xl, y, zb),
                Vector3::new(xr, y, zb),
                Vector3::new(xr, y, zt),
                Vector3::new(xl, y, zt),
                Vector3::new(xl, y, zb),
            ];
            loops.push(SourceField::filament_loop(verts, current / 25.0, 1.0).unwrap());
        }
    }
    SourceField::Sum(loops)
}

fn dump(name: &str, iters: &[IterationRecord], count: usize) {
    println!("{name}: {count} iterations");
    for (k, it) in iters.iter().enumerate() {
        println!(
            "  {k}: |r|={:.3e} J={:+.8e} tau={:.4} bt={} cg={}",
            it.residual_norm, it.energy, it.step, it.backtracks, it.cg_iterations
        );
    }
}

fn main() {
    let js = 1.9f64;
    let chi = 500.0f64;
    let tail = 5.0f64;
    let h0 = 2.0 * js / (std::f64::consts::PI * (chi - tail + 1.0) * MU0);
    let mut hs = vec![0.0f64];
    for k in 0..=63 {
        hs.push(0.05 * (200.0f64 / 0.05).powf(k as f64 / 63.0));
    }
    let samples = hs
        .iter()
        .map(|&f| {
            let h = f * h0;
            (h, tail * MU0 * h + js * (2.0 / std::f64::consts::PI) * (h / h0).atan())
        })
        .collect();
    let steel = fit_energy(&BhCurve::new(samples).unwrap()).unwrap();
    let mut cfg = NewtonConfig::default();
    cfg.tol_rel = 1.0e-10;
    cfg.backtrack_factor = 0.58;
    let current = 5.0e5;
    for n in [4usize, 8] {
    let lz = (0.25 * n as f64).round() as usize;
    let mesh = generate_box(n, Some(GridBox { lo: [0, 0, lz], hi: [n, n, n - lz] })).unwrap();
    let mut map = BTreeMap::new();
    map.insert(1, EnergyLaw::Linear { mu: MU0 });
    map.insert(2, steel.clone());
    let laws = RegionLaws::new(map);
    let source = plate_coil(current);

    for p in [1usize] {
        let mut mixed = MixedFormulation::new(&mesh, laws.clone(), &source, p).unwrap();
        let (_, rm) = newton_solve(&mut mixed, None, &cfg).unwrap();
        dump(&format!("n={n} mixed p={p}"), &rm.iterations, rm.newton_iterations);
        let mut vector = VectorFormulation::new(&mesh, laws.clone(), &source).unwrap();
        let (_, rv) = newton_solve(&mut vector, None, &cfg).unwrap();
        dump(&format!("n={n} vector"), &rv.iterations, rv.newton_iterations);
        let mut scalar = ScalarFormulation::new(&mesh, laws.clone(), &source, p).unwrap();
        let (_, rs) = newton_solve(&mut scalar, None, &cfg).unwrap();
        dump(&format!("n={n} scalar p={p}"), &rs.iterations, rs.newton_iterations);
    }
    }
}
