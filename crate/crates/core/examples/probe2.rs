//! Probe: with linear air everywhere, mixed and scalar must agree to
//! discretization error at both degrees; p2 should beat p1.

use std::collections::BTreeMap;

use magnetoforge::formulations::{l2_diff_and_norm, MixedFormulation, ScalarFormulation, VectorFormulation, RegionLaws};
use magnetoforge::material::EnergyLaw;
use magnetoforge::mesh::{generate_box, GridBox};
use magnetoforge::solver::{newton_solve, NewtonConfig};
use magnetoforge::sources::SourceField;
use magnetoforge::MU0;
use nalgebra::Vector3;

fn main() {
    let cfg = NewtonConfig::default();
    for n in [4usize, 6, 8] {
        let mesh = generate_box(n, Some(GridBox { lo: [0, 0, 0], hi: [n, n, n / 2] })).unwrap();
        let mut map = BTreeMap::new();
        map.insert(1, EnergyLaw::Linear { mu: MU0 });
        map.insert(2, EnergyLaw::Linear { mu: 100.0 * MU0 });
        let laws = RegionLaws::new(map);
        // tall loop whose vertical legs pierce the mesh
        let verts = vec![
            Vector3::new(0.3, 0.5, -0.4),
            Vector3::new(0.7, 0.5, -0.4),
            Vector3::new(0.7, 0.5, 1.4),
            Vector3::new(0.3, 0.5, 1.4),
            Vector3::new(0.3, 0.5, -0.4),
        ];
        let source = SourceField::filament_loop(verts, 1.0e4, 1.0).unwrap();
        let mut vf = VectorFormulation::new(&mesh, laws.clone(), &source).unwrap();
        let (vx, _) = newton_solve(&mut vf, None, &cfg).unwrap();
        for p in [1usize, 2] {
            let mut mf = MixedFormulation::new(&mesh, laws.clone(), &source, p).unwrap();
            let (mx, _) = newton_solve(&mut mf, None, &cfg).unwrap();
            let mut sf = ScalarFormulation::new(&mesh, laws.clone(), &source, p).unwrap();
            let (sx, _) = newton_solve(&mut sf, None, &cfg).unwrap();
            let (mb, _) = mf.split(&mx);
            let (dh, hn) = l2_diff_and_norm(
                &mf.ctx,
                |t, q| mf.h_at(mb, t, q).unwrap(),
                |t, q| sf.h_at(&sx, t, q),
            );
            let (db, bn) = l2_diff_and_norm(
                &mf.ctx,
                |t, q| mf.b_at(mb, t, q),
                |t, _q| vf.b_at(&vx, t),
            );
            println!("n={n} p={p}: rel dh={:.4e} rel db={:.4e}", dh / hn, db / bn);
        }
    }
}
