//! Debugging aid: compare the three formulations' flux densities on a
//! linear all-air problem where they must agree up to discretization.

use std::collections::BTreeMap;

use magnetoforge::formulations::{
    l2_diff_and_norm, MixedFormulation, RegionLaws, ScalarFormulation, VectorFormulation,
};
use magnetoforge::material::EnergyLaw;
use magnetoforge::mesh::generate_box;
use magnetoforge::solver::{newton_solve, NewtonConfig};
use magnetoforge::sources::SourceField;
use magnetoforge::MU0;

fn main() {
    let cfg = NewtonConfig::default();
    let source = SourceField::square_loop(5.0 / 48.0, 43.0 / 48.0, 25.0 / 48.0, 1.0e4, 1.0);
    for n in [2usize, 4, 8] {
        let mesh = generate_box(n, None).unwrap();
        let mut map = BTreeMap::new();
        map.insert(1, EnergyLaw::Linear { mu: MU0 });
        let laws = RegionLaws::new(map);

        let mut mixed = MixedFormulation::new(&mesh, laws.clone(), &source, 1).unwrap();
        let (xm, _) = newton_solve(&mut mixed, None, &cfg).unwrap();
        let mut scalar = ScalarFormulation::new(&mesh, laws.clone(), &source, 1).unwrap();
        let (xs, _) = newton_solve(&mut scalar, None, &cfg).unwrap();
        let mut vector = VectorFormulation::new(&mesh, laws.clone(), &source).unwrap();
        let (xv, _) = newton_solve(&mut vector, None, &cfg).unwrap();

        let (b, _) = mixed.split(&xm);
        let (zero, bm_norm) =
            l2_diff_and_norm(&mixed.ctx, |t, q| mixed.b_at(b, t, q), |t, q| mixed.b_at(b, t, q));
        let (_, bv_norm) = l2_diff_and_norm(
            &mixed.ctx,
            |t, _q| vector.b_at(&xv, t),
            |t, _q| vector.b_at(&xv, t),
        );
        let (_, bs_norm) = l2_diff_and_norm(
            &mixed.ctx,
            |t, q| scalar.b_at(&xs, t, q).unwrap(),
            |t, q| scalar.b_at(&xs, t, q).unwrap(),
        );
        let (dmv, _) = l2_diff_and_norm(
            &mixed.ctx,
            |t, q| mixed.b_at(b, t, q),
            |t, _q| vector.b_at(&xv, t),
        );
        let (dms, _) = l2_diff_and_norm(
            &mixed.ctx,
            |t, q| mixed.b_at(b, t, q),
            |t, q| scalar.b_at(&xs, t, q).unwrap(),
        );
        let _ = zero;
        let jm = mixed.energy_value(b).unwrap();
        let jv = vector.energy_value(&xv).unwrap();
        println!(
            "n={n}: |b_m|={bm_norm:.4e} |b_v|={bv_norm:.4e} |b_s|={bs_norm:.4e}  |m-v|/|m|={:.3} |m-s|/|m|={:.3}  J_m={jm:.6e} J_v={jv:.6e} (v free dofs {})",
            dmv / bm_norm,
            dms / bm_norm,
            vector.num_free(),
        );
    }
}
