//! Shared fixtures for the criterion benches.

use std::collections::BTreeMap;

use magnetoforge::material::{fit_energy, BhCurve};
use magnetoforge::mesh::{generate_box, GridBox, Mesh};
use magnetoforge::sources::SourceField;
use magnetoforge::formulations::RegionLaws;
use magnetoforge::material::EnergyLaw;
use magnetoforge::MU0;

/// Plate-in-box fixture at mesh level `n`.
pub fn fixture(n: usize) -> (Mesh, RegionLaws, SourceField) {
    let lo = n / 4;
    let hi = n - lo;
    let mesh = generate_box(n, Some(GridBox { lo: [lo; 3], hi: [hi; 3] })).unwrap();
    let steel = fit_energy(&BhCurve::synthetic_steel()).unwrap();
    let mut map = BTreeMap::new();
    map.insert(1, EnergyLaw::Linear { mu: MU0 });
    map.insert(2, steel);
    let laws = RegionLaws::new(map);
    let source = SourceField::square_loop(0.1, 0.9, 0.51, 1.0e4, 1.0);
    (mesh, laws, source)
}
