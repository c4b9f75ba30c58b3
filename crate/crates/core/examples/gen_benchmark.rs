//! Regenerates the shipped benchmark assets (`benchmarks/steel_bh.csv`,
//! `benchmarks/plate_in_box.toml`) from the constants in
//! `magnetoforge::benchmark`. Run from the repository root:
//!
//! ```sh
//! cargo run -p magnetoforge --example gen_benchmark
//! ```

use magnetoforge::benchmark;
use magnetoforge::solver::NewtonConfig;
use magnetoforge::sources::SourceField;

fn main() {
    std::fs::create_dir_all("benchmarks").expect("create benchmarks/");

    let curve = benchmark::steel_curve();
    let mut csv = String::from("# synthetic saturating steel for the plate-in-box benchmark\nh,b\n");
    for (h, b) in &curve.samples {
        csv.push_str(&format!("{h:.9e},{b:.9e}\n"));
    }
    std::fs::write("benchmarks/steel_bh.csv", csv).expect("write steel_bh.csv");

    let cfg = benchmark::newton_config();
    let default = NewtonConfig::default();
    let mut toml = String::new();
    toml.push_str(&format!(
        "# Plate-in-box benchmark: unit-cube air domain, full-cross-section steel\n\
         # plate (z in [1/4, 3/4], snapped to the cell grid per level), stranded\n\
         # coil piercing the plate. The two excitation levels are the analogue of\n\
         # the paper's 1000 / 3000 ampere-turn TEAM-13 cases.\n\
         #\n\
         # Regenerate with: cargo run -p magnetoforge --example gen_benchmark\n\n\
         [mesh]\n\
         box = {{ n = 8, inclusion = {{ lo = [0.0, 0.0, 0.25], hi = [1.0, 1.0, 0.75] }} }}\n\n\
         [materials.{air}]\n\
         type = \"linear\"\n\
         mu_r = 1.0\n\n\
         [materials.{steel}]\n\
         type = \"bh_csv\"\n\
         path = \"steel_bh.csv\"\n\n",
        air = benchmark::AIR_REGION,
        steel = benchmark::STEEL_REGION,
    ));

    let coil = benchmark::coil(benchmark::EXCITATION_LOW);
    let loops = match &coil {
        SourceField::Sum(loops) => loops.as_slice(),
        single => std::slice::from_ref(single),
    };
    for l in loops {
        let SourceField::FilamentLoop { vertices, current, turns, .. } = l else {
            panic!("benchmark coil is a sum of filament loops");
        };
        toml.push_str("[[sources]]\ntype = \"filament_loop\"\nvertices = [\n");
        for v in vertices {
            toml.push_str(&format!("    [{}, {}, {}],\n", v.x, v.y, v.z));
        }
        toml.push_str(&format!("]\ncurrent = {current}\nturns = {turns}\n\n"));
    }

    toml.push_str("[run]\nformulation = \"all\"\np = 1\n\n");
    if cfg.tol_rel != default.tol_rel {
        toml.push_str(&format!("[newton]\ntol_rel = {:e}\n", cfg.tol_rel));
        if cfg.backtrack_factor != default.backtrack_factor {
            toml.push_str(&format!("backtrack_factor = {}\n", cfg.backtrack_factor));
        }
        toml.push('\n');
    }
    toml.push_str(&format!(
        "[compare]\nlevels = [4, 6, 8]\ndegrees = [1, 2]\n\
         # 1.0 = {low:.0} ampere-turns (knee), {ratio} = {high:.0} ampere-turns (saturated)\n\
         excitations = [1.0, {ratio}]\n\n\
         [output]\nreport = \"plate_in_box_report.json\"\ncompare_csv = \"plate_in_box_compare.csv\"\n",
        low = benchmark::EXCITATION_LOW,
        high = benchmark::EXCITATION_HIGH,
        ratio = benchmark::EXCITATION_HIGH / benchmark::EXCITATION_LOW,
    ));
    std::fs::write("benchmarks/plate_in_box.toml", toml).expect("write plate_in_box.toml");
    println!("wrote benchmarks/steel_bh.csv and benchmarks/plate_in_box.toml");
}
