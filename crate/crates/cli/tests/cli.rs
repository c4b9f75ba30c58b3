//! End-to-end tests of the `magnetoforge` binary: exit codes, report
//! structure, determinism, and the CSV/JSON consistency contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_magnetoforge"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write fixture");
    path
}

/// Small linear problem: unit cube of air with one square loop.
const LINEAR_CONFIG: &str = r#"
[mesh]
box = { n = 3 }

[materials.1]
type = "linear"
mu_r = 1.0

[[sources]]
type = "square_loop"
lo = 0.25
hi = 0.75
z = 0.5
current = 1000.0

[run]
formulation = "all"
p = 1
"#;

#[test]
fn solve_linear_writes_report_with_one_newton_iteration() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", LINEAR_CONFIG);
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("report.json")).unwrap())
            .unwrap();
    let solves = report["solves"].as_array().unwrap();
    assert_eq!(solves.len(), 3);
    for s in solves {
        assert_eq!(s["status"], "converged", "formulation {}", s["formulation"]);
        assert_eq!(
            s["newton_iterations"], 1,
            "linear problem must converge in one step ({})",
            s["formulation"]
        );
    }
    assert!(report["header"]["timestamp_unix"].is_u64());
}

#[test]
fn solve_reports_are_deterministic_modulo_header() {
    let strip_header = |path: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("header");
        serde_json::to_string(&v).unwrap()
    };
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", LINEAR_CONFIG);
    for sub in ["a", "b"] {
        std::fs::create_dir(tmp.path().join(sub)).unwrap();
        let out = run(
            &["solve", "--config", cfg.to_str().unwrap(), "--out", sub, "--quiet"],
            tmp.path(),
        );
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        strip_header(&tmp.path().join("a/report.json")),
        strip_header(&tmp.path().join("b/report.json")),
        "report bodies must be byte-identical across reruns"
    );
}

#[test]
fn formulation_and_p_overrides_are_applied() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", LINEAR_CONFIG);
    let out = run(
        &[
            "solve",
            "--config",
            cfg.to_str().unwrap(),
            "--formulation",
            "scalar",
            "--p",
            "2",
            "--quiet",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("report.json")).unwrap())
            .unwrap();
    let solves = report["solves"].as_array().unwrap();
    assert_eq!(solves.len(), 1);
    assert_eq!(solves[0]["formulation"], "scalar");
    assert_eq!(solves[0]["p"], 2);
}

#[test]
fn missing_config_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["solve", "--config", "nope.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_toml_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "[mesh\nbox = 3");
    let out = run(&["solve", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unbound_region_exits_2_and_names_the_tag() {
    let tmp = tempfile::tempdir().unwrap();
    // mesh has inclusion region 2, but only region 1 is bound
    let cfg = write(
        tmp.path(),
        "run.toml",
        r#"
[mesh]
box = { n = 4, inclusion = { lo = [0.25, 0.25, 0.25], hi = [0.75, 0.75, 0.75] } }

[materials.1]
type = "linear"
mu_r = 1.0

[[sources]]
type = "square_loop"
lo = 0.25
hi = 0.75
z = 0.5
current = 1000.0
"#,
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("region 2"), "stderr must name the unbound tag, got: {stderr}");
}

#[test]
fn nonconvergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    // max_iter = 1 on a nonlinear problem cannot converge
    let steel = "h,b\n0,0\n100,1.0\n1000,1.5\n10000,1.6\n100000,1.7\n";
    write(tmp.path(), "steel.csv", steel);
    let cfg = write(
        tmp.path(),
        "run.toml",
        r#"
[mesh]
box = { n = 3, inclusion = { lo = [0.0, 0.0, 0.25], hi = [1.0, 1.0, 0.75] } }

[materials.1]
type = "linear"
mu_r = 1.0

[materials.2]
type = "bh_csv"
path = "steel.csv"

[[sources]]
type = "square_loop"
lo = 0.25
hi = 0.75
z = 0.5
current = 100000.0

[run]
formulation = "scalar"

[newton]
max_iter = 1
"#,
    );
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_formulation_name_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", LINEAR_CONFIG);
    let out = run(
        &["solve", "--config", cfg.to_str().unwrap(), "--formulation", "tensor"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_writes_csv_with_fixed_header_consistent_with_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "run.toml",
        r#"
[mesh]
box = { n = 3 }

[materials.1]
type = "linear"
mu_r = 1.0

[[sources]]
type = "square_loop"
lo = 0.25
hi = 0.75
z = 0.5
current = 1000.0

[compare]
levels = [3, 4]
degrees = [1]
excitations = [1.0]
"#,
    );
    let out = run(&["compare", "--config", cfg.to_str().unwrap(), "--quiet"], tmp.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("compare.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,p,excitation,iters_vector,iters_scalar,iters_mixed,\
         dofs_vector,dofs_scalar,dofs_mixed,cg_total_vector,cg_total_scalar,cg_total_mixed,\
         rel_diff_h_mixed_scalar,rel_diff_b_mixed_vector"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);

    // every CSV row must be recomputable from the JSON companion document
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("compare.json")).unwrap())
            .unwrap();
    let json_rows = doc["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), rows.len());
    for (line, jr) in rows.iter().zip(json_rows) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0].parse::<u64>().unwrap(), jr["level"].as_u64().unwrap());
        assert_eq!(cells[3].parse::<u64>().unwrap(), jr["iters_vector"].as_u64().unwrap());
        assert_eq!(cells[4].parse::<u64>().unwrap(), jr["iters_scalar"].as_u64().unwrap());
        assert_eq!(cells[5].parse::<u64>().unwrap(), jr["iters_mixed"].as_u64().unwrap());
        // the CSV prints 9 significant digits
        let dh: f64 = cells[12].parse().unwrap();
        let jd = jr["rel_diff_h_mixed_scalar"].as_f64().unwrap();
        assert!((dh - jd).abs() <= 1e-8 * jd.abs().max(1e-300), "csv {dh} vs json {jd}");
    }
}

#[test]
fn material_command_prints_constants() {
    let tmp = tempfile::tempdir().unwrap();
    let steel = "h,b\n0,0\n100,0.8\n500,1.3\n2000,1.6\n10000,1.75\n";
    let path = write(tmp.path(), "steel.csv", steel);
    let out = run(&["material", path.to_str().unwrap()], tmp.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for key in ["b_last:", "gamma:", "lipschitz:", "fenchel_roundtrip_max_rel_error:"] {
        assert!(stdout.contains(key), "missing {key} in output:\n{stdout}");
    }
}

#[test]
fn mesh_info_reports_dof_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", LINEAR_CONFIG);
    let out = run(&["mesh-info", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let info: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    // 3x3x3 grid: 4^3 vertices, 6 tets per cell
    assert_eq!(info["vertices"], 64);
    assert_eq!(info["tets"], 6 * 27);
    let ratio = info["dofs_vector"].as_f64().unwrap()
        / info["degrees"][0]["dofs_scalar"].as_f64().unwrap();
    assert!((3.0..=6.0).contains(&ratio), "edge/vertex DOF ratio {ratio}");
}

#[test]
fn threads_env_var_is_validated() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.toml", LINEAR_CONFIG);
    let out = bin()
        .args(["solve", "--config", cfg.to_str().unwrap(), "--quiet"])
        .env("MAGNETOFORGE_THREADS", "potato")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = bin()
        .args(["solve", "--config", cfg.to_str().unwrap(), "--quiet"])
        .env("MAGNETOFORGE_THREADS", "2")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
}
