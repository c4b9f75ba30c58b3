//! Command implementations: solve, compare, material, mesh-info.

use std::path::{Path, PathBuf};

use magnetoforge::formulations::{
    l2_diff_and_norm, MixedFormulation, ScalarFormulation, VectorFormulation,
};
use magnetoforge::material::{
    coenergy_eval, energy_eval, fit_energy, load_bh_csv, verify_constants, CoenergyLaw, EnergyLaw,
};
use magnetoforge::mesh::{build_edge_table, Mesh};
use magnetoforge::solver::{newton_solve, NewtonConfig, SolveReport, SolverError};
use magnetoforge::sources::SourceField;
use nalgebra::Vector3;
use serde::Serialize;

use crate::config::{Config, ConfigError, FormulationChoice};

/// Process exit codes (also documented in the README).
pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(e) => format!("configuration error: {e:#}"),
            CliError::Solver(e) => format!("solver error: {e:#}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.into())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Solver(e.into())
    }
}

fn io_err(e: std::io::Error, what: &Path) -> CliError {
    CliError::Config(anyhow::Error::new(e).context(format!("writing {}", what.display())))
}

/// Report header; the timestamp lives here so report bodies stay
/// byte-identical across reruns of the same configuration.
#[derive(Debug, Serialize)]
pub struct ReportHeader {
    pub timestamp_unix: u64,
    pub tool: &'static str,
    pub version: &'static str,
    pub config: String,
}

impl ReportHeader {
    fn new(config: &Path) -> ReportHeader {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ReportHeader {
            timestamp_unix,
            tool: "magnetoforge",
            version: env!("CARGO_PKG_VERSION"),
            config: config.display().to_string(),
        }
    }
}

/// One formulation solved on one mesh.
pub struct Solved {
    pub name: &'static str,
    pub p: usize,
    pub dofs: usize,
    pub report: SolveReport,
    pub kind: SolvedKind,
}

pub enum SolvedKind {
    Mixed(Box<MixedFormulation>, Vec<f64>),
    Scalar(Box<ScalarFormulation>, Vec<f64>),
    Vector(Box<VectorFormulation>, Vec<f64>),
}

impl Solved {
    pub fn b_at(&self, tet: usize, q: usize) -> Vector3<f64> {
        match &self.kind {
            SolvedKind::Mixed(f, x) => {
                let (b, _) = f.split(x);
                f.b_at(b, tet, q)
            }
            SolvedKind::Scalar(f, x) => {
                f.b_at(x, tet, q).expect("material inversion succeeded during the solve")
            }
            SolvedKind::Vector(f, x) => f.b_at(x, tet),
        }
    }

    pub fn h_at(&self, tet: usize, q: usize) -> Vector3<f64> {
        match &self.kind {
            SolvedKind::Mixed(f, x) => {
                let (b, _) = f.split(x);
                f.h_at(b, tet, q).expect("material evaluation succeeded during the solve")
            }
            SolvedKind::Scalar(f, x) => f.h_at(x, tet, q),
            SolvedKind::Vector(f, x) => {
                f.h_at(x, tet).expect("material evaluation succeeded during the solve")
            }
        }
    }

    fn field_norms(&self) -> (f64, f64) {
        let ctx = match &self.kind {
            SolvedKind::Mixed(f, _) => &f.ctx,
            SolvedKind::Scalar(f, _) => &f.ctx,
            SolvedKind::Vector(f, _) => &f.ctx,
        };
        let (_, b_l2) = l2_diff_and_norm(ctx, |t, q| self.b_at(t, q), |t, q| self.b_at(t, q));
        let (_, h_l2) = l2_diff_and_norm(ctx, |t, q| self.h_at(t, q), |t, q| self.h_at(t, q));
        (b_l2, h_l2)
    }
}

/// Solve one formulation. `which` must not be `All`.
pub fn solve_one(
    mesh: &Mesh,
    config: &Config,
    source: &SourceField,
    which: FormulationChoice,
    p: usize,
    newton: &NewtonConfig,
) -> Result<Solved, CliError> {
    let laws = config.region_laws(mesh)?;
    let build_err = |e: magnetoforge::formulations::FormulationError| {
        CliError::Config(anyhow::Error::new(e).context("building the formulation"))
    };
    match which {
        FormulationChoice::Mixed => {
            let mut f = MixedFormulation::new(mesh, laws, source, p).map_err(build_err)?;
            let (x, report) = newton_solve(&mut f, None, newton)?;
            let dofs = f.num_unknowns_total();
            Ok(Solved { name: "mixed", p, dofs, report, kind: SolvedKind::Mixed(Box::new(f), x) })
        }
        FormulationChoice::Scalar => {
            let mut f = ScalarFormulation::new(mesh, laws, source, p).map_err(build_err)?;
            let (x, report) = newton_solve(&mut f, None, newton)?;
            let dofs = f.num_psi();
            Ok(Solved { name: "scalar", p, dofs, report, kind: SolvedKind::Scalar(Box::new(f), x) })
        }
        FormulationChoice::Vector => {
            let mut f = VectorFormulation::new(mesh, laws, source).map_err(build_err)?;
            let (x, report) = newton_solve(&mut f, None, newton)?;
            // Reported DOF count is the full edge-element space (the paper's
            // "3-6 times as many degrees of freedom" compares spaces before
            // gauging); the gauged solve uses num_free() unknowns.
            let dofs = f.num_edges;
            Ok(Solved { name: "vector", p: 1, dofs, report, kind: SolvedKind::Vector(Box::new(f), x) })
        }
        FormulationChoice::All => unreachable!("solve_one requires a concrete formulation"),
    }
}

#[derive(Debug, Serialize)]
struct FieldNorms {
    b_l2: f64,
    h_l2: f64,
}

#[derive(Debug, Serialize)]
struct SolveBody<'a> {
    formulation: &'static str,
    p: usize,
    mesh_vertices: usize,
    mesh_tets: usize,
    dofs: usize,
    status: magnetoforge::solver::SolveStatus,
    newton_iterations: usize,
    total_cg_iterations: usize,
    initial_residual: f64,
    final_residual: f64,
    initial_energy: f64,
    final_energy: f64,
    field_norms: FieldNorms,
    iterations: &'a [magnetoforge::solver::IterationRecord],
}

#[derive(Debug, Serialize)]
struct SolveDocument<'a> {
    header: &'a ReportHeader,
    solves: Vec<SolveBody<'a>>,
}

fn report_body<'a>(mesh: &Mesh, s: &'a Solved) -> SolveBody<'a> {
    let (b_l2, h_l2) = s.field_norms();
    SolveBody {
        formulation: s.name,
        p: s.p,
        mesh_vertices: mesh.num_vertices(),
        mesh_tets: mesh.num_tets(),
        dofs: s.dofs,
        status: s.report.status,
        newton_iterations: s.report.newton_iterations,
        total_cg_iterations: s.report.total_cg_iterations(),
        initial_residual: s.report.initial_residual,
        final_residual: s.report.final_residual,
        initial_energy: s.report.initial_energy,
        final_energy: s.report.final_energy,
        field_norms: FieldNorms { b_l2, h_l2 },
        iterations: &s.report.iterations,
    }
}

fn out_path(out_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn write_fields(prefix: &Path, mesh: &Mesh, s: &Solved) -> Result<(), CliError> {
    let b_path = prefix.with_file_name(format!(
        "{}_{}_b.csv",
        prefix.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        s.name
    ));
    let mut out = String::from("tet,region,cx,cy,cz,bx,by,bz\n");
    let ctx_nq = match &s.kind {
        SolvedKind::Mixed(f, _) => f.ctx.nq(),
        SolvedKind::Scalar(f, _) => f.ctx.nq(),
        SolvedKind::Vector(f, _) => f.ctx.nq(),
    };
    for t in 0..mesh.num_tets() {
        let geom = mesh.element_geometry(t);
        let c = geom.map(Vector3::new(0.25, 0.25, 0.25));
        let mut b = Vector3::zeros();
        for q in 0..ctx_nq {
            b += s.b_at(t, q);
        }
        b /= ctx_nq as f64;
        out.push_str(&format!(
            "{t},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
            mesh.tets[t].region, c.x, c.y, c.z, b.x, b.y, b.z
        ));
    }
    std::fs::write(&b_path, out).map_err(|e| io_err(e, &b_path))?;

    let psi: Option<&[f64]> = match &s.kind {
        SolvedKind::Mixed(f, x) => Some(f.split(x).1),
        SolvedKind::Scalar(_, x) => Some(x),
        SolvedKind::Vector(..) => None,
    };
    if let Some(psi) = psi {
        let psi_path = prefix.with_file_name(format!(
            "{}_{}_psi.csv",
            prefix.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            s.name
        ));
        let mut out = String::from("vertex,x,y,z,psi\n");
        // vertex DOFs come first in the Lagrange numbering for both p = 1, 2
        for (v, pos) in mesh.vertices.iter().enumerate() {
            out.push_str(&format!(
                "{v},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                pos.x, pos.y, pos.z, psi[v]
            ));
        }
        std::fs::write(&psi_path, out).map_err(|e| io_err(e, &psi_path))?;
    }
    Ok(())
}

pub fn cmd_solve(config_path: &Path, config: &Config, out_dir: &Path, quiet: bool) -> Result<(), CliError> {
    let mesh = config.build_mesh(None)?;
    let source = config.build_source(1.0)?;
    let header = ReportHeader::new(config_path);
    let which = match config.formulation {
        FormulationChoice::All => {
            vec![FormulationChoice::Mixed, FormulationChoice::Scalar, FormulationChoice::Vector]
        }
        one => vec![one],
    };
    let mut solves = Vec::new();
    for w in which {
        let s = solve_one(&mesh, config, &source, w, config.p, &config.newton)?;
        if !quiet {
            eprintln!(
                "{}: {} dofs, {} Newton iterations, final residual {:.3e}",
                s.name, s.dofs, s.report.newton_iterations, s.report.final_residual
            );
        }
        if let Some(prefix) = &config.raw.output.fields_prefix {
            write_fields(&out_path(out_dir, prefix), &mesh, &s)?;
        }
        solves.push(s);
    }
    let doc = SolveDocument {
        header: &header,
        solves: solves.iter().map(|s| report_body(&mesh, s)).collect(),
    };
    let path = out_path(out_dir, &config.raw.output.report);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(e, dir))?;
    }
    let json = serde_json::to_string_pretty(&doc).expect("report serializes");
    std::fs::write(&path, json).map_err(|e| io_err(e, &path))?;
    if !quiet {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Fixed header of the comparison CSV (also part of the public interface).
pub const COMPARE_HEADER: &str = "level,p,excitation,iters_vector,iters_scalar,iters_mixed,\
dofs_vector,dofs_scalar,dofs_mixed,cg_total_vector,cg_total_scalar,cg_total_mixed,\
rel_diff_h_mixed_scalar,rel_diff_b_mixed_vector";

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub level: usize,
    pub p: usize,
    pub excitation: f64,
    pub iters_vector: usize,
    pub iters_scalar: usize,
    pub iters_mixed: usize,
    pub dofs_vector: usize,
    pub dofs_scalar: usize,
    pub dofs_mixed: usize,
    pub cg_total_vector: usize,
    pub cg_total_scalar: usize,
    pub cg_total_mixed: usize,
    pub rel_diff_h_mixed_scalar: f64,
    pub rel_diff_b_mixed_vector: f64,
}

pub fn compare_rows(config: &Config, quiet: bool) -> Result<Vec<CompareRow>, CliError> {
    let spec = config
        .raw
        .compare
        .clone()
        .unwrap_or(crate::config::CompareSpec {
            levels: vec![config.raw.mesh.box_spec.as_ref().map(|b| b.n).unwrap_or(0)],
            degrees: vec![config.p],
            excitations: vec![1.0],
        });
    if config.raw.mesh.box_spec.is_none() && spec.levels.len() > 1 {
        return Err(ConfigError::CompareNeedsBox.into());
    }
    let mut rows = Vec::new();
    for &level in &spec.levels {
        let mesh = if config.raw.mesh.box_spec.is_some() {
            config.build_mesh(Some(level))?
        } else {
            config.build_mesh(None)?
        };
        for &excitation in &spec.excitations {
            let source = config.build_source(excitation)?;
            let vector =
                solve_one(&mesh, config, &source, FormulationChoice::Vector, 1, &config.newton)?;
            for &p in &spec.degrees {
                let mixed =
                    solve_one(&mesh, config, &source, FormulationChoice::Mixed, p, &config.newton)?;
                let scalar =
                    solve_one(&mesh, config, &source, FormulationChoice::Scalar, p, &config.newton)?;
                let ctx = match &mixed.kind {
                    SolvedKind::Mixed(f, _) => &f.ctx,
                    _ => unreachable!(),
                };
                let (dh, h_norm) =
                    l2_diff_and_norm(ctx, |t, q| mixed.h_at(t, q), |t, q| scalar.h_at(t, q));
                let (db, b_norm) =
                    l2_diff_and_norm(ctx, |t, q| mixed.b_at(t, q), |t, q| vector.b_at(t, q));
                let row = CompareRow {
                    level,
                    p,
                    excitation,
                    iters_vector: vector.report.newton_iterations,
                    iters_scalar: scalar.report.newton_iterations,
                    iters_mixed: mixed.report.newton_iterations,
                    dofs_vector: vector.dofs,
                    dofs_scalar: scalar.dofs,
                    dofs_mixed: mixed.dofs,
                    cg_total_vector: vector.report.total_cg_iterations(),
                    cg_total_scalar: scalar.report.total_cg_iterations(),
                    cg_total_mixed: mixed.report.total_cg_iterations(),
                    rel_diff_h_mixed_scalar: dh / h_norm,
                    rel_diff_b_mixed_vector: db / b_norm,
                };
                if !quiet {
                    eprintln!(
                        "level {level} p {p} excitation {excitation}: iters v/s/m = {}/{}/{}",
                        row.iters_vector, row.iters_scalar, row.iters_mixed
                    );
                }
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub fn format_compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.9e},{:.9e}\n",
            r.level,
            r.p,
            r.excitation,
            r.iters_vector,
            r.iters_scalar,
            r.iters_mixed,
            r.dofs_vector,
            r.dofs_scalar,
            r.dofs_mixed,
            r.cg_total_vector,
            r.cg_total_scalar,
            r.cg_total_mixed,
            r.rel_diff_h_mixed_scalar,
            r.rel_diff_b_mixed_vector
        ));
    }
    out
}

#[derive(Debug, Serialize)]
struct CompareDocument<'a> {
    header: &'a ReportHeader,
    rows: &'a [CompareRow],
}

pub fn cmd_compare(config_path: &Path, config: &Config, out_dir: &Path, quiet: bool) -> Result<(), CliError> {
    let rows = compare_rows(config, quiet)?;
    let header = ReportHeader::new(config_path);
    let csv_path = out_path(out_dir, &config.raw.output.compare_csv);
    if let Some(dir) = csv_path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(e, dir))?;
    }
    std::fs::write(&csv_path, format_compare_csv(&rows)).map_err(|e| io_err(e, &csv_path))?;
    let json_path = csv_path.with_extension("json");
    let doc = CompareDocument { header: &header, rows: &rows };
    std::fs::write(&json_path, serde_json::to_string_pretty(&doc).expect("rows serialize"))
        .map_err(|e| io_err(e, &json_path))?;
    if !quiet {
        eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    }
    Ok(())
}

pub fn cmd_material(path: &Path, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let curve = load_bh_csv(path)
        .map_err(|e| CliError::Config(anyhow::Error::new(e).context("loading B-H data")))?;
    let law = fit_energy(&curve)
        .map_err(|e| CliError::Config(anyhow::Error::new(e).context("fitting the energy law")))?;
    let (gamma, lipschitz) = verify_constants(&law)
        .map_err(|e| CliError::Config(anyhow::Error::new(e).context("verifying convexity constants")))?;
    let nu_sat = match &law {
        EnergyLaw::IsotropicSpline { nu_sat, .. } => *nu_sat,
        EnergyLaw::Linear { mu } => 1.0 / mu,
    };
    let claw = CoenergyLaw::new(law.clone());
    let b_last = curve.b_last();
    let mut max_fenchel = 0.0f64;
    let scan = 1000;
    for k in 0..=scan {
        let s = 2.0 * b_last * k as f64 / scan as f64;
        let b = Vector3::new(s, 0.0, 0.0);
        let ev = energy_eval(&law, b);
        let ce = coenergy_eval(&claw, ev.h)
            .map_err(|e| CliError::Config(anyhow::Error::new(e).context("coenergy inversion")))?;
        let gap = (ev.w + ce.w_star - ev.h.dot(&b)).abs();
        let rel = gap / ev.w.abs().max(1.0);
        max_fenchel = max_fenchel.max(rel);
    }
    writeln!(out, "samples: {}", curve.samples.len()).map_err(|e| io_err(e, path))?;
    writeln!(out, "b_last: {b_last:.6} T").map_err(|e| io_err(e, path))?;
    writeln!(out, "gamma: {gamma:.6e} (min d2w, A m/Vs ... inverse permeability scale)")
        .map_err(|e| io_err(e, path))?;
    writeln!(out, "lipschitz: {lipschitz:.6e} (max d2w)").map_err(|e| io_err(e, path))?;
    writeln!(out, "saturation_slope: {nu_sat:.6e} (dh/db beyond b_last)")
        .map_err(|e| io_err(e, path))?;
    writeln!(out, "fenchel_roundtrip_max_rel_error: {max_fenchel:.3e} over |b| in [0, 2 b_last]")
        .map_err(|e| io_err(e, path))?;
    writeln!(out, "b,h,w,w_star").map_err(|e| io_err(e, path))?;
    for k in 0..=24 {
        let s = 2.0 * b_last * k as f64 / 24.0;
        let b = Vector3::new(s, 0.0, 0.0);
        let ev = energy_eval(&law, b);
        let ce = coenergy_eval(&claw, ev.h)
            .map_err(|e| CliError::Config(anyhow::Error::new(e).context("coenergy inversion")))?;
        writeln!(out, "{s:.6e},{:.6e},{:.6e},{:.6e}", ev.h.norm(), ev.w, ce.w_star)
            .map_err(|e| io_err(e, path))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct RegionInfo {
    tag: i32,
    tets: usize,
    volume: f64,
}

#[derive(Debug, Serialize)]
struct DofInfo {
    p: usize,
    dofs_scalar: usize,
    dofs_mixed: usize,
}

#[derive(Debug, Serialize)]
struct MeshInfo {
    vertices: usize,
    tets: usize,
    edges: usize,
    boundary_triangles: usize,
    total_volume: f64,
    boundary_area: f64,
    regions: Vec<RegionInfo>,
    dofs_vector: usize,
    degrees: Vec<DofInfo>,
}

pub fn cmd_mesh_info(config: &Config, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let mesh = config.build_mesh(None)?;
    let edges = build_edge_table(&mesh);
    let regions = mesh
        .region_tags()
        .into_iter()
        .map(|tag| {
            let tets: Vec<usize> =
                (0..mesh.num_tets()).filter(|&t| mesh.tets[t].region == tag).collect();
            let volume = tets.iter().map(|&t| mesh.element_geometry(t).volume()).sum();
            RegionInfo { tag, tets: tets.len(), volume }
        })
        .collect();
    let nv = mesh.num_vertices();
    let ne = edges.len();
    let nt = mesh.num_tets();
    let degrees = [1usize, 2]
        .iter()
        .map(|&p| {
            let dofs_scalar = if p == 1 { nv } else { nv + ne };
            // mixed: discontinuous vector space of degree p-1 plus the
            // Lagrange space (3 components x dim P_{p-1} per tet)
            let qdim = if p == 1 { 3 } else { 12 };
            DofInfo { p, dofs_scalar, dofs_mixed: qdim * nt + dofs_scalar }
        })
        .collect();
    let info = MeshInfo {
        vertices: nv,
        tets: nt,
        edges: ne,
        boundary_triangles: mesh.boundary_tris.len(),
        total_volume: mesh.total_volume(),
        boundary_area: mesh.boundary_area(),
        regions,
        dofs_vector: ne,
        degrees,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&info).expect("mesh info serializes"))
        .map_err(|e| io_err(e, Path::new("stdout")))?;
    Ok(())
}
