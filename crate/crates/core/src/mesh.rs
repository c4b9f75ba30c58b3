//! Tetrahedral meshes with material regions and tagged boundary faces.
//!
//! Meshes come from two places: a Gmsh MSH 2.2 ASCII reader and a built-in
//! structured generator (unit cube, 6-tet Kuhn split per subcube, optional
//! axis-aligned inclusion). Both produce the same validated [`Mesh`]:
//! positively oriented tets, consistent face matching, no degenerate cells.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Relative volume floor: a tet is degenerate if its volume is below
/// this factor times the cube of the bounding box diagonal.
const DEGENERATE_REL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("empty mesh: {0}")]
    Empty(String),
    #[error("degenerate tet {tet}: volume {volume:.3e} below floor {floor:.3e}")]
    Degenerate { tet: usize, volume: f64, floor: f64 },
    #[error("inclusion out of range: {0}")]
    Inclusion(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tetrahedron: four vertex indices plus a material region tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tet {
    pub verts: [usize; 4],
    pub region: i32,
}

/// Boundary triangle with its physical tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryTri {
    pub verts: [usize; 3],
    pub tag: i32,
}

/// Conforming tetrahedral mesh. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vector3<f64>>,
    pub tets: Vec<Tet>,
    pub boundary_tris: Vec<BoundaryTri>,
    pub region_names: BTreeMap<i32, String>,
}

/// Affine map data of one element: reference tet {x,y,z >= 0, x+y+z <= 1}
/// onto the physical tet.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub verts: [Vector3<f64>; 4],
    /// Jacobian of the reference-to-physical map (columns v1-v0, v2-v0, v3-v0).
    pub jacobian: Matrix3<f64>,
    pub det: f64,
    /// Inverse transpose of the Jacobian; maps reference gradients to physical ones.
    pub inv_t: Matrix3<f64>,
}

impl ElementGeometry {
    /// Physical point of a reference point.
    pub fn map(&self, xi: Vector3<f64>) -> Vector3<f64> {
        self.verts[0] + self.jacobian * xi
    }

    pub fn volume(&self) -> f64 {
        self.det / 6.0
    }
}

/// Local edges of the reference tet, lower local vertex first.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Global edge enumeration plus the per-tet (edge index, orientation sign) map.
#[derive(Debug, Clone)]
pub struct EdgeTable {
    /// Vertex pairs, lower global index first. Sorted lexicographically.
    pub edges: Vec<(usize, usize)>,
    /// Per tet: 6 entries of (global edge index, sign). The sign is +1 iff
    /// the local edge direction agrees with the global low-to-high order.
    pub tet_to_edges: Vec<[(usize, i8); 6]>,
}

impl EdgeTable {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

fn signed_volume_6(v: &[Vector3<f64>; 4]) -> f64 {
    (v[1] - v[0]).cross(&(v[2] - v[0])).dot(&(v[3] - v[0]))
}

fn sorted3(t: [usize; 3]) -> [usize; 3] {
    let mut t = t;
    t.sort_unstable();
    t
}

/// The four faces of a tet, opposite to local vertex 0..3.
fn tet_faces(v: [usize; 4]) -> [[usize; 3]; 4] {
    [
        [v[1], v[2], v[3]],
        [v[0], v[2], v[3]],
        [v[0], v[1], v[3]],
        [v[0], v[1], v[2]],
    ]
}

impl Mesh {
    /// Validate raw data and build a mesh. Tets with negative orientation are
    /// reordered in place; all invariants are checked.
    pub fn new(
        vertices: Vec<Vector3<f64>>,
        mut tets: Vec<Tet>,
        boundary_tris: Vec<BoundaryTri>,
        region_names: BTreeMap<i32, String>,
    ) -> Result<Self, MeshError> {
        if vertices.is_empty() || tets.is_empty() {
            return Err(MeshError::Empty("mesh has no vertices or no tets".into()));
        }
        let nv = vertices.len();
        for (i, t) in tets.iter().enumerate() {
            for &v in &t.verts {
                if v >= nv {
                    return Err(MeshError::Topology(format!(
                        "tet {i} references missing vertex {v} (have {nv})"
                    )));
                }
            }
        }
        for (i, t) in boundary_tris.iter().enumerate() {
            for &v in &t.verts {
                if v >= nv {
                    return Err(MeshError::Topology(format!(
                        "boundary triangle {i} references missing vertex {v} (have {nv})"
                    )));
                }
            }
        }

        let mut lo = vertices[0];
        let mut hi = vertices[0];
        for v in &vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let diag = (hi - lo).norm();
        let floor = DEGENERATE_REL * diag.powi(3);

        for (i, t) in tets.iter_mut().enumerate() {
            let vs = [
                vertices[t.verts[0]],
                vertices[t.verts[1]],
                vertices[t.verts[2]],
                vertices[t.verts[3]],
            ];
            let mut vol6 = signed_volume_6(&vs);
            if vol6 < 0.0 {
                t.verts.swap(2, 3);
                vol6 = -vol6;
            }
            let vol = vol6 / 6.0;
            if vol <= floor {
                return Err(MeshError::Degenerate { tet: i, volume: vol, floor });
            }
        }

        // Face matching: interior faces twice, boundary faces once, and the
        // boundary triangle list must be exactly the set of once-counted faces.
        let mut face_count: BTreeMap<[usize; 3], u32> = BTreeMap::new();
        for t in &tets {
            for f in tet_faces(t.verts) {
                *face_count.entry(sorted3(f)).or_insert(0) += 1;
            }
        }
        if let Some((f, c)) = face_count.iter().find(|(_, &c)| c > 2) {
            return Err(MeshError::Topology(format!(
                "non-manifold face {f:?} shared by {c} tets"
            )));
        }
        let mut tagged: BTreeMap<[usize; 3], u32> = BTreeMap::new();
        for bt in &boundary_tris {
            *tagged.entry(sorted3(bt.verts)).or_insert(0) += 1;
        }
        for (f, c) in &tagged {
            if *c > 1 {
                return Err(MeshError::Topology(format!("duplicate boundary triangle {f:?}")));
            }
            match face_count.get(f) {
                Some(1) => {}
                Some(_) => {
                    return Err(MeshError::Topology(format!(
                        "boundary triangle {f:?} is an interior face"
                    )))
                }
                None => {
                    return Err(MeshError::Topology(format!(
                        "dangling boundary triangle {f:?} is not a face of any tet"
                    )))
                }
            }
        }
        for (f, c) in &face_count {
            if *c == 1 && !tagged.contains_key(f) {
                return Err(MeshError::Topology(format!(
                    "boundary face {f:?} is not listed as a boundary triangle"
                )));
            }
        }

        Ok(Mesh { vertices, tets, boundary_tris, region_names })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn element_geometry(&self, t: usize) -> ElementGeometry {
        let tv = self.tets[t].verts;
        let verts = [
            self.vertices[tv[0]],
            self.vertices[tv[1]],
            self.vertices[tv[2]],
            self.vertices[tv[3]],
        ];
        let jacobian = Matrix3::from_columns(&[
            verts[1] - verts[0],
            verts[2] - verts[0],
            verts[3] - verts[0],
        ]);
        let det = jacobian.determinant();
        debug_assert!(det > 0.0);
        let inv_t = jacobian
            .try_inverse()
            .expect("mesh invariant: nondegenerate tet")
            .transpose();
        ElementGeometry { verts, jacobian, det, inv_t }
    }

    /// Sum of all tet volumes.
    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.element_geometry(t).volume()).sum()
    }

    /// Sum of all boundary triangle areas.
    pub fn boundary_area(&self) -> f64 {
        self.boundary_tris
            .iter()
            .map(|bt| {
                let a = self.vertices[bt.verts[0]];
                let b = self.vertices[bt.verts[1]];
                let c = self.vertices[bt.verts[2]];
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    /// Region tags present in the mesh, sorted.
    pub fn region_tags(&self) -> Vec<i32> {
        let mut tags: Vec<i32> = self.tets.iter().map(|t| t.region).collect();
        tags.sort_unstable();
        tags.dedup();
        tags
    }

    /// Vertices lying on at least one boundary triangle.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for bt in &self.boundary_tris {
            for &v in &bt.verts {
                on[v] = true;
            }
        }
        on
    }
}

/// Axis-aligned inclusion in grid coordinates of [`generate_box`]:
/// subcube indices `lo[k] <= i < hi[k]` belong to the inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBox {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

/// Structured unit-cube mesh: n^3 subcubes, each split into 6 tets (Kuhn
/// split along the main diagonal, conforming by translation invariance).
/// Subcubes inside `inclusion` get region tag 2 ("steel"), the rest tag 1
/// ("air"); every boundary face gets tag 1.
pub fn generate_box(n: usize, inclusion: Option<GridBox>) -> Result<Mesh, MeshError> {
    assert!(n >= 1, "need at least one subdivision per axis");
    if let Some(gb) = inclusion {
        for k in 0..3 {
            if gb.lo[k] >= gb.hi[k] || gb.hi[k] > n {
                return Err(MeshError::Inclusion(format!(
                    "axis {k}: need lo < hi <= n, got lo={} hi={} n={n}",
                    gb.lo[k], gb.hi[k]
                )));
            }
        }
    }

    let np = n + 1;
    let vid = |i: usize, j: usize, k: usize| (i * np + j) * np + k;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(np * np * np);
    for i in 0..np {
        for j in 0..np {
            for k in 0..np {
                vertices.push(Vector3::new(i as f64 * h, j as f64 * h, k as f64 * h));
            }
        }
    }

    // Kuhn split: tets follow the 6 monotone lattice paths from corner
    // (0,0,0) to (1,1,1) of each subcube.
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut tets = Vec::with_capacity(6 * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let inside = inclusion.is_some_and(|gb| {
                    let c = [i, j, k];
                    (0..3).all(|a| c[a] >= gb.lo[a] && c[a] < gb.hi[a])
                });
                let region = if inside { 2 } else { 1 };
                for perm in PERMS {
                    let mut corner = [i, j, k];
                    let mut vs = [vid(corner[0], corner[1], corner[2]); 4];
                    for (step, &axis) in perm.iter().enumerate() {
                        corner[axis] += 1;
                        vs[step + 1] = vid(corner[0], corner[1], corner[2]);
                    }
                    tets.push(Tet { verts: vs, region });
                }
            }
        }
    }

    // Boundary = all faces owned by exactly one tet, tagged 1.
    let mut face_count: BTreeMap<[usize; 3], u32> = BTreeMap::new();
    for t in &tets {
        for f in tet_faces(t.verts) {
            *face_count.entry(sorted3(f)).or_insert(0) += 1;
        }
    }
    let boundary_tris = face_count
        .into_iter()
        .filter(|&(_, c)| c == 1)
        .map(|(f, _)| BoundaryTri { verts: f, tag: 1 })
        .collect();

    let mut region_names = BTreeMap::new();
    region_names.insert(1, "air".to_string());
    if inclusion.is_some() {
        region_names.insert(2, "steel".to_string());
    }
    Mesh::new(vertices, tets, boundary_tris, region_names)
}

/// Enumerate global edges and build the per-tet edge map.
pub fn build_edge_table(mesh: &Mesh) -> EdgeTable {
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &mesh.tets {
        for (a, b) in LOCAL_EDGES {
            let (lo, hi) = ord(t.verts[a], t.verts[b]);
            let next = index.len();
            index.entry((lo, hi)).or_insert(next);
        }
    }
    // Re-number edges lexicographically so the enumeration is canonical.
    let mut edges: Vec<(usize, usize)> = index.keys().copied().collect();
    edges.sort_unstable();
    for (i, e) in edges.iter().enumerate() {
        *index.get_mut(e).unwrap() = i;
    }
    let tet_to_edges = mesh
        .tets
        .iter()
        .map(|t| {
            let mut row = [(0usize, 0i8); 6];
            for (le, (a, b)) in LOCAL_EDGES.iter().enumerate() {
                let (va, vb) = (t.verts[*a], t.verts[*b]);
                let (lo, hi) = ord(va, vb);
                row[le] = (index[&(lo, hi)], if va < vb { 1 } else { -1 });
                debug_assert!(va != vb);
            }
            row
        })
        .collect();
    EdgeTable { edges, tet_to_edges }
}

fn ord(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Read a Gmsh MSH 2.2 ASCII file (element types 2 and 4, first tag =
/// physical tag). Unreferenced nodes are dropped, other element types skipped.
pub fn load_msh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_msh(&text)
}

pub fn parse_msh(text: &str) -> Result<Mesh, MeshError> {
    let lines: Vec<&str> = text.lines().collect();
    let perr = |line: usize, msg: &str| MeshError::Parse { line: line + 1, msg: msg.into() };

    let mut nodes: Vec<(u64, Vector3<f64>)> = Vec::new();
    let mut tris: Vec<([u64; 3], i32)> = Vec::new();
    let mut tets: Vec<([u64; 4], i32)> = Vec::new();
    let mut saw_format = false;

    let mut i = 0;
    while i < lines.len() {
        let line = lines[i].trim();
        match line {
            "$MeshFormat" => {
                let l = lines.get(i + 1).ok_or_else(|| perr(i, "truncated $MeshFormat"))?;
                let mut it = l.split_whitespace();
                let ver = it.next().unwrap_or("");
                let ftype = it.next().unwrap_or("");
                if ver != "2.2" || ftype != "0" {
                    return Err(perr(i + 1, &format!("unsupported MSH format '{}'", l.trim())));
                }
                saw_format = true;
                i += 2;
            }
            "$Nodes" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|l| l.trim().parse().ok())
                    .ok_or_else(|| perr(i + 1, "bad node count"))?;
                for k in 0..count {
                    let ln = i + 2 + k;
                    let l = lines.get(ln).ok_or_else(|| perr(ln, "truncated $Nodes"))?;
                    let mut it = l.split_whitespace();
                    let id: u64 = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| perr(ln, "bad node id"))?;
                    let mut xyz = [0.0f64; 3];
                    for x in &mut xyz {
                        *x = it
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| perr(ln, "bad node coordinate"))?;
                    }
                    nodes.push((id, Vector3::new(xyz[0], xyz[1], xyz[2])));
                }
                i += 2 + count;
            }
            "$Elements" => {
                let count: usize = lines
                    .get(i + 1)
                    .and_then(|l| l.trim().parse().ok())
                    .ok_or_else(|| perr(i + 1, "bad element count"))?;
                for k in 0..count {
                    let ln = i + 2 + k;
                    let l = lines.get(ln).ok_or_else(|| perr(ln, "truncated $Elements"))?;
                    let fields: Vec<&str> = l.split_whitespace().collect();
                    if fields.len() < 3 {
                        return Err(perr(ln, "short element record"));
                    }
                    let etype: u32 =
                        fields[1].parse().map_err(|_| perr(ln, "bad element type"))?;
                    let ntags: usize =
                        fields[2].parse().map_err(|_| perr(ln, "bad tag count"))?;
                    let tag: i32 = if ntags > 0 {
                        fields
                            .get(3)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| perr(ln, "bad physical tag"))?
                    } else {
                        0
                    };
                    let node_fields = &fields[3 + ntags..];
                    match etype {
                        2 => {
                            let v = parse_ids::<3>(node_fields).ok_or_else(|| {
                                perr(ln, "triangle needs 3 node ids")
                            })?;
                            tris.push((v, tag));
                        }
                        4 => {
                            let v = parse_ids::<4>(node_fields).ok_or_else(|| {
                                perr(ln, "tetrahedron needs 4 node ids")
                            })?;
                            tets.push((v, tag));
                        }
                        _ => {} // points, lines etc. are not part of the subset
                    }
                }
                i += 2 + count;
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                // skip unknown section until matching $End...
                let end = format!("$End{}", &s[1..]);
                let mut j = i + 1;
                while j < lines.len() && lines[j].trim() != end {
                    j += 1;
                }
                i = j + 1;
            }
            _ => i += 1,
        }
    }

    if !saw_format {
        return Err(MeshError::Parse { line: 0, msg: "missing $MeshFormat section".into() });
    }
    if tets.is_empty() {
        return Err(MeshError::Empty("no tetrahedra in file".into()));
    }

    // Remap node ids to a dense index space, dropping unreferenced nodes.
    let mut used: BTreeMap<u64, usize> = BTreeMap::new();
    for (v, _) in &tets {
        for id in v {
            let next = used.len();
            used.entry(*id).or_insert(next);
        }
    }
    let mut coords: BTreeMap<u64, Vector3<f64>> = BTreeMap::new();
    for (id, x) in nodes {
        coords.insert(id, x);
    }
    let mut vertices = vec![Vector3::zeros(); used.len()];
    for (id, &idx) in &used {
        let x = coords.get(id).ok_or_else(|| {
            MeshError::Topology(format!("element references missing node {id}"))
        })?;
        vertices[idx] = *x;
    }
    let lookup = |id: u64| -> Result<usize, MeshError> {
        used.get(&id).copied().ok_or_else(|| {
            MeshError::Topology(format!(
                "boundary triangle references node {id} not used by any tet"
            ))
        })
    };
    let mesh_tets = tets
        .iter()
        .map(|(v, tag)| {
            Ok(Tet {
                verts: [lookup(v[0])?, lookup(v[1])?, lookup(v[2])?, lookup(v[3])?],
                region: *tag,
            })
        })
        .collect::<Result<Vec<_>, MeshError>>()?;
    let mesh_tris = tris
        .iter()
        .map(|(v, tag)| {
            // A boundary node missing from the coordinate list is a topology
            // error even if it never appears in a tet.
            for id in v {
                if !coords.contains_key(id) {
                    return Err(MeshError::Topology(format!(
                        "boundary triangle references missing node {id}"
                    )));
                }
            }
            Ok(BoundaryTri { verts: [lookup(v[0])?, lookup(v[1])?, lookup(v[2])?], tag: *tag })
        })
        .collect::<Result<Vec<_>, MeshError>>()?;

    Mesh::new(vertices, mesh_tets, mesh_tris, BTreeMap::new())
}

fn parse_ids<const N: usize>(fields: &[&str]) -> Option<[u64; N]> {
    if fields.len() != N {
        return None;
    }
    let mut out = [0u64; N];
    for (o, s) in out.iter_mut().zip(fields) {
        *o = s.parse().ok()?;
    }
    Some(out)
}

/// Write the mesh in the same MSH 2.2 ASCII subset the reader accepts.
pub fn write_msh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    std::fs::write(path, format_msh(mesh))?;
    Ok(())
}

pub fn format_msh(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", mesh.vertices.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(s, "{} {:.17e} {:.17e} {:.17e}", i + 1, v.x, v.y, v.z);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(s, "{}", mesh.boundary_tris.len() + mesh.tets.len());
    let mut eid = 1;
    for bt in &mesh.boundary_tris {
        let _ = writeln!(
            s,
            "{eid} 2 2 {} {} {} {} {}",
            bt.tag,
            bt.tag,
            bt.verts[0] + 1,
            bt.verts[1] + 1,
            bt.verts[2] + 1
        );
        eid += 1;
    }
    for t in &mesh.tets {
        let _ = writeln!(
            s,
            "{eid} 4 2 {} {} {} {} {} {}",
            t.region,
            t.region,
            t.verts[0] + 1,
            t.verts[1] + 1,
            t.verts[2] + 1,
            t.verts[3] + 1
        );
        eid += 1;
    }
    s.push_str("$EndElements\n");
    s
}
