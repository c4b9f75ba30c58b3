//! Tree-cotree gauging of the edge element space.
//!
//! Fixing the DOFs on a spanning tree of the vertex-edge graph removes
//! exactly the gradient kernel of the curl operator: a gradient field whose
//! line integrals vanish on every tree edge comes from a constant potential.
//! The remaining (cotree) edges carry #edges - #vertices + 1 free DOFs.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::mesh::{EdgeTable, Mesh};

use super::FormulationError;

/// Result of tree-cotree gauging: which edges are fixed and the packed
/// numbering of the free (cotree) DOFs.
#[derive(Debug, Clone)]
pub struct Gauge {
    pub tree_edge: Vec<bool>,
    pub free_edges: Vec<usize>,
    /// edge index -> free DOF index, `usize::MAX` for tree edges.
    pub edge_to_free: Vec<usize>,
}

impl Gauge {
    pub fn num_free(&self) -> usize {
        self.free_edges.len()
    }
}

/// Breadth-first spanning tree from vertex 0.
pub fn tree_cotree(mesh: &Mesh, edges: &EdgeTable) -> Result<Gauge, FormulationError> {
    let nv = mesh.num_vertices();
    let ne = edges.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv]; // vertex -> (other, edge)
    for (e, &(a, b)) in edges.edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut visited = vec![false; nv];
    let mut tree_edge = vec![false; ne];
    let mut queue = VecDeque::new();
    visited[0] = true;
    queue.push_back(0usize);
    let mut reached = 1usize;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                tree_edge[e] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    if reached != nv {
        let missing = visited.iter().position(|&v| !v).unwrap();
        return Err(FormulationError::Disconnected(missing));
    }
    let mut free_edges = Vec::with_capacity(ne - (nv - 1));
    let mut edge_to_free = vec![usize::MAX; ne];
    for e in 0..ne {
        if !tree_edge[e] {
            edge_to_free[e] = free_edges.len();
            free_edges.push(e);
        }
    }
    debug_assert_eq!(free_edges.len(), ne - nv + 1);
    Ok(Gauge { tree_edge, free_edges, edge_to_free })
}

/// Tree-cotree gauge for the essential boundary condition a x n = 0.
///
/// All boundary-face edges are fixed (they carry the essential condition),
/// and on top of them a spanning tree removes the remaining gradient kernel.
/// The tree is grown boundary-first: its restriction to the boundary spans
/// the boundary vertices through boundary edges, so fixing
/// (tree or boundary) leaves exactly #interior-edges - #interior-vertices
/// free DOFs — the dimension of curl(W_0 gauged) — without over-constraining.
pub fn tree_cotree_h0(mesh: &Mesh, edges: &EdgeTable) -> Result<Gauge, FormulationError> {
    let nv = mesh.num_vertices();
    let ne = edges.len();
    let mut pair_to_edge: HashMap<(usize, usize), usize> = HashMap::with_capacity(ne);
    for (e, &(a, b)) in edges.edges.iter().enumerate() {
        pair_to_edge.insert((a, b), e);
    }
    let mut boundary_edge = vec![false; ne];
    for tri in &mesh.boundary_tris {
        let v = tri.verts;
        for (a, b) in [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])] {
            let key = (a.min(b), a.max(b));
            let e = pair_to_edge[&key];
            boundary_edge[e] = true;
        }
    }

    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (e, &(a, b)) in edges.edges.iter().enumerate() {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }

    let mut visited = vec![false; nv];
    let mut tree_edge = vec![false; ne];
    let mut queue = VecDeque::new();
    let mut reached = 0usize;

    // phase 1: span the boundary vertices through boundary edges only
    let boundary_vertices: HashSet<usize> = mesh
        .boundary_tris
        .iter()
        .flat_map(|tri| tri.verts.into_iter())
        .collect();
    if let Some(&seed) = boundary_vertices.iter().min() {
        visited[seed] = true;
        reached += 1;
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[v] {
                if boundary_edge[e] && !visited[w] {
                    visited[w] = true;
                    tree_edge[e] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
    }

    // phase 2: extend into the interior over all edges
    let start = visited.iter().position(|&v| v).unwrap_or(0);
    if !visited[start] {
        visited[start] = true;
        reached += 1;
    }
    queue.extend((0..nv).filter(|&v| visited[v]));
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                tree_edge[e] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    if reached != nv {
        let missing = visited.iter().position(|&v| !v).unwrap();
        return Err(FormulationError::Disconnected(missing));
    }

    let mut free_edges = Vec::new();
    let mut edge_to_free = vec![usize::MAX; ne];
    for e in 0..ne {
        if !tree_edge[e] && !boundary_edge[e] {
            edge_to_free[e] = free_edges.len();
            free_edges.push(e);
        }
        if boundary_edge[e] {
            // boundary edges count as fixed regardless of tree membership
            tree_edge[e] = true;
        }
    }
    Ok(Gauge { tree_edge, free_edges, edge_to_free })
}
