//! Tetrahedral volume meshes of the unit cube and their boundary surfaces.
//!
//! Edges are stored as sorted vertex pairs `(a, b)` with `a < b`; the global edge
//! direction is always low index → high index, and every tet records for each of its
//! six local edges whether the local direction agrees with it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{self, cross, det3, dot, norm, scale, sub, Vec3};

/// Local vertex pairs of the six tetrahedron edges.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFace {
    /// Vertex indices ordered counter-clockwise seen from outside.
    pub vertices: [usize; 3],
    pub normal: Vec3,
    pub tet: usize,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    tets: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    tet_edges: Vec<[(usize, f64); 6]>,
    boundary_faces: Vec<BoundaryFace>,
    boundary_vertices: Vec<usize>,
    boundary_vertex_slot: Vec<Option<usize>>,
    boundary_edges: Vec<usize>,
    is_boundary_edge: Vec<bool>,
    mesh_size_h: f64,
}

fn tet_volume6(x: &[Vec3], t: &[usize; 4]) -> f64 {
    det3(sub(x[t[1]], x[t[0]]), sub(x[t[2]], x[t[0]]), sub(x[t[3]], x[t[0]]))
}

impl Mesh {
    /// Builds all incidence information from raw vertices and tets.
    ///
    /// Negatively oriented tets are reoriented; zero-volume tets are rejected.
    pub fn from_tets(vertices: Vec<Vec3>, mut tets: Vec<[usize; 4]>) -> Result<Self> {
        let nv = vertices.len();
        let mut scale_ref = 0.0f64;
        for t in &tets {
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidArgument("tet references a missing vertex".into()));
            }
            for &(a, b) in &LOCAL_EDGES {
                scale_ref = scale_ref.max(norm(sub(vertices[t[a]], vertices[t[b]])));
            }
        }
        for (ti, t) in tets.iter_mut().enumerate() {
            let v6 = tet_volume6(&vertices, t);
            if !(v6.abs() > 1e-12 * scale_ref.powi(3)) {
                return Err(Error::MeshQuality { tet: ti, volume: v6 / 6.0 });
            }
            if v6 < 0.0 {
                t.swap(2, 3);
            }
        }

        let mut edge_keys: Vec<[usize; 2]> = tets
            .iter()
            .flat_map(|t| LOCAL_EDGES.iter().map(move |&(a, b)| {
                let (u, v) = (t[a], t[b]);
                [u.min(v), u.max(v)]
            }))
            .collect();
        edge_keys.sort_unstable();
        edge_keys.dedup();
        let edge_index: HashMap<[usize; 2], usize> =
            edge_keys.iter().enumerate().map(|(i, &e)| (e, i)).collect();

        let tet_edges = tets
            .iter()
            .map(|t| {
                let mut out = [(0usize, 0.0f64); 6];
                for (k, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
                    let (u, v) = (t[a], t[b]);
                    let sign = if u < v { 1.0 } else { -1.0 };
                    out[k] = (edge_index[&[u.min(v), u.max(v)]], sign);
                }
                out
            })
            .collect();

        let mut face_count: HashMap<[usize; 3], u32> = HashMap::new();
        for t in &tets {
            for omit in 0..4 {
                let mut f = [0; 3];
                let mut k = 0;
                for (i, &v) in t.iter().enumerate() {
                    if i != omit {
                        f[k] = v;
                        k += 1;
                    }
                }
                f.sort_unstable();
                *face_count.entry(f).or_insert(0) += 1;
            }
        }
        let mut boundary_faces = Vec::new();
        for (ti, t) in tets.iter().enumerate() {
            for omit in 0..4 {
                let others: Vec<usize> = (0..4).filter(|&i| i != omit).map(|i| t[i]).collect();
                let mut key = [others[0], others[1], others[2]];
                key.sort_unstable();
                if face_count[&key] != 1 {
                    continue;
                }
                let mut f = [others[0], others[1], others[2]];
                let x = |i: usize| vertices[i];
                let mut n = cross(sub(x(f[1]), x(f[0])), sub(x(f[2]), x(f[0])));
                if dot(n, sub(x(f[0]), x(t[omit]))) < 0.0 {
                    f.swap(1, 2);
                    n = scale(-1.0, n);
                }
                boundary_faces.push(BoundaryFace { vertices: f, normal: geometry::normalize(n), tet: ti });
            }
        }

        let mut boundary_vertices: Vec<usize> =
            boundary_faces.iter().flat_map(|f| f.vertices).collect();
        boundary_vertices.sort_unstable();
        boundary_vertices.dedup();
        let mut boundary_vertex_slot = vec![None; nv];
        for (k, &v) in boundary_vertices.iter().enumerate() {
            boundary_vertex_slot[v] = Some(k);
        }

        let mut is_boundary_edge = vec![false; edge_keys.len()];
        for f in &boundary_faces {
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                let (u, v) = (f.vertices[a], f.vertices[b]);
                is_boundary_edge[edge_index[&[u.min(v), u.max(v)]]] = true;
            }
        }
        let boundary_edges = (0..edge_keys.len()).filter(|&e| is_boundary_edge[e]).collect();

        let mesh_size_h = tets
            .iter()
            .flat_map(|t| LOCAL_EDGES.iter().map(move |&(a, b)| (t[a], t[b])))
            .map(|(a, b)| norm(sub(vertices[a], vertices[b])))
            .fold(0.0, f64::max);

        Ok(Self {
            vertices,
            tets,
            edges: edge_keys,
            tet_edges,
            boundary_faces,
            boundary_vertices,
            boundary_vertex_slot,
            boundary_edges,
            is_boundary_edge,
            mesh_size_h,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Per tet, the global edge index and orientation sign of each local edge in [`LOCAL_EDGES`] order.
    pub fn tet_edges(&self) -> &[[(usize, f64); 6]] {
        &self.tet_edges
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    /// Sorted volume-vertex indices lying on the boundary.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    /// Position of a volume vertex in [`boundary_vertices`](Self::boundary_vertices).
    pub fn boundary_slot(&self, vertex: usize) -> Option<usize> {
        self.boundary_vertex_slot[vertex]
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.is_boundary_edge[e]
    }

    pub fn mesh_size_h(&self) -> f64 {
        self.mesh_size_h
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    /// Interior faces plus boundary faces.
    pub fn num_faces(&self) -> usize {
        (4 * self.tets.len() + self.boundary_faces.len()) / 2
    }

    pub fn tet_vertices(&self, t: usize) -> [Vec3; 4] {
        self.tets[t].map(|v| self.vertices[v])
    }

    /// Gradients of the four barycentric coordinates on tet `t`, and its volume.
    pub fn barycentric_gradients(&self, t: usize) -> ([Vec3; 4], f64) {
        let [x0, x1, x2, x3] = self.tet_vertices(t);
        let (a, b, c) = (sub(x1, x0), sub(x2, x0), sub(x3, x0));
        let det = det3(a, b, c);
        // rows of the inverse Jacobian
        let g1 = scale(1.0 / det, cross(b, c));
        let g2 = scale(1.0 / det, cross(c, a));
        let g3 = scale(1.0 / det, cross(a, b));
        let g0 = scale(-1.0, geometry::add(geometry::add(g1, g2), g3));
        ([g0, g1, g2, g3], det / 6.0)
    }

    /// Barycentric coordinates of `p` with respect to tet `t`.
    pub fn barycentric(&self, t: usize, p: Vec3) -> [f64; 4] {
        let (g, _) = self.barycentric_gradients(t);
        let x0 = self.vertices[self.tets[t][0]];
        let d = sub(p, x0);
        let l1 = dot(g[1], d);
        let l2 = dot(g[2], d);
        let l3 = dot(g[3], d);
        [1.0 - l1 - l2 - l3, l1, l2, l3]
    }

    /// First tet containing `p` (within a small tolerance), with barycentric coordinates.
    pub fn locate(&self, p: Vec3) -> Option<(usize, [f64; 4])> {
        (0..self.tets.len())
            .map(|t| (t, self.barycentric(t, p)))
            .find(|(_, l)| l.iter().all(|&v| v >= -1e-10))
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.binary_search(&key).ok()
    }
}

/// Freudenthal (Kuhn) subdivision of `[0,1]³` into `6 n³` tets.
pub fn build_cube_mesh(n_per_axis: usize) -> Result<Mesh> {
    let n = n_per_axis;
    if n == 0 {
        return Err(Error::InvalidArgument("n_per_axis must be >= 1".into()));
    }
    let np = n + 1;
    let idx = |i: usize, j: usize, k: usize| i + np * (j + np * k);
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                vertices.push([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for p in &PERMS {
                    let mut c = [i, j, k];
                    let mut t = [idx(c[0], c[1], c[2]); 4];
                    for (s, &axis) in p.iter().enumerate() {
                        c[axis] += 1;
                        t[s + 1] = idx(c[0], c[1], c[2]);
                    }
                    tets.push(t);
                }
            }
        }
    }
    Mesh::from_tets(vertices, tets)
}

#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
    parent_vertex_map: Vec<usize>,
}

impl SurfaceMesh {
    /// Triangles must be ordered counter-clockwise seen from outside.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, parent_vertex_map: Vec<usize>) -> Result<Self> {
        if parent_vertex_map.len() != vertices.len() {
            return Err(Error::DimensionMismatch { expected: vertices.len(), found: parent_vertex_map.len() });
        }
        let mut normals = Vec::with_capacity(triangles.len());
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Topology(format!("triangle {i} references a missing vertex")));
            }
            let n = cross(sub(vertices[t[1]], vertices[t[0]]), sub(vertices[t[2]], vertices[t[0]]));
            if norm(n) == 0.0 {
                return Err(Error::Topology(format!("triangle {i} is degenerate")));
            }
            normals.push(geometry::normalize(n));
        }
        Ok(Self { vertices, triangles, normals, parent_vertex_map })
    }

    /// Geodesic sphere of radius 1: the icosahedron refined `level` times (20·4^level faces).
    pub fn icosphere(level: usize) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
            [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
            [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
        ]
        .iter()
        .map(|&v| geometry::normalize(v))
        .collect();
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..level {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut midpoint = |a: usize, b: usize, vs: &mut Vec<Vec3>| -> usize {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    vs.push(geometry::normalize(scale(0.5, geometry::add(vs[a], vs[b]))));
                    vs.len() - 1
                })
            };
            let mut next = Vec::with_capacity(tris.len() * 4);
            for &[a, b, c] in &tris {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            tris = next;
        }
        let parent = (0..vertices.len()).collect();
        Self::new(vertices, tris, parent).expect("icosphere is well formed")
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn parent_vertex_map(&self) -> &[usize] {
        &self.parent_vertex_map
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        0.5 * norm(cross(sub(b, a), sub(c, a)))
    }

    pub fn centroid(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle_vertices(t);
        scale(1.0 / 3.0, geometry::add(geometry::add(a, b), c))
    }

    /// Every edge must be shared by exactly two triangles traversing it in opposite directions.
    pub fn validate_closed(&self) -> Result<()> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::Topology(format!("edge ({a},{b}) traversed {count} times in one direction")));
            }
            if directed.get(&(b, a)) != Some(&1) {
                return Err(Error::Topology(format!("edge ({a},{b}) is not shared by two consistently oriented triangles")));
            }
        }
        Ok(())
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        e.sort_unstable();
        e.dedup();
        e.len()
    }
}

/// Boundary triangulation of a volume mesh; surface vertex `k` is volume vertex
/// `mesh.boundary_vertices()[k]`.
pub fn extract_boundary(mesh: &Mesh) -> SurfaceMesh {
    let parent = mesh.boundary_vertices().to_vec();
    let vertices = parent.iter().map(|&v| mesh.vertices()[v]).collect();
    let triangles = mesh
        .boundary_faces()
        .iter()
        .map(|f| f.vertices.map(|v| mesh.boundary_slot(v).expect("boundary vertex")))
        .collect();
    SurfaceMesh::new(vertices, triangles, parent).expect("boundary faces are non-degenerate")
}

#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub tet_volumes: Vec<f64>,
    /// `x_b − x_a` for edge `(a, b)`.
    pub edge_tangents: Vec<Vec3>,
    pub edge_lengths: Vec<f64>,
    pub face_areas: Vec<f64>,
    pub face_normals: Vec<Vec3>,
}

pub fn entity_geometry(mesh: &Mesh) -> Result<MeshGeometry> {
    let x = mesh.vertices();
    let mut tet_volumes = Vec::with_capacity(mesh.num_tets());
    for (ti, t) in mesh.tets().iter().enumerate() {
        let v = tet_volume6(x, t) / 6.0;
        if !(v > 0.0) {
            return Err(Error::MeshQuality { tet: ti, volume: v });
        }
        tet_volumes.push(v);
    }
    let edge_tangents: Vec<Vec3> = mesh.edges().iter().map(|&[a, b]| sub(x[b], x[a])).collect();
    let edge_lengths = edge_tangents.iter().map(|&t| norm(t)).collect();
    let face_areas = mesh
        .boundary_faces()
        .iter()
        .map(|f| 0.5 * norm(cross(sub(x[f.vertices[1]], x[f.vertices[0]]), sub(x[f.vertices[2]], x[f.vertices[0]]))))
        .collect();
    let face_normals = mesh.boundary_faces().iter().map(|f| f.normal).collect();
    Ok(MeshGeometry { tet_volumes, edge_tangents, edge_lengths, face_areas, face_normals })
}
