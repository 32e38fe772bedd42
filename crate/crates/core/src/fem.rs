//! P1 nodal and lowest-order Nédélec spaces on tetrahedral meshes.
//!
//! Edge degrees of freedom are line integrals `∫_e ξ·τ ds` along the global direction
//! low → high vertex index. All local matrices are closed-form for affine elements.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{add, cross, dot, scale, Vec3};
use crate::mesh::{Mesh, LOCAL_EDGES};
use crate::numerics::TripletBuilder;
use crate::SparseMatrix;

/// One 3-vector per mesh vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalVectorField {
    pub values: Vec<Vec3>,
}

impl NodalVectorField {
    pub fn zeros(n: usize) -> Self {
        Self { values: vec![[0.0; 3]; n] }
    }

    pub fn constant(n: usize, c: Vec3) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Component-major copy: `out[c][z] = values[z][c]`.
    pub fn components(&self) -> [Vec<f64>; 3] {
        [0, 1, 2].map(|c| self.values.iter().map(|v| v[c]).collect())
    }

    /// Interleaved layout `3z + c`.
    pub fn flat(&self) -> Vec<f64> {
        self.values.iter().flat_map(|v| *v).collect()
    }
}

/// One coefficient per global mesh edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeField {
    pub coeffs: Vec<f64>,
}

impl EdgeField {
    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![0.0; n] }
    }
}

/// One value per boundary vertex, in `Mesh::boundary_vertices` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNodalField {
    pub values: Vec<f64>,
}

pub fn interpolate_nodal(f: impl Fn(Vec3) -> Vec3, mesh: &Mesh) -> Result<NodalVectorField> {
    let mut values = Vec::with_capacity(mesh.num_vertices());
    for (z, &x) in mesh.vertices().iter().enumerate() {
        let v = f(x);
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite { node: z });
        }
        values.push(v);
    }
    Ok(NodalVectorField { values })
}

/// Edge integrals by two-point Gauss–Legendre along each edge.
pub fn interpolate_edge(f: impl Fn(Vec3) -> Vec3, mesh: &Mesh) -> EdgeField {
    let g = 0.5 / 3f64.sqrt();
    let x = mesh.vertices();
    let coeffs = mesh
        .edges()
        .iter()
        .map(|&[a, b]| {
            let t = crate::geometry::sub(x[b], x[a]);
            [0.5 - g, 0.5 + g]
                .iter()
                .map(|&s| 0.5 * dot(f(crate::geometry::lerp(x[a], x[b], s)), t))
                .sum()
        })
        .collect();
    EdgeField { coeffs }
}

/// Scalar P1 nodal values of `f`.
pub fn interpolate_scalar(f: impl Fn(Vec3) -> f64, mesh: &Mesh) -> Vec<f64> {
    mesh.vertices().iter().map(|&x| f(x)).collect()
}

/// Edge coefficients of the gradient of a P1 function: `u_b − u_a`.
pub fn discrete_gradient(u: &[f64], mesh: &Mesh) -> EdgeField {
    EdgeField { coeffs: mesh.edges().iter().map(|&[a, b]| u[b] - u[a]).collect() }
}

#[derive(Debug, Clone)]
pub struct FemMatrices {
    /// Scalar P1 mass; applied componentwise to vector fields.
    pub m_p1: SparseMatrix,
    /// Scalar P1 stiffness; applied componentwise to vector fields.
    pub k_p1: SparseMatrix,
    pub m_nd: SparseMatrix,
    pub c_nd: SparseMatrix,
    /// `⟨φ_z e_c, N_e⟩` with row `3z + c`.
    pub x_mix: SparseMatrix,
}

struct LocalMatrices {
    mass: [[f64; 4]; 4],
    stiff: [[f64; 4]; 4],
    nd_mass: [[f64; 6]; 6],
    curl: [[f64; 6]; 6],
    mix: [[Vec3; 6]; 4],
}

#[inline]
fn p1_mass(vol: f64, i: usize, j: usize) -> f64 {
    if i == j {
        vol / 10.0
    } else {
        vol / 20.0
    }
}

/// Curls of the six unsigned Whitney functions of one tet.
pub(crate) fn whitney_curls(grads: &[Vec3; 4]) -> [Vec3; 6] {
    LOCAL_EDGES.map(|(a, b)| scale(2.0, cross(grads[a], grads[b])))
}

fn local_matrices(mesh: &Mesh, t: usize) -> LocalMatrices {
    let (g, vol) = mesh.barycentric_gradients(t);
    let signs = mesh.tet_edges()[t].map(|(_, s)| s);
    let mut gg = [[0.0; 4]; 4];
    let mut mass = [[0.0; 4]; 4];
    let mut stiff = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gg[i][j] = dot(g[i], g[j]);
            mass[i][j] = p1_mass(vol, i, j);
            stiff[i][j] = vol * gg[i][j];
        }
    }
    let curls = whitney_curls(&g);
    let mut nd_mass = [[0.0; 6]; 6];
    let mut curl = [[0.0; 6]; 6];
    for (p, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
        for (q, &(c, d)) in LOCAL_EDGES.iter().enumerate() {
            let m = mass[a][c] * gg[b][d] - mass[a][d] * gg[b][c] - mass[b][c] * gg[a][d] + mass[b][d] * gg[a][c];
            nd_mass[p][q] = signs[p] * signs[q] * m;
            curl[p][q] = signs[p] * signs[q] * vol * dot(curls[p], curls[q]);
        }
    }
    let mut mix = [[[0.0; 3]; 6]; 4];
    for z in 0..4 {
        for (p, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
            let v = add(scale(mass[z][a], g[b]), scale(-mass[z][b], g[a]));
            mix[z][p] = scale(signs[p], v);
        }
    }
    LocalMatrices { mass, stiff, nd_mass, curl, mix }
}

pub fn assemble_fem_matrices(mesh: &Mesh) -> Result<FemMatrices> {
    crate::mesh::entity_geometry(mesh)?;
    let locals: Vec<LocalMatrices> = (0..mesh.num_tets()).into_par_iter().map(|t| local_matrices(mesh, t)).collect();
    let nv = mesh.num_vertices();
    let ne = mesh.num_edges();
    let nt = mesh.num_tets();
    let mut m = TripletBuilder::with_capacity(nv, nv, 16 * nt);
    let mut k = TripletBuilder::with_capacity(nv, nv, 16 * nt);
    let mut mn = TripletBuilder::with_capacity(ne, ne, 36 * nt);
    let mut cn = TripletBuilder::with_capacity(ne, ne, 36 * nt);
    let mut xm = TripletBuilder::with_capacity(3 * nv, ne, 72 * nt);
    for (t, loc) in locals.iter().enumerate() {
        let verts = mesh.tets()[t];
        let edges = mesh.tet_edges()[t].map(|(e, _)| e);
        for i in 0..4 {
            for j in 0..4 {
                m.push(verts[i], verts[j], loc.mass[i][j]);
                k.push(verts[i], verts[j], loc.stiff[i][j]);
            }
        }
        for p in 0..6 {
            for q in 0..6 {
                mn.push(edges[p], edges[q], loc.nd_mass[p][q]);
                cn.push(edges[p], edges[q], loc.curl[p][q]);
            }
        }
        for z in 0..4 {
            for p in 0..6 {
                for c in 0..3 {
                    xm.push(3 * verts[z] + c, edges[p], loc.mix[z][p][c]);
                }
            }
        }
    }
    Ok(FemMatrices { m_p1: m.build(), k_p1: k.build(), m_nd: mn.build(), c_nd: cn.build(), x_mix: xm.build() })
}

/// `Σ_c u_cᵀ A w_c` for a scalar matrix applied to each vector component.
pub fn vector_form(a: &SparseMatrix, u: &NodalVectorField, w: &NodalVectorField) -> f64 {
    let uc = u.components();
    let wc = w.components();
    (0..3).map(|c| crate::scalar::dot(&uc[c], &a.mul_vec(&wc[c]))).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    pub grad_m_l2: f64,
    pub h_l2: f64,
    pub curl_h_l2: f64,
}

pub fn evaluate_energies(m: &NodalVectorField, h: &EdgeField, mats: &FemMatrices) -> Energies {
    let sq = |x: f64| x.max(0.0).sqrt();
    Energies {
        grad_m_l2: sq(vector_form(&mats.k_p1, m, m)),
        h_l2: sq(mats.m_nd.quadratic_form(&h.coeffs)),
        curl_h_l2: sq(mats.c_nd.quadratic_form(&h.coeffs)),
    }
}

/// Value of an edge field at barycentric point `bary` of tet `t`.
pub fn evaluate_edge_field(h: &EdgeField, mesh: &Mesh, t: usize, bary: [f64; 4]) -> Vec3 {
    let (g, _) = mesh.barycentric_gradients(t);
    let mut out = [0.0; 3];
    for (p, &(a, b)) in LOCAL_EDGES.iter().enumerate() {
        let (e, s) = mesh.tet_edges()[t][p];
        let n = add(scale(bary[a], g[b]), scale(-bary[b], g[a]));
        out = add(out, scale(s * h.coeffs[e], n));
    }
    out
}

/// Constant curl of an edge field on every tet.
pub fn elementwise_curl(h: &EdgeField, mesh: &Mesh) -> Vec<Vec3> {
    (0..mesh.num_tets())
        .map(|t| {
            let (g, _) = mesh.barycentric_gradients(t);
            let curls = whitney_curls(&g);
            let mut out = [0.0; 3];
            for (p, c) in curls.iter().enumerate() {
                let (e, s) = mesh.tet_edges()[t][p];
                out = add(out, scale(s * h.coeffs[e], *c));
            }
            out
        })
        .collect()
}

/// Volume-weighted average of the tet-wise vertex values of an edge field.
pub fn nodal_average(h: &EdgeField, mesh: &Mesh) -> Vec<Vec3> {
    let mut sum = vec![[0.0; 3]; mesh.num_vertices()];
    let mut weight = vec![0.0; mesh.num_vertices()];
    for t in 0..mesh.num_tets() {
        let (_, vol) = mesh.barycentric_gradients(t);
        for i in 0..4 {
            let mut bary = [0.0; 4];
            bary[i] = 1.0;
            let v = evaluate_edge_field(h, mesh, t, bary);
            let z = mesh.tets()[t][i];
            sum[z] = add(sum[z], scale(vol, v));
            weight[z] += vol;
        }
    }
    sum.iter().zip(&weight).map(|(&s, &w)| scale(1.0 / w, s)).collect()
}
