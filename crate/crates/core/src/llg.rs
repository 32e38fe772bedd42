//! Tangent-plane step for the magnetization.
//!
//! The velocity lives in the nodewise tangent space of `m`; it is parametrized by two
//! coefficients per node, `v(z) = a_z t₁(z) + b_z t₂(z)`, with unknown index `2z + j`.

use crate::error::{Error, Result};
use crate::fem::{EdgeField, FemMatrices, NodalVectorField};
use crate::geometry::{add, cross, dot, norm, scale, sub, Vec3};
use crate::mesh::Mesh;
use crate::numerics::{block_diagonal_preconditioner, gmres_solve, SolverConfig, TripletBuilder};
use crate::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    pub t1: Vec<Vec3>,
    pub t2: Vec<Vec3>,
}

impl TangentFrame {
    pub fn len(&self) -> usize {
        self.t1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t1.is_empty()
    }

    #[inline]
    pub fn vector(&self, z: usize, j: usize) -> Vec3 {
        if j == 0 {
            self.t1[z]
        } else {
            self.t2[z]
        }
    }

    /// Nodal field from reduced coefficients.
    pub fn expand(&self, coeffs: &[f64]) -> NodalVectorField {
        let values = (0..self.len())
            .map(|z| add(scale(coeffs[2 * z], self.t1[z]), scale(coeffs[2 * z + 1], self.t2[z])))
            .collect();
        NodalVectorField { values }
    }

    /// Reduced coefficients of the nodewise tangential projection of `v`.
    pub fn project(&self, v: &NodalVectorField) -> Vec<f64> {
        (0..self.len()).flat_map(|z| [dot(v.values[z], self.t1[z]), dot(v.values[z], self.t2[z])]).collect()
    }
}

/// Orthonormal basis of `m(z)⊥` at every node, pivoting on the axis where `|m|` is smallest.
pub fn build_tangent_frame(m: &NodalVectorField) -> Result<TangentFrame> {
    let mut t1 = Vec::with_capacity(m.len());
    let mut t2 = Vec::with_capacity(m.len());
    for (z, &mz) in m.values.iter().enumerate() {
        let len = norm(mz);
        if !(len >= 1e-8) {
            return Err(Error::DegenerateMagnetization { node: z, norm: len });
        }
        let mh = scale(1.0 / len, mz);
        let mut axis = 0;
        for c in 1..3 {
            if mh[c].abs() < mh[axis].abs() {
                axis = c;
            }
        }
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let a = crate::geometry::normalize(sub(e, scale(mh[axis], mh)));
        t1.push(a);
        t2.push(cross(mh, a));
    }
    Ok(TangentFrame { t1, t2 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlgStepParams {
    pub alpha: f64,
    pub ce: f64,
    pub theta: f64,
    pub k: f64,
    pub solver: SolverConfig,
}

impl LlgStepParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.ce > 0.0 && self.k > 0.0) {
            return Err(Error::InvalidArgument("alpha, Ce and k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidArgument(format!("theta = {} not in [0, 1]", self.theta)));
        }
        self.solver.validate()
    }
}

/// `∫ λ_a λ_b λ_c` over a tet of volume `vol`.
#[inline]
fn triple(vol: f64, a: usize, b: usize, c: usize) -> f64 {
    match (a == b, b == c, a == c) {
        (true, true, _) => vol / 20.0,
        (false, false, false) => vol / 120.0,
        _ => vol / 60.0,
    }
}

/// Reduced system matrix and right-hand side of the tangent-plane step.
pub fn assemble_llg_system(
    mesh: &Mesh,
    m: &NodalVectorField,
    h: &EdgeField,
    frame: &TangentFrame,
    mats: &FemMatrices,
    params: &LlgStepParams,
) -> Result<(SparseMatrix, Vec<f64>)> {
    params.validate()?;
    let nv = mesh.num_vertices();
    if m.len() != nv || frame.len() != nv {
        return Err(Error::DimensionMismatch { expected: nv, found: m.len().min(frame.len()) });
    }
    if h.coeffs.len() != mesh.num_edges() {
        return Err(Error::DimensionMismatch { expected: mesh.num_edges(), found: h.coeffs.len() });
    }
    let stiff_w = params.ce * params.theta * params.k;
    let mut b = TripletBuilder::with_capacity(2 * nv, 2 * nv, 64 * mesh.num_tets());
    for t in 0..mesh.num_tets() {
        let verts = mesh.tets()[t];
        let (g, vol) = mesh.barycentric_gradients(t);
        for zl in 0..4 {
            let z = verts[zl];
            for wl in 0..4 {
                let w = verts[wl];
                let mass = if zl == wl { vol / 10.0 } else { vol / 20.0 };
                let scalar = params.alpha * mass + stiff_w * vol * dot(g[zl], g[wl]);
                // ∫ m × φ_w t_j(w) · φ_z t_i(z) with m interpolated nodally
                let mut mw = [0.0; 3];
                for (yl, &y) in verts.iter().enumerate() {
                    mw = add(mw, scale(triple(vol, yl, zl, wl), m.values[y]));
                }
                for i in 0..2 {
                    let ti = frame.vector(z, i);
                    for j in 0..2 {
                        let tj = frame.vector(w, j);
                        let val = scalar * dot(tj, ti) + dot(cross(mw, tj), ti);
                        b.push(2 * z + i, 2 * w + j, val);
                    }
                }
            }
        }
    }
    let a = b.build();

    let comps = m.components();
    let km: Vec<Vec<f64>> = comps.iter().map(|c| mats.k_p1.mul_vec(c)).collect();
    let xh = mats.x_mix.mul_vec(&h.coeffs);
    let mut rhs = vec![0.0; 2 * nv];
    for z in 0..nv {
        let grad = [km[0][z], km[1][z], km[2][z]];
        let field = [xh[3 * z], xh[3 * z + 1], xh[3 * z + 2]];
        for i in 0..2 {
            let ti = frame.vector(z, i);
            rhs[2 * z + i] = -params.ce * dot(grad, ti) + dot(field, ti);
        }
    }
    Ok((a, rhs))
}

#[derive(Debug, Clone)]
pub struct LlgOutcome {
    pub v: NodalVectorField,
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves for the tangential velocity with GMRES and per-node 2×2 block preconditioning.
pub fn solve_llg_step(
    mesh: &Mesh,
    m: &NodalVectorField,
    h: &EdgeField,
    frame: &TangentFrame,
    mats: &FemMatrices,
    params: &LlgStepParams,
) -> Result<LlgOutcome> {
    let (a, rhs) = assemble_llg_system(mesh, m, h, frame, mats, params)?;
    let ranges: Vec<_> = (0..mesh.num_vertices()).map(|z| 2 * z..2 * z + 2).collect();
    let pre = block_diagonal_preconditioner(&a, &ranges)?;
    let out = gmres_solve(&a, &rhs, &pre, &params.solver, None)?;
    Ok(LlgOutcome { v: frame.expand(&out.x), coeffs: out.x, iterations: out.iterations, residual: out.residual })
}

/// Nodewise linear update `m + k v`, without renormalization.
pub fn update_magnetization(m: &NodalVectorField, v: &NodalVectorField, k: f64) -> NodalVectorField {
    NodalVectorField { values: m.values.iter().zip(&v.values).map(|(&a, &b)| add(a, scale(k, b))).collect() }
}
