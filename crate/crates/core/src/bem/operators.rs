//! Galerkin matrices of the Laplace layer operators on a closed triangulated surface.

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{add, dot, norm, scale, sub, Vec3};
use crate::mesh::SurfaceMesh;
use crate::quadrature::{
    edge_adjacent_pair_rule, identical_pair_rule, regular_pair_rule, vertex_adjacent_pair_rule, PairPoint,
};
use crate::DenseMatrix;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct BemOperators {
    /// Single layer, P0 × P0.
    pub v: DenseMatrix,
    /// Double layer (principal value), P0 test × P1 trial.
    pub k: DenseMatrix,
    /// Adjoint double layer, `kᵀ`.
    pub kp: DenseMatrix,
    /// Hypersingular, P1 × P1.
    pub w: DenseMatrix,
    /// P0 test × P1 trial mass.
    pub m0: DenseMatrix,
    /// P1 × P1 mass.
    pub m_gamma: DenseMatrix,
}

struct Rules {
    identical: Vec<PairPoint>,
    edge: Vec<PairPoint>,
    vertex: Vec<PairPoint>,
    regular: Vec<PairPoint>,
    near: Vec<PairPoint>,
}

/// Panel pairs closer than this (centroid distance over diameter) use the boosted rule.
const NEAR_RATIO: f64 = 2.0;
const NEAR_BOOST: usize = 3;

impl Rules {
    fn new(order: usize) -> Self {
        Self {
            identical: identical_pair_rule(order + 1),
            edge: edge_adjacent_pair_rule(order + 1),
            vertex: vertex_adjacent_pair_rule(order + 1),
            regular: regular_pair_rule(order),
            near: regular_pair_rule(order + NEAR_BOOST),
        }
    }
}

/// Triangle with a chosen local vertex order; `perm[i]` is the original local index of
/// the `i`-th corner.
struct Panel {
    origin: Vec3,
    e1: Vec3,
    e2: Vec3,
    perm: [usize; 3],
}

impl Panel {
    fn new(x: &[Vec3; 3], perm: [usize; 3]) -> Self {
        Self { origin: x[perm[0]], e1: sub(x[perm[1]], x[perm[0]]), e2: sub(x[perm[2]], x[perm[0]]), perm }
    }

    #[inline]
    fn point(&self, uv: [f64; 2]) -> Vec3 {
        add(self.origin, add(scale(uv[0], self.e1), scale(uv[1], self.e2)))
    }

    /// Hat-function values at `uv`, indexed by original local vertex.
    #[inline]
    fn shape(&self, uv: [f64; 2]) -> [f64; 3] {
        let mut s = [0.0; 3];
        s[self.perm[0]] = 1.0 - uv[0] - uv[1];
        s[self.perm[1]] = uv[0];
        s[self.perm[2]] = uv[1];
        s
    }
}

/// Local vertex orders placing shared vertices first in both panels.
fn shared_order(a: &[usize; 3], b: &[usize; 3]) -> (usize, [usize; 3], [usize; 3]) {
    let mut pa = Vec::with_capacity(3);
    let mut pb = Vec::with_capacity(3);
    for (i, va) in a.iter().enumerate() {
        if let Some(j) = b.iter().position(|vb| vb == va) {
            pa.push(i);
            pb.push(j);
        }
    }
    let shared = pa.len();
    for i in 0..3 {
        if !pa.contains(&i) {
            pa.push(i);
        }
        if !pb.contains(&i) {
            pb.push(i);
        }
    }
    (shared, [pa[0], pa[1], pa[2]], [pb[0], pb[1], pb[2]])
}

/// Per pair: `∫∫ G` and `∫∫ ∂_{n_y}G · φ_b(y)` for the three trial hats of the second panel.
fn pair_integrals(surface: &SurfaceMesh, rules: &Rules, i: usize, j: usize, diam: &[f64]) -> (f64, [f64; 3]) {
    let ti = surface.triangles()[i];
    let tj = surface.triangles()[j];
    let xi = surface.triangle_vertices(i);
    let xj = surface.triangle_vertices(j);
    let nj = surface.normals()[j];
    let (shared, pa, pb) = shared_order(&ti, &tj);
    let rule = match shared {
        3 => &rules.identical,
        2 => &rules.edge,
        1 => &rules.vertex,
        _ => {
            let d = norm(sub(surface.centroid(i), surface.centroid(j)));
            if d < NEAR_RATIO * diam[i].max(diam[j]) {
                &rules.near
            } else {
                &rules.regular
            }
        }
    };
    let (pi, pj) = if shared == 0 {
        (Panel::new(&xi, [0, 1, 2]), Panel::new(&xj, [0, 1, 2]))
    } else {
        (Panel::new(&xi, pa), Panel::new(&xj, pb))
    };
    // the double-layer kernel vanishes on coplanar panels
    let coplanar = shared == 3
        || (dot(surface.normals()[i], nj).abs() > 1.0 - 1e-12 && dot(nj, sub(xi[0], xj[0])).abs() < 1e-12 * diam[j]);
    let jac = 4.0 * surface.area(i) * surface.area(j);
    let mut v = 0.0;
    let mut k = [0.0; 3];
    for p in rule {
        let x = pi.point(p.x);
        let y = pj.point(p.y);
        let d = sub(x, y);
        let r = norm(d);
        let w = p.weight * jac;
        v += w / (FOUR_PI * r);
        if !coplanar {
            let kern = w * dot(nj, d) / (FOUR_PI * r * r * r);
            let s = pj.shape(p.y);
            for b in 0..3 {
                k[b] += kern * s[b];
            }
        }
    }
    (v, k)
}

/// Surface curls `n × ∇_Γ φ_a` of the three hat functions of a panel.
fn surface_curls(x: &[Vec3; 3], area: f64) -> [Vec3; 3] {
    [0, 1, 2].map(|a| scale(1.0 / (2.0 * area), sub(x[(a + 1) % 3], x[(a + 2) % 3])))
}

/// Assembles all layer operators with `quad_order` Gauss points per direction on regular pairs.
pub fn assemble_layer_operators(surface: &SurfaceMesh, quad_order: usize) -> Result<BemOperators> {
    if quad_order == 0 {
        return Err(crate::Error::InvalidArgument("quad_order must be >= 1".into()));
    }
    surface.validate_closed()?;
    let nt = surface.num_triangles();
    let nv = surface.num_vertices();
    let rules = Rules::new(quad_order);
    let diam: Vec<f64> = (0..nt)
        .map(|t| {
            let [a, b, c] = surface.triangle_vertices(t);
            norm(sub(a, b)).max(norm(sub(b, c))).max(norm(sub(c, a)))
        })
        .collect();

    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let mut vrow = vec![0.0; nt];
            let mut krow = vec![0.0; nv];
            for j in 0..nt {
                let (v, k) = pair_integrals(surface, &rules, i, j, &diam);
                vrow[j] = v;
                for (b, &vb) in surface.triangles()[j].iter().enumerate() {
                    krow[vb] += k[b];
                }
            }
            (vrow, krow)
        })
        .collect();

    let mut v = DenseMatrix::zeros(nt, nt);
    let mut k = DenseMatrix::zeros(nt, nv);
    for (i, (vrow, krow)) in rows.into_iter().enumerate() {
        v.row_mut(i).copy_from_slice(&vrow);
        k.row_mut(i).copy_from_slice(&krow);
    }
    let v = v.symmetrized();

    let curls: Vec<[Vec3; 3]> = (0..nt).map(|t| surface_curls(&surface.triangle_vertices(t), surface.area(t))).collect();
    // W = Cᵀ V C with C mapping hats to panelwise constant curls
    let mut cv = vec![vec![[0.0f64; 3]; nv]; nt];
    // cv[i][l] = Σ_j V_ij curl_j φ_l
    for i in 0..nt {
        for j in 0..nt {
            let vij = v[(i, j)];
            if vij == 0.0 {
                continue;
            }
            for (b, &l) in surface.triangles()[j].iter().enumerate() {
                cv[i][l] = add(cv[i][l], scale(vij, curls[j][b]));
            }
        }
    }
    let mut w = DenseMatrix::zeros(nv, nv);
    for i in 0..nt {
        for (a, &kk) in surface.triangles()[i].iter().enumerate() {
            for l in 0..nv {
                w[(kk, l)] += dot(curls[i][a], cv[i][l]);
            }
        }
    }
    let w = w.symmetrized();

    let mut m0 = DenseMatrix::zeros(nt, nv);
    let mut m_gamma = DenseMatrix::zeros(nv, nv);
    for (t, tri) in surface.triangles().iter().enumerate() {
        let area = surface.area(t);
        for &a in tri {
            m0[(t, a)] += area / 3.0;
            for &b in tri {
                m_gamma[(a, b)] += if a == b { area / 6.0 } else { area / 12.0 };
            }
        }
    }
    let kp = k.transpose();
    Ok(BemOperators { v, k, kp, w, m0, m_gamma })
}
