//! The constrained space `X_h` of edge fields and boundary potentials whose tangential
//! traces agree.
//!
//! Unknowns are the interior-edge coefficients followed by the boundary-node values.
//! A boundary edge `(a, b)`, `a < b`, carries the coefficient `ζ(z_b) − ζ(z_a)`.

use crate::error::{Error, Result};
use crate::fem::{BoundaryNodalField, EdgeField};
use crate::mesh::{Mesh, SurfaceMesh};
use crate::numerics::TripletBuilder;
use crate::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct XhVector {
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct XhSpace {
    interior_edges: Vec<usize>,
    boundary_nodes: Vec<usize>,
    num_edges: usize,
    p: SparseMatrix,
    selector: SparseMatrix,
    q: SparseMatrix,
}

impl XhSpace {
    pub fn dim(&self) -> usize {
        self.interior_edges.len() + self.boundary_nodes.len()
    }

    pub fn num_interior_edges(&self) -> usize {
        self.interior_edges.len()
    }

    pub fn num_boundary_nodes(&self) -> usize {
        self.boundary_nodes.len()
    }

    /// Global edge indices of the interior edges, in unknown order.
    pub fn interior_edges(&self) -> &[usize] {
        &self.interior_edges
    }

    /// Volume vertex indices of the boundary nodes, in unknown order.
    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    /// Maps unknowns to all edge coefficients.
    pub fn prolongation(&self) -> &SparseMatrix {
        &self.p
    }

    /// Maps unknowns to boundary-node values.
    pub fn selector(&self) -> &SparseMatrix {
        &self.selector
    }

    /// `[P; selector]`, mapping unknowns to `(edges ⊕ boundary nodes)`.
    pub fn q(&self) -> &SparseMatrix {
        &self.q
    }

    pub fn interior_range(&self) -> std::ops::Range<usize> {
        0..self.interior_edges.len()
    }

    pub fn boundary_range(&self) -> std::ops::Range<usize> {
        self.interior_edges.len()..self.dim()
    }

    pub fn zero(&self) -> XhVector {
        XhVector { coeffs: vec![0.0; self.dim()] }
    }

    fn check(&self, x: &XhVector) -> Result<()> {
        if x.coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.coeffs.len() });
        }
        Ok(())
    }
}

pub fn build_xh_space(mesh: &Mesh, surface: &SurfaceMesh) -> Result<XhSpace> {
    if surface.parent_vertex_map() != mesh.boundary_vertices() {
        return Err(Error::Topology("surface mesh is not the boundary of the volume mesh".into()));
    }
    let ne = mesh.num_edges();
    let interior_edges: Vec<usize> = (0..ne).filter(|&e| !mesh.is_boundary_edge(e)).collect();
    let boundary_nodes = mesh.boundary_vertices().to_vec();
    let ni = interior_edges.len();
    let nb = boundary_nodes.len();
    let dim = ni + nb;

    let mut p = TripletBuilder::with_capacity(ne, dim, ni + 2 * mesh.boundary_edges().len());
    for (k, &e) in interior_edges.iter().enumerate() {
        p.push(e, k, 1.0);
    }
    for &e in mesh.boundary_edges() {
        let [a, b] = mesh.edges()[e];
        let sa = mesh.boundary_slot(a).ok_or_else(|| Error::Topology(format!("edge {e} endpoint {a} off the boundary")))?;
        let sb = mesh.boundary_slot(b).ok_or_else(|| Error::Topology(format!("edge {e} endpoint {b} off the boundary")))?;
        p.push(e, ni + sb, 1.0);
        p.push(e, ni + sa, -1.0);
    }
    let p = p.build();
    let mut sel = TripletBuilder::with_capacity(nb, dim, nb);
    for k in 0..nb {
        sel.push(k, ni + k, 1.0);
    }
    let selector = sel.build();
    let q = p.vstack(&selector)?;
    Ok(XhSpace { interior_edges, boundary_nodes, num_edges: ne, p, selector, q })
}

/// Full edge field and boundary potential of an `X_h` vector.
pub fn embed(x: &XhVector, space: &XhSpace) -> Result<(EdgeField, BoundaryNodalField)> {
    space.check(x)?;
    let h = EdgeField { coeffs: space.p.mul_vec(&x.coeffs) };
    let lambda = BoundaryNodalField { values: x.coeffs[space.boundary_range()].to_vec() };
    Ok((h, lambda))
}

/// Unknowns of a pair; the boundary-edge coefficients of `h` are discarded.
pub fn restrict(h: &EdgeField, lambda: &BoundaryNodalField, space: &XhSpace) -> Result<XhVector> {
    if h.coeffs.len() != space.num_edges {
        return Err(Error::DimensionMismatch { expected: space.num_edges, found: h.coeffs.len() });
    }
    if lambda.values.len() != space.num_boundary_nodes() {
        return Err(Error::DimensionMismatch { expected: space.num_boundary_nodes(), found: lambda.values.len() });
    }
    let mut coeffs: Vec<f64> = space.interior_edges.iter().map(|&e| h.coeffs[e]).collect();
    coeffs.extend_from_slice(&lambda.values);
    Ok(XhVector { coeffs })
}

/// Largest violation of `∫_e ξ·τ = ζ(z_b) − ζ(z_a)` over boundary edges.
pub fn constraint_residual(h: &EdgeField, lambda: &BoundaryNodalField, space: &XhSpace) -> Result<f64> {
    let x = restrict(h, lambda, space)?;
    let full = space.p.mul_vec(&x.coeffs);
    Ok(full.iter().zip(&h.coeffs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
}

/// `Qᵀ A Q` for a matrix on `(edges ⊕ boundary nodes)`.
pub fn reduce_matrix(a_full: &SparseMatrix, space: &XhSpace) -> Result<SparseMatrix> {
    let n = space.q.n_rows();
    if a_full.n_rows() != n || a_full.n_cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a_full.n_rows().max(a_full.n_cols()) });
    }
    let aq = a_full.matmul(&space.q)?;
    space.q.transpose().matmul(&aq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::interpolate_edge;
    use crate::mesh::{build_cube_mesh, extract_boundary};

    fn space(n: usize) -> (Mesh, XhSpace) {
        let mesh = build_cube_mesh(n).unwrap();
        let surf = extract_boundary(&mesh);
        let s = build_xh_space(&mesh, &surf).unwrap();
        (mesh, s)
    }

    #[test]
    fn single_cube_dimensions() {
        let (mesh, s) = space(1);
        assert_eq!(s.num_interior_edges(), 1);
        assert_eq!(s.num_boundary_nodes(), 8);
        assert_eq!(s.dim(), mesh.num_edges() - mesh.boundary_edges().len() + 8);
    }

    #[test]
    fn constant_potential_gives_zero_edges() {
        let (_, s) = space(2);
        let mut x = s.zero();
        for v in &mut x.coeffs[s.boundary_range()] {
            *v = 2.5;
        }
        let (h, _) = embed(&x, &s).unwrap();
        assert!(h.coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn linear_potential_matches_constant_field() {
        let (mesh, s) = space(2);
        let h = interpolate_edge(|_| [0.0, 0.0, 3.0], &mesh);
        let lambda = BoundaryNodalField { values: s.boundary_nodes().iter().map(|&z| 3.0 * mesh.vertices()[z][2]).collect() };
        assert!(constraint_residual(&h, &lambda, &s).unwrap() < 1e-14);
        let x = restrict(&h, &lambda, &s).unwrap();
        let (h2, l2) = embed(&x, &s).unwrap();
        for (a, b) in h2.coeffs.iter().zip(&h.coeffs) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(l2, lambda);
    }

    #[test]
    fn reduction_of_identity() {
        let (_, s) = space(1);
        let n = s.q().n_rows();
        let r = reduce_matrix(&SparseMatrix::identity(n), &s).unwrap();
        let qtq = s.q().transpose().matmul(s.q()).unwrap();
        assert_eq!(r.to_dense(), qtq.to_dense());
        assert!(r.to_dense().cholesky().is_ok());
    }
}
