use approx::assert_relative_eq;
use proptest::prelude::*;

use ellg::fem::{
    assemble_fem_matrices, discrete_gradient, elementwise_curl, evaluate_edge_field, interpolate_edge, interpolate_nodal,
    interpolate_scalar, vector_form, NodalVectorField,
};
use ellg::mesh::{build_cube_mesh, extract_boundary, Mesh};

fn cube(n: usize) -> Mesh {
    build_cube_mesh(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cube_mesh_counts(n in 1usize..5) {
        let m = cube(n);
        prop_assert_eq!(m.num_vertices(), (n + 1).pow(3));
        prop_assert_eq!(m.num_tets(), 6 * n.pow(3));
        // Euler characteristic of a ball
        let chi = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_faces() as i64 - m.num_tets() as i64;
        prop_assert_eq!(chi, 1);
        prop_assert_eq!(m.boundary_faces().len(), 12 * n * n);
        prop_assert_eq!(m.boundary_vertices().len(), 6 * n * n + 2);
        let vol: f64 = (0..m.num_tets()).map(|t| m.barycentric_gradients(t).1).sum();
        prop_assert!((vol - 1.0).abs() < 1e-13);
    }

    #[test]
    fn boundary_surface_is_closed(n in 1usize..4) {
        let s = extract_boundary(&cube(n));
        prop_assert!(s.validate_closed().is_ok());
        let area: f64 = (0..s.num_triangles()).map(|t| s.area(t)).sum();
        prop_assert!((area - 6.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_linear_matches_constant_field(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let m = cube(2);
        let u = interpolate_scalar(|x| a * x[0] + b * x[1] + c * x[2], &m);
        let g = discrete_gradient(&u, &m);
        let h = interpolate_edge(|_| [a, b, c], &m);
        for (p, q) in g.coeffs.iter().zip(&h.coeffs) {
            prop_assert!((p - q).abs() < 1e-13);
        }
    }
}

#[test]
fn p1_mass_integrates_constants() {
    let mats = assemble_fem_matrices(&cube(3)).unwrap();
    let one = vec![1.0; mats.m_p1.n_rows()];
    assert_relative_eq!(mats.m_p1.quadratic_form(&one), 1.0, epsilon = 1e-13);
    assert!(mats.k_p1.mul_vec(&one).iter().all(|v| v.abs() < 1e-13));
}

#[test]
fn stiffness_of_linear_function() {
    let m = cube(2);
    let mats = assemble_fem_matrices(&m).unwrap();
    let f = interpolate_nodal(|x| [x[0], 2.0 * x[1], 0.0], &m).unwrap();
    assert_relative_eq!(vector_form(&mats.k_p1, &f, &f), 5.0, epsilon = 1e-12);
}

#[test]
fn nd_mass_of_constant_field() {
    let m = cube(2);
    let mats = assemble_fem_matrices(&m).unwrap();
    let h = interpolate_edge(|_| [0.0, 0.0, 3.0], &m);
    assert_relative_eq!(mats.m_nd.quadratic_form(&h.coeffs), 9.0, epsilon = 1e-12);
    assert!(mats.c_nd.quadratic_form(&h.coeffs).abs() < 1e-12);
}

#[test]
fn vertical_edge_coefficient() {
    let n = 4;
    let m = cube(n);
    let h = interpolate_edge(|_| [0.0, 0.0, 3.0], &m);
    let vertical = (0..m.num_edges())
        .find(|&e| {
            let [a, b] = m.edges()[e];
            let (p, q) = (m.vertices()[a], m.vertices()[b]);
            p[0] == q[0] && p[1] == q[1]
        })
        .unwrap();
    assert_relative_eq!(h.coeffs[vertical], 3.0 / n as f64, epsilon = 1e-14);
}

#[test]
fn edge_field_evaluation_reproduces_constants() {
    let m = cube(1);
    let h = interpolate_edge(|_| [1.0, -0.5, 2.0], &m);
    for t in 0..m.num_tets() {
        let v = evaluate_edge_field(&h, &m, t, [0.1, 0.2, 0.3, 0.4]);
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-13);
        assert_relative_eq!(v[1], -0.5, epsilon = 1e-13);
        assert_relative_eq!(v[2], 2.0, epsilon = 1e-13);
    }
    assert!(elementwise_curl(&h, &m).iter().all(|c| c.iter().all(|x| x.abs() < 1e-13)));
}

#[test]
fn mixed_matrix_pairs_fields() {
    // ∫ H · w for constant H and w equals H · w
    let m = cube(2);
    let mats = assemble_fem_matrices(&m).unwrap();
    let h = interpolate_edge(|_| [0.5, 1.0, -1.0], &m);
    let w = NodalVectorField::constant(m.num_vertices(), [2.0, 0.0, 1.0]);
    let xh = mats.x_mix.mul_vec(&h.coeffs);
    let pairing: f64 = xh.iter().zip(w.flat()).map(|(a, b)| a * b).sum();
    assert_relative_eq!(pairing, 0.0, epsilon = 1e-13);
    let w = NodalVectorField::constant(m.num_vertices(), [2.0, 1.0, 1.0]);
    let pairing: f64 = xh.iter().zip(w.flat()).map(|(a, b)| a * b).sum();
    assert_relative_eq!(pairing, 1.0, epsilon = 1e-13);
}
