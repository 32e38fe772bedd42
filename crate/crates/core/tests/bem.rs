use approx::assert_relative_eq;

use ellg::bem::{assemble_layer_operators, build_dtn_johnson_nedelec, build_dtn_symmetric, solve_density};
use ellg::geometry::add;
use ellg::mesh::{build_cube_mesh, extract_boundary, SurfaceMesh};
use ellg::selftest::sphere_check;

#[test]
fn sphere_oracles_improve_with_refinement() {
    let a = sphere_check(1, 4).unwrap();
    let b = sphere_check(2, 4).unwrap();
    assert!(a.v1_error < 0.10 && b.v1_error < 0.05);
    assert!(b.v1_error < a.v1_error / 3.0);
    for i in 0..2 {
        assert!(b.dtn_residual[i] < a.dtn_residual[i]);
    }
    assert!(a.min_eig_neg_s > 0.0 && b.min_eig_neg_s > 0.0);
    assert!(a.w1_max < 1e-12 && b.w1_max < 1e-12);
}

#[test]
fn translation_invariance() {
    let s = SurfaceMesh::icosphere(1);
    let shift = [3.0, -1.0, 0.5];
    let moved = SurfaceMesh::new(
        s.vertices().iter().map(|&v| add(v, shift)).collect(),
        s.triangles().to_vec(),
        s.parent_vertex_map().to_vec(),
    )
    .unwrap();
    let a = assemble_layer_operators(&s, 4).unwrap();
    let b = assemble_layer_operators(&moved, 4).unwrap();
    for (x, y) in [(&a.v, &b.v), (&a.k, &b.k), (&a.w, &b.w)] {
        let d = x.linear_combination(1.0, y, -1.0).unwrap();
        assert!(d.max_abs() < 1e-12 * x.max_abs(), "{}", d.max_abs());
    }
}

#[test]
fn single_layer_is_symmetric_positive_definite() {
    let s = extract_boundary(&build_cube_mesh(2).unwrap());
    let ops = assemble_layer_operators(&s, 4).unwrap();
    assert!(ops.v.is_symmetric(1e-14));
    assert!(ops.v.cholesky().is_ok());
    assert!(ops.w.is_symmetric(1e-12));
}

#[test]
fn constant_density_on_sphere() {
    // the exterior harmonic extension of 1 is 1/r, with normal derivative -1
    let s = SurfaceMesh::icosphere(2);
    let ops = assemble_layer_operators(&s, 4).unwrap();
    let mu = solve_density(&ops, &vec![1.0; s.num_vertices()]).unwrap();
    let mean = mu.iter().sum::<f64>() / mu.len() as f64;
    assert_relative_eq!(mean, -1.0, epsilon = 0.02);
}

#[test]
fn couplings_agree_on_smooth_data() {
    let s = SurfaceMesh::icosphere(2);
    let ops = assemble_layer_operators(&s, 4).unwrap();
    let sym = build_dtn_symmetric(&ops).unwrap();
    let jn = build_dtn_johnson_nedelec(&ops).unwrap();
    let x3: Vec<f64> = s.vertices().iter().map(|x| x[2]).collect();
    let a = sym.s.quadratic_form(&x3);
    let b = jn.s.quadratic_form(&x3);
    // both approximate -2 ∫ x3² = -8π/3 on the unit sphere
    assert_relative_eq!(a, b, max_relative = 0.05);
    assert_relative_eq!(a, -8.0 * std::f64::consts::PI / 3.0, max_relative = 0.05);
}

#[test]
fn open_surface_rejected() {
    let s = SurfaceMesh::icosphere(0);
    let tris = s.triangles()[1..].to_vec();
    let open = SurfaceMesh::new(s.vertices().to_vec(), tris, s.parent_vertex_map().to_vec());
    let err = open.and_then(|m| assemble_layer_operators(&m, 4).map(|_| ()));
    assert!(err.is_err());
}
