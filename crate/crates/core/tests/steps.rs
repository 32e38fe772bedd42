use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ellg::coupled::{constraint_residual, embed, XhVector};
use ellg::eddy::{assemble_eddy_system, eddy_step, h_norm, recover_e_field, EddyParams};
use ellg::fem::{assemble_fem_matrices, elementwise_curl, interpolate_edge, vector_form, EdgeField, FemMatrices, NodalVectorField};
use ellg::geometry::{dot, normalize};
use ellg::llg::{build_tangent_frame, solve_llg_step, update_magnetization, LlgStepParams};
use ellg::mesh::{build_cube_mesh, Mesh};
use ellg::numerics::SolverConfig;
use ellg::simulator::Discretization;
use ellg::bem::Coupling;

fn random_unit_field(n: usize, rng: &mut ChaCha8Rng) -> NodalVectorField {
    NodalVectorField {
        values: (0..n).map(|_| normalize([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])).collect(),
    }
}

fn tight() -> SolverConfig {
    SolverConfig { tolerance: 1e-13, ..Default::default() }
}

fn setup(n: usize) -> (Mesh, FemMatrices) {
    let mesh = build_cube_mesh(n).unwrap();
    let mats = assemble_fem_matrices(&mesh).unwrap();
    (mesh, mats)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn velocity_is_tangent_and_update_is_pythagorean(seed in any::<u64>(), theta in 0.0f64..=1.0) {
        let (mesh, mats) = setup(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_unit_field(mesh.num_vertices(), &mut rng);
        let h = EdgeField { coeffs: (0..mesh.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let frame = build_tangent_frame(&m).unwrap();
        let p = LlgStepParams { alpha: 0.5, ce: 0.1, theta, k: 0.05, solver: tight() };
        let v = solve_llg_step(&mesh, &m, &h, &frame, &mats, &p).unwrap().v;
        let m1 = update_magnetization(&m, &v, p.k);
        for z in 0..m.len() {
            prop_assert!(dot(m.values[z], v.values[z]).abs() <= 1e-10);
            let lhs = dot(m1.values[z], m1.values[z]);
            let rhs = dot(m.values[z], m.values[z]) + p.k * p.k * dot(v.values[z], v.values[z]);
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn exchange_energy_identity_without_field(seed in any::<u64>(), theta in 0.5f64..=1.0) {
        // |∇m⁺|² = |∇m|² − 2k(α/Ce)|v|² − (2θ−1)k²|∇v|²
        let (mesh, mats) = setup(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_unit_field(mesh.num_vertices(), &mut rng);
        let h = EdgeField::zeros(mesh.num_edges());
        let frame = build_tangent_frame(&m).unwrap();
        let p = LlgStepParams { alpha: 0.7, ce: 1.0, theta, k: 0.01, solver: tight() };
        let v = solve_llg_step(&mesh, &m, &h, &frame, &mats, &p).unwrap().v;
        let m1 = update_magnetization(&m, &v, p.k);
        let before = vector_form(&mats.k_p1, &m, &m);
        let after = vector_form(&mats.k_p1, &m1, &m1);
        let predicted = before
            - 2.0 * p.k * p.alpha / p.ce * vector_form(&mats.m_p1, &v, &v)
            - (2.0 * theta - 1.0) * p.k * p.k * vector_form(&mats.k_p1, &v, &v);
        prop_assert!(after <= before);
        prop_assert!((after - predicted).abs() <= 1e-9 * before);
    }
}

#[test]
fn frame_is_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_unit_field(50, &mut rng);
    let f = build_tangent_frame(&m).unwrap();
    for z in 0..50 {
        let (a, b, c) = (f.t1[z], f.t2[z], m.values[z]);
        for (x, y) in [(a, b), (a, c), (b, c)] {
            assert!(dot(x, y).abs() < 1e-14);
        }
        assert!((dot(a, a) - 1.0).abs() < 1e-14 && (dot(b, b) - 1.0).abs() < 1e-14);
    }
}

fn eddy(n: usize, coupling: Coupling) -> (Discretization, ellg::eddy::EddySystem) {
    let disc = Discretization::with_coupling(n, 4, coupling).unwrap();
    let params = EddyParams { sigma: 1.0, mu0: 1.0, k: 0.1, solver: SolverConfig { tolerance: 1e-12, ..Default::default() } };
    let sys = assemble_eddy_system(&disc.space, &disc.fem, &disc.dtn, params).unwrap();
    (disc, sys)
}

#[test]
fn eddy_step_dissipates_without_load() {
    let (disc, sys) = eddy(2, Coupling::Symmetric);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut x = XhVector { coeffs: (0..sys.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let zero = NodalVectorField::zeros(disc.mesh.num_vertices());
    for _ in 0..5 {
        let next = eddy_step(&sys, &x, &zero).unwrap().x;
        assert!(h_norm(&next, &sys) <= h_norm(&x, &sys));
        let (h, l) = embed(&next, &disc.space).unwrap();
        assert!(constraint_residual(&h, &l, &disc.space).unwrap() <= 1e-14);
        x = next;
    }
}

#[test]
fn eddy_step_keeps_gradient_fields() {
    let (disc, sys) = eddy(2, Coupling::Symmetric);
    let h = interpolate_edge(|_| [1.0, -2.0, 0.5], &disc.mesh);
    let lam = ellg::fem::BoundaryNodalField {
        values: disc.space.boundary_nodes().iter().map(|&z| {
            let x = disc.mesh.vertices()[z];
            x[0] - 2.0 * x[1] + 0.5 * x[2]
        }).collect(),
    };
    let x = ellg::coupled::restrict(&h, &lam, &disc.space).unwrap();
    let zero = NodalVectorField::zeros(disc.mesh.num_vertices());
    let out = eddy_step(&sys, &x, &zero).unwrap();
    let drift = out.x.coeffs.iter().zip(&x.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-10, "{drift}");
}

#[test]
fn h_norm_is_positive() {
    let (_, sys) = eddy(1, Coupling::Symmetric);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let x = XhVector { coeffs: (0..sys.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        assert!(h_norm(&x, &sys) > 0.0);
    }
    assert_eq!(h_norm(&XhVector { coeffs: vec![0.0; sys.dim()] }, &sys), 0.0);
}

#[test]
fn johnson_nedelec_coupling_steps() {
    let (disc, sys) = eddy(2, Coupling::JohnsonNedelec);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = XhVector { coeffs: (0..sys.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let v = NodalVectorField::constant(disc.mesh.num_vertices(), [0.0, 0.1, 0.0]);
    let out = eddy_step(&sys, &x, &v).unwrap();
    assert!(out.x.coeffs.iter().all(|c| c.is_finite()));
}

#[test]
fn electric_field_is_scaled_curl() {
    let mesh = build_cube_mesh(2).unwrap();
    let h = interpolate_edge(|x| [-x[1], x[0], 0.0], &mesh);
    let e = recover_e_field(&h, 4.0, &mesh).unwrap();
    let c = elementwise_curl(&h, &mesh);
    for (a, b) in e.iter().zip(&c) {
        for i in 0..3 {
            assert!((4.0 * a[i] - b[i]).abs() < 1e-13);
        }
        assert!((a[2] - 0.5).abs() < 1e-12);
    }
    assert!(recover_e_field(&h, 0.0, &mesh).is_err());
}
