//! Analytic-sphere boundary element checks and structural invariants of the scheme.

use crate::bem::{assemble_layer_operators, build_dtn_symmetric, BemOperators};
use crate::coupled::{constraint_residual, embed};
use crate::eddy::{assemble_eddy_system, eddy_step, EddyParams};
use crate::error::Result;
use crate::fem::{interpolate_edge, NodalVectorField};
use crate::geometry::{dot, norm};
use crate::llg::{build_tangent_frame, solve_llg_step, update_magnetization, LlgStepParams};
use crate::mesh::SurfaceMesh;
use crate::numerics::{smallest_eigenvalue_symmetric, SolverConfig};
use crate::simulator::{initialize, initialize_with, Discretization, SimConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {:.3e} (tol {:.1e})", self.name, self.value, self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereReport {
    pub level: usize,
    pub num_triangles: usize,
    /// `‖V1 − |τ|‖ / ‖|τ|‖`; the single layer of a unit density is 1 on the unit sphere.
    pub v1_error: f64,
    /// `‖Sλ + (ℓ+1) M_Γ λ‖ / ‖M_Γ λ‖` for `λ = 1` (`ℓ = 0`) and `λ = x₃` (`ℓ = 1`).
    pub dtn_residual: [f64; 2],
    pub w1_max: f64,
    /// Smallest eigenvalue of `−S`.
    pub min_eig_neg_s: f64,
    /// `max|S − Sᵀ| / max|S|` before symmetrization.
    pub s_asymmetry: f64,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}


fn raw_s_asymmetry(ops: &BemOperators) -> Result<f64> {
    let chol = ops.v.cholesky()?;
    let b = ops.k.linear_combination(1.0, &ops.m0, -0.5)?;
    let s = b.transpose().matmul(&chol.solve_matrix(&b))?.linear_combination(-1.0, &ops.w, -1.0)?;
    let d = s.linear_combination(1.0, &s.transpose(), -1.0)?;
    Ok(d.max_abs() / s.max_abs())
}

pub fn sphere_check(level: usize, quad_order: usize) -> Result<SphereReport> {
    let s = SurfaceMesh::icosphere(level);
    let ops = assemble_layer_operators(&s, quad_order)?;
    let nt = s.num_triangles();
    let nv = s.num_vertices();
    let area: Vec<f64> = (0..nt).map(|t| s.area(t)).collect();
    let v1 = ops.v.mul_vec(&vec![1.0; nt]);
    let diff: Vec<f64> = v1.iter().zip(&area).map(|(a, b)| a - b).collect();
    let v1_error = l2(&diff) / l2(&area);

    let dtn = build_dtn_symmetric(&ops)?;
    let mut dtn_residual = [0.0; 2];
    let x3: Vec<f64> = s.vertices().iter().map(|x| x[2]).collect();
    for (deg, lam) in [vec![1.0; nv], x3].into_iter().enumerate() {
        let sl = dtn.s.mul_vec(&lam);
        let ml = ops.m_gamma.mul_vec(&lam);
        let r: Vec<f64> = sl.iter().zip(&ml).map(|(a, b)| a + (deg as f64 + 1.0) * b).collect();
        dtn_residual[deg] = l2(&r) / l2(&ml);
    }
    let w1_max = ops.w.mul_vec(&vec![1.0; nv]).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_eig_neg_s = smallest_eigenvalue_symmetric(&dtn.s.scaled(-1.0))?;
    Ok(SphereReport { level, num_triangles: nt, v1_error, dtn_residual, w1_max, min_eig_neg_s, s_asymmetry: raw_s_asymmetry(&ops)? })
}

/// Machine-precision invariants on a small cube run.
pub fn structural_checks(n: usize) -> Result<Vec<Check>> {
    let disc = Discretization::new(n, 4)?;
    let cfg = SimConfig { gmres_tol: 1e-12, ..SimConfig::new(n, 0.01, 0.01) };
    let solver = cfg.solver();
    let llg_params = LlgStepParams { alpha: cfg.alpha, ce: 1.0, theta: 1.0, k: cfg.k, solver };
    // the curl-curl block limits attainable eddy residuals to about 1e-11
    let eddy_solver = SolverConfig { tolerance: 1e-10, ..solver };
    let eddy_params = EddyParams { sigma: cfg.sigma, mu0: cfg.mu0, k: cfg.k, solver: eddy_solver };
    let mut checks = Vec::new();

    let state = initialize(&cfg, &disc)?;
    let (h, lambda) = embed(&state.x, &disc.space)?;
    let frame = build_tangent_frame(&state.m)?;
    let llg = solve_llg_step(&disc.mesh, &state.m, &h, &frame, &disc.fem, &llg_params)?;
    let tangency = state.m.values.iter().zip(&llg.v.values).map(|(m, v)| dot(*m, *v).abs()).fold(0.0, f64::max);
    checks.push(Check::new("nodal tangency |v.m|", tangency, 1e-10));
    let m1 = update_magnetization(&state.m, &llg.v, cfg.k);
    let pyth = (0..m1.len())
        .map(|z| {
            let (a, b, v) = (m1.values[z], state.m.values[z], llg.v.values[z]);
            (dot(a, a) - dot(b, b) - cfg.k * cfg.k * dot(v, v)).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("Pythagorean identity |m+kv|^2 = |m|^2 + k^2|v|^2", pyth, 1e-12));
    checks.push(Check::new("trace constraint of the initial pair", constraint_residual(&h, &lambda, &disc.space)?, 1e-14));

    let eddy = assemble_eddy_system(&disc.space, &disc.fem, &disc.dtn, eddy_params)?;
    let ed = eddy_step(&eddy, &state.x, &llg.v)?;
    let (h1, l1) = embed(&ed.x, &disc.space)?;
    checks.push(Check::new("trace constraint after an eddy step", constraint_residual(&h1, &l1, &disc.space)?, 1e-14));

    let nb = disc.surface.num_vertices();
    let w1 = disc.bem.w.mul_vec(&vec![1.0; nb]).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    checks.push(Check::new("W 1 = 0 on the cube surface", w1, 1e-12));
    checks.push(Check::new("S symmetry (relative, before symmetrization)", raw_s_asymmetry(&disc.bem)?, 1e-10));

    // uniform m with a parallel constant field: v = 0
    let fixed = initialize_with(&disc, |_| [0.0, 0.0, 1.0], |_| [0.0, 0.0, 3.0], |x| 3.0 * x[2])?;
    let (hf, _) = embed(&fixed.x, &disc.space)?;
    let frame = build_tangent_frame(&fixed.m)?;
    let v = solve_llg_step(&disc.mesh, &fixed.m, &hf, &frame, &disc.fem, &llg_params)?.v;
    let vmax = v.values.iter().map(|&x| norm(x)).fold(0.0, f64::max);
    checks.push(Check::new("uniform m, parallel H: |v|", vmax, 1e-12));

    // curl-free field with v = 0 is kept by the eddy step
    let zero = NodalVectorField::zeros(disc.mesh.num_vertices());
    let ed = eddy_step(&eddy, &fixed.x, &zero)?;
    let drift = ed.x.coeffs.iter().zip(&fixed.x.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::new("curl-free H, v = 0: |A^{i+1} - A^i|", drift, 1e-10));
    let (he, _) = embed(&ed.x, &disc.space)?;
    let expect = interpolate_edge(|_| [0.0, 0.0, 3.0], &disc.mesh);
    let e = he.coeffs.iter().zip(&expect.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::new("curl-free H, v = 0: edge coefficients", e, 1e-10));
    Ok(checks)
}
