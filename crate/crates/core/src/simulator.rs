//! Time stepping of the coupled magnetization / eddy-current system.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use log::{info, warn};

use crate::bem::{assemble_layer_operators, build_dtn_johnson_nedelec, build_dtn_symmetric, BemOperators, Coupling, DtnMatrix};
use crate::coupled::{build_xh_space, constraint_residual, embed, restrict, XhSpace, XhVector};
use crate::eddy::{assemble_eddy_system, eddy_step, EddyParams, EddySystem};
use crate::error::{Error, Result};
use crate::fem::{
    assemble_fem_matrices, evaluate_energies, interpolate_edge, interpolate_nodal, vector_form, BoundaryNodalField,
    EdgeField, FemMatrices, NodalVectorField,
};
use crate::geometry::{norm, scale, sub, Vec3};
use crate::llg::{build_tangent_frame, solve_llg_step, update_magnetization, LlgStepParams};
use crate::mesh::{build_cube_mesh, extract_boundary, Mesh, SurfaceMesh};
use crate::numerics::SolverConfig;

pub const DEFAULT_MU0: f64 = 1.25667e-6;

/// Exchange constant of the standard problem for a given `μ₀`.
pub fn default_ce(mu0: f64) -> f64 {
    2.6e-11 / (mu0 * 6.4e11)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// Vortex-like magnetization with `H⁰ = (0,0,3)` and `λ⁰ = 3 z₃`.
    Mumag1,
    /// `m ≡ (0,0,1)`, `H ≡ 0`, `λ ≡ 0`.
    Uniform,
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Mumag1 => "mumag1",
            InitialData::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub t_final: f64,
    pub k: f64,
    pub theta: f64,
    pub alpha: f64,
    pub ce: f64,
    pub mu0: f64,
    pub sigma: f64,
    pub init: InitialData,
    pub gmres_tol: f64,
    pub quad_order: usize,
    pub out_dir: Option<PathBuf>,
    /// Enables the energy-bound check when set.
    pub energy_cap: Option<f64>,
}

impl SimConfig {
    /// Standard-problem constants with `θ = 1`.
    pub fn new(n: usize, t_final: f64, k: f64) -> Self {
        Self {
            n,
            t_final,
            k,
            theta: 1.0,
            alpha: 0.5,
            ce: default_ce(DEFAULT_MU0),
            mu0: DEFAULT_MU0,
            sigma: 1.0,
            init: InitialData::Mumag1,
            gmres_tol: 1e-8,
            quad_order: 4,
            out_dir: None,
            energy_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n == 0 {
            return bad("n must be >= 1".into());
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("T = {} must be positive", self.t_final));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("k = {} must be positive", self.k));
        }
        let steps = (self.t_final / self.k).round();
        if steps < 1.0 || (steps * self.k - self.t_final).abs() > 1e-12 * self.t_final.max(1.0) {
            return bad(format!("k = {} does not divide T = {}", self.k, self.t_final));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return bad(format!("theta = {} not in [0, 1]", self.theta));
        }
        for (name, v) in [("alpha", self.alpha), ("Ce", self.ce), ("mu0", self.mu0), ("sigma", self.sigma)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if !(self.gmres_tol > 0.0 && self.gmres_tol < 1.0) {
            return bad(format!("gmres_tol = {} not in (0, 1)", self.gmres_tol));
        }
        if self.quad_order == 0 {
            return bad("quad_order must be >= 1".into());
        }
        if let Some(cap) = self.energy_cap {
            if !(cap > 0.0) {
                return bad(format!("energy_cap = {cap} must be positive"));
            }
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        (self.t_final / self.k).round() as usize
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { tolerance: self.gmres_tol, ..SolverConfig::default() }
    }

    fn llg_params(&self) -> LlgStepParams {
        LlgStepParams { alpha: self.alpha, ce: self.ce, theta: self.theta, k: self.k, solver: self.solver() }
    }

    fn eddy_params(&self) -> EddyParams {
        EddyParams { sigma: self.sigma, mu0: self.mu0, k: self.k, solver: self.solver() }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SetupTimings {
    pub mesh_and_fem: Duration,
    pub bem: Duration,
}

/// Mesh, spaces and all step-size independent operators.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub surface: SurfaceMesh,
    pub fem: FemMatrices,
    pub bem: BemOperators,
    pub dtn: DtnMatrix,
    pub space: XhSpace,
    pub timings: SetupTimings,
}

impl Discretization {
    pub fn new(n: usize, quad_order: usize) -> Result<Self> {
        Self::with_coupling(n, quad_order, Coupling::Symmetric)
    }

    pub fn with_coupling(n: usize, quad_order: usize, coupling: Coupling) -> Result<Self> {
        let t0 = Instant::now();
        let mesh = build_cube_mesh(n)?;
        let surface = extract_boundary(&mesh);
        let fem = assemble_fem_matrices(&mesh)?;
        let space = build_xh_space(&mesh, &surface)?;
        let t1 = Instant::now();
        let bem = assemble_layer_operators(&surface, quad_order)?;
        let dtn = match coupling {
            Coupling::Symmetric => build_dtn_symmetric(&bem)?,
            Coupling::JohnsonNedelec => build_dtn_johnson_nedelec(&bem)?,
        };
        let timings = SetupTimings { mesh_and_fem: t1 - t0, bem: t1.elapsed() };
        Ok(Self { mesh, surface, fem, bem, dtn, space, timings })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: usize,
    pub m: NodalVectorField,
    pub x: XhVector,
    pub v_last: Option<NodalVectorField>,
}

impl SimState {
    pub fn fields(&self, space: &XhSpace) -> Result<(EdgeField, BoundaryNodalField)> {
        embed(&self.x, space)
    }
}

/// The standard-problem magnetization, using coordinates centred on the column axis.
pub fn mumag_m0(x: Vec3) -> Vec3 {
    let (dx, dy) = (x[0] - 0.5, x[1] - 0.5);
    let d = dx * dx + dy * dy;
    if d >= 0.25 {
        return [0.0, 0.0, -1.0];
    }
    let a = (1.0 - 2.0 * d.sqrt()).powi(4) / 4.0;
    scale(1.0 / (a * a + d), [2.0 * a * dx, 2.0 * a * dy, a * a - d])
}

/// Initial state from arbitrary data; nodal magnetization values are normalized.
pub fn initialize_with(
    disc: &Discretization,
    m0: impl Fn(Vec3) -> Vec3,
    h0: impl Fn(Vec3) -> Vec3,
    lambda0: impl Fn(Vec3) -> f64,
) -> Result<SimState> {
    let mut m = interpolate_nodal(m0, &disc.mesh)?;
    for (z, v) in m.values.iter_mut().enumerate() {
        let len = norm(*v);
        if !(len > 0.0) {
            return Err(Error::DegenerateMagnetization { node: z, norm: len });
        }
        *v = scale(1.0 / len, *v);
    }
    let h = interpolate_edge(h0, &disc.mesh);
    let lambda = BoundaryNodalField {
        values: disc.space.boundary_nodes().iter().map(|&z| lambda0(disc.mesh.vertices()[z])).collect(),
    };
    let residual = constraint_residual(&h, &lambda, &disc.space)?;
    if !(residual <= 1e-10) {
        return Err(Error::Initialization(format!("initial pair violates the trace constraint by {residual:e}")));
    }
    let x = restrict(&h, &lambda, &disc.space)?;
    Ok(SimState { step: 0, m, x, v_last: None })
}

pub fn initialize(cfg: &SimConfig, disc: &Discretization) -> Result<SimState> {
    match cfg.init {
        InitialData::Mumag1 => initialize_with(disc, mumag_m0, |_| [0.0, 0.0, 3.0], |x| 3.0 * x[2]),
        InitialData::Uniform => initialize_with(disc, |_| [0.0, 0.0, 1.0], |_| [0.0; 3], |_| 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub grad_m_l2: f64,
    pub h_l2: f64,
    pub curl_h_l2: f64,
    pub h_hcurl: f64,
    /// `(−λᵀSλ)^{1/2}`, used in place of the `H^{1/2}(Γ)` norm.
    pub lambda_h12: f64,
    pub mean_mz: f64,
    pub max_m_norm: f64,
    pub gmres_llg: usize,
    pub gmres_eddy: usize,
}

/// Left-hand-side terms of the discrete energy bound at one time index `j`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyTerms {
    /// `Σ (‖ΔH‖² + ‖Δλ‖²)`.
    pub increments: f64,
    /// `k Σ ‖∇×H^{i+1}‖²`.
    pub curl_dissipation: f64,
    /// `‖H^j‖²_{H(curl)} + ‖λ^j‖²`.
    pub field: f64,
    /// `‖∇m^j‖²`.
    pub exchange: f64,
    /// `max(2θ−1, 0) k² Σ ‖∇v‖²`.
    pub theta_term: f64,
    /// `k Σ ‖v‖²`.
    pub velocity: f64,
    /// `k Σ (‖d_t H‖² + ‖d_t λ‖²)`.
    pub time_derivative: f64,
    /// `Σ ‖∇×ΔH‖²`.
    pub curl_increments: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn as_array(&self) -> [f64; 8] {
        [
            self.increments,
            self.curl_dissipation,
            self.field,
            self.exchange,
            self.theta_term,
            self.velocity,
            self.time_derivative,
            self.curl_increments,
        ]
    }

    pub const NAMES: [&'static str; 8] = [
        "increments",
        "curl_dissipation",
        "field",
        "exchange",
        "theta_term",
        "velocity",
        "time_derivative",
        "curl_increments",
    ];
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub records: Vec<StepRecord>,
    /// Energy-bound terms for `j = 0..=N`.
    pub energy: Vec<EnergyTerms>,
    /// Per-node `Σ_j k²|v^j(z)|²`.
    pub magnitude_ledger: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// Largest value of each term over all `j`.
    pub max_terms: EnergyTerms,
    pub max_total: f64,
    pub cap: f64,
    pub passed: bool,
}

pub fn check_energy_bound(diag: &Diagnostics, cap: f64) -> EnergyReport {
    let mut max_terms = [0.0f64; 8];
    let mut max_total = 0.0f64;
    let mut finite = true;
    for e in &diag.energy {
        for (m, v) in max_terms.iter_mut().zip(e.as_array()) {
            finite &= v.is_finite();
            *m = m.max(v);
        }
        max_total = max_total.max(e.total());
    }
    let [increments, curl_dissipation, field, exchange, theta_term, velocity, time_derivative, curl_increments] = max_terms;
    EnergyReport {
        max_terms: EnergyTerms {
            increments,
            curl_dissipation,
            field,
            exchange,
            theta_term,
            velocity,
            time_derivative,
            curl_increments,
        },
        max_total,
        cap,
        passed: finite && max_total <= cap,
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub diagnostics: Diagnostics,
    pub state: SimState,
    pub energy: Option<EnergyReport>,
    pub eddy_setup: Duration,
    pub llg_time: Duration,
    pub eddy_time: Duration,
}

struct Evaluator<'a> {
    disc: &'a Discretization,
}

impl Evaluator<'_> {
    fn record(&self, t: f64, m: &NodalVectorField, h: &EdgeField, lambda: &[f64], iters: (usize, usize)) -> StepRecord {
        let en = evaluate_energies(m, h, &self.disc.fem);
        let lam = (-self.disc.dtn.s.quadratic_form(lambda)).max(0.0).sqrt();
        let mz: Vec<f64> = m.values.iter().map(|v| v[2]).collect();
        let ones = vec![1.0; mz.len()];
        let mean_mz = crate::scalar::dot(&ones, &self.disc.fem.m_p1.mul_vec(&mz));
        let max_m_norm = m.values.iter().map(|&v| norm(v)).fold(0.0, f64::max);
        StepRecord {
            t,
            grad_m_l2: en.grad_m_l2,
            h_l2: en.h_l2,
            curl_h_l2: en.curl_h_l2,
            h_hcurl: (en.h_l2 * en.h_l2 + en.curl_h_l2 * en.curl_h_l2).sqrt(),
            lambda_h12: lam,
            mean_mz,
            max_m_norm,
            gmres_llg: iters.0,
            gmres_eddy: iters.1,
        }
    }

    fn lambda_sq(&self, lambda: &[f64]) -> f64 {
        -self.disc.dtn.s.quadratic_form(lambda)
    }
}

/// Builds the discretization and runs.
pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let disc = Discretization::new(cfg.n, cfg.quad_order)?;
    let state = initialize(cfg, &disc)?;
    run_from(cfg, &disc, state, |_, _| {})
}

/// Runs `cfg.num_steps()` steps from `state`, calling `observer` after every step.
pub fn run_from(
    cfg: &SimConfig,
    disc: &Discretization,
    mut state: SimState,
    mut observer: impl FnMut(&SimState, &StepRecord),
) -> Result<RunOutput> {
    cfg.validate()?;
    let h = disc.mesh.mesh_size_h();
    if cfg.theta <= 0.5 && cfg.k > h * h {
        warn!("theta = {} <= 1/2 with k = {} > h^2 = {}: stability needs k = o(h^2)", cfg.theta, cfg.k, h * h);
    }
    let t_setup = Instant::now();
    let eddy: EddySystem = assemble_eddy_system(&disc.space, &disc.fem, &disc.dtn, cfg.eddy_params())?;
    let eddy_setup = t_setup.elapsed();
    let llg_params = cfg.llg_params();
    let ev = Evaluator { disc };
    let n_steps = cfg.num_steps();
    let k = cfg.k;
    let nv = disc.mesh.num_vertices();

    let (mut h_cur, lam_cur) = state.fields(&disc.space)?;
    let mut lam_cur = lam_cur.values;
    let mut diag = Diagnostics { magnitude_ledger: vec![0.0; nv], ..Default::default() };
    let rec0 = ev.record(state.step as f64 * k, &state.m, &h_cur, &lam_cur, (0, 0));
    let mut sums = EnergyTerms::default();
    let field_energy = |r: &StepRecord, lam: &[f64]| r.h_hcurl * r.h_hcurl + ev.lambda_sq(lam);
    diag.energy.push(EnergyTerms { field: field_energy(&rec0, &lam_cur), exchange: rec0.grad_m_l2.powi(2), ..sums });
    diag.records.push(rec0);
    let (mut llg_time, mut eddy_time) = (Duration::ZERO, Duration::ZERO);

    for _ in 0..n_steps {
        let i = state.step;
        let wrap = |e: Error| Error::Step { step: i, source: Box::new(e) };
        let t0 = Instant::now();
        let frame = build_tangent_frame(&state.m).map_err(wrap)?;
        let llg = solve_llg_step(&disc.mesh, &state.m, &h_cur, &frame, &disc.fem, &llg_params).map_err(wrap)?;
        let m_new = update_magnetization(&state.m, &llg.v, k);
        let t1 = Instant::now();
        let ed = eddy_step(&eddy, &state.x, &llg.v).map_err(wrap)?;
        let t2 = Instant::now();
        llg_time += t1 - t0;
        eddy_time += t2 - t1;

        let (h_new, lam_new) = embed(&ed.x, &disc.space)?;
        let lam_new = lam_new.values;
        let dh: Vec<f64> = h_new.coeffs.iter().zip(&h_cur.coeffs).map(|(a, b)| a - b).collect();
        let dl: Vec<f64> = lam_new.iter().zip(&lam_cur).map(|(a, b)| a - b).collect();
        let dh_sq = disc.fem.m_nd.quadratic_form(&dh);
        let dl_sq = ev.lambda_sq(&dl);
        let curl_new_sq = disc.fem.c_nd.quadratic_form(&h_new.coeffs);
        let curl_dh_sq = disc.fem.c_nd.quadratic_form(&dh);
        let v_sq = vector_form(&disc.fem.m_p1, &llg.v, &llg.v);
        let grad_v_sq = vector_form(&disc.fem.k_p1, &llg.v, &llg.v);
        sums.increments += dh_sq + dl_sq;
        sums.curl_dissipation += k * curl_new_sq;
        sums.theta_term += (2.0 * cfg.theta - 1.0).max(0.0) * k * k * grad_v_sq;
        sums.velocity += k * v_sq;
        sums.time_derivative += (dh_sq + dl_sq) / k;
        sums.curl_increments += curl_dh_sq;
        for (acc, v) in diag.magnitude_ledger.iter_mut().zip(&llg.v.values) {
            *acc += k * k * crate::geometry::dot(*v, *v);
        }

        state = SimState { step: i + 1, m: m_new, x: ed.x, v_last: Some(llg.v) };
        let rec = ev.record(state.step as f64 * k, &state.m, &h_new, &lam_new, (llg.iterations, ed.iterations));
        let finite = [rec.grad_m_l2, rec.h_l2, rec.curl_h_l2, rec.lambda_h12, rec.mean_mz, rec.max_m_norm]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NanDetected { step: i });
        }
        diag.energy.push(EnergyTerms { field: field_energy(&rec, &lam_new), exchange: rec.grad_m_l2.powi(2), ..sums });
        observer(&state, &rec);
        diag.records.push(rec);
        h_cur = h_new;
        lam_cur = lam_new;
    }
    info!("completed {} steps (llg {:?}, eddy {:?})", n_steps, llg_time, eddy_time);

    let energy = cfg.energy_cap.map(|cap| check_energy_bound(&diag, cap));
    if let Some(report) = &energy {
        if !report.passed {
            let j = diag.energy.iter().position(|e| !(e.total() <= report.cap)).unwrap_or(0);
            return Err(Error::EnergyBound { step: j, value: report.max_total, cap: report.cap });
        }
    }
    Ok(RunOutput { diagnostics: diag, state, energy, eddy_setup, llg_time, eddy_time })
}

/// Distance between two nodal fields in the discrete `H¹` norm.
pub fn h1_distance(a: &NodalVectorField, b: &NodalVectorField, fem: &FemMatrices) -> f64 {
    let d = NodalVectorField { values: a.values.iter().zip(&b.values).map(|(&x, &y)| sub(x, y)).collect() };
    (vector_form(&fem.m_p1, &d, &d) + vector_form(&fem.k_p1, &d, &d)).max(0.0).sqrt()
}
