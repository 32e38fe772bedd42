//! Self-convergence studies against a finer reference run.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{evaluate_edge_field, EdgeField, FemMatrices, NodalVectorField};
use crate::geometry::{dot, lerp, sub, Vec3};
use crate::mesh::Mesh;
use crate::simulator::{h1_distance, initialize, run_from, Discretization, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Mesh refinement; parameters are cells per axis.
    H,
    /// Time-step refinement on a fixed mesh; parameters are step sizes.
    K,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" => Ok(Axis::H),
            "k" => Ok(Axis::K),
            _ => Err(Error::InvalidArgument(format!("axis must be h or k, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    /// Parameter as given (`n` or `k`).
    pub param: f64,
    /// Discretization size used for the fit (`1/n` or `k`).
    pub size: f64,
    /// `max_i ‖m_ref(t_i) − m(t_i)‖_{H¹}`.
    pub e_m: f64,
    /// `(k Σ_i ‖H_ref(t_i) − H(t_i)‖²_{H(curl)})^{1/2}`.
    pub e_h: f64,
    /// Final time actually reached.
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub axis: Axis,
    pub reference: f64,
    /// Sorted from coarse to fine.
    pub rows: Vec<ConvergenceRow>,
    pub slope_m: f64,
    pub slope_h: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

struct Trajectory {
    m: Vec<NodalVectorField>,
    h: Vec<EdgeField>,
}

fn trajectory(cfg: &SimConfig, disc: &Discretization) -> Result<Trajectory> {
    let state = initialize(cfg, disc)?;
    let (h0, _) = state.fields(&disc.space)?;
    let mut traj = Trajectory { m: vec![state.m.clone()], h: vec![h0] };
    let mut err = None;
    run_from(cfg, disc, state, |s, _| match s.fields(&disc.space) {
        Ok((h, _)) => {
            traj.m.push(s.m.clone());
            traj.h.push(h);
        }
        Err(e) => err = Some(e),
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(traj),
    }
}

fn hcurl_distance(a: &EdgeField, b: &EdgeField, fem: &FemMatrices) -> f64 {
    let d: Vec<f64> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
    (fem.m_nd.quadratic_form(&d) + fem.c_nd.quadratic_form(&d)).max(0.0).sqrt()
}

/// Evaluation of coarse discrete fields on a nested fine mesh.
struct Prolongation {
    nodes: Vec<(usize, [f64; 4])>,
    /// Per fine edge: coarse tet, barycentrics of the two Gauss points, edge vector.
    edges: Vec<(usize, [[f64; 4]; 2], Vec3)>,
}

impl Prolongation {
    fn new(coarse: &Mesh, fine: &Mesh) -> Result<Self> {
        let outside = |p: Vec3| Error::InvalidArgument(format!("point {p:?} of the fine mesh lies outside the coarse mesh"));
        let nodes = fine
            .vertices()
            .par_iter()
            .map(|&p| coarse.locate(p).ok_or_else(|| outside(p)))
            .collect::<Result<Vec<_>>>()?;
        let g = 0.5 / 3f64.sqrt();
        let edges = fine
            .edges()
            .par_iter()
            .map(|&[a, b]| {
                let (pa, pb) = (fine.vertices()[a], fine.vertices()[b]);
                let mid = lerp(pa, pb, 0.5);
                let (t, _) = coarse.locate(mid).ok_or_else(|| outside(mid))?;
                let q = [coarse.barycentric(t, lerp(pa, pb, 0.5 - g)), coarse.barycentric(t, lerp(pa, pb, 0.5 + g))];
                Ok((t, q, sub(pb, pa)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { nodes, edges })
    }

    fn nodal(&self, m: &NodalVectorField, coarse: &Mesh) -> NodalVectorField {
        let values = self
            .nodes
            .iter()
            .map(|&(t, l)| {
                let verts = coarse.tets()[t];
                let mut v = [0.0; 3];
                for (i, &z) in verts.iter().enumerate() {
                    for c in 0..3 {
                        v[c] += l[i] * m.values[z][c];
                    }
                }
                v
            })
            .collect();
        NodalVectorField { values }
    }

    fn edge(&self, h: &EdgeField, coarse: &Mesh) -> EdgeField {
        let coeffs = self
            .edges
            .iter()
            .map(|&(t, q, tau)| {
                q.iter().map(|&l| 0.5 * dot(evaluate_edge_field(h, coarse, t, l), tau)).sum()
            })
            .collect();
        EdgeField { coeffs }
    }
}

fn sorted_params(params: &[f64]) -> Result<Vec<f64>> {
    if params.is_empty() {
        return Err(Error::InvalidArgument("empty parameter list".into()));
    }
    let mut p = params.to_vec();
    if p.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidArgument("parameters must be positive".into()));
    }
    p.sort_by(|a, b| a.total_cmp(b));
    if p.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("parameters must be distinct".into()));
    }
    Ok(p)
}

fn as_count(v: f64) -> Result<usize> {
    if v.fract() != 0.0 || v < 1.0 {
        return Err(Error::InvalidArgument(format!("mesh parameter {v} is not a positive integer")));
    }
    Ok(v as usize)
}

/// Integer ratio `a / b`, or `None` if `b` does not divide `a`.
fn ratio(a: f64, b: f64) -> Option<usize> {
    let r = (a / b).round();
    ((r * b - a).abs() <= 1e-9 * a && r >= 1.0).then_some(r as usize)
}

/// Runs every parameter and the reference, and tabulates errors against the reference.
///
/// On the k-axis a step that does not divide `T` runs to the last grid time before `T`;
/// errors are sampled on each run's own time grid. On the h-axis coarse solutions are
/// prolonged to the reference mesh, whose `n` must be a multiple of every parameter.
pub fn run_convergence_study(base: &SimConfig, axis: Axis, params: &[f64], reference: f64) -> Result<ConvergenceStudy> {
    base.validate()?;
    let params = sorted_params(params)?;
    let mut base = base.clone();
    base.energy_cap = None;
    base.out_dir = None;
    let rows = match axis {
        Axis::K => {
            let finest = params[0];
            if !(reference < finest) {
                return Err(Error::InvalidArgument(format!("reference k = {reference} must be below every k")));
            }
            let disc = Discretization::new(base.n, base.quad_order)?;
            let reference_traj = trajectory(&SimConfig { k: reference, ..base.clone() }, &disc)?;
            params
                .iter()
                .rev()
                .map(|&k| {
                    let r = ratio(k, reference).ok_or_else(|| {
                        Error::InvalidArgument(format!("reference step {reference} does not divide k = {k}"))
                    })?;
                    let steps = ((base.t_final / k) * (1.0 + 1e-12)).floor() as usize;
                    if steps == 0 {
                        return Err(Error::InvalidArgument(format!("k = {k} exceeds T = {}", base.t_final)));
                    }
                    let cfg = SimConfig { k, t_final: steps as f64 * k, ..base.clone() };
                    let traj = trajectory(&cfg, &disc)?;
                    let mut e_m = 0.0f64;
                    let mut sum_h = 0.0;
                    for i in 0..=steps {
                        let j = i * r;
                        e_m = e_m.max(h1_distance(&reference_traj.m[j], &traj.m[i], &disc.fem));
                        if i > 0 {
                            sum_h += hcurl_distance(&reference_traj.h[j], &traj.h[i], &disc.fem).powi(2);
                        }
                    }
                    Ok(ConvergenceRow { param: k, size: k, e_m, e_h: (k * sum_h).sqrt(), t_end: cfg.t_final })
                })
                .collect::<Result<Vec<_>>>()?
        }
        Axis::H => {
            let n_ref = as_count(reference)?;
            let ns = params.iter().map(|&v| as_count(v)).collect::<Result<Vec<_>>>()?;
            if ns.iter().any(|&n| n >= n_ref) {
                return Err(Error::InvalidArgument(format!("reference n = {n_ref} must exceed every n")));
            }
            if let Some(&n) = ns.iter().find(|&&n| n_ref % n != 0) {
                return Err(Error::InvalidArgument(format!("mesh n = {n} is not nested in reference n = {n_ref}")));
            }
            let fine = Discretization::new(n_ref, base.quad_order)?;
            let reference_traj = trajectory(&SimConfig { n: n_ref, ..base.clone() }, &fine)?;
            ns.iter()
                .map(|&n| {
                    let disc = Discretization::new(n, base.quad_order)?;
                    let traj = trajectory(&SimConfig { n, ..base.clone() }, &disc)?;
                    let pro = Prolongation::new(&disc.mesh, &fine.mesh)?;
                    let mut e_m = 0.0f64;
                    let mut sum_h = 0.0;
                    for (i, (m, h)) in traj.m.iter().zip(&traj.h).enumerate() {
                        let mp = pro.nodal(m, &disc.mesh);
                        e_m = e_m.max(h1_distance(&reference_traj.m[i], &mp, &fine.fem));
                        if i > 0 {
                            let hp = pro.edge(h, &disc.mesh);
                            sum_h += hcurl_distance(&reference_traj.h[i], &hp, &fine.fem).powi(2);
                        }
                    }
                    Ok(ConvergenceRow {
                        param: n as f64,
                        size: 1.0 / n as f64,
                        e_m,
                        e_h: (base.k * sum_h).sqrt(),
                        t_end: base.t_final,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let sizes: Vec<f64> = rows.iter().map(|r| r.size).collect();
    let (slope_m, slope_h) = if rows.len() >= 2 {
        let em: Vec<f64> = rows.iter().map(|r| r.e_m).collect();
        let eh: Vec<f64> = rows.iter().map(|r| r.e_h).collect();
        (fit_loglog_slope(&sizes, &em), fit_loglog_slope(&sizes, &eh))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ConvergenceStudy { axis, reference, rows, slope_m, slope_h })
}

impl ConvergenceStudy {
    /// Plain-text error table.
    pub fn table(&self) -> String {
        let mut s = format!("{:>12} {:>12} {:>14} {:>14}\n", "param", "t_end", "E_m", "E_H");
        for r in &self.rows {
            s.push_str(&format!("{:>12} {:>12.6} {:>14.6e} {:>14.6e}\n", r.param, r.t_end, r.e_m, r.e_h));
        }
        s.push_str(&format!("slope E_m = {:.4}, slope E_H = {:.4}\n", self.slope_m, self.slope_h));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{interpolate_edge, interpolate_nodal};
    use crate::mesh::build_cube_mesh;

    #[test]
    fn slope_of_power_law() {
        let x = [0.1, 0.2, 0.4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((fit_loglog_slope(&x, &y) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn prolongation_reproduces_linear_fields() {
        let coarse = build_cube_mesh(1).unwrap();
        let fine = build_cube_mesh(2).unwrap();
        let pro = Prolongation::new(&coarse, &fine).unwrap();
        let f = |x: Vec3| [x[0] + 2.0 * x[1], 1.0 - x[2], 0.5];
        let m = pro.nodal(&interpolate_nodal(f, &coarse).unwrap(), &coarse);
        let expect = interpolate_nodal(f, &fine).unwrap();
        for (a, b) in m.values.iter().zip(&expect.values) {
            assert!(crate::geometry::norm(sub(*a, *b)) < 1e-13);
        }
        let g = |_: Vec3| [1.0, -2.0, 0.25];
        let h = pro.edge(&interpolate_edge(g, &coarse), &coarse);
        let expect = interpolate_edge(g, &fine);
        for (a, b) in h.coeffs.iter().zip(&expect.coeffs) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn axis_parse() {
        assert_eq!("h".parse::<Axis>().unwrap(), Axis::H);
        assert!("x".parse::<Axis>().is_err());
    }
}
