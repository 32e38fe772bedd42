use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use ellg::convergence::{run_convergence_study, Axis};
use ellg::eddy::recover_e_field;
use ellg::io::{build_id, parse_config, serialize_config, write_diagnostics_csv, write_vtk, PhaseTimings, RunManifest};
use ellg::selftest::{sphere_check, structural_checks};
use ellg::simulator::{initialize, run_from, Discretization};
use ellg::{Error, Result};

#[derive(Parser)]
#[command(name = "ellg", version, about = "Eddy-current LLG solver on the unit cube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write CSV, VTK and a manifest.
    Simulate {
        config: PathBuf,
        /// Overrides `out_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-convergence study against a finer reference run.
    Converge {
        config: PathBuf,
        #[arg(long)]
        axis: String,
        /// Comma-separated parameters (`n` for h, `k` for k).
        #[arg(long, value_delimiter = ',')]
        params: Vec<f64>,
        #[arg(long = "ref")]
        reference: f64,
    },
    /// Sphere boundary element oracles and structural invariants.
    Selftest,
}

fn read_config(path: &Path) -> Result<ellg::simulator::SimConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { line: None, message: format!("cannot read {}: {e}", path.display()) })?;
    parse_config(&text)
}

fn simulate(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let cfg = read_config(config)?;
    let dir = out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("ellg_out"));
    std::fs::create_dir_all(&dir)?;
    let disc = Discretization::new(cfg.n, cfg.quad_order)?;
    info!("mesh n = {}: {} vertices, {} edges, {} tets", cfg.n, disc.mesh.num_vertices(), disc.mesh.num_edges(), disc.mesh.num_tets());
    let state = initialize(&cfg, &disc)?;
    let steps = cfg.num_steps();
    let out = run_from(&cfg, &disc, state, |s, r| {
        if s.step % 50 == 0 || s.step == steps {
            info!("step {}/{steps}: t = {:.4}, mean m_z = {:.6}", s.step, r.t, r.mean_mz);
        }
    })?;

    let csv = dir.join("diagnostics.csv");
    write_diagnostics_csv(&out.diagnostics, &csv)?;
    let (h, _) = out.state.fields(&disc.space)?;
    let e = recover_e_field(&h, cfg.sigma, &disc.mesh)?;
    let vtk = dir.join("final.vtk");
    write_vtk(&disc.mesh, &out.state.m, &h, Some(&e), &vtk)?;
    if let Some(report) = &out.energy {
        info!("energy bound: max total {:.6e} <= cap {:.6e}", report.max_total, report.cap);
    }
    let manifest = RunManifest {
        config: serialize_config(&cfg),
        build_id: build_id(),
        steps,
        timings: PhaseTimings {
            mesh_and_fem_s: disc.timings.mesh_and_fem.as_secs_f64(),
            bem_s: disc.timings.bem.as_secs_f64(),
            eddy_setup_s: out.eddy_setup.as_secs_f64(),
            llg_solves_s: out.llg_time.as_secs_f64(),
            eddy_solves_s: out.eddy_time.as_secs_f64(),
        },
        files: vec![csv, vtk],
    };
    manifest.write(&dir.join("manifest.json"))?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn converge(config: &Path, axis: &str, params: &[f64], reference: f64) -> Result<()> {
    let cfg = read_config(config)?;
    let axis: Axis = axis.parse().map_err(|e: Error| Error::Config { line: None, message: e.to_string() })?;
    let study = run_convergence_study(&cfg, axis, params, reference)?;
    print!("{}", study.table());
    Ok(())
}

fn selftest() -> Result<bool> {
    let mut ok = true;
    let tol = [0.10, 0.05, 0.025];
    let mut prev = [f64::INFINITY; 2];
    for level in 1..=3 {
        let r = sphere_check(level, 4)?;
        let pass = r.v1_error < tol[level - 1]
            && r.dtn_residual[0] < prev[0]
            && r.dtn_residual[1] < prev[1]
            && r.min_eig_neg_s > 0.0;
        ok &= pass;
        println!(
            "{} sphere level {level}: V1 error {:.3e}, DtN residual {:.3e} / {:.3e}, min eig(-S) {:.3e}",
            if pass { "PASS" } else { "FAIL" },
            r.v1_error,
            r.dtn_residual[0],
            r.dtn_residual[1],
            r.min_eig_neg_s
        );
        prev = r.dtn_residual;
    }
    for c in structural_checks(2)? {
        ok &= c.passed();
        println!("{c}");
    }
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Ok(t) = std::env::var("ELLG_THREADS") {
        match t.parse::<usize>() {
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => {
                eprintln!("error: ELLG_THREADS must be a positive integer");
                return ExitCode::from(3);
            }
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, out),
        Command::Converge { config, axis, params, reference } => converge(&config, &axis, &params, reference),
        Command::Selftest => selftest().and_then(|ok| if ok { Ok(()) } else { Err(Error::Assembly("selftest failed".into())) }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                ExitCode::from(2)
            } else if matches!(e, Error::Config { .. }) {
                ExitCode::from(3)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
