use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;

use ellg::fem::{EdgeField, NodalVectorField};
use ellg::io::{
    diagnostics_csv, parse_config, parse_diagnostics_csv, serialize_config, vtk_string, write_diagnostics_csv,
    CSV_HEADER,
};
use ellg::mesh::build_cube_mesh;
use ellg::simulator::{run, InitialData, SimConfig};

fn config_strategy() -> impl Strategy<Value = SimConfig> {
    (
        1usize..6,
        1usize..200,
        prop::sample::select(vec![0.001, 0.002, 0.01, 0.025, 0.5]),
        0.0f64..=1.0,
        1e-3f64..10.0,
        1e-20f64..1.0,
        1e-7f64..1.0,
        1e-3f64..100.0,
        (any::<bool>(),
        1e-14f64..1e-2,
        1usize..10,
        prop::option::of(1.0f64..1e6),
        prop::option::of("[a-z_/]{1,12}")),
    )
        .prop_map(|(n, steps, k, theta, alpha, ce, mu0, sigma, (uni, tol, q, cap, dir))| SimConfig {
            n,
            t_final: steps as f64 * k,
            k,
            theta,
            alpha,
            ce,
            mu0,
            sigma,
            init: if uni { InitialData::Uniform } else { InitialData::Mumag1 },
            gmres_tol: tol,
            quad_order: q,
            out_dir: dir.map(PathBuf::from),
            energy_cap: cap,
        })
}

proptest! {
    #[test]
    fn config_round_trip(cfg in config_strategy()) {
        prop_assume!(cfg.validate().is_ok());
        let text = serialize_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}

#[test]
fn duplicate_and_malformed_lines() {
    assert!(parse_config("n=2\nn=3\nT=1\nk=1").is_err());
    assert!(parse_config("n=2\nT\nk=1").is_err());
    assert!(parse_config("n=two\nT=1\nk=1").is_err());
    assert!(parse_config("n=2\nT=1\nk=1\ninit=vortex").is_err());
}

#[test]
fn csv_round_trip_and_shape() {
    let out = run(&SimConfig::new(2, 0.03, 0.01)).unwrap();
    let text = diagnostics_csv(&out.diagnostics);
    assert!(text.starts_with(CSV_HEADER));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 4);
    let back = parse_diagnostics_csv(&text).unwrap();
    assert_eq!(back, out.diagnostics.records);
}

#[test]
fn stationary_csv_has_zero_exchange_column() {
    let cfg = SimConfig { init: InitialData::Uniform, ..SimConfig::new(1, 0.02, 0.01) };
    let out = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    write_diagnostics_csv(&out.diagnostics, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(1).unwrap().parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn vtk_single_cube() {
    let mesh = build_cube_mesh(1).unwrap();
    let m = NodalVectorField::constant(8, [0.0, 0.0, 1.0]);
    let h = EdgeField::zeros(mesh.num_edges());
    let text = vtk_string(&mesh, &m, &h, None).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# vtk DataFile Version 3.0");
    assert!(text.contains("POINTS 8 double"));
    assert!(text.contains("CELLS 6 30"));
    let types = lines.iter().position(|l| *l == "CELL_TYPES 6").unwrap();
    assert!(lines[types + 1..types + 7].iter().all(|l| *l == "10"));
    let mpos = lines.iter().position(|l| *l == "VECTORS m double").unwrap();
    for l in &lines[mpos + 1..mpos + 9] {
        let v: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v, vec![0.0, 0.0, 1.0]);
    }
    assert!(text.contains("VECTORS H_nodal double"));
    assert!(text.contains("CELL_DATA 6\nVECTORS H_curl_recovered double"));
    assert!(!text.contains("VECTORS E double"));
    let e = vec![[0.0; 3]; 6];
    assert!(vtk_string(&mesh, &m, &h, Some(&e)).unwrap().contains("VECTORS E double"));
    assert!(vtk_string(&mesh, &m, &h, Some(&e[..5])).is_err());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ellg"))
}

#[test]
fn simulate_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n=2\nT=0.03\nk=0.01\n").unwrap();
    let mut files = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = cli().arg("simulate").arg(&cfg).arg("--out").arg(&out).env("RUST_LOG", "error").output().unwrap().status;
        assert!(status.success());
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        for f in manifest["files"].as_array().unwrap() {
            assert!(PathBuf::from(f.as_str().unwrap()).exists());
        }
        files.push((std::fs::read(out.join("diagnostics.csv")).unwrap(), std::fs::read(out.join("final.vtk")).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn config_errors_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n=2\nT=1\nk=0.1\ntheta=1.5\n").unwrap();
    let status = cli().arg("simulate").arg(&cfg).env("RUST_LOG", "off").output().unwrap().status;
    assert_eq!(status.code(), Some(3));
    let status = cli().arg("simulate").arg(dir.path().join("missing.cfg")).env("RUST_LOG", "off").output().unwrap().status;
    assert_eq!(status.code(), Some(3));
}

#[test]
fn solver_failure_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.cfg");
    // below the attainable residual of the eddy system
    std::fs::write(&cfg, "n=3\nT=0.01\nk=0.01\ngmres_tol=1e-16\n").unwrap();
    let status = cli().arg("simulate").arg(&cfg).arg("--out").arg(dir.path()).env("RUST_LOG", "off").output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}
