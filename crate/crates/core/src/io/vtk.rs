//! Legacy ASCII VTK output of a state.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::{elementwise_curl, nodal_average, EdgeField, NodalVectorField};
use crate::geometry::Vec3;
use crate::mesh::Mesh;

const VTK_TETRA: u8 = 10;

fn vectors(s: &mut String, name: &str, data: &[Vec3]) {
    let _ = writeln!(s, "VECTORS {name} double");
    for v in data {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
    }
}

/// Renders the mesh with `m`, the nodally averaged field `H_nodal`, the elementwise curl
/// `H_curl_recovered`, and optionally the cellwise `E`.
pub fn vtk_string(mesh: &Mesh, m: &NodalVectorField, h: &EdgeField, e_field: Option<&[Vec3]>) -> Result<String> {
    let nv = mesh.num_vertices();
    let nt = mesh.num_tets();
    if m.len() != nv {
        return Err(Error::DimensionMismatch { expected: nv, found: m.len() });
    }
    if h.coeffs.len() != mesh.num_edges() {
        return Err(Error::DimensionMismatch { expected: mesh.num_edges(), found: h.coeffs.len() });
    }
    if let Some(e) = e_field {
        if e.len() != nt {
            return Err(Error::DimensionMismatch { expected: nt, found: e.len() });
        }
    }
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\nellg state\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {nv} double");
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
    }
    let _ = writeln!(s, "CELLS {nt} {}", 5 * nt);
    for t in mesh.tets() {
        let _ = writeln!(s, "4 {} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        let _ = writeln!(s, "{VTK_TETRA}");
    }
    let _ = writeln!(s, "POINT_DATA {nv}");
    vectors(&mut s, "m", &m.values);
    vectors(&mut s, "H_nodal", &nodal_average(h, mesh));
    let _ = writeln!(s, "CELL_DATA {nt}");
    vectors(&mut s, "H_curl_recovered", &elementwise_curl(h, mesh));
    if let Some(e) = e_field {
        vectors(&mut s, "E", e);
    }
    Ok(s)
}

pub fn write_vtk(mesh: &Mesh, m: &NodalVectorField, h: &EdgeField, e_field: Option<&[Vec3]>, path: &Path) -> Result<()> {
    std::fs::write(path, vtk_string(mesh, m, h, e_field)?)?;
    Ok(())
}
