//! Per-step diagnostics as CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::simulator::{Diagnostics, StepRecord};

pub const CSV_HEADER: &str = "t,grad_m_l2,H_l2,curl_H_l2,H_hcurl,lambda_h12,mean_mz,max_m_norm,gmres_llg,gmres_eddy";

pub fn diagnostics_csv(diag: &Diagnostics) -> String {
    let mut s = String::with_capacity(200 * (diag.records.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &diag.records {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.t, r.grad_m_l2, r.h_l2, r.curl_h_l2, r.h_hcurl, r.lambda_h12, r.mean_mz, r.max_m_norm, r.gmres_llg, r.gmres_eddy
        );
    }
    s
}

pub fn write_diagnostics_csv(diag: &Diagnostics, path: &Path) -> Result<()> {
    std::fs::write(path, diagnostics_csv(diag))?;
    Ok(())
}

/// Inverse of [`diagnostics_csv`].
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<StepRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidArgument("unexpected CSV header".into()));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let bad = || Error::InvalidArgument(format!("malformed CSV row {}", i + 2));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 10 {
            return Err(bad());
        }
        let f = |j: usize| cols[j].parse::<f64>().map_err(|_| bad());
        let u = |j: usize| cols[j].parse::<usize>().map_err(|_| bad());
        out.push(StepRecord {
            t: f(0)?,
            grad_m_l2: f(1)?,
            h_l2: f(2)?,
            curl_h_l2: f(3)?,
            h_hcurl: f(4)?,
            lambda_h12: f(5)?,
            mean_mz: f(6)?,
            max_m_norm: f(7)?,
            gmres_llg: u(8)?,
            gmres_eddy: u(9)?,
        });
    }
    Ok(out)
}
