//! `key=value` run configuration.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::simulator::{default_ce, InitialData, SimConfig, DEFAULT_MU0};

pub const VALID_KEYS: [&str; 13] =
    ["n", "T", "k", "theta", "alpha", "Ce", "mu0", "sigma", "init", "gmres_tol", "quad_order", "out_dir", "energy_cap"];

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::config(Some(line), format!("`{key}`: cannot parse `{v}` as a number")))?;
    if !x.is_finite() {
        return Err(Error::config(Some(line), format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn positive(line: usize, key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(line, key, v)?;
    if !(x > 0.0) {
        return Err(Error::config(Some(line), format!("`{key}` must be positive, got {x}")));
    }
    Ok(x)
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::config(Some(line), format!("`{key}`: cannot parse `{v}` as a non-negative integer")))
}

/// Parses a configuration; `#` starts a comment. Unspecified keys take the standard-problem values.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut n = None;
    let mut t_final = None;
    let mut k = None;
    let mut theta = 1.0;
    let mut alpha = 0.5;
    let mut ce = None;
    let mut mu0 = DEFAULT_MU0;
    let mut sigma = 1.0;
    let mut init = InitialData::Mumag1;
    let mut gmres_tol = SimConfig::new(1, 1.0, 1.0).gmres_tol;
    let mut quad_order = 4;
    let mut out_dir = None;
    let mut energy_cap = None;
    let mut seen: Vec<&str> = Vec::new();
    let mut line_count = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        line_count = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::config(Some(line), format!("expected `key=value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let Some(&known) = VALID_KEYS.iter().find(|&&k| k == key) else {
            return Err(Error::config(
                Some(line),
                format!("unknown key `{key}`; valid keys are: {}", VALID_KEYS.join(", ")),
            ));
        };
        if seen.contains(&known) {
            return Err(Error::config(Some(line), format!("duplicate key `{key}`")));
        }
        seen.push(known);
        match known {
            "n" => {
                let v = parse_usize(line, key, value)?;
                if v == 0 {
                    return Err(Error::config(Some(line), "`n` must be >= 1"));
                }
                n = Some(v);
            }
            "T" => t_final = Some(positive(line, key, value)?),
            "k" => k = Some(positive(line, key, value)?),
            "theta" => {
                let v = parse_f64(line, key, value)?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::config(Some(line), format!("`theta` = {v} not in [0, 1]")));
                }
                theta = v;
            }
            "alpha" => alpha = positive(line, key, value)?,
            "Ce" => ce = Some(positive(line, key, value)?),
            "mu0" => mu0 = positive(line, key, value)?,
            "sigma" => sigma = positive(line, key, value)?,
            "init" => {
                init = match value {
                    "mumag1" => InitialData::Mumag1,
                    "uniform" => InitialData::Uniform,
                    other => {
                        return Err(Error::config(Some(line), format!("`init` must be mumag1 or uniform, got `{other}`")))
                    }
                }
            }
            "gmres_tol" => {
                let v = positive(line, key, value)?;
                if v >= 1.0 {
                    return Err(Error::config(Some(line), "`gmres_tol` must be below 1"));
                }
                gmres_tol = v;
            }
            "quad_order" => {
                let v = parse_usize(line, key, value)?;
                if v == 0 {
                    return Err(Error::config(Some(line), "`quad_order` must be >= 1"));
                }
                quad_order = v;
            }
            "out_dir" => {
                if value.is_empty() {
                    return Err(Error::config(Some(line), "`out_dir` is empty"));
                }
                out_dir = Some(PathBuf::from(value));
            }
            "energy_cap" => energy_cap = Some(positive(line, key, value)?),
            _ => unreachable!(),
        }
    }
    let end = Some(line_count + 1);
    let missing = |key: &str| Error::config(end, format!("missing required key `{key}`"));
    let cfg = SimConfig {
        n: n.ok_or_else(|| missing("n"))?,
        t_final: t_final.ok_or_else(|| missing("T"))?,
        k: k.ok_or_else(|| missing("k"))?,
        theta,
        alpha,
        ce: ce.unwrap_or_else(|| default_ce(mu0)),
        mu0,
        sigma,
        init,
        gmres_tol,
        quad_order,
        out_dir,
        energy_cap,
    };
    cfg.validate().map_err(|e| match e {
        Error::InvalidArgument(m) => Error::config(None, m),
        other => other,
    })?;
    Ok(cfg)
}

/// Writes every key explicitly; `parse_config` inverts it exactly.
pub fn serialize_config(cfg: &SimConfig) -> String {
    let mut s = format!(
        "n={}\nT={:?}\nk={:?}\ntheta={:?}\nalpha={:?}\nCe={:?}\nmu0={:?}\nsigma={:?}\ninit={}\ngmres_tol={:?}\nquad_order={}\n",
        cfg.n,
        cfg.t_final,
        cfg.k,
        cfg.theta,
        cfg.alpha,
        cfg.ce,
        cfg.mu0,
        cfg.sigma,
        cfg.init.name(),
        cfg.gmres_tol,
        cfg.quad_order
    );
    if let Some(d) = &cfg.out_dir {
        s.push_str(&format!("out_dir={}\n", d.display()));
    }
    if let Some(c) = cfg.energy_cap {
        s.push_str(&format!("energy_cap={c:?}\n"));
    }
    s
}
