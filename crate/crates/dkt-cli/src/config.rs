//! Run configuration: angle expressions, config-file parsing and the
//! resolved parameter set echoed into every metadata sidecar.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// Evaluates an angle expression: factors joined by `*` and `/`, where each
/// factor is a number, `pi`, or `j` (the configured spin). Examples:
/// `0.37`, `pi/2`, `j*pi/4`, `1.001*j*pi/2`, `-pi/4`.
pub fn parse_angle(expr: &str, j: f64) -> Result<f64> {
    let s = expr.trim();
    if s.is_empty() {
        bail!("empty angle expression");
    }
    let (mut rest, mut sign) = (s, 1.0);
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1.0;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    let mut value = 1.0f64;
    let mut op = '*';
    for token in rest.split_inclusive(['*', '/']) {
        let (factor_str, next_op) = match token.strip_suffix(['*', '/']) {
            Some(f) => (f, token.chars().last().unwrap()),
            None => (token, '*'),
        };
        let factor = match factor_str.trim() {
            "pi" | "PI" => PI,
            "j" | "J" => j,
            num => num
                .parse::<f64>()
                .with_context(|| format!("bad factor `{num}` in angle `{expr}`"))?,
        };
        match op {
            '*' => value *= factor,
            '/' => {
                if factor == 0.0 {
                    bail!("division by zero in angle `{expr}`");
                }
                value /= factor;
            }
            _ => unreachable!(),
        }
        op = next_op;
    }
    Ok(sign * value)
}

/// Simple `key = value` config file; `#` starts a comment.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {} of {}: expected `key = value`", lineno + 1, path.display()))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Fully resolved kick parameterization, echoed into metadata.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedParams {
    pub j: f64,
    pub k: f64,
    pub kprime: f64,
    pub kr: f64,
    pub ktheta: f64,
    pub p: f64,
}

/// Resolves (k, k') / (k_r, k_theta) from exactly one supplied pair.
pub fn resolve_kicks(
    j: f64,
    k: Option<&str>,
    kprime: Option<&str>,
    kr: Option<&str>,
    ktheta: Option<&str>,
    p: &str,
) -> Result<ResolvedParams> {
    let physical = k.is_some() || kprime.is_some();
    let transformed = kr.is_some() || ktheta.is_some();
    let p = parse_angle(p, j)?;
    match (physical, transformed) {
        (true, true) => bail!("supply either --k/--kprime or --kr/--ktheta, not both"),
        (false, false) => bail!("supply one parameterization: --k/--kprime or --kr/--ktheta"),
        (true, false) => {
            let k = parse_angle(k.ok_or_else(|| anyhow!("--k requires --kprime"))?, j)?;
            let kprime = parse_angle(kprime.ok_or_else(|| anyhow!("--kprime requires --k"))?, j)?;
            let (kr, ktheta) = dkt_core::transform_kicks(k, kprime);
            Ok(ResolvedParams { j, k, kprime, kr, ktheta, p })
        }
        (false, true) => {
            let kr = parse_angle(kr.ok_or_else(|| anyhow!("--kr requires --ktheta"))?, j)?;
            let ktheta = parse_angle(ktheta.ok_or_else(|| anyhow!("--ktheta requires --kr"))?, j)?;
            let (k, kprime) = dkt_core::floquet::physical_kicks(kr, ktheta);
            Ok(ResolvedParams { j, k, kprime, kr, ktheta, p })
        }
    }
}

/// Grid dimensions from a `64x64`-style string.
pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("grid must look like 64x64, got `{s}`"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}
