//! `dkt` — double-kicked-top simulation toolkit.
//!
//! Subcommands: `certify`, `husimi`, `landscape`, `rate`, `spectral`,
//! `verify`. Flags may also be supplied through `--config FILE`
//! (`key = value` lines); explicit flags win. All angle-valued flags accept
//! expressions in `pi` and `j`, e.g. `--kr "j*pi/2"`.

mod commands;
mod config;
mod output;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use config::{parse_angle, parse_config_file, parse_grid, resolve_kicks, ResolvedParams};

#[derive(Parser)]
#[command(name = "dkt", version, about = "Double kicked top: recurrences, entanglement, spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the projective period of the Floquet operator
    Certify(CertifyArgs),
    /// Husimi fields of a kicked coherent state over n = 0..steps
    Husimi(HusimiArgs),
    /// Long-time-averaged entanglement entropy over an initial-state grid
    Landscape(LandscapeArgs),
    /// Fidelity rate function: time series or k_theta sweep
    Rate(RateArgs),
    /// Quasi-energy degeneracy and spacing-ratio statistics vs references
    Spectral(SpectralArgs),
    /// Run the qubit-space operator identity suite
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Spin quantum number j (integer or half-odd), e.g. 76 or 75.5
    #[arg(long)]
    j: Option<f64>,
    /// First kick strength k (angle expression; pairs with --kprime)
    #[arg(long)]
    k: Option<String>,
    /// Second kick strength k' (angle expression; pairs with --k)
    #[arg(long)]
    kprime: Option<String>,
    /// Transformed kick strength k_r (angle expression; pairs with --ktheta)
    #[arg(long)]
    kr: Option<String>,
    /// Symmetry-breaking parameter k_theta (angle expression)
    #[arg(long)]
    ktheta: Option<String>,
    /// Precession angle p
    #[arg(long)]
    p: Option<String>,
    /// Config file with key = value lines; flags override
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Merged {
    file: BTreeMap<String, String>,
}

impl Merged {
    fn load(path: &Option<PathBuf>) -> Result<Self> {
        let file = match path {
            Some(p) => parse_config_file(p)?,
            None => BTreeMap::new(),
        };
        Ok(Merged { file })
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.file.get(key).cloned())
    }

    fn parse<T>(&self, flag: &Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr + Clone,
        <T as FromStr>::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(Some(v.clone()));
        }
        match self.file.get(key) {
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("config key `{key}`: {e}")),
            None => Ok(None),
        }
    }
}

impl CommonArgs {
    fn resolve(&self, merged: &Merged, default_ktheta: Option<&str>) -> Result<ResolvedParams> {
        let j = merged
            .parse(&self.j, "j")?
            .ok_or_else(|| anyhow!("--j is required"))?;
        let p = merged.string(&self.p, "p").unwrap_or_else(|| "pi/2".into());
        let k = merged.string(&self.k, "k");
        let kprime = merged.string(&self.kprime, "kprime");
        let mut kr = merged.string(&self.kr, "kr");
        let mut ktheta = merged.string(&self.ktheta, "ktheta");
        if let Some(def) = default_ktheta {
            if k.is_none() && kprime.is_none() {
                if ktheta.is_none() {
                    ktheta = Some(def.to_string());
                }
                if kr.is_none() {
                    bail!("--kr is required");
                }
            }
        }
        let _ = &mut kr;
        resolve_kicks(j, k.as_deref(), kprime.as_deref(), kr.as_deref(), ktheta.as_deref(), &p)
    }

    fn out_dir(&self, merged: &Merged) -> Result<PathBuf> {
        self.out
            .clone()
            .or_else(|| merged.file.get("out").map(PathBuf::from))
            .ok_or_else(|| anyhow!("--out is required"))
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Largest power to scan
    #[arg(long)]
    cutoff: Option<u32>,
    /// Residual tolerance for a projective identity
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct HusimiArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial-state polar angle theta_0 (angle expression)
    #[arg(long)]
    theta0: Option<String>,
    /// Initial-state azimuth phi_0 (angle expression)
    #[arg(long)]
    phi0: Option<String>,
    /// Field grid, e.g. 100x100
    #[arg(long)]
    grid: Option<String>,
    /// Number of kicks; fields are written for n = 0..=steps
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct LandscapeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial-state grid, e.g. 64x64
    #[arg(long)]
    grid: Option<String>,
    /// Kicks averaged per initial state
    #[arg(long)]
    steps: Option<usize>,
    /// Cost guard (seconds); exceeding it warns but does not fail
    #[arg(long)]
    budget_seconds: Option<f64>,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial-state polar angle theta_0
    #[arg(long)]
    theta0: Option<String>,
    /// Initial-state azimuth phi_0
    #[arg(long)]
    phi0: Option<String>,
    /// Number of kicks in the average
    #[arg(long)]
    steps: Option<usize>,
    /// Sweep k_theta as start:stop:count (angle expressions for bounds)
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Args)]
struct SpectralArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Spacing-ratio orders, comma separated subset of 1,2,3,4
    #[arg(long)]
    orders: Option<String>,
    /// Ensemble seed (required: reference ensembles are sampled)
    #[arg(long)]
    seed: Option<u64>,
    /// Members per reference ensemble
    #[arg(long)]
    members: Option<usize>,
    /// Levels per Poisson member (default: the Floquet dimension 2j+1)
    #[arg(long)]
    poisson_size: Option<usize>,
    /// GOE matrix dimension
    #[arg(long)]
    goe_dim: Option<usize>,
    /// Analyze the raw spectrum without splitting parity sectors
    #[arg(long)]
    no_parity_split: bool,
    /// Phase clustering tolerance for the degeneracy profile
    #[arg(long)]
    degeneracy_tol: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest qubit count exercised by the suite
    #[arg(long)]
    max_n: Option<usize>,
    /// Perturb one construction angle by 1e-3 to demonstrate sensitivity
    #[arg(long)]
    inject_fault: bool,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Certify(args) => {
            let merged = Merged::load(&args.common.config)?;
            let params = args.common.resolve(&merged, Some("0"))?;
            let cfg = commands::CertifyConfig {
                params,
                cutoff: merged.parse(&args.cutoff, "cutoff")?.unwrap_or(96),
                tolerance: merged.parse(&args.tol, "tol")?.unwrap_or(1e-9),
            };
            commands::cmd_certify(&cfg, &args.common.out_dir(&merged)?)
        }
        Command::Husimi(args) => {
            let merged = Merged::load(&args.common.config)?;
            let params = args.common.resolve(&merged, Some("0"))?;
            let j = params.j;
            let angle = |flag: &Option<String>, key: &str, label: &str| -> Result<f64> {
                merged
                    .string(flag, key)
                    .ok_or_else(|| anyhow!("--{label} is required"))
                    .and_then(|s| parse_angle(&s, j))
            };
            let grid = parse_grid(
                &merged.string(&args.grid, "grid").unwrap_or_else(|| "100x100".into()),
            )?;
            let cfg = commands::HusimiConfig {
                params,
                theta0: angle(&args.theta0, "theta0", "theta0")?,
                phi0: angle(&args.phi0, "phi0", "phi0")?,
                grid,
                steps: merged.parse(&args.steps, "steps")?.unwrap_or(8),
            };
            commands::cmd_husimi(&cfg, &args.common.out_dir(&merged)?)
        }
        Command::Landscape(args) => {
            let merged = Merged::load(&args.common.config)?;
            let params = args.common.resolve(&merged, Some("0"))?;
            let grid = parse_grid(
                &merged.string(&args.grid, "grid").unwrap_or_else(|| "64x64".into()),
            )?;
            let cfg = commands::LandscapeConfig {
                params,
                grid,
                steps: merged.parse(&args.steps, "steps")?.unwrap_or(500),
                budget_seconds: merged.parse(&args.budget_seconds, "budget_seconds")?.unwrap_or(1200.0),
            };
            commands::cmd_landscape(&cfg, &args.common.out_dir(&merged)?)
        }
        Command::Rate(args) => {
            let merged = Merged::load(&args.common.config)?;
            let params = args.common.resolve(&merged, Some("0"))?;
            let j = params.j;
            let angle_or = |flag: &Option<String>, key: &str, default: f64| -> Result<f64> {
                match merged.string(flag, key) {
                    Some(s) => parse_angle(&s, j),
                    None => Ok(default),
                }
            };
            let sweep = match merged.string(&args.sweep, "sweep") {
                Some(spec) => {
                    let parts: Vec<&str> = spec.split(':').collect();
                    if parts.len() != 3 {
                        bail!("--sweep must be start:stop:count");
                    }
                    Some((
                        parse_angle(parts[0], j)?,
                        parse_angle(parts[1], j)?,
                        parts[2].trim().parse::<usize>()?,
                    ))
                }
                None => None,
            };
            let cfg = commands::RateConfig {
                params,
                theta0: angle_or(&args.theta0, "theta0", 0.0)?,
                phi0: angle_or(&args.phi0, "phi0", 0.0)?,
                steps: merged.parse(&args.steps, "steps")?.unwrap_or(1000),
                sweep,
            };
            commands::cmd_rate(&cfg, &args.common.out_dir(&merged)?)
        }
        Command::Spectral(args) => {
            let merged = Merged::load(&args.common.config)?;
            let params = args.common.resolve(&merged, Some("0"))?;
            // an empty order list is allowed: degeneracy-profile-only runs
            // (exactly periodic spectra leave too few distinct gaps for
            // ratio statistics)
            let orders: Vec<usize> = merged
                .string(&args.orders, "orders")
                .unwrap_or_else(|| "1,2,3,4".into())
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>().map_err(|e| anyhow!("bad order: {e}")))
                .collect::<Result<_>>()?;
            let seed = merged
                .parse(&args.seed, "seed")?
                .ok_or_else(|| anyhow!("--seed is required: reference ensembles are sampled"))?;
            let dim = (2.0 * params.j) as usize + 1;
            let cfg = commands::SpectralConfig {
                params,
                orders,
                seed,
                members: merged.parse(&args.members, "members")?.unwrap_or(200),
                poisson_size: merged.parse(&args.poisson_size, "poisson_size")?.unwrap_or(dim),
                goe_dim: merged.parse(&args.goe_dim, "goe_dim")?.unwrap_or(400),
                parity_split: !args.no_parity_split
                    && merged
                        .string(&None, "parity_split")
                        .map(|s| s != "false")
                        .unwrap_or(true),
                degeneracy_tol: merged.parse(&args.degeneracy_tol, "degeneracy_tol")?.unwrap_or(1e-8),
            };
            commands::cmd_spectral(&cfg, &args.common.out_dir(&merged)?)
        }
        Command::Verify(args) => {
            let merged = Merged::load(&args.config)?;
            let cfg = commands::VerifyConfig {
                max_n: merged.parse(&args.max_n, "max_n")?.unwrap_or(6),
                inject_fault: args.inject_fault,
            };
            let out = args
                .out
                .or_else(|| merged.file.get("out").map(PathBuf::from))
                .ok_or_else(|| anyhow!("--out is required"))?;
            commands::cmd_verify(&cfg, &out)
        }
    }
}
