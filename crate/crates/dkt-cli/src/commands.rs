//! Subcommand implementations. Every command writes its data files plus a
//! `run_meta.json` sidecar carrying the resolved configuration, artifact
//! version, wall clock and per-file checksums.

use anyhow::{bail, Result};
use serde::Serialize;
use std::path::Path;

use dkt_core::floquet::{build_floquet, certify_projective_period, evolve_trajectory};
use dkt_core::observables::{
    averaged_rate_sweep, entropy_landscape, fidelity_series, husimi_field, SphereGrid,
};
use dkt_core::qubit_verify::{self, IdentityCheck, Requirement};
use dkt_core::spectral::{
    self, pooled_spacing_ratios, sample_goe_reference, sample_poisson_reference,
    total_variation_distance, RatioHistogram,
};
use dkt_core::spin::{coherent_state, SphericalPoint, SpinSystem};
use dkt_core::KickParameters;

use crate::config::ResolvedParams;
use crate::output::{fmt_f64, OutputDir};

fn spin_system(j: f64) -> Result<SpinSystem> {
    SpinSystem::new(j).map_err(|e| anyhow::anyhow!("{e}"))
}

fn kick_params(r: &ResolvedParams) -> Result<KickParameters> {
    KickParameters::from_transformed(r.kr, r.ktheta, r.p).map_err(|e| anyhow::anyhow!("{e}"))
}

// ---- certify ----------------------------------------------------------------

#[derive(Serialize)]
pub struct CertifyConfig {
    pub params: ResolvedParams,
    pub cutoff: u32,
    pub tolerance: f64,
}

#[derive(Serialize)]
struct CertificateJson {
    j: f64,
    kr: f64,
    ktheta: f64,
    p: f64,
    period: Option<u32>,
    phase: Option<f64>,
    residual: f64,
    cutoff: u32,
    tolerance: f64,
}

pub fn cmd_certify(cfg: &CertifyConfig, out: &Path) -> Result<()> {
    let sys = spin_system(cfg.params.j)?;
    let u = build_floquet(sys, kick_params(&cfg.params)?)?;
    let cert = certify_projective_period(&u, cfg.cutoff, cfg.tolerance);
    let mut dir = OutputDir::create(out)?;
    dir.write_json(
        "certificate.json",
        &CertificateJson {
            j: cfg.params.j,
            kr: cfg.params.kr,
            ktheta: cfg.params.ktheta,
            p: cfg.params.p,
            period: cert.period,
            phase: cert.phase,
            residual: cert.residual,
            cutoff: cert.cutoff,
            tolerance: cert.tolerance,
        },
    )?;
    dir.finish("certify", cfg)?;
    match cert.period {
        Some(m) => println!(
            "period {} (phase {:.6}, residual {:.3e})",
            m,
            cert.phase.unwrap_or(0.0),
            cert.residual
        ),
        None => println!(
            "no projective period up to {} (min residual {:.3e})",
            cert.cutoff, cert.residual
        ),
    }
    Ok(())
}

// ---- husimi -----------------------------------------------------------------

#[derive(Serialize)]
pub struct HusimiConfig {
    pub params: ResolvedParams,
    pub theta0: f64,
    pub phi0: f64,
    pub grid: (usize, usize),
    pub steps: usize,
}

pub fn cmd_husimi(cfg: &HusimiConfig, out: &Path) -> Result<()> {
    let sys = spin_system(cfg.params.j)?;
    let u = build_floquet(sys, kick_params(&cfg.params)?)?;
    let initial = coherent_state(sys, SphericalPoint::new(cfg.theta0, cfg.phi0));
    let trajectory = evolve_trajectory(&u, &initial, cfg.steps);
    let grid = SphereGrid::closed(cfg.grid.0, cfg.grid.1);
    let mut dir = OutputDir::create(out)?;
    for (n, state) in trajectory.iter().enumerate() {
        let field = husimi_field(state, sys, &grid)?;
        dir.write_field_csv(&format!("husimi_n{n}.csv"), &field)?;
    }
    dir.finish("husimi", cfg)?;
    println!("wrote {} Husimi fields on a {}x{} grid", cfg.steps + 1, cfg.grid.0, cfg.grid.1);
    Ok(())
}

// ---- landscape ----------------------------------------------------------------

#[derive(Serialize)]
pub struct LandscapeConfig {
    pub params: ResolvedParams,
    pub grid: (usize, usize),
    pub steps: usize,
    pub budget_seconds: f64,
}

pub fn cmd_landscape(cfg: &LandscapeConfig, out: &Path) -> Result<()> {
    let sys = spin_system(cfg.params.j)?;
    let d = sys.dim() as f64;
    // rough serial cost model: steps x nodes x (4 matvecs of d^2 complex)
    let est = cfg.grid.0 as f64 * cfg.grid.1 as f64 * cfg.steps as f64 * d * d * 3.2e-8;
    if est > cfg.budget_seconds {
        eprintln!(
            "warning: estimated cost {:.0} s exceeds budget {:.0} s; running anyway",
            est, cfg.budget_seconds
        );
    }
    let u = build_floquet(sys, kick_params(&cfg.params)?)?;
    let grid = SphereGrid::open(cfg.grid.0, cfg.grid.1);
    let field = entropy_landscape(&u, &grid, cfg.steps)?;
    let mut dir = OutputDir::create(out)?;
    dir.write_field_csv("landscape.csv", &field)?;
    dir.finish("landscape", cfg)?;
    println!(
        "landscape {}x{} over {} steps: mean entropy {:.4}",
        cfg.grid.0,
        cfg.grid.1,
        cfg.steps,
        field.mean()
    );
    Ok(())
}

// ---- rate ---------------------------------------------------------------------

#[derive(Serialize)]
pub struct RateConfig {
    pub params: ResolvedParams,
    pub theta0: f64,
    pub phi0: f64,
    pub steps: usize,
    /// (start, stop, count) over k_theta at fixed k_r; `None` runs the
    /// single-point time series.
    pub sweep: Option<(f64, f64, usize)>,
}

pub fn cmd_rate(cfg: &RateConfig, out: &Path) -> Result<()> {
    let sys = spin_system(cfg.params.j)?;
    let initial = SphericalPoint::new(cfg.theta0, cfg.phi0);
    let mut dir = OutputDir::create(out)?;
    match cfg.sweep {
        Some((start, stop, count)) => {
            if count < 2 {
                bail!("sweep needs at least 2 points");
            }
            let kthetas: Vec<f64> = (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect();
            let avgs = averaged_rate_sweep(
                sys,
                cfg.params.kr,
                cfg.params.p,
                initial,
                cfg.steps,
                &kthetas,
            )?;
            let mut csv = String::from("ktheta,avg_rate\n");
            for (kt, avg) in kthetas.iter().zip(avgs.iter()) {
                csv.push_str(&fmt_f64(*kt));
                csv.push(',');
                csv.push_str(&fmt_f64(*avg));
                csv.push('\n');
            }
            dir.write_file("rate_sweep.csv", &csv)?;
            let argmax = avgs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap_or(0);
            println!(
                "swept {} points; <R> max {:.5} at ktheta = {:.5}",
                count, avgs[argmax], kthetas[argmax]
            );
        }
        None => {
            let u = build_floquet(sys, kick_params(&cfg.params)?)?;
            let series = fidelity_series(&u, initial, cfg.steps)?;
            let mut csv = String::from("n,fidelity,rate\n");
            for n in 0..series.z.len() {
                csv.push_str(&n.to_string());
                csv.push(',');
                csv.push_str(&fmt_f64(series.z[n]));
                csv.push(',');
                csv.push_str(&fmt_f64(series.r[n]));
                csv.push('\n');
            }
            dir.write_file("rate_series.csv", &csv)?;
            println!("time series over {} steps; <R> = {:.5}", cfg.steps, series.averaged_rate());
        }
    }
    dir.finish("rate", cfg)?;
    Ok(())
}

// ---- spectral -------------------------------------------------------------------

#[derive(Serialize)]
pub struct SpectralConfig {
    pub params: ResolvedParams,
    pub orders: Vec<usize>,
    pub seed: u64,
    pub members: usize,
    pub poisson_size: usize,
    pub goe_dim: usize,
    pub parity_split: bool,
    pub degeneracy_tol: f64,
}

#[derive(Serialize)]
struct SpectralOrderSummary {
    order: usize,
    sample_mean: f64,
    poisson_mean: f64,
    goe_mean: f64,
    tv_poisson: f64,
    tv_goe: f64,
    closer_to: &'static str,
    ratio_count: usize,
    dropped: usize,
}

#[derive(Serialize)]
struct SpectralSummary {
    levels: usize,
    degeneracy_clusters: usize,
    dominant_fraction_24: f64,
    parity_split: bool,
    orders: Vec<SpectralOrderSummary>,
}

pub fn cmd_spectral(cfg: &SpectralConfig, out: &Path) -> Result<()> {
    for &o in &cfg.orders {
        if !(1..=4).contains(&o) {
            bail!("orders must lie in 1..=4, got {o}");
        }
    }
    let sys = spin_system(cfg.params.j)?;
    let u = build_floquet(sys, kick_params(&cfg.params)?)?;
    let full = spectral::quasi_energies(&u)?;
    let profile = spectral::degeneracy_profile(&full, cfg.degeneracy_tol);
    let dominant = spectral::dominant_cluster_fraction(&profile, 24);

    let sector_spectra: Option<(Vec<f64>, Vec<f64>)> = if cfg.parity_split {
        Some(spectral::sector_quasi_energies(&u)?)
    } else {
        None
    };

    let mut dir = OutputDir::create(out)?;
    let mut deg_csv = String::from("phase,multiplicity\n");
    for (phase, mult) in &profile {
        deg_csv.push_str(&fmt_f64(*phase));
        deg_csv.push(',');
        deg_csv.push_str(&mult.to_string());
        deg_csv.push('\n');
    }
    dir.write_file("degeneracy.csv", &deg_csv)?;

    let mut orders = Vec::new();
    for &order in &cfg.orders {
        let sample = match &sector_spectra {
            Some((plus, minus)) => pooled_spacing_ratios(
                &[plus.as_slice(), minus.as_slice()],
                order,
                spectral::DEFAULT_DEGENERACY_FLOOR,
            )?,
            None => spectral::spacing_ratios(&full, order, spectral::DEFAULT_DEGENERACY_FLOOR)?,
        };
        let hist = RatioHistogram::from_sample(&sample, spectral::RATIO_HISTOGRAM_BINS);
        let poisson = sample_poisson_reference(cfg.members, cfg.poisson_size, order, cfg.seed)?;
        let goe = sample_goe_reference(cfg.members, cfg.goe_dim, order, cfg.seed)?;
        let tv_poisson = total_variation_distance(&hist, &poisson)?;
        let tv_goe = total_variation_distance(&hist, &goe)?;
        dir.write_histogram_csv(&format!("dkt_hist_k{order}.csv"), &hist)?;
        dir.write_histogram_csv(&format!("poisson_hist_k{order}.csv"), &poisson)?;
        dir.write_histogram_csv(&format!("goe_hist_k{order}.csv"), &goe)?;
        println!(
            "k~={order}: mean {:.4} (poisson {:.4}, goe {:.4}); TV poisson {:.4}, goe {:.4}",
            hist.mean_ratio, poisson.mean_ratio, goe.mean_ratio, tv_poisson, tv_goe
        );
        orders.push(SpectralOrderSummary {
            order,
            sample_mean: hist.mean_ratio,
            poisson_mean: poisson.mean_ratio,
            goe_mean: goe.mean_ratio,
            tv_poisson,
            tv_goe,
            closer_to: if tv_poisson <= tv_goe { "poisson" } else { "goe" },
            ratio_count: hist.sample_count,
            dropped: hist.dropped,
        });
    }
    dir.write_json(
        "summary.json",
        &SpectralSummary {
            levels: full.phases.len(),
            degeneracy_clusters: profile.len(),
            dominant_fraction_24: dominant,
            parity_split: cfg.parity_split,
            orders,
        },
    )?;
    dir.finish("spectral", cfg)?;
    println!(
        "{} levels, {} degeneracy clusters (top-24 fraction {:.3})",
        full.phases.len(),
        profile.len(),
        dominant
    );
    Ok(())
}

// ---- verify -------------------------------------------------------------------

#[derive(Serialize)]
pub struct VerifyConfig {
    pub max_n: usize,
    pub inject_fault: bool,
}

#[derive(Serialize)]
struct CheckJson {
    name: String,
    n: usize,
    residual: f64,
    threshold: f64,
    requirement: &'static str,
    pass: bool,
}

pub fn cmd_verify(cfg: &VerifyConfig, out: &Path) -> Result<()> {
    let mut checks: Vec<IdentityCheck> =
        qubit_verify::run_identity_suite(cfg.max_n).map_err(|e| anyhow::anyhow!("{e}"))?;
    if cfg.inject_fault {
        // perturb the special angle by 1e-3; the commutation must break,
        // demonstrating the suite is sensitive to such faults
        let residual = qubit_verify::o_commutator_residual(4, std::f64::consts::PI / 4.0 + 1e-3)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        checks.push(IdentityCheck {
            name: "o_commutes_with_jx2_injected_fault".into(),
            n: 4,
            residual,
            threshold: 1e-12,
            requirement: Requirement::AtMost,
        });
    }
    let mut dir = OutputDir::create(out)?;
    let json: Vec<CheckJson> = checks
        .iter()
        .map(|c| CheckJson {
            name: c.name.clone(),
            n: c.n,
            residual: c.residual,
            threshold: c.threshold,
            requirement: match c.requirement {
                Requirement::AtMost => "at_most",
                Requirement::AtLeast => "at_least",
            },
            pass: c.passed(),
        })
        .collect();
    dir.write_json("verification.json", &json)?;
    dir.finish("verify", cfg)?;
    let failed: Vec<&IdentityCheck> = checks.iter().filter(|c| !c.passed()).collect();
    for c in &checks {
        println!(
            "{:>4} {:<34} n={:<2} residual {:.3e} ({} {:.1e})",
            if c.passed() { "ok" } else { "FAIL" },
            c.name,
            c.n,
            c.residual,
            match c.requirement {
                Requirement::AtMost => "<",
                Requirement::AtLeast => ">",
            },
            c.threshold
        );
    }
    if !failed.is_empty() {
        bail!("{} of {} identity checks failed", failed.len(), checks.len());
    }
    println!("all {} identity checks passed", checks.len());
    Ok(())
}
