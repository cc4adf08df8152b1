//! Quasi-energy spectra, degeneracy profiles, higher-order spacing-ratio
//! statistics and the sampled Poisson / GOE reference ensembles.
//!
//! Ratio statistics are unfolding-free: r^(k) = (E_{i+2k} - E_{i+k}) /
//! (E_{i+k} - E_i) on the sorted spectrum. Histograms and mean ratios use
//! the folded variable min(r, 1/r) in [0, 1], which is the standard bounded
//! form with the familiar reference means (Poisson 2 ln 2 - 1 ~ 0.386,
//! large-GOE ~ 0.536).

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::floquet::{FloquetOperator, KickParameters};
use crate::linalg::{self, C64, CMat};
use crate::spin::{self, SpinSystem};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;
pub const DEFAULT_DEGENERACY_FLOOR: f64 = 1e-12;
pub const RATIO_HISTOGRAM_BINS: usize = 50;

/// Sorted eigenphases of a Floquet operator, wrapped to [0, 2 pi).
#[derive(Debug, Clone)]
pub struct QuasiEnergySpectrum {
    pub phases: Vec<f64>,
    pub sys: SpinSystem,
    pub params: KickParameters,
}

fn wrap_phase(mut p: f64) -> f64 {
    p = p.rem_euclid(2.0 * PI);
    if p >= 2.0 * PI {
        p -= 2.0 * PI;
    }
    p
}

fn sorted_phases(values: &[C64]) -> Result<Vec<f64>> {
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max((v.norm() - 1.0).abs());
    }
    if worst > 1e-8 {
        return Err(Error::NonUnimodularSpectrum { deviation: worst });
    }
    let mut phases: Vec<f64> = values.iter().map(|z| wrap_phase(z.arg())).collect();
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(phases)
}

/// Quasi-energies of the full Floquet operator.
pub fn quasi_energies(u: &FloquetOperator) -> Result<QuasiEnergySpectrum> {
    let values = linalg::general_eigenvalues(u.matrix())?;
    let phases = sorted_phases(values.as_slice().unwrap())?;
    Ok(QuasiEnergySpectrum { phases, sys: u.sys(), params: *u.params() })
}

/// Orthonormal bases of the two parity sectors of exp(-i pi Jy).
///
/// The pi-rotation about y commutes with the Floquet operator for any kick
/// strengths, so its +/- sectors evolve independently. For integer j the
/// rotation itself is a Hermitian involution; for half-odd j, i times it is.
pub fn parity_sector_bases(sys: SpinSystem) -> Result<(CMat, CMat)> {
    let basis = spin::YRotationBasis::new(sys)?;
    let r_pi = basis.rotation(PI);
    let hermitized = if sys.is_integer_j() {
        r_pi
    } else {
        r_pi.mapv(|z| z * C64::new(0.0, 1.0))
    };
    let (w, v) = linalg::hermitian_eigen(&hermitized)?;
    let d = sys.dim();
    let plus: Vec<usize> = (0..d).filter(|&i| w[i] > 0.0).collect();
    let minus: Vec<usize> = (0..d).filter(|&i| w[i] < 0.0).collect();
    let take = |cols: &[usize]| {
        let mut m = CMat::zeros((d, cols.len()));
        for (k, &c) in cols.iter().enumerate() {
            m.column_mut(k).assign(&v.column(c));
        }
        m
    };
    Ok((take(&plus), take(&minus)))
}

/// Quasi-energy spectra of the two parity sectors, each sorted.
pub fn sector_quasi_energies(u: &FloquetOperator) -> Result<(Vec<f64>, Vec<f64>)> {
    let (wp, wm) = parity_sector_bases(u.sys())?;
    let spectrum = |w: &CMat| -> Result<Vec<f64>> {
        let block = linalg::dagger(w).dot(u.matrix()).dot(w);
        let values = linalg::general_eigenvalues(&block)?;
        sorted_phases(values.as_slice().unwrap())
    };
    Ok((spectrum(&wp)?, spectrum(&wm)?))
}

/// Clusters sorted phases within `tol` (single linkage on the circle, so a
/// cluster straddling 0 / 2 pi is merged) and returns (representative phase,
/// multiplicity) sorted by phase.
pub fn degeneracy_profile(spec: &QuasiEnergySpectrum, tol: f64) -> Vec<(f64, usize)> {
    cluster_phases(&spec.phases, tol)
}

pub fn cluster_phases(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    if sorted.is_empty() {
        return Vec::new();
    }
    let mut clusters: Vec<Vec<f64>> = vec![vec![sorted[0]]];
    for &p in &sorted[1..] {
        let last = clusters.last_mut().unwrap();
        if p - *last.last().unwrap() <= tol {
            last.push(p);
        } else {
            clusters.push(vec![p]);
        }
    }
    // wrap-around merge
    if clusters.len() > 1 {
        let first_lo = clusters[0][0];
        let last_hi = *clusters.last().unwrap().last().unwrap();
        if (first_lo + 2.0 * PI) - last_hi <= tol {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail.into_iter().map(|p| p - 2.0 * PI));
        }
    }
    let mut out: Vec<(f64, usize)> = clusters
        .into_iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            (wrap_phase(mean), c.len())
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Fraction of levels contained in the `max_clusters` largest clusters.
pub fn dominant_cluster_fraction(profile: &[(f64, usize)], max_clusters: usize) -> f64 {
    let total: usize = profile.iter().map(|c| c.1).sum();
    if total == 0 {
        return 0.0;
    }
    let mut counts: Vec<usize> = profile.iter().map(|c| c.1).collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let held: usize = counts.iter().take(max_clusters).sum();
    held as f64 / total as f64
}

/// Spacing ratios of one order on a sorted spectrum.
#[derive(Debug, Clone)]
pub struct RatioSample {
    pub order: usize,
    pub ratios: Vec<f64>,
    pub dropped: usize,
}

impl RatioSample {
    /// Mean of the folded ratio min(r, 1/r).
    pub fn folded_mean(&self) -> f64 {
        self.ratios.iter().map(|&r| r.min(1.0 / r)).sum::<f64>() / self.ratios.len() as f64
    }
}

/// r_i = (E_{i+2k} - E_{i+k})/(E_{i+k} - E_i) on `sorted`, dropping windows
/// whose numerator or denominator gap falls below `degeneracy_floor`.
pub fn spacing_ratios_of(
    sorted: &[f64],
    order: usize,
    degeneracy_floor: f64,
) -> Result<RatioSample> {
    assert!((1..=4).contains(&order), "order must be in 1..=4");
    let len = sorted.len();
    if len <= 2 * order {
        return Err(Error::SpectrumTooShort { order, len });
    }
    let mut ratios = Vec::with_capacity(len - 2 * order);
    let mut dropped = 0usize;
    for i in 0..len - 2 * order {
        let g1 = sorted[i + order] - sorted[i];
        let g2 = sorted[i + 2 * order] - sorted[i + order];
        if g1 < degeneracy_floor || g2 < degeneracy_floor {
            dropped += 1;
        } else {
            ratios.push(g2 / g1);
        }
    }
    if ratios.len() < 10 {
        return Err(Error::TooFewRatios { valid: ratios.len(), min: 10 });
    }
    Ok(RatioSample { order, ratios, dropped })
}

pub fn spacing_ratios(
    spec: &QuasiEnergySpectrum,
    order: usize,
    degeneracy_floor: f64,
) -> Result<RatioSample> {
    spacing_ratios_of(&spec.phases, order, degeneracy_floor)
}

/// Pools ratios of the same order computed independently on each sequence.
pub fn pooled_spacing_ratios(
    sequences: &[&[f64]],
    order: usize,
    degeneracy_floor: f64,
) -> Result<RatioSample> {
    let mut ratios = Vec::new();
    let mut dropped = 0usize;
    for seq in sequences {
        let len = seq.len();
        if len <= 2 * order {
            return Err(Error::SpectrumTooShort { order, len });
        }
        for i in 0..len - 2 * order {
            let g1 = seq[i + order] - seq[i];
            let g2 = seq[i + 2 * order] - seq[i + order];
            if g1 < degeneracy_floor || g2 < degeneracy_floor {
                dropped += 1;
            } else {
                ratios.push(g2 / g1);
            }
        }
    }
    if ratios.len() < 10 {
        return Err(Error::TooFewRatios { valid: ratios.len(), min: 10 });
    }
    Ok(RatioSample { order, ratios, dropped })
}

/// Normalized histogram of folded spacing ratios on [0, 1].
#[derive(Debug, Clone)]
pub struct RatioHistogram {
    pub order: usize,
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub sample_count: usize,
    pub dropped: usize,
    pub mean_ratio: f64,
}

impl RatioHistogram {
    /// Histogram over the folded ratio min(r, 1/r) with uniform bins on
    /// [0, 1]; densities integrate to 1 exactly by construction.
    pub fn from_sample(sample: &RatioSample, bins: usize) -> Self {
        assert!(bins >= 2);
        let mut counts = vec![0usize; bins];
        for &r in &sample.ratios {
            let folded = r.min(1.0 / r).clamp(0.0, 1.0);
            let mut idx = (folded * bins as f64) as usize;
            if idx == bins {
                idx = bins - 1;
            }
            counts[idx] += 1;
        }
        let n = sample.ratios.len();
        let width = 1.0 / bins as f64;
        let densities = counts.iter().map(|&c| c as f64 / (n as f64 * width)).collect();
        let bin_edges = (0..=bins).map(|i| i as f64 * width).collect();
        RatioHistogram {
            order: sample.order,
            bin_edges,
            densities,
            sample_count: n,
            dropped: sample.dropped,
            mean_ratio: sample.folded_mean(),
        }
    }

    /// Integral of the density over the bins (should be 1).
    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }
}

/// Total-variation distance on matching bins: (1/2) sum |p_i - q_i|.
pub fn total_variation_distance(a: &RatioHistogram, b: &RatioHistogram) -> Result<f64> {
    if a.bin_edges.len() != b.bin_edges.len()
        || a.bin_edges
            .iter()
            .zip(b.bin_edges.iter())
            .any(|(x, y)| (x - y).abs() > 1e-12)
    {
        return Err(Error::BinEdgeMismatch);
    }
    let tv = a
        .densities
        .iter()
        .zip(b.densities.iter())
        .zip(a.bin_edges.windows(2))
        .map(|((p, q), e)| (p - q).abs() * (e[1] - e[0]))
        .sum::<f64>()
        / 2.0;
    Ok(tv)
}

fn member_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // splitmix64 of (seed, index) so ensemble members are independent and
    // the whole ensemble is reproducible from one seed
    let mut x = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    ChaCha8Rng::seed_from_u64(x)
}

/// Poisson reference: spectra with independent exponential spacings pushed
/// through the identical ratio pipeline.
pub fn sample_poisson_reference(
    count: usize,
    size: usize,
    order: usize,
    seed: u64,
) -> Result<RatioHistogram> {
    assert!(count * size >= 10_000, "count*size must be >= 1e4");
    let sequences: Vec<Vec<f64>> = (0..count as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = member_rng(seed, idx);
            let mut level = 0.0f64;
            (0..size)
                .map(|_| {
                    let u: f64 = rng.random();
                    level += -(1.0 - u).ln();
                    level
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = sequences.iter().map(|s| s.as_slice()).collect();
    let sample = pooled_spacing_ratios(&refs, order, DEFAULT_DEGENERACY_FLOOR)?;
    Ok(RatioHistogram::from_sample(&sample, RATIO_HISTOGRAM_BINS))
}

/// GOE reference: real symmetric matrices with Gaussian entries
/// (off-diagonal variance half the diagonal), central-bulk eigenvalues
/// (middle 50%), identical ratio pipeline.
pub fn sample_goe_reference(
    count: usize,
    dim: usize,
    order: usize,
    seed: u64,
) -> Result<RatioHistogram> {
    assert!(dim >= 100, "GOE dimension must be >= 100");
    let sequences: Vec<Vec<f64>> = (0..count as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = member_rng(seed, idx);
            let mut m = Array2::<f64>::zeros((dim, dim));
            for i in 0..dim {
                for k in i..dim {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    if i == k {
                        m[[i, i]] = g * std::f64::consts::SQRT_2;
                    } else {
                        m[[i, k]] = g;
                        m[[k, i]] = g;
                    }
                }
            }
            let (w, _) = m.eigh(UPLO::Lower).expect("GOE eigh");
            let w: Array1<f64> = w;
            let lo = dim / 4;
            let hi = dim - dim / 4;
            w.as_slice().unwrap()[lo..hi].to_vec()
        })
        .collect();
    let refs: Vec<&[f64]> = sequences.iter().map(|s| s.as_slice()).collect();
    let sample = pooled_spacing_ratios(&refs, order, DEFAULT_DEGENERACY_FLOOR)?;
    Ok(RatioHistogram::from_sample(&sample, RATIO_HISTOGRAM_BINS))
}
