//! Phase-space and entanglement observables: Husimi distributions, the
//! single-qubit reduced density matrix and its von Neumann entropy,
//! long-time averages over coherent-state grids, and fidelity / rate-function
//! series.

use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::floquet::{FloquetEigen, FloquetOperator, KickParameters};
use crate::linalg::{C64, CMat, CVec};
use crate::spin::{self, PureState, SphericalPoint, SpinOperatorTriple, SpinSystem};

/// Fidelity floor applied before taking logarithms in the rate function.
///
/// Exact recurrence points produce exactly orthogonal states; the computed
/// overlap of an exact zero is double-precision roundoff (|amp|^2 somewhere
/// around 1e-28..1e-30, varying with parameters). The floor sits above that
/// noise so the clipped rate is a parameter-independent constant, and far
/// below every genuine fidelity minimum at the system sizes this library
/// targets (the smallest physical recurrence overlap handled in anger is
/// 2^{-2j} ~ 1e-13 at j = 20).
pub const FIDELITY_FLOOR: f64 = 1e-24;

/// Rectangular grid of sphere nodes, theta-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    thetas: Vec<f64>,
    phis: Vec<f64>,
    closed: bool,
}

impl SphereGrid {
    /// Closed product grid: theta in [0, pi] and phi in [-pi, pi], both ends
    /// included. Suitable for trapezoid quadrature.
    pub fn closed(theta_count: usize, phi_count: usize) -> Self {
        assert!(theta_count >= 2 && phi_count >= 2, "grid dims must be >= 2");
        let thetas = (0..theta_count)
            .map(|i| PI * i as f64 / (theta_count - 1) as f64)
            .collect();
        let phis = (0..phi_count)
            .map(|i| -PI + 2.0 * PI * i as f64 / (phi_count - 1) as f64)
            .collect();
        SphereGrid { thetas, phis, closed: true }
    }

    /// Open landscape grid: theta at midpoints in (0, pi), phi uniform on
    /// [-pi, pi). Avoids the coordinate degeneracy at the poles.
    pub fn open(theta_count: usize, phi_count: usize) -> Self {
        assert!(theta_count >= 2 && phi_count >= 2, "grid dims must be >= 2");
        let thetas = (0..theta_count)
            .map(|i| PI * (i as f64 + 0.5) / theta_count as f64)
            .collect();
        let phis = (0..phi_count)
            .map(|i| -PI + 2.0 * PI * i as f64 / phi_count as f64)
            .collect();
        SphereGrid { thetas, phis, closed: false }
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn theta_count(&self) -> usize {
        self.thetas.len()
    }

    pub fn phi_count(&self) -> usize {
        self.phis.len()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Index of the grid node nearest to a point (Euclidean in (theta, phi)).
    pub fn nearest_node(&self, point: SphericalPoint) -> (usize, usize) {
        let it = nearest_index(&self.thetas, point.theta());
        let ip = nearest_index(&self.phis, point.phi());
        (it, ip)
    }
}

fn nearest_index(xs: &[f64], x: f64) -> usize {
    let mut best = 0;
    let mut bd = f64::INFINITY;
    for (i, &v) in xs.iter().enumerate() {
        let d = (v - x).abs();
        if d < bd {
            bd = d;
            best = i;
        }
    }
    best
}

/// A real scalar field sampled over a sphere grid (theta-major storage).
#[derive(Debug, Clone)]
pub struct ObservableField {
    pub grid: SphereGrid,
    pub values: Array2<f64>,
}

impl ObservableField {
    pub fn max_abs_diff(&self, other: &ObservableField) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.mean().unwrap_or(0.0)
    }

    pub fn value_at_nearest(&self, point: SphericalPoint) -> f64 {
        let (it, ip) = self.grid.nearest_node(point);
        self.values[[it, ip]]
    }

    /// q-th percentile (0..=1) of the field values.
    pub fn percentile(&self, q: f64) -> f64 {
        let mut vals: Vec<f64> = self.values.iter().cloned().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = ((vals.len() - 1) as f64 * q).round() as usize;
        vals[idx]
    }
}

fn coherent_amplitudes(sys: SpinSystem, ln_fact: &[f64], theta: f64, phi: f64) -> CVec {
    let n = sys.two_j() as usize;
    let half = theta / 2.0;
    let (c, s) = (half.cos(), half.sin());
    (0..=n)
        .map(|i| {
            if (c == 0.0 && n - i > 0) || (s == 0.0 && i > 0) {
                return C64::new(0.0, 0.0);
            }
            let mut ln_mag = 0.5 * (ln_fact[n] - ln_fact[i] - ln_fact[n - i]);
            if n - i > 0 {
                ln_mag += (n - i) as f64 * c.ln();
            }
            if i > 0 {
                ln_mag += i as f64 * s.ln();
            }
            C64::from_polar(ln_mag.exp(), -(i as f64) * phi)
        })
        .collect()
}

/// Husimi field Q(theta, phi) = |<theta, phi|psi>|^2 of a pure state.
pub fn husimi_field(state: &PureState, sys: SpinSystem, grid: &SphereGrid) -> Result<ObservableField> {
    if state.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), actual: state.dim() });
    }
    let ln_fact = spin::ln_factorials(sys.two_j() as usize);
    let (nt, np) = (grid.theta_count(), grid.phi_count());
    let rows: Vec<Vec<f64>> = grid
        .thetas
        .par_iter()
        .map(|&theta| {
            grid.phis
                .iter()
                .map(|&phi| {
                    let cs = coherent_amplitudes(sys, &ln_fact, theta, phi);
                    let overlap: C64 = cs
                        .iter()
                        .zip(state.amplitudes().iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    overlap.norm_sqr()
                })
                .collect()
        })
        .collect();
    let mut values = Array2::zeros((nt, np));
    for (it, row) in rows.into_iter().enumerate() {
        for (ip, v) in row.into_iter().enumerate() {
            values[[it, ip]] = v;
        }
    }
    Ok(ObservableField { grid: grid.clone(), values })
}

/// Husimi field Q(theta, phi) = <theta, phi|rho|theta, phi> of a density
/// matrix.
pub fn husimi_field_density(rho: &CMat, sys: SpinSystem, grid: &SphereGrid) -> Result<ObservableField> {
    if rho.nrows() != sys.dim() || rho.ncols() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), actual: rho.nrows() });
    }
    let ln_fact = spin::ln_factorials(sys.two_j() as usize);
    let (nt, np) = (grid.theta_count(), grid.phi_count());
    let mut values = Array2::zeros((nt, np));
    for (it, &theta) in grid.thetas.iter().enumerate() {
        for (ip, &phi) in grid.phis.iter().enumerate() {
            let cs = coherent_amplitudes(sys, &ln_fact, theta, phi);
            let applied = rho.dot(&cs);
            let q: C64 = cs.iter().zip(applied.iter()).map(|(a, b)| a.conj() * b).sum();
            values[[it, ip]] = q.re;
        }
    }
    Ok(ObservableField { grid: grid.clone(), values })
}

/// (2j+1)/(4 pi) ∬ Q sin(theta) dtheta dphi on a closed grid.
///
/// Product trapezoid rule with the Euler-Maclaurin endpoint correction in
/// theta. The integrand f = Q sin(theta) has f'(0) = Q(0) and
/// f'(pi) = -Q(pi), both available from the pole rows of the grid, so the
/// h^2 boundary term is removed exactly; without it, states with Husimi
/// weight at a pole lose the stated quadrature tolerances.
pub fn normalization_integral(field: &ObservableField, sys: SpinSystem) -> Result<f64> {
    if !field.grid.is_closed() {
        return Err(Error::DimensionMismatch { expected: 1, actual: 0 });
    }
    let nt = field.grid.theta_count();
    let np = field.grid.phi_count();
    let ht = PI / (nt - 1) as f64;
    let hp = 2.0 * PI / (np - 1) as f64;
    let prefactor = sys.dim() as f64 / (4.0 * PI);

    let phi_row = |it: usize| -> f64 {
        let mut sum = 0.0;
        for ip in 0..np {
            let w = if ip == 0 || ip == np - 1 { 0.5 } else { 1.0 };
            sum += w * field.values[[it, ip]];
        }
        sum * hp
    };

    let mut total = 0.0;
    for it in 0..nt {
        let w = if it == 0 || it == nt - 1 { 0.5 } else { 1.0 };
        total += w * phi_row(it) * field.grid.thetas[it].sin();
    }
    let raw = prefactor * total * ht;

    // f'(0) = prefactor * ∫Q(0,phi) dphi, f'(pi) = -prefactor * ∫Q(pi,phi) dphi
    let fp0 = prefactor * phi_row(0);
    let fppi = -prefactor * phi_row(nt - 1);
    Ok(raw - ht * ht / 12.0 * (fppi - fp0))
}

/// 2x2 single-qubit reduced density matrix.
#[derive(Debug, Clone)]
pub struct QubitDensityMatrix {
    matrix: [[C64; 2]; 2],
}

impl QubitDensityMatrix {
    pub fn from_elements(matrix: [[C64; 2]; 2]) -> Self {
        QubitDensityMatrix { matrix }
    }

    pub fn elements(&self) -> &[[C64; 2]; 2] {
        &self.matrix
    }

    /// Eigenvalues in descending order (closed form for 2x2 Hermitian).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.matrix[0][0].re;
        let d = self.matrix[1][1].re;
        let b = self.matrix[0][1];
        let tr = a + d;
        let disc = ((a - d) * (a - d) / 4.0 + b.norm_sqr()).sqrt();
        (tr / 2.0 + disc, tr / 2.0 - disc)
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let herm = (m[0][1] - m[1][0].conj()).norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs());
        if herm > 1e-11 {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("Hermiticity violation {herm:.3e}"),
            });
        }
        let tr = m[0][0].re + m[1][1].re;
        if (tr - 1.0).abs() > 1e-11 {
            return Err(Error::InvalidDensityMatrix { reason: format!("trace {tr} != 1") });
        }
        let (hi, lo) = self.eigenvalues();
        if lo < -1e-10 || hi > 1.0 + 1e-10 {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("eigenvalues ({lo:.3e}, {hi:.3e}) outside [0, 1]"),
            });
        }
        Ok(())
    }
}

/// rho_1 = (1 + <J>·sigma/j) / 2, the single-qubit marginal of a symmetric
/// 2j-qubit state. Valid because the evolved state never leaves the
/// symmetric subspace; the brute-force partial-trace oracle at small j lives
/// in the test suite.
pub fn reduced_qubit_density(state: &PureState, sys: SpinSystem) -> QubitDensityMatrix {
    let triple = spin::build_angular_momentum(sys);
    reduced_qubit_density_with(state, sys, &triple)
}

/// As [`reduced_qubit_density`] with precomputed angular-momentum matrices.
pub fn reduced_qubit_density_with(
    state: &PureState,
    sys: SpinSystem,
    triple: &SpinOperatorTriple,
) -> QubitDensityMatrix {
    let j = sys.j();
    let bx = state.expectation(&triple.jx) / j;
    let by = state.expectation(&triple.jy) / j;
    let bz = state.expectation(&triple.jz) / j;
    QubitDensityMatrix::from_elements([
        [C64::new((1.0 + bz) / 2.0, 0.0), C64::new(bx / 2.0, -by / 2.0)],
        [C64::new(bx / 2.0, by / 2.0), C64::new((1.0 - bz) / 2.0, 0.0)],
    ])
}

/// Von Neumann entropy -Tr[rho log2 rho] in bits. Eigenvalues in
/// [-1e-10, 0) are clamped to zero; anything worse is rejected.
pub fn von_neumann_entropy(rho: &QubitDensityMatrix) -> Result<f64> {
    rho.validate()?;
    let (hi, lo) = rho.eigenvalues();
    Ok(binary_entropy_bits(hi) + binary_entropy_bits(lo))
}

fn binary_entropy_bits(lambda: f64) -> f64 {
    let l = lambda.clamp(0.0, 1.0);
    if l == 0.0 {
        0.0
    } else {
        -l * l.log2()
    }
}

fn entropy_from_bloch_norm(b: f64) -> f64 {
    let b = b.min(1.0);
    binary_entropy_bits((1.0 + b) / 2.0) + binary_entropy_bits((1.0 - b) / 2.0)
}

/// Spectral-decomposition evolution engine bound to one Floquet operator.
/// Pays the dense eigendecomposition once; each state then evolves in
/// O(d^2) per step.
pub struct SpectralEvolver {
    sys: SpinSystem,
    params: KickParameters,
    eigen: FloquetEigen,
    triple: SpinOperatorTriple,
    ln_fact: Vec<f64>,
}

impl SpectralEvolver {
    pub fn new(u: &FloquetOperator) -> Result<Self> {
        Ok(SpectralEvolver {
            sys: u.sys(),
            params: *u.params(),
            eigen: FloquetEigen::new(u)?,
            triple: spin::build_angular_momentum(u.sys()),
            ln_fact: spin::ln_factorials(u.sys().two_j() as usize),
        })
    }

    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    pub fn params(&self) -> &KickParameters {
        &self.params
    }

    fn initial_state(&self, point: SphericalPoint) -> CVec {
        coherent_amplitudes(self.sys, &self.ln_fact, point.theta(), point.phi())
    }

    /// Mean single-qubit entropy over n = 0..steps-1 for a coherent initial
    /// state (the n = 0 term is included and vanishes for coherent states).
    pub fn time_averaged_entropy(&self, initial: SphericalPoint, steps: usize) -> Result<f64> {
        assert!(steps >= 1, "steps must be >= 1");
        let psi0 = PureState::from_amplitudes_unchecked(self.initial_state(initial));
        let coeff = self.eigen.project(&psi0)?;
        let j = self.sys.j();
        let mut sum = 0.0;
        for n in 0..steps {
            let psi = self.eigen.state_at(&coeff, n as u64);
            let bx = real_expectation(&self.triple.jx, &psi) / j;
            let by = real_expectation(&self.triple.jy, &psi) / j;
            let bz = real_expectation(&self.triple.jz, &psi) / j;
            sum += entropy_from_bloch_norm((bx * bx + by * by + bz * bz).sqrt());
        }
        Ok(sum / steps as f64)
    }

    /// Fidelity Z(n) = |<psi0|U^n|psi0>|^2 and rate R(n) = -ln Z / (2j+1)
    /// for n = 0..steps-1.
    pub fn fidelity_series(&self, initial: SphericalPoint, steps: usize) -> Result<FidelitySeries> {
        assert!(steps >= 1, "steps must be >= 1");
        let psi0 = PureState::from_amplitudes_unchecked(self.initial_state(initial));
        let coeff = self.eigen.project(&psi0)?;
        // <psi0|U^n|psi0> = sum_k (psi0^dag V)_k e^{i E_k n} c_k
        let d = self.sys.dim();
        let vectors = self.eigen.vectors();
        let mut weights = CVec::zeros(d);
        for k in 0..d {
            let mut dot = C64::new(0.0, 0.0);
            for (i, amp) in psi0.amplitudes().iter().enumerate() {
                dot += amp.conj() * vectors[[i, k]];
            }
            weights[k] = dot * coeff[k];
        }
        let phases = self.eigen.eigenphases();
        let denom = self.sys.dim() as f64;
        let mut z = Vec::with_capacity(steps);
        let mut r = Vec::with_capacity(steps);
        for n in 0..steps {
            let amp: C64 = weights
                .iter()
                .zip(phases.iter())
                .map(|(w, &e)| w * C64::from_polar(1.0, e * n as f64))
                .sum();
            let zn = amp.norm_sqr().min(1.0);
            let floored = zn.max(FIDELITY_FLOOR);
            z.push(zn);
            r.push(-floored.ln() / denom);
        }
        Ok(FidelitySeries { sys: self.sys, params: self.params, initial, z, r })
    }
}

fn real_expectation(op: &CMat, psi: &CVec) -> f64 {
    let applied = op.dot(psi);
    psi.iter().zip(applied.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Fidelity and rate-function series with the generating context recorded.
#[derive(Debug, Clone)]
pub struct FidelitySeries {
    pub sys: SpinSystem,
    pub params: KickParameters,
    pub initial: SphericalPoint,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
}

impl FidelitySeries {
    /// <R> = mean of R(t) over the series.
    pub fn averaged_rate(&self) -> f64 {
        self.r.iter().sum::<f64>() / self.r.len() as f64
    }
}

/// Mean single-qubit entropy over the first `steps` kicks, spectral path.
pub fn time_averaged_entropy(
    u: &FloquetOperator,
    initial: SphericalPoint,
    steps: usize,
) -> Result<f64> {
    SpectralEvolver::new(u)?.time_averaged_entropy(initial, steps)
}

/// Fidelity / rate series for a coherent initial state.
pub fn fidelity_series(
    u: &FloquetOperator,
    initial: SphericalPoint,
    steps: usize,
) -> Result<FidelitySeries> {
    SpectralEvolver::new(u)?.fidelity_series(initial, steps)
}

/// Long-time-averaged rate function <R>.
pub fn averaged_rate(u: &FloquetOperator, initial: SphericalPoint, steps: usize) -> Result<f64> {
    Ok(fidelity_series(u, initial, steps)?.averaged_rate())
}

/// Long-time-averaged entropy over every grid node (theta outer, phi inner).
/// Nodes are independent; the map is data-parallel with a fixed output
/// order, so results are identical for any worker count.
pub fn entropy_landscape(
    u: &FloquetOperator,
    grid: &SphereGrid,
    steps: usize,
) -> Result<ObservableField> {
    let evolver = SpectralEvolver::new(u)?;
    let nt = grid.theta_count();
    let np = grid.phi_count();
    let nodes: Vec<(usize, usize)> =
        (0..nt).flat_map(|it| (0..np).map(move |ip| (it, ip))).collect();
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&(it, ip)| {
            let point = SphericalPoint::new(grid.thetas()[it], grid.phis()[ip]);
            evolver.time_averaged_entropy(point, steps)
        })
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((nt, np));
    for (k, &(it, ip)) in nodes.iter().enumerate() {
        out[[it, ip]] = values[k];
    }
    Ok(ObservableField { grid: grid.clone(), values: out })
}

/// <R> for each k_theta in a sweep at fixed k_r and p, parallel over sweep
/// points with a shared Jy eigenbasis.
pub fn averaged_rate_sweep(
    sys: SpinSystem,
    kr: f64,
    p: f64,
    initial: SphericalPoint,
    steps: usize,
    kthetas: &[f64],
) -> Result<Vec<f64>> {
    let basis = spin::YRotationBasis::new(sys)?;
    kthetas
        .par_iter()
        .map(|&kt| {
            let params = KickParameters::from_transformed(kr, kt, p)?;
            let u = crate::floquet::build_floquet_in(&basis, params)?;
            averaged_rate(&u, initial, steps)
        })
        .collect()
}
