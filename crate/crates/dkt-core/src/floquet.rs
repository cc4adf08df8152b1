//! The double-kicked-top Floquet operator
//!
//!   U = exp(-i k'/(2j) Jx^2) · exp(-i k/(2j) Jz^2) · exp(-i p Jy),
//!
//! its transformed kick parameters k_r = (k+k')/2, k_theta = (k-k')/2,
//! powers, trajectories and projective-periodicity certification.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec};
use crate::spin::{self, PureState, SpinSystem, YRotationBasis};

/// (k_r, k_theta) from the physical kick strengths (k, k').
pub fn transform_kicks(k: f64, kprime: f64) -> (f64, f64) {
    ((k + kprime) / 2.0, (k - kprime) / 2.0)
}

/// Inverse of [`transform_kicks`].
pub fn physical_kicks(kr: f64, ktheta: f64) -> (f64, f64) {
    (kr + ktheta, kr - ktheta)
}

/// Kick strengths in both parameterizations plus the precession angle p
/// (default pi/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickParameters {
    pub k: f64,
    pub kprime: f64,
    pub kr: f64,
    pub ktheta: f64,
    pub p: f64,
}

impl KickParameters {
    pub fn from_physical(k: f64, kprime: f64, p: f64) -> Result<Self> {
        for (name, value) in [("k", k), ("kprime", kprime), ("p", p)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        let (kr, ktheta) = transform_kicks(k, kprime);
        Ok(KickParameters { k, kprime, kr, ktheta, p })
    }

    pub fn from_transformed(kr: f64, ktheta: f64, p: f64) -> Result<Self> {
        for (name, value) in [("kr", kr), ("ktheta", ktheta), ("p", p)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { name, value });
            }
        }
        let (k, kprime) = physical_kicks(kr, ktheta);
        Ok(KickParameters { k, kprime, kr, ktheta, p })
    }

    /// Convenience constructor with the default precession p = pi/2.
    pub fn transformed(kr: f64, ktheta: f64) -> Result<Self> {
        Self::from_transformed(kr, ktheta, FRAC_PI_2)
    }
}

/// A built Floquet operator tagged with its generating parameters.
#[derive(Debug, Clone)]
pub struct FloquetOperator {
    matrix: CMat,
    sys: SpinSystem,
    params: KickParameters,
}

impl FloquetOperator {
    /// Wraps an arbitrary unitary with parameter tags; used by tests and by
    /// callers that post-process the matrix (e.g. global phase shifts).
    pub fn from_parts(matrix: CMat, sys: SpinSystem, params: KickParameters) -> Result<Self> {
        linalg::check_unitary(&matrix, 1e-10)?;
        Ok(FloquetOperator { matrix, sys, params })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    pub fn params(&self) -> &KickParameters {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.sys.dim()
    }

    /// Apply one kick period to a state.
    pub fn step(&self, state: &PureState) -> PureState {
        PureState::from_amplitudes_unchecked(self.matrix.dot(state.amplitudes()))
    }
}

/// Assembles the Floquet operator. The Jy eigenbasis is decomposed once and
/// shared between the precession factor and the Jz^2 -> Jx^2 conjugation,
/// so the build costs two dense products beyond one Hermitian
/// eigendecomposition.
pub fn build_floquet(sys: SpinSystem, params: KickParameters) -> Result<FloquetOperator> {
    let basis = YRotationBasis::new(sys)?;
    build_floquet_in(&basis, params)
}

/// As [`build_floquet`], reusing a precomputed Jy eigenbasis.
pub fn build_floquet_in(basis: &YRotationBasis, params: KickParameters) -> Result<FloquetOperator> {
    let sys = basis.sys();
    let two_j = f64::from(sys.two_j());
    let mut m = spin::exp_quadratic_x_in(basis, params.kprime / two_j);
    // right-multiply by the diagonal Jz^2 factor, then by the precession
    linalg::scale_columns(&mut m, &spin::quadratic_z_phases(sys, params.k / two_j));
    let matrix = m.dot(&basis.rotation(params.p));
    linalg::check_unitary(&matrix, 1e-10)?;
    Ok(FloquetOperator { matrix, sys, params })
}

/// U^n by repeated squaring.
pub fn floquet_power(u: &FloquetOperator, n: u64) -> CMat {
    linalg::matrix_power(u.matrix(), n)
}

/// Certificate from the projective-periodicity search.
///
/// `period` is the smallest m <= cutoff with U^m = e^{i phase} 1 within
/// `tolerance` (max elementwise deviation), or `None` if the scan found no
/// such m; `residual` is then the minimum over the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodCertificate {
    pub period: Option<u32>,
    pub phase: Option<f64>,
    pub residual: f64,
    pub cutoff: u32,
    pub tolerance: f64,
}

pub const DEFAULT_PERIOD_CUTOFF: u32 = 96;
pub const DEFAULT_PERIOD_TOLERANCE: f64 = 1e-9;

/// Scans m = 1..=cutoff for the smallest projective period.
///
/// The candidate phase at each power is phi = arg(tr(U^m)/d); a scalar
/// matrix has all diagonal entries equal to that mean, so the residual
/// max|U^m - e^{i phi} 1| is exactly the projective distance.
pub fn certify_projective_period(
    u: &FloquetOperator,
    cutoff: u32,
    tolerance: f64,
) -> PeriodCertificate {
    let d = u.dim();
    let mut power = u.matrix().clone();
    let mut min_residual = f64::INFINITY;
    for m in 1..=cutoff {
        let trace: C64 = (0..d).map(|i| power[[i, i]]).sum();
        let phase = (trace / d as f64).arg();
        let residual = linalg::phase_identity_residual(&power, phase);
        if residual < tolerance {
            let phase = phase.rem_euclid(2.0 * PI);
            return PeriodCertificate {
                period: Some(m),
                phase: Some(phase),
                residual,
                cutoff,
                tolerance,
            };
        }
        min_residual = min_residual.min(residual);
        if m < cutoff {
            power = power.dot(u.matrix());
        }
    }
    PeriodCertificate { period: None, phase: None, residual: min_residual, cutoff, tolerance }
}

/// States psi(0), psi(1), ..., psi(steps) under repeated application of U.
/// No renormalization is applied: norm drift is a correctness signal.
pub fn evolve_trajectory(u: &FloquetOperator, initial: &PureState, steps: usize) -> Vec<PureState> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial.clone());
    let mut current = initial.amplitudes().clone();
    for _ in 0..steps {
        current = u.matrix().dot(&current);
        out.push(PureState::from_amplitudes_unchecked(current.clone()));
    }
    out
}

/// Builds U(k_theta)^power for each k_theta in the set (at fixed k_r,
/// p = pi/2) and returns the maximum pairwise elementwise deviation.
pub fn ktheta_independence_deviation(
    sys: SpinSystem,
    kr: f64,
    power: u64,
    ktheta_set: &[f64],
) -> Result<f64> {
    let basis = YRotationBasis::new(sys)?;
    let powers: Vec<CMat> = ktheta_set
        .iter()
        .map(|&kt| {
            let params = KickParameters::transformed(kr, kt)?;
            let u = build_floquet_in(&basis, params)?;
            Ok(linalg::matrix_power(u.matrix(), power))
        })
        .collect::<Result<_>>()?;
    let mut deviation = 0.0f64;
    for i in 0..powers.len() {
        for k in i + 1..powers.len() {
            deviation = deviation.max(linalg::max_abs_diff(&powers[i], &powers[k]));
        }
    }
    Ok(deviation)
}

/// Spectral decomposition of a Floquet operator, for computing many powers
/// or long trajectories of the same U.
///
/// Eigenvectors of a unitary within a degenerate cluster need not be
/// orthonormal as returned by the solver, so the inverse is applied through
/// an LU factorization rather than the conjugate transpose.
pub struct FloquetEigen {
    eigenphases: Vec<f64>,
    vectors: CMat,
    lu: ndarray_linalg::LUFactorized<ndarray::OwnedRepr<C64>>,
}

impl FloquetEigen {
    pub fn new(u: &FloquetOperator) -> Result<Self> {
        use ndarray_linalg::Factorize;
        let (values, vectors) = linalg::general_eigen(u.matrix())?;
        for v in values.iter() {
            if (v.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::NonUnimodularSpectrum { deviation: (v.norm() - 1.0).abs() });
            }
        }
        let eigenphases = values.iter().map(|z| z.arg()).collect();
        let lu = vectors.factorize()?;
        Ok(FloquetEigen { eigenphases, vectors, lu })
    }

    pub fn dim(&self) -> usize {
        self.eigenphases.len()
    }

    pub fn eigenphases(&self) -> &[f64] {
        &self.eigenphases
    }

    /// Eigenvector matrix (columns). Not orthonormal within degenerate
    /// clusters; see the type-level note.
    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    /// Coefficients of a state in the eigenbasis (solves V c = psi).
    pub fn project(&self, state: &PureState) -> Result<CVec> {
        use ndarray_linalg::Solve;
        Ok(self.lu.solve(state.amplitudes())?)
    }

    /// psi(n) = V diag(e^{i n E_k}) c. Eigenphases are raised by exact
    /// phase multiplication, so no modulus drift accumulates with n.
    pub fn state_at(&self, coefficients: &CVec, n: u64) -> CVec {
        let evolved: CVec = coefficients
            .iter()
            .zip(self.eigenphases.iter())
            .map(|(c, &e)| c * C64::from_polar(1.0, e * n as f64))
            .collect();
        self.vectors.dot(&evolved)
    }

    /// U^n via the spectral decomposition.
    pub fn power(&self, n: u64) -> CMat {
        use ndarray_linalg::Solve;
        let d = self.dim();
        let mut m = self.vectors.clone();
        let phases: CVec = self
            .eigenphases
            .iter()
            .map(|&e| C64::from_polar(1.0, e * n as f64))
            .collect();
        linalg::scale_columns(&mut m, &phases);
        // right-multiply by V^{-1}: solve V^T X^T = M^T column by column
        let mut inv_rows = CMat::zeros((d, d));
        for i in 0..d {
            let mut unit = CVec::zeros(d);
            unit[i] = C64::new(1.0, 0.0);
            let col = self.lu.solve(&unit).expect("LU solve");
            inv_rows.column_mut(i).assign(&col);
        }
        m.dot(&inv_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};
    use crate::spin::SphericalPoint;

    #[test]
    fn transform_examples() {
        assert_eq!(transform_kicks(3.0, 1.0), (2.0, 1.0));
        // (k, 0) -> (k/2, k/2): the standard QKT embedding
        assert_eq!(transform_kicks(1.8, 0.0), (0.9, 0.9));
        // (k, k) -> (k, 0): the k_theta = 0 symmetric case
        assert_eq!(transform_kicks(1.8, 1.8), (1.8, 0.0));
    }

    #[test]
    fn transform_round_trip() {
        for (k, kp) in [(3.0, 1.0), (0.37, -2.9), (7.25, 7.25)] {
            let params = KickParameters::from_physical(k, kp, FRAC_PI_2).unwrap();
            assert!((params.kr + params.ktheta - k).abs() < 1e-14);
            assert!((params.kr - params.ktheta - kp).abs() < 1e-14);
            let back = KickParameters::from_transformed(params.kr, params.ktheta, params.p).unwrap();
            assert!((back.k - k).abs() < 1e-14);
            assert!((back.kprime - kp).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(KickParameters::from_physical(f64::NAN, 0.0, FRAC_PI_2).is_err());
        assert!(KickParameters::from_transformed(1.0, f64::INFINITY, FRAC_PI_2).is_err());
    }

    #[test]
    fn floquet_is_unitary() {
        let sys = SpinSystem::new(2.0).unwrap();
        let params = KickParameters::transformed(PI, 0.3).unwrap();
        let u = build_floquet(sys, params).unwrap();
        assert!(linalg::unitarity_deviation(u.matrix()) < 1e-11);
    }

    #[test]
    fn qkt_reduction_when_kprime_zero() {
        // with k' = 0 the Jx^2 factor is exactly absent
        let sys = SpinSystem::new(3.0).unwrap();
        let params = KickParameters::from_physical(2.6, 0.0, FRAC_PI_2).unwrap();
        let u = build_floquet(sys, params).unwrap();
        let two_j = f64::from(sys.two_j());
        let qkt = spin::exp_quadratic_z(sys, 2.6 / two_j)
            .unwrap()
            .dot(&spin::rotation_about_y(sys, FRAC_PI_2).unwrap());
        assert!(max_abs_diff(u.matrix(), &qkt) < 1e-12);
    }

    #[test]
    fn pure_rotation_has_period_four() {
        // k = k' = 0, p = pi/2: rotation by pi/2 about y, so U^4 = (-1)^{2j} 1
        for j in [1.0, 1.5] {
            let sys = SpinSystem::new(j).unwrap();
            let params = KickParameters::transformed(0.0, 0.0).unwrap();
            let u = build_floquet(sys, params).unwrap();
            let cert = certify_projective_period(&u, 16, 1e-9);
            assert_eq!(cert.period, Some(4), "j={}", j);
        }
    }

    #[test]
    fn power_paths_agree() {
        let sys = SpinSystem::new(2.5).unwrap();
        let params = KickParameters::transformed(1.7, 0.4).unwrap();
        let u = build_floquet(sys, params).unwrap();
        let eig = FloquetEigen::new(&u).unwrap();
        for n in [0u64, 1, 12, 97, 1000] {
            let squaring = floquet_power(&u, n);
            let spectral = eig.power(n);
            assert!(
                max_abs_diff(&squaring, &spectral) < 1e-9,
                "n={} deviation {}",
                n,
                max_abs_diff(&squaring, &spectral)
            );
        }
    }

    #[test]
    fn half_odd_j_period_twelve_power() {
        // j=5/2 at k_r = j pi/2: U^12 proportional to the identity
        let sys = SpinSystem::new(2.5).unwrap();
        let kr = sys.j() * FRAC_PI_2;
        let params = KickParameters::transformed(kr, 0.9).unwrap();
        let u = build_floquet(sys, params).unwrap();
        let p12 = floquet_power(&u, 12);
        let phase = (p12[[0, 0]] / p12[[0, 0]].norm()).arg();
        assert!(linalg::phase_identity_residual(&p12, phase) < 1e-9);
    }

    #[test]
    fn trajectory_basics() {
        let sys = SpinSystem::new(2.0).unwrap();
        let params = KickParameters::transformed(1.1, 0.2).unwrap();
        let u = build_floquet(sys, params).unwrap();
        let psi0 = spin::coherent_state(sys, SphericalPoint::new(1.0, 0.5));
        let traj = evolve_trajectory(&u, &psi0, 0);
        assert_eq!(traj.len(), 1);
        let traj = evolve_trajectory(&u, &psi0, 20);
        assert_eq!(traj.len(), 21);
        for state in &traj {
            assert!((state.norm() - 1.0).abs() < 1e-10);
        }
        // step agrees with trajectory
        let stepped = u.step(&psi0);
        assert!(
            (stepped.overlap(&traj[1]).norm() - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn certificate_none_reports_min_residual() {
        // generic parameters: no projective period below the cutoff
        let sys = SpinSystem::new(1.5).unwrap();
        let params = KickParameters::transformed(1.234, 0.567).unwrap();
        let u = build_floquet(sys, params).unwrap();
        let cert = certify_projective_period(&u, 24, 1e-9);
        assert_eq!(cert.period, None);
        assert!(cert.residual.is_finite() && cert.residual > 1e-9);
    }

    #[test]
    fn period_divisibility() {
        // at a certified period m, U^{nm} stays a pure phase within 10 tol
        let sys = SpinSystem::new(2.0).unwrap();
        let kr = sys.j() * FRAC_PI_2;
        let params = KickParameters::transformed(kr, 0.37).unwrap();
        let u = build_floquet(sys, params).unwrap();
        let cert = certify_projective_period(&u, 96, 1e-9);
        let m = cert.period.expect("period expected") as u64;
        for n in 1..=4u64 {
            let p = floquet_power(&u, n * m);
            let d = u.dim();
            let trace: C64 = (0..d).map(|i| p[[i, i]]).sum();
            let phase = (trace / d as f64).arg();
            assert!(linalg::phase_identity_residual(&p, phase) < 10.0 * cert.tolerance);
        }
    }

    #[test]
    fn identity_has_period_one() {
        let sys = SpinSystem::new(1.0).unwrap();
        let params = KickParameters::transformed(0.0, 0.0).unwrap();
        let mut u = build_floquet(sys, params).unwrap();
        u.matrix = identity(sys.dim());
        let cert = certify_projective_period(&u, 8, 1e-9);
        assert_eq!(cert.period, Some(1));
        assert!(cert.phase.unwrap().abs() < 1e-12);
    }
}
