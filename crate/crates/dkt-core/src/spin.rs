//! Spin-j representations in the Dicke basis: collective angular momentum
//! operators, axis rotations, quadratic-kick exponentials and spin-coherent
//! states.
//!
//! The Dicke basis is ordered m = j, j-1, ..., -j, so `Jz` is diagonal with
//! descending entries and index `i` carries m = j - i. All operators are
//! dense complex matrices; sizes up to d ~ 1000 are eigendecomposed directly.

use ndarray::Array1;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec};

/// A spin-j system, j half-integer, with Hilbert-space dimension d = 2j + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinSystem {
    two_j: u32,
}

impl SpinSystem {
    /// Construct from j itself. Rejects j <= 0 and non-half-integer j.
    pub fn new(j: f64) -> Result<Self> {
        if !j.is_finite() || j <= 0.0 {
            return Err(Error::InvalidSpin { j });
        }
        let two_j = 2.0 * j;
        if (two_j - two_j.round()).abs() > 1e-9 || two_j.round() < 1.0 {
            return Err(Error::InvalidSpin { j });
        }
        Ok(SpinSystem { two_j: two_j.round() as u32 })
    }

    /// Construct from the integer 2j.
    pub fn from_two_j(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin { j: 0.0 });
        }
        Ok(SpinSystem { two_j })
    }

    pub fn j(&self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    /// Hilbert-space dimension d = 2j + 1.
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// True when j is an integer (2j even).
    pub fn is_integer_j(&self) -> bool {
        self.two_j % 2 == 0
    }

    /// m value carried by Dicke index `i`: m = j - i.
    pub fn m_at(&self, i: usize) -> f64 {
        self.j() - i as f64
    }
}

/// The collective operators Jx, Jy, Jz in the Dicke basis.
#[derive(Debug, Clone)]
pub struct SpinOperatorTriple {
    pub jx: CMat,
    pub jy: CMat,
    pub jz: CMat,
}

/// Builds Jx, Jy, Jz from the ladder operators
/// J±|j,m> = sqrt(j(j+1) - m(m±1)) |j,m±1>.
pub fn build_angular_momentum(sys: SpinSystem) -> SpinOperatorTriple {
    let d = sys.dim();
    let j = sys.j();
    let mut jx = CMat::zeros((d, d));
    let mut jy = CMat::zeros((d, d));
    let mut jz = CMat::zeros((d, d));
    for i in 0..d {
        let m = sys.m_at(i);
        jz[[i, i]] = C64::new(m, 0.0);
        if i > 0 {
            // raising: index i -> i-1
            let c = (j * (j + 1.0) - m * (m + 1.0)).sqrt();
            jx[[i - 1, i]] += C64::new(c / 2.0, 0.0);
            jy[[i - 1, i]] += C64::new(0.0, -c / 2.0);
        }
        if i < d - 1 {
            let c = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
            jx[[i + 1, i]] += C64::new(c / 2.0, 0.0);
            jy[[i + 1, i]] += C64::new(0.0, c / 2.0);
        }
    }
    SpinOperatorTriple { jx, jy, jz }
}

/// Cached eigendecomposition of Jy for a given spin system.
///
/// Rotations about y for every angle, and the fixed conjugation that maps
/// Jz^2 to Jx^2, all reuse this one Hermitian eigendecomposition.
#[derive(Debug, Clone)]
pub struct YRotationBasis {
    sys: SpinSystem,
    eigenvalues: Array1<f64>,
    eigenvectors: CMat,
    eigenvectors_dag: CMat,
}

impl YRotationBasis {
    pub fn new(sys: SpinSystem) -> Result<Self> {
        let triple = build_angular_momentum(sys);
        let (w, v) = linalg::hermitian_eigen(&triple.jy)?;
        let vdag = linalg::dagger(&v);
        Ok(YRotationBasis { sys, eigenvalues: w, eigenvectors: v, eigenvectors_dag: vdag })
    }

    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    /// exp(-i angle Jy).
    pub fn rotation(&self, angle: f64) -> CMat {
        let phases: CVec = self
            .eigenvalues
            .iter()
            .map(|&w| C64::from_polar(1.0, -angle * w))
            .collect();
        let mut m = self.eigenvectors.clone();
        linalg::scale_columns(&mut m, &phases);
        m.dot(&self.eigenvectors_dag)
    }
}

/// exp(-i angle Jy) as a dense unitary.
pub fn rotation_about_y(sys: SpinSystem, angle: f64) -> Result<CMat> {
    if !angle.is_finite() {
        return Err(Error::NonFinite { name: "angle", value: angle });
    }
    Ok(YRotationBasis::new(sys)?.rotation(angle))
}

/// Diagonal phases of exp(-i a Jz^2): entry i is exp(-i a m_i^2).
pub fn quadratic_z_phases(sys: SpinSystem, a: f64) -> CVec {
    (0..sys.dim())
        .map(|i| {
            let m = sys.m_at(i);
            C64::from_polar(1.0, -a * m * m)
        })
        .collect()
}

/// exp(-i a Jz^2), diagonal in the Dicke basis.
pub fn exp_quadratic_z(sys: SpinSystem, a: f64) -> Result<CMat> {
    if !a.is_finite() {
        return Err(Error::NonFinite { name: "a", value: a });
    }
    Ok(CMat::from_diag(&quadratic_z_phases(sys, a)))
}

/// exp(-i a Jx^2) = R exp(-i a Jz^2) R† with the fixed conjugation
/// R = exp(+i (pi/2) Jy), which maps Jz to -Jx (the sign is irrelevant
/// under the square).
pub fn exp_quadratic_x(sys: SpinSystem, a: f64) -> Result<CMat> {
    if !a.is_finite() {
        return Err(Error::NonFinite { name: "a", value: a });
    }
    let basis = YRotationBasis::new(sys)?;
    Ok(exp_quadratic_x_in(&basis, a))
}

/// Same as [`exp_quadratic_x`] but reusing a precomputed Jy eigenbasis.
pub fn exp_quadratic_x_in(basis: &YRotationBasis, a: f64) -> CMat {
    let r = basis.rotation(-PI / 2.0);
    let mut m = r.clone();
    linalg::scale_columns(&mut m, &quadratic_z_phases(basis.sys(), a));
    m.dot(&linalg::dagger(&r))
}

/// A point on the sphere, theta in [0, pi], phi in [-pi, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    theta: f64,
    phi: f64,
}

impl SphericalPoint {
    /// Clamps theta into [0, pi] and wraps phi into [-pi, pi).
    pub fn new(theta: f64, phi: f64) -> Self {
        let theta = theta.clamp(0.0, PI);
        let mut phi = (phi + PI).rem_euclid(2.0 * PI) - PI;
        if phi >= PI {
            phi -= 2.0 * PI;
        }
        SphericalPoint { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// A normalized pure state in the Dicke basis.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVec,
}

impl PureState {
    /// Wraps an amplitude vector, requiring unit norm within 1e-12.
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm, tolerance: 1e-12 });
        }
        Ok(PureState { amplitudes })
    }

    /// Wraps without the norm check; for raw evolution output where norm
    /// drift is itself the observable.
    pub fn from_amplitudes_unchecked(amplitudes: CVec) -> Self {
        PureState { amplitudes }
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// <self|A|self> for a Hermitian operator A; returns the real part.
    pub fn expectation(&self, op: &CMat) -> f64 {
        let applied = op.dot(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Natural logarithms of factorials 0..=n.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    lf
}

/// Spin-coherent state |theta, phi>.
///
/// Amplitude on |j,m> (index i = j - m):
///   binom(2j, i)^{1/2} cos(theta/2)^{2j-i} sin(theta/2)^{i} e^{-i i phi}.
/// Evaluated in log space so binomials up to 2j ~ 1000 do not overflow.
pub fn coherent_state(sys: SpinSystem, point: SphericalPoint) -> PureState {
    let n = sys.two_j() as usize;
    let lf = ln_factorials(n);
    let half = point.theta() / 2.0;
    let (c, s) = (half.cos(), half.sin());
    let amplitudes: CVec = (0..=n)
        .map(|i| {
            // 0^0 = 1 at the poles: a zero factor only kills terms with
            // positive exponent.
            if (c == 0.0 && n - i > 0) || (s == 0.0 && i > 0) {
                return C64::new(0.0, 0.0);
            }
            let mut ln_mag = 0.5 * (lf[n] - lf[i] - lf[n - i]);
            if n - i > 0 {
                ln_mag += (n - i) as f64 * c.ln();
            }
            if i > 0 {
                ln_mag += i as f64 * s.ln();
            }
            C64::from_polar(ln_mag.exp(), -(i as f64) * point.phi())
        })
        .collect();
    PureState { amplitudes }
}
