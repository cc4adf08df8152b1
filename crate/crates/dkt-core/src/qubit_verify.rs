//! Machine verification of the tensor-product operator identities behind
//! the kicked-top recurrence proofs, carried out in the full 2^n qubit
//! space at small n.
//!
//! Conventions: qubit 0 is the most significant bit; collective operators
//! are J_i = (1/2) sum_a sigma_i^(a); the Dicke state of weight w embeds as
//! the uniform superposition of all weight-w bit strings.
//!
//! Several published closed forms quote eigenvalues and scalar prefactors
//! in the interaction picture that drops the identity component of the
//! quadratic exponents (exp(-i a J_i^2) = e^{-i a n/4} x pair-interaction
//! part). Checks below normalize by that exactly-known scalar where the
//! quoted form requires it; the constants are written out at the call
//! sites.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::floquet::KickParameters;
use crate::linalg::{self, C64, CMat, CVec};
use crate::spin::SpinSystem;

pub const MAX_QUBITS: usize = 12;

/// Outcome of a single identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub n: usize,
    pub residual: f64,
    pub threshold: f64,
    /// `AtMost`: pass when residual < threshold (an identity holds).
    /// `AtLeast`: pass when residual > threshold (a discrimination check).
    pub requirement: Requirement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    AtMost,
    AtLeast,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        match self.requirement {
            Requirement::AtMost => self.residual < self.threshold,
            Requirement::AtLeast => self.residual > self.threshold,
        }
    }

    fn at_most(name: impl Into<String>, n: usize, residual: f64, threshold: f64) -> Self {
        IdentityCheck { name: name.into(), n, residual, threshold, requirement: Requirement::AtMost }
    }

    fn at_least(name: impl Into<String>, n: usize, residual: f64, threshold: f64) -> Self {
        IdentityCheck { name: name.into(), n, residual, threshold, requirement: Requirement::AtLeast }
    }
}

fn check_range(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        return Err(Error::QubitCountRange { n, min, max });
    }
    Ok(())
}

fn require_even(n: usize) -> Result<()> {
    if n % 2 != 0 {
        return Err(Error::WrongParity { n, expected_parity: "even" });
    }
    Ok(())
}

fn require_odd(n: usize) -> Result<()> {
    if n % 2 != 1 {
        return Err(Error::WrongParity { n, expected_parity: "odd" });
    }
    Ok(())
}

// ---- dense tensor helpers ------------------------------------------------

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = CMat::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for k in 0..ca {
            let aik = a[[i, k]];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..rb {
                for q in 0..cb {
                    out[[i * rb + p, k * cb + q]] = aik * b[[p, q]];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            out[i * b.len() + k] = x * y;
        }
    }
    out
}

pub fn tensor_power(a: &CMat, n: usize) -> CMat {
    let mut out = CMat::eye(1);
    for _ in 0..n {
        out = kron(&out, a);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

pub fn pauli_matrix(p: Pauli) -> CMat {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match p {
        Pauli::I => ndarray::array![[o, z], [z, o]],
        Pauli::X => ndarray::array![[z, o], [o, z]],
        Pauli::Y => ndarray::array![[z, -i], [i, z]],
        Pauli::Z => ndarray::array![[o, z], [z, -o]],
    }
}

/// Operator acting with `p` on one site and identity elsewhere.
pub fn single_site(n: usize, site: usize, p: Pauli) -> CMat {
    let mut out = CMat::eye(1);
    for q in 0..n {
        let f = if q == site { pauli_matrix(p) } else { pauli_matrix(Pauli::I) };
        out = kron(&out, &f);
    }
    out
}

/// Collective J_i = (1/2) sum_a sigma_i^(a) on n qubits.
pub fn collective_j(n: usize, p: Pauli) -> CMat {
    let dim = 1usize << n;
    let mut out = CMat::zeros((dim, dim));
    for site in 0..n {
        out = out + single_site(n, site, p).mapv(|z| z * 0.5);
    }
    out
}

/// exp(-i a H) for Hermitian H.
pub fn expm_hermitian(h: &CMat, a: f64) -> Result<CMat> {
    let (w, v) = linalg::hermitian_eigen(h)?;
    let phases: CVec = w.iter().map(|&x| C64::from_polar(1.0, -a * x)).collect();
    let mut m = v.clone();
    linalg::scale_columns(&mut m, &phases);
    Ok(m.dot(&linalg::dagger(&v)))
}

/// gamma = exp(-i pi/4 sigma_y), written with exact entries.
pub fn gamma_qubit() -> CMat {
    let c = C64::new(FRAC_1_SQRT_2, 0.0);
    ndarray::array![[c, -c], [c, c]]
}

/// Full-space Floquet operator on n qubits (j = n/2).
pub fn full_space_floquet(n: usize, params: KickParameters) -> Result<CMat> {
    let j = n as f64 / 2.0;
    let jx = collective_j(n, Pauli::X);
    let jz = collective_j(n, Pauli::Z);
    let jy = collective_j(n, Pauli::Y);
    let ux = expm_hermitian(&jx.dot(&jx), params.kprime / (2.0 * j))?;
    let uz = expm_hermitian(&jz.dot(&jz), params.k / (2.0 * j))?;
    let uy = expm_hermitian(&jy, params.p)?;
    Ok(ux.dot(&uz).dot(&uy))
}

// ---- identity checks -----------------------------------------------------

/// Single-qubit gamma relations gamma sz = sx gamma, sz gamma = -gamma sx,
/// plus the tensor-lift consequence gamma^{xn} exp(-i a Jz^2) =
/// exp(-i a Jx^2) gamma^{xn} at a in {0, 0.9}.
pub fn verify_gamma_relations(n: usize) -> Result<f64> {
    check_range(n, 1, MAX_QUBITS)?;
    let g = gamma_qubit();
    let sx = pauli_matrix(Pauli::X);
    let sz = pauli_matrix(Pauli::Z);
    let mut residual = linalg::max_abs_diff(&g.dot(&sz), &sx.dot(&g));
    residual = residual.max(linalg::max_abs(&(sz.dot(&g) + g.dot(&sx))));
    if n >= 2 {
        let gn = tensor_power(&g, n);
        let jx = collective_j(n, Pauli::X);
        let jz = collective_j(n, Pauli::Z);
        for a in [0.0, 0.9] {
            let ez = expm_hermitian(&jz.dot(&jz), a)?;
            let ex = expm_hermitian(&jx.dot(&jx), a)?;
            residual = residual.max(linalg::max_abs_diff(&gn.dot(&ez), &ex.dot(&gn)));
        }
    }
    Ok(residual)
}

fn c_operators(n: usize) -> (CMat, CMat, CMat) {
    let i = C64::new(0.0, 1.0);
    let id = CMat::eye(1 << n);
    let isy = tensor_power(&pauli_matrix(Pauli::Y).mapv(|z| z * i), n);
    let isz = tensor_power(&pauli_matrix(Pauli::Z).mapv(|z| z * i), n);
    let isx = tensor_power(&pauli_matrix(Pauli::X).mapv(|z| z * i), n);
    let cos45 = C64::new(FRAC_1_SQRT_2, 0.0);
    let c1 = (&id + &isy).mapv(|z| z * cos45) + (&isz + &isx).mapv(|z| z * cos45 * i);
    let c2 = &id - &isy;
    let c3 = (&isz - &isx).mapv(|z| z * i);
    (c1, c2, c3)
}

/// The coefficient-operator algebra of the squared Floquet operator at
/// k_r = j pi/2, even 2j: {C1,C2} = 0, [C3,C1] = 0, [C3,C2] = 0,
/// C3^2 = -C2^2, and the identity blocks
/// [1 +/- (i sy)^{xn}, (i sz)^{xn} - (i sx)^{xn}] = 0.
pub fn verify_c_algebra(n: usize) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 10)?;
    let (c1, c2, c3) = c_operators(n);
    let i = C64::new(0.0, 1.0);
    let id = CMat::eye(1 << n);
    let isy = tensor_power(&pauli_matrix(Pauli::Y).mapv(|z| z * i), n);
    let isz = tensor_power(&pauli_matrix(Pauli::Z).mapv(|z| z * i), n);
    let isx = tensor_power(&pauli_matrix(Pauli::X).mapv(|z| z * i), n);
    let zx = &isz - &isx;
    let mut residual = linalg::max_abs(&(c1.dot(&c2) + c2.dot(&c1)));
    residual = residual.max(linalg::max_abs(&(c3.dot(&c1) - c1.dot(&c3))));
    residual = residual.max(linalg::max_abs(&(c3.dot(&c2) - c2.dot(&c3))));
    residual = residual.max(linalg::max_abs(&(c3.dot(&c3) + c2.dot(&c2))));
    let plus = &id + &isy;
    let minus = &id - &isy;
    residual = residual.max(linalg::max_abs(&(plus.dot(&zx) - zx.dot(&plus))));
    residual = residual.max(linalg::max_abs(&(minus.dot(&zx) - zx.dot(&minus))));
    Ok(residual)
}

/// Residual of the anticommutator {C1, C2} for odd n, which must NOT vanish
/// (parity discrimination of the even-2j algebra).
pub fn c_algebra_odd_discrimination(n: usize) -> Result<f64> {
    require_odd(n)?;
    check_range(n, 3, 9)?;
    let (c1, c2, _) = c_operators(n);
    Ok(linalg::max_abs(&(c1.dot(&c2) + c2.dot(&c1))))
}

/// For odd n, [exp(-s i pi/2 J_a^2) exp(-s i pi/2 J_b^2)]^3 is the scalar
/// e^{-s i 3 pi/4} times the identity, for both signs and either axis order
/// of (z, x). The scalar is n-independent; it was pinned by direct
/// computation at n = 3, 5, 7. Returns the max residual against that form.
///
/// (The same product quoted as a flat -1 refers to Pauli-sum generators;
/// with the half-sum J used here and everywhere in this crate, the cube is
/// scalar but carries the e^{-s i 3 pi/4} phase. See
/// [`cube_documented_residual`] for the flat -1 comparison.)
pub fn verify_cube_identity(n: usize) -> Result<f64> {
    require_odd(n)?;
    check_range(n, 3, 11)?;
    let mut residual = 0.0f64;
    for sign in [1.0f64, -1.0] {
        let expected = C64::from_polar(1.0, -sign * 3.0 * PI / 4.0);
        for cube in cube_products(n, sign)? {
            let target = CMat::eye(1 << n).mapv(|z| z * expected);
            residual = residual.max(linalg::max_abs_diff(&cube, &target));
        }
    }
    Ok(residual)
}

/// Max residual of the same-sign cubes against -1 exactly as documented.
/// With half-sum generators this stays at |e^{-i 3 pi/4} + 1| ~ 0.765 for
/// every odd n; kept separate so the comparison is made explicitly.
pub fn cube_documented_residual(n: usize) -> Result<f64> {
    require_odd(n)?;
    check_range(n, 3, 11)?;
    let mut residual = 0.0f64;
    for sign in [1.0f64, -1.0] {
        for cube in cube_products(n, sign)? {
            residual = residual.max(linalg::max_abs(&(cube + CMat::eye(1 << n))));
        }
    }
    Ok(residual)
}

fn cube_products(n: usize, sign: f64) -> Result<Vec<CMat>> {
    let jx = collective_j(n, Pauli::X);
    let jz = collective_j(n, Pauli::Z);
    let jx2 = jx.dot(&jx);
    let jz2 = jz.dot(&jz);
    [(&jz2, &jx2), (&jx2, &jz2)]
        .into_iter()
        .map(|(a, b)| {
            let step =
                expm_hermitian(a, sign * PI / 2.0)?.dot(&expm_hermitian(b, sign * PI / 2.0)?);
            Ok(linalg::matrix_power(&step, 3))
        })
        .collect()
}

/// The same cube at even n, where it is not even scalar; the deviation from
/// the odd-n scalar form must stay large (parity discrimination).
pub fn cube_even_n_discrimination(n: usize) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 10)?;
    let cube = cube_products(n, 1.0)?.remove(0);
    let target = CMat::eye(1 << n).mapv(|z| z * C64::from_polar(1.0, -3.0 * PI / 4.0));
    Ok(linalg::max_abs_diff(&cube, &target))
}

/// O = [exp(-i a Jz^2) exp(-i a Jx^2)]^6 commutes with Jx^2 at a = pi/4.
pub fn verify_o_commutes_with_jx2(n: usize) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 8)?;
    o_commutator_residual(n, PI / 4.0)
}

/// Same commutator at an arbitrary angle; generic angles do not commute.
pub fn o_commutator_residual(n: usize, angle: f64) -> Result<f64> {
    let jx = collective_j(n, Pauli::X);
    let jz = collective_j(n, Pauli::Z);
    let jx2 = jx.dot(&jx);
    let jz2 = jz.dot(&jz);
    let o = linalg::matrix_power(&expm_hermitian(&jz2, angle)?.dot(&expm_hermitian(&jx2, angle)?), 6);
    Ok(linalg::max_abs(&(o.dot(&jx2) - jx2.dot(&o))))
}

/// U^12 at k_r = j pi/4 (j = n/2): mutual k_theta independence.
pub fn verify_u12_ktheta_independence(n: usize, kthetas: &[f64]) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 8)?;
    let powers = u12_powers(n, kthetas)?;
    let mut dev = 0.0f64;
    for i in 0..powers.len() {
        for k in i + 1..powers.len() {
            dev = dev.max(linalg::max_abs_diff(&powers[i], &powers[k]));
        }
    }
    Ok(dev)
}

fn u12_powers(n: usize, kthetas: &[f64]) -> Result<Vec<CMat>> {
    let j = n as f64 / 2.0;
    let kr = j * PI / 4.0;
    kthetas
        .iter()
        .map(|&kt| {
            let params = KickParameters::transformed(kr, kt)?;
            Ok(linalg::matrix_power(&full_space_floquet(n, params)?, 12))
        })
        .collect()
}

/// U^12 closed form at k_r = j pi/4, even 2j:
///
///   U^12 = (i/2) [ 1 + s sy^{xn} + i s sz^{xn} + i s sx^{xn} ] (gamma^{xn})^12,
///   s = (-1)^{n/2 + 1}.
///
/// The sign s and the prefactor were pinned by direct computation at
/// n = 2, 4, 6 and agree with squaring to U^24 = (-1)^{n/2} sy^{xn}.
pub fn verify_u12_closed_form(n: usize, kthetas: &[f64]) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 8)?;
    let powers = u12_powers(n, kthetas)?;
    let closed = u12_closed_form(n);
    let mut residual = 0.0f64;
    for p in &powers {
        residual = residual.max(linalg::max_abs_diff(p, &closed));
    }
    Ok(residual)
}

fn u12_closed_form(n: usize) -> CMat {
    let i = C64::new(0.0, 1.0);
    let s = if (n / 2 + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let id = CMat::eye(1 << n);
    let sy = tensor_power(&pauli_matrix(Pauli::Y), n);
    let sz = tensor_power(&pauli_matrix(Pauli::Z), n);
    let sx = tensor_power(&pauli_matrix(Pauli::X), n);
    let bracket = &id
        + &sy.mapv(|z| z * s)
        + &sz.mapv(|z| z * s * i)
        + &sx.mapv(|z| z * s * i);
    let g12n = tensor_power(&linalg::matrix_power(&gamma_qubit(), 12), n);
    bracket.mapv(|z| z * i * 0.5).dot(&g12n)
}

/// Residual of U^24 against the parity-resolved identity
/// U^24 = (-1)^{n/2} sy^{xn}.
pub fn u24_parity_resolved_residual(n: usize) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 8)?;
    let u24 = u24_power(n)?;
    let s = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let sy = tensor_power(&pauli_matrix(Pauli::Y), n).mapv(|z| z * s);
    Ok(linalg::max_abs_diff(&u24, &sy))
}

/// Residual of U^24 against -sy^{xn} for every k_theta-independent power.
/// This documented sign holds only for odd n/2; the parity-resolved form
/// above holds for all even n.
pub fn u24_documented_sign_residual(n: usize) -> Result<f64> {
    require_even(n)?;
    check_range(n, 2, 8)?;
    let u24 = u24_power(n)?;
    let msy = tensor_power(&pauli_matrix(Pauli::Y), n).mapv(|z| -z);
    Ok(linalg::max_abs_diff(&u24, &msy))
}

fn u24_power(n: usize) -> Result<CMat> {
    let j = n as f64 / 2.0;
    let params = KickParameters::transformed(j * PI / 4.0, 0.0)?;
    Ok(linalg::matrix_power(&full_space_floquet(n, params)?, 24))
}

// ---- singlet-paired aperiodicity construction -----------------------------

/// Odd-n state built from (n-3)/2 two-qubit singlets and a 3-qubit block.
#[derive(Debug, Clone)]
pub struct SingletPairedState {
    pub n: usize,
    pub amplitudes: CVec,
    /// Qubit index pairs carrying singlets, then the three unpaired qubits.
    pub pairing: (Vec<(usize, usize)>, [usize; 3]),
}

/// Tensor of singlets (|01> - |10>)/sqrt(2) on qubits (0,1), (2,3), ...
/// with `triple` on the last three qubits.
pub fn build_singlet_paired_state(n: usize, triple: &CVec) -> Result<SingletPairedState> {
    require_odd(n)?;
    check_range(n, 3, MAX_QUBITS - 1)?;
    if triple.len() != 8 {
        return Err(Error::DimensionMismatch { expected: 8, actual: triple.len() });
    }
    let norm = triple.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm, tolerance: 1e-12 });
    }
    let inv = FRAC_1_SQRT_2;
    let singlet: CVec = ndarray::array![
        C64::new(0.0, 0.0),
        C64::new(inv, 0.0),
        C64::new(-inv, 0.0),
        C64::new(0.0, 0.0)
    ];
    let pairs = (n - 3) / 2;
    let mut state = CVec::from(vec![C64::new(1.0, 0.0)]);
    for _ in 0..pairs {
        state = kron_vec(&state, &singlet);
    }
    state = kron_vec(&state, triple);
    let pairing = (
        (0..pairs).map(|p| (2 * p, 2 * p + 1)).collect(),
        [n - 3, n - 2, n - 1],
    );
    Ok(SingletPairedState { n, amplitudes: state, pairing })
}

/// Residuals of the construction's defining properties:
/// (sigma_i^(a) + sigma_i^(b)) |psi> = 0 on each pair, and
/// P(J_i) |psi> = (1 x P(J_i^(3))) |psi> for P = identity and P = square.
pub fn verify_singlet_construction(n: usize, triple: &CVec) -> Result<f64> {
    let state = build_singlet_paired_state(n, triple)?;
    let psi = &state.amplitudes;
    let mut residual = 0.0f64;
    for &(a, b) in &state.pairing.0 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let op = single_site(n, a, p) + single_site(n, b, p);
            let r = op.dot(psi).iter().map(|z| z.norm()).fold(0.0, f64::max);
            residual = residual.max(r);
        }
    }
    let dim_pairs = 1usize << (n - 3);
    let id_pairs = CMat::eye(dim_pairs);
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let j_full = collective_j(n, p);
        let j3 = kron(&id_pairs, &collective_j(3, p));
        let r1 = (j_full.dot(psi) - j3.dot(psi))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let j_full_sq = j_full.dot(&j_full);
        let j3_sq = j3.dot(&j3);
        let r2 = (j_full_sq.dot(psi) - j3_sq.dot(psi))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        residual = residual.max(r1).max(r2);
    }
    Ok(residual)
}

// ---- the 3-qubit block operator ------------------------------------------

/// Scalar phase carried by the identity components of the two exponentials
/// in A3 = exp(-i pi/4 Jz^2) exp(-i pi/4 Jx^2) on three qubits: each
/// contributes e^{-i (pi/4)(3/4)}, so the documented eigenvalues are the
/// raw ones times e^{+ i 3 pi / 8}.
pub const A3_IDENTITY_PHASE: f64 = -3.0 * PI / 8.0;

/// Eigenvalues (clustered with tol 1e-10) of the three-qubit block operator
/// A3 = exp(-i pi/4 Jz^2) exp(-i pi/4 Jx^2), sorted by phase angle.
pub fn a3_spectrum() -> Result<Vec<(C64, usize)>> {
    let n = 3;
    let jx = collective_j(n, Pauli::X);
    let jz = collective_j(n, Pauli::Z);
    let a3 = expm_hermitian(&jz.dot(&jz), PI / 4.0)?.dot(&expm_hermitian(&jx.dot(&jx), PI / 4.0)?);
    let values = linalg::general_eigenvalues(&a3)?;
    let mut sorted: Vec<C64> = values.iter().cloned().collect();
    sorted.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for v in sorted {
        match clusters.last_mut() {
            Some((rep, count)) if (*rep - v).norm() < 1e-10 => *count += 1,
            _ => clusters.push((v, 1)),
        }
    }
    Ok(clusters)
}

/// The documented A3 eigenvalue set: e^{i pi/4} (multiplicity 4) and
/// e^{i pi/4} (±sqrt(7) - 3i)/4 (multiplicity 2 each).
pub fn a3_expected_spectrum() -> Vec<(C64, usize)> {
    let phase = C64::from_polar(1.0, PI / 4.0);
    let s7 = 7.0f64.sqrt();
    vec![
        (phase * C64::new(-s7 / 4.0, -3.0 / 4.0), 2),
        (phase * C64::new(s7 / 4.0, -3.0 / 4.0), 2),
        (phase, 4),
    ]
}

/// Max deviation of the measured A3 spectrum (normalized by the
/// identity-component phase) from the documented set, including
/// multiplicities. Returns infinity if multiplicities disagree.
pub fn a3_spectrum_residual() -> Result<f64> {
    let measured = a3_spectrum()?;
    let strip = C64::from_polar(1.0, -A3_IDENTITY_PHASE);
    let mut normalized: Vec<(C64, usize)> = measured
        .iter()
        .map(|&(v, m)| (v * strip, m))
        .collect();
    normalized.sort_by(|a, b| a.0.arg().partial_cmp(&b.0.arg()).unwrap());
    let mut expected = a3_expected_spectrum();
    expected.sort_by(|a, b| a.0.arg().partial_cmp(&b.0.arg()).unwrap());
    if normalized.len() != expected.len() {
        return Ok(f64::INFINITY);
    }
    let mut residual = 0.0f64;
    for ((v, m), (ev, em)) in normalized.iter().zip(expected.iter()) {
        if m != em {
            return Ok(f64::INFINITY);
        }
        residual = residual.max((v - ev).norm());
    }
    Ok(residual)
}

/// Minimum over m <= `max_power` of |lambda^m - 1| for the non-trivial A3
/// eigenvalues (documented convention). Aperiodicity evidence: these never
/// return to 1.
pub fn a3_no_return_margin(max_power: usize) -> f64 {
    let s7 = 7.0f64.sqrt();
    let phase = C64::from_polar(1.0, PI / 4.0);
    let lambdas = [
        phase * C64::new(s7 / 4.0, -3.0 / 4.0),
        phase * C64::new(-s7 / 4.0, -3.0 / 4.0),
    ];
    let mut margin = f64::INFINITY;
    for lambda in lambdas {
        let arg = lambda.arg();
        for m in 1..=max_power {
            let v = C64::from_polar(1.0, arg * m as f64);
            margin = margin.min((v - C64::new(1.0, 0.0)).norm());
        }
    }
    margin
}

// ---- full-space vs symmetric-subspace consistency --------------------------

/// Isometry from the (n+1)-dim symmetric subspace into the 2^n space:
/// column w is the normalized uniform superposition of weight-w strings.
pub fn symmetric_isometry(n: usize) -> CMat {
    let dim = 1usize << n;
    let mut counts = vec![0usize; n + 1];
    for x in 0..dim {
        counts[(x as u32).count_ones() as usize] += 1;
    }
    let mut s = CMat::zeros((dim, n + 1));
    for x in 0..dim {
        let w = (x as u32).count_ones() as usize;
        s[[x, w]] = C64::new(1.0 / (counts[w] as f64).sqrt(), 0.0);
    }
    s
}

/// Residual between the full-space Floquet operator restricted to the
/// symmetric subspace and the spin-j operator built directly.
pub fn full_vs_symmetric_residual(n: usize, params: KickParameters) -> Result<f64> {
    check_range(n, 2, 8)?;
    let full = full_space_floquet(n, params)?;
    let s = symmetric_isometry(n);
    let restricted = linalg::dagger(&s).dot(&full).dot(&s);
    let sys = SpinSystem::from_two_j(n as u32)?;
    let direct = crate::floquet::build_floquet(sys, params)?;
    Ok(linalg::max_abs_diff(&restricted, direct.matrix()))
}

// ---- suite -----------------------------------------------------------------

/// Runs every identity check up to `max_n` qubits and returns the results.
/// All listed identities are expected to pass; discrimination entries
/// (named `*_discrimination`) pass by exceeding their threshold.
pub fn run_identity_suite(max_n: usize) -> Result<Vec<IdentityCheck>> {
    let max_n = max_n.min(MAX_QUBITS);
    let mut checks = Vec::new();

    for n in (1..=max_n.min(4)).chain([6].into_iter().filter(|&x| x <= max_n)) {
        checks.push(IdentityCheck::at_most(
            "gamma_relations",
            n,
            verify_gamma_relations(n)?,
            if n == 1 { 1e-15 } else { 1e-12 },
        ));
    }

    for n in [2usize, 4].into_iter().filter(|&x| x <= max_n) {
        checks.push(IdentityCheck::at_most("c_algebra", n, verify_c_algebra(n)?, 1e-13));
    }
    if max_n >= 3 {
        checks.push(IdentityCheck::at_least(
            "c_algebra_odd_discrimination",
            3,
            c_algebra_odd_discrimination(3)?,
            1e-3,
        ));
    }

    for n in [3usize, 5].into_iter().filter(|&x| x <= max_n) {
        checks.push(IdentityCheck::at_most("cube_identity", n, verify_cube_identity(n)?, 1e-12));
    }
    if max_n >= 2 {
        checks.push(IdentityCheck::at_least(
            "cube_even_n_discrimination",
            2,
            cube_even_n_discrimination(2)?,
            0.1,
        ));
    }

    for n in [2usize, 4].into_iter().filter(|&x| x <= max_n) {
        checks.push(IdentityCheck::at_most(
            "o_commutes_with_jx2",
            n,
            verify_o_commutes_with_jx2(n)?,
            1e-12,
        ));
    }
    if max_n >= 4 {
        // at n = 2 the 6th power commutes at any angle (too few levels to
        // obstruct); the generic angle only discriminates from n = 4 up
        checks.push(IdentityCheck::at_least(
            "o_generic_angle_discrimination",
            4,
            o_commutator_residual(4, PI / 5.0)?,
            1e-3,
        ));
    }

    let kthetas = [0.0, 0.4, PI / 4.0];
    for n in [2usize, 4].into_iter().filter(|&x| x <= max_n) {
        checks.push(IdentityCheck::at_most(
            "u12_ktheta_independence",
            n,
            verify_u12_ktheta_independence(n, &kthetas)?,
            1e-11,
        ));
        checks.push(IdentityCheck::at_most(
            "u12_closed_form",
            n,
            verify_u12_closed_form(n, &kthetas)?,
            1e-11,
        ));
        checks.push(IdentityCheck::at_most(
            "u24_parity_resolved",
            n,
            u24_parity_resolved_residual(n)?,
            1e-11,
        ));
    }

    let mut triple = CVec::zeros(8);
    triple[0] = C64::new(1.0, 0.0);
    for n in [3usize, 5].into_iter().filter(|&x| x <= max_n) {
        checks.push(IdentityCheck::at_most(
            "singlet_construction",
            n,
            verify_singlet_construction(n, &triple)?,
            1e-12,
        ));
    }

    if max_n >= 3 {
        checks.push(IdentityCheck::at_most("a3_spectrum", 3, a3_spectrum_residual()?, 1e-10));
        let unimod = a3_spectrum()?
            .iter()
            .map(|(v, _)| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push(IdentityCheck::at_most("a3_unimodular", 3, unimod, 1e-12));
        checks.push(IdentityCheck::at_least(
            "a3_no_return_within_1000",
            3,
            a3_no_return_margin(1000),
            1e-6,
        ));
    }

    for n in (2..=max_n.min(6)).filter(|&x| x >= 2) {
        let j = n as f64 / 2.0;
        let params = KickParameters::transformed(j * PI / 2.0, 0.37)?;
        checks.push(IdentityCheck::at_most(
            "full_vs_symmetric",
            n,
            full_vs_symmetric_residual(n, params)?,
            1e-10,
        ));
    }

    Ok(checks)
}
