//! Simulation library for the double kicked top (DKT), a driven collective
//! spin evolved once per period by
//!
//! ```text
//! U = exp(-i k'/(2j) Jx^2) · exp(-i k/(2j) Jz^2) · exp(-i p Jy)
//! ```
//!
//! with two quadratic kicks of strengths k and k' and a precession angle p
//! (pi/2 unless stated). In the transformed parameters k_r = (k + k')/2 and
//! k_theta = (k - k')/2, the operator is exactly periodic up to a global
//! phase at k_r = j pi/2 (period 8 for integer j, 12 for half-odd j) and at
//! k_r = j pi/4 (period 48 for integer j, none for half-odd j), for every
//! k_theta.
//!
//! The crate provides:
//!
//! - [`spin`]: Dicke-basis angular momentum, rotations, quadratic-kick
//!   exponentials and spin-coherent states;
//! - [`floquet`]: the DKT Floquet operator, powers, trajectories and
//!   projective-period certification;
//! - [`observables`]: Husimi fields, single-qubit entanglement entropy,
//!   long-time averages over coherent-state grids, fidelity and rate
//!   functions;
//! - [`spectral`]: quasi-energy spectra, degeneracy profiles, higher-order
//!   spacing ratios and sampled Poisson / GOE references;
//! - [`qubit_verify`]: the tensor-product operator identities behind the
//!   recurrence proofs, checked in the full 2^n qubit space.

pub mod error;
pub mod floquet;
pub mod linalg;
pub mod observables;
pub mod qubit_verify;
pub mod spectral;
pub mod spin;

pub use error::{Error, Result};
pub use floquet::{
    build_floquet, certify_projective_period, evolve_trajectory, floquet_power,
    ktheta_independence_deviation, transform_kicks, FloquetOperator, KickParameters,
    PeriodCertificate,
};
pub use observables::{
    averaged_rate, entropy_landscape, fidelity_series, husimi_field, normalization_integral,
    reduced_qubit_density, time_averaged_entropy, von_neumann_entropy, FidelitySeries,
    ObservableField, QubitDensityMatrix, SphereGrid,
};
pub use spectral::{
    degeneracy_profile, quasi_energies, sample_goe_reference, sample_poisson_reference,
    spacing_ratios, total_variation_distance, QuasiEnergySpectrum, RatioHistogram, RatioSample,
};
pub use spin::{
    build_angular_momentum, coherent_state, exp_quadratic_x, exp_quadratic_z, rotation_about_y,
    PureState, SphericalPoint, SpinOperatorTriple, SpinSystem,
};
