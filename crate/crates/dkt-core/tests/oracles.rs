//! Independent-oracle checks: every expected value here is produced by a
//! second computational route (brute-force embedding, direct stepping,
//! quadrature, closed-form enumeration), never by the code path under test.

use dkt_core::floquet::{build_floquet, evolve_trajectory, floquet_power, KickParameters};
use dkt_core::linalg::{C64, CVec};
use dkt_core::observables::{
    fidelity_series, husimi_field, normalization_integral, reduced_qubit_density,
    time_averaged_entropy, von_neumann_entropy, SphereGrid,
};
use dkt_core::qubit_verify::symmetric_isometry;
use dkt_core::spin::{coherent_state, PureState, SphericalPoint, SpinSystem};
use std::f64::consts::{FRAC_PI_2, PI};

fn seeded_state(dim: usize, seed: u64) -> PureState {
    // small deterministic LCG; good enough to scatter amplitudes
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let mut amps = CVec::zeros(dim);
    for i in 0..dim {
        let re = next();
        let im = next();
        amps[i] = C64::new(re, im);
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::new(amps.mapv(|z| z / norm)).unwrap()
}

/// Brute-force single-qubit marginal: embed the Dicke state into the full
/// 2^{2j} qubit space and trace out all qubits but the first.
fn partial_trace_oracle(state: &PureState, sys: SpinSystem) -> [[C64; 2]; 2] {
    let n = sys.two_j() as usize;
    let iso = symmetric_isometry(n);
    let full = iso.dot(state.amplitudes());
    let rest = 1usize << (n - 1);
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for a in 0..2usize {
        for b in 0..2usize {
            let mut sum = C64::new(0.0, 0.0);
            for r in 0..rest {
                sum += full[a * rest + r] * full[b * rest + r].conj();
            }
            rho[a][b] = sum;
        }
    }
    rho
}

#[test]
fn bloch_formula_matches_partial_trace() {
    for (two_j, seed) in [(1u32, 3), (2, 5), (3, 7), (4, 11)] {
        let sys = SpinSystem::from_two_j(two_j).unwrap();
        for k in 0..4u64 {
            let state = seeded_state(sys.dim(), seed + 100 * k);
            let fast = reduced_qubit_density(&state, sys);
            let oracle = partial_trace_oracle(&state, sys);
            let mut dev = 0.0f64;
            for a in 0..2 {
                for b in 0..2 {
                    dev = dev.max((fast.elements()[a][b] - oracle[a][b]).norm());
                }
            }
            assert!(dev < 1e-10, "2j={} seed-run {}: deviation {}", two_j, k, dev);
        }
    }
}

#[test]
fn spectral_evolution_matches_direct_stepping() {
    // generic (non-resonant) parameters
    let sys = SpinSystem::new(20.0).unwrap();
    let u = build_floquet(sys, KickParameters::transformed(2.0, 0.0).unwrap()).unwrap();
    let initial = SphericalPoint::new(2.25, 2.0);
    let steps = 500;
    let fast = time_averaged_entropy(&u, initial, steps).unwrap();

    let psi0 = coherent_state(sys, initial);
    let traj = evolve_trajectory(&u, &psi0, steps - 1);
    let mut oracle = 0.0;
    for state in &traj {
        let rho = reduced_qubit_density(state, sys);
        oracle += von_neumann_entropy(&rho).unwrap();
    }
    oracle /= steps as f64;
    assert!(
        (fast - oracle).abs() < 1e-9,
        "spectral {} vs stepwise {}",
        fast,
        oracle
    );
}

#[test]
fn spectral_evolution_matches_direct_stepping_at_resonant_point() {
    // the degenerate spectrum at k_r = j pi/2 is the hard case for the
    // eigenvector solve
    let sys = SpinSystem::new(10.0).unwrap();
    let kr = sys.j() * FRAC_PI_2;
    let u = build_floquet(sys, KickParameters::transformed(kr, 0.3).unwrap()).unwrap();
    let initial = SphericalPoint::new(1.1, -0.4);
    let steps = 300;
    let fast = time_averaged_entropy(&u, initial, steps).unwrap();
    let psi0 = coherent_state(sys, initial);
    let traj = evolve_trajectory(&u, &psi0, steps - 1);
    let mut oracle = 0.0;
    for state in &traj {
        oracle += von_neumann_entropy(&reduced_qubit_density(state, sys)).unwrap();
    }
    oracle /= steps as f64;
    assert!((fast - oracle).abs() < 1e-9, "{} vs {}", fast, oracle);
}

#[test]
fn fidelity_matches_power_then_overlap_oracle() {
    let sys = SpinSystem::new(2.5).unwrap();
    let kr = sys.j() * FRAC_PI_2;
    let u = build_floquet(sys, KickParameters::transformed(kr, 0.4).unwrap()).unwrap();
    let initial = SphericalPoint::new(0.9, 1.7);
    let series = fidelity_series(&u, initial, 7).unwrap();
    let psi0 = coherent_state(sys, initial);
    for n in 0..7u64 {
        let un = floquet_power(&u, n);
        let applied = un.dot(psi0.amplitudes());
        let overlap: C64 = psi0
            .amplitudes()
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let oracle = overlap.norm_sqr();
        assert!(
            (series.z[n as usize] - oracle).abs() < 1e-10,
            "n={}: {} vs {}",
            n,
            series.z[n as usize],
            oracle
        );
    }
}

#[test]
fn fidelity_is_periodic_under_certified_period() {
    let sys = SpinSystem::new(3.0).unwrap();
    let kr = sys.j() * FRAC_PI_2;
    let u = build_floquet(sys, KickParameters::transformed(kr, 2.9).unwrap()).unwrap();
    let cert = dkt_core::certify_projective_period(&u, 96, 1e-9);
    let m = cert.period.expect("period") as usize;
    let series = fidelity_series(&u, SphericalPoint::new(1.9, 0.3), 50).unwrap();
    for n in 0..50 - m {
        assert!(
            (series.z[n + m] - series.z[n]).abs() < 1e-8,
            "n={}: {} vs {}",
            n,
            series.z[n + m],
            series.z[n]
        );
    }
}

#[test]
fn coherent_state_resolution_of_identity() {
    // (2j+1)/(4 pi) ∫ |<theta,phi|psi>|^2 sin(theta) = 1 for any unit psi,
    // checked by quadrature on a 400 x 400 closed grid
    let grid = SphereGrid::closed(400, 400);
    for (j, seed) in [(2.0, 17u64), (5.5, 19), (10.0, 23)] {
        let sys = SpinSystem::new(j).unwrap();
        let psi = seeded_state(sys.dim(), seed);
        let field = husimi_field(&psi, sys, &grid).unwrap();
        let integral = normalization_integral(&field, sys).unwrap();
        assert!(
            (integral - 1.0).abs() < 1e-6,
            "random state at j={}: integral {}",
            j,
            integral
        );
    }
    // pole-concentrated worst case
    let sys = SpinSystem::new(10.0).unwrap();
    let mut amps = CVec::zeros(sys.dim());
    amps[0] = C64::new(1.0, 0.0);
    let psi = PureState::new(amps).unwrap();
    let field = husimi_field(&psi, sys, &grid).unwrap();
    let integral = normalization_integral(&field, sys).unwrap();
    assert!((integral - 1.0).abs() < 1e-6, "|j,j>: integral {}", integral);
}

#[test]
fn husimi_normalization_at_full_scale() {
    // 200 x 200 grid, j = 76, evolved state: tolerance 1e-4
    let sys = SpinSystem::new(76.0).unwrap();
    let kr = sys.j() * FRAC_PI_2;
    let u = build_floquet(sys, KickParameters::transformed(kr, 0.0).unwrap()).unwrap();
    let psi0 = coherent_state(sys, SphericalPoint::new(2.25, 2.0));
    let traj = evolve_trajectory(&u, &psi0, 3);
    let grid = SphereGrid::closed(200, 200);
    for (n, state) in traj.iter().enumerate() {
        let unit = PureState::new(state.amplitudes().clone()).unwrap();
        let field = husimi_field(&unit, sys, &grid).unwrap();
        let integral = normalization_integral(&field, sys).unwrap();
        assert!((integral - 1.0).abs() < 1e-4, "n={}: integral {}", n, integral);
    }
}

#[test]
fn conjugation_consistency_over_parameter_grid() {
    // exp(-i a Jx^2) = R exp(-i a Jz^2) R^dag with the module's fixed R
    use dkt_core::linalg::{dagger, max_abs_diff};
    use dkt_core::spin::{exp_quadratic_x, exp_quadratic_z, rotation_about_y};
    for j in [0.5, 3.0, 7.5, 20.0] {
        let sys = SpinSystem::new(j).unwrap();
        let r = rotation_about_y(sys, -FRAC_PI_2).unwrap();
        for a in [0.1, 1.0, PI] {
            let lhs = exp_quadratic_x(sys, a).unwrap();
            let rhs = r.dot(&exp_quadratic_z(sys, a).unwrap()).dot(&dagger(&r));
            assert!(max_abs_diff(&lhs, &rhs) < 1e-11, "j={} a={}", j, a);
        }
    }
}

#[test]
fn full_scale_state_recurrences() {
    // j = 76 at k_r = j pi/2: the state returns after 8 kicks;
    // j = 75.5 returns after 12 (here at k_theta = k_r)
    let cases = [(76.0, 0.0, 8usize), (75.5, f64::NAN, 12)];
    for (j, kt, period) in cases {
        let sys = SpinSystem::new(j).unwrap();
        let kr = sys.j() * FRAC_PI_2;
        let kt = if kt.is_nan() { kr } else { kt };
        let u = build_floquet(sys, KickParameters::transformed(kr, kt).unwrap()).unwrap();
        let psi0 = coherent_state(sys, SphericalPoint::new(2.25, 2.0));
        let traj = evolve_trajectory(&u, &psi0, period);
        let z = traj[period].overlap(&traj[0]).norm_sqr();
        assert!((z - 1.0).abs() < 1e-8, "j={}: |<psi({})|psi(0)>|^2 = {}", j, period, z);
    }
}

#[test]
fn evolve_trajectory_preserves_norm_without_renormalizing() {
    let sys = SpinSystem::new(76.0).unwrap();
    let kr = sys.j() * FRAC_PI_2;
    let u = build_floquet(sys, KickParameters::transformed(kr, kr).unwrap()).unwrap();
    let psi0 = coherent_state(sys, SphericalPoint::new(2.25, 2.0));
    let traj = evolve_trajectory(&u, &psi0, 100);
    for (n, state) in traj.iter().enumerate() {
        assert!((state.norm() - 1.0).abs() < 1e-10, "norm drift at step {}", n);
    }
}

mod proptests {
    use super::*;
    use dkt_core::linalg::unitarity_deviation;
    use dkt_core::transform_kicks;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn transform_round_trips(k in -20.0f64..20.0, kp in -20.0f64..20.0) {
            let (kr, kt) = transform_kicks(k, kp);
            prop_assert!((kr + kt - k).abs() < 1e-12);
            prop_assert!((kr - kt - kp).abs() < 1e-12);
        }

        #[test]
        fn floquet_stays_unitary(
            two_j in 1u32..12,
            kr in -8.0f64..8.0,
            kt in -8.0f64..8.0,
            p in -3.2f64..3.2,
        ) {
            let sys = SpinSystem::from_two_j(two_j).unwrap();
            let params = KickParameters::from_transformed(kr, kt, p).unwrap();
            let u = build_floquet(sys, params).unwrap();
            prop_assert!(unitarity_deviation(u.matrix()) < 1e-11);
        }

        #[test]
        fn husimi_values_are_probabilities(
            two_j in 1u32..16,
            theta in 0.0f64..PI,
            phi in -PI..PI,
        ) {
            let sys = SpinSystem::from_two_j(two_j).unwrap();
            let psi = coherent_state(sys, SphericalPoint::new(theta, phi));
            let field = husimi_field(&psi, sys, &SphereGrid::closed(13, 13)).unwrap();
            for v in field.values.iter() {
                prop_assert!(*v >= 0.0 && *v <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn spherical_point_always_canonical(theta in -10.0f64..10.0, phi in -30.0f64..30.0) {
            let pt = SphericalPoint::new(theta, phi);
            prop_assert!(pt.theta() >= 0.0 && pt.theta() <= PI);
            prop_assert!(pt.phi() >= -PI && pt.phi() < PI);
        }
    }
}
