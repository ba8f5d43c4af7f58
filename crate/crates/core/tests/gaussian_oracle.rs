use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use nalgebra::Matrix2;
use num_complex::Complex64;
use quench_core::analytic::Branch;
use quench_core::fock::{
    build_dicke, build_effective, FockBasisSpec, FockVector, PhotonMoments, PropagationMethod, Propagator,
};
use quench_core::gaussian::{
    bogoliubov_coeffs, check_validity, effective_hamiltonian, evolve, photon_number, quadrature_variance,
    quadrature_variance_with, vacuum_state, DickeParams,
};

const PHIS: [f64; 5] = [0.0, 0.3, FRAC_PI_4, 1.7, 3.0 * FRAC_PI_4];

fn effective_moments(p: &DickeParams, cutoff: usize, times: &[f64]) -> Vec<PhotonMoments> {
    let basis = FockBasisSpec::photon_only(cutoff);
    let h = build_effective(p, &basis).unwrap();
    let u = Propagator::new(&h, PropagationMethod::Dense).unwrap();
    u.trajectory(&FockVector::ground_product(&basis), times, |_, v| {
        v.check_tail(&basis)?;
        Ok(v.photon_moments(&basis))
    })
    .unwrap()
}

#[test]
fn closed_form_variance_matches_truncated_effective_evolution() {
    let times = [0.25, 0.5, 1.0];
    for big_omega in [1e3, 1e4] {
        for gr in [0.5, 1.0, SQRT_2, 2.0] {
            let p = DickeParams::from_coupling_ratio(1.0, big_omega, gr, 1).unwrap();
            let moments = effective_moments(&p, 800, &times);
            for (&t, m) in times.iter().zip(&moments) {
                for phi in PHIS {
                    let exact = m.quadrature_second_moment(phi);
                    let closed = quadrature_variance(&p, t, phi);
                    assert!(
                        (closed / exact - 1.0).abs() < 1e-8,
                        "Ω={big_omega} g/g_c={gr} t={t} φ={phi}: {closed} vs {exact}"
                    );
                }
                assert!(m.a.norm() < 1e-12);
            }
        }
    }
}

fn dicke_trajectory(p: &DickeParams, cutoff: usize, times: &[f64]) -> Vec<PhotonMoments> {
    let basis = FockBasisSpec::new(cutoff, p.n_spins).unwrap();
    let h = build_dicke(p, &basis).unwrap();
    let u = Propagator::new(&h, PropagationMethod::Dense).unwrap();
    u.trajectory(&FockVector::ground_product(&basis), times, |_, v| {
        v.check_tail(&basis)?;
        Ok(v.photon_moments(&basis))
    })
    .unwrap()
}

#[test]
fn closed_form_variance_tracks_full_dicke_early_in_validity_window() {
    let times = [0.25, 0.5];
    for big_omega in [1e3, 1e4] {
        for gr in [0.5, 1.0, SQRT_2, 2.0] {
            let p = DickeParams::from_coupling_ratio(1.0, big_omega, gr, 1).unwrap();
            let moments = dicke_trajectory(&p, 400, &times);
            let heff = effective_hamiltonian(&p);
            let mut checked = 0;
            for (&t, m) in times.iter().zip(&moments) {
                let state = evolve(&vacuum_state(), &heff, t);
                if !check_validity(&p, &state).unwrap().within {
                    continue;
                }
                checked += 1;
                for phi in PHIS {
                    let exact = m.quadrature_second_moment(phi);
                    let closed = quadrature_variance(&p, t, phi);
                    assert!(
                        (closed / exact - 1.0).abs() < 0.05,
                        "Ω={big_omega} g/g_c={gr} t={t} φ={phi}: {closed} vs {exact}"
                    );
                }
            }
            // at g = g_c the photon ceiling is zero, so no time is inside the window
            assert_eq!(checked == 0, gr == 1.0);
        }
    }
}

#[test]
fn full_dicke_deviation_shrinks_as_one_over_big_omega() {
    // the leading correction to the frozen-spin model is of order g⁴X⁴/Ω³
    let dev = |big_omega: f64| {
        let p = DickeParams::from_coupling_ratio(1.0, big_omega, SQRT_2, 1).unwrap();
        let n = dicke_trajectory(&p, 400, &[1.5])[0].n;
        n / 1.5f64.sinh().powi(2) - 1.0
    };
    let (a, b) = (dev(1e3), dev(1e4));
    assert!(a < 0.0 && b < 0.0);
    assert!((5.0..20.0).contains(&(a / b)), "{a} {b}");
}

#[test]
fn photon_number_grows_as_sinh_squared() {
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap();
    let h = effective_hamiltonian(&p);
    for t in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let n = photon_number(&evolve(&vacuum_state(), &h, t));
        assert!((n / t.sinh().powi(2) - 1.0).abs() < 1e-9, "t={t}: {n}");
    }
    assert!((photon_number(&evolve(&vacuum_state(), &h, 1.0)) - 1.381_097_845_541_816_9).abs() < 1e-12);
}

#[test]
fn purity_survives_chained_evolution() {
    let mut s = vacuum_state();
    for (gr, t) in [(0.5, 0.7), (1.0, 2.0), (2.0, 0.5), (0.0, 0.4), (1.2, 1.0)] {
        let p = DickeParams::from_coupling_ratio(1.3, 0.6, gr, 1).unwrap();
        s = evolve(&s, &effective_hamiltonian(&p), t);
        assert!(s.purity_defect() < 1e-10, "{}", s.purity_defect());
    }
}

#[test]
fn variance_continuous_across_critical_point() {
    for delta in [-1e-5, 1e-5] {
        let r: f64 = 1.0 + delta;
        let p = DickeParams::from_coupling_ratio(1.0, 1.0, r.sqrt(), 1).unwrap();
        for t in [0.5, 1.0, 3.0] {
            for phi in PHIS {
                let closed = quadrature_variance_with(&p, t, phi, Branch::Closed);
                let series = quadrature_variance_with(&p, t, phi, Branch::Series);
                assert!((closed - series).abs() < 1e-9 * closed.max(1.0), "r={r} t={t}: {closed} {series}");
            }
        }
    }
    // values straddling r = 1 join up
    let at = |r: f64| {
        let p = DickeParams::from_coupling_ratio(1.0, 1.0, r.sqrt(), 1).unwrap();
        quadrature_variance(&p, 2.0, 0.4)
    };
    let (lo, mid, hi) = (at(1.0 - 1e-9), at(1.0), at(1.0 + 1e-9));
    assert!((lo - mid).abs() < 1e-7 && (hi - mid).abs() < 1e-7);
}

/// Heisenberg equations `d(a, a†)/dt = i A (a, a†)` for
/// `H = c a†a + d (a†² + a²)` give `A = [[-c, -2d], [2d, c]]`.
fn heisenberg_matrix(p: &DickeParams) -> Matrix2<Complex64> {
    let c = p.omega - p.g * p.g / (2.0 * p.big_omega);
    let d = -p.g * p.g / (4.0 * p.big_omega);
    Matrix2::new(-c, -2.0 * d, 2.0 * d, c).map(|x| Complex64::new(0.0, x))
}

#[test]
fn bogoliubov_matches_matrix_exponential() {
    for gr in [0.0, 0.3, 0.9, 1.0, SQRT_2, 2.5] {
        for (omega, big_omega) in [(1.0, 1.0), (0.7, 2.0)] {
            let p = DickeParams::from_coupling_ratio(omega, big_omega, gr, 1).unwrap();
            for t in [0.0, 0.4, 1.0, 2.2] {
                let m = (heisenberg_matrix(&p) * Complex64::new(t, 0.0)).exp();
                let b = bogoliubov_coeffs(&p, t);
                let tol = 1e-10 * m[(0, 0)].norm().max(1.0);
                assert!((b.u - m[(0, 0)]).norm() < tol, "g/g_c={gr} t={t}: {:?} vs {}", b, m[(0, 0)]);
                assert!((b.v - m[(0, 1)]).norm() < tol, "g/g_c={gr} t={t}: {:?} vs {}", b, m[(0, 1)]);
                assert!((b.commutator() - 1.0).abs() < 1e-10 * b.u.norm_sqr().max(1.0));
            }
        }
    }
    let b = bogoliubov_coeffs(&DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap(), 1.0);
    assert!((b.v.norm_sqr() - 1.0f64.sinh().powi(2)).abs() < 1e-12);
}

#[test]
fn pure_squeezing_example_values() {
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap();
    let v = quadrature_variance(&p, 1.0, FRAC_PI_4);
    assert!((v - (-2.0f64).exp() / 2.0).abs() < 1e-15);
    assert!((v - 0.067_667_641_618_306_35).abs() < 1e-15);
    let v = quadrature_variance(&p, 1.0, 3.0 * FRAC_PI_4);
    assert!((v - 3.694_528_049_465_325).abs() < 1e-14);
    let moments = effective_moments(&p, 200, &[1.0]);
    assert!((moments[0].quadrature_second_moment(FRAC_PI_4) - 0.067_667_641_618_306_35).abs() < 1e-10);
    assert!((moments[0].n - 1.381_097_845_541_816_9).abs() < 1e-10);
    assert!((quadrature_variance(&p, 1.0, FRAC_PI_4 + PI) - 0.067_667_641_618_306_35).abs() < 1e-14);
}

#[test]
fn cutoff_doubling_leaves_observables_unchanged() {
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap();
    let a = effective_moments(&p, 400, &[1.0, 1.5]);
    let b = effective_moments(&p, 800, &[1.0, 1.5]);
    for (x, y) in a.iter().zip(&b) {
        assert!((x.n / y.n - 1.0).abs() < 1e-8);
        for phi in PHIS {
            let (vx, vy) = (x.quadrature_second_moment(phi), y.quadrature_second_moment(phi));
            assert!((vx / vy - 1.0).abs() < 1e-8);
        }
    }
}
