use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use quench_core::fisher::{
    cfi_asymptotic, cfi_closed_form_sqrt2, cfi_quadrature, cfi_quadrature_symplectic, optimal_angle, qfi_quench,
    scan_optimal_angle, variance_and_derivative,
};
use quench_core::fit::linear_fit;
use quench_core::gaussian::{quadrature_variance, DickeParams};
use quench_core::generators::{qfi_heuristic_superradiant, ParameterChoice};

#[test]
fn analytic_derivative_matches_central_differences() {
    let mut checked = 0;
    for gr in [0.4, 0.95, 1.0, 1.2, SQRT_2, 2.0] {
        let p = DickeParams::from_coupling_ratio(0.9, 1.7, gr, 1).unwrap();
        for lam in ParameterChoice::ALL {
            for t in [0.3, 1.0, 2.0, 4.0] {
                for phi in [0.1, 0.6, 1.0, 2.0, 2.9] {
                    let (v, dv) = variance_and_derivative(&p, lam, t, phi);
                    let l0 = lam.value(&p);
                    let h = l0 * 1e-6;
                    let at = |l: f64| quadrature_variance(&lam.set(&p, l).unwrap(), t, phi);
                    let fd = (at(l0 + h) - at(l0 - h)) / (2.0 * h);
                    // roundoff in the difference quotient is ~ε V/h; only points where
                    // the signal clears it by four decades are meaningful at 1e-6
                    if (l0 * dv).abs() < 1e-2 * v {
                        continue;
                    }
                    checked += 1;
                    assert!((fd / dv - 1.0).abs() < 1e-6, "g/g_c={gr} {lam} t={t} φ={phi}: {dv} vs {fd}");
                    let cfi = cfi_quadrature(&p, lam, t, phi);
                    let cfi_fd = fd * fd / (2.0 * v * v);
                    assert!((cfi / cfi_fd - 1.0).abs() < 2e-6);
                }
            }
        }
    }
    assert!(checked > 300, "{checked}");
}

#[test]
fn two_cfi_routes_agree() {
    for gr in [0.5, 1.0, 1.7] {
        let p = DickeParams::from_coupling_ratio(1.0, 2.0, gr, 1).unwrap();
        for lam in ParameterChoice::ALL {
            for t in [0.5, 2.0] {
                for phi in [0.2, 1.1, 2.5] {
                    let a = cfi_quadrature(&p, lam, t, phi);
                    let b = cfi_quadrature_symplectic(&p, lam, t, phi);
                    assert!((a - b).abs() <= 1e-6 * a.max(1e-8), "{a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn closed_form_at_sqrt2_matches_general_cfi() {
    for omega in [0.5, 1.0, 2.0] {
        let p = DickeParams::from_coupling_ratio(omega, 1.0, SQRT_2, 1).unwrap();
        for x in [0.1, 0.5, 1.0, 3.0, 6.0, 10.0] {
            for phi in [0.0, 0.3, FRAC_PI_4 - 0.05, FRAC_PI_4 + 0.01, 1.2, 2.0, 3.0] {
                let t = x / omega;
                let a = cfi_closed_form_sqrt2(omega, t, phi);
                let b = cfi_quadrature(&p, ParameterChoice::Omega, t, phi);
                assert!((a - b).abs() <= 1e-10 * a.max(b), "ω={omega} ωt={x} φ={phi}: {a} vs {b}");
            }
        }
    }
    assert!((cfi_closed_form_sqrt2(1.0, 1.0, 0.0) - 0.269_523_183_592_502_5).abs() < 1e-15);
}

#[test]
fn asymptote_tracks_closed_form_at_long_times() {
    for x in [6.0, 8.0, 12.0] {
        for d in [0.01, 0.03, 0.1, -0.01, -0.05, -0.1] {
            let exact = cfi_closed_form_sqrt2(1.0, x, FRAC_PI_4 + d);
            let asym = cfi_asymptotic(1.0, FRAC_PI_4 + d).unwrap();
            assert!((asym / exact - 1.0).abs() < 0.01, "ωt={x} d={d}: {asym} vs {exact}");
        }
    }
}

#[test]
fn qfi_grows_exponentially_beyond_critical_point() {
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, 2.0, 1).unwrap();
    let ts: Vec<f64> = (0..=40).map(|i| 4.0 + 0.1 * i as f64).collect();
    for lam in ParameterChoice::ALL {
        let exact: Vec<f64> = ts.iter().map(|&t| qfi_quench(&p, lam, t).ln()).collect();
        let heur: Vec<f64> = ts
            .iter()
            .map(|&t| qfi_heuristic_superradiant(&p, lam, t).unwrap().ln())
            .collect();
        for y in [exact, heur] {
            let slope = linear_fit(&ts, &y).unwrap().slope;
            assert!((slope / (4.0 * 3f64.sqrt()) - 1.0).abs() < 0.05, "{lam}: {slope}");
        }
    }
}

#[test]
fn homodyne_saturates_qfi_at_sqrt2() {
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap();
    for lam in [ParameterChoice::Omega, ParameterChoice::BigOmega] {
        for t in [3.0, 4.0, 6.0] {
            let (_, best) = scan_optimal_angle(&p, lam, t, 1e-3).unwrap();
            let q = qfi_quench(&p, lam, t);
            assert!(best / q >= 0.99, "{lam} t={t}: {}", best / q);
            assert!(best <= q * (1.0 + 1e-9));
        }
    }
}

#[test]
fn ridge_approaches_pi_over_4() {
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap();
    let mut last = f64::INFINITY;
    for t in [2.0, 4.0, 6.0, 8.0] {
        let (phi, _) = scan_optimal_angle(&p, ParameterChoice::Omega, t, 1e-4).unwrap();
        // the two peaks sit symmetrically about π/4
        let d = (phi - FRAC_PI_4).abs();
        assert!(d < last, "t={t}: {d}");
        last = d;
    }
    assert!(last < 1e-3);
}

#[test]
fn analytic_angle_values() {
    for x in [0.5, 1.0, 2.0, 4.0, 20.0, f64::INFINITY] {
        assert!((optimal_angle(2.0, x).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }
    assert!((optimal_angle(5.0, f64::INFINITY).unwrap() - (0.8f64).sqrt().acos()).abs() < 1e-15);
    assert!(optimal_angle(1.0, 1.0).is_err());
    // large r approaches the limit angle 0
    assert!(optimal_angle(1e8, f64::INFINITY).unwrap() < 1e-3);
}

#[test]
fn cfi_vanishes_on_diagonal() {
    for x in [0.1, 1.0, 5.0, 30.0, 300.0] {
        assert_eq!(cfi_closed_form_sqrt2(1.0, x, FRAC_PI_4), 0.0);
    }
    assert_eq!(cfi_closed_form_sqrt2(1.0, 0.0, 0.3), 0.0);
    assert!((cfi_asymptotic(1.0, FRAC_PI_4 + 0.1).unwrap() - 50.0).abs() < 1e-9);
    assert!(cfi_asymptotic(1.0, FRAC_PI_4).is_err());
    let p = DickeParams::from_coupling_ratio(1.0, 1.0, SQRT_2, 1).unwrap();
    for phi in [0.0, 1.0, PI - 0.1] {
        assert_eq!(cfi_quadrature(&p, ParameterChoice::Omega, 0.0, phi), 0.0);
    }
}
