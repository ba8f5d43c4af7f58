//! Classical Fisher information of homodyne second-moment estimation and the
//! optimal detection angle.
//!
//! The quenched state is a zero-mean Gaussian, so estimating `λ` from the
//! sample variance of `Q(φ)` has Fisher information
//! `F = (∂_λ V)² / Var(Q²) = (∂_λ V)² / (2V²)`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::Vector2;

use crate::analytic::Branch;
use crate::error::{require, Error, Result};
use crate::gaussian::{effective_hamiltonian, variance_parts, vacuum_state, DickeParams};
use crate::generators::{hamiltonian_derivative, local_generator, qfi_from_generator, ParameterChoice};

/// Exact QFI of the vacuum quench into `p` after time `t`.
pub fn qfi_quench(p: &DickeParams, lam: ParameterChoice, t: f64) -> f64 {
    qfi_from_generator(&local_generator(p, lam, t))
}

/// `(V, ∂_λ V)` from the closed-form variance.
pub fn variance_and_derivative(p: &DickeParams, lam: ParameterChoice, t: f64, phi: f64) -> (f64, f64) {
    variance_and_derivative_with(p, lam, t, phi, Branch::Auto)
}

pub fn variance_and_derivative_with(
    p: &DickeParams,
    lam: ParameterChoice,
    t: f64,
    phi: f64,
    branch: Branch,
) -> (f64, f64) {
    let r = p.ratio();
    let parts = variance_parts(r, p.omega * t, phi, branch);
    // (∂r/∂λ, ∂(ωt)/∂λ)
    let (dr, dx) = match lam {
        ParameterChoice::Omega => (-r / p.omega, t),
        ParameterChoice::BigOmega => (-r / p.big_omega, 0.0),
        ParameterChoice::G => (2.0 * p.g / (p.omega * p.big_omega), 0.0),
    };
    (parts.value, parts.d_ratio * dr + parts.d_time * dx)
}

/// CFI of second-moment homodyne estimation along `Q(φ)`.
pub fn cfi_quadrature(p: &DickeParams, lam: ParameterChoice, t: f64, phi: f64) -> f64 {
    let (v, dv) = variance_and_derivative(p, lam, t, phi);
    dv * dv / (2.0 * v * v)
}

/// Same quantity through the propagator and its parameter derivative,
/// `V = vᵀ S σ Sᵀ v`, without the closed form.
pub fn cfi_quadrature_symplectic(p: &DickeParams, lam: ParameterChoice, t: f64, phi: f64) -> f64 {
    let h = effective_hamiltonian(p);
    let dh = hamiltonian_derivative(p, lam);
    let s = h.propagator(t);
    let ds = h.propagator_derivative(&dh, t);
    let sigma = vacuum_state().cov;
    let v = Vector2::new(phi.cos(), -phi.sin());
    let var = (v.transpose() * s * sigma * s.transpose() * v)[(0, 0)];
    let dvar = 2.0 * (v.transpose() * ds * sigma * s.transpose() * v)[(0, 0)];
    dvar * dvar / (2.0 * var * var)
}

/// Closed form at `g = √2 g_c`, `λ = ω`:
/// `2 cos²(2φ) sinh⁴(ωt) / [ω² (cosh 2ωt - sin 2φ sinh 2ωt)²]`,
/// evaluated with the exponential growth factored out.
pub fn cfi_closed_form_sqrt2(omega: f64, t: f64, phi: f64) -> f64 {
    let x = (omega * t).abs();
    let e2 = (-2.0 * x).exp();
    let e4 = e2 * e2;
    // sinh²(x) e^{-2x}, sinh(2ωt) e^{-2x}, (cosh - sinh)(2ωt) e^{-2x}
    let sh2 = 0.25 * (1.0 - e2).powi(2);
    let forward = omega * t >= 0.0;
    let sh = if forward { 0.5 * (1.0 - e4) } else { -0.5 * (1.0 - e4) };
    let ch_minus_sh = if forward { e4 } else { 1.0 };
    // written around the pole: cos 2φ = -sin 2d, 1 - sin 2φ = 2 sin² d
    let d = phi - FRAC_PI_4;
    let c2 = (2.0 * d).sin();
    if c2 == 0.0 {
        return 0.0;
    }
    let den = ch_minus_sh + 2.0 * d.sin().powi(2) * sh;
    2.0 * c2 * c2 * sh2 * sh2 / (omega * omega * den * den)
}

/// Long-time limit of [`cfi_closed_form_sqrt2`],
/// `cos²(2φ) / (2ω² (sin 2φ - 1)²)`.
pub fn cfi_large_time(omega: f64, phi: f64) -> Result<f64> {
    let s = (2.0 * phi).sin() - 1.0;
    if s == 0.0 {
        return Err(Error::Domain(format!("pole of the long-time CFI at phi = {phi}")));
    }
    let c = (2.0 * phi).cos();
    Ok(c * c / (2.0 * omega * omega * s * s))
}

/// Lowest-order expansion around the pole, `1 / (2ω² (φ - π/4)²)`.
pub fn cfi_asymptotic(omega: f64, phi: f64) -> Result<f64> {
    let d = phi - FRAC_PI_4;
    if d == 0.0 {
        return Err(Error::Domain("asymptotic CFI diverges at phi = pi/4".into()));
    }
    Ok(1.0 / (2.0 * omega * omega * d * d))
}

/// `f(r) = 1 + (r - 2) / sqrt(r² + 4(r - 1)/sinh²(√(r-1) ωt))`.
///
/// `omega_t = f64::INFINITY` gives the long-time value `2(1 - 1/r)`.
pub fn optimal_angle_f(r: f64, omega_t: f64) -> Result<f64> {
    require(r.is_finite() && r > 1.0, "r", r, "optimal angle needs r > 1")?;
    require(!omega_t.is_nan() && omega_t > 0.0, "omega_t", omega_t, "must be > 0")?;
    if omega_t.is_infinite() {
        return Ok(2.0 - 2.0 / r);
    }
    let s = ((r - 1.0).sqrt() * omega_t).sinh();
    Ok(1.0 + (r - 2.0) / (r * r + 4.0 * (r - 1.0) / (s * s)).sqrt())
}

/// `φ = arccos(sqrt(f(r)/2))`, in `[0, π/2]`.
pub fn optimal_angle(r: f64, omega_t: f64) -> Result<f64> {
    let f = optimal_angle_f(r, omega_t)?;
    Ok((0.5 * f).clamp(0.0, 1.0).sqrt().acos())
}

/// Limit of [`optimal_angle`] for `r → ∞`.
pub fn optimal_angle_limit_large_r() -> f64 {
    0.0
}

/// Grid search of the CFI over `φ ∈ [0, π)` followed by local refinement.
/// Returns `(argmax, max)`; ties go to the smaller angle.
pub fn scan_optimal_angle(p: &DickeParams, lam: ParameterChoice, t: f64, grid: f64) -> Result<(f64, f64)> {
    scan_optimal_angle_from(p, lam, t, grid, 0.0)
}

/// As [`scan_optimal_angle`] over `[start, start + π)`.
pub fn scan_optimal_angle_from(
    p: &DickeParams,
    lam: ParameterChoice,
    t: f64,
    grid: f64,
    start: f64,
) -> Result<(f64, f64)> {
    require(grid.is_finite() && grid > 0.0, "grid", grid, "must be > 0")?;
    let f = |phi: f64| cfi_quadrature(p, lam, t, phi);
    Ok(maximize_periodic(f, start, grid))
}

const MIN_COARSE: usize = 720;
const MAX_COARSE: usize = 1 << 16;
const ZOOM_POINTS: usize = 64;

pub(crate) fn maximize_periodic(f: impl Fn(f64) -> f64, start: f64, grid: f64) -> (f64, f64) {
    let n = ((PI / grid).ceil() as usize).clamp(MIN_COARSE, MAX_COARSE);
    let step = PI / n as f64;
    let (mut best, mut fbest) = (start, f(start));
    for i in 1..n {
        let x = start + i as f64 * step;
        let fx = f(x);
        if fx > fbest {
            best = x;
            fbest = fx;
        }
    }
    // zoom: resample a shrinking bracket around the incumbent
    let mut h = step;
    while h > 1e-7 {
        let lo = best - h;
        let dx = 2.0 * h / ZOOM_POINTS as f64;
        for i in 0..=ZOOM_POINTS {
            let x = lo + i as f64 * dx;
            let fx = f(x);
            if fx > fbest {
                best = x;
                fbest = fx;
            }
        }
        h = dx;
    }
    let (x, fx) = golden_section(&f, best - h, best + h, 1e-13);
    if fx > fbest {
        best = x;
        fbest = fx;
    }
    let wrapped = start + (best - start).rem_euclid(PI);
    (wrapped, fbest)
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
