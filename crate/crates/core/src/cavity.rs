//! Transversely pumped BEC in a cavity, reduced to a single photonic mode.
//!
//! With the atoms in the collective ground state and the dispersive shift
//! neglected, the cavity mode obeys
//! `H = (-δ_c - y²/2ω_R) a†a + (y²/4ω_R)(a†² + a²)`, `y = √(2N) η`.
//! Rotating `a → i a` turns this into the frozen-spin Dicke Hamiltonian with
//! `ω = -δ_c`, `Ω = ω_R`, `g = y`, so everything in [`crate::generators`]
//! applies unchanged. The instability sets in at `y_c = √(-ω_R δ_c)`.

use log::warn;

use crate::error::{require, Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::gaussian::{DickeParams, QuadraticHamiltonian};
use crate::generators::{local_generator, qfi_from_generator, ParameterChoice};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    /// Effective detuning δ_c, negative for a self-organization transition.
    pub delta_c: f64,
    /// Recoil frequency ω_R.
    pub omega_r: f64,
    /// Dispersive shift `N U₀ / 4`.
    pub u: f64,
    /// Pump coupling η.
    pub eta: f64,
    pub n_atoms: u32,
}

impl CavityParams {
    pub fn new(delta_c: f64, omega_r: f64, u: f64, eta: f64, n_atoms: u32) -> Result<Self> {
        require(delta_c.is_finite(), "delta_c", delta_c, "must be finite")?;
        require(omega_r.is_finite() && omega_r > 0.0, "omega_r", omega_r, "must be finite and > 0")?;
        require(u.is_finite(), "u", u, "must be finite")?;
        require(eta.is_finite() && eta >= 0.0, "eta", eta, "must be finite and >= 0")?;
        require(n_atoms >= 1, "n_atoms", n_atoms as f64, "must be >= 1")?;
        Ok(Self {
            delta_c,
            omega_r,
            u,
            eta,
            n_atoms,
        })
    }

    /// Collective coupling `y = √(2N) η`.
    pub fn y(&self) -> f64 {
        (2.0 * self.n_atoms as f64).sqrt() * self.eta
    }

    /// Critical coupling `y_c = √(-ω_R δ_c)`.
    pub fn y_c(&self) -> Result<f64> {
        self.require_red_detuned()?;
        Ok((-self.omega_r * self.delta_c).sqrt())
    }

    /// `(y/y_c)²`.
    pub fn coupling_ratio_sq(&self) -> Result<f64> {
        let yc = self.y_c()?;
        Ok((self.y() / yc).powi(2))
    }

    /// Whether the dispersive shift is small enough to drop.
    pub fn dispersive_shift_negligible(&self) -> bool {
        self.u.abs() < self.delta_c.abs()
    }

    /// Equivalent Dicke parameters `ω = -δ_c`, `Ω = ω_R`, `g = y`, `N`.
    pub fn dicke_equivalent(&self) -> Result<DickeParams> {
        self.require_red_detuned()?;
        DickeParams::new(-self.delta_c, self.omega_r, self.y(), self.n_atoms)
    }

    fn require_red_detuned(&self) -> Result<()> {
        if self.delta_c >= 0.0 {
            return Err(Error::Domain(format!(
                "cavity detuning must be negative for a transition (delta_c = {})",
                self.delta_c
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMapping {
    /// Cavity-frame quadratic Hamiltonian.
    pub hamiltonian: QuadraticHamiltonian,
    /// Squared-gap analogue `ν = 4δ_c²(1 - (y/y_c)²)`.
    pub nu: f64,
    /// The gap written as `4δ_c √(1 - (y/y_c)²)`; `None` once the root
    /// turns imaginary.
    pub nu_sqrt_form: Option<f64>,
    pub coupling_ratio_sq: f64,
    pub dispersive_shift_negligible: bool,
}

/// Quadrature form `(-δ_c/2) X² + (-δ_c/2)(1 - (y/y_c)²) P²`.
pub fn map_to_quadratic(c: &CavityParams) -> Result<CavityMapping> {
    let ratio = c.coupling_ratio_sq()?;
    let negligible = c.dispersive_shift_negligible();
    if !negligible {
        warn!(
            "dispersive shift |u| = {} is not small against |delta_c| = {}; dropping it anyway",
            c.u.abs(),
            c.delta_c.abs()
        );
    }
    let half = -0.5 * c.delta_c;
    let one_minus = 1.0 - ratio;
    Ok(CavityMapping {
        hamiltonian: QuadraticHamiltonian {
            cxx: half,
            cpp: half * one_minus,
            cxp: 0.0,
            c0: 0.0,
        },
        nu: 4.0 * c.delta_c * c.delta_c * one_minus,
        nu_sqrt_form: (one_minus >= 0.0).then(|| 4.0 * c.delta_c * one_minus.sqrt()),
        coupling_ratio_sq: ratio,
        dispersive_shift_negligible: negligible,
    })
}

/// Growth rate `8√2 √(N|δ_c|/ω_R) η` of the QFI deep in the unstable regime.
pub fn qfi_growth_exponent(c: &CavityParams) -> Result<f64> {
    let ratio = c.coupling_ratio_sq()?;
    if ratio < 4.0 {
        warn!("(y/y_c)^2 = {ratio:.4} is not deep in the unstable regime; the growth law is asymptotic");
    }
    Ok(8.0 * 2f64.sqrt() * (c.n_atoms as f64 * c.delta_c.abs() / c.omega_r).sqrt() * c.eta)
}

/// Exact asymptotic growth rate `2√|ν|` of `ln QFI`.
pub fn exact_growth_rate(c: &CavityParams) -> Result<f64> {
    let m = map_to_quadratic(c)?;
    if m.nu >= 0.0 {
        return Err(Error::Domain(format!(
            "no exponential growth below the critical pump ((y/y_c)^2 = {:.6})",
            m.coupling_ratio_sq
        )));
    }
    Ok(2.0 * (-m.nu).sqrt())
}

/// Fitted growth of `ln QFI` over a window of the quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub r_squared: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// `slope · (t_end - t_start)`.
    pub e_foldings: f64,
}

/// Minimum number of e-foldings a fit window must span.
pub const MIN_E_FOLDINGS: f64 = 3.0;

/// Fits `ln QFI(t)` on `samples` equally spaced times in `[4τ, 8τ]`,
/// `τ = 1/√|ν|`, with the QFI from the exact generator of the equivalent
/// Dicke quench.
pub fn fit_growth(c: &CavityParams, lam: ParameterChoice, samples: usize) -> Result<GrowthFit> {
    require(samples >= 3, "samples", samples as f64, "need at least 3 samples")?;
    let m = map_to_quadratic(c)?;
    if m.nu >= 0.0 {
        return Err(Error::Domain(format!(
            "growth fit failed: no instability at (y/y_c)^2 = {:.6}",
            m.coupling_ratio_sq
        )));
    }
    let p = c.dicke_equivalent()?;
    let tau = 1.0 / (-m.nu).sqrt();
    let (t0, t1) = (4.0 * tau, 8.0 * tau);
    let ts: Vec<f64> = (0..samples).map(|i| t0 + (t1 - t0) * i as f64 / (samples - 1) as f64).collect();
    let ln_qfi: Vec<f64> = ts
        .iter()
        .map(|&t| qfi_from_generator(&local_generator(&p, lam, t)).ln())
        .collect();
    let fit = linear_fit(&ts, &ln_qfi)?;
    let e_foldings = fit.slope * (t1 - t0);
    if e_foldings.is_nan() || e_foldings < MIN_E_FOLDINGS {
        return Err(Error::Domain(format!(
            "growth fit failed: window spans {e_foldings:.3} e-foldings (< {MIN_E_FOLDINGS})"
        )));
    }
    Ok(GrowthFit {
        slope: fit.slope,
        r_squared: fit.r_squared,
        t_start: t0,
        t_end: t1,
        e_foldings,
    })
}

/// Regression of fitted slopes against `√N`.
pub fn sqrt_n_regression(n_atoms: &[u32], slopes: &[f64]) -> Result<LinearFit> {
    let x: Vec<f64> = n_atoms.iter().map(|&n| (n as f64).sqrt()).collect();
    linear_fit(&x, slopes)
}
