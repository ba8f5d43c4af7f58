//! Single-mode Gaussian states and their evolution under quadratic
//! Hamiltonians.
//!
//! Quadrature conventions used throughout the crate:
//!
//! * `X = (a + a†)/√2`, `P = (a - a†)/(i√2)`, so `[X, P] = i` and the vacuum
//!   has `<X²> = <P²> = 1/2`;
//! * the rotated quadrature measured by a homodyne detector is
//!   `Q(φ) = (a e^{iφ} + a† e^{-iφ})/√2 = X cos φ - P sin φ`.
//!
//! The photonic Hamiltonian obtained from the Dicke model with the collective
//! spin frozen in its lowest state is
//! `H = (ω/2) P² + (ω/2)(1 - g²/g_c²) X²`, which becomes an inverted
//! oscillator once `g > g_c`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::analytic::{self, Branch};
use crate::error::{require, Error, Result};

/// Tolerance on `det(cov) = 1/4` for states this crate treats as pure.
pub const PURITY_TOLERANCE: f64 = 1e-10;

/// Default threshold for the initial-state validity condition.
pub const DEFAULT_CONDITION7_THRESHOLD: f64 = 0.01;

/// Physical configuration of the Dicke model (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeParams {
    /// Field frequency ω.
    pub omega: f64,
    /// Spin splitting Ω.
    pub big_omega: f64,
    /// Light-matter coupling g.
    pub g: f64,
    /// Number of two-level systems N.
    pub n_spins: u32,
}

impl DickeParams {
    pub fn new(omega: f64, big_omega: f64, g: f64, n_spins: u32) -> Result<Self> {
        require(omega.is_finite() && omega > 0.0, "omega", omega, "must be finite and > 0")?;
        require(
            big_omega.is_finite() && big_omega > 0.0,
            "big_omega",
            big_omega,
            "must be finite and > 0",
        )?;
        require(g.is_finite() && g >= 0.0, "g", g, "must be finite and >= 0")?;
        require(n_spins >= 1, "n_spins", n_spins as f64, "must be >= 1")?;
        Ok(Self {
            omega,
            big_omega,
            g,
            n_spins,
        })
    }

    /// Builds parameters from the coupling expressed as `g/g_c`.
    pub fn from_coupling_ratio(omega: f64, big_omega: f64, g_over_gc: f64, n_spins: u32) -> Result<Self> {
        require(
            g_over_gc.is_finite() && g_over_gc >= 0.0,
            "g_over_gc",
            g_over_gc,
            "must be finite and >= 0",
        )?;
        let g_c = (omega * big_omega).sqrt();
        Self::new(omega, big_omega, g_over_gc * g_c, n_spins)
    }

    /// Critical coupling `g_c = sqrt(ω Ω)`.
    pub fn g_c(&self) -> f64 {
        (self.omega * self.big_omega).sqrt()
    }

    /// `r = g²/g_c²`.
    pub fn ratio(&self) -> f64 {
        self.g * self.g / (self.omega * self.big_omega)
    }

    pub fn with_g(self, g: f64) -> Result<Self> {
        Self::new(self.omega, self.big_omega, g, self.n_spins)
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(omega, self.big_omega, self.g, self.n_spins)
    }

    pub fn with_big_omega(self, big_omega: f64) -> Result<Self> {
        Self::new(self.omega, big_omega, self.g, self.n_spins)
    }
}

/// Mean and covariance of a single bosonic mode in `(X, P)` coordinates.
///
/// `cov` holds symmetrized central second moments, `cov_xp = <{ΔX, ΔP}>/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl GaussianState {
    /// Validates symmetry, positive definiteness and purity.
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let asym = (cov[(0, 1)] - cov[(1, 0)]).abs();
        require(asym <= 1e-12 * cov.abs().max().max(1.0), "cov_xp", asym, "covariance must be symmetric")?;
        require(cov[(0, 0)] > 0.0, "cov_xx", cov[(0, 0)], "covariance must be positive definite")?;
        let det = cov.determinant();
        require(
            (det - 0.25).abs() <= PURITY_TOLERANCE * cov.abs().max().powi(2).max(1.0),
            "det(cov)",
            det,
            "only pure states (det = 1/4) are supported",
        )?;
        Ok(Self { mean, cov })
    }

    /// Second moment `<Q(φ)²>` including the mean contribution.
    pub fn quadrature_second_moment(&self, phi: f64) -> f64 {
        let v = Vector2::new(phi.cos(), -phi.sin());
        let m = v.dot(&self.mean);
        (v.transpose() * self.cov * v)[(0, 0)] + m * m
    }

    pub fn purity_defect(&self) -> f64 {
        (self.cov.determinant() - 0.25).abs()
    }
}

/// `H = cxx X² + cpp P² + cxp (XP + PX) + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticHamiltonian {
    pub cxx: f64,
    pub cpp: f64,
    pub cxp: f64,
    pub c0: f64,
}

impl QuadraticHamiltonian {
    pub fn new(cxx: f64, cpp: f64, cxp: f64, c0: f64) -> Result<Self> {
        for (name, v) in [("cxx", cxx), ("cpp", cpp), ("cxp", cxp), ("c0", c0)] {
            require(v.is_finite(), name, v, "must be finite")?;
        }
        Ok(Self { cxx, cpp, cxp, c0 })
    }

    /// Squared oscillation frequency of the classical flow,
    /// `4 (cxx cpp - cxp²)`; negative for an inverted oscillator.
    pub fn frequency_squared(&self) -> f64 {
        4.0 * (self.cxx * self.cpp - self.cxp * self.cxp)
    }

    /// Generator of the classical flow, `d/dt (X, P) = M (X, P)`.
    pub fn flow_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(
            2.0 * self.cxp,
            2.0 * self.cpp,
            -2.0 * self.cxx,
            -2.0 * self.cxp,
        )
    }

    /// Symplectic propagator `S(t) = exp(t M)`.
    ///
    /// Since `M² = -k² I` with `k²` the squared frequency,
    /// `S = cos(k t) I + sin(k t)/k M`, continued analytically through
    /// `k² = 0`.
    pub fn propagator(&self, t: f64) -> Matrix2<f64> {
        self.propagator_with(t, Branch::Auto)
    }

    pub fn propagator_with(&self, t: f64, branch: Branch) -> Matrix2<f64> {
        let k2 = self.frequency_squared();
        Matrix2::identity() * analytic::cos_c(k2, t, branch)
            + self.flow_matrix() * analytic::sinc_c(k2, t, branch)
    }

    /// Derivative of [`Self::propagator`] along a perturbation `dh` of the
    /// coefficients (for `dh = ∂H/∂λ` this is `∂S/∂λ`).
    pub fn propagator_derivative(&self, dh: &QuadraticHamiltonian, t: f64) -> Matrix2<f64> {
        let k2 = self.frequency_squared();
        let dk2 = 4.0 * (dh.cxx * self.cpp + self.cxx * dh.cpp - 2.0 * self.cxp * dh.cxp);
        let dcos = analytic::cos_c_dk2(k2, t, Branch::Auto) * dk2;
        let dsinc = analytic::sinc_c_dk2(k2, t, Branch::Auto) * dk2;
        Matrix2::identity() * dcos
            + self.flow_matrix() * dsinc
            + dh.flow_matrix() * analytic::sinc_c(k2, t, Branch::Auto)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            cxx: self.cxx * s,
            cpp: self.cpp * s,
            cxp: self.cxp * s,
            c0: self.c0 * s,
        }
    }
}

/// Heisenberg-picture mode evolution `a(t) = u a + v a†`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovCoeffs {
    pub u: Complex64,
    pub v: Complex64,
}

impl BogoliubovCoeffs {
    /// Converts a quadrature-space symplectic matrix.
    pub fn from_symplectic(s: &Matrix2<f64>) -> Self {
        let (s00, s01, s10, s11) = (s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
        Self {
            u: Complex64::new(0.5 * (s00 + s11), 0.5 * (s10 - s01)),
            v: Complex64::new(0.5 * (s00 - s11), 0.5 * (s10 + s01)),
        }
    }

    /// `|u|² - |v|²`, equal to one for a canonical transformation.
    pub fn commutator(&self) -> f64 {
        self.u.norm_sqr() - self.v.norm_sqr()
    }
}

pub fn vacuum_state() -> GaussianState {
    GaussianState {
        mean: Vector2::zeros(),
        cov: Matrix2::identity() * 0.5,
    }
}

/// Quadrature form of the frozen-spin photonic Hamiltonian:
/// `cpp = ω/2`, `cxx = (ω/2)(1 - g²/g_c²)`.
pub fn effective_hamiltonian(p: &DickeParams) -> QuadraticHamiltonian {
    QuadraticHamiltonian {
        cxx: 0.5 * p.omega * (1.0 - p.ratio()),
        cpp: 0.5 * p.omega,
        cxp: 0.0,
        c0: 0.0,
    }
}

/// Squeezing of the normal-phase ground state, `ξ = -ln(1 - g²/g_c²)/4`.
pub fn squeezing_parameter(p: &DickeParams) -> Result<f64> {
    let r = p.ratio();
    if r >= 1.0 {
        return Err(Error::Domain(format!(
            "squeezing parameter is real only below the critical coupling (g/g_c = {:.6})",
            r.sqrt()
        )));
    }
    Ok(-0.25 * (1.0 - r).ln())
}

/// Evolves `state` for a time `t` under `h`: `mean -> S mean`, `cov -> S cov Sᵀ`.
pub fn evolve(state: &GaussianState, h: &QuadraticHamiltonian, t: f64) -> GaussianState {
    let s = h.propagator(t);
    GaussianState {
        mean: s * state.mean,
        cov: s * state.cov * s.transpose(),
    }
}

pub fn bogoliubov_coeffs(p: &DickeParams, t: f64) -> BogoliubovCoeffs {
    BogoliubovCoeffs::from_symplectic(&effective_hamiltonian(p).propagator(t))
}

/// `<Q(φ, t)²>` after a quench of the vacuum into `p`.
pub fn quadrature_variance(p: &DickeParams, t: f64, phi: f64) -> f64 {
    quadrature_variance_with(p, t, phi, Branch::Auto)
}

pub fn quadrature_variance_with(p: &DickeParams, t: f64, phi: f64, branch: Branch) -> f64 {
    variance_parts(p.ratio(), p.omega * t, phi, branch).value
}

/// Quadrature variance after the quench as a function of `r = g²/g_c²` and
/// `x = ωt`, together with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceParts {
    pub value: f64,
    pub d_ratio: f64,
    pub d_time: f64,
}

/// With `k² = 1 - r`, `S(x) = sin(kx)/k` and `C(x) = cos(kx)`:
///
/// `V = 1/2 + (r/2) cos²φ S(x)² - (r(1-r)/2) sin²φ S(x)² - (r/4) sin 2φ S(2x)`.
///
/// Evaluated as `V = (A² + B²)/2` with `A = C cos φ + k² S sin φ` and
/// `B = S cos φ - C sin φ` (the rows of the propagator applied to the
/// quadrature direction). The expanded form cancels `e^{2x}`-sized terms down
/// to `e^{-2x}` on the squeezed axis; the sum of squares does not.
pub fn variance_parts(r: f64, x: f64, phi: f64, branch: Branch) -> VarianceParts {
    let k2 = 1.0 - r;
    let s = analytic::sinc_c(k2, x, branch);
    let c = analytic::cos_c(k2, x, branch);
    let ds = analytic::sinc_c_dk2(k2, x, branch);
    let dc = analytic::cos_c_dk2(k2, x, branch);
    let (cp, sp) = (phi.cos(), phi.sin());

    let a = c * cp + k2 * s * sp;
    let b = s * cp - c * sp;
    // dC/dx = -k² S, dS/dx = C
    let da_dx = k2 * (c * sp - s * cp);
    let db_dx = a;
    // dk²/dr = -1
    let da_dr = -dc * cp - s * sp - k2 * ds * sp;
    let db_dr = dc * sp - ds * cp;
    VarianceParts {
        value: 0.5 * (a * a + b * b),
        d_ratio: a * da_dr + b * db_dr,
        d_time: a * da_dx + b * db_dx,
    }
}

/// Mean photon number `(<X²> + <P²> - 1)/2`.
pub fn photon_number(state: &GaussianState) -> f64 {
    0.5 * (state.cov[(0, 0)] + state.cov[(1, 1)] + state.mean.norm_squared() - 1.0)
}

/// Outcome of the effective-model validity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// `(1/4)(g²/g_c²)(ω/Ω)`, must be small for the frozen-spin description
    /// of the initial state.
    pub condition7: f64,
    /// Photon-number ceiling `(NΩ/32ω)(g²/g_c² - g_c²/g²)`; `None` below
    /// the critical coupling where it does not apply.
    pub condition8_bound: Option<f64>,
    pub within: bool,
}

pub fn check_validity(p: &DickeParams, state: &GaussianState) -> Result<ValidityReport> {
    check_validity_with(p, state, DEFAULT_CONDITION7_THRESHOLD)
}

pub fn check_validity_with(p: &DickeParams, state: &GaussianState, threshold: f64) -> Result<ValidityReport> {
    require(p.g > 0.0, "g", p.g, "validity conditions need g > 0")?;
    let r = p.ratio();
    let condition7 = 0.25 * r * p.omega / p.big_omega;
    let condition8_bound = (r >= 1.0)
        .then(|| p.n_spins as f64 * p.big_omega / (32.0 * p.omega) * (r - 1.0 / r));
    let photons_ok = condition8_bound.is_none_or(|b| photon_number(state) < b);
    Ok(ValidityReport {
        condition7,
        condition8_bound,
        within: condition7 < threshold && photons_ok,
    })
}
