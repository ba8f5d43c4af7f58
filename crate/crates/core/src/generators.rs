//! Local generators `h_λ = i U†(∂_λ U)` of the quench evolution and the
//! quantum Fisher information they carry on the vacuum.
//!
//! Every operator handled here is a symmetrized quadratic form
//! `zᵀ W z + c` with `z = (X, P)`, so commutators close on 2×2 symmetric
//! matrices: `[zᵀA z, zᵀB z] = 2i zᵀ(A J B - B J A) z` with
//! `J = [[0, 1], [-1, 0]]`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;

use crate::analytic::{self, Branch};
use crate::error::{Error, Result};
use crate::gaussian::{effective_hamiltonian, DickeParams, GaussianState, QuadraticHamiltonian};

/// Which physical parameter is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParameterChoice {
    Omega,
    BigOmega,
    G,
}

impl ParameterChoice {
    pub const ALL: [ParameterChoice; 3] = [Self::Omega, Self::BigOmega, Self::G];

    pub fn value(self, p: &DickeParams) -> f64 {
        match self {
            Self::Omega => p.omega,
            Self::BigOmega => p.big_omega,
            Self::G => p.g,
        }
    }

    /// Returns `p` with the selected parameter replaced.
    pub fn set(self, p: &DickeParams, value: f64) -> Result<DickeParams> {
        match self {
            Self::Omega => p.with_omega(value),
            Self::BigOmega => p.with_big_omega(value),
            Self::G => p.with_g(value),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::BigOmega => "Omega",
            Self::G => "g",
        }
    }
}

impl fmt::Display for ParameterChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParameterChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" | "w" => Ok(Self::Omega),
            "Omega" | "big-omega" | "big_omega" | "W" => Ok(Self::BigOmega),
            "g" => Ok(Self::G),
            other => Err(Error::Domain(format!(
                "unknown parameter `{other}` (expected omega, Omega or g)"
            ))),
        }
    }
}

/// `h = a_xx X² + a_pp P² + a_xp (XP + PX) + a_0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalGenerator {
    pub a_xx: f64,
    pub a_pp: f64,
    pub a_xp: f64,
    pub a_0: f64,
}

impl LocalGenerator {
    pub fn from_matrix(w: &Matrix2<f64>, a_0: f64) -> Self {
        Self {
            a_xx: w[(0, 0)],
            a_pp: w[(1, 1)],
            a_xp: 0.5 * (w[(0, 1)] + w[(1, 0)]),
            a_0,
        }
    }

    /// Symmetric matrix `W` of the quadratic part.
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.a_xx, self.a_xp, self.a_xp, self.a_pp)
    }

    pub fn is_finite(&self) -> bool {
        [self.a_xx, self.a_pp, self.a_xp, self.a_0].iter().all(|v| v.is_finite())
    }
}

/// Squared gap `δ_ε` and its dimensionless form `δ = δ_ε/ω²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapParameter {
    pub delta_eps: f64,
    pub delta: f64,
}

/// `δ_ε = 4ω²(1 - g²/g_c²)`.
pub fn delta_epsilon(p: &DickeParams) -> GapParameter {
    let delta = 4.0 * (1.0 - p.ratio());
    GapParameter {
        delta_eps: delta * p.omega * p.omega,
        delta,
    }
}

const J: Matrix2<f64> = Matrix2::new(0.0, 1.0, -1.0, 0.0);

pub(crate) fn hamiltonian_matrix(h: &QuadraticHamiltonian) -> Matrix2<f64> {
    Matrix2::new(h.cxx, h.cxp, h.cxp, h.cpp)
}

/// Quadratic part of `-i[A, B]`.
pub fn commutator_form(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix2<f64> {
    (a * J * b - b * J * a) * 2.0
}

/// `∂H/∂λ` of the effective Hamiltonian.
pub fn hamiltonian_derivative(p: &DickeParams, lam: ParameterChoice) -> QuadraticHamiltonian {
    let (dxx, dpp) = match lam {
        ParameterChoice::Omega => (0.5, 0.5),
        ParameterChoice::BigOmega => (p.g * p.g / (2.0 * p.big_omega * p.big_omega), 0.0),
        ParameterChoice::G => (-p.g / p.big_omega, 0.0),
    };
    QuadraticHamiltonian {
        cxx: dxx,
        cpp: dpp,
        cxp: 0.0,
        c0: 0.0,
    }
}

/// Local generator of `exp(-i h t)` for the perturbation `dh = ∂h/∂λ`.
///
/// `h_λ = H_λ t + (cos(√δ_ε t) - 1)/δ_ε C - (sin(√δ_ε t) - √δ_ε t)/δ_ε^{3/2} D`
/// with `C = -i[H, H_λ]` and `D = -i[H, C]`, continued analytically for
/// `δ_ε < 0`.
pub fn generator_for(h: &QuadraticHamiltonian, dh: &QuadraticHamiltonian, t: f64, branch: Branch) -> LocalGenerator {
    let wh = hamiltonian_matrix(h);
    let wl = hamiltonian_matrix(dh);
    let c = commutator_form(&wh, &wl);
    let d = commutator_form(&wh, &c);
    let de = 4.0 * h.frequency_squared();
    let w = wl * t + c * analytic::cos_minus_one_over(de, t, branch) - d * analytic::sin_minus_arg_over(de, t, branch);
    LocalGenerator::from_matrix(&w, dh.c0 * t)
}

/// Exact local generator of the quench into `p` for the parameter `lam`.
pub fn local_generator(p: &DickeParams, lam: ParameterChoice, t: f64) -> LocalGenerator {
    local_generator_with(p, lam, t, Branch::Auto)
}

pub fn local_generator_with(p: &DickeParams, lam: ParameterChoice, t: f64, branch: Branch) -> LocalGenerator {
    generator_for(&effective_hamiltonian(p), &hamiltonian_derivative(p, lam), t, branch)
}

/// Variance of `zᵀWz + c` on a Gaussian state (Wick factorization):
/// `2 tr(WσWσ) + tr(WJWJ)/2 + 4 μᵀWσWμ`.
pub fn generator_variance(gen: &LocalGenerator, state: &GaussianState) -> f64 {
    let w = gen.matrix();
    let s = state.cov;
    let mu = state.mean;
    let wj = w * J;
    2.0 * (w * s * w * s).trace() + 0.5 * (wj * wj).trace() + 4.0 * (mu.transpose() * w * s * w * mu)[(0, 0)]
}

/// `4 Var(h)` on the vacuum, `4[(a_xx - a_pp)²/2 + 2 a_xp²]`.
pub fn qfi_from_generator(gen: &LocalGenerator) -> f64 {
    let d = gen.a_xx - gen.a_pp;
    4.0 * (0.5 * d * d + 2.0 * gen.a_xp * gen.a_xp)
}

/// Generator with `cos`/`cosh` and `sin`/`sinh` both replaced by
/// `exp(√|δ_ε| t)/2`, taken verbatim. Only defined beyond the critical point.
pub fn heuristic_generator(p: &DickeParams, lam: ParameterChoice, t: f64) -> Result<LocalGenerator> {
    let de = delta_epsilon(p).delta_eps;
    if de >= 0.0 {
        return Err(Error::Domain(format!(
            "heuristic generator needs g > g_c (g/g_c = {:.6})",
            p.ratio().sqrt()
        )));
    }
    let h = effective_hamiltonian(p);
    let dh = hamiltonian_derivative(p, lam);
    let wh = hamiltonian_matrix(&h);
    let wl = hamiltonian_matrix(&dh);
    let c = commutator_form(&wh, &wl);
    let d = commutator_form(&wh, &c);
    let s = (-de).sqrt();
    let half_exp = 0.5 * (s * t).exp();
    let cc = (half_exp - 1.0) / -de;
    let cd = (half_exp - s * t) / (s * de);
    Ok(LocalGenerator::from_matrix(&(wl * t + c * cc - d * cd), 0.0))
}

pub fn qfi_heuristic_superradiant(p: &DickeParams, lam: ParameterChoice, t: f64) -> Result<f64> {
    heuristic_generator(p, lam, t).map(|g| qfi_from_generator(&g))
}

/// QFI of the `n`-th normal-phase eigenstate,
/// `(1 + n + n²) r² / (8 λ² (1 - r)²)` for `λ ∈ {ω, Ω}`.
pub fn qfi_eigenstate(p: &DickeParams, n: u32, lam: ParameterChoice) -> Result<f64> {
    let r = p.ratio();
    if r >= 1.0 {
        return Err(Error::Domain(format!(
            "eigenstate QFI is a normal-phase result (g/g_c = {:.6})",
            r.sqrt()
        )));
    }
    let l = match lam {
        ParameterChoice::Omega => p.omega,
        ParameterChoice::BigOmega => p.big_omega,
        ParameterChoice::G => {
            return Err(Error::Domain("no closed-form eigenstate QFI for lambda = g".into()));
        }
    };
    let n = n as f64;
    Ok((1.0 + n + n * n) * r * r / (8.0 * l * l * (1.0 - r).powi(2)))
}
