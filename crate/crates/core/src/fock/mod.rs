//! Exact simulation on a truncated photon ⊗ collective-spin basis.
//!
//! Basis states are `|n⟩ ⊗ |S, m⟩` with `n = 0..=cutoff` and
//! `m = -S..=S`, stored at index `n (2S + 1) + (m + S)`.

mod eigen;
mod operator;
mod propagate;
mod qfi;

pub use operator::{build_dicke, build_effective, build_quadratic, number_operator, squeeze_generator, FockOperator};
pub use propagate::{evolve_exact, evolve_with, PropagationMethod, Propagator, DENSE_LIMIT};
pub use qfi::{
    generator_matrix_oracle, ground_state, ground_state_with, qfi_fidelity, qfi_quench_effective, qfi_spectral,
    squeezed_state, FidelityQfi, QuenchQfi,
};

use num_complex::Complex64;

use crate::error::{require, Error, Result};

/// Default cap on the Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 1_000_000;
/// Populations above this many levels below the cutoff count as tail.
pub const TAIL_LEVELS: usize = 10;
/// Largest tail population accepted as converged.
pub const TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasisSpec {
    /// Highest photon number kept.
    pub cutoff: usize,
    /// `2S + 1`.
    pub spin_levels: usize,
    pub dim_cap: usize,
}

impl FockBasisSpec {
    /// Photon levels `0..=cutoff` times the `N + 1` states of spin `S = N/2`.
    pub fn new(cutoff: usize, n_spins: u32) -> Result<Self> {
        require(cutoff >= 1, "cutoff", cutoff as f64, "must be >= 1")?;
        require(n_spins >= 1, "n_spins", n_spins as f64, "must be >= 1")?;
        Ok(Self {
            cutoff,
            spin_levels: n_spins as usize + 1,
            dim_cap: DEFAULT_DIM_CAP,
        })
    }

    pub fn photon_only(cutoff: usize) -> Self {
        Self {
            cutoff,
            spin_levels: 1,
            dim_cap: DEFAULT_DIM_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * self.spin_levels
    }

    pub fn index(&self, n: usize, k: usize) -> usize {
        n * self.spin_levels + k
    }

    pub fn check(&self) -> Result<()> {
        require(self.cutoff >= 1, "cutoff", self.cutoff as f64, "must be >= 1")?;
        let dim = self.dim();
        if dim > self.dim_cap {
            return Err(Error::DimensionTooLarge {
                dim,
                cap: self.dim_cap,
            });
        }
        Ok(())
    }
}

/// State vector on a [`FockBasisSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amps: Vec<Complex64>,
}

/// Photon-mode moments `<a†a>`, `<a>`, `<a²>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonMoments {
    pub n: f64,
    pub a: Complex64,
    pub a2: Complex64,
}

impl PhotonMoments {
    /// `<Q(φ)²> = Re(e^{2iφ}<a²>) + <a†a> + 1/2`.
    pub fn quadrature_second_moment(&self, phi: f64) -> f64 {
        (Complex64::from_polar(1.0, 2.0 * phi) * self.a2).re + self.n + 0.5
    }
}

impl FockVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// `|n⟩ ⊗ |S, m = -S + k⟩`.
    pub fn basis_state(basis: &FockBasisSpec, n: usize, k: usize) -> Self {
        let mut v = Self::zeros(basis.dim());
        v.amps[basis.index(n, k)] = Complex64::new(1.0, 0.0);
        v
    }

    /// Photon vacuum with all spins down.
    pub fn ground_product(basis: &FockBasisSpec) -> Self {
        Self::basis_state(basis, 0, 0)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= n);
        self
    }

    /// Photon-number distribution `p(n)` summed over spin states.
    pub fn photon_distribution(&self, basis: &FockBasisSpec) -> Vec<f64> {
        (0..=basis.cutoff)
            .map(|n| (0..basis.spin_levels).map(|k| self.amps[basis.index(n, k)].norm_sqr()).sum())
            .collect()
    }

    /// Population of photon levels above `cutoff - TAIL_LEVELS`.
    pub fn tail(&self, basis: &FockBasisSpec) -> f64 {
        let start = basis.cutoff.saturating_sub(TAIL_LEVELS) + 1;
        self.photon_distribution(basis)[start..].iter().sum()
    }

    /// Errors out when the tail population exceeds [`TAIL_LIMIT`].
    pub fn check_tail(&self, basis: &FockBasisSpec) -> Result<f64> {
        let tail = self.tail(basis);
        if tail.is_nan() || tail >= TAIL_LIMIT {
            return Err(Error::CutoffInsufficient {
                cutoff: basis.cutoff,
                tail,
                limit: TAIL_LIMIT,
            });
        }
        Ok(tail)
    }

    pub fn photon_moments(&self, basis: &FockBasisSpec) -> PhotonMoments {
        let mut n_avg = 0.0;
        let mut a = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        for n in 0..=basis.cutoff {
            for k in 0..basis.spin_levels {
                let c = self.amps[basis.index(n, k)];
                n_avg += n as f64 * c.norm_sqr();
                if n < basis.cutoff {
                    a += c.conj() * self.amps[basis.index(n + 1, k)] * ((n + 1) as f64).sqrt();
                }
                if n + 2 <= basis.cutoff {
                    a2 += c.conj() * self.amps[basis.index(n + 2, k)] * (((n + 1) * (n + 2)) as f64).sqrt();
                }
            }
        }
        PhotonMoments { n: n_avg, a, a2 }
    }

    pub fn photon_number(&self, basis: &FockBasisSpec) -> f64 {
        self.photon_moments(basis).n
    }

    /// Fidelity `⟨φ|ρ|φ⟩` of the photon reduced state with a photon-only
    /// pure state `phi` on levels `0..=basis.cutoff`.
    pub fn photon_fidelity(&self, basis: &FockBasisSpec, phi: &FockVector) -> f64 {
        (0..basis.spin_levels)
            .map(|k| {
                (0..=basis.cutoff)
                    .map(|n| phi.amps[n].conj() * self.amps[basis.index(n, k)])
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .sum()
    }
}
