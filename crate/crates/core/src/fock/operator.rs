use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockBasisSpec, FockVector};
use crate::error::{Error, Result};
use crate::gaussian::{DickeParams, QuadraticHamiltonian};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse complex matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl FockOperator {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed
    /// and explicit zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut op = Self {
            dim,
            row_ptr,
            cols,
            vals,
        };
        op.prune();
        op
    }

    fn prune(&mut self) {
        let mut row_ptr = vec![0; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != C0 {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => C0,
        }
    }

    /// `out = self · x`.
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &FockVector) -> FockVector {
        let mut out = vec![C0; self.dim];
        self.apply_into(&x.amps, &mut out);
        FockVector { amps: out }
    }

    /// `<v|H|v>` (real part).
    pub fn expectation(&self, v: &FockVector) -> f64 {
        v.inner(&self.apply(v)).re
    }

    /// Largest entry of `|H - H†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let d = self.hermiticity_defect();
        if d > 1e-12 {
            Err(Error::NotHermitian(d))
        } else {
            Ok(())
        }
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &FockOperator, b: f64) -> FockOperator {
        assert_eq!(self.dim, other.dim);
        let mut trip = Vec::with_capacity(self.nnz() + other.nnz());
        for (op, s) in [(self, a), (other, b)] {
            for r in 0..op.dim {
                for k in op.row_ptr[r]..op.row_ptr[r + 1] {
                    trip.push((r, op.cols[k], op.vals[k] * s));
                }
            }
        }
        FockOperator::from_triplets(self.dim, trip)
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|k| self.vals[k].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k];
            }
        }
        m
    }

    /// Real part as a dense matrix (exact for real operators).
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] = self.vals[k].re;
            }
        }
        m
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `ω a†a + Ω S_z + (g/√N)(a + a†) S_x` on the photon ⊗ collective-spin
/// basis with `S = N/2`.
pub fn build_dicke(p: &DickeParams, basis: &FockBasisSpec) -> Result<FockOperator> {
    basis.check()?;
    let s = (basis.spin_levels - 1) as f64 / 2.0;
    let coupling = p.g / (p.n_spins as f64).sqrt();
    let mut trip = Vec::with_capacity(basis.dim() * 5);
    for n in 0..=basis.cutoff {
        for k in 0..basis.spin_levels {
            let m = k as f64 - s;
            let i = basis.index(n, k);
            trip.push((i, i, real(p.omega * n as f64 + p.big_omega * m)));
            if n < basis.cutoff && k + 1 < basis.spin_levels {
                // <n+1, m±1| (a + a†) S_x |n, m>, both hermitian partners
                let sp = 0.5 * (s * (s + 1.0) - m * (m + 1.0)).sqrt();
                let a = ((n + 1) as f64).sqrt();
                let v = real(coupling * a * sp);
                let (i_up, j_up) = (basis.index(n + 1, k + 1), basis.index(n, k));
                trip.push((i_up, j_up, v));
                trip.push((j_up, i_up, v));
                let (i_dn, j_dn) = (basis.index(n + 1, k), basis.index(n, k + 1));
                trip.push((i_dn, j_dn, v));
                trip.push((j_dn, i_dn, v));
            }
        }
    }
    Ok(FockOperator::from_triplets(basis.dim(), trip))
}

/// Photon-only frozen-spin Hamiltonian in normal order,
/// `(ω - g²/2Ω) a†a - (g²/4Ω)(a†² + a²)`. Only `basis.cutoff` is used.
pub fn build_effective(p: &DickeParams, basis: &FockBasisSpec) -> Result<FockOperator> {
    let photon = FockBasisSpec::photon_only(basis.cutoff).with_cap(basis.dim_cap);
    photon.check()?;
    let k = p.g * p.g / p.big_omega;
    let m = basis.cutoff;
    let mut trip = Vec::with_capacity(3 * (m + 1));
    for n in 0..=m {
        trip.push((n, n, real((p.omega - 0.5 * k) * n as f64)));
        if n + 2 <= m {
            let v = real(-0.25 * k * (((n + 1) * (n + 2)) as f64).sqrt());
            trip.push((n + 2, n, v));
            trip.push((n, n + 2, v));
        }
    }
    Ok(FockOperator::from_triplets(m + 1, trip))
}

/// `cxx X² + cpp P² + cxp (XP + PX) + c0` on photon levels `0..=cutoff`,
/// with the vacuum constants kept, i.e.
/// `(cxx + cpp)(a†a + 1/2) + (cxx - cpp)/2 (a² + a†²) - i cxp (a² - a†²) + c0`.
pub fn build_quadratic(h: &QuadraticHamiltonian, cutoff: usize) -> Result<FockOperator> {
    let basis = FockBasisSpec::photon_only(cutoff);
    basis.check()?;
    let sum = h.cxx + h.cpp;
    let diff = 0.5 * (h.cxx - h.cpp);
    let mut trip = Vec::with_capacity(3 * (cutoff + 1));
    for n in 0..=cutoff {
        trip.push((n, n, real(sum * (n as f64 + 0.5) + h.c0)));
        if n + 2 <= cutoff {
            let s = (((n + 1) * (n + 2)) as f64).sqrt();
            // <n+2| a†² |n> = s, <n| a² |n+2> = s
            trip.push((n + 2, n, Complex64::new(diff * s, h.cxp * s)));
            trip.push((n, n + 2, Complex64::new(diff * s, -h.cxp * s)));
        }
    }
    Ok(FockOperator::from_triplets(cutoff + 1, trip))
}

/// `K = (XP + PX)/2`; `exp(-iξK)|0⟩` has `<X²> = e^{2ξ}/2`.
pub fn squeeze_generator(cutoff: usize) -> Result<FockOperator> {
    build_quadratic(
        &QuadraticHamiltonian {
            cxp: 0.5,
            ..Default::default()
        },
        cutoff,
    )
}

/// Photon number operator on the full basis.
pub fn number_operator(basis: &FockBasisSpec) -> Result<FockOperator> {
    basis.check()?;
    let trip = (0..=basis.cutoff)
        .flat_map(|n| (0..basis.spin_levels).map(move |k| (n, k)))
        .map(|(n, k)| {
            let i = basis.index(n, k);
            (i, i, real(n as f64))
        })
        .collect();
    Ok(FockOperator::from_triplets(basis.dim(), trip))
}
