use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eigen::sym_eigen;
use super::{FockOperator, FockVector};
use crate::error::{Error, Result};

/// Largest dimension propagated through a dense eigendecomposition when the
/// method is [`PropagationMethod::Auto`].
pub const DENSE_LIMIT: usize = 4000;

const KRYLOV_DIM: usize = 40;
/// Error budget of one propagation over the whole interval.
const KRYLOV_TOL: f64 = 1e-12;
const NORM_DRIFT_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationMethod {
    /// Dense for real operators up to [`DENSE_LIMIT`], Krylov otherwise.
    #[default]
    Auto,
    Dense,
    Krylov,
}

/// `exp(-iHt)` for a fixed Hermitian `H`, reusable across times.
#[derive(Debug)]
pub enum Propagator<'a> {
    Dense {
        values: DVector<f64>,
        vectors: DMatrix<f64>,
    },
    Krylov {
        h: &'a FockOperator,
    },
}

impl<'a> Propagator<'a> {
    pub fn new(h: &'a FockOperator, method: PropagationMethod) -> Result<Self> {
        h.check_hermitian()?;
        let dense = match method {
            PropagationMethod::Auto => h.is_real() && h.dim() <= DENSE_LIMIT,
            PropagationMethod::Dense => {
                if !h.is_real() {
                    return Err(Error::Domain("dense propagation supports real operators only".into()));
                }
                true
            }
            PropagationMethod::Krylov => false,
        };
        if dense {
            let eig = sym_eigen(&h.to_dense_real())?;
            Ok(Self::Dense {
                values: eig.values,
                vectors: eig.vectors,
            })
        } else {
            Ok(Self::Krylov { h })
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, Self::Dense { .. })
    }

    /// Evolves `v` through increasing `times`, stepping from one sample to
    /// the next, and maps every sampled state through `f`.
    pub fn trajectory<T>(
        &self,
        v: &FockVector,
        times: &[f64],
        mut f: impl FnMut(f64, &FockVector) -> Result<T>,
    ) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(times.len());
        let mut state = v.clone();
        let mut now = 0.0;
        for &t in times {
            state = match self {
                Self::Dense { .. } => self.evolve(v, t)?,
                Self::Krylov { .. } => self.evolve(&state, t - now)?,
            };
            now = t;
            out.push(f(t, &state)?);
        }
        Ok(out)
    }

    /// `exp(-iHt) v`; negative `t` runs backwards.
    pub fn evolve(&self, v: &FockVector, t: f64) -> Result<FockVector> {
        if t == 0.0 {
            return Ok(v.clone());
        }
        let out = match self {
            Self::Dense { values, vectors } => dense_evolve(values, vectors, v, t),
            Self::Krylov { h } => krylov_evolve(h, v, t)?,
        };
        let drift = (out.norm() - v.norm()).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NotConverged {
                what: "unitary propagation (norm drift)",
                residual: drift,
            });
        }
        Ok(out)
    }
}

/// `exp(-iHt) v` with the default method choice.
pub fn evolve_exact(h: &FockOperator, v: &FockVector, t: f64) -> Result<FockVector> {
    evolve_with(h, v, t, PropagationMethod::Auto)
}

pub fn evolve_with(h: &FockOperator, v: &FockVector, t: f64, method: PropagationMethod) -> Result<FockVector> {
    if t == 0.0 {
        h.check_hermitian()?;
        return Ok(v.clone());
    }
    Propagator::new(h, method)?.evolve(v, t)
}

fn dense_evolve(values: &DVector<f64>, vectors: &DMatrix<f64>, v: &FockVector, t: f64) -> FockVector {
    let re = DVector::from_iterator(v.dim(), v.amps.iter().map(|a| a.re));
    let im = DVector::from_iterator(v.dim(), v.amps.iter().map(|a| a.im));
    let cr = vectors.tr_mul(&re);
    let ci = vectors.tr_mul(&im);
    let mut wr = DVector::zeros(values.len());
    let mut wi = DVector::zeros(values.len());
    for k in 0..values.len() {
        let ph = Complex64::from_polar(1.0, -values[k] * t) * Complex64::new(cr[k], ci[k]);
        wr[k] = ph.re;
        wi[k] = ph.im;
    }
    let or = vectors * wr;
    let oi = vectors * wi;
    FockVector {
        amps: or.iter().zip(oi.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect(),
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal Lanczos basis with full reorthogonalization.
pub(crate) struct Lanczos {
    pub basis: Vec<Vec<Complex64>>,
    pub alpha: Vec<f64>,
    /// `beta[j]` couples basis vectors `j` and `j + 1`; the last entry is the
    /// residual norm leaving the subspace.
    pub beta: Vec<f64>,
    pub breakdown: bool,
}

impl Lanczos {
    pub fn build(h: &FockOperator, start: &[Complex64], max_dim: usize) -> Self {
        let dim = h.dim();
        let m = max_dim.min(dim).max(1);
        let n0 = norm(start);
        let mut basis = vec![start.iter().map(|x| x / n0).collect::<Vec<_>>()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        let scale = h.norm_bound().max(f64::MIN_POSITIVE);
        let mut breakdown = false;
        for j in 0..m {
            h.apply_into(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            beta.push(b);
            if b <= 1e-13 * scale || basis.len() == dim {
                breakdown = true;
                break;
            }
            if j + 1 < m {
                basis.push(w.iter().map(|x| x / b).collect());
            }
        }
        Self {
            basis,
            alpha,
            beta,
            breakdown,
        }
    }

    pub fn tridiagonal(&self) -> DMatrix<f64> {
        let k = self.alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = self.alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        t
    }

    pub fn combine(&self, coeffs: &[Complex64], scale: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.basis[0].len()];
        for (c, q) in coeffs.iter().zip(&self.basis) {
            let c = c * scale;
            out.iter_mut().zip(q).for_each(|(o, x)| *o += c * x);
        }
        out
    }
}

fn krylov_evolve(h: &FockOperator, v: &FockVector, t: f64) -> Result<FockVector> {
    let total = t.abs();
    let sign = t.signum();
    let mut w = v.amps.clone();
    let mut done = 0.0;
    let mut guess = total;
    while done < total {
        let beta0 = norm(&w);
        if beta0 == 0.0 {
            break;
        }
        let lz = Lanczos::build(h, &w, KRYLOV_DIM);
        let eig = sym_eigen(&lz.tridiagonal())?;
        let k = lz.alpha.len();
        let last_beta = *lz.beta.last().unwrap();
        let remaining = total - done;
        let mut tau = guess.min(remaining);
        let coeffs = loop {
            let c: Vec<Complex64> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            let q = eig.vectors[(i, j)] * eig.vectors[(0, j)];
                            Complex64::from_polar(q, -sign * eig.values[j] * tau)
                        })
                        .sum()
                })
                .collect();
            let err = if lz.breakdown { 0.0 } else { beta0 * last_beta * c[k - 1].norm() };
            // below the rounding floor of the estimate itself there is nothing to gain
            let floor = 8.0 * f64::EPSILON * beta0 * last_beta;
            if err <= (KRYLOV_TOL * tau / total).max(floor) {
                break c;
            }
            tau *= 0.5;
            if tau < total * 1e-15 {
                return Err(Error::NotConverged {
                    what: "Krylov propagation step",
                    residual: err,
                });
            }
        };
        w = lz.combine(&coeffs, beta0);
        done += tau;
        guess = 2.0 * tau;
        if remaining - tau <= total * 1e-15 {
            break;
        }
    }
    Ok(FockVector { amps: w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_dicke, build_effective, squeeze_generator, FockBasisSpec};
    use crate::gaussian::DickeParams;
    use approx::assert_relative_eq;

    fn max_diff(a: &FockVector, b: &FockVector) -> f64 {
        a.amps.iter().zip(&b.amps).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_time_is_identity() {
        let p = DickeParams::new(1.0, 3.0, 1.2, 2).unwrap();
        let b = FockBasisSpec::new(10, 2).unwrap();
        let h = build_dicke(&p, &b).unwrap();
        let v = FockVector::basis_state(&b, 2, 1);
        assert_eq!(evolve_exact(&h, &v, 0.0).unwrap(), v);
    }

    #[test]
    fn dense_and_krylov_agree() {
        let p = DickeParams::new(1.0, 3.0, 1.9, 2).unwrap();
        let b = FockBasisSpec::new(30, 2).unwrap();
        let h = build_dicke(&p, &b).unwrap();
        let v = FockVector::ground_product(&b);
        for t in [0.3, 2.0, -1.5] {
            let a = evolve_with(&h, &v, t, PropagationMethod::Dense).unwrap();
            let k = evolve_with(&h, &v, t, PropagationMethod::Krylov).unwrap();
            assert!(max_diff(&a, &k) < 1e-10, "t = {t}: {}", max_diff(&a, &k));
        }
    }

    #[test]
    fn forward_then_backward() {
        let p = DickeParams::from_coupling_ratio(1.0, 1.0, 1.4, 1).unwrap();
        let b = FockBasisSpec::photon_only(200);
        let h = build_effective(&p, &b).unwrap();
        let v = FockVector::basis_state(&b, 1, 0);
        for m in [PropagationMethod::Dense, PropagationMethod::Krylov] {
            let f = evolve_with(&h, &v, 1.3, m).unwrap();
            let back = evolve_with(&h, &f, -1.3, m).unwrap();
            assert!(max_diff(&back, &v) < 1e-10);
        }
    }

    #[test]
    fn energy_and_norm_conserved() {
        let p = DickeParams::new(1.0, 10.0, 4.0, 1).unwrap();
        let b = FockBasisSpec::new(60, 1).unwrap();
        let h = build_dicke(&p, &b).unwrap();
        let v = FockVector::ground_product(&b);
        let e0 = h.expectation(&v);
        let prop = Propagator::new(&h, PropagationMethod::Auto).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let w = prop.evolve(&v, t).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-10);
            assert!((h.expectation(&w) - e0).abs() < 1e-9);
        }
    }

    #[test]
    fn squeezing_generator_produces_squeezed_vacuum() {
        let b = FockBasisSpec::photon_only(120);
        let k = squeeze_generator(120).unwrap();
        let xi = 0.8;
        let v = evolve_exact(&k, &FockVector::ground_product(&b), xi).unwrap();
        let m = v.photon_moments(&b);
        assert_relative_eq!(m.quadrature_second_moment(0.0), (2.0 * xi).exp() / 2.0, max_relative = 1e-10);
        assert_relative_eq!(m.n, xi.sinh().powi(2), max_relative = 1e-10);
        // closed-form amplitudes of the squeezed vacuum
        let (c, th) = (xi.cosh(), xi.tanh());
        let mut amp = 1.0 / c.sqrt();
        for n in 0..20 {
            assert!((v.amps[2 * n] - Complex64::new(amp, 0.0)).norm() < 1e-10);
            amp *= th * (((2 * n + 1) as f64) / ((2 * n + 2) as f64)).sqrt();
        }
    }

    #[test]
    fn dense_rejects_complex() {
        let k = squeeze_generator(10).unwrap();
        assert!(Propagator::new(&k, PropagationMethod::Dense).is_err());
        assert!(!Propagator::new(&k, PropagationMethod::Auto).unwrap().is_dense());
    }
}
