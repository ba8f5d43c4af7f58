use log::warn;
use num_complex::Complex64;

use super::operator::{build_effective, build_quadratic, squeeze_generator};
use super::eigen::sym_eigen;
use super::propagate::{Lanczos, PropagationMethod, Propagator, DENSE_LIMIT};
use super::{FockBasisSpec, FockOperator, FockVector};
use crate::error::{require, Error, Result};
use crate::gaussian::{effective_hamiltonian, DickeParams};
use crate::generators::{LocalGenerator, ParameterChoice};

/// Relative finite-difference step used by the oracles.
pub const FD_STEP: f64 = 1e-5;
const RESIDUAL_LIMIT: f64 = 1e-9;
const RICHARDSON_WARN: f64 = 1e-3;

/// Fidelity-based QFI estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityQfi {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// Distance between the extrapolated and the finer raw estimate.
    pub error: f64,
}

fn aligned(psi0: &FockVector, psi: FockVector) -> FockVector {
    let ov = psi0.inner(&psi);
    if ov.norm() == 0.0 {
        return psi;
    }
    let ph = ov.conj() / ov.norm();
    FockVector {
        amps: psi.amps.into_iter().map(|a| a * ph).collect(),
    }
}

fn fd_qfi(psi0: &FockVector, plus: FockVector, minus: FockVector, h: f64) -> f64 {
    let plus = aligned(psi0, plus.normalized());
    let minus = aligned(psi0, minus.normalized());
    let d = FockVector {
        amps: plus.amps.iter().zip(&minus.amps).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
    };
    4.0 * (d.inner(&d).re - psi0.inner(&d).norm_sqr())
}

/// Pure-state QFI `4(⟨∂ψ|∂ψ⟩ - |⟨ψ|∂ψ⟩|²)` of `family` at `lam0`, by
/// phase-aligned central differences with steps `dlam` and `dlam/2` and one
/// Richardson extrapolation.
pub fn qfi_fidelity<F>(family: F, lam0: f64, dlam: f64) -> Result<FidelityQfi>
where
    F: Fn(f64) -> Result<FockVector>,
{
    require(dlam.is_finite() && dlam > 0.0, "dlam", dlam, "must be > 0")?;
    let psi0 = family(lam0)?.normalized();
    let coarse = fd_qfi(&psi0, family(lam0 + dlam)?, family(lam0 - dlam)?, dlam);
    let h = 0.5 * dlam;
    let fine = fd_qfi(&psi0, family(lam0 + h)?, family(lam0 - h)?, h);
    let value = (4.0 * fine - coarse) / 3.0;
    let error = (value - fine).abs();
    if error > RICHARDSON_WARN * value.abs() {
        warn!("fidelity QFI at lambda = {lam0}: Richardson error {error:.3e} exceeds 1e-3 of {value:.6e}");
    }
    Ok(FidelityQfi { value, error })
}

/// Ground-state QFI `4 Σ_{n≠0} |⟨n|∂H|0⟩|² / (E_n - E_0)²` with `∂H` from
/// central differences of the matrix entries.
pub fn qfi_spectral<F>(family: F, lam0: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<FockOperator>,
{
    let h0 = family(lam0)?;
    h0.check_hermitian()?;
    if !h0.is_real() || h0.dim() > DENSE_LIMIT {
        return Err(Error::DimensionTooLarge {
            dim: h0.dim(),
            cap: DENSE_LIMIT,
        });
    }
    let step = if lam0 == 0.0 { FD_STEP } else { lam0.abs() * FD_STEP };
    let dh = family(lam0 + step)?.combine(0.5 / step, &family(lam0 - step)?, -0.5 / step);
    let eig = sym_eigen(&h0.to_dense_real())?;
    let e0 = eig.values[0];
    let width = eig.values[eig.values.len() - 1] - e0;
    let gap = eig.values[1] - e0;
    if gap <= 1e-8 * width {
        return Err(Error::Degenerate { gap, width });
    }
    let g0 = FockVector {
        amps: eig.vectors.column(0).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    let dpsi = dh.apply(&g0);
    let dre = nalgebra::DVector::from_iterator(dpsi.dim(), dpsi.amps.iter().map(|a| a.re));
    let proj = eig.vectors.tr_mul(&dre);
    let sum: f64 = (1..eig.values.len()).map(|n| (proj[n] / (eig.values[n] - e0)).powi(2)).sum();
    Ok(4.0 * sum)
}

/// Lowest eigenpair.
pub fn ground_state(h: &FockOperator) -> Result<(f64, FockVector)> {
    ground_state_with(h, PropagationMethod::Auto)
}

/// Lowest eigenpair; `Dense` diagonalizes, `Krylov` runs restarted Lanczos.
pub fn ground_state_with(h: &FockOperator, method: PropagationMethod) -> Result<(f64, FockVector)> {
    h.check_hermitian()?;
    let dense = match method {
        PropagationMethod::Auto => h.is_real() && h.dim() <= DENSE_LIMIT,
        PropagationMethod::Dense => true,
        PropagationMethod::Krylov => false,
    };
    let (e, v) = if dense {
        let eig = sym_eigen(&h.to_dense_real())?;
        let v = FockVector {
            amps: eig.vectors.column(0).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        (eig.values[0], v)
    } else {
        lanczos_ground_state(h)?
    };
    let r = residual(h, e, &v);
    if r >= RESIDUAL_LIMIT {
        return Err(Error::NotConverged {
            what: "ground state",
            residual: r,
        });
    }
    Ok((e, v))
}

fn residual(h: &FockOperator, e: f64, v: &FockVector) -> f64 {
    let hv = h.apply(v);
    hv.amps
        .iter()
        .zip(&v.amps)
        .map(|(a, b)| (a - b * e).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

const LANCZOS_DIM: usize = 80;
const LANCZOS_RESTARTS: usize = 400;

fn lanczos_ground_state(h: &FockOperator) -> Result<(f64, FockVector)> {
    // deterministic, generic start vector
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut v: Vec<Complex64> = (0..h.dim())
        .map(|_| {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            Complex64::new((seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5, 0.0)
        })
        .collect();
    let mut best = (f64::INFINITY, f64::INFINITY, FockVector { amps: v.clone() });
    for _ in 0..LANCZOS_RESTARTS {
        let lz = Lanczos::build(h, &v, LANCZOS_DIM);
        let eig = sym_eigen(&lz.tridiagonal())?;
        let y: Vec<Complex64> = eig.vectors.column(0).iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let cand = FockVector {
            amps: lz.combine(&y, 1.0),
        }
        .normalized();
        let e = h.expectation(&cand);
        let r = residual(h, e, &cand);
        if r < best.1 {
            best = (e, r, cand.clone());
        }
        if r < 0.1 * RESIDUAL_LIMIT {
            break;
        }
        v = cand.amps;
    }
    Ok((best.0, best.2))
}

/// Squeezed Fock state `exp(-iξ(XP + PX)/2)|n⟩` on photon levels
/// `0..=cutoff`; its `X` variance is scaled by `e^{2ξ}`.
pub fn squeezed_state(cutoff: usize, xi: f64, n: usize) -> Result<FockVector> {
    let basis = FockBasisSpec::photon_only(cutoff);
    require(n <= cutoff, "n", n as f64, "must not exceed the cutoff")?;
    let k = squeeze_generator(cutoff)?;
    let v = Propagator::new(&k, PropagationMethod::Krylov)?.evolve(&FockVector::basis_state(&basis, n, 0), xi)?;
    v.check_tail(&basis)?;
    Ok(v)
}

/// QFI of the vacuum quench computed on the truncated effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchQfi {
    pub value: f64,
    pub error: f64,
    /// Cutoff at which the tail test first passed.
    pub cutoff: usize,
    pub tail: f64,
}

/// Fidelity QFI of `λ ↦ exp(-i H_eff(λ) t)|0⟩`, doubling the cutoff from
/// `start` until the tail test passes or `max` is exceeded.
pub fn qfi_quench_effective(
    p: &DickeParams,
    lam: ParameterChoice,
    t: f64,
    start: usize,
    max: usize,
    method: PropagationMethod,
) -> Result<QuenchQfi> {
    let lam0 = lam.value(p);
    require(lam0 > 0.0, "lambda", lam0, "finite differences need a positive parameter value")?;
    let mut cutoff = start.max(1);
    let mut last = None;
    while cutoff <= max {
        let basis = FockBasisSpec::photon_only(cutoff);
        let run = |l: f64| -> Result<FockVector> {
            let h = build_effective(&lam.set(p, l)?, &basis)?;
            let v = Propagator::new(&h, method)?.evolve(&FockVector::ground_product(&basis), t)?;
            v.check_tail(&basis)?;
            Ok(v)
        };
        match run(lam0) {
            Ok(v) => {
                let tail = v.tail(&basis);
                let q = qfi_fidelity(run, lam0, lam0 * FD_STEP)?;
                return Ok(QuenchQfi {
                    value: q.value,
                    error: q.error,
                    cutoff,
                    tail,
                });
            }
            Err(e @ Error::CutoffInsufficient { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        cutoff *= 2;
    }
    Err(last.unwrap_or(Error::CutoffInsufficient {
        cutoff: max,
        tail: f64::NAN,
        limit: super::TAIL_LIMIT,
    }))
}

/// Local generator read off from `G = i U†(∂_λ U)` on the truncated photon
/// space, with `∂_λ U` from central differences of `exp(-i H(λ) t)`.
///
/// Uses `⟨1|G|1⟩ - ⟨0|G|0⟩ = a_xx + a_pp`, `⟨2|G|0⟩ = √2 ((a_xx - a_pp)/2 + i a_xp)`.
pub fn generator_matrix_oracle(p: &DickeParams, lam: ParameterChoice, t: f64, cutoff: usize) -> Result<LocalGenerator> {
    let basis = FockBasisSpec::photon_only(cutoff);
    let lam0 = lam.value(p);
    require(lam0 > 0.0, "lambda", lam0, "finite differences need a positive parameter value")?;
    let step = lam0 * FD_STEP;
    let build = |l: f64| -> Result<FockOperator> { build_quadratic(&effective_hamiltonian(&lam.set(p, l)?), cutoff) };
    let (hp, hm, h0) = (build(lam0 + step)?, build(lam0 - step)?, build(lam0)?);
    let (up, um, u0) = (
        Propagator::new(&hp, PropagationMethod::Auto)?,
        Propagator::new(&hm, PropagationMethod::Auto)?,
        Propagator::new(&h0, PropagationMethod::Auto)?,
    );
    let mut col = Vec::new();
    for n in 0..2 {
        let e = FockVector::basis_state(&basis, n, 0);
        let fwd = u0.evolve(&e, t)?;
        fwd.check_tail(&basis)?;
        let a = u0.evolve(&up.evolve(&e, t)?, -t)?;
        let b = u0.evolve(&um.evolve(&e, t)?, -t)?;
        let g: Vec<Complex64> = a
            .amps
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| Complex64::new(0.0, 1.0) * (x - y) / (2.0 * step))
            .collect();
        col.push(g);
    }
    let g00 = col[0][0].re;
    let g11 = col[1][1].re;
    let g20 = col[0][2];
    let sum = g11 - g00;
    let diff = std::f64::consts::SQRT_2 * g20.re;
    Ok(LocalGenerator {
        a_xx: 0.5 * (sum + diff),
        a_pp: 0.5 * (sum - diff),
        a_xp: g20.im / std::f64::consts::SQRT_2,
        a_0: g00 - 0.5 * sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_dicke;
    use crate::gaussian::squeezing_parameter;
    use crate::generators::{local_generator, qfi_eigenstate};

    #[test]
    fn constant_family_has_zero_qfi() {
        let b = FockBasisSpec::photon_only(5);
        let q = qfi_fidelity(|_| Ok(FockVector::basis_state(&b, 2, 0)), 1.0, 1e-5).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn phase_family_is_gauge_invariant() {
        // a global phase depending on λ carries no information
        let b = FockBasisSpec::photon_only(3);
        let q = qfi_fidelity(
            |l| {
                let mut v = FockVector::basis_state(&b, 1, 0);
                v.amps[1] = Complex64::from_polar(1.0, 40.0 * l);
                Ok(v)
            },
            0.3,
            1e-5,
        )
        .unwrap();
        assert!(q.value.abs() < 1e-8);
    }

    #[test]
    fn squeezed_vacuum_family_matches_eigenstate_formula() {
        let p = DickeParams::from_coupling_ratio(1.0, 1.0, 0.7, 1).unwrap();
        for n in [0usize, 1] {
            let family = |w: f64| {
                let q = DickeParams { omega: w, ..p };
                squeezed_state(80, squeezing_parameter(&q)?, n)
            };
            let q = qfi_fidelity(family, 1.0, 1e-5).unwrap();
            let expect = qfi_eigenstate(&p, n as u32, ParameterChoice::Omega).unwrap();
            assert!((q.value / expect - 1.0).abs() < 1e-6, "{n}: {} vs {expect}", q.value);
        }
    }

    #[test]
    fn spectral_zero_when_commuting() {
        let q = qfi_spectral(
            |w| {
                let p = DickeParams::new(w, 1.0, 0.0, 1)?;
                build_dicke(&p, &FockBasisSpec::new(8, 1)?)
            },
            1.0,
        )
        .unwrap();
        assert!(q.abs() < 1e-20);
    }

    #[test]
    fn ground_state_decoupled() {
        let p = DickeParams::new(1.0, 2.0, 0.0, 3).unwrap();
        let b = FockBasisSpec::new(6, 3).unwrap();
        let h = build_dicke(&p, &b).unwrap();
        for m in [PropagationMethod::Dense, PropagationMethod::Krylov] {
            let (e, v) = ground_state_with(&h, m).unwrap();
            assert!((e + 3.0).abs() < 1e-10);
            assert!((v.amps[0].norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn generator_oracle_reproduces_analytic_generator() {
        let p = DickeParams::from_coupling_ratio(1.0, 1.0, 0.8, 1).unwrap();
        for lam in ParameterChoice::ALL {
            let a = local_generator(&p, lam, 1.0);
            let b = generator_matrix_oracle(&p, lam, 1.0, 60).unwrap();
            for (x, y) in [(a.a_xx, b.a_xx), (a.a_pp, b.a_pp), (a.a_xp, b.a_xp)] {
                assert!((x - y).abs() < 1e-6 * a.a_xx.abs().max(1.0), "{lam}: {a:?} {b:?}");
            }
            assert!(b.a_0.abs() < 1e-6);
        }
    }

    #[test]
    fn quench_tail_gate_fails_with_tiny_cutoff() {
        let p = DickeParams::from_coupling_ratio(1.0, 1.0, 2f64.sqrt(), 1).unwrap();
        let r = qfi_quench_effective(&p, ParameterChoice::Omega, 3.0, 5, 5, PropagationMethod::Auto);
        assert!(matches!(r, Err(Error::CutoffInsufficient { .. })));
    }
}
