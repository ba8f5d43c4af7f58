//! Dense symmetric eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub(crate) struct SymEig {
    pub values: DVector<f64>,
    /// Eigenvectors as columns.
    pub vectors: DMatrix<f64>,
}

// nalgebra's SymmetricEigen leaves residuals near 1e-8 on a few hundred
// Fock levels, too loose for the oracles; faer stays at machine precision.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> Result<SymEig> {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NotConverged {
            what: "symmetric eigendecomposition",
            residual: f64::NAN,
        })?;
    let u = evd.U();
    let s = evd.S().column_vector();
    Ok(SymEig {
        values: DVector::from_fn(n, |i, _| s[i]),
        vectors: DMatrix::from_fn(n, n, |i, j| u[(i, j)]),
    })
}
