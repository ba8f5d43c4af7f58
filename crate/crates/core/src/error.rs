use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The requested quantity has no (real) value for these inputs.
    #[error("outside domain: {0}")]
    Domain(String),

    #[error("Hilbert-space dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("Fock cutoff {cutoff} too small: tail population {tail:.3e} exceeds {limit:.1e}")]
    CutoffInsufficient { cutoff: usize, tail: f64, limit: f64 },

    #[error("{what} did not converge (residual {residual:.3e})")]
    NotConverged { what: &'static str, residual: f64 },

    #[error("ground state is degenerate to working precision (gap {gap:.3e}, spectral width {width:.3e})")]
    Degenerate { gap: f64, width: f64 },

    #[error("operator is not Hermitian (max |H - H^dagger| = {0:.3e})")]
    NotHermitian(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
