//! Gaussian dynamics, local generators and Fisher information for quenches
//! of the Dicke model across its superradiant transition, with an exact
//! truncated Fock-space simulator to check them against.

pub mod analytic;
pub mod cavity;
pub mod error;
pub mod fisher;
pub mod fit;
pub mod fock;
pub mod gaussian;
pub mod generators;

pub use error::{Error, Result};
