//! Reference engine in a truncated number basis.
//!
//! States are built from the operator decomposition with dense matrix
//! exponentials, fidelities come from matrix square roots and Fisher matrices
//! from symmetric logarithmic derivatives. None of it uses the phase-space
//! formulas of `qcrb-core`, which makes it an independent check on them.

pub mod error;
pub mod expm;
pub mod fidelity;
pub mod oracle;
pub mod sld;
pub mod state;

pub use error::{FockError, Result};
pub use fidelity::uhlmann_fidelity;
pub use oracle::{FockFisher, FockOracle, FockQfi};
pub use sld::{fisher_matrix_fock, sld};
pub use state::{attenuate, build_state, FockBuilder, FockDensityMatrix, C64};
