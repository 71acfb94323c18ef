//! Quantum Fisher information and Cramér–Rao bounds for single-mode Gaussian
//! states.
//!
//! Units have `ħ = 2`: the vacuum covariance matrix is the identity and a
//! coherent state `|α⟩` with real `α` has mean `(2α, 0)`.
//!
//! The analytic engine ([`qfi`]) works on a state and the derivative of its
//! first and second moments. [`families`] supplies hand-derived derivatives
//! and closed forms for the standard one-parameter families, and
//! [`fd_oracle`] checks them against finite differences of the fidelity.

// Domain checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod fd_oracle;
pub mod fidelity;
pub mod gaussian;
pub mod optimize;
pub mod qfi;
pub mod scaling;

pub use error::{Error, Result};
pub use families::{derivatives_wrt, Family, FamilyPoint, LossBase, ParamFamily};
pub use fidelity::{bures_distance, fidelity};
pub use gaussian::{
    apply_loss, apply_loss_general, from_params, is_physical, purity, wigner, CovMat,
    GaussianState, QuadVec, StateParams,
};
pub use qfi::{
    crb_matrix, crb_single, qfi_matrix, qfi_single, CovarianceBound, FisherMatrix,
    StateDerivative,
};
