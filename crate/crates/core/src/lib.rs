//! Tensor algebra under the t-product, robust tensor PCA by convex
//! low-tubal-rank plus sparse decomposition, and deterministic recovery
//! certificates for it.

pub mod certify;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod io;
pub mod linalg;
pub mod solver;
pub mod tangent;
pub mod tensor;
pub mod tproduct;
pub mod tsvd;

pub use error::{Error, Result};
pub use fourier::{dft_mode3, idft_mode3, FourierSlices};
pub use solver::{rtpca, GammaChoice, Penalty, SolverConfig, SolverResult};
pub use tangent::{SupportMask, TangentBasis};
pub use tensor::{basis, inner, BasisKind, Dims, NormKind, Tensor3, TensorBasis};
pub use tproduct::{bcirc, fold, tprod, unfold};
pub use tsvd::{tsvd_skinny, TSvdFactors};
