//! Fisher information for estimating the separation of two unbalanced,
//! partially coherent Gaussian point sources whose spatial state is entangled
//! with a partner degree of freedom measured in a rotated basis.
//!
//! * [`numerics`]: Lambert W₀, Brent root finding and minimization, quadrature.
//! * [`model`]: source/basis types and the branch decomposition.
//! * [`fisher`]: closed-form information, its limits and the least resolvable
//!   separation.
//! * [`oracle`]: grid-based first-principles information used to check the
//!   closed forms.
//! * [`estimator`]: Monte-Carlo maximum-likelihood experiment against the
//!   Cramér–Rao bound.
//! * [`cli`]: the `fisherlens` command-line front end.

// `!(x > y)` is used deliberately so NaN inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod estimator;
pub mod fisher;
pub mod model;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{AnalyzerBasis, SourceModel};
