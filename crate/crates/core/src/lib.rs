//! Finite-section spectral laboratory for operators on sequence spaces.
//!
//! Everything here works on dense complex matrices viewed as truncations of
//! operators on `ℓ_p`. The crate is split along the lines of the machinery it
//! exercises:
//!
//! * [`geometry`]: exponent context, biorthogonal systems, Fourier coefficients,
//!   basis and weight constants, R-bound estimation.
//! * [`schatten`]: quasi-nuclear (σ_p) norms, `ℓ_p` operator-norm brackets,
//!   approximation numbers and the Weyl inequality.
//! * [`trace`]: the bilinear trace `Tr(A, B)` and its identities.
//! * [`resolvent`]: resolvents, the regularized determinant, Carleman-type
//!   bounds, ray scans and sector geometry.
//! * [`rootspace`]: Jordan chains, spectral projections and completeness checks.
//! * [`bvp`]: a nonlocal second-order boundary value problem with
//!   operator coefficients, discretized and analysed with the above.

pub mod bvp;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod random;
pub mod resolvent;
pub mod rootspace;
pub mod schatten;
pub mod trace;

pub use error::{Error, Result};
pub use geometry::{BiorthogonalSystem, ExponentContext, OperatorFamily, PowerWeight};
pub use linalg::{CMatrix, CVector, C64};
pub use resolvent::{ArcConfiguration, RayScan};
pub use rootspace::SpectralDecomposition;
pub use schatten::{NormBounds, OperatorMatrix};
pub use trace::AnalyticFunctionSpec;
