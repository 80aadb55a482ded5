//! Non-stationary polyharmonic Daubechies-type wavelets.
//!
//! The crate builds the level-dependent interpolatory subdivision symbols
//! `a^[k]` for the operator `(d²/dt² − ξ²)^N`, factors them into compact
//! orthonormal refinement masks `g^[m]` with `a = ½|g|²` on the unit circle,
//! tabulates the fundamental function and the father/mother wavelets by
//! cascade, and runs an orthogonal non-stationary filter bank on signals and
//! images.
//!
//! Module map:
//!
//! * [`laurent`]: Laurent and ordinary polynomials, unit-circle evaluation,
//!   simultaneous-iteration root finding.
//! * [`symbols`]: Bezout solutions, closed-form `Q`, subdivision symbols.
//! * [`factorization`]: spectral factorization into refinement masks.
//! * [`subdivision`]: subdivision engine and cascade tabulation.
//! * [`filterbank`]: 1-D and per-frequency 2-D transforms, shrinkage.
//! * [`cli`]: the `polywave` command-line front end.

pub mod cli;
pub mod error;
pub mod factorization;
pub mod filterbank;
pub mod image;
pub mod io;
pub mod laurent;
mod linalg;
pub mod subdivision;
pub mod symbols;









pub use error::{Error, Result};
pub use factorization::{mask_family, refinement_mask, MaskBuilder, RefinementMask};
pub use filterbank::{CoefficientPyramid, FilterBankPlan, SpectralPyramid, ThresholdMode};
pub use image::ImageBuffer;
pub use laurent::{ComplexRootSet, LaurentPolynomial, RealPolynomial};
pub use subdivision::{DyadicGridFunction, SampleSequence};
pub use symbols::{FrequencyVector, SubdivisionSymbol, SymbolContext};
