//! Numerical kernels for triple shifted sums of automorphic L-functions.
//!
//! The crate is organised in layers:
//!
//! * [`specfun`] — complex special functions (log-gamma, zeta, K-Bessel,
//!   Whittaker W, Gauss 2F1, incomplete gamma) and a Mellin–Barnes contour engine.
//! * [`modforms`] — holomorphic eigenform coefficients, Maass form ingestion,
//!   Eisenstein and Poincaré series, Petersson inner products.
//! * [`mfunction`] — the M-function in its quadrature, closed, and contour
//!   representations, residues, and the Lemma 2.2.5 gap function.
//! * [`shifted_sums`] — shifted convolution Dirichlet series and spectral checks.
//! * [`triplesum`] — the smoothed triple shifted sum and its asymptotic fit.
//!
//! All numerics are binary64 with compensated summation; every operation is a
//! pure function of its inputs and an immutable [`PrecisionConfig`].

pub mod error;
pub mod mfunction;
pub mod modforms;
pub mod precision;
pub mod shifted_sums;
pub mod specfun;
pub mod triplesum;
pub mod util;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use precision::PrecisionConfig;
