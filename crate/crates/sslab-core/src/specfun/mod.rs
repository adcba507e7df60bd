//! Complex special functions with independent evaluation paths.

pub mod bessel;
pub mod gamma;
pub mod hyp2f1;
pub mod incgamma;
pub mod mb;
pub mod whittaker;
pub mod zeta;

pub use bessel::{bessel_k, bessel_k_scaled};
pub use gamma::{gamma, log_gamma, rgamma};
pub use hyp2f1::{gauss_2f1, gauss_2f1_mb, gauss_2f1_regularized};
pub use incgamma::upper_incomplete_gamma;
pub use whittaker::{whittaker_w, whittaker_w_flagged, whittaker_w_scaled};
pub use zeta::{completed_zeta, zeta};
