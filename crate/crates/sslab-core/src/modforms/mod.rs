//! Automorphic objects: holomorphic eigenform coefficients, Maass form data,
//! Eisenstein and Poincaré series, and Petersson inner products.

pub mod coeffs;
pub mod eisenstein;
pub mod holo;
pub mod maass;
pub mod petersson;

pub use coeffs::{divisor_sigma, divisor_sigma_table, eigenform_coefficients, num_divisors, CoefficientTable, SUPPORTED_WEIGHTS};
pub use eisenstein::{eisenstein_k_eval, eisenstein_lattice_eval, poincare_lattice_eval, Completion, EisensteinParams, EisensteinSeries, PoincareSeries};
pub use holo::{holo_eval, HoloForm, VProduct};
pub use maass::{maass_eval, maass_load, maass_load_dir, maass_parse, maass_validate, maass_write, MaassFormData, Parity};
pub use petersson::{petersson_inner, Automorphic, FnForm, Product};
