//! Shared numerical utilities: compensated and deterministic summation, quadrature rules.

pub mod quad;
pub mod sum;
