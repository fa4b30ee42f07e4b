//! Weighted Bergman kernels, projections and L^p experiments on the
//! Fock–Bargmann–Hartogs domain `D_{n,m}(μ)` with weight `(−ρ)^α`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod kernels;
pub mod lplab;
pub mod math;
pub mod projection;
pub mod quadrature;
pub mod rules;

pub use error::{Error, Result};
pub use math::C64;
