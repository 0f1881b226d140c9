//! Exact arithmetic: algebraic extension towers, dense univariate
//! polynomials over them, and univariate factorization.

pub mod factor;
pub mod factor_q;
pub mod field;
pub mod upoly;

pub use field::{Elem, Field, FieldError};
pub use upoly::UPoly;
