//! Sparse polynomials in up to three variables with rational coefficients.

mod bipoly;
mod multi;
mod parse;

pub use bipoly::{BiPoly, LinearMap};
pub use multi::{gcd, resultant, squarefree_part, Mono, Poly, PolyError};
pub use parse::{parse_poly, ParseError};
