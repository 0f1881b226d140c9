//! Branches of plane curve germs by Newton polygons, with exact truncated
//! parametrizations and orders of composed functions along them.

mod expand;
mod newton;
mod series;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Elem, Field, FieldError};
use crate::poly::LinearMap;

pub use expand::{
    branch_residual, check_multiplicity_sum, compose_on_branch, expand_branches, expand_at,
    PuiseuxBranch,
};
pub use newton::{newton_polygon_rational, NewtonPolygon, Segment};
pub use series::{count_vanishing_solutions, eval_poly, rat_series, Alpha, LaurentSeries, SeriesError, EXACT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PuiseuxError {
    #[error("the curve does not pass through the center")]
    NotThroughCenter,
    #[error("the zero polynomial has no branches")]
    ZeroPolynomial,
    #[error("expansion does not terminate; the curve is not reduced")]
    NotSquarefree,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("branch residual does not vanish below order {0}")]
    Residual(i64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Coordinate chart of the projective plane `[X:Y:Z]`, with `Z = 0` the
/// line at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    /// `Z = 1`, local coordinates `(x - a, y - b)`.
    #[serde(rename = "affine")]
    Affine,
    /// `Y = 1`, local coordinates `(Z/Y, X/Y - a)`.
    #[serde(rename = "y=1")]
    InfinityY,
    /// `X = 1`, local coordinates `(Z/X, Y/X - a)`.
    #[serde(rename = "x=1")]
    InfinityX,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Affine => "affine",
            Chart::InfinityY => "y=1",
            Chart::InfinityX => "x=1",
        })
    }
}

/// A point in one chart, with coordinates in a tower field.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    pub chart: Chart,
    pub field: Field,
    /// Affine: `x`. At infinity: the finite chart coordinate of the point.
    pub a: Elem,
    /// Affine: `y`. Unused at infinity (zero).
    pub b: Elem,
}

impl ChartPoint {
    pub fn affine(field: &Field, x: Elem, y: Elem) -> Self {
        ChartPoint {
            chart: Chart::Affine,
            field: field.clone(),
            a: x,
            b: y,
        }
    }

    pub fn at_infinity(chart: Chart, field: &Field, a: Elem) -> Self {
        assert_ne!(chart, Chart::Affine);
        ChartPoint {
            chart,
            field: field.clone(),
            a,
            b: field.zero(),
        }
    }

    /// The affine map sending local coordinates to the variables of a
    /// polynomial on this chart: `(x, y)` when affine, `(X, Y, Z)` at
    /// infinity.
    pub fn local_map(&self) -> LinearMap {
        let k = &self.field;
        let (o, z) = (k.one(), k.zero());
        let exprs = match self.chart {
            Chart::Affine => return LinearMap::translate(k, &self.a, &self.b),
            Chart::InfinityY => vec![
                [self.a.clone(), z.clone(), o.clone()],
                [o.clone(), z.clone(), z.clone()],
                [z.clone(), o, z],
            ],
            Chart::InfinityX => vec![
                [o.clone(), z.clone(), z.clone()],
                [self.a.clone(), z.clone(), o.clone()],
                [z.clone(), o, z],
            ],
        };
        LinearMap {
            field: k.clone(),
            exprs,
        }
    }

    /// Homogeneous coordinates `[X:Y:Z]` of the point (`Z = 1` when affine).
    pub fn projective(&self) -> [Elem; 3] {
        let k = &self.field;
        match self.chart {
            Chart::Affine => [self.a.clone(), self.b.clone(), k.one()],
            Chart::InfinityY => [self.a.clone(), k.one(), k.zero()],
            Chart::InfinityX => [k.one(), self.a.clone(), k.zero()],
        }
    }
}
