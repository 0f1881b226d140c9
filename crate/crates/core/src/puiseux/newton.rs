use rug::Rational;

use crate::arith::{upoly, Field, UPoly};
use crate::poly::BiPoly;

use super::PuiseuxError;

/// One edge of the lower Newton polygon, for roots `y ~ c·x^(q/p)`.
#[derive(Clone, Debug)]
pub struct Segment {
    /// The exponent `q/p` of the roots the edge governs.
    pub slope: Rational,
    pub p: u32,
    pub q: u32,
    /// Lattice length, equal to the degree of the edge polynomial.
    pub length: u32,
    /// `Φ(T) = Σ a_ij T^((j - j_low)/p)` over the lattice points of the edge.
    pub edge_poly: UPoly,
    /// Common value of `p·i + q·j` along the edge.
    pub value: u32,
}

/// Lower Newton polygon of a curve germ at the origin.
///
/// Coordinate axes contained in the curve are reported separately: they
/// carry no edge of finite positive slope.
#[derive(Clone, Debug)]
pub struct NewtonPolygon {
    /// `x = 0` is a component.
    pub contains_y_axis: bool,
    /// `y = 0` is a component.
    pub contains_x_axis: bool,
    /// Edges in order of strictly decreasing slope.
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    pub fn of(f: &BiPoly) -> Result<Self, PuiseuxError> {
        if f.is_zero() {
            return Err(PuiseuxError::ZeroPolynomial);
        }
        let k = f.field();
        if !k.is_zero(&f.coeff(0, 0)) {
            return Err(PuiseuxError::NotThroughCenter);
        }
        let xv = f.x_valuation().unwrap();
        let yv = f.y_valuation().unwrap();
        let g = f.divide_monomial(xv, yv);
        Ok(NewtonPolygon {
            contains_y_axis: xv > 0,
            contains_x_axis: yv > 0,
            segments: lower_edges(&g),
        })
    }

    /// Sum of the edge heights; the number of roots `y(x) → 0` off the axes.
    pub fn height(&self) -> u32 {
        self.segments.iter().map(|s| s.length * s.p).sum()
    }
}

/// Edges of the lower hull between `(0, m)` and `(i0, 0)` for a polynomial
/// divisible by neither `x` nor `y`.
pub(crate) fn lower_edges(g: &BiPoly) -> Vec<Segment> {
    let k = g.field();
    let m = g.at_x_zero().iter().take_while(|c| k.is_zero(c)).count() as u32;
    if m == 0 {
        return Vec::new();
    }
    // least x-exponent on each row j <= m
    let mut row_min: Vec<Option<u32>> = vec![None; m as usize + 1];
    for (&(i, j), _) in g.terms() {
        if j <= m {
            let slot = &mut row_min[j as usize];
            *slot = Some(slot.map_or(i, |v: u32| v.min(i)));
        }
    }
    let mut segments = Vec::new();
    let (mut ic, mut jc) = (0u32, m);
    while jc > 0 {
        // next vertex: minimal (i - ic)/(jc - j), ties to the smallest j
        let mut best: Option<(u32, u32)> = None;
        for j in 0..jc {
            let Some(i) = row_min[j as usize] else { continue };
            best = match best {
                None => Some((i, j)),
                Some((bi, bj)) => {
                    let lhs = (i as i64 - ic as i64) * (jc - bj) as i64;
                    let rhs = (bi as i64 - ic as i64) * (jc - j) as i64;
                    if lhs < rhs {
                        Some((i, j))
                    } else {
                        Some((bi, bj))
                    }
                }
            };
        }
        let (ni, nj) = best.expect("row 0 is occupied");
        let slope = Rational::from(((ni - ic) as i64, (jc - nj) as i64));
        let q = slope.numer().to_u32().unwrap();
        let p = slope.denom().to_u32().unwrap();
        let value = p * ic + q * jc;
        let length = (jc - nj) / p;
        let mut edge_poly: UPoly = vec![k.zero(); length as usize + 1];
        for (&(i, j), c) in g.terms() {
            if p * i + q * j == value && j >= nj && j <= jc {
                edge_poly[((j - nj) / p) as usize] = c.clone();
            }
        }
        segments.push(Segment {
            slope,
            p,
            q,
            length,
            edge_poly: upoly::trim(k, edge_poly),
            value,
        });
        ic = ni;
        jc = nj;
    }
    segments.reverse();
    segments
}

pub fn newton_polygon_rational(f: &crate::poly::Poly) -> Result<NewtonPolygon, PuiseuxError> {
    let q = Field::rationals();
    let map = crate::poly::LinearMap::translate(&q, &q.zero(), &q.zero());
    NewtonPolygon::of(&BiPoly::from_poly(f, &map))
}
