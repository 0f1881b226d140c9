use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{upoly, Elem, Field, UPoly};

use super::multi::Poly;

/// Polynomial in two variables `(x, y)` over a tower field, keyed by
/// exponent pairs `(i, j)` for `x^i y^j`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    field: Field,
    terms: BTreeMap<(u32, u32), Elem>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly over {:?} {{", self.field)?;
        for ((i, j), c) in &self.terms {
            write!(f, " ({i},{j}):{c:?}")?;
        }
        write!(f, " }}")
    }
}

/// Affine substitution for the variables of a [`Poly`]: variable `i` maps
/// to `c0 + c1·x + c2·y`.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub field: Field,
    pub exprs: Vec<[Elem; 3]>,
}

impl LinearMap {
    /// Translation of a plane point to the origin: `x ↦ x0 + x`, `y ↦ y0 + y`.
    pub fn translate(field: &Field, x0: &Elem, y0: &Elem) -> Self {
        LinearMap {
            field: field.clone(),
            exprs: vec![
                [x0.clone(), field.one(), field.zero()],
                [y0.clone(), field.zero(), field.one()],
            ],
        }
    }
}

impl BiPoly {
    pub fn zero(field: &Field) -> Self {
        BiPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, c: Elem) -> Self {
        let mut p = BiPoly::zero(field);
        p.add_term(0, 0, c);
        p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Elem {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Elem) {
        if self.field.is_zero(&c) {
            return;
        }
        let k = &self.field;
        match self.terms.get_mut(&(i, j)) {
            Some(v) => {
                *v = k.add(v, &c);
                if k.is_zero(v) {
                    self.terms.remove(&(i, j));
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, self.field.neg(c));
        }
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let k = &self.field;
        let mut out = BiPoly::zero(k);
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, k.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Elem) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        for (&(i, j), v) in &self.terms {
            out.add_term(i, j, self.field.mul(v, c));
        }
        out
    }

    /// Re-reads the coefficients in an extension of the current field.
    pub fn lift_to(&self, field: &Field) -> BiPoly {
        BiPoly {
            field: field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e, field.lift(&self.field, c)))
                .collect(),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    /// Largest power of `x` dividing the polynomial.
    pub fn x_valuation(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).min()
    }

    pub fn y_valuation(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).min()
    }

    /// Divides by `x^a y^b`, which must divide exactly.
    pub fn divide_monomial(&self, a: u32, b: u32) -> BiPoly {
        BiPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i - a, j - b), c.clone()))
                .collect(),
        }
    }

    /// `F(0, y)` as a univariate polynomial in `y`.
    pub fn at_x_zero(&self) -> UPoly {
        let mut out = Vec::new();
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                let j = j as usize;
                if out.len() <= j {
                    out.resize(j + 1, self.field.zero());
                }
                out[j] = c.clone();
            }
        }
        upoly::trim(&self.field, out)
    }

    /// `F(x, 0)` as a univariate polynomial in `x`.
    pub fn at_y_zero(&self) -> UPoly {
        let mut out = Vec::new();
        for (&(i, j), c) in &self.terms {
            if j == 0 {
                let i = i as usize;
                if out.len() <= i {
                    out.resize(i + 1, self.field.zero());
                }
                out[i] = c.clone();
            }
        }
        upoly::trim(&self.field, out)
    }

    /// Coefficients with respect to `y`, each a polynomial in `x`.
    pub fn coeffs_in_y(&self) -> Vec<UPoly> {
        let n = self.degree_y().map_or(0, |d| d as usize + 1);
        let mut out: Vec<UPoly> = vec![Vec::new(); n];
        for (&(i, j), c) in &self.terms {
            let row = &mut out[j as usize];
            let i = i as usize;
            if row.len() <= i {
                row.resize(i + 1, self.field.zero());
            }
            row[i] = c.clone();
        }
        out
    }

    pub fn derivative_y(&self) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                out.add_term(
                    i,
                    j - 1,
                    self.field.scale_rat(c, &rug::Rational::from(j)),
                );
            }
        }
        out
    }

    pub fn eval(&self, x: &Elem, y: &Elem) -> Elem {
        let k = &self.field;
        let mut acc = k.zero();
        for (&(i, j), c) in &self.terms {
            let t = k.mul(
                c,
                &k.mul(&k.pow(x, i as i64).unwrap(), &k.pow(y, j as i64).unwrap()),
            );
            acc = k.add(&acc, &t);
        }
        acc
    }

    /// The image of a rational polynomial under an affine substitution.
    pub fn from_poly(p: &Poly, map: &LinearMap) -> BiPoly {
        let k = &map.field;
        assert_eq!(map.exprs.len(), p.arity());
        let lin: Vec<BiPoly> = map
            .exprs
            .iter()
            .map(|[c0, c1, c2]| {
                let mut b = BiPoly::zero(k);
                b.add_term(0, 0, c0.clone());
                b.add_term(1, 0, c1.clone());
                b.add_term(0, 1, c2.clone());
                b
            })
            .collect();
        let mut powers: Vec<Vec<BiPoly>> = lin.iter().map(|l| vec![BiPoly::constant(k, k.one()), l.clone()]).collect();
        let mut out = BiPoly::zero(k);
        for (m, c) in p.terms() {
            let mut t = BiPoly::constant(k, k.from_rat(c.clone()));
            for v in 0..p.arity() {
                let e = m.0[v] as usize;
                while powers[v].len() <= e {
                    let next = powers[v].last().unwrap().mul(&lin[v]);
                    powers[v].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[v][e]);
                }
            }
            out = out.add(&t);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn translation_to_a_point() {
        let q = Field::rationals();
        let f = parse_poly("x^2 + y^2 - 2*x", &["x", "y"]).unwrap();
        // at (1, 0): (x+1)^2 + y^2 - 2(x+1) = x^2 + y^2 - 1
        let b = BiPoly::from_poly(&f, &LinearMap::translate(&q, &q.one(), &q.zero()));
        assert_eq!(b.coeff(2, 0), q.one());
        assert_eq!(b.coeff(0, 2), q.one());
        assert_eq!(b.coeff(0, 0), q.from_int(-1));
        assert_eq!(b.coeff(1, 0), q.zero());
    }

    #[test]
    fn chart_of_a_homogenization() {
        let q = Field::rationals();
        let k = q.extend("r", vec![q.from_int(-2), q.zero(), q.one()]).unwrap();
        // x - r*y homogenized, chart y = 1 around [r:1:0]: x = r + u, z = s
        let f = parse_poly("x^2 - 2*y^2 + x", &["x", "y"]).unwrap().homogenize();
        let r = k.generator();
        let map = LinearMap {
            field: k.clone(),
            exprs: vec![
                [r.clone(), k.zero(), k.one()],
                [k.one(), k.zero(), k.zero()],
                [k.zero(), k.one(), k.zero()],
            ],
        };
        let b = BiPoly::from_poly(&f, &map);
        // (r+u)^2 - 2 + (r+u) z  at origin vanishes
        assert!(k.is_zero(&b.coeff(0, 0)));
        assert_eq!(b.coeff(0, 1), k.scale_rat(&r, &rug::Rational::from(2)));
        assert_eq!(b.coeff(1, 0), r);
    }
}
