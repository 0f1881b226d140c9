use std::fmt;

use rug::Rational;
use thiserror::Error;

use crate::arith::{Elem, Field};
use crate::poly::Poly;

/// Truncation order of a series known exactly.
pub const EXACT: i64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series vanishes to its truncation order {0}")]
    Degenerate(i64),
    #[error("division by a series with no known nonzero coefficient")]
    ZeroDivisor,
}

/// Truncated Laurent series in one parameter `s` over a tower field.
///
/// Coefficients of exponents below `trunc` are known; `coeffs[0]` is the
/// coefficient of `s^start` and is nonzero unless no coefficient is stored.
#[derive(Clone)]
pub struct LaurentSeries {
    field: Field,
    start: i64,
    coeffs: Vec<Elem>,
    trunc: i64,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})s^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.trunc < EXACT {
            write!(f, " + O(s^{})", self.trunc)?;
        }
        Ok(())
    }
}

/// Limit of a function along a branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Finite(Elem),
    Infinite,
}

impl LaurentSeries {
    pub fn new(field: &Field, start: i64, coeffs: Vec<Elem>, trunc: i64) -> Self {
        let mut s = LaurentSeries {
            field: field.clone(),
            start,
            coeffs,
            trunc,
        };
        s.normalize();
        s
    }

    pub fn zero(field: &Field, trunc: i64) -> Self {
        LaurentSeries::new(field, trunc, Vec::new(), trunc)
    }

    pub fn constant(field: &Field, c: Elem) -> Self {
        LaurentSeries::new(field, 0, vec![c], EXACT)
    }

    pub fn monomial(field: &Field, c: Elem, e: i64) -> Self {
        LaurentSeries::new(field, e, vec![c], EXACT)
    }

    fn normalize(&mut self) {
        let k = &self.field;
        let avail = (self.trunc - self.start).max(0) as usize;
        self.coeffs.truncate(avail);
        while self.coeffs.last().is_some_and(|c| k.is_zero(c)) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| k.is_zero(c)).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.start = self.trunc;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc >= EXACT
    }

    /// Order of vanishing, when some known coefficient is nonzero.
    pub fn order(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Lower bound for the order: the order if certified, else the truncation.
    fn order_bound(&self) -> i64 {
        self.order().unwrap_or(self.trunc)
    }

    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> Elem {
        if e < self.start || e >= self.start + self.coeffs.len() as i64 {
            self.field.zero()
        } else {
            self.coeffs[(e - self.start) as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Option<&Elem> {
        self.coeffs.first()
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Elem)> {
        let k = &self.field;
        self.coeffs
            .iter()
            .enumerate()
            .filter(move |(_, c)| !k.is_zero(c))
            .map(move |(i, c)| (self.start + i as i64, c))
    }

    pub fn truncate(&self, n: i64) -> Self {
        let mut out = self.clone();
        out.trunc = out.trunc.min(n);
        out.normalize();
        out
    }

    pub fn lift_to(&self, field: &Field) -> Self {
        LaurentSeries {
            field: field.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| field.lift(&self.field, c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let k = &self.field;
        let trunc = self.trunc.min(other.trunc);
        let lo = self.order_bound().min(other.order_bound()).min(trunc);
        let hi = [self, other]
            .iter()
            .filter(|s| !s.coeffs.is_empty())
            .map(|s| s.start + s.coeffs.len() as i64)
            .max()
            .unwrap_or(lo)
            .min(trunc);
        let coeffs = (lo..hi.max(lo))
            .map(|e| {
                let b = other.coeff(e);
                if negate {
                    k.sub(&self.coeff(e), &b)
                } else {
                    k.add(&self.coeff(e), &b)
                }
            })
            .collect();
        LaurentSeries::new(k, lo, coeffs, trunc)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            field: self.field.clone(),
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| self.field.neg(c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &Elem) -> Self {
        let k = &self.field;
        LaurentSeries::new(
            k,
            self.start,
            self.coeffs.iter().map(|x| k.mul(x, c)).collect(),
            self.trunc,
        )
    }

    /// Multiplies by `s^e`.
    pub fn shift(&self, e: i64) -> Self {
        LaurentSeries {
            field: self.field.clone(),
            start: self.start + e,
            coeffs: self.coeffs.clone(),
            trunc: if self.is_exact() { EXACT } else { self.trunc + e },
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = &self.field;
        let oa = self.order_bound();
        let ob = other.order_bound();
        let trunc = sat_add(oa, other.trunc).min(sat_add(ob, self.trunc));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return LaurentSeries::zero(k, trunc);
        }
        let start = oa + ob;
        let len = ((self.coeffs.len() + other.coeffs.len() - 1) as i64).min(trunc - start);
        if len <= 0 {
            return LaurentSeries::zero(k, trunc);
        }
        let len = len as usize;
        let mut out = vec![k.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if k.is_zero(b) {
                    continue;
                }
                out[i + j] = k.add(&out[i + j], &k.mul(a, b));
            }
        }
        LaurentSeries::new(k, start, out, trunc)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentSeries::constant(&self.field, self.field.one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse. An exact series that is not a monomial has
    /// an infinite expansion, cut at `max_terms` terms.
    pub fn inv(&self, max_terms: usize) -> Result<Self, SeriesError> {
        let k = &self.field;
        let Some(lead) = self.coeffs.first() else {
            return Err(SeriesError::ZeroDivisor);
        };
        let o = self.start;
        let linv = k.inv(lead).expect("nonzero leading coefficient");
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(LaurentSeries::monomial(k, linv, -o));
        }
        let rel = if self.is_exact() {
            max_terms as i64
        } else {
            (self.trunc - o).min(max_terms as i64)
        };
        let n = rel as usize;
        let mut b: Vec<Elem> = Vec::with_capacity(n);
        b.push(linv.clone());
        for m in 1..n {
            let mut acc = k.zero();
            for i in 1..=m.min(self.coeffs.len() - 1) {
                if k.is_zero(&self.coeffs[i]) {
                    continue;
                }
                acc = k.add(&acc, &k.mul(&self.coeffs[i], &b[m - i]));
            }
            b.push(k.neg(&k.mul(&acc, &linv)));
        }
        Ok(LaurentSeries::new(k, -o, b, -o + rel))
    }

    pub fn div(&self, other: &Self, max_terms: usize) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inv(max_terms)?))
    }

    /// Limit value and order after subtracting it: `(∞, ord)` for negative
    /// order, `(c0, ord(series - c0))` otherwise.
    pub fn order_after_limit(&self) -> Result<(Alpha, i64), SeriesError> {
        let Some(o) = self.order() else {
            return Err(SeriesError::Degenerate(self.trunc));
        };
        if o < 0 {
            return Ok((Alpha::Infinite, o));
        }
        if o > 0 {
            return Ok((Alpha::Finite(self.field.zero()), o));
        }
        let c0 = self.coeffs[0].clone();
        let rest = self.sub(&LaurentSeries::constant(&self.field, c0.clone()));
        match rest.order() {
            Some(r) => Ok((Alpha::Finite(c0), r)),
            None => Err(SeriesError::Degenerate(self.trunc)),
        }
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

/// Evaluates a rational polynomial at series arguments.
pub fn eval_poly(p: &Poly, args: &[LaurentSeries]) -> LaurentSeries {
    assert_eq!(p.arity(), args.len());
    let k = args[0].field().clone();
    let mut powers: Vec<Vec<LaurentSeries>> = args
        .iter()
        .map(|a| vec![LaurentSeries::constant(&k, k.one()), a.clone()])
        .collect();
    let mut acc = LaurentSeries::zero(&k, EXACT);
    for (m, c) in p.terms() {
        let mut t = LaurentSeries::constant(&k, k.from_rat(c.clone()));
        for (v, pw) in powers.iter_mut().enumerate() {
            let e = m.0[v] as usize;
            while pw.len() <= e {
                let next = pw.last().unwrap().mul(&args[v]);
                pw.push(next);
            }
            if e > 0 {
                t = t.mul(&pw[e]);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// Number of solutions of `g - t·h = 0` tending to the origin as `t → 0`,
/// given the orders of `g` and `h`.
pub fn count_vanishing_solutions(g_order: i64, h_order: i64) -> u64 {
    if g_order >= h_order {
        (g_order - h_order) as u64
    } else {
        0
    }
}

/// Rational helper used by tests and callers that build series by hand.
pub fn rat_series(field: &Field, start: i64, coeffs: &[Rational], trunc: i64) -> LaurentSeries {
    LaurentSeries::new(
        field,
        start,
        coeffs.iter().map(|c| field.from_rat(c.clone())).collect(),
        trunc,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn truncation_propagates_through_products() {
        let k = q();
        // a = s + O(s^4), b = s^-1 + 2 + O(s^2)
        let a = rat_series(&k, 1, &[r(1, 1)], 4);
        let b = rat_series(&k, -1, &[r(1, 1), r(2, 1)], 2);
        let c = a.mul(&b);
        assert_eq!(c.truncation(), 3);
        assert_eq!(c.order(), Some(0));
        assert_eq!(c.coeff(1), k.from_int(2));
    }

    #[test]
    fn composition_golden() {
        let k = q();
        // x = s, y = s/2 - 1/(2s)
        let x = LaurentSeries::monomial(&k, k.one(), 1);
        let y = rat_series(&k, -1, &[r(-1, 2), r(0, 1), r(1, 2)], EXACT);
        let f = crate::poly::parse_poly("x + x^2*y", &["x", "y"]).unwrap();
        let l = crate::poly::parse_poly("x + y", &["x", "y"]).unwrap();
        let fs = eval_poly(&f, &[x.clone(), y.clone()]);
        assert_eq!(fs.order(), Some(1));
        assert_eq!(fs.coeff(1), k.from_rat(r(1, 2)));
        assert_eq!(fs.coeff(3), k.from_rat(r(1, 2)));
        assert_eq!(fs.order_after_limit().unwrap(), (Alpha::Finite(k.zero()), 1));
        let ls = eval_poly(&l, &[x, y]);
        assert_eq!(ls.order(), Some(-1));
        assert_eq!(ls.coeff(1), k.from_rat(r(3, 2)));
        assert_eq!(ls.order_after_limit().unwrap().0, Alpha::Infinite);
    }

    #[test]
    fn constant_is_degenerate() {
        let k = q();
        let c = LaurentSeries::constant(&k, k.from_int(5));
        assert!(matches!(c.order_after_limit(), Err(SeriesError::Degenerate(_))));
        let g = LaurentSeries::constant(&k, k.one());
        assert_eq!(g.order(), Some(0));
    }

    #[test]
    fn inverse_round_trip() {
        let k = q();
        let a = rat_series(&k, -2, &[r(2, 1), r(1, 1), r(-3, 1)], 5);
        let b = a.inv(100).unwrap();
        let one = a.mul(&b);
        assert_eq!(one.order(), Some(0));
        for e in 1..one.truncation() {
            assert!(k.is_zero(&one.coeff(e)), "coefficient {e}");
        }
        assert!(one.truncation() >= 5);
    }

    #[test]
    fn lemma_counts() {
        assert_eq!(count_vanishing_solutions(2, 0), 2);
        assert_eq!(count_vanishing_solutions(-1, -2), 1);
        assert_eq!(count_vanishing_solutions(0, 5), 0);
    }
}
