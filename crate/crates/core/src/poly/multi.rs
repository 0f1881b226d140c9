use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};
use thiserror::Error;

pub const MAX_ARITY: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("both polynomials are constant in the eliminated variable")]
    ConstantInVariable,
    #[error("variable index {0} out of range")]
    BadVariable(usize),
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub [u32; MAX_ARITY]);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    fn sub(&self, other: &Mono) -> Mono {
        let mut e = [0; MAX_ARITY];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i] - other.0[i];
        }
        Mono(e)
    }

    fn add(&self, other: &Mono) -> Mono {
        let mut e = [0; MAX_ARITY];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i] + other.0[i];
        }
        Mono(e)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    arity: usize,
    terms: BTreeMap<Mono, Rational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&default_names(self.arity)))
    }
}

fn default_names(arity: usize) -> Vec<&'static str> {
    ["x", "y", "z"][..arity].to_vec()
}

impl Poly {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity), "arity must be 1, 2 or 3");
        Poly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Poly::zero(arity);
        if c != 0 {
            p.terms.insert(Mono::default(), c);
        }
        p
    }

    pub fn from_int(arity: usize, c: i64) -> Self {
        Poly::constant(arity, Rational::from(c))
    }

    pub fn one(arity: usize) -> Self {
        Poly::from_int(arity, 1)
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        let mut e = [0; MAX_ARITY];
        e[i] = 1;
        Poly::monomial(arity, e, Rational::from(1))
    }

    pub fn monomial(arity: usize, exps: [u32; MAX_ARITY], c: Rational) -> Self {
        let mut p = Poly::zero(arity);
        debug_assert!(exps[arity..].iter().all(|&e| e == 0));
        if c != 0 {
            p.terms.insert(Mono(exps), c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms.
    pub fn from_terms<I>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = ([u32; MAX_ARITY], Rational)>,
    {
        let mut p = Poly::zero(arity);
        for (e, c) in terms {
            p.add_term(Mono(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if *v == 0 {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: [u32; MAX_ARITY]) -> Rational {
        self.terms.get(&Mono(exps)).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree().unwrap_or(0) == 0
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coeff([0; MAX_ARITY]))
        } else {
            None
        }
    }

    pub fn involves(&self, var: usize) -> bool {
        self.degree_in(var).unwrap_or(0) > 0
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if *c == 0 {
            return Poly::zero(self.arity);
        }
        Poly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (*m, Rational::from(v * c)))
                .collect(),
        }
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, lc)) => self.scale(&Rational::from(lc.recip_ref())),
            None => self.clone(),
        }
    }

    fn mul_term(&self, m: &Mono, c: &Rational) -> Poly {
        Poly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.add(m), Rational::from(v * c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(self.arity);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn differentiate(&self, var: usize) -> Poly {
        assert!(var < self.arity);
        let mut out = Poly::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut n = *m;
            n.0[var] -= 1;
            out.add_term(n, Rational::from(c * e));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.arity).map(|i| self.differentiate(i)).collect()
    }

    /// Homogenizes with a new last variable.
    pub fn homogenize(&self) -> Poly {
        assert!(self.arity < MAX_ARITY, "no room for a homogenizing variable");
        let d = self.total_degree().unwrap_or(0);
        let mut out = Poly::zero(self.arity + 1);
        for (m, c) in &self.terms {
            let mut n = *m;
            n.0[self.arity] = d - m.degree();
            out.terms.insert(n, c.clone());
        }
        out
    }

    /// Sets `var` to 1 in a homogeneous polynomial and drops it.
    pub fn dehomogenize(&self, var: usize) -> Result<Poly, PolyError> {
        if var >= self.arity || self.arity < 2 {
            return Err(PolyError::BadVariable(var));
        }
        if !self.is_homogeneous() {
            return Err(PolyError::NotHomogeneous);
        }
        Ok(self.substitute(var, &Rational::from(1)).drop_var(var))
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn top_form(&self) -> Poly {
        match self.total_degree() {
            Some(d) => self.homogeneous_part(d),
            None => self.clone(),
        }
    }

    /// Removes a variable that does not occur.
    pub fn drop_var(&self, var: usize) -> Poly {
        assert!(!self.involves(var), "dropping a variable that occurs");
        let mut out = Poly::zero(self.arity - 1);
        for (m, c) in &self.terms {
            let mut e = [0; MAX_ARITY];
            let mut k = 0;
            for (i, &x) in m.0[..self.arity].iter().enumerate() {
                if i != var {
                    e[k] = x;
                    k += 1;
                }
            }
            out.terms.insert(Mono(e), c.clone());
        }
        out
    }

    /// Re-embeds into more variables, placing old variable `i` at `slots[i]`.
    pub fn embed(&self, arity: usize, slots: &[usize]) -> Poly {
        assert_eq!(slots.len(), self.arity);
        let mut out = Poly::zero(arity);
        for (m, c) in &self.terms {
            let mut e = [0; MAX_ARITY];
            for (i, &s) in slots.iter().enumerate() {
                e[s] += m.0[i];
            }
            out.add_term(Mono(e), c.clone());
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.arity);
        let mut acc = Rational::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                if m.0[i] > 0 {
                    t *= pow_rat(x, m.0[i]);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a rational value for `var`; the variable stays in the
    /// arity but no longer occurs.
    pub fn substitute(&self, var: usize, value: &Rational) -> Poly {
        let mut out = Poly::zero(self.arity);
        for (m, c) in &self.terms {
            let mut n = *m;
            let e = n.0[var];
            n.0[var] = 0;
            out.add_term(n, Rational::from(c * &pow_rat(value, e)));
        }
        out
    }

    /// Substitutes a polynomial (of the same arity) for `var`.
    pub fn compose_var(&self, var: usize, value: &Poly) -> Poly {
        let coeffs = self.coeffs_in(var);
        let mut acc = Poly::zero(self.arity);
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Coefficients with respect to `var`, low degree first; they do not
    /// involve `var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let n = self.degree_in(var).map_or(0, |d| d as usize + 1);
        let mut out = vec![Poly::zero(self.arity); n];
        for (m, c) in &self.terms {
            let mut k = *m;
            let e = k.0[var] as usize;
            k.0[var] = 0;
            out[e].terms.insert(k, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(arity: usize, var: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(arity);
        for (e, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut k = *m;
                k.0[var] += e as u32;
                out.add_term(k, v.clone());
            }
        }
        out
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading().expect("division by the zero polynomial");
        let (lm, lc) = (*lm, lc.clone());
        let mut r = self.clone();
        let mut q = Poly::zero(self.arity);
        while let Some((m, c)) = r.leading() {
            if !lm.divides(m) {
                return None;
            }
            let tm = m.sub(&lm);
            let tc = Rational::from(c / &lc);
            r = &r - &d.mul_term(&tm, &tc);
            q.add_term(tm, tc);
        }
        Some(q)
    }

    /// Multiplies by the least common denominator and divides by the
    /// integer content, giving a primitive integer polynomial with positive
    /// leading coefficient.
    pub fn primitive_integer(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = Integer::from(1);
        for c in self.terms.values() {
            den.lcm_mut(c.denom());
        }
        let mut num = Integer::new();
        for c in self.terms.values() {
            let v = Integer::from(c.numer() * &den) / c.denom();
            num.gcd_mut(&v);
        }
        let mut scale = Rational::from((den, num));
        if self.leading().unwrap().1.is_negative() {
            scale = -scale;
        }
        self.scale(&scale)
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        self.display(names).to_string()
    }
}

fn pow_rat(x: &Rational, e: u32) -> Rational {
    let mut r = Rational::from(1);
    for _ in 0..e {
        r *= x;
    }
    r
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [&'a str],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = Rational::from(c.abs_ref());
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts: Vec<String> = Vec::new();
            if abs != 1 || m.degree() == 0 {
                parts.push(abs.to_string());
            }
            for (v, &e) in m.0[..self.poly.arity].iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(self.names[v].to_string()),
                    _ => parts.push(format!("{}^{}", self.names[v], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, Rational::from(-c));
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&Rational::from(-1))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = Poly::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.add(m2), Rational::from(c1 * c2));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

// ---- gcd ---------------------------------------------------------------

fn main_var(a: &Poly, b: &Poly) -> Option<usize> {
    (0..a.arity).rev().find(|&v| a.involves(v) || b.involves(v))
}

/// Gcd of the coefficients with respect to `var`.
fn content(p: &Poly, var: usize) -> Poly {
    let mut g = Poly::zero(p.arity);
    for c in p.coeffs_in(var) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Poly, var: usize) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content(p, var);
    p.div_exact(&c).expect("content divides")
}

/// Pseudo-remainder of `a` by `b` with respect to `var`.
fn prem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let mut r = a.coeffs_in(var);
    let bc = b.coeffs_in(var);
    let db = bc.len() - 1;
    let lb = &bc[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (i, c) in bc.iter().enumerate() {
            let k = dr - db + i;
            r[k] = &r[k] - &(&lr * c);
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    Poly::from_coeffs_in(a.arity, var, &r)
}

/// Greatest common divisor, normalized to leading coefficient 1 (zero when
/// both inputs are zero).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    assert_eq!(a.arity, b.arity);
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let Some(v) = main_var(a, b) else {
        return Poly::one(a.arity);
    };
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap();
    let mut q = b.div_exact(&cb).unwrap();
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        if q.degree_in(v) == Some(0) {
            break Poly::one(a.arity);
        }
        let r = prem(&p, &q, v);
        if r.is_zero() {
            break primitive_part(&q, v);
        }
        p = q;
        q = primitive_part(&r, v);
    };
    (&c * &g).monic()
}

/// Product of the distinct irreducible factors, leading coefficient 1.
pub fn squarefree_part(p: &Poly) -> Poly {
    if p.is_constant() {
        return p.monic();
    }
    let mut g = p.clone();
    for d in p.gradient() {
        g = gcd(&g, &d);
    }
    p.div_exact(&g).expect("gcd divides").monic()
}

/// Sylvester resultant eliminating `var`.
pub fn resultant(p: &Poly, q: &Poly, var: usize) -> Result<Poly, PolyError> {
    if var >= p.arity {
        return Err(PolyError::BadVariable(var));
    }
    let arity = p.arity;
    if p.is_zero() || q.is_zero() {
        return Ok(Poly::zero(arity));
    }
    let m = p.degree_in(var).unwrap() as usize;
    let n = q.degree_in(var).unwrap() as usize;
    if m == 0 && n == 0 {
        return Err(PolyError::ConstantInVariable);
    }
    let pc = p.coeffs_in(var);
    let qc = q.coeffs_in(var);
    let size = m + n;
    let mut mat = vec![vec![Poly::zero(arity); size]; size];
    for i in 0..n {
        for (j, c) in pc.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in qc.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    Ok(bareiss_det(mat))
}

/// Fraction-free determinant.
fn bareiss_det(mut a: Vec<Vec<Poly>>) -> Poly {
    let n = a.len();
    let arity = a[0][0].arity;
    let mut sign = false;
    let mut prev = Poly::one(arity);
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = !sign;
                }
                None => return Poly::zero(arity),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(terms: &[((u32, u32), i64)]) -> Poly {
        Poly::from_terms(
            2,
            terms
                .iter()
                .map(|&((i, j), c)| ([i, j, 0], Rational::from(c))),
        )
    }

    #[test]
    fn derivatives() {
        let f = p2(&[((1, 0), 1), ((2, 1), 1)]);
        assert_eq!(f.differentiate(0), p2(&[((0, 0), 1), ((1, 1), 2)]));
        assert_eq!(f.differentiate(1), p2(&[((2, 0), 1)]));
        assert!(Poly::from_int(2, 7).differentiate(0).is_zero());
    }

    #[test]
    fn homogenize_round_trip() {
        let f = p2(&[((1, 0), 1), ((2, 1), 1)]);
        let h = f.homogenize();
        assert!(h.is_homogeneous());
        assert_eq!(h.coeff([1, 0, 2]), 1);
        assert_eq!(h.coeff([2, 1, 0]), 1);
        // chart y = 1: x z^2 + x^2
        let chart = h.dehomogenize(1).unwrap();
        assert_eq!(chart, p2(&[((1, 2), 1), ((2, 0), 1)]));
        assert_eq!(h.dehomogenize(2).unwrap(), f);
        assert_eq!(Poly::from_int(2, 5).homogenize(), Poly::from_int(3, 5));
        assert_eq!(f.dehomogenize(1), Err(PolyError::NotHomogeneous));
    }

    #[test]
    fn gcd_and_squarefree() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = &(&x - &y) * &(&x + &Poly::one(2));
        let b = &(&x - &y) * &(&y + &Poly::from_int(2, 3));
        assert_eq!(gcd(&a, &b), &x - &y);
        let f = &(&x * &x) * &y;
        assert_eq!(squarefree_part(&f), &x * &y);
        assert_eq!(gcd(&Poly::from_int(2, 4), &x), Poly::one(2));
    }

    #[test]
    fn resultants() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x * &x) - &Poly::from_int(2, 2);
        let q = &x - &y;
        let r = resultant(&p, &q, 0).unwrap();
        assert_eq!(r.monic(), (&(&y * &y) - &Poly::from_int(2, 2)).monic());
        let a = &(&x - &y) * &(&x + &Poly::one(2));
        let b = &(&x - &y) * &y;
        assert!(resultant(&a, &b, 0).unwrap().is_zero());
        assert_eq!(
            resultant(&Poly::one(2), &Poly::from_int(2, 3), 0),
            Err(PolyError::ConstantInVariable)
        );
        // 1 + 2xy and x^2 eliminating y: x^2 times a unit
        let fx = p2(&[((0, 0), 1), ((1, 1), 2)]);
        let fy = p2(&[((2, 0), 1)]);
        let r = resultant(&fx, &fy, 1).unwrap();
        assert_eq!(r.monic(), p2(&[((2, 0), 1)]));
    }

    #[test]
    fn display_format() {
        let f = Poly::from_terms(
            2,
            [
                ([1, 1, 0], Rational::from(1)),
                ([3, 2, 0], Rational::from((1, 3))),
                ([0, 0, 0], Rational::from(-2)),
            ],
        );
        assert_eq!(f.to_string_with(&["x", "y"]), "1/3*x^3*y^2 + x*y - 2");
        assert_eq!((-&f).to_string_with(&["x", "y"]), "-1/3*x^3*y^2 - x*y + 2");
    }
}
