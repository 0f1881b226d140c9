//! Multiprecision complex root finding and numeric embeddings of towers.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::factor::min_poly_over_q;
use crate::arith::{Elem, Field};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("roots could not be isolated below {0} bits of precision")]
    IllConditioned(u32),
}

/// A complex number with multiprecision parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn zero(prec: u32) -> Self {
        Complex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Complex::from_f64(prec, 1.0, 0.0)
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Complex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_rat(prec: u32, r: &Rational) -> Self {
        Complex {
            re: Float::with_val(prec, r),
            im: Float::new(prec),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Complex) -> Complex {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }

    pub fn neg(&self) -> Complex {
        Complex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let p = self.prec();
        let rr = Float::with_val(p, &self.re * &o.re);
        let ii = Float::with_val(p, &self.im * &o.im);
        let ri = Float::with_val(p, &self.re * &o.im);
        let ir = Float::with_val(p, &self.im * &o.re);
        Complex {
            re: rr - ii,
            im: ri + ir,
        }
    }

    pub fn scale(&self, c: &Float) -> Complex {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re * c),
            im: Float::with_val(p, &self.im * c),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn recip(&self) -> Complex {
        let d = self.norm_sqr();
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re / &d),
            im: -Float::with_val(p, &self.im / &d),
        }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        self.mul(&o.recip())
    }

    pub fn powi(&self, n: u32) -> Complex {
        let mut acc = Complex::one(self.prec());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn conj(&self) -> Complex {
        Complex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    /// `r·e^{iφ}`.
    pub fn polar(prec: u32, r: &Float, phi: &Float) -> Complex {
        let (s, c) = phi.clone().sin_cos(Float::new(prec));
        Complex {
            re: Float::with_val(prec, r * &c),
            im: Float::with_val(prec, r * &s),
        }
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.re.to_f64(), self.im.to_f64()]
    }
}

/// Value and derivative of a polynomial (low degree first) by Horner.
pub fn horner(coeffs: &[Complex], z: &Complex) -> (Complex, Complex) {
    let prec = z.prec();
    let mut p = Complex::zero(prec);
    let mut dp = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(c);
    }
    (p, dp)
}

/// Roots with inclusion radii: each disc `|z - roots[i]| <= radii[i]`
/// contains a root, and the discs are pairwise disjoint.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Complex>,
    pub radii: Vec<Float>,
    pub prec: u32,
}

/// Isolates the roots of a squarefree polynomial with complex coefficients,
/// doubling the working precision until the inclusion discs separate.
pub fn isolate_roots(coeffs: &[Complex], prec: u32, max_prec: u32) -> Result<RootSet, NumericError> {
    let hi = coeffs.iter().rposition(|c| !c.is_zero()).ok_or(NumericError::ZeroPolynomial)?;
    let coeffs = &coeffs[..=hi];
    let zeros = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    if zeros > 1 {
        return Err(NumericError::IllConditioned(prec));
    }
    let core = &coeffs[zeros..];
    let mut p = prec.max(64);
    let mut guess: Option<Vec<Complex>> = None;
    loop {
        let c: Vec<Complex> = core.iter().map(|c| c.with_prec(p)).collect();
        let start = match guess.take() {
            Some(g) => g.iter().map(|z| z.with_prec(p)).collect(),
            None => initial_guesses(&c, p),
        };
        let mut roots = aberth(&c, start);
        if zeros == 1 {
            roots.push(Complex::zero(p));
        }
        let full: Vec<Complex> = coeffs.iter().map(|c| c.with_prec(p)).collect();
        let radii = inclusion_radii(&full, &roots);
        if discs_disjoint(&roots, &radii) {
            return Ok(RootSet { roots, radii, prec: p });
        }
        if p >= max_prec {
            return Err(NumericError::IllConditioned(p));
        }
        if zeros == 1 {
            roots.pop();
        }
        guess = Some(roots);
        p = (p * 2).min(max_prec);
    }
}

/// Roots of a squarefree rational polynomial.
pub fn rational_roots(coeffs: &[Rational], prec: u32, max_prec: u32) -> Result<RootSet, NumericError> {
    let c: Vec<Complex> = coeffs.iter().map(|r| Complex::from_rat(prec, r)).collect();
    isolate_roots(&c, prec, max_prec)
}

fn log2_abs(c: &Complex) -> f64 {
    let a = c.abs();
    if a.is_zero() {
        f64::NEG_INFINITY
    } else {
        a.log2().to_f64()
    }
}

/// Starting points on circles whose radii come from the Newton polygon of
/// `log|a_i|`.
fn initial_guesses(coeffs: &[Complex], prec: u32) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (i, log2_abs(c)))
        .filter(|(_, l)| l.is_finite())
        .collect();
    // upper convex hull
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (i1, l1) = hull[hull.len() - 2];
            let (i2, l2) = hull[hull.len() - 1];
            let cross = (i2 as f64 - i1 as f64) * (pt.1 - l1) - (l2 - l1) * (pt.0 as f64 - i1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let m = j - i;
        let log_r = (li - lj) / m as f64;
        let r = Float::with_val(prec, log_r).exp2();
        for k in 0..m {
            let frac = (k as f64 + 0.5) / m as f64 + i as f64 / n as f64 + 0.37;
            let phi = Float::with_val(prec, &two_pi * frac);
            out.push(Complex::polar(prec, &r, &phi));
        }
    }
    out
}

fn aberth(coeffs: &[Complex], mut z: Vec<Complex>) -> Vec<Complex> {
    let n = z.len();
    if n == 0 {
        return z;
    }
    let prec = coeffs[0].prec();
    if n == 1 {
        return vec![coeffs[0].neg().div(&coeffs[1])];
    }
    let tol_bits = prec as i32 - 8;
    let mut done = vec![false; n];
    for _ in 0..(50 * n + 400) {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(coeffs, &z[i]);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            let w = p.div(&dp);
            let mut s = Complex::zero(prec);
            for j in 0..n {
                if j != i {
                    s = s.add(&z[i].sub(&z[j]).recip());
                }
            }
            let denom = Complex::one(prec).sub(&w.mul(&s));
            let step = w.div(&denom);
            let scale = z[i].abs().max(&pow2(-(prec as i32)));
            let small = Float::with_val(prec, step.abs() / &scale);
            z[i] = z[i].sub(&step);
            if small.is_zero() || small.get_exp().is_some_and(|e| e < -tol_bits) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    z
}

fn pow2(e: i32) -> Float {
    Float::with_val(64, 1) << e
}

fn inclusion_radii(coeffs: &[Complex], roots: &[Complex]) -> Vec<Float> {
    let n = roots.len();
    let lc = coeffs.last().unwrap();
    roots
        .iter()
        .enumerate()
        .map(|(i, zi)| {
            let (p, _) = horner(coeffs, zi);
            let mut den = lc.clone();
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    den = den.mul(&zi.sub(zj));
                }
            }
            let d = den.abs();
            if d.is_zero() {
                Float::with_val(zi.prec(), rug::float::Special::Infinity)
            } else {
                Float::with_val(zi.prec(), p.abs() * n as u32) / d
            }
        })
        .collect()
}

fn discs_disjoint(roots: &[Complex], radii: &[Float]) -> bool {
    if radii.iter().any(|r| !r.is_finite()) {
        return false;
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let d = roots[i].sub(&roots[j]).abs();
            if d <= Float::with_val(d.prec(), &radii[i] + &radii[j]) {
                return false;
            }
        }
    }
    true
}

/// Lexicographic order on `(re, im)`, treating real parts within `tol` of
/// each other as equal.
pub fn lex_cmp(a: &Complex, b: &Complex, tol: &Float) -> Ordering {
    let dre = Float::with_val(a.prec(), &a.re - &b.re);
    if dre.clone().abs() > *tol {
        return dre.partial_cmp(&Float::new(2)).unwrap_or(Ordering::Equal);
    }
    a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal)
}

fn sort_tolerance(prec: u32, roots: &[Complex]) -> Float {
    let scale = roots
        .iter()
        .map(|z| z.abs())
        .fold(Float::with_val(prec, 1), |a, b| if b > a { b } else { a });
    scale * pow2(-(prec as i32 / 2))
}

/// Value of a tower element under an embedding given by the images of the
/// level generators.
pub fn eval_elem(k: &Field, e: &Elem, gens: &[Complex], prec: u32) -> Complex {
    eval_at_depth(k.depth(), e, gens, prec)
}

fn eval_at_depth(depth: usize, e: &Elem, gens: &[Complex], prec: u32) -> Complex {
    match e {
        Elem::Rat(r) => Complex::from_rat(prec, r),
        Elem::Ext(v) => {
            let theta = &gens[depth - 1];
            let mut acc = Complex::zero(prec);
            for c in v.iter().rev() {
                acc = acc.mul(theta).add(&eval_at_depth(depth - 1, c, gens, prec));
            }
            acc
        }
    }
}

/// All complex embeddings of a tower, as images of the level generators.
pub fn embeddings(k: &Field, prec: u32) -> Result<Vec<Vec<Complex>>, NumericError> {
    let mut out: Vec<Vec<Complex>> = vec![Vec::new()];
    for (lvl, level) in k.levels().iter().enumerate() {
        let mut next = Vec::new();
        for e in &out {
            let coeffs: Vec<Complex> = level
                .modulus
                .iter()
                .map(|c| eval_at_depth(lvl, c, e, prec))
                .collect();
            let rs = isolate_roots(&coeffs, prec, prec * 16)?;
            for r in rs.roots {
                let mut g = e.clone();
                g.push(r.with_prec(prec));
                next.push(g);
            }
        }
        out = next;
    }
    Ok(out)
}

/// An algebraic number: minimal polynomial over Q, an approximation, and
/// the position of the root among all roots of the minimal polynomial
/// sorted lexicographically by `(re, im)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicNumber {
    pub min_poly: String,
    pub approx: [f64; 2],
    pub root_index: usize,
}

impl AlgebraicNumber {
    pub fn rational(r: &Rational) -> Self {
        let mp = [Rational::from(-r), Rational::from(1)];
        AlgebraicNumber {
            min_poly: min_poly_string(&mp),
            approx: [r.to_f64(), 0.0],
            root_index: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.min_poly
            .split(['+', '-'])
            .filter_map(|t| t.trim().split("t^").nth(1))
            .filter_map(|e| e.trim().parse::<usize>().ok())
            .max()
            .unwrap_or(1)
    }
}

impl std::fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Ok(p) = crate::poly::parse_poly(&self.min_poly, &["t"]) {
            if p.total_degree() == Some(1) {
                let c1 = p.coeff([1, 0, 0]);
                return write!(f, "{}", -Rational::from(&p.coeff([0, 0, 0]) / &c1));
            }
        }
        let [re, im] = self.approx;
        if im == 0.0 {
            write!(f, "{re:.6}")
        } else {
            write!(f, "{re:.6}{im:+.6}i")
        }
    }
}

pub fn min_poly_string(mp: &[Rational]) -> String {
    let p = Poly::from_terms(1, mp.iter().enumerate().map(|(i, c)| ([i as u32, 0, 0], c.clone())));
    p.to_string_with(&["t"])
}

/// Names the root of `mp` closest to `value`.
pub fn algebraic_number(mp: &[Rational], value: &Complex) -> Result<AlgebraicNumber, NumericError> {
    if mp.len() == 2 {
        return Ok(AlgebraicNumber::rational(&-Rational::from(&mp[0] / &mp[1])));
    }
    let prec = value.prec().max(128);
    let rs = rational_roots(mp, prec, prec * 16)?;
    let mut roots = rs.roots;
    let tol = sort_tolerance(rs.prec, &roots);
    roots.sort_by(|a, b| lex_cmp(a, b, &tol));
    let v = value.with_prec(rs.prec);
    let (idx, _) = roots
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.sub(&v).abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        .unwrap();
    let mut approx = roots[idx].to_f64();
    if roots[idx].im.clone().abs() <= tol {
        approx[1] = 0.0;
    }
    Ok(AlgebraicNumber {
        min_poly: min_poly_string(mp),
        approx,
        root_index: idx,
    })
}

/// Algebraic number for an element of `k` under one embedding.
pub fn describe_elem(k: &Field, e: &Elem, gens: &[Complex], prec: u32) -> Result<AlgebraicNumber, NumericError> {
    if let Some(r) = k.to_rational(e) {
        return Ok(AlgebraicNumber::rational(&r));
    }
    let mp = min_poly_over_q(k, e);
    algebraic_number(&mp, &eval_elem(k, e, gens, prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rats(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&c| Rational::from(c)).collect()
    }

    #[test]
    fn roots_of_unity() {
        let rs = rational_roots(&rats(&[-1, 0, 0, 0, 0, 1]), 128, 1024).unwrap();
        assert_eq!(rs.roots.len(), 5);
        for (z, r) in rs.roots.iter().zip(&rs.radii) {
            let a = z.abs().to_f64();
            assert!((a - 1.0).abs() < 1e-30);
            assert!(r.to_f64() < 1e-30);
        }
    }

    #[test]
    fn widely_spread_roots() {
        // (x - 1e-6)(x - 1)(x - 1e6) scaled to integers
        let a = Rational::from((1, 1_000_000));
        let c = Rational::from(1_000_000);
        let one = Rational::from(1);
        let e2 = -(Rational::from(&a + &one) + &c);
        let e1 = Rational::from(&a * &one) + Rational::from(&a * &c) + Rational::from(&one * &c);
        let e0 = -(Rational::from(&a * &one) * &c);
        let rs = rational_roots(&[e0, e1, e2, one], 128, 1024).unwrap();
        let mut re: Vec<f64> = rs.roots.iter().map(|z| z.re.to_f64()).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] - 1e-6).abs() < 1e-20);
        assert!((re[1] - 1.0).abs() < 1e-20);
        assert!((re[2] - 1e6).abs() < 1e-10);
    }

    #[test]
    fn zero_root_and_radius() {
        let rs = rational_roots(&rats(&[0, -2, 0, 1]), 128, 1024).unwrap();
        assert_eq!(rs.roots.len(), 3);
        assert!(rs.roots.iter().any(|z| z.is_zero()));
    }

    #[test]
    fn embeddings_of_a_tower() {
        let q = Field::rationals();
        let k = q.extend("a", vec![q.from_int(-2), q.zero(), q.one()]).unwrap();
        // b^2 = a
        let k2 = k.extend("b", vec![k.neg(&k.generator()), k.zero(), k.one()]).unwrap();
        let emb = embeddings(&k2, 128).unwrap();
        assert_eq!(emb.len(), 4);
        for e in &emb {
            let b = &e[1];
            let b4 = b.powi(4);
            assert!((b4.re.to_f64() - 2.0).abs() < 1e-30 && b4.im.to_f64().abs() < 1e-30);
        }
    }

    #[test]
    fn root_index_is_lexicographic() {
        // t^2 + 1: roots -i, i
        let mp = rats(&[1, 0, 1]);
        let i = Complex::from_f64(128, 0.0, 1.0);
        let a = algebraic_number(&mp, &i).unwrap();
        assert_eq!(a.root_index, 1);
        assert_eq!(a.min_poly, "t^2 + 1");
        let a = algebraic_number(&mp, &i.conj()).unwrap();
        assert_eq!(a.root_index, 0);
        assert_eq!(a.degree(), 2);
    }
}
