//! Univariate factorization over a tower: Zassenhaus over Q, and Trager's
//! norm method one level at a time above it.

use rug::Rational;

use super::factor_q::factor_rational;
use super::field::{Elem, Field};
use super::upoly::{self, UPoly};

/// Factors a nonzero polynomial over `k` into monic irreducibles with
/// multiplicities. A constant yields an empty list.
pub fn factor_univariate(k: &Field, p: &[Elem]) -> Vec<(UPoly, usize)> {
    let p = upoly::trim(k, p.to_vec());
    assert!(!p.is_empty(), "factorization of the zero polynomial");
    let mut out = Vec::new();
    for (sq, mult) in upoly::squarefree_decomposition(k, &p) {
        for f in factor_squarefree(k, &sq) {
            out.push((f, mult));
        }
    }
    out
}

/// Monic irreducible factors of a monic squarefree polynomial.
pub fn factor_squarefree(k: &Field, g: &[Elem]) -> Vec<UPoly> {
    if g.len() <= 2 {
        return vec![upoly::monic(k, g)];
    }
    if k.is_rationals() {
        let coeffs: Vec<Rational> = g.iter().map(|c| c.as_rat().clone()).collect();
        return factor_rational(&coeffs)
            .into_iter()
            .map(|(f, _)| f.into_iter().map(Elem::Rat).collect())
            .collect();
    }
    let base = k.base();
    let theta = k.generator();
    for shift in shift_sequence() {
        // g_s(X) = g(X - s·θ)
        let offset = k.scale_rat(&theta, &Rational::from(-shift));
        let gs = upoly::shift(k, g, &offset);
        let norm = norm_to_base(k, &gs);
        let dn = upoly::derivative(&base, &norm);
        if upoly::gcd(&base, &norm, &dn).len() > 1 {
            continue;
        }
        let back = k.scale_rat(&theta, &Rational::from(shift));
        let mut out = Vec::new();
        for h in factor_squarefree(&base, &norm) {
            let lifted: UPoly = h.iter().map(|c| k.lift(&base, c)).collect();
            let fac = upoly::gcd(k, &gs, &lifted);
            if fac.len() > 1 {
                out.push(upoly::monic(k, &upoly::shift(k, &fac, &back)));
            }
        }
        return out;
    }
    unreachable!("some shift always yields a squarefree norm")
}

fn shift_sequence() -> impl Iterator<Item = i64> {
    (0..).map(|i: i64| if i % 2 == 0 { i / 2 } else { -(i + 1) / 2 })
}

/// `N(X) = Res_θ(m(θ), g(X, θ))`, the norm of `g ∈ k[X]` down to the base.
pub fn norm_to_base(k: &Field, g: &[Elem]) -> UPoly {
    let base = k.base();
    let modulus = &k.top().modulus;
    let deg = (g.len() - 1) * (modulus.len() - 1);
    let xs: Vec<Elem> = (0..=deg as i64).map(|i| base.from_int(i)).collect();
    let ys: Vec<Elem> = (0..=deg as i64)
        .map(|i| {
            let v = upoly::eval(k, g, &k.from_int(i));
            match v {
                Elem::Ext(coeffs) => {
                    if coeffs.is_empty() {
                        base.zero()
                    } else {
                        upoly::resultant(&base, modulus, &coeffs)
                    }
                }
                Elem::Rat(_) => unreachable!(),
            }
        })
        .collect();
    interpolate(&base, &xs, &ys)
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(k: &Field, xs: &[Elem], ys: &[Elem]) -> UPoly {
    let n = xs.len();
    let mut dd: Vec<Elem> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = k.sub(&dd[i], &dd[i - 1]);
            let den = k.sub(&xs[i], &xs[i - j]);
            dd[i] = k.div(&num, &den).expect("distinct nodes");
        }
    }
    let mut acc: UPoly = Vec::new();
    for i in (0..n).rev() {
        acc = upoly::mul(k, &acc, &upoly::linear_root(k, &xs[i]));
        acc = upoly::add(k, &acc, std::slice::from_ref(&dd[i]));
    }
    acc
}

/// Roots of `p` lying in `k` (each once).
pub fn roots_in_field(k: &Field, p: &[Elem]) -> Vec<Elem> {
    factor_univariate(k, p)
        .into_iter()
        .filter(|(f, _)| f.len() == 2)
        .map(|(f, _)| k.neg(&f[0]))
        .collect()
}

/// Characteristic polynomial over Q of multiplication by `a` in `k`.
pub fn char_poly_over_q(k: &Field, a: &Elem) -> Vec<Rational> {
    // X - a over k, then norm down level by level.
    let mut field = k.clone();
    let mut poly: UPoly = upoly::linear_root(k, a);
    while !field.is_rationals() {
        poly = norm_to_base(&field, &poly);
        field = field.base();
    }
    let lc = poly.last().unwrap().as_rat().clone();
    poly.iter()
        .map(|c| Rational::from(c.as_rat() / &lc))
        .collect()
}

/// Minimal polynomial over Q (monic) of an element of `k`.
pub fn min_poly_over_q(k: &Field, a: &Elem) -> Vec<Rational> {
    let cp = char_poly_over_q(k, a);
    let q = Field::rationals();
    let e: UPoly = cp.into_iter().map(Elem::Rat).collect();
    upoly::squarefree_part(&q, &e)
        .into_iter()
        .map(|c| c.as_rat().clone())
        .collect()
}
