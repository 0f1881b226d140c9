//! Dense univariate polynomials over a [`Field`], stored low degree first
//! with no trailing zeros (the zero polynomial is empty).

use super::field::{Elem, Field};

pub type UPoly = Vec<Elem>;

pub fn trim(k: &Field, mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
    p
}

pub fn degree(p: &[Elem]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn constant(k: &Field, c: Elem) -> UPoly {
    trim(k, vec![c])
}

/// `X - c`
pub fn linear_root(k: &Field, c: &Elem) -> UPoly {
    vec![k.neg(c), k.one()]
}

pub fn add(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => k.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        });
    }
    trim(k, out)
}

pub fn sub(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => k.sub(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => k.neg(y),
            (None, None) => unreachable!(),
        });
    }
    trim(k, out)
}

pub fn neg(k: &Field, a: &[Elem]) -> UPoly {
    a.iter().map(|c| k.neg(c)).collect()
}

pub fn scale(k: &Field, a: &[Elem], c: &Elem) -> UPoly {
    if k.is_zero(c) {
        return Vec::new();
    }
    a.iter().map(|x| k.mul(x, c)).collect()
}

pub fn mul(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if k.is_zero(y) {
                continue;
            }
            let t = k.mul(x, y);
            out[i + j] = k.add(&out[i + j], &t);
        }
    }
    trim(k, out)
}

pub fn pow(k: &Field, a: &[Elem], e: u32) -> UPoly {
    let mut result = vec![k.one()];
    for _ in 0..e {
        result = mul(k, &result, a);
    }
    result
}

/// Remainder modulo a monic polynomial, consuming the dividend.
pub fn rem_monic(k: &Field, mut a: UPoly, m: &[Elem]) -> UPoly {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if k.is_zero(&lead) {
            continue;
        }
        let off = a.len() - dm;
        for (i, c) in m[..dm].iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let t = k.mul(&lead, c);
            a[off + i] = k.sub(&a[off + i], &t);
        }
    }
    trim(k, a)
}

pub fn divrem(k: &Field, a: &[Elem], b: &[Elem]) -> (UPoly, UPoly) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    if a.len() < b.len() {
        return (Vec::new(), a.to_vec());
    }
    let db = b.len() - 1;
    let lead_inv = k.inv(b.last().unwrap()).unwrap();
    let mut r = a.to_vec();
    let mut q = vec![k.zero(); a.len() - db];
    while r.len() > db {
        let lead = r.pop().unwrap();
        if k.is_zero(&lead) {
            continue;
        }
        let coef = k.mul(&lead, &lead_inv);
        let off = r.len() - db;
        for (i, c) in b[..db].iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let t = k.mul(&coef, c);
            r[off + i] = k.sub(&r[off + i], &t);
        }
        q[off] = coef;
    }
    (trim(k, q), trim(k, r))
}

pub fn rem(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    divrem(k, a, b).1
}

/// Exact division; `None` when `b` does not divide `a`.
pub fn div_exact(k: &Field, a: &[Elem], b: &[Elem]) -> Option<UPoly> {
    let (q, r) = divrem(k, a, b);
    r.is_empty().then_some(q)
}

pub fn monic(k: &Field, a: &[Elem]) -> UPoly {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            if k.is_one(lc) {
                return a.to_vec();
            }
            let inv = k.inv(lc).unwrap();
            let mut out = scale(k, a, &inv);
            *out.last_mut().unwrap() = k.one();
            out
        }
    }
}

/// Monic greatest common divisor (zero if both inputs are zero).
pub fn gcd(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let mut x = monic(k, a);
    let mut y = monic(k, b);
    while !y.is_empty() {
        let r = rem(k, &x, &y);
        x = y;
        y = monic(k, &r);
    }
    x
}

/// Extended Euclid: `(g, s, t)` with `s·a + t·b = g`, `g` a gcd (not normalized).
pub fn xgcd(k: &Field, a: &[Elem], b: &[Elem]) -> (UPoly, UPoly, UPoly) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0 = vec![k.one()];
    let mut s1: UPoly = Vec::new();
    let mut t0: UPoly = Vec::new();
    let mut t1 = vec![k.one()];
    while !r1.is_empty() {
        let (q, r) = divrem(k, &r0, &r1);
        let s2 = sub(k, &s0, &mul(k, &q, &s1));
        let t2 = sub(k, &t0, &mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

pub fn derivative(k: &Field, a: &[Elem]) -> UPoly {
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| k.scale_rat(c, &rug::Rational::from(i as i64)))
        .collect();
    trim(k, out)
}

pub fn eval(k: &Field, a: &[Elem], x: &Elem) -> Elem {
    let mut acc = k.zero();
    for c in a.iter().rev() {
        acc = k.add(&k.mul(&acc, x), c);
    }
    acc
}

/// Evaluates a polynomial with coefficients in a subfield `sub` at `x ∈ k`.
pub fn eval_lifted(k: &Field, sub: &Field, a: &[Elem], x: &Elem) -> Elem {
    let mut acc = k.zero();
    for c in a.iter().rev() {
        acc = k.add(&k.mul(&acc, x), &k.lift(sub, c));
    }
    acc
}

/// `p(X + c)`
pub fn shift(k: &Field, p: &[Elem], c: &Elem) -> UPoly {
    // Horner with polynomial accumulator.
    let lin = vec![c.clone(), k.one()];
    let mut acc: UPoly = Vec::new();
    for coef in p.iter().rev() {
        acc = mul(k, &acc, &lin);
        acc = add(k, &acc, std::slice::from_ref(coef));
    }
    acc
}

/// `p(λ·X)`
pub fn scale_var(k: &Field, p: &[Elem], lambda: &Elem) -> UPoly {
    let mut pw = k.one();
    let mut out = Vec::with_capacity(p.len());
    for c in p {
        out.push(k.mul(c, &pw));
        pw = k.mul(&pw, lambda);
    }
    trim(k, out)
}

/// Yun's squarefree decomposition of a nonzero polynomial:
/// monic pairwise coprime squarefree `(a_i, i)` with `p = lc · ∏ a_i^i`.
pub fn squarefree_decomposition(k: &Field, p: &[Elem]) -> Vec<(UPoly, usize)> {
    assert!(!p.is_empty(), "squarefree decomposition of zero");
    let mut out = Vec::new();
    if p.len() == 1 {
        return out;
    }
    let p = monic(k, p);
    let dp = derivative(k, &p);
    let a0 = gcd(k, &p, &dp);
    let mut b = div_exact(k, &p, &a0).unwrap();
    let mut c = div_exact(k, &dp, &a0).unwrap();
    let mut i = 1;
    while b.len() > 1 {
        let d = sub(k, &c, &derivative(k, &b));
        let a = gcd(k, &b, &d);
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        b = div_exact(k, &b, &a).unwrap();
        c = div_exact(k, &d, &a).unwrap();
        i += 1;
    }
    out
}

/// Monic squarefree part of a nonzero polynomial.
pub fn squarefree_part(k: &Field, p: &[Elem]) -> UPoly {
    if p.len() <= 1 {
        return monic(k, p);
    }
    let g = gcd(k, p, &derivative(k, p));
    monic(k, &div_exact(k, p, &g).unwrap())
}

/// Resultant over a field by the Euclidean remainder sequence.
pub fn resultant(k: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    if a.is_empty() || b.is_empty() {
        return k.zero();
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut acc = k.one();
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            return k.mul(&acc, &k.pow(&b[0], da as i64).unwrap());
        }
        if da == 0 {
            return k.mul(&acc, &k.pow(&a[0], db as i64).unwrap());
        }
        if da < db {
            if (da * db) % 2 == 1 {
                acc = k.neg(&acc);
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = rem(k, &a, &b);
        if r.is_empty() {
            return k.zero();
        }
        let dr = r.len() - 1;
        // Res(A,B) = (-1)^{da·db} lc(B)^{da-dr} Res(B,R)
        if (da * db) % 2 == 1 {
            acc = k.neg(&acc);
        }
        acc = k.mul(&acc, &k.pow(b.last().unwrap(), (da - dr) as i64).unwrap());
        a = b;
        b = r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn qp(cs: &[i64]) -> UPoly {
        let k = Field::rationals();
        trim(&k, cs.iter().map(|&c| k.from_int(c)).collect())
    }

    /// Sylvester determinant by fraction-free elimination, as an oracle.
    fn sylvester_det(a: &[i64], b: &[i64]) -> Rational {
        let m = a.len() - 1;
        let n = b.len() - 1;
        let size = m + n;
        let mut mat = vec![vec![Rational::new(); size]; size];
        for r in 0..n {
            for (j, &c) in a.iter().rev().enumerate() {
                mat[r][r + j] = Rational::from(c);
            }
        }
        for r in 0..m {
            for (j, &c) in b.iter().rev().enumerate() {
                mat[n + r][r + j] = Rational::from(c);
            }
        }
        let mut det = Rational::from(1);
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| !mat[r][col].is_zero()) else {
                return Rational::new();
            };
            if piv != col {
                mat.swap(piv, col);
                det = -det;
            }
            let p = mat[col][col].clone();
            det *= &p;
            for r in col + 1..size {
                let f = Rational::from(&mat[r][col] / &p);
                for c in col..size {
                    let t = Rational::from(&f * &mat[col][c]);
                    mat[r][c] -= t;
                }
            }
        }
        det
    }

    #[test]
    fn resultant_matches_sylvester() {
        let k = Field::rationals();
        let cases: &[(&[i64], &[i64])] = &[
            (&[-2, 0, 1], &[3, 1]),
            (&[1, 2, 3, 4], &[5, -1, 2]),
            (&[0, 1], &[7, 0, 0, 2]),
            (&[1, 1, 1], &[-1, 0, 2, 0, 1]),
            (&[3, 0, -1, 1], &[2, 5]),
        ];
        for (a, b) in cases {
            let r = resultant(&k, &qp(a), &qp(b));
            assert_eq!(r.as_rat(), &sylvester_det(a, b), "{a:?} {b:?}");
        }
    }

    #[test]
    fn gcd_and_squarefree() {
        let k = Field::rationals();
        // (x-1)^2 (x+2)
        let p = mul(&k, &pow(&k, &qp(&[-1, 1]), 2), &qp(&[2, 1]));
        let dec = squarefree_decomposition(&k, &p);
        assert_eq!(dec, vec![(qp(&[2, 1]), 1), (qp(&[-1, 1]), 2)]);
        assert_eq!(squarefree_part(&k, &p), mul(&k, &qp(&[-1, 1]), &qp(&[2, 1])));
        assert_eq!(gcd(&k, &p, &qp(&[1, -2, 1])), qp(&[1, -2, 1]));
    }

    #[test]
    fn squarefree_decomposition_non_monic() {
        let k = Field::rationals();
        // 3 x^3 (x+1)^2
        let p = mul(&k, &qp(&[0, 0, 0, 3]), &pow(&k, &qp(&[1, 1]), 2));
        let dec = squarefree_decomposition(&k, &p);
        assert_eq!(dec, vec![(qp(&[1, 1]), 2), (qp(&[0, 1]), 3)]);
    }

    #[test]
    fn shift_and_eval() {
        let k = Field::rationals();
        let p = qp(&[1, 2, 3]);
        let s = shift(&k, &p, &k.from_int(2));
        // p(x+2) at 1 equals p(3) = 1 + 6 + 27
        assert_eq!(eval(&k, &s, &k.one()), k.from_int(34));
    }
}
