//! Factorization of univariate polynomials over Q by the Zassenhaus method:
//! factor modulo a small prime, Hensel-lift to a power of it, recombine.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};

use super::field::{Elem, Field};
use super::upoly;

type ZPoly = Vec<Integer>;
type FpPoly = Vec<u64>;

/// Factors a nonzero polynomial over Q into monic irreducibles with
/// multiplicities. Constants yield an empty list.
pub fn factor_rational(p: &[Rational]) -> Vec<(Vec<Rational>, usize)> {
    let k = Field::rationals();
    let poly: Vec<Elem> = p.iter().cloned().map(Elem::Rat).collect();
    let poly = upoly::trim(&k, poly);
    assert!(!poly.is_empty(), "factorization of the zero polynomial");
    let mut out = Vec::new();
    for (sq, mult) in upoly::squarefree_decomposition(&k, &poly) {
        let coeffs: Vec<Rational> = sq.iter().map(|c| c.as_rat().clone()).collect();
        for f in factor_squarefree(&coeffs) {
            out.push((f, mult));
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Irreducible monic factors of a squarefree polynomial over Q.
fn factor_squarefree(p: &[Rational]) -> Vec<Vec<Rational>> {
    let f = primitive_integer(p);
    if f.len() <= 2 {
        return vec![monic_rational(&f)];
    }
    // Strip the factor x, which the modular machinery handles poorly when the
    // constant term vanishes.
    if f[0] == 0 {
        let rest: ZPoly = f[1..].to_vec();
        let mut out = vec![vec![Rational::new(), Rational::from(1)]];
        if rest.len() > 1 {
            out.extend(factor_squarefree(
                &rest.iter().map(|c| Rational::from(c.clone())).collect::<Vec<_>>(),
            ));
        }
        return out;
    }
    zassenhaus(&f).iter().map(|g| monic_rational(g)).collect()
}

fn primitive_integer(p: &[Rational]) -> ZPoly {
    let mut den = Integer::from(1);
    for c in p {
        den.lcm_mut(c.denom());
    }
    let mut out: ZPoly = p
        .iter()
        .map(|c| c.numer() * Integer::from(&den / c.denom()))
        .collect();
    let mut content = Integer::new();
    for c in &out {
        content.gcd_mut(c);
    }
    if *out.last().unwrap() < 0 {
        content = -content;
    }
    for c in &mut out {
        c.div_exact_mut(&content);
    }
    out
}

fn monic_rational(p: &[Integer]) -> Vec<Rational> {
    let lc = p.last().unwrap();
    p.iter().map(|c| Rational::from((c.clone(), lc.clone()))).collect()
}

// ---------------------------------------------------------------------------
// Arithmetic modulo a word-sized prime

fn fp_trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow(a, p - 2, p)
}

fn fp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn fp_from_z(a: &[Integer], p: u64) -> FpPoly {
    fp_trim(
        a.iter()
            .map(|c| c.mod_u(p as u32) as u64)
            .collect(),
    )
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    fp_trim(out.into_iter().map(|c| c as u64).collect())
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let inv = fp_inv(*b.last().unwrap(), p);
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let lead = r.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let coef = (lead as u128 * inv as u128 % p as u128) as u64;
        let off = r.len() - db;
        for (i, &c) in b[..db].iter().enumerate() {
            let t = (coef as u128 * c as u128 % p as u128) as u64;
            r[off + i] = (r[off + i] + p - t) % p;
        }
        q[off] = coef;
    }
    (fp_trim(q), fp_trim(r))
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    fp_divrem(a, b, p).1
}

fn fp_monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => {
            let inv = fp_inv(lc, p);
            a.iter()
                .map(|&c| (c as u128 * inv as u128 % p as u128) as u64)
                .collect()
        }
    }
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut x = fp_monic(a, p);
    let mut y = fp_monic(b, p);
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = fp_monic(&r, p);
    }
    x
}

fn fp_xgcd(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    (r0, s0, t0)
}

fn fp_derivative(a: &[u64], p: u64) -> FpPoly {
    fp_trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (c as u128 * (i as u128 % p as u128) % p as u128) as u64)
            .collect(),
    )
}

fn fp_powmod(base: &[u64], mut e: Integer, m: &[u64], p: u64) -> FpPoly {
    let mut result = vec![1u64];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e.is_odd() {
            result = fp_rem(&fp_mul(&result, &b, p), m, p);
        }
        e >>= 1;
        if e > 0 {
            b = fp_rem(&fp_mul(&b, &b, p), m, p);
        }
    }
    result
}

/// Distinct-degree then equal-degree factorization of a monic squarefree
/// polynomial modulo an odd prime.
fn fp_factor(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let x = vec![0u64, 1];
    let mut h = x.clone();
    let mut d = 1usize;
    while rest.len() > 1 && 2 * d < rest.len() {
        h = fp_powmod(&h, Integer::from(p), &rest, p);
        let g = fp_gcd(&rest, &fp_sub(&h, &x, p), p);
        if g.len() > 1 {
            out.extend(fp_equal_degree(&g, d, p, rng));
            rest = fp_divrem(&rest, &g, p).0;
            h = fp_rem(&h, &rest, p);
        }
        d += 1;
    }
    if rest.len() > 1 {
        out.push(fp_monic(&rest, p));
    }
    out
}

fn fp_equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.len() - 1;
    if n == d {
        return vec![fp_monic(f, p)];
    }
    let exp = (Integer::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a: FpPoly = fp_trim((0..n).map(|_| rng.random_range(0..p)).collect());
        if a.len() <= 1 {
            continue;
        }
        let b = fp_powmod(&a, exp.clone(), f, p);
        let g = fp_gcd(f, &fp_sub(&b, &[1], p), p);
        if g.len() > 1 && g.len() < f.len() {
            let other = fp_divrem(f, &g, p).0;
            let mut out = fp_equal_degree(&g, d, p, rng);
            out.extend(fp_equal_degree(&other, d, p, rng));
            return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Arithmetic modulo a prime power

fn zm_reduce(a: &[Integer], m: &Integer) -> ZPoly {
    let mut out: ZPoly = a
        .iter()
        .map(|c| {
            let mut r = Integer::from(c % m);
            if r < 0 {
                r += m;
            }
            r
        })
        .collect();
    while out.last().is_some_and(|c| *c == 0) {
        out.pop();
    }
    out
}

fn z_add(a: &[Integer], b: &[Integer]) -> ZPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => Integer::from(x + y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            _ => unreachable!(),
        })
        .collect()
}

fn z_sub(a: &[Integer], b: &[Integer]) -> ZPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => Integer::from(x - y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => Integer::from(-y),
            _ => unreachable!(),
        })
        .collect()
}

fn z_mul(a: &[Integer], b: &[Integer]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Division by a monic polynomial modulo `m`.
fn zm_divrem_monic(a: &[Integer], b: &[Integer], m: &Integer) -> (ZPoly, ZPoly) {
    let mut r = zm_reduce(a, m);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let db = b.len() - 1;
    let mut q = vec![Integer::new(); r.len() - db];
    while r.len() > db {
        let lead = r.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let off = r.len() - db;
        for (i, c) in b[..db].iter().enumerate() {
            r[off + i] -= Integer::from(&lead * c);
            r[off + i] %= m;
        }
        q[off] = lead;
    }
    (zm_reduce(&q, m), zm_reduce(&r, m))
}

fn z_from_fp(a: &[u64]) -> ZPoly {
    a.iter().map(|&c| Integer::from(c)).collect()
}

/// One quadratic Hensel step: from `f ≡ g·h`, `s·g + t·h ≡ 1 (mod m)` with
/// `h` monic, produce the same relations modulo `m²`.
fn hensel_step(
    f: &[Integer],
    g: &[Integer],
    h: &[Integer],
    s: &[Integer],
    t: &[Integer],
    m: &Integer,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = Integer::from(m * m);
    let e = zm_reduce(&z_sub(f, &z_mul(g, h)), &m2);
    let (q, r) = zm_divrem_monic(&z_mul(s, &e), h, &m2);
    let g_new = zm_reduce(&z_add(&z_add(g, &z_mul(t, &e)), &z_mul(&q, g)), &m2);
    let h_new = zm_reduce(&z_add(h, &r), &m2);
    let b = zm_reduce(
        &z_sub(&z_add(&z_mul(s, &g_new), &z_mul(t, &h_new)), &[Integer::from(1)]),
        &m2,
    );
    let (c, d) = zm_divrem_monic(&z_mul(s, &b), &h_new, &m2);
    let s_new = zm_reduce(&z_sub(s, &d), &m2);
    let t_new = zm_reduce(&z_sub(&z_sub(t, &z_mul(t, &b)), &z_mul(&c, &g_new)), &m2);
    (g_new, h_new, s_new, t_new)
}

/// Lifts `f ≡ lc(f)·∏ factors (mod p)` to monic factors modulo `p^(2^steps)`.
fn multifactor_lift(f: &[Integer], factors: &[FpPoly], p: u64, steps: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        // f ≡ lc·g  ⇒  g ≡ lc⁻¹·f
        let mut m = Integer::from(p);
        for _ in 0..steps {
            m.square_mut();
        }
        let lc = f.last().unwrap();
        let inv = lc.clone().invert(&m).expect("leading coefficient invertible");
        let g = zm_reduce(
            &f.iter().map(|c| Integer::from(c * &inv)).collect::<ZPoly>(),
            &m,
        );
        return vec![g];
    }
    let half = factors.len() / 2;
    let (left, right) = factors.split_at(half);
    let lc_p = f.last().unwrap().mod_u(p as u32) as u64;
    let mut g_p = vec![lc_p];
    for fac in left {
        g_p = fp_mul(&g_p, fac, p);
    }
    let mut h_p = vec![1u64];
    for fac in right {
        h_p = fp_mul(&h_p, fac, p);
    }
    let (gcd, s_p, t_p) = fp_xgcd(&g_p, &h_p, p);
    let ginv = fp_inv(gcd[0], p);
    let s_p: FpPoly = s_p.iter().map(|&c| (c as u128 * ginv as u128 % p as u128) as u64).collect();
    let t_p: FpPoly = t_p.iter().map(|&c| (c as u128 * ginv as u128 % p as u128) as u64).collect();
    let (mut g, mut h, mut s, mut t) = (z_from_fp(&g_p), z_from_fp(&h_p), z_from_fp(&s_p), z_from_fp(&t_p));
    let mut m = Integer::from(p);
    for _ in 0..steps {
        (g, h, s, t) = hensel_step(f, &g, &h, &s, &t, &m);
        m.square_mut();
    }
    let mut out = multifactor_lift(&g, left, p, steps);
    out.extend(multifactor_lift(&h, right, p, steps));
    out
}

fn symmetric(a: &[Integer], m: &Integer) -> ZPoly {
    let half = Integer::from(m >> 1);
    a.iter()
        .map(|c| {
            let mut r = Integer::from(c % m);
            if r < 0 {
                r += m;
            }
            if r > half {
                r -= m;
            }
            r
        })
        .collect()
}

/// Exact division over Z; `None` if not exact.
fn z_div_exact(a: &[Integer], b: &[Integer]) -> Option<ZPoly> {
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut q = vec![Integer::new(); r.len() - db];
    while r.len() > db {
        let lead = r.pop().unwrap();
        if lead == 0 {
            continue;
        }
        if !lead.is_divisible(lb) {
            return None;
        }
        let coef = Integer::from(lead.div_exact_ref(lb));
        let off = r.len() - db;
        for (i, c) in b[..db].iter().enumerate() {
            r[off + i] -= Integer::from(&coef * c);
        }
        q[off] = coef;
    }
    r.iter().all(|c| *c == 0).then_some(q)
}

fn primitive(mut a: ZPoly) -> ZPoly {
    let mut content = Integer::new();
    for c in &a {
        content.gcd_mut(c);
    }
    if *a.last().unwrap() < 0 {
        content = -content;
    }
    for c in &mut a {
        c.div_exact_mut(&content);
    }
    a
}

const PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];
const LARGE_PRIMES: [u64; 8] = [101, 103, 107, 109, 113, 127, 131, 137];

/// Irreducible factors over Z of a primitive squarefree polynomial with
/// positive leading coefficient and nonzero constant term.
fn zassenhaus(f: &[Integer]) -> Vec<ZPoly> {
    let n = f.len() - 1;
    let lc = f.last().unwrap().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);

    // Pick the prime giving the fewest modular factors among a few candidates.
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for &p in PRIMES.iter().chain(LARGE_PRIMES.iter()) {
        if lc.is_divisible_u(p as u32) {
            continue;
        }
        let fp = fp_from_z(f, p);
        if fp.len() != f.len() {
            continue;
        }
        if fp_gcd(&fp, &fp_derivative(&fp, p), p).len() > 1 {
            continue;
        }
        let facs = fp_factor(&fp_monic(&fp, p), p, &mut rng);
        if facs.len() == 1 {
            return vec![f.to_vec()];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (p, mut modular) = best.expect("no suitable prime for modular factorization");
    modular.sort();

    // Coefficient bound for factors: 2^n · ‖f‖₂ · lc, with slack.
    let mut norm2 = Integer::new();
    for c in f {
        norm2 += Integer::from(c * c);
    }
    let norm = norm2.sqrt() + 1u32;
    let bound = (norm << (n as u32 + 1)) * &lc;
    let mut steps = 0u32;
    let mut m = Integer::from(p);
    while m <= bound {
        m.square_mut();
        steps += 1;
    }
    let lifted = multifactor_lift(f, &modular, p, steps);

    let mut remaining: Vec<ZPoly> = lifted;
    let mut f_cur = f.to_vec();
    let mut result = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        let r = remaining.len();
        let mut combo: Vec<usize> = (0..size).collect();
        'search: loop {
            let lc_cur = f_cur.last().unwrap().clone();
            let mut g = vec![lc_cur.clone()];
            for &i in &combo {
                g = zm_reduce(&z_mul(&g, &remaining[i]), &m);
            }
            let g = primitive(symmetric(&g, &m));
            if let Some(q) = z_div_exact(&f_cur, &g) {
                result.push(g);
                f_cur = primitive(q);
                for &i in combo.iter().rev() {
                    remaining.remove(i);
                }
                found = true;
                break 'search;
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break 'search;
                }
                i -= 1;
                if combo[i] < r - size + i {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    continue 'search;
                }
            }
        }
        if !found {
            size += 1;
        }
    }
    if f_cur.len() > 1 {
        result.push(f_cur);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(cs: &[i64]) -> Vec<Rational> {
        cs.iter().map(|&c| Rational::from(c)).collect()
    }

    fn mul_all(fs: &[Vec<Rational>]) -> Vec<Rational> {
        let k = Field::rationals();
        let mut acc = vec![k.one()];
        for f in fs {
            let e: Vec<Elem> = f.iter().cloned().map(Elem::Rat).collect();
            acc = upoly::mul(&k, &acc, &e);
        }
        acc.iter().map(|c| c.as_rat().clone()).collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(
            factor_rational(&qp(&[-1, 0, 1])),
            vec![(qp(&[-1, 1]), 1), (qp(&[1, 1]), 1)]
        );
        assert_eq!(factor_rational(&qp(&[-2, 0, 1])), vec![(qp(&[-2, 0, 1]), 1)]);
        let f = factor_rational(&qp(&[0, 0, 1, 1]));
        assert_eq!(f, vec![(qp(&[0, 1]), 2), (qp(&[1, 1]), 1)]);
    }

    #[test]
    fn swinnerton_dyer_like_is_irreducible() {
        // x^4 - 10x^2 + 1 splits modulo every prime but is irreducible over Q.
        let f = factor_rational(&qp(&[1, 0, -10, 0, 1]));
        assert_eq!(f, vec![(qp(&[1, 0, -10, 0, 1]), 1)]);
    }

    #[test]
    fn product_is_recovered() {
        let parts = vec![
            qp(&[1, 0, 1]),
            qp(&[-3, 2]),
            qp(&[5, -1, 0, 7]),
            qp(&[1, 1, 1, 1, 1]),
            qp(&[-2, 0, 0, 0, 0, 0, 0, 1]),
        ];
        let prod = mul_all(&parts);
        let fac = factor_rational(&prod);
        assert_eq!(fac.len(), parts.len());
        let lc = prod.last().unwrap().clone();
        let mut rebuilt = mul_all(&fac.iter().map(|(f, _)| f.clone()).collect::<Vec<_>>());
        for c in &mut rebuilt {
            *c *= &lc;
        }
        assert_eq!(rebuilt, prod);
    }

    #[test]
    fn rational_coefficients() {
        // (x - 1/2)(x^2 + 1/3)
        let f = vec![
            Rational::from((-1, 6)),
            Rational::from((1, 3)),
            Rational::from((-1, 2)),
            Rational::from(1),
        ];
        let fac = factor_rational(&f);
        assert_eq!(fac.len(), 2);
        assert_eq!(fac[0].0, vec![Rational::from((-1, 2)), Rational::from(1)]);
    }
}
