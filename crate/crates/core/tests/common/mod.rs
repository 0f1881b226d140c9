#![allow(dead_code)]

use polar_morse::poly::Poly;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational of height at most `h`.
pub fn small_rational(rng: &mut impl Rng, h: i64) -> Rational {
    loop {
        let p = rng.random_range(-h..=h);
        if p != 0 {
            return Rational::from((p, rng.random_range(1..=h)));
        }
    }
}

/// Nonconstant polynomial of total degree `2..=max_deg`, each monomial
/// present with probability one half.
pub fn random_poly(rng: &mut impl Rng, max_deg: u32) -> Poly {
    loop {
        let d = rng.random_range(2..=max_deg);
        let mut terms = Vec::new();
        for i in 0..=d {
            for j in 0..=d - i {
                if i + j > 0 && rng.random_bool(0.5) {
                    terms.push(([i, j, 0], small_rational(rng, 9)));
                }
            }
        }
        let p = Poly::from_terms(2, terms);
        if p.total_degree().unwrap_or(0) >= 2 {
            return p;
        }
    }
}
