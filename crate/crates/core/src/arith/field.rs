//! Towers of simple algebraic extensions of the rationals.
//!
//! An element of a tower of depth `k` is a polynomial in the top generator
//! `θ_k` of degree below `deg m_k`, with coefficients in the tower of depth
//! `k - 1`. Depth 0 is the rationals. Elements carry no reference to their
//! field; every operation goes through a [`Field`] handle, which is cheap to
//! clone and shares the level data.

use std::fmt;
use std::sync::Arc;

use rug::Rational;
use thiserror::Error;

use super::upoly;

/// Default cap on the degree of a single extension level.
pub const DEFAULT_LEVEL_DEGREE_CAP: usize = 16;
/// Cap on the absolute degree `[K : Q]` of any tower.
pub const ABSOLUTE_DEGREE_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("extension too large: degree {degree} exceeds cap {cap}")]
    ExtensionTooLarge { degree: usize, cap: usize },
    #[error("minimal polynomial must be monic of degree at least 2")]
    BadModulus,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Rat(Rational),
    Ext(Vec<Elem>),
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Rat(r) => write!(f, "{r}"),
            Elem::Ext(v) => {
                write!(f, "[")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c:?}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl Elem {
    pub fn as_rat(&self) -> &Rational {
        match self {
            Elem::Rat(r) => r,
            Elem::Ext(_) => panic!("expected a rational element"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Rat(r) => r.is_zero(),
            Elem::Ext(v) => v.is_empty(),
        }
    }

    fn coeffs(&self) -> &[Elem] {
        match self {
            Elem::Ext(v) => v,
            Elem::Rat(_) => panic!("expected an extension element"),
        }
    }

    fn into_coeffs(self) -> Vec<Elem> {
        match self {
            Elem::Ext(v) => v,
            Elem::Rat(_) => panic!("expected an extension element"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub name: String,
    /// Monic minimal polynomial over the level below, low degree first.
    pub modulus: Vec<Elem>,
}

impl Level {
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }
}

#[derive(Clone)]
pub struct Field {
    levels: Arc<Vec<Level>>,
    depth: usize,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q")?;
        for lvl in &self.levels[..self.depth] {
            write!(f, "({})", lvl.name)?;
        }
        Ok(())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.depth == other.depth
            && (Arc::ptr_eq(&self.levels, &other.levels)
                || self.levels[..self.depth] == other.levels[..other.depth])
    }
}

impl Eq for Field {}

impl Default for Field {
    fn default() -> Self {
        Self::rationals()
    }
}

impl Field {
    pub fn rationals() -> Self {
        Field {
            levels: Arc::new(Vec::new()),
            depth: 0,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_rationals(&self) -> bool {
        self.depth == 0
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels[..self.depth]
    }

    pub fn top(&self) -> &Level {
        &self.levels[self.depth - 1]
    }

    /// Degree of the top level over the one below (1 for the rationals).
    pub fn relative_degree(&self) -> usize {
        if self.depth == 0 {
            1
        } else {
            self.top().degree()
        }
    }

    pub fn absolute_degree(&self) -> usize {
        self.levels().iter().map(Level::degree).product()
    }

    /// The subfield of the given depth.
    pub fn subfield(&self, depth: usize) -> Field {
        assert!(depth <= self.depth);
        Field {
            levels: self.levels.clone(),
            depth,
        }
    }

    pub fn base(&self) -> Field {
        self.subfield(self.depth - 1)
    }

    /// Is `other` a subfield of `self` (same level data on a prefix)?
    pub fn contains_field(&self, other: &Field) -> bool {
        other.depth <= self.depth
            && (Arc::ptr_eq(&self.levels, &other.levels)
                || self.levels[..other.depth] == other.levels[..other.depth])
    }

    /// Adjoins a root of `modulus` (monic, irreducible over `self`).
    pub fn extend(&self, name: impl Into<String>, modulus: Vec<Elem>) -> Result<Field, FieldError> {
        self.extend_with_cap(name, modulus, DEFAULT_LEVEL_DEGREE_CAP)
    }

    pub fn extend_with_cap(
        &self,
        name: impl Into<String>,
        modulus: Vec<Elem>,
        cap: usize,
    ) -> Result<Field, FieldError> {
        if modulus.len() < 3 || !self.is_one(modulus.last().unwrap()) {
            return Err(FieldError::BadModulus);
        }
        let degree = modulus.len() - 1;
        if degree > cap {
            return Err(FieldError::ExtensionTooLarge { degree, cap });
        }
        let absolute = self.absolute_degree() * degree;
        if absolute > ABSOLUTE_DEGREE_CAP {
            return Err(FieldError::ExtensionTooLarge {
                degree: absolute,
                cap: ABSOLUTE_DEGREE_CAP,
            });
        }
        let mut levels: Vec<Level> = self.levels[..self.depth].to_vec();
        levels.push(Level {
            name: name.into(),
            modulus,
        });
        Ok(Field {
            depth: levels.len(),
            levels: Arc::new(levels),
        })
    }

    // ---- constructors -------------------------------------------------

    pub fn zero(&self) -> Elem {
        if self.depth == 0 {
            Elem::Rat(Rational::new())
        } else {
            Elem::Ext(Vec::new())
        }
    }

    pub fn one(&self) -> Elem {
        self.from_rat(Rational::from(1))
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_rat(Rational::from(n))
    }

    pub fn from_rat(&self, r: Rational) -> Elem {
        self.lift(&Field::rationals(), &Elem::Rat(r))
    }

    /// The generator of the top level.
    pub fn generator(&self) -> Elem {
        assert!(self.depth > 0, "the rationals have no generator");
        let base = self.base();
        let mut v = vec![base.zero(), base.one()];
        if self.top().degree() == 1 {
            // Degree-1 levels never get built, but keep reduction honest.
            v = upoly::rem(&base, &v, &self.top().modulus);
        }
        Elem::Ext(v)
    }

    /// The generator of level `depth` (1-based), embedded into `self`.
    pub fn level_generator(&self, depth: usize) -> Elem {
        let sub = self.subfield(depth);
        self.lift(&sub, &sub.generator())
    }

    /// Embeds an element of a subfield into this field.
    pub fn lift(&self, sub: &Field, e: &Elem) -> Elem {
        debug_assert!(self.contains_field(sub));
        let mut out = e.clone();
        for _ in sub.depth..self.depth {
            out = if out.is_zero() {
                Elem::Ext(Vec::new())
            } else {
                Elem::Ext(vec![out])
            };
        }
        out
    }

    /// Returns the element as a rational number when it lies in Q.
    pub fn to_rational(&self, e: &Elem) -> Option<Rational> {
        let mut cur = e;
        for _ in 0..self.depth {
            let v = cur.coeffs();
            match v.len() {
                0 => return Some(Rational::new()),
                1 => cur = &v[0],
                _ => return None,
            }
        }
        Some(cur.as_rat().clone())
    }

    /// Returns the element of the given subfield when `e` lies in it.
    pub fn to_subfield(&self, depth: usize, e: &Elem) -> Option<Elem> {
        let mut cur = e.clone();
        for _ in depth..self.depth {
            let mut v = cur.into_coeffs();
            match v.len() {
                0 => return Some(self.subfield(depth).zero()),
                1 => cur = v.pop().unwrap(),
                _ => return None,
            }
        }
        Some(cur)
    }

    // ---- predicates ---------------------------------------------------

    pub fn is_zero(&self, e: &Elem) -> bool {
        e.is_zero()
    }

    pub fn is_one(&self, e: &Elem) -> bool {
        match self.to_rational(e) {
            Some(r) => r == 1,
            None => false,
        }
    }

    // ---- arithmetic ---------------------------------------------------

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(Rational::from(x + y)),
            (Elem::Ext(x), Elem::Ext(y)) => {
                let base = self.base();
                Elem::Ext(upoly::add(&base, x, y))
            }
            _ => panic!("mixed-depth addition"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(Rational::from(x - y)),
            (Elem::Ext(x), Elem::Ext(y)) => {
                let base = self.base();
                Elem::Ext(upoly::sub(&base, x, y))
            }
            _ => panic!("mixed-depth subtraction"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Rat(x) => Elem::Rat(Rational::from(-x)),
            Elem::Ext(x) => {
                let base = self.base();
                Elem::Ext(x.iter().map(|c| base.neg(c)).collect())
            }
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(Rational::from(x * y)),
            (Elem::Ext(x), Elem::Ext(y)) => {
                if x.is_empty() || y.is_empty() {
                    return Elem::Ext(Vec::new());
                }
                let base = self.base();
                if x.len() == 1 {
                    return Elem::Ext(upoly::scale(&base, y, &x[0]));
                }
                if y.len() == 1 {
                    return Elem::Ext(upoly::scale(&base, x, &y[0]));
                }
                let prod = upoly::mul(&base, x, y);
                Elem::Ext(upoly::rem_monic(&base, prod, &self.top().modulus))
            }
            _ => panic!("mixed-depth multiplication"),
        }
    }

    pub fn scale_rat(&self, a: &Elem, r: &Rational) -> Elem {
        if r.is_zero() {
            return self.zero();
        }
        match a {
            Elem::Rat(x) => Elem::Rat(Rational::from(x * r)),
            Elem::Ext(x) => {
                let base = self.base();
                Elem::Ext(x.iter().map(|c| base.scale_rat(c, r)).collect())
            }
        }
    }

    pub fn square(&self, a: &Elem) -> Elem {
        self.mul(a, a)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        match a {
            Elem::Rat(x) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Elem::Rat(Rational::from(x.recip_ref())))
                }
            }
            Elem::Ext(x) => {
                if x.is_empty() {
                    return None;
                }
                let base = self.base();
                if x.len() == 1 {
                    let c = base.inv(&x[0])?;
                    return Some(Elem::Ext(vec![c]));
                }
                let (g, s, _) = upoly::xgcd(&base, x, &self.top().modulus);
                // g is a nonzero constant because the modulus is irreducible.
                assert_eq!(g.len(), 1, "modulus not irreducible over its base");
                let ginv = base.inv(&g[0])?;
                Some(Elem::Ext(upoly::scale(&base, &s, &ginv)))
            }
        }
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        Some(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, e: i64) -> Option<Elem> {
        if e < 0 {
            return self.pow(&self.inv(a)?, -e);
        }
        let mut result = self.one();
        let mut base = a.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.square(&base);
            }
        }
        Some(result)
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Elem>) -> Elem {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}
