use rug::Rational;

use crate::arith::factor::factor_univariate;
use crate::arith::{upoly, Elem, Field};
use crate::poly::{BiPoly, Poly};

use super::newton::lower_edges;
use super::series::{eval_poly, LaurentSeries, EXACT};
use super::{Chart, ChartPoint, PuiseuxError};

const MAX_DEPTH: usize = 64;

/// One branch, or one class of conjugate branches, of a curve germ.
///
/// `param_x`, `param_y` parametrize the local coordinates of the chart,
/// translated so that the center is the origin. `param_x` is always a
/// monomial `c·s^P` (or zero for the branch `x = 0`).
#[derive(Clone, Debug)]
pub struct PuiseuxBranch {
    pub center: ChartPoint,
    /// Coefficient field of the expansion, an extension of the center field.
    pub field: Field,
    pub param_x: LaurentSeries,
    pub param_y: LaurentSeries,
    /// Number of conjugate branches over the center field represented.
    pub conj_multiplicity: u32,
    /// The defining polynomial vanishes along the branch below this order.
    pub truncation_order: i64,
}

impl PuiseuxBranch {
    /// Coordinates along the branch in the affine plane, as Laurent series.
    pub fn affine_coords(&self) -> [LaurentSeries; 2] {
        let k = &self.field;
        let a = k.lift(&self.center.field, &self.center.a);
        let b = k.lift(&self.center.field, &self.center.b);
        let shift = |c: &Elem, s: &LaurentSeries| s.add(&LaurentSeries::constant(k, c.clone()));
        match self.center.chart {
            Chart::Affine => [shift(&a, &self.param_x), shift(&b, &self.param_y)],
            Chart::InfinityY | Chart::InfinityX => {
                let zinv = self
                    .param_x
                    .inv(1)
                    .expect("the line at infinity is not a polar component");
                let w = shift(&a, &self.param_y).mul(&zinv);
                if self.center.chart == Chart::InfinityY {
                    [w, zinv]
                } else {
                    [zinv, w]
                }
            }
        }
    }

    /// Homogeneous coordinates `[X:Y:Z]` along the branch in its chart.
    pub fn projective_coords(&self) -> [LaurentSeries; 3] {
        let k = &self.field;
        let a = k.lift(&self.center.field, &self.center.a);
        let b = k.lift(&self.center.field, &self.center.b);
        let one = LaurentSeries::constant(k, k.one());
        let shift = |c: &Elem, s: &LaurentSeries| s.add(&LaurentSeries::constant(k, c.clone()));
        match self.center.chart {
            Chart::Affine => [shift(&a, &self.param_x), shift(&b, &self.param_y), one],
            Chart::InfinityY => [shift(&a, &self.param_y), one, self.param_x.clone()],
            Chart::InfinityX => [one, shift(&a, &self.param_y), self.param_x.clone()],
        }
    }

    /// Ramification of the chart's first coordinate, `ord_s param_x`.
    pub fn x_order(&self) -> Option<i64> {
        self.param_x.order()
    }
}

#[derive(Clone)]
struct Step {
    p: u32,
    q: u32,
    lambda: Elem,
    mu: Elem,
    field: Field,
}

enum Tail {
    /// `y = 0` exactly at this level.
    Zero,
    /// Power series coefficients of `y` known below `s^n`.
    Series(Vec<Elem>, i64),
}

struct Leaf {
    field: Field,
    steps: Vec<Step>,
    tail: Tail,
}

/// Branches at `center` of the curve `f = 0`, where `f` is affine (two
/// variables) for an affine center and homogeneous (three variables) at
/// infinity.
pub fn expand_at(f: &Poly, center: &ChartPoint, target: i64) -> Result<Vec<PuiseuxBranch>, PuiseuxError> {
    let local = BiPoly::from_poly(f, &center.local_map());
    expand_branches(&local, center, target)
}

/// Branches through the origin of `F(x, y) = 0`, already written in the
/// local coordinates of `center`. `F` must be reduced.
pub fn expand_branches(
    f: &BiPoly,
    center: &ChartPoint,
    target: i64,
) -> Result<Vec<PuiseuxBranch>, PuiseuxError> {
    if f.is_zero() {
        return Err(PuiseuxError::ZeroPolynomial);
    }
    let k = f.field().clone();
    if !k.is_zero(&f.coeff(0, 0)) {
        return Err(PuiseuxError::NotThroughCenter);
    }
    let target = target.max(1);
    let mut out = Vec::new();
    let mut g = f.clone();
    let xv = g.x_valuation().unwrap();
    if xv > 1 {
        return Err(PuiseuxError::NotSquarefree);
    }
    if xv == 1 {
        out.push(make_branch(
            f,
            center,
            &k,
            LaurentSeries::zero(&k, EXACT),
            LaurentSeries::monomial(&k, k.one(), 1),
        )?);
        g = g.divide_monomial(1, 0);
    }
    let mut leaves = Vec::new();
    let mut steps = Vec::new();
    descend(g, &mut steps, target, &mut leaves)?;
    for leaf in leaves {
        let (x, y) = rebuild(&leaf);
        out.push(make_branch(f, center, &leaf.field, x, y)?);
    }
    Ok(out)
}

fn make_branch(
    f: &BiPoly,
    center: &ChartPoint,
    field: &Field,
    x: LaurentSeries,
    y: LaurentSeries,
) -> Result<PuiseuxBranch, PuiseuxError> {
    let residual = eval_bipoly(f, &x, &y);
    if !residual.is_known_zero() {
        return Err(PuiseuxError::Residual(residual.order().unwrap()));
    }
    let conj = field.absolute_degree() / center.field.absolute_degree();
    Ok(PuiseuxBranch {
        center: center.clone(),
        field: field.clone(),
        param_x: x,
        param_y: y,
        conj_multiplicity: conj as u32,
        truncation_order: residual.truncation(),
    })
}

fn descend(
    g: BiPoly,
    steps: &mut Vec<Step>,
    target: i64,
    leaves: &mut Vec<Leaf>,
) -> Result<(), PuiseuxError> {
    if steps.len() > MAX_DEPTH {
        return Err(PuiseuxError::NotSquarefree);
    }
    let k = g.field().clone();
    let mut g = g;
    let yv = g.y_valuation().unwrap_or(0);
    if yv > 1 {
        return Err(PuiseuxError::NotSquarefree);
    }
    if yv == 1 {
        leaves.push(leaf(steps, &k, Tail::Zero));
        g = g.divide_monomial(0, 1);
    }
    if !k.is_zero(&g.coeff(0, 0)) {
        return Ok(());
    }
    if !k.is_zero(&g.coeff(0, 1)) {
        let (coeffs, n) = hensel(&g, target);
        leaves.push(leaf(steps, &k, Tail::Series(coeffs, n)));
        return Ok(());
    }
    for seg in lower_edges(&g) {
        for (phi, _) in factor_univariate(&k, &seg.edge_poly) {
            let (k2, xi) = if phi.len() == 2 {
                (k.clone(), k.neg(&phi[0]))
            } else {
                let name = format!("w{}", k.depth() + 1);
                let k2 = k.extend(name, phi)?;
                let xi = k2.generator();
                (k2, xi)
            };
            let (u, v) = bezout(seg.p as i64, seg.q as i64);
            let lambda = k2.pow(&xi, v).unwrap();
            let mu = k2.pow(&xi, u).unwrap();
            let g2 = substitute(&g.lift_to(&k2), seg.p, seg.q, &lambda, &mu, seg.value);
            steps.push(Step {
                p: seg.p,
                q: seg.q,
                lambda,
                mu,
                field: k2,
            });
            let r = descend(g2, steps, target, leaves);
            steps.pop();
            r?;
        }
    }
    Ok(())
}

fn leaf(steps: &[Step], field: &Field, tail: Tail) -> Leaf {
    Leaf {
        field: field.clone(),
        steps: steps.to_vec(),
        tail,
    }
}

/// `(u, v)` with `p·u - q·v = 1`.
fn bezout(p: i64, q: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (p, q);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    debug_assert_eq!(r0, 1);
    (s0, -t0)
}

/// `G(λ s^p, s^q (μ + y)) / s^l`.
fn substitute(g: &BiPoly, p: u32, q: u32, lambda: &Elem, mu: &Elem, l: u32) -> BiPoly {
    let k = g.field();
    let dy = g.degree_y().unwrap_or(0) as usize;
    let mut mu_pow = vec![k.one()];
    for _ in 0..dy {
        mu_pow.push(k.mul(mu_pow.last().unwrap(), mu));
    }
    let binom = binomials(dy);
    let mut out = BiPoly::zero(k);
    for (&(i, j), c) in g.terms() {
        let e = p * i + q * j - l;
        let base = k.mul(c, &k.pow(lambda, i as i64).unwrap());
        for t in 0..=j as usize {
            let coef = k.mul(&base, &mu_pow[j as usize - t]);
            let coef = k.scale_rat(&coef, &Rational::from(binom[j as usize][t]));
            out.add_term(e, t as u32, coef);
        }
    }
    out
}

fn binomials(n: usize) -> Vec<Vec<u64>> {
    let mut rows = vec![vec![1u64]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![1u64; i + 1];
        for t in 1..i {
            row[t] = prev[t - 1] + prev[t];
        }
        rows.push(row);
    }
    rows
}

/// Solves `G(s, y(s)) = 0`, `y(0) = 0`, modulo `s^n` when `G_y(0,0) ≠ 0`.
fn hensel(g: &BiPoly, n: i64) -> (Vec<Elem>, i64) {
    let k = g.field();
    let n = n as usize;
    let rows = g.coeffs_in_y();
    let drows = g.derivative_y().coeffs_in_y();
    let mut y: Vec<Elem> = vec![k.zero()];
    let mut prec = 1usize;
    while prec < n {
        prec = (2 * prec).min(n);
        let val = ps_eval(k, &rows, &y, prec);
        let der = ps_eval(k, &drows, &y, prec);
        let step = ps_mul(k, &val, &ps_inv(k, &der, prec), prec);
        y.resize(prec, k.zero());
        for (i, c) in step.iter().enumerate() {
            y[i] = k.sub(&y[i], c);
        }
    }
    y.truncate(n);
    (y, n as i64)
}

fn ps_mul(k: &Field, a: &[Elem], b: &[Elem], n: usize) -> Vec<Elem> {
    let mut out = vec![k.zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if k.is_zero(y) {
                continue;
            }
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

fn ps_inv(k: &Field, a: &[Elem], n: usize) -> Vec<Elem> {
    let a0 = k.inv(&a[0]).expect("unit constant term");
    let mut b = vec![a0.clone()];
    for m in 1..n {
        let mut acc = k.zero();
        for i in 1..=m.min(a.len().saturating_sub(1)) {
            acc = k.add(&acc, &k.mul(&a[i], &b[m - i]));
        }
        b.push(k.neg(&k.mul(&acc, &a0)));
    }
    b
}

/// `Σ_j rows[j](s) y^j mod s^n` by Horner.
fn ps_eval(k: &Field, rows: &[Vec<Elem>], y: &[Elem], n: usize) -> Vec<Elem> {
    let mut acc: Vec<Elem> = vec![k.zero(); n];
    for row in rows.iter().rev() {
        acc = ps_mul(k, &acc, y, n);
        for (i, c) in row.iter().enumerate().take(n) {
            acc[i] = k.add(&acc[i], c);
        }
    }
    acc
}

fn rebuild(leaf: &Leaf) -> (LaurentSeries, LaurentSeries) {
    let kf = &leaf.field;
    let mut x = LaurentSeries::monomial(kf, kf.one(), 1);
    let mut y = match &leaf.tail {
        Tail::Zero => LaurentSeries::zero(kf, EXACT),
        Tail::Series(c, n) => LaurentSeries::new(kf, 0, c.clone(), *n),
    };
    for st in leaf.steps.iter().rev() {
        let lambda = kf.lift(&st.field, &st.lambda);
        let mu = kf.lift(&st.field, &st.mu);
        y = x.pow(st.q).mul(&y.add(&LaurentSeries::constant(kf, mu)));
        x = x.pow(st.p).scale(&lambda);
    }
    (x, y)
}

fn eval_bipoly(f: &BiPoly, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
    let kf = x.field().clone();
    let mut acc = LaurentSeries::zero(&kf, EXACT);
    let rows = f.coeffs_in_y();
    for row in rows.iter().rev() {
        acc = acc.mul(y);
        let mut r = LaurentSeries::zero(&kf, EXACT);
        for c in row.iter().rev() {
            r = r.mul(x).add(&LaurentSeries::constant(&kf, kf.lift(f.field(), c)));
        }
        acc = acc.add(&r);
    }
    acc
}

/// `F(γ(s))` for the local defining polynomial; zero below the branch's
/// truncation order.
pub fn branch_residual(f: &BiPoly, branch: &PuiseuxBranch) -> LaurentSeries {
    eval_bipoly(f, &branch.param_x, &branch.param_y)
}

/// `num/den` along the branch, in affine coordinates.
pub fn compose_on_branch(
    num: &Poly,
    den: &Poly,
    branch: &PuiseuxBranch,
    max_terms: usize,
) -> Result<LaurentSeries, PuiseuxError> {
    let xy = branch.affine_coords();
    let n = eval_poly(num, &xy);
    let d = eval_poly(den, &xy);
    Ok(n.div(&d, max_terms)?)
}

/// Checks `Σ conj · ord_s(y - κx) = ord_x F(x, κx)` for the branches at
/// one center. Returns both sides.
pub fn check_multiplicity_sum(
    f: &BiPoly,
    branches: &[PuiseuxBranch],
    kappa: &Rational,
) -> Result<(i64, i64), PuiseuxError> {
    let k = f.field();
    let kk = k.from_rat(kappa.clone());
    // F(x, κx) as a polynomial in x
    let mut line: Vec<Elem> = Vec::new();
    for (&(i, j), c) in f.terms() {
        let e = (i + j) as usize;
        if line.len() <= e {
            line.resize(e + 1, k.zero());
        }
        let t = k.mul(c, &k.pow(&kk, j as i64).unwrap());
        line[e] = k.add(&line[e], &t);
    }
    let line = upoly::trim(k, line);
    let rhs = line.iter().take_while(|c| k.is_zero(c)).count() as i64;
    let mut lhs = 0i64;
    for b in branches {
        let kb = &b.field;
        let kap = kb.from_rat(kappa.clone());
        let d = b.param_y.sub(&b.param_x.scale(&kap));
        let o = d.order().ok_or(PuiseuxError::Residual(d.truncation()))?;
        lhs += b.conj_multiplicity as i64 * o;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, LinearMap};

    fn origin() -> ChartPoint {
        let q = Field::rationals();
        ChartPoint::affine(&q, q.zero(), q.zero())
    }

    fn local(s: &str) -> BiPoly {
        let q = Field::rationals();
        let f = parse_poly(s, &["x", "y"]).unwrap();
        BiPoly::from_poly(&f, &LinearMap::translate(&q, &q.zero(), &q.zero()))
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn cusp_parametrization() {
        let f = local("y^2 - x^3");
        let bs = expand_branches(&f, &origin(), 10).unwrap();
        assert_eq!(bs.len(), 1);
        let b = &bs[0];
        assert_eq!(b.conj_multiplicity, 1);
        assert_eq!(b.param_x.order(), Some(2));
        assert_eq!(b.param_y.order(), Some(3));
        assert!(b.truncation_order >= 10);
        // x = λ s^2, y = μ s^3 with μ^2 = λ^3
        let k = &b.field;
        let l = b.param_x.coeff(2);
        let m = b.param_y.coeff(3);
        assert_eq!(k.mul(&m, &m), k.pow(&l, 3).unwrap());
    }

    #[test]
    fn node_has_two_rational_branches() {
        let f = local("y^2 - x^2*(1 + x)");
        let bs = expand_branches(&f, &origin(), 8).unwrap();
        assert_eq!(bs.len(), 2);
        let q = Field::rationals();
        let mut signs = Vec::new();
        for b in &bs {
            assert_eq!(b.conj_multiplicity, 1);
            assert_eq!(b.param_x.order(), Some(1));
            // y = σ·x (1 + x/2 - x^2/8 + ...) with x = λ s, σ = ±1
            let lam = q.to_rational(&b.param_x.coeff(1)).unwrap();
            let c = |e| q.to_rational(&b.param_y.coeff(e)).unwrap();
            let sigma = Rational::from(&c(1) / &lam);
            assert_eq!(c(2), sigma.clone() * lam.clone() * lam.clone() * r(1, 2));
            assert_eq!(c(3), sigma.clone() * lam.clone() * lam.clone() * lam.clone() * r(-1, 8));
            signs.push(sigma);
        }
        signs.sort();
        assert_eq!(signs, vec![Rational::from(-1), Rational::from(1)]);
    }

    #[test]
    fn irrational_tangents_form_one_class() {
        let f = local("y^2 - 2*x^2 + y^3");
        let bs = expand_branches(&f, &origin(), 6).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].conj_multiplicity, 2);
        let (lhs, rhs) = check_multiplicity_sum(&f, &bs, &r(3, 7)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(rhs, 2);
    }

    #[test]
    fn axes_are_branches() {
        let f = local("x*y + x^3 + y^4");
        let bs = expand_branches(&f, &origin(), 6).unwrap();
        assert_eq!(bs.len(), 2);
        let (lhs, rhs) = check_multiplicity_sum(&f, &bs, &r(5, 3)).unwrap();
        assert_eq!(lhs, rhs);
        let g = local("x*(y - x^2)*y");
        let bs = expand_branches(&g, &origin(), 6).unwrap();
        assert_eq!(bs.len(), 3);
        let (lhs, rhs) = check_multiplicity_sum(&g, &bs, &r(5, 3)).unwrap();
        assert_eq!((lhs, rhs), (3, 3));
    }

    #[test]
    fn refinement_is_monotone() {
        let f = local("y^3 - x^5 + x^3*y + 7*x^6");
        let lo = expand_branches(&f, &origin(), 6).unwrap();
        let hi = expand_branches(&f, &origin(), 14).unwrap();
        assert_eq!(lo.len(), hi.len());
        for (a, b) in lo.iter().zip(&hi) {
            let t = a.param_y.truncation();
            assert!(b.param_y.truncation() >= t);
            for e in 0..t {
                assert_eq!(a.param_y.coeff(e), b.param_y.coeff(e));
            }
            assert_eq!(a.param_x.coeff(a.param_x.order().unwrap()), b.param_x.coeff(b.param_x.order().unwrap()));
        }
    }

    #[test]
    fn polar_branch_at_infinity() {
        // 2xy + z^2 - x^2 in the chart y = 1 at [0:1:0]
        let q = Field::rationals();
        let g = parse_poly("2*x*y + 1 - x^2", &["x", "y"]).unwrap().homogenize();
        let c = ChartPoint::at_infinity(Chart::InfinityY, &q, q.zero());
        let bs = expand_at(&g, &c, 8).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].param_x.order(), Some(1));
        assert_eq!(bs[0].param_y.order(), Some(2));
        let f = parse_poly("x + x^2*y", &["x", "y"]).unwrap();
        let fs = compose_on_branch(&f, &Poly::one(2), &bs[0], 32).unwrap();
        // f → 0 along the branch
        assert_eq!(fs.order_after_limit().unwrap().0, super::super::Alpha::Finite(q.zero()));
    }
}
