//! Numerical cross-check: critical points of `f - t·ℓ` for a shrinking
//! schedule of `t`, followed along trajectories and tallied by limit.

use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::LinearForm;
use crate::morse::{AlphaValue, Attractor, Location, LocationKind};
use crate::numeric::{isolate_roots, Complex, NumericError};
use crate::par::{self, ExecMode};
use crate::poly::{resultant, squarefree_part, Poly};

pub const DEFAULT_SCHEDULE: [&str; 4] = ["1e-2", "1e-3", "1e-4", "1e-5"];
pub const ANG_TOL: f64 = 1e-3;
const ESCAPE_SLOPE: f64 = 0.05;
const MAX_HALVINGS: usize = 6;
const MAX_EXTENSIONS: usize = 4;

#[derive(Debug, Error, Clone)]
pub enum OracleError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("critical points of f - t·ℓ are not isolated at t = {0}")]
    NotIsolated(String),
    #[error("t must be nonzero")]
    ZeroT,
    #[error("a schedule needs at least three decreasing positive values")]
    BadSchedule,
    #[error("cannot parse '{0}' as a value of t")]
    BadT(String),
}

/// Parses `1e-3`, `0.001` or `1/1000` exactly.
pub fn parse_t(s: &str) -> Result<Rational, OracleError> {
    let bad = || OracleError::BadT(s.to_string());
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: rug::Integer = n.trim().parse().map_err(|_| bad())?;
        let d: rug::Integer = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::from((n, d)));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    if digits.is_empty() || digits == "-" {
        return Err(bad());
    }
    let n: rug::Integer = digits.parse().map_err(|_| bad())?;
    let e = exp - frac.len() as i32;
    let ten = rug::Integer::from(10);
    let r = if e >= 0 {
        Rational::from(n * ten.pow(e as u32))
    } else {
        Rational::from((n, ten.pow((-e) as u32)))
    };
    Ok(r)
}

pub fn default_schedule() -> Vec<Rational> {
    DEFAULT_SCHEDULE.iter().map(|s| parse_t(s).unwrap()).collect()
}

#[derive(Clone, Debug)]
pub struct CriticalPoint {
    pub x: Complex,
    pub y: Complex,
    /// Size of the last Newton correction, an error estimate.
    pub radius: f64,
    pub hessian_ok: bool,
}

#[derive(Clone, Debug)]
pub struct CriticalSet {
    pub t: Rational,
    pub points: Vec<CriticalPoint>,
    /// Degree of the squarefree eliminant.
    pub eliminant_degree: usize,
    pub max_residual: f64,
}

fn eval_c(p: &Poly, x: &Complex, y: &Complex) -> Complex {
    let prec = x.prec();
    let dx = p.degree_in(0).unwrap_or(0) as usize;
    let dy = p.degree_in(1).unwrap_or(0) as usize;
    let mut xp = vec![Complex::one(prec)];
    for i in 0..dx {
        xp.push(xp[i].mul(x));
    }
    let mut yp = vec![Complex::one(prec)];
    for i in 0..dy {
        yp.push(yp[i].mul(y));
    }
    let mut acc = Complex::zero(prec);
    for (m, c) in p.terms() {
        let t = xp[m.0[0] as usize].mul(&yp[m.0[1] as usize]);
        acc = acc.add(&t.scale(&Float::with_val(prec, c)));
    }
    acc
}

fn swap_xy(p: &Poly) -> Poly {
    Poly::from_terms(2, p.terms().map(|(m, c)| ([m.0[1], m.0[0], 0], c.clone())))
}

fn univariate(p: &Poly) -> Vec<Rational> {
    p.coeffs_in(0).iter().map(|c| c.as_constant().unwrap_or_default()).collect()
}

fn norm2(x: &Complex, y: &Complex) -> Float {
    Float::with_val(x.prec(), x.norm_sqr() + y.norm_sqr()).sqrt()
}

struct System {
    g: [Poly; 2],
    hess: [Poly; 3],
}

impl System {
    fn residual(&self, x: &Complex, y: &Complex) -> (Complex, Complex) {
        (eval_c(&self.g[0], x, y), eval_c(&self.g[1], x, y))
    }

    /// Newton polish; returns the point, the last step size and the
    /// Hessian determinant, or `None` on divergence.
    fn polish(&self, mut x: Complex, mut y: Complex, prec: u32) -> Option<(Complex, Complex, Float, Complex)> {
        let tol_bits = prec as i32 - 12;
        let mut last = Float::with_val(prec, 1);
        for _ in 0..200 {
            let (r1, r2) = self.residual(&x, &y);
            let a = eval_c(&self.hess[0], &x, &y);
            let b = eval_c(&self.hess[1], &x, &y);
            let d = eval_c(&self.hess[2], &x, &y);
            let det = a.mul(&d).sub(&b.mul(&b));
            if det.is_zero() {
                return None;
            }
            // J^{-1} = [[d, -b], [-b, a]] / det
            let dx = d.mul(&r1).sub(&b.mul(&r2)).div(&det);
            let dy = a.mul(&r2).sub(&b.mul(&r1)).div(&det);
            x = x.sub(&dx);
            y = y.sub(&dy);
            let step = norm2(&dx, &dy);
            let scale = norm2(&x, &y).max(&Float::with_val(prec, 1));
            if !step.is_finite() {
                return None;
            }
            last = step.clone();
            let rel = Float::with_val(prec, &step / &scale);
            if rel.is_zero() || rel.get_exp().is_some_and(|e| e < -tol_bits) {
                return Some((x, y, last, det));
            }
        }
        let scale = norm2(&x, &y).max(&Float::with_val(prec, 1));
        let rel = Float::with_val(prec, &last / &scale);
        if rel.get_exp().is_some_and(|e| e < -(prec as i32 / 2)) {
            let a = eval_c(&self.hess[0], &x, &y);
            let b = eval_c(&self.hess[1], &x, &y);
            let d = eval_c(&self.hess[2], &x, &y);
            let det = a.mul(&d).sub(&b.mul(&b));
            Some((x, y, last, det))
        } else {
            None
        }
    }
}

/// Roots in `y` of `p(x0, y)`, approximately; coefficients negligible
/// against the largest are dropped.
fn fiber_roots(p: &Poly, x0: &Complex, prec: u32) -> Vec<Complex> {
    let coeffs: Vec<Complex> = p
        .coeffs_in(1)
        .iter()
        .map(|c| eval_c(c, x0, &Complex::zero(prec)))
        .collect();
    let big = coeffs.iter().map(|c| c.abs()).fold(Float::new(prec), |a, b| if b > a { b } else { a });
    if big.is_zero() {
        return Vec::new();
    }
    let cut = big >> (prec as i32 / 2);
    let mut c = coeffs;
    while c.last().is_some_and(|z| z.abs() <= cut) {
        c.pop();
    }
    if c.len() < 2 {
        return Vec::new();
    }
    match isolate_roots(&c, prec, prec) {
        Ok(rs) => rs.roots,
        Err(_) => {
            // clustered roots: fall back to the approximations of a
            // perturbed problem
            let mut c2 = c.clone();
            c2[0] = c2[0].add(&Complex::from_parts(cut.clone(), cut));
            isolate_roots(&c2, prec, prec * 4).map(|r| r.roots).unwrap_or_default()
        }
    }
}

/// All solutions of `f_x = t·a`, `f_y = t·b`.
pub fn critical_points(f: &Poly, ell: &LinearForm, t: &Rational, prec: u32) -> Result<CriticalSet, OracleError> {
    if *t == 0 {
        return Err(OracleError::ZeroT);
    }
    let not_isolated = || OracleError::NotIsolated(t.to_string());
    let g1 = &f.differentiate(0) - &Poly::constant(2, Rational::from(t * &ell.a));
    let g2 = &f.differentiate(1) - &Poly::constant(2, Rational::from(t * &ell.b));
    let empty = CriticalSet {
        t: t.clone(),
        points: Vec::new(),
        eliminant_degree: 0,
        max_residual: 0.0,
    };
    if g1.as_constant().is_some_and(|c| c != 0) || g2.as_constant().is_some_and(|c| c != 0) {
        return Ok(empty);
    }
    if g1.is_zero() || g2.is_zero() {
        return Err(not_isolated());
    }
    // eliminate the variable giving the smaller eliminant; ties eliminate y
    let ry = resultant(&g1, &g2, 1).ok().filter(|r| !r.is_zero() || !g1.involves(1) && !g2.involves(1));
    let rx = resultant(&g1, &g2, 0).ok();
    let deg = |r: &Option<Poly>| r.as_ref().filter(|p| !p.is_zero()).and_then(|p| p.total_degree());
    let swap = match (deg(&ry), deg(&rx)) {
        (Some(a), Some(b)) => b < a,
        (None, Some(_)) => true,
        (Some(_), None) => false,
        (None, None) => return Err(not_isolated()),
    };
    let (g1, g2, elim) = if swap {
        (swap_xy(&g1), swap_xy(&g2), swap_xy(&rx.unwrap()))
    } else {
        (g1, g2, ry.unwrap())
    };
    let sq = univariate(&squarefree_part(&elim));
    if sq.len() < 2 {
        return Ok(empty);
    }
    let hess = {
        let (gx, gy) = (g1.differentiate(0), g1.differentiate(1));
        [gx, gy, g2.differentiate(1)]
    };
    let sys = System { g: [g1, g2], hess };
    let mut wprec = 2 * prec + 64;
    let bound = Float::with_val(prec, 10).pow(-(prec as i32 / 4));
    loop {
        let c: Vec<Complex> = sq.iter().map(|r| Complex::from_rat(wprec, r)).collect();
        let xs = isolate_roots(&c, wprec, 8 * wprec)?;
        let mut pts: Vec<(Complex, Complex, Float, Complex)> = Vec::new();
        for xi in &xs.roots {
            let xi = xi.with_prec(wprec);
            let mut cands = fiber_roots(&sys.g[0], &xi, wprec);
            cands.extend(fiber_roots(&sys.g[1], &xi, wprec));
            for yj in cands {
                let (_, r2) = sys.residual(&xi, &yj);
                let (r1, _) = sys.residual(&xi, &yj);
                let scale = norm2(&xi, &yj).max(&Float::with_val(wprec, 1));
                let small = Float::with_val(wprec, (r1.abs() + r2.abs()) / &scale);
                if small.get_exp().is_some_and(|e| e > -(wprec as i32 / 8)) && !small.is_zero() {
                    continue;
                }
                let Some(sol) = sys.polish(xi.clone(), yj, wprec) else { continue };
                let near = Float::with_val(wprec, sol.0.sub(&xi).abs() / &scale);
                if near.get_exp().is_some_and(|e| e > -(wprec as i32 / 8)) && !near.is_zero() {
                    continue;
                }
                let dup = pts.iter().any(|p| {
                    let d = norm2(&p.0.sub(&sol.0), &p.1.sub(&sol.1));
                    let s = norm2(&p.0, &p.1).max(&Float::with_val(wprec, 1));
                    let r = Float::with_val(wprec, d / s);
                    r.is_zero() || r.get_exp().is_some_and(|e| e < -(wprec as i32 / 2))
                });
                if !dup {
                    pts.push(sol);
                }
            }
        }
        let mut max_res = Float::new(prec);
        for p in &pts {
            let (r1, r2) = sys.residual(&p.0, &p.1);
            let r = r1.abs().max(&r2.abs());
            if r > max_res {
                max_res = r;
            }
        }
        if max_res <= bound || wprec >= 8 * prec {
            let (xs, ys) = if swap { (1, 0) } else { (0, 1) };
            let points = pts
                .into_iter()
                .map(|(x, y, step, det)| {
                    let pair = [x, y];
                    let a = eval_c(&sys.hess[0], &pair[0], &pair[1]).abs();
                    let d = eval_c(&sys.hess[2], &pair[0], &pair[1]).abs();
                    let b = eval_c(&sys.hess[1], &pair[0], &pair[1]).abs();
                    let scale = Float::with_val(prec, &a * &d) + Float::with_val(prec, b.square_ref()) + 1u32;
                    let hessian_ok = Float::with_val(prec, det.abs() / scale) > Float::with_val(prec, 10).pow(-(prec as i32 / 8));
                    CriticalPoint {
                        x: pair[xs].with_prec(prec),
                        y: pair[ys].with_prec(prec),
                        radius: step.to_f64(),
                        hessian_ok,
                    }
                })
                .collect();
            return Ok(CriticalSet {
                t: t.clone(),
                points,
                eliminant_degree: sq.len() - 1,
                max_residual: max_res.to_f64(),
            });
        }
        wprec *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub location: Location,
    pub alpha: AlphaValue,
    pub expected: u64,
    pub observed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub matched: bool,
    pub clusters: Vec<Cluster>,
    pub t_schedule: Vec<String>,
    pub point_count: usize,
    pub mismatches: Vec<String>,
}

type C64 = [f64; 2];

fn c64(z: &Complex) -> C64 {
    z.to_f64()
}

fn cabs(z: C64) -> f64 {
    z[0].hypot(z[1])
}

fn csub(a: C64, b: C64) -> C64 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cmul(a: C64, b: C64) -> C64 {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b[0] * b[0] + b[1] * b[1];
    [(a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d]
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Point of a trajectory at one `t`, with `f` evaluated there.
#[derive(Clone, Debug)]
struct Sample {
    x: C64,
    y: C64,
    /// `(x, y, 1)` scaled to unit length.
    unit: [C64; 3],
    f: C64,
}

fn sample(f: &Poly, p: &CriticalPoint) -> Sample {
    let n = norm2(&p.x, &p.y);
    let n1 = (Float::with_val(p.x.prec(), n.square_ref()) + 1u32).sqrt();
    let s = |z: &Complex| c64(&z.scale(&Float::with_val(z.prec(), 1u32 / &n1)));
    let one = Complex::one(p.x.prec());
    Sample {
        x: c64(&p.x),
        y: c64(&p.y),
        unit: [s(&p.x), s(&p.y), s(&one)],
        f: c64(&eval_c(f, &p.x, &p.y)),
    }
}

fn unit_dist(a: &Sample, b: &Sample) -> f64 {
    a.unit.iter().zip(&b.unit).map(|(u, v)| cabs(csub(*u, *v)).powi(2)).sum::<f64>().sqrt()
}

/// Chains samples across consecutive sets by greedy nearest neighbours.
fn match_trajectories(sets: &[Vec<Sample>]) -> Vec<Vec<Sample>> {
    let mut trajs: Vec<Vec<Sample>> = sets[0].iter().map(|s| vec![s.clone()]).collect();
    for next in &sets[1..] {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, tr) in trajs.iter().enumerate() {
            let last = tr.last().unwrap();
            for (j, s) in next.iter().enumerate() {
                pairs.push((unit_dist(last, s), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut used_i = vec![false; trajs.len()];
        let mut used_j = vec![false; next.len()];
        for (_, i, j) in pairs {
            if !used_i[i] && !used_j[j] {
                used_i[i] = true;
                used_j[j] = true;
                trajs[i].push(next[j].clone());
            }
        }
    }
    trajs
}

/// Whether some sample has two candidates in the next set at comparable
/// distances.
fn ambiguous(a: &[Sample], b: &[Sample]) -> bool {
    a.iter().any(|s| {
        let mut d: Vec<f64> = b.iter().map(|u| unit_dist(s, u)).collect();
        d.sort_by(|x, y| x.total_cmp(y));
        d.len() >= 2 && d[0] > 0.5 * d[1]
    })
}

struct Target {
    kind: LocationKind,
    point: [C64; 2],
    alpha: Option<C64>,
}

fn targets(attractors: &[Attractor]) -> Vec<Target> {
    attractors
        .iter()
        .map(|a| Target {
            kind: a.location.kind,
            point: [a.location.point[0].approx, a.location.point[1].approx],
            alpha: match &a.alpha {
                AlphaValue::Finite(v) => Some(v.approx),
                AlphaValue::Infinite => None,
            },
        })
        .collect()
}

/// Sine of the angle between the complex lines through `u` and `v`.
fn line_angle(u: [C64; 2], v: [C64; 2]) -> f64 {
    let nu = (cabs(u[0]).powi(2) + cabs(u[1]).powi(2)).sqrt();
    let nv = (cabs(v[0]).powi(2) + cabs(v[1]).powi(2)).sqrt();
    // <u, v> = Σ conj(u_i) v_i
    let ip = [
        u[0][0] * v[0][0] + u[0][1] * v[0][1] + u[1][0] * v[1][0] + u[1][1] * v[1][1],
        u[0][0] * v[0][1] - u[0][1] * v[0][0] + u[1][0] * v[1][1] - u[1][1] * v[1][0],
    ];
    let c = cabs(ip) / (nu * nv);
    (1.0 - (c * c).min(1.0)).sqrt()
}

/// Picks the nearest of `dists` when within `tol` and well separated from
/// the runner-up, or when distances shrink along the trajectory and the
/// runner-up is ten times further.
fn pick(dists_per_step: &[Vec<f64>], tol: f64) -> Option<usize> {
    let last = dists_per_step.last()?;
    let (best, &d1) = last.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
    let d2 = last
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, d)| *d)
        .fold(f64::INFINITY, f64::min);
    if d1 < tol && d1 * 4.0 <= d2 {
        return Some(best);
    }
    let shrinking = dists_per_step.windows(2).all(|w| w[1][best] <= w[0][best]);
    (shrinking && d1 * 10.0 <= d2).then_some(best)
}

/// Aitken extrapolation of the last three values.
fn extrapolate(v: &[C64]) -> C64 {
    let n = v.len();
    if n < 3 {
        return v[n - 1];
    }
    let (a, b, c) = (v[n - 3], v[n - 2], v[n - 1]);
    let d1 = csub(c, b);
    let d2 = csub(csub(c, b), csub(b, a));
    if cabs(d2) <= 1e-300 {
        return c;
    }
    csub(c, cdiv(cmul(d1, d1), d2))
}

fn classify(traj: &[Sample], ts: &[f64], targets: &[Target]) -> Option<usize> {
    let logt: Vec<f64> = ts.iter().map(|t| -t.ln()).collect();
    let norms: Vec<f64> = traj
        .iter()
        .map(|s| (cabs(s.x).powi(2) + cabs(s.y).powi(2)).sqrt().max(1e-300).ln())
        .collect();
    let escaping = slope(&logt, &norms) > ESCAPE_SLOPE && norms.last() > norms.first();
    let t_min = *ts.last().unwrap();
    if !escaping {
        let idx: Vec<usize> = (0..targets.len()).filter(|&i| targets[i].kind == LocationKind::Affine).collect();
        if idx.is_empty() {
            return None;
        }
        let dists: Vec<Vec<f64>> = traj
            .iter()
            .map(|s| {
                idx.iter()
                    .map(|&i| {
                        let p = &targets[i].point;
                        (cabs(csub(s.x, p[0])).powi(2) + cabs(csub(s.y, p[1])).powi(2)).sqrt()
                    })
                    .collect()
            })
            .collect();
        return pick(&dists, 10.0 * t_min.sqrt()).map(|k| idx[k]);
    }
    // distinct points at infinity among the targets
    let mut dirs: Vec<[C64; 2]> = Vec::new();
    for t in targets.iter().filter(|t| t.kind == LocationKind::Infinity) {
        if !dirs.iter().any(|d| line_angle(*d, t.point) < 1e-9) {
            dirs.push(t.point);
        }
    }
    let angles: Vec<Vec<f64>> = traj
        .iter()
        .map(|s| dirs.iter().map(|d| line_angle([s.x, s.y], *d)).collect())
        .collect();
    let dir = dirs[pick(&angles, ANG_TOL)?];
    let here: Vec<usize> = (0..targets.len())
        .filter(|&i| targets[i].kind == LocationKind::Infinity && line_angle(targets[i].point, dir) < 1e-9)
        .collect();
    let fl: Vec<f64> = traj.iter().map(|s| cabs(s.f).max(1e-300).ln()).collect();
    let k = traj.len().min(3);
    let f_slope = slope(&logt[logt.len() - k..], &fl[fl.len() - k..]);
    if f_slope > ESCAPE_SLOPE {
        return here.into_iter().find(|&i| targets[i].alpha.is_none());
    }
    let fs: Vec<C64> = traj.iter().map(|s| s.f).collect();
    let est = extrapolate(&fs);
    here.into_iter()
        .filter_map(|i| targets[i].alpha.map(|a| (i, cabs(csub(a, est)))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// Solves along `schedule`, follows each critical point and compares the
/// tally per attractor with the symbolic indices.
pub fn classify_trajectories(
    f: &Poly,
    ell: &LinearForm,
    schedule: &[Rational],
    attractors: &[Attractor],
    prec: u32,
    mode: ExecMode,
) -> Result<OracleVerdict, OracleError> {
    if schedule.len() < 3 || schedule.windows(2).any(|w| w[1] >= w[0]) || schedule.iter().any(|t| *t <= 0) {
        return Err(OracleError::BadSchedule);
    }
    let mut schedule = schedule.to_vec();
    let mut mismatches = Vec::new();
    let mut sets: Vec<CriticalSet>;
    let mut halvings = 0;
    loop {
        sets = par::map(mode, &schedule, |t| critical_points(f, ell, t, prec))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let n0 = sets[0].points.len();
        if sets.iter().all(|s| s.points.len() == n0) {
            break;
        }
        if halvings == MAX_HALVINGS {
            mismatches.push(format!(
                "critical point count varies along the schedule: {:?}",
                sets.iter().map(|s| s.points.len()).collect::<Vec<_>>()
            ));
            break;
        }
        schedule[0] /= 2;
        if schedule[0] <= schedule[1] {
            schedule.remove(0);
        }
        halvings += 1;
    }
    let mut samples: Vec<Vec<Sample>> = sets.iter().map(|s| s.points.iter().map(|p| sample(f, p)).collect()).collect();
    // refine between ambiguous neighbours, a bounded number of times
    for _ in 0..3 {
        let Some(k) = (0..samples.len() - 1).find(|&k| ambiguous(&samples[k], &samples[k + 1])) else {
            break;
        };
        let mid = geometric_mean(&schedule[k], &schedule[k + 1]);
        let set = critical_points(f, ell, &mid, prec)?;
        if set.points.len() != samples[k].len() {
            break;
        }
        samples.insert(k + 1, set.points.iter().map(|p| sample(f, p)).collect());
        schedule.insert(k + 1, mid);
    }
    let tg = targets(attractors);
    let mut extensions = 0;
    let (observed, unclassified, point_count) = loop {
        let point_count = samples.last().map_or(0, |s| s.len());
        let ts: Vec<f64> = schedule.iter().map(|t| t.to_f64()).collect();
        let trajs = if samples.iter().all(|s| s.len() == point_count) {
            match_trajectories(&samples)
        } else {
            samples.last().unwrap().iter().map(|s| vec![s.clone()]).collect()
        };
        let mut observed = vec![0u64; attractors.len()];
        let mut unclassified = Vec::new();
        for tr in &trajs {
            let tsl = &ts[ts.len() - tr.len()..];
            match classify(tr, tsl, &tg) {
                Some(i) => observed[i] += 1,
                None => unclassified.push(tr.last().unwrap().clone()),
            }
        }
        if unclassified.is_empty() || extensions == MAX_EXTENSIONS {
            break (observed, unclassified, point_count);
        }
        // trajectories not yet settled: continue the schedule downwards
        let next = Rational::from(schedule.last().unwrap() / 10u32);
        let set = critical_points(f, ell, &next, prec)?;
        if set.points.len() != point_count {
            break (observed, unclassified, point_count);
        }
        samples.push(set.points.iter().map(|p| sample(f, p)).collect());
        schedule.push(next);
        extensions += 1;
    };
    for s in &unclassified {
        mismatches.push(format!(
            "unclassified trajectory ending at ({:.6e}{:+.6e}i, {:.6e}{:+.6e}i)",
            s.x[0], s.x[1], s.y[0], s.y[1]
        ));
    }
    let clusters: Vec<Cluster> = attractors
        .iter()
        .zip(&observed)
        .map(|(a, &o)| Cluster {
            location: a.location.clone(),
            alpha: a.alpha.clone(),
            expected: a.index,
            observed: o,
        })
        .collect();
    for c in &clusters {
        if c.expected != c.observed {
            mismatches.push(format!(
                "attractor at {:?} expects {} trajectories, observed {}",
                c.location.point.iter().map(|p| p.approx).collect::<Vec<_>>(),
                c.expected,
                c.observed
            ));
        }
    }
    Ok(OracleVerdict {
        matched: mismatches.is_empty(),
        clusters,
        t_schedule: schedule.iter().map(|t| t.to_string()).collect(),
        point_count,
        mismatches,
    })
}

/// A rational close to `sqrt(a·b)`.
fn geometric_mean(a: &Rational, b: &Rational) -> Rational {
    let g = (a.to_f64() * b.to_f64()).sqrt();
    let e = g.log10().floor() as i32 - 3;
    let scaled = (g / 10f64.powi(e)).round() as i64;
    let ten = rug::Integer::from(10);
    if e >= 0 {
        Rational::from(scaled) * Rational::from(ten.pow(e as u32))
    } else {
        Rational::from((rug::Integer::from(scaled), ten.pow((-e) as u32)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::Problem;
    use crate::poly::parse_poly;

    fn p(s: &str) -> Poly {
        parse_poly(s, &["x", "y"]).unwrap()
    }

    fn xy() -> LinearForm {
        LinearForm::explicit(1, 1).unwrap()
    }

    #[test]
    fn parses_t_values() {
        assert_eq!(parse_t("1e-3").unwrap(), Rational::from((1, 1000)));
        assert_eq!(parse_t("0.025").unwrap(), Rational::from((1, 40)));
        assert_eq!(parse_t("2/7").unwrap(), Rational::from((2, 7)));
        assert_eq!(parse_t("3E2").unwrap(), Rational::from(300));
        assert!(parse_t("abc").is_err());
        assert!(parse_t("1/0").is_err());
    }

    #[test]
    fn first_example_points() {
        let t = Rational::from((1, 10000));
        let cs = critical_points(&p("x + x^2*y"), &xy(), &t, 256).unwrap();
        assert_eq!(cs.points.len(), 2);
        for q in &cs.points {
            // x^2 = t, so |x| = 1e-2 and |y| ~ 50
            assert!((q.x.abs().to_f64() - 1e-2).abs() < 1e-12);
            assert!(q.hessian_ok);
        }
        assert!(cs.max_residual < 1e-64);
    }

    #[test]
    fn quadratic_has_one_point() {
        let t = Rational::from((1, 100));
        let l = LinearForm::explicit(3, -2).unwrap();
        let cs = critical_points(&p("x^2 + y^2"), &l, &t, 256).unwrap();
        assert_eq!(cs.points.len(), 1);
        let q = &cs.points[0];
        assert!((q.x.re.to_f64() - 0.015).abs() < 1e-30);
        assert!((q.y.re.to_f64() + 0.01).abs() < 1e-30);
    }

    #[test]
    fn third_example_has_nine_points() {
        let t = Rational::from((1, 1000));
        let cs = critical_points(&p("x*y + 1/3*x^3*y^2 + x^6"), &xy(), &t, 256).unwrap();
        assert_eq!(cs.points.len(), 9);
        assert!(cs.points.iter().all(|q| q.hessian_ok));
    }

    #[test]
    fn linear_function_has_none() {
        let cs = critical_points(&p("x + y"), &xy(), &Rational::from((1, 100)), 128).unwrap();
        assert!(cs.points.is_empty());
    }

    fn verdict(f: &str) -> OracleVerdict {
        let f = p(f);
        let pr = Problem::new(&f, &xy()).unwrap();
        let att = pr.attractors(ExecMode::Parallel, 256).unwrap();
        classify_trajectories(&f, &xy(), &default_schedule(), &att, 256, ExecMode::Parallel).unwrap()
    }

    #[test]
    fn first_example_verdict() {
        let v = verdict("x + x^2*y");
        assert!(v.matched, "{:?}", v.mismatches);
        assert_eq!(v.point_count, 2);
    }

    #[test]
    fn second_example_verdict() {
        let v = verdict("x*y + 1/3*x^3*y^2");
        assert!(v.matched, "{:?}", v.mismatches);
        assert_eq!(v.point_count, 4);
    }

    #[test]
    fn third_example_verdict() {
        let v = verdict("x*y + 1/3*x^3*y^2 + x^6");
        assert!(v.matched, "{:?}", v.mismatches);
        assert_eq!(v.point_count, 9);
    }
}
