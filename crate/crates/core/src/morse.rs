//! Attractors of Morse trajectories and their indices, from orders of `f`
//! and `ℓ` along the branches of the polar curve.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::Elem;
use crate::geometry::{
    polar_equation, singular_locus, solve_affine, GeometryError, InfinityPoint, LinearForm, PolarCurve,
    SingularLocus,
};
use crate::numeric::{describe_elem, embeddings, eval_elem, lex_cmp, AlgebraicNumber, Complex, NumericError};
use crate::par::{self, ExecMode};
use crate::poly::Poly;
use crate::puiseux::{eval_poly, expand_at, Alpha, Chart, ChartPoint, PuiseuxBranch, PuiseuxError};

#[derive(Debug, Error, Clone)]
pub enum MorseError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("composition along a polar branch in chart {chart} does not certify below order {bound}")]
    Degenerate { chart: Chart, bound: i64 },
    #[error("negative affine branch contribution {0}")]
    NegativeAffine(i64),
    #[error("the two index formulas disagree at infinity: {fbar} vs {orders}")]
    DualRoute { fbar: i64, orders: i64 },
}

/// Exact data for one class of conjugate polar branches.
#[derive(Clone, Debug)]
pub struct BranchRecord {
    pub branch: PuiseuxBranch,
    pub alpha: Alpha,
    pub ord_f: i64,
    pub ord_ell: i64,
    pub mult_fbar: Option<i64>,
    pub mult_hinf: Option<i64>,
    pub contribution: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationKind {
    Affine,
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Location {
    #[serde(rename = "type")]
    pub kind: LocationKind,
    /// `[x, y]` when affine, `[X, Y, 0]` at infinity.
    pub point: Vec<AlgebraicNumber>,
    pub chart: Chart,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum AlphaValue {
    Finite(AlgebraicNumber),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchContribution {
    pub ord_f: i64,
    pub ord_ell: i64,
    pub mult_fbar: Option<i64>,
    pub mult_hinf: Option<i64>,
    pub contribution: i64,
    pub conj_multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attractor {
    pub location: Location,
    pub alpha: AlphaValue,
    pub index: u64,
    pub branches: Vec<BranchContribution>,
}

/// Everything fixed by `(f, ℓ)`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub f: Poly,
    pub ell: LinearForm,
    pub degree: u32,
    pub polar: PolarCurve,
    pub sing: SingularLocus,
    f_hom: Poly,
    ell_poly: Poly,
    polar_hom: Poly,
    /// Truncation safety bound.
    pub bound: i64,
}

impl Problem {
    pub fn new(f: &Poly, ell: &LinearForm) -> Result<Self, MorseError> {
        let polar = polar_equation(f, ell)?;
        let sing = singular_locus(f)?;
        let degree = f.total_degree().unwrap_or(0);
        let d = degree.max(polar.degree) as i64;
        Ok(Problem {
            f: f.clone(),
            ell: ell.clone(),
            degree,
            f_hom: f.homogenize(),
            ell_poly: ell.to_poly(),
            polar_hom: polar.equation.homogenize(),
            polar,
            sing,
            bound: d * (2 * d - 1) + d + 1,
        })
    }

    /// Polar points in the singular locus of `f`.
    pub fn affine_candidates(&self) -> Result<Vec<ChartPoint>, MorseError> {
        if self.polar.is_empty() {
            return Ok(Vec::new());
        }
        let fx = self.f.differentiate(0);
        let fy = self.f.differentiate(1);
        let system = if self.ell.a != 0 {
            [self.polar.equation.clone(), fx, fy]
        } else {
            [self.polar.equation.clone(), fy, fx]
        };
        Ok(solve_affine(&system)?)
    }

    /// Equation of the polar curve in the variables of `center`'s chart.
    pub fn polar_in_chart(&self, center: &ChartPoint) -> &Poly {
        match center.chart {
            Chart::Affine => &self.polar.equation,
            _ => &self.polar_hom,
        }
    }

    /// Branch records at `center`, raising the truncation until every
    /// order is certified or the safety bound is passed.
    pub fn branch_records(&self, center: &ChartPoint) -> Result<Vec<BranchRecord>, MorseError> {
        let eq = self.polar_in_chart(center);
        let mut target = 2 * self.polar.degree as i64 + 2;
        loop {
            let branches = expand_at(eq, center, target)?;
            let attempt: Result<Vec<BranchRecord>, Uncertified> =
                branches.into_iter().map(|b| self.record(b)).collect();
            match attempt {
                Ok(records) => {
                    for r in &records {
                        if r.mult_fbar.is_none() && r.contribution < 0 {
                            return Err(MorseError::NegativeAffine(r.contribution));
                        }
                    }
                    return Ok(records);
                }
                Err(Uncertified::Mismatch(fbar, orders)) => {
                    return Err(MorseError::DualRoute { fbar, orders });
                }
                Err(Uncertified::Short) if target > self.bound => {
                    return Err(MorseError::Degenerate {
                        chart: center.chart,
                        bound: self.bound,
                    });
                }
                Err(Uncertified::Short) => target = (2 * target).min(self.bound + 1),
            }
        }
    }

    fn record(&self, branch: PuiseuxBranch) -> Result<BranchRecord, Uncertified> {
        let xy = branch.affine_coords();
        let fs = eval_poly(&self.f, &xy);
        let ls = eval_poly(&self.ell_poly, &xy);
        let (alpha, ord_f) = fs.order_after_limit().map_err(|_| Uncertified::Short)?;
        if branch.center.chart == Chart::Affine {
            let (_, ord_ell) = ls.order_after_limit().map_err(|_| Uncertified::Short)?;
            return Ok(BranchRecord {
                branch,
                alpha,
                ord_f,
                ord_ell,
                mult_fbar: None,
                mult_hinf: None,
                contribution: ord_f - ord_ell,
            });
        }
        let ord_ell = ls.order().ok_or(Uncertified::Short)?;
        let [xh, yh, zh] = branch.projective_coords();
        let mut fbar = eval_poly(&self.f_hom, &[xh, yh, zh.clone()]);
        if let Alpha::Finite(a) = &alpha {
            fbar = fbar.sub(&zh.pow(self.degree).scale(a));
        }
        let mult_fbar = fbar.order().ok_or(Uncertified::Short)?;
        let mult_hinf = zh.order().ok_or(Uncertified::Short)?;
        let raw = mult_fbar - (self.degree as i64 - 1) * mult_hinf;
        if raw != ord_f - ord_ell {
            return Err(Uncertified::Mismatch(raw, ord_f - ord_ell));
        }
        Ok(BranchRecord {
            branch,
            alpha,
            ord_f,
            ord_ell,
            mult_fbar: Some(mult_fbar),
            mult_hinf: Some(mult_hinf),
            contribution: raw.max(0),
        })
    }

    pub fn affine_index(&self, p: &ChartPoint, prec: u32) -> Result<Vec<Attractor>, MorseError> {
        group_attractors(&self.branch_records(p)?, prec)
    }

    pub fn infinity_index(&self, ip: &InfinityPoint, prec: u32) -> Result<Vec<Attractor>, MorseError> {
        group_attractors(&self.branch_records(&ip.center)?, prec)
    }

    /// Recomputes an infinity point in its other chart and compares the
    /// attractors, ignoring the chart label. `None` when only one chart
    /// sees the point.
    pub fn chart_consistency(&self, ip: &InfinityPoint, prec: u32) -> Result<Option<bool>, MorseError> {
        let Some(alt) = ip.alternate_center() else {
            return Ok(None);
        };
        let key = |v: Vec<Attractor>| -> Vec<(Vec<AlgebraicNumber>, AlphaValue, u64)> {
            v.into_iter().map(|a| (a.location.point, a.alpha, a.index)).collect()
        };
        let main = key(self.infinity_index(ip, prec)?);
        let other = key(group_attractors(&self.branch_records(&alt)?, prec)?);
        Ok(Some(main == other))
    }

    /// All branch records, affine centers first.
    pub fn all_records(&self, mode: ExecMode) -> Result<Vec<BranchRecord>, MorseError> {
        let mut centers = self.affine_candidates()?;
        centers.extend(self.polar.infinity_points.iter().map(|ip| ip.center.clone()));
        let per: Vec<Result<Vec<BranchRecord>, MorseError>> =
            par::map(mode, &centers, |c| self.branch_records(c));
        let mut out = Vec::new();
        for r in per {
            out.extend(r?);
        }
        Ok(out)
    }

    pub fn attractors(&self, mode: ExecMode, prec: u32) -> Result<Vec<Attractor>, MorseError> {
        group_attractors(&self.all_records(mode)?, prec)
    }
}

enum Uncertified {
    Short,
    Mismatch(i64, i64),
}

pub fn total_morse_number(attractors: &[Attractor]) -> u64 {
    attractors.iter().map(|a| a.index).sum()
}

/// One geometric branch: a complex embedding of a branch record.
struct Geo {
    record: usize,
    kind: LocationKind,
    point: [Complex; 2],
    alpha: Option<Complex>,
    gens: Vec<Complex>,
}

/// Coordinates naming the point: `[x, y]`, or `[X, Y]` on the line at
/// infinity scaled so that `Y = 1` when possible.
fn exact_location(center: &ChartPoint) -> (LocationKind, [Elem; 2]) {
    let k = &center.field;
    match center.chart {
        Chart::Affine => (LocationKind::Affine, [center.a.clone(), center.b.clone()]),
        Chart::InfinityY => (LocationKind::Infinity, [center.a.clone(), k.one()]),
        Chart::InfinityX => match k.inv(&center.a) {
            Some(inv) => (LocationKind::Infinity, [inv, k.one()]),
            None => (LocationKind::Infinity, [k.one(), k.zero()]),
        },
    }
}

fn close(a: &Complex, b: &Complex) -> bool {
    let prec = a.prec();
    let scale = a.abs().max(&b.abs()).max(&Float::with_val(prec, 1));
    let tol = scale * (Float::with_val(64, 1) >> (prec as i32 / 3));
    a.sub(b).abs() <= tol
}

/// Splits branch records into geometric branches and groups them by
/// `(point, α)`.
pub fn group_attractors(records: &[BranchRecord], prec: u32) -> Result<Vec<Attractor>, MorseError> {
    let mut geos: Vec<Geo> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let kb = &r.branch.field;
        let kc = &r.branch.center.field;
        let (kind, loc) = exact_location(&r.branch.center);
        for gens in embeddings(kb, prec)? {
            let cg = &gens[..kc.depth()];
            let point = [eval_elem(kc, &loc[0], cg, prec), eval_elem(kc, &loc[1], cg, prec)];
            let alpha = match &r.alpha {
                Alpha::Finite(a) => Some(eval_elem(kb, a, &gens, prec)),
                Alpha::Infinite => None,
            };
            geos.push(Geo {
                record: i,
                kind,
                point,
                alpha,
                gens,
            });
        }
    }
    // groups: representative geo and per-record counts
    let mut groups: Vec<(usize, BTreeMap<usize, u32>)> = Vec::new();
    for (gi, g) in geos.iter().enumerate() {
        let found = groups.iter_mut().find(|(rep, _)| {
            let h = &geos[*rep];
            h.kind == g.kind
                && close(&h.point[0], &g.point[0])
                && close(&h.point[1], &g.point[1])
                && match (&h.alpha, &g.alpha) {
                    (None, None) => true,
                    (Some(a), Some(b)) => close(a, b),
                    _ => false,
                }
        });
        match found {
            Some((_, counts)) => *counts.entry(g.record).or_default() += 1,
            None => groups.push((gi, BTreeMap::from([(g.record, 1)]))),
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (rep, counts) in groups {
        let g = &geos[rep];
        let r = &records[g.record];
        let kc = &r.branch.center.field;
        let kb = &r.branch.field;
        let cg = &g.gens[..kc.depth()];
        let (kind, loc) = exact_location(&r.branch.center);
        let mut point = vec![describe_elem(kc, &loc[0], cg, prec)?, describe_elem(kc, &loc[1], cg, prec)?];
        if kind == LocationKind::Infinity {
            point.push(AlgebraicNumber::rational(&Rational::new()));
        }
        let alpha = match &r.alpha {
            Alpha::Finite(a) => AlphaValue::Finite(describe_elem(kb, a, &g.gens, prec)?),
            Alpha::Infinite => AlphaValue::Infinite,
        };
        let branches: Vec<BranchContribution> = counts
            .iter()
            .map(|(&ri, &n)| {
                let r = &records[ri];
                BranchContribution {
                    ord_f: r.ord_f,
                    ord_ell: r.ord_ell,
                    mult_fbar: r.mult_fbar,
                    mult_hinf: r.mult_hinf,
                    contribution: r.contribution,
                    conj_multiplicity: n,
                }
            })
            .collect();
        let index = branches
            .iter()
            .map(|b| b.contribution.max(0) as u64 * b.conj_multiplicity as u64)
            .sum();
        out.push(Attractor {
            location: Location {
                kind,
                point,
                chart: r.branch.center.chart,
            },
            alpha,
            index,
            branches,
        });
    }
    sort_attractors(&mut out);
    Ok(out)
}

fn approx_cmp(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Ordering {
    let tol = Float::with_val(64, 1e-12);
    let ca = Complex::from_f64(64, a.approx[0], a.approx[1]);
    let cb = Complex::from_f64(64, b.approx[0], b.approx[1]);
    lex_cmp(&ca, &cb, &tol)
        .then_with(|| a.min_poly.cmp(&b.min_poly))
        .then_with(|| a.root_index.cmp(&b.root_index))
}

fn alpha_cmp(a: &AlphaValue, b: &AlphaValue) -> Ordering {
    match (a, b) {
        (AlphaValue::Finite(x), AlphaValue::Finite(y)) => approx_cmp(x, y),
        (AlphaValue::Finite(_), AlphaValue::Infinite) => Ordering::Less,
        (AlphaValue::Infinite, AlphaValue::Finite(_)) => Ordering::Greater,
        (AlphaValue::Infinite, AlphaValue::Infinite) => Ordering::Equal,
    }
}

/// Affine attractors first, then points at infinity; each by coordinates,
/// then by `α`.
pub fn sort_attractors(v: &mut [Attractor]) {
    v.sort_by(|a, b| {
        a.location
            .kind
            .cmp(&b.location.kind)
            .then_with(|| {
                a.location
                    .point
                    .iter()
                    .zip(&b.location.point)
                    .map(|(x, y)| approx_cmp(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| alpha_cmp(&a.alpha, &b.alpha))
    });
}
