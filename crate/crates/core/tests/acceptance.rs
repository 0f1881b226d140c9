mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use polar_morse::geometry::LinearForm;
use polar_morse::morse::{AlphaValue, Attractor, LocationKind, Problem};
use polar_morse::numeric::{isolate_roots, Complex};
use polar_morse::oracle::critical_points;
use polar_morse::pipeline::{analyze, RunConfig};
use polar_morse::poly::{parse_poly, BiPoly, Poly};
use polar_morse::puiseux::{branch_residual, check_multiplicity_sum, count_vanishing_solutions, ChartPoint};
use polar_morse::report::MorseReport;
use rand::RngExt;
use rug::ops::Pow;
use rug::{Float, Rational};

const EX1: &str = "x + x^2*y";
const EX2: &str = "x*y + 1/3*x^3*y^2";
const EX3: &str = "x*y + 1/3*x^3*y^2 + x^6";

type Outcome = Result<String, String>;

fn golden(f: &str) -> Result<(MorseReport, Duration), String> {
    let start = Instant::now();
    let r = analyze(&RunConfig::new(f).with_ell("x + y")).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed()))
}

/// Attractor at infinity over `[x0 : y0 : 0]`.
fn at_infinity(r: &MorseReport, x0: f64, y0: f64, infinite: Option<bool>) -> Option<&Attractor> {
    r.attractors.iter().find(|a| {
        let [x, y] = [a.location.point[0].approx, a.location.point[1].approx];
        a.location.kind == LocationKind::Infinity
            && x[1] == 0.0
            && y[1] == 0.0
            && (x[0] * y0 - y[0] * x0).abs() < 1e-9
            && infinite.is_none_or(|inf| matches!(a.alpha, AlphaValue::Infinite) == inf)
    })
}

fn is_zero_alpha(a: &Attractor) -> bool {
    matches!(&a.alpha, AlphaValue::Finite(v) if v.min_poly == "t")
}

fn check(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn criterion_1() -> Outcome {
    let (r, dt) = golden(EX1)?;
    check(r.morse_number == 2, "morse number")?;
    check(r.input.degree == 3, "degree")?;
    let p = at_infinity(&r, 0.0, 1.0, Some(false)).ok_or("no attractor at [0:1:0]")?;
    check(is_zero_alpha(p) && p.index == 2, "[0:1:0] should have α = 0 and index 2")?;
    check(
        p.branches.len() == 1 && p.branches[0].mult_fbar == Some(4) && p.branches[0].mult_hinf == Some(1),
        "branch ledger at [0:1:0]",
    )?;
    let w = at_infinity(&r, 2.0, 1.0, None).ok_or("no attractor at [2:1:0]")?;
    check(w.index == 0, "[2:1:0] should have index 0")?;
    check(r.attractors.len() == 2, "exactly two attractors")?;
    check(dt < Duration::from_secs(1), "slower than 1 s")?;
    Ok(format!("m_f = 2, [0:1:0] α=0 index 2 (fbar 4, hinf 1), [2:1:0] index 0, {dt:.2?}"))
}

fn criterion_2() -> Outcome {
    let (r, dt) = golden(EX2)?;
    check(r.morse_number == 4, "morse number")?;
    let o = r
        .attractors
        .iter()
        .find(|a| a.location.kind == LocationKind::Affine)
        .ok_or("no affine attractor")?;
    check(o.location.point.iter().all(|c| c.min_poly == "t") && o.index == 1, "origin index 1")?;
    let q = at_infinity(&r, 0.0, 1.0, Some(true)).ok_or("no ([0:1:0], ∞)")?;
    check(q.index == 1, "([0:1:0], ∞) index 1")?;
    let p = at_infinity(&r, 1.0, 0.0, Some(false)).ok_or("no ([1:0:0], 0)")?;
    check(is_zero_alpha(p) && p.index == 2, "([1:0:0], 0) index 2")?;
    let w = at_infinity(&r, 3.0, 2.0, None).ok_or("no attractor at [3:2:0]")?;
    check(w.index == 0, "[3:2:0] index 0")?;
    check(r.attractors.len() == 4, "exactly four attractors")?;
    check(dt < Duration::from_secs(2), "slower than 2 s")?;
    Ok(format!("m_f = 4, O:1 ([0:1:0],∞):1 ([1:0:0],0):2 [3:2:0]:0, {dt:.2?}"))
}

fn criterion_3() -> Outcome {
    let (r, dt) = golden(EX3)?;
    check(r.morse_number == 9, "morse number")?;
    let affine: Vec<&Attractor> = r.attractors.iter().filter(|a| a.location.kind == LocationKind::Affine).collect();
    check(affine.len() == 8 && affine.iter().all(|a| a.index == 1), "eight affine attractors of index 1")?;
    let q = at_infinity(&r, 0.0, 1.0, Some(true)).ok_or("no ([0:1:0], ∞)")?;
    check(q.index == 1, "([0:1:0], ∞) index 1")?;
    let positive_at_infinity = r
        .attractors
        .iter()
        .filter(|a| a.location.kind == LocationKind::Infinity && a.index > 0)
        .count();
    check(positive_at_infinity == 1, "one attractor at infinity")?;
    check(dt < Duration::from_secs(5), "slower than 5 s")?;
    Ok(format!("m_f = 9, 8 affine of index 1, ([0:1:0],∞):1, {dt:.2?}"))
}

/// Residual and multiplicity bookkeeping for every branch at every
/// center of `pr`; returns the number of branches checked.
fn branch_audit(pr: &Problem) -> Result<usize, String> {
    let mut centers: Vec<ChartPoint> = pr.affine_candidates().map_err(|e| e.to_string())?;
    for ip in &pr.polar.infinity_points {
        centers.push(ip.center.clone());
        centers.extend(ip.alternate_center());
    }
    let mut n = 0;
    for c in &centers {
        let records = pr.branch_records(c).map_err(|e| e.to_string())?;
        let local = BiPoly::from_poly(pr.polar_in_chart(c), &c.local_map());
        for r in &records {
            let res = branch_residual(&local, &r.branch);
            if let Some((e, _)) = res.terms().find(|(e, _)| *e < r.branch.truncation_order) {
                return Err(format!("residual coefficient at s^{e} below {}", r.branch.truncation_order));
            }
            n += 1;
        }
        let branches: Vec<_> = records.into_iter().map(|r| r.branch).collect();
        let sums = [(7, 3), (-11, 5), (13, 17)]
            .iter()
            .find_map(|&k| check_multiplicity_sum(&local, &branches, &Rational::from(k)).ok())
            .ok_or("multiplicity sum not computable")?;
        if sums.0 != sums.1 {
            return Err(format!("branch multiplicities {} vs resultant order {}", sums.0, sums.1));
        }
    }
    Ok(n)
}

fn criterion_4(audit: &mut Vec<(String, Problem)>) -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(20240917);
    let t = Rational::from((1, 100000));
    let mut total = 0;
    for i in 0..50u64 {
        let f = common::random_poly(&mut rng, 4);
        let text = f.to_string_with(&["x", "y"]);
        let mut cfg = RunConfig::new(&text);
        cfg.seed = i;
        let r = analyze(&cfg).map_err(|e| format!("{text}: {e}"))?;
        let ell = LinearForm::parse(&r.input.ell).map_err(|e| e.to_string())?;
        let cs = critical_points(&f, &ell, &t, 256).map_err(|e| format!("{text}: {e}"))?;
        if cs.points.len() as u64 != r.morse_number {
            return Err(format!(
                "f = {text}, ℓ = {}: symbolic {} vs {} critical points",
                r.input.ell,
                r.morse_number,
                cs.points.len()
            ));
        }
        total += r.morse_number;
        audit.push((text.clone(), Problem::new(&f, &ell).map_err(|e| e.to_string())?));
    }
    let dt = start.elapsed();
    check(dt < Duration::from_secs(300), "slower than 5 min")?;
    Ok(format!("50 random f, {total} Morse points in total, all conserved, {dt:.2?}"))
}

/// Order in [-4, 4] and coefficients from that order upward.
fn laurent(rng: &mut impl rand::Rng) -> (i64, Vec<i64>) {
    let lo = rng.random_range(-4..=4);
    let n = rng.random_range(1..=4);
    let mut c: Vec<i64> = (0..n)
        .map(|_| {
            let v = rng.random_range(1..=9i64);
            if rng.random_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    if rng.random_bool(0.3) && n > 2 {
        c[1] = 0;
    }
    (lo, c)
}

/// Roots of `s^-m (g - t h)` with modulus below `r`, numerically.
fn small_roots(g: &(i64, Vec<i64>), h: &(i64, Vec<i64>), t: &Rational, r: f64) -> Result<usize, String> {
    let m = g.0.min(h.0);
    let top = (g.0 + g.1.len() as i64).max(h.0 + h.1.len() as i64);
    let mut c = vec![Rational::new(); (top - m) as usize];
    for (k, v) in g.1.iter().enumerate() {
        c[(g.0 - m) as usize + k] += *v;
    }
    for (k, v) in h.1.iter().enumerate() {
        c[(h.0 - m) as usize + k] -= Rational::from(t * *v);
    }
    while c.last().is_some_and(|v| *v == 0) {
        c.pop();
    }
    let prec = 512;
    let cc: Vec<Complex> = c.iter().map(|v| Complex::from_rat(prec, v)).collect();
    let rs = isolate_roots(&cc, prec, 4 * prec).map_err(|e| e.to_string())?;
    let bound = Float::with_val(prec, r);
    Ok(rs.roots.iter().filter(|z| z.abs() < bound).count())
}

fn criterion_5() -> Outcome {
    let mut rng = common::rng(36);
    let t1 = Rational::from((1, rug::Integer::from(10).pow(24)));
    let t2 = Rational::from((1, rug::Integer::from(10).pow(40)));
    let mut positive = 0;
    for n in 0..200 {
        let g = laurent(&mut rng);
        let h = laurent(&mut rng);
        let expected = count_vanishing_solutions(g.0, h.0) as usize;
        // vanishing roots have modulus about t^(1/ν); the others stay
        // near the nonzero roots of g, all of modulus above 1/10
        let a = small_roots(&g, &h, &t1, 1e-2)?;
        let b = small_roots(&g, &h, &t2, 1e-4)?;
        if a != expected || b != expected {
            return Err(format!("pair {n}: g = {g:?}, h = {h:?}: expected {expected}, found {a} and {b}"));
        }
        positive += (expected > 0) as usize;
    }
    Ok(format!("200 pairs, {positive} with vanishing solutions, all counts exact"))
}

fn criterion_6(problems: &[Problem]) -> Outcome {
    let mut compared = 0;
    for pr in problems {
        for ip in &pr.polar.infinity_points {
            match pr.chart_consistency(ip, 256).map_err(|e| e.to_string())? {
                Some(true) => compared += 1,
                Some(false) => {
                    return Err(format!("charts disagree at an infinity point of {}", pr.f.to_string_with(&["x", "y"])))
                }
                None => {}
            }
        }
    }
    check(compared > 0, "no point visible in both charts")?;
    Ok(format!("{compared} infinity points agree in both charts"))
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    for (f, m) in [(EX1, 2), (EX2, 4), (EX3, 9)] {
        let mut seen: Vec<(String, u64)> = Vec::new();
        let mut seed = 1;
        while seen.len() < 2 && seed < 50 {
            let mut cfg = RunConfig::new(f);
            cfg.seed = seed;
            seed += 1;
            let Ok(r) = analyze(&cfg) else { continue };
            if seen.iter().all(|(e, _)| *e != r.input.ell) {
                seen.push((r.input.ell.clone(), r.morse_number));
            }
        }
        check(seen.len() == 2, "fewer than two accepted draws")?;
        if seen.iter().any(|(_, n)| *n != m) {
            return Err(format!("{f}: totals {seen:?}, expected {m}"));
        }
        lines.push(format!("{m} ({} | {})", seen[0].0, seen[1].0));
    }
    Ok(lines.join(", "))
}

fn criterion_8(problems: &[(String, Problem)]) -> Outcome {
    let mut branches = 0;
    for (name, pr) in problems {
        branches += branch_audit(pr).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{branches} branches over {} inputs", problems.len()))
}

fn main() -> ExitCode {
    let golden_problems: Vec<(String, Problem)> = [EX1, EX2, EX3]
        .iter()
        .map(|f| {
            let p: Poly = parse_poly(f, &["x", "y"]).unwrap();
            (f.to_string(), Problem::new(&p, &LinearForm::explicit(1, 1).unwrap()).unwrap())
        })
        .collect();
    let mut audit = golden_problems.clone();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "first example golden", criterion_1()),
        (2, "second example golden", criterion_2()),
        (3, "third example golden", criterion_3()),
    ];
    results.push((4, "conservation on random f", criterion_4(&mut audit)));
    results.push((5, "vanishing solutions of g - t h", criterion_5()));
    let all: Vec<Problem> = audit.iter().map(|(_, p)| p.clone()).collect();
    results.push((6, "chart independence", criterion_6(&all)));
    results.push((7, "ℓ-invariance of the total", criterion_7()));
    results.push((8, "branch residuals and multiplicities", criterion_8(&audit)));
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n}: {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
