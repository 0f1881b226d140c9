//! The assembled result of an analysis and its renderings.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::geometry::{GenericityReport, LinearForm, Provenance};
use crate::morse::{total_morse_number, AlphaValue, Attractor, LocationKind};
use crate::oracle::OracleVerdict;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub f: String,
    pub ell: String,
    pub degree: u32,
    pub ell_provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub input: InputEcho,
    pub genericity: GenericityReport,
    pub attractors: Vec<Attractor>,
    pub morse_number: u64,
    pub verification: Option<OracleVerdict>,
}

impl MorseReport {
    pub fn new(
        f: &Poly,
        ell: &LinearForm,
        genericity: GenericityReport,
        attractors: Vec<Attractor>,
        verification: Option<OracleVerdict>,
    ) -> Self {
        MorseReport {
            input: InputEcho {
                f: f.to_string_with(&["x", "y"]),
                ell: ell.to_string(),
                degree: f.total_degree().unwrap_or(0),
                ell_provenance: ell.provenance,
            },
            genericity,
            morse_number: total_morse_number(&attractors),
            attractors,
            verification,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Whether verification ran and disagreed.
    pub fn mismatched(&self) -> bool {
        self.verification.as_ref().is_some_and(|v| !v.matched)
    }
}

fn location_label(a: &Attractor) -> String {
    let pts: Vec<String> = a.location.point.iter().map(|p| p.to_string()).collect();
    match a.location.kind {
        LocationKind::Affine => format!("({})", pts.join(", ")),
        LocationKind::Infinity => format!("[{}]", pts.join(" : ")),
    }
}

fn alpha_label(a: &AlphaValue) -> String {
    match a {
        AlphaValue::Finite(v) => v.to_string(),
        AlphaValue::Infinite => "∞".into(),
    }
}

impl fmt::Display for MorseReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ell_src = match self.input.ell_provenance {
            Provenance::Explicit => "given".to_string(),
            Provenance::Seeded { seed, draw } => format!("seed {seed}, draw {draw}"),
        };
        writeln!(out, "f = {}  (degree {})", self.input.f, self.input.degree)?;
        writeln!(out, "ℓ = {}  ({ell_src})", self.input.ell)?;
        let g = &self.genericity;
        writeln!(
            out,
            "genericity: squarefree polar {}, avoids infinity points {}, compositions {}",
            yes(g.polar_squarefree),
            yes(g.ell_avoids_infinity_points),
            yes(g.no_degenerate_compositions)
        )?;
        if self.attractors.is_empty() {
            writeln!(out, "no attractors")?;
        } else {
            let rows: Vec<[String; 4]> = self
                .attractors
                .iter()
                .map(|a| {
                    let mut br = String::new();
                    for (i, b) in a.branches.iter().enumerate() {
                        if i > 0 {
                            br.push_str("; ");
                        }
                        let _ = match (b.mult_fbar, b.mult_hinf) {
                            (Some(fb), Some(h)) => write!(br, "fbar {fb} hinf {h} -> {}", b.contribution),
                            _ => write!(br, "ord f {} ord ℓ {} -> {}", b.ord_f, b.ord_ell, b.contribution),
                        };
                        if b.conj_multiplicity > 1 {
                            let _ = write!(br, " ×{}", b.conj_multiplicity);
                        }
                    }
                    [location_label(a), a.location.chart.to_string(), alpha_label(&a.alpha), format!("{} | {br}", a.index)]
                })
                .collect();
            let w: Vec<usize> = (0..3)
                .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
                .collect();
            writeln!(out, "{:w0$}  {:w1$}  {:w2$}  index | branches", "point", "chart", "α", w0 = w[0], w1 = w[1], w2 = w[2])?;
            for r in &rows {
                writeln!(out, "{:w0$}  {:w1$}  {:w2$}  {}", r[0], r[1], r[2], r[3], w0 = w[0], w1 = w[1], w2 = w[2])?;
            }
        }
        writeln!(out, "Morse number: {}", self.morse_number)?;
        if let Some(v) = &self.verification {
            writeln!(
                out,
                "verification: {} ({} critical points, t in {{{}}})",
                if v.matched { "matched" } else { "MISMATCH" },
                v.point_count,
                v.t_schedule.join(", ")
            )?;
            for m in &v.mismatches {
                writeln!(out, "  {m}")?;
            }
        }
        Ok(())
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "failed"
    }
}
