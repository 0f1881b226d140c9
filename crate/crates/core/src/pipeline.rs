//! End-to-end analysis of one input.

use rug::Rational;
use thiserror::Error;

use crate::geometry::{check_genericity, draw_ell, GenericityReport, GeometryError, LinearForm};
use crate::morse::{Attractor, MorseError, Problem};
use crate::oracle::{classify_trajectories, default_schedule, OracleError};
use crate::par::ExecMode;
use crate::poly::{parse_poly, Poly};
use crate::report::MorseReport;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub f_text: String,
    /// Explicit `ℓ`; when absent one is drawn from `seed`.
    pub ell_text: Option<String>,
    pub seed: u64,
    pub verify: bool,
    pub t_schedule: Option<Vec<Rational>>,
    pub precision: u32,
    pub max_redraws: u32,
    pub mode: ExecMode,
}

impl RunConfig {
    pub fn new(f_text: impl Into<String>) -> Self {
        RunConfig {
            f_text: f_text.into(),
            ell_text: None,
            seed: 0,
            verify: false,
            t_schedule: None,
            precision: 256,
            max_redraws: 16,
            mode: ExecMode::default(),
        }
    }

    pub fn with_ell(mut self, ell: impl Into<String>) -> Self {
        self.ell_text = Some(ell.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("no generic linear form: {message}")]
    Genericity { message: String, report: GenericityReport },
    #[error("verification failed: {0}")]
    Oracle(#[from] OracleError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input(_) => 2,
            PipelineError::Genericity { .. } => 3,
            PipelineError::Oracle(_) | PipelineError::Internal(_) => 1,
        }
    }
}

fn input_error(e: GeometryError) -> PipelineError {
    match e {
        GeometryError::Parse(_)
        | GeometryError::NotLinear(_)
        | GeometryError::ZeroForm
        | GeometryError::ConstantFunction => PipelineError::Input(e.to_string()),
        GeometryError::GenericityExhausted(report) => PipelineError::Genericity {
            message: format!("no generic form in {} draws", report.redraws + 1),
            report,
        },
        other => PipelineError::Internal(other.to_string()),
    }
}

enum Attempt {
    Done(Vec<Attractor>),
    Degenerate(String),
}

fn attempt(f: &Poly, ell: &LinearForm, cfg: &RunConfig) -> Result<Attempt, PipelineError> {
    let run = Problem::new(f, ell).and_then(|p| p.attractors(cfg.mode, cfg.precision));
    match run {
        Ok(a) => Ok(Attempt::Done(a)),
        Err(e @ MorseError::Degenerate { .. }) => Ok(Attempt::Degenerate(e.to_string())),
        Err(MorseError::Geometry(g)) => Err(input_error(g)),
        Err(e) => Err(PipelineError::Internal(e.to_string())),
    }
}

/// Parses, fixes `ℓ`, computes all attractors and optionally verifies.
pub fn analyze(cfg: &RunConfig) -> Result<MorseReport, PipelineError> {
    let f = parse_poly(&cfg.f_text, &["x", "y"]).map_err(|e| PipelineError::Input(e.to_string()))?;
    if f.is_constant() {
        return Err(input_error(GeometryError::ConstantFunction));
    }
    let (ell, genericity, attractors) = match &cfg.ell_text {
        Some(text) => {
            let ell = LinearForm::parse(text).map_err(input_error)?;
            let mut g = check_genericity(&f, &ell).map_err(input_error)?;
            if !g.accepted() {
                return Err(PipelineError::Genericity {
                    message: format!("the given ℓ = {ell} is not generic for f"),
                    report: g,
                });
            }
            match attempt(&f, &ell, cfg)? {
                Attempt::Done(a) => (ell, g, a),
                Attempt::Degenerate(msg) => {
                    g.no_degenerate_compositions = false;
                    return Err(PipelineError::Genericity { message: msg, report: g });
                }
            }
        }
        None => draw_until_generic(&f, cfg)?,
    };
    let verification = if cfg.verify {
        let schedule = cfg.t_schedule.clone().unwrap_or_else(default_schedule);
        Some(classify_trajectories(&f, &ell, &schedule, &attractors, cfg.precision, cfg.mode)?)
    } else {
        None
    };
    Ok(MorseReport::new(&f, &ell, genericity, attractors, verification))
}

fn draw_until_generic(
    f: &Poly,
    cfg: &RunConfig,
) -> Result<(LinearForm, GenericityReport, Vec<Attractor>), PipelineError> {
    let mut last: Option<(String, GenericityReport)> = None;
    for i in 0..cfg.max_redraws.max(1) {
        let ell = draw_ell(cfg.seed, i as u64);
        let mut g = check_genericity(f, &ell).map_err(input_error)?;
        g.redraws = i;
        g.seed = cfg.seed;
        if !g.accepted() {
            last = Some((format!("draw {i} failed the polar checks"), g));
            continue;
        }
        match attempt(f, &ell, cfg)? {
            Attempt::Done(a) => return Ok((ell, g, a)),
            Attempt::Degenerate(msg) => {
                g.no_degenerate_compositions = false;
                last = Some((msg, g));
            }
        }
    }
    let (msg, report) = last.expect("at least one draw");
    Err(PipelineError::Genericity {
        message: format!("{} draws exhausted; last: {msg}", cfg.max_redraws.max(1)),
        report,
    })
}
