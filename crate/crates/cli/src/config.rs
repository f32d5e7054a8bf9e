//! Run configuration: a distribution (inline, built-in, or raw atoms) plus a
//! `"run"` block of solver and certificate parameters.

use std::path::PathBuf;

use advbayes::certify::{AtomList, DEFAULT_GRID_H, DEFAULT_MAX_K, MAX_K_LIMIT};
use advbayes::conditions::MIN_GRID_N;
use advbayes::{examples, Class, DensityComponent, DistributionPair, Error, Result};
use serde::Deserialize;

pub const DEFAULT_GRID_N: usize = 2048;
pub const DEFAULT_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Single(f64),
    Sweep { min: f64, max: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Pair(DistributionPair),
    Atoms { class0: AtomList, class1: AtomList },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub epsilon: Option<Epsilon>,
    pub grid_n: usize,
    pub grid_h: f64,
    pub max_k: usize,
    pub tolerance: f64,
    pub keep_all: bool,
    pub full_matching: bool,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    example: Option<String>,
    class0: Option<Vec<DensityComponent>>,
    class1: Option<Vec<DensityComponent>>,
    atoms: Option<RawAtoms>,
    #[serde(default)]
    run: RawRun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtoms {
    class0: Vec<(f64, f64)>,
    class1: Vec<(f64, f64)>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RawRun {
    pub epsilon: Option<f64>,
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub steps: Option<usize>,
    pub grid_n: Option<usize>,
    pub grid_h: Option<f64>,
    pub max_k: Option<usize>,
    pub tolerance: Option<f64>,
    pub keep_all: Option<bool>,
    pub full_matching: Option<bool>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

fn atom_list(class: Class, rows: Vec<(f64, f64)>) -> Result<AtomList> {
    let mut rows = rows;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (pos, mass) = rows.into_iter().unzip();
    AtomList::new(class, pos, mass).map_err(|e| Error::Validation(e.to_string()))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let source = match (raw.example, raw.class0.is_some() || raw.class1.is_some(), raw.atoms) {
        (Some(name), false, None) => Source::Pair(examples::by_name(&name)?),
        (None, true, None) => {
            let pair = DistributionPair::new(raw.class0.unwrap_or_default(), raw.class1.unwrap_or_default())
                .map_err(|e| Error::Validation(e.to_string()))?;
            Source::Pair(pair)
        }
        (None, false, Some(a)) => {
            let class0 = atom_list(Class::Zero, a.class0)?;
            let class1 = atom_list(Class::One, a.class1)?;
            let total = class0.total_mass() + class1.total_mass();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("atom masses sum to {total}, expected 1")));
            }
            Source::Atoms { class0, class1 }
        }
        (None, false, None) => {
            return Err(Error::Validation("config needs one of `example`, `class0`/`class1`, or `atoms`".into()))
        }
        _ => return Err(Error::Validation("`example`, `class0`/`class1` and `atoms` are mutually exclusive".into())),
    };
    finish(source, raw.run)
}

/// Fills defaults and checks the run block.
pub fn finish(source: Source, run: RawRun) -> Result<RunConfig> {
    let epsilon = match (run.epsilon, run.eps_min, run.eps_max, run.steps) {
        (Some(e), None, None, None) => Some(Epsilon::Single(e)),
        (None, Some(min), Some(max), steps) => Some(Epsilon::Sweep { min, max, steps: steps.unwrap_or(1) }),
        (None, None, None, None) => None,
        _ => {
            return Err(Error::Validation(
                "give either `epsilon` or `eps_min`, `eps_max` (and optionally `steps`)".into(),
            ))
        }
    };
    let cfg = RunConfig {
        source,
        epsilon,
        grid_n: run.grid_n.unwrap_or(DEFAULT_GRID_N),
        grid_h: run.grid_h.unwrap_or(DEFAULT_GRID_H),
        max_k: run.max_k.unwrap_or(DEFAULT_MAX_K),
        tolerance: run.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        keep_all: run.keep_all.unwrap_or(false),
        full_matching: run.full_matching.unwrap_or(false),
        out: run.out,
        csv: run.csv,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        match self.epsilon {
            Some(Epsilon::Single(e)) if !(e >= 0.0 && e.is_finite()) => {
                return bad(format!("epsilon must be finite and >= 0, got {e}"))
            }
            Some(Epsilon::Sweep { min, max, steps }) => {
                if !(min >= 0.0 && min.is_finite() && max.is_finite()) {
                    return bad(format!("sweep bounds must be finite and >= 0, got [{min}, {max}]"));
                }
                if max < min {
                    return bad(format!("eps_max {max} is below eps_min {min}"));
                }
                if steps == 0 {
                    return bad("steps must be at least 1".into());
                }
            }
            _ => {}
        }
        if self.grid_n < MIN_GRID_N {
            return bad(format!("grid_n must be at least {MIN_GRID_N}, got {}", self.grid_n));
        }
        if !(self.grid_h > 0.0 && self.grid_h.is_finite()) {
            return bad(format!("grid_h must be positive, got {}", self.grid_h));
        }
        if self.max_k == 0 || self.max_k > MAX_K_LIMIT {
            return bad(format!("maxK must be in 1..={MAX_K_LIMIT}, got {}", self.max_k));
        }
        if !(self.tolerance >= 0.0) {
            return bad(format!("tolerance must be >= 0, got {}", self.tolerance));
        }
        Ok(())
    }

    pub fn pair(&self) -> Result<&DistributionPair> {
        match &self.source {
            Source::Pair(p) => Ok(p),
            Source::Atoms { .. } => Err(Error::Validation("atom input is only accepted by `certify`".into())),
        }
    }
}
