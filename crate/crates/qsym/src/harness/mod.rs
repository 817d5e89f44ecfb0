//! Identity registry, seeded samplers and the suite runner.

mod registry;
mod report;
mod sampler;

use std::collections::BTreeMap;
use std::time::Instant;

use glob::{MatchOptions, Pattern};
use qsym_core::{ApComplex, QContext, QError, Residual};
use rayon::prelude::*;

pub use registry::{Evaluator, IdentityDescriptor, REGISTRY};
pub use report::{IdentityReport, SuiteReport};
pub use sampler::{param, ParamKind, ParamSpec, Regime, Sampler};

/// Redraws allowed per trial when a draw lands too close to a pole or outside an identity's domain.
pub const MAX_REDRAWS: u32 = 20;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("no matching identities for `{0}`")]
    NoMatch(String),
    #[error("invalid pattern `{0}`: {1}")]
    Pattern(String, String),
    #[error(transparent)]
    Core(#[from] QError),
}

/// Settings of one suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub precision: u32,
    pub seed: u64,
    pub regime: Regime,
    /// Case-insensitive glob patterns over ids; `all` means every identity.
    pub selection: Vec<String>,
    pub trials: Option<u32>,
    /// Record wall-clock times; off by default so reports are reproducible byte for byte.
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            precision: 64,
            seed: 42,
            regime: Regime::Real,
            selection: vec!["all".into()],
            trials: None,
            timings: false,
        }
    }
}

pub fn list_identities() -> &'static [IdentityDescriptor] {
    REGISTRY
}

/// Registry entries matched by `patterns`; every pattern has to match something.
pub fn select(patterns: &[String]) -> Result<Vec<&'static IdentityDescriptor>, HarnessError> {
    let opts = MatchOptions {
        case_sensitive: false,
        ..MatchOptions::new()
    };
    let mut chosen = vec![false; REGISTRY.len()];
    for raw in patterns.iter().flat_map(|p| p.split(',')).map(str::trim) {
        let text = if raw.eq_ignore_ascii_case("all") { "*" } else { raw };
        let pat = Pattern::new(text).map_err(|e| HarnessError::Pattern(raw.into(), e.to_string()))?;
        let mut hit = false;
        for (slot, d) in chosen.iter_mut().zip(REGISTRY) {
            if pat.matches_with(d.id, opts) {
                *slot = true;
                hit = true;
            }
        }
        if !hit {
            return Err(HarnessError::NoMatch(raw.into()));
        }
    }
    Ok(REGISTRY.iter().zip(chosen).filter(|(_, c)| *c).map(|(d, _)| d).collect())
}

/// Runs the selected identities. Output is sorted by id and depends only on
/// the configuration.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, HarnessError> {
    qsym_core::QContext::from_decimal("2", cfg.precision)?;
    let chosen = select(&cfg.selection)?;
    let mut results: Vec<IdentityReport> = chosen.par_iter().map(|d| run_identity(d, cfg)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(SuiteReport {
        precision: cfg.precision,
        seed: cfg.seed,
        regime: cfg.regime.name().into(),
        results,
    })
}

fn tolerance(digits: u32) -> f64 {
    10f64.powf(-f64::from(digits) / 2.0)
}

fn decimal(ctx: &QContext, z: &ApComplex) -> String {
    let (re, im) = ctx.to_decimal(z);
    if z.is_real() {
        re
    } else {
        format!("{re},{im}")
    }
}

enum Trial {
    Done(Residual, BTreeMap<String, String>),
    Failed(String),
}

fn run_trial(d: &IdentityDescriptor, sampler: &mut Sampler, digits: u32) -> Trial {
    let mut last = String::new();
    for _ in 0..=MAX_REDRAWS {
        let q = sampler.draw_q();
        let ctx = match QContext::new(&ApComplex::from_f64(q, 0.0, 64), digits) {
            Ok(c) => c.with_singular_threshold(digits / 4),
            Err(e) => return Trial::Failed(e.to_string()),
        };
        let values: Vec<ApComplex> = d.params.iter().map(|p| sampler.draw(&ctx, p)).collect();
        match (d.evaluator)(&ctx, &values) {
            Ok(r) => {
                let mut params = BTreeMap::new();
                params.insert("q".to_string(), decimal(&ctx, ctx.q()));
                for (spec, v) in d.params.iter().zip(&values) {
                    params.insert(spec.name.to_string(), decimal(&ctx, v));
                }
                return Trial::Done(r, params);
            }
            Err(e @ (QError::NonGeneric(_) | QError::DegenerateQ | QError::Domain(_))) => last = e.to_string(),
            Err(e) => return Trial::Failed(e.to_string()),
        }
    }
    Trial::Failed(format!("no generic draw after {MAX_REDRAWS} redraws ({last})"))
}

fn run_identity(d: &IdentityDescriptor, cfg: &SuiteConfig) -> IdentityReport {
    let start = Instant::now();
    let trials = cfg.trials.unwrap_or(d.default_trials);
    let mut sampler = Sampler::new(cfg.seed, d.id, cfg.regime);
    if !d.uses_base() {
        sampler = sampler.large_q_only();
    }
    let mut worst = Residual::default();
    let mut worst_params = BTreeMap::new();
    let mut error = None;
    for _ in 0..trials {
        match run_trial(d, &mut sampler, cfg.precision) {
            Trial::Done(r, params) => {
                if worst_params.is_empty() || r.rel.is_nan() || r.rel > worst.rel {
                    worst_params = params;
                }
                worst = worst.max(r);
            }
            Trial::Failed(msg) => {
                error.get_or_insert(msg);
            }
        }
    }
    let pass = error.is_none() && worst.rel < tolerance(cfg.precision);
    IdentityReport {
        id: d.id.to_string(),
        trials,
        max_abs_residual: worst.abs,
        max_rel_residual: worst.rel,
        worst_params,
        pass,
        precision_digits: cfg.precision,
        seed: cfg.seed,
        regime: cfg.regime.name().into(),
        wall_time_ms: if cfg.timings { start.elapsed().as_millis() as u64 } else { 0 },
        error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_rules() {
        assert_eq!(select(&["QBID*".into()]).unwrap().len(), 4);
        assert_eq!(select(&["qsbe".into()]).unwrap().len(), 1);
        assert_eq!(select(&["all".into()]).unwrap().len(), REGISTRY.len());
        assert_eq!(select(&["QSBE,QSYB".into()]).unwrap().len(), 2);
        let err = select(&["NOPE".into()]).unwrap_err();
        assert!(err.to_string().contains("no matching identities"));
    }
}
