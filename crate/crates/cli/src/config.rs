//! Run configuration: one JSON document, unknown keys rejected.
//!
//! Precedence, highest first: command-line flags, the config document,
//! built-in defaults.

use dissq::bifurcation::{GridSpec, LambdaSign};
use dissq::ModelParams;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub space: Option<SpaceBlock>,
    #[serde(default)]
    pub model: Option<ModelParams>,
    #[serde(default)]
    pub task: Option<TaskBlock>,
    #[serde(default)]
    pub output: Option<OutputBlock>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceBlock {
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub hbar: Option<f64>,
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskBlock {
    Report {
        #[serde(default)]
        n_max: Option<usize>,
        #[serde(default)]
        tol: Option<f64>,
    },
    Scan {
        grid: GridSpec,
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        n_max: Option<usize>,
        #[serde(default)]
        lambda_sign: Option<LambdaSign>,
    },
    Evolve {
        t_final: f64,
        dt: f64,
        #[serde(default)]
        record_every: Option<usize>,
        #[serde(default)]
        initial: Option<InitialState>,
    },
    Nullspace {
        #[serde(default)]
        svd_tol: Option<f64>,
    },
    Spectrum {
        #[serde(default)]
        tol: Option<f64>,
    },
    ReproducePaper {
        #[serde(default)]
        only: Option<String>,
        #[serde(default)]
        lambda_sign: Option<LambdaSign>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl TaskBlock {
    pub fn name(&self) -> &'static str {
        match self {
            TaskBlock::Report { .. } => "report",
            TaskBlock::Scan { .. } => "scan",
            TaskBlock::Evolve { .. } => "evolve",
            TaskBlock::Nullspace { .. } => "nullspace",
            TaskBlock::Spectrum { .. } => "spectrum",
            TaskBlock::ReproducePaper { .. } => "reproduce_paper",
        }
    }
}

/// Initial density matrix for `evolve`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Fock { n: usize },
    Superposition { n: usize, m: usize },
    MaximallyMixed { levels: usize },
    /// Random full-rank state drawn from `--seed` (or `seed`).
    Random {
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub path: Option<String>,
}

pub fn parse(text: &str) -> Result<RunConfig, serde_json::Error> {
    if text.trim().is_empty() {
        return Ok(RunConfig::default());
    }
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_document() {
        let c = parse(
            r#"{"space": {"dim": 16}, "model": {"kind": "cosine", "eps0": 1.0},
                "task": {"kind": "report", "tol": 1e-10}, "output": {"format": "json"}}"#,
        )
        .unwrap();
        assert_eq!(c.space.unwrap().dim, Some(16));
        assert!(matches!(c.task, Some(TaskBlock::Report { tol: Some(_), n_max: None })));
        assert_eq!(c.output.unwrap().format, Some(Format::Json));
    }

    #[test]
    fn empty_document_is_default() {
        let c = parse("  \n").unwrap();
        assert!(c.space.is_none() && c.model.is_none() && c.task.is_none());
    }

    #[test]
    fn unknown_keys_rejected_at_every_level() {
        for bad in [
            r#"{"spaces": {}}"#,
            r#"{"space": {"dim": 8, "hbarr": 1}}"#,
            r#"{"model": {"kind": "fold", "alpha0": 1, "alpha1": 0, "alpha2": 1, "x": 0}}"#,
            r#"{"task": {"kind": "report", "tolerance": 1}}"#,
            r#"{"task": {"kind": "evolve", "t_final": 1, "dt": 0.1, "initial": {"kind": "fock", "n": 0, "m": 1}}}"#,
            r#"{"output": {"format": "xml"}}"#,
            r#"{"task": {"kind": "walk"}}"#,
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn scan_grid() {
        let c = parse(
            r#"{"task": {"kind": "scan", "grid": {"type": "lambda", "a": 3.0,
                "lambda": {"min": -1, "max": 1, "points": 201}}, "lambda_sign": "printed"}}"#,
        )
        .unwrap();
        match c.task.unwrap() {
            TaskBlock::Scan { grid, lambda_sign, .. } => {
                assert_eq!(grid.len(), 201);
                assert_eq!(lambda_sign, Some(LambdaSign::Printed));
            }
            other => panic!("{other:?}"),
        }
    }
}
