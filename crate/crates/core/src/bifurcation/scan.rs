use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fold_normal_form, FoldRoots, LambdaSign};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::models::FoldParams;
use crate::stationary::{check_margin, max_scan_level};

/// Default root-to-level matching tolerance, in units of ħω.
pub const DEFAULT_MATCH_TOL: f64 = 1e-9;

/// Evenly spaced values `min + (max − min)·i/(points − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn fixed(value: f64) -> Self {
        Self { min: value, max: value, points: 1 }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidArgument(format!("{name}: points must be >= 1")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name}: bounds must be finite")));
        }
        if self.points == 1 && self.min != self.max {
            return Err(Error::InvalidArgument(format!("{name}: a single point needs min == max")));
        }
        if self.min > self.max {
            return Err(Error::InvalidArgument(format!("{name}: min > max")));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridSpec {
    /// λ sweep at fixed shift `a`, with α₂ = 1.
    Lambda { a: f64, lambda: Axis },
    /// Cartesian grid over the coefficients; α₀ varies slowest.
    Alpha { alpha0: Axis, alpha1: Axis, alpha2: Axis },
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GridSpec::Lambda { a, lambda } => {
                if !a.is_finite() {
                    return Err(Error::InvalidArgument("a must be finite".into()));
                }
                lambda.validate("lambda")
            }
            GridSpec::Alpha { alpha0, alpha1, alpha2 } => {
                alpha0.validate("alpha0")?;
                alpha1.validate("alpha1")?;
                alpha2.validate("alpha2")
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GridSpec::Lambda { lambda, .. } => lambda.points,
            GridSpec::Alpha { alpha0, alpha1, alpha2 } => alpha0.points * alpha1.points * alpha2.points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn params_at(&self, index: usize, sign: LambdaSign) -> FoldParams {
        match *self {
            GridSpec::Lambda { a, lambda } => FoldParams::from_normal_form(a, lambda.value(index), sign),
            GridSpec::Alpha { alpha0, alpha1, alpha2 } => {
                let i2 = index % alpha2.points;
                let i1 = (index / alpha2.points) % alpha1.points;
                let i0 = index / (alpha2.points * alpha1.points);
                FoldParams { alpha0: alpha0.value(i0), alpha1: alpha1.value(i1), alpha2: alpha2.value(i2) }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanOptions {
    pub grid: GridSpec,
    /// |E_root − E_n| < tol·ħω counts as a hit on level n.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Highest level considered; defaults to dim − 5.
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub lambda_sign: LambdaSign,
}

fn default_tol() -> f64 {
    DEFAULT_MATCH_TOL
}

impl ScanOptions {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, tol: DEFAULT_MATCH_TOL, n_max: None, lambda_sign: LambdaSign::Corrected }
    }
}

/// One grid point of a fold scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub index: usize,
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// `None` when α₂ = 0.
    pub a: Option<f64>,
    pub lambda: Option<f64>,
    pub roots: FoldRoots,
    /// Fock levels whose energy coincides with a reported root.
    pub stationary_levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub lambda_sign: LambdaSign,
    pub tol: f64,
    pub n_max: usize,
    pub records: Vec<BranchRecord>,
}

fn matching_levels(roots: &FoldRoots, space: &FockSpace, n_max: usize, tol: f64) -> Vec<usize> {
    let hw = space.quantum();
    let mut levels: Vec<usize> = roots
        .values()
        .into_iter()
        .filter_map(|r| {
            let n = (r / hw - 0.5).round();
            if n < 0.0 || n > n_max as f64 {
                return None;
            }
            let n = n as usize;
            ((space.energy(n) - r).abs() < tol * hw).then_some(n)
        })
        .collect();
    levels.dedup();
    levels
}

/// Fold normal form, root pair and Fock-level hits at every grid point.
/// Records are ordered by grid index regardless of scheduling.
pub fn scan(space: &FockSpace, opts: &ScanOptions) -> Result<ScanResult> {
    space.validate()?;
    opts.grid.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be > 0, got {}", opts.tol)));
    }
    let n_max = match opts.n_max {
        Some(n) => {
            check_margin(space.dim, n)?;
            n
        }
        None => max_scan_level(space.dim).ok_or(Error::Margin { n_max: 0, limit: space.dim as i64 - 5 })?,
    };
    let records = (0..opts.grid.len())
        .into_par_iter()
        .map(|index| {
            let p = opts.grid.params_at(index, opts.lambda_sign);
            let (a, lambda, roots) = match fold_normal_form(&p, opts.lambda_sign) {
                Ok(nf) => (Some(nf.a), Some(nf.lambda), nf.roots()),
                Err(_) => (None, None, FoldRoots::None),
            };
            let stationary_levels = matching_levels(&roots, space, n_max, opts.tol);
            BranchRecord {
                index,
                alpha0: p.alpha0,
                alpha1: p.alpha1,
                alpha2: p.alpha2,
                a,
                lambda,
                roots,
                stationary_levels,
            }
        })
        .collect();
    Ok(ScanResult { lambda_sign: opts.lambda_sign, tol: opts.tol, n_max, records })
}
