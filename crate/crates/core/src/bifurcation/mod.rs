//! Function-level bifurcation analysis of the stationarity condition
//! `N(E, E) = 0`.
//!
//! For a quadratic `N(E) = α₀ + α₁E + α₂E²` the substitution `x = E − a`,
//! `a = −α₁/(2α₂)` gives the fold normal form `x² − λ = 0` with
//! `λ = (α₁² − 4α₀α₂)/(4α₂²)`. Distinct real roots (and hence a pair of
//! stationary Fock projectors when both land on the oscillator spectrum)
//! exist only for `λ > 0`.

mod catastrophe;
mod multi;
mod poly;
mod scan;

pub use catastrophe::{critical_points, CatastropheFamily, CatastrophePotential, CriticalPointSearch};
pub use multi::{potential_reconstruct, potentiality_check, MultiN, MultiPoly, Potentiality};
pub use poly::{depressed_shift, PolynomialN};
pub use scan::{scan, Axis, BranchRecord, GridSpec, ScanOptions, ScanResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::models::FoldParams;

/// Which expression is used for the unfolding parameter λ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSign {
    /// λ = (α₁² − 4α₀α₂)/(4α₂²): `x² − λ = 0` is equivalent to `N(E,E) = 0`.
    #[default]
    Corrected,
    /// λ = (4α₀α₂ − α₁²)/(4α₂²), the opposite sign, kept for comparison.
    Printed,
}

impl LambdaSign {
    pub fn as_str(&self) -> &'static str {
        match self {
            LambdaSign::Corrected => "corrected",
            LambdaSign::Printed => "printed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldNormalForm {
    pub a: f64,
    pub lambda: f64,
}

/// Real solutions of `x² − λ = 0`, shifted back to energies `E = a + x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FoldRoots {
    None,
    /// λ = 0: one double root.
    Tangency { root: f64 },
    Pair { low: f64, high: f64 },
}

impl FoldRoots {
    pub fn count(&self) -> usize {
        match self {
            FoldRoots::None => 0,
            FoldRoots::Tangency { .. } => 1,
            FoldRoots::Pair { .. } => 2,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            FoldRoots::None => Vec::new(),
            FoldRoots::Tangency { root } => vec![root],
            FoldRoots::Pair { low, high } => vec![low, high],
        }
    }
}

impl FoldNormalForm {
    /// Roots `a ± √λ`. |λ| within a few ulps of zero counts as tangency.
    pub fn roots(&self) -> FoldRoots {
        let scale = 1.0_f64.max(self.a * self.a);
        if self.lambda.abs() <= 4.0 * f64::EPSILON * scale {
            FoldRoots::Tangency { root: self.a }
        } else if self.lambda < 0.0 {
            FoldRoots::None
        } else {
            let r = self.lambda.sqrt();
            FoldRoots::Pair { low: self.a - r, high: self.a + r }
        }
    }
}

/// `(a, λ)` of the quadratic stationarity function.
pub fn fold_normal_form(p: &FoldParams, sign: LambdaSign) -> Result<FoldNormalForm> {
    if p.alpha2 == 0.0 {
        return Err(Error::InvalidParams("alpha2 = 0: no fold normal form for a linear N(E,E)".into()));
    }
    let a = -p.alpha1 / (2.0 * p.alpha2);
    let corrected = (p.alpha1 * p.alpha1 - 4.0 * p.alpha0 * p.alpha2) / (4.0 * p.alpha2 * p.alpha2);
    let lambda = match sign {
        LambdaSign::Corrected => corrected,
        LambdaSign::Printed => -corrected,
    };
    Ok(FoldNormalForm { a, lambda })
}

impl FoldParams {
    /// Monic coefficients (α₂ = 1) whose normal form under `sign` is `(a, λ)`.
    pub fn from_normal_form(a: f64, lambda: f64, sign: LambdaSign) -> Self {
        let alpha0 = match sign {
            LambdaSign::Corrected => a * a - lambda,
            LambdaSign::Printed => a * a + lambda,
        };
        Self { alpha0, alpha1: -2.0 * a, alpha2: 1.0 }
    }
}

/// α with roots at `E_{n1}` and `E_{n2}`: α₂ = 1, α₁ = −(E_{n1} + E_{n2}),
/// α₀ = E_{n1}E_{n2}.
pub fn fold_params_from_levels(n1: usize, n2: usize, space: &FockSpace) -> Result<FoldParams> {
    if n1 == n2 {
        return Err(Error::InvalidArgument(format!("levels must differ, got n1 = n2 = {n1}")));
    }
    let e1 = space.energy(n1);
    let e2 = space.energy(n2);
    Ok(FoldParams { alpha0: e1 * e2, alpha1: -(e1 + e2), alpha2: 1.0 })
}
