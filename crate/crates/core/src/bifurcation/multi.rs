use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for coefficient comparisons of polynomial systems.
pub const COEFF_TOL: f64 = 1e-12;

/// Sparse polynomial in `nvars` real variables, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// `c · x_i`.
    pub fn variable(nvars: usize, i: usize, c: f64) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, c);
        p
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated monomials add.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::InvalidPolynomial(format!(
                    "monomial has {} exponents, expected {nvars}",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(exps).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, &c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// ∂/∂x_var.
    pub fn partial(&self, var: usize) -> MultiPoly {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[var] > 0 {
                let mut d = e.clone();
                d[var] -= 1;
                out.add_term(d, c * e[var] as f64);
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest coefficient difference between two polynomials.
    pub fn max_coeff_diff(&self, other: &MultiPoly) -> f64 {
        let mut worst: f64 = 0.0;
        for (e, &c) in &self.terms {
            worst = worst.max((c - other.terms.get(e).copied().unwrap_or(0.0)).abs());
        }
        for (e, &c) in &other.terms {
            if !self.terms.contains_key(e) {
                worst = worst.max(c.abs());
            }
        }
        worst
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

/// `s` stationarity functions `N_k(E_1, …, E_s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiN {
    pub s: usize,
    pub funcs: Vec<MultiPoly>,
}

impl MultiN {
    pub fn new(funcs: Vec<MultiPoly>) -> Result<Self> {
        let m = Self { s: funcs.len(), funcs };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::InvalidPolynomial("at least one function is required".into()));
        }
        if self.funcs.len() != self.s {
            return Err(Error::InvalidPolynomial(format!(
                "s = {} but {} functions given",
                self.s,
                self.funcs.len()
            )));
        }
        if let Some(f) = self.funcs.iter().find(|f| f.nvars != self.s) {
            return Err(Error::InvalidPolynomial(format!(
                "function of {} variables in a system with s = {}",
                f.nvars, self.s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potentiality {
    pub potential: bool,
    /// max over k < l of the coefficient difference of ∂N_k/∂E_l and ∂N_l/∂E_k.
    pub max_asymmetry: f64,
}

/// Symmetric-Jacobian test ∂N_k/∂E_l = ∂N_l/∂E_k by coefficient comparison.
/// One function of one variable is always potential.
pub fn potentiality_check(m: &MultiN) -> Result<Potentiality> {
    m.validate()?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in 0..m.s {
        scale = scale.max(m.funcs[k].max_abs_coeff());
        for l in k + 1..m.s {
            let a = m.funcs[k].partial(l);
            let b = m.funcs[l].partial(k);
            worst = worst.max(a.max_coeff_diff(&b));
        }
    }
    Ok(Potentiality { potential: worst <= COEFF_TOL * scale, max_asymmetry: worst })
}

/// Potential V with ∂V/∂E_k = N_k and V(base) = 0.
///
/// Integrates along the ray from the origin: each monomial `c·E^α` of `N_k`
/// contributes `c·E^α·E_k/(|α| + 1)`.
pub fn potential_reconstruct(m: &MultiN, base: &[f64]) -> Result<MultiPoly> {
    let pot = potentiality_check(m)?;
    if !pot.potential {
        return Err(Error::NotPotential(pot.max_asymmetry));
    }
    if base.len() != m.s {
        return Err(Error::InvalidArgument(format!("base point has {} coordinates, expected {}", base.len(), m.s)));
    }
    let mut v = MultiPoly::zero(m.s);
    for (k, f) in m.funcs.iter().enumerate() {
        for (e, &c) in &f.terms {
            let total: u32 = e.iter().sum();
            let mut e2 = e.clone();
            e2[k] += 1;
            v.add_term(e2, c / (total as f64 + 1.0));
        }
    }
    let offset = v.eval(base);
    v.add_term(vec![0; m.s], -offset);
    Ok(v)
}
