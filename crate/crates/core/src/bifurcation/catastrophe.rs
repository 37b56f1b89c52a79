//! Catalog of zero-modal catastrophe potentials `V(x) = V₀(x) + Q(x)`.
//!
//! ```text
//! A±n : ±x₁^{n+1} + Σ_{j=1}^{n−1} a_j x₁^j                              n ≥ 2
//! D±n : x₁²x₂ ± x₂^{n−1} + Σ_{j=1}^{n−3} a_j x₂^j
//!                        + Σ_{j=n−2}^{n−1} a_j x₁^{j−(n−3)}              n ≥ 4
//! E±6 : x₁³ ± x₂⁴ + Σ_{j=1}^{2} a_j x₂^j + Σ_{j=3}^{5} a_j x₁x₂^{j−3}
//! E7  : x₁³ + x₁x₂³ + Σ_{j=1}^{4} a_j x₂^j + Σ_{j=5}^{6} a_j x₁x₂^{j−5}
//! E8  : x₁³ + x₂⁵ + Σ_{j=1}^{3} a_j x₂^j + Σ_{j=4}^{7} a_j x₁x₂^{j−4}
//! ```
//!
//! `Q` is the diagonal quadratic form `Σ_i σ_i y_i²` (σ_i = ±1) in the
//! remaining variables, which follow the core variables.

use serde::{Deserialize, Serialize};

use super::multi::MultiPoly;
use crate::error::{Error, Result};

/// Starts per axis of the multi-start Newton search.
pub const STARTS_PER_AXIS: usize = 21;
/// Critical points closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-8;
const GRAD_TOL: f64 = 1e-10;
const MAX_NEWTON_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatastropheFamily {
    APlus,
    AMinus,
    DPlus,
    DMinus,
    E6Plus,
    E6Minus,
    E7,
    E8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatastrophePotential {
    pub family: CatastropheFamily,
    /// `n` for the A and D series; ignored for E families.
    #[serde(default)]
    pub order: usize,
    /// Unfolding coefficients `a_1, a_2, …`.
    pub coeffs: Vec<f64>,
    /// Signs of the quadratic form in the non-core variables.
    #[serde(default)]
    pub quadratic_signs: Vec<i8>,
}

impl CatastrophePotential {
    pub fn new(family: CatastropheFamily, order: usize, coeffs: Vec<f64>, quadratic_signs: Vec<i8>) -> Result<Self> {
        let c = Self { family, order, coeffs, quadratic_signs };
        c.validate()?;
        Ok(c)
    }

    pub fn core_vars(&self) -> usize {
        match self.family {
            CatastropheFamily::APlus | CatastropheFamily::AMinus => 1,
            _ => 2,
        }
    }

    pub fn total_vars(&self) -> usize {
        self.core_vars() + self.quadratic_signs.len()
    }

    /// Number of unfolding coefficients the family takes.
    pub fn expected_coeffs(&self) -> Result<usize> {
        use CatastropheFamily::*;
        match self.family {
            APlus | AMinus if self.order >= 2 => Ok(self.order - 1),
            DPlus | DMinus if self.order >= 4 => Ok(self.order - 1),
            APlus | AMinus => Err(Error::InvalidArgument(format!("A-series needs n >= 2, got {}", self.order))),
            DPlus | DMinus => Err(Error::InvalidArgument(format!("D-series needs n >= 4, got {}", self.order))),
            E6Plus | E6Minus => Ok(5),
            E7 => Ok(6),
            E8 => Ok(7),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let want = self.expected_coeffs()?;
        if self.coeffs.len() != want {
            return Err(Error::InvalidArgument(format!(
                "{:?} of order {} takes {want} coefficients, got {}",
                self.family,
                self.order,
                self.coeffs.len()
            )));
        }
        if self.quadratic_signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("quadratic form signs must be +1 or -1".into()));
        }
        Ok(())
    }

    /// `V₀` as a polynomial in the core variables.
    pub fn core_polynomial(&self) -> Result<MultiPoly> {
        use CatastropheFamily::*;
        self.validate()?;
        let a = &self.coeffs;
        let n = self.order;
        let mut terms: Vec<(Vec<u32>, f64)> = Vec::new();
        // Monomial x₁^i x₂^j.
        let mono = |i: usize, j: usize| vec![i as u32, j as u32];
        match self.family {
            APlus | AMinus => {
                let s = if self.family == APlus { 1.0 } else { -1.0 };
                terms.push((vec![(n + 1) as u32], s));
                for j in 1..n {
                    terms.push((vec![j as u32], a[j - 1]));
                }
            }
            DPlus | DMinus => {
                let s = if self.family == DPlus { 1.0 } else { -1.0 };
                terms.push((mono(2, 1), 1.0));
                terms.push((mono(0, n - 1), s));
                for j in 1..=n - 3 {
                    terms.push((mono(0, j), a[j - 1]));
                }
                for j in n - 2..=n - 1 {
                    terms.push((mono(j - (n - 3), 0), a[j - 1]));
                }
            }
            E6Plus | E6Minus => {
                let s = if self.family == E6Plus { 1.0 } else { -1.0 };
                terms.push((mono(3, 0), 1.0));
                terms.push((mono(0, 4), s));
                for j in 1..=2 {
                    terms.push((mono(0, j), a[j - 1]));
                }
                for j in 3..=5 {
                    terms.push((mono(1, j - 3), a[j - 1]));
                }
            }
            E7 => {
                terms.push((mono(3, 0), 1.0));
                terms.push((mono(1, 3), 1.0));
                for j in 1..=4 {
                    terms.push((mono(0, j), a[j - 1]));
                }
                for j in 5..=6 {
                    terms.push((mono(1, j - 5), a[j - 1]));
                }
            }
            E8 => {
                terms.push((mono(3, 0), 1.0));
                terms.push((mono(0, 5), 1.0));
                for j in 1..=3 {
                    terms.push((mono(0, j), a[j - 1]));
                }
                for j in 4..=7 {
                    terms.push((mono(1, j - 4), a[j - 1]));
                }
            }
        }
        MultiPoly::from_terms(self.core_vars(), terms)
    }

    /// V(x) = V₀(core) + Σ σ_i y_i².
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.total_vars() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, potential takes {}",
                x.len(),
                self.total_vars()
            )));
        }
        let core = self.core_vars();
        let q: f64 = self.quadratic_signs.iter().zip(&x[core..]).map(|(&s, &y)| s as f64 * y * y).sum();
        Ok(self.core_polynomial()?.eval(&x[..core]) + q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointSearch {
    /// Critical points in the full variable set, sorted lexicographically.
    pub points: Vec<Vec<f64>>,
    pub diagnostic: Option<String>,
}

/// Critical points of the potential inside the box `[lo, hi]^core`.
///
/// Newton's method on ∇V₀ from a deterministic grid of
/// [`STARTS_PER_AXIS`] starts per core axis; the quadratic part contributes
/// the coordinate 0 in every remaining variable.
pub fn critical_points(c: &CatastrophePotential, lo: f64, hi: f64) -> Result<CriticalPointSearch> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty search box [{lo}, {hi}]")));
    }
    let v0 = c.core_polynomial()?;
    let k = c.core_vars();
    let grad: Vec<MultiPoly> = (0..k).map(|i| v0.partial(i)).collect();
    let hess: Vec<Vec<MultiPoly>> = grad.iter().map(|g| (0..k).map(|j| g.partial(j)).collect()).collect();

    let axis: Vec<f64> =
        (0..STARTS_PER_AXIS).map(|i| lo + (hi - lo) * i as f64 / (STARTS_PER_AXIS - 1) as f64).collect();
    let starts: Vec<Vec<f64>> = if k == 1 {
        axis.iter().map(|&x| vec![x]).collect()
    } else {
        axis.iter().flat_map(|&x| axis.iter().map(move |&y| vec![x, y])).collect()
    };

    let slack = 1e-9 * (hi - lo);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for s in starts {
        if let Some(p) = newton(&grad, &hess, s) {
            if p.iter().all(|&x| x >= lo - slack && x <= hi + slack)
                && !found.iter().any(|q| dist(q, &p) < DEDUP_TOL)
            {
                found.push(p);
            }
        }
    }
    found.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let extra = c.quadratic_signs.len();
    let points: Vec<Vec<f64>> = found
        .into_iter()
        .map(|mut p| {
            p.extend(std::iter::repeat_n(0.0, extra));
            p
        })
        .collect();
    let diagnostic = points.is_empty().then(|| format!("no critical points found in [{lo}, {hi}]^{k}"));
    Ok(CriticalPointSearch { points, diagnostic })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn newton(grad: &[MultiPoly], hess: &[Vec<MultiPoly>], mut x: Vec<f64>) -> Option<Vec<f64>> {
    let k = x.len();
    for _ in 0..MAX_NEWTON_ITERS {
        let g: Vec<f64> = grad.iter().map(|p| p.eval(&x)).collect();
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            return Some(x);
        }
        let step = if k == 1 {
            let h = hess[0][0].eval(&x);
            if h == 0.0 {
                return None;
            }
            vec![g[0] / h]
        } else {
            let h00 = hess[0][0].eval(&x);
            let h01 = hess[0][1].eval(&x);
            let h10 = hess[1][0].eval(&x);
            let h11 = hess[1][1].eval(&x);
            let det = h00 * h11 - h01 * h10;
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            vec![(h11 * g[0] - h01 * g[1]) / det, (h00 * g[1] - h10 * g[0]) / det]
        };
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let snorm = step.iter().map(|v| v * v).sum::<f64>().sqrt();
        if snorm <= 1e-15 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    let g: Vec<f64> = grad.iter().map(|p| p.eval(&x)).collect();
    let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    (gnorm <= GRAD_TOL).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use CatastropheFamily::*;

    fn close_sets(got: &[Vec<f64>], want: &[Vec<f64>]) -> bool {
        got.len() == want.len() && got.iter().zip(want).all(|(a, b)| dist(a, b) < 1e-7)
    }

    #[test]
    fn fold_core() {
        let c = CatastrophePotential::new(APlus, 2, vec![-3.0], vec![]).unwrap();
        let r = critical_points(&c, -5.0, 5.0).unwrap();
        assert!(close_sets(&r.points, &[vec![-1.0], vec![1.0]]));
        let c = CatastrophePotential::new(APlus, 2, vec![1.0], vec![]).unwrap();
        let r = critical_points(&c, -5.0, 5.0).unwrap();
        assert!(r.points.is_empty());
        assert!(r.diagnostic.is_some());
    }

    #[test]
    fn cusp_core() {
        // x⁴ + a₁x + a₂x², a₁ = 0, a₂ = −2: 4x³ − 4x = 0.
        let c = CatastrophePotential::new(APlus, 3, vec![0.0, -2.0], vec![1, -1]).unwrap();
        let r = critical_points(&c, -5.0, 5.0).unwrap();
        let want = [vec![-1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]];
        assert!(close_sets(&r.points, &want), "{:?}", r.points);
        assert_eq!(c.eval(&[1.0, 2.0, 3.0]).unwrap(), 1.0 - 2.0 + 4.0 - 9.0);
    }

    #[test]
    fn d_series_evaluation() {
        // D+5: x₁²x₂ + x₂⁴ + a₁x₂ + a₂x₂² + a₃x₁ + a₄x₁².
        let c = CatastrophePotential::new(DPlus, 5, vec![0.5, -1.0, 2.0, 0.25], vec![]).unwrap();
        let (x1, x2) = (1.0_f64, 1.0_f64);
        let direct = x1 * x1 * x2 + x2.powi(4) + 0.5 * x2 - 1.0 * x2 * x2 + 2.0 * x1 + 0.25 * x1 * x1;
        assert_eq!(c.eval(&[1.0, 1.0]).unwrap(), direct);
        let (x1, x2) = (-0.7_f64, 1.3_f64);
        let c = CatastrophePotential::new(DMinus, 4, vec![0.5, -1.0, 2.0], vec![]).unwrap();
        let direct = x1 * x1 * x2 - x2.powi(3) + 0.5 * x2 - 1.0 * x1 + 2.0 * x1 * x1;
        assert!((c.eval(&[x1, x2]).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn e_series_evaluation() {
        let (x, y) = (0.8_f64, -1.1_f64);
        let a: Vec<f64> = (1..=7).map(|j| 0.1 * j as f64).collect();
        let e6 = CatastrophePotential::new(E6Minus, 0, a[..5].to_vec(), vec![]).unwrap();
        let d6 = x.powi(3) - y.powi(4) + a[0] * y + a[1] * y * y + a[2] * x + a[3] * x * y + a[4] * x * y * y;
        assert!((e6.eval(&[x, y]).unwrap() - d6).abs() < 1e-14);
        let e7 = CatastrophePotential::new(E7, 0, a[..6].to_vec(), vec![]).unwrap();
        let d7 = x.powi(3) + x * y.powi(3) + a[0] * y + a[1] * y.powi(2) + a[2] * y.powi(3) + a[3] * y.powi(4)
            + a[4] * x + a[5] * x * y;
        assert!((e7.eval(&[x, y]).unwrap() - d7).abs() < 1e-14);
        let e8 = CatastrophePotential::new(E8, 0, a.clone(), vec![1]).unwrap();
        let d8 = x.powi(3) + y.powi(5) + a[0] * y + a[1] * y.powi(2) + a[2] * y.powi(3)
            + a[3] * x + a[4] * x * y + a[5] * x * y.powi(2) + a[6] * x * y.powi(3) + 0.25;
        assert!((e8.eval(&[x, y, 0.5]).unwrap() - d8).abs() < 1e-14);
    }

    #[test]
    fn two_variable_critical_points_satisfy_gradient() {
        // E+6 with a generic unfolding.
        let c = CatastrophePotential::new(E6Plus, 0, vec![0.3, -2.0, -1.0, 0.2, 0.1], vec![]).unwrap();
        let r = critical_points(&c, -5.0, 5.0).unwrap();
        assert!(!r.points.is_empty());
        let v0 = c.core_polynomial().unwrap();
        for p in &r.points {
            assert!(v0.partial(0).eval(p).abs() < 1e-9);
            assert!(v0.partial(1).eval(p).abs() < 1e-9);
        }
    }

    #[test]
    fn coefficient_counts_enforced() {
        assert!(CatastrophePotential::new(APlus, 2, vec![], vec![]).is_err());
        assert!(CatastrophePotential::new(APlus, 1, vec![], vec![]).is_err());
        assert!(CatastrophePotential::new(DPlus, 3, vec![1.0, 2.0], vec![]).is_err());
        assert!(CatastrophePotential::new(E7, 0, vec![0.0; 5], vec![]).is_err());
        assert!(CatastrophePotential::new(E8, 0, vec![0.0; 7], vec![2]).is_err());
        let c = CatastrophePotential::new(E8, 0, vec![0.0; 7], vec![]).unwrap();
        assert!(c.eval(&[1.0]).is_err());
        assert!(serde_json::from_str::<CatastrophePotential>(r#"{"family":"x9","coeffs":[]}"#).is_err());
    }
}
