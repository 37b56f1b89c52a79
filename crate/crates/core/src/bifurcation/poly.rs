use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-variable stationarity function `N(E) = Σ_n α_n Eⁿ`, stored
/// lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialN {
    pub coeffs: Vec<f64>,
}

impl PolynomialN {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Degree, requiring a nonzero leading coefficient.
    pub fn degree(&self) -> Result<usize> {
        match self.coeffs.last() {
            None => Err(Error::InvalidPolynomial("no coefficients".into())),
            Some(0.0) => Err(Error::InvalidPolynomial("leading coefficient is zero".into())),
            Some(_) => Ok(self.coeffs.len() - 1),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Coefficients of `p(x + a)`.
    pub fn shifted(&self, a: f64) -> PolynomialN {
        // Repeated synthetic division (Taylor shift).
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] += a * c[j + 1];
            }
        }
        PolynomialN { coeffs: c }
    }
}

/// Shift `x = E − a` removing the `x^{n−1}` term: `a = −α_{n−1}/(n α_n)`.
pub fn depressed_shift(p: &PolynomialN) -> Result<(f64, PolynomialN)> {
    let n = p.degree()?;
    if n < 2 {
        return Err(Error::InvalidPolynomial(format!("degree {n} < 2")));
    }
    let a = -p.coeffs[n - 1] / (n as f64 * p.coeffs[n]);
    Ok((a, p.shifted(a)))
}
