//! Truncated oscillator Hilbert space, canonical operators, spectrum and
//! position-space eigenfunctions.

use std::f64::consts::PI;
use std::ops::{Add, Deref, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest supported truncation.
pub const MIN_DIM: usize = 4;

/// Number of retained levels plus the physical constants fixing the basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSpace {
    pub dim: usize,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub omega: f64,
}

fn one() -> f64 {
    1.0
}

impl FockSpace {
    pub fn new(dim: usize, hbar: f64, mass: f64, omega: f64) -> Result<Self> {
        let space = Self { dim, hbar, mass, omega };
        space.validate()?;
        Ok(space)
    }

    /// ħ = m = ω = 1.
    pub fn natural(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < MIN_DIM {
            return Err(Error::InvalidSpace(format!(
                "dim = {} but at least {MIN_DIM} levels are required",
                self.dim
            )));
        }
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("omega", self.omega)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpace(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Oscillator length q₀ = √(ħ/mω).
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }

    /// ħω.
    pub fn quantum(&self) -> f64 {
        self.hbar * self.omega
    }

    /// E_n = ½ħω(2n+1).
    pub fn energy(&self, n: usize) -> f64 {
        0.5 * self.hbar * self.omega * (2 * n + 1) as f64
    }

    pub fn level(&self, n: usize) -> EnergyLevel {
        EnergyLevel { n, energy: self.energy(n) }
    }

    pub fn spectrum(&self) -> Vec<EnergyLevel> {
        (0..self.dim).map(|n| self.level(n)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: usize,
    pub energy: f64,
}

/// Dense complex matrix on a truncated Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: FockSpace,
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(space: FockSpace, entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != space.dim || entries.ncols() != space.dim {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", space.dim),
                got: format!("{}x{}", entries.nrows(), entries.ncols()),
            });
        }
        Ok(Self { space, entries })
    }

    pub(crate) fn from_parts(space: FockSpace, entries: DMatrix<C64>) -> Self {
        debug_assert_eq!(entries.shape(), (space.dim, space.dim));
        Self { space, entries }
    }

    pub fn zeros(space: FockSpace) -> Self {
        Self::from_parts(space, DMatrix::zeros(space.dim, space.dim))
    }

    pub fn identity(space: FockSpace) -> Self {
        Self::from_parts(space, DMatrix::identity(space.dim, space.dim))
    }

    pub fn from_diagonal(space: FockSpace, diag: &[C64]) -> Result<Self> {
        if diag.len() != space.dim {
            return Err(Error::ShapeMismatch {
                expected: space.dim.to_string(),
                got: diag.len().to_string(),
            });
        }
        let mut m = DMatrix::zeros(space.dim, space.dim);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        Ok(Self::from_parts(space, m))
    }

    /// `|n><m|`.
    pub fn basis_element(space: FockSpace, n: usize, m: usize) -> Result<Self> {
        for k in [n, m] {
            if k >= space.dim {
                return Err(Error::LevelOutOfRange { n: k, dim: space.dim });
            }
        }
        let mut e = DMatrix::zeros(space.dim, space.dim);
        e[(n, m)] = C64::new(1.0, 0.0);
        Ok(Self::from_parts(space, e))
    }

    /// Real and imaginary parts of every entry uniform in [-1, 1).
    pub fn random<R: Rng + ?Sized>(space: FockSpace, rng: &mut R) -> Self {
        let e = DMatrix::from_fn(space.dim, space.dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Self::from_parts(space, e)
    }

    pub fn random_hermitian<R: Rng + ?Sized>(space: FockSpace, rng: &mut R) -> Self {
        let a = Self::random(space, rng);
        let e = (&a.entries + a.entries.adjoint()) * C64::new(0.5, 0.0);
        Self::from_parts(space, e)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.entries[(n, m)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.entries.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_parts(self.space, &self.entries * s)
    }

    /// ‖A − A†‖_F.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_max(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }

    /// Eigenvalues of the Hermitian part ½(A + A†), ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Jordan product ½(AB + BA).
    pub fn jordan(&self, other: &Self) -> Self {
        (&(self * other) + &(other * self)).scale(C64::new(0.5, 0.0))
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.space);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Max-entry distance on the leading `k`×`k` block.
    pub fn leading_block_distance(&self, other: &Self, k: usize) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        worst
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operators on different spaces");
        OperatorMatrix::from_parts(self.space, &self.entries + &rhs.entries)
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operators on different spaces");
        OperatorMatrix::from_parts(self.space, &self.entries - &rhs.entries)
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.space, rhs.space, "operators on different spaces");
        OperatorMatrix::from_parts(self.space, &self.entries * &rhs.entries)
    }
}

/// Tolerances applied when a [`DensityMatrix`] is constructed.
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
pub const DENSITY_TRACE_TOL: f64 = 1e-12;
pub const DENSITY_MIN_EIGENVALUE: f64 = -1e-10;

/// Validated state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(OperatorMatrix);

impl DensityMatrix {
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let min_ev = op.hermitian_eigenvalues()[0];
        if min_ev < DENSITY_MIN_EIGENVALUE {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(Self(op))
    }

    /// Random full-rank state G G† / Tr(G G†).
    pub fn random<R: Rng + ?Sized>(space: FockSpace, rng: &mut R) -> Self {
        let g = OperatorMatrix::random(space, rng);
        let mut p = &g * &g.adjoint();
        let tr = p.trace().re;
        p = p.scale(C64::new(1.0 / tr, 0.0));
        // Symmetrize away rounding.
        let e = (&p.entries + p.entries.adjoint()) * C64::new(0.5, 0.0);
        Self(OperatorMatrix::from_parts(space, e))
    }

    /// Equal-weight mixture of the first `levels` Fock states.
    pub fn maximally_mixed(space: FockSpace, levels: usize) -> Result<Self> {
        if levels == 0 || levels > space.dim {
            return Err(Error::LevelOutOfRange { n: levels, dim: space.dim });
        }
        let w = C64::new(1.0 / levels as f64, 0.0);
        let diag: Vec<C64> =
            (0..space.dim).map(|i| if i < levels { w } else { C64::new(0.0, 0.0) }).collect();
        Ok(Self(OperatorMatrix::from_diagonal(space, &diag)?))
    }

    /// Pure state (|n> + |m>)/√2.
    pub fn superposition(space: FockSpace, n: usize, m: usize) -> Result<Self> {
        if n == m {
            return fock_projector(space, n);
        }
        let half = C64::new(0.5, 0.0);
        let mut e = DMatrix::zeros(space.dim, space.dim);
        for k in [n, m] {
            if k >= space.dim {
                return Err(Error::LevelOutOfRange { n: k, dim: space.dim });
            }
        }
        e[(n, n)] = half;
        e[(m, m)] = half;
        e[(n, m)] = half;
        e[(m, n)] = half;
        Ok(Self(OperatorMatrix::from_parts(space, e)))
    }

    pub fn as_operator(&self) -> &OperatorMatrix {
        &self.0
    }

    pub fn into_operator(self) -> OperatorMatrix {
        self.0
    }
}

impl Deref for DensityMatrix {
    type Target = OperatorMatrix;
    fn deref(&self) -> &OperatorMatrix {
        &self.0
    }
}

impl AsRef<OperatorMatrix> for DensityMatrix {
    fn as_ref(&self) -> &OperatorMatrix {
        &self.0
    }
}

impl AsRef<OperatorMatrix> for OperatorMatrix {
    fn as_ref(&self) -> &OperatorMatrix {
        self
    }
}

/// Truncated annihilation operator, `a|n> = √n |n−1>`.
pub fn lowering(space: FockSpace) -> OperatorMatrix {
    let mut a = DMatrix::zeros(space.dim, space.dim);
    for n in 1..space.dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix::from_parts(space, a)
}

/// Position and momentum built from truncated ladder operators:
/// q = q₀(a + a†)/√2, p = i(ħ/q₀)(a† − a)/√2.
pub fn build_canonical_ops(space: FockSpace) -> (OperatorMatrix, OperatorMatrix) {
    let a = lowering(space);
    let ad = a.adjoint();
    let q0 = space.length_scale();
    let q = (&a + &ad).scale(C64::new(q0 / 2f64.sqrt(), 0.0));
    let p = (&ad - &a).scale(C64::new(0.0, space.hbar / (q0 * 2f64.sqrt())));
    (q, p)
}

/// diag(E_0, …, E_{dim−1}), exact from the closed-form spectrum.
pub fn build_harmonic_h(space: FockSpace) -> OperatorMatrix {
    let diag: Vec<C64> = (0..space.dim).map(|n| C64::new(space.energy(n), 0.0)).collect();
    OperatorMatrix::from_diagonal(space, &diag).expect("diagonal length equals dim")
}

/// p²/2m + mω²q²/2 from truncated q, p. Differs from the exact diagonal H
/// in the last level only; kept as a cross-check.
pub fn build_harmonic_h_from_qp(space: FockSpace) -> OperatorMatrix {
    let (q, p) = build_canonical_ops(space);
    let m = space.mass;
    let w = space.omega;
    let kinetic = (&p * &p).scale(C64::new(0.5 / m, 0.0));
    let potential = (&q * &q).scale(C64::new(0.5 * m * w * w, 0.0));
    &kinetic + &potential
}

/// H_nl = p²/2m + mΩ²q²/2 + γq⁴/2 from truncated q, p.
pub fn build_nl_h(space: FockSpace, big_omega: f64, gamma: f64) -> Result<OperatorMatrix> {
    if !(big_omega > 0.0) {
        return Err(Error::InvalidParams(format!("Omega must be > 0, got {big_omega}")));
    }
    let (q, p) = build_canonical_ops(space);
    let m = space.mass;
    let q2 = &q * &q;
    let q4 = &q2 * &q2;
    let kinetic = (&p * &p).scale(C64::new(0.5 / m, 0.0));
    let potential = q2.scale(C64::new(0.5 * m * big_omega * big_omega, 0.0));
    let quartic = q4.scale(C64::new(0.5 * gamma, 0.0));
    let h = &(&kinetic + &potential) + &quartic;
    // Remove rounding-level anti-Hermitian residue from p².
    let e = (&h.entries + h.entries.adjoint()) * C64::new(0.5, 0.0);
    Ok(OperatorMatrix::from_parts(space, e))
}

/// |n><n|.
pub fn fock_projector(space: FockSpace, n: usize) -> Result<DensityMatrix> {
    Ok(DensityMatrix(OperatorMatrix::basis_element(space, n, n)?))
}

/// L²-normalized oscillator eigenfunction Ψ_n(x).
///
/// Uses the normalized three-term recurrence
/// ψ_{k+1}(ξ) = √(2/(k+1)) ξ ψ_k(ξ) − √(k/(k+1)) ψ_{k−1}(ξ), ξ = x/q₀,
/// which equals (2ⁿ n! √π q₀)^{−1/2} e^{−ξ²/2} H_n(ξ) without overflowing.
pub fn hermite_wavefunction(space: &FockSpace, n: usize, x: f64) -> f64 {
    let q0 = space.length_scale();
    let xi = x / q0;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur / q0.sqrt()
}

/// Physicists' Hermite polynomial H_n(x) by recurrence.
pub fn hermite_polynomial(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn natural(dim: usize) -> FockSpace {
        FockSpace::natural(dim).unwrap()
    }

    #[test]
    fn rejects_small_or_nonpositive_spaces() {
        assert!(FockSpace::natural(3).is_err());
        assert!(FockSpace::new(8, 0.0, 1.0, 1.0).is_err());
        assert!(FockSpace::new(8, 1.0, -1.0, 1.0).is_err());
        assert!(FockSpace::new(8, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn harmonic_levels() {
        let s = natural(8);
        let h = build_harmonic_h(s);
        assert_eq!(h.get(0, 0).re, 0.5);
        assert_eq!(h.get(3, 3).re, 3.5);
        let s2 = FockSpace::new(4, 2.0, 1.0, 3.0).unwrap();
        assert_eq!(build_harmonic_h(s2).get(1, 1).re, 9.0);
        for n in 0..8 {
            assert_eq!(h.get(n, n).re, 0.5 * (2 * n + 1) as f64);
        }
        assert_eq!(h.off_diagonal_max(), 0.0);
    }

    #[test]
    fn position_matrix_leading_block() {
        let s = natural(4);
        let (q, p) = build_canonical_ops(s);
        let r = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(q.get(0, 1).re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(q.get(1, 0).re, r, epsilon = 1e-15);
        assert_eq!(q.get(0, 0), C64::new(0.0, 0.0));
        assert_eq!(q, q.adjoint());
        assert_eq!(p, p.adjoint());
    }

    #[test]
    fn canonical_commutator_on_leading_block() {
        for s in [natural(4), natural(12), FockSpace::new(10, 0.7, 2.0, 1.3).unwrap()] {
            let (q, p) = build_canonical_ops(s);
            let c = q.commutator(&p);
            let target = OperatorMatrix::identity(s).scale(C64::new(0.0, s.hbar));
            assert!(c.leading_block_distance(&target, s.dim - 1) < 1e-12);
            // The last level carries the truncation defect.
            let last = s.dim - 1;
            assert!((c.get(last, last) - C64::new(0.0, s.hbar)).norm() > 0.1);
        }
    }

    #[test]
    fn qp_hamiltonian_matches_diagonal_away_from_cutoff() {
        let s = natural(10);
        let exact = build_harmonic_h(s);
        let qp = build_harmonic_h_from_qp(s);
        assert!(qp.leading_block_distance(&exact, s.dim - 2) < 1e-12);
    }

    #[test]
    fn nl_hamiltonian_reduces_and_raises_ground_energy() {
        let s = natural(10);
        let h = build_nl_h(s, 1.0, 0.0).unwrap();
        assert!(h.leading_block_distance(&build_harmonic_h(s), s.dim - 2) < 1e-12);

        let s40 = natural(40);
        let h = build_nl_h(s40, 1.0, 0.1).unwrap();
        assert!(h.hermiticity_defect() < 1e-14);
        let lowest = h.hermitian_eigenvalues()[0];
        assert!(lowest > 0.5, "ground energy {lowest}");

        assert!(build_nl_h(s, 0.0, 0.1).is_err());
    }

    #[test]
    fn projector_properties() {
        let s = natural(4);
        let p = fock_projector(s, 0).unwrap();
        assert_eq!(p.diagonal()[0], C64::new(1.0, 0.0));
        assert_eq!(p.trace(), C64::new(1.0, 0.0));
        let sq = p.as_operator() * p.as_operator();
        assert!((&sq - p.as_operator()).frobenius_norm() < 1e-14);
        assert!(matches!(fock_projector(s, 4), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn density_validation() {
        let s = natural(4);
        let mut bad = OperatorMatrix::identity(s);
        assert!(DensityMatrix::new(bad.clone()).is_err()); // trace 4
        bad = bad.scale(C64::new(0.25, 0.0));
        assert!(DensityMatrix::new(bad.clone()).is_ok());
        let mut e = bad.entries().clone();
        e[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(OperatorMatrix::new(s, e).unwrap()).is_err());
        let neg = OperatorMatrix::from_diagonal(
            s,
            &[1.5, -0.5, 0.0, 0.0].map(|x| C64::new(x, 0.0)),
        )
        .unwrap();
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn wavefunction_values() {
        let s = natural(8);
        assert_eq!(hermite_wavefunction(&s, 1, 0.0), 0.0);
        assert_abs_diff_eq!(hermite_wavefunction(&s, 0, 0.0), PI.powf(-0.25), epsilon = 1e-15);
        assert_abs_diff_eq!(hermite_wavefunction(&s, 0, 0.0), 0.7511255444649425, epsilon = 1e-15);
    }

    #[test]
    fn recurrence_matches_explicit_normalization() {
        // (2ⁿ n! √π q₀)^{−1/2} e^{−ξ²/2} H_n(ξ)
        let s = FockSpace::new(8, 1.0, 2.0, 0.5).unwrap();
        let q0 = s.length_scale();
        let mut fact = 1.0;
        for n in 0..10usize {
            if n > 0 {
                fact *= n as f64;
            }
            let norm = (2f64.powi(n as i32) * fact * PI.sqrt() * q0).powf(-0.5);
            for &x in &[-2.3, -0.4, 0.0, 0.9, 1.7] {
                let xi = x / q0;
                let direct = norm * (-0.5 * xi * xi).exp() * hermite_polynomial(n, xi);
                assert_abs_diff_eq!(hermite_wavefunction(&s, n, x), direct, epsilon = 1e-12);
            }
        }
    }
}
