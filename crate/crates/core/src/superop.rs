//! Operator-space calculus.
//!
//! Operators are vectorized row-major: `vec(A)[i·d + j] = A[i, j]`. With
//! this layout
//!
//! ```text
//! L_A = A ⊗ I        (L_A B = AB)
//! R_A = I ⊗ Aᵀ       (R_A B = BA)
//! ```
//!
//! and the Hilbert–Schmidt product `(A|B) = Tr(A†B)` is the plain complex
//! dot product of the vectorized operators, so superoperator adjoints are
//! conjugate transposes.
//!
//! When `H` is diagonal, `L_H` and `R_H` are simultaneously diagonal and any
//! function `f(L_H, R_H)` acts elementwise: `(f ρ)_{nm} = f(E_n, E_m) ρ_{nm}`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, OperatorMatrix};

/// Off-diagonal tolerance for spectral constructions.
pub const DIAGONAL_TOL: f64 = 1e-12;

/// Dense `dim² × dim²` map on vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    space: FockSpace,
    entries: DMatrix<C64>,
}

impl SuperOperator {
    pub fn new(space: FockSpace, entries: DMatrix<C64>) -> Result<Self> {
        let d2 = space.dim * space.dim;
        if entries.shape() != (d2, d2) {
            return Err(Error::ShapeMismatch {
                expected: format!("{d2}x{d2}"),
                got: format!("{}x{}", entries.nrows(), entries.ncols()),
            });
        }
        Ok(Self { space, entries })
    }

    fn from_parts(space: FockSpace, entries: DMatrix<C64>) -> Self {
        Self { space, entries }
    }

    pub fn zeros(space: FockSpace) -> Self {
        let d2 = space.dim * space.dim;
        Self::from_parts(space, DMatrix::zeros(d2, d2))
    }

    pub fn identity(space: FockSpace) -> Self {
        let d2 = space.dim * space.dim;
        Self::from_parts(space, DMatrix::identity(d2, d2))
    }

    pub fn random<R: Rng + ?Sized>(space: FockSpace, rng: &mut R) -> Self {
        let d2 = space.dim * space.dim;
        let e = DMatrix::from_fn(d2, d2, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        Self::from_parts(space, e)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn apply(&self, a: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(&self.space, a.space(), "superoperator and operator on different spaces");
        let v = &self.entries * vectorize(a);
        devectorize(self.space, &v).expect("length is dim²")
    }

    pub fn apply_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.entries * v
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_parts(self.space, &self.entries * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.space);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl<'a> Add<&'a SuperOperator> for &'a SuperOperator {
    type Output = SuperOperator;
    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        assert_eq!(self.space, rhs.space);
        SuperOperator::from_parts(self.space, &self.entries + &rhs.entries)
    }
}

impl<'a> Sub<&'a SuperOperator> for &'a SuperOperator {
    type Output = SuperOperator;
    fn sub(self, rhs: &SuperOperator) -> SuperOperator {
        assert_eq!(self.space, rhs.space);
        SuperOperator::from_parts(self.space, &self.entries - &rhs.entries)
    }
}

/// Composition `(S·T)ρ = S(Tρ)`.
impl<'a> Mul<&'a SuperOperator> for &'a SuperOperator {
    type Output = SuperOperator;
    fn mul(self, rhs: &SuperOperator) -> SuperOperator {
        assert_eq!(self.space, rhs.space);
        SuperOperator::from_parts(self.space, &self.entries * &rhs.entries)
    }
}

/// Scalar function `N(e_left, e_right)` attached to a generator.
#[derive(Clone)]
pub struct EnergyFunction {
    name: String,
    eval: Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>,
}

impl EnergyFunction {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> C64 + Send + Sync + 'static,
    {
        Self { name: name.into(), eval: Arc::new(f) }
    }

    pub fn real<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, move |a, b| C64::new(f(a, b), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, e_left: f64, e_right: f64) -> C64 {
        (self.eval)(e_left, e_right)
    }

    /// N(E, E).
    pub fn on_diagonal(&self, e: f64) -> C64 {
        self.eval(e, e)
    }
}

impl fmt::Debug for EnergyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnergyFunction").field("name", &self.name).finish()
    }
}

#[inline]
fn vec_index(dim: usize, i: usize, j: usize) -> usize {
    i * dim + j
}

pub fn vectorize(a: &OperatorMatrix) -> DVector<C64> {
    let d = a.dim();
    let e = a.entries();
    DVector::from_fn(d * d, |k, _| e[(k / d, k % d)])
}

pub fn devectorize(space: FockSpace, v: &DVector<C64>) -> Result<OperatorMatrix> {
    let d = space.dim;
    if v.len() != d * d {
        return Err(Error::ShapeMismatch { expected: (d * d).to_string(), got: v.len().to_string() });
    }
    OperatorMatrix::new(space, DMatrix::from_fn(d, d, |i, j| v[vec_index(d, i, j)]))
}

/// `L_A`: B ↦ AB.
pub fn left_mult(a: &OperatorMatrix) -> SuperOperator {
    let space = *a.space();
    let id = DMatrix::<C64>::identity(space.dim, space.dim);
    SuperOperator::from_parts(space, a.entries().kronecker(&id))
}

/// `R_A`: B ↦ BA.
pub fn right_mult(a: &OperatorMatrix) -> SuperOperator {
    let space = *a.space();
    let id = DMatrix::<C64>::identity(space.dim, space.dim);
    SuperOperator::from_parts(space, id.kronecker(&a.entries().transpose()))
}

/// B ↦ ½(AB + BA).
pub fn jordan_superop(a: &OperatorMatrix) -> SuperOperator {
    (&left_mult(a) + &right_mult(a)).scale(C64::new(0.5, 0.0))
}

/// B ↦ AB − BA.
pub fn commutator_superop(a: &OperatorMatrix) -> SuperOperator {
    &left_mult(a) - &right_mult(a)
}

/// Diagonal entries of `h`, after checking it is diagonal.
pub(crate) fn diagonal_energies(h: &OperatorMatrix) -> Result<Vec<f64>> {
    let off = h.off_diagonal_max();
    if off > DIAGONAL_TOL {
        return Err(Error::NotDiagonal(off));
    }
    Ok(h.diagonal().iter().map(|z| z.re).collect())
}

/// `f(L_H, R_H)` evaluated spectrally: `(Sρ)_{nm} = f(E_n, E_m) ρ_{nm}`.
pub fn energy_function_superop(f: &EnergyFunction, h: &OperatorMatrix) -> Result<SuperOperator> {
    let energies = diagonal_energies(h)?;
    let space = *h.space();
    let d = space.dim;
    let mut s = DMatrix::zeros(d * d, d * d);
    for (n, &en) in energies.iter().enumerate() {
        for (m, &em) in energies.iter().enumerate() {
            let k = vec_index(d, n, m);
            s[(k, k)] = f.eval(en, em);
        }
    }
    Ok(SuperOperator::from_parts(space, s))
}

/// cos(π(L_H + R_H)/(2ε₀)) summed from its even power series with `terms`
/// terms beyond the identity. Reference for the spectral construction.
pub fn cosine_series(h: &OperatorMatrix, eps0: f64, terms: u32) -> SuperOperator {
    let s = *h.space();
    let sum = &left_mult(h) + &right_mult(h);
    let x = sum.scale(C64::new(std::f64::consts::PI / (2.0 * eps0), 0.0));
    let x2 = &x * &x;
    let mut term = SuperOperator::identity(s);
    let mut acc = term.clone();
    for m in 1..=terms {
        let k = 2.0 * m as f64;
        term = (&term * &x2).scale(C64::new(-1.0 / (k * (k - 1.0)), 0.0));
        acc = &acc + &term;
    }
    acc
}

/// Hilbert–Schmidt adjoint: `(S†A|B) = (A|SB)`.
pub fn adjoint_superop(s: &SuperOperator) -> SuperOperator {
    SuperOperator::from_parts(s.space, s.entries.adjoint())
}

/// `(A|B) = Tr(A†B)`.
pub fn hs_inner(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<C64> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(a.entries().iter().zip(b.entries().iter()).map(|(x, y)| x.conj() * y).sum())
}

/// `N(H,H) = N†(L_H, R_H) I`, diagonal with entries `conj f(E_n, E_n)`.
///
/// `N(H,H)|n> = |n> N(E_n, E_n)` for real-valued `f`. See
/// [`n_operator_via_adjoint`] for the same quantity built through the dense
/// adjoint superoperator.
pub fn n_operator(f: &EnergyFunction, h: &OperatorMatrix) -> Result<OperatorMatrix> {
    let energies = diagonal_energies(h)?;
    let diag: Vec<C64> = energies.iter().map(|&e| f.on_diagonal(e).conj()).collect();
    OperatorMatrix::from_diagonal(*h.space(), &diag)
}

pub fn n_operator_via_adjoint(f: &EnergyFunction, h: &OperatorMatrix) -> Result<OperatorMatrix> {
    let s = energy_function_superop(f, h)?;
    Ok(adjoint_superop(&s).apply(&OperatorMatrix::identity(*h.space())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_canonical_ops, build_harmonic_h};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn natural(dim: usize) -> FockSpace {
        FockSpace::natural(dim).unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_layout() {
        let s = natural(4);
        let v = vectorize(&OperatorMatrix::identity(s));
        for k in 0..16 {
            let expect = if k % 5 == 0 { c(1.0) } else { c(0.0) };
            assert_eq!(v[k], expect);
        }
        assert!(devectorize(s, &DVector::zeros(15)).is_err());
    }

    #[test]
    fn multiplication_superops_reproduce_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [4, 5, 7] {
            let s = natural(dim);
            for _ in 0..10 {
                let a = OperatorMatrix::random(s, &mut rng);
                let b = OperatorMatrix::random(s, &mut rng);
                let ab = &a * &b;
                let ba = &b * &a;
                assert!((&left_mult(&a).apply(&b) - &ab).frobenius_norm() < 1e-13);
                assert!((&right_mult(&a).apply(&b) - &ba).frobenius_norm() < 1e-13);
                let la_rb = &left_mult(&a) * &right_mult(&b);
                let rb_la = &right_mult(&b) * &left_mult(&a);
                assert!(la_rb.max_abs_diff(&rb_la) < 1e-13);
            }
        }
        let s = natural(4);
        let id = OperatorMatrix::identity(s);
        assert_eq!(left_mult(&id), SuperOperator::identity(s));
        assert_eq!(right_mult(&id), SuperOperator::identity(s));
        assert_eq!(jordan_superop(&id), SuperOperator::identity(s));
    }

    #[test]
    fn jordan_and_commutator_on_energy_basis() {
        let s = natural(5);
        let h = build_harmonic_h(s);
        let b = OperatorMatrix::basis_element(s, 0, 1).unwrap();
        let j = jordan_superop(&h).apply(&b);
        assert!((&j - &b.scale(c(0.5 * (0.5 + 1.5)))).frobenius_norm() < 1e-15);
        let k = commutator_superop(&h).apply(&b);
        assert!((&k - &b.scale(c(0.5 - 1.5))).frobenius_norm() < 1e-15);

        let d = OperatorMatrix::from_diagonal(s, &[1.0, 2.0, 3.0, 4.0, 5.0].map(c)).unwrap();
        assert_eq!(commutator_superop(&h).apply(&d).frobenius_norm(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let a = OperatorMatrix::random(s, &mut rng);
            let b = OperatorMatrix::random(s, &mut rng);
            assert!(commutator_superop(&a).apply(&b).trace().norm() < 1e-13);
            let ah = OperatorMatrix::random_hermitian(s, &mut rng);
            let bh = OperatorMatrix::random_hermitian(s, &mut rng);
            assert!(jordan_superop(&ah).apply(&bh).hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn spectral_function_examples() {
        let s = natural(6);
        let h = build_harmonic_h(s);
        let one = EnergyFunction::real("one", |_, _| 1.0);
        assert_eq!(energy_function_superop(&one, &h).unwrap(), SuperOperator::identity(s));

        let mean = EnergyFunction::real("mean", |a, b| 0.5 * (a + b));
        let rho = OperatorMatrix::basis_element(s, 0, 0).unwrap();
        let out = energy_function_superop(&mean, &h).unwrap().apply(&rho);
        assert!((&out - &rho.scale(c(0.5))).frobenius_norm() < 1e-15);

        let (q, _) = build_canonical_ops(s);
        assert!(matches!(energy_function_superop(&mean, &q), Err(Error::NotDiagonal(_))));
    }

    #[test]
    fn polynomial_function_equals_polynomial_in_multiplication_superops() {
        let s = natural(8);
        let h = build_harmonic_h(s);
        // f(a, b) = 2 − a + 3ab − 0.5b² + a²b
        let f = EnergyFunction::real("poly", |a, b| 2.0 - a + 3.0 * a * b - 0.5 * b * b + a * a * b);
        let l = left_mult(&h);
        let r = right_mult(&h);
        let id = SuperOperator::identity(s);
        let explicit = &(&(&id.scale(c(2.0)) - &l) + &(&l * &r).scale(c(3.0)))
            + &(&(&r * &r).scale(c(-0.5)) + &(&(&l * &l) * &r));
        let spectral = energy_function_superop(&f, &h).unwrap();
        assert!(spectral.max_abs_diff(&explicit) < 1e-12);
    }

    #[test]
    fn cosine_spectral_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (dim, eps0) in [(6, 3.0), (4, 1.0), (6, 2.0)] {
            let s = natural(dim);
            let h = build_harmonic_h(s);
            let f = EnergyFunction::real("cos", move |a, b| {
                (std::f64::consts::PI * (a + b) / (2.0 * eps0)).cos()
            });
            let spectral = energy_function_superop(&f, &h).unwrap();
            let series = cosine_series(&h, eps0, 40);
            let rho = OperatorMatrix::random(s, &mut rng);
            let diff = (&spectral.apply(&rho) - &series.apply(&rho)).frobenius_norm();
            assert!(diff < 1e-10, "dim {dim} eps0 {eps0}: {diff:e}");
        }
    }

    #[test]
    fn adjoint_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = natural(4);
        for _ in 0..100 {
            let sup = SuperOperator::random(s, &mut rng);
            let a = OperatorMatrix::random(s, &mut rng);
            let b = OperatorMatrix::random(s, &mut rng);
            let lhs = hs_inner(&adjoint_superop(&sup).apply(&a), &b).unwrap();
            let rhs = hs_inner(&a, &sup.apply(&b)).unwrap();
            assert!((lhs - rhs).norm() < 1e-11);
        }
        let sup = SuperOperator::random(s, &mut rng);
        assert_eq!(adjoint_superop(&adjoint_superop(&sup)), sup);
        assert_eq!(adjoint_superop(&SuperOperator::identity(s)), SuperOperator::identity(s));
        let a = OperatorMatrix::random(s, &mut rng);
        assert!(adjoint_superop(&left_mult(&a)).max_abs_diff(&left_mult(&a.adjoint())) < 1e-15);
    }

    #[test]
    fn hs_inner_examples() {
        let s = natural(4);
        let id = OperatorMatrix::identity(s);
        assert_eq!(hs_inner(&id, &id).unwrap(), c(4.0));
        let p0 = OperatorMatrix::basis_element(s, 0, 0).unwrap();
        let p1 = OperatorMatrix::basis_element(s, 1, 1).unwrap();
        assert_eq!(hs_inner(&p0, &p1).unwrap(), c(0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = OperatorMatrix::random(s, &mut rng);
        let b = OperatorMatrix::random(s, &mut rng);
        let aa = hs_inner(&a, &a).unwrap();
        assert!(aa.im.abs() < 1e-15 && aa.re > 0.0);
        assert!((hs_inner(&a, &b).unwrap() - hs_inner(&b, &a).unwrap().conj()).norm() < 1e-14);
        assert!(matches!(hs_inner(&a, &OperatorMatrix::identity(natural(5))), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn n_operator_paths() {
        let s = natural(7);
        let h = build_harmonic_h(s);
        let mean = EnergyFunction::real("mean", |a, b| 0.5 * (a + b));
        assert!((&n_operator(&mean, &h).unwrap() - &h).frobenius_norm() < 1e-15);

        let cos = EnergyFunction::real("cos", |a, b| (std::f64::consts::PI * (a + b) / 2.0).cos());
        let n_cos = n_operator(&cos, &h).unwrap();
        for z in n_cos.diagonal() {
            assert!(z.norm() < 1e-14);
        }
        for f in [&mean, &cos] {
            let direct = n_operator(f, &h).unwrap();
            let via = n_operator_via_adjoint(f, &h).unwrap();
            assert!((&direct - &via).frobenius_norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn vectorize_is_linear_bijection(seed in any::<u64>(), alpha_re in -3.0..3.0f64, alpha_im in -3.0..3.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = natural(5);
            let a = OperatorMatrix::random(s, &mut rng);
            let b = OperatorMatrix::random(s, &mut rng);
            prop_assert_eq!(devectorize(s, &vectorize(&a)).unwrap(), a.clone());
            let alpha = C64::new(alpha_re, alpha_im);
            let lhs = vectorize(&(&a.scale(alpha) + &b));
            let rhs = vectorize(&a) * alpha + vectorize(&b);
            prop_assert!((lhs - rhs).norm() < 1e-13);
        }
    }
}
