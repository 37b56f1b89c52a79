//! Concrete generators `Λ = −(i/ħ)[H,·] + Σ_k F_k N_k(L_H, R_H)` and their
//! attached stationarity functions.
//!
//! `N_k` is always evaluated spectrally on the exactly diagonal oscillator
//! Hamiltonian. The `*_explicit_generator` / `nlo_raw_generator` builders
//! assemble the same equations from operator products instead and serve as
//! independent cross-checks.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_canonical_ops, build_harmonic_h, build_harmonic_h_from_qp, build_nl_h, FockSpace, OperatorMatrix};
use crate::superop::{
    commutator_superop, energy_function_superop, jordan_superop, left_mult, right_mult, EnergyFunction,
    SuperOperator,
};

/// Tolerance for the γ = βm²ω² consistency requirement of the nlo model.
pub const NLO_GAMMA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Harmonic,
    Nlo,
    Cosine,
    LindbladHpoly,
    Fold,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] =
        [ModelKind::Harmonic, ModelKind::Nlo, ModelKind::Cosine, ModelKind::LindbladHpoly, ModelKind::Fold];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Harmonic => "harmonic",
            ModelKind::Nlo => "nlo",
            ModelKind::Cosine => "cosine",
            ModelKind::LindbladHpoly => "lindblad_hpoly",
            ModelKind::Fold => "fold",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Constant subtracted inside the nlo stationarity function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NloShift {
    /// N(E,E) = E − Δ/(4β); stationary level at Δ = 2βħω(2n+1).
    #[default]
    QuarterBeta,
    /// N(E,E) = E − Δ/(2β), kept for comparison.
    HalfBeta,
}

/// Nonlinear oscillator with friction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NloParams {
    pub beta: f64,
    /// Ω, the frequency of the nonlinear Hamiltonian.
    pub big_omega: f64,
    pub gamma: f64,
    #[serde(default)]
    pub shift: NloShift,
}

impl NloParams {
    /// Parameters with γ = βm²ω² and Ω chosen so that Ω² − ω² = `delta`.
    pub fn matched(space: &FockSpace, beta: f64, delta: f64) -> Result<Self> {
        let w2 = space.omega * space.omega;
        if !(w2 + delta > 0.0) {
            return Err(Error::InvalidParams(format!("Omega² = ω² + Δ = {} must be > 0", w2 + delta)));
        }
        Ok(Self {
            beta,
            big_omega: (w2 + delta).sqrt(),
            gamma: beta * space.mass * space.mass * w2,
            shift: NloShift::QuarterBeta,
        })
    }

    /// Δ = Ω² − ω².
    pub fn delta(&self, space: &FockSpace) -> f64 {
        self.big_omega * self.big_omega - space.omega * space.omega
    }

    pub fn shift_constant(&self, space: &FockSpace) -> f64 {
        let d = self.delta(space);
        match self.shift {
            NloShift::QuarterBeta => d / (4.0 * self.beta),
            NloShift::HalfBeta => d / (2.0 * self.beta),
        }
    }

    fn validate_basic(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta != 0.0) {
            return Err(Error::InvalidParams(format!("beta must be finite and nonzero, got {}", self.beta)));
        }
        if !(self.big_omega.is_finite() && self.big_omega > 0.0) {
            return Err(Error::InvalidParams(format!("big_omega must be > 0, got {}", self.big_omega)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParams("gamma must be finite".into()));
        }
        Ok(())
    }

    pub fn validate(&self, space: &FockSpace) -> Result<()> {
        self.validate_basic()?;
        let expected = self.beta * space.mass * space.mass * space.omega * space.omega;
        if (self.gamma - expected).abs() > NLO_GAMMA_TOL * expected.abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "gamma = {} but the stationarity analysis requires gamma = beta*m^2*omega^2 = {expected}",
                self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosineParams {
    pub eps0: f64,
}

impl CosineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps0.is_finite() && self.eps0 > 0.0) {
            return Err(Error::InvalidParams(format!("eps0 must be > 0, got {}", self.eps0)));
        }
        Ok(())
    }
}

/// Channels `V_k = Σ_n v[k][n] Hⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladParams {
    pub v: Vec<Vec<C64>>,
}

impl LindbladParams {
    /// Single channel V = H.
    pub fn dephasing(strength: f64) -> Self {
        Self { v: vec![vec![C64::new(0.0, 0.0), C64::new(strength, 0.0)]] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.v.is_empty() {
            return Err(Error::InvalidParams("at least one channel is required".into()));
        }
        if self.v.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParams("coefficients must be finite".into()));
        }
        if self.v.iter().flatten().all(|z| z.norm() == 0.0) {
            return Err(Error::InvalidParams("all channel coefficients are zero".into()));
        }
        Ok(())
    }
}

/// Evaluates `V(x) = Σ_n v_n xⁿ`.
fn channel_value(v: &[C64], x: f64) -> C64 {
    v.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl FoldParams {
    /// N(E,E) = α₀ + α₁E + α₂E².
    pub fn n_of_e(&self, e: f64) -> f64 {
        self.alpha0 + self.alpha1 * e + self.alpha2 * e * e
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.alpha0, self.alpha1, self.alpha2].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams("fold coefficients must be finite".into()));
        }
        Ok(())
    }
}

/// Kind-specific parameter record, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Harmonic,
    Nlo(NloParams),
    Cosine(CosineParams),
    LindbladHpoly(LindbladParams),
    Fold(FoldParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Harmonic => ModelKind::Harmonic,
            ModelParams::Nlo(_) => ModelKind::Nlo,
            ModelParams::Cosine(_) => ModelKind::Cosine,
            ModelParams::LindbladHpoly(_) => ModelKind::LindbladHpoly,
            ModelParams::Fold(_) => ModelKind::Fold,
        }
    }

    pub fn validate(&self, space: &FockSpace) -> Result<()> {
        match self {
            ModelParams::Harmonic => Ok(()),
            ModelParams::Nlo(p) => p.validate(space),
            ModelParams::Cosine(p) => p.validate(),
            ModelParams::LindbladHpoly(p) => p.validate(),
            ModelParams::Fold(p) => p.validate(),
        }
    }
}

/// A parameterized generator together with its stationarity functions.
#[derive(Debug, Clone)]
pub struct LiouvillianModel {
    pub kind: ModelKind,
    pub space: FockSpace,
    pub params: ModelParams,
    pub generator: SuperOperator,
    pub n_funcs: Vec<EnergyFunction>,
    hamiltonian: OperatorMatrix,
}

impl LiouvillianModel {
    pub fn build(space: FockSpace, params: &ModelParams) -> Result<Self> {
        space.validate()?;
        match params {
            ModelParams::Harmonic => Ok(harmonic_model(space)),
            ModelParams::Nlo(p) => nlo_model(space, p),
            ModelParams::Cosine(p) => cosine_model(space, p),
            ModelParams::LindbladHpoly(p) => lindblad_model(space, p),
            ModelParams::Fold(p) => fold_model(space, p),
        }
    }

    /// The diagonal oscillator Hamiltonian the model is built on.
    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn apply(&self, rho: &OperatorMatrix) -> OperatorMatrix {
        self.generator.apply(rho)
    }

    /// Real parts of `N_k(E, E)` for every attached function.
    pub fn n_of_e(&self, e: f64) -> Vec<f64> {
        self.n_funcs.iter().map(|f| f.on_diagonal(e).re).collect()
    }

    /// `n_of_e` at every level of the truncated spectrum.
    pub fn n_of_e_spectrum(&self) -> Vec<Vec<f64>> {
        (0..self.space.dim).map(|n| self.n_of_e(self.space.energy(n))).collect()
    }
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// −(i/ħ)[H, ·].
pub fn hamiltonian_part(h: &OperatorMatrix) -> SuperOperator {
    commutator_superop(h).scale(im(-1.0 / h.space().hbar))
}

fn assemble(
    kind: ModelKind,
    space: FockSpace,
    params: ModelParams,
    dissipator: Option<SuperOperator>,
    n_funcs: Vec<EnergyFunction>,
) -> LiouvillianModel {
    let h = build_harmonic_h(space);
    let mut generator = hamiltonian_part(&h);
    if let Some(d) = dissipator {
        generator = &generator + &d;
    }
    LiouvillianModel { kind, space, params, generator, n_funcs, hamiltonian: h }
}

/// Λ = −(i/ħ)(L_H − R_H).
pub fn harmonic_model(space: FockSpace) -> LiouvillianModel {
    assemble(ModelKind::Harmonic, space, ModelParams::Harmonic, None, Vec::new())
}

/// Canonical nlo form: F = (2imβ/ħ)(L_{q²} − R_{q²}), N = ½(L_H + R_H) − c·Id
/// with c = Δ/(4β) (or Δ/(2β) under [`NloShift::HalfBeta`]).
pub fn nlo_model(space: FockSpace, p: &NloParams) -> Result<LiouvillianModel> {
    p.validate(&space)?;
    let h = build_harmonic_h(space);
    let (q, _) = build_canonical_ops(space);
    let q2 = &q * &q;
    let f_op = commutator_superop(&q2).scale(im(2.0 * space.mass * p.beta / space.hbar));
    let c = p.shift_constant(&space);
    let n = EnergyFunction::real(format!("E - {c}"), move |a, b| 0.5 * (a + b) - c);
    let n_sup = energy_function_superop(&n, &h)?;
    Ok(assemble(ModelKind::Nlo, space, ModelParams::Nlo(*p), Some(&f_op * &n_sup), vec![n]))
}

/// Sign placed on the γq²/(2mβ) term inside the Jordan factor of the
/// operator-level nlo form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarticSign {
    Plus,
    Minus,
}

/// Nonlinear oscillator with friction as first written:
/// −(i/ħ)[H_nl, ρ] + (iβ/ħ)[q², p² ∘ ρ], all operators from truncated q, p.
pub fn nlo_raw_generator(space: FockSpace, p: &NloParams) -> Result<SuperOperator> {
    p.validate_basic()?;
    let h_nl = build_nl_h(space, p.big_omega, p.gamma)?;
    let (q, mom) = build_canonical_ops(space);
    let q2 = &q * &q;
    let p2 = &mom * &mom;
    let friction = (&commutator_superop(&q2) * &jordan_superop(&p2)).scale(im(p.beta / space.hbar));
    Ok(&hamiltonian_part(&h_nl) + &friction)
}

/// Rewritten nlo equation at the operator level:
/// −(i/ħ)[H, ρ] + (2imβ/ħ)[q², (p²/2m ± γq²/(2mβ) − Δ/(4β) I) ∘ ρ]
/// with H = p²/2m + mω²q²/2 from truncated q, p.
pub fn nlo_operator_form_generator(space: FockSpace, p: &NloParams, sign: QuarticSign) -> Result<SuperOperator> {
    p.validate_basic()?;
    let (q, mom) = build_canonical_ops(space);
    let m = space.mass;
    let q2 = &q * &q;
    let p2 = &mom * &mom;
    let s = match sign {
        QuarticSign::Plus => 1.0,
        QuarticSign::Minus => -1.0,
    };
    let inner = &(&p2.scale(re(0.5 / m)) + &q2.scale(re(s * p.gamma / (2.0 * m * p.beta))))
        - &OperatorMatrix::identity(space).scale(re(p.delta(&space) / (4.0 * p.beta)));
    let friction =
        (&commutator_superop(&q2) * &jordan_superop(&inner)).scale(im(2.0 * m * p.beta / space.hbar));
    Ok(&hamiltonian_part(&build_harmonic_h_from_qp(space)) + &friction)
}

/// F = (i/ħ)(L_q − R_q), N = cos(π(L_H + R_H)/(2ε₀)).
pub fn cosine_model(space: FockSpace, p: &CosineParams) -> Result<LiouvillianModel> {
    p.validate()?;
    let h = build_harmonic_h(space);
    let (q, _) = build_canonical_ops(space);
    let f_op = commutator_superop(&q).scale(im(1.0 / space.hbar));
    let eps0 = p.eps0;
    let n = EnergyFunction::real(format!("cos(pi(a+b)/(2*{eps0}))"), move |a, b| {
        (PI * (a + b) / (2.0 * eps0)).cos()
    });
    let n_sup = energy_function_superop(&n, &h)?;
    Ok(assemble(ModelKind::Cosine, space, ModelParams::Cosine(*p), Some(&f_op * &n_sup), vec![n]))
}

/// Lindblad equation with `V_k` polynomial in H. Each channel contributes
/// F_k = Id and
/// N_k(a, b) = (1/2ħ)(2V_k(a)V_k(b)* − |V_k(a)|² − |V_k(b)|²).
pub fn lindblad_model(space: FockSpace, p: &LindbladParams) -> Result<LiouvillianModel> {
    p.validate()?;
    let h = build_harmonic_h(space);
    let hbar = space.hbar;
    let mut total = SuperOperator::zeros(space);
    let mut n_funcs = Vec::with_capacity(p.v.len());
    for (k, coeffs) in p.v.iter().enumerate() {
        let coeffs = coeffs.clone();
        let n = EnergyFunction::new(format!("lindblad channel {k}"), move |a, b| {
            let va = channel_value(&coeffs, a);
            let vb = channel_value(&coeffs, b);
            (va * vb.conj() * 2.0 - va.norm_sqr() - vb.norm_sqr()) / (2.0 * hbar)
        });
        total = &total + &energy_function_superop(&n, &h)?;
        n_funcs.push(n);
    }
    Ok(assemble(ModelKind::LindbladHpoly, space, ModelParams::LindbladHpoly(p.clone()), Some(total), n_funcs))
}

/// Channel operators `V_k = Σ_n v_kn Hⁿ` as matrices.
pub fn lindblad_channel_operators(space: FockSpace, p: &LindbladParams) -> Vec<OperatorMatrix> {
    let h = build_harmonic_h(space);
    p.v.iter()
        .map(|coeffs| {
            coeffs.iter().enumerate().fold(OperatorMatrix::zeros(space), |acc, (n, &c)| {
                &acc + &h.powi(n as u32).scale(c)
            })
        })
        .collect()
}

/// −(i/ħ)[H, ρ] + (1/2ħ) Σ_k ([V_k ρ, V_k†] + [V_k, ρ V_k†]) from the channel
/// matrices.
pub fn lindblad_explicit_generator(space: FockSpace, p: &LindbladParams) -> Result<SuperOperator> {
    p.validate()?;
    let h = build_harmonic_h(space);
    let mut gen = hamiltonian_part(&h);
    let scale = re(1.0 / (2.0 * space.hbar));
    for v in lindblad_channel_operators(space, p) {
        let vd = v.adjoint();
        let vdv = &vd * &v;
        let jump = (&left_mult(&v) * &right_mult(&vd)).scale(re(2.0));
        let d = &(&jump - &left_mult(&vdv)) - &right_mult(&vdv);
        gen = &gen + &d.scale(scale);
    }
    Ok(gen)
}

/// Fold model. The friction superoperator is
/// F = (i/2ħ)(L_q − R_q)(L_p + R_p) = (i/ħ)[q, p ∘ ·], and
/// N = α₀ + (α₁/2)(L_H + R_H) + (α₂/4)(L_H + R_H)², so that
/// N(E,E) = α₀ + α₁E + α₂E².
pub fn fold_model(space: FockSpace, p: &FoldParams) -> Result<LiouvillianModel> {
    p.validate()?;
    let h = build_harmonic_h(space);
    let (q, mom) = build_canonical_ops(space);
    let p_sum = &left_mult(&mom) + &right_mult(&mom);
    let f_op = (&commutator_superop(&q) * &p_sum).scale(im(0.5 / space.hbar));
    let (a0, a1, a2) = (p.alpha0, p.alpha1, p.alpha2);
    let n = EnergyFunction::real("alpha0 + alpha1 E + alpha2 E^2", move |a, b| {
        let s = a + b;
        a0 + 0.5 * a1 * s + 0.25 * a2 * s * s
    });
    let n_sup = energy_function_superop(&n, &h)?;
    Ok(assemble(ModelKind::Fold, space, ModelParams::Fold(*p), Some(&f_op * &n_sup), vec![n]))
}

/// Fold equation written with nested Jordan products:
/// −(i/ħ)[H,ρ] + (i/ħ)(α₀[q, p∘ρ] + α₁[q, p∘(H∘ρ)] + α₂[q, p∘(H∘(H∘ρ))]).
pub fn fold_explicit_generator(space: FockSpace, p: &FoldParams) -> Result<SuperOperator> {
    p.validate()?;
    let h = build_harmonic_h(space);
    let (q, mom) = build_canonical_ops(space);
    let outer = &commutator_superop(&q) * &jordan_superop(&mom);
    let jh = jordan_superop(&h);
    let id = SuperOperator::identity(space);
    let inner = &(&id.scale(re(p.alpha0)) + &jh.scale(re(p.alpha1))) + &(&jh * &jh).scale(re(p.alpha2));
    Ok(&hamiltonian_part(&h) + &(&outer * &inner).scale(im(1.0 / space.hbar)))
}

/// Evaluates every `N_k(E, E)` of the model. Empty for the harmonic model.
pub fn n_of_e(model: &LiouvillianModel, e: f64) -> Vec<f64> {
    model.n_of_e(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_projector, DensityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn natural(dim: usize) -> FockSpace {
        FockSpace::natural(dim).unwrap()
    }

    fn proj_residual(model: &LiouvillianModel, n: usize) -> f64 {
        let rho = fock_projector(model.space, n).unwrap();
        model.apply(&rho).frobenius_norm()
    }

    fn sample_models(space: FockSpace) -> Vec<LiouvillianModel> {
        vec![
            harmonic_model(space),
            nlo_model(space, &NloParams::matched(&space, 0.1, 1.0).unwrap()).unwrap(),
            cosine_model(space, &CosineParams { eps0: 1.0 }).unwrap(),
            lindblad_model(
                space,
                &LindbladParams {
                    v: vec![
                        vec![C64::new(0.3, 0.1), C64::new(1.0, 0.0)],
                        vec![C64::new(0.0, 0.0), C64::new(0.0, 0.2), C64::new(0.05, 0.0)],
                    ],
                },
            )
            .unwrap(),
            fold_model(space, &FoldParams { alpha0: 6.75, alpha1: -6.0, alpha2: 1.0 }).unwrap(),
        ]
    }

    #[test]
    fn harmonic_examples() {
        let s = natural(8);
        let m = harmonic_model(s);
        for n in 0..s.dim {
            assert!(proj_residual(&m, n) < 1e-13);
        }
        let b = OperatorMatrix::basis_element(s, 0, 1).unwrap();
        let out = m.apply(&b);
        let expected = b.scale(im(-(0.5 - 1.5)));
        assert!((&out - &expected).frobenius_norm() < 1e-14);
        assert!(m.n_of_e(1.5).is_empty());
    }

    #[test]
    fn generators_annihilate_trace_and_preserve_hermiticity() {
        let s = natural(7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in sample_models(s) {
            for _ in 0..50 {
                let rho = OperatorMatrix::random_hermitian(s, &mut rng);
                let out = m.apply(&rho);
                assert!(out.trace().norm() < 1e-11, "{}: trace {}", m.kind, out.trace());
                assert!(out.hermiticity_defect() < 1e-11, "{}", m.kind);
            }
        }
    }

    #[test]
    fn nlo_single_stationary_level() {
        let s = natural(12);
        let p = NloParams::matched(&s, 0.1, 1.0).unwrap();
        assert!((p.delta(&s) - 1.0).abs() < 1e-14);
        let m = nlo_model(s, &p).unwrap();
        assert!(proj_residual(&m, 2) < 1e-10);
        assert!(proj_residual(&m, 3) > 1e-3);
        assert!(m.n_of_e(2.5)[0].abs() < 1e-15);

        let zero = NloParams::matched(&s, 0.1, 0.0).unwrap();
        let m0 = nlo_model(s, &zero).unwrap();
        for n in 0..s.dim - 4 {
            assert!(m0.n_of_e(s.energy(n))[0] > 0.0);
            assert!(proj_residual(&m0, n) > 1e-3);
        }
    }

    #[test]
    fn nlo_rejects_inconsistent_gamma() {
        let s = natural(8);
        let mut p = NloParams::matched(&s, 0.1, 1.0).unwrap();
        p.gamma = 0.2;
        assert!(matches!(nlo_model(s, &p), Err(Error::InvalidParams(_))));
        p.gamma = 0.1;
        p.beta = 0.0;
        assert!(nlo_model(s, &p).is_err());
    }

    #[test]
    fn nlo_half_beta_variant_moves_the_stationary_level() {
        let s = natural(12);
        let mut p = NloParams::matched(&s, 0.1, 1.0).unwrap();
        p.shift = NloShift::HalfBeta;
        let m = nlo_model(s, &p).unwrap();
        // E − Δ/(2β) = E − 5 vanishes at no level; E_2 = 2.5 is no longer a root.
        assert!(proj_residual(&m, 2) > 1e-3);
        assert!((m.n_of_e(5.0)[0]).abs() < 1e-12);
    }

    #[test]
    fn nlo_raw_form_matches_rewritten_form_with_negative_quartic_sign() {
        let s = natural(8);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = NloParams { beta: 0.1, big_omega: 1.3, gamma: 0.07, shift: NloShift::QuarterBeta };
        let raw = nlo_raw_generator(s, &p).unwrap();
        let minus = nlo_operator_form_generator(s, &p, QuarticSign::Minus).unwrap();
        let plus = nlo_operator_form_generator(s, &p, QuarticSign::Plus).unwrap();
        for _ in 0..5 {
            let rho = OperatorMatrix::random_hermitian(s, &mut rng);
            let r = raw.apply(&rho);
            let scale = r.frobenius_norm();
            assert!((&r - &minus.apply(&rho)).frobenius_norm() < 1e-12 * scale);
            assert!((&r - &plus.apply(&rho)).frobenius_norm() > 1e-3 * scale);
        }
    }

    #[test]
    fn cosine_examples() {
        let s = natural(14);
        let m = cosine_model(s, &CosineParams { eps0: 1.0 }).unwrap();
        for n in 0..=s.dim - 3 {
            assert!(proj_residual(&m, n) < 1e-10, "n = {n}");
        }
        let m3 = cosine_model(s, &CosineParams { eps0: 3.0 }).unwrap();
        let stationary: Vec<usize> = (0..=s.dim - 3).filter(|&n| proj_residual(&m3, n) < 1e-10).collect();
        assert_eq!(stationary, vec![1, 4, 7, 10]);
        // E_{n(k,l)} = (ħω/2)(2k+1)(2l+1), l = 1.
        for (k, &n) in stationary.iter().enumerate() {
            assert_eq!(s.energy(n), 0.5 * (2 * k + 1) as f64 * 3.0);
        }
        assert!(m.n_of_e(0.5)[0].abs() < 1e-15);
        assert!(cosine_model(s, &CosineParams { eps0: 0.0 }).is_err());
    }

    #[test]
    fn lindblad_dephasing() {
        let s = natural(6);
        let p = LindbladParams::dephasing(1.0);
        let m = lindblad_model(s, &p).unwrap();
        for n in 0..s.dim {
            assert!(proj_residual(&m, n) < 1e-13);
        }
        // Coherence |n><m| is an eigenvector with eigenvalue
        // −(E_n−E_m)²/2ħ − i(E_n−E_m)/ħ.
        let b = OperatorMatrix::basis_element(s, 0, 2).unwrap();
        let out = m.apply(&b);
        let expected = b.scale(C64::new(-2.0, 2.0));
        assert!((&out - &expected).frobenius_norm() < 1e-13);
    }

    #[test]
    fn lindblad_constructions_agree() {
        let s = natural(6);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = LindbladParams {
            v: vec![
                vec![C64::new(0.3, 0.1), C64::new(1.0, -0.4)],
                vec![C64::new(0.0, 0.0), C64::new(0.0, 0.2), C64::new(0.05, 0.02)],
            ],
        };
        let spectral = lindblad_model(s, &p).unwrap().generator;
        let explicit = lindblad_explicit_generator(s, &p).unwrap();
        for _ in 0..10 {
            let rho = OperatorMatrix::random(s, &mut rng);
            assert!((&spectral.apply(&rho) - &explicit.apply(&rho)).frobenius_norm() < 1e-11);
        }
        assert!(lindblad_model(s, &LindbladParams { v: vec![] }).is_err());
        assert!(lindblad_model(s, &LindbladParams { v: vec![vec![C64::new(0.0, 0.0)]] }).is_err());
    }

    #[test]
    fn fold_two_level_construction() {
        let s = natural(12);
        let m = fold_model(s, &FoldParams { alpha0: 6.75, alpha1: -6.0, alpha2: 1.0 }).unwrap();
        for n in 0..=6 {
            let r = proj_residual(&m, n);
            if n == 1 || n == 4 {
                assert!(r < 1e-10);
            } else {
                assert!(r > 1e-3, "n = {n}: {r}");
            }
        }
        assert!(m.n_of_e(1.5)[0].abs() < 1e-15);

        let none = fold_model(s, &FoldParams { alpha0: 1.0, alpha1: 0.0, alpha2: 1.0 }).unwrap();
        for n in 0..=s.dim - 3 {
            assert!(proj_residual(&none, n) > 1e-3);
        }
        let linear = fold_model(s, &FoldParams { alpha0: -2.5, alpha1: 1.0, alpha2: 0.0 }).unwrap();
        assert!(proj_residual(&linear, 2) < 1e-10);
    }

    #[test]
    fn fold_spectral_form_equals_nested_jordan_form() {
        let s = natural(7);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for p in [
            FoldParams { alpha0: 1.7, alpha1: 0.0, alpha2: 0.0 },
            FoldParams { alpha0: 6.75, alpha1: -6.0, alpha2: 1.0 },
            FoldParams { alpha0: -0.3, alpha1: 0.8, alpha2: -0.45 },
        ] {
            let a = fold_model(s, &p).unwrap().generator;
            let b = fold_explicit_generator(s, &p).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
            let rho = OperatorMatrix::random(s, &mut rng);
            assert!((&a.apply(&rho) - &b.apply(&rho)).frobenius_norm() < 1e-11);
        }
    }

    #[test]
    fn params_json_roundtrip_and_rejection() {
        let p = ModelParams::Fold(FoldParams { alpha0: 6.75, alpha1: -6.0, alpha2: 1.0 });
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, r#"{"kind":"fold","alpha0":6.75,"alpha1":-6.0,"alpha2":1.0}"#);
        assert_eq!(serde_json::from_str::<ModelParams>(&js).unwrap(), p);
        let l: ModelParams =
            serde_json::from_str(r#"{"kind":"lindblad_hpoly","v":[[[0,0],[1,0]]]}"#).unwrap();
        assert_eq!(l, ModelParams::LindbladHpoly(LindbladParams::dephasing(1.0)));
        assert!(serde_json::from_str::<ModelParams>(r#"{"kind":"cosine","eps0":1,"extra":2}"#).is_err());
        assert!(serde_json::from_str::<ModelParams>(r#"{"kind":"bogus"}"#).is_err());
        let _ = DensityMatrix::maximally_mixed(natural(4), 4).unwrap();
    }
}
