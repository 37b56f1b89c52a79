//! Stationarity diagnostics: residuals, Fock-projector scans, numerical
//! kernels, generator spectra and time evolution.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{fock_projector, DensityMatrix, OperatorMatrix};
use crate::models::LiouvillianModel;
use crate::superop::{devectorize, hs_inner, vectorize};

/// Levels kept free above `n_max` because q⁴ couples n to n±4.
pub const TRUNCATION_MARGIN: usize = 5;
/// Largest superoperator handled by the dense decompositions.
pub const MAX_DENSE_SUPEROP: usize = 4096;
/// Largest superoperator for which the matrix-exponential cross-check runs.
pub const MAX_EXACT_PROPAGATOR: usize = 1024;
/// Default relative singular-value threshold for kernel extraction.
pub const DEFAULT_SVD_TOL: f64 = 1e-9;

const REFINE_STEPS: usize = 2;
/// Trace drift above which an integration step is rejected.
pub const STEP_REJECT_TRACE_DRIFT: f64 = 1e-6;

fn check_space(model: &LiouvillianModel, rho: &OperatorMatrix) -> Result<()> {
    if &model.space != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// ‖Λρ‖_F.
pub fn residual(model: &LiouvillianModel, rho: &OperatorMatrix) -> Result<f64> {
    check_space(model, rho)?;
    Ok(model.apply(rho).frobenius_norm())
}

/// Largest admissible `n_max` for a dimension, if any.
pub fn max_scan_level(dim: usize) -> Option<usize> {
    dim.checked_sub(TRUNCATION_MARGIN)
}

pub fn check_margin(dim: usize, n_max: usize) -> Result<()> {
    match max_scan_level(dim) {
        Some(limit) if n_max <= limit => Ok(()),
        _ => Err(Error::Margin { n_max, limit: dim as i64 - TRUNCATION_MARGIN as i64 }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResidual {
    pub n: usize,
    pub energy: f64,
    pub residual: f64,
    /// `N_k(E_n, E_n)` for every attached function.
    pub n_values: Vec<f64>,
    pub stationary: bool,
    /// All `|N_k(E_n, E_n)| < tol`.
    pub function_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub model: String,
    pub tol: f64,
    pub n_max: usize,
    pub levels: Vec<LevelResidual>,
    pub stationary_set: Vec<usize>,
    /// Levels where every stationarity function vanishes.
    pub function_zero_set: Vec<usize>,
    /// `stationary_set == function_zero_set`.
    pub consistent: bool,
}

/// Residual of every Fock projector `|n><n|`, `n ≤ n_max`, cross-checked
/// against the zeros of the model's stationarity functions.
pub fn fock_scan(model: &LiouvillianModel, n_max: usize, tol: f64) -> Result<StationarityReport> {
    check_margin(model.space.dim, n_max)?;
    let levels: Vec<LevelResidual> = (0..=n_max)
        .into_par_iter()
        .map(|n| -> Result<LevelResidual> {
            let rho = fock_projector(model.space, n)?;
            let r = residual(model, &rho)?;
            let energy = model.space.energy(n);
            let n_values = model.n_of_e(energy);
            let function_zero = n_values.iter().all(|v| v.abs() < tol);
            Ok(LevelResidual { n, energy, residual: r, n_values, stationary: r < tol, function_zero })
        })
        .collect::<Result<_>>()?;
    let stationary_set: Vec<usize> = levels.iter().filter(|l| l.stationary).map(|l| l.n).collect();
    let function_zero_set: Vec<usize> = levels.iter().filter(|l| l.function_zero).map(|l| l.n).collect();
    Ok(StationarityReport {
        model: model.kind.to_string(),
        tol,
        n_max,
        consistent: stationary_set == function_zero_set,
        levels,
        stationary_set,
        function_zero_set,
    })
}

fn check_dense_size(model: &LiouvillianModel) -> Result<usize> {
    let d2 = model.space.dim * model.space.dim;
    if d2 > MAX_DENSE_SUPEROP {
        return Err(Error::InvalidArgument(format!(
            "superoperator size {d2} exceeds the dense limit {MAX_DENSE_SUPEROP}"
        )));
    }
    Ok(d2)
}

#[derive(Debug, Clone)]
pub struct KernelBasis {
    /// Hilbert–Schmidt orthonormal basis of the numerical kernel.
    pub elements: Vec<OperatorMatrix>,
    /// Whether every element is Hermitian.
    pub hermitian: bool,
    /// All singular values of the generator, descending.
    pub singular_values: Vec<f64>,
    /// Absolute cut applied: `svd_tol · σ_max`.
    pub threshold: f64,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    /// Frobenius distance from `a` to the span of the (orthonormal) basis.
    pub fn distance(&self, a: &OperatorMatrix) -> Result<f64> {
        let mut rest = a.clone();
        for e in &self.elements {
            let c = hs_inner(e, &rest)?;
            rest = &rest - &e.scale(c);
        }
        Ok(rest.frobenius_norm())
    }
}

/// Numerical kernel of the generator by singular-value thresholding.
///
/// Singular values at or below `svd_tol · σ_max` are treated as zero. For a
/// Hermiticity-preserving generator the kernel is closed under `ρ ↦ ρ†` and
/// the basis is rebuilt from Hermitian combinations.
pub fn null_space(model: &LiouvillianModel, svd_tol: f64) -> Result<KernelBasis> {
    check_dense_size(model)?;
    let a = model.generator.entries();
    let svd = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Decomposition("SVD did not converge".into()))?;
    let u = svd.u.as_ref().ok_or_else(|| Error::Decomposition("missing left singular vectors".into()))?;
    let v_t = svd.v_t.as_ref().ok_or_else(|| Error::Decomposition("missing right singular vectors".into()))?;
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = svd_tol * smax;
    let space = model.space;
    let range: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > threshold).collect();

    let raw: Vec<OperatorMatrix> = (0..sigma.len())
        .filter(|&i| sigma[i] <= threshold)
        .map(|i| {
            let mut v: DVector<C64> = v_t.row(i).adjoint();
            // Iterative refinement v ← v − Λ⁺Λv. The SVD alone places the
            // kernel only to ε·σ_max/gap when small nonzero singular values
            // sit close to it; Λv itself is computed far more accurately.
            for _ in 0..REFINE_STEPS {
                let r = a * &v;
                for &j in &range {
                    let coef = u.column(j).dotc(&r) / sigma[j];
                    v -= v_t.row(j).adjoint() * coef;
                }
            }
            let norm = v.norm();
            devectorize(space, &(v / C64::new(norm, 0.0)))
        })
        .collect::<Result<_>>()?;
    let k = raw.len();

    let mut candidates = Vec::with_capacity(2 * k);
    for m in &raw {
        let md = m.adjoint();
        candidates.push((m + &md).scale(C64::new(0.5, 0.0)));
        candidates.push((m - &md).scale(C64::new(0.0, -0.5)));
    }
    let herm = gram_schmidt(&candidates, k)?;
    let (elements, hermitian) = if herm.len() == k { (herm, true) } else { (gram_schmidt(&raw, k)?, false) };

    let mut sorted = sigma;
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(KernelBasis { elements, hermitian, singular_values: sorted, threshold })
}

/// Modified Gram–Schmidt (two passes) in the Hilbert–Schmidt product,
/// keeping at most `limit` vectors.
fn gram_schmidt(candidates: &[OperatorMatrix], limit: usize) -> Result<Vec<OperatorMatrix>> {
    let mut basis: Vec<OperatorMatrix> = Vec::with_capacity(limit);
    for c in candidates {
        if basis.len() == limit {
            break;
        }
        let start = c.frobenius_norm();
        if start == 0.0 {
            continue;
        }
        let mut v = c.clone();
        for _ in 0..2 {
            for b in &basis {
                let coef = hs_inner(b, &v)?;
                v = &v - &b.scale(coef);
            }
        }
        let norm = v.frobenius_norm();
        if norm > 1e-6 * start {
            basis.push(v.scale(C64::new(1.0 / norm, 0.0)));
        }
    }
    Ok(basis)
}

/// Eigenvalues of the generator matrix, sorted by real then imaginary part.
pub fn spectrum(model: &LiouvillianModel) -> Result<Vec<C64>> {
    check_dense_size(model)?;
    let schur = Schur::try_new(model.generator.entries().clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Decomposition("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut eig: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Number of eigenvalues with modulus ≤ `tol`.
pub fn count_near_zero(eigenvalues: &[C64], tol: f64) -> usize {
    eigenvalues.iter().filter(|z| z.norm() <= tol).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub t_final: f64,
    pub dt: f64,
    /// Record monitors every this many steps (the final time is always
    /// recorded).
    pub record_every: usize,
    /// Compare against exp(Λt) when dim² ≤ [`MAX_EXACT_PROPAGATOR`].
    pub exact_cross_check: bool,
}

impl EvolveOptions {
    pub fn new(t_final: f64, dt: f64) -> Self {
        Self { t_final, dt, record_every: 1, exact_cross_check: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    /// |Tr ρ(t) − 1|.
    pub trace_drift: Vec<f64>,
    /// ‖ρ(t) − ρ(t)†‖_F.
    pub hermiticity_drift: Vec<f64>,
    /// Smallest eigenvalue of the Hermitian part of ρ(t). Negative values are
    /// reported as-is.
    pub min_eigenvalue: Vec<f64>,
    /// ‖Λρ(t)‖_F.
    pub residual: Vec<f64>,
    /// Step actually used (dt shortened so that an integer number of steps
    /// reaches t_final).
    pub step: f64,
    /// ‖ρ_RK4(t_final) − exp(Λ t_final)ρ0‖_F when the cross-check ran.
    pub exact_deviation: Option<f64>,
    #[serde(skip)]
    pub final_state: Option<OperatorMatrix>,
}

impl EvolutionTrace {
    pub fn max_trace_drift(&self) -> f64 {
        self.trace_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_hermiticity_drift(&self) -> f64 {
        self.hermiticity_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_eigenvalue_overall(&self) -> f64 {
        self.min_eigenvalue.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn rk4_step(l: &DMatrix<C64>, v: &DVector<C64>, h: f64) -> DVector<C64> {
    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5 * h, 0.0);
    let k1 = l * v;
    let k2 = l * (v + &k1 * half);
    let k3 = l * (v + &k2 * half);
    let k4 = l * (v + &k3 * hc);
    v + (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (hc / 6.0)
}

/// Fixed-step classical RK4 integration of `vec(ρ)' = Λ vec(ρ)`.
pub fn evolve(model: &LiouvillianModel, rho0: &DensityMatrix, opts: &EvolveOptions) -> Result<EvolutionTrace> {
    check_space(model, rho0)?;
    if !(opts.dt > 0.0 && opts.dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be > 0, got {}", opts.dt)));
    }
    if !(opts.t_final > 0.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_final must be > 0, got {}", opts.t_final)));
    }
    let every = opts.record_every.max(1);
    let steps = ((opts.t_final / opts.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = opts.t_final / steps as f64;
    let space = model.space;
    let l = model.generator.entries();

    let mut trace = EvolutionTrace {
        times: Vec::new(),
        trace_drift: Vec::new(),
        hermiticity_drift: Vec::new(),
        min_eigenvalue: Vec::new(),
        residual: Vec::new(),
        step: h,
        exact_deviation: None,
        final_state: None,
    };

    let mut v = vectorize(rho0);
    let record = |t: f64, v: &DVector<C64>, trace: &mut EvolutionTrace| -> Result<f64> {
        let rho = devectorize(space, v)?;
        let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
        trace.times.push(t);
        trace.trace_drift.push(drift);
        trace.hermiticity_drift.push(rho.hermiticity_defect());
        trace.min_eigenvalue.push(rho.hermitian_eigenvalues()[0]);
        trace.residual.push((l * v).norm());
        Ok(drift)
    };
    record(0.0, &v, &mut trace)?;

    for step in 1..=steps {
        v = rk4_step(l, &v, h);
        let t = if step == steps { opts.t_final } else { step as f64 * h };
        let drift = (0..space.dim).map(|i| v[i * space.dim + i]).sum::<C64>() - C64::new(1.0, 0.0);
        if drift.norm() > STEP_REJECT_TRACE_DRIFT || !drift.norm().is_finite() {
            return Err(Error::StepRejected { t, drift: drift.norm() });
        }
        if step % every == 0 || step == steps {
            record(t, &v, &mut trace)?;
        }
    }

    let final_state = devectorize(space, &v)?;
    if opts.exact_cross_check && space.dim * space.dim <= MAX_EXACT_PROPAGATOR {
        let exact = propagate_exact(model, rho0, opts.t_final)?;
        trace.exact_deviation = Some((&exact - &final_state).frobenius_norm());
    }
    trace.final_state = Some(final_state);
    Ok(trace)
}

/// exp(Λt) ρ0 through the dense matrix exponential.
pub fn propagate_exact(model: &LiouvillianModel, rho0: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    check_space(model, rho0)?;
    let d2 = model.space.dim * model.space.dim;
    if d2 > MAX_EXACT_PROPAGATOR {
        return Err(Error::InvalidArgument(format!(
            "exact propagator limited to dim² ≤ {MAX_EXACT_PROPAGATOR}, got {d2}"
        )));
    }
    let prop = (model.generator.entries() * C64::new(t, 0.0)).exp();
    devectorize(model.space, &(prop * vectorize(rho0)))
}
