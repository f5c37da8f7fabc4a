//! Nonlinear GKSL dynamics.
//!
//! The generator `(H, G, {L_α})` drives
//!
//! ```text
//! ρ̇ = −i[H,ρ] + {G,ρ} + Σ L_α ρ L_α† − ρ tr[ρ(2G + Σ L_α†L_α)]
//! ```
//!
//! which keeps `tr ρ = 1` without requiring `2G + Σ L_α†L_α = 0`. When that
//! combination does vanish the equation reduces to the standard linear GKSL
//! form. With no Lindblad operators the flow is solved exactly by the
//! normalized single-operator Kraus map with `K(t) = e^{(G−iH)t}`.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{matrix_exponential, projective_exponential, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::quasilinear::{KrausFamily, MapRegime};
use crate::state::{DensityMatrix, StateVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hamiltonian `H`, damping operator `G` and Lindblad operators `L_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    h: ComplexMatrix,
    g: ComplexMatrix,
    lindblads: Vec<ComplexMatrix>,
    /// `2G + Σ L_α†L_α`, cached.
    rate: ComplexMatrix,
}

impl Generator {
    pub fn new(h: ComplexMatrix, g: ComplexMatrix, lindblads: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = h.dim();
        for m in std::iter::once(&g).chain(&lindblads) {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        let tol = NumericPolicy::DEFAULT.hermitian_tol;
        if !h.is_hermitian(tol) {
            return Err(Error::Validity("Hamiltonian is not Hermitian".into()));
        }
        if !g.is_hermitian(tol) {
            return Err(Error::Validity("damping operator G is not Hermitian".into()));
        }
        let h = h.hermitian_part();
        let g = g.hermitian_part();
        let mut rate = g.scale_real(2.0);
        for l in &lindblads {
            rate = &rate + &(&l.adjoint() * l);
        }
        Ok(Self {
            h,
            g,
            lindblads,
            rate: rate.hermitian_part(),
        })
    }

    /// Generator with only a Hamiltonian.
    pub fn hamiltonian_only(h: ComplexMatrix) -> Result<Self> {
        let dim = h.dim();
        Self::new(h, ComplexMatrix::zeros(dim), Vec::new())
    }

    /// Generator without Lindblad operators.
    pub fn without_lindblads(h: ComplexMatrix, g: ComplexMatrix) -> Result<Self> {
        Self::new(h, g, Vec::new())
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(ComplexMatrix::zeros(dim), ComplexMatrix::zeros(dim), Vec::new())
            .expect("zero generator is valid")
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn damping(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn lindblads(&self) -> &[ComplexMatrix] {
        &self.lindblads
    }

    /// `2G + Σ L_α†L_α`.
    pub fn effect_rate(&self) -> &ComplexMatrix {
        &self.rate
    }

    /// `G − iH`.
    pub fn nonhermitian_part(&self) -> ComplexMatrix {
        &self.g - &self.h.scale(I)
    }

    /// Single Kraus operator `e^{(G−iH)t}` (unshifted).
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        matrix_exponential(&self.nonhermitian_part().scale_real(t))
    }

    /// `{e^{(G−iH)t}}` as an evolution family; requires no Lindblad operators.
    pub fn exponential_family(&self, t: f64) -> Result<KrausFamily> {
        self.require_no_lindblads()?;
        Ok(KrausFamily::single(self.propagator(t)?))
    }

    fn require_no_lindblads(&self) -> Result<()> {
        if !self.lindblads.is_empty() {
            return Err(Error::Unsupported(
                "operation requires a generator without Lindblad operators".into(),
            ));
        }
        Ok(())
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

/// A generator as a function of time.
pub enum TimeParameterizedGenerator {
    Constant(Generator),
    Varying {
        dim: usize,
        f: Box<dyn Fn(f64) -> Generator + Send + Sync>,
    },
}

impl TimeParameterizedGenerator {
    pub fn constant(gen: Generator) -> Self {
        Self::Constant(gen)
    }

    pub fn varying(dim: usize, f: impl Fn(f64) -> Generator + Send + Sync + 'static) -> Self {
        Self::Varying { dim, f: Box::new(f) }
    }

    pub fn at(&self, t: f64) -> Cow<'_, Generator> {
        match self {
            Self::Constant(g) => Cow::Borrowed(g),
            Self::Varying { f, .. } => Cow::Owned(f(t)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Constant(g) => g.dim(),
            Self::Varying { dim, .. } => *dim,
        }
    }

    pub fn is_time_independent(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    fn checked_at(&self, t: f64) -> Result<Cow<'_, Generator>> {
        let g = self.at(t);
        g.check_dim(self.dim())?;
        Ok(g)
    }
}

impl From<Generator> for TimeParameterizedGenerator {
    fn from(g: Generator) -> Self {
        Self::Constant(g)
    }
}

impl fmt::Debug for TimeParameterizedGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(g) => f.debug_tuple("Constant").field(g).finish(),
            Self::Varying { dim, .. } => f.debug_struct("Varying").field("dim", dim).finish(),
        }
    }
}

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub t_end: f64,
    pub renormalize_each_step: bool,
    /// Record every `sample_stride`-th step (the final step is always recorded).
    pub sample_stride: usize,
}

impl IntegratorConfig {
    pub fn new(step: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            step,
            t_end,
            renormalize_each_step: false,
            sample_stride: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_renormalization(mut self, on: bool) -> Self {
        self.renormalize_each_step = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Domain(format!("step must be positive, got {}", self.step)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Domain(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.sample_stride == 0 {
            return Err(Error::Domain("sample_stride must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`; the last one may be shorter.
    pub fn step_count(&self) -> usize {
        let n = self.t_end / self.step;
        let rounded = n.round();
        if (n - rounded).abs() < 1e-9 * n.max(1.0) {
            rounded as usize
        } else {
            n.ceil() as usize
        }
    }

    /// Start time and length of step `i`.
    pub(crate) fn step_span(&self, i: usize, n: usize) -> (f64, f64) {
        let t = i as f64 * self.step;
        let h = if i + 1 == n { self.t_end - t } else { self.step };
        (t, h)
    }

    pub(crate) fn is_sample(&self, i: usize, n: usize) -> bool {
        i % self.sample_stride == 0 || i == n
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            t_end: 1.0,
            renormalize_each_step: false,
            sample_stride: 1,
        }
    }
}

/// Sampled states with optional named real series of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
    derived: BTreeMap<String, Vec<f64>>,
}

impl<S> Default for Trajectory<S> {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            derived: BTreeMap::new(),
        }
    }
}

impl<S> Trajectory<S> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a sample; times must be strictly increasing.
    pub fn push(&mut self, t: f64, state: S) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::Validity(format!(
                    "trajectory times must increase ({t} after {last})"
                )));
            }
        }
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &S)> {
        Some((*self.times.last()?, self.states.last()?))
    }

    pub fn derived(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.derived
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.derived.get(name).map(Vec::as_slice)
    }

    /// Adds a named series; it must have one value per sample.
    pub fn insert_series(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        if values.len() != self.times.len() {
            return Err(Error::DimensionMismatch {
                expected: self.times.len(),
                found: values.len(),
            });
        }
        self.derived.insert(name.into(), values);
        Ok(())
    }

    /// Adds a series computed from each `(t, state)` sample.
    pub fn add_series(&mut self, name: impl Into<String>, f: impl Fn(f64, &S) -> f64) {
        let values = self.times.iter().zip(&self.states).map(|(&t, s)| f(t, s)).collect();
        self.derived.insert(name.into(), values);
    }

    /// Builds a new trajectory by mapping every state; series are kept.
    pub fn map_states<T>(&self, f: impl Fn(f64, &S) -> Result<T>) -> Result<Trajectory<T>> {
        let states = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| f(t, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            times: self.times.clone(),
            states,
            derived: self.derived.clone(),
        })
    }
}

/// Right-hand side of the nonlinear GKSL equation.
pub fn gksl_rhs(gen: &Generator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    gen.check_dim(rho.dim())?;
    Ok(gksl_rhs_matrix(gen, rho.matrix()))
}

pub(crate) fn gksl_rhs_matrix(gen: &Generator, rho: &ComplexMatrix) -> ComplexMatrix {
    let hr = &gen.h * rho;
    let rh = rho * &gen.h;
    let gr = &gen.g * rho;
    let rg = rho * &gen.g;
    // −i(Hρ − ρH) + Gρ + ρG
    let mut out = &(&(&rh - &hr).scale(I) + &gr) + &rg;
    for l in &gen.lindblads {
        out = &out + &(&(l * rho) * &l.adjoint());
    }
    let w = (rho * &gen.rate).trace();
    &out - &rho.scale(w)
}

/// Right-hand side of the standard linear GKSL equation (the `G` field is ignored).
pub fn standard_lindblad_rhs(gen: &Generator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    gen.check_dim(rho.dim())?;
    let rho = rho.matrix();
    let h = &gen.h;
    let mut out = (&(rho * h) - &(h * rho)).scale(I);
    for l in &gen.lindblads {
        let ll = &l.adjoint() * l;
        let jump = &(l * rho) * &l.adjoint();
        let anti = &(&ll * rho) + &(rho * &ll);
        out = &out + &(&jump - &anti.scale_real(0.5));
    }
    Ok(out)
}

/// `dψ/dt = (−iH + G − ⟨G⟩ + iκ)ψ`.
pub fn state_vector_rhs(gen: &Generator, psi: &StateVector, kappa: f64) -> Result<DVector<Complex64>> {
    gen.require_no_lindblads()?;
    gen.check_dim(psi.dim())?;
    Ok(state_vector_rhs_raw(gen, psi.amplitudes(), kappa))
}

fn state_vector_rhs_raw(gen: &Generator, psi: &DVector<Complex64>, kappa: f64) -> DVector<Complex64> {
    let gpsi = gen.g.as_dmatrix() * psi;
    let hpsi = gen.h.as_dmatrix() * psi;
    let expect_g = psi.dotc(&gpsi).re / psi.norm_squared();
    gpsi - hpsi * I + psi * Complex64::new(-expect_g, kappa)
}

/// `tr(ρH)`.
pub fn mean_energy(gen: &Generator, rho: &DensityMatrix) -> f64 {
    (rho.matrix() * &gen.h).trace().re
}

/// Exact solution for a time-independent generator without Lindblad
/// operators: `ρ(t) = Kρ₀K†/tr(Kρ₀K†)` with `K = e^{(G−iH)t}`.
///
/// `K` is only needed up to a scalar, which cancels in the normalization, so
/// it is built with a rescaled squaring that stays bounded for long times.
pub fn closed_form_propagate(gen: &Generator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    gen.require_no_lindblads()?;
    gen.check_dim(rho0.dim())?;
    let k = projective_exponential(&gen.nonhermitian_part().scale_real(t))?;
    KrausFamily::single(k).apply_normalized(rho0)
}

/// Compares the normalized map built from `K₀ = I + δt(G − iH)`,
/// `K_α = √δt L_α` with the generator:
/// returns `‖(Φ_δt(ρ) − ρ)/δt − gksl_rhs(ρ)‖_F`, which is `O(δt)`.
pub fn finite_difference_generator_check(gen: &Generator, rho: &DensityMatrix, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("finite-difference step must be positive, got {dt}")));
    }
    gen.check_dim(rho.dim())?;
    let dim = gen.dim();
    let k0 = &ComplexMatrix::identity(dim) + &gen.nonhermitian_part().scale_real(dt);
    let mut ops = vec![k0];
    ops.extend(gen.lindblads.iter().map(|l| l.scale_real(dt.sqrt())));
    let family = KrausFamily::new(ops, MapRegime::Evolution)?;
    let raw = family.apply_raw_matrix(rho.matrix());
    let tr = raw.trace().re;
    if !(tr > NumericPolicy::DEFAULT.singular_trace_cutoff) {
        return Err(Error::SingularNormalization { trace: tr });
    }
    let phi = raw.scale_real(1.0 / tr);
    let quotient = (&phi - rho.matrix()).scale_real(1.0 / dt);
    Ok(quotient.distance(&gksl_rhs_matrix(gen, rho.matrix())))
}

fn rk4_matrix(
    gen: &TimeParameterizedGenerator,
    t: f64,
    h: f64,
    y: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let g0 = gen.checked_at(t)?;
    let k1 = gksl_rhs_matrix(&g0, y);
    let mid = gen.checked_at(t + 0.5 * h)?;
    let k2 = gksl_rhs_matrix(&mid, &(y + &k1.scale_real(0.5 * h)));
    let k3 = gksl_rhs_matrix(&mid, &(y + &k2.scale_real(0.5 * h)));
    let end = gen.checked_at(t + h)?;
    let k4 = gksl_rhs_matrix(&end, &(y + &k3.scale_real(h)));
    let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(2.0);
    Ok(y + &incr.scale_real(h / 6.0))
}

/// Integrates the nonlinear GKSL equation with classical fixed-step RK4.
///
/// Every step is checked for finiteness and trace drift (unless
/// renormalizing); every sample is validated as a density matrix under the
/// integrator policy. The series `trace_error` records `|tr ρ − 1|` before any
/// renormalization.
pub fn evolve(
    gen: &TimeParameterizedGenerator,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<DensityMatrix>> {
    cfg.validate()?;
    if rho0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: rho0.dim(),
        });
    }
    let policy = NumericPolicy::integrator();
    let n = cfg.step_count();
    let mut traj = Trajectory::new();
    let mut trace_err = vec![0.0];
    traj.push(0.0, rho0.clone())?;
    let mut y = rho0.matrix().clone();
    for i in 0..n {
        let (t, h) = cfg.step_span(i, n);
        y = rk4_matrix(gen, t, h, &y)?;
        let t_next = t + h;
        if !y.is_finite() {
            return Err(Error::IntegrationDiverged {
                time: t_next,
                reason: "non-finite state".into(),
            });
        }
        let tr = y.trace().re;
        let drift = (tr - 1.0).abs();
        if cfg.renormalize_each_step {
            y = y.scale_real(1.0 / tr);
        } else if drift > policy.trace_drift_tol {
            return Err(Error::IntegrationDiverged {
                time: t_next,
                reason: format!("trace drift {drift:e}"),
            });
        }
        if cfg.is_sample(i + 1, n) {
            let state = DensityMatrix::with_policy(y.clone(), &policy).map_err(|e| {
                Error::IntegrationDiverged {
                    time: t_next,
                    reason: e.to_string(),
                }
            })?;
            traj.push(t_next, state)?;
            trace_err.push(drift);
        }
    }
    traj.insert_series("trace_error", trace_err)?;
    Ok(traj)
}

/// Integrates the state-vector form with RK4. The series `norm_error`
/// records `|‖ψ‖ − 1|` before any renormalization.
pub fn evolve_state_vector(
    gen: &TimeParameterizedGenerator,
    psi0: &StateVector,
    kappa: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<StateVector>> {
    cfg.validate()?;
    if psi0.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            found: psi0.dim(),
        });
    }
    gen.at(0.0).require_no_lindblads()?;
    let policy = NumericPolicy::DEFAULT;
    let n = cfg.step_count();
    let mut traj = Trajectory::new();
    let mut norm_err = vec![0.0];
    traj.push(0.0, psi0.clone())?;
    let mut y = psi0.amplitudes().clone();
    for i in 0..n {
        let (t, h) = cfg.step_span(i, n);
        let g0 = gen.checked_at(t)?;
        let mid = gen.checked_at(t + 0.5 * h)?;
        let end = gen.checked_at(t + h)?;
        let k1 = state_vector_rhs_raw(&g0, &y, kappa);
        let k2 = state_vector_rhs_raw(&mid, &(&y + &k1 * Complex64::new(0.5 * h, 0.0)), kappa);
        let k3 = state_vector_rhs_raw(&mid, &(&y + &k2 * Complex64::new(0.5 * h, 0.0)), kappa);
        let k4 = state_vector_rhs_raw(&end, &(&y + &k3 * Complex64::new(h, 0.0)), kappa);
        y += (k1 + k4 + (k2 + k3) * Complex64::new(2.0, 0.0)) * Complex64::new(h / 6.0, 0.0);
        let t_next = t + h;
        let norm = y.norm();
        if !norm.is_finite() {
            return Err(Error::IntegrationDiverged {
                time: t_next,
                reason: "non-finite state".into(),
            });
        }
        let drift = (norm - 1.0).abs();
        if cfg.renormalize_each_step {
            y /= Complex64::new(norm, 0.0);
        } else if drift > policy.norm_drift_tol {
            return Err(Error::IntegrationDiverged {
                time: t_next,
                reason: format!("norm drift {drift:e}"),
            });
        }
        if cfg.is_sample(i + 1, n) {
            traj.push(t_next, StateVector::from_dvector_unchecked(y.clone()))?;
            norm_err.push(drift);
        }
    }
    traj.insert_series("norm_error", norm_err)?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use crate::state::{bloch_to_density, BlochVector};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bloch(x: f64, y: f64, z: f64) -> DensityMatrix {
        bloch_to_density(&BlochVector::new(x, y, z).unwrap())
    }

    /// σ₋ = |0⟩⟨1| with |0⟩ the n₃ = +1 state.
    fn lowering() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn test_pure_precession_velocity() {
        let omega = 2.5;
        let gen = Generator::hamiltonian_only(pauli(3).scale_real(0.5 * omega)).unwrap();
        let rho = bloch(1.0, 0.0, 0.0);
        let v = gksl_rhs(&gen, &rho).unwrap();
        let vel = [1, 2, 3].map(|k| (&v * &pauli(k)).trace().re);
        assert_relative_eq!(vel[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(vel[1], omega, epsilon = 1e-15);
        assert_relative_eq!(vel[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn test_balanced_generator_is_standard_gksl() {
        let l = lowering().scale_real(0.7);
        let g = (&l.adjoint() * &l).scale_real(-0.5);
        let h = pauli(1).scale_real(0.3);
        let gen = Generator::new(h, g, vec![l]).unwrap();
        let rho = bloch(0.1, 0.5, -0.2);
        let a = gksl_rhs(&gen, &rho).unwrap();
        let b = standard_lindblad_rhs(&gen, &rho).unwrap();
        assert!(a.distance(&b) < 1e-12);
    }

    #[test]
    fn test_eigenprojector_of_g_is_fixed() {
        let gen = Generator::without_lindblads(ComplexMatrix::zeros(2), pauli(3).scale_real(0.8)).unwrap();
        let v = gksl_rhs(&gen, &bloch(0.0, 0.0, -1.0)).unwrap();
        assert!(v.frobenius_norm() < 1e-15);
    }

    #[test]
    fn test_standard_lindblad_examples() {
        let h = pauli(2).scale_real(0.9);
        let gen = Generator::hamiltonian_only(h.clone()).unwrap();
        let rho = bloch(0.3, 0.0, 0.4);
        let expected = (&(rho.matrix() * &h) - &(&h * rho.matrix())).scale(Complex64::i());
        assert!(standard_lindblad_rhs(&gen, &rho).unwrap().distance(&expected) < 1e-15);

        let damp = Generator::new(ComplexMatrix::zeros(2), ComplexMatrix::zeros(2), vec![lowering()]).unwrap();
        let down = bloch(0.0, 0.0, -1.0);
        let v = standard_lindblad_rhs(&damp, &down).unwrap();
        assert!(v.distance(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-15);

        let unital = Generator::new(ComplexMatrix::zeros(2), ComplexMatrix::zeros(2), vec![pauli(1)]).unwrap();
        let v = standard_lindblad_rhs(&unital, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(v.frobenius_norm() < 1e-15);
    }

    #[test]
    fn test_state_vector_rhs_examples() {
        let h = pauli(1).scale_real(0.4);
        let gen = Generator::hamiltonian_only(h.clone()).unwrap();
        let psi = StateVector::normalized(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let v = state_vector_rhs(&gen, &psi, 0.0).unwrap();
        let expected = h.as_dmatrix() * psi.amplitudes() * c(0.0, -1.0);
        assert!((v - expected).norm() < 1e-15);

        let gonly = Generator::without_lindblads(ComplexMatrix::zeros(2), pauli(3)).unwrap();
        let v = state_vector_rhs(&gonly, &StateVector::basis(2, 0), 0.0).unwrap();
        assert!(v.norm() < 1e-15);

        let with_l = Generator::new(ComplexMatrix::zeros(2), ComplexMatrix::zeros(2), vec![pauli(1)]).unwrap();
        assert!(matches!(state_vector_rhs(&with_l, &psi, 0.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn test_state_vector_rhs_projects_to_gksl_rhs() {
        let gen = Generator::without_lindblads(pauli(1).scale_real(0.7), pauli(2).scale_real(-0.3)).unwrap();
        let psi = StateVector::normalized(vec![c(0.3, 0.1), c(-0.5, 0.8)]).unwrap();
        let rho = psi.projector();
        let target = gksl_rhs(&gen, &rho).unwrap();
        for kappa in [0.0, 1.3, -4.0] {
            let d = state_vector_rhs(&gen, &psi, kappa).unwrap();
            let p = psi.amplitudes();
            let dm = &d * p.adjoint() + p * d.adjoint();
            let dm = ComplexMatrix::from_dmatrix(dm).unwrap();
            assert!(dm.distance(&target) < 1e-14);
            assert!(p.dotc(&d).re.abs() < 1e-15);
        }
    }

    #[test]
    fn test_closed_form_examples() {
        let gen = Generator::without_lindblads(pauli(3).scale_real(3.0), pauli(1).scale_real(1.7)).unwrap();
        let rho0 = bloch(0.0, 0.6, 0.8);
        let same = closed_form_propagate(&gen, &rho0, 0.0).unwrap();
        assert!(same.distance(&rho0) < 1e-15);
        let later = closed_form_propagate(&gen, &rho0, 3.7).unwrap();
        assert_relative_eq!(later.purity(), 1.0, epsilon = 1e-10);
        // Long times stay finite thanks to the shift.
        let far = closed_form_propagate(&gen, &rho0, 1e4).unwrap();
        assert!(far.matrix().is_finite());

        let unitary = Generator::hamiltonian_only(pauli(2).scale_real(0.5)).unwrap();
        let mixed = bloch(0.3, 0.0, 0.1);
        let out = closed_form_propagate(&unitary, &mixed, 2.0).unwrap();
        assert_relative_eq!(out.von_neumann_entropy(), mixed.von_neumann_entropy(), epsilon = 1e-12);
    }

    #[test]
    fn test_evolve_matches_closed_form() {
        let gen = Generator::without_lindblads(pauli(3).scale_real(3.0), pauli(1).scale_real(2.0)).unwrap();
        let rho0 = bloch(0.0, 0.0, 1.0);
        let cfg = IntegratorConfig::new(1e-3, 10.0).unwrap().with_stride(1000);
        let traj = evolve(&gen.clone().into(), &rho0, &cfg).unwrap();
        assert_eq!(traj.len(), 11);
        let (t, last) = traj.last().unwrap();
        assert_relative_eq!(t, 10.0, epsilon = 1e-12);
        let exact = closed_form_propagate(&gen, &rho0, 10.0).unwrap();
        assert!(last.distance(&exact) < 1e-6);
        assert!(traj.series("trace_error").unwrap().iter().all(|&e| e < 1e-8));
    }

    #[test]
    fn test_evolve_zero_generator_is_constant() {
        let rho0 = bloch(0.2, 0.2, 0.2);
        let cfg = IntegratorConfig::new(0.1, 1.0).unwrap();
        let traj = evolve(&Generator::zero(2).into(), &rho0, &cfg).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states().iter().all(|s| s.distance(&rho0) < 1e-15));
    }

    #[test]
    fn test_step_count_handles_rounding() {
        assert_eq!(IntegratorConfig::new(1e-3, 10.0).unwrap().step_count(), 10000);
        assert_eq!(IntegratorConfig::new(0.3, 1.0).unwrap().step_count(), 4);
        assert_eq!(IntegratorConfig::new(0.3, 0.0).unwrap().step_count(), 0);
        assert!(IntegratorConfig::new(0.0, 1.0).is_err());
        assert!(IntegratorConfig::new(0.1, -1.0).is_err());
    }

    #[test]
    fn test_finite_difference_first_order() {
        let l = lowering().scale_real(0.6);
        let gen = Generator::new(pauli(1).scale_real(0.9), pauli(3).scale_real(0.4), vec![l]).unwrap();
        let rho = bloch(0.2, -0.3, 0.5);
        let e1 = finite_difference_generator_check(&gen, &rho, 1e-3).unwrap();
        let e2 = finite_difference_generator_check(&gen, &rho, 5e-4).unwrap();
        let ratio = e2 / e1;
        assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
        assert_eq!(finite_difference_generator_check(&Generator::zero(2), &rho, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn test_mean_energy_examples() {
        let omega = 1.8;
        let gen = Generator::hamiltonian_only(pauli(3).scale_real(0.5 * omega)).unwrap();
        assert_relative_eq!(mean_energy(&gen, &DensityMatrix::maximally_mixed(2)), 0.0);
        assert_relative_eq!(mean_energy(&gen, &bloch(0.0, 0.0, 1.0)), omega / 2.0);
        assert_relative_eq!(mean_energy(&gen, &bloch(0.0, 0.0, -1.0)), -omega / 2.0);
    }

    #[test]
    fn test_generator_validation() {
        let non_herm = lowering();
        assert!(Generator::hamiltonian_only(non_herm).is_err());
        assert!(Generator::without_lindblads(pauli(1), ComplexMatrix::zeros(3)).is_err());
    }
}
