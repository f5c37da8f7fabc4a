//! Two-flavor solar-neutrino evolution along the radial distance `L`.
//!
//! Energies are in neV and distances in km; the factor `ε` converts
//! neV to rad/km and enters only through the generator. Two modes are
//! supported: the standard matter (MSW) Hamiltonian with `G = 0`, and the
//! damping mode in which the matter term is replaced by `G = (ε/2)g(L)·σ`
//! with `|g(L)| = V(L)`, evolved with the quasi-linear Schrödinger equation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{Generator, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::pauli_dot;
use crate::models::instability::locate_crossing;
use crate::policy::NumericPolicy;
use crate::state::StateVector;
use crate::Vec3;

type Spinor = [Complex64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeutrinoMode {
    Msw,
    Damping,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeutrinoConfig {
    /// Mixing angle θ₁₂ (rad).
    pub theta12: f64,
    /// Δm² (eV²).
    pub dm2: f64,
    /// Neutrino energy (GeV).
    pub energy_gev: f64,
    /// neV → rad/km conversion.
    pub eps: f64,
    /// Solar radius (km).
    pub r_sun: f64,
    pub potential_prefactor: f64,
    /// Coefficients of `x⁴, x³, x², x, 1` with `x = L/R_S`.
    pub potential_coeffs: [f64; 5],
    /// The potential vanishes beyond this radius (km).
    pub cutoff: f64,
    /// Factor applied to `V(L)` inside the generator.
    pub potential_scale: f64,
    pub mode: NeutrinoMode,
    /// Direction of `g` in damping mode; `None` selects the unit vector
    /// perpendicular to the vacuum `ω` in the x–z plane.
    pub damping_direction: Option<Vec3>,
}

impl Default for NeutrinoConfig {
    fn default() -> Self {
        Self {
            theta12: 0.59,
            dm2: 8e-5,
            energy_gev: 0.01,
            eps: 5.08,
            r_sun: 695_700.0,
            potential_prefactor: 0.012,
            potential_coeffs: [519.0, -1630.0, 1844.0, -889.0, 154.910686],
            cutoff: 365_767.0,
            potential_scale: 1.0 / 150.0,
            mode: NeutrinoMode::Damping,
            damping_direction: None,
        }
    }
}

impl NeutrinoConfig {
    pub fn with_mode(mode: NeutrinoMode) -> Self {
        Self { mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [
            self.theta12,
            self.dm2,
            self.energy_gev,
            self.eps,
            self.r_sun,
            self.potential_prefactor,
            self.cutoff,
            self.potential_scale,
        ];
        if !reals.iter().chain(self.potential_coeffs.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("neutrino configuration"));
        }
        if !(self.energy_gev > 0.0) {
            return Err(Error::Domain(format!("energy must be positive, got {}", self.energy_gev)));
        }
        if !(self.r_sun > 0.0 && self.cutoff >= 0.0) {
            return Err(Error::Domain("solar radius and cutoff must be positive".into()));
        }
        if let Some(d) = self.damping_direction {
            if !(d.norm() > 0.0) || !d.iter().all(|x| x.is_finite()) {
                return Err(Error::Domain("damping direction must be a nonzero vector".into()));
            }
        }
        Ok(())
    }

    /// `V(L)` as used by the generator, i.e. scaled by `potential_scale`.
    pub fn effective_potential(&self, l: f64) -> f64 {
        self.potential_scale * neutrino_potential(self, l)
    }

    /// `Δm²/2E` (neV).
    pub fn vacuum_splitting(&self) -> f64 {
        self.dm2 / (2.0 * self.energy_gev)
    }

    /// `ω₀ = (Δm²/2E)(sin2θ, 0, −cos2θ)`.
    pub fn vacuum_omega(&self) -> Vec3 {
        let (s, c) = (2.0 * self.theta12).sin_cos();
        Vec3::new(s, 0.0, -c) * self.vacuum_splitting()
    }

    /// Bloch direction of the heavier mass state, `ω₀/|ω₀|`.
    pub fn nu2_direction(&self) -> Vec3 {
        let (s, c) = (2.0 * self.theta12).sin_cos();
        Vec3::new(s, 0.0, -c)
    }

    pub fn damping_unit(&self) -> Vec3 {
        match self.damping_direction {
            Some(d) => d.normalize(),
            None => {
                let (s, c) = (2.0 * self.theta12).sin_cos();
                Vec3::new(c, 0.0, s)
            }
        }
    }

    /// `ω(L)` (neV): vacuum term plus, in MSW mode, `V(L)ẑ`.
    pub fn omega_at(&self, l: f64) -> Vec3 {
        let mut w = self.vacuum_omega();
        if self.mode == NeutrinoMode::Msw {
            w.z += self.effective_potential(l);
        }
        w
    }

    /// `g(L)` (neV): zero in MSW mode, `V(L)ĝ` in damping mode.
    pub fn g_at(&self, l: f64) -> Vec3 {
        match self.mode {
            NeutrinoMode::Msw => Vec3::zeros(),
            NeutrinoMode::Damping => self.damping_unit() * self.effective_potential(l),
        }
    }

    /// Vacuum oscillation length `2π/(ε|ω₀|)` (km).
    pub fn oscillation_length(&self) -> f64 {
        2.0 * PI / (self.eps * self.vacuum_splitting())
    }

    /// `L_in`: where `|g(L)| = |ω₀|`, to 1 km.
    pub fn instability_point(&self) -> Result<f64> {
        let w = self.vacuum_splitting();
        locate_crossing(|l| self.effective_potential(l) - w, 0.0, self.cutoff, 1.0)
    }

    /// `L_c`: where `V(L) = (Δm²/2E)cos2θ`, to 1 km.
    pub fn resonance_point(&self) -> Result<f64> {
        let w = self.vacuum_splitting() * (2.0 * self.theta12).cos();
        locate_crossing(|l| self.effective_potential(l) - w, 0.0, self.cutoff, 1.0)
    }
}

/// Quartic potential profile `V(L)` (neV), zero beyond the cutoff.
pub fn neutrino_potential(c: &NeutrinoConfig, l: f64) -> f64 {
    if l > c.cutoff {
        return 0.0;
    }
    let x = l / c.r_sun;
    let [a4, a3, a2, a1, a0] = c.potential_coeffs;
    c.potential_prefactor * ((((a4 * x + a3) * x + a2) * x + a1) * x + a0)
}

/// `H = (ε/2)ω(L)·σ`, `G = (ε/2)g(L)·σ`.
pub fn neutrino_generator(c: &NeutrinoConfig, l: f64) -> Generator {
    let half = 0.5 * c.eps;
    Generator::without_lindblads(pauli_dot(&(c.omega_at(l) * half)), pauli_dot(&(c.g_at(l) * half)))
        .expect("Pauli generators are Hermitian")
}

/// `P(ν_e) = |ψ₁|²/‖ψ‖²`.
pub fn electron_survival(psi: &StateVector) -> f64 {
    let a = psi.amplitudes();
    a[0].norm_sqr() / (a[0].norm_sqr() + a[1].norm_sqr())
}

fn pauli_apply(v: &Vec3, psi: &Spinor) -> Spinor {
    let off = Complex64::new(v.x, -v.y);
    [
        psi[0] * v.z + off * psi[1],
        off.conj() * psi[0] - psi[1] * v.z,
    ]
}

/// `dψ/dL = (ε/2)(−iω·σ + g·σ − ⟨g·σ⟩)ψ`.
fn rhs(c: &NeutrinoConfig, l: f64, psi: &Spinor) -> Spinor {
    let half = 0.5 * c.eps;
    let w = c.omega_at(l) * half;
    let g = c.g_at(l) * half;
    let hw = pauli_apply(&w, psi);
    let gw = pauli_apply(&g, psi);
    let nrm = psi[0].norm_sqr() + psi[1].norm_sqr();
    let mean = (psi[0].conj() * gw[0] + psi[1].conj() * gw[1]).re / nrm;
    let mi = Complex64::new(0.0, -1.0);
    [
        mi * hw[0] + gw[0] - psi[0] * mean,
        mi * hw[1] + gw[1] - psi[1] * mean,
    ]
}

fn axpy(psi: &Spinor, h: f64, k: &Spinor) -> Spinor {
    [psi[0] + k[0] * h, psi[1] + k[1] * h]
}

fn rk4_step(c: &NeutrinoConfig, l: f64, h: f64, psi: &Spinor) -> Spinor {
    let k1 = rhs(c, l, psi);
    let k2 = rhs(c, l + 0.5 * h, &axpy(psi, 0.5 * h, &k1));
    let k3 = rhs(c, l + 0.5 * h, &axpy(psi, 0.5 * h, &k2));
    let k4 = rhs(c, l + h, &axpy(psi, h, &k3));
    let s = h / 6.0;
    [
        psi[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * s,
        psi[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * s,
    ]
}

fn spinor_norm(psi: &Spinor) -> f64 {
    (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt()
}

/// Fixed-step RK4 from `L = 0` to `l_end`, calling `visit(i, L, ψ)` after
/// every step (and once for the initial state with `i = 0`).
fn integrate(
    c: &NeutrinoConfig,
    psi0: &StateVector,
    l_end: f64,
    step: f64,
    mut visit: impl FnMut(usize, f64, &Spinor),
) -> Result<Spinor> {
    c.validate()?;
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: psi0.dim(),
        });
    }
    if !(step > 0.0 && step.is_finite()) || !(l_end >= 0.0 && l_end.is_finite()) {
        return Err(Error::Domain(format!("bad step {step} or end {l_end}")));
    }
    let n = (l_end / step).ceil().max(if l_end > 0.0 { 1.0 } else { 0.0 }) as usize;
    let h = if n > 0 { l_end / n as f64 } else { 0.0 };
    let tol = NumericPolicy::DEFAULT.norm_drift_tol;
    let a = psi0.amplitudes();
    let mut psi: Spinor = [a[0], a[1]];
    visit(0, 0.0, &psi);
    for i in 0..n {
        let l = i as f64 * h;
        psi = rk4_step(c, l, h, &psi);
        let drift = (spinor_norm(&psi) - 1.0).abs();
        if !(drift <= tol) {
            return Err(Error::IntegrationDiverged {
                time: l + h,
                reason: format!("norm drift {drift:e} exceeds {tol:e}"),
            });
        }
        visit(i + 1, if i + 1 == n { l_end } else { (i + 1) as f64 * h }, &psi);
    }
    Ok(psi)
}

/// Flavor state along `[0, l_end]` with RK4 at (about) `step` km, sampled
/// every `stride` steps. Adds series `p_ee` and `norm_error`.
///
/// No renormalization is applied; the run fails if `‖ψ‖` drifts from 1 by
/// more than the policy tolerance.
pub fn neutrino_evolve(
    c: &NeutrinoConfig,
    psi0: &StateVector,
    l_end: f64,
    step: f64,
    stride: usize,
) -> Result<Trajectory<StateVector>> {
    let stride = stride.max(1);
    let n = (l_end / step).ceil() as usize;
    let mut samples: Vec<(f64, Spinor)> = Vec::new();
    integrate(c, psi0, l_end, step, |i, l, psi| {
        if i % stride == 0 || i == n {
            samples.push((l, *psi));
        }
    })?;
    let mut traj = Trajectory::new();
    let mut p_ee = Vec::with_capacity(samples.len());
    let mut norm_err = Vec::with_capacity(samples.len());
    for (l, psi) in samples {
        let nrm = spinor_norm(&psi);
        p_ee.push(psi[0].norm_sqr() / (nrm * nrm));
        norm_err.push((nrm - 1.0).abs());
        traj.push(l, StateVector::from_dvector_unchecked(nalgebra::DVector::from_column_slice(&psi)))?;
    }
    traj.insert_series("p_ee", p_ee)?;
    traj.insert_series("norm_error", norm_err)?;
    Ok(traj)
}

/// Electron survival probability averaged over `L ∈ [l_lo, l_hi]` (trapezoid
/// rule on the integration grid), together with the largest norm drift seen.
pub fn survival_average(
    c: &NeutrinoConfig,
    psi0: &StateVector,
    l_lo: f64,
    l_hi: f64,
    step: f64,
) -> Result<(f64, f64)> {
    if !(l_lo < l_hi) || l_lo < 0.0 {
        return Err(Error::Domain(format!("bad averaging window [{l_lo}, {l_hi}]")));
    }
    let mut acc = 0.0;
    let mut span = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    let mut max_drift: f64 = 0.0;
    integrate(c, psi0, l_hi, step, |_, l, psi| {
        let nrm = spinor_norm(psi);
        max_drift = max_drift.max((nrm - 1.0).abs());
        let p = psi[0].norm_sqr() / (nrm * nrm);
        if let Some((l0, p0)) = prev {
            if l0 >= l_lo {
                acc += 0.5 * (p + p0) * (l - l0);
                span += l - l0;
            }
        }
        prev = Some((l, p));
    })?;
    if !(span > 0.0) {
        return Err(Error::NotFound { lo: l_lo, hi: l_hi });
    }
    Ok((acc / span, max_drift))
}
