//! Closed-form qubit dynamics.
//!
//! With `H = ½ω·σ` and `G = ½g·σ` the propagator is the SL(2,C) element
//! `K(t) = e^{½t α·σ} = aI + b α·σ` where `α = g − iω`. Every Bloch-vector
//! formula here is an explicit function of `(a, b, ω, g, ξ, t)`, and the test
//! suites use them as oracles for the numerical integrator.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::dynamics::Generator;
use crate::error::{Error, Result};
use crate::linalg::{pauli, pauli_coordinates, pauli_dot, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::quasilinear::{KrausFamily, MapRegime};
use crate::state::BlochVector;
use crate::Vec3;

type CVec3 = [Complex64; 3];

/// `(ω, g)` of the qubit generator `H = ½ω·σ`, `G = ½g·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitGeneratorParams {
    pub omega: Vec3,
    pub g: Vec3,
}

/// Qualitative class of a qubit generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseClass {
    /// `ω·g = 0`, `g² = ω²`.
    Parabolic,
    /// `ω·g = 0`, `g² > ω²`.
    HyperbolicDamped,
    /// `ω·g = 0`, `ω² > g²`.
    Oscillatory,
    /// `ω·g ≠ 0`.
    GenericTilted,
}

impl QubitGeneratorParams {
    pub fn new(omega: Vec3, g: Vec3) -> Result<Self> {
        if !omega.iter().chain(g.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("qubit generator parameters"));
        }
        Ok(Self { omega, g })
    }

    /// `C1 = g·ω`.
    pub fn c1(&self) -> f64 {
        self.g.dot(&self.omega)
    }

    /// `C2 = g² − ω²`.
    pub fn c2(&self) -> f64 {
        self.g.norm_squared() - self.omega.norm_squared()
    }

    /// `α = g − iω`.
    pub fn alpha(&self) -> CVec3 {
        [0, 1, 2].map(|k| Complex64::new(self.g[k], -self.omega[k]))
    }

    /// `α·α = C2 − 2iC1`.
    pub fn alpha_squared(&self) -> Complex64 {
        Complex64::new(self.c2(), -2.0 * self.c1())
    }

    /// `H = ½ω·σ`, `G = ½g·σ`, no Lindblad operators.
    pub fn generator(&self) -> Generator {
        Generator::without_lindblads(pauli_dot(&(self.omega * 0.5)), pauli_dot(&(self.g * 0.5)))
            .expect("Pauli generators are Hermitian")
    }

    /// Scale against which the `C1`, `C2` zero tests are made.
    fn scale(&self) -> f64 {
        self.g.norm_squared().max(self.omega.norm_squared())
    }

    /// `ω·g = 0` within the orthogonality tolerance (relative to `max(g², ω²)`).
    pub fn is_orthogonal(&self) -> bool {
        self.c1().abs() <= NumericPolicy::DEFAULT.orthogonal_rel_tol * self.scale()
    }

    pub fn case_class(&self) -> CaseClass {
        if !self.is_orthogonal() {
            return CaseClass::GenericTilted;
        }
        let c2 = self.c2();
        if c2.abs() < NumericPolicy::DEFAULT.parabolic_rel_tol * self.scale() || self.scale() == 0.0 {
            CaseClass::Parabolic
        } else if c2 > 0.0 {
            CaseClass::HyperbolicDamped
        } else {
            CaseClass::Oscillatory
        }
    }
}

/// `K(t) = aI + b α·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SL2CCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub alpha: CVec3,
}

impl SL2CCoefficients {
    /// `a² − α²b²`, which equals 1.
    pub fn determinant(&self) -> Complex64 {
        let a2 = self.alpha[0] * self.alpha[0] + self.alpha[1] * self.alpha[1] + self.alpha[2] * self.alpha[2];
        self.a * self.a - a2 * self.b * self.b
    }

    /// `aI + b α·σ`.
    pub fn matrix(&self) -> ComplexMatrix {
        let v = self.alpha.map(|z| z * self.b);
        let mut m = crate::linalg::pauli_dot_complex(&v);
        m = &m + &ComplexMatrix::identity(2).scale(self.a);
        m
    }
}

/// `(cosh z, sinh(z)/s)` with `z = ½ts`, `s² = α²`, plus the series for small `z`.
/// When `scaled` is set both are divided by `e^{Re z}`-size factor `e^z` to avoid
/// overflow; Bloch formulas are homogeneous in `(a, b)` so the factor cancels.
fn ab_from_alpha_sq(alpha_sq: Complex64, t: f64, scaled: bool) -> (Complex64, Complex64) {
    let z2 = alpha_sq * (0.25 * t * t);
    if z2.norm() < NumericPolicy::DEFAULT.alpha_sq_series_cutoff || alpha_sq.norm() < NumericPolicy::DEFAULT.alpha_sq_series_cutoff {
        let a = Complex64::new(1.0, 0.0) + alpha_sq * (t * t / 8.0);
        let b = Complex64::new(0.5 * t, 0.0) + alpha_sq * (t * t * t / 48.0);
        return (a, b);
    }
    let s = alpha_sq.sqrt();
    let z = s * (0.5 * t);
    if scaled && z.re > 20.0 {
        let e = (-2.0 * z).exp();
        let one = Complex64::new(1.0, 0.0);
        return ((one + e) * 0.5, (one - e) / (2.0 * s));
    }
    (z.cosh(), z.sinh() / s)
}

/// `a = cosh(½t√α²)`, `b = sinh(½t√α²)/√α²` (principal branch), with the
/// series `a = 1 + α²t²/8`, `b = t/2 + α²t³/48` near `α² = 0`.
pub fn sl2c_coefficients(p: &QubitGeneratorParams, t: f64) -> SL2CCoefficients {
    let (a, b) = ab_from_alpha_sq(p.alpha_squared(), t, false);
    SL2CCoefficients {
        a,
        b,
        alpha: p.alpha(),
    }
}

fn to_bloch(v: Vec3) -> Result<BlochVector> {
    let n = v.norm();
    if !n.is_finite() {
        return Err(Error::NonFinite("Bloch trajectory"));
    }
    // Rounding can push pure-state results a hair outside the ball.
    if n > 1.0 && n <= 1.0 + 1e-6 {
        return BlochVector::from_vec(v / n);
    }
    BlochVector::from_vec(v)
}

fn checked_quotient(num: Vec3, den: f64) -> Result<BlochVector> {
    if !(den.abs() > 1e-300) || !den.is_finite() {
        return Err(Error::SingularNormalization { trace: den });
    }
    to_bloch(num / den)
}

/// General Bloch trajectory `n(t)` for any `(ω, g)` and initial `ξ`.
pub fn bloch_trajectory_general(p: &QubitGeneratorParams, xi: &BlochVector, t: f64) -> Result<BlochVector> {
    let (a, b) = ab_from_alpha_sq(p.alpha_squared(), t, true);
    let (w, g, x) = (p.omega, p.g, xi.vector());
    let aa = a.norm_sqr();
    let bb = b.norm_sqr();
    let abc = a * b.conj();
    let re = 2.0 * abc.re;
    let im = -2.0 * abc.im;
    let g2w2 = g.norm_squared() + w.norm_squared();
    let gx = g.dot(&x);
    let wx = w.dot(&x);
    let den = aa + bb * (g2w2 - 2.0 * w.cross(&g).dot(&x)) + re * gx + im * wx;
    let num = x * (aa - bb * g2w2) + g * (re + 2.0 * bb * gx) + w * (im + 2.0 * bb * wx)
        - g.cross(&w) * (2.0 * bb)
        - g.cross(&x) * im
        + w.cross(&x) * re;
    checked_quotient(num, den)
}

/// Orthogonal-case trajectories (`ω·g = 0`) in their real trigonometric or
/// hyperbolic forms.
pub fn bloch_trajectory_case(
    case: CaseClass,
    p: &QubitGeneratorParams,
    xi: &BlochVector,
    t: f64,
) -> Result<BlochVector> {
    if !p.is_orthogonal() {
        return Err(Error::Precondition(format!(
            "orthogonal-case formula needs ω·g = 0, got {}",
            p.c1()
        )));
    }
    let actual = p.case_class();
    if case != actual {
        return Err(Error::Precondition(format!(
            "requested case {case:?} but parameters are {actual:?}"
        )));
    }
    let (w, g, x) = (p.omega, p.g, xi.vector());
    let g2 = g.norm_squared();
    let w2 = w.norm_squared();
    let gx = g.dot(&x);
    let wx = w.dot(&x);
    let wxg = w.cross(&g);
    let wxg_x = wxg.dot(&x);
    let bracket = g * gx + w * wx + wxg;
    match case {
        CaseClass::Parabolic => {
            let t2 = 0.5 * t * t;
            let num = x * (1.0 - w2 * t2) + g * (t + gx * t2) + w * (wx * t2) + wxg * t2 + w.cross(&x) * t;
            let den = 1.0 + t * gx + t2 * (w2 - wxg_x);
            checked_quotient(num, den)
        }
        CaseClass::HyperbolicDamped => {
            // Numerator and denominator divided by cosh(Ωt).
            let om = (g2 - w2).sqrt();
            let sech = 1.0 / (om * t).cosh();
            let tanh = (om * t).tanh();
            let num = x * (g2 * sech - w2) + (g + w.cross(&x)) * (om * tanh) - bracket * (sech - 1.0);
            let den = g2 - w2 * sech + (sech - 1.0) * wxg_x + om * tanh * gx;
            checked_quotient(num, den)
        }
        CaseClass::Oscillatory => {
            let om = (w2 - g2).sqrt();
            let (s, c) = (om * t).sin_cos();
            let num = x * (w2 * c - g2) + (g + w.cross(&x)) * (om * s) + bracket * (1.0 - c);
            let den = w2 - g2 * c - (1.0 - c) * wxg_x + om * s * gx;
            checked_quotient(num, den)
        }
        CaseClass::GenericTilted => Err(Error::Precondition(
            "no orthogonal-case formula for ω·g ≠ 0".into(),
        )),
    }
}

/// Probabilities `(p₊, p₋)` of the `H` eigenstates for `ω = (0,0,ω)`,
/// `g = (g,0,0)`, `ξ = (0,0,1)`. The branch follows the sign of `g − ω`.
pub fn eigenstate_probabilities(omega: f64, g: f64, t: f64) -> (f64, f64) {
    let g2 = g * g;
    let w2 = omega * omega;
    let scale = g2.max(w2);
    let c2 = g2 - w2;
    let p_minus = if c2.abs() < NumericPolicy::DEFAULT.parabolic_rel_tol * scale || scale == 0.0 {
        let gt2 = (g * t) * (g * t);
        gt2 / (4.0 + 2.0 * gt2)
    } else if c2 > 0.0 {
        let om = c2.sqrt();
        let sech = 1.0 / (om * t).cosh();
        0.5 * (g2 - g2 * sech) / (g2 - w2 * sech)
    } else {
        let c = ((-c2).sqrt() * t).cos();
        0.5 * (g2 - g2 * c) / (w2 - g2 * c)
    };
    (1.0 - p_minus, p_minus)
}

/// Rabi probability `g²/(2(g²+ω²)) (1 − cos(t√(g²+ω²)))`.
pub fn rabi_probability(g: f64, omega: f64, t: f64) -> f64 {
    let r2 = g * g + omega * omega;
    if r2 == 0.0 {
        return 0.0;
    }
    g * g / (2.0 * r2) * (1.0 - (t * r2.sqrt()).cos())
}

/// Shared maximum `g²/(g² + ω²)` of the eigenstate and Rabi probabilities.
pub fn max_transition_probability(g: f64, omega: f64) -> f64 {
    g * g / (g * g + omega * omega)
}

/// Long-time behaviour of a qubit trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptote {
    Stationary(BlochVector),
    /// `ω·g = 0` with `g < ω`: the flow is periodic.
    Oscillatory,
}

impl Asymptote {
    pub fn stationary(&self) -> Option<BlochVector> {
        match self {
            Asymptote::Stationary(n) => Some(*n),
            Asymptote::Oscillatory => None,
        }
    }
}

/// Limit `n(∞)` for initial state `ξ`, or the oscillatory marker.
pub fn asymptote(p: &QubitGeneratorParams, xi: &BlochVector) -> Result<Asymptote> {
    let (w, g, x) = (p.omega, p.g, xi.vector());
    let g2 = g.norm_squared();
    let w2 = w.norm_squared();
    if g2 == 0.0 && w2 == 0.0 {
        return Ok(Asymptote::Stationary(*xi));
    }
    let gx = g.dot(&x);
    let wx = w.dot(&x);
    let wxg = w.cross(&g);
    let wxg_x = wxg.dot(&x);
    let n = match p.case_class() {
        CaseClass::GenericTilted => {
            let c1 = p.c1();
            let c2 = g2 - w2;
            let r = (c2 * c2 + 4.0 * c1 * c1).sqrt();
            let xr = ((c2 + r).max(0.0) / 2.0).sqrt();
            let yr = -c1.signum() * ((r - c2).max(0.0) / 2.0).sqrt();
            let num = x * (r - (g2 + w2))
                + g * (2.0 * (xr + gx))
                + w * (2.0 * (-yr + wx))
                + (wxg + g.cross(&x) * yr + w.cross(&x) * xr) * 2.0;
            let den = (r + g2 + w2) - 2.0 * (wxg_x - xr * gx + yr * wx);
            checked_quotient(num, den)?
        }
        CaseClass::HyperbolicDamped => {
            let s = (g2 - w2).sqrt();
            let num = x * (-w2) + g * (s + gx) + w * wx + wxg + w.cross(&x) * s;
            let den = g2 - wxg_x + s * gx;
            checked_quotient(num, den)?
        }
        CaseClass::Parabolic => {
            let num = wxg * 2.0 - x * (g2 + w2) + g * (2.0 * gx) + w * (2.0 * wx);
            let den = (g2 + w2) - 2.0 * wxg_x;
            checked_quotient(num, den)?
        }
        CaseClass::Oscillatory => return Ok(Asymptote::Oscillatory),
    };
    Ok(Asymptote::Stationary(n))
}

/// Conjugates `G − iH` by a unit-determinant `S` and returns the invariants
/// `(C1', C2')` of the transformed generator.
pub fn sl2c_invariants_check(p: &QubitGeneratorParams, s: &ComplexMatrix) -> Result<(f64, f64)> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: s.dim(),
        });
    }
    let det = s.get(0, 0) * s.get(1, 1) - s.get(0, 1) * s.get(1, 0);
    if (det - 1.0).norm() > NumericPolicy::DEFAULT.unit_determinant_tol {
        return Err(Error::Precondition(format!("det S = {det} is not 1")));
    }
    let inv = ComplexMatrix::from_row_slice(2, &[s.get(1, 1), -s.get(0, 1), -s.get(1, 0), s.get(0, 0)])?;
    let m = &(s * &p.generator().nonhermitian_part()) * &inv;
    // M' = ½α'·σ (traceless), so α'_k = 2·(Pauli coordinate k).
    let (_, v) = pauli_coordinates(&m);
    let alpha: CVec3 = v.map(|z| z * 2.0);
    let g = Vec3::new(alpha[0].re, alpha[1].re, alpha[2].re);
    let w = Vec3::new(-alpha[0].im, -alpha[1].im, -alpha[2].im);
    Ok((g.dot(&w), g.norm_squared() - w.norm_squared()))
}

/// Parameters of the single-Lindblad qubit model:
/// `G = −κI + ½gσ₃`, `H = ½ωσ₃`, `L = ½l(σ₁ + iσ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleLindbladParams {
    pub kappa: f64,
    pub g: f64,
    pub omega: f64,
    pub l: f64,
}

impl SingleLindbladParams {
    pub fn new(kappa: f64, g: f64, omega: f64, l: f64) -> Result<Self> {
        if ![kappa, g, omega, l].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("single-Lindblad parameters"));
        }
        let p = Self { kappa, g, omega, l };
        let den = 2.0 * g - l * l;
        if den.abs() <= 1e-12 * (2.0 * g.abs() + l * l).max(f64::MIN_POSITIVE) {
            return Err(Error::Domain("2g = l² makes l̄ infinite".into()));
        }
        if g <= 0.0 && p.l_bar().abs() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("l̄ = {} outside [−1, 1] for g ≤ 0", p.l_bar())));
        }
        Ok(p)
    }

    /// `l̄ = (2g + l²)/(2g − l²)`.
    pub fn l_bar(&self) -> f64 {
        let l2 = self.l * self.l;
        (2.0 * self.g + l2) / (2.0 * self.g - l2)
    }

    /// `½l(σ₁ + iσ₂) = l|0⟩⟨1|`.
    pub fn lindblad(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2).into_dmatrix();
        m[(0, 1)] = Complex64::new(self.l, 0.0);
        ComplexMatrix::from_dmatrix(m).expect("finite")
    }

    pub fn generator(&self) -> Generator {
        let g = &ComplexMatrix::identity(2).scale_real(-self.kappa) + &pauli(3).scale_real(0.5 * self.g);
        Generator::new(pauli(3).scale_real(0.5 * self.omega), g, vec![self.lindblad()])
            .expect("single-Lindblad generator is valid")
    }

    /// Limit of `n₃` for `t → ∞`: 1 for `g > 0`, `−l̄` for `g < 0`.
    pub fn n3_limit(&self) -> f64 {
        if self.g > 0.0 {
            1.0
        } else {
            -self.l_bar()
        }
    }

    /// `φ(t) = (1 − e^{−2gt})/(2g)`, continuous at `g = 0` where it equals `t`.
    fn phi(&self, t: f64) -> f64 {
        let x = self.g * t;
        if x.abs() < 1e-8 {
            t * (1.0 - x)
        } else {
            -(-2.0 * x).exp_m1() / (2.0 * self.g)
        }
    }

    /// `sinh(gt)/g`, equal to `t` at `g = 0`.
    fn sinhc(&self, t: f64) -> f64 {
        let x = self.g * t;
        if x.abs() < 1e-8 {
            t * (1.0 + x * x / 6.0)
        } else {
            x.sinh() / self.g
        }
    }
}

/// Exact Bloch trajectory of the single-Lindblad model.
///
/// Written in terms of `φ(t) = (1 − e^{−2gt})/(2g)`, which is algebraically the
/// same as the `l̄` form but stays finite at `g = 0` and for `g < 0` at long times:
/// `D = 1 + ½(1−ξ₃)(l²−2g)φ`, `n₃ = [ξ₃ + ½(1−ξ₃)(l²+2g)φ]/D`,
/// `n₊ = ξ₊ e^{(iω−g)t}/D`.
pub fn single_lindblad_trajectory(p: &SingleLindbladParams, xi: &BlochVector, t: f64) -> Result<BlochVector> {
    let x = xi.vector();
    let l2 = p.l * p.l;
    let xi_plus = Complex64::new(x.x, x.y);
    let rotation = Complex64::from_polar(1.0, p.omega * t);
    let (n3, n_plus) = if p.g < 0.0 && -p.g * t > 20.0 {
        // Divide through by φ, which grows like e^{2|g|t}.
        let inv_phi = 2.0 * p.g / (-(-2.0 * p.g * t).exp_m1());
        let den = inv_phi + 0.5 * (1.0 - x.z) * (l2 - 2.0 * p.g);
        let n3 = (x.z * inv_phi + 0.5 * (1.0 - x.z) * (l2 + 2.0 * p.g)) / den;
        // e^{−gt}/φ = g/sinh(gt)
        let decay = p.g / (p.g * t).sinh();
        (n3, xi_plus * rotation * (decay / den))
    } else {
        let phi = p.phi(t);
        let den = 1.0 + 0.5 * (1.0 - x.z) * (l2 - 2.0 * p.g) * phi;
        let n3 = (x.z + 0.5 * (1.0 - x.z) * (l2 + 2.0 * p.g) * phi) / den;
        (n3, xi_plus * rotation * ((-p.g * t).exp() / den))
    };
    to_bloch(Vec3::new(n_plus.re, n_plus.im, n3))
}

/// Kraus pair of the single-Lindblad model:
/// `K₀ = e^{−κt} e^{½t(g−iω)σ₃}`, `K₁ = e^{−κt} l √(sinh(gt)/g) |0⟩⟨1|`.
pub fn single_lindblad_kraus(p: &SingleLindbladParams, t: f64) -> Result<KrausFamily> {
    if t < 0.0 {
        return Err(Error::Domain(format!("Kraus pair needs t ≥ 0, got {t}")));
    }
    let damp = (-p.kappa * t).exp();
    let z = Complex64::new(0.5 * p.g * t, -0.5 * p.omega * t);
    let k0 = ComplexMatrix::from_diagonal(&[z.exp() * damp, (-z).exp() * damp]);
    let k1 = p.lindblad().scale_real(damp * p.sinhc(t).sqrt());
    KrausFamily::new(vec![k0, k1], MapRegime::Evolution)
}

/// Effect operator `e^{−2κt} diag(e^{gt}, e^{−gt} + l² sinh(gt)/g)` of the pair above.
pub fn single_lindblad_effect(p: &SingleLindbladParams, t: f64) -> ComplexMatrix {
    let damp = (-2.0 * p.kappa * t).exp();
    let gt = p.g * t;
    ComplexMatrix::from_real_diagonal(&[
        damp * gt.exp(),
        damp * ((-gt).exp() + p.l * p.l * p.sinhc(t)),
    ])
}

/// Unit 3-vector from polar angle `theta` and azimuth `phi`.
pub fn spherical_unit(theta: f64, phi: f64) -> Vec3 {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}
