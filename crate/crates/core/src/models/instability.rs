//! Structural-instability locator and the time-dependent qubit scenario.
//!
//! A qubit generator changes character when `|g|` crosses `|ω|`: above it
//! trajectories settle quickly, below it they oscillate. With a slowly
//! decaying `g(t)` the crossing time `t_in` marks the switch, after which the
//! state keeps circling near the `H` eigenvector it was steered towards.

use crate::dynamics::{evolve, Generator, IntegratorConfig, TimeParameterizedGenerator, Trajectory};
use crate::error::{Error, Result};
use crate::qubit::{spherical_unit, QubitGeneratorParams};
use crate::state::{bloch_to_density, BlochVector, DensityMatrix};
use crate::Vec3;

/// Bisection root of `f` on `[lo, hi]` to absolute tolerance `tol`.
///
/// Fails with [`Error::NotFound`] when `f` has no sign change on the interval.
pub fn locate_crossing(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Domain(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NonFinite("crossing function"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotFound { lo, hi });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Where `|g(·)|` crosses `|ω|` on `[lo, hi]`, to tolerance `tol`.
pub fn instability_locator(g_magnitude: impl Fn(f64) -> f64, omega: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    locate_crossing(|t| g_magnitude(t).abs() - omega.abs(), lo, hi, tol)
}

/// Inverted Morse profile `g(t) = q[1 − (1 − e^{−νt})²]`, decaying from `q` to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseProfile {
    pub q: f64,
    pub nu: f64,
}

impl MorseProfile {
    pub fn new(q: f64, nu: f64) -> Result<Self> {
        if !(q.is_finite() && nu.is_finite() && nu > 0.0) {
            return Err(Error::Domain(format!("Morse profile needs finite q and ν > 0, got q = {q}, ν = {nu}")));
        }
        Ok(Self { q, nu })
    }

    pub fn value(&self, t: f64) -> f64 {
        let d = -(-self.nu * t).exp_m1();
        self.q * (1.0 - d * d)
    }

    /// Analytic crossing with level `w` (`0 < w < q`).
    pub fn crossing_time(&self, w: f64) -> Option<f64> {
        if !(w > 0.0 && w < self.q) {
            return None;
        }
        let e = 1.0 - (1.0 - w / self.q).sqrt();
        Some(-e.ln() / self.nu)
    }
}

/// Qubit with constant `ω` and damping `g(t) ĝ` following a [`MorseProfile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstabilityScenario {
    pub omega: Vec3,
    pub g_hat: Vec3,
    pub profile: MorseProfile,
}

impl InstabilityScenario {
    pub fn new(omega: Vec3, g_hat: Vec3, profile: MorseProfile) -> Result<Self> {
        let n = g_hat.norm();
        if !(n > 0.0) || !omega.iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("instability scenario needs finite ω and nonzero ĝ".into()));
        }
        Ok(Self {
            omega,
            g_hat: g_hat / n,
            profile,
        })
    }

    /// `|ω| = 0.003` along polar angle 2π/3, azimuth π/6; `ĝ` along polar
    /// angle 4π/3, azimuth 2π/3 (about 75° from `ω`); `q = 0.007`, `ν = 0.0005`.
    pub fn reference() -> Self {
        use std::f64::consts::PI;
        let dir = spherical_unit(2.0 * PI / 3.0, PI / 6.0);
        let g_hat = spherical_unit(4.0 * PI / 3.0, 2.0 * PI / 3.0);
        Self::new(dir * 0.003, g_hat, MorseProfile { q: 0.007, nu: 0.0005 }).expect("reference scenario is valid")
    }

    /// Unit eigen-direction `λ₊ = ω/|ω|`.
    pub fn lambda_plus(&self) -> Vec3 {
        self.omega.normalize()
    }

    pub fn params_at(&self, t: f64) -> QubitGeneratorParams {
        QubitGeneratorParams {
            omega: self.omega,
            g: self.g_hat * self.profile.value(t),
        }
    }

    pub fn generator(&self) -> TimeParameterizedGenerator {
        let me = *self;
        TimeParameterizedGenerator::varying(2, move |t| me.params_at(t).generator())
    }

    pub fn generator_at(&self, t: f64) -> Generator {
        self.params_at(t).generator()
    }

    /// `t_in` by bisection on `[0, hi]` to tolerance `tol`.
    pub fn instability_time(&self, hi: f64, tol: f64) -> Result<f64> {
        instability_locator(|t| self.profile.value(t), self.omega.norm(), 0.0, hi, tol)
    }

    pub fn evolve(&self, n0: &BlochVector, cfg: &IntegratorConfig) -> Result<Trajectory<DensityMatrix>> {
        evolve(&self.generator(), &bloch_to_density(n0), cfg)
    }
}

/// Mean Bloch vector over the samples of `traj` with `t ∈ [lo, hi]`.
pub fn mean_bloch_over(traj: &Trajectory<DensityMatrix>, lo: f64, hi: f64) -> Result<Vec3> {
    let mut sum = Vec3::zeros();
    let mut count = 0usize;
    for (t, rho) in traj.times().iter().zip(traj.states()) {
        if *t >= lo && *t <= hi {
            sum += rho.bloch()?.vector();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::NotFound { lo, hi });
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn test_bisection_examples() {
        let r = locate_crossing(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
        assert!(matches!(locate_crossing(|_| 1.0, 0.0, 1.0, 1e-3), Err(Error::NotFound { .. })));
        assert!(locate_crossing(|x| x, 1.0, 0.0, 1e-3).is_err());
    }

    #[test]
    fn test_reference_instability_time() {
        let s = InstabilityScenario::reference();
        assert_relative_eq!(s.lambda_plus(), Vec3::new(0.75, 0.4330127, -0.5), epsilon = 1e-6);
        let t = s.instability_time(20000.0, 1e-3).unwrap();
        assert_relative_eq!(t, s.profile.crossing_time(0.003).unwrap(), epsilon = 1e-3);
        assert!((t - 2821.0).abs() <= 1.0);
    }

    #[test]
    fn test_constant_g_has_no_crossing() {
        let r = instability_locator(|_| 0.5, 0.3, 0.0, 100.0, 1.0);
        assert!(matches!(r, Err(Error::NotFound { .. })));
    }

    #[test]
    fn test_profile_shape() {
        let p = MorseProfile::new(0.007, 0.0005).unwrap();
        assert_eq!(p.value(0.0), 0.007);
        assert!(p.value(1e6) < 1e-12);
        assert!(MorseProfile::new(1.0, 0.0).is_err());
    }

    #[test]
    fn test_reference_directions() {
        let s = InstabilityScenario::reference();
        assert_relative_eq!(s.g_hat, Vec3::new(0.4330127, -0.75, -0.5), epsilon = 1e-6);
        let angle = s.g_hat.dot(&s.lambda_plus()).acos().to_degrees();
        assert!((angle - 75.5).abs() < 0.1);
        let p = MorseProfile::new(1.0, 1.0).unwrap();
        assert!(InstabilityScenario::new(Vec3::z(), Vec3::zeros(), p).is_err());
    }
}
