//! Spin of a massive Dirac particle in constant electromagnetic fields.
//!
//! The spin state is a 4×4 spinorial density matrix `Θ` built from a rest-frame
//! qubit `ρ(ξ)` with the boost intertwiner `v(p)` (Weyl representation). The
//! field enters as the block-diagonal generator `H + iG` whose upper block is
//! the qubit generator with `ω = −(e/m)B`, `g = (e/mc)E`. Momentum and the
//! polarization four-vector follow the linear BMT equations in proper time.
//!
//! Every function takes the rest energy scale as `mc` rather than separate
//! mass and light-speed arguments.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::{closed_form_propagate, Generator, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{pauli, pauli_dot, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::qubit::{bloch_trajectory_general, QubitGeneratorParams};
use crate::state::{bloch_to_density, BlochVector, DensityMatrix};
use crate::Vec3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Contravariant four-vector `(x⁰; x⃗)` with signature `(+,−,−,−)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub t: f64,
    pub x: Vec3,
}

impl FourVector {
    pub fn new(t: f64, x: Vec3) -> Result<Self> {
        if !t.is_finite() || !x.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("four-vector"));
        }
        Ok(Self { t, x })
    }

    /// On-shell momentum with spatial part `p⃗`: `p⁰ = √((mc)² + p⃗²)`.
    pub fn on_shell(p: Vec3, mc: f64) -> Self {
        Self {
            t: (mc * mc + p.norm_squared()).sqrt(),
            x: p,
        }
    }

    /// `a·b = a⁰b⁰ − a⃗·b⃗`.
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x.dot(&other.x)
    }

    /// `(x⁰)² + |x⃗|²`, the scale used for relative conservation checks.
    pub fn euclidean_norm_sq(&self) -> f64 {
        self.t * self.t + self.x.norm_squared()
    }
}

fn check_on_shell(p: &FourVector, mc: f64) -> Result<()> {
    if !(mc > 0.0) {
        return Err(Error::Domain(format!("mc must be positive, got {mc}")));
    }
    let defect = (p.dot(p) - mc * mc).abs() / p.euclidean_norm_sq();
    if !(defect <= NumericPolicy::DEFAULT.mass_shell_tol) || p.t <= 0.0 {
        return Err(Error::Precondition(format!("momentum off the mass shell (relative defect {defect:e})")));
    }
    Ok(())
}

fn from_blocks(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = a.get(i, j);
            m[(i, j + 2)] = b.get(i, j);
            m[(i + 2, j)] = c.get(i, j);
            m[(i + 2, j + 2)] = d.get(i, j);
        }
    }
    ComplexMatrix::from_dmatrix(m).expect("finite blocks")
}

/// Weyl-representation `[γ⁰, γ¹, γ², γ³, γ⁵]`:
/// `γ⁰ = [[0, I], [I, 0]]`, `γᵏ = [[0, σₖ], [−σₖ, 0]]`, `γ⁵ = diag(−I, I)`.
pub fn weyl_gammas() -> [ComplexMatrix; 5] {
    let id = pauli(0);
    let z = ComplexMatrix::zeros(2);
    let space = |k: usize| from_blocks(&z, &pauli(k), &(-&pauli(k)), &z);
    [
        from_blocks(&z, &id, &id, &z),
        space(1),
        space(2),
        space(3),
        from_blocks(&(-&id), &z, &z, &id),
    ]
}

/// `J^{μν} = (i/4)[γ^μ, γ^ν]`.
pub fn lorentz_generators() -> [[ComplexMatrix; 4]; 4] {
    let g = weyl_gammas();
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            let comm = &(&g[mu] * &g[nu]) - &(&g[nu] * &g[mu]);
            comm.scale(Complex64::new(0.0, 0.25))
        })
    })
}

/// Feynman slash `γ^μ a_μ = γ⁰a⁰ − γ⃗·a⃗`.
pub fn slash(a: &FourVector) -> ComplexMatrix {
    let g = weyl_gammas();
    let mut m = g[0].scale_real(a.t);
    for k in 0..3 {
        m = &m - &g[k + 1].scale_real(a.x[k]);
    }
    m
}

/// The 4×2 boost intertwiner `v(p)`, stored as its upper and lower 2×2 blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub upper: ComplexMatrix,
    pub lower: ComplexMatrix,
}

impl Intertwiner {
    /// `v ρ v†` (4×4).
    pub fn sandwich(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let (u, l) = (&self.upper, &self.lower);
        let (ud, ld) = (u.adjoint(), l.adjoint());
        from_blocks(&(&(u * rho) * &ud), &(&(u * rho) * &ld), &(&(l * rho) * &ud), &(&(l * rho) * &ld))
    }

    /// `v̄ Θ v = v†γ⁰Θ v` (2×2).
    pub fn bar_sandwich(&self, theta: &ComplexMatrix) -> ComplexMatrix {
        let (u, l) = (&self.upper, &self.lower);
        let (ud, ld) = (u.adjoint(), l.adjoint());
        let (tuu, tul) = (theta.block(0, 0, 2), theta.block(0, 2, 2));
        let (tlu, tll) = (theta.block(2, 0, 2), theta.block(2, 2, 2));
        let a = &(&ld * &tuu) * u;
        let b = &(&ld * &tul) * l;
        let c = &(&ud * &tlu) * u;
        let d = &(&ud * &tll) * l;
        &(&a + &b) + &(&c + &d)
    }
}

/// `v(p) = 1/(2√(1 + p⁰/mc)) [I + (p⁰ − p⃗·σ)/mc; I + (p⁰ + p⃗·σ)/mc]`.
pub fn boost_intertwiner(p: &FourVector, mc: f64) -> Result<Intertwiner> {
    check_on_shell(p, mc)?;
    let norm = 1.0 / (2.0 * (1.0 + p.t / mc).sqrt());
    let id = ComplexMatrix::identity(2).scale_real(1.0 + p.t / mc);
    let ps = pauli_dot(&(p.x / mc));
    Ok(Intertwiner {
        upper: (&id - &ps).scale_real(norm),
        lower: (&id + &ps).scale_real(norm),
    })
}

/// `w⁰ = ½p⃗·ξ`, `w⃗ = ½(mc ξ + p⃗(p⃗·ξ)/(p⁰ + mc))`.
pub fn polarization_fourvector(p: &FourVector, xi: &BlochVector, mc: f64) -> Result<FourVector> {
    check_on_shell(p, mc)?;
    let x = xi.vector();
    let px = p.x.dot(&x);
    Ok(FourVector {
        t: 0.5 * px,
        x: (x * mc + p.x * (px / (p.t + mc))) * 0.5,
    })
}

/// Inverse of [`polarization_fourvector`]: `ξ = (2/mc)(w⃗ − w⁰p⃗/(p⁰ + mc))`.
pub fn bloch_from_w(p: &FourVector, w: &FourVector, mc: f64) -> Result<BlochVector> {
    check_on_shell(p, mc)?;
    BlochVector::from_vec((w.x - p.x * (w.t / (p.t + mc))) * (2.0 / mc))
}

/// Spinorial density matrix `Θ`: Hermitian, unit trace, positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorDensity {
    matrix: ComplexMatrix,
}

impl SpinorDensity {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: m.dim(),
            });
        }
        let rho = DensityMatrix::new(m)?;
        Ok(Self {
            matrix: rho.into_matrix(),
        })
    }

    /// `Θ = (mc/p⁰) v(p) ρ(ξ) v(p)†`.
    pub fn from_bloch(p: &FourVector, xi: &BlochVector, mc: f64) -> Result<Self> {
        let v = boost_intertwiner(p, mc)?;
        let rho = bloch_to_density(xi);
        Self::new(v.sandwich(rho.matrix()).scale_real(mc / p.t))
    }

    /// `Θ = (mc/4p⁰)(I + p̸/mc)(I + 2γ⁵w̸/mc)γ⁰`.
    pub fn covariant(p: &FourVector, w: &FourVector, mc: f64) -> Result<Self> {
        check_on_shell(p, mc)?;
        let g = weyl_gammas();
        let id = ComplexMatrix::identity(4);
        let a = &id + &slash(p).scale_real(1.0 / mc);
        let b = &id + &(&g[4] * &slash(w)).scale_real(2.0 / mc);
        Self::new((&(&a * &b) * &g[0]).scale_real(mc / (4.0 * p.t)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::new(self.matrix.clone()).expect("validated at construction")
    }

    /// Rest-frame qubit `ρ = v̄(p) Θ v(p)` as a Bloch vector.
    pub fn bloch(&self, p: &FourVector, mc: f64) -> Result<BlochVector> {
        let v = boost_intertwiner(p, mc)?;
        DensityMatrix::new(v.bar_sandwich(&self.matrix))?.bloch()
    }

    /// Bloch vector of the normalized upper-left Weyl block.
    pub fn upper_block_bloch(&self) -> Result<BlochVector> {
        let b = self.matrix.block(0, 0, 2);
        let tr = b.trace().re;
        if !(tr > NumericPolicy::DEFAULT.singular_trace_cutoff) {
            return Err(Error::SingularNormalization { trace: tr });
        }
        DensityMatrix::new(b.scale_real(1.0 / tr))?.bloch()
    }
}

/// Constant fields `E`, `B` acting on a particle of charge `e` and mass `m`;
/// `c` is the speed of light in the same units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMFieldConfig {
    pub e_field: Vec3,
    pub b_field: Vec3,
    pub charge: f64,
    pub mass: f64,
    pub c: f64,
}

impl EMFieldConfig {
    pub fn new(e_field: Vec3, b_field: Vec3, charge: f64, mass: f64, c: f64) -> Result<Self> {
        let scalars = [charge, mass, c];
        if !e_field.iter().chain(b_field.iter()).chain(scalars.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("field configuration"));
        }
        if !(mass > 0.0 && c > 0.0) {
            return Err(Error::Domain("mass and c must be positive".into()));
        }
        Ok(Self {
            e_field,
            b_field,
            charge,
            mass,
            c,
        })
    }

    /// Units with `e = m = c = 1`.
    pub fn model_units(e_field: Vec3, b_field: Vec3) -> Result<Self> {
        Self::new(e_field, b_field, 1.0, 1.0, 1.0)
    }

    pub fn mc(&self) -> f64 {
        self.mass * self.c
    }

    /// `F⃗ = E⃗ + icB⃗`.
    pub fn riemann_silberstein(&self) -> [Complex64; 3] {
        std::array::from_fn(|k| Complex64::new(self.e_field[k], self.c * self.b_field[k]))
    }

    /// Bohr magneton `eħ/2m` for a given `ħ`.
    pub fn bohr_magneton(&self, hbar: f64) -> f64 {
        self.charge * hbar / (2.0 * self.mass)
    }

    /// Qubit vectors of the upper block: `ω = −(e/m)B`, `g = (e/mc)E`.
    pub fn qubit_params(&self) -> QubitGeneratorParams {
        QubitGeneratorParams {
            omega: self.b_field * (-self.charge / self.mass),
            g: self.e_field * (self.charge / self.mc()),
        }
    }
}

/// `H = −(e/2m) diag(B⃗·σ, B⃗·σ)`, `G = (e/2mc) diag(E⃗·σ, −E⃗·σ)`.
pub fn em_spin_generator(f: &EMFieldConfig) -> Generator {
    let z = ComplexMatrix::zeros(2);
    let b = pauli_dot(&(f.b_field * (-f.charge / (2.0 * f.mass))));
    let e = pauli_dot(&(f.e_field * (f.charge / (2.0 * f.mc()))));
    let h = from_blocks(&b, &z, &z, &b);
    let g = from_blocks(&e, &z, &z, &(-&e));
    Generator::without_lindblads(h, g).expect("block Pauli generators are Hermitian")
}

/// `Θ(τ) = KΘ₀K†/tr(KΘ₀K†)` with the field generator.
pub fn spinor_propagate(f: &EMFieldConfig, theta0: &SpinorDensity, tau: f64) -> Result<SpinorDensity> {
    let out = closed_form_propagate(&em_spin_generator(f), &theta0.to_density(), tau)?;
    SpinorDensity::new(out.into_matrix())
}

/// One sample of a BMT run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmtState {
    pub p: FourVector,
    pub w: FourVector,
    /// Spin Bloch vector from the qubit closed form.
    pub xi: BlochVector,
    /// Laboratory time `t(τ)`.
    pub lab_time: f64,
}

/// Trajectory over proper time plus the largest relative conservation
/// defects seen at any step: `[p·p − (mc)², p·w, w·w + (mc/2)²ξ₀²]`.
#[derive(Debug, Clone)]
pub struct BmtRun {
    pub trajectory: Trajectory<BmtState>,
    pub max_drift: [f64; 3],
}

/// Tolerance on the relative conservation defects of [`bmt_evolve`].
pub const BMT_DRIFT_TOL: f64 = 1e-6;

fn lorentz_force(f: &EMFieldConfig, u: &FourVector) -> FourVector {
    let k = f.charge / f.mass;
    FourVector {
        t: k / f.c * f.e_field.dot(&u.x),
        x: (f.e_field * (u.t / f.c) + u.x.cross(&f.b_field)) * k,
    }
}

type BmtVec = (FourVector, FourVector, f64);

fn bmt_rhs(f: &EMFieldConfig, s: &BmtVec) -> BmtVec {
    (lorentz_force(f, &s.0), lorentz_force(f, &s.1), s.0.t / f.mc())
}

fn bmt_axpy(s: &BmtVec, h: f64, k: &BmtVec) -> BmtVec {
    let add = |a: &FourVector, b: &FourVector| FourVector {
        t: a.t + h * b.t,
        x: a.x + b.x * h,
    };
    (add(&s.0, &k.0), add(&s.1, &k.1), s.2 + h * k.2)
}

fn drifts(p: &FourVector, w: &FourVector, mc: f64, xi0_sq: f64) -> [f64; 3] {
    let sp = p.euclidean_norm_sq();
    let sw = w.euclidean_norm_sq();
    let pp = (p.dot(p) - mc * mc).abs() / sp;
    let pw = if sw > 0.0 { p.dot(w).abs() / (sp * sw).sqrt() } else { 0.0 };
    let ww = if sw > 0.0 {
        (w.dot(w) + 0.25 * mc * mc * xi0_sq).abs() / sw
    } else {
        0.0
    };
    [pp, pw, ww]
}

/// RK4 on the BMT equations for `p`, `w` and lab time over `τ ∈ [0, tau_end]`,
/// sampled every `stride` steps. The spin `ξ(τ)` at each sample comes from the
/// qubit closed form with [`EMFieldConfig::qubit_params`]. Adds derived series
/// `pp_drift`, `pw_drift`, `ww_drift`.
pub fn bmt_evolve(
    f: &EMFieldConfig,
    p0: &FourVector,
    xi0: &BlochVector,
    tau_end: f64,
    step: f64,
    stride: usize,
) -> Result<BmtRun> {
    let mc = f.mc();
    check_on_shell(p0, mc)?;
    if !(step > 0.0 && step.is_finite()) || !(tau_end >= 0.0 && tau_end.is_finite()) {
        return Err(Error::Domain(format!("bad step {step} or end {tau_end}")));
    }
    let stride = stride.max(1);
    let qp = f.qubit_params();
    let xi0_sq = xi0.norm() * xi0.norm();
    let n = (tau_end / step).ceil() as usize;
    let h = if n > 0 { tau_end / n as f64 } else { 0.0 };
    let mut s: BmtVec = (*p0, polarization_fourvector(p0, xi0, mc)?, 0.0);
    let mut traj = Trajectory::new();
    let mut series: [Vec<f64>; 3] = Default::default();
    let mut max_drift = [0.0f64; 3];
    let mut record = |tau: f64, s: &BmtVec, d: [f64; 3]| -> Result<()> {
        let xi = bloch_trajectory_general(&qp, xi0, tau)?;
        traj.push(
            tau,
            BmtState {
                p: s.0,
                w: s.1,
                xi,
                lab_time: s.2,
            },
        )?;
        for k in 0..3 {
            series[k].push(d[k]);
        }
        Ok(())
    };
    record(0.0, &s, drifts(&s.0, &s.1, mc, xi0_sq))?;
    for i in 0..n {
        let k1 = bmt_rhs(f, &s);
        let k2 = bmt_rhs(f, &bmt_axpy(&s, 0.5 * h, &k1));
        let k3 = bmt_rhs(f, &bmt_axpy(&s, 0.5 * h, &k2));
        let k4 = bmt_rhs(f, &bmt_axpy(&s, h, &k3));
        s = bmt_axpy(&s, h / 6.0, &k1);
        s = bmt_axpy(&s, h / 3.0, &k2);
        s = bmt_axpy(&s, h / 3.0, &k3);
        s = bmt_axpy(&s, h / 6.0, &k4);
        let tau = if i + 1 == n { tau_end } else { (i + 1) as f64 * h };
        let d = drifts(&s.0, &s.1, mc, xi0_sq);
        for k in 0..3 {
            max_drift[k] = max_drift[k].max(d[k]);
        }
        if !d.iter().all(|x| *x <= BMT_DRIFT_TOL) {
            return Err(Error::IntegrationDiverged {
                time: tau,
                reason: format!("conservation drift {d:?} exceeds {BMT_DRIFT_TOL:e}"),
            });
        }
        if (i + 1) % stride == 0 || i + 1 == n {
            record(tau, &s, d)?;
        }
    }
    let [a, b, c] = series;
    traj.insert_series("pp_drift", a)?;
    traj.insert_series("pw_drift", b)?;
    traj.insert_series("ww_drift", c)?;
    Ok(BmtRun {
        trajectory: traj,
        max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball(rng: &mut ChaCha8Rng) -> BlochVector {
        loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() <= 1.0 {
                return BlochVector::from_vec(v).unwrap();
            }
        }
    }

    fn random_momentum(rng: &mut ChaCha8Rng, mc: f64) -> FourVector {
        let p = Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        FourVector::on_shell(p, mc)
    }

    #[test]
    fn test_clifford_relations() {
        let g = weyl_gammas();
        let eta = [1.0, -1.0, -1.0, -1.0];
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = &(&g[mu] * &g[nu]) + &(&g[nu] * &g[mu]);
                let expected = if mu == nu {
                    ComplexMatrix::identity(4).scale_real(2.0 * eta[mu])
                } else {
                    ComplexMatrix::zeros(4)
                };
                assert!(anti.distance(&expected) < 1e-15);
            }
        }
        let g5 = (&(&(&g[0] * &g[1]) * &g[2]) * &g[3]).scale(Complex64::new(0.0, 1.0));
        assert!(g5.distance(&g[4]) < 1e-15);
        let j = lorentz_generators();
        assert!(j[1][1].frobenius_norm() < 1e-16);
        assert!(j[1][2].distance(&j[2][1].scale_real(-1.0)) < 1e-16);
    }

    #[test]
    fn test_rest_frame_intertwiner() {
        let p = FourVector::on_shell(Vec3::zeros(), 1.0);
        let v = boost_intertwiner(&p, 1.0).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(1.0 / 2f64.sqrt());
        assert!(v.upper.distance(&half) < 1e-15);
        assert!(v.lower.distance(&half) < 1e-15);
        assert!(boost_intertwiner(&FourVector::new(1.0, Vec3::x()).unwrap(), 1.0).is_err());
    }

    #[test]
    fn test_spinor_density_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mc = rng.gen_range(0.5..2.0);
            let p = random_momentum(&mut rng, mc);
            let xi = random_ball(&mut rng);
            let theta = SpinorDensity::from_bloch(&p, &xi, mc).unwrap();
            assert_relative_eq!(theta.matrix().trace().re, 1.0, epsilon = 1e-12);
            assert!(theta.bloch(&p, mc).unwrap().distance(&xi) < 1e-12);
            let w = polarization_fourvector(&p, &xi, mc).unwrap();
            let cov = SpinorDensity::covariant(&p, &w, mc).unwrap();
            assert!(cov.matrix().distance(theta.matrix()) < 1e-12);
        }
    }

    #[test]
    fn test_polarization_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let mc = rng.gen_range(0.5..2.0);
            let p = random_momentum(&mut rng, mc);
            let xi = random_ball(&mut rng);
            let w = polarization_fourvector(&p, &xi, mc).unwrap();
            assert!(p.dot(&w).abs() < 1e-12 * p.euclidean_norm_sq());
            let target = -0.25 * mc * mc * xi.norm() * xi.norm();
            assert!((w.dot(&w) - target).abs() < 1e-12 * w.euclidean_norm_sq().max(1.0));
            assert!(bloch_from_w(&p, &w, mc).unwrap().distance(&xi) < 1e-12);
        }
        let rest = FourVector::on_shell(Vec3::zeros(), 2.0);
        let xi = BlochVector::new(0.0, 0.6, 0.8).unwrap();
        let w = polarization_fourvector(&rest, &xi, 2.0).unwrap();
        assert_eq!(w.t, 0.0);
        assert!((w.x - xi.vector()).norm() < 1e-15);
    }

    #[test]
    fn test_em_generator_examples() {
        let f = EMFieldConfig::model_units(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.1)).unwrap();
        assert_eq!(em_spin_generator(&f).damping().frobenius_norm(), 0.0);

        let par = EMFieldConfig::model_units(Vec3::new(0.0, 0.0, 0.3), Vec3::new(0.0, 0.0, 0.1)).unwrap();
        let gen = em_spin_generator(&par);
        let comm = &(gen.hamiltonian() * gen.damping()) - &(gen.damping() * gen.hamiltonian());
        assert!(comm.frobenius_norm() < 1e-16);
        let rs = par.riemann_silberstein();
        assert_eq!(rs[2], Complex64::new(0.3, 0.1));
    }

    #[test]
    fn test_spinor_pipeline_matches_qubit_closed_form() {
        let f = EMFieldConfig::model_units(Vec3::new(0.02, 0.0, 0.01), Vec3::new(0.05, 0.0, 0.087)).unwrap();
        let rest = FourVector::on_shell(Vec3::zeros(), 1.0);
        let xi = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let theta0 = SpinorDensity::from_bloch(&rest, &xi, 1.0).unwrap();
        for tau in [1.0, 20.0, 300.0] {
            let theta = spinor_propagate(&f, &theta0, tau).unwrap();
            let a = theta.upper_block_bloch().unwrap();
            let b = bloch_trajectory_general(&f.qubit_params(), &xi, tau).unwrap();
            assert!(a.distance(&b) < 1e-8, "τ = {tau}");
        }
    }

    #[test]
    fn test_cyclotron_motion() {
        let b = 0.5;
        let f = EMFieldConfig::model_units(Vec3::zeros(), Vec3::new(0.0, 0.0, b)).unwrap();
        let p0 = FourVector::on_shell(Vec3::new(0.8, 0.0, 0.0), 1.0);
        let xi = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let period = 2.0 * std::f64::consts::PI / b;
        let run = bmt_evolve(&f, &p0, &xi, period, 1e-3, 1_000_000).unwrap();
        let (_, last) = run.trajectory.last().unwrap();
        assert!((last.p.x - p0.x).norm() < 1e-9);
        assert_relative_eq!(last.lab_time, period * p0.t, epsilon = 1e-9);
        assert!(run.max_drift.iter().all(|d| *d < 1e-12));
    }

    #[test]
    fn test_bmt_rejects_coarse_steps() {
        let f = EMFieldConfig::model_units(Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.0, 0.0, 3.0)).unwrap();
        let p0 = FourVector::on_shell(Vec3::new(0.8, 0.0, 0.0), 1.0);
        let xi = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let r = bmt_evolve(&f, &p0, &xi, 50.0, 0.5, 1);
        assert!(matches!(r, Err(Error::IntegrationDiverged { .. })));
    }
}
