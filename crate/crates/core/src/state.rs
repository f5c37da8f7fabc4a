//! Quantum state representations: density matrices, qubit Bloch vectors and
//! normalized state vectors.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_unchecked, pauli, pauli_dot, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::Vec3;

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` against the default policy.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_policy(m, &NumericPolicy::DEFAULT)
    }

    /// Validates `m` against an explicit policy. The stored matrix is the
    /// Hermitian part of `m`, so rounding noise in the anti-Hermitian part
    /// is discarded.
    pub fn with_policy(m: ComplexMatrix, policy: &NumericPolicy) -> Result<Self> {
        if !m.is_hermitian(policy.hermitian_tol) {
            return Err(Error::Validity(format!(
                "density matrix is not Hermitian (defect {:e})",
                m.hermiticity_defect()
            )));
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > policy.trace_tol {
            return Err(Error::Validity(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min = eig_hermitian_unchecked(&m).min();
        if min < -policy.positivity_tol {
            return Err(Error::Validity(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix: m })
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &StateVector) -> Self {
        psi.projector()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let m = self.matrix.as_dmatrix();
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `−Σ λ ln λ` (natural log) with `0 ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        eig_hermitian_unchecked(&self.matrix)
            .eigenvalues
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.ln())
            .sum()
    }

    /// Purity ≥ 1 − purity_tol.
    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - NumericPolicy::DEFAULT.purity_tol
    }

    /// Frobenius distance between two states.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.matrix.distance(&other.matrix)
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        density_to_bloch(self)
    }
}

/// Real 3-vector `n` with `|n| ≤ 1` parameterizing `ρ = ½(I + n·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(Vec3);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(Vec3::new(x, y, z))
    }

    pub fn from_vec(v: Vec3) -> Result<Self> {
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("Bloch vector"));
        }
        let n = v.norm();
        if n > 1.0 + NumericPolicy::DEFAULT.bloch_norm_tol {
            return Err(Error::Domain(format!("Bloch vector norm {n} exceeds 1")));
        }
        Ok(Self(v))
    }

    pub fn origin() -> Self {
        Self(Vec3::zeros())
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    /// Euclidean distance in ℝ³.
    pub fn distance(&self, other: &BlochVector) -> f64 {
        (self.0 - other.0).norm()
    }
}

/// `½(I + n·σ)`.
pub fn bloch_to_density(n: &BlochVector) -> DensityMatrix {
    let m = (&ComplexMatrix::identity(2) + &pauli_dot(&n.0)).scale_real(0.5);
    DensityMatrix { matrix: m }
}

/// `n_k = tr(ρ σ_k)`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let n = Vec3::new(
        (m * &pauli(1)).trace().re,
        (m * &pauli(2)).trace().re,
        (m * &pauli(3)).trace().re,
    );
    // Positivity tolerance on ρ allows |n| slightly above 1; keep the vector valid.
    let len = n.norm();
    if len > 1.0 {
        return BlochVector::from_vec(n / len);
    }
    BlochVector::from_vec(n)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.von_neumann_entropy()
}

pub fn is_pure(rho: &DensityMatrix) -> bool {
    rho.is_pure()
}

/// Unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<Complex64>);

impl StateVector {
    /// Validates unit norm (to `unit_norm_tol`).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        check_amplitudes(&v)?;
        let n = v.norm();
        if (n - 1.0).abs() > NumericPolicy::DEFAULT.unit_norm_tol {
            return Err(Error::Validity(format!("state vector norm {n} differs from 1")));
        }
        Ok(Self(v))
    }

    /// Divides the amplitudes by their norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        check_amplitudes(&v)?;
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::Validity("zero state vector".into()));
        }
        Ok(Self(v / Complex64::new(n, 0.0)))
    }

    /// Basis state `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    pub(crate) fn from_dvector_unchecked(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `|ψ⟩⟨ψ|` (divided by `⟨ψ|ψ⟩`, which is 1 up to rounding).
    pub fn projector(&self) -> DensityMatrix {
        let n2 = self.0.norm_squared();
        let m = &self.0 * self.0.adjoint() / Complex64::new(n2, 0.0);
        DensityMatrix {
            matrix: ComplexMatrix::wrap(m).hermitian_part(),
        }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Complex64 {
        (self.0.adjoint() * a.as_dmatrix() * &self.0)[(0, 0)]
    }

    /// Bloch vector `ψ†σψ` of a qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        density_to_bloch(&self.projector())
    }
}

fn check_amplitudes(v: &DVector<Complex64>) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Validity("empty state vector".into()));
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("state vector"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn test_bloch_to_density_examples() {
        let mixed = bloch_to_density(&BlochVector::origin());
        assert!(mixed.distance(&DensityMatrix::maximally_mixed(2)) < 1e-16);
        let up = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert!(up.matrix().distance(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-16);
        let plus = bloch_to_density(&BlochVector::new(1.0, 0.0, 0.0).unwrap());
        let half = c(0.5, 0.0);
        let expected = ComplexMatrix::from_row_slice(2, &[half, half, half, half]).unwrap();
        assert!(plus.matrix().distance(&expected) < 1e-16);
    }

    #[test]
    fn test_bloch_round_trip() {
        for v in [(0.0, 0.0, 0.0), (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.3, -0.4, 0.5)] {
            let n = BlochVector::new(v.0, v.1, v.2).unwrap();
            let back = density_to_bloch(&bloch_to_density(&n)).unwrap();
            assert!(back.distance(&n) < 1e-12);
        }
    }

    #[test]
    fn test_bloch_norm_domain_error() {
        assert!(matches!(BlochVector::new(1.5, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn test_density_to_bloch_needs_qubit() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(density_to_bloch(&rho), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn test_purity_and_entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_relative_eq!(mixed.purity(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(mixed.von_neumann_entropy(), LN_2, epsilon = 1e-15);
        assert!(!mixed.is_pure());
        let up = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
        assert_relative_eq!(up.purity(), 1.0, epsilon = 1e-15);
        assert_eq!(up.von_neumann_entropy(), 0.0);
        assert!(up.is_pure());
        let plateau = bloch_to_density(&BlochVector::new(0.0, 0.0, 0.724138).unwrap());
        assert_relative_eq!(plateau.von_neumann_entropy(), 0.40119, epsilon = 1e-5);
    }

    #[test]
    fn test_density_validation() {
        let not_unit = ComplexMatrix::from_real_diagonal(&[1.0, 1.0]);
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm =
            ComplexMatrix::from_row_slice(2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
                .unwrap();
        assert!(DensityMatrix::new(non_herm).is_err());
    }

    #[test]
    fn test_state_vector() {
        assert!(StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        let psi = StateVector::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_relative_eq!(psi.norm(), 1.0, epsilon = 1e-15);
        let n = psi.bloch().unwrap();
        assert!(n.distance(&BlochVector::new(0.0, 1.0, 0.0).unwrap()) < 1e-15);
        assert!(psi.projector().is_pure());
    }
}
