//! Dense complex linear algebra for small square matrices.
//!
//! [`ComplexMatrix`] wraps an `nalgebra` dynamic matrix and guarantees a
//! square shape with finite entries at construction. Arithmetic operators
//! panic on dimension mismatch (as `nalgebra` does); the fallible free
//! functions in this module report mismatches as [`Error::DimensionMismatch`].

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;
use crate::Vec3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps an `nalgebra` matrix after checking shape and finiteness.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Validity("matrix dimension must be positive".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self(m))
    }

    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds a matrix from nested rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut flat = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_row_slice(dim, &flat)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO }))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diagonal(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        let (na, nb) = (a.dim(), b.dim());
        let mut m = DMatrix::zeros(na + nb, na + nb);
        m.view_mut((0, 0), (na, na)).copy_from(&a.0);
        m.view_mut((na, na), (nb, nb)).copy_from(&b.0);
        Self(m)
    }

    /// Unchecked internal constructor; callers guarantee shape and finiteness.
    pub(crate) fn wrap(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// Copies the `size × size` block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> ComplexMatrix {
        Self(self.0.view((row, col), (size, size)).into_owned())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(&self.0 * Complex64::new(s, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖M − M†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Relative Hermiticity test `‖M − M†‖_F ≤ tol·‖M‖_F`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let defect = self.hermiticity_defect();
        defect == 0.0 || defect <= tol * self.frobenius_norm()
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Frobenius distance `‖A − B‖_F`.
    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    /// Matrix product with dimension checking.
    pub fn try_mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_same_dim(self, other)?;
        Ok(self * other)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

fn check_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// `AB + BA`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a, b)?;
    Ok(&(a * b) + &(b * a))
}

/// Pauli matrix σ_k for k ∈ {1, 2, 3}; k = 0 gives the identity.
pub fn pauli(k: usize) -> ComplexMatrix {
    let entries = match k {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {k} out of range 0..=3"),
    };
    ComplexMatrix(DMatrix::from_row_slice(2, 2, &entries))
}

/// `v·σ` for a real vector.
pub fn pauli_dot(v: &Vec3) -> ComplexMatrix {
    pauli_dot_complex(&[v.x.into(), v.y.into(), v.z.into()])
}

/// `v·σ` for a complex vector.
pub fn pauli_dot_complex(v: &[Complex64; 3]) -> ComplexMatrix {
    let [x, y, z] = *v;
    ComplexMatrix(DMatrix::from_row_slice(
        2,
        2,
        &[z, x - I * y, x + I * y, -z],
    ))
}

/// Pauli coordinates of a 2×2 matrix: `M = c I + v·σ` with
/// `c = tr(M)/2`, `v_k = tr(M σ_k)/2`.
pub fn pauli_coordinates(m: &ComplexMatrix) -> (Complex64, [Complex64; 3]) {
    assert_eq!(m.dim(), 2, "pauli_coordinates needs a 2x2 matrix");
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let half = 0.5;
    (
        (a + d) * half,
        [(b + c) * half, (b - c) * I * half, (a - d) * half],
    )
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSpectrum {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the same order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// `U diag(λ) U†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let d = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        &(u * &d) * &u.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    if !m.is_hermitian(NumericPolicy::DEFAULT.hermitian_tol) {
        return Err(Error::Validity(format!(
            "matrix is not Hermitian (defect {:e})",
            m.hermiticity_defect()
        )));
    }
    Ok(eig_hermitian_unchecked(m))
}

/// Eigen-decomposition of the Hermitian part, skipping the Hermiticity check.
pub(crate) fn eig_hermitian_unchecked(m: &ComplexMatrix) -> HermitianSpectrum {
    let n = m.dim();
    if n == 2 {
        return eig_hermitian_2x2(m);
    }
    let h = m.hermitian_part();
    let eig = nalgebra::SymmetricEigen::new(h.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianSpectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix(vectors),
    }
}

/// Closed-form spectrum of a 2×2 Hermitian matrix `cI + v·σ`: `c ± |v|`.
fn eig_hermitian_2x2(m: &ComplexMatrix) -> HermitianSpectrum {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;
    let c = 0.5 * (a + d);
    let z = 0.5 * (a - d);
    let r = (z * z + b.norm_sqr()).sqrt();
    let eigenvalues = vec![c - r, c + r];
    if r == 0.0 {
        return HermitianSpectrum {
            eigenvalues,
            eigenvectors: ComplexMatrix::identity(2),
        };
    }
    // Upper eigenvector of [[z, b],[b*, -z]] for eigenvalue r, built from
    // whichever column of (M - λI) is better conditioned.
    let upper = if z >= 0.0 {
        normalize2(Complex64::new(z + r, 0.0), b.conj())
    } else {
        normalize2(b, Complex64::new(r - z, 0.0))
    };
    // Orthogonal complement for the lower eigenvalue.
    let lower = (-upper.1.conj(), upper.0.conj());
    let vectors = DMatrix::from_row_slice(2, 2, &[lower.0, upper.0, lower.1, upper.1]);
    HermitianSpectrum {
        eigenvalues,
        eigenvectors: ComplexMatrix(vectors),
    }
}

fn normalize2(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
    (x / n, y / n)
}

/// Largest eigenvalue of the Hermitian part of `m`, the exponential growth
/// rate of `exp(m)`. Uses the cheap Frobenius bound when it is conclusive.
fn growth_exponent(m: &ComplexMatrix, cap: f64) -> f64 {
    let h = m.hermitian_part();
    let bound = h.frobenius_norm();
    if bound <= cap {
        return bound.min(cap);
    }
    eig_hermitian_unchecked(&h).max()
}

/// `exp(M)`.
///
/// Dimension 2 uses the closed Pauli form; larger dimensions use Padé-13
/// scaling and squaring. Fails with [`Error::Overflow`] when the growth
/// exponent of `M` exceeds the policy cap.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let cap = NumericPolicy::DEFAULT.exponent_cap;
    let growth = growth_exponent(m, cap);
    if growth > cap {
        return Err(Error::Overflow { growth, cap });
    }
    let out = if m.dim() == 2 {
        expm_pauli(m)
    } else {
        expm_pade(m)?
    };
    if !out.is_finite() {
        return Err(Error::NonFinite("matrix exponential"));
    }
    Ok(out)
}

/// `exp(M)` up to a positive scalar, returned with unit Frobenius norm.
///
/// Never overflows, so it suits maps that are homogeneous in the propagator
/// (normalized Kraus maps, Bloch vectors).
pub fn projective_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(log_scaled_exponential(m)?.0)
}

/// `exp(M) = e^s E` with `‖E‖_F = 1`, returned as `(E, s)`.
///
/// Exponentiates `M/2^k` with `‖M/2^k‖₁ ≤ 1` and squares `k` times,
/// moving the norm of every square into `s`.
pub fn log_scaled_exponential(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let norm = m.one_norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite("scaled exponential"));
    }
    let k = if norm > 1.0 { norm.log2().ceil() as i32 } else { 0 };
    let small = m.scale_real(0.5f64.powi(k));
    let mut e = if m.dim() == 2 { expm_pauli(&small) } else { expm_pade(&small)? };
    let f = e.frobenius_norm();
    let mut log_scale = f.ln();
    e = e.scale_real(1.0 / f);
    for _ in 0..k {
        e = &e * &e;
        let f = e.frobenius_norm();
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::NonFinite("scaled exponential"));
        }
        log_scale = 2.0 * log_scale + f.ln();
        e = e.scale_real(1.0 / f);
    }
    Ok((e, log_scale))
}

/// `e^c (cosh s I + sinh(s)/s v·σ)` with `s² = v·v`, for a 2×2 `M = cI + v·σ`.
pub fn expm_pauli(m: &ComplexMatrix) -> ComplexMatrix {
    let (c, v) = pauli_coordinates(m);
    let s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let (ch, sh_over_s) = cosh_sinhc(s2, NumericPolicy::DEFAULT.alpha_sq_series_cutoff);
    let ec = c.exp();
    let vs = pauli_dot_complex(&v);
    let mut out = vs.scale(ec * sh_over_s);
    out.0[(0, 0)] += ec * ch;
    out.0[(1, 1)] += ec * ch;
    out
}

/// `(cosh s, sinh(s)/s)` as functions of `s²`, both even in `s` so the
/// branch of the square root is irrelevant. Two-term series near zero.
pub fn cosh_sinhc(s2: Complex64, cutoff: f64) -> (Complex64, Complex64) {
    if s2.norm() < cutoff {
        return (ONE + s2 * 0.5, ONE + s2 / 6.0);
    }
    let s = s2.sqrt();
    (s.cosh(), s.sinh() / s)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Padé-13 scaling-and-squaring exponential valid for any dimension.
pub fn expm_pade(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.dim();
    let norm = m.one_norm();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = &m.0 * Complex64::new(2f64.powi(-s), 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9))
        + &a6 * b(7)
        + &a4 * b(5)
        + &a2 * b(3)
        + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8))
        + &a6 * b(6)
        + &a4 * b(4)
        + &a2 * b(2)
        + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Validity("Padé denominator is singular".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(ComplexMatrix(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, FRAC_PI_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn test_rejects_non_square_and_non_finite() {
        let m = DMatrix::from_element(2, 3, ONE);
        assert!(matches!(
            ComplexMatrix::from_dmatrix(m),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let bad = ComplexMatrix::from_row_slice(1, &[c(f64::NAN, 0.0)]);
        assert!(matches!(bad, Err(Error::NonFinite(_))));
    }

    #[test]
    fn test_exp_of_zero_is_identity() {
        for n in [2, 3, 5] {
            let e = matrix_exponential(&ComplexMatrix::zeros(n)).unwrap();
            assert!(e.distance(&ComplexMatrix::identity(n)) < 1e-15);
        }
    }

    #[test]
    fn test_exp_euler_formula_for_pauli() {
        let m = pauli(1).scale(c(0.0, FRAC_PI_2));
        let e = matrix_exponential(&m).unwrap();
        assert!(e.distance(&pauli(1).scale(I)) < 1e-15);
    }

    #[test]
    fn test_exp_diagonal() {
        let e = matrix_exponential(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert_relative_eq!(e.get(0, 0).re, E, epsilon = 1e-15);
        assert_relative_eq!(e.get(1, 1).re, 1.0 / E, epsilon = 1e-15);
        let e3 = expm_pade(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 2.0])).unwrap();
        assert_relative_eq!(e3.get(2, 2).re, 2f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn test_pade_agrees_with_pauli_form() {
        let m = ComplexMatrix::from_row_slice(2, &[c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 1.1), c(-0.4, 3.0)])
            .unwrap();
        let a = expm_pauli(&m);
        let b = expm_pade(&m).unwrap();
        assert!(a.distance(&b) < 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn test_commutator_examples() {
        let c12 = commutator(&pauli(1), &pauli(2)).unwrap();
        assert!(c12.distance(&pauli(3).scale(c(0.0, 2.0))) < 1e-15);
        let a11 = anticommutator(&pauli(1), &pauli(1)).unwrap();
        assert!(a11.distance(&ComplexMatrix::identity(2).scale_real(2.0)) < 1e-15);
        let m = ComplexMatrix::from_row_slice(2, &[c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0), c(5.0, 5.0)])
            .unwrap();
        assert!(commutator(&ComplexMatrix::identity(2), &m).unwrap().frobenius_norm() < 1e-15);
        assert!(matches!(
            commutator(&pauli(1), &ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn test_eig_examples() {
        let s = eig_hermitian(&pauli(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        let h = eig_hermitian(&ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        assert_eq!(h.eigenvalues, vec![0.5, 0.5]);
        let rho = (&ComplexMatrix::identity(2) + &pauli(3).scale_real(0.7241)).scale_real(0.5);
        let r = eig_hermitian(&rho).unwrap();
        assert_relative_eq!(r.eigenvalues[0], 0.13795, epsilon = 1e-12);
        assert_relative_eq!(r.eigenvalues[1], 0.86205, epsilon = 1e-12);
    }

    #[test]
    fn test_eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, &[ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::Validity(_))));
    }

    #[test]
    fn test_eig_reconstructs_larger_matrix() {
        let mut entries = vec![ZERO; 16];
        for i in 0..4 {
            for j in 0..4 {
                entries[4 * i + j] = c((i + j) as f64, i as f64 - j as f64);
            }
        }
        let m = ComplexMatrix::from_row_slice(4, &entries).unwrap();
        let s = eig_hermitian(&m).unwrap();
        assert!(s.reconstruct().distance(&m) < 1e-12 * m.frobenius_norm());
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn test_overflow_cap() {
        let m = pauli(3).scale_real(800.0);
        assert!(matches!(matrix_exponential(&m), Err(Error::Overflow { .. })));
        // Large anti-Hermitian exponents are bounded and accepted.
        let u = pauli(3).scale(c(0.0, 5000.0));
        assert!(matrix_exponential(&u).is_ok());
    }

    #[test]
    fn test_pauli_coordinates_round_trip() {
        let v = [c(0.1, 0.2), c(-1.0, 0.4), c(0.0, -2.0)];
        let m = &pauli_dot_complex(&v) + &ComplexMatrix::identity(2).scale(c(0.3, 0.3));
        let (c0, w) = pauli_coordinates(&m);
        assert!((c0 - c(0.3, 0.3)).norm() < 1e-15);
        for k in 0..3 {
            assert!((w[k] - v[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn test_log_scaled_exponential_matches_direct() {
        let m = ComplexMatrix::from_row_slice(
            3,
            &[
                Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.5), Complex64::new(0.0, 0.1),
                Complex64::new(1.0, 0.0), Complex64::new(0.2, -0.4), Complex64::new(3.0, 0.0),
                Complex64::new(0.0, -1.0), Complex64::new(0.5, 0.5), Complex64::new(-1.0, 0.0),
            ],
        )
        .unwrap();
        let direct = matrix_exponential(&m).unwrap();
        let (e, s) = log_scaled_exponential(&m).unwrap();
        assert!(e.scale_real(s.exp()).distance(&direct) < 1e-11 * direct.frobenius_norm());
        let (_, s_far) = log_scaled_exponential(&m.scale_real(1e4)).unwrap();
        assert!(s_far.is_finite() && s_far > 700.0);
    }
}
