//! Kraus maps and their normalized, convex quasi-linear companions.
//!
//! A [`KrausFamily`] `{K_α}` defines the linear map `φ(ρ) = Σ K_α ρ K_α†`,
//! which need not preserve the trace. The normalized map
//! `Φ(ρ) = φ(ρ)/tr φ(ρ)` sends convex mixtures to convex mixtures with
//! reweighted coefficients `p̄ᵢ = pᵢ tr(Fρᵢ)/tr(Fρ)`, where
//! `F = Σ K_α†K_α` is the effect operator.

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian_unchecked, ComplexMatrix};
use crate::policy::NumericPolicy;
use crate::state::DensityMatrix;

/// Which validity regime a family is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapRegime {
    /// A quantum operation: `F ≤ I` is enforced.
    QuantumOperation,
    /// An evolution family, where `F` may grow without bound.
    Evolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    operators: Vec<ComplexMatrix>,
    regime: MapRegime,
}

impl KrausFamily {
    pub fn new(operators: Vec<ComplexMatrix>, regime: MapRegime) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::Validity("a Kraus family needs at least one operator".into()));
        };
        let dim = first.dim();
        if let Some(bad) = operators.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if operators.len() > dim * dim {
            log::warn!(
                "Kraus family has {} operators, more than dim² = {}",
                operators.len(),
                dim * dim
            );
        }
        let family = Self { operators, regime };
        if regime == MapRegime::QuantumOperation {
            let top = eig_hermitian_unchecked(&family.effect_operator()).max();
            if top > 1.0 + NumericPolicy::DEFAULT.hermitian_tol {
                return Err(Error::Validity(format!(
                    "quantum operation has effect operator eigenvalue {top} > 1"
                )));
            }
        }
        Ok(family)
    }

    /// Single-operator evolution family `{K}`.
    pub fn single(k: ComplexMatrix) -> Self {
        Self {
            operators: vec![k],
            regime: MapRegime::Evolution,
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn regime(&self) -> MapRegime {
        self.regime
    }

    pub fn dim(&self) -> usize {
        self.operators[0].dim()
    }

    /// `F = Σ K_α†K_α`.
    pub fn effect_operator(&self) -> ComplexMatrix {
        let mut f = ComplexMatrix::zeros(self.dim());
        for k in &self.operators {
            f = &f + &(&k.adjoint() * k);
        }
        f.hermitian_part()
    }

    /// `F = I` within the default Hermiticity tolerance.
    pub fn is_trace_preserving(&self) -> bool {
        self.effect_operator()
            .distance(&ComplexMatrix::identity(self.dim()))
            <= 1e-10
    }

    fn check_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }

    /// `φ(ρ) = Σ K_α ρ K_α†`.
    pub fn apply_raw(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho)?;
        Ok(self.apply_raw_matrix(rho.matrix()))
    }

    pub(crate) fn apply_raw_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for k in &self.operators {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        out.hermitian_part()
    }

    /// `Φ(ρ) = φ(ρ)/tr φ(ρ)`.
    pub fn apply_normalized(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let raw = self.apply_raw(rho)?;
        normalize(raw)
    }

    /// `tr(Fρ)`.
    pub fn weight(&self, rho: &DensityMatrix) -> Result<f64> {
        self.check_dim(rho)?;
        Ok((&self.effect_operator() * rho.matrix()).trace().re)
    }

    /// Family `{K1_α K2_β}`: applying it equals applying `other` then `self`.
    pub fn compose(&self, other: &KrausFamily) -> Result<KrausFamily> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let mut ops = Vec::with_capacity(self.operators.len() * other.operators.len());
        for a in &self.operators {
            for b in &other.operators {
                ops.push(a * b);
            }
        }
        let regime = match (self.regime, other.regime) {
            (MapRegime::QuantumOperation, MapRegime::QuantumOperation) => {
                MapRegime::QuantumOperation
            }
            _ => MapRegime::Evolution,
        };
        Ok(KrausFamily {
            operators: ops,
            regime,
        })
    }

    /// `p̄ᵢ = pᵢ tr(Fρᵢ)/tr(Fρ_mix)`.
    pub fn ensemble_coefficient(&self, split: &EnsembleSplit, i: usize) -> Result<f64> {
        if i >= split.len() {
            return Err(Error::Domain(format!(
                "ensemble index {i} out of range 0..{}",
                split.len()
            )));
        }
        Ok(self.ensemble_coefficients(split)?[i])
    }

    /// All coefficients `p̄ᵢ` of a split.
    pub fn ensemble_coefficients(&self, split: &EnsembleSplit) -> Result<Vec<f64>> {
        let f = self.effect_operator();
        let mix = split.mixture();
        self.check_dim(&mix)?;
        let total = (&f * mix.matrix()).trace().re;
        if total <= NumericPolicy::DEFAULT.singular_trace_cutoff {
            return Err(Error::SingularNormalization { trace: total });
        }
        Ok(split
            .weights
            .iter()
            .zip(&split.states)
            .map(|(p, s)| p * (&f * s.matrix()).trace().re / total)
            .collect())
    }
}

/// Divides a positive matrix by its trace, failing when the trace is at or
/// below the singular cutoff.
pub(crate) fn normalize(raw: ComplexMatrix) -> Result<DensityMatrix> {
    let tr = raw.trace().re;
    if !(tr > NumericPolicy::DEFAULT.singular_trace_cutoff) {
        return Err(Error::SingularNormalization { trace: tr });
    }
    DensityMatrix::new(raw.scale_real(1.0 / tr))
}

/// Convex decomposition `ρ = Σ pᵢ ρᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSplit {
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl EnsembleSplit {
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::Validity(format!(
                "ensemble has {} weights and {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Domain("ensemble weights must lie in [0, 1]".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("ensemble weights sum to {sum}")));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ pᵢ ρᵢ`.
    pub fn mixture(&self) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(self.states[0].dim());
        for (p, s) in self.weights.iter().zip(&self.states) {
            m = &m + &s.matrix().scale_real(*p);
        }
        DensityMatrix::new(m).expect("convex mixture of valid states is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_exponential, pauli};
    use crate::state::{bloch_to_density, BlochVector};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn diag(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[a, b])
    }

    fn up() -> DensityMatrix {
        DensityMatrix::new(diag(1.0, 0.0)).unwrap()
    }

    fn down() -> DensityMatrix {
        DensityMatrix::new(diag(0.0, 1.0)).unwrap()
    }

    #[test]
    fn test_apply_raw_examples() {
        let rho = bloch_to_density(&BlochVector::new(0.2, -0.3, 0.4).unwrap());
        let id = KrausFamily::single(ComplexMatrix::identity(2));
        assert!(id.apply_raw(&rho).unwrap().distance(rho.matrix()) < 1e-15);

        let k = KrausFamily::single(diag(2f64.sqrt(), 1.0));
        let out = k.apply_raw(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(out.distance(&diag(1.0, 0.5)) < 1e-15);

        let flip = KrausFamily::single(pauli(1));
        assert!(flip.apply_raw(&up()).unwrap().distance(down().matrix()) < 1e-15);
    }

    #[test]
    fn test_apply_normalized_examples() {
        let k = KrausFamily::single(diag(2f64.sqrt(), 1.0));
        let out = k.apply_normalized(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(out.matrix().distance(&diag(2.0 / 3.0, 1.0 / 3.0)) < 1e-15);

        let proj = KrausFamily::single(diag(1.0, 0.0));
        assert!(matches!(
            proj.apply_normalized(&down()),
            Err(Error::SingularNormalization { .. })
        ));
    }

    #[test]
    fn test_effect_operator_examples() {
        let id = KrausFamily::single(ComplexMatrix::identity(2));
        assert!(id.is_trace_preserving());
        let k = KrausFamily::single(diag(2f64.sqrt(), 1.0));
        assert!(k.effect_operator().distance(&diag(2.0, 1.0)) < 1e-15);
        assert!(!k.is_trace_preserving());
    }

    #[test]
    fn test_quantum_operation_regime_enforces_f_le_identity() {
        let k = diag(2f64.sqrt(), 1.0);
        assert!(KrausFamily::new(vec![k.clone()], MapRegime::QuantumOperation).is_err());
        assert!(KrausFamily::new(vec![k], MapRegime::Evolution).is_ok());
        let damp = vec![diag(1.0, 0.6f64.sqrt()), {
            let mut m = ComplexMatrix::zeros(2).into_dmatrix();
            m[(0, 1)] = Complex64::new(0.4f64.sqrt(), 0.0);
            ComplexMatrix::from_dmatrix(m).unwrap()
        }];
        let family = KrausFamily::new(damp, MapRegime::QuantumOperation).unwrap();
        assert!(family.is_trace_preserving());
    }

    #[test]
    fn test_ensemble_coefficient_examples() {
        let k = KrausFamily::single(diag(2f64.sqrt(), 1.0));
        let split = EnsembleSplit::new(vec![0.5, 0.5], vec![up(), down()]).unwrap();
        let p = k.ensemble_coefficients(&split).unwrap();
        assert_relative_eq!(p[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(p[1], 1.0 / 3.0, epsilon = 1e-15);

        let id = KrausFamily::single(ComplexMatrix::identity(2));
        let q = id.ensemble_coefficients(&split).unwrap();
        assert_eq!(q, vec![0.5, 0.5]);

        let single = EnsembleSplit::new(vec![1.0], vec![up()]).unwrap();
        assert_relative_eq!(k.ensemble_coefficient(&single, 0).unwrap(), 1.0);
    }

    #[test]
    fn test_ensemble_split_validation() {
        assert!(EnsembleSplit::new(vec![0.5, 0.6], vec![up(), down()]).is_err());
        assert!(EnsembleSplit::new(vec![1.0], vec![up(), down()]).is_err());
        assert!(EnsembleSplit::new(vec![1.0, 0.0], vec![up(), DensityMatrix::maximally_mixed(3)]).is_err());
    }

    #[test]
    fn test_compose_examples() {
        let id = KrausFamily::single(ComplexMatrix::identity(2));
        let c = id.compose(&id).unwrap();
        assert_eq!(c.operators().len(), 1);
        assert!(c.operators()[0].distance(&ComplexMatrix::identity(2)) < 1e-16);

        let gen = &pauli(1).scale_real(0.3) + &pauli(3).scale(Complex64::new(0.0, -0.8));
        let k = |t: f64| matrix_exponential(&gen.scale_real(t)).unwrap();
        let composed = KrausFamily::single(k(0.4)).compose(&KrausFamily::single(k(1.1))).unwrap();
        assert_eq!(composed.operators().len(), 1);
        assert!(composed.operators()[0].distance(&k(1.5)) < 1e-10);
    }
}
