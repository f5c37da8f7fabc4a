//! Quasi-linear Jaynes–Cummings model on its invariant two-dimensional blocks.
//!
//! Block `n` is spanned by `|n+1, ↓⟩, |n, ↑⟩`. On it `H⁽ⁿ⁾ = ω_f(n+½)I + ½ω_aσ₃`
//! and `G⁽ⁿ⁾ = ½g√(n+1)σ₁`, so `ω_n·g_n = 0` and each block is one of the
//! orthogonal qubit cases. A block-diagonal state stays block-diagonal; the
//! block weights `λ_n` are redistributed by the block traces.

use crate::dynamics::{mean_energy, Generator};
use crate::error::{Error, Result};
use crate::linalg::{log_scaled_exponential, pauli, ComplexMatrix};
use crate::qubit::{CaseClass, QubitGeneratorParams};
use crate::quasilinear::KrausFamily;
use crate::state::DensityMatrix;
use crate::Vec3;

/// Default Fock truncation.
pub const DEFAULT_N_MAX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCParams {
    pub omega_f: f64,
    pub omega_a: f64,
    pub g: f64,
    pub n_max: usize,
}

/// Long-time character of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockRegime {
    /// `g√(n+1) > ω_a`: converges to a stationary state.
    Damped,
    /// `g√(n+1) = ω_a`: algebraic approach to a stationary state.
    Critical,
    /// `g√(n+1) < ω_a`: periodic.
    Oscillating,
}

impl JCParams {
    pub fn new(omega_f: f64, omega_a: f64, g: f64, n_max: usize) -> Result<Self> {
        if ![omega_f, omega_a, g].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("Jaynes–Cummings parameters"));
        }
        if n_max < 1 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        Ok(Self {
            omega_f,
            omega_a,
            g,
            n_max,
        })
    }

    fn check_block(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::Domain(format!("block {n} outside 0..={}", self.n_max)));
        }
        Ok(())
    }

    /// Effective coupling `g√(n+1)` of block `n`.
    pub fn block_coupling(&self, n: usize) -> f64 {
        self.g * ((n + 1) as f64).sqrt()
    }

    pub fn block_regime(&self, n: usize) -> Result<BlockRegime> {
        Ok(match jc_block_params(self, n)?.case_class() {
            CaseClass::HyperbolicDamped => BlockRegime::Damped,
            CaseClass::Parabolic => BlockRegime::Critical,
            _ => BlockRegime::Oscillating,
        })
    }
}

/// Block qubit vectors `ω_n = ω_a ẑ`, `g_n = g√(n+1) x̂`.
pub fn jc_block_params(p: &JCParams, n: usize) -> Result<QubitGeneratorParams> {
    p.check_block(n)?;
    QubitGeneratorParams::new(Vec3::new(0.0, 0.0, p.omega_a), Vec3::new(p.block_coupling(n), 0.0, 0.0))
}

/// Full block generator, including the photon term `ω_f(n+½)I` in `H`.
pub fn jc_block_generator(p: &JCParams, n: usize) -> Result<Generator> {
    p.check_block(n)?;
    let photon = ComplexMatrix::identity(2).scale_real(p.omega_f * (n as f64 + 0.5));
    let h = &photon + &pauli(3).scale_real(0.5 * p.omega_a);
    let g = pauli(1).scale_real(0.5 * p.block_coupling(n));
    Generator::without_lindblads(h, g)
}

/// Block weights `λ_n` and block states `ρ₍ₙ₎`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct JCBlockState {
    weights: Vec<f64>,
    blocks: Vec<DensityMatrix>,
}

impl JCBlockState {
    pub fn new(weights: Vec<f64>, blocks: Vec<DensityMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: blocks.len(),
            });
        }
        if let Some(b) = blocks.iter().find(|b| b.dim() != 2) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: b.dim(),
            });
        }
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::Validity("block weights must lie in [0, 1]".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Validity(format!("block weights sum to {total}")));
        }
        Ok(Self { weights, blocks })
    }

    /// All weight in block `n`; the other blocks hold the maximally mixed state.
    pub fn single_block(n_max: usize, n: usize, rho: DensityMatrix) -> Result<Self> {
        if n > n_max {
            return Err(Error::Domain(format!("block {n} outside 0..={n_max}")));
        }
        let mut weights = vec![0.0; n_max + 1];
        weights[n] = 1.0;
        let mut blocks = vec![DensityMatrix::maximally_mixed(2); n_max + 1];
        blocks[n] = rho;
        Self::new(weights, blocks)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn blocks(&self) -> &[DensityMatrix] {
        &self.blocks
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }
}

/// Propagates every block with `K_n = e^{(G_n − iσ₃ω_a/2)t}` and reweights
/// `λ_n(t) ∝ λ_n(0) tr(K_n ρ_n K_n†)`.
///
/// Traces are carried as logarithms so blocks growing at different rates can
/// be compared at long times without overflow.
pub fn jc_evolve(p: &JCParams, s0: &JCBlockState, t: f64) -> Result<JCBlockState> {
    if s0.n_max() != p.n_max {
        return Err(Error::DimensionMismatch {
            expected: p.n_max + 1,
            found: s0.weights.len(),
        });
    }
    let mut log_w = Vec::with_capacity(s0.weights.len());
    let mut blocks = Vec::with_capacity(s0.blocks.len());
    for (n, (w, rho)) in s0.weights.iter().zip(&s0.blocks).enumerate() {
        // The photon phase ω_f(n+½) is a block-global factor and is dropped.
        let gen = jc_block_params(p, n)?.generator();
        let (k, log_scale) = log_scaled_exponential(&gen.nonhermitian_part().scale_real(t))?;
        let fam = KrausFamily::single(k);
        let tr = fam.weight(rho)?;
        if *w > 0.0 && tr > 0.0 {
            log_w.push(w.ln() + tr.ln() + 2.0 * log_scale);
        } else {
            log_w.push(f64::NEG_INFINITY);
        }
        blocks.push(if tr > 1e-300 { fam.apply_normalized(rho)? } else { rho.clone() });
    }
    let top = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::SingularNormalization { trace: 0.0 });
    }
    let raw: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|r| r / total).collect();
    JCBlockState::new(weights, blocks)
}

/// `Σ λ_n tr(ρ_n H⁽ⁿ⁾)`, photon energy included.
pub fn jc_mean_energy(p: &JCParams, s: &JCBlockState) -> Result<f64> {
    let mut e = 0.0;
    for (n, (w, rho)) in s.weights.iter().zip(&s.blocks).enumerate() {
        e += w * mean_energy(&jc_block_generator(p, n)?, rho);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::closed_form_propagate;
    use crate::qubit::bloch_trajectory_general;
    use crate::state::{bloch_to_density, BlochVector};
    use approx::assert_relative_eq;

    fn params() -> JCParams {
        JCParams::new(1.0, 1.0, 0.3, DEFAULT_N_MAX).unwrap()
    }

    fn even_state(p: &JCParams) -> JCBlockState {
        let n = p.n_max + 1;
        let up = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0).unwrap());
        JCBlockState::new(vec![1.0 / n as f64; n], vec![up; n]).unwrap()
    }

    #[test]
    fn test_block_generator_examples() {
        let p = params();
        let q = jc_block_params(&p, 3).unwrap();
        assert_relative_eq!(q.g.norm(), 0.6, epsilon = 1e-15);
        assert_eq!(q.c1(), 0.0);
        assert!(jc_block_generator(&p, 17).is_err());
        let gen = jc_block_generator(&p, 2).unwrap();
        assert_relative_eq!(gen.hamiltonian().trace().re, 2.0 * 2.5, epsilon = 1e-15);
    }

    #[test]
    fn test_block_zero_is_single_qubit_model() {
        let p = params();
        let xi = BlochVector::new(0.0, 0.0, 1.0).unwrap();
        let s0 = JCBlockState::single_block(p.n_max, 0, bloch_to_density(&xi)).unwrap();
        let s = jc_evolve(&p, &s0, 7.0).unwrap();
        assert_eq!(s.weights()[0], 1.0);
        let exact = bloch_trajectory_general(&jc_block_params(&p, 0).unwrap(), &xi, 7.0).unwrap();
        assert!(s.blocks()[0].bloch().unwrap().distance(&exact) < 1e-10);
        // The photon phase does not change the block trajectory.
        let full = closed_form_propagate(&jc_block_generator(&p, 0).unwrap(), &bloch_to_density(&xi), 7.0).unwrap();
        assert!(full.distance(&s.blocks()[0]) < 1e-10);
    }

    #[test]
    fn test_weights_stay_normalized() {
        let p = params();
        let s0 = even_state(&p);
        assert_eq!(jc_evolve(&p, &s0, 0.0).unwrap(), s0);
        for t in [0.5, 10.0, 1e3, 1e5] {
            let s = jc_evolve(&p, &s0, t).unwrap();
            let total: f64 = s.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-10, "t = {t}");
        }
        // Strongly coupled blocks grow fastest and eventually take all weight.
        let s = jc_evolve(&p, &s0, 1e5).unwrap();
        assert!(s.weights()[p.n_max] > 0.999);
    }

    #[test]
    fn test_block_regimes() {
        let p = params();
        for n in 0..=p.n_max {
            let expected = if p.block_coupling(n) > p.omega_a {
                BlockRegime::Damped
            } else {
                BlockRegime::Oscillating
            };
            assert_eq!(p.block_regime(n).unwrap(), expected, "n = {n}");
        }
        let critical = JCParams::new(1.0, 0.6, 0.3, 4).unwrap();
        assert_eq!(critical.block_regime(3).unwrap(), BlockRegime::Critical);
    }

    #[test]
    fn test_pure_blocks_stay_pure_and_energy_is_finite() {
        let p = params();
        let s = jc_evolve(&p, &even_state(&p), 50.0).unwrap();
        assert!(s.blocks().iter().all(|b| (b.purity() - 1.0).abs() < 1e-9));
        assert!(jc_mean_energy(&p, &s).unwrap().is_finite());
    }

    #[test]
    fn test_state_validation() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(JCBlockState::new(vec![0.5, 0.6], vec![rho.clone(), rho.clone()]).is_err());
        assert!(JCBlockState::new(vec![1.0], vec![]).is_err());
        assert!(JCParams::new(1.0, 1.0, 0.3, 0).is_err());
    }
}
