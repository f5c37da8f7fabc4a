//! Numeric tolerances shared by the library and its tests.

/// One record holding every tolerance the library checks against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Relative Hermiticity defect `‖M − M†‖_F / ‖M‖_F`.
    pub hermitian_tol: f64,
    /// Allowed `|tr ρ − 1|` for a density matrix.
    pub trace_tol: f64,
    /// Smallest eigenvalue accepted for a density matrix is `−positivity_tol`.
    pub positivity_tol: f64,
    /// Bloch vectors may exceed unit length by this much.
    pub bloch_norm_tol: f64,
    /// Allowed `|‖ψ‖ − 1|` for a state vector.
    pub unit_norm_tol: f64,
    /// `is_pure` threshold: purity ≥ 1 − purity_tol.
    pub purity_tol: f64,
    /// Normalizing traces at or below this are treated as annihilated states.
    pub singular_trace_cutoff: f64,
    /// Trace drift tolerated along an integrated trajectory.
    pub trace_drift_tol: f64,
    /// Norm drift tolerated along an integrated state-vector trajectory.
    pub norm_drift_tol: f64,
    /// Largest admissible growth exponent inside a matrix exponential.
    pub exponent_cap: f64,
    /// Below this `|α²|` the SL(2,C) coefficients switch to their series.
    pub alpha_sq_series_cutoff: f64,
    /// Relative `|C2|` threshold for the parabolic (g = ω) case.
    pub parabolic_rel_tol: f64,
    /// Relative `|C1|` threshold for orthogonal ω and g.
    pub orthogonal_rel_tol: f64,
    /// Allowed `|det S − 1|` for an SL(2,C) element.
    pub unit_determinant_tol: f64,
    /// Mass-shell tolerance, relative to the Euclidean size of p.
    pub mass_shell_tol: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        hermitian_tol: 1e-10,
        trace_tol: 1e-10,
        positivity_tol: 1e-9,
        bloch_norm_tol: 1e-9,
        unit_norm_tol: 1e-10,
        purity_tol: 1e-8,
        singular_trace_cutoff: 1e-12,
        trace_drift_tol: 1e-8,
        norm_drift_tol: 1e-8,
        exponent_cap: 700.0,
        alpha_sq_series_cutoff: 1e-12,
        parabolic_rel_tol: 1e-10,
        orthogonal_rel_tol: 1e-12,
        unit_determinant_tol: 1e-10,
        mass_shell_tol: 1e-8,
    };

    /// Policy used when validating states produced by an integrator: the
    /// trace is allowed to drift by `trace_drift_tol` instead of `trace_tol`.
    pub fn integrator() -> NumericPolicy {
        NumericPolicy {
            trace_tol: Self::DEFAULT.trace_drift_tol,
            hermitian_tol: 1e-8,
            ..Self::DEFAULT
        }
    }
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
