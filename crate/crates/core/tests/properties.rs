//! Property-based invariants of states, maps and generators.

use num_complex::Complex64;
use proptest::prelude::*;

use qdsim_core::dynamics::{closed_form_propagate, gksl_rhs, Generator};
use qdsim_core::linalg::{eig_hermitian, matrix_exponential, pauli_dot, ComplexMatrix};
use qdsim_core::qubit::{asymptote, bloch_trajectory_general, sl2c_invariants_check, Asymptote, QubitGeneratorParams};
use qdsim_core::quasilinear::KrausFamily;
use qdsim_core::state::{bloch_to_density, density_to_bloch, BlochVector, DensityMatrix};
use qdsim_core::Vec3;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-r..r).prop_map(|[x, y, z]| Vec3::new(x, y, z))
}

fn bloch() -> impl Strategy<Value = BlochVector> {
    vec3(1.0).prop_map(|v| {
        let v = if v.norm() > 1.0 { v / v.norm() } else { v };
        BlochVector::from_vec(v).unwrap()
    })
}

fn matrix(dim: usize, r: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-r..r, -r..r), dim * dim).prop_map(move |e| {
        let entries: Vec<Complex64> = e.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        ComplexMatrix::from_row_slice(dim, &entries).unwrap()
    })
}

fn density(dim: usize) -> impl Strategy<Value = DensityMatrix> {
    matrix(dim, 1.0).prop_filter_map("degenerate", |a| {
        let m = &a * &a.adjoint();
        let tr = m.trace().re;
        (tr > 1e-3).then(|| DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap())
    })
}

fn generator(dim: usize) -> impl Strategy<Value = Generator> {
    (matrix(dim, 1.0), matrix(dim, 0.7))
        .prop_map(|(h, g)| Generator::without_lindblads(h.hermitian_part(), g.hermitian_part()).unwrap())
}

fn qubit() -> impl Strategy<Value = QubitGeneratorParams> {
    (vec3(2.0), vec3(2.0)).prop_map(|(w, g)| QubitGeneratorParams::new(w, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bloch_round_trip(n in bloch()) {
        let back = density_to_bloch(&bloch_to_density(&n)).unwrap();
        prop_assert!(back.distance(&n) < 1e-14);
    }

    #[test]
    fn propagation_yields_states(gen in generator(3), rho in density(3), t in 0.0..5.0f64) {
        let out = closed_form_propagate(&gen, &rho, t).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.matrix().hermiticity_defect() < 1e-12);
        prop_assert!(eig_hermitian(out.matrix()).unwrap().min() > -1e-10);
    }

    #[test]
    fn pure_states_stay_pure(gen in generator(2), n in bloch(), t in 0.0..5.0f64) {
        let n = BlochVector::from_vec(n.vector().try_normalize(1e-6).unwrap_or(Vec3::z())).unwrap();
        let out = closed_form_propagate(&gen, &bloch_to_density(&n), t).unwrap();
        prop_assert!((out.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn semigroup(gen in generator(2), rho in density(2), s in 0.0..3.0f64, t in 0.0..3.0f64) {
        let two = closed_form_propagate(&gen, &closed_form_propagate(&gen, &rho, s).unwrap(), t).unwrap();
        let one = closed_form_propagate(&gen, &rho, s + t).unwrap();
        prop_assert!(two.distance(&one) < 1e-9);
    }

    #[test]
    fn normalized_map_ignores_kraus_scale(k in matrix(2, 1.0), rho in density(2), c in 0.1..10.0f64) {
        let fam = KrausFamily::single(k.clone());
        prop_assume!(fam.weight(&rho).unwrap() > 1e-6);
        let a = fam.apply_normalized(&rho).unwrap();
        let b = KrausFamily::single(k.scale_real(c)).apply_normalized(&rho).unwrap();
        prop_assert!(a.distance(&b) < 1e-10);
    }

    #[test]
    fn identity_shifts_are_gauge(gen in generator(2), rho in density(2), kappa in -3.0..3.0f64, t in 0.0..3.0f64) {
        let shift = ComplexMatrix::identity(2).scale_real(kappa);
        let shifted = Generator::without_lindblads(
            gen.hamiltonian() + &shift,
            gen.damping() + &shift,
        ).unwrap();
        let a = closed_form_propagate(&gen, &rho, t).unwrap();
        let b = closed_form_propagate(&shifted, &rho, t).unwrap();
        prop_assert!(a.distance(&b) < 1e-10);
    }

    #[test]
    fn rhs_is_traceless_and_hermitian(gen in generator(3), rho in density(3)) {
        let d = gksl_rhs(&gen, &rho).unwrap();
        prop_assert!(d.trace().norm() < 1e-12);
        prop_assert!(d.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn qubit_closed_form_matches_matrix_propagation(p in qubit(), n in bloch(), t in 0.0..4.0f64) {
        let exact = bloch_trajectory_general(&p, &n, t).unwrap();
        let rho = closed_form_propagate(&p.generator(), &bloch_to_density(&n), t).unwrap();
        prop_assert!(rho.bloch().unwrap().distance(&exact) < 1e-8);
    }

    #[test]
    fn sl2c_invariants_are_conserved(p in qubit(), a in vec3(1.0), b in vec3(1.0)) {
        let traceless = &pauli_dot(&a) + &pauli_dot(&b).scale(Complex64::i());
        let s = matrix_exponential(&traceless).unwrap();
        let (c1, c2) = sl2c_invariants_check(&p, &s).unwrap();
        let scale = 1.0 + p.omega.norm_squared() + p.g.norm_squared();
        prop_assert!((c1 - p.c1()).abs() < 1e-8 * scale);
        prop_assert!((c2 - p.c2()).abs() < 1e-8 * scale);
    }

    #[test]
    fn stationary_asymptote_is_fixed(p in qubit(), n in bloch()) {
        if let Ok(Asymptote::Stationary(fixed)) = asymptote(&p, &n) {
            let moved = bloch_trajectory_general(&p, &fixed, 1.0).unwrap();
            prop_assert!(moved.distance(&fixed) < 1e-8);
        }
    }
}
