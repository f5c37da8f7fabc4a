//! Executes a scenario and cross-checks it against the available oracles.
//!
//! Every kind produces a [`SeriesTrajectory`]: sample times plus one named
//! real series per observable. Where a closed form exists it is compared
//! with an independent computation (RK4, the propagator matrix or an explicit
//! Kraus pair) and the largest deviation is reported as a [`Check`].

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qdsim_core::dynamics::{closed_form_propagate, evolve, Generator, IntegratorConfig, TimeParameterizedGenerator, Trajectory};
use qdsim_core::linalg::{eig_hermitian, pauli_dot_complex, ComplexMatrix};
use qdsim_core::models::dirac::{bmt_evolve, EMFieldConfig, FourVector, BMT_DRIFT_TOL};
use qdsim_core::models::instability::{mean_bloch_over, InstabilityScenario, MorseProfile};
use qdsim_core::models::jaynes_cummings::{jc_block_params, jc_evolve, jc_mean_energy, BlockRegime, JCBlockState, JCParams, DEFAULT_N_MAX};
use qdsim_core::models::neutrino::{neutrino_evolve, survival_average, NeutrinoConfig, NeutrinoMode};
use qdsim_core::qubit::{
    asymptote, bloch_trajectory_general, eigenstate_probabilities, rabi_probability, single_lindblad_kraus,
    single_lindblad_trajectory, Asymptote, QubitGeneratorParams, SingleLindbladParams,
};
use qdsim_core::state::{bloch_to_density, BlochVector, DensityMatrix, StateVector};
use qdsim_core::{NumericPolicy, Vec3};

use crate::error::{CliError, Result};
use crate::scenario::{Scenario, ScenarioKind};

/// Sample times with named observable series; the states themselves are not kept.
pub type SeriesTrajectory = Trajectory<()>;

/// One invariant or oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, max_violation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_violation,
            tolerance,
        }
    }

    /// NaN violations fail.
    pub fn passed(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: Scenario,
    /// CSV/SVG columns, defaults resolved.
    pub columns: Vec<String>,
    pub checks: Vec<Check>,
    /// Derived scalars worth reporting (crossing points, limits, ...).
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub duration: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind: {}", self.scenario.kind)?;
        for c in &self.checks {
            let verdict = if c.passed() { "pass" } else { "FAIL" };
            writeln!(f, "check {}: {verdict} (max {:.3e}, tol {:.1e})", c.name, c.max_violation, c.tolerance)?;
        }
        for (name, value) in &self.metrics {
            if *value == 0.0 || (1e-3..1e7).contains(&value.abs()) {
                writeln!(f, "metric {name} = {value}")?;
            } else {
                writeln!(f, "metric {name} = {value:e}")?;
            }
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        write!(f, "duration: {:.3} s", self.duration.as_secs_f64())
    }
}

struct Outcome {
    traj: SeriesTrajectory,
    default_columns: Vec<String>,
    checks: Vec<Check>,
    metrics: Vec<(String, f64)>,
    notes: Vec<String>,
}

impl Outcome {
    fn new(traj: SeriesTrajectory, kind: ScenarioKind) -> Self {
        Self {
            traj,
            default_columns: kind.default_observables().iter().map(|s| s.to_string()).collect(),
            checks: Vec::new(),
            metrics: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, max_violation: f64, tolerance: f64) {
        self.checks.push(Check::new(name, max_violation, tolerance));
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_string(), value));
    }
}

/// Runs `s` and returns the observable series and the check report.
pub fn run(s: &Scenario) -> Result<(SeriesTrajectory, RunReport)> {
    let start = Instant::now();
    let out = match s.kind {
        ScenarioKind::QubitClosedForm => run_qubit(s)?,
        ScenarioKind::GkslOde => run_gksl(s)?,
        ScenarioKind::SingleLindblad => run_single_lindblad(s)?,
        ScenarioKind::JaynesCummings => run_jc(s)?,
        ScenarioKind::Bmt => run_bmt(s)?,
        ScenarioKind::Neutrino => run_neutrino(s)?,
    };
    let columns = if s.output.observables.is_empty() {
        out.default_columns
    } else {
        s.output.observables.clone()
    };
    if let Some(missing) = columns.iter().find(|c| out.traj.series(c).is_none()) {
        return Err(CliError::Output(format!("observable `{missing}` was not produced by this run")));
    }
    let report = RunReport {
        scenario: s.clone(),
        columns,
        checks: out.checks,
        metrics: out.metrics,
        notes: out.notes,
        duration: start.elapsed(),
    };
    Ok((out.traj, report))
}

fn vector(s: &Scenario, section: &str, key: &str) -> Vec3 {
    s.vector(section, key).unwrap_or_else(Vec3::zeros)
}

fn bloch(s: &Scenario, section: &str) -> Result<BlochVector> {
    let v = vector(s, section, "xi");
    // The parser admits |ξ| up to 1 + 1e-12; pull such vectors back onto the sphere.
    let v = if v.norm() > 1.0 { v / v.norm() } else { v };
    BlochVector::from_vec(v).map_err(CliError::core("xi"))
}

fn integrator(s: &Scenario, default_step: f64) -> Result<IntegratorConfig> {
    let step = s.integrator.step.unwrap_or(default_step);
    Ok(IntegratorConfig::new(step, s.integrator.t_end)
        .map_err(CliError::core("integrator"))?
        .with_stride(s.integrator.stride))
}

/// `0, Δ, 2Δ, …` with `Δ = step·stride`, always ending at `t_end`.
fn sample_times(t_end: f64, spacing: f64) -> Vec<f64> {
    let mut times = vec![0.0];
    let n = (t_end / spacing).floor() as usize;
    times.extend((1..=n).map(|i| i as f64 * spacing).filter(|&t| t < t_end));
    if t_end > 0.0 {
        times.push(t_end);
    }
    times
}

fn unit_trajectory(times: &[f64]) -> Result<SeriesTrajectory> {
    let mut traj = Trajectory::new();
    for &t in times {
        traj.push(t, ()).map_err(CliError::core("sample grid"))?;
    }
    Ok(traj)
}

fn strip_states<S>(traj: &Trajectory<S>) -> SeriesTrajectory {
    traj.map_states(|_, _| Ok(())).expect("infallible")
}

fn add_bloch_series(traj: &mut SeriesTrajectory, ns: &[BlochVector]) -> Result<()> {
    let comp = |k: usize| ns.iter().map(|n| n.vector()[k]).collect::<Vec<_>>();
    for (k, name) in ["n1", "n2", "n3"].iter().enumerate() {
        traj.insert_series(*name, comp(k)).map_err(CliError::core("series"))?;
    }
    let purity = ns.iter().map(|n| 0.5 * (1.0 + n.norm() * n.norm())).collect();
    traj.insert_series("purity", purity).map_err(CliError::core("series"))?;
    let entropy = ns.iter().map(|n| bloch_to_density(n).von_neumann_entropy()).collect();
    traj.insert_series("entropy", entropy).map_err(CliError::core("series"))?;
    Ok(())
}

fn bloch_of(rho: &DensityMatrix) -> Result<BlochVector> {
    rho.bloch().map_err(CliError::core("Bloch vector"))
}

fn max_distance(a: &[BlochVector], b: &[BlochVector]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.distance(y)).fold(0.0, f64::max)
}

fn note_asymptote(out: &mut Outcome, p: &QubitGeneratorParams, xi: &BlochVector) {
    match asymptote(p, xi) {
        Ok(Asymptote::Stationary(n)) => {
            for (k, v) in n.vector().iter().enumerate() {
                out.metric(&format!("asymptote_{}", k + 1), *v);
            }
        }
        Ok(Asymptote::Oscillatory) => out.notes.push("the trajectory is periodic (no stationary asymptote)".into()),
        Err(e) => out.notes.push(format!("asymptote unavailable: {e}")),
    }
}

fn run_qubit(s: &Scenario) -> Result<Outcome> {
    let p = QubitGeneratorParams::new(vector(s, "qubit", "omega"), vector(s, "qubit", "g"))
        .map_err(CliError::core("qubit parameters"))?;
    let xi = bloch(s, "qubit")?;
    let gen = p.generator();
    let ode = evolve(&gen.clone().into(), &bloch_to_density(&xi), &integrator(s, 1e-3)?)
        .map_err(CliError::core("qubit-closed-form: RK4 cross-check"))?;
    let times = ode.times().to_vec();

    let exact = times
        .iter()
        .map(|&t| bloch_trajectory_general(&p, &xi, t))
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("qubit-closed-form: Bloch formula"))?;
    let numeric = ode.states().iter().map(bloch_of).collect::<Result<Vec<_>>>()?;
    let propagated = times
        .iter()
        .map(|&t| closed_form_propagate(&gen, &bloch_to_density(&xi), t).and_then(|r| r.bloch()))
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("qubit-closed-form: propagator"))?;

    let mut traj = unit_trajectory(&times)?;
    add_bloch_series(&mut traj, &exact)?;
    let w_hat = p.omega.try_normalize(0.0).unwrap_or_else(Vec3::z);
    let p_plus: Vec<f64> = exact.iter().map(|n| 0.5 * (1.0 + n.vector().dot(&w_hat))).collect();
    let p_minus: Vec<f64> = p_plus.iter().map(|x| 1.0 - x).collect();
    let (g_mag, w_mag) = (p.g.norm(), p.omega.norm());
    let rabi = times.iter().map(|&t| rabi_probability(g_mag, w_mag, t)).collect();
    traj.insert_series("p_plus", p_plus).map_err(CliError::core("series"))?;
    traj.insert_series("p_minus", p_minus.clone()).map_err(CliError::core("series"))?;
    traj.insert_series("p_rabi", rabi).map_err(CliError::core("series"))?;

    let mut out = Outcome::new(traj, s.kind);
    out.check("ode_vs_closed_form", max_distance(&numeric, &exact), 1e-6);
    out.check("propagator_vs_closed_form", max_distance(&propagated, &exact), 1e-8);
    // The scalar eigenstate formula assumes ω ⊥ g and a start in the upper H eigenstate.
    if p.is_orthogonal() && xi.vector().dot(&w_hat) > 1.0 - 1e-12 && w_mag > 0.0 {
        let dev = times
            .iter()
            .zip(&p_minus)
            .map(|(&t, pm)| (eigenstate_probabilities(w_mag, g_mag, t).1 - pm).abs())
            .fold(0.0, f64::max);
        out.check("eigenstate_formula", dev, 1e-8);
        out.metric("max_transition_probability", g_mag * g_mag / (g_mag * g_mag + w_mag * w_mag));
    }
    out.metric("c1", p.c1());
    out.metric("c2", p.c2());
    out.notes.push(format!("case: {:?}", p.case_class()));
    note_asymptote(&mut out, &p, &xi);
    Ok(out)
}

/// `L = ½(l_re + i l_im)·σ`, or no Lindblad operator when neither is given.
fn ode_lindblads(s: &Scenario) -> Vec<ComplexMatrix> {
    let (re, im) = (s.vector("lindblad", "l_re"), s.vector("lindblad", "l_im"));
    if re.is_none() && im.is_none() {
        return Vec::new();
    }
    let (re, im) = (re.unwrap_or_else(Vec3::zeros), im.unwrap_or_else(Vec3::zeros));
    let coeffs: [Complex64; 3] = std::array::from_fn(|k| Complex64::new(0.5 * re[k], 0.5 * im[k]));
    vec![pauli_dot_complex(&coeffs)]
}

fn with_lindblads(base: Generator, lindblads: &[ComplexMatrix]) -> qdsim_core::Result<Generator> {
    if lindblads.is_empty() {
        return Ok(base);
    }
    Generator::new(base.hamiltonian().clone(), base.damping().clone(), lindblads.to_vec())
}

fn run_gksl(s: &Scenario) -> Result<Outcome> {
    let omega = vector(s, "qubit", "omega");
    let g = vector(s, "qubit", "g");
    let xi = bloch(s, "qubit")?;
    let lindblads = ode_lindblads(s);
    let morse = match (s.real("qubit", "morse_q"), s.real("qubit", "morse_nu")) {
        (Some(q), Some(nu)) => Some(
            InstabilityScenario::new(omega, g, MorseProfile::new(q, nu).map_err(CliError::core("Morse profile"))?)
                .map_err(CliError::core("instability scenario"))?,
        ),
        _ => None,
    };
    let p = QubitGeneratorParams::new(omega, g).map_err(CliError::core("qubit parameters"))?;
    let constant = with_lindblads(p.generator(), &lindblads).map_err(CliError::core("generator"))?;
    let tgen = match morse {
        Some(m) => {
            let l = lindblads.clone();
            TimeParameterizedGenerator::varying(2, move |t| {
                with_lindblads(m.params_at(t).generator(), &l).expect("validated Lindblad operators")
            })
        }
        None => constant.clone().into(),
    };
    let rho0 = bloch_to_density(&xi);
    let ode = evolve(&tgen, &rho0, &integrator(s, 1e-3)?).map_err(CliError::core("gksl-ode: RK4"))?;
    let ns = ode.states().iter().map(bloch_of).collect::<Result<Vec<_>>>()?;
    let mut traj = strip_states(&ode);
    add_bloch_series(&mut traj, &ns)?;

    let mut out = Outcome::new(traj, s.kind);
    let trace_err = ode.series("trace_error").unwrap_or_default().iter().copied().fold(0.0, f64::max);
    out.check("trace_drift", trace_err, NumericPolicy::integrator().trace_drift_tol);
    let mut negativity: f64 = 0.0;
    for rho in ode.states() {
        let min = eig_hermitian(rho.matrix()).map_err(CliError::core("eigenvalues"))?.min();
        negativity = negativity.max(-min);
    }
    out.check("positivity", negativity, NumericPolicy::DEFAULT.positivity_tol);

    if lindblads.is_empty() {
        if xi.norm() > 1.0 - 1e-12 {
            let purity_dev = ode.states().iter().map(|r| (r.purity() - 1.0).abs()).fold(0.0, f64::max);
            out.check("purity_invariance", purity_dev, 1e-8);
        }
        if morse.is_none() {
            let exact = ode
                .times()
                .iter()
                .map(|&t| closed_form_propagate(&constant, &rho0, t).and_then(|r| r.bloch()))
                .collect::<qdsim_core::Result<Vec<_>>>()
                .map_err(CliError::core("gksl-ode: closed form"))?;
            out.check("ode_vs_closed_form", max_distance(&ns, &exact), 1e-6);
        }
    }
    match morse {
        Some(m) => {
            match m.instability_time(s.integrator.t_end, 1e-3) {
                Ok(t_in) => out.metric("t_in", t_in),
                Err(e) => out.notes.push(format!("no instability point before t_end: {e}")),
            }
            if let (Some(lo), Some(hi)) = (s.real("qubit", "mean_from"), s.real("qubit", "mean_to")) {
                if hi > s.integrator.t_end {
                    out.notes.push(format!("averaging window [{lo}, {hi}] extends past t_end; mean check skipped"));
                    return Ok(out);
                }
                let mean = mean_bloch_over(&ode, lo, hi).map_err(CliError::core("post-instability mean"))?;
                out.check("post_instability_mean", (mean - m.lambda_plus()).norm(), 0.05);
                for (k, v) in mean.iter().enumerate() {
                    out.metric(&format!("mean_n{}", k + 1), *v);
                }
            }
        }
        None if lindblads.is_empty() => note_asymptote(&mut out, &p, &xi),
        None => {}
    }
    Ok(out)
}

fn run_single_lindblad(s: &Scenario) -> Result<Outcome> {
    let req = |k: &str| s.real("lindblad", k).unwrap_or(0.0);
    let p = SingleLindbladParams::new(req("kappa"), req("g"), req("omega"), req("l"))
        .map_err(CliError::core("single-Lindblad parameters"))?;
    let xi = bloch(s, "lindblad")?;
    let rho0 = bloch_to_density(&xi);
    let ode = evolve(&p.generator().into(), &rho0, &integrator(s, 1e-3)?)
        .map_err(CliError::core("single-lindblad: RK4"))?;
    let times = ode.times().to_vec();
    let exact = times
        .iter()
        .map(|&t| single_lindblad_trajectory(&p, &xi, t))
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("single-lindblad: closed form"))?;
    let numeric = ode.states().iter().map(bloch_of).collect::<Result<Vec<_>>>()?;
    let kraus = times
        .iter()
        .map(|&t| {
            single_lindblad_kraus(&p, t)
                .and_then(|fam| fam.apply_normalized(&rho0))
                .and_then(|r| r.bloch())
        })
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("single-lindblad: Kraus pair"))?;

    let mut traj = unit_trajectory(&times)?;
    add_bloch_series(&mut traj, &exact)?;
    let mut out = Outcome::new(traj, s.kind);
    out.check("ode_vs_closed_form", max_distance(&numeric, &exact), 1e-6);
    out.check("kraus_vs_closed_form", max_distance(&kraus, &exact), 1e-10);
    out.metric("n3_limit", p.n3_limit());
    if let Some(last) = exact.last() {
        out.metric("entropy_final", bloch_to_density(last).von_neumann_entropy());
    }
    out.notes.push("entropy is in nats (natural logarithm)".into());
    Ok(out)
}

fn run_jc(s: &Scenario) -> Result<Outcome> {
    let r = |k: &str| s.real("jc", k).unwrap_or(0.0);
    let n_max = s.real("jc", "n_max").map_or(DEFAULT_N_MAX, |n| n as usize);
    let p = JCParams::new(r("omega_f"), r("omega_a"), r("g"), n_max).map_err(CliError::core("JC parameters"))?;
    let xi = bloch(s, "jc")?;
    let rho = bloch_to_density(&xi);
    let s0 = match s.real("jc", "block") {
        Some(b) => JCBlockState::single_block(n_max, b as usize, rho),
        None => JCBlockState::new(vec![1.0 / (n_max + 1) as f64; n_max + 1], vec![rho; n_max + 1]),
    }
    .map_err(CliError::core("JC initial state"))?;

    let t_end = s.integrator.t_end;
    let spacing = s.integrator.step.unwrap_or(if t_end > 0.0 { t_end / 1000.0 } else { 1.0 }) * s.integrator.stride as f64;
    let times = sample_times(t_end, spacing);
    let states = times
        .iter()
        .map(|&t| jc_evolve(&p, &s0, t))
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("jaynes-cummings: block evolution"))?;

    let mut traj = unit_trajectory(&times)?;
    let energy = states
        .iter()
        .map(|st| jc_mean_energy(&p, st))
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("jaynes-cummings: energy"))?;
    traj.insert_series("energy", energy).map_err(CliError::core("series"))?;
    for n in 0..=n_max {
        let w = states.iter().map(|st| st.weights()[n]).collect();
        traj.insert_series(format!("lambda_{n}"), w).map_err(CliError::core("series"))?;
    }

    let mut out = Outcome::new(traj, s.kind);
    out.default_columns.extend((0..=n_max).map(|n| format!("lambda_{n}")));
    let norm_dev = states
        .iter()
        .map(|st| (st.weights().iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    out.check("weight_normalization", norm_dev, 1e-10);
    // Blocks holding weight initially are cross-checked against the qubit closed form.
    let mut block_dev: f64 = 0.0;
    for n in (0..=n_max).filter(|&n| s0.weights()[n] > 0.0) {
        let bp = jc_block_params(&p, n).map_err(CliError::core("JC block"))?;
        for (&t, st) in times.iter().zip(&states) {
            let exact = bloch_trajectory_general(&bp, &xi, t).map_err(CliError::core("JC block closed form"))?;
            block_dev = block_dev.max(bloch_of(&st.blocks()[n])?.distance(&exact));
        }
    }
    out.check("blocks_vs_qubit_closed_form", block_dev, 1e-8);
    let regimes = (0..=n_max)
        .map(|n| p.block_regime(n))
        .collect::<qdsim_core::Result<Vec<_>>>()
        .map_err(CliError::core("JC regimes"))?;
    let damped = regimes.iter().filter(|r| **r == BlockRegime::Damped).count();
    out.metric("damped_blocks", damped as f64);
    out.notes.push(format!("block regimes: {regimes:?}"));
    Ok(out)
}

type BmtGetter = Box<dyn Fn(&qdsim_core::models::dirac::BmtState) -> f64>;

fn run_bmt(s: &Scenario) -> Result<Outcome> {
    let r = |k: &str, d: f64| s.real("bmt", k).unwrap_or(d);
    let f = EMFieldConfig::new(
        vector(s, "bmt", "e_field"),
        vector(s, "bmt", "b_field"),
        r("charge", 1.0),
        r("mass", 1.0),
        r("c", 1.0),
    )
    .map_err(CliError::core("field configuration"))?;
    let xi = bloch(s, "bmt")?;
    let p0 = FourVector::on_shell(vector(s, "bmt", "p0"), f.mc());
    let step = s.integrator.step.unwrap_or(0.01);
    let run = bmt_evolve(&f, &p0, &xi, s.integrator.t_end, step, s.integrator.stride)
        .map_err(CliError::core("bmt: integration"))?;
    let states = run.trajectory.states();
    let mut traj = strip_states(&run.trajectory);
    let series: [(&str, BmtGetter); 7] = [
        ("xi1", Box::new(|b| b.xi.x())),
        ("xi2", Box::new(|b| b.xi.y())),
        ("xi3", Box::new(|b| b.xi.z())),
        ("p1", Box::new(|b| b.p.x.x)),
        ("p2", Box::new(|b| b.p.x.y)),
        ("p3", Box::new(|b| b.p.x.z)),
        ("lab_time", Box::new(|b| b.lab_time)),
    ];
    for (name, get) in series {
        traj.insert_series(name, states.iter().map(&get).collect()).map_err(CliError::core("series"))?;
    }
    let mut out = Outcome::new(traj, s.kind);
    out.check("pp_conservation", run.max_drift[0], BMT_DRIFT_TOL);
    out.check("pw_conservation", run.max_drift[1], BMT_DRIFT_TOL);
    out.metric("ww_drift", run.max_drift[2]);
    note_asymptote(&mut out, &f.qubit_params(), &xi);
    Ok(out)
}

fn neutrino_config(s: &Scenario) -> Result<NeutrinoConfig> {
    let mode = match s.text("neutrino", "mode") {
        Some("msw") => NeutrinoMode::Msw,
        _ => NeutrinoMode::Damping,
    };
    let mut c = NeutrinoConfig::with_mode(mode);
    let r = |k: &str| s.real("neutrino", k);
    if let Some(e) = r("energy_mev") {
        c.energy_gev = e / 1000.0;
    }
    c.theta12 = r("theta12").unwrap_or(c.theta12);
    c.dm2 = r("dm2").unwrap_or(c.dm2);
    c.eps = r("eps").unwrap_or(c.eps);
    c.r_sun = r("r_sun").unwrap_or(c.r_sun);
    c.potential_scale = r("potential_scale").unwrap_or(c.potential_scale);
    c.damping_direction = s.vector("neutrino", "damping_direction");
    c.validate().map_err(CliError::core("neutrino configuration"))?;
    Ok(c)
}

fn run_neutrino(s: &Scenario) -> Result<Outcome> {
    let c = neutrino_config(s)?;
    let psi0 = StateVector::basis(2, 0);
    let step = s.integrator.step.unwrap_or(0.25);
    let l_end = s.integrator.t_end;
    let traj = neutrino_evolve(&c, &psi0, l_end, step, s.integrator.stride)
        .map_err(CliError::core("neutrino: integration"))?;
    let norm_err = traj.series("norm_error").unwrap_or_default().iter().copied().fold(0.0, f64::max);
    let mut out = Outcome::new(strip_states(&traj), s.kind);
    out.check("norm_preservation", norm_err, 1e-8);
    let hi = c.cutoff.min(l_end.max(1.0));
    let mut points = vec![("l_c", c.resonance_point())];
    if c.mode == NeutrinoMode::Damping {
        points.insert(0, ("l_in", c.instability_point()));
    }
    for (name, found) in points {
        match found {
            Ok(l) if l <= hi => out.metric(name, l),
            Ok(_) | Err(_) => out.notes.push(format!("{name} not reached within the run")),
        }
    }
    let osc = c.oscillation_length();
    out.metric("oscillation_length", osc);
    let window = 10.0 * osc;
    if l_end > window {
        let (avg, _) = survival_average(&c, &psi0, l_end - window, l_end, step)
            .map_err(CliError::core("neutrino: survival average"))?;
        out.metric("p_ee_average_last_10_oscillations", avg);
    }
    out.notes.push("distances in km, energies in neV".into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_sample_times() {
        assert_eq!(sample_times(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sample_times(1.0, 0.3), vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        assert_eq!(sample_times(0.0, 1.0), vec![0.0]);
    }

    #[test]
    fn test_check_verdicts() {
        assert!(Check::new("a", 1e-9, 1e-8).passed());
        assert!(!Check::new("a", f64::NAN, 1e-8).passed());
    }
}
