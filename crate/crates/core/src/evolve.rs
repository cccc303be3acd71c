//! Time integration of i ε ∂ₛΨ = −ΔΨ + V_sΨ + b|Ψ|²Ψ.
//!
//! The stiffness sits entirely in the 1/ε phase rates, so both integrators are
//! implicit in the linear part: the default is Strang splitting — a
//! Crank–Nicolson half step of −Δ + V around an exact pointwise rotation
//! e^{−i(dt/ε)b|Ψ|²} — and the alternative is a full Crank–Nicolson step with
//! the nonlinear potential frozen at the midpoint by a predictor pass. Both
//! conserve the discrete mass to round-off and are second order in dt.

use crate::grid::{DomainError, Field, RadialGrid};
use crate::ground::gp_energy;
use crate::potential::PotentialPath;
use crate::scalar::Real;
use crate::tridiag::{PivLu, SymTridiag, TridiagError};
use crate::NonlinSign;
use num_complex::Complex;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("invalid evolution config: {0}")]
    InvalidConfig(&'static str),
    #[error("dt = {dt:e} exceeds the stability guard {limit:e} at s = {s}")]
    StabilityRejected { s: f64, dt: f64, limit: f64 },
    #[error("state became non-finite at s = {s}")]
    NonFinite { s: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerical(#[from] TridiagError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    StrangSplit,
    CrankNicolsonImex,
}

/// Phase advance per step allowed by the guard, in radians of the slow
/// (non-stiff) potential and nonlinear rates; the kinetic rate is handled
/// implicitly and does not enter.
const GUARD_PHASE: f64 = 0.1;
/// How far below dt_internal the guard may push a segment's step before the
/// run is rejected instead.
const ADAPTIVITY_FLOOR: f64 = 64.0;

#[derive(Clone, Debug)]
pub struct EvolutionConfig<T> {
    pub epsilon: T,
    /// Micro step in s-units; segments between samples subdivide it evenly.
    pub dt_internal: T,
    pub integrator: Integrator,
    pub s_span: (T, T),
    pub sample_times: Vec<T>,
}

impl<T: Real> EvolutionConfig<T> {
    /// Default configuration: dt = ε/200, Strang splitting, span [0, s_end],
    /// a single sample at the endpoint.
    pub fn new(epsilon: T, s_end: T) -> Self {
        Self {
            epsilon,
            dt_internal: epsilon / T::of(200.0),
            integrator: Integrator::StrangSplit,
            s_span: (T::zero(), s_end),
            sample_times: vec![s_end],
        }
    }

    /// Replace the sample list with k+1 evenly spaced times covering the span.
    pub fn uniform_samples(mut self, k: usize) -> Self {
        let (a, b) = self.s_span;
        let k = k.max(1);
        self.sample_times = (0..=k)
            .map(|i| a + (b - a) * T::of(i as f64) / T::of(k as f64))
            .collect();
        self
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        let one = T::one();
        if !(self.epsilon > T::zero() && self.epsilon <= one) {
            return Err(EvolveError::InvalidConfig("epsilon must lie in (0, 1]"));
        }
        if !(self.dt_internal > T::zero()) || !self.dt_internal.is_finite() {
            return Err(EvolveError::InvalidConfig("dt_internal must be positive"));
        }
        let (a, b) = self.s_span;
        if !(a >= T::zero() && a < b && b <= one) {
            return Err(EvolveError::InvalidConfig("s_span must satisfy 0 ≤ a < b ≤ 1"));
        }
        if self.sample_times.is_empty() {
            return Err(EvolveError::InvalidConfig("sample_times must be non-empty"));
        }
        let mut prev = a;
        for (i, &t) in self.sample_times.iter().enumerate() {
            if t < prev || t > b || (i > 0 && t == prev) {
                return Err(EvolveError::InvalidConfig(
                    "sample_times must increase strictly inside s_span",
                ));
            }
            prev = t;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Sample<T> {
    pub s: T,
    pub field: Field<T>,
    pub mass: T,
    /// Gross–Pitaevskii energy; recorded only when the potential is frozen,
    /// where it is a conserved quantity.
    pub energy: Option<T>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub epsilon: T,
    pub samples: Vec<Sample<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|p| p.s).collect()
    }

    pub fn final_field(&self) -> &Field<T> {
        &self.samples.last().expect("trajectory is never empty").field
    }
}

#[derive(Clone, Debug)]
pub struct ConservationReport<T> {
    pub mass: Vec<T>,
    pub energy: Vec<T>,
    /// max_k |mass_k − mass_0|
    pub max_mass_drift: T,
    /// max_k |I_k − I_0| / max(|I_0|, 1e−30); zero when energy is not tracked.
    pub max_energy_drift: T,
}

pub fn conservation_report<T: Real>(traj: &Trajectory<T>) -> ConservationReport<T> {
    let mass: Vec<T> = traj.samples.iter().map(|p| p.mass).collect();
    let energy: Vec<T> = traj.samples.iter().filter_map(|p| p.energy).collect();
    let drift = |xs: &[T]| {
        xs.split_first().map_or(T::zero(), |(&x0, rest)| {
            rest.iter().fold(T::zero(), |acc, &x| acc.max((x - x0).abs()))
        })
    };
    let max_mass_drift = drift(&mass);
    let max_energy_drift = if energy.is_empty() {
        T::zero()
    } else {
        drift(&energy) / energy[0].abs().max(T::of(1e-30))
    };
    ConservationReport { mass, energy, max_mass_drift, max_energy_drift }
}

/// Integrate the equation from `psi0` at `config.s_span.0`, returning fields
/// at exactly the requested sample times.
pub fn evolve<T: Real>(
    path: &PotentialPath<T>,
    sign: NonlinSign,
    config: &EvolutionConfig<T>,
    psi0: &Field<T>,
) -> Result<Trajectory<T>, EvolveError> {
    config.validate()?;
    let grid = psi0.grid().clone();
    let s0 = config.s_span.0;
    if !psi0.is_finite() {
        return Err(EvolveError::NonFinite { s: s0.to_f64().unwrap_or(f64::NAN) });
    }
    let autonomous = path.is_autonomous();
    let mut u = psi0.u().to_vec();
    let mut samples = Vec::with_capacity(config.sample_times.len());
    let mut s_left = s0;
    for &target in &config.sample_times {
        let seg = target - s_left;
        if seg > T::zero() {
            let dt = guarded_step(path, sign, config, &grid, &u, s_left, target)?;
            let n_steps = (seg / dt).ceil().to_f64().unwrap_or(1.0).max(1.0) as usize;
            let dt_seg = seg / T::of(n_steps as f64);
            for k in 0..n_steps {
                let s_k = s_left + seg * T::of(k as f64) / T::of(n_steps as f64);
                match config.integrator {
                    Integrator::StrangSplit => {
                        strang_step(path, sign, &grid, config.epsilon, s_k, dt_seg, &mut u)?
                    }
                    Integrator::CrankNicolsonImex => {
                        imex_step(path, sign, &grid, config.epsilon, s_k, dt_seg, &mut u)?
                    }
                }
            }
        }
        s_left = target;
        let field = Field::from_u(&grid, u.clone())
            .map_err(|_| EvolveError::NonFinite { s: target.to_f64().unwrap_or(f64::NAN) })?;
        let mass = field.norm(crate::grid::NormKind::L2)?.powi(2);
        let energy = autonomous.then(|| gp_energy(&field, &path.sample(&grid, target), sign));
        samples.push(Sample { s: target, field, mass, energy });
    }
    Ok(Trajectory { epsilon: config.epsilon, samples })
}

/// Slow phase-rate guard: the step must keep (|V| + |b||Ψ|²)·dt/ε below
/// GUARD_PHASE radians. Returns the (possibly reduced) step for the segment or
/// rejects when the reduction would exceed the adaptivity floor.
fn guarded_step<T: Real>(
    path: &PotentialPath<T>,
    _sign: NonlinSign,
    config: &EvolutionConfig<T>,
    grid: &Arc<RadialGrid<T>>,
    u: &[Complex<T>],
    s_a: T,
    s_b: T,
) -> Result<T, EvolveError> {
    let vmax = |s: T| {
        path.sample(grid, s)
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    };
    let amp = u
        .iter()
        .zip(grid.nodes())
        .fold(T::zero(), |acc, (z, &r)| acc.max(z.norm_sqr() / (r * r)));
    let rate = vmax(s_a).max(vmax(s_b)) + amp;
    let limit = T::of(GUARD_PHASE) * config.epsilon / rate.max(T::of(1e-30));
    let dt = config.dt_internal.min(limit);
    if dt < config.dt_internal / T::of(ADAPTIVITY_FLOOR) {
        return Err(EvolveError::StabilityRejected {
            s: s_a.to_f64().unwrap_or(f64::NAN),
            dt: config.dt_internal.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(dt)
}

/// One Crank–Nicolson substep of duration tau for H = −Δ + diag(w):
/// (I + i·tau/(2ε)·H) u⁺ = (I − i·tau/(2ε)·H) u.
fn cn_substep<T: Real>(
    grid: &RadialGrid<T>,
    w: &[T],
    epsilon: T,
    tau: T,
    u: &mut Vec<Complex<T>>,
) -> Result<(), TridiagError> {
    let h = grid.spacing();
    let inv_h2 = T::one() / (h * h);
    let alpha = tau / (T::of(2.0) * epsilon);
    let ham = SymTridiag {
        diag: w.iter().map(|&wi| T::of(2.0) * inv_h2 + wi).collect(),
        off: vec![-inv_h2; grid.n_points() - 1],
    };
    let hu = ham.apply_complex(u);
    let ia = Complex::new(T::zero(), alpha);
    let rhs: Vec<Complex<T>> = u.iter().zip(&hu).map(|(&ui, &hi)| ui - ia * hi).collect();
    let diag: Vec<Complex<T>> = ham
        .diag
        .iter()
        .map(|&d| Complex::new(T::one(), T::zero()) + ia * d)
        .collect();
    let off: Vec<Complex<T>> = ham.off.iter().map(|&e| ia * e).collect();
    *u = PivLu::<Complex<T>, T>::factor(&diag, &off)?.solve(&rhs);
    Ok(())
}

/// Exact rotation by the local nonlinear phase over duration dt.
fn nonlinear_phase<T: Real>(
    grid: &RadialGrid<T>,
    sign: NonlinSign,
    epsilon: T,
    dt: T,
    u: &mut [Complex<T>],
) {
    let b = sign.as_scalar::<T>();
    for (ui, &r) in u.iter_mut().zip(grid.nodes()) {
        let dens = ui.norm_sqr() / (r * r);
        let theta = -(dt / epsilon) * b * dens;
        *ui = *ui * Complex::new(theta.cos(), theta.sin());
    }
}

fn strang_step<T: Real>(
    path: &PotentialPath<T>,
    sign: NonlinSign,
    grid: &Arc<RadialGrid<T>>,
    epsilon: T,
    s: T,
    dt: T,
    u: &mut Vec<Complex<T>>,
) -> Result<(), TridiagError> {
    let half = dt / T::of(2.0);
    let quarter = dt / T::of(4.0);
    let v1 = path.sample(grid, s + quarter);
    cn_substep(grid, &v1, epsilon, half, u)?;
    nonlinear_phase(grid, sign, epsilon, dt, u);
    let v2 = path.sample(grid, s + T::of(3.0) * quarter);
    cn_substep(grid, &v2, epsilon, half, u)
}

fn imex_step<T: Real>(
    path: &PotentialPath<T>,
    sign: NonlinSign,
    grid: &Arc<RadialGrid<T>>,
    epsilon: T,
    s: T,
    dt: T,
    u: &mut Vec<Complex<T>>,
) -> Result<(), TridiagError> {
    let b = sign.as_scalar::<T>();
    let v_mid = path.sample(grid, s + dt / T::of(2.0));
    let dens = |vec: &[Complex<T>]| -> Vec<T> {
        vec.iter()
            .zip(grid.nodes())
            .map(|(z, &r)| b * z.norm_sqr() / (r * r))
            .collect()
    };
    let w0 = dens(u);
    let eff0: Vec<T> = v_mid.iter().zip(&w0).map(|(&v, &w)| v + w).collect();
    let mut pred = u.clone();
    cn_substep(grid, &eff0, epsilon, dt, &mut pred)?;
    let w1 = dens(&pred);
    let eff: Vec<T> = v_mid
        .iter()
        .zip(w0.iter().zip(&w1))
        .map(|(&v, (&a, &c))| v + (a + c) / T::of(2.0))
        .collect();
    cn_substep(grid, &eff, epsilon, dt, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NormKind;
    use crate::ground::Manifold;
    use crate::potential::Quadratic;
    use crate::synth;
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Arc<RadialGrid<f64>> {
        RadialGrid::new(24.0, 480).unwrap()
    }

    fn moving_path() -> PotentialPath<f64> {
        PotentialPath::new(
            Quadratic { c0: 1.4, c1: 0.12, c2: -0.06 },
            Quadratic { c0: 2.0, c1: 0.05, c2: 0.0 },
        )
    }

    fn ground_state(path: PotentialPath<f64>) -> (Manifold<f64>, Field<f64>, f64) {
        let m = Manifold::new(&grid(), path, NonlinSign::Defocusing);
        let e_lin = -m.linear_operator(0.0).bound_state().unwrap().energy;
        let st = m.stationary(0.85 * e_lin, 0.0, None).unwrap();
        let (field, e) = (st.field.clone(), st.energy);
        (m, field, e)
    }

    fn fitted_phase(reference: &Field<f64>, state: &Field<f64>) -> f64 {
        reference.inner(state).unwrap().arg()
    }

    #[test]
    fn config_validation_catches_bad_inputs() {
        let mut c = EvolutionConfig::new(0.5, 0.4);
        assert!(c.validate().is_ok());
        c.epsilon = 0.0;
        assert!(matches!(c.validate(), Err(EvolveError::InvalidConfig(_))));
        c.epsilon = 0.5;
        c.sample_times = vec![0.3, 0.2];
        assert!(matches!(c.validate(), Err(EvolveError::InvalidConfig(_))));
        c.sample_times = vec![0.7];
        assert!(matches!(c.validate(), Err(EvolveError::InvalidConfig(_))));
    }

    #[test]
    fn samples_land_exactly_on_requested_times() {
        let (_, psi0, _) = ground_state(moving_path());
        let config = EvolutionConfig::new(0.5, 0.3).uniform_samples(4);
        let traj = evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0).unwrap();
        assert_eq!(traj.times(), config.sample_times);
        assert_eq!(traj.len(), 5);
        assert_eq!(*traj.times().last().unwrap(), 0.3);
    }

    #[test]
    fn mass_is_conserved_to_round_off() {
        let (_, psi0, _) = ground_state(moving_path());
        for integrator in [Integrator::StrangSplit, Integrator::CrankNicolsonImex] {
            let mut config = EvolutionConfig::new(0.25, 0.3).uniform_samples(6);
            config.integrator = integrator;
            let traj = evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0).unwrap();
            let report = conservation_report(&traj);
            assert!(
                report.max_mass_drift < 1e-12 * report.mass[0],
                "{integrator:?}: drift {}",
                report.max_mass_drift
            );
        }
    }

    #[test]
    fn autonomous_energy_drifts_at_second_order() {
        let path = PotentialPath::frozen(1.4, 2.0);
        let (_, psi0, _) = ground_state(path);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bump = synth::random_smooth_complex(&grid(), &mut rng, 6);
        let excited = psi0.axpy(0.05, &bump);
        let mut drifts = [0.0; 2];
        for (k, steps) in [200.0, 400.0].into_iter().enumerate() {
            let mut config = EvolutionConfig::new(0.25, 0.2).uniform_samples(4);
            config.dt_internal = 0.2 / steps;
            let traj = evolve(&path, NonlinSign::Defocusing, &config, &excited).unwrap();
            drifts[k] = conservation_report(&traj).max_energy_drift;
        }
        assert!(drifts[0] < 1e-6, "coarse drift {}", drifts[0]);
        let order = (drifts[0] / drifts[1]).log2();
        assert!(order > 1.7, "energy drift order {order}");
    }

    #[test]
    fn stationary_state_rotates_by_the_exact_phase() {
        let path = PotentialPath::frozen(1.4, 2.0);
        let (_, psi0, e) = ground_state(path);
        let eps = 0.25;
        let mut config = EvolutionConfig::new(eps, 0.2).uniform_samples(4);
        config.dt_internal = eps / 2000.0;
        let traj = evolve(&path, NonlinSign::Defocusing, &config, &psi0).unwrap();
        let norm0 = psi0.norm(NormKind::L2).unwrap();
        for p in &traj.samples {
            let expected = Complex::from_polar(1.0, e * p.s / eps);
            let err = p
                .field
                .sub(&psi0.scale(expected))
                .norm(NormKind::L2)
                .unwrap();
            assert!(err < 1e-6 * norm0, "s = {}: phase error {err}", p.s);
        }
    }

    #[test]
    fn tiny_amplitude_limit_matches_the_linear_eigenstate_flow() {
        let path = PotentialPath::frozen(1.4, 2.0);
        let g = grid();
        let op = crate::SchrodingerOperator::new(&g, path.sample(&g, 0.0)).unwrap();
        let bs = op.bound_state().unwrap();
        let amp = 1e-4;
        let psi0 = bs.field.scale_re(amp);
        let eps = 0.25;
        let mut config = EvolutionConfig::new(eps, 0.2).uniform_samples(2);
        config.dt_internal = eps / 4000.0;
        let traj = evolve(&path, NonlinSign::Defocusing, &config, &psi0).unwrap();
        for p in &traj.samples {
            // i ε ∂ₛΨ = λ₀Ψ with λ₀ = bs.energy < 0 ⇒ Ψ = e^{−iλ₀s/ε}ψ₀
            let expected = Complex::from_polar(1.0, -bs.energy * p.s / eps);
            let err = p.field.sub(&psi0.scale(expected)).norm(NormKind::L2).unwrap();
            assert!(err < 1e-6 * amp, "s = {}: {err}", p.s);
        }
    }

    #[test]
    fn global_phase_covariance_is_exact() {
        let (_, psi0, _) = ground_state(moving_path());
        let theta = Complex::from_polar(1.0, 0.6180339887);
        let config = EvolutionConfig::new(0.25, 0.25);
        let a = evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0).unwrap();
        let b = evolve(
            &moving_path(),
            NonlinSign::Defocusing,
            &config,
            &psi0.scale(theta),
        )
        .unwrap();
        let diff = b
            .final_field()
            .sub(&a.final_field().scale(theta))
            .norm(NormKind::L2)
            .unwrap();
        assert!(diff < 1e-10, "gauge defect {diff}");
    }

    #[test]
    fn reversed_path_run_undoes_the_forward_run() {
        let (_, psi0, _) = ground_state(moving_path());
        let s_end = 0.3;
        let config = EvolutionConfig::new(0.25, s_end);
        let fwd = evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0).unwrap();
        let conj = fwd.final_field().conj();
        let back = evolve(
            &moving_path().reversed(s_end),
            NonlinSign::Defocusing,
            &config,
            &conj,
        )
        .unwrap();
        let returned = back.final_field().conj();
        let err = returned.sub(&psi0).norm(NormKind::L2).unwrap();
        assert!(err < 1e-10, "reversal defect {err}");
    }

    #[test]
    fn richardson_order_is_at_least_two_for_both_integrators() {
        let (_, psi0, _) = ground_state(moving_path());
        for integrator in [Integrator::StrangSplit, Integrator::CrankNicolsonImex] {
            let run = |steps: f64| {
                let mut config = EvolutionConfig::new(0.25, 0.2);
                config.integrator = integrator;
                config.dt_internal = 0.2 / steps;
                evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0)
                    .unwrap()
                    .final_field()
                    .clone()
            };
            let (a, b, c) = (run(100.0), run(200.0), run(400.0));
            let e1 = a.sub(&b).norm(NormKind::L2).unwrap();
            let e2 = b.sub(&c).norm(NormKind::L2).unwrap();
            let order = (e1 / e2).log2();
            assert!(order > 1.9, "{integrator:?}: order {order}");
        }
    }

    #[test]
    fn the_two_integrators_converge_to_each_other() {
        let (_, psi0, _) = ground_state(moving_path());
        let run = |integrator, steps: f64| {
            let mut config = EvolutionConfig::new(0.25, 0.2);
            config.integrator = integrator;
            config.dt_internal = 0.2 / steps;
            evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0)
                .unwrap()
                .final_field()
                .clone()
        };
        let d1 = run(Integrator::StrangSplit, 100.0)
            .sub(&run(Integrator::CrankNicolsonImex, 100.0))
            .norm(NormKind::L2)
            .unwrap();
        let d2 = run(Integrator::StrangSplit, 200.0)
            .sub(&run(Integrator::CrankNicolsonImex, 200.0))
            .norm(NormKind::L2)
            .unwrap();
        assert!(d1 < 1e-4, "coarse disagreement {d1}");
        let order = (d1 / d2).log2();
        assert!(order > 1.7, "mutual order {order}");
    }

    #[test]
    fn accumulated_phase_matches_the_energy_integral() {
        let path = PotentialPath::frozen(1.4, 2.0);
        let (_, psi0, e) = ground_state(path);
        let eps = 0.25;
        let mut config = EvolutionConfig::new(eps, 0.3).uniform_samples(6);
        config.dt_internal = eps / 4000.0;
        let traj = evolve(&path, NonlinSign::Defocusing, &config, &psi0).unwrap();
        for p in &traj.samples {
            let measured = fitted_phase(&psi0, &p.field);
            let predicted = (e * p.s / eps).rem_euclid(2.0 * std::f64::consts::PI);
            let wrapped = (measured - predicted + std::f64::consts::PI)
                .rem_euclid(2.0 * std::f64::consts::PI)
                - std::f64::consts::PI;
            assert!(wrapped.abs() < 1e-5, "s = {}: phase defect {wrapped}", p.s);
        }
    }

    #[test]
    fn zero_field_reports_all_zero_diagnostics() {
        let config = EvolutionConfig::new(0.5, 0.2).uniform_samples(2);
        let traj = evolve(
            &PotentialPath::frozen(1.4, 2.0),
            NonlinSign::Defocusing,
            &config,
            &Field::zero(&grid()),
        )
        .unwrap();
        let report = conservation_report(&traj);
        assert_eq!(report.max_mass_drift, 0.0);
        assert_eq!(report.max_energy_drift, 0.0);
        assert!(report.mass.iter().all(|&m| m == 0.0));
        assert!(report.energy.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn oversized_steps_trip_the_stability_guard() {
        let (_, psi0, _) = ground_state(moving_path());
        let mut config = EvolutionConfig::new(0.001, 0.5);
        config.dt_internal = 0.4;
        assert!(matches!(
            evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0),
            Err(EvolveError::StabilityRejected { .. })
        ));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let g = grid();
        let mut u = vec![Complex::new(0.0, 0.0); g.n_points()];
        u[3] = Complex::new(f64::NAN, 0.0);
        let bad = Field::from_u(&g, u);
        assert!(bad.is_err());
        let config = EvolutionConfig::new(0.5, 0.2);
        let psi0 = Field::zero(&g);
        assert!(evolve(&moving_path(), NonlinSign::Defocusing, &config, &psi0).is_ok());
    }
}
