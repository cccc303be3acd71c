//! Integrator health checks on the configured well: mass conservation along
//! the moving path, the exact phase rotation of a stationary state on the
//! frozen well, and the step-halving order of accuracy.

use crate::config::ExperimentSpec;
use crate::record::{RunOutput, RunRecord, Verdict};
use anyhow::Result;
use gp_adiabatic::evolve::conservation_report;
use gp_adiabatic::{evolve, EvolutionConfig, Field, Manifold, NormKind, PotentialPath};
use num_complex::Complex64;

pub const MASS_DRIFT_LIMIT: f64 = 1e-8;
pub const PHASE_ERROR_LIMIT: f64 = 1e-6;
pub const ORDER_FLOOR: f64 = 1.9;

fn final_field(
    spec: &ExperimentSpec,
    path: &PotentialPath<f64>,
    psi0: &Field<f64>,
    epsilon: f64,
    s_end: f64,
    dt: f64,
) -> Result<Field<f64>> {
    let mut config = EvolutionConfig::new(epsilon, s_end);
    config.dt_internal = dt;
    Ok(evolve(path, spec.sign(), &config, psi0)?.final_field().clone())
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let manifold = spec.manifold()?;
    let mut record = RunRecord::new(spec);
    let epsilon = spec.epsilons[0];
    let eta = match spec.eta {
        Some(eta) => eta,
        None => manifold.default_eta(0.1)?,
    };
    let psi0 = manifold.at_mass(eta, 0.0, None)?.field;

    let mut config = EvolutionConfig::new(epsilon, spec.s_end).uniform_samples(50);
    config.dt_internal = epsilon / 200.0;
    let traj = evolve(manifold.path(), spec.sign(), &config, &psi0)?;
    let report = conservation_report(&traj);
    let drift = report.max_mass_drift / report.mass[0];
    record.verdicts.push(Verdict::new(
        "mass drifts only at round-off",
        drift <= MASS_DRIFT_LIMIT,
        drift,
        MASS_DRIFT_LIMIT,
    ));

    // frozen well: the branch state must rotate by exactly e^{iEs/ε}
    let frozen = PotentialPath::frozen(spec.potential.depth[0], spec.potential.width[0]);
    let frozen_manifold = Manifold::new(manifold.grid(), frozen, spec.sign());
    let st = frozen_manifold.at_mass(eta, 0.0, None)?;
    let s_orbit = spec.s_end.min(0.25);
    let evolved = final_field(spec, &frozen, &st.field, epsilon, s_orbit, epsilon / 2000.0)?;
    let expected = st
        .field
        .scale(Complex64::from_polar(1.0, st.energy * s_orbit / epsilon));
    let phase_err =
        evolved.sub(&expected).norm(NormKind::L2)? / st.field.norm(NormKind::L2)?;
    record.verdicts.push(Verdict::new(
        "stationary orbit carries the energy phase",
        phase_err <= PHASE_ERROR_LIMIT,
        phase_err,
        PHASE_ERROR_LIMIT,
    ));

    // step-halving order on the moving path
    let s_rich = spec.s_end.min(0.25);
    let path = manifold.path();
    let coarse = final_field(spec, path, &psi0, epsilon, s_rich, epsilon / 100.0)?;
    let mid = final_field(spec, path, &psi0, epsilon, s_rich, epsilon / 200.0)?;
    let fine = final_field(spec, path, &psi0, epsilon, s_rich, epsilon / 400.0)?;
    let d1 = coarse.sub(&mid).norm(NormKind::L2)?;
    let d2 = mid.sub(&fine).norm(NormKind::L2)?;
    let order = if d1 > 0.0 && d2 > 0.0 { (d1 / d2).log2() } else { f64::NAN };
    record.verdicts.push(Verdict::new(
        "step halving converges at second order",
        order >= ORDER_FLOOR,
        order,
        ORDER_FLOOR,
    ));

    record.scalar("epsilon", epsilon);
    record.scalar("eta", eta);
    record.scalar("mass_drift", drift);
    record.scalar("phase_error", phase_err);
    record.scalar_finite("richardson_order", order);
    record.scalar("defect_coarse_vs_mid", d1);
    record.scalar("defect_mid_vs_fine", d2);

    Ok(RunOutput::new(record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentKind, ExperimentSpec};

    #[test]
    fn default_evolution_run_passes_at_lab_resolution() {
        let mut spec = ExperimentSpec::default_for(ExperimentKind::EvolutionRun);
        spec.s_end = 0.25;
        let out = run(&spec).unwrap();
        for v in &out.record.verdicts {
            assert!(v.pass, "failed: {} ({:?} vs {:?})", v.name, v.measured, v.bound);
        }
        assert!(out.record.scalars["richardson_order"] < 2.6);
    }
}
