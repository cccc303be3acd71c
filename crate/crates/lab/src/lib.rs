//! Experiment harness around the adiabatic Gross–Pitaevskii core: a spec
//! describes one experiment (grid, well path, nonlinearity sign, ε ladder),
//! a runner executes it into a [`record::RunRecord`] plus CSV tables, and
//! every run emits the same file set (`summary.json`, `trace.csv`,
//! `audit.csv`) so downstream tooling never has to guess.

pub mod audit;
pub mod config;
pub mod convcheck;
pub mod dispersive;
pub mod emit;
pub mod evolution;
pub mod groundstate;
pub mod record;
pub mod sweep;

pub use config::{ExperimentKind, ExperimentSpec};
pub use record::{RunOutput, RunRecord, Verdict};

/// Run the experiment the spec's kind selects.
pub fn dispatch(spec: &ExperimentSpec) -> anyhow::Result<RunOutput> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::AdiabaticSweep => sweep::run(spec),
        ExperimentKind::DispersiveProbe => dispersive::run(spec),
        ExperimentKind::ConvolutionCheck => convcheck::run(spec),
        ExperimentKind::HypothesisAudit => audit::run(spec),
        ExperimentKind::GroundstateBuild => groundstate::run(spec),
        ExperimentKind::EvolutionRun => evolution::run(spec),
    }
}
