//! Ground-state branch construction with its independent cross-checks: the
//! bifurcation ladder scalings near the linear level, the constant-mass curve
//! over the slow-time interval, and an energy-transport ODE solved by a route
//! that never imposes the mass constraint.

use crate::config::ExperimentSpec;
use crate::record::{RunOutput, RunRecord, SlopeReport, Verdict};
use anyhow::Result;
use gp_adiabatic::fitting::log_log_fit;
use gp_adiabatic::modulation::newton_basin_radius;
use gp_adiabatic::{Field, NormKind};

pub const CURVE_NODES: usize = 41;
pub const LADDER_POINTS: usize = 6;
pub const RESIDUAL_LIMIT: f64 = 1e-10;
pub const MASS_ERROR_LIMIT: f64 = 1e-8;
pub const ODE_DEVIATION_LIMIT: f64 = 1e-6;

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let manifold = spec.manifold()?;
    let mut record = RunRecord::new(spec);

    let op0 = manifold.linear_operator(0.0);
    let bs0 = op0.bound_state()?;
    let e_lin = -bs0.energy;
    let b = spec.sign().as_scalar::<f64>();

    let mut offsets = Vec::with_capacity(LADDER_POINTS);
    let mut masses = Vec::with_capacity(LADDER_POINTS);
    let mut pc_norms = Vec::with_capacity(LADDER_POINTS);
    let mut residual_sup = 0.0_f64;
    let mut warm: Option<Field<f64>> = None;
    for k in 0..LADDER_POINTS {
        let off = 0.2 * 0.5_f64.powi(k as i32);
        let state = manifold.stationary(e_lin * (1.0 - b * off), 0.0, warm.as_ref())?;
        residual_sup = residual_sup.max(state.residual);
        offsets.push(e_lin * off);
        masses.push(state.mass);
        pc_norms.push(
            op0.project_continuous(&bs0, &state.field)
                .norm(NormKind::L2)?,
        );
        warm = Some(state.field);
    }
    let mass_fit = SlopeReport::from_fit(
        "ladder mass vs distance to the linear level",
        log_log_fit(&offsets, &masses),
    );
    let pc_fit = SlopeReport::from_fit(
        "ladder continuum component vs distance to the linear level",
        log_log_fit(&offsets, &pc_norms),
    );
    record.verdicts.push(mass_fit.verdict_within(0.95, 1.05));
    record.verdicts.push(pc_fit.verdict_at_least(1.4));
    record.slopes.push(mass_fit);
    record.slopes.push(pc_fit);

    let eta = match spec.eta {
        Some(eta) => eta,
        None => manifold.default_eta(0.1)?,
    };
    let curve = manifold.constant_mass_curve(eta, CURVE_NODES)?;
    for st in &curve.states {
        residual_sup = residual_sup.max(st.residual);
    }
    record.verdicts.push(Verdict::new(
        "stationary residual stays at solver precision",
        residual_sup <= RESIDUAL_LIMIT,
        residual_sup,
        RESIDUAL_LIMIT,
    ));
    let mass_err = curve.worst_mass_error();
    record.verdicts.push(Verdict::new(
        "constant-mass curve holds its mass",
        mass_err <= MASS_ERROR_LIMIT,
        mass_err,
        MASS_ERROR_LIMIT,
    ));

    let ode = manifold.integrate_energy_ode(curve.states[0].energy, CURVE_NODES - 1)?;
    let mut ode_dev = 0.0_f64;
    for (node, state) in ode.iter().zip(&curve.states) {
        ode_dev = ode_dev.max((node.1 - state.energy).abs());
    }
    record.verdicts.push(Verdict::new(
        "energy transport ODE reproduces the root-found branch",
        ode_dev <= ODE_DEVIATION_LIMIT,
        ode_dev,
        ODE_DEVIATION_LIMIT,
    ));

    let basin = newton_basin_radius(&manifold, curve.states[0].energy, 0.0)?;
    record.verdicts.push(Verdict::new(
        "shadow-fit Newton basin is comfortably wide",
        basin >= 0.1,
        basin,
        0.1,
    ));

    record.scalar("e_lin", e_lin);
    record.scalar("eta", eta);
    record.scalar("e0", curve.states[0].energy);
    record.scalar("e_end", curve.states[curve.len() - 1].energy);
    record.scalar("residual_sup", residual_sup);
    record.scalar("curve_mass_error", mass_err);
    record.scalar("ode_deviation", ode_dev);
    record.scalar("newton_basin_radius", basin);
    record.scalar("min_nondegeneracy", curve.min_nondegeneracy());

    Ok(RunOutput::new(record))
}
