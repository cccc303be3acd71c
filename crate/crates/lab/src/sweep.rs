//! Adiabatic ε-sweep: evolve the branch state across a ladder of ε, fit the
//! shadow parameters along every trajectory, and check that each tracking
//! error scales with the exponent the adiabatic estimates predict.
//!
//! Two slope gates depend on how the branch starts.  When ∂ₛV|₀ ≠ 0 the
//! refined remainder opens with an O(ε) layer, so the sup of its H² norm
//! scales like ε and is gated at slope 1; the weighted norm is layer-dominated
//! too, so its sharper decay is only reported.  When the initial drift
//! vanishes (L₀⁻¹P₀^c∂ₛψ|₀ = 0) the layer is absent, the weighted sup drops
//! to ε² and is gated at slope ≥ 1.5, while the H² slope is reported only.
//!
//! Runs for different ε are independent and execute concurrently; each one is
//! internally sequential, so the output bytes do not depend on scheduling.

use crate::config::ExperimentSpec;
use crate::record::{EpsSummary, RunOutput, RunRecord, SlopeReport, TraceRow, Verdict};
use anyhow::{Context, Result};
use gp_adiabatic::evolve::conservation_report;
use gp_adiabatic::fitting::log_log_fit;
use gp_adiabatic::modulation;
use gp_adiabatic::{
    evolve, EvolutionConfig, Field, GroundState, GroundStateCurve, Linearization, Manifold,
    NormKind, PairField,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// The weighted remainder has settled onto its bulk envelope past this s.
pub const POST_LAYER_S: f64 = 0.1;
/// steps × grid points above which the horizon falls back to s_end = 0.25.
const WORK_LIMIT: f64 = 5e8;
pub const CURVE_NODES: usize = 41;

/// Micro step: fine enough for the fast phase and for the splitting error to
/// stay below the ε² structures the sweep is trying to resolve.
pub fn sweep_dt(epsilon: f64) -> f64 {
    (epsilon / 200.0).min(0.3 * epsilon.powf(2.5))
}

struct EpsOutcome {
    summary: EpsSummary,
    rows: Vec<TraceRow>,
    flags: Vec<String>,
}

/// ‖L₀⁻¹P₀^c(∂ₛψ|₀, 0)‖_{H²}: the size of the initial layer the refined
/// remainder must burn off.  Exactly zero on the degenerate branch.
pub fn layer_coefficient(manifold: &Manifold<f64>, state: &GroundState<f64>) -> Result<f64> {
    let lin = Linearization::new(manifold, state.clone())?;
    let rhs = PairField {
        re: manifold.dpsi_ds(state)?,
        im: Field::zero(manifold.grid()),
    };
    let w = lin.solve_on_range(&lin.project_continuous(&rhs))?;
    Ok(w.norm(NormKind::H2)?)
}

/// Angle between the evolved state and the branch state as unit rays: the
/// operator-norm distance between their rank-one orthogonal projectors.
pub fn projector_distance(a: &gp_adiabatic::Field64, b: &gp_adiabatic::Field64) -> Result<f64> {
    let na = a.norm(NormKind::L2)?;
    let nb = b.norm(NormKind::L2)?;
    if na == 0.0 || nb == 0.0 {
        return Ok(if na == nb { 0.0 } else { 1.0 });
    }
    let c = a.inner(b)?.norm() / (na * nb);
    Ok((1.0 - (c * c).min(1.0)).max(0.0).sqrt())
}

fn run_epsilon(
    spec: &ExperimentSpec,
    manifold: &Manifold<f64>,
    curve: &GroundStateCurve<f64>,
    epsilon: f64,
) -> Result<EpsOutcome> {
    let mut flags = Vec::new();
    let dt = sweep_dt(epsilon);
    let mut s_end = spec.s_end;
    let work = (s_end / dt) * manifold.grid().n_points() as f64;
    if work > WORK_LIMIT {
        s_end = spec.s_end.min(0.25);
        flags.push(format!(
            "epsilon {epsilon:e}: horizon truncated to s_end = {s_end} (work estimate {work:e})"
        ));
    }
    let n_samples = ((spec.samples_per_unit_s as f64) * s_end).ceil().max(1.0) as usize;
    let mut config = EvolutionConfig::new(epsilon, s_end).uniform_samples(n_samples);
    config.dt_internal = dt;

    let psi0 = curve.states[0].field.clone();
    let traj = evolve(manifold.path(), spec.sign(), &config, &psi0)
        .context("time integration failed")?;
    let trace = modulation::trace(manifold, curve, &traj, spec.sigma)
        .context("shadow-parameter fit failed")?;

    let mut rows = Vec::with_capacity(traj.len());
    let mut warm: Option<GroundState<f64>> = Some(curve.states[0].clone());
    let mut sup_err_h2 = 0.0_f64;
    let mut sup_err_proj = 0.0_f64;
    let mut sup_e_dev = 0.0_f64;
    let mut sup_gammadot = 0.0_f64;
    let mut sup_w_postlayer = 0.0_f64;
    for (p, rec) in traj.samples.iter().zip(&trace.records) {
        let reference = manifold
            .at_mass(curve.eta, p.s, warm.as_ref())
            .context("branch reference solve failed")?;
        let theta = reference.field.inner(&p.field)?.arg();
        let err_h2 = p
            .field
            .sub(&reference.field.scale(Complex64::from_polar(1.0, theta)))
            .norm(NormKind::H2)?;
        let err_proj = projector_distance(&p.field, &reference.field)?;
        sup_err_h2 = sup_err_h2.max(err_h2);
        sup_err_proj = sup_err_proj.max(err_proj);
        sup_e_dev = sup_e_dev.max((rec.e_eps - reference.energy).abs());
        sup_gammadot = sup_gammadot.max(rec.gamma_dot.abs());
        if p.s >= POST_LAYER_S {
            sup_w_postlayer = sup_w_postlayer.max(rec.phitilde_h2w);
        }
        rows.push(TraceRow {
            epsilon,
            s: p.s,
            err_h2_phasefit: err_h2,
            err_projector: err_proj,
            e_eps: rec.e_eps,
            e_curve: reference.energy,
            gamma_eps: rec.gamma_eps,
            gammadot_eps: rec.gamma_dot,
            phitilde_h2: rec.phitilde_h2,
            phitilde_h2wneg: rec.phitilde_h2w,
            m_l: rec.m_l,
            m_g: rec.m_g,
            delta_locality: rec.delta_locality,
        });
        warm = Some(reference);
    }

    let report = conservation_report(&traj);
    let mass0 = report.mass.first().copied().unwrap_or(0.0).max(1e-300);
    let summary = EpsSummary {
        epsilon,
        s_end,
        n_samples: rows.len(),
        sup_err_h2_phasefit: sup_err_h2,
        sup_err_projector: sup_err_proj,
        sup_e_dev,
        sup_gammadot,
        sup_phitilde_h2: trace.sup(|r| r.phitilde_h2),
        sup_phitilde_h2wneg: trace.sup(|r| r.phitilde_h2w),
        sup_phitilde_h2wneg_postlayer: sup_w_postlayer,
        sup_xi: trace.sup(|r| r.xi),
        mass_drift: report.max_mass_drift / mass0,
        re_anchors: trace.re_anchors,
    };
    Ok(EpsOutcome { summary, rows, flags })
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let manifold = spec.manifold()?;
    let mut record = RunRecord::new(spec);
    let eta = match spec.eta {
        Some(eta) => eta,
        None => manifold.default_eta(0.1)?,
    };
    let curve = manifold.constant_mass_curve(eta, CURVE_NODES)?;
    record.scalar("eta", eta);
    record.scalar("e0", curve.states[0].energy);
    record.scalar("curve_mass_error", curve.worst_mass_error());

    let layer = layer_coefficient(&manifold, &curve.states[0])?;
    let degenerate = layer <= 1e-6 * curve.states[0].field.norm(NormKind::H2)?;
    record.scalar("layer_coefficient", layer);
    record.scalar("branch_degenerate", if degenerate { 1.0 } else { 0.0 });

    let outcomes: Vec<(f64, Result<EpsOutcome>)> = spec
        .epsilons
        .par_iter()
        .map(|&eps| (eps, run_epsilon(spec, &manifold, &curve, eps)))
        .collect();

    let mut rows = Vec::new();
    for (eps, outcome) in outcomes {
        match outcome {
            Ok(out) => {
                record.flags.extend(out.flags);
                record.per_eps.push(out.summary);
                rows.extend(out.rows);
            }
            Err(err) => {
                record.flags.push(format!("epsilon {eps:e}: {err:#}"));
                record.partial = true;
            }
        }
    }

    let eps: Vec<f64> = record.per_eps.iter().map(|s| s.epsilon).collect();
    let pull = |f: fn(&EpsSummary) -> f64| -> Vec<f64> {
        record.per_eps.iter().map(f).collect()
    };
    let fits = [
        ("sup err_h2_phasefit", pull(|s| s.sup_err_h2_phasefit)),
        ("sup |E_eps - E_curve|", pull(|s| s.sup_e_dev)),
        ("sup |gammadot_eps|", pull(|s| s.sup_gammadot)),
        ("post-layer sup phitilde_h2wneg", pull(|s| s.sup_phitilde_h2wneg_postlayer)),
        ("sup phitilde_h2", pull(|s| s.sup_phitilde_h2)),
        ("sup phitilde_h2wneg", pull(|s| s.sup_phitilde_h2wneg)),
        ("sup err_projector", pull(|s| s.sup_err_projector)),
    ]
    .map(|(name, ys)| SlopeReport::from_fit(name, log_log_fit(&eps, &ys)));
    let [err_fit, e_fit, gd_fit, wpost_fit, h2_fit, w_fit, proj_fit] = fits;

    record.verdicts.push(err_fit.verdict_within(0.7, 1.3));
    record.verdicts.push(e_fit.verdict_within(0.7, 1.3));
    record.verdicts.push(gd_fit.verdict_within(1.5, 2.5));
    if degenerate {
        record.verdicts.push(w_fit.verdict_at_least(1.5));
    } else {
        record.verdicts.push(h2_fit.verdict_within(0.7, 1.3));
    }
    record
        .slopes
        .extend([err_fit, e_fit, gd_fit, wpost_fit, h2_fit, w_fit, proj_fit]);

    let proj_ratio = record
        .per_eps
        .iter()
        .map(|s| s.sup_err_projector / s.sup_err_h2_phasefit.max(1e-300))
        .fold(0.0_f64, f64::max);
    record.verdicts.push(Verdict::new(
        "projector error is controlled by the phase-fit error",
        record.per_eps.iter().all(|s| {
            s.sup_err_projector <= 2.0 * s.sup_err_h2_phasefit + 1e-12
        }),
        proj_ratio,
        2.0,
    ));

    let worst_mass = record
        .per_eps
        .iter()
        .map(|s| s.mass_drift)
        .fold(0.0_f64, f64::max);
    record.verdicts.push(Verdict::new(
        "mass is conserved along every trajectory",
        worst_mass <= 1e-8,
        worst_mass,
        1e-8,
    ));

    if record.partial {
        record
            .verdicts
            .push(Verdict::judged("every epsilon completed", false));
    }

    let mut output = RunOutput::new(record);
    output.trace = rows;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentKind, ExperimentSpec};
    use gp_adiabatic::{Field, RadialGrid};

    #[test]
    fn projector_distance_is_a_rotation_invariant_angle() {
        let grid = RadialGrid::new(16.0, 160).unwrap();
        let a = Field::from_real_fn(&grid, |r: f64| (-r * r / 3.0).exp());
        let rotated = a.scale(Complex64::from_polar(1.0, 1.234));
        assert!(projector_distance(&a, &rotated).unwrap() < 1e-12);
        let b = Field::from_real_fn(&grid, |r: f64| r * (-r * r / 2.0).exp());
        let d = projector_distance(&a, &b).unwrap();
        assert!(d > 0.1 && d <= 1.0);
        let zero = Field::zero(&grid);
        assert_eq!(projector_distance(&zero, &zero).unwrap(), 0.0);
        assert_eq!(projector_distance(&a, &zero).unwrap(), 1.0);
    }

    #[test]
    fn autonomous_sweep_is_trivially_quiet() {
        let mut spec = ExperimentSpec::default_for(ExperimentKind::AdiabaticSweep);
        spec.potential.depth = [1.4, 0.0, 0.0];
        spec.potential.width = [2.0, 0.0, 0.0];
        spec.epsilons = vec![0.2, 0.1];
        spec.s_end = 0.25;
        let out = run(&spec).unwrap();
        assert!(!out.record.partial, "flags: {:?}", out.record.flags);
        for s in &out.record.per_eps {
            assert!(s.sup_err_h2_phasefit < 1e-6, "tracking error {}", s.sup_err_h2_phasefit);
            assert!(s.sup_e_dev < 1e-7, "energy deviation {}", s.sup_e_dev);
            assert!(s.sup_gammadot < 1e-6);
            assert!(s.sup_phitilde_h2 < 1e-6);
            assert!(s.mass_drift < 1e-10);
            assert_eq!(s.re_anchors, 0);
        }
        assert!(out.trace.iter().all(|r| r.err_projector <= 1e-6));
    }

    #[test]
    fn generic_branch_mini_sweep_separates_layer_from_bulk() {
        let mut spec = ExperimentSpec::default_for(ExperimentKind::AdiabaticSweep);
        spec.potential = crate::config::GENERIC_POTENTIAL;
        spec.epsilons = vec![0.05];
        spec.s_end = 0.3;
        let out = run(&spec).unwrap();
        assert!(!out.record.partial, "flags: {:?}", out.record.flags);
        let s = &out.record.per_eps[0];
        // the O(ε) initial layer carries the peak of the weighted remainder;
        // at ε = 0.05 the post-layer part has only partly relaxed toward the
        // ε² floor, so ask for the peak location plus a modest sup margin
        let peak = out
            .trace
            .iter()
            .max_by(|a, b| a.phitilde_h2wneg.total_cmp(&b.phitilde_h2wneg))
            .unwrap();
        assert!(peak.s < POST_LAYER_S, "peak at s = {}", peak.s);
        assert!(
            s.sup_phitilde_h2wneg > 1.3 * s.sup_phitilde_h2wneg_postlayer,
            "full {:e} vs post-layer {:e}",
            s.sup_phitilde_h2wneg,
            s.sup_phitilde_h2wneg_postlayer
        );
        assert!(s.sup_err_h2_phasefit > 1e-4);
        assert!(s.sup_err_h2_phasefit < 1.0);
        assert_eq!(s.n_samples, 61);
    }
}
