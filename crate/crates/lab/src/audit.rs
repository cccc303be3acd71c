//! Frozen-time hypothesis audit: at each node of the slow-time interval the
//! linear well must carry exactly one negative eigenvalue with a clean gap,
//! sit safely away from a zero-energy resonance, stay bound-state-free in the
//! ℓ = 1 sector, and keep its weighted norms and s-derivatives under control.

use crate::config::ExperimentSpec;
use crate::record::{AuditRow, RunOutput, RunRecord, Verdict};
use anyhow::Result;
use gp_adiabatic::spectra::SpectraError;
use gp_adiabatic::{Field, NormKind, SchrodingerOperator};

pub const AUDIT_NODES: usize = 21;
pub const TAIL_LIMIT: f64 = 1e-8;
const FD_DELTA_D1: f64 = 1e-3;
const FD_DELTA_D2: f64 = 1e-2;
const SIGMAS: [f64; 3] = [2.1, 2.5, 3.0];

fn weighted_potential_norm(
    grid: &std::sync::Arc<gp_adiabatic::Grid64>,
    v: &[f64],
    sigma: f64,
) -> Result<f64> {
    let u: Vec<f64> = grid.nodes().iter().zip(v).map(|(&r, &vi)| r * vi).collect();
    Ok(Field::from_real_u(grid, u)?.norm(NormKind::H2Weighted(sigma))?)
}

fn sup_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |a, &x| a.max(x.abs()))
}

fn sup_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (&x, &y)| m.max((x - y).abs()))
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let grid = spec.grid()?;
    let path = spec.potential.path();
    let mut record = RunRecord::new(spec);
    let mut rows = Vec::with_capacity(AUDIT_NODES);

    let r_out = grid.r_max() - grid.spacing();
    let tail_weight = (1.0 + r_out * r_out).powf(SIGMAS[2] / 2.0);

    let mut pass_count = 0usize;
    let mut min_gap = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut fd1_dev = 0.0_f64;
    let mut fd2_dev = 0.0_f64;
    let mut d1_scale = 0.0_f64;
    let mut d2_scale = 0.0_f64;
    let mut tail_max = 0.0_f64;

    for k in 0..AUDIT_NODES {
        let s = spec.s_end * k as f64 / (AUDIT_NODES - 1) as f64;
        let v = path.sample(&grid, s);
        let op = SchrodingerOperator::new(&grid, v.clone())?;
        let op_l1 = SchrodingerOperator::with_angular(&grid, v.clone(), 1)?;

        let (status, e_star, gap) = match op.bound_state() {
            Ok(bs) => ("ok", bs.energy, bs.gap),
            Err(SpectraError::NoBoundState { .. }) => ("no_bound_state", f64::NAN, f64::NAN),
            Err(SpectraError::ExtraBoundStates { .. }) => {
                ("multiple_bound_states", f64::NAN, f64::NAN)
            }
            Err(err) => return Err(err.into()),
        };
        let margin = op.resonance_margin()?;
        let neg_l0 = op.negative_count();
        let neg_l1 = op_l1.negative_count();

        let norms: Vec<f64> = SIGMAS
            .iter()
            .map(|&sig| weighted_potential_norm(&grid, &v, sig))
            .collect::<Result<_>>()?;

        let d1 = path.sample_ds(&grid, s);
        let d2 = path.sample_d2s(&grid, s);
        let dv_ds_sup = sup_abs(&d1);
        let d2v_ds2_sup = sup_abs(&d2);

        let fd1: Vec<f64> = {
            let vp = path.sample(&grid, s + FD_DELTA_D1);
            let vm = path.sample(&grid, s - FD_DELTA_D1);
            vp.iter()
                .zip(&vm)
                .map(|(&p, &m)| (p - m) / (2.0 * FD_DELTA_D1))
                .collect()
        };
        let fd2: Vec<f64> = {
            let vp = path.sample(&grid, s + FD_DELTA_D2);
            let vm = path.sample(&grid, s - FD_DELTA_D2);
            vp.iter()
                .zip(vm.iter().zip(&v))
                .map(|(&p, (&m, &c))| (p - 2.0 * c + m) / (FD_DELTA_D2 * FD_DELTA_D2))
                .collect()
        };
        fd1_dev = fd1_dev.max(sup_dev(&fd1, &d1));
        fd2_dev = fd2_dev.max(sup_dev(&fd2, &d2));
        d1_scale = d1_scale.max(dv_ds_sup);
        d2_scale = d2_scale.max(d2v_ds2_sup);

        let tail = path.tail_magnitude(&grid, s) * tail_weight;
        tail_max = tail_max.max(tail);

        let pass = status == "ok"
            && gap >= spec.gap_floor
            && margin >= spec.margin_floor
            && neg_l1 == 0
            && tail <= TAIL_LIMIT;
        if pass {
            pass_count += 1;
            min_gap = min_gap.min(gap);
        }
        min_margin = min_margin.min(margin);

        rows.push(AuditRow {
            s,
            status: status.to_string(),
            e_star,
            gap,
            resonance_margin: margin,
            v_h2sigma_2_1: norms[0],
            v_h2sigma_2_5: norms[1],
            v_h2sigma_3_0: norms[2],
            dv_ds_sup,
            d2v_ds2_sup,
            neg_count_l0: neg_l0,
            neg_count_l1: neg_l1,
            tail_weighted: tail,
            pass,
        });
    }

    let admissible = path.path_is_admissible();
    record.verdicts.push(Verdict::new(
        "all audit nodes satisfy the hypotheses",
        pass_count == AUDIT_NODES,
        pass_count as f64,
        AUDIT_NODES as f64,
    ));
    record
        .verdicts
        .push(Verdict::judged("depth and width stay positive along the path", admissible));
    record.verdicts.push(Verdict::new(
        "analytic ds-derivative matches finite differences",
        fd1_dev <= 1e-5 * (1.0 + d1_scale),
        fd1_dev,
        1e-5 * (1.0 + d1_scale),
    ));
    record.verdicts.push(Verdict::new(
        "analytic d2s-derivative matches finite differences",
        fd2_dev <= 1e-3 * (1.0 + d2_scale),
        fd2_dev,
        1e-3 * (1.0 + d2_scale),
    ));

    record.scalar("audit_pass_count", pass_count as f64);
    record.scalar_finite("min_gap", min_gap);
    record.scalar_finite("min_resonance_margin", min_margin);
    record.scalar("tail_weighted_max", tail_max);
    record.scalar("fd_ds_max_dev", fd1_dev);
    record.scalar("fd_d2s_max_dev", fd2_dev);

    let mut output = RunOutput::new(record);
    output.audit = rows;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentKind, ExperimentSpec};

    #[test]
    fn default_well_passes_every_node() {
        let spec = ExperimentSpec::default_for(ExperimentKind::HypothesisAudit);
        let out = run(&spec).unwrap();
        assert_eq!(out.audit.len(), AUDIT_NODES);
        assert!(out.audit.iter().all(|r| r.pass), "some node failed the audit");
        assert!(out.record.all_pass());
        assert!(out.record.scalars["min_gap"] >= spec.gap_floor);
    }

    #[test]
    fn empty_well_fails_with_no_bound_state() {
        let mut spec = ExperimentSpec::default_for(ExperimentKind::HypothesisAudit);
        spec.potential.depth = [0.0, 0.0, 0.0];
        let out = run(&spec).unwrap();
        assert!(out.audit.iter().all(|r| r.status == "no_bound_state"));
        assert!(!out.record.all_pass());
    }

    #[test]
    fn deep_well_fails_with_extra_bound_states() {
        let mut spec = ExperimentSpec::default_for(ExperimentKind::HypothesisAudit);
        spec.potential.depth = [28.0, 0.0, 0.0];
        let out = run(&spec).unwrap();
        assert!(out
            .audit
            .iter()
            .all(|r| r.status == "multiple_bound_states"));
        assert!(!out.record.all_pass());
    }
}
