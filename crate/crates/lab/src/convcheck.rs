//! Numerical verification of the two convolution bounds every remainder
//! estimate leans on:
//!
//!   ∫₀^s ⟨(s−s')/ε⟩^{−3/2} ds'                ≲ ε
//!   ∫₀^s ⟨(s−s')/ε⟩^{−3/2} ⟨s'/ε⟩^{−3/2} ds'  ≲ ε ⟨s/ε⟩^{−3/2}
//!
//! The runner tabulates both ratios over an (s, ε) lattice and checks that
//! they are bounded and stable as ε halves.

use crate::config::ExperimentSpec;
use crate::record::{RunOutput, RunRecord, Verdict};
use anyhow::Result;
use gp_adiabatic::fitting::{bracket, kernel_integral_double, kernel_integral_single};

pub const S_VALUES: [f64; 4] = [0.125, 0.25, 0.5, 1.0];
pub const QUAD_TOL: f64 = 1e-12;
pub const STABILITY_FACTOR: f64 = 2.0;
pub const DOUBLE_RATIO_LIMIT: f64 = 10.0;
pub const PINNED_RANGE: (f64, f64) = (1.0, 4.0);

fn ratios(s: f64, epsilon: f64) -> (f64, f64) {
    let single = kernel_integral_single(s, epsilon, QUAD_TOL);
    let double = kernel_integral_double(s, epsilon, QUAD_TOL);
    let envelope = epsilon * bracket(s / epsilon).powf(-1.5);
    (single / epsilon, double / envelope)
}

pub fn run(spec: &ExperimentSpec) -> Result<RunOutput> {
    let mut record = RunRecord::new(spec);
    let mut stable = true;
    let mut worst_spread = 0.0_f64;
    let mut sup_ratio2 = 0.0_f64;

    for &s in &S_VALUES {
        let mut r1s = Vec::with_capacity(spec.epsilons.len());
        let mut r2s = Vec::with_capacity(spec.epsilons.len());
        for &eps in &spec.epsilons {
            let (r1, r2) = ratios(s, eps);
            sup_ratio2 = sup_ratio2.max(r2);
            record.scalar(&format!("ratio1_s{s}_eps{eps}"), r1);
            record.scalar(&format!("ratio2_s{s}_eps{eps}"), r2);
            r1s.push(r1);
            r2s.push(r2);
        }
        for rs in [r1s, r2s] {
            let lo = rs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = rs.iter().copied().fold(0.0_f64, f64::max);
            let spread = hi / lo;
            worst_spread = worst_spread.max(spread);
            stable &= spread <= STABILITY_FACTOR;
        }
    }

    record.verdicts.push(Verdict::new(
        "both ratios stay within 2x as epsilon halves",
        stable,
        worst_spread,
        STABILITY_FACTOR,
    ));

    let (pinned, _) = ratios(1.0, 1e-2);
    record.verdicts.push(Verdict::new(
        "single-kernel ratio at (s, eps) = (1, 1e-2) sits in [1, 4]",
        (PINNED_RANGE.0..=PINNED_RANGE.1).contains(&pinned),
        pinned,
        PINNED_RANGE.1,
    ));
    record.verdicts.push(Verdict::new(
        "double-kernel ratio is bounded by 10",
        sup_ratio2 <= DOUBLE_RATIO_LIMIT,
        sup_ratio2,
        DOUBLE_RATIO_LIMIT,
    ));
    record.scalar("pinned_ratio1", pinned);
    record.scalar("sup_ratio2", sup_ratio2);

    Ok(RunOutput::new(record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentKind, ExperimentSpec};

    #[test]
    fn default_lattice_passes_and_pins_the_constants()  {
        let spec = ExperimentSpec::default_for(ExperimentKind::ConvolutionCheck);
        let out = run(&spec).unwrap();
        assert!(out.record.all_pass(), "verdicts: {:#?}", out.record.verdicts);
        let pinned = out.record.scalars["pinned_ratio1"];
        assert!((1.0..4.0).contains(&pinned), "pinned ratio {pinned}");
        assert!(out.record.scalars["sup_ratio2"] < 10.0);
    }
}
