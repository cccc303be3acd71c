//! Experiment specifications: the serializable identity of a run.
//!
//! Everything that affects the numbers lives here; output location does not
//! (it is plumbing, passed separately), so identical specs produce identical
//! records no matter where they are written.

use gp_adiabatic::{Manifold, NonlinSign, PotentialPath, Quadratic, RadialGrid};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid spec: {0}")]
    Invalid(&'static str),
    #[error("unreadable config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Domain(#[from] gp_adiabatic::grid::DomainError),
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AdiabaticSweep,
    DispersiveProbe,
    ConvolutionCheck,
    HypothesisAudit,
    GroundstateBuild,
    EvolutionRun,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AdiabaticSweep => "adiabatic_sweep",
            ExperimentKind::DispersiveProbe => "dispersive_probe",
            ExperimentKind::ConvolutionCheck => "convolution_check",
            ExperimentKind::HypothesisAudit => "hypothesis_audit",
            ExperimentKind::GroundstateBuild => "groundstate_build",
            ExperimentKind::EvolutionRun => "evolution_run",
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n_points: usize,
    pub r_max: f64,
}

/// Quadratic-in-s coefficients [c0, c1, c2] for the Gaussian well
/// V_s(r) = −depth(s)·exp(−(r/width(s))²).
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct PotentialSpec {
    pub depth: [f64; 3],
    pub width: [f64; 3],
}

impl PotentialSpec {
    pub fn path(&self) -> PotentialPath<f64> {
        PotentialPath::new(
            Quadratic { c0: self.depth[0], c1: self.depth[1], c2: self.depth[2] },
            Quadratic { c0: self.width[0], c1: self.width[1], c2: self.width[2] },
        )
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    /// Nonlinearity sign, +1 or −1.
    pub b: i8,
    /// Branch mass; `None` derives the default from the bifurcation window.
    pub eta: Option<f64>,
    pub epsilons: Vec<f64>,
    pub s_end: f64,
    pub samples_per_unit_s: usize,
    pub sigma: f64,
    /// G₀: required lower bound on the bound-state energy/gap.
    pub gap_floor: f64,
    /// m₀: required lower bound on the resonance margin.
    pub margin_floor: f64,
    /// Frozen times for the dispersive probe.
    pub taus: Vec<f64>,
    pub seed: u64,
}

/// The calibrated slow family: depth drifts quadratically (flat at s = 0,
/// so the branch is degenerate there), width fixed.  The well is deep enough
/// that every ladder point ε ≤ 0.2 sits well below the branch energy
/// E₀ ≈ 0.72, yet shallow enough to keep a single bound state and no ℓ = 1
/// state at all 21 audit nodes.
pub const DEFAULT_POTENTIAL: PotentialSpec = PotentialSpec {
    depth: [2.8, 0.0, -0.12],
    width: [2.0, 0.0, 0.0],
};

/// The same well with a nonzero initial drift: the generic branch, whose
/// evolution opens with an O(ε) layer.
pub const GENERIC_POTENTIAL: PotentialSpec = PotentialSpec {
    depth: [2.8, 0.12, -0.06],
    width: [2.0, 0.05, 0.0],
};

impl ExperimentSpec {
    pub fn default_for(kind: ExperimentKind) -> Self {
        let mut spec = ExperimentSpec {
            schema_version: SCHEMA_VERSION,
            kind,
            grid: GridSpec { n_points: 480, r_max: 24.0 },
            potential: DEFAULT_POTENTIAL,
            b: 1,
            eta: None,
            epsilons: vec![0.2, 0.1, 0.05, 0.025],
            s_end: 1.0,
            samples_per_unit_s: 200,
            sigma: 2.5,
            gap_floor: 0.1,
            margin_floor: 0.05,
            taus: vec![0.0, 0.5, 1.0],
            seed: 7,
        };
        match kind {
            ExperimentKind::DispersiveProbe => {
                // big enough that a decade of t ≥ 2 fits before wall
                // reflections can reach the weighted window
                spec.grid = GridSpec { n_points: 6000, r_max: 300.0 };
            }
            ExperimentKind::ConvolutionCheck => {
                spec.epsilons = vec![0.04, 0.02, 0.01, 0.005];
            }
            ExperimentKind::EvolutionRun => {
                spec.epsilons = vec![0.1];
            }
            _ => {}
        }
        spec
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Invalid("unsupported schema_version"));
        }
        if self.grid.n_points < 16 || !(self.grid.r_max > 0.0) {
            return Err(ConfigError::Invalid("grid must have n_points >= 16, r_max > 0"));
        }
        if NonlinSign::from_i8(self.b).is_none() {
            return Err(ConfigError::Invalid("b must be +1 or -1"));
        }
        if self.epsilons.is_empty() {
            return Err(ConfigError::Invalid("epsilon list must be non-empty"));
        }
        if !self
            .epsilons
            .iter()
            .all(|&e| e.is_finite() && 0.0 < e && e <= 1.0)
        {
            return Err(ConfigError::Invalid("epsilons must lie in (0, 1]"));
        }
        if !self.epsilons.windows(2).all(|w| w[1] < w[0]) {
            return Err(ConfigError::Invalid("epsilons must be strictly decreasing"));
        }
        if !(self.s_end > 0.0 && self.s_end <= 1.0) {
            return Err(ConfigError::Invalid("s_end must lie in (0, 1]"));
        }
        if self.samples_per_unit_s == 0 {
            return Err(ConfigError::Invalid("samples_per_unit_s must be positive"));
        }
        if !(self.sigma > 2.0) {
            return Err(ConfigError::Invalid("sigma must exceed 2"));
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                return Err(ConfigError::Invalid("eta must be positive"));
            }
        }
        if self.taus.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
            return Err(ConfigError::Invalid("taus must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn sign(&self) -> NonlinSign {
        NonlinSign::from_i8(self.b).expect("validated sign")
    }

    pub fn grid(&self) -> Result<Arc<RadialGrid<f64>>, ConfigError> {
        Ok(RadialGrid::new(self.grid.r_max, self.grid.n_points)?)
    }

    pub fn manifold(&self) -> Result<Manifold<f64>, ConfigError> {
        Ok(Manifold::new(
            &self.grid()?,
            self.potential.path(),
            self.sign(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_for_every_kind() {
        for kind in [
            ExperimentKind::AdiabaticSweep,
            ExperimentKind::DispersiveProbe,
            ExperimentKind::ConvolutionCheck,
            ExperimentKind::HypothesisAudit,
            ExperimentKind::GroundstateBuild,
            ExperimentKind::EvolutionRun,
        ] {
            let spec = ExperimentSpec::default_for(kind);
            spec.validate().unwrap();
            let tag = serde_json::to_string(&kind).unwrap();
            assert_eq!(tag.trim_matches('"'), kind.name());
        }
    }

    #[test]
    fn json_round_trip_preserves_the_spec() {
        let spec = ExperimentSpec::default_for(ExperimentKind::AdiabaticSweep);
        let text = serde_json::to_string_pretty(&spec).unwrap();
        let back = ExperimentSpec::from_json(&text).unwrap();
        assert_eq!(spec, back);
        assert!(text.contains("\"adiabatic_sweep\""));
    }

    #[test]
    fn bad_specs_are_refused() {
        let mut spec = ExperimentSpec::default_for(ExperimentKind::AdiabaticSweep);
        spec.epsilons = vec![0.1, 0.2];
        assert!(spec.validate().is_err());
        spec.epsilons = vec![0.0];
        assert!(spec.validate().is_err());
        spec.epsilons = vec![0.1];
        spec.b = 3;
        assert!(spec.validate().is_err());
        spec.b = -1;
        spec.sigma = 1.5;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn default_family_is_degenerate_and_generic_is_not() {
        assert!(DEFAULT_POTENTIAL.path().is_degenerate_at_start());
        assert!(!GENERIC_POTENTIAL.path().is_degenerate_at_start());
        assert!(DEFAULT_POTENTIAL.path().path_is_admissible());
        assert!(GENERIC_POTENTIAL.path().path_is_admissible());
    }
}
