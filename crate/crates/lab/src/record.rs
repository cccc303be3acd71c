//! Persistent run records: verdicts, fitted slopes, per-ε summaries.
//!
//! Wall-clock never enters the record (it goes to stderr), so records are a
//! pure function of spec + seed.

use crate::config::ExperimentSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One quantitative pass/fail judgement with the number that decided it.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Verdict {
    pub fn new(name: &str, pass: bool, measured: f64, bound: f64) -> Self {
        Verdict {
            name: name.to_string(),
            pass,
            measured: finite(measured),
            bound: finite(bound),
        }
    }

    pub fn judged(name: &str, pass: bool) -> Self {
        Verdict { name: name.to_string(), pass, measured: None, bound: None }
    }
}

/// A fitted scaling exponent. `flagged` marks fits that must not be trusted
/// (fewer than 4 points or R² < 0.9); flagged slopes never pass verdicts.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SlopeReport {
    pub name: String,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub n_points: usize,
    pub flagged: bool,
}

impl SlopeReport {
    pub fn from_fit(name: &str, fit: Option<gp_adiabatic::fitting::SlopeFit<f64>>) -> Self {
        match fit {
            Some(f) => SlopeReport {
                name: name.to_string(),
                slope: Some(f.slope),
                intercept: Some(f.intercept),
                r_squared: Some(f.r_squared),
                n_points: f.n,
                flagged: f.n < 4 || f.r_squared < 0.9,
            },
            None => SlopeReport {
                name: name.to_string(),
                slope: None,
                intercept: None,
                r_squared: None,
                n_points: 0,
                flagged: true,
            },
        }
    }

    /// Verdict that the (unflagged) slope lies in [lo, hi].
    pub fn verdict_within(&self, lo: f64, hi: f64) -> Verdict {
        let pass = !self.flagged && self.slope.map(|s| lo <= s && s <= hi).unwrap_or(false);
        Verdict {
            name: format!("slope({}) in [{lo}, {hi}]", self.name),
            pass,
            measured: self.slope,
            bound: None,
        }
    }

    pub fn verdict_at_least(&self, lo: f64) -> Verdict {
        let pass = !self.flagged && self.slope.map(|s| s >= lo).unwrap_or(false);
        Verdict {
            name: format!("slope({}) >= {lo}", self.name),
            pass,
            measured: self.slope,
            bound: Some(lo),
        }
    }
}

/// Scalar outcome of one ε-run of the sweep.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct EpsSummary {
    pub epsilon: f64,
    pub s_end: f64,
    pub n_samples: usize,
    pub sup_err_h2_phasefit: f64,
    pub sup_err_projector: f64,
    pub sup_e_dev: f64,
    pub sup_gammadot: f64,
    pub sup_phitilde_h2: f64,
    pub sup_phitilde_h2wneg: f64,
    /// Same sup restricted to s ≥ 0.1 (past the initial layer).
    pub sup_phitilde_h2wneg_postlayer: f64,
    pub sup_xi: f64,
    pub mass_drift: f64,
    pub re_anchors: usize,
}

/// One row of `trace.csv`: a single (ε, s) sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub epsilon: f64,
    pub s: f64,
    pub err_h2_phasefit: f64,
    pub err_projector: f64,
    pub e_eps: f64,
    pub e_curve: f64,
    pub gamma_eps: f64,
    pub gammadot_eps: f64,
    pub phitilde_h2: f64,
    pub phitilde_h2wneg: f64,
    pub m_l: f64,
    pub m_g: f64,
    pub delta_locality: f64,
}

/// One row of `audit.csv`: the hypothesis checks at a single frozen s.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditRow {
    pub s: f64,
    pub status: String,
    pub e_star: f64,
    pub gap: f64,
    pub resonance_margin: f64,
    pub v_h2sigma_2_1: f64,
    pub v_h2sigma_2_5: f64,
    pub v_h2sigma_3_0: f64,
    pub dv_ds_sup: f64,
    pub d2v_ds2_sup: f64,
    pub neg_count_l0: usize,
    pub neg_count_l1: usize,
    pub tail_weighted: f64,
    pub pass: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    /// Raw config file text when the run came from one, echoed verbatim.
    pub config_echo: Option<String>,
    pub grid_spacing: f64,
    pub verdicts: Vec<Verdict>,
    pub slopes: Vec<SlopeReport>,
    pub scalars: BTreeMap<String, f64>,
    pub per_eps: Vec<EpsSummary>,
    pub flags: Vec<String>,
    /// Set when some ε-run failed and only the surviving parts are recorded.
    pub partial: bool,
}

impl RunRecord {
    pub fn new(spec: &ExperimentSpec) -> Self {
        let spacing = spec.grid.r_max / (spec.grid.n_points as f64 + 1.0);
        RunRecord {
            schema_version: spec.schema_version,
            spec: spec.clone(),
            config_echo: None,
            grid_spacing: spacing,
            verdicts: Vec::new(),
            slopes: Vec::new(),
            scalars: BTreeMap::new(),
            per_eps: Vec::new(),
            flags: Vec::new(),
            partial: false,
        }
    }

    pub fn all_pass(&self) -> bool {
        !self.partial && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.insert(name.to_string(), value);
    }

    /// Record a scalar only when it is finite (JSON cannot carry the rest).
    pub fn scalar_finite(&mut self, name: &str, value: f64) {
        if value.is_finite() {
            self.scalar(name, value);
        }
    }
}

/// Everything one run produces; the CSV tables stay out of the JSON body.
pub struct RunOutput {
    pub record: RunRecord,
    pub trace: Vec<TraceRow>,
    pub audit: Vec<AuditRow>,
}

impl RunOutput {
    pub fn new(record: RunRecord) -> Self {
        RunOutput { record, trace: Vec::new(), audit: Vec::new() }
    }
}
