//! File emission: every run writes `summary.json`, `trace.csv`, `audit.csv`.
//!
//! Tables that do not apply to a given experiment are still written with
//! their header line so downstream tooling can rely on the file set. Floats
//! are rendered in scientific notation, which round-trips f64 exactly and
//! keeps byte-identical output for identical runs.

use crate::record::{AuditRow, RunOutput, TraceRow};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const TRACE_HEADER: &str = "epsilon,s,err_h2_phasefit,err_projector,E_eps,E_curve,\
gamma_eps,gammadot_eps,phitilde_h2,phitilde_h2wneg,M_l,M_g,delta_locality";

pub const AUDIT_HEADER: &str = "s,status,E_star,gap,resonance_margin,v_h2sigma_2.1,\
v_h2sigma_2.5,v_h2sigma_3.0,dv_ds_sup,d2v_ds2_sup,neg_count_l0,neg_count_l1,tail_weighted,pass";

fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 200);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [
            num(r.epsilon),
            num(r.s),
            num(r.err_h2_phasefit),
            num(r.err_projector),
            num(r.e_eps),
            num(r.e_curve),
            num(r.gamma_eps),
            num(r.gammadot_eps),
            num(r.phitilde_h2),
            num(r.phitilde_h2wneg),
            num(r.m_l),
            num(r.m_g),
            num(r.delta_locality),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn audit_csv(rows: &[AuditRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 160);
    out.push_str(AUDIT_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [
            num(r.s),
            r.status.clone(),
            num(r.e_star),
            num(r.gap),
            num(r.resonance_margin),
            num(r.v_h2sigma_2_1),
            num(r.v_h2sigma_2_5),
            num(r.v_h2sigma_3_0),
            num(r.dv_ds_sup),
            num(r.d2v_ds2_sup),
            r.neg_count_l0.to_string(),
            r.neg_count_l1.to_string(),
            num(r.tail_weighted),
            r.pass.to_string(),
        ];
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Write the full output set into `dir`, creating it if needed.
pub fn emit(output: &RunOutput, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&output.record)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    let mut f = fs::File::create(dir.join("summary.json"))?;
    f.write_all(json.as_bytes())?;
    f.write_all(b"\n")?;
    fs::write(dir.join("trace.csv"), trace_csv(&output.trace))?;
    fs::write(dir.join("audit.csv"), audit_csv(&output.audit))?;
    Ok(())
}
