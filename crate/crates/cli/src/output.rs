//! Writers for the three output formats.
//!
//! JSON objects have sorted keys and every float is printed with 17
//! significant digits. Non-finite floats become `null`.

use std::io;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use bshq_core::lattice::Chain;
use bshq_core::opcore::VerificationReport;
use bshq_core::osc_quant::{joint_spectrum, OscillatorOperators, SpectrumRecord};
use bshq_core::qreduction::{multiplicity_row, MultiplicityRow};
use bshq_core::red_quant::b_coefficients;

use crate::{CliError, Format, RunConfig, Scope};

pub const SPECTRUM_HEADER: &str = "m,n,A1,A2,E,L";
pub const BCOEFF_HEADER: &str = "p,chain,b_sq,b,boundary";
pub const MULTIPLICITY_HEADER: &str = "q,dim_Hq,dim_Hq0,dim_Hq1,commutant_Hq,commutant_Hqtilde";

struct SigFigs;

impl serde_json::ser::Formatter for SigFigs {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn to_json(value: &Value) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs);
    value.serialize(&mut ser).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut text = String::from_utf8(buf).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn value_of(x: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(|e| CliError::Internal(e.to_string()))
}

fn config_value(cfg: &RunConfig, command: &str, scope: Option<Scope>) -> Result<Value, CliError> {
    let mut v = value_of(cfg)?;
    v["command"] = json!(command);
    if let Some(s) = scope {
        v["scope"] = value_of(s)?;
    }
    Ok(v)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let ops = OscillatorOperators::build(cfg.n_max, cfg.hbar());
    let records = joint_spectrum(&ops)?;
    match cfg.format {
        Format::Json => to_json(&json!({
            "config": config_value(cfg, "spectrum", None)?,
            "records": value_of(&records)?,
        })),
        Format::Csv => Ok(csv(SPECTRUM_HEADER, records.iter().map(spectrum_fields))),
        Format::Text => {
            let mut out = format!("joint spectrum, n_max = {}, ħ = {}\n", cfg.n_max, cfg.hbar);
            out.push_str(&format!("{:>4} {:>4} {:>12} {:>12} {:>12} {:>12}\n", "m", "n", "A1", "A2", "E", "L"));
            for r in &records {
                out.push_str(&format!("{:>4} {:>4} {:>12.6} {:>12.6} {:>12.6} {:>12.6}\n", r.m, r.n, r.A1, r.A2, r.E, r.L));
            }
            Ok(out)
        }
    }
}

fn spectrum_fields(r: &SpectrumRecord) -> Vec<String> {
    vec![r.m.to_string(), r.n.to_string(), num(r.A1), num(r.A2), num(r.E), num(r.L)]
}

#[derive(Debug, Clone, Serialize)]
struct BRow {
    p: i64,
    chain: &'static str,
    b_sq: f64,
    b: f64,
    boundary: bool,
}

pub fn bcoeff(cfg: &RunConfig) -> Result<String, CliError> {
    let coeffs = b_coefficients(cfg.q)?;
    let h = cfg.hbar;
    let rows: Vec<BRow> = coeffs
        .b_sq
        .iter()
        .map(|(&p, &units)| BRow {
            p,
            chain: Chain::of(p, cfg.q).label(),
            b_sq: units as f64 * h * h,
            b: (units as f64).sqrt() * h,
            boundary: coeffs.is_boundary(p),
        })
        .collect();
    match cfg.format {
        Format::Json => to_json(&json!({
            "config": config_value(cfg, "bcoeff", None)?,
            "rows": value_of(&rows)?,
        })),
        Format::Csv => Ok(csv(
            BCOEFF_HEADER,
            rows.iter().map(|r| vec![r.p.to_string(), r.chain.to_string(), num(r.b_sq), num(r.b), r.boundary.to_string()]),
        )),
        Format::Text => {
            let mut out = format!("shift coefficients, q = {}, ħ = {}\n", cfg.q, cfg.hbar);
            out.push_str(&format!("{:>6} {:>5} {:>14} {:>14} {:>8}\n", "p", "chain", "b_sq", "b", "boundary"));
            for r in &rows {
                out.push_str(&format!("{:>6} {:>5} {:>14.6} {:>14.6} {:>8}\n", r.p, r.chain, r.b_sq, r.b, r.boundary));
            }
            Ok(out)
        }
    }
}

pub fn multiplicity_rows(cfg: &RunConfig) -> Result<Vec<MultiplicityRow>, CliError> {
    let rows: Vec<_> = (0..=cfg.n_max).into_par_iter().map(|q| multiplicity_row(q, cfg.hbar())).collect();
    Ok(rows.into_iter().collect::<Result<_, _>>()?)
}

pub fn multiplicity(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = multiplicity_rows(cfg)?;
    match cfg.format {
        Format::Json => to_json(&json!({
            "config": config_value(cfg, "multiplicity", None)?,
            "rows": value_of(&rows)?,
        })),
        Format::Csv => Ok(csv(
            MULTIPLICITY_HEADER,
            rows.iter().map(|r| {
                [r.q as usize, r.dim_Hq, r.dim_Hq0, r.dim_Hq1, r.commutant_Hq, r.commutant_Hqtilde]
                    .iter()
                    .map(ToString::to_string)
                    .collect()
            }),
        )),
        Format::Text => {
            let mut out = String::from("multiplicities of H_q against H̃_q = H̃_q⁰ ⊕ H̃_q¹\n");
            out.push_str(&format!(
                "{:>4} {:>7} {:>8} {:>8} {:>9} {:>9}  {}\n",
                "q", "dim H_q", "dim H̃⁰", "dim H̃¹", "comm H_q", "comm H̃_q", "surplus"
            ));
            for r in &rows {
                out.push_str(&format!(
                    "{:>4} {:>7} {:>8} {:>8} {:>9} {:>9}  {}\n",
                    r.q,
                    r.dim_Hq,
                    r.dim_Hq0,
                    r.dim_Hq1,
                    r.commutant_Hq,
                    r.commutant_Hqtilde,
                    if r.has_surplus() { "H̃¹" } else { "-" }
                ));
            }
            Ok(out)
        }
    }
}

pub fn verification(cfg: &RunConfig, command: &str, scope: Scope, report: &VerificationReport) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => {
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "residual": finite_or_null(c.max_abs_residual),
                        "tolerance": finite_or_null(c.tolerance),
                        "pass": c.pass,
                    })
                })
                .collect();
            to_json(&json!({
                "config": config_value(cfg, command, Some(scope))?,
                "checks": checks,
                "summary": { "passed": report.passed(), "failed": report.failed() },
            }))
        }
        Format::Text => {
            let width = report.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
            let mut out = String::new();
            for c in &report.checks {
                let pad = width - c.name.chars().count();
                out.push_str(&format!(
                    "{} {}{}  residual {:.3e}  tol {:.1e}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    " ".repeat(pad),
                    c.max_abs_residual,
                    c.tolerance
                ));
            }
            out.push_str(&format!("{} passed, {} failed\n", report.passed(), report.failed()));
            Ok(out)
        }
        Format::Csv => Err(CliError::Usage("verify reports are available as json or text, not csv".into())),
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn csv(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
