//! Report documents and their JSON and CSV encodings.

use std::time::{Duration, SystemTime, UNIX_EPOCH};

use fatlab::invariants::{Exact, GammaBracket};
use fatlab::verifier::{ContainmentRecord, SuiteSpec, SuiteVerdict};
use fatlab::Result;
use serde::{Deserialize, Serialize};

use crate::RunConfig;

pub const TOOL: &str = "fatlab";

/// Environment variable that pins the header timestamp, in seconds since the
/// Unix epoch.
pub const SOURCE_DATE_EPOCH: &str = "SOURCE_DATE_EPOCH";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    /// The only field outside the determinism contract.
    pub generated_at: String,
    pub field: String,
    pub seeds: Vec<u64>,
    pub config: RunConfig,
}

impl ReportHeader {
    pub fn new(config: &RunConfig, field: String, seeds: Vec<u64>) -> Self {
        ReportHeader {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at: timestamp(),
            field,
            seeds,
            config: config.clone(),
        }
    }
}

fn timestamp() -> String {
    let now = std::env::var(SOURCE_DATE_EPOCH)
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map_or_else(SystemTime::now, |s| UNIX_EPOCH + Duration::from_secs(s));
    humantime::format_rfc3339_seconds(now).to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: Exact,
    pub upper: Exact,
}

impl From<&GammaBracket> for Bracket {
    fn from(b: &GammaBracket) -> Self {
        Bracket { lower: b.lower, upper: b.upper }
    }
}

/// One row of an invariant table: values for the symbolic power `I^(m)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantRow {
    pub scheme_id: String,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<usize>,
    /// Bracket from `alpha(I^(k))`, `k = 1..=m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Bracket>,
    /// `dim (R/I^(m))_t` for `t = 0, 1, ...`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hilbert: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Invariants { command: String, rows: Vec<InvariantRow> },
    Containment { scheme_id: String, m: usize, j: usize, r: usize, result: ContainmentRecord },
    Suite { spec: Box<SuiteSpec>, verdict: SuiteVerdict },
    Error { message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub header: ReportHeader,
    pub body: ReportBody,
    pub exit_status: i32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub fn emit(doc: &ReportDocument, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => emit_csv(&doc.body),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn joined(v: &[usize]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn csv_error(e: csv::Error) -> fatlab::Error {
    fatlab::Error::Serialization(e.to_string())
}

/// Flat tables; the header row depends on the body kind.
pub fn emit_csv(body: &ReportBody) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match body {
        ReportBody::Invariants { rows, .. } => {
            w.write_record([
                "scheme_id",
                "m",
                "alpha",
                "beta",
                "regularity",
                "gamma_lower_num",
                "gamma_lower_den",
                "gamma_upper_num",
                "gamma_upper_den",
                "hilbert",
            ])
            .map_err(csv_error)?;
            for r in rows {
                let g = |f: fn(&Bracket) -> i64| r.gamma.as_ref().map(|b| f(b).to_string()).unwrap_or_default();
                w.write_record([
                    r.scheme_id.clone(),
                    r.m.to_string(),
                    opt(&r.alpha),
                    opt(&r.beta),
                    opt(&r.regularity),
                    g(|b| b.lower.num()),
                    g(|b| b.lower.den()),
                    g(|b| b.upper.num()),
                    g(|b| b.upper.den()),
                    joined(&r.hilbert),
                ])
                .map_err(csv_error)?;
            }
        }
        ReportBody::Containment { scheme_id, m, j, r, result } => {
            w.write_record([
                "scheme_id",
                "m",
                "j",
                "r",
                "holds",
                "checked_from",
                "checked_to",
                "certificate_bound",
                "witness_degree",
                "witness",
            ])
            .map_err(csv_error)?;
            let rep = &result.report;
            w.write_record([
                scheme_id.clone(),
                m.to_string(),
                j.to_string(),
                r.to_string(),
                rep.holds.to_string(),
                rep.checked_degrees[0].to_string(),
                rep.checked_degrees[1].to_string(),
                rep.certificate.bound.to_string(),
                opt(&rep.witness.as_ref().map(|w| w.degree)),
                opt(&rep.witness.as_ref().map(|w| w.form.clone())),
            ])
            .map_err(csv_error)?;
        }
        ReportBody::Suite { verdict, .. } => {
            w.write_record(["key", "scheme", "relation", "params", "mode", "status", "holds"]).map_err(csv_error)?;
            for c in &verdict.cases {
                let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                w.write_record([
                    c.key.clone(),
                    c.scheme.clone(),
                    c.relation.name().to_string(),
                    params.join(" "),
                    json_word(&c.mode)?,
                    json_word(&c.status)?,
                    opt(&c.holds),
                ])
                .map_err(csv_error)?;
            }
        }
        ReportBody::Error { message } => {
            w.write_record(["error"]).map_err(csv_error)?;
            w.write_record([message.as_str()]).map_err(csv_error)?;
        }
    }
    w.into_inner().map_err(|e| fatlab::Error::Serialization(e.to_string()))
}

/// The serde name of a unit enum variant.
fn json_word<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_value(v)?.as_str().unwrap_or_default().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_pairs_in_both_formats() {
        let row = InvariantRow {
            scheme_id: "general-N2-n7-seed1".into(),
            m: 8,
            alpha: Some(21),
            gamma: Some(Bracket { lower: Exact::new(7, 3), upper: Exact::new(21, 8) }),
            ..Default::default()
        };
        let body = ReportBody::Invariants { command: "gamma".into(), rows: vec![row] };
        let json = serde_json::to_string(&body).unwrap();
        assert!(json.contains(r#""upper":{"num":21,"den":8}"#), "{json}");
        let csv = String::from_utf8(emit_csv(&body).unwrap()).unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), "general-N2-n7-seed1,8,21,,,7,3,21,8,");
    }
}
