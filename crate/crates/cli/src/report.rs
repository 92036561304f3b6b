//! Report schemas and number formatting.
//!
//! JSON floats are written in the shortest form that parses back to the same
//! double (at most 17 significant digits); CSV uses 12 significant digits.

use ineq_forge_core::spectral_verifier::{ProbeStatus, ScheduleStep, Witness};
use ineq_forge_core::{FamilyTag, RadialDomain, RhsAdjustment, VerificationReport, Verdict};
use serde::{Deserialize, Serialize};

pub fn csv_num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn csv_row(cells: &[f64]) -> String {
    cells.iter().map(|&x| csv_num(x)).collect::<Vec<_>>().join(",")
}

pub fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Radii are omitted when they are not representable (|log r| > 700).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainJson {
    pub log_r_in: f64,
    pub log_r_out: f64,
    pub r_in: Option<f64>,
    pub r_out: Option<f64>,
}

impl From<RadialDomain> for DomainJson {
    fn from(d: RadialDomain) -> Self {
        let r = |s: f64| (s.abs() <= 700.0).then(|| s.exp());
        DomainJson {
            log_r_in: d.log_in,
            log_r_out: d.log_out,
            r_in: r(d.log_in),
            r_out: r(d.log_out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub domain: DomainJson,
    pub nodes: usize,
    pub lambda_min: f64,
    pub tolerance: f64,
}

impl From<&ScheduleStep> for StepJson {
    fn from(s: &ScheduleStep) -> Self {
        StepJson {
            domain: s.domain.into(),
            nodes: s.nodes,
            lambda_min: s.lambda_min,
            tolerance: s.tolerance,
        }
    }
}

/// Negative direction as (log r, w) node/value pairs, w the reduced amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub quadratic_form: f64,
    pub square_route: Option<f64>,
    pub scale: f64,
    pub valid: bool,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        WitnessJson {
            nodes: w.log_radius.clone(),
            values: w.values.clone(),
            quadratic_form: w.quadratic_form,
            square_route: w.square_route,
            scale: w.scale,
            valid: w.is_valid(),
        }
    }
}

/// Report of `verify` and `falsify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub command: String,
    pub family: String,
    pub params: FamilyTag,
    #[serde(rename = "N")]
    pub n: usize,
    pub verdict: Verdict,
    pub lambda_min: f64,
    pub tolerance: f64,
    pub grid: usize,
    pub domain: DomainJson,
    pub adjustment: RhsAdjustment,
    pub steps: Vec<StepJson>,
    pub witness: Option<WitnessJson>,
    pub timestamp: u64,
}

impl VerificationJson {
    pub fn new(command: &str, r: &VerificationReport) -> Self {
        VerificationJson {
            command: command.into(),
            family: r.family.name().into(),
            params: r.family,
            n: r.n,
            verdict: r.verdict,
            lambda_min: r.lambda_min,
            tolerance: r.tolerance,
            grid: r.grid_size,
            domain: r.domain.into(),
            adjustment: r.adjustment,
            steps: r.steps.iter().map(StepJson::from).collect(),
            witness: r.witness.as_ref().map(WitnessJson::from),
            timestamp: timestamp(),
        }
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("log_r_in,log_r_out,nodes,lambda_min,tolerance\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_num(s.domain.log_r_in),
                csv_num(s.domain.log_r_out),
                s.nodes,
                csv_num(s.lambda_min),
                csv_num(s.tolerance)
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsJson {
    pub family: String,
    pub params: FamilyTag,
    #[serde(rename = "N")]
    pub n: usize,
    /// Rows t, W_0..W_N, partial_sum.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityJson {
    pub family: String,
    pub params: FamilyTag,
    #[serde(rename = "N")]
    pub n: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeJson {
    pub family: String,
    pub params: FamilyTag,
    pub level: usize,
    pub candidate: String,
    pub factor: Option<f64>,
    /// (t, ratio) pairs.
    pub samples: Vec<(f64, f64)>,
    pub limit: Option<f64>,
    pub uncertainty: Option<f64>,
    pub threshold: f64,
    pub exceeds_optimal: bool,
    pub status: ProbeStatus,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsJson {
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inequality_fails: Option<bool>,
}

/// One-line JSON with a space after `:` and `,` between members.
struct Spaced;

impl serde_json::ser::Formatter for Spaced {
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b": ")
    }
}

pub fn json_line<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Spaced);
    v.serialize(&mut ser).expect("reports serialize");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn table_csv(columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_twelve_significant_digits() {
        assert_eq!(csv_num(0.1), "1.00000000000e-1");
        assert_eq!(csv_num(-1234.5678901234), "-1.23456789012e3");
    }

    #[test]
    fn constants_line_format() {
        let c = ConstantsJson { lambda: Some(10.0), inequality_fails: None };
        assert_eq!(json_line(&c), r#"{"lambda": 10.0}"#);
        let c = ConstantsJson { lambda: None, inequality_fails: Some(true) };
        assert_eq!(json_line(&c), r#"{"lambda": null, "inequality_fails": true}"#);
    }

    #[test]
    fn domain_radii_only_when_representable() {
        let d: DomainJson = RadialDomain::from_log(-1e4, 0.0).unwrap().into();
        assert_eq!(d.r_in, None);
        assert_eq!(d.r_out, Some(1.0));
    }
}
