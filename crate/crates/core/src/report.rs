//! JSON reports and CSV trajectories.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every binary64 value; non-finite values become `null` in JSON.

use std::io::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::harness::CertificationSummary;
use crate::linalg::{EigenClass, Vec2};
use crate::second_order::CrossCheck;
use crate::stability::StabilityReport;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float serialized through [`fmt_f64`], or `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_f64(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenParams(Vec<(&'static str, Num)>);

impl Serialize for EigenParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenJson {
    pub tag: &'static str,
    pub params: EigenParams,
}

impl From<&EigenClass> for EigenJson {
    fn from(ec: &EigenClass) -> Self {
        let params = match *ec {
            EigenClass::RealDistinct { lambda1, lambda2 } => {
                vec![("lambda1", Num(lambda1)), ("lambda2", Num(lambda2))]
            }
            EigenClass::RealRepeated { lambda, eta } => {
                vec![("lambda", Num(lambda)), ("eta", Num(eta))]
            }
            EigenClass::ComplexPair { alpha, beta } => {
                vec![("alpha", Num(alpha)), ("beta", Num(beta))]
            }
        };
        EigenJson {
            tag: ec.tag(),
            params: EigenParams(params),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateJson {
    pub label: &'static str,
    pub value: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationJson {
    pub family: &'static str,
    pub eps: Num,
    pub sup_dev: Num,
    pub ratio: Num,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckJson {
    pub formula: &'static str,
    pub compared_with: &'static str,
    pub formula_value: Num,
    pub general_value: Num,
    pub abs_diff: Num,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub matrix: [Num; 4],
    pub eigen_class: EigenJson,
    pub stable: bool,
    pub marginal: bool,
    pub k_candidates: Vec<CandidateJson>,
    pub k: Option<Num>,
    pub lower_bound: Option<Num>,
    pub best: bool,
    pub best_rule: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<Vec<CertificationJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckJson>,
}

impl ReportJson {
    pub fn new(report: &StabilityReport) -> Self {
        ReportJson {
            matrix: report.matrix.row_major().map(Num),
            eigen_class: EigenJson::from(&report.eigen),
            stable: report.stable,
            marginal: report.marginal,
            k_candidates: report
                .candidates
                .iter()
                .map(|c| CandidateJson {
                    label: c.label.as_str(),
                    value: Num(c.value),
                })
                .collect(),
            k: report.k_reported.map(Num),
            lower_bound: report.lower_bound.map(Num),
            best: report.best_attained,
            best_rule: report.best_rule.map(|r| r.as_str()),
            certification: None,
            cross_check: None,
        }
    }

    pub fn with_certification(mut self, summary: &CertificationSummary) -> Self {
        self.certification = Some(
            summary
                .runs
                .iter()
                .map(|r| CertificationJson {
                    family: r.spec.name(),
                    eps: Num(r.spec.epsilon),
                    sup_dev: Num(r.sup_deviation),
                    ratio: Num(r.ratio),
                    pass: r.pass,
                })
                .collect(),
        );
        self
    }

    pub fn with_cross_check(mut self, cc: &CrossCheck) -> Self {
        self.cross_check = Some(CrossCheckJson {
            formula: cc.formula.as_str(),
            compared_with: cc.compared_with.as_str(),
            formula_value: Num(cc.formula_value),
            general_value: Num(cc.general_value),
            abs_diff: Num(cc.abs_diff),
            agrees: cc.agrees(),
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const CSV_HEADER: [&str; 6] = ["t", "phi1", "phi2", "x1", "x2", "dev"];

/// One CSV row: `t, φ1, φ2, x1, x2, dev`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub phi: Vec2,
    pub x: Vec2,
    pub dev: f64,
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.t),
            fmt_f64(r.phi.v1),
            fmt_f64(r.phi.v2),
            fmt_f64(r.x.v1),
            fmt_f64(r.x.v2),
            fmt_f64(r.dev),
        ])?;
    }
    w.flush()?;
    Ok(())
}
