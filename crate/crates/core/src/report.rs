//! Named verification results and their JSON form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{FieldElem, Mat};

pub const SCHEMA: &str = "splitdec-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// One verified identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being checked, stated as a formula.
    pub paper_anchor: String,
    pub status: Status,
    /// `"0"` for exact passes, otherwise the largest (relative) residual.
    pub max_residual: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// `exact` or `float`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// `b>1` or `b<-1` for the sign-dependent identities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn skipped(name: impl Into<String>, anchor: impl Into<String>, why: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            paper_anchor: anchor.into(),
            status: Status::Skipped,
            max_residual: "0".into(),
            witness: Some(why.into()),
            mode: None,
            branch: None,
        }
    }

    pub fn with_branch(mut self, branch: &str) -> Check {
        self.branch = Some(branch.to_string());
        self
    }

    /// A yes/no check with no numeric residual.
    pub fn boolean(
        name: impl Into<String>,
        anchor: impl Into<String>,
        ok: bool,
        witness: impl FnOnce() -> String,
    ) -> Check {
        let mut t = Tally::exact();
        if !ok {
            t.fail(witness());
        }
        t.finish(name, anchor)
    }
}

/// Accumulates residuals for one check.
///
/// Exact tallies pass only when every observed difference is exactly zero;
/// float tallies compare relative residuals against `tol`.
#[derive(Debug, Clone)]
pub struct Tally {
    exact: bool,
    tol: f64,
    max: f64,
    failed: bool,
    witness: Option<String>,
}

impl Tally {
    pub fn exact() -> Self {
        Tally {
            exact: true,
            tol: 0.0,
            max: 0.0,
            failed: false,
            witness: None,
        }
    }

    pub fn float(tol: f64) -> Self {
        Tally {
            exact: false,
            tol,
            ..Tally::exact()
        }
    }

    pub fn for_elem<F: FieldElem>(tol: f64) -> Self {
        if F::EXACT {
            Tally::exact()
        } else {
            Tally::float(tol)
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    /// Marks the check failed with a witness (the first one is kept).
    pub fn fail(&mut self, witness: String) {
        self.failed = true;
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    /// Records a difference of magnitude `residual`, relative to `scale`.
    pub fn record(&mut self, residual: f64, is_zero: bool, scale: f64, witness: impl FnOnce() -> String) {
        let rel = residual / scale.max(1.0);
        if self.exact {
            if !is_zero {
                self.max = self.max.max(residual);
                self.fail(witness());
            }
        } else {
            self.max = self.max.max(rel);
            if !(rel <= self.tol) {
                self.fail(witness());
            }
        }
    }

    /// Records `lhs - rhs`, scaled by the larger operand.
    pub fn record_diff<F: FieldElem>(&mut self, lhs: &Mat<F>, rhs: &Mat<F>, witness: impl FnOnce() -> String) {
        let diff = lhs.sub(rhs);
        let scale = if self.exact { 1.0 } else { lhs.max_abs().max(rhs.max_abs()) };
        self.record(diff.max_abs(), diff.is_zero(), scale, witness);
    }

    /// Records that `m` should vanish, relative to `scale`.
    pub fn record_zero<F: FieldElem>(&mut self, m: &Mat<F>, scale: f64, witness: impl FnOnce() -> String) {
        self.record(m.max_abs(), m.is_zero(), scale, witness);
    }

    pub fn record_vec_diff<F: FieldElem>(&mut self, lhs: &[F], rhs: &[F], witness: impl FnOnce() -> String) {
        let mut max: f64 = 0.0;
        let mut zero = true;
        let mut scale: f64 = 0.0;
        for (a, b) in lhs.iter().zip(rhs) {
            let d = a.minus(b);
            zero &= d.is_zero();
            max = max.max(d.magnitude());
            if !self.exact {
                scale = scale.max(a.magnitude()).max(b.magnitude());
            }
        }
        self.record(max, zero, scale, witness);
    }

    pub fn finish(self, name: impl Into<String>, anchor: impl Into<String>) -> Check {
        let max_residual = if self.exact && !self.failed {
            "0".to_string()
        } else {
            format!("{:.3e}", self.max)
        };
        Check {
            name: name.into(),
            paper_anchor: anchor.into(),
            status: if self.failed { Status::Fail } else { Status::Pass },
            max_residual,
            witness: self.witness,
            mode: Some(if self.exact { "exact" } else { "float" }.to_string()),
            branch: None,
        }
    }
}

/// Whole-run report: configuration, checks, and result tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub metadata: serde_json::Value,
    pub checks: Vec<Check>,
    pub tables: serde_json::Value,
}

impl Report {
    pub fn new(metadata: serde_json::Value) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            metadata,
            checks: Vec::new(),
            tables: serde_json::Value::Object(Default::default()),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn set_table(&mut self, key: &str, value: serde_json::Value) {
        if let serde_json::Value::Object(map) = &mut self.tables {
            map.insert(key.to_string(), value);
        }
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("value serializes")
    }

    /// The `checks` array alone, for determinism comparisons.
    pub fn checks_json(&self) -> String {
        let value = serde_json::to_value(&self.checks).expect("checks serialize");
        serde_json::to_string(&value).expect("value serializes")
    }
}
