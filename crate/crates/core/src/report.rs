use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fock::PolarParam;

/// Outcome of one identity check or protocol run.
///
/// `passed` holds exactly when every residual and every fidelity deficit
/// `1 − F` is at most `tolerance`; a NaN anywhere fails the report.
/// `diagnostics` carries measured values that are reported but not
/// asserted; `warnings` carries cutoff-adequacy notices. Neither is part of
/// the serialized body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub params: Vec<PolarParam>,
    pub n_max: usize,
    pub margin: usize,
    pub residuals: BTreeMap<String, f64>,
    pub fidelities: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip)]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(
        name: impl Into<String>,
        params: Vec<PolarParam>,
        n_max: usize,
        margin: usize,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            params,
            n_max,
            margin,
            residuals: BTreeMap::new(),
            fidelities: BTreeMap::new(),
            tolerance,
            passed: true,
            diagnostics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn residual(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.residuals.insert(name.into(), value);
        self.refresh();
        self
    }

    pub fn fidelity(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.fidelities.insert(name.into(), value);
        self.refresh();
        self
    }

    pub fn diagnostic(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.diagnostics.insert(name.into(), value);
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn warn_all(&mut self, messages: impl IntoIterator<Item = String>) -> &mut Self {
        self.warnings.extend(messages);
        self
    }

    fn refresh(&mut self) {
        let tol = self.tolerance;
        self.passed = self.residuals.values().all(|r| *r <= tol)
            && self.fidelities.values().all(|f| 1.0 - *f <= tol);
    }

    /// Largest residual, or 0 when none was recorded.
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .values()
            .fold(0.0, |m, r| if r.is_nan() { f64::NAN } else { m.max(*r) })
    }

    /// Smallest fidelity, or 1 when none was recorded.
    pub fn min_fidelity(&self) -> f64 {
        self.fidelities
            .values()
            .fold(1.0, |m, f| if f.is_nan() { f64::NAN } else { m.min(*f) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule() {
        let mut r = Report::new("x", vec![], 4, 1, 1e-6);
        assert!(r.passed);
        r.residual("a", 1e-7);
        assert!(r.passed);
        r.fidelity("f", 1.0 - 2e-6);
        assert!(!r.passed);
        r.fidelity("f", 1.0);
        assert!(r.passed);
        r.residual("b", f64::NAN);
        assert!(!r.passed);
    }

    #[test]
    fn diagnostics_and_warnings_do_not_affect_passing_or_json() {
        let mut r = Report::new("x", vec![PolarParam::cartesian(1.0, -0.5)], 4, 1, 1e-6);
        r.diagnostic("witness", 3.0).warn("cutoff inadequate");
        assert!(r.passed);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"name":"x","params":[{"re":1.0,"im":-0.5}],"n_max":4,"margin":1,"residuals":{},"fidelities":{},"tolerance":1e-6,"passed":true}"#
        );
    }
}
