use std::str::FromStr;

use clap::ValueEnum;
use fockforge::fock::{Cutoff, PolarParam};
use fockforge::formulas;
use fockforge::protocols;
use fockforge::Report;
use serde::Serialize;

use crate::config::{ConfigError, MarginSetting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum CheckName {
    #[value(name = "check_J_rotation")]
    #[serde(rename = "check_J_rotation")]
    JRotation,
    #[value(name = "check_K_rotation")]
    #[serde(rename = "check_K_rotation")]
    KRotation,
    #[value(name = "check_squeeze_conjugation")]
    #[serde(rename = "check_squeeze_conjugation")]
    SqueezeConjugation,
    #[value(name = "check_SDS")]
    #[serde(rename = "check_SDS")]
    Sds,
    #[value(name = "check_SSS_commute")]
    #[serde(rename = "check_SSS_commute")]
    SssCommute,
    #[value(name = "check_phase_formula")]
    #[serde(rename = "check_phase_formula")]
    PhaseFormula,
    #[value(name = "check_UJ_squeeze_invariance")]
    #[serde(rename = "check_UJ_squeeze_invariance")]
    UjSqueezeInvariance,
    #[value(name = "full_swap")]
    #[serde(rename = "full_swap")]
    FullSwap,
    #[value(name = "imperfect_clone")]
    #[serde(rename = "imperfect_clone")]
    ImperfectClone,
}

impl CheckName {
    /// Residual and fidelity keys the check records, in CSV column order.
    pub fn columns(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Self::JRotation => (&["a1", "a2", "su2_determinant", "su2_unitarity"], &[]),
            Self::KRotation => (&["a1", "a2_dagger", "su11_determinant", "su11_metric"], &[]),
            Self::SqueezeConjugation => (&["a"], &[]),
            Self::Sds => (&["sds"], &["scale_down", "scale_up"]),
            Self::SssCommute => (&["commutator", "generator"], &[]),
            Self::PhaseFormula => (&["conjugation", "vacuum"], &["state"]),
            Self::UjSqueezeInvariance => (
                &[
                    "coef_a1dag_sq",
                    "coef_a2dag_sq",
                    "coef_closed_form",
                    "coef_cross",
                    "invariance",
                ],
                &[],
            ),
            Self::FullSwap => (&[], &["output"]),
            Self::ImperfectClone => (
                &[
                    "marginal_symmetry",
                    "mean_occupation_1",
                    "mean_occupation_2",
                ],
                &["output"],
            ),
        }
    }

    /// Runs the check. `param` is the primary argument (its real part is
    /// the angle for the phase formula); `aux` is the second argument where
    /// one exists. Protocols ignore the margin.
    pub fn run(
        self,
        param: PolarParam,
        aux: PolarParam,
        cutoff: Cutoff,
        margin: usize,
        tol: f64,
    ) -> fockforge::Result<Report> {
        Ok(match self {
            Self::JRotation => formulas::check_j_rotation(param, cutoff, margin, tol)?,
            Self::KRotation => formulas::check_k_rotation(param, cutoff, margin, tol)?,
            Self::SqueezeConjugation => {
                formulas::check_squeeze_conjugation(param, cutoff, margin, tol)?
            }
            Self::Sds => formulas::check_sds(param, aux, cutoff, margin, tol)?,
            Self::SssCommute => formulas::check_sss_commute(param, aux, cutoff, margin, tol)?,
            Self::PhaseFormula => {
                formulas::check_phase_formula(param.value().re, aux, cutoff, margin, tol)?
            }
            Self::UjSqueezeInvariance => {
                formulas::check_uj_squeeze_invariance(param, aux, cutoff, margin, tol)?
            }
            Self::FullSwap => protocols::full_swap(param, aux, 0.0, cutoff, tol)?.report,
            Self::ImperfectClone => protocols::imperfect_clone(param, cutoff, tol)?.report,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Replace the modulus of the primary parameter.
    Modulus,
    /// Replace the phase of the primary parameter.
    Phase,
    /// Replace the cutoff.
    Nmax,
}

/// Grid values: a comma list, `start:stop:count` (inclusive, evenly
/// spaced), or the empty string.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let bad = || ConfigError::Grid(format!("bad grid {s:?}"));
        let number = |part: &str| -> Result<f64, ConfigError> {
            part.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(bad)
        };
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self(Vec::new()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, count] => {
                let (start, stop) = (number(start)?, number(stop)?);
                let count: usize = count.trim().parse().map_err(|_| bad())?;
                Ok(Self(match count {
                    0 => Vec::new(),
                    1 => vec![start],
                    _ => (0..count)
                        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                        .collect(),
                }))
            }
            [_] => s.split(',').map(number).collect::<Result<_, _>>().map(Self),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub check: CheckName,
    pub axis: Axis,
    pub grid: Grid,
    pub param: PolarParam,
    pub aux: PolarParam,
}

/// One grid point. `report` is absent when the check refused the point;
/// `error` then holds the reason.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub n_max: usize,
    pub margin: usize,
    pub param: PolarParam,
    pub aux: PolarParam,
    pub passed: bool,
    pub report: Option<Report>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl SweepSpec {
    /// Validates the grid against the axis before any work is done.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.axis == Axis::Nmax {
            for &v in &self.grid.0 {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(ConfigError::Grid(format!(
                        "cutoff grid value {v} is not a positive integer"
                    )));
                }
            }
        }
        if self.axis == Axis::Modulus && self.grid.0.iter().any(|&v| v < 0.0) {
            return Err(ConfigError::Grid(
                "modulus grid values must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn point(&self, value: f64, n_max: usize) -> (PolarParam, usize) {
        match self.axis {
            Axis::Modulus => (PolarParam::polar(value, self.param.phase()), n_max),
            Axis::Phase => (PolarParam::polar(self.param.modulus(), value), n_max),
            Axis::Nmax => (self.param, value as usize),
        }
    }

    /// Rows in grid order.
    pub fn run(&self, n_max: usize, margin: MarginSetting, tol: f64) -> Vec<SweepRow> {
        self.grid
            .0
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                let (param, n_max) = self.point(value, n_max);
                let cutoff = Cutoff::new(n_max).expect("validated cutoff");
                let margin = margin.resolve(cutoff);
                let outcome = self.check.run(param, self.aux, cutoff, margin, tol);
                let (report, error) = match outcome {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                let warnings = report
                    .as_ref()
                    .map(|r| r.warnings.clone())
                    .unwrap_or_default();
                let passed = report.as_ref().is_some_and(|r| r.passed) && warnings.is_empty();
                SweepRow {
                    index,
                    value,
                    n_max,
                    margin,
                    param,
                    aux: self.aux,
                    passed,
                    report,
                    warnings,
                    error,
                }
            })
            .collect()
    }

    /// Wide CSV header: point columns, then the check's residuals and
    /// fidelities, then the verdict.
    pub fn header(&self) -> Vec<String> {
        let (residuals, fidelities) = self.check.columns();
        let mut h: Vec<String> = [
            "index", "value", "n_max", "margin", "param_re", "param_im", "aux_re", "aux_im",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(residuals.iter().map(|r| format!("residual_{r}")));
        h.extend(fidelities.iter().map(|f| format!("fidelity_{f}")));
        h.extend(["passed".to_string(), "warnings".to_string()]);
        h
    }

    pub fn record(&self, row: &SweepRow) -> Vec<String> {
        let (residuals, fidelities) = self.check.columns();
        let cell = |v: Option<&f64>| v.map(f64::to_string).unwrap_or_default();
        let mut r = vec![
            row.index.to_string(),
            row.value.to_string(),
            row.n_max.to_string(),
            row.margin.to_string(),
            row.param.value().re.to_string(),
            row.param.value().im.to_string(),
            row.aux.value().re.to_string(),
            row.aux.value().im.to_string(),
        ];
        let report = row.report.as_ref();
        r.extend(
            residuals
                .iter()
                .map(|k| cell(report.and_then(|rep| rep.residuals.get(*k)))),
        );
        r.extend(
            fidelities
                .iter()
                .map(|k| cell(report.and_then(|rep| rep.fidelities.get(*k)))),
        );
        r.push(row.passed.to_string());
        r.push(row.warnings.len().to_string());
        r
    }
}
