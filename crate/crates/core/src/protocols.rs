//! Two-mode protocols on coherent inputs: the beamsplitter map, the full
//! swap, imperfect cloning, and the squeezed-swap obstruction.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::fock::{
    conjugate_by, expm, mode_annihilators, residual_in, serialize_complex, Cutoff, Ket, Modes,
    Operator, PolarParam, Window, C64,
};
use crate::formulas::{cosh_guard, two_mode_squeeze, two_mode_squeeze_generator, XCoefficients};
use crate::report::Report;
use crate::states::{coherent, fidelity, tail_warning};

/// `U_J(κ) = exp(κ a1†a2 − κ̄ a2†a1)`.
pub fn beamsplitter_uj(kappa: PolarParam, cutoff: Cutoff) -> Result<Operator> {
    if kappa.is_zero() {
        return Ok(Operator::identity(cutoff, Modes::Two));
    }
    let (a1, a2) = mode_annihilators(cutoff);
    let hop = a1.dagger().mul(&a2)?;
    expm(
        &hop.scale(kappa.value())
            .add_scaled(-kappa.value().conj(), &hop.dagger())?,
    )
}

/// `U_K(κ) = exp(κ a1†a2† − κ̄ a2a1)`, refused when `cosh|κ| > 3`.
pub fn two_mode_squeezer_uk(kappa: PolarParam, cutoff: Cutoff) -> Result<Operator> {
    cosh_guard(kappa.modulus(), "kappa")?;
    if kappa.is_zero() {
        return Ok(Operator::identity(cutoff, Modes::Two));
    }
    let (a1, a2) = mode_annihilators(cutoff);
    let pair = a1.dagger().mul(&a2.dagger())?;
    expm(
        &pair
            .scale(kappa.value())
            .add_scaled(-kappa.value().conj(), &pair.dagger())?,
    )
}

/// `e^{i t1 N1} ⊗ e^{i t2 N2}` as an exact diagonal.
pub fn phase_rotation(t1: f64, t2: f64, cutoff: Cutoff) -> Operator {
    let d = cutoff.dim();
    Operator::diagonal(cutoff, Modes::Two, |idx| {
        Complex64::from_polar(1.0, t1 * (idx / d) as f64 + t2 * (idx % d) as f64)
    })
}

/// One unitary applied during a protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub name: String,
    pub operator: Operator,
}

/// Simulated output of a two-mode protocol next to its closed-form
/// prediction. Serializes as `fidelity`, the stage names and the report.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeProtocolResult {
    pub output: Ket,
    pub predicted: Ket,
    pub fidelity: f64,
    pub stages: Vec<Stage>,
    pub report: Report,
}

impl Serialize for TwoModeProtocolResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let names: Vec<&str> = self.stages.iter().map(|s| s.name.as_str()).collect();
        let mut st = serializer.serialize_struct("TwoModeProtocolResult", 3)?;
        st.serialize_field("fidelity", &self.fidelity)?;
        st.serialize_field("stages", &names)?;
        st.serialize_field("report", &self.report)?;
        st.end()
    }
}

fn coherent_pair(a: PolarParam, b: PolarParam, cutoff: Cutoff) -> Result<Ket> {
    coherent(a, cutoff)?.ket.tensor(&coherent(b, cutoff)?.ket)
}

fn run(
    name: &str,
    params: Vec<PolarParam>,
    input: &Ket,
    stages: Vec<Stage>,
    predicted: Ket,
    tol: f64,
) -> Result<TwoModeProtocolResult> {
    let mut output = input.clone();
    for stage in &stages {
        output = stage.operator.apply(&output)?;
    }
    let fid = fidelity(&output, &predicted)?;
    let mut report = Report::new(name, params, input.cutoff().n_max(), 0, tol);
    report.fidelity("output", fid);
    Ok(TwoModeProtocolResult {
        output,
        predicted,
        fidelity: fid,
        stages,
        report,
    })
}

/// Output labels of `U_J(κ)` on `|α1⟩ ⊗ |α2⟩`:
/// `(cos|κ| α1 + e^{iδ} sin|κ| α2, cos|κ| α2 − e^{−iδ} sin|κ| α1)`.
pub fn beamsplitter_labels(
    a1: PolarParam,
    a2: PolarParam,
    kappa: PolarParam,
) -> (PolarParam, PolarParam) {
    let (c, s) = (kappa.modulus().cos(), kappa.modulus().sin());
    let e = kappa.unit();
    (
        PolarParam::new(a1.value() * c + e * s * a2.value()),
        PolarParam::new(a2.value() * c - e.conj() * s * a1.value()),
    )
}

fn total_energy(ket: &Ket) -> f64 {
    ket.mean_occupation(0) + ket.mean_occupation(1)
}

/// `U_J(κ)` on a coherent pair against the predicted coherent pair.
/// Residuals track conservation of `⟨N1 + N2⟩` by the simulation and by the
/// labels themselves.
pub fn apply_beamsplitter(
    a1: PolarParam,
    a2: PolarParam,
    kappa: PolarParam,
    cutoff: Cutoff,
    tol: f64,
) -> Result<TwoModeProtocolResult> {
    let input = coherent_pair(a1, a2, cutoff)?;
    let (b1, b2) = beamsplitter_labels(a1, a2, kappa);
    let predicted = coherent_pair(b1, b2, cutoff)?;
    let stages = vec![Stage {
        name: "U_J".into(),
        operator: beamsplitter_uj(kappa, cutoff)?,
    }];
    let mut result = run(
        "apply_beamsplitter",
        vec![a1, a2, kappa],
        &input,
        stages,
        predicted,
        tol,
    )?;
    let label_in = a1.modulus().powi(2) + a2.modulus().powi(2);
    let label_out = b1.modulus().powi(2) + b2.modulus().powi(2);
    let drift = (total_energy(&result.output) - total_energy(&input)).abs();
    result
        .report
        .residual("energy_drift", drift)
        .residual("label_energy", (label_in - label_out).abs())
        .warn_all(tail_warning(a1.modulus().max(a2.modulus()), cutoff));
    Ok(result)
}

/// `|α1⟩ ⊗ |α2⟩ → |α2⟩ ⊗ |α1⟩`: `U_J(κ)` with `|κ| = π/2` and phase `δ`,
/// then `e^{−iδN} ⊗ e^{i(δ+π)N}`.
pub fn full_swap(
    a1: PolarParam,
    a2: PolarParam,
    delta: f64,
    cutoff: Cutoff,
    tol: f64,
) -> Result<TwoModeProtocolResult> {
    let input = coherent_pair(a1, a2, cutoff)?;
    let predicted = coherent_pair(a2, a1, cutoff)?;
    let kappa = PolarParam::polar(FRAC_PI_2, delta);
    let stages = vec![
        Stage {
            name: "U_J".into(),
            operator: beamsplitter_uj(kappa, cutoff)?,
        },
        Stage {
            name: "V".into(),
            operator: phase_rotation(-delta, delta + PI, cutoff),
        },
    ];
    let mut result = run(
        "full_swap",
        vec![a1, a2, PolarParam::real(delta)],
        &input,
        stages,
        predicted,
        tol,
    )?;
    result
        .report
        .warn_all(tail_warning(a1.modulus().max(a2.modulus()), cutoff));
    Ok(result)
}

/// [`imperfect_clone_with_phase`] with `δ = 0`.
pub fn imperfect_clone(
    alpha: PolarParam,
    cutoff: Cutoff,
    tol: f64,
) -> Result<TwoModeProtocolResult> {
    imperfect_clone_with_phase(alpha, 0.0, cutoff, tol)
}

/// `|α⟩ ⊗ |0⟩ → |α/√2⟩ ⊗ |α/√2⟩`: `U_J(κ)` with `|κ| = π/4` and phase `δ`,
/// then `I ⊗ e^{i(δ+π)N}`. Residuals compare each marginal's mean
/// occupation with `|α|²/2` and the two reduced density matrices with each
/// other.
pub fn imperfect_clone_with_phase(
    alpha: PolarParam,
    delta: f64,
    cutoff: Cutoff,
    tol: f64,
) -> Result<TwoModeProtocolResult> {
    let input = coherent_pair(alpha, PolarParam::zero(), cutoff)?;
    let half = PolarParam::new(alpha.value() / 2f64.sqrt());
    let predicted = coherent_pair(half, half, cutoff)?;
    let kappa = PolarParam::polar(FRAC_PI_4, delta);
    let stages = vec![
        Stage {
            name: "U_J".into(),
            operator: beamsplitter_uj(kappa, cutoff)?,
        },
        Stage {
            name: "V".into(),
            operator: phase_rotation(0.0, delta + PI, cutoff),
        },
    ];
    let mut result = run(
        "imperfect_clone",
        vec![alpha, PolarParam::real(delta)],
        &input,
        stages,
        predicted,
        tol,
    )?;
    let target = alpha.modulus().powi(2) / 2.0;
    let rho1 = result.output.reduced_density(0)?;
    let rho2 = result.output.reduced_density(1)?;
    let symmetry = (&rho1 - &rho2)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let (n1, n2) = (
        result.output.mean_occupation(0),
        result.output.mean_occupation(1),
    );
    result
        .report
        .residual("mean_occupation_1", (n1 - target).abs())
        .residual("mean_occupation_2", (n2 - target).abs())
        .residual("marginal_symmetry", symmetry)
        .warn_all(tail_warning(alpha.modulus(), cutoff));
    Ok(result)
}

/// Cross-term magnitude below which the obstruction is considered absent.
pub const CROSS_TERM_ZERO: f64 = 1e-12;

/// Quadratic generator of `U_J(κ) S_1(β1) S_2(β2) U_J(κ)†` and its
/// verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionOutcome {
    pub coefficients: XCoefficients,
    #[serde(serialize_with = "serialize_complex")]
    pub cross_term: C64,
    pub report: Report,
}

/// Conjugating two single-mode squeezers by `U_J(κ)` gives `e^X` with `X`
/// quadratic; the `a1†a2†` coefficient `(β2κ − β1κ̄) sin(2|κ|)/(2|κ|)`
/// obstructs a squeezed-state swap. Residuals: the conjugated product
/// against `e^X`, the conjugated generator against `X`, and, when the cross
/// term vanishes, the conjugated product against the unconjugated one.
pub fn squeezed_swap_obstruction(
    beta1: PolarParam,
    beta2: PolarParam,
    kappa: PolarParam,
    cutoff: Cutoff,
    margin: usize,
    tol: f64,
) -> Result<ObstructionOutcome> {
    cosh_guard(beta1.modulus(), "beta1")?;
    cosh_guard(beta2.modulus(), "beta2")?;
    let window = Window::TotalOccupation(margin);
    let coefficients = XCoefficients::closed_form(kappa, beta1, beta2);
    let cross_term = coefficients.a1dag_a2dag;
    let mut report = Report::new(
        "squeezed_swap_obstruction",
        vec![beta1, beta2, kappa],
        cutoff.n_max(),
        margin,
        tol,
    );
    report.diagnostic("cross_term_modulus", cross_term.norm());

    let u = beamsplitter_uj(kappa, cutoff)?;
    let s12 = two_mode_squeeze(beta1, beta2, cutoff)?;
    let conjugated = conjugate_by(&u, &s12)?;
    let x = coefficients.to_operator(cutoff);
    report.residual("exponential", residual_in(&conjugated, &expm(&x)?, window)?);
    let generator = conjugate_by(&u, &two_mode_squeeze_generator(beta1, beta2, cutoff)?)?;
    report.residual(
        "generator",
        residual_in(&generator, &x, Window::TotalOccupation(2))?,
    );
    if cross_term.norm() <= CROSS_TERM_ZERO {
        report.residual("no_change", residual_in(&conjugated, &s12, window)?);
    }
    Ok(ObstructionOutcome {
        coefficients,
        cross_term,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number, on_mode, tensor, Mode};

    const TOL: f64 = 1e-6;

    fn cut(n: usize) -> Cutoff {
        Cutoff::new(n).unwrap()
    }

    #[test]
    fn beamsplitter_fixes_vacuum_and_preserves_number() {
        let k = cut(10);
        let vac = Ket::vacuum(k, Modes::Two);
        for kappa in [
            PolarParam::zero(),
            PolarParam::polar(0.7, 2.0),
            PolarParam::polar(1.9, -1.0),
        ] {
            let u = beamsplitter_uj(kappa, k).unwrap();
            assert!(u.apply(&vac).unwrap().distance(&vac).unwrap() <= 1e-12);
            let n_total = on_mode(&number(k), Mode::First)
                .unwrap()
                .add(&on_mode(&number(k), Mode::Second).unwrap())
                .unwrap();
            let comm = u
                .mul(&n_total)
                .unwrap()
                .sub(&n_total.mul(&u).unwrap())
                .unwrap();
            assert!(comm.frobenius_norm() <= 1e-10);
        }
        assert_eq!(
            beamsplitter_uj(PolarParam::zero(), k).unwrap(),
            Operator::identity(k, Modes::Two)
        );
    }

    #[test]
    fn two_mode_squeezer_pairs_only() {
        let k = cut(12);
        let u = two_mode_squeezer_uk(PolarParam::polar(0.5, 0.3), k).unwrap();
        let out = u.apply(&Ket::vacuum(k, Modes::Two)).unwrap();
        let d = k.dim();
        for idx in 0..d * d {
            if idx / d != idx % d {
                assert!(out.amplitude(idx).norm() <= 1e-10);
            }
        }
        assert!(two_mode_squeezer_uk(PolarParam::real(1.8), k).is_err());
        assert_eq!(
            two_mode_squeezer_uk(PolarParam::zero(), k).unwrap(),
            Operator::identity(k, Modes::Two)
        );
    }

    #[test]
    fn beamsplitter_labels_at_quarter_turn() {
        let (b1, b2) = beamsplitter_labels(
            PolarParam::real(1.0),
            PolarParam::cartesian(0.0, 1.0),
            PolarParam::real(FRAC_PI_2),
        );
        assert!((b1.value() - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((b2.value() - C64::new(-1.0, 0.0)).norm() < 1e-15);
        // α2 = 0: second label is e^{−i(δ+π)} sin|κ| α
        let kappa = PolarParam::polar(0.6, 0.9);
        let alpha = PolarParam::cartesian(0.4, -0.3);
        let (b1, b2) = beamsplitter_labels(alpha, PolarParam::zero(), kappa);
        assert!((b1.value() - alpha.value() * 0.6f64.cos()).norm() < 1e-15);
        let expected = Complex64::from_polar(1.0, -(0.9 + PI)) * 0.6f64.sin() * alpha.value();
        assert!((b2.value() - expected).norm() < 1e-15);
    }

    #[test]
    fn beamsplitter_identity_and_energy() {
        let k = cut(20);
        let r = apply_beamsplitter(
            PolarParam::real(0.5),
            PolarParam::cartesian(0.1, 0.3),
            PolarParam::zero(),
            k,
            TOL,
        )
        .unwrap();
        assert!(r.fidelity >= 1.0 - 1e-14);
        let r = apply_beamsplitter(
            PolarParam::real(0.8),
            PolarParam::cartesian(-0.2, 0.6),
            PolarParam::polar(1.1, 0.4),
            k,
            TOL,
        )
        .unwrap();
        assert!(r.report.passed, "{:?}", r.report);
        assert!(r.report.residuals["energy_drift"] <= 1e-8);
    }

    #[test]
    fn swap_of_equal_pair_and_delta_independence() {
        let k = cut(24);
        let a = PolarParam::cartesian(0.6, -0.2);
        let r = full_swap(a, a, 0.3, k, TOL).unwrap();
        assert!(r.fidelity >= 1.0 - 1e-8);
        let b = PolarParam::cartesian(-0.4, 0.5);
        let r0 = full_swap(a, b, 0.0, k, TOL).unwrap();
        let r1 = full_swap(a, b, PI / 3.0, k, TOL).unwrap();
        assert_eq!(r0.predicted, r1.predicted);
        assert!(fidelity(&r0.output, &r1.output).unwrap() >= 1.0 - 1e-8);
        assert_eq!(
            r0.stages
                .iter()
                .map(|s| s.name.as_str())
                .collect::<Vec<_>>(),
            ["U_J", "V"]
        );
    }

    #[test]
    fn swap_twice_returns_input() {
        let k = cut(24);
        let (a, b) = (
            PolarParam::cartesian(0.7, 0.1),
            PolarParam::cartesian(0.0, -0.5),
        );
        let once = full_swap(a, b, 0.2, k, TOL).unwrap();
        let mut out = once.output.clone();
        for stage in &once.stages {
            out = stage.operator.apply(&out).unwrap();
        }
        assert!(fidelity(&out, &coherent_pair(a, b, k).unwrap()).unwrap() >= 1.0 - 1e-7);
    }

    #[test]
    fn clone_of_vacuum_and_phase_independence() {
        let k = cut(20);
        let r = imperfect_clone(PolarParam::zero(), k, TOL).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-14);
        let a = PolarParam::cartesian(0.7, 0.2);
        let r0 = imperfect_clone(a, k, TOL).unwrap();
        let r1 = imperfect_clone_with_phase(a, 1.3, k, TOL).unwrap();
        assert_eq!(r0.predicted, r1.predicted);
        assert!(r1.report.passed, "{:?}", r1.report);
    }

    #[test]
    fn protocol_serializes_summary() {
        let r = imperfect_clone(PolarParam::zero(), cut(3), TOL).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["stages"], serde_json::json!(["U_J", "V"]));
        assert_eq!(json["report"]["name"], "imperfect_clone");
        assert!(json.get("output").is_none());
    }

    #[test]
    fn obstruction_cross_term_values() {
        let beta = PolarParam::real(0.3);
        // κ real, β1 = β2: no cross term
        let x = XCoefficients::closed_form(PolarParam::real(0.7), beta, beta);
        assert!(x.a1dag_a2dag.norm() < 1e-16);
        // κ = ik: cross term iβ sin(2k)
        let k = 0.5;
        let x = XCoefficients::closed_form(PolarParam::cartesian(0.0, k), beta, beta);
        let expected = C64::new(0.0, 0.3 * (2.0 * k).sin());
        assert!((x.a1dag_a2dag - expected).norm() < 1e-15);
    }

    #[test]
    fn obstruction_small_space() {
        let k = cut(16);
        let beta = PolarParam::real(0.2);
        let out = squeezed_swap_obstruction(beta, beta, PolarParam::real(0.6), k, 10, TOL).unwrap();
        assert!(out.report.residuals.contains_key("no_change"));
        let out =
            squeezed_swap_obstruction(beta, beta, PolarParam::cartesian(0.0, 0.5), k, 10, TOL)
                .unwrap();
        assert!(!out.report.residuals.contains_key("no_change"));
        assert!(out.cross_term.norm() > 1e-3);
        assert!(out.report.residuals["generator"] < 1e-12);
    }

    #[test]
    fn phase_rotation_is_product_of_single_mode_phases() {
        let k = cut(5);
        let v = phase_rotation(0.3, -1.2, k);
        let single = |t: f64| {
            Operator::diagonal(k, Modes::One, |n| Complex64::from_polar(1.0, t * n as f64))
        };
        let expected = tensor(&single(0.3), &single(-1.2)).unwrap();
        assert!(v.sub(&expected).unwrap().frobenius_norm() < 1e-13);
    }
}
