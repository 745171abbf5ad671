//! Numerical checks of the conjugation identities behind the swap and
//! cloning constructions. Every check compares an `expm`-built conjugation
//! against its closed form on a window away from the cutoff and returns a
//! [`Report`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::{
    conjugate_by, creation, expm, mode_annihilators, norm_in, number, on_mode, residual_in,
    serialize_complex, sinc, sinhc, Cutoff, Ket, Mode, Modes, Operator, PolarParam, Window, C64,
};
use crate::protocols::{beamsplitter_uj, two_mode_squeezer_uk};
use crate::report::Report;
use crate::states::{coherent, displacement, fidelity, squeeze, squeeze_generator, tail_warning};

/// Hyperbolic conjugations are refused when `cosh|t|` exceeds this bound.
pub const COSH_GUARD: f64 = 3.0;

pub(crate) fn cosh_guard(modulus: f64, what: &str) -> Result<()> {
    let c = modulus.cosh();
    if c > COSH_GUARD {
        return Err(Error::GuardViolated(format!(
            "cosh|{what}| = {c:.4} exceeds {COSH_GUARD}"
        )));
    }
    Ok(())
}

/// Cutoff, margin and parameter ranges at which a check is known to resolve
/// its identity to the acceptance tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckPlan {
    pub n_max: usize,
    pub margin: usize,
    /// Bound on the modulus of the first parameter.
    pub max_modulus: f64,
    /// Bound on the modulus of the second parameter, when there is one.
    pub max_aux_modulus: f64,
}

impl CheckPlan {
    pub fn cutoff(&self) -> Cutoff {
        Cutoff::new(self.n_max).expect("plans use n_max >= 1")
    }
}

/// Pinned plans. Hyperbolic conjugations pump occupation far past the
/// naive `n_max / 4` margin, so those plans keep only a low window of a
/// large space.
pub mod plans {
    use std::f64::consts::PI;

    use super::CheckPlan;

    pub const J_ROTATION: CheckPlan = CheckPlan {
        n_max: 24,
        margin: 6,
        max_modulus: 1.0,
        max_aux_modulus: 0.0,
    };
    pub const K_ROTATION: CheckPlan = CheckPlan {
        n_max: 40,
        margin: 36,
        max_modulus: 0.8,
        max_aux_modulus: 0.0,
    };
    pub const SQUEEZE_CONJUGATION: CheckPlan = CheckPlan {
        n_max: 192,
        margin: 172,
        max_modulus: 0.8,
        max_aux_modulus: 0.0,
    };
    pub const SDS: CheckPlan = CheckPlan {
        n_max: 192,
        margin: 172,
        max_modulus: 0.8,
        max_aux_modulus: 1.0,
    };
    pub const SSS_COMMUTE: CheckPlan = CheckPlan {
        n_max: 192,
        margin: 172,
        max_modulus: 0.8,
        max_aux_modulus: 0.8,
    };
    pub const PHASE: CheckPlan = CheckPlan {
        n_max: 36,
        margin: 9,
        max_modulus: PI,
        max_aux_modulus: 2.0,
    };
    pub const UJ_SQUEEZE: CheckPlan = CheckPlan {
        n_max: 32,
        margin: 24,
        max_modulus: 1.0,
        max_aux_modulus: 0.5,
    };
    pub const OBSTRUCTION: CheckPlan = CheckPlan {
        n_max: 32,
        margin: 24,
        max_modulus: 1.0,
        max_aux_modulus: 0.5,
    };
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn mode_ops(cutoff: Cutoff) -> (Operator, Operator) {
    mode_annihilators(cutoff)
}

/// `‖M†M − I‖_F` for a 2×2 matrix.
fn unitarity_defect(m: [[C64; 2]; 2]) -> f64 {
    metric_defect(m, [1.0, 1.0])
}

/// `‖M† η M − η‖_F` with `η = diag(eta)`.
fn metric_defect(m: [[C64; 2]; 2], eta: [f64; 2]) -> f64 {
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..2 {
                acc += m[k][i].conj() * eta[k] * m[k][j];
            }
            let target = if i == j { eta[i] } else { 0.0 };
            sum += (acc - target).norm_sqr();
        }
    }
    sum.sqrt()
}

fn det(m: [[C64; 2]; 2]) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Coefficients of `U_J(t) a_i U_J(t)†` on `(a1, a2)`:
/// row 0 is the image of `a1`, row 1 the image of `a2`.
pub fn j_rotation_matrix(t: PolarParam) -> [[C64; 2]; 2] {
    let r = t.modulus();
    let s = sinc(r);
    [
        [c(r.cos()), -t.value() * s],
        [t.value().conj() * s, c(r.cos())],
    ]
}

/// Coefficients of `U_K(t) a1 U_K(t)†` and `U_K(t) a2† U_K(t)†` on `(a1, a2†)`.
pub fn k_rotation_matrix(t: PolarParam) -> [[C64; 2]; 2] {
    let r = t.modulus();
    let s = sinhc(r);
    [
        [c(r.cosh()), -t.value() * s],
        [-t.value().conj() * s, c(r.cosh())],
    ]
}

/// `U_J(t) a_i U_J(t)† = cos|t| a_i ∓ …`, both modes, plus the SU(2)
/// membership of the coefficient matrix. Compared on the total-occupation
/// window, on which `U_J` is exact.
pub fn check_j_rotation(t: PolarParam, cutoff: Cutoff, margin: usize, tol: f64) -> Result<Report> {
    let window = Window::TotalOccupation(margin);
    let mut report = Report::new("check_J_rotation", vec![t], cutoff.n_max(), margin, tol);
    let (a1, a2) = mode_ops(cutoff);
    let u = beamsplitter_uj(t, cutoff)?;
    let m = j_rotation_matrix(t);
    let lhs1 = conjugate_by(&u, &a1)?;
    let rhs1 = a1.scale(m[0][0]).add_scaled(m[0][1], &a2)?;
    let lhs2 = conjugate_by(&u, &a2)?;
    let rhs2 = a1.scale(m[1][0]).add_scaled(m[1][1], &a2)?;
    report
        .residual("a1", residual_in(&lhs1, &rhs1, window)?)
        .residual("a2", residual_in(&lhs2, &rhs2, window)?)
        .residual("su2_determinant", (det(m) - 1.0).norm())
        .residual("su2_unitarity", unitarity_defect(m));
    Ok(report)
}

/// `U_K(t) a1 U_K(t)† = cosh|t| a1 − t sinh|t|/|t| a2†` and the `a2†`
/// counterpart, plus the SU(1,1) membership of the coefficient matrix.
pub fn check_k_rotation(t: PolarParam, cutoff: Cutoff, margin: usize, tol: f64) -> Result<Report> {
    cosh_guard(t.modulus(), "t")?;
    let window = Window::TotalOccupation(margin);
    let mut report = Report::new("check_K_rotation", vec![t], cutoff.n_max(), margin, tol);
    let (a1, a2) = mode_ops(cutoff);
    let a2d = a2.dagger();
    let u = two_mode_squeezer_uk(t, cutoff)?;
    let m = k_rotation_matrix(t);
    let lhs1 = conjugate_by(&u, &a1)?;
    let rhs1 = a1.scale(m[0][0]).add_scaled(m[0][1], &a2d)?;
    let lhs2 = conjugate_by(&u, &a2d)?;
    let rhs2 = a1.scale(m[1][0]).add_scaled(m[1][1], &a2d)?;
    report
        .residual("a1", residual_in(&lhs1, &rhs1, window)?)
        .residual("a2_dagger", residual_in(&lhs2, &rhs2, window)?)
        .residual("su11_determinant", (det(m) - 1.0).norm())
        .residual("su11_metric", metric_defect(m, [1.0, -1.0]));
    Ok(report)
}

/// `S(ε) a S(ε)† = cosh|ε| a − e^{iφ} sinh|ε| a†`.
pub fn check_squeeze_conjugation(
    eps: PolarParam,
    cutoff: Cutoff,
    margin: usize,
    tol: f64,
) -> Result<Report> {
    cosh_guard(eps.modulus(), "epsilon")?;
    let window = Window::PerMode(margin);
    let mut report = Report::new(
        "check_squeeze_conjugation",
        vec![eps],
        cutoff.n_max(),
        margin,
        tol,
    );
    let a = crate::fock::annihilation(cutoff);
    let s = squeeze(eps, cutoff)?;
    let lhs = conjugate_by(&s, &a)?;
    let rhs = a
        .scale(c(eps.modulus().cosh()))
        .add_scaled(-eps.unit() * eps.modulus().sinh(), &creation(cutoff))?;
    report.residual("a", residual_in(&lhs, &rhs, window)?);
    Ok(report)
}

/// Displacement label after squeezing: `cosh|ε| α + e^{iφ} sinh|ε| ᾱ`.
pub fn squeezed_displacement_label(eps: PolarParam, alpha: PolarParam) -> PolarParam {
    let r = eps.modulus();
    PolarParam::new(alpha.value() * r.cosh() + eps.unit() * r.sinh() * alpha.value().conj())
}

/// `S(ε) D(α) S(ε)† = D(cosh|ε| α + e^{iφ} sinh|ε| ᾱ)`, plus the two
/// phase-aligned cases `φ = 2χ` (label `e^{|ε|} α`) and `φ = 2χ + π`
/// (label `e^{−|ε|} α`) checked at the state level.
pub fn check_sds(
    eps: PolarParam,
    alpha: PolarParam,
    cutoff: Cutoff,
    margin: usize,
    tol: f64,
) -> Result<Report> {
    cosh_guard(eps.modulus(), "epsilon")?;
    let window = Window::PerMode(margin);
    let mut report = Report::new("check_SDS", vec![eps, alpha], cutoff.n_max(), margin, tol);
    let amplified = alpha.modulus() * eps.modulus().exp();
    report.warn_all(tail_warning(amplified, cutoff));

    let s = squeeze(eps, cutoff)?;
    let lhs = conjugate_by(&s, &displacement(alpha, cutoff)?)?;
    let rhs = displacement(squeezed_displacement_label(eps, alpha), cutoff)?;
    report.residual("sds", residual_in(&lhs, &rhs, window)?);

    let chi = alpha.phase();
    let vacuum = Ket::vacuum(cutoff, Modes::One);
    for (name, phase, scale) in [
        ("scale_up", 2.0 * chi, eps.modulus().exp()),
        ("scale_down", 2.0 * chi + PI, (-eps.modulus()).exp()),
    ] {
        let aligned = PolarParam::polar(eps.modulus(), phase);
        let s = squeeze(aligned, cutoff)?;
        let conj = conjugate_by(&s, &displacement(alpha, cutoff)?)?;
        let out = conj.apply(&vacuum)?;
        let predicted = coherent(PolarParam::new(alpha.value() * scale), cutoff)?.ket;
        report.fidelity(name, fidelity(&out, &predicted)?);
    }
    Ok(report)
}

/// Closed form of `S(ε) G(α) S(ε)†` for the squeeze generator
/// `G(α) = (α a†² − ᾱ a²)/2`.
pub fn conjugated_squeeze_generator(
    eps: PolarParam,
    alpha: PolarParam,
    cutoff: Cutoff,
) -> Operator {
    let r = eps.modulus();
    let (ch, sh) = (r.cosh(), r.sinh());
    let e = eps.unit();
    let a_val = alpha.value();
    let ad = creation(cutoff);
    let a = ad.dagger();
    let ad2 = ad.mul(&ad).expect("same space");
    let a2 = a.mul(&a).expect("same space");
    let half_n = number(cutoff)
        .add(&Operator::identity(cutoff, Modes::One).scale_real(0.5))
        .expect("same space");
    let up = (a_val * ch * ch - e * e * sh * sh * a_val.conj()) * 0.5;
    let down = (a_val.conj() * ch * ch - e.conj() * e.conj() * sh * sh * a_val) * 0.5;
    let mixed = (-e.conj() * a_val + e * a_val.conj()) * (2.0 * r).sinh() * 0.5;
    ad2.scale(up)
        .add_scaled(-down, &a2)
        .and_then(|x| x.add_scaled(mixed, &half_n))
        .expect("same space")
}

/// `S(ε) S(α) = S(α) S(ε)` when `φ = χ`. The commutator is asserted only
/// for matching phases; otherwise it is recorded as a diagnostic. The
/// closed-form conjugated generator `S(ε) S(α) S(ε)† = e^{Y}` is asserted
/// in both cases.
pub fn check_sss_commute(
    eps: PolarParam,
    alpha: PolarParam,
    cutoff: Cutoff,
    margin: usize,
    tol: f64,
) -> Result<Report> {
    cosh_guard(eps.modulus(), "epsilon")?;
    cosh_guard(alpha.modulus(), "alpha")?;
    let window = Window::PerMode(margin);
    let mut report = Report::new(
        "check_SSS_commute",
        vec![eps, alpha],
        cutoff.n_max(),
        margin,
        tol,
    );
    let se = squeeze(eps, cutoff)?;
    let sa = squeeze(alpha, cutoff)?;
    let commutator = se.mul(&sa)?.sub(&sa.mul(&se)?)?;
    let comm = norm_in(&commutator, window)?;
    let matched =
        eps.is_zero() || alpha.is_zero() || phase_gap(eps.phase(), alpha.phase()) <= 1e-12;
    if matched {
        report.residual("commutator", comm);
    } else {
        report.diagnostic("commutator", comm);
    }
    let y = conjugated_squeeze_generator(eps, alpha, cutoff);
    let lhs = conjugate_by(&se, &sa)?;
    report.residual("generator", residual_in(&lhs, &expm(&y)?, window)?);
    Ok(report)
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// `V(t) = e^{itN}` as an exact diagonal.
pub fn phase_operator(t: f64, cutoff: Cutoff) -> Operator {
    Operator::diagonal(cutoff, Modes::One, |n| C64::from_polar(1.0, t * n as f64))
}

/// `V(t) D(α) V(t)† = D(e^{it} α)`, `V(t)|α⟩ = |e^{it} α⟩` and `V(t)|0⟩ = |0⟩`.
pub fn check_phase_formula(
    t: f64,
    alpha: PolarParam,
    cutoff: Cutoff,
    margin: usize,
    tol: f64,
) -> Result<Report> {
    let window = Window::PerMode(margin);
    let mut report = Report::new(
        "check_phase_formula",
        vec![PolarParam::real(t), alpha],
        cutoff.n_max(),
        margin,
        tol,
    );
    report.warn_all(tail_warning(alpha.modulus(), cutoff));
    let v = phase_operator(t, cutoff);
    let rotated = PolarParam::new(alpha.value() * C64::from_polar(1.0, t));
    let lhs = conjugate_by(&v, &displacement(alpha, cutoff)?)?;
    report.residual(
        "conjugation",
        residual_in(&lhs, &displacement(rotated, cutoff)?, window)?,
    );
    let out = v.apply(&coherent(alpha, cutoff)?.ket)?;
    report.fidelity("state", fidelity(&out, &coherent(rotated, cutoff)?.ket)?);
    let vacuum = Ket::vacuum(cutoff, Modes::One);
    report.residual("vacuum", v.apply(&vacuum)?.distance(&vacuum)?);
    Ok(report)
}

/// Coefficients of the quadratic generator
/// `X = U_J(t) [G_1(α) + G_2(β)] U_J(t)†`, `G_i(z) = (z a_i†² − z̄ a_i²)/2`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct XCoefficients {
    #[serde(serialize_with = "serialize_complex")]
    pub a1dag_sq: C64,
    #[serde(serialize_with = "serialize_complex")]
    pub a1_sq: C64,
    #[serde(serialize_with = "serialize_complex")]
    pub a2dag_sq: C64,
    #[serde(serialize_with = "serialize_complex")]
    pub a2_sq: C64,
    #[serde(serialize_with = "serialize_complex")]
    pub a1dag_a2dag: C64,
    #[serde(serialize_with = "serialize_complex")]
    pub a1_a2: C64,
}

impl XCoefficients {
    /// Closed form obtained by substituting the J-rotation images of `a1†`
    /// and `a2†` into the two squeeze generators.
    pub fn closed_form(t: PolarParam, alpha: PolarParam, beta: PolarParam) -> Self {
        let r = t.modulus();
        let (tv, av, bv) = (t.value(), alpha.value(), beta.value());
        let cos2 = r.cos().powi(2);
        // sin²|t| / |t|² and sin(2|t|)/(2|t|)
        let sin2_over = sinc(r).powi(2);
        let cross = sinc(2.0 * r);
        let a1dag_sq = (av * cos2 + tv * tv * sin2_over * bv) * 0.5;
        let a2dag_sq = (bv * cos2 + tv.conj() * tv.conj() * sin2_over * av) * 0.5;
        let a1dag_a2dag = (bv * tv - av * tv.conj()) * cross;
        Self {
            a1dag_sq,
            a1_sq: -a1dag_sq.conj(),
            a2dag_sq,
            a2_sq: -a2dag_sq.conj(),
            a1dag_a2dag,
            a1_a2: -a1dag_a2dag.conj(),
        }
    }

    /// Reads the coefficients of a quadratic form without number-type terms
    /// from its matrix elements between the vacuum and the two-quantum
    /// states. Requires `n_max ≥ 2`.
    pub fn extract(x: &Operator) -> Self {
        let d = x.cutoff().dim();
        let idx = |n1: usize, n2: usize| n1 * d + n2;
        let r2 = 2f64.sqrt();
        Self {
            a1dag_sq: x.get(idx(2, 0), 0) / r2,
            a1_sq: x.get(0, idx(2, 0)) / r2,
            a2dag_sq: x.get(idx(0, 2), 0) / r2,
            a2_sq: x.get(0, idx(0, 2)) / r2,
            a1dag_a2dag: x.get(idx(1, 1), 0),
            a1_a2: x.get(0, idx(1, 1)),
        }
    }

    pub fn to_operator(&self, cutoff: Cutoff) -> Operator {
        let (a1, a2) = mode_annihilators(cutoff);
        let (b1, b2) = (a1.dagger(), a2.dagger());
        let terms = [
            (self.a1dag_sq, b1.mul(&b1)),
            (self.a1_sq, a1.mul(&a1)),
            (self.a2dag_sq, b2.mul(&b2)),
            (self.a2_sq, a2.mul(&a2)),
            (self.a1dag_a2dag, b1.mul(&b2)),
            (self.a1_a2, a1.mul(&a2)),
        ];
        let mut out = Operator::zeros(cutoff, Modes::Two);
        for (coef, op) in terms {
            out = out
                .add_scaled(coef, &op.expect("same space"))
                .expect("same space");
        }
        out
    }

    /// Largest entrywise gap to another coefficient set.
    pub fn max_gap(&self, other: &Self) -> f64 {
        [
            self.a1dag_sq - other.a1dag_sq,
            self.a1_sq - other.a1_sq,
            self.a2dag_sq - other.a2dag_sq,
            self.a2_sq - other.a2_sq,
            self.a1dag_a2dag - other.a1dag_a2dag,
            self.a1_a2 - other.a1_a2,
        ]
        .iter()
        .fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// `G_1(α) + G_2(β)` on the two-mode space.
pub(crate) fn two_mode_squeeze_generator(
    alpha: PolarParam,
    beta: PolarParam,
    cutoff: Cutoff,
) -> Result<Operator> {
    on_mode(&squeeze_generator(alpha, cutoff), Mode::First)?
        .add(&on_mode(&squeeze_generator(beta, cutoff), Mode::Second)?)
}

/// `S_1(α) S_2(β)`.
pub(crate) fn two_mode_squeeze(
    alpha: PolarParam,
    beta: PolarParam,
    cutoff: Cutoff,
) -> Result<Operator> {
    on_mode(&squeeze(alpha, cutoff)?, Mode::First)?
        .mul(&on_mode(&squeeze(beta, cutoff)?, Mode::Second)?)
}

/// The partner squeeze `β = α t̄ / t` that makes `βt = αt̄`.
pub fn matched_partner(t: PolarParam, alpha: PolarParam) -> PolarParam {
    if t.is_zero() {
        return alpha;
    }
    PolarParam::new(alpha.value() * t.unit().conj() * t.unit().conj())
}

/// `U_J(t) S_1(α) S_2(β) U_J(t)† = S_1(α) S_2(β)` for `β = α t̄/t`, with the
/// `a1†²`, `a2†²` and `a1†a2†` coefficients of the conjugated generator
/// checked against `α/2`, `β/2` and `0`. At `t = 0` the condition is
/// degenerate and the report is trivially passing.
pub fn check_uj_squeeze_invariance(
    t: PolarParam,
    alpha: PolarParam,
    cutoff: Cutoff,
    margin: usize,
    tol: f64,
) -> Result<Report> {
    let beta = matched_partner(t, alpha);
    let mut report = Report::new(
        "check_UJ_squeeze_invariance",
        vec![t, alpha, beta],
        cutoff.n_max(),
        margin,
        tol,
    );
    if t.is_zero() {
        report.residual("invariance", 0.0);
        return Ok(report);
    }
    cosh_guard(alpha.modulus(), "alpha")?;
    let window = Window::TotalOccupation(margin);
    let u = beamsplitter_uj(t, cutoff)?;
    let s12 = two_mode_squeeze(alpha, beta, cutoff)?;
    let lhs = conjugate_by(&u, &s12)?;
    report.residual("invariance", residual_in(&lhs, &s12, window)?);

    let x = conjugate_by(&u, &two_mode_squeeze_generator(alpha, beta, cutoff)?)?;
    let numeric = XCoefficients::extract(&x);
    let closed = XCoefficients::closed_form(t, alpha, beta);
    report
        .residual(
            "coef_a1dag_sq",
            (numeric.a1dag_sq - alpha.value() * 0.5).norm(),
        )
        .residual(
            "coef_a2dag_sq",
            (numeric.a2dag_sq - beta.value() * 0.5).norm(),
        )
        .residual("coef_cross", numeric.a1dag_a2dag.norm())
        .residual("coef_closed_form", numeric.max_gap(&closed));
    Ok(report)
}
