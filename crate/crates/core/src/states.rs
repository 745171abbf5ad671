//! Number, coherent, squeezed, Perelomov and squeezed-coherent states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, creation, expm, poisson_tail, Cutoff, Ket, Modes, Operator, PolarParam,
    TAIL_TOLERANCE,
};
use crate::lie::{su11_generators, su2_generators, SpinJ, SpinK};

/// Amplitude bound at `n_max` used by the su(1,1) adequacy guard.
pub const SU11_TAIL: f64 = 1e-10;

/// A truncated state with its pre-normalization norm deficit and any
/// cutoff-adequacy warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    pub ket: Ket,
    pub norm_deficit: f64,
    pub warnings: Vec<String>,
}

impl PreparedState {
    fn renormalized(ket: Ket, warnings: Vec<String>) -> Result<Self> {
        let norm_deficit = (1.0 - ket.norm()).abs();
        Ok(Self {
            ket: ket.normalize()?,
            norm_deficit,
            warnings,
        })
    }
}

/// Every state family, with exactly the parameters it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateFamily {
    Number { n: usize },
    Coherent { alpha: PolarParam },
    Squeezed { z: PolarParam },
    PerelomovSu2 { z: PolarParam, spin: SpinJ },
    PerelomovSu11 { z: PolarParam, spin: SpinK },
    SqueezedCoherent { beta: PolarParam, alpha: PolarParam },
}

impl StateFamily {
    pub fn kind(&self) -> &'static str {
        match self {
            StateFamily::Number { .. } => "number",
            StateFamily::Coherent { .. } => "coherent",
            StateFamily::Squeezed { .. } => "squeezed",
            StateFamily::PerelomovSu2 { .. } => "perelomov_su2",
            StateFamily::PerelomovSu11 { .. } => "perelomov_su11",
            StateFamily::SqueezedCoherent { .. } => "squeezed_coherent",
        }
    }

    pub fn params(&self) -> Vec<PolarParam> {
        match *self {
            StateFamily::Number { .. } => Vec::new(),
            StateFamily::Coherent { alpha } => vec![alpha],
            StateFamily::Squeezed { z } => vec![z],
            StateFamily::PerelomovSu2 { z, .. } | StateFamily::PerelomovSu11 { z, .. } => vec![z],
            StateFamily::SqueezedCoherent { beta, alpha } => vec![beta, alpha],
        }
    }

    /// Builds the state. Perelomov families use the cutoff carried by their
    /// spin label and ignore `cutoff`.
    pub fn prepare(&self, cutoff: Cutoff) -> Result<PreparedState> {
        match *self {
            StateFamily::Number { n } => {
                PreparedState::renormalized(number_state(n, cutoff)?, Vec::new())
            }
            StateFamily::Coherent { alpha } => coherent(alpha, cutoff),
            StateFamily::Squeezed { z } => {
                let ket = squeeze(z, cutoff)?.apply(&Ket::vacuum(cutoff, Modes::One))?;
                PreparedState::renormalized(ket, Vec::new())
            }
            StateFamily::PerelomovSu2 { z, spin } => {
                PreparedState::renormalized(perelomov_su2(z, spin)?, Vec::new())
            }
            StateFamily::PerelomovSu11 { z, spin } => perelomov_su11(z, spin),
            StateFamily::SqueezedCoherent { beta, alpha } => squeezed_coherent(beta, alpha, cutoff),
        }
    }
}

/// `|n⟩`.
pub fn number_state(n: usize, cutoff: Cutoff) -> Result<Ket> {
    Ket::basis(cutoff, Modes::One, n)
}

/// Warning text when the Poisson tail of `|α| = modulus` exceeds
/// [`TAIL_TOLERANCE`] at this cutoff.
pub fn tail_warning(modulus: f64, cutoff: Cutoff) -> Option<String> {
    let tail = poisson_tail(modulus, cutoff.n_max());
    (tail > TAIL_TOLERANCE).then(|| {
        format!(
            "cutoff inadequate: |alpha| = {modulus:.4} leaves Poisson tail {tail:.3e} above n_max = {} (need n_max >= {})",
            cutoff.n_max(),
            Cutoff::for_coherent(modulus, TAIL_TOLERANCE).n_max()
        )
    })
}

/// `αa† − ᾱa`.
fn displacement_generator(alpha: PolarParam, cutoff: Cutoff) -> Operator {
    creation(cutoff)
        .scale(alpha.value())
        .add_scaled(-alpha.value().conj(), &annihilation(cutoff))
        .expect("same space")
}

/// `D(α) = exp(αa† − ᾱa)`.
pub fn displacement(alpha: PolarParam, cutoff: Cutoff) -> Result<Operator> {
    if alpha.is_zero() {
        return Ok(Operator::identity(cutoff, Modes::One));
    }
    expm(&displacement_generator(alpha, cutoff))
}

/// `|α⟩ = D(α)|0⟩`, renormalized.
pub fn coherent(alpha: PolarParam, cutoff: Cutoff) -> Result<PreparedState> {
    let ket = displacement(alpha, cutoff)?.apply(&Ket::vacuum(cutoff, Modes::One))?;
    let warnings = tail_warning(alpha.modulus(), cutoff).into_iter().collect();
    PreparedState::renormalized(ket, warnings)
}

/// `(z a†² − z̄ a²)/2`.
pub(crate) fn squeeze_generator(z: PolarParam, cutoff: Cutoff) -> Operator {
    let ad = creation(cutoff);
    let a = annihilation(cutoff);
    let ad2 = ad.mul(&ad).expect("same space");
    let a2 = a.mul(&a).expect("same space");
    ad2.scale(z.value() * 0.5)
        .add_scaled(-z.value().conj() * 0.5, &a2)
        .expect("same space")
}

/// `S(z) = exp((z a†² − z̄ a²)/2)`.
pub fn squeeze(z: PolarParam, cutoff: Cutoff) -> Result<Operator> {
    if z.is_zero() {
        return Ok(Operator::identity(cutoff, Modes::One));
    }
    expm(&squeeze_generator(z, cutoff))
}

/// `exp(zJ+ − z̄J-)|J,0⟩` on the `2J + 1` dimensional irrep.
pub fn perelomov_su2(z: PolarParam, spin: SpinJ) -> Result<Ket> {
    let t = su2_generators(spin);
    let g = t
        .plus
        .scale(z.value())
        .add_scaled(-z.value().conj(), &t.minus)?;
    expm(&g)?.apply(&Ket::vacuum(spin.cutoff(), Modes::One))
}

/// Smallest cutoff at which a spin-K Perelomov amplitude `~ tanh^n |z|`
/// falls below [`SU11_TAIL`].
pub fn su11_required_cutoff(modulus: f64) -> usize {
    if modulus == 0.0 {
        return 1;
    }
    (SU11_TAIL.ln() / modulus.tanh().ln()).ceil().max(1.0) as usize
}

/// `exp(zK+ − z̄K-)|K,0⟩` on the truncated spin-K irrep, renormalized.
pub fn perelomov_su11(z: PolarParam, spin: SpinK) -> Result<PreparedState> {
    let t = su11_generators(spin);
    let g = t
        .plus
        .scale(z.value())
        .add_scaled(-z.value().conj(), &t.minus)?;
    let ket = expm(&g)?.apply(&Ket::vacuum(spin.cutoff(), Modes::One))?;
    let need = su11_required_cutoff(z.modulus());
    let mut warnings = Vec::new();
    if spin.cutoff().n_max() < need {
        warnings.push(format!(
            "cutoff inadequate: |z| = {:.4} needs n_max >= {need}, have {}",
            z.modulus(),
            spin.cutoff().n_max()
        ));
    }
    PreparedState::renormalized(ket, warnings)
}

/// `|(β, α)⟩ = S(β) D(α)|0⟩`, renormalized. The tail rule is applied to the
/// squeezing-amplified modulus `|α| e^{|β|}`.
pub fn squeezed_coherent(
    beta: PolarParam,
    alpha: PolarParam,
    cutoff: Cutoff,
) -> Result<PreparedState> {
    let displaced = displacement(alpha, cutoff)?.apply(&Ket::vacuum(cutoff, Modes::One))?;
    let ket = squeeze(beta, cutoff)?.apply(&displaced)?;
    let amplified = alpha.modulus() * beta.modulus().exp();
    let warnings = tail_warning(amplified, cutoff).into_iter().collect();
    PreparedState::renormalized(ket, warnings)
}

/// `|⟨x|y⟩|²` after normalizing both vectors.
pub fn fidelity(x: &Ket, y: &Ket) -> Result<f64> {
    let (nx, ny) = (x.norm(), y.norm());
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let overlap = x.inner(y)?;
    Ok((overlap.norm_sqr() / (nx * nx * ny * ny)).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{residual, Window, C64};
    use crate::lie::{parity_sector, pochhammer};
    use ndarray::Array1;
    use proptest::prelude::*;

    fn cut(n: usize) -> Cutoff {
        Cutoff::new(n).unwrap()
    }

    /// `e^{-|α|²/2} αⁿ/√n!` by recurrence.
    fn coherent_series(alpha: C64, cutoff: Cutoff) -> Ket {
        let mut amps = Vec::with_capacity(cutoff.dim());
        let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..cutoff.dim() {
            if n > 0 {
                term = term * alpha / (n as f64).sqrt();
            }
            amps.push(term);
        }
        Ket::new(cutoff, Modes::One, Array1::from_vec(amps)).unwrap()
    }

    #[test]
    fn number_states() {
        let k = cut(8);
        assert_eq!(number_state(0, k).unwrap(), Ket::vacuum(k, Modes::One));
        assert!(number_state(9, k).is_err());
        let ad = creation(k);
        let mut ladder = Ket::vacuum(k, Modes::One);
        let mut fact = 1.0;
        for n in 0..=8usize {
            if n > 0 {
                ladder = ad.apply(&ladder).unwrap();
                fact *= n as f64;
            }
            let built = ladder.scale(C64::new(1.0 / fact.sqrt(), 0.0));
            assert!(built.distance(&number_state(n, k).unwrap()).unwrap() < 1e-12);
            for m in 0..=8usize {
                let ip = number_state(m, k)
                    .unwrap()
                    .inner(&number_state(n, k).unwrap())
                    .unwrap();
                assert_eq!(ip, C64::new(if m == n { 1.0 } else { 0.0 }, 0.0));
            }
        }
    }

    #[test]
    fn displacement_basics() {
        let k = cut(20);
        assert_eq!(
            displacement(PolarParam::zero(), k).unwrap(),
            Operator::identity(k, Modes::One)
        );
        let d = displacement(PolarParam::cartesian(0.7, -0.4), k).unwrap();
        let defect = d
            .dagger()
            .mul(&d)
            .unwrap()
            .sub(&Operator::identity(k, Modes::One))
            .unwrap();
        assert!(defect.frobenius_norm() < 1e-10);
    }

    #[test]
    fn coherent_matches_series_oracle() {
        let k = cut(40);
        for (re, im) in [
            (2.0, 0.0),
            (0.0, -2.0),
            (1.2, 1.5),
            (-0.3, 0.1),
            (1.41, -1.41),
        ] {
            let alpha = C64::new(re, im);
            let state = coherent(PolarParam::new(alpha), k).unwrap();
            assert!(state.warnings.is_empty());
            let oracle = coherent_series(alpha, k);
            let err = (state.ket.amplitudes() - oracle.amplitudes())
                .iter()
                .fold(0.0f64, |m, z| m.max(z.norm()));
            assert!(err < 1e-10, "alpha {alpha}: {err}");
        }
        assert_eq!(
            coherent(PolarParam::zero(), k).unwrap().ket,
            Ket::vacuum(k, Modes::One)
        );
    }

    #[test]
    fn coherent_overlap_and_eigenvector() {
        let k = cut(40);
        let a = C64::new(0.8, -0.3);
        let b = C64::new(-0.2, 0.9);
        let ka = coherent(PolarParam::new(a), k).unwrap().ket;
        let kb = coherent(PolarParam::new(b), k).unwrap().ket;
        let expected = (-(a.norm_sqr() + b.norm_sqr()) / 2.0 + a.conj() * b).exp();
        assert!((ka.inner(&kb).unwrap() - expected).norm() < 1e-8);
        assert!((fidelity(&ka, &kb).unwrap() - (-(a - b).norm_sqr()).exp()).abs() < 1e-8);
        let lowered = annihilation(k).apply(&ka).unwrap();
        let p = Window::PerMode(1).projector(k, Modes::One).unwrap();
        let diff = p.apply(&lowered.sub(&ka.scale(a)).unwrap()).unwrap();
        assert!(diff.norm() < 1e-8);
    }

    #[test]
    fn tail_rule_warns() {
        assert!(tail_warning(1.5, cut(36)).is_none());
        let w = coherent(PolarParam::real(1.5), cut(2)).unwrap().warnings;
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("cutoff inadequate"));
    }

    #[test]
    fn squeeze_parity_and_inverse() {
        let k = cut(30);
        let z = PolarParam::cartesian(0.4, 0.3);
        let s = squeeze(z, k).unwrap();
        let out = s.apply(&Ket::vacuum(k, Modes::One)).unwrap();
        for n in (1..k.dim()).step_by(2) {
            assert!(out.amplitude(n).norm() <= 1e-12);
        }
        let s_neg = squeeze(PolarParam::new(-z.value()), k).unwrap();
        assert!(residual(&s.dagger(), &s_neg, 0).unwrap() < 1e-10);
        assert_eq!(
            squeeze(PolarParam::zero(), k).unwrap(),
            Operator::identity(k, Modes::One)
        );
    }

    #[test]
    fn coherent_has_full_support() {
        let out = coherent(PolarParam::real(0.9), cut(12)).unwrap().ket;
        assert!(out.amplitudes().iter().all(|z| z.norm() > 0.0));
    }

    #[test]
    fn perelomov_su2_closed_form() {
        let spin = SpinJ::new(1).unwrap();
        let z = PolarParam::polar(0.6, 1.1);
        let ket = perelomov_su2(z, spin).unwrap();
        assert!((ket.amplitude(0) - C64::new(0.6f64.cos(), 0.0)).norm() < 1e-12);
        assert!((ket.amplitude(1) - z.unit() * 0.6f64.sin()).norm() < 1e-12);
        assert_eq!(
            perelomov_su2(PolarParam::zero(), SpinJ::new(4).unwrap()).unwrap(),
            Ket::vacuum(cut(4), Modes::One)
        );
    }

    #[test]
    fn perelomov_su2_binomial_amplitudes() {
        // ⟨J,n|z⟩ = √C(2J,n) cos^{2J−n}|z| (e^{iθ} sin|z|)^n
        let spin = SpinJ::new(6).unwrap();
        let z = PolarParam::polar(0.9, -0.4);
        let ket = perelomov_su2(z, spin).unwrap();
        let (c, s) = (z.modulus().cos(), z.modulus().sin());
        let mut binom = 1.0;
        for n in 0..=6usize {
            if n > 0 {
                binom = binom * (7 - n) as f64 / n as f64;
            }
            let expected =
                z.unit().powu(n as u32) * binom.sqrt() * c.powi(6 - n as i32) * s.powi(n as i32);
            assert!((ket.amplitude(n) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn perelomov_su11_closed_form() {
        // ⟨K,n|z⟩ = (1 − tanh²|z|)^K √((2K)_n / n!) (e^{iθ} tanh|z|)^n
        let z = PolarParam::polar(0.5, 0.7);
        let need = su11_required_cutoff(0.5);
        let spin = SpinK::new(3, 2, cut(need + 10)).unwrap();
        let state = perelomov_su11(z, spin).unwrap();
        assert!(state.warnings.is_empty());
        assert!(state.norm_deficit <= 1e-8);
        let th = z.modulus().tanh();
        let k = spin.k();
        let mut fact = 1.0;
        for n in 0..20usize {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = z.unit().powu(n as u32)
                * (1.0 - th * th).powf(k)
                * (pochhammer(2.0 * k, n) / fact).sqrt()
                * th.powi(n as i32);
            assert!((state.ket.amplitude(n) - expected).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn perelomov_su11_guard() {
        let spin = SpinK::new(1, 2, cut(5)).unwrap();
        let state = perelomov_su11(PolarParam::real(0.8), spin).unwrap();
        assert_eq!(state.warnings.len(), 1);
        let vac = perelomov_su11(PolarParam::zero(), spin).unwrap();
        assert_eq!(vac.ket, Ket::vacuum(cut(5), Modes::One));
    }

    #[test]
    fn single_mode_squeeze_is_the_quarter_spin_state() {
        let k = cut(80);
        let z = PolarParam::polar(0.6, -2.0);
        let squeezed = squeeze(z, k)
            .unwrap()
            .apply(&Ket::vacuum(k, Modes::One))
            .unwrap();
        let (spin, levels) = parity_sector(k, false).unwrap();
        let pere = perelomov_su11(z, spin).unwrap();
        let even = Ket::new(
            spin.cutoff(),
            Modes::One,
            Array1::from_iter(levels.iter().map(|&n| squeezed.amplitude(n))),
        )
        .unwrap();
        assert!(fidelity(&even, &pere.ket).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn squeezed_coherent_limits() {
        let k = cut(40);
        let beta = PolarParam::polar(0.3, 0.5);
        let alpha = PolarParam::cartesian(0.4, 0.2);
        let vac = squeezed_coherent(PolarParam::zero(), PolarParam::zero(), k).unwrap();
        assert_eq!(vac.ket, Ket::vacuum(k, Modes::One));
        let coh = squeezed_coherent(PolarParam::zero(), alpha, k).unwrap();
        assert!(fidelity(&coh.ket, &coherent(alpha, k).unwrap().ket).unwrap() > 1.0 - 1e-14);
        let sq = squeezed_coherent(beta, PolarParam::zero(), k).unwrap();
        let direct = StateFamily::Squeezed { z: beta }.prepare(k).unwrap();
        assert!(fidelity(&sq.ket, &direct.ket).unwrap() > 1.0 - 1e-14);
        let both = squeezed_coherent(beta, alpha, k).unwrap();
        assert!(both.norm_deficit <= 1e-10);
    }

    #[test]
    fn fidelity_edges() {
        let k = cut(3);
        let v = Ket::basis(k, Modes::One, 2).unwrap();
        assert_eq!(fidelity(&v, &v).unwrap(), 1.0);
        assert_eq!(fidelity(&Ket::vacuum(k, Modes::One), &v).unwrap(), 0.0);
        let zero = v.scale(C64::new(0.0, 0.0));
        assert_eq!(fidelity(&zero, &v), Err(Error::ZeroVector));
        assert!(fidelity(&v, &Ket::vacuum(cut(4), Modes::One)).is_err());
    }

    #[test]
    fn family_tags() {
        let f = StateFamily::SqueezedCoherent {
            beta: PolarParam::real(0.1),
            alpha: PolarParam::real(0.2),
        };
        assert_eq!(f.kind(), "squeezed_coherent");
        assert_eq!(f.params().len(), 2);
        assert_eq!(
            StateFamily::Coherent {
                alpha: PolarParam::zero()
            }
            .params()
            .len(),
            1
        );
        let json = serde_json::to_string(&StateFamily::Number { n: 3 }).unwrap();
        assert_eq!(json, r#"{"kind":"number","n":3}"#);
    }

    proptest! {
        #[test]
        fn coherent_fidelity_matches_gaussian(ar in -1.0..1.0f64, ai in -1.0..1.0f64, br in -1.0..1.0f64, bi in -1.0..1.0f64) {
            let k = cut(30);
            let a = coherent(PolarParam::cartesian(ar, ai), k).unwrap().ket;
            let b = coherent(PolarParam::cartesian(br, bi), k).unwrap().ket;
            let expected = (-((ar - br).powi(2) + (ai - bi).powi(2))).exp();
            prop_assert!((fidelity(&a, &b).unwrap() - expected).abs() <= 1e-8);
        }

        #[test]
        fn perelomov_su2_is_normalized(r in 0.0..3.0f64, th in -3.0..3.0f64, two_j in 1u32..=8) {
            let ket = perelomov_su2(PolarParam::polar(r, th), SpinJ::new(two_j).unwrap()).unwrap();
            prop_assert!((ket.norm() - 1.0).abs() <= 1e-12);
        }
    }
}
