use std::collections::BTreeMap;
use std::f64::consts::PI;

use fockforge::fock::{residual_in, Cutoff, Ket, Modes, Operator, PolarParam, Window, C64};
use fockforge::formulas::{self, plans};
use fockforge::lie::{self, SpinJ, SpinK};
use fockforge::protocols;
use fockforge::states::{fidelity, perelomov_su11, squeeze};
use fockforge::universal_swap::{apply_swap, cnot_factorization, no_cloning_witness, swap_matrix};
use fockforge::Report;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigEcho, RunConfig};

/// Closure relations are held to this regardless of the run tolerance.
pub const LIE_TOLERANCE: f64 = 1e-12;
/// Fidelity floor for comparisons between two exact constructions.
pub const ROUTE_TOLERANCE: f64 = 1e-8;
/// Largest cutoff at which the two-mode realizations are closed.
pub const SCHWINGER_MAX_CUTOFF: usize = 16;
/// Threshold a negative control has to exceed.
pub const CONTROL_THRESHOLD: f64 = 1e-3;

/// One line of a verify-all run. `passed` is the report's verdict with
/// warnings counted as failures; for a negative control it is whether the
/// measured quantity cleared [`CONTROL_THRESHOLD`] instead.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub section: &'static str,
    pub passed: bool,
    pub report: Report,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl Entry {
    pub fn check(section: &'static str, report: Report) -> Self {
        let passed = report.passed && report.warnings.is_empty();
        Self::with_verdict(section, report, passed)
    }

    fn control(section: &'static str, report: Report, value: f64) -> Self {
        let passed = report.passed && value > CONTROL_THRESHOLD;
        Self::with_verdict(section, report, passed)
    }

    fn with_verdict(section: &'static str, report: Report, passed: bool) -> Self {
        Self {
            section,
            passed,
            diagnostics: report.diagnostics.clone(),
            warnings: report.warnings.clone(),
            report,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub config: ConfigEcho,
    pub draws: usize,
    pub passed: bool,
    pub entries: Vec<Entry>,
}

type Section = fockforge::Result<Vec<Entry>>;

/// Independent random stream per section, so changing the draw count of
/// one section leaves the others unchanged.
pub fn stream(seed: u64, section: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(section);
    rng
}

/// Modulus uniform on `[0, max]`, phase uniform on `[−π, π)`.
pub fn draw(rng: &mut ChaCha8Rng, max_modulus: f64) -> PolarParam {
    let modulus = rng.gen_range(0.0..=max_modulus);
    PolarParam::polar(modulus, rng.gen_range(-PI..PI))
}

fn random_ket(rng: &mut ChaCha8Rng, cutoff: Cutoff) -> fockforge::Result<Ket> {
    let amplitudes = Array1::from_shape_fn(cutoff.dim(), |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    Ket::new(cutoff, Modes::One, amplitudes)?.normalize()
}

/// Runs every section. Identity checks use the pinned plans in
/// [`formulas::plans`]; the protocol section and the config-cutoff checks
/// use the configured `n_max` and margin.
pub fn verify_all(config: &RunConfig, draws: usize) -> fockforge::Result<SuiteOutcome> {
    let mut entries = Vec::new();
    entries.extend(lie_section(config, config.seed)?);
    entries.extend(formula_section(config.tolerance, draws, config.seed)?);
    entries.extend(config_section(config, draws)?);
    entries.extend(control_section(config.tolerance)?);
    entries.extend(protocol_section(config, draws)?);
    entries.extend(universal_swap_section(config, config.seed)?);
    Ok(SuiteOutcome {
        config: config.echo(),
        draws,
        passed: entries.iter().all(|e| e.passed),
        entries,
    })
}

fn restricted(ket: &Ket, levels: &[usize], spin: SpinK) -> fockforge::Result<Ket> {
    Ket::new(
        spin.cutoff(),
        Modes::One,
        Array1::from_iter(levels.iter().map(|&n| ket.amplitude(n))),
    )
}

/// Closure of every realization plus the single-mode parity-sector
/// correspondence with the `K = 1/4` and `K = 3/4` irreps.
pub fn lie_section(config: &RunConfig, seed: u64) -> Section {
    let cutoff = config.cutoff();
    let mut out = Vec::new();

    let mut su2 = Report::new("su2_irrep", Vec::new(), 8, 0, LIE_TOLERANCE);
    for two_j in 1..=8 {
        let spin = SpinJ::new(two_j)?;
        let t = lie::su2_generators(spin);
        let j = spin.j();
        let casimir = Operator::identity(spin.cutoff(), Modes::One).scale_real(j * (j + 1.0));
        su2.residual(
            format!("closure_2j={two_j}"),
            t.closure_residual(Window::PerMode(0))?,
        )
        .residual(
            format!("casimir_2j={two_j}"),
            residual_in(&t.casimir(), &casimir, Window::PerMode(0))?,
        )
        .residual(format!("dagger_2j={two_j}"), t.dagger_defect());
    }
    out.push(Entry::check("lie", su2));

    let mut su11 = Report::new("su11_irrep", Vec::new(), cutoff.n_max(), 1, LIE_TOLERANCE);
    for (num, label) in [(1, "1/4"), (3, "3/4")] {
        let t = lie::su11_generators(SpinK::new(num, 2, cutoff)?);
        su11.residual(
            format!("closure_k={label}"),
            t.closure_residual(Window::PerMode(1))?,
        )
        .residual(format!("dagger_k={label}"), t.dagger_defect());
    }
    out.push(Entry::check("lie", su11));

    // rounding in the two-mode products grows roughly as n_max³ and passes
    // 1e-12 near n_max = 24, so the realization is checked at most at 16
    let schwinger = Cutoff::new(cutoff.n_max().min(SCHWINGER_MAX_CUTOFF))?;
    for (name, t) in [
        ("schwinger_su2", lie::schwinger_su2(schwinger)),
        ("schwinger_su11", lie::schwinger_su11(schwinger)),
    ] {
        let mut r = Report::new(name, Vec::new(), schwinger.n_max(), 1, LIE_TOLERANCE);
        r.residual("closure", t.closure_residual(Window::PerMode(1))?)
            .residual("dagger", t.dagger_defect());
        out.push(Entry::check("lie", r));
    }

    // a†²a² reaches two levels below the cutoff, hence margin 2
    let t = lie::single_mode_su11(cutoff);
    let margin = 2.min(cutoff.n_max());
    let mut r = Report::new(
        "single_mode_su11",
        Vec::new(),
        cutoff.n_max(),
        margin,
        LIE_TOLERANCE,
    );
    let casimir = Operator::identity(cutoff, Modes::One).scale_real(-3.0 / 16.0);
    r.residual("closure", t.closure_residual(Window::PerMode(margin))?)
        .residual(
            "casimir",
            residual_in(&t.casimir(), &casimir, Window::PerMode(margin))?,
        )
        .residual("dagger", t.dagger_defect());
    out.push(Entry::check("lie", r));

    let mut rng = stream(seed, 1);
    let wide = Cutoff::new(81)?;
    let mut points = vec![PolarParam::polar(0.6, -2.0)];
    points.push(draw(&mut rng, 0.6));
    for z in points {
        let mut r = Report::new(
            "su11_correspondence",
            vec![z],
            wide.n_max(),
            0,
            ROUTE_TOLERANCE,
        );
        let s = squeeze(z, wide)?;
        for (odd, label) in [(false, "k=1/4"), (true, "k=3/4")] {
            let (spin, levels) = lie::parity_sector(wide, odd)?;
            let lowest = Ket::basis(wide, Modes::One, usize::from(odd))?;
            let sector = restricted(&s.apply(&lowest)?, &levels, spin)?;
            let pere = perelomov_su11(z, spin)?;
            r.fidelity(label, fidelity(&sector, &pere.ket)?)
                .warn_all(pere.warnings);
        }
        out.push(Entry::check("lie", r));
    }
    Ok(out)
}

/// `draws` seeded parameter draws per identity, each at its pinned plan.
pub fn formula_section(tol: f64, draws: usize, seed: u64) -> Section {
    let mut rng = stream(seed, 2);
    let mut out = Vec::new();
    let mut push = |r: Report| out.push(Entry::check("formulas", r));
    for _ in 0..draws {
        let p = plans::J_ROTATION;
        push(formulas::check_j_rotation(
            draw(&mut rng, p.max_modulus),
            p.cutoff(),
            p.margin,
            tol,
        )?);
    }
    for _ in 0..draws {
        let p = plans::K_ROTATION;
        push(formulas::check_k_rotation(
            draw(&mut rng, p.max_modulus),
            p.cutoff(),
            p.margin,
            tol,
        )?);
    }
    for _ in 0..draws {
        let p = plans::SQUEEZE_CONJUGATION;
        push(formulas::check_squeeze_conjugation(
            draw(&mut rng, p.max_modulus),
            p.cutoff(),
            p.margin,
            tol,
        )?);
    }
    for _ in 0..draws {
        let p = plans::SDS;
        let eps = draw(&mut rng, p.max_modulus);
        let alpha = draw(&mut rng, p.max_aux_modulus);
        push(formulas::check_sds(eps, alpha, p.cutoff(), p.margin, tol)?);
    }
    for _ in 0..draws {
        let p = plans::SSS_COMMUTE;
        let eps = draw(&mut rng, p.max_modulus);
        let alpha = PolarParam::polar(rng.gen_range(0.0..=p.max_aux_modulus), eps.phase());
        push(formulas::check_sss_commute(
            eps,
            alpha,
            p.cutoff(),
            p.margin,
            tol,
        )?);
    }
    for _ in 0..draws {
        let p = plans::PHASE;
        let t = rng.gen_range(-p.max_modulus..=p.max_modulus);
        let alpha = draw(&mut rng, p.max_aux_modulus);
        push(formulas::check_phase_formula(
            t,
            alpha,
            p.cutoff(),
            p.margin,
            tol,
        )?);
    }
    for _ in 0..draws {
        let p = plans::UJ_SQUEEZE;
        let t = draw(&mut rng, p.max_modulus);
        let alpha = draw(&mut rng, p.max_aux_modulus);
        push(formulas::check_uj_squeeze_invariance(
            t,
            alpha,
            p.cutoff(),
            p.margin,
            tol,
        )?);
    }
    Ok(out)
}

/// The number-preserving checks repeated at the configured cutoff and
/// margin.
pub fn config_section(config: &RunConfig, draws: usize) -> Section {
    let mut rng = stream(config.seed, 3);
    let (cutoff, margin, tol) = (config.cutoff(), config.margin(), config.tolerance);
    let mut out = Vec::new();
    for _ in 0..draws.max(1) {
        let t = draw(&mut rng, plans::J_ROTATION.max_modulus);
        out.push(Entry::check(
            "config",
            formulas::check_j_rotation(t, cutoff, margin, tol)?,
        ));
        let t = rng.gen_range(-PI..=PI);
        let alpha = draw(&mut rng, 1.0);
        out.push(Entry::check(
            "config",
            formulas::check_phase_formula(t, alpha, cutoff, margin, tol)?,
        ));
    }
    Ok(out)
}

/// Mismatched-phase commutator and the squeezed-swap cross term; both must
/// be clearly nonzero.
pub fn control_section(tol: f64) -> Section {
    let p = plans::SSS_COMMUTE;
    let r = formulas::check_sss_commute(
        PolarParam::polar(0.3, 0.0),
        PolarParam::polar(0.5, PI / 2.0),
        p.cutoff(),
        p.margin,
        tol,
    )?;
    let commutator = r.diagnostics["commutator"];
    let mut out = vec![Entry::control("controls", r, commutator)];

    let p = plans::OBSTRUCTION;
    let beta = PolarParam::real(0.3);
    let o = protocols::squeezed_swap_obstruction(
        beta,
        beta,
        PolarParam::cartesian(0.0, 0.5),
        p.cutoff(),
        p.margin,
        tol,
    )?;
    out.push(Entry::control("controls", o.report, o.cross_term.norm()));
    Ok(out)
}

/// Swap, clone and beamsplitter runs on coherent states at the configured
/// cutoff, plus the cross-term-free obstruction case at its plan.
pub fn protocol_section(config: &RunConfig, draws: usize) -> Section {
    let mut rng = stream(config.seed, 4);
    let (cutoff, tol) = (config.cutoff(), config.tolerance);
    let mut out = Vec::new();
    let mut pairs = vec![
        (PolarParam::real(1.0), PolarParam::cartesian(0.0, 1.0), 0.0),
        (PolarParam::zero(), PolarParam::zero(), 0.0),
    ];
    for _ in 0..draws {
        pairs.push((
            draw(&mut rng, 1.5),
            draw(&mut rng, 1.5),
            rng.gen_range(-PI..PI),
        ));
    }
    for (a1, a2, delta) in pairs {
        out.push(Entry::check(
            "protocols",
            protocols::full_swap(a1, a2, delta, cutoff, tol)?.report,
        ));
    }
    for modulus in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let r = protocols::imperfect_clone(PolarParam::real(modulus), cutoff, tol)?;
        out.push(Entry::check("protocols", r.report));
    }
    for _ in 0..draws {
        let (a1, a2, kappa) = (draw(&mut rng, 1.0), draw(&mut rng, 1.0), draw(&mut rng, PI));
        out.push(Entry::check(
            "protocols",
            protocols::apply_beamsplitter(a1, a2, kappa, cutoff, tol)?.report,
        ));
    }
    let p = plans::OBSTRUCTION;
    let beta = PolarParam::real(0.3);
    let o = protocols::squeezed_swap_obstruction(
        beta,
        beta,
        PolarParam::real(0.6),
        p.cutoff(),
        p.margin,
        tol,
    )?;
    out.push(Entry::check("protocols", o.report));
    Ok(out)
}

/// `Σ_{ij} |j⟩⟨i| ⊗ |i⟩⟨j|` written out entry by entry.
pub fn dense_swap_oracle(n: usize) -> Array2<u8> {
    let mut m = Array2::zeros((n * n, n * n));
    for i in 0..n {
        for j in 0..n {
            m[[j * n + i, i * n + j]] = 1;
        }
    }
    m
}

/// Permutation identities, 100 random `apply_swap` pairs at `n = 10`, the
/// permutation route against the protocol route, and the no-cloning
/// witness.
pub fn universal_swap_section(config: &RunConfig, seed: u64) -> Section {
    let mut out = Vec::new();
    let mut r = Report::new("swap_matrix", Vec::new(), 4, 0, 0.0);
    for n in 2..=5 {
        let s = swap_matrix(n)?;
        let mismatched = s
            .to_dense()
            .iter()
            .zip(dense_swap_oracle(n).iter())
            .filter(|(a, b)| a != b)
            .count();
        r.residual(format!("mismatched_n={n}"), mismatched as f64)
            .residual(
                format!("involution_n={n}"),
                f64::from(u8::from(!s.is_involution())),
            );
    }
    let [first, second, third] = cnot_factorization();
    let product = first.compose(&second)?.compose(&third)?;
    r.residual(
        "cnot_product",
        f64::from(u8::from(product != swap_matrix(2)?)),
    );
    out.push(Entry::check("universal_swap", r));

    let mut rng = stream(seed, 5);
    let ten = Cutoff::new(9)?;
    let mut r = Report::new("apply_swap", Vec::new(), ten.n_max(), 0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (random_ket(&mut rng, ten)?, random_ket(&mut rng, ten)?);
        let swapped = apply_swap(&a, &b)?;
        let expected = b.tensor(&a)?;
        let gap = swapped
            .amplitudes()
            .iter()
            .zip(expected.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    r.residual("max_entry_gap", worst);
    out.push(Entry::check("universal_swap", r));

    let cutoff = config.cutoff();
    let (a1, a2) = (PolarParam::real(1.0), PolarParam::cartesian(0.0, 1.0));
    let protocol = protocols::full_swap(a1, a2, 0.0, cutoff, config.tolerance)?;
    let pair = fockforge::states::coherent(a1, cutoff)?
        .ket
        .tensor(&fockforge::states::coherent(a2, cutoff)?.ket)?;
    let permuted = swap_matrix(cutoff.dim())?.apply_ket(&pair)?;
    let mut r = Report::new(
        "swap_routes",
        vec![a1, a2],
        cutoff.n_max(),
        0,
        ROUTE_TOLERANCE,
    );
    r.fidelity(
        "permutation_vs_protocol",
        fidelity(&permuted, &protocol.output)?,
    )
    .warn_all(protocol.report.warnings);
    out.push(Entry::check("universal_swap", r));

    let three = Cutoff::new(2)?;
    for k in 0..three.dim() {
        out.push(Entry::check(
            "universal_swap",
            no_cloning_witness(&Ket::basis(three, Modes::One, k)?, 0.0)?,
        ));
    }
    let uniform =
        Ket::new(three, Modes::One, Array1::from_elem(3, C64::new(1.0, 0.0)))?.normalize()?;
    let w = no_cloning_witness(&uniform, LIE_TOLERANCE)?;
    let discrepancy = w.diagnostics["discrepancy"];
    out.push(Entry::control("universal_swap", w, discrepancy));

    let mut r = no_cloning_witness(&Ket::vacuum(three, Modes::One), 0.0)?;
    r.name = "no_cloning_scalar".into();
    let mismatch = r.diagnostics["scalar_mismatch"];
    r.residual("scalar_mismatch_vs_2", (mismatch - 2.0).abs());
    out.push(Entry::check("universal_swap", r));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..4).map(|_| stream(7, 1).gen::<f64>()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(stream(7, 1).gen::<f64>(), stream(7, 2).gen::<f64>());
        assert_ne!(stream(7, 1).gen::<f64>(), stream(8, 1).gen::<f64>());
    }

    #[test]
    fn draws_respect_the_bound() {
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            assert!(draw(&mut rng, 0.8).modulus() <= 0.8);
        }
    }

    #[test]
    fn dense_oracle_matches_the_qubit_display() {
        let m = dense_swap_oracle(2);
        assert_eq!(m.row(1).to_vec(), vec![0, 0, 1, 0]);
        assert_eq!(m.row(2).to_vec(), vec![0, 1, 0, 0]);
        assert_eq!(m.sum(), 4);
    }

    #[test]
    fn controls_fail_when_nothing_is_measured() {
        let r = Report::new("x", Vec::new(), 1, 0, 1e-6);
        assert!(!Entry::control("c", r.clone(), 0.0).passed);
        assert!(Entry::control("c", r, 0.1).passed);
    }

    #[test]
    fn warnings_fail_an_entry() {
        let mut r = Report::new("x", Vec::new(), 1, 0, 1e-6);
        assert!(Entry::check("s", r.clone()).passed);
        r.warn("cutoff inadequate");
        assert!(!Entry::check("s", r).passed);
    }
}
