use fockforge::fock::{
    conjugate_by, mode_annihilators, residual_in, Cutoff, Ket, Modes, PolarParam, Window,
};
use fockforge::formulas::{j_rotation_matrix, k_rotation_matrix, plans};
use fockforge::lie::{parity_sector, schwinger_su11, su11_generators, SpinK};
use fockforge::protocols::{
    beamsplitter_uj, full_swap, squeezed_swap_obstruction, two_mode_squeezer_uk,
};
use fockforge::states::{coherent, fidelity, perelomov_su11, squeeze};
use fockforge::universal_swap::swap_matrix;

const TOL: f64 = 1e-6;

#[test]
fn permutation_route_matches_protocol_route() {
    let k = Cutoff::new(36).unwrap();
    let a1 = PolarParam::cartesian(1.0, 0.0);
    let a2 = PolarParam::cartesian(0.0, 1.0);
    let pair = coherent(a1, k)
        .unwrap()
        .ket
        .tensor(&coherent(a2, k).unwrap().ket)
        .unwrap();
    let permuted = swap_matrix(k.dim()).unwrap().apply_ket(&pair).unwrap();
    let protocol = full_swap(a1, a2, 0.0, k, TOL).unwrap();
    assert_eq!(permuted, protocol.predicted);
    assert!(fidelity(&permuted, &protocol.output).unwrap() >= 1.0 - 1e-8);
}

#[test]
fn beamsplitter_conjugation_uses_the_rotation_matrix() {
    let k = Cutoff::new(14).unwrap();
    let kappa = PolarParam::polar(0.8, -1.2);
    let (a1, a2) = mode_annihilators(k);
    let u = beamsplitter_uj(kappa, k).unwrap();
    let m = j_rotation_matrix(kappa);
    let image = a1.scale(m[1][0]).add_scaled(m[1][1], &a2).unwrap();
    let window = Window::TotalOccupation(k.default_margin());
    assert!(residual_in(&conjugate_by(&u, &a2).unwrap(), &image, window).unwrap() < 1e-10);
}

#[test]
fn two_mode_squeezer_conjugation_uses_the_hyperbolic_matrix() {
    let k = Cutoff::new(30).unwrap();
    let kappa = PolarParam::polar(0.4, 0.7);
    let (a1, a2) = mode_annihilators(k);
    let u = two_mode_squeezer_uk(kappa, k).unwrap();
    let m = k_rotation_matrix(kappa);
    let image = a1.scale(m[0][0]).add_scaled(m[0][1], &a2.dagger()).unwrap();
    let window = Window::TotalOccupation(24);
    assert!(residual_in(&conjugate_by(&u, &a1).unwrap(), &image, window).unwrap() < 1e-8);
}

#[test]
fn schwinger_two_mode_squeezed_vacuum_is_a_half_spin_perelomov_state() {
    // exp(zK+ − z̄K-)|0,0⟩ with K+ = a1†a2† lives on |n,n⟩ and carries K = 1/2
    let k = Cutoff::new(40).unwrap();
    let z = PolarParam::polar(0.6, 0.2);
    let t = schwinger_su11(k);
    let g = t
        .plus
        .scale(z.value())
        .add_scaled(-z.value().conj(), &t.minus)
        .unwrap();
    let out = fockforge::fock::expm(&g)
        .unwrap()
        .apply(&Ket::vacuum(k, Modes::Two))
        .unwrap();
    let diag: Vec<_> = (0..k.dim())
        .map(|n| out.amplitude(n * k.dim() + n))
        .collect();
    let spin = SpinK::new(1, 1, k).unwrap();
    let pere = perelomov_su11(z, spin).unwrap();
    let diag = Ket::new(k, Modes::One, ndarray::Array1::from_vec(diag)).unwrap();
    assert!(fidelity(&diag, &pere.ket).unwrap() >= 1.0 - 1e-8);
}

#[test]
fn odd_sector_squeezing_is_the_three_quarter_spin_state() {
    let k = Cutoff::new(81).unwrap();
    let z = PolarParam::polar(0.5, -0.9);
    let one = Ket::basis(k, Modes::One, 1).unwrap();
    let out = squeeze(z, k).unwrap().apply(&one).unwrap();
    let (spin, levels) = parity_sector(k, true).unwrap();
    assert_eq!(spin.k(), 0.75);
    let restricted = Ket::new(
        spin.cutoff(),
        Modes::One,
        ndarray::Array1::from_iter(levels.iter().map(|&n| out.amplitude(n))),
    )
    .unwrap();
    let pere = perelomov_su11(z, spin).unwrap();
    assert!(pere.warnings.is_empty());
    assert!(fidelity(&restricted, &pere.ket).unwrap() >= 1.0 - 1e-8);
    assert_eq!(su11_generators(spin).third.get(0, 0).re, 0.75);
}

#[test]
fn obstruction_dichotomy_at_plan() {
    let p = plans::OBSTRUCTION;
    let beta = PolarParam::real(0.3);
    let free =
        squeezed_swap_obstruction(beta, beta, PolarParam::real(0.6), p.cutoff(), p.margin, TOL)
            .unwrap();
    assert!(free.cross_term.norm() < 1e-15);
    assert!(
        free.report.residuals["no_change"] <= TOL,
        "{:?}",
        free.report
    );
    assert!(free.report.passed);
    let blocked = squeezed_swap_obstruction(
        beta,
        beta,
        PolarParam::cartesian(0.0, 0.5),
        p.cutoff(),
        p.margin,
        TOL,
    )
    .unwrap();
    assert!(blocked.cross_term.norm() > 1e-3);
    assert!(blocked.report.passed, "{:?}", blocked.report);
}
