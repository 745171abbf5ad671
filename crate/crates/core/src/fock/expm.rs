//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (Higham 2005 degree selection).
//!
//! Before the Padé stage the index set is split into the connected components
//! of the coupling graph `G[i][j] != 0 || G[j][i] != 0`. The exponential of a
//! matrix that is block diagonal up to a permutation is block diagonal with the
//! same blocks, so each component is exponentiated on its own. Ladder-operator
//! generators decompose into many small blocks this way (total occupation,
//! occupation difference, parity).

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use super::Operator;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^G` for an operator of any mode structure.
pub fn expm(generator: &Operator) -> Result<Operator> {
    if !generator.is_finite() {
        return Err(Error::NonFinite);
    }
    let entries = expm_matrix(generator.matrix());
    Operator::from_matrix(generator.cutoff(), generator.modes(), entries)
}

pub(crate) fn expm_matrix(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let mut out = Array2::zeros((n, n));
    for block in coupled_blocks(a) {
        if block.len() == 1 {
            let i = block[0];
            out[[i, i]] = a[[i, i]].exp();
            continue;
        }
        let sub = a.select(Axis(0), &block).select(Axis(1), &block);
        let e = expm_dense(&sub);
        for (bi, &i) in block.iter().enumerate() {
            for (bj, &j) in block.iter().enumerate() {
                out[[i, j]] = e[[bi, bj]];
            }
        }
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the symmetric sparsity pattern, each sorted, in
/// order of their smallest index.
pub(crate) fn coupled_blocks(a: &Array2<Complex64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    for ((i, j), z) in a.indexed_iter() {
        if i != j && *z != ZERO {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled(a: &Array2<Complex64>, s: f64) -> Array2<Complex64> {
    a.mapv(|z| z * s)
}

fn expm_dense(a: &Array2<Complex64>) -> Array2<Complex64> {
    let norm = one_norm(a);
    for (degree, theta) in THETA {
        if norm <= theta {
            return pade_low(a, degree);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a_s = scaled(a, 0.5f64.powi(s));
    let mut r = pade13(&a_s);
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

fn pade_low(a: &Array2<Complex64>, degree: usize) -> Array2<Complex64> {
    let b: &[f64] = match degree {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let n = a.nrows();
    let eye = Array2::<Complex64>::eye(n);
    let a2 = a.dot(a);
    // even powers I, A², A⁴, ...
    let mut powers = vec![eye, a2.clone()];
    while powers.len() < degree.div_ceil(2) {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut odd = Array2::<Complex64>::zeros((n, n));
    let mut even = Array2::<Complex64>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        odd.scaled_add(ONE * b[2 * k + 1], p);
        even.scaled_add(ONE * b[2 * k], p);
    }
    let u = a.dot(&odd);
    solve(&(&even - &u), &(&even + &u))
}

fn pade13(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let eye = Array2::<Complex64>::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let c = |x: f64| ONE * x;

    let w1 = &a6 * c(B13[13]) + &a4 * c(B13[11]) + &a2 * c(B13[9]);
    let w2 = &a6 * c(B13[7]) + &a4 * c(B13[5]) + &a2 * c(B13[3]) + &eye * c(B13[1]);
    let u = a.dot(&(a6.dot(&w1) + w2));

    let z1 = &a6 * c(B13[12]) + &a4 * c(B13[10]) + &a2 * c(B13[8]);
    let z2 = &a6 * c(B13[6]) + &a4 * c(B13[4]) + &a2 * c(B13[2]) + &eye * c(B13[0]);
    let v = a6.dot(&z1) + z2;

    solve(&(&v - &u), &(&v + &u))
}

/// Solves `lhs · X = rhs` by LU with partial pivoting.
fn solve(lhs: &Array2<Complex64>, rhs: &Array2<Complex64>) -> Array2<Complex64> {
    let n = lhs.nrows();
    let mut lu = lhs.clone();
    let mut x = rhs.clone();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| lu[[p, col]].norm().total_cmp(&lu[[q, col]].norm()))
            .unwrap();
        if pivot_row != col {
            for j in 0..n {
                lu.swap([col, j], [pivot_row, j]);
            }
            for j in 0..x.ncols() {
                x.swap([col, j], [pivot_row, j]);
            }
        }
        let pivot = lu[[col, col]];
        // the Padé denominator is nonsingular for ‖A‖₁ ≤ θ
        for row in col + 1..n {
            let factor = lu[[row, col]] / pivot;
            if factor == ZERO {
                continue;
            }
            for j in col..n {
                let v = lu[[col, j]];
                lu[[row, j]] -= factor * v;
            }
            for j in 0..x.ncols() {
                let v = x[[col, j]];
                x[[row, j]] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let pivot = lu[[col, col]];
        for j in 0..x.ncols() {
            let mut acc = x[[col, j]];
            for k in col + 1..n {
                acc -= lu[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = acc / pivot;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::kernels::frobenius;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Oracle: Taylor series with exact scaling by 2^s and repeated squaring,
    /// summed until the terms stop contributing.
    fn series_exp(a: &Array2<Complex64>) -> Array2<Complex64> {
        let n = a.nrows();
        let norm = one_norm(a);
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a_s = a.mapv(|z| z * 0.5f64.powi(s));
        let mut term = Array2::<Complex64>::eye(n);
        let mut sum = term.clone();
        for k in 1..60 {
            term = term.dot(&a_s).mapv(|z| z / k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = sum.dot(&sum);
        }
        sum
    }

    fn random_matrix(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Array2<Complex64> {
        Array2::from_shape_fn((n, n), |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
        })
    }

    fn op_norm_bound(a: &Array2<Complex64>) -> f64 {
        frobenius(a)
    }

    #[test]
    fn matches_series_oracle_across_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 5, 8, 16] {
            for scale in [1e-3, 0.05, 0.2, 0.6, 2.0, 6.0] {
                let a = random_matrix(n, scale / n as f64, &mut rng);
                let e = expm_matrix(&a);
                let oracle = series_exp(&a);
                let rel = frobenius(&(&e - &oracle)) / op_norm_bound(&oracle);
                assert!(rel < 1e-12, "n={n} scale={scale} rel={rel:e}");
            }
        }
    }

    #[test]
    fn block_split_matches_dense_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = random_matrix(12, 0.3, &mut rng);
        // two interleaved blocks: even and odd indices
        for i in 0..12 {
            for j in 0..12 {
                if (i + j) % 2 == 1 {
                    a[[i, j]] = ZERO;
                }
            }
        }
        let blocks = coupled_blocks(&a);
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0], vec![0, 2, 4, 6, 8, 10]);
        let split = expm_matrix(&a);
        let dense = expm_dense(&a);
        assert!(frobenius(&(&split - &dense)) < 1e-13);
    }

    #[test]
    fn zero_gives_identity() {
        let z = Array2::<Complex64>::zeros((7, 7));
        assert_eq!(expm_matrix(&z), Array2::eye(7));
    }

    #[test]
    fn diagonal_is_exact() {
        let d = Array2::from_diag(&ndarray::arr1(&[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, std::f64::consts::PI),
            Complex64::new(0.0, 2.0 * std::f64::consts::PI),
        ]));
        let e = expm_matrix(&d);
        let expected = [1.0, -1.0, 1.0];
        for i in 0..3 {
            assert!((e[[i, i]] - Complex64::new(expected[i], 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn anti_hermitian_generators_give_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4usize, 10, 30] {
            let h = random_matrix(n, 3.0, &mut rng);
            let g = &h - &h.t().mapv(|z| z.conj());
            let u = expm_matrix(&g);
            let defect = u.t().mapv(|z| z.conj()).dot(&u) - Array2::<Complex64>::eye(n);
            assert!(frobenius(&defect) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn lu_solve_recovers_known_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_matrix(9, 1.0, &mut rng) + Array2::<Complex64>::eye(9) * ONE * 3.0;
        let x = random_matrix(9, 1.0, &mut rng);
        let b = a.dot(&x);
        let solved = solve(&a, &b);
        assert!(frobenius(&(&solved - &x)) < 1e-12);
    }
}
