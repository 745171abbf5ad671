//! The factor-exchange permutation `U(a ⊗ b) = b ⊗ a` at finite dimension,
//! its three-CNOT factorization for qubits, and a linearity witness against
//! cloning.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::fock::{Ket, Modes, C64};
use crate::report::Report;

/// Permutation matrix on `C^n ⊗ C^n`, stored as `map[row] = col` for the
/// unique unit entry of each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationOperator {
    n: usize,
    map: Vec<usize>,
}

impl PermutationOperator {
    pub fn from_map(n: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != n * n {
            return Err(Error::InvalidPermutation(format!(
                "map has {} rows, expected {}",
                map.len(),
                n * n
            )));
        }
        let mut seen = vec![false; map.len()];
        for &col in &map {
            if col >= map.len() || std::mem::replace(&mut seen[col], true) {
                return Err(Error::InvalidPermutation(format!(
                    "column {col} out of range or repeated"
                )));
            }
        }
        Ok(Self { n, map })
    }

    /// Accepts a square 0/1 matrix of side `n²` with one unit per row and column.
    pub fn from_dense(n: usize, matrix: &Array2<u8>) -> Result<Self> {
        if matrix.dim() != (n * n, n * n) {
            return Err(Error::InvalidPermutation(format!(
                "matrix shape {:?}, expected {}x{}",
                matrix.dim(),
                n * n,
                n * n
            )));
        }
        let mut map = Vec::with_capacity(n * n);
        for (r, row) in matrix.outer_iter().enumerate() {
            let ones: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, v)| **v == 1)
                .map(|(c, _)| c)
                .collect();
            if ones.len() != 1 || row.iter().any(|v| *v > 1) {
                return Err(Error::InvalidPermutation(format!(
                    "row {r} is not a unit row"
                )));
            }
            map.push(ones[0]);
        }
        Self::from_map(n, map)
    }

    /// Per-factor dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn to_dense(&self) -> Array2<u8> {
        let mut m = Array2::zeros((self.map.len(), self.map.len()));
        for (r, &c) in self.map.iter().enumerate() {
            m[[r, c]] = 1;
        }
        m
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &PermutationOperator) -> Result<PermutationOperator> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                context: "permutation product",
                left: self.n,
                right: other.n,
            });
        }
        let map = self.map.iter().map(|&k| other.map[k]).collect();
        Ok(PermutationOperator { n: self.n, map })
    }

    pub fn identity(n: usize) -> PermutationOperator {
        PermutationOperator {
            n,
            map: (0..n * n).collect(),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(r, &c)| self.map[c] == r)
    }

    /// `(U v)[row] = v[map[row]]`.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.map.len() {
            return Err(Error::DimensionMismatch {
                context: "permutation applied to vector",
                left: self.map.len(),
                right: v.len(),
            });
        }
        Ok(self.map.iter().map(|&c| v[c]).collect())
    }

    /// Applies the permutation to a two-mode ket whose single-mode dimension is `n`.
    pub fn apply_ket(&self, ket: &Ket) -> Result<Ket> {
        if ket.modes() != Modes::Two {
            return Err(Error::DimensionMismatch {
                context: "permutation needs a two-mode ket",
                left: self.map.len(),
                right: ket.dim(),
            });
        }
        let out = self.apply(ket.amplitudes().as_slice().expect("contiguous"))?;
        Ket::new(ket.cutoff(), Modes::Two, Array1::from_vec(out))
    }

    /// Export format: one `row col` line per unit entry, rows ascending.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (r, c) in self.map.iter().enumerate() {
            let _ = writeln!(out, "{r} {c}");
        }
        out
    }
}

/// `U_{ij,kl} = δ_il δ_jk` with composite index `ij → i·n + j`.
pub fn swap_matrix(n: usize) -> Result<PermutationOperator> {
    if n < 2 {
        return Err(Error::InvalidPermutation(format!(
            "swap needs n >= 2, got {n}"
        )));
    }
    let map = (0..n * n).map(|row| (row % n) * n + row / n).collect();
    Ok(PermutationOperator { n, map })
}

/// `U(a ⊗ b) = b ⊗ a` for two single-mode kets on the same cutoff.
pub fn apply_swap(a: &Ket, b: &Ket) -> Result<Ket> {
    let product = a.tensor(b)?;
    swap_matrix(a.dim())?.apply_ket(&product)
}

/// The three CNOT gates whose ordered product is `swap_matrix(2)`: control
/// on the first qubit, control on the second, control on the first.
pub fn cnot_factorization() -> [PermutationOperator; 3] {
    let outer = PermutationOperator {
        n: 2,
        map: vec![0, 1, 3, 2],
    };
    let middle = PermutationOperator {
        n: 2,
        map: vec![0, 3, 2, 1],
    };
    [outer.clone(), middle, outer]
}

/// The unitary extension of basis cloning `e_k ⊗ e_0 → e_k ⊗ e_k` on
/// `C^n ⊗ C^n`: it exchanges `e_k ⊗ e_0` with `e_k ⊗ e_k` and fixes every
/// other basis vector.
pub fn basis_cloner(n: usize) -> PermutationOperator {
    let mut map: Vec<usize> = (0..n * n).collect();
    for k in 1..n {
        map.swap(k * n, k * n + k);
    }
    PermutationOperator { n, map }
}

/// Runs the linearity argument against cloning for the normalized `h`.
///
/// With `C` the basis cloner, `C(h ⊗ e_0) = Σ h_k e_k ⊗ e_k`, which differs
/// from `h ⊗ h` by at least `√(1 − Σ|h_k|⁴)` whenever two amplitudes are
/// nonzero. Residuals: `linearity` (`C(2h⊗e_0) − 2C(h⊗e_0)`), and either
/// `basis_discrepancy` for a basis vector or `witness_shortfall` (how far
/// the discrepancy falls short of that bound) otherwise. Diagnostics carry
/// the discrepancy, the bound and the scalar argument
/// `‖C(2h⊗e_0) − 4 h⊗h‖` next to `‖2C(h⊗e_0) − 2 h⊗h‖`.
pub fn no_cloning_witness(h: &Ket, tol: f64) -> Result<Report> {
    if h.modes() != Modes::One {
        return Err(Error::DimensionMismatch {
            context: "witness needs a single-mode vector",
            left: h.dim(),
            right: h.cutoff().dim(),
        });
    }
    let h = h.normalize()?;
    let n = h.dim();
    let cloner = basis_cloner(n);
    let e0 = Ket::vacuum(h.cutoff(), Modes::One);
    let clone_of = |v: &Ket| -> Result<Ket> { cloner.apply_ket(&v.tensor(&e0)?) };
    let two = C64::new(2.0, 0.0);

    let cloned = clone_of(&h)?;
    let hh = h.tensor(&h)?;
    let cloned_twice = clone_of(&h.scale(two))?;

    let mut report = Report::new("no_cloning_witness", Vec::new(), h.cutoff().n_max(), 0, tol);
    report.residual("linearity", cloned_twice.distance(&cloned.scale(two))?);
    let discrepancy = cloned.distance(&hh)?;
    let support = h.amplitudes().iter().filter(|z| z.norm() > 0.0).count();
    let quartic: f64 = h.amplitudes().iter().map(|z| z.norm_sqr().powi(2)).sum();
    let bound = (1.0 - quartic).max(0.0).sqrt();
    if support == 1 {
        report.residual("basis_discrepancy", discrepancy);
    } else {
        report.residual("witness_shortfall", (bound - discrepancy).max(0.0));
    }
    report
        .diagnostic("discrepancy", discrepancy)
        .diagnostic("lower_bound", bound)
        .diagnostic(
            "scalar_mismatch",
            cloned_twice.distance(&hh.scale(C64::new(4.0, 0.0)))?,
        )
        .diagnostic(
            "scalar_consistent",
            cloned.scale(two).distance(&hh.scale(two))?,
        );
    Ok(report)
}
