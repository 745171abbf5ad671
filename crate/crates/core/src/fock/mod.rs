//! Truncated single- and two-mode Fock spaces.
//!
//! Basis index `n` is the occupation number. Two-mode composite indices are
//! first-factor major: `(n1, n2) -> n1 * (n_max + 1) + n2`.

mod expm;
pub(crate) mod kernels;
mod param;

use std::fmt::Write as _;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expm::expm;
pub use param::{serialize_complex, sinc, sinhc, PolarParam};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Unitarity defect allowed for anything passed to [`conjugate_by`].
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Poisson tail bound used to pick cutoffs for coherent states.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cutoff {
    n_max: usize,
}

impl Cutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidCutoff(n_max));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(self) -> usize {
        self.n_max
    }

    /// Single-mode dimension `n_max + 1`.
    pub fn dim(self) -> usize {
        self.n_max + 1
    }

    /// Smallest cutoff whose Poisson tail for `|α| = modulus` is below `tol`.
    pub fn for_coherent(modulus: f64, tol: f64) -> Self {
        let mut n_max = 1;
        while poisson_tail(modulus, n_max) >= tol {
            n_max += 1;
        }
        Self { n_max }
    }

    /// Default margin for identity comparisons: `ceil(n_max / 4)`.
    pub fn default_margin(self) -> usize {
        self.n_max.div_ceil(4)
    }
}

/// `Σ_{n > n_max} e^{-r²} r^{2n} / n!`, the weight a coherent state of
/// modulus `r` places above the cutoff.
pub fn poisson_tail(modulus: f64, n_max: usize) -> f64 {
    if modulus == 0.0 {
        return 0.0;
    }
    let r2 = modulus * modulus;
    let first = n_max + 1;
    let ln_fact: f64 = (1..=first).map(|k| (k as f64).ln()).sum();
    let mut term = (-r2 + first as f64 * r2.ln() - ln_fact).exp();
    let mut sum = 0.0;
    let mut n = first;
    loop {
        sum += term;
        n += 1;
        term *= r2 / n as f64;
        if (n as f64) > r2 && term <= sum * 1e-17 {
            break;
        }
        if n > first + 100_000 {
            break;
        }
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modes {
    One,
    Two,
}

impl Modes {
    pub fn count(self) -> usize {
        match self {
            Modes::One => 1,
            Modes::Two => 2,
        }
    }

    fn from_count(count: usize) -> Result<Self> {
        match count {
            1 => Ok(Modes::One),
            2 => Ok(Modes::Two),
            other => Err(Error::Parse(format!("unsupported mode count {other}"))),
        }
    }

    pub fn dim(self, cutoff: Cutoff) -> usize {
        cutoff.dim().pow(self.count() as u32)
    }
}

/// Dense complex operator on a truncated one- or two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    entries: Array2<C64>,
    modes: Modes,
    cutoff: Cutoff,
}

impl Operator {
    pub fn from_matrix(cutoff: Cutoff, modes: Modes, entries: Array2<C64>) -> Result<Self> {
        let dim = modes.dim(cutoff);
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                context: "operator entries vs (n_max+1)^modes",
                left: entries.nrows().max(entries.ncols()),
                right: dim,
            });
        }
        Ok(Self {
            entries,
            modes,
            cutoff,
        })
    }

    pub fn zeros(cutoff: Cutoff, modes: Modes) -> Self {
        let dim = modes.dim(cutoff);
        Self {
            entries: Array2::zeros((dim, dim)),
            modes,
            cutoff,
        }
    }

    pub fn identity(cutoff: Cutoff, modes: Modes) -> Self {
        let dim = modes.dim(cutoff);
        Self {
            entries: Array2::eye(dim),
            modes,
            cutoff,
        }
    }

    pub fn diagonal(cutoff: Cutoff, modes: Modes, f: impl Fn(usize) -> C64) -> Self {
        let mut op = Self::zeros(cutoff, modes);
        for i in 0..op.dim() {
            op.entries[[i, i]] = f(i);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[[row, col]]
    }

    /// Entries at `indices × indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Array2<C64> {
        Array2::from_shape_fn((indices.len(), indices.len()), |(i, j)| {
            self.entries[[indices[i], indices[j]]]
        })
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        kernels::frobenius(&self.entries)
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            entries: Array2::from_shape_fn(self.entries.raw_dim(), |(i, j)| {
                self.entries[[j, i]].conj()
            }),
            modes: self.modes,
            cutoff: self.cutoff,
        }
    }

    fn check_same_space(&self, other: &Operator, context: &'static str) -> Result<()> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch {
                context,
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    fn with_entries(&self, entries: Array2<C64>) -> Operator {
        Operator {
            entries,
            modes: self.modes,
            cutoff: self.cutoff,
        }
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other, "operator product")?;
        Ok(self.with_entries(kernels::matmul(&self.entries, &other.entries)))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other, "operator sum")?;
        Ok(self.with_entries(&self.entries + &other.entries))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_space(other, "operator difference")?;
        Ok(self.with_entries(&self.entries - &other.entries))
    }

    pub fn scale(&self, factor: C64) -> Operator {
        self.with_entries(self.entries.mapv(|z| z * factor))
    }

    pub fn scale_real(&self, factor: f64) -> Operator {
        self.scale(C64::new(factor, 0.0))
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: C64, other: &Operator) -> Result<Operator> {
        self.check_same_space(other, "operator sum")?;
        let mut entries = self.entries.clone();
        entries.scaled_add(factor, &other.entries);
        Ok(self.with_entries(entries))
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, exponent: u32) -> Operator {
        let mut out = Operator::identity(self.cutoff, self.modes);
        for _ in 0..exponent {
            out = out.mul(self).expect("same space");
        }
        out
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if self.modes != ket.modes || self.cutoff != ket.cutoff {
            return Err(Error::DimensionMismatch {
                context: "operator applied to ket",
                left: self.dim(),
                right: ket.dim(),
            });
        }
        Ket::new(
            self.cutoff,
            self.modes,
            kernels::matvec(&self.entries, &ket.amplitudes),
        )
    }

    /// Textual dump: header `dim modes n_max`, then one `re im` pair per
    /// line in row-major order.
    pub fn to_dump(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.dim(),
            self.modes.count(),
            self.cutoff.n_max
        );
        for z in self.entries.iter() {
            let _ = writeln!(out, "{} {}", z.re, z.im);
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Operator> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty dump".into()))?;
        let fields = parse_usizes(header)?;
        let [dim, modes, n_max] = fields[..] else {
            return Err(Error::Parse(format!("bad operator header {header:?}")));
        };
        let cutoff = Cutoff::new(n_max)?;
        let modes = Modes::from_count(modes)?;
        let values = parse_pairs(lines, dim * dim)?;
        let entries =
            Array2::from_shape_vec((dim, dim), values).map_err(|e| Error::Parse(e.to_string()))?;
        Operator::from_matrix(cutoff, modes, entries)
    }
}

fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        })
        .collect()
}

fn parse_pairs<'a>(lines: impl Iterator<Item = &'a str>, expected: usize) -> Result<Vec<C64>> {
    let mut values = Vec::with_capacity(expected);
    for line in lines {
        let mut parts = line.split_whitespace();
        let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("expected `re im`, got {line:?}")));
        };
        let parse = |t: &str| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        };
        values.push(C64::new(parse(re)?, parse(im)?));
    }
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} entries, found {}",
            values.len()
        )));
    }
    Ok(values)
}

/// State vector on a truncated one- or two-mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Array1<C64>,
    modes: Modes,
    cutoff: Cutoff,
    normalized: bool,
}

/// Norm tolerance behind the `normalized` flag.
pub const NORM_TOLERANCE: f64 = 1e-12;

impl Ket {
    pub fn new(cutoff: Cutoff, modes: Modes, amplitudes: Array1<C64>) -> Result<Self> {
        let dim = modes.dim(cutoff);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "ket amplitudes vs (n_max+1)^modes",
                left: amplitudes.len(),
                right: dim,
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(Self {
            amplitudes,
            modes,
            cutoff,
            normalized: (norm - 1.0).abs() <= NORM_TOLERANCE,
        })
    }

    pub fn basis(cutoff: Cutoff, modes: Modes, index: usize) -> Result<Self> {
        let dim = modes.dim(cutoff);
        if index >= dim {
            return Err(Error::OutOfRange {
                index,
                max: dim - 1,
            });
        }
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[index] = ONE;
        Self::new(cutoff, modes, amplitudes)
    }

    pub fn vacuum(cutoff: Cutoff, modes: Modes) -> Self {
        Self::basis(cutoff, modes, 0).expect("index 0 always exists")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn modes(&self) -> Modes {
        self.modes
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&self) -> Result<Ket> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ket::new(self.cutoff, self.modes, self.amplitudes.mapv(|z| z / norm))
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket::new(
            self.cutoff,
            self.modes,
            self.amplitudes.mapv(|z| z * factor),
        )
        .expect("same shape")
    }

    fn check_same_space(&self, other: &Ket) -> Result<()> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch {
                context: "ket spaces",
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        self.check_same_space(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    pub fn sub(&self, other: &Ket) -> Result<Ket> {
        self.check_same_space(other)?;
        Ket::new(
            self.cutoff,
            self.modes,
            &self.amplitudes - &other.amplitudes,
        )
    }

    pub fn distance(&self, other: &Ket) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Product state `self ⊗ other`, first factor major.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        if self.modes != Modes::One || other.modes != Modes::One || self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch {
                context: "ket tensor needs two single-mode kets on one cutoff",
                left: self.dim(),
                right: other.dim(),
            });
        }
        let d = self.dim();
        let amplitudes = Array1::from_shape_fn(d * d, |idx| {
            self.amplitudes[idx / d] * other.amplitudes[idx % d]
        });
        Ket::new(self.cutoff, Modes::Two, amplitudes)
    }

    /// `⟨N_mode⟩` for the normalized state; `mode` is 0 or 1.
    pub fn mean_occupation(&self, mode: usize) -> f64 {
        let d = self.cutoff.dim();
        let weight: f64 = self.amplitudes.iter().map(|z| z.norm_sqr()).sum();
        let total: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, z)| {
                let n = match (self.modes, mode) {
                    (Modes::One, _) => idx,
                    (Modes::Two, 0) => idx / d,
                    (Modes::Two, _) => idx % d,
                };
                n as f64 * z.norm_sqr()
            })
            .sum();
        total / weight
    }

    /// Reduced density matrix of one factor of a two-mode ket.
    pub fn reduced_density(&self, mode: usize) -> Result<Array2<C64>> {
        if self.modes != Modes::Two {
            return Err(Error::DimensionMismatch {
                context: "reduced density needs a two-mode ket",
                left: self.dim(),
                right: self.cutoff.dim().pow(2),
            });
        }
        let d = self.cutoff.dim();
        let coeffs = Array2::from_shape_fn((d, d), |(i, j)| self.amplitudes[i * d + j]);
        let coeffs = if mode == 0 {
            coeffs
        } else {
            coeffs.t().to_owned()
        };
        Ok(coeffs.dot(&coeffs.t().mapv(|z| z.conj())))
    }

    /// Textual dump: header `dim modes`, then one `re im` pair per line.
    pub fn to_dump(&self) -> String {
        let mut out = format!("{} {}\n", self.dim(), self.modes.count());
        for z in self.amplitudes.iter() {
            let _ = writeln!(out, "{} {}", z.re, z.im);
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Ket> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty dump".into()))?;
        let fields = parse_usizes(header)?;
        let [dim, modes] = fields[..] else {
            return Err(Error::Parse(format!("bad ket header {header:?}")));
        };
        let modes = Modes::from_count(modes)?;
        let single = match modes {
            Modes::One => dim,
            Modes::Two => (dim as f64).sqrt().round() as usize,
        };
        if modes.count() == 2 && single * single != dim {
            return Err(Error::Parse(format!("{dim} is not a square dimension")));
        }
        let cutoff = Cutoff::new(single.saturating_sub(1))?;
        let values = parse_pairs(lines, dim)?;
        Ket::new(cutoff, modes, Array1::from_vec(values))
    }
}

pub fn annihilation(cutoff: Cutoff) -> Operator {
    let mut op = Operator::zeros(cutoff, Modes::One);
    for n in 1..=cutoff.n_max {
        op.entries[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    op
}

pub fn creation(cutoff: Cutoff) -> Operator {
    annihilation(cutoff).dagger()
}

pub fn dagger(op: &Operator) -> Operator {
    op.dagger()
}

pub fn number(cutoff: Cutoff) -> Operator {
    Operator::diagonal(cutoff, Modes::One, |n| C64::new(n as f64, 0.0))
}

pub fn identity(cutoff: Cutoff, modes: Modes) -> Operator {
    Operator::identity(cutoff, modes)
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Kronecker product `A ⊗ B` of two single-mode operators, first factor major.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    if a.modes != Modes::One || b.modes != Modes::One {
        return Err(Error::DimensionMismatch {
            context: "tensor needs single-mode factors",
            left: a.dim(),
            right: b.dim(),
        });
    }
    if a.cutoff != b.cutoff {
        return Err(Error::DimensionMismatch {
            context: "tensor factors must share a cutoff",
            left: a.dim(),
            right: b.dim(),
        });
    }
    let d = a.dim();
    let mut entries = Array2::zeros((d * d, d * d));
    for ((i, k), &aik) in a.entries.indexed_iter() {
        if aik == ZERO {
            continue;
        }
        for ((j, l), &bjl) in b.entries.indexed_iter() {
            if bjl != ZERO {
                entries[[i * d + j, k * d + l]] = aik * bjl;
            }
        }
    }
    Operator::from_matrix(a.cutoff, Modes::Two, entries)
}

/// Which factor of the two-mode space an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    Second,
}

/// Lifts a single-mode operator to act on one factor of the two-mode space.
pub fn on_mode(op: &Operator, mode: Mode) -> Result<Operator> {
    let id = Operator::identity(op.cutoff, Modes::One);
    match mode {
        Mode::First => tensor(op, &id),
        Mode::Second => tensor(&id, op),
    }
}

/// Two-mode ladder operators `(a1, a2)`.
pub fn mode_annihilators(cutoff: Cutoff) -> (Operator, Operator) {
    let a = annihilation(cutoff);
    (
        on_mode(&a, Mode::First).expect("single-mode factor"),
        on_mode(&a, Mode::Second).expect("single-mode factor"),
    )
}

/// `U A U†`; `U` must be unitary to [`UNITARITY_TOLERANCE`].
pub fn conjugate_by(u: &Operator, a: &Operator) -> Result<Operator> {
    u.check_same_space(a, "conjugation")?;
    let ud = u.dagger();
    let defect = ud
        .mul(u)?
        .sub(&Operator::identity(u.cutoff, u.modes))?
        .frobenius_norm();
    if defect > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary { defect });
    }
    u.mul(a)?.mul(&ud)
}

/// Region on which truncated operators are compared.
///
/// `PerMode(m)` keeps occupations `≤ n_max - m` in every factor.
/// `TotalOccupation(m)` keeps two-mode states with `n1 + n2 ≤ n_max - m`;
/// occupation-preserving two-mode unitaries are exact on that region. On a
/// single-mode space both rules coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    PerMode(usize),
    TotalOccupation(usize),
}

impl Window {
    pub fn margin(self) -> usize {
        match self {
            Window::PerMode(m) | Window::TotalOccupation(m) => m,
        }
    }

    /// Indices kept by the window, in increasing order.
    pub fn indices(self, cutoff: Cutoff, modes: Modes) -> Result<Vec<usize>> {
        let margin = self.margin();
        if margin > cutoff.n_max {
            return Err(Error::MarginTooLarge {
                margin,
                n_max: cutoff.n_max,
            });
        }
        let top = cutoff.n_max - margin;
        let d = cutoff.dim();
        Ok(match (modes, self) {
            (Modes::One, _) => (0..=top).collect(),
            (Modes::Two, Window::PerMode(_)) => (0..d * d)
                .filter(|idx| idx / d <= top && idx % d <= top)
                .collect(),
            (Modes::Two, Window::TotalOccupation(_)) => {
                (0..d * d).filter(|idx| idx / d + idx % d <= top).collect()
            }
        })
    }

    pub fn projector(self, cutoff: Cutoff, modes: Modes) -> Result<Operator> {
        let keep = self.indices(cutoff, modes)?;
        let mut op = Operator::zeros(cutoff, modes);
        for i in keep {
            op.entries[[i, i]] = ONE;
        }
        Ok(op)
    }
}

/// Orthogonal projector onto occupations `≤ n_max - margin` in every factor.
pub fn safe_projector(cutoff: Cutoff, modes: Modes, margin: usize) -> Result<Operator> {
    Window::PerMode(margin).projector(cutoff, modes)
}

/// `‖P (A - B) P‖_F` with `P = safe_projector(margin)`.
pub fn residual(a: &Operator, b: &Operator, margin: usize) -> Result<f64> {
    residual_in(a, b, Window::PerMode(margin))
}

/// `‖P (A - B) P‖_F` for the projector of `window`.
pub fn residual_in(a: &Operator, b: &Operator, window: Window) -> Result<f64> {
    a.check_same_space(b, "residual")?;
    let keep = window.indices(a.cutoff, a.modes)?;
    let mut sum = 0.0;
    for &i in &keep {
        for &j in &keep {
            sum += (a.entries[[i, j]] - b.entries[[i, j]]).norm_sqr();
        }
    }
    Ok(sum.sqrt())
}

/// Frobenius norm of the window block of `a`.
pub fn norm_in(a: &Operator, window: Window) -> Result<f64> {
    residual_in(a, &Operator::zeros(a.cutoff, a.modes), window)
}
