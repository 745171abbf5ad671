//! su(2) and su(1,1) generator triples: the abstract spin-J and (truncated)
//! spin-K representations, the two-boson Schwinger realizations and the
//! single-mode quadratic realization of su(1,1).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    commutator, creation, mode_annihilators, norm_in, number, Cutoff, Modes, Operator, Window, C64,
};

/// Spin label `J = two_j / 2` of a finite su(2) irrep of dimension `two_j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinJ {
    two_j: u32,
}

impl SpinJ {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin("2J must be at least 1".into()));
        }
        Ok(Self { two_j })
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Cutoff whose single-mode space carries the irrep, `n_max = 2J`.
    pub fn cutoff(self) -> Cutoff {
        Cutoff::new(self.two_j as usize).expect("2J >= 1")
    }
}

impl fmt::Display for SpinJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Spin label of a lowest-weight su(1,1) irrep with `2K = num / den`,
/// truncated to levels `0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinK {
    num: u32,
    den: u32,
    cutoff: Cutoff,
}

impl SpinK {
    /// `2K = num / den`, stored in lowest terms.
    pub fn new(num: u32, den: u32, cutoff: Cutoff) -> Result<Self> {
        if den == 0 || num == 0 {
            return Err(Error::InvalidSpin(format!(
                "2K = {num}/{den} must be positive"
            )));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
            cutoff,
        })
    }

    /// Ratio `(num, den)` of `2K` in lowest terms.
    pub fn two_k(self) -> (u32, u32) {
        (self.num, self.den)
    }

    pub fn k(self) -> f64 {
        self.num as f64 / (2.0 * self.den as f64)
    }

    pub fn cutoff(self) -> Cutoff {
        self.cutoff
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Su2,
    Su11,
}

/// Raising, lowering and Cartan generators of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct LieTriple {
    pub plus: Operator,
    pub minus: Operator,
    pub third: Operator,
    pub algebra: Algebra,
}

impl LieTriple {
    fn from_plus(plus: Operator, third: Operator, algebra: Algebra) -> Self {
        Self {
            minus: plus.dagger(),
            plus,
            third,
            algebra,
        }
    }

    /// Defects of the three defining relations on `window`:
    /// `[X3, X+] - X+`, `[X3, X-] + X-`, and `[X+, X-] - 2X3` for su(2)
    /// or `[X+, X-] + 2X3` for su(1,1).
    pub fn closure_residuals(&self, window: Window) -> Result<[f64; 3]> {
        let raise = commutator(&self.third, &self.plus)?.sub(&self.plus)?;
        let lower = commutator(&self.third, &self.minus)?.add(&self.minus)?;
        let sign = match self.algebra {
            Algebra::Su2 => -2.0,
            Algebra::Su11 => 2.0,
        };
        let cross =
            commutator(&self.plus, &self.minus)?.add_scaled(C64::new(sign, 0.0), &self.third)?;
        Ok([
            norm_in(&raise, window)?,
            norm_in(&lower, window)?,
            norm_in(&cross, window)?,
        ])
    }

    /// Largest of [`LieTriple::closure_residuals`].
    pub fn closure_residual(&self, window: Window) -> Result<f64> {
        Ok(self
            .closure_residuals(window)?
            .into_iter()
            .fold(0.0, f64::max))
    }

    /// `‖X- − (X+)†‖_F`.
    pub fn dagger_defect(&self) -> f64 {
        self.minus
            .sub(&self.plus.dagger())
            .expect("same space")
            .frobenius_norm()
    }

    /// `J3² + (J+J- + J-J+)/2` for su(2), `K3² − (K+K- + K-K+)/2` for su(1,1).
    pub fn casimir(&self) -> Operator {
        let anti = self
            .plus
            .mul(&self.minus)
            .and_then(|pm| pm.add(&self.minus.mul(&self.plus)?))
            .expect("same space");
        let sign = match self.algebra {
            Algebra::Su2 => 0.5,
            Algebra::Su11 => -0.5,
        };
        self.third
            .mul(&self.third)
            .and_then(|t2| t2.add_scaled(C64::new(sign, 0.0), &anti))
            .expect("same space")
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Spin-J irrep on `|J,n⟩`, `0 ≤ n ≤ 2J`.
pub fn su2_generators(spin: SpinJ) -> LieTriple {
    let cutoff = spin.cutoff();
    let two_j = spin.two_j as f64;
    let mut plus = Operator::zeros(cutoff, Modes::One).into_matrix();
    for n in 0..spin.two_j as usize {
        let nf = n as f64;
        plus[[n + 1, n]] = real(((nf + 1.0) * (two_j - nf)).sqrt());
    }
    let plus = Operator::from_matrix(cutoff, Modes::One, plus).expect("shape from cutoff");
    let third = Operator::diagonal(cutoff, Modes::One, |n| real(n as f64 - spin.j()));
    LieTriple::from_plus(plus, third, Algebra::Su2)
}

/// Spin-K lowest-weight irrep on `|K,n⟩`, truncated at `n_max`.
pub fn su11_generators(spin: SpinK) -> LieTriple {
    let cutoff = spin.cutoff;
    let two_k = 2.0 * spin.k();
    let mut plus = Operator::zeros(cutoff, Modes::One).into_matrix();
    for n in 0..cutoff.n_max() {
        let nf = n as f64;
        plus[[n + 1, n]] = real(((nf + 1.0) * (two_k + nf)).sqrt());
    }
    let plus = Operator::from_matrix(cutoff, Modes::One, plus).expect("shape from cutoff");
    let third = Operator::diagonal(cutoff, Modes::One, |n| real(spin.k() + n as f64));
    LieTriple::from_plus(plus, third, Algebra::Su11)
}

/// `J+ = a1†a2`, `J- = a2†a1`, `J3 = (N1 − N2)/2`.
pub fn schwinger_su2(cutoff: Cutoff) -> LieTriple {
    let (a1, a2) = mode_annihilators(cutoff);
    let plus = a1.dagger().mul(&a2).expect("same space");
    let d = cutoff.dim();
    let third = Operator::diagonal(cutoff, Modes::Two, |idx| {
        real((idx / d) as f64 / 2.0 - (idx % d) as f64 / 2.0)
    });
    LieTriple::from_plus(plus, third, Algebra::Su2)
}

/// `K+ = a1†a2†`, `K- = a2a1`, `K3 = (N1 + N2 + 1)/2`.
pub fn schwinger_su11(cutoff: Cutoff) -> LieTriple {
    let (a1, a2) = mode_annihilators(cutoff);
    let plus = a1.dagger().mul(&a2.dagger()).expect("same space");
    let d = cutoff.dim();
    let third = Operator::diagonal(cutoff, Modes::Two, |idx| {
        real(((idx / d) + (idx % d)) as f64 / 2.0 + 0.5)
    });
    LieTriple::from_plus(plus, third, Algebra::Su11)
}

/// `K+ = (a†)²/2`, `K- = a²/2`, `K3 = (N + 1/2)/2`.
///
/// The even levels carry `K = 1/4` (`|K,n⟩ ↔ |2n⟩`) and the odd levels
/// `K = 3/4` (`|K,n⟩ ↔ |2n+1⟩`); see [`parity_sector`].
pub fn single_mode_su11(cutoff: Cutoff) -> LieTriple {
    let ad = creation(cutoff);
    let plus = ad.mul(&ad).expect("same space").scale_real(0.5);
    let third = number(cutoff)
        .add(&Operator::identity(cutoff, Modes::One).scale_real(0.5))
        .expect("same space")
        .scale_real(0.5);
    LieTriple::from_plus(plus, third, Algebra::Su11)
}

/// Fock levels of one parity sector of a single mode together with the
/// spin they carry under [`single_mode_su11`]. `odd = false` gives the
/// levels `0, 2, 4, …` with `K = 1/4`; `odd = true` gives `1, 3, 5, …`
/// with `K = 3/4`. The returned spin is truncated at the sector size.
pub fn parity_sector(cutoff: Cutoff, odd: bool) -> Result<(SpinK, Vec<usize>)> {
    let levels: Vec<usize> = (usize::from(odd)..=cutoff.n_max()).step_by(2).collect();
    let sector_cutoff = Cutoff::new(levels.len().saturating_sub(1))?;
    let spin = SpinK::new(if odd { 3 } else { 1 }, 2, sector_cutoff)?;
    Ok((spin, levels))
}

/// Rising factorial `(a)_n = a(a+1)…(a+n−1)`, with `(a)_0 = 1`.
///
/// Forward recurrence up to `n = 120`; above that the product is taken in
/// log space (requires `a > 0`).
pub fn pochhammer(a: f64, n: usize) -> f64 {
    if n <= 120 || a <= 0.0 {
        (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
    } else {
        ln_pochhammer(a, n).exp()
    }
}

/// `ln (a)_n` for `a > 0`.
pub fn ln_pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|k| (a + k as f64).ln()).sum()
}
