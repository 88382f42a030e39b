//! Basis labels for the oscillator and reduced Hilbert spaces, and the
//! Bohr-Sommerfeld sets they index.
//!
//! The oscillator basis `e_{m,n}` is truncated at a shell cutoff `n_max`
//! (all `m + n <= n_max`) and ordered shell-major, then by ascending `m`, so
//! every shell `H_N` occupies the contiguous slice returned by
//! [`shell_range`].

use std::ops::Range;

use serde::Serialize;

use crate::{Error, Result};

/// Planck's constant divided by 2π, in whatever unit system the caller uses.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Hbar(f64);

impl Hbar {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Hbar(value))
        } else {
            Err(Error::domain(format!("hbar must be a positive finite real, got {value}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Hbar {
    fn default() -> Self {
        Hbar(1.0)
    }
}

/// Label `(m, n)` of the oscillator basis vector `e_{m,n}`; `m` and `n` are the
/// quantum numbers of the actions `A₁` and `A₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FockIndex {
    pub m: u32,
    pub n: u32,
}

impl FockIndex {
    pub const fn new(m: u32, n: u32) -> Self {
        FockIndex { m, n }
    }

    /// Shell number `N = m + n`, the `Q_E` eigenvalue in units of ħ.
    #[inline]
    pub const fn shell(self) -> u32 {
        self.m + self.n
    }

    /// Position of this index in [`oscillator_basis`] order.
    #[inline]
    pub fn position(self) -> usize {
        shell_start(self.shell()) + self.m as usize
    }

    /// Inverse of [`FockIndex::position`].
    pub fn from_position(pos: usize) -> Self {
        // Largest N with N(N+1)/2 <= pos.
        let mut shell = ((((8 * pos + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
        while shell_start(shell as u32) > pos {
            shell -= 1;
        }
        while shell_start(shell as u32 + 1) <= pos {
            shell += 1;
        }
        let m = (pos - shell_start(shell as u32)) as u32;
        FockIndex::new(m, shell as u32 - m)
    }
}

/// Label `(p, q)` of the reduced basis vector `ẽ_{p,q}`, `|p| <= q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ReducedIndex {
    p: i64,
    q: u32,
}

impl ReducedIndex {
    pub fn new(p: i64, q: u32) -> Result<Self> {
        if p.unsigned_abs() > u64::from(q) {
            return Err(Error::domain(format!("reduced index needs |p| <= q, got p={p}, q={q}")));
        }
        Ok(ReducedIndex { p, q })
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> u32 {
        self.q
    }

    /// Position in the reduced basis `p = -q, ..., q`.
    #[inline]
    pub fn position(self) -> usize {
        (self.p + i64::from(self.q)) as usize
    }
}

#[inline]
fn shell_start(shell: u32) -> usize {
    let n = shell as usize;
    n * (n + 1) / 2
}

/// Number of basis vectors with `m + n <= n_max`.
pub fn oscillator_dim(n_max: u32) -> usize {
    shell_start(n_max + 1)
}

/// Index range occupied by shell `H_N` in [`oscillator_basis`] order.
pub fn shell_range(shell: u32) -> Range<usize> {
    shell_start(shell)..shell_start(shell + 1)
}

/// All `(m, n)` with `m + n <= n_max`, shell-major and `m`-ascending.
pub fn oscillator_basis(n_max: u32) -> Vec<FockIndex> {
    (0..=n_max)
        .flat_map(|shell| (0..=shell).map(move |m| FockIndex::new(m, shell - m)))
        .collect()
}

/// The basis `ẽ_{p,q}`, `p = -q..=q`.
pub fn reduced_basis(q: u32) -> Vec<ReducedIndex> {
    let q_signed = i64::from(q);
    (-q_signed..=q_signed).map(|p| ReducedIndex { p, q }).collect()
}

/// Joint Bohr-Sommerfeld spectrum `(A₁, A₂) = (mħ, nħ)` of the truncated
/// oscillator, in basis order.
pub fn bs_set_oscillator(n_max: u32, hbar: Hbar) -> Vec<(f64, f64)> {
    oscillator_basis(n_max)
        .into_iter()
        .map(|idx| (f64::from(idx.m) * hbar.get(), f64::from(idx.n) * hbar.get()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteKind {
    Circle,
    Pole,
}

/// One connected piece of the reduced Bohr-Sommerfeld set: the level set
/// `π₃ = pħ` on `S²_{qħ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BsSite {
    pub p: i64,
    pub kind: SiteKind,
    /// `q² - p²`, the squared radius in units of ħ².
    pub radius_sq_units: u64,
    /// `ħ √(q² - p²)`.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BohrSommerfeldSetReduced {
    pub q: u32,
    pub entries: Vec<BsSite>,
}

impl BohrSommerfeldSetReduced {
    pub fn circles(&self) -> impl Iterator<Item = &BsSite> {
        self.entries.iter().filter(|s| s.kind == SiteKind::Circle)
    }

    pub fn poles(&self) -> impl Iterator<Item = &BsSite> {
        self.entries.iter().filter(|s| s.kind == SiteKind::Pole)
    }
}

pub fn bs_set_reduced(q: u32, hbar: Hbar) -> BohrSommerfeldSetReduced {
    let q_wide = u64::from(q);
    let entries = reduced_basis(q)
        .into_iter()
        .map(|idx| {
            let p_abs = idx.p.unsigned_abs();
            let radius_sq_units = q_wide * q_wide - p_abs * p_abs;
            BsSite {
                p: idx.p,
                kind: if p_abs == q_wide { SiteKind::Pole } else { SiteKind::Circle },
                radius_sq_units,
                radius: hbar.get() * (radius_sq_units as f64).sqrt(),
            }
        })
        .collect();
    BohrSommerfeldSetReduced { q, entries }
}

/// Which of the two irreducible chains of `H̃_q` contains `ẽ_{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chain {
    /// `p ≡ q (mod 2)`: the chain `H̃_q⁰`, of dimension `q + 1`.
    EvenRelQ,
    /// `p ≡ q - 1 (mod 2)`: the chain `H̃_q¹`, of dimension `q`.
    OddRelQ,
}

impl Chain {
    pub fn of(p: i64, q: u32) -> Chain {
        if (p - i64::from(q)).rem_euclid(2) == 0 {
            Chain::EvenRelQ
        } else {
            Chain::OddRelQ
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Chain::EvenRelQ => "even",
            Chain::OddRelQ => "odd",
        }
    }
}

pub fn parity_chain(p: i64, q: u32) -> Result<Chain> {
    ReducedIndex::new(p, q)?;
    Ok(Chain::of(p, q))
}
