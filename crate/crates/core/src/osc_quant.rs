//! Quantum operators of the two dimensional oscillator on the truncated
//! basis `e_{m,n}`, `m + n <= n_max`.
//!
//! The diagonal operators `Q_{A₁}, Q_{A₂}, Q_E, Q_L` come straight from the
//! Bohr-Sommerfeld lattice. The shifting operators `Q_{z_j}, Q_{z̄_j}` move
//! one quantum number by one step, and the `Q_{π_k}` operators are assembled
//! from their closed-form matrix elements so that every shell `H_N` carries
//! an exact `u(2)` representation regardless of the cutoff.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::{oscillator_basis, oscillator_dim, shell_range, FockIndex, Hbar};
use crate::opcore::{SparseOperator, VerificationReport};
use crate::{Error, Result};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionOperators {
    pub qa1: SparseOperator,
    pub qa2: SparseOperator,
    pub qe: SparseOperator,
    pub ql: SparseOperator,
}

/// `Q_{z̄_j}` images that would land on shell `n_max + 1` and were dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryTruncation {
    pub operator: &'static str,
    pub source: FockIndex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZOperators {
    pub qz1: SparseOperator,
    pub qz1bar: SparseOperator,
    pub qz2: SparseOperator,
    pub qz2bar: SparseOperator,
    pub truncated: Vec<BoundaryTruncation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiOperators {
    pub qpi1: SparseOperator,
    pub qpi2: SparseOperator,
    pub qpi3: SparseOperator,
    pub qpi4: SparseOperator,
}

pub fn build_action_ops(n_max: u32, hbar: Hbar) -> ActionOperators {
    let h = hbar.get();
    let basis = oscillator_basis(n_max);
    let diag = |f: fn(FockIndex) -> f64| SparseOperator::from_diagonal(basis.iter().map(|&i| real(f(i) * h)));
    ActionOperators {
        qa1: diag(|i| f64::from(i.m)),
        qa2: diag(|i| f64::from(i.n)),
        qe: diag(|i| f64::from(i.m + i.n)),
        ql: diag(|i| f64::from(i.m) - f64::from(i.n)),
    }
}

pub fn build_z_ops(n_max: u32, hbar: Hbar) -> ZOperators {
    let h = hbar.get();
    let dim = oscillator_dim(n_max);
    let mut trip = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    let mut truncated = Vec::new();
    for idx in oscillator_basis(n_max) {
        let (m, n) = (idx.m, idx.n);
        let col = idx.position();
        if m > 0 {
            let to = FockIndex::new(m - 1, n).position();
            trip[0].push((to, col, real((2.0 * f64::from(m) * h).sqrt())));
        }
        if n > 0 {
            let to = FockIndex::new(m, n - 1).position();
            trip[2].push((to, col, real((2.0 * f64::from(n) * h).sqrt())));
        }
        if idx.shell() < n_max {
            let to = FockIndex::new(m + 1, n).position();
            trip[1].push((to, col, real((2.0 * f64::from(m + 1) * h).sqrt())));
            let to = FockIndex::new(m, n + 1).position();
            trip[3].push((to, col, real((2.0 * f64::from(n + 1) * h).sqrt())));
        } else {
            truncated.push(BoundaryTruncation { operator: "qz1bar", source: idx });
            truncated.push(BoundaryTruncation { operator: "qz2bar", source: idx });
        }
    }
    let [t1, t1bar, t2, t2bar] = trip;
    let op = |t| SparseOperator::from_triplets(dim, dim, t).expect("indices come from the basis");
    ZOperators { qz1: op(t1), qz1bar: op(t1bar), qz2: op(t2), qz2bar: op(t2bar), truncated }
}

/// `Q_{π₁..π₄}` from their closed-form matrix elements.
pub fn build_pi_ops(n_max: u32, hbar: Hbar) -> PiOperators {
    let h = hbar.get();
    let dim = oscillator_dim(n_max);
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for idx in oscillator_basis(n_max) {
        let (m, n) = (f64::from(idx.m), f64::from(idx.n));
        let col = idx.position();
        // e_{m,n} -> e_{m-1,n+1}
        if idx.m > 0 {
            let to = FockIndex::new(idx.m - 1, idx.n + 1).position();
            let c = h * (m * (n + 1.0)).sqrt();
            t1.push((to, col, real(c)));
            t2.push((to, col, Complex64::new(0.0, -c)));
        }
        // e_{m,n} -> e_{m+1,n-1}
        if idx.n > 0 {
            let to = FockIndex::new(idx.m + 1, idx.n - 1).position();
            let c = h * ((m + 1.0) * n).sqrt();
            t1.push((to, col, real(c)));
            t2.push((to, col, Complex64::new(0.0, c)));
        }
    }
    let actions = build_action_ops(n_max, hbar);
    PiOperators {
        qpi1: SparseOperator::from_triplets(dim, dim, t1).expect("shell-preserving indices"),
        qpi2: SparseOperator::from_triplets(dim, dim, t2).expect("shell-preserving indices"),
        qpi3: actions.ql,
        qpi4: actions.qe,
    }
}

/// Every operator of the quantized oscillator at one cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorOperators {
    pub n_max: u32,
    pub hbar: Hbar,
    pub qa1: SparseOperator,
    pub qa2: SparseOperator,
    pub qe: SparseOperator,
    pub ql: SparseOperator,
    pub qz1: SparseOperator,
    pub qz2: SparseOperator,
    pub qz1bar: SparseOperator,
    pub qz2bar: SparseOperator,
    pub qpi1: SparseOperator,
    pub qpi2: SparseOperator,
    pub qpi3: SparseOperator,
    pub qpi4: SparseOperator,
    pub truncated: Vec<BoundaryTruncation>,
}

impl OscillatorOperators {
    pub fn build(n_max: u32, hbar: Hbar) -> Self {
        let a = build_action_ops(n_max, hbar);
        let z = build_z_ops(n_max, hbar);
        let p = build_pi_ops(n_max, hbar);
        OscillatorOperators {
            n_max,
            hbar,
            qa1: a.qa1,
            qa2: a.qa2,
            qe: a.qe,
            ql: a.ql,
            qz1: z.qz1,
            qz2: z.qz2,
            qz1bar: z.qz1bar,
            qz2bar: z.qz2bar,
            qpi1: p.qpi1,
            qpi2: p.qpi2,
            qpi3: p.qpi3,
            qpi4: p.qpi4,
            truncated: z.truncated,
        }
    }

    pub fn dim(&self) -> usize {
        oscillator_dim(self.n_max)
    }

    /// `Q_{π₁}, Q_{π₂}, Q_{π₃}` restricted to shell `H_N`.
    pub fn shell_pi_ops(&self, shell: u32) -> Result<[SparseOperator; 3]> {
        self.check_shell(shell)?;
        let idx: Vec<usize> = shell_range(shell).collect();
        Ok([self.qpi1.restrict(&idx)?, self.qpi2.restrict(&idx)?, self.qpi3.restrict(&idx)?])
    }

    fn check_shell(&self, shell: u32) -> Result<()> {
        if shell > self.n_max {
            return Err(Error::domain(format!("shell {shell} exceeds the cutoff n_max = {}", self.n_max)));
        }
        Ok(())
    }
}

/// One row of the joint spectrum, read from the operator diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct SpectrumRecord {
    pub m: u32,
    pub n: u32,
    pub A1: f64,
    pub A2: f64,
    pub E: f64,
    pub L: f64,
}

pub fn joint_spectrum(ops: &OscillatorOperators) -> Result<Vec<SpectrumRecord>> {
    for op in [&ops.qa1, &ops.qa2, &ops.qe, &ops.ql] {
        if !op.is_diagonal() {
            return Err(Error::Consistency("action operators must be diagonal".into()));
        }
    }
    let (a1, a2, e, l) = (ops.qa1.diagonal(), ops.qa2.diagonal(), ops.qe.diagonal(), ops.ql.diagonal());
    Ok(oscillator_basis(ops.n_max)
        .into_iter()
        .enumerate()
        .map(|(i, idx)| SpectrumRecord { m: idx.m, n: idx.n, A1: a1[i].re, A2: a2[i].re, E: e[i].re, L: l[i].re })
        .collect())
}

/// Residual checks of the `su(2)` and `u(2)` relations, self-adjointness, and
/// the z-operator factorisation of `Q_{π₁}, Q_{π₂}` on the interior shells.
pub fn verify_su2_u2(ops: &OscillatorOperators, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let h = ops.hbar.get();
    let minus_2ih = Complex64::new(0.0, -2.0 * h);
    let bracket = |name: &str, a: &SparseOperator, b: &SparseOperator, rhs: SparseOperator, r: &mut VerificationReport| {
        match a.commutator(b) {
            Ok(lhs) => r.record_difference(name, &lhs, &rhs, tol),
            Err(_) => r.record(name, f64::INFINITY, tol),
        }
    };

    bracket("[Qπ₁,Qπ₂]=−2iħQπ₃", &ops.qpi1, &ops.qpi2, ops.qpi3.scale(minus_2ih), &mut report);
    bracket("[Qπ₁,Qπ₃]=2iħQπ₂", &ops.qpi1, &ops.qpi3, ops.qpi2.scale(-minus_2ih), &mut report);
    bracket("[Qπ₂,Qπ₃]=−2iħQπ₁", &ops.qpi2, &ops.qpi3, ops.qpi1.scale(minus_2ih), &mut report);
    let zero = SparseOperator::zeros(ops.dim());
    for (k, pi) in [&ops.qpi1, &ops.qpi2, &ops.qpi3].into_iter().enumerate() {
        bracket(&format!("[QE,Qπ{}]=0", subscript(k + 1)), &ops.qe, pi, zero.clone(), &mut report);
    }
    for (k, pi) in [&ops.qpi1, &ops.qpi2, &ops.qpi3, &ops.qpi4].into_iter().enumerate() {
        report.record_difference(format!("Qπ{}†=Qπ{}", subscript(k + 1), subscript(k + 1)), &pi.adjoint(), pi, tol);
    }
    report.record_difference("Qz̄₁=Qz₁†", &ops.qz1.adjoint(), &ops.qz1bar, tol);
    report.record_difference("Qz̄₂=Qz₂†", &ops.qz2.adjoint(), &ops.qz2bar, tol);

    let interior: Vec<usize> = if ops.n_max == 0 { Vec::new() } else { (0..oscillator_dim(ops.n_max - 1)).collect() };
    let factorised = (|| -> Result<(SparseOperator, SparseOperator)> {
        let a = ops.qz1.compose(&ops.qz2bar)?;
        let b = ops.qz1bar.compose(&ops.qz2)?;
        let pi1 = a.add(&b)?.scale_real(0.5);
        let pi2 = a.sub(&b)?.scale(Complex64::new(0.0, -0.5));
        Ok((pi1.restrict(&interior)?, pi2.restrict(&interior)?))
    })();
    match factorised {
        Ok((pi1, pi2)) => {
            let direct1 = ops.qpi1.restrict(&interior).expect("interior indices are in range");
            let direct2 = ops.qpi2.restrict(&interior).expect("interior indices are in range");
            report.record_difference("Qπ₁=½(Qz₁Qz̄₂+Qz̄₁Qz₂) interior", &direct1, &pi1, tol);
            report.record_difference("Qπ₂=(1/2i)(Qz₁Qz̄₂−Qz̄₁Qz₂) interior", &direct2, &pi2, tol);
        }
        Err(_) => {
            report.record("Qπ₁=½(Qz₁Qz̄₂+Qz̄₁Qz₂) interior", f64::INFINITY, tol);
            report.record("Qπ₂=(1/2i)(Qz₁Qz̄₂−Qz̄₁Qz₂) interior", f64::INFINITY, tol);
        }
    }
    report
}

pub(crate) fn subscript(k: usize) -> char {
    ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'][k % 10]
}

/// Splits a shell-preserving operator into its blocks on each `H_N`.
pub fn block_decompose(op: &SparseOperator, n_max: u32) -> Result<BTreeMap<u32, SparseOperator>> {
    let dim = oscillator_dim(n_max);
    if op.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch { left: op.shape(), right: (dim, dim) });
    }
    for (r, c, _) in op.iter() {
        if FockIndex::from_position(r).shell() != FockIndex::from_position(c).shell() {
            return Err(Error::NotShellPreserving { row: r, col: c });
        }
    }
    (0..=n_max)
        .map(|shell| {
            let idx: Vec<usize> = shell_range(shell).collect();
            Ok((shell, op.restrict(&idx)?))
        })
        .collect()
}

/// Inverse of [`block_decompose`]: places block `N` on shell `H_N`.
pub fn reassemble(blocks: &BTreeMap<u32, SparseOperator>) -> Result<SparseOperator> {
    let n_max = blocks.keys().next_back().copied().unwrap_or(0);
    let dim = if blocks.is_empty() { 0 } else { oscillator_dim(n_max) };
    let mut triplets = Vec::new();
    for (&shell, block) in blocks {
        let range = shell_range(shell);
        if block.shape() != (range.len(), range.len()) {
            return Err(Error::DimensionMismatch { left: block.shape(), right: (range.len(), range.len()) });
        }
        triplets.extend(block.iter().map(|(r, c, v)| (range.start + r, range.start + c, v)));
    }
    SparseOperator::from_triplets(dim, dim, triplets)
}

/// `Q_{π₁}² + Q_{π₂}² + Q_{π₃}²` on shell `H_N`.
pub fn casimir(ops: &OscillatorOperators, shell: u32) -> Result<SparseOperator> {
    let [p1, p2, p3] = ops.shell_pi_ops(shell)?;
    p1.compose(&p1)?.add(&p2.compose(&p2)?)?.add(&p3.compose(&p3)?)
}
