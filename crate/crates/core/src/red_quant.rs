//! Quantization of the reduced system on `S²_{qħ}`.
//!
//! The reduced space `H̃_q` has basis `ẽ_{p,q}`, `p = -q..=q`, made of
//! eigenvectors of `Q_{π̃₃}`. The shifting operators move `p` by two, with
//! coefficients `b_p` fixed by the commutator recurrence
//! `b_{p+2}² − b_p² = −4ħ²p`. Since the shifts preserve the parity of `p`,
//! `H̃_q` splits into the chain with `p ≡ q (mod 2)` (dimension `q + 1`)
//! and the chain with `p ≡ q − 1 (mod 2)` (dimension `q`).

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::{reduced_basis, Chain, Hbar};
use crate::opcore::{SparseOperator, VerificationReport};
use crate::{Error, Result};

/// Squared shift coefficients `b_p²/ħ²` of one orbit label `q`.
///
/// The even chain is stored for `p = -q, -q+2, ..., q+2` and the odd chain
/// for `p = -q+1, ..., q+1`; both end points of each chain are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BCoefficients {
    pub q: u32,
    pub b_sq: BTreeMap<i64, u64>,
}

impl BCoefficients {
    pub fn get(&self, p: i64) -> Option<u64> {
        self.b_sq.get(&p).copied()
    }

    /// `b_p = ħ √(b_p²/ħ²)`, the nonnegative root.
    pub fn b(&self, p: i64, hbar: Hbar) -> Option<f64> {
        self.get(p).map(|v| hbar.get() * (v as f64).sqrt())
    }

    /// Entries outside `|p| <= q`: the zero end points of the chains.
    pub fn is_boundary(&self, p: i64) -> bool {
        p.unsigned_abs() > u64::from(self.q) || p == -i64::from(self.q)
    }
}

/// Closed form `(p + q)(q − p + 2)` on the chain `p ≡ q (mod 2)`.
pub fn even_chain_closed_form(p: i64, q: u32) -> i64 {
    let q = i64::from(q);
    (p + q) * (q - p + 2)
}

/// Runs `b(p+2) = b(p) − 4p` from `b(start) = 0` up to `end`, inclusive.
/// Errors as soon as a value turns negative.
fn propagate(start: i64, end: i64) -> Result<Vec<(i64, i64)>> {
    let mut out = vec![(start, 0i64)];
    let mut p = start;
    let mut b = 0i64;
    while p < end {
        b -= 4 * p;
        p += 2;
        if b < 0 {
            return Err(Error::Consistency(format!("recurrence gives b_sq({p}) = {b} < 0")));
        }
        out.push((p, b));
    }
    Ok(out)
}

pub fn b_coefficients(q: u32) -> Result<BCoefficients> {
    let qi = i64::from(q);
    let mut b_sq = BTreeMap::new();

    for (p, rec) in propagate(-qi, qi + 2)? {
        let closed = even_chain_closed_form(p, q);
        if closed != rec {
            return Err(Error::Consistency(format!(
                "even chain at p={p}: closed form {closed} differs from recurrence {rec}"
            )));
        }
        b_sq.insert(p, rec as u64);
    }
    if b_sq[&(qi + 2)] != 0 {
        return Err(Error::Consistency(format!("even chain does not close at p={}", qi + 2)));
    }

    if q >= 1 {
        let odd = propagate(-qi + 1, qi + 1)?;
        let (last_p, last) = *odd.last().expect("chain is nonempty");
        if last != 0 {
            return Err(Error::Consistency(format!("odd chain ends with b_sq({last_p}) = {last}, not 0")));
        }
        for (p, v) in odd {
            b_sq.insert(p, v as u64);
        }
    }
    Ok(BCoefficients { q, b_sq })
}

/// Reduced quantum operators on `H̃_q`, indexed by position `p + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOperators {
    pub q: u32,
    pub hbar: Hbar,
    pub coefficients: BCoefficients,
    pub qpt3: SparseOperator,
    pub qpt_plus: SparseOperator,
    pub qpt_minus: SparseOperator,
    pub qpt1: SparseOperator,
    pub qpt2: SparseOperator,
    pub qpt4: SparseOperator,
}

impl ReducedOperators {
    pub fn build(q: u32, hbar: Hbar) -> Result<Self> {
        let coefficients = b_coefficients(q)?;
        let h = hbar.get();
        let qi = i64::from(q);
        let dim = 2 * q as usize + 1;
        let pos = |p: i64| (p + qi) as usize;
        let coeff = |p: i64| {
            coefficients
                .b(p, hbar)
                .ok_or_else(|| Error::Consistency(format!("missing b_sq({p}) for q={q}")))
        };

        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for p in -qi..=qi {
            if p - 2 >= -qi {
                plus.push((pos(p - 2), pos(p), Complex64::new(coeff(p)?, 0.0)));
            }
            if p + 2 <= qi {
                minus.push((pos(p + 2), pos(p), Complex64::new(coeff(p + 2)?, 0.0)));
            }
        }
        let qpt_plus = SparseOperator::from_triplets(dim, dim, plus)?;
        let qpt_minus = SparseOperator::from_triplets(dim, dim, minus)?;
        let qpt1 = qpt_plus.add(&qpt_minus)?.scale_real(0.5);
        let qpt2 = qpt_plus.sub(&qpt_minus)?.scale(Complex64::new(0.0, -0.5));
        let qpt3 = SparseOperator::from_diagonal((-qi..=qi).map(|p| Complex64::new(p as f64 * h, 0.0)));
        let qpt4 = SparseOperator::identity(dim).scale_real(f64::from(q) * h);
        Ok(ReducedOperators { q, hbar, coefficients, qpt3, qpt_plus, qpt_minus, qpt1, qpt2, qpt4 })
    }

    pub fn dim(&self) -> usize {
        2 * self.q as usize + 1
    }

    pub fn su2_ops(&self) -> [SparseOperator; 3] {
        [self.qpt1.clone(), self.qpt2.clone(), self.qpt3.clone()]
    }

    /// `Q_{π̃₁}² + Q_{π̃₂}² + Q_{π̃₃}²` restricted to one parity chain.
    pub fn chain_casimir(&self, chain: Chain) -> Result<SparseOperator> {
        let idx = chain_positions(self.q, chain);
        let mut total = SparseOperator::zeros(idx.len());
        for op in [&self.qpt1, &self.qpt2, &self.qpt3] {
            let block = op.restrict(&idx)?;
            total = total.add(&block.compose(&block)?)?;
        }
        Ok(total)
    }
}

/// Residual checks of the reduced `su(2)` relations and self-adjointness.
pub fn verify_reduced_su2(ops: &ReducedOperators, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new();
    let h = ops.hbar.get();
    let minus_2ih = Complex64::new(0.0, -2.0 * h);
    let mut bracket = |name: &str, a: &SparseOperator, b: &SparseOperator, rhs: SparseOperator| match a.commutator(b) {
        Ok(lhs) => report.record_difference(name, &lhs, &rhs, tol),
        Err(_) => report.record(name, f64::INFINITY, tol),
    };
    bracket("[Q+,Q−]=−4ħQ₃", &ops.qpt_plus, &ops.qpt_minus, ops.qpt3.scale_real(-4.0 * h));
    bracket("[Qπ̃₁,Qπ̃₂]=−2iħQπ̃₃", &ops.qpt1, &ops.qpt2, ops.qpt3.scale(minus_2ih));
    bracket("[Qπ̃₂,Qπ̃₃]=−2iħQπ̃₁", &ops.qpt2, &ops.qpt3, ops.qpt1.scale(minus_2ih));
    bracket("[Qπ̃₁,Qπ̃₃]=2iħQπ̃₂", &ops.qpt1, &ops.qpt3, ops.qpt2.scale(-minus_2ih));
    report.record_difference("Qπ̃₁†=Qπ̃₁", &ops.qpt1.adjoint(), &ops.qpt1, tol);
    report.record_difference("Qπ̃₂†=Qπ̃₂", &ops.qpt2.adjoint(), &ops.qpt2, tol);
    report.record_difference("Qπ̃₃†=Qπ̃₃", &ops.qpt3.adjoint(), &ops.qpt3, tol);
    report.record_difference("Q+†=Q−", &ops.qpt_plus.adjoint(), &ops.qpt_minus, tol);
    report.record_exact("H̃⁰,H̃¹ invariant", preserves_parity(ops));
    report
}

/// Values of `p` in `H̃_q⁰` (`p ≡ q`) and in `H̃_q¹` (`p ≡ q − 1`).
pub fn decompose_parity(q: u32) -> (Vec<i64>, Vec<i64>) {
    reduced_basis(q).into_iter().map(|i| i.p()).partition(|&p| Chain::of(p, q) == Chain::EvenRelQ)
}

/// Basis positions of one chain.
pub fn chain_positions(q: u32, chain: Chain) -> Vec<usize> {
    reduced_basis(q).into_iter().filter(|i| Chain::of(i.p(), q) == chain).map(|i| i.position()).collect()
}

/// Whether every stored entry of every reduced operator joins two indices of
/// the same parity, so that both chains are invariant.
pub fn preserves_parity(ops: &ReducedOperators) -> bool {
    [&ops.qpt1, &ops.qpt2, &ops.qpt3, &ops.qpt4, &ops.qpt_plus, &ops.qpt_minus]
        .iter()
        .all(|op| op.iter().all(|(r, c, _)| (r + c) % 2 == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::bs_set_reduced;
    use crate::opcore::commutant_dimension;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn b_examples() {
        let b = b_coefficients(2).unwrap();
        assert_eq!([b.get(-2), b.get(0), b.get(2), b.get(4)], [Some(0), Some(8), Some(8), Some(0)]);
        assert_eq!(b_coefficients(1).unwrap().get(1), Some(4));
        let b3 = b_coefficients(3).unwrap();
        assert_eq!(b3.get(0), Some(8));
        assert_eq!([b3.get(-2), b3.get(2), b3.get(4)], [Some(0), Some(8), Some(0)]);
    }

    #[test]
    fn b_q0_has_only_even_chain() {
        let b = b_coefficients(0).unwrap();
        assert_eq!(b.b_sq.len(), 2);
        assert_eq!(b.get(0), Some(0));
        assert_eq!(b.get(2), Some(0));
    }

    #[test]
    fn odd_chain_independent_oracle() {
        // Direct sums: b(p) = −4 Σ_{k=-q+1, step 2}^{p-2} k.
        for q in 1..=60u32 {
            let b = b_coefficients(q).unwrap();
            let qi = i64::from(q);
            let mut p = -qi + 1;
            while p <= qi + 1 {
                let sum: i64 = ((-qi + 1)..p).step_by(2).sum();
                assert_eq!(b.get(p).unwrap() as i64, -4 * sum, "q={q} p={p}");
                p += 2;
            }
        }
    }

    #[test]
    fn even_chain_palindrome() {
        for q in 0..=50u32 {
            let b = b_coefficients(q).unwrap();
            for (&p, &v) in b.b_sq.iter().filter(|(&p, _)| Chain::of(p, q) == Chain::EvenRelQ) {
                if let Some(mirror) = b.get(2 - p) {
                    assert_eq!(v, mirror, "q={q} p={p}");
                }
            }
        }
    }

    #[test]
    fn all_q_up_to_200_consistent() {
        for q in 0..=200 {
            b_coefficients(q).unwrap();
        }
    }

    #[test]
    fn reduced_examples() {
        let ops = ReducedOperators::build(1, Hbar::default()).unwrap();
        // qpt1 ẽ_{1,1} = ħ ẽ_{-1,1}
        assert!((ops.qpt1.get(0, 2) - c(1.0, 0.0)).norm() < 1e-15);
        let ops = ReducedOperators::build(2, Hbar::default()).unwrap();
        assert_eq!(ops.qpt3.get(2, 2), c(0.0, 0.0));
        assert!((ops.qpt_minus.get(4, 2) - c(8f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn q1_gives_pauli_matrices_on_even_chain() {
        let ops = ReducedOperators::build(1, Hbar::default()).unwrap();
        let idx = chain_positions(1, Chain::EvenRelQ);
        let sx = ops.qpt1.restrict(&idx).unwrap();
        let sy = ops.qpt2.restrict(&idx).unwrap();
        let sz = ops.qpt3.restrict(&idx).unwrap();
        assert_eq!(sx.to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]));
        assert_eq!(sy.to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]));
        assert_eq!(sz.to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[c(-1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]));
    }

    #[test]
    fn verification_passes() {
        for q in [0, 1, 5, 17] {
            for hbar in [1.0, 0.5] {
                let ops = ReducedOperators::build(q, Hbar::new(hbar).unwrap()).unwrap();
                let report = verify_reduced_su2(&ops, 1e-12);
                assert!(report.all_passed(), "q={q}: {:?}", report.failures().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn q0_operators_vanish_except_qpt4() {
        let ops = ReducedOperators::build(0, Hbar::default()).unwrap();
        for op in [&ops.qpt1, &ops.qpt2, &ops.qpt3, &ops.qpt_plus, &ops.qpt_minus] {
            assert_eq!(op.nnz(), 0);
        }
        assert_eq!(ops.qpt4.nnz(), 0);
        let ops = ReducedOperators::build(3, Hbar::default()).unwrap();
        assert_eq!(ops.qpt4.get(0, 0), c(3.0, 0.0));
    }

    #[test]
    fn ladder_commutator_is_diagonal_recurrence() {
        let ops = ReducedOperators::build(7, Hbar::default()).unwrap();
        let comm = ops.qpt_plus.commutator(&ops.qpt_minus).unwrap();
        assert!(comm.is_diagonal());
        for p in -7i64..=7 {
            let i = (p + 7) as usize;
            let b = &ops.coefficients;
            let expected = b.get(p + 2).unwrap() as f64 - b.get(p).unwrap() as f64;
            assert!((comm.get(i, i).re - expected).abs() < 1e-12);
            assert!((expected + 4.0 * p as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_split() {
        assert_eq!(decompose_parity(3), (vec![-3, -1, 1, 3], vec![-2, 0, 2]));
        assert_eq!(decompose_parity(0), (vec![0], vec![]));
        for q in 0..=100 {
            let (even, odd) = decompose_parity(q);
            assert_eq!((even.len(), odd.len()), (q as usize + 1, q as usize));
        }
        assert!(preserves_parity(&ReducedOperators::build(9, Hbar::default()).unwrap()));
    }

    #[test]
    fn full_reduced_space_has_two_irreducibles() {
        for q in [2, 4] {
            let ops = ReducedOperators::build(q, Hbar::default()).unwrap();
            assert_eq!(commutant_dimension(&ops.su2_ops()).unwrap(), 2);
        }
    }

    #[test]
    fn chain_casimirs_against_dense_oracle() {
        for q in 0..=20u32 {
            let ops = ReducedOperators::build(q, Hbar::default()).unwrap();
            for chain in [Chain::EvenRelQ, Chain::OddRelQ] {
                let idx = chain_positions(q, chain);
                if idx.is_empty() {
                    continue;
                }
                let full = {
                    let d = |op: &SparseOperator| op.to_dense();
                    d(&ops.qpt1) * d(&ops.qpt1) + d(&ops.qpt2) * d(&ops.qpt2) + d(&ops.qpt3) * d(&ops.qpt3)
                };
                let scalar = full[(idx[0], idx[0])];
                let block = ops.chain_casimir(chain).unwrap().to_dense();
                for (a, &i) in idx.iter().enumerate() {
                    for (b, &j) in idx.iter().enumerate() {
                        let expected = if a == b { scalar } else { c(0.0, 0.0) };
                        assert!((block[(a, b)] - expected).norm() < 1e-10);
                        assert!((full[(i, j)] - expected).norm() < 1e-10);
                    }
                }
                let q2 = f64::from(q * q);
                let closed = match chain {
                    Chain::EvenRelQ => q2 + 2.0 * f64::from(q),
                    Chain::OddRelQ => q2 - 1.0,
                };
                assert!((scalar.re - closed).abs() < 1e-9, "q={q} {chain:?}");
            }
        }
    }

    #[test]
    fn qpt3_spectrum_matches_bs_set() {
        for q in 0..=30 {
            let ops = ReducedOperators::build(q, Hbar::default()).unwrap();
            let spec: Vec<i64> = ops.qpt3.diagonal().iter().map(|v| v.re as i64).collect();
            let bs: Vec<i64> = bs_set_reduced(q, Hbar::default()).entries.iter().map(|s| s.p).collect();
            assert_eq!(spec, bs);
        }
    }
}
