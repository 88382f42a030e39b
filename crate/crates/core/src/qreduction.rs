//! The intertwiner `I_q⁰ : H_q → H̃_q⁰` between the oscillator shell of
//! energy `qħ` and the even parity chain of the reduced space, and the
//! resulting multiplicity count: reduction after quantization reproduces
//! `H̃_q⁰` exactly, while `H̃_q¹` only appears when quantizing after
//! reduction.

use num_complex::Complex64;
use serde::Serialize;

use crate::lattice::{shell_range, Chain, FockIndex, Hbar, ReducedIndex};
use crate::opcore::{commutant_dimension, SparseOperator, VerificationReport};
use crate::osc_quant::OscillatorOperators;
use crate::red_quant::{decompose_parity, ReducedOperators};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub q: u32,
    /// `e_{m,q−m} ↦ ẽ_{2m−q,q}` for `m = 0..=q`.
    pub forward: Vec<(FockIndex, ReducedIndex)>,
    /// `(2q+1) × (q+1)` matrix with 0/1 entries. Columns follow the shell
    /// order of `H_q`, rows the reduced basis order.
    pub matrix: SparseOperator,
}

impl Intertwiner {
    pub fn build(q: u32) -> Self {
        let forward: Vec<_> = (0..=q)
            .map(|m| {
                let from = FockIndex::new(m, q - m);
                let to = ReducedIndex::new(2 * i64::from(m) - i64::from(q), q).expect("|2m − q| <= q");
                (from, to)
            })
            .collect();
        let one = Complex64::new(1.0, 0.0);
        let matrix = SparseOperator::from_triplets(
            2 * q as usize + 1,
            q as usize + 1,
            forward.iter().map(|(from, to)| (to.position(), from.m as usize, one)),
        )
        .expect("indices lie inside the two bases");
        Intertwiner { q, forward, matrix }
    }

    pub fn apply(&self, idx: FockIndex) -> Result<ReducedIndex> {
        if idx.shell() != self.q {
            return Err(Error::domain(format!("e_{{{},{}}} is not in H_{}", idx.m, idx.n, self.q)));
        }
        Ok(self.forward[idx.m as usize].1)
    }

    /// `ẽ_{p,q} ↦ e_{(p+q)/2, (q−p)/2}` on the even chain.
    pub fn inverse(&self, idx: ReducedIndex) -> Result<FockIndex> {
        if idx.q() != self.q || Chain::of(idx.p(), idx.q()) != Chain::EvenRelQ {
            return Err(Error::domain(format!("ẽ_{{{},{}}} is not in the image of I_{}", idx.p(), idx.q(), self.q)));
        }
        let q = i64::from(self.q);
        Ok(FockIndex::new(((idx.p() + q) / 2) as u32, ((q - idx.p()) / 2) as u32))
    }
}

pub fn build_intertwiner(q: u32) -> Intertwiner {
    Intertwiner::build(q)
}

/// Checks `Q_{π̃_j} ∘ I = I ∘ Q_{π_j}|_{H_q}` for `j = 1, 2, 3`,
/// `Q_{π̃₄} ∘ I = I ∘ Q_E|_{H_q}` and `Q_{π̃₃} ∘ I = I ∘ Q_L|_{H_q}`, plus
/// exact round trips of the basis maps.
pub fn verify_intertwining(
    osc: &OscillatorOperators,
    red: &ReducedOperators,
    tol: f64,
) -> Result<VerificationReport> {
    let q = red.q;
    if osc.n_max < q {
        return Err(Error::domain(format!("oscillator cutoff {} is below q = {q}", osc.n_max)));
    }
    let inter = Intertwiner::build(q);
    let shell: Vec<usize> = shell_range(q).collect();
    let mut report = VerificationReport::new();
    let pairs = [
        ("Qπ̃₁∘I=I∘Qπ₁", &red.qpt1, &osc.qpi1),
        ("Qπ̃₂∘I=I∘Qπ₂", &red.qpt2, &osc.qpi2),
        ("Qπ̃₃∘I=I∘Qπ₃", &red.qpt3, &osc.qpi3),
        ("Qπ̃₄∘I=I∘QE", &red.qpt4, &osc.qe),
        ("Qπ̃₃∘I=I∘QL", &red.qpt3, &osc.ql),
    ];
    for (name, reduced, oscillator) in pairs {
        let lhs = reduced.compose(&inter.matrix)?;
        let rhs = inter.matrix.compose(&oscillator.restrict(&shell)?)?;
        report.record_difference(name, &lhs, &rhs, tol);
    }

    let round_trip = inter.forward.iter().all(|&(from, to)| inter.inverse(to) == Ok(from));
    report.record_exact("I⁻¹∘I=id", round_trip);
    let (even, _) = decompose_parity(q);
    let onto = even.len() == inter.forward.len()
        && even.iter().all(|&p| {
            let idx = ReducedIndex::new(p, q).expect("p from the basis");
            inter.inverse(idx).and_then(|f| inter.apply(f)) == Ok(idx)
        });
    report.record_exact("I∘I⁻¹=id on H̃⁰", onto);
    let gram = inter.matrix.adjoint().compose(&inter.matrix)?;
    report.record_exact("I†I=id", gram == SparseOperator::identity(q as usize + 1));
    Ok(report)
}

/// One row of the multiplicity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[allow(non_snake_case)]
pub struct MultiplicityRow {
    pub q: u32,
    pub dim_Hq: usize,
    /// Matched with `H_q` through the intertwiner.
    pub dim_Hq0: usize,
    /// Present only in reduced quantization.
    pub dim_Hq1: usize,
    pub commutant_Hq: usize,
    pub commutant_Hqtilde: usize,
}

impl MultiplicityRow {
    pub fn has_surplus(&self) -> bool {
        self.dim_Hq1 > 0
    }
}

pub fn multiplicity_row(q: u32, hbar: Hbar) -> Result<MultiplicityRow> {
    let osc = OscillatorOperators::build(q, hbar);
    let red = ReducedOperators::build(q, hbar)?;
    let inter = Intertwiner::build(q);
    let (even, odd) = decompose_parity(q);
    let matched = inter.forward.len();
    if matched != even.len() {
        return Err(Error::Consistency(format!("intertwiner image has {matched} vectors, H̃⁰ has {}", even.len())));
    }
    Ok(MultiplicityRow {
        q,
        dim_Hq: shell_range(q).len(),
        dim_Hq0: matched,
        dim_Hq1: odd.len(),
        commutant_Hq: commutant_dimension(&osc.shell_pi_ops(q)?)?,
        commutant_Hqtilde: commutant_dimension(&red.su2_ops())?,
    })
}

pub fn multiplicity_report(n_max: u32, hbar: Hbar) -> Result<Vec<MultiplicityRow>> {
    (0..=n_max).map(|q| multiplicity_row(q, hbar)).collect()
}
