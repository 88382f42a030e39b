//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Every expected value comes from an oracle written here, independent of the
//! library code paths it checks: dense products of the z-operators, an
//! integer recurrence, dense Kronecker nullspaces, finite differences and
//! explicit rotation formulas.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bshq_cli::{execute_with, parse_args, Mutation, PiTarget, EXIT_FAILED, EXIT_OK};
use bshq_core::classical::{
    fiber_torus_actions, flow_e, hopf, hopf_fiber, invariants_pi, poisson_bracket_pi, reduced_flow_pi3,
    reduced_symplectic, symplectic_area, ClassicalState, XiEta,
};
use bshq_core::lattice::{shell_range, Hbar};
use bshq_core::opcore::{commutant_dimension, SparseOperator};
use bshq_core::osc_quant::{casimir, verify_su2_u2, OscillatorOperators};
use bshq_core::qreduction::{build_intertwiner, verify_intertwining};
use bshq_core::red_quant::{b_coefficients, decompose_parity, verify_reduced_su2, ReducedOperators};
use bshq_core::su2geo::{
    ad_action, bracket, exp, killing, momentum_j, orbit_form, SU2AlgebraElement, SU2GroupElement,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn dense(op: &SparseOperator) -> DMatrix<Complex64> {
    op.to_dense()
}

fn block(m: &DMatrix<Complex64>, idx: &[usize]) -> DMatrix<Complex64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

fn hb(h: f64) -> Hbar {
    Hbar::new(h).unwrap()
}

// ---------------------------------------------------------------------------
// Oscillator oracle: Q_{π_k} as dense products of z-operators.

fn fock_pos(m: usize, n: usize) -> usize {
    let s = m + n;
    s * (s + 1) / 2 + m
}

fn fock_dim(n_max: usize) -> usize {
    (n_max + 1) * (n_max + 2) / 2
}

/// `π₁ = ½(z₁z̄₂ + z̄₁z₂)`, `π₂ = (1/2i)(z₁z̄₂ − z̄₁z₂)`, `π₃ = ½(z̄₁z₁ − z̄₂z₂)`,
/// `π₄ = ½(z̄₁z₁ + z̄₂z₂)`, formed at cutoff `n_max + 1` and cut back to
/// `n_max`, where no truncation reaches.
fn dense_pi_oracle(n_max: usize, h: f64) -> [DMatrix<Complex64>; 4] {
    let big = n_max + 1;
    let d = fock_dim(big);
    let mut z1 = DMatrix::<f64>::zeros(d, d);
    let mut z2 = DMatrix::<f64>::zeros(d, d);
    let mut z1b = DMatrix::<f64>::zeros(d, d);
    let mut z2b = DMatrix::<f64>::zeros(d, d);
    for s in 0..=big {
        for m in 0..=s {
            let n = s - m;
            let col = fock_pos(m, n);
            if m >= 1 {
                z1[(fock_pos(m - 1, n), col)] = (2.0 * m as f64 * h).sqrt();
            }
            if n >= 1 {
                z2[(fock_pos(m, n - 1), col)] = (2.0 * n as f64 * h).sqrt();
            }
            if s < big {
                z1b[(fock_pos(m + 1, n), col)] = (2.0 * (m + 1) as f64 * h).sqrt();
                z2b[(fock_pos(m, n + 1), col)] = (2.0 * (n + 1) as f64 * h).sqrt();
            }
        }
    }
    let a = &z1 * &z2b;
    let b = &z1b * &z2;
    let n1 = &z1b * &z1;
    let n2 = &z2b * &z2;
    let k = fock_dim(n_max);
    let cut = |m: DMatrix<f64>, phase: Complex64| m.view((0, 0), (k, k)).map(|v| phase * v);
    [
        cut((&a + &b) * 0.5, c(1.0, 0.0)),
        cut((&a - &b) * 0.5, c(0.0, -1.0)),
        cut((&n1 - &n2) * 0.5, c(1.0, 0.0)),
        cut((&n1 + &n2) * 0.5, c(1.0, 0.0)),
    ]
}

// ---------------------------------------------------------------------------
// Reduced oracle: the recurrence b(p+2) = b(p) − 4p in exact integers.

fn recurrence_chain(start: i64, end: i64) -> Vec<(i64, i128)> {
    let mut out = vec![(start, 0i128)];
    let (mut p, mut b) = (start, 0i128);
    while p < end {
        b -= 4 * p as i128;
        p += 2;
        out.push((p, b));
    }
    out
}

fn oracle_b_sq(q: u32) -> BTreeMap<i64, i128> {
    let qi = i64::from(q);
    let mut map: BTreeMap<i64, i128> = recurrence_chain(-qi, qi + 2).into_iter().collect();
    if q >= 1 {
        map.extend(recurrence_chain(-qi + 1, qi + 1));
    }
    map
}

/// `(Q₊, Q₋, Q₁, Q₂, Q₃)` on `H̃_q` from the oracle coefficients.
fn dense_reduced_oracle(q: u32, h: f64) -> [DMatrix<Complex64>; 5] {
    let b = oracle_b_sq(q);
    let qi = i64::from(q);
    let d = 2 * q as usize + 1;
    let pos = |p: i64| (p + qi) as usize;
    let mut plus = DMatrix::<Complex64>::zeros(d, d);
    for p in (-qi + 2)..=qi {
        plus[(pos(p - 2), pos(p))] = c(h * (b[&p] as f64).sqrt(), 0.0);
    }
    let minus = plus.adjoint();
    let t1 = (&plus + &minus) * c(0.5, 0.0);
    let t2 = (&plus - &minus) * c(0.0, -0.5);
    let t3 = DMatrix::from_fn(d, d, |i, j| if i == j { c((i as i64 - qi) as f64 * h, 0.0) } else { c(0.0, 0.0) });
    [plus, minus, t1, t2, t3]
}

// ---------------------------------------------------------------------------
// Commutant oracle: nullity of the stacked Kronecker system.

/// Each operator here is real or purely imaginary; dropping the phase
/// leaves a real Kronecker system with the same nullity, whose normal
/// matrix is real symmetric.
fn dense_commutant(ops: &[DMatrix<Complex64>]) -> Result<usize, String> {
    let d = ops[0].nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let mut normal = DMatrix::<f64>::zeros(d * d, d * d);
    for a in ops {
        let re_zero = a.iter().all(|v| v.re == 0.0);
        let im_zero = a.iter().all(|v| v.im == 0.0);
        ensure(re_zero || im_zero, || "operator is neither real nor imaginary".into())?;
        let r = a.map(|v| if im_zero { v.re } else { v.im });
        let k = id.kronecker(&r) - r.transpose().kronecker(&id);
        normal += k.transpose() * &k;
    }
    let eig = normal.symmetric_eigen().eigenvalues;
    let top = eig.iter().copied().fold(0.0, f64::max);
    Ok(eig.iter().filter(|&&l| l <= 1e-9 * top.max(1.0)).count())
}

// ---------------------------------------------------------------------------
// Criteria.

fn c1_spectrum() -> Outcome {
    for h in [1.0, 0.5] {
        let (out, err, code) = bshq_cli::run(["bshq", "spectrum", "--nmax", "20", "--format", "csv", "--hbar", &h.to_string()]);
        ensure(code == EXIT_OK, || format!("exit {code}: {err}"))?;
        let mut lines = out.lines();
        ensure(lines.next() == Some("m,n,A1,A2,E,L"), || "bad header".into())?;
        let mut expected = Vec::new();
        for s in 0..=20i64 {
            for m in 0..=s {
                expected.push((m, s - m));
            }
        }
        let rows: Vec<&str> = lines.collect();
        ensure(rows.len() == expected.len(), || format!("{} rows, expected {}", rows.len(), expected.len()))?;
        for (row, &(m, n)) in rows.iter().zip(&expected) {
            let f: Vec<f64> = row.split(',').map(|x| x.parse::<f64>().unwrap()).collect();
            let want = [m as f64, n as f64, m as f64, n as f64, (m + n) as f64, (m - n) as f64];
            let got = [f[0], f[1], f[2] / h, f[3] / h, f[4] / h, f[5] / h];
            ensure(got == want, || format!("row {row} at ħ={h}: got {got:?}, want {want:?}"))?;
        }
    }
    Ok("231 records exact at ħ = 1 and ħ = 0.5".into())
}

fn c2_su2_u2() -> Outcome {
    let tol = 1e-12;
    let ops = OscillatorOperators::build(20, hb(1.0));
    let report = verify_su2_u2(&ops, tol);
    let wanted: Vec<_> = report.checks.iter().filter(|c| c.name.starts_with('[') || c.name.starts_with("Qπ")).collect();
    ensure(wanted.iter().filter(|c| c.name.starts_with('[')).count() >= 5, || "missing commutator checks".into())?;
    ensure(wanted.iter().filter(|c| c.name.ends_with('†') || c.name.contains("†=")).count() >= 4, || "missing adjoint checks".into())?;
    for check in &wanted {
        ensure(check.pass, || format!("{} residual {:e}", check.name, check.max_abs_residual))?;
    }

    let [p1, p2, p3, p4] = dense_pi_oracle(20, 1.0);
    let mut worst: f64 = 0.0;
    for (lib, oracle) in [(&ops.qpi1, &p1), (&ops.qpi2, &p2), (&ops.qpi3, &p3), (&ops.qpi4, &p4)] {
        worst = worst.max(max_abs(&(dense(lib) - oracle)));
    }
    ensure(worst <= tol, || format!("library Qπ differ from z-products by {worst:e}"))?;
    let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
    let two_ih = c(0.0, 2.0);
    let residuals = [
        max_abs(&(comm(&p1, &p2) + &p3 * two_ih)),
        max_abs(&(comm(&p1, &p3) - &p2 * two_ih)),
        max_abs(&(comm(&p2, &p3) + &p1 * two_ih)),
        max_abs(&comm(&p4, &p1)),
        max_abs(&comm(&p4, &p2)),
        max_abs(&(&p1 - p1.adjoint())),
        max_abs(&(&p2 - p2.adjoint())),
        max_abs(&(&p3 - p3.adjoint())),
        max_abs(&(&p4 - p4.adjoint())),
    ];
    let r = residuals.iter().copied().fold(0.0, f64::max);
    ensure(r <= tol, || format!("dense oracle relation residual {r:e}"))?;
    let lib = wanted.iter().map(|c| c.max_abs_residual).fold(0.0, f64::max);
    Ok(format!("{} checks, max residual {lib:.2e}; oracle agreement {worst:.2e}", wanted.len()))
}

fn c3_bcoeff() -> Outcome {
    for q in 0..=200u32 {
        let lib = b_coefficients(q).map_err(|e| format!("q={q}: {e}"))?;
        let oracle = oracle_b_sq(q);
        let qi = i64::from(q);
        ensure(lib.b_sq.len() == oracle.len(), || format!("q={q}: entry count"))?;
        for (&p, &v) in &oracle {
            ensure(v >= 0, || format!("q={q}: negative oracle value at p={p}"))?;
            ensure(lib.get(p).map(i128::from) == Some(v), || format!("q={q}, p={p}: library {:?}, oracle {v}", lib.get(p)))?;
            if (p - qi).rem_euclid(2) == 0 {
                let closed = i128::from((p + qi) * (qi - p + 2));
                ensure(closed == v, || format!("q={q}, p={p}: closed form {closed}, recurrence {v}"))?;
            }
        }
        if q >= 1 {
            ensure(oracle[&(qi + 1)] == 0 && lib.get(qi + 1) == Some(0), || format!("q={q}: odd chain does not close"))?;
        }
    }
    Ok("q = 0..=200 integer-exact".into())
}

fn c4_reduced() -> Outcome {
    let tol = 1e-12;
    let names = ["[Q+,Q−]=−4ħQ₃", "[Qπ̃₁,Qπ̃₂]=−2iħQπ̃₃", "[Qπ̃₂,Qπ̃₃]=−2iħQπ̃₁", "[Qπ̃₁,Qπ̃₃]=2iħQπ̃₂"];
    let mut worst: f64 = 0.0;
    for q in 0..=50u32 {
        let ops = ReducedOperators::build(q, hb(1.0)).map_err(|e| e.to_string())?;
        let report = verify_reduced_su2(&ops, tol);
        for name in names {
            let check = report.get(name).ok_or_else(|| format!("missing {name}"))?;
            ensure(check.pass, || format!("q={q}: {name} residual {:e}", check.max_abs_residual))?;
            worst = worst.max(check.max_abs_residual);
        }
        let [plus, minus, t1, t2, t3] = dense_reduced_oracle(q, 1.0);
        let oracle_gap = max_abs(&(dense(&ops.qpt_plus) - &plus)).max(max_abs(&(dense(&ops.qpt_minus) - &minus)));
        ensure(oracle_gap <= tol, || format!("q={q}: ladder operators differ from oracle by {oracle_gap:e}"))?;
        let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
        let r = [
            max_abs(&(comm(&plus, &minus) + &t3 * c(4.0, 0.0))),
            max_abs(&(comm(&t1, &t2) + &t3 * c(0.0, 2.0))),
            max_abs(&(comm(&t2, &t3) + &t1 * c(0.0, 2.0))),
            max_abs(&(comm(&t1, &t3) - &t2 * c(0.0, 2.0))),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        ensure(r <= tol, || format!("q={q}: oracle relations residual {r:e}"))?;
    }
    Ok(format!("q = 0..=50, max residual {worst:.2e}"))
}

fn c5_dimensions() -> Outcome {
    for q in 0..=100u32 {
        let (even, odd) = decompose_parity(q);
        ensure(even.len() == q as usize + 1 && odd.len() == q as usize, || format!("q={q}: dims {} and {}", even.len(), odd.len()))?;
        ensure(even.iter().all(|p| (p - i64::from(q)) % 2 == 0), || format!("q={q}: parity"))?;
        ensure(shell_range(q).len() == q as usize + 1, || format!("q={q}: shell size"))?;
    }
    let osc = OscillatorOperators::build(12, hb(1.0));
    let [p1, p2, p3, _] = dense_pi_oracle(12, 1.0);
    for q in 0..=12u32 {
        let idx: Vec<usize> = shell_range(q).collect();
        let lib_osc = commutant_dimension(&osc.shell_pi_ops(q).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let oracle_osc = dense_commutant(&[block(&p1, &idx), block(&p2, &idx), block(&p3, &idx)])?;
        ensure(lib_osc == 1 && oracle_osc == 1, || format!("H_{q}: library {lib_osc}, oracle {oracle_osc}"))?;

        let red = ReducedOperators::build(q, hb(1.0)).map_err(|e| e.to_string())?;
        let lib_red = commutant_dimension(&red.su2_ops()).map_err(|e| e.to_string())?;
        let [_, _, t1, t2, t3] = dense_reduced_oracle(q, 1.0);
        let oracle_red = dense_commutant(&[t1, t2, t3])?;
        let want = if q == 0 { 1 } else { 2 };
        ensure(lib_red == want && oracle_red == want, || format!("H̃_{q}: library {lib_red}, oracle {oracle_red}, want {want}"))?;
    }
    Ok("dims exact for q <= 100; commutants 1 and 2 for q <= 12".into())
}

fn c6_intertwining() -> Outcome {
    let tol = 1e-12;
    let osc = OscillatorOperators::build(30, hb(1.0));
    let [p1, p2, p3, p4] = dense_pi_oracle(30, 1.0);
    let mut worst: f64 = 0.0;
    for q in 0..=30u32 {
        let red = ReducedOperators::build(q, hb(1.0)).map_err(|e| e.to_string())?;
        let report = verify_intertwining(&osc, &red, tol).map_err(|e| e.to_string())?;
        ensure(report.all_passed(), || format!("q={q}: {:?}", report.failures().collect::<Vec<_>>()))?;
        let residuals = report.checks.iter().filter(|c| c.name.contains("∘I=I∘")).count();
        ensure(residuals == 5, || format!("q={q}: {residuals} intertwining checks"))?;

        let d = 2 * q as usize + 1;
        let i_dense = DMatrix::from_fn(d, q as usize + 1, |r, col| if r == 2 * col { c(1.0, 0.0) } else { c(0.0, 0.0) });
        ensure(dense(&build_intertwiner(q).matrix) == i_dense, || format!("q={q}: intertwiner matrix"))?;
        let [_, _, t1, t2, t3] = dense_reduced_oracle(q, 1.0);
        let t4 = DMatrix::<Complex64>::identity(d, d) * c(f64::from(q), 0.0);
        let idx: Vec<usize> = shell_range(q).collect();
        for (t, p) in [(&t1, &p1), (&t2, &p2), (&t3, &p3), (&t4, &p4)] {
            worst = worst.max(max_abs(&(t * &i_dense - &i_dense * block(p, &idx))));
        }
        ensure(worst <= tol, || format!("q={q}: oracle intertwining residual {worst:e}"))?;
        for (m, &(from, to)) in build_intertwiner(q).forward.iter().enumerate() {
            ensure(from.m as usize == m && to.p() == 2 * m as i64 - i64::from(q), || format!("q={q}: forward map"))?;
        }
    }
    Ok(format!("q = 0..=30, oracle residual {worst:.2e}"))
}

fn c7_casimir() -> Outcome {
    let tol = 1e-10;
    let ops = OscillatorOperators::build(20, hb(1.0));
    let [p1, p2, p3, _] = dense_pi_oracle(20, 1.0);
    let sum = &p1 * &p1 + &p2 * &p2 + &p3 * &p3;
    let mut worst: f64 = 0.0;
    for q in 0..=20u32 {
        let idx: Vec<usize> = shell_range(q).collect();
        let oracle = block(&sum, &idx);
        let scalar = oracle[(0, 0)];
        let id = DMatrix::<Complex64>::identity(idx.len(), idx.len());
        let spread = max_abs(&(&oracle - &id * scalar));
        ensure(spread <= tol, || format!("H_{q}: oracle block is not scalar ({spread:e})"))?;
        let lib = dense(&casimir(&ops, q).map_err(|e| e.to_string())?);
        let r = max_abs(&(lib - id * scalar));
        ensure(r <= tol, || format!("H_{q}: library Casimir differs from oracle scalar {scalar} by {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("q = 0..=20, max residual {worst:.2e}"))
}

fn poly(k: usize, a: [f64; 4]) -> f64 {
    let [x1, x2, e1, e2] = a;
    match k {
        1 => x1 * x2 + e1 * e2,
        2 => x1 * e2 - x2 * e1,
        3 => 0.5 * (x1 * x1 + e1 * e1 - x2 * x2 - e2 * e2),
        _ => 0.5 * (x1 * x1 + e1 * e1 + x2 * x2 + e2 * e2),
    }
}

fn fd_bracket(i: usize, j: usize, a: [f64; 4], h: f64) -> f64 {
    let grad = |k: usize| {
        let mut g = [0.0; 4];
        for (t, slot) in g.iter_mut().enumerate() {
            let (mut up, mut down) = (a, a);
            up[t] += h;
            down[t] -= h;
            *slot = (poly(k, up) - poly(k, down)) / (2.0 * h);
        }
        g
    };
    let (f, g) = (grad(i), grad(j));
    f[0] * g[2] - f[2] * g[0] + f[1] * g[3] - f[3] * g[1]
}

fn c8_poisson() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let at = invariants_pi(XiEta::new(a[0], a[1], a[2], a[3]));
        for i in 1..=4 {
            for j in 1..=4 {
                let table = poisson_bracket_pi(i, j, &at).map_err(|e| e.to_string())?;
                worst = worst.max((table - fd_bracket(i, j, a, 1e-5)).abs());
            }
        }
    }
    ensure(worst <= 1e-6, || format!("max residual {worst:e}"))?;
    Ok(format!("16 pairs at 1000 points, max residual {worst:.2e}"))
}

fn c9_hopf() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut inv, mut plane, mut torus, mut period): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let s = ClassicalState::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let z = s.to_xi_eta();
        let e = 0.5 * z.to_array().iter().map(|v| v * v).sum::<f64>();
        let t = rng.gen_range(-20.0..20.0);
        let before = hopf(z, e).map_err(|e| e.to_string())?;
        let after = hopf(flow_e(t, s).to_xi_eta(), e).map_err(|e| e.to_string())?;
        inv = inv.max((after - before).amax());

        let e = rng.gen_range(0.1..5.0);
        let dir = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if dir.norm() < 1e-3 {
            continue;
        }
        let pi = dir.normalize() * e;
        let (p1, p2, p3) = (pi[0], pi[1], pi[2]);
        let mut sampled = Vec::new();
        for k in 0..8 {
            let w = hopf_fiber(pi, e, f64::from(k) * TAU / 8.0 + rng.gen_range(0.0..1.0)).map_err(|e| e.to_string())?;
            let [x1, x2] = w.xi;
            let [e1, e2] = w.eta;
            plane = plane
                .max((p1 * x1 - p2 * e1 - (e + p3) * x2).abs())
                .max((p2 * x1 + p1 * e1 - (e + p3) * e2).abs());
            sampled.push((0.5 * (x1 * x1 + e1 * e1), 0.5 * (x2 * x2 + e2 * e2)));
        }
        let (a1, a2) = fiber_torus_actions(p3, e).map_err(|e| e.to_string())?;
        for (b1, b2) in sampled {
            torus = torus.max((a1 - b1).abs()).max((a2 - b2).abs());
        }
        let t = rng.gen_range(-10.0..10.0);
        period = period.max((reduced_flow_pi3(t + PI, pi) - reduced_flow_pi3(t, pi)).amax());
    }
    ensure(inv <= 1e-12, || format!("hopf∘flow_E residual {inv:e}"))?;
    ensure(plane <= 1e-10, || format!("plane residual {plane:e}"))?;
    ensure(torus <= 1e-10, || format!("torus action residual {torus:e}"))?;
    ensure(period <= 1e-10, || format!("period residual {period:e}"))?;
    // The period is π and not shorter: a quarter period moves a generic point.
    let probe = Vector3::new(1.0, 0.0, 0.0);
    ensure((reduced_flow_pi3(PI / 2.0, probe) - probe).norm() > 1.0, || "flow is trivial".into())?;
    Ok(format!("fiber {inv:.1e}, plane {plane:.1e}, torus {torus:.1e}, period {period:.1e}"))
}

fn c10_area() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in [1u32, 2, 5] {
        for h in [1.0, 0.3] {
            let e = f64::from(q) * h;
            let want = TAU * e;
            let lib = symplectic_area(e, 200, 200).map_err(|e| e.to_string())?;
            // Oracle: ω_e = vol/(2e) on the round sphere of radius e,
            // integrated in (θ, φ) by the midpoint rule.
            let n = 200;
            let (dt, dp) = (PI / n as f64, TAU / n as f64);
            let mut oracle = 0.0;
            for i in 0..n {
                let th = (i as f64 + 0.5) * dt;
                oracle += n as f64 * e * e * th.sin() * dt * dp / (2.0 * e);
            }
            let r = ((lib - want) / want).abs().max(((oracle - want) / want).abs());
            ensure(r <= 1e-4, || format!("q={q}, ħ={h}: library {lib}, oracle {oracle}, want {want}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("40000 cells, max relative error {worst:.2e}"))
}

fn alg(v: Vector3<f64>) -> SU2AlgebraElement {
    let (x, y, z) = (v[0], v[1], v[2]);
    SU2AlgebraElement::new(Matrix2::new(c(0.0, z), c(-y, x), c(y, x), c(0.0, -z))).unwrap()
}

fn jv(u: &SU2AlgebraElement) -> Vector3<f64> {
    let m = u.matrix();
    Vector3::new(m[(1, 0)].im, m[(1, 0)].re, m[(0, 0)].im)
}

fn rodrigues(w: Vector3<f64>) -> Matrix3<f64> {
    let angle = w.norm();
    if angle == 0.0 {
        return Matrix3::identity();
    }
    let k = w / angle;
    let kx = Matrix3::new(0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

fn rv(rng: &mut ChaCha8Rng, r: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn c11_su2_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = [0.0f64; 5];
    for _ in 0..1000 {
        let (a, b) = (rv(&mut rng, 2.0), rv(&mut rng, 2.0));
        let (u, v) = (alg(a), alg(b));
        worst[0] = worst[0].max((jv(&bracket(&u, &v)) - 2.0 * a.cross(&b)).amax());
        worst[1] = worst[1].max((killing(&u, &v) - a.dot(&b)).abs());
        worst[2] = worst[2].max((jv(&ad_action(&exp(&u), &v)) - rodrigues(2.0 * a) * b).amax());

        let (w1, w2) = (rv(&mut rng, 1.0), rv(&mut rng, 1.0));
        let (alpha, beta) = (c(w1[0], w1[1]), c(w2[0], w2[1]));
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        let g = SU2GroupElement::from_alpha_beta(alpha / norm, beta / norm).map_err(|e| e.to_string())?;
        let mut r = Matrix3::zeros();
        for k in 0..3 {
            r.set_column(k, &jv(&ad_action(&g, &alg(Vector3::ith(k, 1.0)))));
        }
        let (zv, zw) = (rv(&mut rng, 2.0), rv(&mut rng, 2.0));
        let z = [c(zv[0], zv[1]), c(zw[0], zw[1])];
        let jz = {
            let p = z[0] * z[1].conj();
            Vector3::new(p.re, p.im, 0.5 * (z[0].norm_sqr() - z[1].norm_sqr()))
        };
        worst[3] = worst[3].max((momentum_j(g.apply(z)) - r * jz).amax()).max((momentum_j(z) - jz).amax());

        let e = rng.gen_range(0.2..4.0);
        let dir = rv(&mut rng, 1.0);
        if dir.norm() < 1e-3 {
            continue;
        }
        let x = dir.normalize() * e;
        let (y, y2) = (rv(&mut rng, 2.0), rv(&mut rng, 2.0));
        let lhs = orbit_form(x, y, y2, e).map_err(|e| e.to_string())?;
        let rhs = reduced_symplectic(x, x.cross(&y), x.cross(&y2), e).map_err(|e| e.to_string())?;
        worst[4] = worst[4].max((lhs - rhs).abs()).max((lhs + 0.5 * x.dot(&y.cross(&y2))).abs());
    }
    let labels = ["bracket", "Killing", "Ad/rotation", "equivariance", "orbit form"];
    for (label, w) in labels.iter().zip(worst) {
        ensure(w <= 1e-10, || format!("{label} residual {w:e}"))?;
    }
    Ok(labels.iter().zip(worst).map(|(l, w)| format!("{l} {w:.1e}")).collect::<Vec<_>>().join(", "))
}

fn c12_end_to_end() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_bshq")).args(["verify", "all"]).output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(EXIT_OK), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    ensure(report["summary"]["failed"] == 0, || "summary reports failures".into())?;

    // Every nonzero entry of every π-operator at a small cutoff, then a
    // seeded sample at the default cutoff.
    let small = parse_args(["bshq", "verify", "all", "--nmax", "5", "--q", "5"]).map_err(|e| e.to_string())?;
    let default = parse_args(["bshq", "verify", "all"]).map_err(|e| e.to_string())?;
    let mut mutations = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (inv, n_max) in [(small, 5u32), (default, 20)] {
        let ops = OscillatorOperators::build(n_max, hb(1.0));
        for target in PiTarget::ALL {
            let nonzero: Vec<usize> =
                target.select(&ops).iter().enumerate().filter(|(_, (_, _, v))| v.norm() > 0.0).map(|(k, _)| k).collect();
            let entries: Vec<usize> = if n_max == 5 {
                nonzero
            } else {
                (0..25).map(|_| nonzero[rng.gen_range(0..nonzero.len())]).collect()
            };
            for entry in entries {
                let outcome = execute_with(&inv, Some(Mutation { target, entry })).map_err(|e| e.to_string())?;
                ensure(outcome.exit_code == EXIT_FAILED, || format!("{target:?} entry {entry} at n_max={n_max} went undetected"))?;
                mutations += 1;
            }
        }
    }
    Ok(format!("verify all exit 0 in {:.2} s; {mutations} sign flips all exit 1", elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "joint spectrum", 1, c1_spectrum),
        (2, "su(2)/u(2) identities", 10, c2_su2_u2),
        (3, "b_p algebra", 1, c3_bcoeff),
        (4, "reduced su(2)", 10, c4_reduced),
        (5, "decomposition dimensions", 30, c5_dimensions),
        (6, "intertwining", 5, c6_intertwining),
        (7, "Casimir block scalars", 5, c7_casimir),
        (8, "Poisson table", 5, c8_poisson),
        (9, "Hopf geometry", 5, c9_hopf),
        (10, "prequantization area", 5, c10_area),
        (11, "su(2) geometry identities", 5, c11_su2_geometry),
        (12, "end to end", 600, c12_end_to_end),
    ];
    let mut failed = 0;
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let (status, detail) = match (&result, in_time) {
            (Ok(msg), true) => ("PASS", msg.clone()),
            (Ok(msg), false) => ("FAIL", format!("{msg}; over the {limit} s budget")),
            (Err(msg), _) => ("FAIL", msg.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {id:>2} {title} [{:.3} s / {limit} s]: {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
