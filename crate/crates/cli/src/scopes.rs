//! The verification scopes run by `bshq verify`.
//!
//! Each scope returns one [`VerificationReport`]. Per-shell and per-`q` work
//! runs in parallel and is merged in index order, so reports are identical
//! from run to run. Randomised trials draw from a ChaCha8 stream keyed by
//! the configured seed and the scope.

use std::f64::consts::{PI, TAU};

use clap::ValueEnum;
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use bshq_core::classical::{
    classify, energy_momentum, fd_bracket_pi, fiber_plane_residuals, fiber_torus_actions, flow_e, flow_l,
    from_action_angle, hopf, hopf_fiber, invariants_pi, poisson_bracket_pi, pullback_residual, reduced_field,
    reduced_flow_pi3, reduced_symplectic, symplectic_area, ActionAngle, ClassicalState, Leaf, Stratum, XiEta,
};
use bshq_core::lattice::{bs_set_oscillator, bs_set_reduced, Chain};
use bshq_core::opcore::{commutant_dimension, SparseOperator, VerificationReport};
use bshq_core::osc_quant::{block_decompose, casimir, joint_spectrum, reassemble, verify_su2_u2, OscillatorOperators};
use bshq_core::qreduction::verify_intertwining;
use bshq_core::red_quant::{decompose_parity, verify_reduced_su2, ReducedOperators};
use bshq_core::su2geo::{
    ad_action, basis, bracket, c2_from_xi_eta, exp, hermitian_form, j_inv, j_map, killing, momentum_j, orbit_form,
    rotation_of, rotation_of_group, SU2AlgebraElement,
};

use crate::{CliError, RunConfig};

/// Shells and orbit labels up to this size get a commutant-dimension check.
pub const COMMUTANT_LIMIT: u32 = 12;
/// Number of random points per randomised identity.
pub const TRIALS: usize = 1000;
/// Tolerance for brackets computed by central differences.
pub const FD_TOL: f64 = 1e-6;
/// Step of the central differences.
pub const FD_STEP: f64 = 1e-5;
/// Relative tolerance of the area quadrature.
pub const QUAD_TOL: f64 = 1e-4;
/// Grid of the area quadrature, per angle.
pub const QUAD_CELLS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Oscillator,
    Reduced,
    Intertwine,
    Classical,
    Su2,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiTarget {
    Qpi1,
    Qpi2,
    Qpi3,
    Qpi4,
}

impl PiTarget {
    pub const ALL: [PiTarget; 4] = [PiTarget::Qpi1, PiTarget::Qpi2, PiTarget::Qpi3, PiTarget::Qpi4];

    pub fn select(self, ops: &OscillatorOperators) -> &SparseOperator {
        match self {
            PiTarget::Qpi1 => &ops.qpi1,
            PiTarget::Qpi2 => &ops.qpi2,
            PiTarget::Qpi3 => &ops.qpi3,
            PiTarget::Qpi4 => &ops.qpi4,
        }
    }

    fn select_mut(self, ops: &mut OscillatorOperators) -> &mut SparseOperator {
        match self {
            PiTarget::Qpi1 => &mut ops.qpi1,
            PiTarget::Qpi2 => &mut ops.qpi2,
            PiTarget::Qpi3 => &mut ops.qpi3,
            PiTarget::Qpi4 => &mut ops.qpi4,
        }
    }
}

/// Sign flip of the `entry`-th stored element (row-major order) of one
/// `Q_{π_k}`, applied to every oscillator operator set a run builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mutation {
    pub target: PiTarget,
    pub entry: usize,
}

impl Mutation {
    pub fn apply(&self, ops: &mut OscillatorOperators) -> Result<(), CliError> {
        let op = self.target.select_mut(ops);
        let (r, c, v) = op
            .iter()
            .nth(self.entry)
            .ok_or_else(|| CliError::Internal(format!("mutation entry {} is out of range", self.entry)))?;
        *op = op.clone().with_entry(r, c, -v)?;
        Ok(())
    }
}

fn oscillator_ops(n_max: u32, cfg: &RunConfig, mutation: Option<Mutation>) -> Result<OscillatorOperators, CliError> {
    let mut ops = OscillatorOperators::build(n_max, cfg.hbar());
    if let Some(m) = mutation {
        m.apply(&mut ops)?;
    }
    Ok(ops)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn merge_all(parts: Vec<VerificationReport>) -> VerificationReport {
    parts.into_iter().fold(VerificationReport::new(), |mut acc, r| {
        acc.merge(r);
        acc
    })
}

pub fn run_scope(scope: Scope, cfg: &RunConfig, mutation: Option<Mutation>) -> Result<VerificationReport, CliError> {
    match scope {
        Scope::Oscillator => oscillator(cfg, mutation),
        Scope::Reduced => reduced(cfg),
        Scope::Intertwine => intertwine(cfg, mutation),
        Scope::Classical => Ok(classical(cfg)),
        Scope::Su2 => Ok(su2(cfg)),
        Scope::All => {
            let parts: Vec<Result<VerificationReport, CliError>> =
                [Scope::Oscillator, Scope::Reduced, Scope::Intertwine, Scope::Classical, Scope::Su2]
                    .into_par_iter()
                    .map(|s| run_scope(s, cfg, mutation))
                    .collect();
            Ok(merge_all(parts.into_iter().collect::<Result<_, _>>()?))
        }
    }
}

fn oscillator(cfg: &RunConfig, mutation: Option<Mutation>) -> Result<VerificationReport, CliError> {
    let tol = cfg.tol;
    let h = cfg.hbar;
    let ops = oscillator_ops(cfg.n_max, cfg, mutation)?;
    let mut report = verify_su2_u2(&ops, tol);
    report.record_difference("Qπ₃=QL", &ops.qpi3, &ops.ql, tol);
    report.record_difference("Qπ₄=QE", &ops.qpi4, &ops.qe, tol);
    report.record_difference("QE=QA₁+QA₂", &ops.qe, &ops.qa1.add(&ops.qa2)?, tol);
    report.record_difference("QL=QA₁−QA₂", &ops.ql, &ops.qa1.sub(&ops.qa2)?, tol);

    let lattice = bs_set_oscillator(cfg.n_max, cfg.hbar());
    let spectrum_exact = joint_spectrum(&ops).is_ok_and(|spec| {
        spec.len() == lattice.len()
            && spec.iter().zip(&lattice).all(|(rec, &(a1, a2))| {
                let (m, n) = (i64::from(rec.m), i64::from(rec.n));
                rec.A1 == a1
                    && rec.A2 == a2
                    && (rec.A1 / h).round() as i64 == m
                    && (rec.A2 / h).round() as i64 == n
                    && (rec.E / h).round() as i64 == m + n
                    && (rec.L / h).round() as i64 == m - n
                    && ((rec.E / h) - (m + n) as f64).abs() <= tol
                    && ((rec.L / h) - (m - n) as f64).abs() <= tol
            })
    });
    report.record_exact("joint spectrum = {(mħ, nħ)}", spectrum_exact);

    let blocks_ok = [&ops.qpi1, &ops.qpi2, &ops.qpi3, &ops.qpi4].iter().all(|op| {
        block_decompose(op, cfg.n_max).and_then(|b| reassemble(&b)).is_ok_and(|back| &back == *op)
    });
    report.record_exact("⊕_N blocks reassemble Qπ_k", blocks_ok);

    let shells: Vec<Result<VerificationReport, CliError>> = (0..=cfg.n_max)
        .into_par_iter()
        .map(|n| {
            let mut r = VerificationReport::new();
            let c = casimir(&ops, n)?;
            let scalar = h * h * f64::from(n) * f64::from(n + 2);
            r.record_difference("Casimir on H_N = ħ²N(N+2)", &c, &SparseOperator::identity(n as usize + 1).scale_real(scalar), tol);
            if n <= COMMUTANT_LIMIT {
                let dim = commutant_dimension(&ops.shell_pi_ops(n)?)?;
                r.record("commutant(H_N) = 1", (dim as f64 - 1.0).abs(), 0.0);
            }
            Ok(r)
        })
        .collect();
    report.merge(merge_all(shells.into_iter().collect::<Result<_, _>>()?));
    Ok(report)
}

fn reduced(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    let tol = cfg.tol;
    let h = cfg.hbar;
    let parts: Vec<Result<VerificationReport, CliError>> = (0..=cfg.q)
        .into_par_iter()
        .map(|q| {
            let ops = ReducedOperators::build(q, cfg.hbar())?;
            let mut r = verify_reduced_su2(&ops, tol);
            let qf = f64::from(q);
            for (chain, scalar, name) in [
                (Chain::EvenRelQ, qf * (qf + 2.0), "Casimir on H̃⁰ = ħ²q(q+2)"),
                (Chain::OddRelQ, qf * qf - 1.0, "Casimir on H̃¹ = ħ²(q²−1)"),
            ] {
                let c = ops.chain_casimir(chain)?;
                r.record_difference(name, &c, &SparseOperator::identity(c.dim()).scale_real(h * h * scalar), tol);
            }
            let (even, odd) = decompose_parity(q);
            r.record_exact("dim H̃⁰ = q+1, dim H̃¹ = q", even.len() == q as usize + 1 && odd.len() == q as usize);
            let bs: Vec<i64> = bs_set_reduced(q, cfg.hbar()).entries.iter().map(|s| s.p).collect();
            let spec: Vec<i64> = ops.qpt3.diagonal().iter().map(|v| (v.re / h).round() as i64).collect();
            let spec_close = ops.qpt3.diagonal().iter().zip(&bs).all(|(v, &p)| (v.re / h - p as f64).abs() <= tol);
            r.record_exact("spec Qπ̃₃ = {pħ : |p| ≤ q}", ops.qpt3.is_diagonal() && spec == bs && spec_close);
            if q <= COMMUTANT_LIMIT {
                let expected = if q == 0 { 1.0 } else { 2.0 };
                let dim = commutant_dimension(&ops.su2_ops())?;
                r.record("commutant(H̃_q) = 2", (dim as f64 - expected).abs(), 0.0);
            }
            Ok(r)
        })
        .collect();
    Ok(merge_all(parts.into_iter().collect::<Result<_, _>>()?))
}

fn intertwine(cfg: &RunConfig, mutation: Option<Mutation>) -> Result<VerificationReport, CliError> {
    let osc = oscillator_ops(cfg.n_max.max(cfg.q), cfg, mutation)?;
    let parts: Vec<Result<VerificationReport, CliError>> = (0..=cfg.q)
        .into_par_iter()
        .map(|q| {
            let red = ReducedOperators::build(q, cfg.hbar())?;
            Ok(verify_intertwining(&osc, &red, cfg.tol)?)
        })
        .collect();
    Ok(merge_all(parts.into_iter().collect::<Result<_, _>>()?))
}

fn random_sphere_point(rng: &mut ChaCha8Rng, e: f64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (e / n);
        }
    }
}

fn random_xi_eta(rng: &mut ChaCha8Rng) -> XiEta {
    XiEta::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v.abs()) })
}

fn classical(cfg: &RunConfig) -> VerificationReport {
    let tol = cfg.tol;
    let mut rng = rng_for(cfg.seed, 1);
    let mut r = VerificationReport::new();

    let (mut em, mut pull) = (0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let aa = ActionAngle::new(rng.gen_range(0.05..4.0), rng.gen_range(0.05..4.0), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU))
            .expect("positive actions");
        let s = from_action_angle(aa).expect("positive actions");
        let (e, l) = energy_momentum(s);
        em = em.max(max_abs([e - (aa.a1 + aa.a2), l - (aa.a1 - aa.a2)]));
        pull = pull.max(pullback_residual(aa).unwrap_or(f64::INFINITY));
    }
    r.record("EM∘from_action_angle = (A₁+A₂, A₁−A₂)", em, tol);
    r.record("action-angle chart pulls ω back to Ω", pull, tol);

    let strata = [
        (ClassicalState::new(0.0, 0.0, 0.0, 0.0), Stratum::V0, Leaf::Point),
        (from_action_angle(ActionAngle { a1: 1.3, a2: 0.0, th1: 0.4, th2: 0.0 }).expect("valid"), Stratum::V1, Leaf::Circle),
        (from_action_angle(ActionAngle { a1: 0.0, a2: 0.7, th1: 0.0, th2: 2.0 }).expect("valid"), Stratum::V1, Leaf::Circle),
        (from_action_angle(ActionAngle { a1: 0.5, a2: 0.7, th1: 1.0, th2: 2.0 }).expect("valid"), Stratum::V2, Leaf::Torus2),
    ];
    let strata_ok = strata.iter().all(|&(s, st, leaf)| {
        let (e, l) = energy_momentum(s);
        classify(e, l).is_ok_and(|tag| tag.stratum == st && tag.leaf == leaf)
    });
    r.record_exact("Whitney strata V₀, V₁, V₂", strata_ok);

    let (mut fd, mut relation) = (0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let s = random_xi_eta(&mut rng);
        let inv = invariants_pi(s);
        relation = relation.max(inv.relation_residual() / inv.pi4.max(1.0).powi(2));
        for i in 1..=4 {
            for j in 1..=4 {
                let table = poisson_bracket_pi(i, j, &inv).unwrap_or(f64::NAN);
                let numeric = fd_bracket_pi(i, j, s, FD_STEP).unwrap_or(f64::NAN);
                fd = max_abs([fd, table - numeric]);
            }
        }
    }
    r.record("{π_i,π_j} table = finite differences", fd, FD_TOL);
    r.record("π₁²+π₂²+π₃² = π₄² (relative)", relation, tol);

    let (mut fiber_inv, mut flows, mut em_flow) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let z = random_xi_eta(&mut rng);
        let s = z.to_state();
        let t = rng.gen_range(-10.0..10.0);
        let e = 0.5 * z.norm_sq();
        let moved = flow_e(t, s);
        let delta = hopf(z, e).and_then(|a| hopf(moved.to_xi_eta(), e).map(|b| (a - b).amax()));
        fiber_inv = max_abs([fiber_inv, delta.unwrap_or(f64::NAN)]);
        let (e0, l0) = energy_momentum(s);
        for m in [moved, flow_l(t, s)] {
            let (e1, l1) = energy_momentum(m);
            em_flow = max_abs([em_flow, e1 - e0, l1 - l0]);
        }
        let back = [flow_e(TAU, s), flow_l(TAU, s)];
        flows = max_abs(back.iter().flat_map(|b| b.to_array().into_iter().zip(s.to_array()).map(|(a, c)| a - c)).chain([flows]));
    }
    r.record("hopf∘flow_E = hopf", fiber_inv, tol);
    r.record("E, L invariant under flow_E, flow_L", em_flow, tol);
    r.record("flow_E(2π) = flow_L(2π) = id", flows, tol);

    let (mut plane, mut over, mut torus) = (0.0f64, 0.0f64, 0.0f64);
    let (mut period, mut hamiltonian, mut tangency) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..TRIALS {
        let e = rng.gen_range(0.1..5.0);
        let pi = random_sphere_point(&mut rng, e);
        let t = rng.gen_range(0.0..TAU);
        match hopf_fiber(pi, e, t) {
            Ok(s) => {
                plane = max_abs(fiber_plane_residuals(pi, e, s).into_iter().chain([plane]));
                let image = hopf(s, e).map(|p| (p - pi).amax()).unwrap_or(f64::NAN);
                over = max_abs([over, image, s.norm_sq() - 2.0 * e]);
                let l = pi[2];
                let (a1, a2) = fiber_torus_actions(l, e).unwrap_or((f64::NAN, f64::NAN));
                let (b1, b2) = s.actions();
                torus = max_abs([torus, a1 - b1, a2 - b2]);
            }
            Err(_) => plane = f64::NAN,
        }
        let tt = rng.gen_range(-5.0..5.0);
        period = max_abs([period, (reduced_flow_pi3(tt + PI, pi) - reduced_flow_pi3(tt, pi)).amax(), (reduced_flow_pi3(PI, pi) - pi).amax()]);
        let u = pi.cross(&Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let x = reduced_field(|_| Vector3::z(), pi);
        let lhs = reduced_symplectic(pi, x, u, e).unwrap_or(f64::NAN);
        hamiltonian = max_abs([hamiltonian, lhs + u[2]]);
        let xk = reduced_field(|p| Vector3::new(p[1] * p[2], p[0] * p[0], p[0] - p[2]), pi);
        tangency = max_abs([tangency, xk.dot(&pi)]);
    }
    r.record("fiber plane equations on hopf_fiber", plane, tol);
    r.record("hopf∘hopf_fiber = π", over, tol);
    r.record("fiber torus actions = (½(e+ℓ), ½(e−ℓ))", torus, tol);
    r.record("reduced flow of π̃₃ has period π", period, tol);
    r.record("X_π̃₃ ⌟ ω_e = −dπ̃₃", hamiltonian, tol);
    r.record("⟨X(π), π⟩ = 0", tangency, tol);

    let mut quad = 0.0f64;
    let mut labels = vec![1, 2, 5];
    if cfg.q > 0 && !labels.contains(&cfg.q) {
        labels.push(cfg.q);
    }
    for q in labels {
        let e = f64::from(q) * cfg.hbar;
        let area = symplectic_area(e, QUAD_CELLS, QUAD_CELLS).unwrap_or(f64::NAN);
        quad = max_abs([quad, (area - TAU * e) / (TAU * e)]);
    }
    r.record("∫ω_e over S²_qħ = 2πqħ (relative)", quad, QUAD_TOL);
    r
}

fn random_algebra(rng: &mut ChaCha8Rng) -> (Vector3<f64>, SU2AlgebraElement) {
    let v = Vector3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    (v, j_inv(v))
}

fn su2(cfg: &RunConfig) -> VerificationReport {
    let tol = cfg.tol;
    let mut rng = rng_for(cfg.seed, 2);
    let mut r = VerificationReport::new();
    let (mut br, mut kill, mut kill_ad, mut ad_rot, mut ad_alg, mut equi, mut hopf_j, mut orbit, mut herm, mut linear) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, true);
    for _ in 0..TRIALS {
        let (a, u) = random_algebra(&mut rng);
        let (b, v) = random_algebra(&mut rng);
        br = br.max((j_map(&bracket(&u, &v)) - 2.0 * a.cross(&b)).amax());
        kill = kill.max((killing(&u, &v) - a.dot(&b)).abs());
        let g = exp(&u);
        let (au, av) = (ad_action(&g, &u), ad_action(&g, &v));
        kill_ad = kill_ad.max((killing(&au, &av) - killing(&u, &v)).abs());
        ad_rot = ad_rot.max((j_map(&av) - rotation_of(&u) * b).amax());
        let m = av.matrix();
        ad_alg = ad_alg.max((m.adjoint() + m).iter().map(|x| x.norm()).fold(m.trace().norm(), f64::max));

        let z = [Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))];
        equi = equi.max((momentum_j(g.apply(z)) - rotation_of_group(&g) * momentum_j(z)).amax());
        let jz = momentum_j(z);
        for (k, e) in basis().iter().enumerate() {
            herm = herm.max((hermitian_form(e, z) - jz[k]).abs());
        }
        let s = random_xi_eta(&mut rng);
        let e = 0.5 * s.norm_sq();
        hopf_j = max_abs([hopf_j, hopf(s, e).map(|p| (momentum_j(c2_from_xi_eta(s)) - p).amax()).unwrap_or(f64::NAN)]);

        let e = rng.gen_range(0.2..4.0);
        let x = random_sphere_point(&mut rng, e);
        let (y, y2) = (a, b);
        let lhs = orbit_form(x, y, y2, e).unwrap_or(f64::NAN);
        let rhs = reduced_symplectic(x, x.cross(&y), x.cross(&y2), e).unwrap_or(f64::NAN);
        orbit = max_abs([orbit, lhs - rhs]);

        let s = rng.gen_range(-3.0..3.0);
        let combo = u.matrix() * Complex64::new(s, 0.0) + v.matrix();
        linear &= SU2AlgebraElement::new(combo).is_ok_and(|w| j_map(&w) == a * s + b);
    }
    r.record("j([u,u']) = 2 j(u)×j(u')", br, tol);
    r.record("k(u,u') = ⟨j(u), j(u')⟩", kill, tol);
    r.record("k(Ad_U u, Ad_U u') = k(u,u')", kill_ad, tol);
    r.record("j(Ad_exp(u) v) = rotation_of(u) j(v)", ad_rot, tol);
    r.record("Ad_U preserves su(2)", ad_alg, tol);
    r.record("J(Uz) = R(U) J(z)", equi, tol);
    r.record("J^{E_k} = J_k", herm, tol);
    r.record("J(ξ−iη) = hopf(ξ,η)", hopf_j, tol);
    r.record("orbit_form = reduced_symplectic", orbit, tol);
    r.record_exact("j is linear", linear);

    let mut in_group = 0.0f64;
    for k in 0..=200 {
        let t = -10.0 + 0.1 * f64::from(k);
        let (unit, det) = exp(&basis()[2].scale(t)).defects();
        in_group = in_group.max(unit).max(det);
    }
    r.record("exp(tE₃) ∈ SU(2), |t| ≤ 10", in_group, tol);
    r
}
