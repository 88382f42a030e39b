//! Classical side of the construction: the oscillator on `T*ℝ²`, its
//! `T²` symmetry, the invariants `π₁..π₄`, the Hopf fibration onto `S²_e`
//! and the reduced dynamics and symplectic form there.
//!
//! Two charts on `ℝ⁴` are used. [`ClassicalState`] holds `(x, y)`;
//! [`XiEta`] holds `(ξ, η)` with `z_j = ξ_j + iη_j = r_j e^{iϑ_j}`, in which
//! the oscillator flow is the diagonal phase rotation and the Poisson
//! structure is `{ξ_i, η_j} = δ_ij`. They are related through the
//! action-angle chart: `x₁ = −(ξ₁+ξ₂)/√2`, `x₂ = (η₂−η₁)/√2`,
//! `y₁ = (η₁+η₂)/√2`, `y₂ = (ξ₂−ξ₁)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::{Matrix4, Vector3};
use serde::Serialize;

use crate::{Error, Result};

/// Relative tolerance for sphere membership and tangency tests.
pub const GEOM_REL_TOL: f64 = 1e-9;

/// Absolute tolerance used for a geometric test at scale `e`; scales with
/// `e` above 1 and stays at [`GEOM_REL_TOL`] below.
pub fn geom_tol(e: f64) -> f64 {
    GEOM_REL_TOL * e.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalState {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl ClassicalState {
    pub const fn new(x1: f64, x2: f64, y1: f64, y2: f64) -> Self {
        ClassicalState { x: [x1, x2], y: [y1, y2] }
    }

    /// `(x₁, x₂, y₁, y₂)`.
    pub fn to_array(self) -> [f64; 4] {
        [self.x[0], self.x[1], self.y[0], self.y[1]]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_xi_eta(self) -> XiEta {
        let [x1, x2] = self.x;
        let [y1, y2] = self.y;
        XiEta {
            xi: [-(x1 + y2) * FRAC_1_SQRT_2, (y2 - x1) * FRAC_1_SQRT_2],
            eta: [(y1 - x2) * FRAC_1_SQRT_2, (y1 + x2) * FRAC_1_SQRT_2],
        }
    }
}

/// Point of `ℝ⁴ = ℂ²` in the chart `z_j = ξ_j + iη_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiEta {
    pub xi: [f64; 2],
    pub eta: [f64; 2],
}

impl XiEta {
    pub const fn new(xi1: f64, xi2: f64, eta1: f64, eta2: f64) -> Self {
        XiEta { xi: [xi1, xi2], eta: [eta1, eta2] }
    }

    /// `(ξ₁, ξ₂, η₁, η₂)`.
    pub fn to_array(self) -> [f64; 4] {
        [self.xi[0], self.xi[1], self.eta[0], self.eta[1]]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_state(self) -> ClassicalState {
        let [xi1, xi2] = self.xi;
        let [eta1, eta2] = self.eta;
        ClassicalState {
            x: [-(xi1 + xi2) * FRAC_1_SQRT_2, (eta2 - eta1) * FRAC_1_SQRT_2],
            y: [(eta1 + eta2) * FRAC_1_SQRT_2, (xi2 - xi1) * FRAC_1_SQRT_2],
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum()
    }

    /// `(z₁, z₂) ↦ (e^{it} z₁, e^{it} z₂)`.
    pub fn phase_rotate(self, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        let rot = |re: f64, im: f64| (c * re - s * im, s * re + c * im);
        let (xi1, eta1) = rot(self.xi[0], self.eta[0]);
        let (xi2, eta2) = rot(self.xi[1], self.eta[1]);
        XiEta::new(xi1, xi2, eta1, eta2)
    }

    /// `(A₁, A₂) = (½|z₁|², ½|z₂|²)`.
    pub fn actions(self) -> (f64, f64) {
        (
            0.5 * (self.xi[0] * self.xi[0] + self.eta[0] * self.eta[0]),
            0.5 * (self.xi[1] * self.xi[1] + self.eta[1] * self.eta[1]),
        )
    }
}

/// `(e, ℓ) = (E, L)` with `E = ½|x|² + ½|y|²` and `L = x₁y₂ − x₂y₁`.
pub fn energy_momentum(s: ClassicalState) -> (f64, f64) {
    let [x1, x2] = s.x;
    let [y1, y2] = s.y;
    (0.5 * (x1 * x1 + y1 * y1) + 0.5 * (x2 * x2 + y2 * y2), x1 * y2 - x2 * y1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stratum {
    V0,
    V1,
    V2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Leaf {
    Point,
    Circle,
    Torus2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StratumTag {
    pub stratum: Stratum,
    pub leaf: Leaf,
}

/// Stratum of the orbit space `{|ℓ| <= e}` containing `(e, ℓ)`.
pub fn classify(e: f64, l: f64) -> Result<StratumTag> {
    let tol = geom_tol(e);
    if !(e.is_finite() && l.is_finite()) || l.abs() > e + tol {
        return Err(Error::domain(format!("(e, ℓ) = ({e}, {l}) lies outside |ℓ| <= e")));
    }
    let (stratum, leaf) = if e <= tol {
        (Stratum::V0, Leaf::Point)
    } else if l.abs() >= e - tol {
        (Stratum::V1, Leaf::Circle)
    } else {
        (Stratum::V2, Leaf::Torus2)
    };
    Ok(StratumTag { stratum, leaf })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionAngle {
    pub a1: f64,
    pub a2: f64,
    pub th1: f64,
    pub th2: f64,
}

impl ActionAngle {
    pub fn new(a1: f64, a2: f64, th1: f64, th2: f64) -> Result<Self> {
        if !(a1 >= 0.0 && a2 >= 0.0) {
            return Err(Error::domain(format!("actions must be nonnegative, got ({a1}, {a2})")));
        }
        Ok(ActionAngle { a1, a2, th1: th1.rem_euclid(TAU), th2: th2.rem_euclid(TAU) })
    }

    fn radii(self) -> (f64, f64) {
        ((2.0 * self.a1).sqrt(), (2.0 * self.a2).sqrt())
    }
}

pub fn from_action_angle(aa: ActionAngle) -> Result<ClassicalState> {
    if !(aa.a1 >= 0.0 && aa.a2 >= 0.0) {
        return Err(Error::domain(format!("actions must be nonnegative, got ({}, {})", aa.a1, aa.a2)));
    }
    let (r1, r2) = aa.radii();
    let (s1, c1) = aa.th1.sin_cos();
    let (s2, c2) = aa.th2.sin_cos();
    Ok(XiEta::new(r1 * c1, r2 * c2, r1 * s1, r2 * s2).to_state())
}

/// Inverse chart, defined only on the open stratum `A₁ > 0, A₂ > 0`.
pub fn to_action_angle(s: ClassicalState) -> Result<ActionAngle> {
    let z = s.to_xi_eta();
    let (a1, a2) = z.actions();
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(Error::domain("angles are undefined where an action vanishes"));
    }
    ActionAngle::new(a1, a2, z.eta[0].atan2(z.xi[0]), z.eta[1].atan2(z.xi[1]))
}

/// `∂(x₁, x₂, y₁, y₂) / ∂(A₁, A₂, ϑ₁, ϑ₂)` of the action-angle chart.
pub fn action_angle_jacobian(aa: ActionAngle) -> Result<Matrix4<f64>> {
    if !(aa.a1 > 0.0 && aa.a2 > 0.0) {
        return Err(Error::domain("the action-angle chart is singular where an action vanishes"));
    }
    let (r1, r2) = aa.radii();
    let (s1, c1) = aa.th1.sin_cos();
    let (s2, c2) = aa.th2.sin_cos();
    // dr_j/dA_j = 1/r_j.
    let (d1, d2) = (1.0 / r1, 1.0 / r2);
    let k = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let j = Matrix4::new(
        -k * c1 * d1, -k * c2 * d2,  k * r1 * s1,  k * r2 * s2,
        -k * s1 * d1,  k * s2 * d2, -k * r1 * c1,  k * r2 * c2,
         k * s1 * d1,  k * s2 * d2,  k * r1 * c1,  k * r2 * c2,
        -k * c1 * d1,  k * c2 * d2,  k * r1 * s1, -k * r2 * s2,
    );
    Ok(j)
}

/// Matrix of `ω = dy₁∧dx₁ + dy₂∧dx₂` in the coordinates `(x₁, x₂, y₁, y₂)`.
pub fn omega_matrix() -> Matrix4<f64> {
    let mut w = Matrix4::zeros();
    for i in 0..2 {
        w[(i + 2, i)] = 1.0;
        w[(i, i + 2)] = -1.0;
    }
    w
}

/// Matrix of `Ω = dA₁∧dϑ₁ + dA₂∧dϑ₂` in the coordinates `(A₁, A₂, ϑ₁, ϑ₂)`.
pub fn action_angle_form_matrix() -> Matrix4<f64> {
    -omega_matrix()
}

/// Largest entry of `Jᵀ ω J − Ω` at `aa`.
pub fn pullback_residual(aa: ActionAngle) -> Result<f64> {
    let j = action_angle_jacobian(aa)?;
    let diff = j.transpose() * omega_matrix() * j - action_angle_form_matrix();
    Ok(diff.amax())
}

/// `π₁..π₄` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantPoint {
    pub pi1: f64,
    pub pi2: f64,
    pub pi3: f64,
    pub pi4: f64,
}

impl InvariantPoint {
    pub fn new(pi1: f64, pi2: f64, pi3: f64, pi4: f64) -> Self {
        InvariantPoint { pi1, pi2, pi3, pi4 }
    }

    pub fn get(&self, k: usize) -> Result<f64> {
        match k {
            1 => Ok(self.pi1),
            2 => Ok(self.pi2),
            3 => Ok(self.pi3),
            4 => Ok(self.pi4),
            _ => Err(Error::domain(format!("invariant index {k} is not in 1..=4"))),
        }
    }

    /// `|π₁² + π₂² + π₃² − π₄²|`.
    pub fn relation_residual(&self) -> f64 {
        (self.pi1 * self.pi1 + self.pi2 * self.pi2 + self.pi3 * self.pi3 - self.pi4 * self.pi4).abs()
    }

    pub fn sphere_point(&self) -> Vector3<f64> {
        Vector3::new(self.pi1, self.pi2, self.pi3)
    }
}

/// The invariant polynomial `π_k` evaluated at `(ξ₁, ξ₂, η₁, η₂)`.
pub fn pi_polynomial(k: usize, p: [f64; 4]) -> Result<f64> {
    let [xi1, xi2, eta1, eta2] = p;
    match k {
        1 => Ok(xi1 * xi2 + eta1 * eta2),
        2 => Ok(xi1 * eta2 - xi2 * eta1),
        3 => Ok(0.5 * (xi1 * xi1 + eta1 * eta1 - xi2 * xi2 - eta2 * eta2)),
        4 => Ok(0.5 * (xi1 * xi1 + eta1 * eta1 + xi2 * xi2 + eta2 * eta2)),
        _ => Err(Error::domain(format!("invariant index {k} is not in 1..=4"))),
    }
}

pub fn invariants_pi(s: XiEta) -> InvariantPoint {
    let a = s.to_array();
    let f = |k| pi_polynomial(k, a).expect("k in 1..=4");
    InvariantPoint::new(f(1), f(2), f(3), f(4))
}

/// `σ₁..σ₄` in the `(x, y)` chart; `σ₁ = E`, `σ₂ = L`, `σ₁² = σ₂²+σ₃²+σ₄²`.
/// The relation needs `σ₄ = x₁x₂ + y₁y₂`: with `a = x₁+iy₁`, `b = x₂+iy₂`
/// it reads `|a|²|b|² = |a b̄|²`.
pub fn invariants_sigma(s: ClassicalState) -> [f64; 4] {
    let [x1, x2] = s.x;
    let [y1, y2] = s.y;
    let (e, l) = energy_momentum(s);
    [e, l, 0.5 * (y1 * y1 + x1 * x1 - y2 * y2 - x2 * x2), x1 * x2 + y1 * y2]
}

/// `{π_i, π_j}` from the closed-form table: `2ε_{ijk}π_k` for indices in
/// `1..=3`, zero when either index is 4.
pub fn poisson_bracket_pi(i: usize, j: usize, at: &InvariantPoint) -> Result<f64> {
    if !(1..=4).contains(&i) || !(1..=4).contains(&j) {
        return Err(Error::domain(format!("bracket indices ({i}, {j}) are not in 1..=4")));
    }
    if i == 4 || j == 4 || i == j {
        return Ok(0.0);
    }
    let k = 6 - i - j;
    let sign = if (i, j) == (1, 2) || (i, j) == (2, 3) || (i, j) == (3, 1) { 1.0 } else { -1.0 };
    Ok(2.0 * sign * at.get(k)?)
}

/// Central-difference Poisson bracket of two functions of
/// `(ξ₁, ξ₂, η₁, η₂)` with `{ξ_i, η_j} = δ_ij`.
pub fn fd_poisson_bracket(
    f: impl Fn([f64; 4]) -> f64,
    g: impl Fn([f64; 4]) -> f64,
    at: [f64; 4],
    step: f64,
) -> f64 {
    let grad = |h: &dyn Fn([f64; 4]) -> f64| {
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut plus = at;
            let mut minus = at;
            plus[k] += step;
            minus[k] -= step;
            *slot = (h(plus) - h(minus)) / (2.0 * step);
        }
        out
    };
    let df = grad(&f);
    let dg = grad(&g);
    (0..2).map(|i| df[i] * dg[i + 2] - df[i + 2] * dg[i]).sum()
}

/// `{π_i, π_j}` at `(ξ, η)` by finite differences of the polynomials.
pub fn fd_bracket_pi(i: usize, j: usize, at: XiEta, step: f64) -> Result<f64> {
    let a = at.to_array();
    pi_polynomial(i, a)?;
    pi_polynomial(j, a)?;
    let f = move |p| pi_polynomial(i, p).expect("index checked");
    let g = move |p| pi_polynomial(j, p).expect("index checked");
    Ok(fd_poisson_bracket(f, g, a, step))
}

/// Hopf map `S³_{√(2e)} → S²_e`, `(ξ, η) ↦ (π₁, π₂, π₃)`.
pub fn hopf(s: XiEta, e: f64) -> Result<Vector3<f64>> {
    if (s.norm_sq() - 2.0 * e).abs() > geom_tol(e) {
        return Err(Error::domain(format!("|ζ|² = {} but 2e = {}", s.norm_sq(), 2.0 * e)));
    }
    Ok(invariants_pi(s).sphere_point())
}

/// A point of the great circle `ρ⁻¹(π)` over `π ∈ S²_e`, parametrised by the
/// oscillator flow from a fixed seed.
///
/// For `π₃ >= 0` the seed is `η₁ = 0`, `ξ₁ = √(e+π₃)`, `ξ₂ = π₁/ξ₁`,
/// `η₂ = π₂/ξ₁`. For `π₃ < 0` it is `η₂ = 0`, `ξ₂ = √(e−π₃)`,
/// `ξ₁ = π₁/ξ₂`, `η₁ = −π₂/ξ₂`, which at the south pole is
/// `(0, √(2e), 0, 0)`.
pub fn hopf_fiber(pi: Vector3<f64>, e: f64, t: f64) -> Result<XiEta> {
    if e.is_nan() || e <= 0.0 {
        return Err(Error::domain("the fiber over e = 0 degenerates to a point"));
    }
    if (pi.norm() - e).abs() > geom_tol(e) {
        return Err(Error::domain(format!("|π| = {} but e = {e}", pi.norm())));
    }
    let (p1, p2, p3) = (pi[0], pi[1], pi[2]);
    let seed = if p3 >= 0.0 {
        let xi1 = (e + p3).sqrt();
        XiEta::new(xi1, p1 / xi1, 0.0, p2 / xi1)
    } else {
        let xi2 = (e - p3).sqrt();
        XiEta::new(p1 / xi2, xi2, -p2 / xi2, 0.0)
    };
    Ok(seed.phase_rotate(t))
}

/// Residuals of the two linear equations cutting out the fiber over `π`:
/// `π₁ξ₁ − π₂η₁ − (e+π₃)ξ₂` and `π₂ξ₁ + π₁η₁ − (e+π₃)η₂`.
pub fn fiber_plane_residuals(pi: Vector3<f64>, e: f64, s: XiEta) -> [f64; 2] {
    let (p1, p2, p3) = (pi[0], pi[1], pi[2]);
    let [xi1, xi2] = s.xi;
    let [eta1, eta2] = s.eta;
    [p1 * xi1 - p2 * eta1 - (e + p3) * xi2, p2 * xi1 + p1 * eta1 - (e + p3) * eta2]
}

/// Flow of the oscillator symmetry,
/// `(x, y) ↦ (cos t·x − sin t·y, sin t·x + cos t·y)`.
pub fn flow_e(t: f64, s: ClassicalState) -> ClassicalState {
    let (sn, c) = t.sin_cos();
    ClassicalState {
        x: [c * s.x[0] - sn * s.y[0], c * s.x[1] - sn * s.y[1]],
        y: [sn * s.x[0] + c * s.y[0], sn * s.x[1] + c * s.y[1]],
    }
}

/// Flow of the angular momentum symmetry: the rotation
/// `[[cos s, sin s], [−sin s, cos s]]` applied to `x` and to `y`.
pub fn flow_l(s: f64, st: ClassicalState) -> ClassicalState {
    let (sn, c) = s.sin_cos();
    let rot = |v: [f64; 2]| [c * v[0] + sn * v[1], -sn * v[0] + c * v[1]];
    ClassicalState { x: rot(st.x), y: rot(st.y) }
}

/// Reduced vector field `X(π) = 2 (∇K(π) × π)` on `S²_e`.
pub fn reduced_field(grad_k: impl Fn(Vector3<f64>) -> Vector3<f64>, pi: Vector3<f64>) -> Vector3<f64> {
    2.0 * grad_k(pi).cross(&pi)
}

/// Flow of `X_{π̃₃}`: rotation by `2t` about the `π₃` axis.
pub fn reduced_flow_pi3(t: f64, pi: Vector3<f64>) -> Vector3<f64> {
    let (s, c) = (2.0 * t).sin_cos();
    Vector3::new(c * pi[0] - s * pi[1], s * pi[0] + c * pi[1], pi[2])
}

/// `ω_e(π)(u, v) = −⟨π, u × v⟩ / (2e²)` for tangent vectors `u, v` at `π`.
pub fn reduced_symplectic(pi: Vector3<f64>, u: Vector3<f64>, v: Vector3<f64>, e: f64) -> Result<f64> {
    if e.is_nan() || e <= 0.0 || (pi.norm() - e).abs() > geom_tol(e) {
        return Err(Error::domain(format!("π is not on S²_e with e = {e}")));
    }
    let scale = e * geom_tol(e) * (1.0 + u.norm().max(v.norm()));
    if pi.dot(&u).abs() > scale || pi.dot(&v).abs() > scale {
        return Err(Error::domain("u and v must be tangent to S²_e at π"));
    }
    Ok(symplectic_unchecked(pi, u, v, e))
}

fn symplectic_unchecked(pi: Vector3<f64>, u: Vector3<f64>, v: Vector3<f64>, e: f64) -> f64 {
    -pi.dot(&u.cross(&v)) / (2.0 * e * e)
}

/// Total `ω_e`-area of `S²_e` by the midpoint rule in the chart
/// `π = (e sinθ cos2ψ, e sinθ sin2ψ, e cosθ)`, `θ, ψ ∈ [0, π]`.
pub fn symplectic_area(e: f64, n_theta: usize, n_psi: usize) -> Result<f64> {
    if e.is_nan() || e <= 0.0 || n_theta == 0 || n_psi == 0 {
        return Err(Error::domain("need e > 0 and a nonempty grid"));
    }
    let (dt, dp) = (PI / n_theta as f64, PI / n_psi as f64);
    let mut total = 0.0;
    for i in 0..n_theta {
        let th = (i as f64 + 0.5) * dt;
        let (st, ct) = th.sin_cos();
        for k in 0..n_psi {
            let psi = (k as f64 + 0.5) * dp;
            let (s2, c2) = (2.0 * psi).sin_cos();
            let pi = Vector3::new(e * st * c2, e * st * s2, e * ct);
            let d_psi = Vector3::new(-2.0 * e * st * s2, 2.0 * e * st * c2, 0.0);
            let d_theta = Vector3::new(e * ct * c2, e * ct * s2, -e * st);
            total += symplectic_unchecked(pi, d_psi, d_theta, e) * dt * dp;
        }
    }
    Ok(total)
}

/// Actions `(a₁, a₂) = (½(e+ℓ), ½(e−ℓ))` of the torus `ρ⁻¹(π̃₃⁻¹(ℓ))`.
pub fn fiber_torus_actions(l: f64, e: f64) -> Result<(f64, f64)> {
    if l.abs() > e + geom_tol(e) {
        return Err(Error::domain(format!("|ℓ| = {} exceeds e = {e}", l.abs())));
    }
    Ok((0.5 * (e + l), 0.5 * (e - l)))
}
