//! `su(2)` and `SU(2)` in the fixed basis `E₁, E₂, E₃`, identified with
//! `ℝ³` by `j`, together with the momentum map of the `SU(2)` action on
//! `ℂ²` and the symplectic form of the coadjoint orbit `S²_e`.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

use crate::classical::{geom_tol, XiEta};
use crate::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Tolerance for the anti-hermitian, traceless and unitarity tests.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Traceless anti-hermitian `2 × 2` complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2AlgebraElement(Matrix2<Complex64>);

impl SU2AlgebraElement {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let scale = m.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let anti = (m.adjoint() + m).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let trace = m.trace().norm();
        if anti > ALGEBRA_TOL * scale || trace > ALGEBRA_TOL * scale {
            return Err(Error::domain(format!(
                "not in su(2): anti-hermitian defect {anti:e}, trace {trace:e}"
            )));
        }
        Ok(SU2AlgebraElement(m))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn scale(&self, t: f64) -> Self {
        SU2AlgebraElement(self.0 * Complex64::new(t, 0.0))
    }
}

/// `U = [[α, −β], [β̄, ᾱ]]` with `|α|² + |β|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2GroupElement(Matrix2<Complex64>);

impl SU2GroupElement {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let unitary = (m.adjoint() * m - Matrix2::identity()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let det = (m.determinant() - ONE).norm();
        if unitary > ALGEBRA_TOL || det > ALGEBRA_TOL {
            return Err(Error::domain(format!("not in SU(2): unitarity defect {unitary:e}, det defect {det:e}")));
        }
        Ok(SU2GroupElement(m))
    }

    pub fn from_alpha_beta(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(Matrix2::new(alpha, -beta, beta.conj(), alpha.conj()))
    }

    pub fn identity() -> Self {
        SU2GroupElement(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        SU2GroupElement(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        SU2GroupElement(self.0 * other.0)
    }

    /// Largest entry of `ŪᵀU − I` and `|det U − 1|`.
    pub fn defects(&self) -> (f64, f64) {
        let unitary = (self.0.adjoint() * self.0 - Matrix2::identity()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        (unitary, (self.0.determinant() - ONE).norm())
    }

    pub fn apply(&self, z: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[(0, 0)] * z[0] + m[(0, 1)] * z[1], m[(1, 0)] * z[0] + m[(1, 1)] * z[1]]
    }
}

/// `[[iz, −y+ix], [y+ix, −iz]] ↦ (x, y, z)`.
pub fn j_map(u: &SU2AlgebraElement) -> Vector3<f64> {
    let m = u.matrix();
    Vector3::new(m[(1, 0)].im, m[(1, 0)].re, m[(0, 0)].im)
}

pub fn j_inv(v: Vector3<f64>) -> SU2AlgebraElement {
    let (x, y, z) = (v[0], v[1], v[2]);
    SU2AlgebraElement(Matrix2::new(
        Complex64::new(0.0, z),
        Complex64::new(-y, x),
        Complex64::new(y, x),
        Complex64::new(0.0, -z),
    ))
}

/// The basis `E₁, E₂, E₃` with `j(E_k) = e_k`.
pub fn basis() -> [SU2AlgebraElement; 3] {
    [j_inv(Vector3::x()), j_inv(Vector3::y()), j_inv(Vector3::z())]
}

/// `[u, u'] = uu' − u'u`; satisfies `j([u, u']) = 2 j(u) × j(u')`.
pub fn bracket(u: &SU2AlgebraElement, v: &SU2AlgebraElement) -> SU2AlgebraElement {
    SU2AlgebraElement(u.0 * v.0 - v.0 * u.0)
}

/// `k(u, u') = ½ Re tr(u ū'ᵀ)`, equal to `⟨j(u), j(u')⟩`.
pub fn killing(u: &SU2AlgebraElement, v: &SU2AlgebraElement) -> f64 {
    0.5 * (u.0 * v.0.adjoint()).trace().re
}

/// `exp(u) = cos θ·I + (sin θ/θ)·u` with `θ = |j(u)|`.
pub fn exp(u: &SU2AlgebraElement) -> SU2GroupElement {
    let theta = j_map(u).norm();
    let sinc = if theta == 0.0 { 1.0 } else { theta.sin() / theta };
    SU2GroupElement(Matrix2::identity() * Complex64::new(theta.cos(), 0.0) + u.0 * Complex64::new(sinc, 0.0))
}

/// `Ad_U u = U u U⁻¹`.
pub fn ad_action(g: &SU2GroupElement, u: &SU2AlgebraElement) -> SU2AlgebraElement {
    SU2AlgebraElement(g.0 * u.0 * g.0.adjoint())
}

fn hat(v: Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// `exp(2 ĵ(u))`, where `ĵ(u)` is the skew matrix of `w ↦ j(u) × w`.
pub fn rotation_of(u: &SU2AlgebraElement) -> Matrix3<f64> {
    let w = 2.0 * j_map(u);
    let angle = w.norm();
    if angle == 0.0 {
        return Matrix3::identity();
    }
    let k = hat(w / angle);
    Matrix3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

/// The rotation `v ↦ j(Ad_U j⁻¹(v))` as a matrix.
pub fn rotation_of_group(g: &SU2GroupElement) -> Matrix3<f64> {
    let mut r = Matrix3::zeros();
    for (k, e) in basis().iter().enumerate() {
        r.set_column(k, &j_map(&ad_action(g, e)));
    }
    r
}

/// `J^u(z) = ½ z̄ᵀ(−iu)z`.
pub fn hermitian_form(u: &SU2AlgebraElement, z: [Complex64; 2]) -> f64 {
    let m = u.0 * (-I);
    let mz = [m[(0, 0)] * z[0] + m[(0, 1)] * z[1], m[(1, 0)] * z[0] + m[(1, 1)] * z[1]];
    0.5 * (z[0].conj() * mz[0] + z[1].conj() * mz[1]).re
}

/// `J(z) = (Re z₁z̄₂, Im z₁z̄₂, ½(|z₁|² − |z₂|²))`, so that `J_k = J^{E_k}`.
pub fn momentum_j(z: [Complex64; 2]) -> Vector3<f64> {
    let w = z[0] * z[1].conj();
    Vector3::new(w.re, w.im, 0.5 * (z[0].norm_sqr() - z[1].norm_sqr()))
}

/// `z_j = ξ_j − iη_j`. Under this identification [`momentum_j`] agrees with
/// [`crate::classical::hopf`]; with `z_j = ξ_j + iη_j` the second component
/// changes sign.
pub fn c2_from_xi_eta(s: XiEta) -> [Complex64; 2] {
    [Complex64::new(s.xi[0], -s.eta[0]), Complex64::new(s.xi[1], -s.eta[1])]
}

/// `ω_e(x)(x × y, x × y') = −½⟨x, y × y'⟩` on the orbit `|x| = e`.
pub fn orbit_form(x: Vector3<f64>, y: Vector3<f64>, y2: Vector3<f64>, e: f64) -> Result<f64> {
    if e.is_nan() || e <= 0.0 || (x.norm() - e).abs() > geom_tol(e) {
        return Err(Error::domain(format!("|x| = {} but e = {e}", x.norm())));
    }
    Ok(-0.5 * x.dot(&y.cross(&y2)))
}
