//! The matrix domain the states are labeled by: quaternions realized as 2×2
//! complex matrices, their polar form, and the general variable Z = A e^{iζΘ}
//! with A normal, Θ hermitian, Θ² = I and [A, Θ] = 0.

use crate::linalg::{commutator, cx, identity, operator_norm, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("matrix dimensions disagree: A is {0}x{1}, Θ is {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("domain axiom violated: {0} residual {1:.3e} exceeds 1e-10")]
    AxiomViolation(&'static str, f64),
}

/// Quaternion q = x0 + x1·i + x2·j + x3·k in cartesian components.
///
/// Its 2×2 complex matrix form is
/// [[x0 + i·x3, -x2 + i·x1], [x2 + i·x1, x0 - i·x3]], det = |q|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub x: [f64; 4],
}

/// Polar form q = r e^{iθ σ(n̂)} with n̂ the unit vector given by (φ, ψ):
/// σ(n̂) = [[cos φ, sin φ e^{iψ}], [sin φ e^{-iψ}, -cos φ]], σ(n̂)² = I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarQuaternion {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl Quaternion {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion { x: [x0, x1, x2, x3] }
    }

    pub fn zero() -> Self {
        Quaternion { x: [0.0; 4] }
    }

    /// Euclidean modulus r = (x0² + x1² + x2² + x3²)^{1/2}.
    pub fn modulus(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn matrix(&self) -> CMat {
        let [x0, x1, x2, x3] = self.x;
        CMat::from_row_slice(2, 2, &[cx(x0, x3), cx(-x2, x1), cx(x2, x1), cx(x0, -x3)])
    }

    pub fn conjugate(&self) -> Self {
        let [x0, x1, x2, x3] = self.x;
        Quaternion::new(x0, -x1, -x2, -x3)
    }

    pub fn scale(&self, s: f64) -> Self {
        let [x0, x1, x2, x3] = self.x;
        Quaternion::new(s * x0, s * x1, s * x2, s * x3)
    }

    /// Embeds the quaternion as the matrix variable A = r·I, Θ = σ(n̂), ζ = θ.
    pub fn to_variable(&self) -> MatrixVariable {
        let p = self.to_polar();
        let a = identity(2).map(|z| z * p.r);
        MatrixVariable::new(a, sigma_unit(p.phi, p.psi), p.theta)
            .expect("quaternion embedding always satisfies the axioms")
    }

    pub fn to_polar(&self) -> PolarQuaternion {
        let [x0, x1, x2, x3] = self.x;
        let r = self.modulus();
        if r == 0.0 {
            return PolarQuaternion { r: 0.0, theta: 0.0, phi: 0.0, psi: 0.0 };
        }
        let s = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        let theta = s.atan2(x0); // [0, π] since s ≥ 0
        if s == 0.0 {
            return PolarQuaternion { r, theta, phi: 0.0, psi: 0.0 };
        }
        let phi = (x3 / s).clamp(-1.0, 1.0).acos();
        let mut psi = x2.atan2(x1);
        if psi < 0.0 {
            psi += 2.0 * std::f64::consts::PI;
        }
        if x1 == 0.0 && x2 == 0.0 {
            psi = 0.0;
        }
        PolarQuaternion { r, theta, phi, psi }
    }

    pub fn from_polar(p: &PolarQuaternion) -> Self {
        let (st, ct) = p.theta.sin_cos();
        let (sp, cp) = p.phi.sin_cos();
        let (ss, cs) = p.psi.sin_cos();
        Quaternion::new(p.r * ct, p.r * st * sp * cs, p.r * st * sp * ss, p.r * st * cp)
    }
}

/// σ(n̂) for the unit direction given by polar angles (φ, ψ).
pub fn sigma_unit(phi: f64, psi: f64) -> CMat {
    let (sp, cp) = phi.sin_cos();
    CMat::from_row_slice(
        2,
        2,
        &[
            cx(cp, 0.0),
            cx(sp, 0.0) * cx(psi.cos(), psi.sin()),
            cx(sp, 0.0) * cx(psi.cos(), -psi.sin()),
            cx(-cp, 0.0),
        ],
    )
}

/// Residuals of the four structural axioms, in operator norm.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DomainAxiomReport {
    pub theta_hermitian: f64,
    pub theta_involution: f64,
    pub a_theta_commute: f64,
    pub a_normal: f64,
}

impl DomainAxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.theta_hermitian
            .max(self.theta_involution)
            .max(self.a_theta_commute)
            .max(self.a_normal)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// The matrix variable Z = A e^{iζΘ}; stores the evaluated factor matrices.
#[derive(Debug, Clone)]
pub struct MatrixVariable {
    a: CMat,
    theta: CMat,
    zeta: f64,
}

impl MatrixVariable {
    /// Validates the structural axioms (residuals ≤ 1e-10) before accepting.
    pub fn new(a: CMat, theta: CMat, zeta: f64) -> Result<Self, DomainError> {
        if a.nrows() != a.ncols() || theta.nrows() != theta.ncols() || a.nrows() != theta.nrows() {
            return Err(DomainError::DimensionMismatch(a.nrows(), a.ncols(), theta.nrows(), theta.ncols()));
        }
        let v = MatrixVariable { a, theta, zeta };
        let report = check_domain_axioms(&v);
        const TOL: f64 = 1e-10;
        if report.theta_hermitian > TOL {
            return Err(DomainError::AxiomViolation("Θ hermitian", report.theta_hermitian));
        }
        if report.theta_involution > TOL {
            return Err(DomainError::AxiomViolation("Θ² = I", report.theta_involution));
        }
        if report.a_theta_commute > TOL {
            return Err(DomainError::AxiomViolation("[A, Θ] = 0", report.a_theta_commute));
        }
        if report.a_normal > TOL {
            return Err(DomainError::AxiomViolation("AA† = A†A", report.a_normal));
        }
        Ok(v)
    }

    /// Scalar variable z = r e^{iζ} as the n = 1 case.
    pub fn scalar(r: f64, zeta: f64) -> Self {
        let a = CMat::from_row_slice(1, 1, &[cx(r, 0.0)]);
        let theta = CMat::from_row_slice(1, 1, &[cx(1.0, 0.0)]);
        MatrixVariable::new(a, theta, zeta).expect("scalar variable always satisfies the axioms")
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn theta(&self) -> &CMat {
        &self.theta
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Z = A (cos ζ · I + i sin ζ · Θ).
    pub fn evaluate(&self) -> CMat {
        &self.a * self.phase(1)
    }

    /// Z^m = A^m (cos mζ · I + i sin mζ · Θ); the phase uses the closed form
    /// rather than multiplying m copies of the phase factor.
    pub fn power(&self, m: u32) -> CMat {
        matrix_pow(&self.a, m) * self.phase(m as i64)
    }

    fn phase(&self, m: i64) -> CMat {
        let arg = self.zeta * m as f64;
        identity(self.dim()).map(|z| z * cx(arg.cos(), 0.0)) + self.theta.map(|z| z * cx(0.0, arg.sin()))
    }
}

fn matrix_pow(a: &CMat, mut m: u32) -> CMat {
    let mut base = a.clone();
    let mut acc = identity(a.nrows());
    while m > 0 {
        if m & 1 == 1 {
            acc = &acc * &base;
        }
        m >>= 1;
        if m > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// |Z| = (Z Z†)^{1/2}, hermitian and positive semidefinite.
pub fn modulus(v: &MatrixVariable) -> CMat {
    let z = v.evaluate();
    let prod = &z * z.adjoint();
    crate::linalg::hermitian_sqrt(&prod).expect("ZZ† is square and PSD")
}

pub fn check_domain_axioms(v: &MatrixVariable) -> DomainAxiomReport {
    let theta = &v.theta;
    let a = &v.a;
    let n = v.dim();
    DomainAxiomReport {
        theta_hermitian: operator_norm(&(theta - theta.adjoint())),
        theta_involution: operator_norm(&(theta * theta - identity(n))),
        a_theta_commute: operator_norm(&commutator(a, theta)),
        a_normal: operator_norm(&(a * a.adjoint() - a.adjoint() * a)),
    }
}

/// Unitary diagonalization q = u · diag(z, z̄) · u† of the quaternion matrix.
///
/// z is the eigenvalue with non-negative imaginary part; its eigenvector is
/// the first column of u. For real q (vector part zero) u = I by convention.
/// The eigenvectors come from the hermitian part of q, with the branch chosen
/// by the sign of x3 so the leading component never cancels.
pub fn diagonalize_quaternion(q: &Quaternion) -> (CMat, Complex64) {
    let [x0, x1, x2, x3] = q.x;
    let s = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
    let z = cx(x0, s);
    if s == 0.0 {
        return (identity(2), z);
    }
    let (w0, w1) = if x3 < 0.0 {
        (cx(x1, x2), cx(s - x3, 0.0))
    } else {
        (cx(s + x3, 0.0), cx(x1, -x2))
    };
    let norm = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
    let (w0, w1) = (w0 / norm, w1 / norm);
    let u = CMat::from_row_slice(2, 2, &[w0, -w1.conj(), w1, w0.conj()]);
    (u, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        operator_norm(&(a - b)) <= tol
    }

    #[test]
    fn matrix_form_determinant_is_squared_modulus() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.1);
        let m = q.matrix();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert_relative_eq!(det.re, q.modulus().powi(2), max_relative = 1e-14);
        assert!(det.im.abs() < 1e-14);
    }

    #[test]
    fn polar_matrix_matches_exponential_form() {
        let p = PolarQuaternion { r: 1.7, theta: 0.9, phi: 2.1, psi: 4.4 };
        let q = Quaternion::from_polar(&p);
        let sigma = sigma_unit(p.phi, p.psi);
        let want = (identity(2).map(|z| z * cx(p.theta.cos(), 0.0))
            + sigma.map(|z| z * cx(0.0, p.theta.sin())))
        .map(|z| z * p.r);
        assert!(close(&q.matrix(), &want, 1e-13));
    }

    #[test]
    fn sigma_unit_squares_to_identity() {
        let s = sigma_unit(1.1, 5.2);
        assert!(close(&(&s * &s), &identity(2), 1e-14));
        assert!(close(&s, &s.adjoint(), 1e-14));
    }

    #[test]
    fn quaternion_matrix_is_normal_with_scalar_modulus() {
        let q = Quaternion::new(0.5, 1.5, -0.25, 0.75);
        let m = q.matrix();
        let r2 = q.modulus().powi(2);
        assert!(close(&(&m * m.adjoint()), &identity(2).map(|z| z * r2), 1e-13));
        let v = q.to_variable();
        assert!(close(&modulus(&v), &identity(2).map(|z| z * q.modulus()), 1e-12));
    }

    #[test]
    fn variable_power_matches_repeated_multiplication() {
        let q = Quaternion::new(0.4, -0.9, 0.6, 0.2);
        let v = q.to_variable();
        let z = v.evaluate();
        assert!(close(&z, &q.matrix(), 1e-12));
        let mut acc = identity(2);
        for m in 0..=9u32 {
            assert!(close(&v.power(m), &acc, 1e-11), "power {m} disagrees");
            acc = &acc * &z;
        }
    }

    #[test]
    fn scalar_variable_power_is_complex_power() {
        let v = MatrixVariable::scalar(1.3, 0.8);
        let z5 = v.power(5)[(0, 0)];
        let want = cx(1.3 * 0.8f64.cos(), 1.3 * 0.8f64.sin()).powu(5);
        assert_relative_eq!(z5.re, want.re, max_relative = 1e-12);
        assert_relative_eq!(z5.im, want.im, max_relative = 1e-12);
    }

    #[test]
    fn axioms_reject_broken_theta() {
        // Θ not an involution
        let a = identity(2);
        let theta = identity(2).map(|z| z * 0.5);
        assert!(matches!(
            MatrixVariable::new(a, theta, 0.1),
            Err(DomainError::AxiomViolation("Θ² = I", _))
        ));
        // A not commuting with Θ
        let a = CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        let theta = sigma_unit(0.4, 0.0);
        assert!(MatrixVariable::new(a, theta, 0.1).is_err());
    }

    #[test]
    fn axiom_report_passes_for_quaternion() {
        let q = Quaternion::new(0.2, 0.4, -1.0, 0.3);
        let report = check_domain_axioms(&q.to_variable());
        assert!(report.pass(1e-12), "residuals {report:?}");
    }

    #[test]
    fn diagonalization_reconstructs_and_orders() {
        let q = Quaternion::new(0.8, -0.3, 0.55, -0.2);
        let (u, z) = diagonalize_quaternion(&q);
        assert!(z.im >= 0.0);
        assert!(close(&(u.adjoint() * &u), &identity(2), 1e-13));
        let d = CMat::from_diagonal(&CVec::from_vec(vec![z, z.conj()]));
        assert!(close(&(&u * d * u.adjoint()), &q.matrix(), 1e-13));
    }

    #[test]
    fn diagonalization_degenerate_uses_identity() {
        let q = Quaternion::new(-1.4, 0.0, 0.0, 0.0);
        let (u, z) = diagonalize_quaternion(&q);
        assert!(close(&u, &identity(2), 0.0));
        assert_eq!(z, cx(-1.4, 0.0));
    }

    #[test]
    fn diagonalization_stable_near_z_axis() {
        for sign in [1.0, -1.0] {
            let q = Quaternion::new(0.5, 1e-13, -1e-13, sign * 0.9);
            let (u, z) = diagonalize_quaternion(&q);
            let d = CMat::from_diagonal(&CVec::from_vec(vec![z, z.conj()]));
            assert!(close(&(&u * d * u.adjoint()), &q.matrix(), 1e-12));
        }
    }

    #[test]
    fn serde_shapes_match_interchange_format() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"x":[1.0,2.0,3.0,4.0]}"#);
        let p = PolarQuaternion { r: 1.0, theta: 0.5, phi: 0.25, psi: 0.125 };
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"r":1.0,"theta":0.5,"phi":0.25,"psi":0.125}"#
        );
        let back: Quaternion = serde_json::from_str(r#"{"x":[1.0,2.0,3.0,4.0]}"#).unwrap();
        assert_eq!(back, q);
    }

    proptest! {
        #[test]
        fn polar_round_trip(
            r in 0.01f64..5.0,
            theta in 0.01f64..3.13,
            phi in 0.01f64..3.13,
            psi in 0.0f64..std::f64::consts::TAU,
        ) {
            let p = PolarQuaternion { r, theta, phi, psi };
            let q = Quaternion::from_polar(&p);
            let back = q.to_polar();
            prop_assert!((back.r - r).abs() < 1e-12 * r);
            prop_assert!((back.theta - theta).abs() < 1e-9);
            prop_assert!((back.phi - phi).abs() < 1e-9);
            // ψ wraps at 2π
            let dpsi = (back.psi - psi).abs();
            prop_assert!(dpsi < 1e-9 || (dpsi - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        }

        #[test]
        fn diagonalization_valid_for_random_quaternions(
            x0 in -2.0f64..2.0, x1 in -2.0f64..2.0,
            x2 in -2.0f64..2.0, x3 in -2.0f64..2.0,
        ) {
            let q = Quaternion::new(x0, x1, x2, x3);
            let (u, z) = diagonalize_quaternion(&q);
            prop_assert!(z.im >= 0.0);
            prop_assert!(close(&(u.adjoint() * &u), &identity(2), 1e-12));
            let d = CMat::from_diagonal(&CVec::from_vec(vec![z, z.conj()]));
            prop_assert!(close(&(&u * d * u.adjoint()), &q.matrix(), 1e-12));
        }

        #[test]
        fn power_modulus_scales_like_r_to_m(
            r in 0.1f64..2.0, theta in 0.0f64..std::f64::consts::TAU,
            phi in 0.01f64..3.13, psi in 0.0f64..std::f64::consts::TAU, m in 0u32..8,
        ) {
            let q = Quaternion::from_polar(&PolarQuaternion { r, theta, phi, psi });
            let v = q.to_variable();
            let p = v.power(m);
            let norm = operator_norm(&p);
            prop_assert!((norm - r.powi(m as i32)).abs() < 1e-10 * r.powi(m as i32).max(1.0));
        }
    }
}
