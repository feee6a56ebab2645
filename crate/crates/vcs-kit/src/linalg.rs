//! Dense complex matrix helpers: norms, hermitian square roots, exponentials.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("input is not anti-hermitian: ‖X + X†‖ = {0:.3e}")]
    NotAntiHermitian(f64),
    #[error("linear solve failed in Padé step")]
    SolveFailed,
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest singular value, computed as √λ_max(M†M) with a hermitian eigensolve.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().map(|x| x.max(0.0)).fold(0.0, f64::max).sqrt()
}

/// Maximum column sum of absolute values (the induced 1-norm).
pub fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues within round-off below zero are clamped; anything more negative
/// indicates the input was not PSD and is reported through the eigenvalue.
pub fn hermitian_sqrt(m: &CMat) -> Result<CMat, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare(m.nrows(), m.ncols()));
    }
    let eig = m.clone().symmetric_eigen();
    let vals = eig.eigenvalues.map(|x| cx(x.max(0.0).sqrt(), 0.0));
    Ok(&eig.eigenvectors * CMat::from_diagonal(&vals) * eig.eigenvectors.adjoint())
}

/// Matrix exponential by Padé(13) with scaling and squaring.
pub fn expm(a: &CMat) -> Result<CMat, LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare(a.nrows(), a.ncols()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    const THETA_13: f64 = 5.371_920_351_148_152;
    #[rustfmt::skip]
    const B: [f64; 14] = [
        64_764_752_532_480_000.0, 32_382_376_266_240_000.0, 7_771_770_303_897_600.0,
        1_187_353_796_428_800.0, 129_060_195_264_000.0, 10_559_470_521_600.0,
        670_442_572_800.0, 33_522_128_640.0, 1_323_241_920.0, 40_840_800.0,
        960_960.0, 16_380.0, 182.0, 1.0,
    ];
    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.map(|z| z / 2f64.powi(s));
    let id = identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner = &a6 * (a6.map(|z| z * B[13]) + a4.map(|z| z * B[11]) + a2.map(|z| z * B[9]))
        + a6.map(|z| z * B[7])
        + a4.map(|z| z * B[5])
        + a2.map(|z| z * B[3])
        + id.map(|z| z * B[1]);
    let u = &scaled * u_inner;
    let v = &a6 * (a6.map(|z| z * B[12]) + a4.map(|z| z * B[10]) + a2.map(|z| z * B[8]))
        + a6.map(|z| z * B[6])
        + a4.map(|z| z * B[4])
        + a2.map(|z| z * B[2])
        + id.map(|z| z * B[0]);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut r = lhs.lu().solve(&rhs).ok_or(LinalgError::SolveFailed)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Exponential of an anti-hermitian matrix via the hermitian eigen route.
///
/// X = iH with H hermitian, so e^X = U e^{iλ} U† is unitary to round-off.
/// Rejects inputs with ‖X + X†‖ above 1e-10 (relative to ‖X‖).
pub fn expm_antihermitian(x: &CMat) -> Result<CMat, LinalgError> {
    if x.nrows() != x.ncols() {
        return Err(LinalgError::NotSquare(x.nrows(), x.ncols()));
    }
    let defect = operator_norm(&(x + x.adjoint()));
    let scale = operator_norm(x).max(1.0);
    if defect > 1e-10 * scale {
        return Err(LinalgError::NotAntiHermitian(defect));
    }
    let h = x.map(|z| z * cx(0.0, -1.0)); // H = -iX is hermitian
    let eig = h.symmetric_eigen();
    let phases = eig.eigenvalues.map(|lam| cx(0.0, lam).exp());
    Ok(&eig.eigenvectors * CMat::from_diagonal(&phases) * eig.eigenvectors.adjoint())
}
