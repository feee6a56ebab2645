//! Truncated Fock space C^n ⊗ span{φ_0, …, φ_{M-1}} and the operators that
//! live on it: generalized ladder operators a|φ_m⟩ = √x_m |φ_{m-1}⟩ for a
//! positive sequence x_m, quadratures, su(1,1) generators, and unitary
//! exponentials of anti-hermitian matrices.
//!
//! Truncation is handled explicitly: every operator carries an `interior`
//! marker, the number of leading modes on which the truncated matrix acts
//! exactly like its infinite-dimensional counterpart. Algebraic identities
//! are only asserted on inputs supported below the interior of every factor.

use crate::linalg::{cx, expm_antihermitian, identity, CMat, LinalgError};

/// C^n ⊗ C^M with basis χ^j ⊗ φ_m at flat index j·M + m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSpace {
    pub internal_dim: usize,
    pub modes: usize,
}

impl TruncatedSpace {
    pub fn new(internal_dim: usize, modes: usize) -> Self {
        assert!(internal_dim >= 1 && modes >= 1, "space dimensions must be positive");
        TruncatedSpace { internal_dim, modes }
    }

    pub fn total_dim(&self) -> usize {
        self.internal_dim * self.modes
    }

    pub fn index(&self, j: usize, m: usize) -> usize {
        debug_assert!(j < self.internal_dim && m < self.modes);
        j * self.modes + m
    }
}

/// A truncated operator together with its interior: the number of leading
/// modes m on which it agrees with the untruncated operator (both the value
/// and the absence of leakage past mode M-1).
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub mat: CMat,
    pub interior: usize,
}

/// Lifts a mode-space operator to the full space as I_n ⊗ op.
pub fn tensorize(space: &TruncatedSpace, op: &CMat) -> CMat {
    identity(space.internal_dim).kronecker(op)
}

pub struct Ladder {
    pub lowering: OperatorMatrix,
    pub raising: OperatorMatrix,
    /// a†a = diag(x_m); this is the number operator exactly when x_m = m.
    pub number: OperatorMatrix,
}

/// Builds a|φ_m⟩ = √x_m |φ_{m-1}⟩ and its adjoint on M modes.
///
/// The raising operator loses the transition out of the top mode, so its
/// interior is M-1; lowering never leaves the space and a†a is diagonal, so
/// both are exact on all M modes.
pub fn build_ladder(modes: usize, x: impl Fn(u32) -> f64) -> Ladder {
    assert!(modes >= 1);
    let mut a = CMat::zeros(modes, modes);
    for m in 1..modes {
        let xm = x(m as u32);
        assert!(xm > 0.0, "x_{m} must be positive, got {xm}");
        a[(m - 1, m)] = cx(xm.sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let number = &adag * &a;
    Ladder {
        lowering: OperatorMatrix { mat: a, interior: modes },
        raising: OperatorMatrix { mat: adag, interior: modes - 1 },
        number: OperatorMatrix { mat: number, interior: modes },
    }
}

/// Hermitian quadratures q̂ = (a + a†)/√2 and p̂ = -i(a - a†)/√2.
///
/// Both matrices are exactly hermitian in floating point: paired entries are
/// produced by the same multiplications.
pub fn quadrature_pair(ladder: &Ladder) -> (OperatorMatrix, OperatorMatrix) {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let a = &ladder.lowering.mat;
    let adag = &ladder.raising.mat;
    let q = (a + adag).map(|z| z * inv_sqrt2);
    let p = (a - adag).map(|z| z * cx(0.0, -inv_sqrt2));
    let interior = ladder.raising.interior;
    (OperatorMatrix { mat: q, interior }, OperatorMatrix { mat: p, interior })
}

pub struct Su11 {
    pub k_minus: OperatorMatrix,
    pub k_plus: OperatorMatrix,
    pub k3: OperatorMatrix,
}

/// Discrete-series su(1,1) generators on M modes:
/// K₋|κ,m⟩ = √(m(2κ+m-1)) |κ,m-1⟩, K₊ = K₋†, K₃|κ,m⟩ = (κ+m)|κ,m⟩.
///
/// On the interior they satisfy [K₃, K±] = ±K± and [K₋, K₊] = 2K₃, with
/// Casimir ½(K₋K₊ + K₊K₋) - K₃² = κ(1-κ)·I.
pub fn su11_generators(kappa: f64, modes: usize) -> Su11 {
    assert!(kappa > 0.0);
    let ladder = build_ladder(modes, |m| {
        let m = m as f64;
        m * (2.0 * kappa + m - 1.0)
    });
    let k3 = CMat::from_fn(modes, modes, |i, j| {
        if i == j {
            cx(kappa + i as f64, 0.0)
        } else {
            cx(0.0, 0.0)
        }
    });
    Su11 {
        k_minus: ladder.lowering,
        k_plus: ladder.raising,
        k3: OperatorMatrix { mat: k3, interior: modes },
    }
}

pub struct Interpolating {
    pub lowering: OperatorMatrix,
    pub raising: OperatorMatrix,
    /// Ñ = diag(2κ + m - ½), the shifted number operator with
    /// [a, a†] = 2Ñ and ½(aa† + a†a) - Ñ² = ¼·I on interior modes m ≥ 1.
    ///
    /// The lowest-weight condition a φ₀ = 0 makes both relations fail at
    /// m = 0 by exactly (2κ-1)² (resp. -(2κ-1)²/2); they close on the whole
    /// space only at κ = ½.
    pub n_tilde: OperatorMatrix,
}

/// Generators of the interpolating algebra: a|κ,m⟩ = (2κ+m-1)|κ,m-1⟩.
pub fn int_generators(kappa: f64, modes: usize) -> Interpolating {
    assert!(kappa > 0.0);
    let ladder = build_ladder(modes, |m| (2.0 * kappa + m as f64 - 1.0).powi(2));
    let n_tilde = CMat::from_fn(modes, modes, |i, j| {
        if i == j {
            cx(2.0 * kappa + i as f64 - 0.5, 0.0)
        } else {
            cx(0.0, 0.0)
        }
    });
    Interpolating {
        lowering: ladder.lowering,
        raising: ladder.raising,
        n_tilde: OperatorMatrix { mat: n_tilde, interior: modes },
    }
}

/// e^X for anti-hermitian X, guaranteed unitary up to roundoff.
pub fn group_exponential(x: &CMat) -> Result<CMat, LinalgError> {
    expm_antihermitian(x)
}
