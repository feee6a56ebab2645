//! The VCS family catalog and state constructors.
//!
//! A family is the data (ρ(m), N(r), λ(r), L): coefficient moments, closed
//! normalization, resolution density on (0, L) in the convention
//! ∫₀^L λ(r) r^{2m+1} dr = ρ(m), with measure weight W(r) = N(r)λ(r)/(2π).
//! States are |Z, j⟩ = N(|Z|)^{-1/2} Σ_m Z^m/√ρ(m) χ^j ⊗ φ_m on a truncated
//! mode space, with the dropped tail controlled by an explicit budget.

use crate::fock::TruncatedSpace;
use crate::linalg::{cx, identity, CMat, CVec};
use crate::matrixdomain::{diagonalize_quaternion, MatrixVariable, Quaternion};
use crate::specfun::{bessel_i_over_power, bessel_k, hyp1f2, ln_pochhammer, log_gamma, SpecFunError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative series-tail budget used when sizing truncations.
pub const TAIL_BUDGET: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum VcsError {
    #[error("unknown family name: {0}")]
    UnknownFamily(String),
    #[error("κ = {0} invalid: the SU(1,1) families need a half-integer κ ≥ 1")]
    InvalidKappa(f64),
    #[error("internal dimension must be ≥ 1")]
    InvalidDimension,
    #[error("label radius {r} outside the family domain [0, {bound})")]
    RadiusOutOfDomain { r: f64, bound: f64 },
    #[error("truncation M = {modes} leaves a series tail above budget; need M ≥ {required}")]
    TailBudget { modes: usize, required: usize },
    #[error("matrix variable has non-scalar modulus (deviation {0:.3e}); families are radial")]
    NonScalarModulus(f64),
    #[error("label dimension {got} does not match family internal dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("component index {j} out of range for n = {n}")]
    BadComponent { j: usize, n: usize },
    #[error("matrix is not an SU(1,1) element (defect {0:.3e})")]
    NotSu11(f64),
    #[error("sample point |z| = {0} not inside the unit disc")]
    OutsideDisc(f64),
    #[error("series did not meet the tail budget within {0} terms")]
    NoConvergence(usize),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Canonical,
    GilmorePerelomov,
    BarutGirardello,
    Interpolating,
}

impl Family {
    pub fn from_name(name: &str) -> Result<Self, VcsError> {
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "canonical" => Ok(Family::Canonical),
            "gilmore-perelomov" | "gp" | "g-p" => Ok(Family::GilmorePerelomov),
            "barut-girardello" | "bg" | "b-g" => Ok(Family::BarutGirardello),
            "interpolating" | "int" => Ok(Family::Interpolating),
            _ => Err(VcsError::UnknownFamily(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Canonical => "canonical",
            Family::GilmorePerelomov => "gilmore-perelomov",
            Family::BarutGirardello => "barut-girardello",
            Family::Interpolating => "interpolating",
        }
    }

    pub fn all() -> [Family; 4] {
        [
            Family::Canonical,
            Family::GilmorePerelomov,
            Family::BarutGirardello,
            Family::Interpolating,
        ]
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One coherent-state family at fixed κ, acting on C^n ⊗ 𝔥.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub family: Family,
    /// κ of the discrete series; 0 for the canonical family.
    pub kappa: f64,
    pub internal_dim: usize,
    two_kappa: i32,
}

impl FamilySpec {
    pub fn new(family: Family, kappa: f64, internal_dim: usize) -> Result<Self, VcsError> {
        if internal_dim == 0 {
            return Err(VcsError::InvalidDimension);
        }
        if family == Family::Canonical {
            return Ok(FamilySpec { family, kappa: 0.0, internal_dim, two_kappa: 0 });
        }
        let two_kappa = 2.0 * kappa;
        if !two_kappa.is_finite()
            || (two_kappa - two_kappa.round()).abs() > 1e-12
            || two_kappa < 2.0 - 1e-12
        {
            return Err(VcsError::InvalidKappa(kappa));
        }
        let two_kappa = two_kappa.round() as i32;
        Ok(FamilySpec { family, kappa: two_kappa as f64 / 2.0, internal_dim, two_kappa })
    }

    /// x_m = ρ(m)/ρ(m-1) for m ≥ 1.
    pub fn x(&self, m: u32) -> f64 {
        let m = m as f64;
        let k2 = self.two_kappa as f64;
        match self.family {
            Family::Canonical => m,
            Family::GilmorePerelomov => m / (k2 + m - 1.0),
            Family::BarutGirardello => m * (k2 + m - 1.0),
            Family::Interpolating => (k2 + m - 1.0).powi(2),
        }
    }

    /// ln ρ(m). ρ is kept in each family's printed convention, so ρ(0) is
    /// Γ(2κ) for B-G and Γ(2κ)² for INT rather than 1.
    pub fn ln_rho(&self, m: u32) -> f64 {
        let lg = |x: f64| log_gamma(x).expect("positive argument").value;
        let m1 = m as f64 + 1.0;
        let k2 = self.two_kappa as f64;
        match self.family {
            Family::Canonical => lg(m1),
            Family::GilmorePerelomov => {
                lg(m1) - ln_pochhammer(k2, m).expect("2κ ≥ 2 by construction")
            }
            Family::BarutGirardello => lg(m1) + lg(k2 + m as f64),
            Family::Interpolating => 2.0 * lg(k2 + m as f64),
        }
    }

    /// Radius of convergence L = √(lim x_m): 1 for G-P, ∞ otherwise.
    pub fn radial_bound(&self) -> f64 {
        match self.family {
            Family::GilmorePerelomov => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// Closed-form N(r) = Σ_m Tr|A(r)|^{2m}/ρ(m) = n · (scalar series).
    pub fn norm_const(&self, r: f64) -> Result<f64, VcsError> {
        let n = self.internal_dim as f64;
        let r2 = r * r;
        let k2f = self.two_kappa as f64;
        let value = match self.family {
            Family::Canonical => r2.exp(),
            Family::GilmorePerelomov => {
                if r >= 1.0 {
                    return Err(VcsError::RadiusOutOfDomain { r, bound: 1.0 });
                }
                (1.0 - r2).powi(-self.two_kappa)
            }
            Family::BarutGirardello => bessel_i_over_power(k2f - 1.0, r)?.value,
            Family::Interpolating => {
                let f = hyp1f2(1.0, k2f, k2f, r2)?.value;
                let lg = log_gamma(k2f)?.value;
                f * (-2.0 * lg).exp()
            }
        };
        Ok(n * value)
    }

    /// N(r) summed term by term from ρ; agrees with `norm_const` to 1e-10.
    pub fn norm_const_series(&self, r: f64) -> Result<f64, VcsError> {
        if r >= self.radial_bound() {
            return Err(VcsError::RadiusOutOfDomain { r, bound: self.radial_bound() });
        }
        let r2 = r * r;
        let mut term = (-self.ln_rho(0)).exp();
        let mut sum = term;
        for m in 1..=1_000_000u32 {
            term *= r2 / self.x(m);
            sum += term;
            if term <= 1e-17 * sum {
                return Ok(self.internal_dim as f64 * sum);
            }
        }
        Err(VcsError::NoConvergence(1_000_000))
    }

    /// Resolution density λ(r) with ∫₀^L λ(r) r^{2m+1} dr = ρ(m).
    ///
    /// The B-G and INT densities involve K_ν and blow up logarithmically or
    /// like a power at r = 0; they are only evaluated at r > 0.
    pub fn lambda(&self, r: f64) -> Result<f64, VcsError> {
        let k2 = self.two_kappa;
        Ok(match self.family {
            Family::Canonical => 2.0 * (-r * r).exp(),
            Family::GilmorePerelomov => {
                (k2 as f64 - 1.0) * 2.0 * (1.0 - r * r).powi(k2 - 2)
            }
            Family::BarutGirardello => {
                4.0 * r.powi(k2 - 1) * bessel_k(k2 as f64 - 1.0, 2.0 * r)?.value
            }
            Family::Interpolating => 4.0 * r.powi(2 * k2 - 2) * bessel_k(0.0, 2.0 * r)?.value,
        })
    }

    /// Measure weight W(r) = N(r) λ(r) / (2π); for the quaternionic
    /// canonical family this is the constant 2/π.
    pub fn weight(&self, r: f64) -> Result<f64, VcsError> {
        Ok(self.norm_const(r)? * self.lambda(r)? / (2.0 * std::f64::consts::PI))
    }

    pub fn discrete_series(&self) -> bool {
        self.family != Family::Canonical
    }
}

/// Smallest M whose dropped tail Σ_{m≥M} r^{2m}/ρ(m) is below eps times the
/// full scalar series, using the geometric bound from monotone x_m.
pub fn required_truncation(spec: &FamilySpec, r: f64, eps: f64) -> Result<usize, VcsError> {
    if r >= spec.radial_bound() {
        return Err(VcsError::RadiusOutOfDomain { r, bound: spec.radial_bound() });
    }
    let r2 = r * r;
    let mut term = (-spec.ln_rho(0)).exp();
    let mut sum = 0.0f64;
    const CAP: usize = 1_000_000;
    for m in 1..=CAP {
        sum += term;
        let q = r2 / spec.x(m as u32);
        if q < 1.0 && term * q / (1.0 - q) <= eps * sum {
            return Ok(m.max(2));
        }
        term *= q;
    }
    Err(VcsError::NoConvergence(CAP))
}

/// A vector in C^n ⊗ C^M with the family metadata it was built under.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub space: TruncatedSpace,
    pub family: Family,
    pub kappa: f64,
    pub radius: f64,
    pub coeffs: CVec,
}

impl StateVector {
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn component(&self, j: usize, m: usize) -> Complex64 {
        self.coeffs[self.space.index(j, m)]
    }

    /// The C^n vector ψ_m of coefficients at mode m.
    pub fn mode_vector(&self, m: usize) -> CVec {
        CVec::from_fn(self.space.internal_dim, |j, _| self.coeffs[self.space.index(j, m)])
    }
}

/// Extracts the scalar radius of a matrix variable, requiring ZZ† = r²·I.
fn scalar_radius(z: &CMat) -> Result<f64, VcsError> {
    let n = z.nrows();
    let prod = z * z.adjoint();
    let r2 = prod.diagonal().iter().map(|c| c.re).sum::<f64>() / n as f64;
    let dev = crate::linalg::operator_norm(&(prod - identity(n).map(|c| c * r2)));
    if dev > 1e-10 * r2.max(1.0) {
        return Err(VcsError::NonScalarModulus(dev));
    }
    Ok(r2.max(0.0).sqrt())
}

/// The scaled label powers C_m = Z^m e^{-ln ρ(m)/2}, m = 0..M-1, built by
/// the stable iteration C_m = Z C_{m-1}/√x_m.
pub fn label_powers(spec: &FamilySpec, z: &CMat, modes: usize) -> Vec<CMat> {
    let n = z.nrows();
    let mut out = Vec::with_capacity(modes);
    out.push(identity(n).map(|c| c * (-0.5 * spec.ln_rho(0)).exp()));
    for m in 1..modes {
        let prev = &out[m - 1];
        let scale = spec.x(m as u32).sqrt().recip();
        out.push((z * prev).map(|c| c * scale));
    }
    out
}

/// |Z, j⟩ = N(|Z|)^{-1/2} Σ_{m<M} Z^m/√ρ(m) χ^j ⊗ φ_m.
///
/// M must satisfy the tail budget for |Z|'s radius; the normalization uses
/// the family's closed form, so a unit norm certifies it against the series.
pub fn build_state(
    spec: &FamilySpec,
    z: &MatrixVariable,
    j: usize,
    modes: usize,
) -> Result<StateVector, VcsError> {
    let n = spec.internal_dim;
    if z.dim() != n {
        return Err(VcsError::DimensionMismatch { got: z.dim(), want: n });
    }
    if j >= n {
        return Err(VcsError::BadComponent { j, n });
    }
    let zm = z.evaluate();
    let r = scalar_radius(&zm)?;
    if r >= spec.radial_bound() {
        return Err(VcsError::RadiusOutOfDomain { r, bound: spec.radial_bound() });
    }
    let required = required_truncation(spec, r, TAIL_BUDGET)?;
    if modes < required {
        return Err(VcsError::TailBudget { modes, required });
    }
    let space = TruncatedSpace::new(n, modes);
    let scale = cx(spec.norm_const(r)?.sqrt().recip(), 0.0);
    let mut coeffs = CVec::zeros(space.total_dim());
    for (m, cm) in label_powers(spec, &zm, modes).iter().enumerate() {
        for jp in 0..n {
            coeffs[space.index(jp, m)] = scale * cm[(jp, j)];
        }
    }
    Ok(StateVector { space, family: spec.family, kappa: spec.kappa, radius: r, coeffs })
}

/// K(Z†, Z′)_{jℓ} = ⟨Z, j | Z′, ℓ⟩ via built states.
pub fn kernel(
    spec: &FamilySpec,
    z: &MatrixVariable,
    zp: &MatrixVariable,
    modes: usize,
) -> Result<CMat, VcsError> {
    let n = spec.internal_dim;
    let left: Vec<StateVector> =
        (0..n).map(|j| build_state(spec, z, j, modes)).collect::<Result<_, _>>()?;
    let right: Vec<StateVector> =
        (0..n).map(|l| build_state(spec, zp, l, modes)).collect::<Result<_, _>>()?;
    Ok(CMat::from_fn(n, n, |j, l| left[j].coeffs.dotc(&right[l].coeffs)))
}

/// The same kernel from the series N^{-1/2} N′^{-1/2} Σ_m (Z^m)† (Z′^m)/ρ(m).
pub fn kernel_series(
    spec: &FamilySpec,
    z: &MatrixVariable,
    zp: &MatrixVariable,
    modes: usize,
) -> Result<CMat, VcsError> {
    let n = spec.internal_dim;
    if z.dim() != n || zp.dim() != n {
        return Err(VcsError::DimensionMismatch { got: z.dim().max(zp.dim()), want: n });
    }
    let (zm, zpm) = (z.evaluate(), zp.evaluate());
    let (r, rp) = (scalar_radius(&zm)?, scalar_radius(&zpm)?);
    let scale = (spec.norm_const(r)? * spec.norm_const(rp)?).sqrt().recip();
    let mut sum = CMat::zeros(n, n);
    for (cm, cpm) in label_powers(spec, &zm, modes)
        .iter()
        .zip(label_powers(spec, &zpm, modes).iter())
    {
        sum += cm.adjoint() * cpm;
    }
    Ok(sum.map(|c| c * scale))
}

/// Residual ‖(I⊗a)|Z,j⟩ − (Z⊗I)|Z,j⟩‖ of the annihilation eigenrelation,
/// computed matrix-free. For exact coefficients this equals the single
/// boundary term N^{-1/2} r^M/√ρ(M-1).
pub fn annihilation_residual(spec: &FamilySpec, z: &MatrixVariable, state: &StateVector) -> f64 {
    let modes = state.space.modes;
    let zm = z.evaluate();
    let mut acc = 0.0f64;
    for m in 0..modes {
        let lowered = if m + 1 < modes {
            state.mode_vector(m + 1).map(|c| c * spec.x(m as u32 + 1).sqrt())
        } else {
            CVec::zeros(state.space.internal_dim)
        };
        let diff = lowered - &zm * state.mode_vector(m);
        acc += diff.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    acc.sqrt()
}

/// The minimal-uncertainty pair |𝔮,±⟩ = e^{-r²/2} Σ_m z^{(±)m}/√m! χ^± ⊗ φ_m
/// with (u, z) from the quaternion diagonalization; canonical family, unit
/// norm, ΔQ·ΔP = 1/2.
pub fn minimal_uncertainty_pair(
    q: &Quaternion,
    modes: usize,
) -> Result<(StateVector, StateVector), VcsError> {
    let spec = FamilySpec::new(Family::Canonical, 0.0, 2)?;
    let r = q.modulus();
    let required = required_truncation(&spec, r, TAIL_BUDGET)?;
    if modes < required {
        return Err(VcsError::TailBudget { modes, required });
    }
    let (u, z) = diagonalize_quaternion(q);
    let space = TruncatedSpace::new(2, modes);
    let build = |eigval: Complex64, col: usize| {
        let chi = u.column(col);
        let mut coeffs = CVec::zeros(space.total_dim());
        let mut factor = cx((-0.5 * r * r).exp(), 0.0);
        for m in 0..modes {
            if m > 0 {
                factor *= eigval / cx((m as f64).sqrt(), 0.0);
            }
            for jp in 0..2 {
                coeffs[space.index(jp, m)] = factor * chi[jp];
            }
        }
        StateVector { space, family: Family::Canonical, kappa: 0.0, radius: r, coeffs }
    };
    Ok((build(z, 0), build(z.conj(), 1)))
}

/// ⟨ψ|Op|ψ⟩ for hermitian Op and a normalized coefficient vector.
pub fn expectation(op: &CMat, psi: &CVec) -> f64 {
    (psi.adjoint() * op * psi)[(0, 0)].re
}

/// ΔQ·ΔP with ΔA = √(⟨A²⟩ − ⟨A⟩²).
pub fn uncertainty_product(q_op: &CMat, p_op: &CMat, psi: &CVec) -> f64 {
    let var = |op: &CMat| {
        let mean = expectation(op, psi);
        let second = expectation(&(op * op), psi);
        (second - mean * mean).max(0.0)
    };
    (var(q_op) * var(p_op)).sqrt()
}

/// 𝔮 = 𝔴 tanh(|𝔴|)/|𝔴|, the disentangling map; 0 ↦ 0, image radius < 1.
pub fn disentangle_map(w: &Quaternion) -> Quaternion {
    let r = w.modulus();
    if r == 0.0 {
        return Quaternion::zero();
    }
    w.scale(r.tanh() / r)
}

/// [[α, β], [β̄, ᾱ]] from its first row.
pub fn su11_element(alpha: Complex64, beta: Complex64) -> CMat {
    CMat::from_row_slice(2, 2, &[alpha, beta, beta.conj(), alpha.conj()])
}

fn check_su11(g: &CMat) -> Result<(Complex64, Complex64), VcsError> {
    let (alpha, beta) = (g[(0, 0)], g[(0, 1)]);
    let defect = (g[(1, 0)] - beta.conj())
        .norm()
        .max((g[(1, 1)] - alpha.conj()).norm())
        .max((alpha.norm_sqr() - beta.norm_sqr() - 1.0).abs());
    if defect > 1e-10 {
        return Err(VcsError::NotSu11(defect));
    }
    Ok((alpha, beta))
}

fn inv_pow_2k(base: Complex64, two_kappa: i32) -> Complex64 {
    base.powu(two_kappa as u32).finv()
}

/// (U^κ(g) f)(z) = (α − β̄z)^{-2κ} f((ᾱz − β)/(α − β̄z)) for f given by its
/// coefficients in the monomial basis u_m(z) = √((2κ)_m/m!) z^m.
pub fn mobius_action(
    kappa: f64,
    g: &CMat,
    f_coeffs: &[Complex64],
    z: Complex64,
) -> Result<Complex64, VcsError> {
    let spec = FamilySpec::new(Family::GilmorePerelomov, kappa, 1)?;
    let (alpha, beta) = check_su11(g)?;
    if z.norm() >= 1.0 {
        return Err(VcsError::OutsideDisc(z.norm()));
    }
    let denom = alpha - beta.conj() * z;
    let w = (alpha.conj() * z - beta) / denom;
    if w.norm() >= 1.0 + 1e-12 {
        return Err(VcsError::OutsideDisc(w.norm()));
    }
    Ok(inv_pow_2k(denom, spec.two_kappa) * eval_monomial_basis(spec.two_kappa, f_coeffs, w))
}

/// Σ_m c_m u_m(w) with u_m(w) = √((2κ)_m/m!) w^m.
pub fn eval_monomial_basis(two_kappa: i32, coeffs: &[Complex64], w: Complex64) -> Complex64 {
    let mut basis = cx(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, c) in coeffs.iter().enumerate() {
        if m > 0 {
            let m = m as f64;
            basis *= w * cx(((two_kappa as f64 + m - 1.0) / m).sqrt(), 0.0);
        }
        sum += c * basis;
    }
    sum
}

/// The holomorphic image of Ψ at the quaternion label 𝔮: both the direct
/// inner products F_j = ⟨𝔮, j|Ψ⟩ and the projector decomposition
/// (1/√2) e^{-r²/2} [P⁺ f(z̄) + P⁻ f(z)], f(w) = Σ_m w^m ψ_m/√m!.
pub struct CoherentImage {
    pub direct: CVec,
    pub decomposition: CVec,
}

pub fn coherent_image(psi: &StateVector, q: &Quaternion) -> Result<CoherentImage, VcsError> {
    if psi.family != Family::Canonical || psi.space.internal_dim != 2 {
        return Err(VcsError::DimensionMismatch { got: psi.space.internal_dim, want: 2 });
    }
    let modes = psi.space.modes;
    let r = q.modulus();
    let qm = q.matrix();
    let spec = FamilySpec::new(Family::Canonical, 0.0, 2)?;
    let gauss = (-0.5 * r * r).exp() / 2.0f64.sqrt();

    // direct: ⟨𝔮, j|Ψ⟩ = Σ_m (C_m χ^j)† ψ_m with C_m = gauss · 𝔮^m/√m!
    let mut direct = CVec::zeros(2);
    for (m, cm) in label_powers(&spec, &qm, modes).iter().enumerate() {
        let psi_m = psi.mode_vector(m);
        let contrib = cm.adjoint() * psi_m;
        direct += contrib.map(|c| c * gauss);
    }

    // decomposition: eigenprojectors of 𝔮 applied to f at conjugate points
    let (u, z) = diagonalize_quaternion(q);
    let eval_f = |w: Complex64| {
        let mut factor = cx(1.0, 0.0);
        let mut sum = CVec::zeros(2);
        for m in 0..modes {
            if m > 0 {
                factor *= w / cx((m as f64).sqrt(), 0.0);
            }
            sum += psi.mode_vector(m).map(|c| c * factor);
        }
        sum
    };
    let e = |k: usize| {
        let mut m = CMat::zeros(2, 2);
        m[(k, k)] = cx(1.0, 0.0);
        m
    };
    let p_plus = &u * e(0) * u.adjoint();
    let p_minus = &u * e(1) * u.adjoint();
    let decomposition =
        (p_plus * eval_f(z.conj()) + p_minus * eval_f(z)).map(|c| c * gauss);
    Ok(CoherentImage { direct, decomposition })
}
