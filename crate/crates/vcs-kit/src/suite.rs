//! Certification suites: per-family check batteries, report streaming,
//! and state dumps. One `SuiteConfig` drives one deterministic run.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::matrixdomain::{PolarQuaternion, Quaternion};
use crate::vcs::{build_state, kernel, Family, FamilySpec, VcsError};
use crate::verify::{
    check_algebra, check_angle_convention, check_bch, check_coherent_image, check_displacement,
    check_eigenrelation, check_isometry, check_kernel, check_moment, check_normalization,
    check_resolution, check_su11_exponential, check_truncation, check_uncertainty_bound,
    check_uncertainty_saturation, gram_operator, radial_grid, AlgebraRep, VerificationReport,
};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Vcs(#[from] VcsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Jsonl,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(ReportFormat::Jsonl),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected jsonl or csv)")),
        }
    }
}

/// Everything a suite run depends on. Serializable so a config file and
/// the CLI flags describe exactly the same set of tunables.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub family: Family,
    pub kappa: f64,
    pub n: usize,
    #[serde(rename = "M")]
    pub modes: usize,
    /// Highest mode index certified by the quadrature checks
    /// (resolution, kernel, isometry). Clamped to M−1.
    #[serde(rename = "M_check")]
    pub m_check: usize,
    pub grid_r: usize,
    pub grid_zeta: usize,
    /// (φ, ψ) node counts for the internal-sphere average.
    pub grid_sphere: (usize, usize),
    /// Label-radius ceiling for sampled states; family default if absent.
    pub rmax: Option<f64>,
    /// Base tolerance; individual checks may be overridden via `tolerances`.
    pub tol: f64,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            family: Family::Canonical,
            kappa: 1.0,
            n: 2,
            modes: 64,
            m_check: 24,
            grid_r: 200,
            grid_zeta: 256,
            grid_sphere: (32, 64),
            rmax: None,
            tol: 1e-6,
            tolerances: BTreeMap::new(),
            seed: 0xC0FFEE,
            out: None,
            format: ReportFormat::Jsonl,
        }
    }
}

impl SuiteConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, SuiteError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn spec(&self) -> Result<FamilySpec, SuiteError> {
        if self.n != 2 {
            return Err(SuiteError::Config(format!(
                "only the quaternionic domain (n = 2) is implemented, got n = {}",
                self.n
            )));
        }
        Ok(FamilySpec::new(self.family, self.kappa, self.n)?)
    }

    /// Sampled label radii stay below this; the G-P default keeps the
    /// stock M = 64 within the tail budget at every admissible κ ≤ 2.
    pub fn stock_rmax(&self) -> f64 {
        self.rmax.unwrap_or(match self.family {
            Family::GilmorePerelomov => 0.65,
            _ => 3.0,
        })
    }

    pub fn tolerance(&self, check: &str) -> f64 {
        if let Some(&t) = self.tolerances.get(check) {
            return t;
        }
        match check {
            "truncation" => 1.0,
            _ => self.tol,
        }
    }

    fn validate(&self) -> Result<(), SuiteError> {
        let bad = |msg: String| Err(SuiteError::Config(msg));
        if self.modes < 2 {
            return bad(format!("M = {} is too small (need ≥ 2)", self.modes));
        }
        if self.m_check == 0 {
            return bad("M_check must be ≥ 1".into());
        }
        let spec = self.spec()?;
        let rmax = self.stock_rmax();
        if rmax.is_nan() || rmax <= 0.0 || rmax >= spec.radial_bound() {
            return bad(format!(
                "rmax = {rmax} outside the open radial domain (0, {})",
                spec.radial_bound()
            ));
        }
        let mc = self.effective_m_check();
        if self.grid_zeta < 2 * (mc + 1) {
            return bad(format!(
                "grid_zeta = {} under-resolves {} certified modes (need ≥ {})",
                self.grid_zeta,
                mc + 1,
                2 * (mc + 1)
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol = {} must be positive", self.tol));
        }
        Ok(())
    }

    /// M_check clamped so that M_check < M always holds.
    pub fn effective_m_check(&self) -> usize {
        self.m_check.min(self.modes - 1)
    }
}

pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub failed: usize,
}

const NORMALIZATION_SAMPLES: usize = 10;
const KERNEL_PAIRS: usize = 4;
const ISOMETRY_SAMPLES: usize = 6;
const EIGEN_SAMPLES: usize = 6;
const UNCERT_SAT_SAMPLES: usize = 6;
const UNCERT_BOUND_SAMPLES: usize = 20;
const DISPLACEMENT_SAMPLES: usize = 3;
const COHERENT_SAMPLES: usize = 4;
const SU11_SAMPLES: usize = 2;
const SU11_WMAX: f64 = 0.85;

/// The full battery for one family. Checks run in a fixed order off a
/// single seeded stream, so reports are byte-identical across runs.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteOutcome, SuiteError> {
    cfg.validate()?;
    let spec = cfg.spec()?;
    let rng = &mut ChaCha8Rng::seed_from_u64(cfg.seed);
    let rmax = cfg.stock_rmax();
    let m_check = cfg.effective_m_check();
    let mut reports = Vec::new();

    reports.push(check_truncation(&spec, cfg.modes, rmax));
    reports.push(check_normalization(
        &spec,
        cfg.modes,
        rmax,
        NORMALIZATION_SAMPLES,
        rng,
        cfg.tolerance("normalization"),
    ));

    let grid = radial_grid(&spec, m_check, cfg.grid_r);
    reports.push(check_moment(&spec, &grid, m_check, cfg.tolerance("moment")));
    let (n_phi, n_psi) = cfg.grid_sphere;
    match gram_operator(&spec, &grid, cfg.grid_zeta, n_phi, n_psi, m_check + 1) {
        Ok(gram) => {
            reports.push(check_resolution(&spec, &gram, cfg.tolerance("resolution")));
            reports.push(check_kernel(
                &spec,
                &gram,
                rmax,
                KERNEL_PAIRS,
                rng,
                cfg.tolerance("kernel"),
            ));
            reports.push(check_isometry(
                &spec,
                &gram,
                ISOMETRY_SAMPLES,
                rng,
                cfg.tolerance("isometry"),
            ));
        }
        Err(e) => {
            for name in ["resolution", "kernel", "isometry"] {
                reports.push(VerificationReport::from_error(
                    name,
                    &spec,
                    m_check + 1,
                    cfg.tolerance(name),
                    &e,
                ));
            }
        }
    }

    reports.push(check_eigenrelation(
        &spec,
        cfg.modes,
        rmax,
        EIGEN_SAMPLES,
        rng,
        cfg.tolerance("eigenrelation"),
    ));

    let rep = match spec.family {
        Family::Canonical => AlgebraRep::Oscillator,
        Family::GilmorePerelomov | Family::BarutGirardello => AlgebraRep::Su11,
        Family::Interpolating => AlgebraRep::Interpolating,
    };
    reports.push(check_algebra(rep, &spec, cfg.modes, cfg.tolerance("algebra")));

    if spec.family == Family::Canonical {
        reports.push(check_uncertainty_saturation(
            cfg.modes,
            rmax.min(2.0),
            UNCERT_SAT_SAMPLES,
            rng,
            cfg.tolerance("uncertainty-saturation"),
        ));
        if cfg.modes >= 10 {
            let support = (cfg.modes - 8).min(32);
            reports.push(check_uncertainty_bound(
                cfg.modes,
                support,
                UNCERT_BOUND_SAMPLES,
                rng,
                cfg.tolerance("uncertainty-bound"),
            ));
        }
        reports.push(check_displacement(
            cfg.modes,
            rmax.min(1.5),
            DISPLACEMENT_SAMPLES,
            rng,
            cfg.tolerance("displacement"),
        ));
        reports.push(check_bch(cfg.modes, rmax.min(1.5), rng, cfg.tolerance("bch")));
        reports.push(check_coherent_image(
            cfg.modes,
            rmax.min(2.0),
            COHERENT_SAMPLES,
            rng,
            cfg.tolerance("coherent-image"),
        ));
        reports.push(check_angle_convention(cfg.tolerance("angle-convention")));
    }

    if spec.family == Family::GilmorePerelomov {
        reports.push(check_su11_exponential(
            spec.kappa,
            cfg.modes,
            SU11_WMAX,
            SU11_SAMPLES,
            rng,
            cfg.tolerance("su11-exponential"),
        ));
    }

    let failed = reports.iter().filter(|r| !r.pass).count();
    Ok(SuiteOutcome { reports, failed })
}

/// Stream reports as JSON lines or CSV rows (params as a JSON string column).
pub fn write_reports(
    reports: &[VerificationReport],
    format: ReportFormat,
    out: &mut dyn Write,
) -> Result<(), SuiteError> {
    match format {
        ReportFormat::Jsonl => {
            for r in reports {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "family", "kappa", "M", "residual", "tol", "pass", "params"])
                .map_err(|e| SuiteError::Config(e.to_string()))?;
            for r in reports {
                w.write_record([
                    r.check.as_str(),
                    r.family.as_str(),
                    &r.kappa.to_string(),
                    &r.modes.to_string(),
                    &r.residual.to_string(),
                    &r.tol.to_string(),
                    &r.pass.to_string(),
                    &r.params.to_string(),
                ])
                .map_err(|e| SuiteError::Config(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Coefficient dump for one state: quadruples [j, m, re, im] (exact zeros
/// skipped) plus the kernel row against the origin reference label.
pub fn dump_state(
    cfg: &SuiteConfig,
    label: &PolarQuaternion,
    j: usize,
) -> Result<serde_json::Value, SuiteError> {
    let spec = cfg.spec()?;
    if label.r >= spec.radial_bound() {
        return Err(VcsError::RadiusOutOfDomain { r: label.r, bound: spec.radial_bound() }.into());
    }
    let q = Quaternion::from_polar(label);
    let v = q.to_variable();
    let state = build_state(&spec, &v, j, cfg.modes)?;
    let mut quads = Vec::new();
    for jp in 0..spec.internal_dim {
        for m in 0..cfg.modes {
            let c = state.component(jp, m);
            if c.re != 0.0 || c.im != 0.0 {
                quads.push(json!([jp, m, c.re, c.im]));
            }
        }
    }
    let origin = Quaternion::zero().to_variable();
    let k = kernel(&spec, &v, &origin, cfg.modes)?;
    let row: Vec<_> = (0..spec.internal_dim)
        .map(|l| json!([l, k[(j, l)].re, k[(j, l)].im]))
        .collect();
    Ok(json!({
        "family": spec.family.name(),
        "kappa": spec.kappa,
        "M": cfg.modes,
        "j": j,
        "label": label,
        "coefficients": quads,
        "kernel_row": { "reference_label": PolarQuaternion { r: 0.0, theta: 0.0, phi: 0.0, psi: 0.0 }, "row": row },
    }))
}
