//! JSON report types. Layouts are pinned by the files in `schema/`.

use serde::Serialize;
use serde_json::Value;
use stablecut::dual::{DEFAULT_TOL, JITTER_EPS};
use stablecut::io::InstanceSidecar;
use stablecut::oracle::{cheeger_constant, stability_gamma, OracleConfig, StabilityReport};
use stablecut::spectral::{
    eigen_smallest_two, eigenvector_ratio_bound, family_condition_checks, gw_bound,
    spectral_certificate, stable_gw_bound, two_eigenvalue_condition, EigenvectorRatioBound,
    FamilyChecks, SpectralCertificate, SymMatrix, TwoEigenvalueCheck, GAMMA_CAP, GW_FLOOR,
    PSD_TOLERANCE,
};
use stablecut::{cut_value, Cut, ExtReal, Result, WeightedGraph};

pub const RUN_SCHEMA: &str = "stablecut.run_report/1";
pub const VERIFY_SCHEMA: &str = "stablecut.verify_report/1";
pub const SPECTRUM_SCHEMA: &str = "stablecut.spectrum_report/1";

#[derive(Debug, Serialize)]
pub struct InstanceInfo {
    pub path: String,
    pub n: usize,
    pub edges: usize,
    pub total_weight: f64,
    pub simple: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<InstanceSidecar>,
}

impl InstanceInfo {
    pub fn new(path: String, g: &WeightedGraph, sidecar: Option<InstanceSidecar>) -> Self {
        InstanceInfo {
            path,
            n: g.n(),
            edges: g.edge_count(),
            total_weight: g.total_weight(),
            simple: g.is_simple(),
            sidecar,
        }
    }
}

/// Tolerances behind every comparison in a report.
#[derive(Debug, Serialize)]
pub struct Tolerances {
    /// Cut values within this relative distance count as tied.
    pub tie_relative: f64,
    /// `W + diag(d)` counts as PSD when `λ_min ≥ −psd_relative · ‖W + diag(d)‖_∞`.
    pub psd_relative: f64,
    /// Dual certificates need `gap ≤ dual_gap_relative · max(1, |trace|)`.
    pub dual_gap_relative: f64,
    /// Infinite local stability is capped at this value in eigenvalue margins.
    pub gamma_cap: f64,
    pub jitter_relative: f64,
}

impl Tolerances {
    pub fn new(oracle: &OracleConfig, dual_tol: Option<f64>) -> Self {
        Tolerances {
            tie_relative: oracle.tie_tolerance,
            psd_relative: PSD_TOLERANCE,
            dual_gap_relative: dual_tol.unwrap_or(DEFAULT_TOL),
            gamma_cap: GAMMA_CAP,
            jitter_relative: JITTER_EPS,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleSection {
    Computed {
        limit: usize,
        stability: StabilityReport,
        cheeger: ExtReal,
    },
    Skipped {
        limit: usize,
        reason: String,
    },
}

impl OracleSection {
    /// Computed when `n ≤ limit`, otherwise an explicit skip.
    pub fn build(g: &WeightedGraph, cfg: &OracleConfig) -> Result<Self> {
        if g.n() > cfg.limit {
            return Ok(OracleSection::Skipped {
                limit: cfg.limit,
                reason: format!("n > limit ({} > {})", g.n(), cfg.limit),
            });
        }
        Ok(OracleSection::Computed {
            limit: cfg.limit,
            stability: stability_gamma(g, cfg)?,
            cheeger: cheeger_constant(g, cfg)?,
        })
    }

    pub fn stability(&self) -> Option<&StabilityReport> {
        match self {
            OracleSection::Computed { stability, .. } => Some(stability),
            OracleSection::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolverResult {
    pub solver: &'static str,
    /// `ok`, `not_applicable` or `skipped`.
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<Cut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Present only with `--timing`, so default reports are reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    pub certified: Option<bool>,
    /// The solver's stability hypothesis holds (needs the oracle).
    pub guaranteed: Option<bool>,
    /// Value equals the oracle optimum within the tie tolerance.
    pub matches_oracle: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl SolverResult {
    pub fn unavailable(solver: &'static str, status: &'static str, reason: String) -> Self {
        SolverResult {
            solver,
            status,
            reason: Some(reason),
            cut: None,
            value: None,
            wall_ms: None,
            certified: None,
            guaranteed: None,
            matches_oracle: None,
            details: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GwSection {
    pub floor: f64,
    /// Fraction of the total weight crossing the reference cut.
    pub cut_fraction: f64,
    /// Ratio bound at that fraction; absent below 1/2.
    pub at_cut_fraction: Option<f64>,
    /// Ratio bound implied by the local stability of the reference cut.
    pub at_local_stability: Option<f64>,
}

/// Sufficient conditions evaluated at one reference cut.
#[derive(Debug, Serialize)]
pub struct Conditions {
    /// `oracle` or the solver the cut came from.
    pub reference: String,
    pub cut: Cut,
    pub value: f64,
    pub certificate: CertificateSummary,
    pub two_eigenvalue: TwoEigenvalueCheck,
    pub families: FamilyChecks,
    /// Sign pattern of the least eigenvector of `W` versus its edge ratios.
    pub eigenvector_ratio: EigenvectorRatioBound,
    pub goemans_williamson: GwSection,
}

/// [`SpectralCertificate`] without the length-`n` vectors.
#[derive(Debug, Serialize)]
pub struct CertificateSummary {
    pub lambda_n: f64,
    pub lambda_n_minus_1: ExtReal,
    pub psd: bool,
    pub residual: f64,
    pub trace: f64,
}

impl From<&SpectralCertificate> for CertificateSummary {
    fn from(c: &SpectralCertificate) -> Self {
        CertificateSummary {
            lambda_n: c.lambda_n,
            lambda_n_minus_1: c.lambda_n_minus_1,
            psd: c.psd,
            residual: c.residual,
            trace: c.diag_shift.iter().sum(),
        }
    }
}

impl Conditions {
    pub fn build(g: &WeightedGraph, cut: &Cut, reference: String, cfg: &OracleConfig) -> Result<Self> {
        let value = cut_value(g, cut)?;
        let cert = spectral_certificate(g, cut)?;
        let two = two_eigenvalue_condition(g, cut)?;
        let families = family_condition_checks(g, cut, cfg)?;
        let u = eigen_smallest_two(&SymMatrix::shifted(g, None)?)?.eigvec;
        let total = g.total_weight();
        let fraction = if total > 0.0 { value / total } else { 0.0 };
        Ok(Conditions {
            reference,
            cut: cut.clone(),
            value,
            certificate: (&cert).into(),
            goemans_williamson: GwSection {
                floor: GW_FLOOR,
                cut_fraction: fraction,
                at_cut_fraction: gw_bound(fraction).ok(),
                at_local_stability: stable_gw_bound(two.gamma_local.value()).ok(),
            },
            two_eigenvalue: two,
            families,
            eigenvector_ratio: eigenvector_ratio_bound(g, &u)?,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub instance: InstanceInfo,
    pub tolerances: Tolerances,
    pub solvers: Vec<SolverResult>,
    pub oracle: OracleSection,
    pub conditions: Option<Conditions>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub instance: InstanceInfo,
    pub tolerances: Tolerances,
    pub oracle: OracleSection,
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub schema: &'static str,
    pub instance: InstanceInfo,
    pub tolerances: Tolerances,
    /// Eigenvalues of `W` in increasing order.
    pub eigenvalues: Vec<f64>,
    /// Sign cut of the least eigenvector of `W`.
    pub spectral_cut: Cut,
    pub oracle: OracleSection,
    pub conditions: Conditions,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
