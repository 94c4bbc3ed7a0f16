//! Spectral partitioning and eigenvalue-based optimality conditions.
//!
//! The Max-Cut indicator `c` minimizes `xᵀ W x` over `x ∈ {±1}ⁿ`. Relaxing to
//! real vectors gives the eigenvector of the least eigenvalue; adding a
//! diagonal `D` (loops) never changes which cut is maximal, so the sign
//! pattern of the least eigenvector of `W + D` is a candidate for every `D`.
//!
//! The diagonal built from a cut, `d_i = −c_i (W c)_i`, puts `c` in the kernel
//! of `W + D`; positive semidefiniteness of that matrix then proves `c`
//! maximal.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::graph::{Cut, WeightedGraph};
use crate::oracle::{self, OracleConfig};

/// Relative tolerance for positive semidefiniteness: `λ_min ≥ −tol · ‖M‖_∞`.
pub const PSD_TOLERANCE: f64 = 1e-9;
/// Infinite local stability is replaced by this value inside `(γ−1)/(γ+1)`.
pub const GAMMA_CAP: f64 = 1e12;
/// Unconditional Goemans–Williamson approximation ratio.
pub const GW_FLOOR: f64 = 0.87856;
/// Entries of a unit eigenvector at most this large count as zero.
const ZERO_ENTRY: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Rejects entries more asymmetric than `1e-12 · max(1, max |m_ij|)`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                actual: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
        let scale = data.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            for j in (i + 1)..n {
                if (data[i * n + j] - data[j * n + i]).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::Validation(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix { n, data })
    }

    /// `W + diag(d)`; `d = None` is the zero shift.
    pub fn shifted(g: &WeightedGraph, d: Option<&[f64]>) -> Result<Self> {
        let n = g.n();
        let mut data = g.as_slice().to_vec();
        if let Some(d) = d {
            if d.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: d.len(),
                });
            }
            for i in 0..n {
                data[i * n + i] = d[i];
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.n.max(1))
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }
}

/// Least eigenpair and second-least eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallestEigen {
    pub lambda_min: f64,
    /// Unit eigenvector for `lambda_min`; its first clearly nonzero entry is positive.
    pub eigvec: Vec<f64>,
    /// `+∞` for `1 × 1` matrices.
    pub lambda_second: f64,
}

/// Full symmetric eigendecomposition, returning the two smallest eigenvalues
/// and the eigenvector of the smallest.
pub fn eigen_smallest_two(m: &SymMatrix) -> Result<SmallestEigen> {
    if m.n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let mut order: Vec<usize> = (0..m.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let first = order[0];
    let mut eigvec: Vec<f64> = eig.eigenvectors.column(first).iter().copied().collect();
    let norm = eigvec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let lead = eigvec
        .iter()
        .copied()
        .find(|x| x.abs() > 1e-8 * norm)
        .unwrap_or(1.0);
    let scale = lead.signum() / norm;
    eigvec.iter_mut().for_each(|x| *x *= scale);
    Ok(SmallestEigen {
        lambda_min: eig.eigenvalues[first],
        eigvec,
        lambda_second: order.get(1).map_or(f64::INFINITY, |&k| eig.eigenvalues[k]),
    })
}

/// All eigenvalues in increasing order.
pub fn eigenvalues(m: &SymMatrix) -> Vec<f64> {
    if m.n == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `λ_min(m) ≥ −tol · ‖m‖_∞`.
pub fn is_psd(m: &SymMatrix, tol: f64) -> bool {
    if m.n == 0 {
        return true;
    }
    let lmin = eigenvalues(m)[0];
    lmin >= -tol * m.inf_norm()
}

/// Sign cut of `u`: `+1` where `u_i > 0`, entries numerically zero go to `−1`.
pub fn sign_round(u: &[f64]) -> Cut {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let signs = u
        .iter()
        .map(|&x| if x / norm > ZERO_ENTRY { 1 } else { -1 })
        .collect();
    Cut::new(signs).expect("signs are ±1")
}

/// Cut induced by the least eigenvector of `W + diag(d)`.
pub fn spectral_partition(g: &WeightedGraph, d: Option<&[f64]>) -> Result<Cut> {
    let eig = eigen_smallest_two(&SymMatrix::shifted(g, d)?)?;
    Ok(sign_round(&eig.eigvec).canonical())
}

/// `d_i = −c_i Σ_j W_ij c_j`: weight from `i` to the other side minus weight
/// to its own side. Makes `(W + diag(d)) c = 0`.
pub fn build_diagonal_from_cut(g: &WeightedGraph, c: &Cut) -> Result<Vec<f64>> {
    if c.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: c.len(),
        });
    }
    Ok((0..g.n())
        .map(|i| {
            let wc: f64 = g.row(i).iter().enumerate().map(|(j, w)| w * c.sign(j)).sum();
            -c.sign(i) * wc
        })
        .collect())
}

/// `‖(W + diag(d)) c‖_∞`.
pub fn kernel_residual(g: &WeightedGraph, d: &[f64], c: &Cut) -> Result<f64> {
    let m = SymMatrix::shifted(g, Some(d))?;
    let cv: Vec<f64> = (0..c.len()).map(|i| c.sign(i)).collect();
    Ok(m.mul_vec(&cv).iter().fold(0.0, |a, x| a.max(x.abs())))
}

/// Eigen-data of `W + D(c)` for the diagonal built from `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub lambda_n: f64,
    /// `∞` for a single vertex.
    pub lambda_n_minus_1: ExtReal,
    pub eigvec: Vec<f64>,
    pub diag_shift: Vec<f64>,
    pub psd: bool,
    pub residual: f64,
}

pub fn spectral_certificate(g: &WeightedGraph, c: &Cut) -> Result<SpectralCertificate> {
    let d = build_diagonal_from_cut(g, c)?;
    let m = SymMatrix::shifted(g, Some(&d))?;
    let eig = eigen_smallest_two(&m)?;
    let residual = kernel_residual(g, &d, c)?;
    Ok(SpectralCertificate {
        psd: eig.lambda_min >= -PSD_TOLERANCE * m.inf_norm(),
        lambda_n: eig.lambda_min,
        lambda_n_minus_1: ExtReal(eig.lambda_second),
        eigvec: eig.eigvec,
        diag_shift: d,
        residual,
    })
}

/// Stability levels sufficient for the sign pattern of `u` to be the maximum cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorRatioBound {
    /// `max |u_i u_j| / min |u_i u_j|` over support edges.
    pub basic: ExtReal,
    /// Largest `−u_i u_j` over edges with `u_i u_j < 0`, divided by the
    /// smallest `u_i u_j` over edges with `u_i u_j ≥ 0`.
    pub refined: ExtReal,
    /// `u` has a zero entry, which makes the basic bound vacuous.
    pub degenerate: bool,
}

/// Empty maxima are 0 and empty minima `∞`; a zero denominator gives `∞`.
pub fn eigenvector_ratio_bound(g: &WeightedGraph, u: &[f64]) -> Result<EigenvectorRatioBound> {
    if u.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: u.len(),
        });
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let degenerate = u.iter().any(|x| (x / norm).abs() <= ZERO_ENTRY);

    let (mut amax, mut amin) = (0.0f64, f64::INFINITY);
    let (mut disagree_max, mut agree_min) = (0.0f64, f64::INFINITY);
    for (i, j, _) in g.edges() {
        let p = u[i] * u[j];
        amax = amax.max(p.abs());
        amin = amin.min(p.abs());
        if p < 0.0 {
            disagree_max = disagree_max.max(-p);
        } else {
            agree_min = agree_min.min(p);
        }
    }
    let ratio = |num: f64, den: f64| {
        if den == 0.0 {
            ExtReal::INFINITY
        } else if den.is_infinite() {
            ExtReal(0.0)
        } else {
            ExtReal(num / den)
        }
    };
    let basic = if degenerate {
        ExtReal::INFINITY
    } else if amin.is_infinite() {
        ExtReal(1.0)
    } else {
        ratio(amax, amin)
    };
    Ok(EigenvectorRatioBound {
        basic,
        refined: ratio(disagree_max, agree_min),
        degenerate,
    })
}

/// Two-eigenvalue test: `2 δ̃ (γ−1)/(γ+1) + λ_n + λ_{n−1} > 0` implies that
/// `W + D(c)` is positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoEigenvalueCheck {
    pub gamma_local: ExtReal,
    /// `gamma_local` with `∞` replaced by [`GAMMA_CAP`].
    pub gamma_used: f64,
    pub min_weighted_degree: f64,
    /// Eigenvalues of `W` itself.
    pub lambda_n: f64,
    pub lambda_n_minus_1: f64,
    pub margin: f64,
    pub holds: bool,
}

pub fn two_eigenvalue_condition(g: &WeightedGraph, c: &Cut) -> Result<TwoEigenvalueCheck> {
    let gamma_local = oracle::local_stability_gamma(g, c)?;
    let gamma = gamma_local.capped(GAMMA_CAP);
    let dmin = g.degrees().min_weighted;
    let eig = eigenvalues(&SymMatrix::shifted(g, None)?);
    let (lambda_n, lambda_n_minus_1) = (eig[0], eig.get(1).copied().unwrap_or(eig[0]));
    let margin = 2.0 * dmin * (gamma - 1.0) / (gamma + 1.0) + lambda_n + lambda_n_minus_1;
    Ok(TwoEigenvalueCheck {
        gamma_local,
        gamma_used: gamma,
        min_weighted_degree: dmin,
        lambda_n,
        lambda_n_minus_1,
        margin,
        holds: margin > 0.0,
    })
}

/// Outcome of one structural sufficient condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub applicable: bool,
    pub holds: Option<bool>,
    pub lhs: Option<ExtReal>,
    pub rhs: Option<ExtReal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub aux: BTreeMap<String, serde_json::Value>,
}

impl Verdict {
    fn skipped(reason: impl Into<String>) -> Self {
        Verdict {
            applicable: false,
            holds: None,
            lhs: None,
            rhs: None,
            reason: Some(reason.into()),
            aux: BTreeMap::new(),
        }
    }

    fn strict(lhs: f64, rhs: f64) -> Self {
        Verdict {
            applicable: true,
            holds: Some(lhs > rhs),
            lhs: Some(ExtReal(lhs)),
            rhs: Some(ExtReal(rhs)),
            reason: None,
            aux: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("plain value serializes");
        self.aux.insert(key.to_string(), v);
        self
    }
}

/// Sufficient conditions for graph families where the two-eigenvalue test
/// is implied by simpler quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyChecks {
    /// All weighted degrees equal: `λ_{n−1}/λ_n < (γ−3)/(γ+1)`.
    pub equal_degree: Verdict,
    /// `d`-regular simple with second eigenvalue `λ`: `γ > (5d+λ)/(d−λ)`.
    pub expander: Verdict,
    /// `d`-regular simple with Cheeger constant `h`:
    /// `γ > (5+s)/(1−s)` with `s = √(1−(h/d)²)`, plus the bound `λ_2 ≤ √(d²−h²)`.
    pub cheeger: Verdict,
    /// `d`-regular simple with `k`-distinct maximum cut: `h ≥ k` and
    /// `γ > (5+s)/(1−s)` with `s = √(1−(k/d)²)`.
    pub distinctness: Verdict,
}

fn regular_degree(g: &WeightedGraph) -> Option<usize> {
    let d = g.degrees();
    (g.is_simple() && d.max_simple == d.min_simple && d.min_simple > 0).then_some(d.min_simple)
}

fn gap_threshold(ratio: f64) -> f64 {
    let s = (1.0 - ratio * ratio).max(0.0).sqrt();
    if s >= 1.0 {
        f64::INFINITY
    } else {
        (5.0 + s) / (1.0 - s)
    }
}

/// Evaluates every family condition at cut `c` (normally the maximum cut),
/// with `γ` the local stability of `c`.
pub fn family_condition_checks(g: &WeightedGraph, c: &Cut, cfg: &OracleConfig) -> Result<FamilyChecks> {
    let gamma = oracle::local_stability_gamma(g, c)?.capped(GAMMA_CAP);
    let spectrum = eigenvalues(&SymMatrix::shifted(g, None)?);
    let n = g.n();
    let degrees = g.degrees();

    let equal_degree = {
        let w = &degrees.weighted;
        let (lo, hi) = w.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        if n < 2 {
            Verdict::skipped("fewer than two vertices")
        } else if hi - lo > 1e-9 * hi {
            Verdict::skipped("weighted degrees differ")
        } else if spectrum[0] >= 0.0 {
            Verdict::skipped("least eigenvalue is not negative")
        } else {
            Verdict::strict((gamma - 3.0) / (gamma + 1.0), spectrum[1] / spectrum[0])
                .with("eigenvalue_ratio", ExtReal(spectrum[1] / spectrum[0]))
        }
    };

    let regular = regular_degree(g);
    let second = if n >= 2 { spectrum[n - 2] } else { f64::NAN };

    let expander = match regular {
        None => Verdict::skipped("not a regular simple graph"),
        Some(d) => {
            let d = d as f64;
            let rhs = if d - second > 0.0 {
                (5.0 * d + second) / (d - second)
            } else {
                f64::INFINITY
            };
            Verdict::strict(gamma, rhs).with("degree", d).with("second_eigenvalue", second)
        }
    };

    let cheeger_value = match regular {
        Some(_) if n <= cfg.limit => Some(oracle::cheeger_constant(g, cfg)?.value()),
        _ => None,
    };

    let cheeger = match (regular, cheeger_value) {
        (None, _) => Verdict::skipped("not a regular simple graph"),
        (Some(_), None) => Verdict::skipped("n exceeds the oracle limit"),
        (Some(d), Some(h)) => {
            let d = d as f64;
            let bound = (d * d - h * h).max(0.0).sqrt();
            Verdict::strict(gamma, gap_threshold(h / d))
                .with("cheeger", h)
                .with("degree", d)
                .with("second_eigenvalue", second)
                .with("eigenvalue_bound", bound)
                .with("eigenvalue_bound_holds", second <= bound + 1e-9 * d)
        }
    };

    let distinctness = match (regular, cheeger_value) {
        (None, _) => Verdict::skipped("not a regular simple graph"),
        (Some(_), None) => Verdict::skipped("n exceeds the oracle limit"),
        (Some(d), Some(h)) => {
            let report = oracle::stability_gamma(g, cfg)?;
            if !report.unique {
                Verdict::skipped("maximum cut is not unique")
            } else {
                let d = d as f64;
                let k = report.k_star.value();
                let threshold = gap_threshold((k / d).min(1.0));
                Verdict {
                    applicable: true,
                    holds: Some(h + 1e-9 * d >= k),
                    lhs: Some(ExtReal(h)),
                    rhs: Some(ExtReal(k)),
                    reason: None,
                    aux: BTreeMap::new(),
                }
                .with("gamma", gamma)
                .with("gamma_threshold", ExtReal(threshold))
                .with("gamma_condition_holds", gamma > threshold)
            }
        }
    };

    Ok(FamilyChecks {
        equal_degree,
        expander,
        cheeger,
        distinctness,
    })
}

/// `arccos(1 − 2r) / (π r)` for `r ∈ [1/2, 1]`: the Goemans–Williamson ratio
/// when the maximum cut holds a fraction `r` of the total weight.
pub fn gw_bound(r: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&r) {
        return Err(Error::Domain {
            value: r,
            domain: "[0.5, 1]",
        });
    }
    Ok((1.0 - 2.0 * r).acos() / (std::f64::consts::PI * r))
}

/// [`gw_bound`] at `r = γ/(γ+1)`, the cut fraction forced by local stability `γ`.
pub fn stable_gw_bound(gamma: f64) -> Result<f64> {
    if !(gamma >= 1.0) {
        return Err(Error::Domain {
            value: gamma,
            domain: "[1, ∞)",
        });
    }
    let r = if gamma.is_infinite() { 1.0 } else { gamma / (gamma + 1.0) };
    gw_bound(r)
}
