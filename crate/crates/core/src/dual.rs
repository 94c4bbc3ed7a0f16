//! Min-trace dual of Max-Cut and the certified spectral solver built on it.
//!
//! For every diagonal `d` with `W + diag(d) ⪰ 0` and every cut `c`,
//! `Σ d_i ≥ −cᵀ W c`, and `−cᵀ W c = 2(cut − uncut)` is an affine function of
//! the cut value. A feasible `d` whose trace matches some cut therefore proves
//! that cut maximal. The diagonal is optimized by subgradient descent on the
//! exact penalty `Σ d_i + ρ · max(0, −λ_min(W + diag(d)))`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::combinatorial::polish_by_flips;
use crate::error::{Error, Result};
use crate::graph::{cut_value, quadratic_form, Cut, WeightedGraph};
use crate::rng;
use crate::spectral::{
    build_diagonal_from_cut, eigen_smallest_two, eigenvalues, kernel_residual, sign_round,
    SymMatrix, PSD_TOLERANCE,
};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Relative size of the multiplicative weight jitter.
pub const JITTER_EPS: f64 = 1e-6;
const JITTER_TAG: u64 = 0x6a69_7474_6572;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualConfig {
    /// Relative duality-gap tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Seeds the jitter stream; the descent itself is deterministic.
    pub seed: u64,
    /// Penalty weight; `None` means `2n`.
    pub rho: Option<f64>,
    /// Step `t` is `step · mean(w(i)) / √t`.
    pub step: f64,
    /// Keep a per-iteration log.
    pub log: bool,
}

impl Default for DualConfig {
    fn default() -> Self {
        DualConfig {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            rho: None,
            step: 0.2,
            log: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub trace: f64,
    pub lambda_min: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    /// Best feasible diagonal found.
    pub d: Vec<f64>,
    pub trace: f64,
    pub lambda_min: f64,
    /// Largest `−cᵀ W c` over cuts seen.
    pub lower_bound: f64,
    /// Cut attaining `lower_bound`.
    pub lower_bound_cut: Cut,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<IterRecord>,
}

fn gap_ok(gap: f64, trace: f64, tol: f64) -> bool {
    gap <= tol * trace.abs().max(1.0)
}

struct Search<'a> {
    g: &'a WeightedGraph,
    seen: HashSet<Vec<i8>>,
    lower_bound: f64,
    lower_bound_cut: Cut,
    best_d: Vec<f64>,
    best_trace: f64,
    best_lambda: f64,
}

impl Search<'_> {
    fn offer_feasible(&mut self, d: Vec<f64>, trace: f64, lambda: f64) {
        if trace < self.best_trace {
            self.best_d = d;
            self.best_trace = trace;
            self.best_lambda = lambda;
        }
    }

    /// Scores a rounded cut; a new cut also has its own diagonal tested,
    /// which closes the gap outright when that diagonal is feasible.
    fn offer_cut(&mut self, raw: Cut) -> Result<()> {
        let c = polish_by_flips(self.g, &raw, 1e-12)?.canonical();
        if !self.seen.insert(c.signs().to_vec()) {
            return Ok(());
        }
        let value = -quadratic_form(self.g, &c)?;
        if value > self.lower_bound {
            self.lower_bound = value;
            self.lower_bound_cut = c.clone();
        }
        let dc = build_diagonal_from_cut(self.g, &c)?;
        let m = SymMatrix::shifted(self.g, Some(&dc))?;
        let lmin = eigenvalues(&m)[0];
        if lmin >= -PSD_TOLERANCE * m.inf_norm() {
            let trace = dc.iter().sum();
            self.offer_feasible(dc, trace, lmin);
        }
        Ok(())
    }
}

/// Minimize `Σ d_i` subject to `W + diag(d) ⪰ 0`.
///
/// Starts from `d_i = w(i)`, which is diagonally dominant and so feasible.
/// Each iterate is made feasible by adding `(−λ_min)⁺` to every entry, and its
/// least eigenvector is rounded to a cut for the lower bound. Running out of
/// iterations returns the best feasible point with `converged = false`.
pub fn solve_min_trace(g: &WeightedGraph, cfg: &DualConfig) -> Result<DualSolution> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", cfg.tol)));
    }
    let rho = cfg.rho.unwrap_or(2.0 * n as f64);
    let mut d: Vec<f64> = g.degrees().weighted;
    let scale = d.iter().sum::<f64>() / n as f64;

    let mut s = Search {
        g,
        seen: HashSet::new(),
        lower_bound: f64::NEG_INFINITY,
        lower_bound_cut: Cut::new(vec![1; n]).expect("valid"),
        best_d: d.clone(),
        best_trace: f64::INFINITY,
        best_lambda: 0.0,
    };
    let mut log = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for t in 1..=cfg.max_iter.max(1) {
        iterations = t;
        let eig = eigen_smallest_two(&SymMatrix::shifted(g, Some(&d))?)?;
        let lambda = eig.lambda_min;
        let shift = (-lambda).max(0.0);
        let trace = d.iter().sum::<f64>() + shift * n as f64;
        s.offer_feasible(d.iter().map(|x| x + shift).collect(), trace, lambda + shift);
        s.offer_cut(sign_round(&eig.eigvec))?;

        let gap = s.best_trace - s.lower_bound;
        if cfg.log {
            log.push(IterRecord {
                iter: t,
                trace: s.best_trace,
                lambda_min: lambda,
                gap,
            });
        }
        if gap_ok(gap, s.best_trace, cfg.tol) {
            converged = true;
            break;
        }

        let step = cfg.step * scale.max(f64::MIN_POSITIVE) / (t as f64).sqrt();
        let penalized = lambda < 0.0;
        for (di, ui) in d.iter_mut().zip(&eig.eigvec) {
            let sub = if penalized { 1.0 - rho * ui * ui } else { 1.0 };
            *di -= step * sub;
        }
    }

    Ok(DualSolution {
        gap: s.best_trace - s.lower_bound,
        d: s.best_d,
        trace: s.best_trace,
        lambda_min: s.best_lambda,
        lower_bound: s.lower_bound,
        lower_bound_cut: s.lower_bound_cut,
        iterations,
        converged,
        log,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendedSolution {
    pub cut: Cut,
    pub value: f64,
    pub dual: DualSolution,
    /// The cut's `−cᵀ W c` matches a feasible dual trace: it is a maximum cut.
    pub certified: bool,
    /// The certificate came from a jittered rerun, re-checked on the input.
    #[serde(default)]
    pub jittered: bool,
}

/// Solve the dual, round the least eigenvector of `W + diag(d)`, polish by
/// single flips, and keep the better of that cut and the dual's best cut.
pub fn extended_spectral_solve(g: &WeightedGraph, cfg: &DualConfig) -> Result<ExtendedSolution> {
    let dual = solve_min_trace(g, cfg)?;
    let eig = eigen_smallest_two(&SymMatrix::shifted(g, Some(&dual.d))?)?;
    let rounded = polish_by_flips(g, &sign_round(&eig.eigvec), 1e-12)?.canonical();
    let (rv, bv) = (cut_value(g, &rounded)?, cut_value(g, &dual.lower_bound_cut)?);
    let (cut, value) = if bv > rv {
        (dual.lower_bound_cut.clone(), bv)
    } else {
        (rounded, rv)
    };
    let objective = -quadratic_form(g, &cut)?;
    let certified =
        gap_ok(dual.gap, dual.trace, cfg.tol) && gap_ok((objective - dual.trace).abs(), dual.trace, cfg.tol);
    Ok(ExtendedSolution {
        cut,
        value,
        dual,
        certified,
        jittered: false,
    })
}

/// Each weight multiplied by `1 + ε·u`, `u` uniform in `[0, 1)` from the
/// edge's own stream.
pub fn jitter(g: &WeightedGraph, eps: f64, seed: u64) -> WeightedGraph {
    let n = g.n();
    let base = rng::derive_seed(seed, &[JITTER_TAG]);
    let mut out = g.clone();
    for (i, j, w) in g.edges() {
        let mut r = rng::stream(base, rng::edge_stream(n, i, j));
        out.set(i, j, w * (1.0 + eps * rng::unit_f64(&mut r)));
    }
    out
}

/// [`extended_spectral_solve`]; when that fails to certify, rerun on a
/// jittered copy and certify the resulting cut against `g` itself.
pub fn solve_with_jitter(g: &WeightedGraph, cfg: &DualConfig) -> Result<ExtendedSolution> {
    let first = extended_spectral_solve(g, cfg)?;
    if first.certified {
        return Ok(first);
    }
    let second = extended_spectral_solve(&jitter(g, JITTER_EPS, cfg.seed), cfg)?;
    let value = cut_value(g, &second.cut)?;
    if value >= first.value && certify_cut(g, &second.cut)?.psd {
        return Ok(ExtendedSolution {
            cut: second.cut,
            value,
            dual: second.dual,
            certified: true,
            jittered: true,
        });
    }
    Ok(first)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutCertificate {
    /// `W + D(c)` is positive semidefinite: `c` is a maximum cut.
    pub psd: bool,
    pub lambda_min: f64,
    pub residual: f64,
    /// `−cᵀ W c` equals `Σ d_i` within tolerance.
    pub m_check: bool,
    pub trace: f64,
}

pub fn certify_cut(g: &WeightedGraph, c: &Cut) -> Result<CutCertificate> {
    let d = build_diagonal_from_cut(g, c)?;
    let m = SymMatrix::shifted(g, Some(&d))?;
    let lambda_min = eigenvalues(&m).first().copied().unwrap_or(0.0);
    let trace: f64 = d.iter().sum();
    let objective = -quadratic_form(g, c)?;
    Ok(CutCertificate {
        psd: lambda_min >= -PSD_TOLERANCE * m.inf_norm(),
        lambda_min,
        residual: kernel_residual(g, &d, c)?,
        m_check: (objective - trace).abs() <= 1e-9 * g.total_weight().max(1.0),
        trace,
    })
}
