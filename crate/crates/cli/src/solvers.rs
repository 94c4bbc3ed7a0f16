//! One entry point per solver, shared by `solve` and `bench`.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use stablecut::combinatorial::{find_max_cut_greedy, high_degree_solve, DEFAULT_EXHAUSTIVE_LOG2};
use stablecut::dual::{certify_cut, extended_spectral_solve, solve_with_jitter, DualConfig, ExtendedSolution};
use stablecut::oracle::{brute_force_max_cut, OracleConfig};
use stablecut::spectral::spectral_partition;
use stablecut::{cut_value, Cut, Result, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Greedy,
    Contract,
    Spectral,
    Dual,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Greedy,
        SolverKind::Contract,
        SolverKind::Spectral,
        SolverKind::Dual,
        SolverKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Greedy => "greedy",
            SolverKind::Contract => "contract",
            SolverKind::Spectral => "spectral",
            SolverKind::Dual => "dual",
            SolverKind::Oracle => "oracle",
        }
    }
}

pub struct SolverContext<'a> {
    pub oracle: &'a OracleConfig,
    pub dual: DualConfig,
    /// Rerun uncertified dual solves on jittered weights.
    pub jitter: bool,
    /// Keep the full merge trace of the greedy solver.
    pub trace: bool,
}

pub struct Outcome {
    pub cut: Cut,
    pub value: f64,
    /// `Some(true)` when the cut is proven maximal.
    pub certified: Option<bool>,
    pub details: Value,
    /// Full dual result, for iteration logs.
    pub dual: Option<ExtendedSolution>,
}

pub fn run_solver(kind: SolverKind, g: &WeightedGraph, ctx: &SolverContext) -> Result<Outcome> {
    let certified_by_diagonal = |c: &Cut| certify_cut(g, c).map(|cc| Some(cc.psd));
    match kind {
        SolverKind::Greedy => {
            let r = find_max_cut_greedy(g);
            let mut details = json!({
                "merges": r.trace.len(),
                "max_neighbor_components": r.neighbor_components.iter().max().copied().unwrap_or(0),
            });
            if ctx.trace {
                details["trace"] = serde_json::to_value(&r.trace).expect("trace serializes");
            }
            Ok(Outcome {
                value: cut_value(g, &r.cut)?,
                certified: certified_by_diagonal(&r.cut)?,
                cut: r.cut,
                details,
                dual: None,
            })
        }
        SolverKind::Contract => {
            let r = high_degree_solve(g, None, DEFAULT_EXHAUSTIVE_LOG2)?;
            Ok(Outcome {
                value: cut_value(g, &r.cut)?,
                certified: certified_by_diagonal(&r.cut)?,
                details: json!({
                    "gamma": r.gamma,
                    "components": r.components,
                    "exhaustive": r.exhaustive,
                    "component_overflow": r.component_overflow,
                }),
                cut: r.cut,
                dual: None,
            })
        }
        SolverKind::Spectral => {
            let cut = spectral_partition(g, None)?;
            Ok(Outcome {
                value: cut_value(g, &cut)?,
                certified: certified_by_diagonal(&cut)?,
                cut,
                details: json!({}),
                dual: None,
            })
        }
        SolverKind::Dual => {
            let x = if ctx.jitter {
                solve_with_jitter(g, &ctx.dual)?
            } else {
                extended_spectral_solve(g, &ctx.dual)?
            };
            let s = &x.dual;
            Ok(Outcome {
                cut: x.cut.clone(),
                value: x.value,
                certified: Some(x.certified),
                details: json!({
                    "trace": s.trace,
                    "lower_bound": s.lower_bound,
                    "gap": s.gap,
                    "lambda_min": s.lambda_min,
                    "iterations": s.iterations,
                    "converged": s.converged,
                    "jittered": x.jittered,
                }),
                dual: Some(x),
            })
        }
        SolverKind::Oracle => {
            let m = brute_force_max_cut(g, ctx.oracle)?;
            Ok(Outcome {
                cut: m.cut,
                value: m.value,
                certified: Some(true),
                details: json!({ "unique": m.unique }),
                dual: None,
            })
        }
    }
}
