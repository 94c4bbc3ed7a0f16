//! Seeded recovery sweeps over the planted model.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use stablecut::generators::{gen_planted, WeightDistribution};
use stablecut::oracle::OracleConfig;
use stablecut::rng::derive_seed;
use stablecut::dual::{certify_cut, DualConfig};
use stablecut::{Error, Result};

use crate::solvers::{run_solver, SolverContext, SolverKind};

pub struct BenchSpec {
    pub ns: Vec<usize>,
    pub gammas: Vec<f64>,
    pub dist: WeightDistribution,
    pub trials: usize,
    pub solvers: Vec<SolverKind>,
    pub seed: u64,
    pub dual: DualConfig,
    pub timing: bool,
    /// Cells with `n` up to this also get an `oracle` row.
    pub auto_oracle_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub gamma: f64,
    pub dist: String,
    pub trials: usize,
    pub solver: &'static str,
    pub recovery_rate: f64,
    pub certified_rate: f64,
    /// `na` unless timing was requested.
    pub mean_ms: String,
}

/// Instance seed of one trial; independent of the solver list.
pub fn trial_seed(seed: u64, n: usize, gamma: f64, trial: usize) -> u64 {
    derive_seed(seed, &[n as u64, gamma.to_bits(), trial as u64])
}

struct TrialResult {
    recovered: bool,
    certified: bool,
    ms: f64,
}

fn solvers_for(spec: &BenchSpec, n: usize, cfg: &OracleConfig) -> Vec<SolverKind> {
    let mut s = spec.solvers.clone();
    if n <= spec.auto_oracle_n.min(cfg.limit) && !s.contains(&SolverKind::Oracle) {
        s.push(SolverKind::Oracle);
    }
    s
}

/// Rows ordered by `n`, then `gamma` as given, then solver order. Output does
/// not depend on the thread count.
pub fn run_bench(spec: &BenchSpec, cfg: &OracleConfig) -> Result<Vec<BenchRow>> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    for &n in &spec.ns {
        if spec.solvers.contains(&SolverKind::Oracle) && n > cfg.limit {
            return Err(Error::SizeLimit { n, limit: cfg.limit });
        }
    }
    let mut tasks = Vec::new();
    for &n in &spec.ns {
        for &gamma in &spec.gammas {
            for t in 0..spec.trials {
                tasks.push((n, gamma, t));
            }
        }
    }
    let ctx = SolverContext {
        oracle: cfg,
        dual: spec.dual.clone(),
        jitter: false,
        trace: false,
    };
    let results: Vec<Vec<TrialResult>> = tasks
        .par_iter()
        .map(|&(n, gamma, t)| {
            let inst = gen_planted(n, spec.dist, gamma, trial_seed(spec.seed, n, gamma, t))?;
            solvers_for(spec, n, cfg)
                .into_iter()
                .map(|kind| {
                    let start = Instant::now();
                    let out = run_solver(kind, &inst.graph, &ctx)?;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    let certified = match out.certified {
                        Some(c) => c,
                        None => certify_cut(&inst.graph, &out.cut)?.psd,
                    };
                    Ok(TrialResult {
                        recovered: out.cut.same_partition(&inst.planted),
                        certified,
                        ms,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut k = 0;
    for &n in &spec.ns {
        let kinds = solvers_for(spec, n, cfg);
        for &gamma in &spec.gammas {
            let cell = &results[k..k + spec.trials];
            k += spec.trials;
            for (s, kind) in kinds.iter().enumerate() {
                let count = |f: &dyn Fn(&TrialResult) -> bool| cell.iter().filter(|r| f(&r[s])).count();
                let trials = spec.trials as f64;
                let mean_ms = if spec.timing {
                    format!("{:.3}", cell.iter().map(|r| r[s].ms).sum::<f64>() / trials)
                } else {
                    "na".to_string()
                };
                rows.push(BenchRow {
                    n,
                    gamma,
                    dist: spec.dist.to_string(),
                    trials: spec.trials,
                    solver: kind.name(),
                    recovery_rate: count(&|r| r.recovered) as f64 / trials,
                    certified_rate: count(&|r| r.certified) as f64 / trials,
                    mean_ms,
                });
            }
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}
