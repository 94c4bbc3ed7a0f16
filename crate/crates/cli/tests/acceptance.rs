//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use stablecut::combinatorial::{find_max_cut_greedy, high_degree_solve, DEFAULT_EXHAUSTIVE_LOG2};
use stablecut::dual::{certify_cut, extended_spectral_solve, DualConfig};
use stablecut::generators::{gen_planted, gen_random_weighted, stabilize_by_scaling, WeightDistribution};
use stablecut::oracle::{brute_force_max_cut, sample_perturbation_attack, stability_gamma, OracleConfig};
use stablecut::spectral::{
    build_diagonal_from_cut, eigen_smallest_two, gw_bound, is_psd, spectral_partition, stable_gw_bound,
    two_eigenvalue_condition, SymMatrix, PSD_TOLERANCE,
};
use stablecut::{rng, Cut, WeightedGraph};

use common::stablecut;

type Outcome = Result<String, String>;

fn uniform() -> WeightDistribution {
    WeightDistribution::uniform(0.5, 1.5).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Every cut with vertex 0 on the `+1` side.
fn all_cuts(n: usize) -> impl Iterator<Item = Cut> {
    (0..1u64 << (n - 1)).map(move |m| {
        Cut::new((0..n).map(|i| if i > 0 && (m >> (i - 1)) & 1 == 1 { -1 } else { 1 }).collect()).unwrap()
    })
}

fn crossing(c: &Cut, i: usize, j: usize) -> bool {
    c.signs()[i] != c.signs()[j]
}

/// `min_T w(E(S)∖E(T)) / w(E(T)∖E(S))` by direct enumeration.
fn reference_gamma_star(g: &WeightedGraph, s: &Cut) -> f64 {
    let mut best = f64::INFINITY;
    for t in all_cuts(g.n()) {
        if t.same_partition(s) {
            continue;
        }
        let (mut only_s, mut only_t) = (0.0, 0.0);
        for (i, j, w) in g.edges() {
            match (crossing(s, i, j), crossing(&t, i, j)) {
                (true, false) => only_s += w,
                (false, true) => only_t += w,
                _ => {}
            }
        }
        if only_t > 0.0 {
            best = best.min(only_s / only_t);
        }
    }
    best
}

fn random_graphs(count: usize, ns: std::ops::RangeInclusive<usize>, base_seed: u64) -> Vec<WeightedGraph> {
    let span = ns.end() - ns.start() + 1;
    (0..count as u64)
        .map(|s| {
            let n = ns.start() + (s as usize % span);
            let p = [0.35, 0.55, 0.8][(s / span as u64) as usize % 3];
            gen_random_weighted(n, p, uniform(), base_seed + s).unwrap()
        })
        .collect()
}

fn oracle_identities() -> Outcome {
    let cfg = OracleConfig::default();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let n = 4 + (seed as usize % 9);
        let g = gen_random_weighted(n, 0.6, uniform(), 10_000 + seed).unwrap();
        let r = stability_gamma(&g, &cfg).map_err(|e| e.to_string())?;
        if !r.unique || r.gamma_star.is_infinite() {
            continue;
        }
        checked += 1;
        let gs = r.gamma_star.value();
        let reference = reference_gamma_star(&g, &r.max_cut);
        ensure(rel_close(gs, reference, 1e-9), || format!("seed {seed}: γ* {gs} vs enumeration {reference}"))?;
        let a = r.alpha_star;
        ensure(rel_close(gs, (1.0 + a) / (1.0 - a), 1e-9), || format!("seed {seed}: γ* {gs} vs α* {a}"))?;
        ensure(r.gamma_local.value() >= gs * (1.0 - 1e-9), || format!("seed {seed}: γ_local {} < γ*", r.gamma_local))?;
        let above = sample_perturbation_attack(&g, 1.1 * gs, 20, seed, &cfg).map_err(|e| e.to_string())?;
        let below = sample_perturbation_attack(&g, 0.9 * gs, 20, seed, &cfg).map_err(|e| e.to_string())?;
        ensure(above && !below, || format!("seed {seed}: attack at 1.1γ* {above}, at 0.9γ* {below}"))?;
    }
    Ok(format!("{checked} graphs, n in 4..=12"))
}

fn greedy_under_stability() -> Outcome {
    let cfg = OracleConfig::default();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 100 {
        seed += 1;
        let n = 5 + (seed as usize % 12);
        let g = gen_random_weighted(n, 0.5, uniform(), 20_000 + seed).unwrap();
        let delta = g.degrees().max_simple as f64;
        let target = (delta * n as f64).sqrt().ceil() + 1.0;
        let s = match stabilize_by_scaling(&g, target, &cfg) {
            Ok(s) if s.gamma_after.is_finite() => s,
            _ => continue,
        };
        checked += 1;
        let exact = brute_force_max_cut(&s.graph, &cfg).map_err(|e| e.to_string())?;
        let greedy = find_max_cut_greedy(&s.graph);
        ensure(greedy.cut.same_partition(&exact.cut), || format!("seed {seed}, n {n}: greedy missed the maximum cut"))?;
    }
    Ok(format!("{checked} scaled instances, n in 5..=16"))
}

fn complete_bipartite_minus_matching(m: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                edges.push((i, m + j));
            }
        }
    }
    WeightedGraph::from_unit_edges(2 * m, &edges).unwrap()
}

fn bipartite_corpus() -> Vec<WeightedGraph> {
    let mut out = Vec::new();
    for m in 3..=8 {
        out.push(complete_bipartite_minus_matching(m));
    }
    for n in (4..=16).step_by(2) {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
        out.push(WeightedGraph::from_unit_edges(n, &edges).unwrap());
    }
    let mut seed = 0u64;
    while out.len() < 300 {
        seed += 1;
        let mut r = rng::stream(30_000 + seed, 0);
        let n = 4 + rng::below(&mut r, 13) as usize;
        let a = 2 + rng::below(&mut r, (n - 3) as u64) as usize;
        let p = 0.3 + 0.6 * rng::unit_f64(&mut r);
        // shuffle so the sides are not contiguous
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng::below(&mut r, i as u64 + 1) as usize);
        }
        let mut edges = Vec::new();
        for &u in &order[..a] {
            for &v in &order[a..] {
                if rng::unit_f64(&mut r) < p {
                    edges.push((u.min(v), u.max(v)));
                }
            }
        }
        let g = WeightedGraph::from_unit_edges(n, &edges).unwrap();
        if g.is_connected() && g.degrees().min_simple >= 2 {
            out.push(g);
        }
    }
    out
}

fn bipartite_recovery() -> Outcome {
    let corpus = bipartite_corpus();
    for (k, g) in corpus.iter().enumerate() {
        let truth = g.bipartition().ok_or_else(|| format!("graph {k} is not bipartite"))?;
        let r = high_degree_solve(g, None, DEFAULT_EXHAUSTIVE_LOG2).map_err(|e| e.to_string())?;
        ensure(r.cut.same_partition(&truth), || format!("graph {k} (n {}): bipartition not recovered", g.n()))?;
    }
    Ok(format!("{} graphs including K_(m,m) minus a matching, m = 3..=8", corpus.len()))
}

/// Everything the certificate criteria run over.
fn certificate_corpus() -> Vec<(String, WeightedGraph)> {
    let cfg = OracleConfig::default();
    let mut out: Vec<(String, WeightedGraph)> = Vec::new();
    for (k, g) in random_graphs(240, 4..=16, 40_000).into_iter().enumerate() {
        out.push((format!("random {k}"), g));
    }
    for seed in 0..60u64 {
        let n = 6 + (seed as usize % 9);
        let g = gen_random_weighted(n, 0.6, uniform(), 50_000 + seed).unwrap();
        for target in [1.5, 3.0] {
            if let Ok(s) = stabilize_by_scaling(&g, target, &cfg) {
                out.push((format!("scaled {seed} to {target}"), s.graph));
            }
        }
    }
    for seed in 0..40u64 {
        for (n, gamma) in [(10, 1.5), (12, 2.0), (16, 3.0)] {
            out.push((format!("planted n{n} γ{gamma} s{seed}"), gen_planted(n, uniform(), gamma, seed).unwrap().graph));
        }
    }
    for (k, g) in bipartite_corpus().into_iter().enumerate().step_by(5) {
        out.push((format!("bipartite {k}"), g));
    }
    out
}

fn gap_ok(gap: f64) -> bool {
    gap <= 1e-6
}

fn certificate_soundness(corpus: &[(String, WeightedGraph)]) -> Outcome {
    let cfg = OracleConfig::default();
    let dual = DualConfig::default();
    let mut certifiable = 0;
    for (name, g) in corpus {
        let exact = brute_force_max_cut(g, &cfg).map_err(|e| e.to_string())?;
        if !certify_cut(g, &exact.cut).map_err(|e| e.to_string())?.psd {
            continue;
        }
        certifiable += 1;
        let x = extended_spectral_solve(g, &dual).map_err(|e| e.to_string())?;
        // with tied maxima any of them is a correct answer
        let same = if exact.unique { x.cut.same_partition(&exact.cut) } else { rel_close(x.value, exact.value, 1e-9) };
        ensure(x.certified && same, || format!("{name}: certifiable cut not returned"))?;
        ensure(gap_ok(x.dual.gap), || format!("{name}: gap {}", x.dual.gap))?;
    }
    for seed in 0..100u64 {
        let p = gen_planted(14, uniform(), 4.0, seed).unwrap();
        let x = extended_spectral_solve(&p.graph, &dual).map_err(|e| e.to_string())?;
        let exact = brute_force_max_cut(&p.graph, &cfg).map_err(|e| e.to_string())?;
        ensure(x.certified && x.cut.same_partition(&exact.cut), || format!("planted n14 γ4 s{seed}: not certified"))?;
        ensure(gap_ok(x.dual.gap), || format!("planted s{seed}: gap {}", x.dual.gap))?;
    }
    Ok(format!("{certifiable} of {} corpus instances certifiable, all recovered; 100/100 planted n=14 γ=4 certified", corpus.len()))
}

fn two_eigenvalue_soundness(corpus: &[(String, WeightedGraph)]) -> Outcome {
    let cfg = OracleConfig::default();
    let mut holding = 0;
    for (name, g) in corpus {
        let exact = brute_force_max_cut(g, &cfg).map_err(|e| e.to_string())?;
        let check = two_eigenvalue_condition(g, &exact.cut).map_err(|e| e.to_string())?;
        if check.margin <= 0.0 {
            continue;
        }
        holding += 1;
        let d = build_diagonal_from_cut(g, &exact.cut).map_err(|e| e.to_string())?;
        let m = SymMatrix::shifted(g, Some(&d)).map_err(|e| e.to_string())?;
        ensure(is_psd(&m, PSD_TOLERANCE), || format!("{name}: margin {} but W + diag(d) is not PSD", check.margin))?;
    }
    ensure(holding > 0, || "condition never held; check is vacuous".into())?;
    Ok(format!("margin > 0 on {holding} of {} instances, zero counterexamples", corpus.len()))
}

fn kernel_and_trace() -> Outcome {
    let mut worst_kernel = 0.0f64;
    for seed in 0..1000u64 {
        let mut r = rng::stream(60_000 + seed, 0);
        let n = 2 + rng::below(&mut r, 15) as usize;
        let g = gen_random_weighted(n, 0.2 + 0.7 * rng::unit_f64(&mut r), uniform(), 60_000 + seed).unwrap();
        let c = Cut::new((0..n).map(|_| if rng::below(&mut r, 2) == 0 { 1 } else { -1 }).collect()).unwrap();
        let d = build_diagonal_from_cut(&g, &c).map_err(|e| e.to_string())?;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| g.weight(i, j) * c.sign(j)).sum::<f64>() + d[i] * c.sign(i);
            worst_kernel = worst_kernel.max(row.abs());
        }
        let (mut cut, mut uncut) = (0.0, 0.0);
        for (i, j, w) in g.edges() {
            if crossing(&c, i, j) {
                cut += w;
            } else {
                uncut += w;
            }
        }
        let trace: f64 = d.iter().sum();
        ensure(rel_close(trace, 2.0 * (cut - uncut), 1e-9), || format!("seed {seed}: trace {trace} vs {}", 2.0 * (cut - uncut)))?;
    }
    ensure(worst_kernel <= 1e-10, || format!("kernel residual {worst_kernel}"))?;
    Ok(format!("1000 pairs, worst kernel residual {worst_kernel:.1e}"))
}

fn gw_bounds() -> Outcome {
    let one = gw_bound(1.0).map_err(|e| e.to_string())?;
    ensure(one == 1.0, || format!("gw_bound(1) = {one}"))?;
    let three_quarters = gw_bound(0.75).map_err(|e| e.to_string())?;
    ensure((three_quarters - 8.0 / 9.0).abs() <= 1e-12, || format!("gw_bound(3/4) = {three_quarters}"))?;
    let scaled: Vec<f64> = [10.0, 1e2, 1e3, 1e4]
        .iter()
        .map(|&g: &f64| (1.0 - stable_gw_bound(g).unwrap()) * g.sqrt())
        .collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    // the asymptotic constant is 2/π
    ensure(hi <= 2.0 / std::f64::consts::PI, || format!("(1 − bound)·√γ = {scaled:?}"))?;
    Ok(format!("(1 − bound)·√γ in [{lo:.4}, {hi:.4}]"))
}

fn bench_reproduction(dir: &Path) -> Outcome {
    let out = dir.join("bench.csv");
    let o = stablecut(&[
        "bench", "--n", "100", "--gamma", "1,1.5,2,3", "--dist", "uniform:0.5:1.5", "--trials", "100",
        "--solver", "dual", "--seed", "0", "--max-iter", "500", "-o", out.to_str().unwrap(),
    ]);
    ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut rates = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| e.to_string())?;
        let gamma: f64 = row[1].parse().map_err(|_| "gamma column")?;
        let rate: f64 = row[5].parse().map_err(|_| "recovery column")?;
        rates.push((gamma, rate));
    }
    ensure(rates.len() == 4, || format!("expected 4 rows, got {}", rates.len()))?;
    ensure(rates.windows(2).all(|w| w[0].1 <= w[1].1), || format!("recovery not monotone: {rates:?}"))?;
    ensure(rates[3].1 >= 0.95, || format!("recovery at γ=3 is {}", rates[3].1))?;
    let shown: Vec<String> = rates.iter().map(|(g, r)| format!("γ={g}: {r}")).collect();
    Ok(format!("recovery {}", shown.join(", ")))
}

fn spectral_sanity() -> Outcome {
    let cfg = OracleConfig::default();
    let mut k44 = Vec::new();
    for i in 0..4 {
        for j in 4..8 {
            k44.push((i, j));
        }
    }
    let cases = [
        ("K2", WeightedGraph::from_unit_edges(2, &[(0, 1)]).unwrap()),
        ("P3", WeightedGraph::from_unit_edges(3, &[(0, 1), (1, 2)]).unwrap()),
        ("C4", WeightedGraph::from_unit_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()),
        ("K4,4", WeightedGraph::from_unit_edges(8, &k44).unwrap()),
    ];
    for (name, g) in &cases {
        let cut = spectral_partition(g, None).map_err(|e| e.to_string())?;
        let exact = brute_force_max_cut(g, &cfg).map_err(|e| e.to_string())?;
        ensure(cut.same_partition(&exact.cut), || format!("{name}: spectral cut differs"))?;
    }
    let mut worst = 0.0f64;
    for seed in 0..500u64 {
        let mut r = rng::stream(70_000 + seed, 0);
        let n = 1 + rng::below(&mut r, 50) as usize;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = 4.0 * rng::unit_f64(&mut r) - 2.0;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let m = SymMatrix::new(n, a.clone()).map_err(|e| e.to_string())?;
        let e = eigen_smallest_two(&m).map_err(|e| e.to_string())?;
        let norm = (0..n).map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max);
        let res = (0..n)
            .map(|i| ((0..n).map(|j| a[i * n + j] * e.eigvec[j]).sum::<f64>() - e.lambda_min * e.eigvec[i]).abs())
            .fold(0.0, f64::max);
        worst = worst.max(res / norm);
    }
    ensure(worst <= 1e-9, || format!("relative residual {worst:.2e}"))?;
    Ok(format!("K2, P3, C4, K4,4 recovered; worst relative residual {worst:.1e} over 500 matrices"))
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

/// Runs every command twice and compares all bytes written.
fn determinism(dir: &Path) -> Outcome {
    let run_all = |root: &Path| -> Result<BTreeMap<String, Vec<u8>>, String> {
        std::fs::create_dir_all(root).unwrap();
        let d = root.to_str().unwrap();
        let p = |name: &str| root.join(name).to_str().unwrap().to_string();
        let mut outputs = BTreeMap::new();
        let commands: Vec<Vec<String>> = vec![
            vec!["gen", "planted", "--n", "12", "--gamma", "2", "--seed", "3", "-o", d],
            vec!["gen", "planted", "--n", "20", "--gamma", "3", "--dist", "two_point:0.3:1:2", "--seed", "4", "-o", d],
            vec!["gen", "gnp", "--n", "10", "--p", "0.5", "--seed", "5", "-o", d],
            vec!["gen", "scale", "--input", &p("gnp_n10_p0.5_s5.graph"), "--gamma", "3", "--seed", "1", "-o", d],
            vec!["gen", "amplify", "--input", &p("planted_n12_g2_s3.graph"), "--tau", "2", "-o", d],
            vec!["solve", &p("planted_n12_g2_s3.graph"), "--dual-log", &p("dual_log.csv"), "--trace"],
            vec!["solve", &p("planted_n20_g3_s4.graph"), "--max-iter", "200"],
            vec!["solve", &p("gnp_n10_p0.5_s5_scaled.graph"), "--solver", "dual", "--seed", "9"],
            vec!["verify", &p("gnp_n10_p0.5_s5.graph")],
            vec!["spectrum", &p("planted_n12_g2_s3_amplified.graph"), "--max-iter", "200"],
            vec!["bench", "--n", "10,12", "--gamma", "1,2", "--trials", "3", "--solver", "greedy,dual", "--max-iter", "200"],
        ]
        .into_iter()
        .map(|c| c.into_iter().map(String::from).collect())
        .collect();
        for (k, args) in commands.iter().enumerate() {
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let o = stablecut(&refs);
            ensure(o.status.success(), || format!("{}: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)))?;
            // generators print the written path, which names the directory
            if args[0] != "gen" {
                outputs.insert(format!("stdout {k} {}", args[0]), o.stdout);
            }
        }
        outputs.extend(read_dir_bytes(root));
        Ok(outputs)
    };
    // reports record the instance path, so both runs use the same directory
    let root = dir.join("rerun");
    let a = run_all(&root)?;
    std::fs::remove_dir_all(&root).unwrap();
    let b = run_all(&root)?;
    ensure(a.keys().eq(b.keys()), || "different sets of outputs".into())?;
    for (name, bytes) in &a {
        ensure(&b[name] == bytes, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} outputs byte-identical across reruns", a.len()))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_cell = std::cell::OnceCell::new();
    let corpus = || corpus_cell.get_or_init(certificate_corpus);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>, Duration)> = vec![
        ("oracle identities", Box::new(oracle_identities), Duration::from_secs(60)),
        ("greedy exact under stability", Box::new(greedy_under_stability), Duration::from_secs(120)),
        ("bipartite recovery by contraction", Box::new(bipartite_recovery), Duration::from_secs(60)),
        ("certificate soundness", Box::new(|| certificate_soundness(corpus())), Duration::from_secs(120)),
        ("two-eigenvalue condition soundness", Box::new(|| two_eigenvalue_soundness(corpus())), Duration::from_secs(120)),
        ("kernel and trace identities", Box::new(kernel_and_trace), Duration::from_secs(60)),
        ("Goemans-Williamson bounds", Box::new(gw_bounds), Duration::from_secs(60)),
        ("planted recovery sweep n=100", Box::new(|| bench_reproduction(dir.path())), Duration::from_secs(600)),
        ("spectral sanity", Box::new(spectral_sanity), Duration::from_secs(60)),
        ("determinism", Box::new(|| determinism(dir.path())), Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            if took <= *budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.1?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({:.1} s)", k + 1, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({:.1} s)", k + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
