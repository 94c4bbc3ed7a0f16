//! Exact polynomial-time algorithms for sufficiently stable instances.
//!
//! [`find_max_cut_greedy`] grows a spanning bipartite subgraph one component
//! at a time: the smallest component is glued to another component along the
//! heaviest set of edges that can be made cut edges together. Under high
//! stability every step is forced, so the result is the maximum cut.
//!
//! [`high_degree_solve`] targets simple graphs with large minimum degree.
//! Vertices sharing many neighbors must lie on the same side of the maximum
//! cut; contracting those groups leaves a small weighted graph.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{contract, Cut, WeightedGraph};
use crate::oracle::{self, OracleConfig};

/// Contracted graphs with at most this many vertices are solved exhaustively.
pub const DEFAULT_EXHAUSTIVE_LOG2: usize = 20;

/// One merge of the greedy algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub iteration: usize,
    /// Sizes of all components before the merge, ordered by lowest vertex.
    pub component_sizes: Vec<usize>,
    /// Position of the partner component in that order.
    pub chosen_j: usize,
    /// 0: the same-side edge set `E⁰`; 1: the cross edge set `E¹`.
    pub chosen_c: u8,
    pub edge_weight_added: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub cut: Cut,
    pub trace: Vec<MergeStep>,
    /// Per iteration, the number of other components joined to the chosen
    /// one by at least one edge.
    pub neighbor_components: Vec<usize>,
}

/// Greedy component growing.
///
/// The smallest component (by size, then lowest vertex) is merged with the
/// component `j` and edge class `c` of largest weight; ties prefer lower `j`,
/// then `c = 0`. Choosing `E⁰` flips the orientation of `j`. Disconnected
/// inputs end up merged along zero-weight choices.
pub fn find_max_cut_greedy(g: &WeightedGraph) -> GreedyResult {
    let n = g.n();
    let mut sign = vec![1i8; n];
    // components ordered by lowest vertex; vertex lists kept sorted
    let mut comps: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut comp_of: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(n.saturating_sub(1));
    let mut neighbor_components = Vec::with_capacity(n.saturating_sub(1));
    let mut w0 = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut touched = vec![false; n];

    while comps.len() > 1 {
        let istar = (0..comps.len())
            .min_by_key(|&k| (comps[k].len(), comps[k][0]))
            .expect("nonempty");
        let t = comps.len();
        w0[..t].iter_mut().for_each(|x| *x = 0.0);
        w1[..t].iter_mut().for_each(|x| *x = 0.0);
        touched[..t].iter_mut().for_each(|x| *x = false);
        for &u in &comps[istar] {
            for (v, &w) in g.row(u).iter().enumerate() {
                if w == 0.0 || comp_of[v] == istar {
                    continue;
                }
                let j = comp_of[v];
                touched[j] = true;
                if sign[u] == sign[v] {
                    w0[j] += w;
                } else {
                    w1[j] += w;
                }
            }
        }

        let mut best: Option<(usize, u8, f64)> = None;
        for j in (0..t).filter(|&j| j != istar) {
            for (c, w) in [(0u8, w0[j]), (1u8, w1[j])] {
                if best.map_or(true, |(_, _, bw)| w > bw) {
                    best = Some((j, c, w));
                }
            }
        }
        let (j, c, w) = best.expect("at least two components");

        trace.push(MergeStep {
            iteration: trace.len(),
            component_sizes: comps.iter().map(Vec::len).collect(),
            chosen_j: j,
            chosen_c: c,
            edge_weight_added: w,
        });
        neighbor_components.push(touched[..t].iter().filter(|&&x| x).count());

        if c == 0 {
            for &v in &comps[j] {
                sign[v] = -sign[v];
            }
        }
        let (keep, drop) = if istar < j { (istar, j) } else { (j, istar) };
        let moved = comps.remove(drop);
        comps[keep].extend(moved);
        comps[keep].sort_unstable();
        for (k, comp) in comps.iter().enumerate().skip(keep) {
            for &v in comp {
                comp_of[v] = k;
            }
        }
    }

    GreedyResult {
        cut: Cut::new(sign).expect("signs are ±1").canonical(),
        trace,
        neighbor_components,
    }
}

/// Per-iteration applicability of the greedy guarantee at stability `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Applicability {
    pub per_iteration: Vec<bool>,
    pub overall: bool,
}

/// The guarantee needs fewer than `γ` neighboring components at every step.
pub fn greedy_applicability(result: &GreedyResult, gamma: f64) -> Applicability {
    let per_iteration: Vec<bool> = result
        .neighbor_components
        .iter()
        .map(|&k| (k as f64) < gamma)
        .collect();
    Applicability {
        overall: per_iteration.iter().all(|&b| b),
        per_iteration,
    }
}

fn require_simple(g: &WeightedGraph) -> Result<()> {
    if g.is_simple() {
        Ok(())
    } else {
        Err(Error::Validation("input must be a simple graph (all weights 1)".into()))
    }
}

/// `i ~ j` in `H` iff `|N(i) ∩ N(j)| > min(d_i, d_j) / (γ + 1)`.
pub fn build_conflict_graph(g: &WeightedGraph, gamma: f64) -> Result<WeightedGraph> {
    require_simple(g)?;
    if !(gamma >= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must be at least 1, got {gamma}")));
    }
    let n = g.n();
    let words = n.div_ceil(64);
    let mut bits = vec![0u64; n * words];
    let mut deg = vec![0usize; n];
    for (u, v, _) in g.edges() {
        bits[u * words + v / 64] |= 1 << (v % 64);
        bits[v * words + u / 64] |= 1 << (u % 64);
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut edges = Vec::new();
    for i in 0..n {
        let bi = &bits[i * words..(i + 1) * words];
        for j in (i + 1)..n {
            let bj = &bits[j * words..(j + 1) * words];
            let shared: u32 = bi.iter().zip(bj).map(|(a, b)| (a & b).count_ones()).sum();
            let threshold = deg[i].min(deg[j]) as f64 / (gamma + 1.0);
            if shared as f64 > threshold {
                edges.push((i, j));
            }
        }
    }
    WeightedGraph::from_unit_edges(n, &edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighDegreeResult {
    pub cut: Cut,
    pub gamma: f64,
    /// Number of conflict-graph components, i.e. vertices after contraction.
    pub components: usize,
    pub exhaustive: bool,
    /// At least `γ` components remained: the stability hypothesis fails and
    /// the output is heuristic.
    pub component_overflow: bool,
}

/// Contract conflict-graph components and solve what is left.
///
/// `gamma` defaults to `2n/δ`. The contracted graph is solved exhaustively
/// when it has at most `exhaustive_log2` vertices, greedily otherwise.
pub fn high_degree_solve(
    g: &WeightedGraph,
    gamma: Option<f64>,
    exhaustive_log2: usize,
) -> Result<HighDegreeResult> {
    require_simple(g)?;
    let n = g.n();
    let gamma = gamma.unwrap_or_else(|| {
        let delta = g.degrees().min_simple;
        if delta == 0 {
            f64::INFINITY
        } else {
            2.0 * n as f64 / delta as f64
        }
    });
    let h = build_conflict_graph(g, gamma)?;
    let groups = h.components();
    let k = groups.len();
    let mut labels = vec![0usize; n];
    for (l, grp) in groups.iter().enumerate() {
        for &v in grp {
            labels[v] = l;
        }
    }
    let small = contract(g, &labels, k)?;
    let exhaustive = k <= exhaustive_log2.min(62);
    let small_cut = if k == 1 {
        Cut::new(vec![1]).expect("valid")
    } else if exhaustive {
        oracle::brute_force_max_cut(&small, &OracleConfig::with_limit(k))?.cut
    } else {
        find_max_cut_greedy(&small).cut
    };
    Ok(HighDegreeResult {
        cut: small_cut.lift(&labels)?.canonical(),
        gamma,
        components: k,
        exhaustive,
        component_overflow: k as f64 >= gamma,
    })
}

/// Repeatedly flip the vertex with the largest positive gain in cut value
/// (lowest index on ties) until no flip gains more than `tol` times the
/// total weight.
pub fn polish_by_flips(g: &WeightedGraph, cut: &Cut, tol: f64) -> Result<Cut> {
    let n = g.n();
    if cut.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: cut.len(),
        });
    }
    let eps = tol * g.total_weight().max(f64::MIN_POSITIVE);
    let mut c = cut.clone();
    // wc[i] = Σ_j W_ij c_j; flipping i gains c_i · wc[i]
    let mut wc: Vec<f64> = (0..n)
        .map(|i| g.row(i).iter().enumerate().map(|(j, w)| w * c.sign(j)).sum())
        .collect();
    for _ in 0..(n * n + 1) {
        let mut best = (eps, None);
        for i in 0..n {
            let gain = c.sign(i) * wc[i];
            if gain > best.0 {
                best = (gain, Some(i));
            }
        }
        let Some(i) = best.1 else { break };
        let delta = -2.0 * c.sign(i);
        c.flip(i);
        for (j, w) in g.row(i).iter().enumerate() {
            wc[j] += w * delta;
        }
    }
    Ok(c)
}
