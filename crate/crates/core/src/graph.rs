//! Dense weighted graphs, cuts and perturbations.
//!
//! A [`WeightedGraph`] is a symmetric nonnegative matrix with zero diagonal.
//! Its support (the edges with strictly positive weight) defines the simple
//! graph used for degree statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric nonnegative weight matrix with zero diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: Vec<f64>,
}

impl WeightedGraph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        WeightedGraph {
            n,
            weights: vec![0.0; n * n],
        }
    }

    /// Build from a dense row-major matrix, checking every invariant exactly.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                actual: weights.len(),
            });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::Validation(format!("nonzero diagonal at vertex {i}")));
            }
            for j in 0..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Validation(format!(
                        "weight ({i},{j}) = {w} is not a finite nonnegative number"
                    )));
                }
                if w != weights[j * n + i] {
                    return Err(Error::Validation(format!("asymmetric weight at ({i},{j})")));
                }
            }
        }
        Ok(WeightedGraph { n, weights })
    }

    /// Build from an edge list. Repeated pairs are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = WeightedGraph::empty(n);
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Validation(format!("edge ({u},{v}) has weight {w}")));
            }
            if g.weight(u, v) != 0.0 {
                return Err(Error::Validation(format!("duplicate edge ({u},{v})")));
            }
            g.set(u, v, w);
        }
        Ok(g)
    }

    /// Unit-weight graph from an unweighted edge list.
    pub fn from_unit_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_edges(n, &weighted)
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, w: f64) {
        self.weights[i * self.n + j] = w;
        self.weights[j * self.n + i] = w;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Row `i` of the weight matrix.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    /// Row-major weight matrix.
    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Support edges `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let w = self.weight(i, j);
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Support neighbors of `i` in increasing order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.row(i)
            .iter()
            .enumerate()
            .filter_map(|(j, &w)| (w > 0.0).then_some(j))
            .collect()
    }

    /// True when every support edge has weight exactly 1.
    pub fn is_simple(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// Every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(WeightedGraph {
            n: self.n,
            weights: self.weights.iter().map(|w| w * factor).collect(),
        })
    }

    /// Connected components of the support, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            label[start] = id;
            let mut head = 0;
            while head < members.len() {
                let v = members[head];
                head += 1;
                for (u, &w) in self.row(v).iter().enumerate() {
                    if w > 0.0 && label[u] == usize::MAX {
                        label[u] = id;
                        members.push(u);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Two-coloring of the support when it is bipartite.
    pub fn bipartition(&self) -> Option<Cut> {
        let mut side = vec![0i8; self.n];
        for start in 0..self.n {
            if side[start] != 0 {
                continue;
            }
            side[start] = 1;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (u, &w) in self.row(v).iter().enumerate() {
                    if w <= 0.0 {
                        continue;
                    }
                    if side[u] == 0 {
                        side[u] = -side[v];
                        stack.push(u);
                    } else if side[u] == side[v] {
                        return None;
                    }
                }
            }
        }
        Some(Cut { signs: side })
    }

    /// Weighted degrees and support degree statistics.
    pub fn degrees(&self) -> DegreeStats {
        weighted_degrees(self)
    }
}

/// Weighted degrees `w(i)` and extremes over the support graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    /// `w(i) = Σ_j W_ij`.
    pub weighted: Vec<f64>,
    /// Support degree of every vertex.
    pub simple: Vec<usize>,
    /// Smallest weighted degree.
    pub min_weighted: f64,
    /// Largest support degree.
    pub max_simple: usize,
    /// Smallest support degree.
    pub min_simple: usize,
}

pub fn weighted_degrees(g: &WeightedGraph) -> DegreeStats {
    let weighted: Vec<f64> = (0..g.n()).map(|i| g.row(i).iter().sum()).collect();
    let simple: Vec<usize> = (0..g.n())
        .map(|i| g.row(i).iter().filter(|&&w| w > 0.0).count())
        .collect();
    DegreeStats {
        min_weighted: weighted.iter().copied().fold(f64::INFINITY, f64::min),
        max_simple: simple.iter().copied().max().unwrap_or(0),
        min_simple: simple.iter().copied().min().unwrap_or(0),
        weighted,
        simple,
    }
}

/// A two-sided partition as a `±1` indicator vector.
///
/// `+1` marks membership in `S`. A cut and its negation describe the same
/// partition; [`Cut::canonical`] picks the representative with `signs[0] = +1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Cut {
    signs: Vec<i8>,
}

impl Cut {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::Validation(format!("cut entry {bad} is not ±1")));
        }
        Ok(Cut { signs })
    }

    /// Cut with `S = members`.
    pub fn from_side(n: usize, members: &[usize]) -> Result<Self> {
        let mut signs = vec![-1i8; n];
        for &v in members {
            if v >= n {
                return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
            }
            signs[v] = 1;
        }
        Ok(Cut { signs })
    }

    /// Cut for enumeration mask: vertex 0 is on the `+1` side and vertex
    /// `i ≥ 1` is on the `-1` side iff bit `i - 1` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let signs = (0..n)
            .map(|i| {
                if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        Cut { signs }
    }

    /// Inverse of [`Cut::from_mask`] for canonical cuts on at most 64 vertices.
    pub fn to_mask(&self) -> u64 {
        let c = self.canonical();
        c.signs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &s)| s == -1)
            .fold(0u64, |m, (i, _)| m | (1 << (i - 1)))
    }

    /// Sign-rounded vector: `+1` where `v_i > 0`, `-1` otherwise.
    pub fn from_vector(v: &[f64]) -> Self {
        Cut {
            signs: v.iter().map(|&x| if x > 0.0 { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i] as f64
    }

    pub fn negated(&self) -> Cut {
        Cut {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    pub fn canonical(&self) -> Cut {
        match self.signs.first() {
            Some(-1) => self.negated(),
            _ => self.clone(),
        }
    }

    /// Same unordered partition.
    pub fn same_partition(&self, other: &Cut) -> bool {
        self.canonical() == other.canonical()
    }

    /// Vertices on the `+1` side.
    pub fn side(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.signs[i] == 1).collect()
    }

    pub fn flip(&mut self, i: usize) {
        self.signs[i] = -self.signs[i];
    }

    /// Pull a cut of a contracted graph back along `map` (old vertex → new vertex).
    pub fn lift(&self, map: &[usize]) -> Result<Cut> {
        if let Some(&bad) = map.iter().find(|&&m| m >= self.len()) {
            return Err(Error::Dimension {
                expected: self.len(),
                actual: bad + 1,
            });
        }
        Ok(Cut {
            signs: map.iter().map(|&m| self.signs[m]).collect(),
        })
    }

    /// `min(|S Δ T|, |S Δ T̄|)`.
    pub fn distance(&self, other: &Cut) -> usize {
        let diff = self
            .signs
            .iter()
            .zip(&other.signs)
            .filter(|(a, b)| a != b)
            .count();
        diff.min(self.len() - diff)
    }
}

impl TryFrom<Vec<i8>> for Cut {
    type Error = Error;

    fn try_from(signs: Vec<i8>) -> Result<Self> {
        Cut::new(signs)
    }
}

impl From<Cut> for Vec<i8> {
    fn from(c: Cut) -> Vec<i8> {
        c.signs
    }
}

fn check_len(g: &WeightedGraph, c: &Cut) -> Result<()> {
    if c.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: c.len(),
        });
    }
    Ok(())
}

/// Total weight of edges whose endpoints lie on different sides.
pub fn cut_value(g: &WeightedGraph, c: &Cut) -> Result<f64> {
    check_len(g, c)?;
    Ok(cut_value_unchecked(g, c))
}

pub(crate) fn cut_value_unchecked(g: &WeightedGraph, c: &Cut) -> f64 {
    let s = c.signs();
    let mut total = 0.0;
    for i in 0..g.n() {
        let row = g.row(i);
        for j in (i + 1)..g.n() {
            if s[i] != s[j] {
                total += row[j];
            }
        }
    }
    total
}

/// `cᵀ W c = 2 (w_notcut − w_cut)`.
pub fn quadratic_form(g: &WeightedGraph, c: &Cut) -> Result<f64> {
    check_len(g, c)?;
    let mut q = 0.0;
    for i in 0..g.n() {
        let row = g.row(i);
        let mut acc = 0.0;
        for j in 0..g.n() {
            acc += row[j] * c.sign(j);
        }
        q += c.sign(i) * acc;
    }
    Ok(q)
}

/// Entrywise multipliers for a `γ`-perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    n: usize,
    factors: Vec<f64>,
    gamma: f64,
}

impl Perturbation {
    /// Multipliers must be symmetric. Range checks happen against a graph's
    /// support in [`apply_perturbation`].
    pub fn new(n: usize, factors: Vec<f64>, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::Validation(format!("gamma must be ≥ 1, got {gamma}")));
        }
        if factors.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                actual: factors.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if factors[i * n + j] != factors[j * n + i] {
                    return Err(Error::Validation(format!("asymmetric factor at ({i},{j})")));
                }
            }
        }
        Ok(Perturbation { n, factors, gamma })
    }

    /// All factors equal to one.
    pub fn identity(n: usize, gamma: f64) -> Result<Self> {
        Self::new(n, vec![1.0; n * n], gamma)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn factor(&self, i: usize, j: usize) -> f64 {
        self.factors[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: f64) {
        self.factors[i * self.n + j] = f;
        self.factors[j * self.n + i] = f;
    }
}

/// `W'_ij = factor_ij · W_ij`; fails if a support factor leaves `[1, γ]`.
pub fn apply_perturbation(g: &WeightedGraph, p: &Perturbation) -> Result<WeightedGraph> {
    if p.n != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: p.n,
        });
    }
    let mut out = g.clone();
    for (i, j, w) in g.edges() {
        let f = p.factor(i, j);
        if !(1.0..=p.gamma).contains(&f) {
            return Err(Error::Validation(format!(
                "factor {f} on edge ({i},{j}) outside [1, {}]",
                p.gamma
            )));
        }
        out.set(i, j, f * w);
    }
    Ok(out)
}

/// Merge `i` and `j` into one vertex, summing parallel edges and discarding
/// the resulting loop.
///
/// The merged vertex takes the position of `min(i, j)`; vertices after
/// `max(i, j)` shift down by one. Returns the old → new index map.
pub fn merge_vertices(g: &WeightedGraph, i: usize, j: usize) -> Result<(WeightedGraph, Vec<usize>)> {
    let n = g.n();
    if i == j {
        return Err(Error::InvalidArgument(format!("cannot merge vertex {i} with itself")));
    }
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!(
            "vertex out of range: ({i},{j}) with n = {n}"
        )));
    }
    let (keep, drop) = (i.min(j), i.max(j));
    let map: Vec<usize> = (0..n)
        .map(|v| match v.cmp(&drop) {
            std::cmp::Ordering::Less => v,
            std::cmp::Ordering::Equal => keep,
            std::cmp::Ordering::Greater => v - 1,
        })
        .collect();
    let merged = contract(g, &map, n - 1)?;
    Ok((merged, map))
}

/// Contract vertices sharing a label: `labels[v] < k` is the new index of `v`.
/// Parallel edges add up and loops vanish.
pub fn contract(g: &WeightedGraph, labels: &[usize], k: usize) -> Result<WeightedGraph> {
    if labels.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::InvalidArgument(format!("label {bad} out of range for {k} classes")));
    }
    let mut out = WeightedGraph::empty(k);
    for (u, v, w) in g.edges() {
        let (a, b) = (labels[u], labels[v]);
        if a != b {
            let cur = out.weight(a, b);
            out.set(a, b, cur + w);
        }
    }
    Ok(out)
}
