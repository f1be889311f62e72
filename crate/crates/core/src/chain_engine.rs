//! Chains as walks in the error graph `weight(u, v) = d(f(u), v)`.
//!
//! An ε-chain is a walk whose every edge weighs at most ε; a strong
//! ε-chain is a walk of total weight at most ε. Ordinary chains reduce to
//! strongly connected components of the ε-chain digraph, strong chains to
//! shortest paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::dynamics::FiniteSystem;
use crate::error::{Error, Result};
use crate::metric_space::{within, FiniteMetricSpace, ProductSpace};
use crate::par;

/// Search cutoff used when none is given, as a multiple of ε.
pub const DEFAULT_CUTOFF_FACTOR: f64 = 4.0;

/// Horizon of length profiles when none is given, as a multiple of `|X|`.
pub const DEFAULT_HORIZON_FACTOR: usize = 4;

/// Error graph of a system under a (possibly different) metric.
#[derive(Clone, Copy, Debug)]
pub struct ErrorGraph<'a> {
    system: &'a FiniteSystem,
    metric: &'a FiniteMetricSpace,
}

impl<'a> ErrorGraph<'a> {
    /// Error graph under the system's own metric.
    pub fn new(system: &'a FiniteSystem) -> Self {
        Self {
            system,
            metric: system.space(),
        }
    }

    pub fn with_metric(system: &'a FiniteSystem, metric: &'a FiniteMetricSpace) -> Result<Self> {
        if metric.len() != system.len() {
            return Err(Error::Dimension(format!(
                "metric has {} points, system has {}",
                metric.len(),
                system.len()
            )));
        }
        Ok(Self { system, metric })
    }

    pub fn system(&self) -> &'a FiniteSystem {
        self.system
    }

    pub fn metric(&self) -> &'a FiniteMetricSpace {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.system.len()
    }

    pub fn is_empty(&self) -> bool {
        self.system.is_empty()
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.metric.dist(self.system.image(u), v)
    }

    /// Every `v` with `weight(u, v) <= budget`, sorted, with the weight.
    pub fn successors(&self, u: usize, budget: f64, out: &mut Vec<(usize, f64)>) {
        self.metric.neighbors_into(self.system.image(u), budget, out);
    }
}

/// Directed graph in compressed adjacency form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Digraph {
    pub fn from_adjacency(adj: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(adj.iter().map(Vec::len).sum());
        for row in adj {
            targets.extend(row);
            offsets.push(targets.len());
        }
        Self { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Successors of `u`, sorted.
    pub fn successors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.successors(u).binary_search(&v).is_ok()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }
}

/// Edge `u → v` iff `weight(u, v) <= eps`.
pub fn chain_graph(eg: &ErrorGraph, eps: f64) -> Result<Digraph> {
    restricted_chain_graph(eg, eps, None)
}

fn restricted_chain_graph(eg: &ErrorGraph, eps: f64, allowed: Option<&[bool]>) -> Result<Digraph> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {eps} must be nonnegative")));
    }
    let adj = par::map_indices(eg.len(), |u| {
        if allowed.is_some_and(|a| !a[u]) {
            return Vec::new();
        }
        let mut out = Vec::new();
        eg.successors(u, eps, &mut out);
        let mut row: Vec<usize> = out
            .into_iter()
            .map(|(v, _)| v)
            .filter(|&v| allowed.map_or(true, |a| a[v]))
            .collect();
        let image = eg.system().image(u);
        if allowed.map_or(true, |a| a[image]) {
            if let Err(pos) = row.binary_search(&image) {
                row.insert(pos, image);
            }
        }
        row
    });
    Ok(Digraph::from_adjacency(adj))
}

/// Strongly connected components (iterative Tarjan). Returns the
/// component id of every vertex and the component count.
pub fn strongly_connected_components(g: &Digraph) -> (Vec<usize>, usize) {
    let n = g.node_count();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut comps = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            let succ = g.successors(u);
            if *pos < succ.len() {
                let v = succ[*pos];
                *pos += 1;
                if index[v] == UNSEEN {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = comps;
                    if w == u {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    (comp, comps)
}

/// Vertices on a directed cycle (self-loops count), sorted.
pub fn cyclic_vertices(g: &Digraph) -> Vec<usize> {
    let (comp, count) = strongly_connected_components(g);
    let mut size = vec![0usize; count];
    for &c in &comp {
        size[c] += 1;
    }
    (0..g.node_count())
        .filter(|&u| size[comp[u]] >= 2 || g.has_edge(u, u))
        .collect()
}

/// Points with an ε-chain to themselves staying inside `allowed`.
pub fn chain_recurrent_through(eg: &ErrorGraph, eps: f64, allowed: &[bool]) -> Result<Vec<usize>> {
    if allowed.len() != eg.len() {
        return Err(Error::Dimension(format!(
            "subset mask has {} entries for {} points",
            allowed.len(),
            eg.len()
        )));
    }
    let g = restricted_chain_graph(eg, eps, Some(allowed))?;
    Ok(cyclic_vertices(&g).into_iter().filter(|&u| allowed[u]).collect())
}

/// Walk `x_0, ..., x_n` in the error graph with its costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCertificate {
    pub points: Vec<usize>,
    pub total_cost: f64,
    pub max_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restricted_to: Option<String>,
}

impl ChainCertificate {
    /// Certificate for an explicit walk; costs are evaluated in `eg`.
    pub fn from_points(eg: &ErrorGraph, points: Vec<usize>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a chain needs at least one step".into()));
        }
        if let Some(&p) = points.iter().find(|&&p| p >= eg.len()) {
            return Err(Error::InvalidParameter(format!("chain point {p} out of range")));
        }
        let (total_cost, max_step) = walk_costs(eg, &points);
        Ok(Self {
            points,
            total_cost,
            max_step,
            restricted_to: None,
        })
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.len() < 2
    }

    pub fn start(&self) -> usize {
        self.points[0]
    }

    pub fn end(&self) -> usize {
        *self.points.last().unwrap()
    }

    /// Recomputes the costs; true when they agree with the stored values.
    pub fn verify(&self, eg: &ErrorGraph) -> bool {
        if self.points.len() < 2 || self.points.iter().any(|&p| p >= eg.len()) {
            return false;
        }
        let (total, max) = walk_costs(eg, &self.points);
        close(total, self.total_cost) && close(max, self.max_step)
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &ChainCertificate) -> Result<Self> {
        if self.end() != other.start() {
            return Err(Error::InvalidParameter(format!(
                "chain ends at {} but the next starts at {}",
                self.end(),
                other.start()
            )));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Self {
            points,
            total_cost: self.total_cost + other.total_cost,
            max_step: self.max_step.max(other.max_step),
            restricted_to: None,
        })
    }

    /// `self` repeated `k >= 1` times (a closed chain).
    pub fn repeat(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("repeat count must be positive".into()));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    /// Coordinate chains of a chain in a sum-metric product, with costs in
    /// the factor metrics.
    pub fn project(
        &self,
        prod: &ProductSpace,
        f: &FiniteSystem,
        g: &FiniteSystem,
    ) -> Result<(ChainCertificate, ChainCertificate)> {
        let (xs, ys): (Vec<usize>, Vec<usize>) = self.points.iter().map(|&k| prod.split(k)).unzip();
        Ok((
            ChainCertificate::from_points(&ErrorGraph::new(f), xs)?,
            ChainCertificate::from_points(&ErrorGraph::new(g), ys)?,
        ))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

fn walk_costs(eg: &ErrorGraph, points: &[usize]) -> (f64, f64) {
    let mut total = 0.0;
    let mut max = 0.0f64;
    for w in points.windows(2) {
        let c = eg.weight(w[0], w[1]);
        total += c;
        max = max.max(c);
    }
    (total, max)
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (cost, node).
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Least costs of chains of length `>= 1` from one source.
#[derive(Clone, Debug)]
pub struct ShortestChains {
    pub source: usize,
    pub cutoff: f64,
    /// `cost[v]`: least cost of a chain `source → v`; infinite when above
    /// the cutoff. `cost[source]` is the least cost of a closed chain.
    pub cost: Vec<f64>,
    pred: Vec<usize>,
}

impl ShortestChains {
    /// Chain realizing `cost[target]`.
    pub fn certificate(&self, eg: &ErrorGraph, target: usize) -> Option<ChainCertificate> {
        if !self.cost[target].is_finite() {
            return None;
        }
        let mut rev = vec![target];
        let mut cur = self.pred[target];
        rev.push(cur);
        while cur != self.source {
            cur = self.pred[cur];
            rev.push(cur);
            if rev.len() > self.cost.len() + 1 {
                return None;
            }
        }
        rev.reverse();
        ChainCertificate::from_points(eg, rev).ok()
    }
}

/// Dijkstra from `source` over chains of length `>= 1`, pruned at
/// `cutoff`. With `stop_at`, the search ends once that vertex is settled.
pub fn shortest_chains(eg: &ErrorGraph, source: usize, cutoff: f64, stop_at: Option<usize>) -> ShortestChains {
    let n = eg.len();
    let mut cost = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut out = Vec::new();
    // The source expands once, at cost zero (the empty chain).
    let relax = |u: usize, base: f64, cost: &mut [f64], pred: &mut [usize], done: &[bool], heap: &mut BinaryHeap<Entry>, out: &mut Vec<(usize, f64)>| {
        eg.successors(u, cutoff - base, out);
        for &(v, w) in out.iter() {
            let c = base + w;
            if done[v] || !within(c, cutoff) {
                continue;
            }
            if c < cost[v] || (c == cost[v] && u < pred[v]) {
                if c < cost[v] {
                    heap.push(Entry { cost: c, node: v });
                }
                cost[v] = c;
                pred[v] = u;
            }
        }
    };
    relax(source, 0.0, &mut cost, &mut pred, &done, &mut heap, &mut out);
    while let Some(Entry { cost: c, node: u }) = heap.pop() {
        if done[u] || c > cost[u] {
            continue;
        }
        done[u] = true;
        if stop_at == Some(u) {
            break;
        }
        if u != source {
            relax(u, c, &mut cost, &mut pred, &done, &mut heap, &mut out);
        }
    }
    ShortestChains {
        source,
        cutoff,
        cost,
        pred,
    }
}

/// Least total cost of a closed chain at `x` (length `>= 1`), with a
/// certificate; infinite with no certificate when above `cutoff`.
pub fn min_cycle_cost(eg: &ErrorGraph, x: usize, cutoff: f64) -> (f64, Option<ChainCertificate>) {
    if let Some(p) = eg.system().period(x) {
        let orbit: Vec<usize> = (0..=p).map(|k| eg.system().iterate(x, k)).collect();
        let cert = ChainCertificate::from_points(eg, orbit).ok();
        return (0.0, cert);
    }
    let sc = shortest_chains(eg, x, cutoff, Some(x));
    let c = sc.cost[x];
    (c, sc.certificate(eg, x))
}

/// [`min_cycle_cost`] of every point (no certificates).
pub fn min_cycle_costs(eg: &ErrorGraph, cutoff: f64) -> Vec<f64> {
    let periodic = eg.system().periodic_mask();
    par::map_indices(eg.len(), |x| {
        if periodic[x] {
            0.0
        } else {
            shortest_chains(eg, x, cutoff, Some(x)).cost[x]
        }
    })
}

/// `h_p(y)`: least cost of a chain `p → y` of length `>= 1`, capped at
/// `cutoff`.
pub fn potential(eg: &ErrorGraph, p: usize, cutoff: f64) -> Vec<f64> {
    let sc = shortest_chains(eg, p, cutoff, None);
    sc.cost.into_iter().map(|c| c.min(cutoff)).collect()
}

/// Lyapunov function built from a potential and its neutral set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lyapunov {
    pub base: usize,
    pub cap: f64,
    pub theta: Vec<f64>,
    /// `{y : θ(f(y)) = θ(y)}`, sorted.
    pub neutral: Vec<usize>,
}

/// `θ(y) = min(h_p(y), cap)`; nonincreasing along orbits.
pub fn lyapunov_from_potential(eg: &ErrorGraph, p: usize, cap: f64) -> Result<Lyapunov> {
    if !(cap > 0.0) {
        return Err(Error::InvalidParameter(format!("cap {cap} must be positive")));
    }
    let theta = potential(eg, p, cap);
    let sys = eg.system();
    let neutral = (0..eg.len()).filter(|&y| theta[sys.image(y)] == theta[y]).collect();
    Ok(Lyapunov {
        base: p,
        cap,
        theta,
        neutral,
    })
}

fn check_layers(layers: usize, n: usize) -> Result<()> {
    let cap = crate::capacity_cap();
    let requested = layers.saturating_mul(n);
    if requested > cap {
        return Err(Error::Capacity {
            what: "layered chain search",
            requested,
            cap,
        });
    }
    Ok(())
}

/// `cost[k][v]`: least cost of a chain of exactly `k` steps from `x` to
/// `v` (if at most `eps`), for `k = 0..=n_max`.
pub fn exact_length_costs(eg: &ErrorGraph, x: usize, eps: f64, n_max: usize) -> Result<Vec<Vec<f64>>> {
    let n = eg.len();
    check_layers(n_max + 1, n)?;
    let mut layers = Vec::with_capacity(n_max + 1);
    let mut cur = vec![f64::INFINITY; n];
    cur[x] = 0.0;
    let mut active = vec![x];
    let mut out = Vec::new();
    layers.push(cur.clone());
    for _ in 0..n_max {
        let mut next = vec![f64::INFINITY; n];
        let mut next_active = Vec::new();
        for &u in &active {
            let base = cur[u];
            eg.successors(u, eps - base, &mut out);
            for &(v, w) in &out {
                let c = base + w;
                if within(c, eps) && c < next[v] {
                    if next[v].is_infinite() {
                        next_active.push(v);
                    }
                    next[v] = c;
                }
            }
        }
        next_active.sort_unstable();
        layers.push(next.clone());
        cur = next;
        active = next_active;
    }
    Ok(layers)
}

/// `cost[k][v]`: least cost of a chain of exactly `k` steps from `v` to `x`.
fn exact_length_costs_to(eg: &ErrorGraph, x: usize, eps: f64, n_max: usize) -> Result<Vec<Vec<f64>>> {
    let n = eg.len();
    check_layers(n_max + 1, n)?;
    let mut layers = Vec::with_capacity(n_max + 1);
    let mut cur = vec![f64::INFINITY; n];
    cur[x] = 0.0;
    layers.push(cur.clone());
    let mut out = Vec::new();
    for _ in 0..n_max {
        let next: Vec<f64> = (0..n)
            .map(|v| {
                eg.successors(v, eps, &mut out);
                out.iter()
                    .map(|&(w, c)| c + cur[w])
                    .filter(|&c| within(c, eps))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        layers.push(next.clone());
        cur = next;
    }
    Ok(layers)
}

/// Lengths of strong ε-cycles at a base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub base: usize,
    pub eps: f64,
    pub n_max: usize,
    /// Sorted lengths in `[1, n_max]`.
    pub lengths: Vec<usize>,
    pub through_all: bool,
    /// Points the lengths were required to pass through (just the base
    /// unless `through_all`).
    pub class: Vec<usize>,
}

impl LengthProfile {
    pub fn contains(&self, n: usize) -> bool {
        self.lengths.binary_search(&n).is_ok()
    }

    pub fn min_length(&self) -> Option<usize> {
        self.lengths.first().copied()
    }

    /// Membership bitmap over `0..=n_max`.
    pub fn bitmap(&self) -> Vec<bool> {
        let mut bits = vec![false; self.n_max + 1];
        for &n in &self.lengths {
            bits[n] = true;
        }
        bits
    }
}

/// Points `x'` joined to `x` by a strong ε-cycle through both: the
/// fixed-tolerance stand-in for `x ∼ x'`. Such points share the ε-chain
/// component of `x`.
pub fn strong_class(eg: &ErrorGraph, x: usize, eps: f64) -> Vec<usize> {
    let from_x = shortest_chains(eg, x, eps, None);
    let mut class = Vec::new();
    for y in 0..eg.len() {
        if y == x {
            if within(from_x.cost[x], eps) {
                class.push(x);
            }
            continue;
        }
        let there = from_x.cost[y];
        if !within(there, eps) {
            continue;
        }
        let back = shortest_chains(eg, y, eps - there, Some(x)).cost[x];
        if within(there + back, eps) {
            class.push(y);
        }
    }
    class
}

/// Lengths `n <= n_max` with a strong ε-cycle of exactly `n` steps at `x`;
/// with `through_all`, the cycle must also pass through each point of
/// [`strong_class`] of `x` (lengths are intersected over the class).
pub fn length_profile(eg: &ErrorGraph, x: usize, eps: f64, n_max: usize, through_all: bool) -> Result<LengthProfile> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {eps} must be nonnegative")));
    }
    let from = exact_length_costs(eg, x, eps, n_max)?;
    let mut ok: Vec<bool> = (0..=n_max).map(|k| k > 0 && within(from[k][x], eps)).collect();
    let class = if through_all {
        let class = strong_class(eg, x, eps);
        let to = exact_length_costs_to(eg, x, eps, n_max)?;
        for &y in class.iter().filter(|&&y| y != x) {
            let a: Vec<f64> = (0..=n_max).map(|k| from[k][y]).collect();
            let b: Vec<f64> = (0..=n_max).map(|k| to[k][y]).collect();
            let ai: Vec<usize> = (1..=n_max).filter(|&i| a[i].is_finite()).collect();
            for n in 1..=n_max {
                if !ok[n] {
                    continue;
                }
                ok[n] = ai
                    .iter()
                    .take_while(|&&i| i < n)
                    .any(|&i| within(a[i] + b[n - i], eps));
            }
        }
        class
    } else {
        vec![x]
    };
    Ok(LengthProfile {
        base: x,
        eps,
        n_max,
        lengths: (1..=n_max).filter(|&n| ok[n]).collect(),
        through_all,
        class,
    })
}

/// True iff every sum of a nonempty subset of `sample` that is at most
/// `n_max` lies in the profile.
pub fn ip_closure_check(profile: &LengthProfile, sample: &[usize]) -> Result<bool> {
    if let Some(&s) = sample.iter().find(|&&s| !profile.contains(s)) {
        return Err(Error::Precondition(format!("sample length {s} is not in the profile")));
    }
    let n_max = profile.n_max;
    let mut reach = vec![false; n_max + 1];
    for &s in sample {
        for t in (1..=n_max.saturating_sub(s)).rev() {
            if reach[t] {
                reach[t + s] = true;
            }
        }
        reach[s] = true;
    }
    Ok((1..=n_max).all(|t| !reach[t] || profile.contains(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{circle_system, finite_system, identity_system, CircleMap};
    use crate::metric_space::FiniteMetricSpace;
    use std::f64::consts::TAU;
    use std::sync::Arc;

    fn path_shift(n: usize) -> FiniteSystem {
        let space = Arc::new(FiniteMetricSpace::path(n).unwrap());
        finite_system(space, (0..n).map(|i| (i + 1).min(n - 1)).collect()).unwrap()
    }

    #[test]
    fn zero_tolerance_graph_is_functional() {
        let s = circle_system(CircleMap::Doubling, 16).unwrap();
        let g = chain_graph(&ErrorGraph::new(&s), 0.0).unwrap();
        for u in 0..16 {
            assert_eq!(g.successors(u), &[s.image(u)]);
        }
    }

    #[test]
    fn one_cell_rotation_graph_has_three_successors() {
        let s = circle_system(CircleMap::Rotation { theta: TAU / 12.0 }, 12).unwrap();
        let g = chain_graph(&ErrorGraph::new(&s), TAU / 12.0).unwrap();
        for u in 0..12 {
            assert_eq!(g.out_degree(u), 3);
        }
    }

    #[test]
    fn diameter_tolerance_gives_complete_graph() {
        let s = circle_system(CircleMap::Doubling, 10).unwrap();
        let g = chain_graph(&ErrorGraph::new(&s), s.space().diameter()).unwrap();
        assert_eq!(g.edge_count(), 100);
    }

    #[test]
    fn cyclic_vertices_basic() {
        let s = identity_system(4).unwrap();
        assert_eq!(cyclic_vertices(&chain_graph(&ErrorGraph::new(&s), 0.0).unwrap()), vec![0, 1, 2, 3]);
        let p = path_shift(6);
        assert_eq!(cyclic_vertices(&chain_graph(&ErrorGraph::new(&p), 0.0).unwrap()), vec![5]);
    }

    #[test]
    fn tarjan_on_long_path_does_not_overflow() {
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![0] }).collect();
        let g = Digraph::from_adjacency(adj);
        let (_, count) = strongly_connected_components(&g);
        assert_eq!(count, 1);
    }

    #[test]
    fn restricted_chain_recurrence() {
        let p = path_shift(6);
        let eg = ErrorGraph::new(&p);
        let all = vec![true; 6];
        let g = chain_graph(&eg, 1.0).unwrap();
        assert_eq!(chain_recurrent_through(&eg, 1.0, &all).unwrap(), cyclic_vertices(&g));
        let mut only = vec![false; 6];
        only[2] = true;
        assert!(chain_recurrent_through(&eg, 0.5, &only).unwrap().is_empty());
    }

    #[test]
    fn fixed_point_cycle_costs_zero() {
        let p = path_shift(6);
        let (c, cert) = min_cycle_cost(&ErrorGraph::new(&p), 5, 1.0);
        assert_eq!(c, 0.0);
        assert_eq!(cert.unwrap().points, vec![5, 5]);
    }

    #[test]
    fn path_cycle_cost_and_certificate() {
        let p = path_shift(6);
        let eg = ErrorGraph::new(&p);
        // From 2: walk to 3 for free, jump back from f(3)=4 to 2 costs 2,
        // or jump from f(2)=3 straight back to 2 at cost 1.
        let (c, cert) = min_cycle_cost(&eg, 2, 10.0);
        assert_eq!(c, 1.0);
        let cert = cert.unwrap();
        assert!(cert.verify(&eg));
        assert_eq!(cert.points, vec![2, 2]);
        let (c, cert) = min_cycle_cost(&eg, 2, 0.5);
        assert!(c.is_infinite() && cert.is_none());
    }

    #[test]
    fn potential_matches_cycle_cost_and_decreases() {
        let s = circle_system(CircleMap::HalfFixed, 72).unwrap();
        let eg = ErrorGraph::new(&s);
        let cell = TAU / 72.0;
        for p in [0, 5, 30] {
            let cutoff = 8.0 * cell;
            let h = potential(&eg, p, cutoff);
            let (c, _) = min_cycle_cost(&eg, p, cutoff);
            assert_eq!(h[p], c.min(cutoff));
            assert_eq!(h[s.image(p)], 0.0);
            for y in 0..72 {
                assert!(h[s.image(y)] <= h[y]);
                for z in 0..72 {
                    if h[y] < cutoff && h[z] < cutoff {
                        assert!((h[y] - h[z]).abs() <= s.space().dist(y, z) + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn identity_potential_is_distance() {
        let s = identity_system(5).unwrap();
        let h = potential(&ErrorGraph::new(&s), 0, 10.0);
        assert_eq!(h, vec![0.0, 1.0, 1.0, 1.0, 1.0]);
        let l = lyapunov_from_potential(&ErrorGraph::new(&s), 0, 10.0).unwrap();
        assert_eq!(l.neutral.len(), 5);
    }

    #[test]
    fn path_lyapunov_decreases_strictly_somewhere() {
        let p = path_shift(8);
        let eg = ErrorGraph::new(&p);
        let l = lyapunov_from_potential(&eg, 7, 3.5).unwrap();
        for y in 0..8 {
            assert!(l.theta[p.image(y)] <= l.theta[y]);
        }
        assert!((0..8).any(|y| l.theta[p.image(y)] < l.theta[y]));
    }

    #[test]
    fn concat_adds_costs() {
        let p = path_shift(6);
        let eg = ErrorGraph::new(&p);
        let a = ChainCertificate::from_points(&eg, vec![0, 2, 3]).unwrap();
        let b = ChainCertificate::from_points(&eg, vec![3, 1]).unwrap();
        let c = a.concat(&b).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.total_cost, a.total_cost + b.total_cost);
        assert!(c.verify(&eg));
        assert!(b.concat(&b).is_err());
    }

    #[test]
    fn periodic_orbit_profile() {
        let s = circle_system(CircleMap::Rotation { theta: TAU / 3.0 }, 12).unwrap();
        let eg = ErrorGraph::new(&s);
        let pr = length_profile(&eg, 0, 0.0, 20, false).unwrap();
        assert_eq!(pr.lengths, vec![3, 6, 9, 12, 15, 18]);
        assert!(ip_closure_check(&pr, &[3, 6]).unwrap());
        let all = length_profile(&eg, 0, 0.0, 20, true).unwrap();
        assert_eq!(all.class, vec![0, 4, 8]);
        assert_eq!(all.lengths, pr.lengths);
    }

    #[test]
    fn fixed_point_profile_is_everything() {
        let s = identity_system(3).unwrap();
        let pr = length_profile(&ErrorGraph::new(&s), 1, 0.0, 7, false).unwrap();
        assert_eq!(pr.lengths, (1..=7).collect::<Vec<_>>());
    }

    #[test]
    fn ip_check_detects_missing_sum() {
        let pr = LengthProfile {
            base: 0,
            eps: 0.0,
            n_max: 10,
            lengths: vec![3, 5],
            through_all: false,
            class: vec![0],
        };
        assert!(!ip_closure_check(&pr, &[3, 5]).unwrap());
        assert!(ip_closure_check(&pr, &[7]).is_err());
    }

    #[test]
    fn one_cell_rotation_profile() {
        // Rotation by one cell: cycles of length n need total drift of a
        // multiple of 12 cells within one jump of one cell.
        let cell = TAU / 12.0;
        let s = circle_system(CircleMap::Rotation { theta: cell }, 12).unwrap();
        let pr = length_profile(&ErrorGraph::new(&s), 0, cell, 48, false).unwrap();
        let want: Vec<usize> = (1..=48).filter(|n| matches!(n % 12, 0 | 1 | 11)).collect();
        assert_eq!(pr.lengths, want);
    }

    #[test]
    fn layered_search_capacity() {
        std::env::remove_var("RECLAB_CAP");
        let s = identity_system(4).unwrap();
        let err = length_profile(&ErrorGraph::new(&s), 0, 0.0, 1_000_000, false).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }
}
