//! Exact integral multicommodity optimum for small instances.
//!
//! Every simple source-to-sink path of every commodity is cataloged, and a
//! branch-and-bound search assigns an integral amount to each path subject
//! to the shared edge capacities. The search runs twice:
//!
//! 1. amounts tried from largest to smallest, with paths that conflict with
//!    no later path fixed at their residual bottleneck, to find the optimum;
//! 2. amounts tried from smallest to largest, pruned against the known
//!    optimum, to find the lexicographically smallest optimal vector.
//!
//! Pruning uses, per commodity, the smaller of the summed residual
//! bottlenecks of the undecided paths and the maximum flow through the
//! union of their edges at residual capacity. Those per-commodity figures
//! are then capped jointly: the summed flow of all commodities is a
//! feasible flow from a super-source feeding every source to a super-sink
//! fed by every sink. Last comes the fractional optimum over the undecided
//! paths, rounded down; it only prunes, so reported values stay integral.
//!
//! Both phases share one node budget; exhausting it flags the result as
//! truncated instead of returning a possibly wrong optimum.

use std::collections::{BTreeSet, VecDeque};

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use thiserror::Error;

use crate::heuristic::{greedy_solve, upper_bounds, Assignment, SolveError};
use crate::netmodel::{validate, Commodity, EdgeId, Network, NodeId, Violation};
use crate::tableaux::{initialize, TableauxBundle, TableauxError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_paths: usize,
    pub max_candidates: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_paths: 64,
            max_candidates: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("network is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetwork(Vec<Violation>),
    #[error("commodity {commodity} has more than {limit} simple paths")]
    TooManyPaths { commodity: usize, limit: usize },
    #[error("search truncated after {explored} nodes (best value so far {best})")]
    Truncated { best: u64, explored: u64 },
    #[error(transparent)]
    Tableaux(#[from] TableauxError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogPath {
    /// 1-based commodity index.
    pub commodity: usize,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    /// Minimum edge capacity along the path.
    pub bottleneck: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathCatalog {
    pub per_commodity: Vec<Vec<CatalogPath>>,
}

impl PathCatalog {
    /// Enumerates every commodity's simple paths.
    pub fn build(net: &Network, max_paths: usize) -> Result<Self, OracleError> {
        let per_commodity = net
            .commodities()
            .iter()
            .map(|c| enumerate_paths(net, c, max_paths))
            .collect::<Result<_, _>>()?;
        Ok(PathCatalog { per_commodity })
    }

    /// The decomposed paths of an initialized bundle, with static bottlenecks.
    pub fn from_bundle(net: &Network, bundle: &TableauxBundle) -> Self {
        let mut per_commodity = vec![Vec::new(); bundle.commodity_count()];
        for p in bundle.paths() {
            per_commodity[p.commodity - 1].push(CatalogPath {
                commodity: p.commodity,
                nodes: p.nodes.clone(),
                edges: p.edges.clone(),
                bottleneck: p.edges.iter().map(|&e| net.capacity(e)).min().unwrap_or(0),
            });
        }
        PathCatalog { per_commodity }
    }

    /// Paths in search order: by commodity, then enumeration order.
    pub fn flat(&self) -> impl Iterator<Item = &CatalogPath> + '_ {
        self.per_commodity.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.per_commodity.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: u64,
    /// Amount per path, aligned with [`PathCatalog::flat`].
    pub witness: Vec<u64>,
    pub catalog: PathCatalog,
    /// Branch nodes visited.
    pub explored: u64,
    pub truncated: bool,
}

impl OracleResult {
    /// The witness in edge form.
    pub fn assignment(&self, net: &Network) -> Assignment {
        let mut a = Assignment::empty(net.commodity_count(), net.edge_count());
        for (path, &amount) in self.catalog.flat().zip(&self.witness) {
            for e in &path.edges {
                a.per_commodity_edge_flow[path.commodity - 1][e.0] += amount;
            }
            a.per_commodity_value[path.commodity - 1] += amount;
            a.total_value += amount;
        }
        a
    }
}

/// All simple `source → sink` paths of a commodity, depth first with the
/// lowest edge id explored first.
pub fn enumerate_paths(
    net: &Network,
    commodity: &Commodity,
    limit: usize,
) -> Result<Vec<CatalogPath>, OracleError> {
    struct Walk<'a> {
        net: &'a Network,
        out: Vec<Vec<EdgeId>>,
        sink: NodeId,
        commodity: usize,
        limit: usize,
        on_path: Vec<bool>,
        nodes: Vec<NodeId>,
        edges: Vec<EdgeId>,
        found: Vec<CatalogPath>,
    }

    impl Walk<'_> {
        fn visit(&mut self, at: NodeId) -> Result<(), OracleError> {
            if at == self.sink {
                if self.found.len() == self.limit {
                    return Err(OracleError::TooManyPaths {
                        commodity: self.commodity,
                        limit: self.limit,
                    });
                }
                self.found.push(CatalogPath {
                    commodity: self.commodity,
                    nodes: self.nodes.clone(),
                    edges: self.edges.clone(),
                    bottleneck: self
                        .edges
                        .iter()
                        .map(|&e| self.net.capacity(e))
                        .min()
                        .unwrap_or(0),
                });
                return Ok(());
            }
            for k in 0..self.out[at.0].len() {
                let e = self.out[at.0][k];
                let head = self.net.edge(e).head;
                if self.on_path[head.0] {
                    continue;
                }
                self.on_path[head.0] = true;
                self.nodes.push(head);
                self.edges.push(e);
                let r = self.visit(head);
                self.edges.pop();
                self.nodes.pop();
                self.on_path[head.0] = false;
                r?;
            }
            Ok(())
        }
    }

    let violations = validate(net);
    if !violations.is_empty() {
        return Err(OracleError::InvalidNetwork(violations));
    }
    let mut walk = Walk {
        net,
        out: net.out_edges(),
        sink: commodity.sink,
        commodity: commodity.index,
        limit,
        on_path: vec![false; net.node_count()],
        nodes: vec![commodity.source],
        edges: Vec::new(),
        found: Vec::new(),
    };
    walk.on_path[commodity.source.0] = true;
    walk.visit(commodity.source)?;
    Ok(walk.found)
}

/// Exact integral optimum over all simple paths.
pub fn optimal_value(net: &Network, limits: OracleLimits) -> Result<OracleResult, OracleError> {
    let catalog = PathCatalog::build(net, limits.max_paths)?;
    Ok(optimize(net, catalog, limits.max_candidates))
}

/// Exact integral optimum restricted to the paths of `catalog`.
pub fn optimize(net: &Network, catalog: PathCatalog, max_candidates: u64) -> OracleResult {
    let mut search = Search::new(net, &catalog, max_candidates);
    search.maximize(0);
    if !search.exhausted {
        let target = search.best_value;
        search.found = false;
        search.lexmin(0, target);
    }
    OracleResult {
        optimum: search.best_value,
        witness: search.best,
        explored: search.explored,
        truncated: search.exhausted,
        catalog,
    }
}

struct SearchPath {
    edges: Vec<usize>,
    commodity: usize,
}

struct Search {
    paths: Vec<SearchPath>,
    commodities: usize,
    nodes: usize,
    tails: Vec<usize>,
    heads: Vec<usize>,
    sources: Vec<usize>,
    sinks: Vec<usize>,
    /// `suffix_edges[k][i]`: edges used by commodity `i` among paths `k..`.
    suffix_edges: Vec<Vec<Vec<usize>>>,
    /// Union over commodities of `suffix_edges[k]`.
    suffix_union: Vec<Vec<usize>>,
    /// Whether path `k` shares an edge with some later path.
    later_conflict: Vec<bool>,
    residual: Vec<u64>,
    amounts: Vec<u64>,
    value: u64,
    best_value: u64,
    best: Vec<u64>,
    found: bool,
    explored: u64,
    budget: u64,
    exhausted: bool,
    scratch: FlowScratch,
}

impl Search {
    fn new(net: &Network, catalog: &PathCatalog, budget: u64) -> Self {
        let paths: Vec<SearchPath> = catalog
            .flat()
            .map(|p| SearchPath {
                edges: p.edges.iter().map(|e| e.0).collect(),
                commodity: p.commodity - 1,
            })
            .collect();
        let commodities = catalog.per_commodity.len();
        let mut suffix_edges = vec![vec![Vec::new(); commodities]; paths.len() + 1];
        for k in (0..paths.len()).rev() {
            suffix_edges[k] = suffix_edges[k + 1].clone();
            let set = &mut suffix_edges[k][paths[k].commodity];
            set.extend(paths[k].edges.iter().copied());
            set.sort_unstable();
            set.dedup();
        }
        let suffix_union = suffix_edges
            .iter()
            .map(|per| {
                let mut all: Vec<usize> = per.iter().flatten().copied().collect();
                all.sort_unstable();
                all.dedup();
                all
            })
            .collect();
        let later_conflict = (0..paths.len())
            .map(|k| {
                let mine: BTreeSet<usize> = paths[k].edges.iter().copied().collect();
                paths[k + 1..]
                    .iter()
                    .any(|q| q.edges.iter().any(|e| mine.contains(e)))
            })
            .collect();
        let n = paths.len();
        let endpoints = |pick: fn(&Commodity) -> NodeId| {
            (0..commodities)
                .map(|i| net.commodity(i + 1).map(|c| pick(c).0).unwrap_or(0))
                .collect()
        };
        Search {
            commodities,
            nodes: net.node_count(),
            tails: net.edges().iter().map(|e| e.tail.0).collect(),
            heads: net.edges().iter().map(|e| e.head.0).collect(),
            sources: endpoints(|c| c.source),
            sinks: endpoints(|c| c.sink),
            suffix_edges,
            suffix_union,
            later_conflict,
            residual: net.edges().iter().map(|e| e.capacity).collect(),
            amounts: vec![0; n],
            value: 0,
            best_value: 0,
            best: vec![0; n],
            found: false,
            explored: 0,
            budget,
            exhausted: false,
            scratch: FlowScratch::default(),
            paths,
        }
    }

    fn slack(&self, k: usize) -> u64 {
        self.paths[k]
            .edges
            .iter()
            .map(|&e| self.residual[e])
            .min()
            .unwrap_or(0)
    }

    fn set(&mut self, k: usize, amount: u64) {
        for &e in &self.paths[k].edges {
            self.residual[e] -= amount;
        }
        self.amounts[k] = amount;
        self.value += amount;
    }

    fn unset(&mut self, k: usize) {
        let amount = self.amounts[k];
        for &e in &self.paths[k].edges {
            self.residual[e] += amount;
        }
        self.amounts[k] = 0;
        self.value -= amount;
    }

    /// Whether `value` plus an upper bound on what paths `k..` can still add
    /// exceeds `threshold` (or reaches it, when not `strict`). Cheaper bounds
    /// are tried first.
    fn bound_exceeds(&mut self, k: usize, threshold: u64, strict: bool) -> bool {
        let need = |total: u64| {
            if strict {
                total > threshold
            } else {
                total >= threshold
            }
        };
        let mut per = vec![0u64; self.commodities];
        for j in k..self.paths.len() {
            per[self.paths[j].commodity] += self.slack(j);
        }
        let simple: u64 = per.iter().sum();
        if !need(self.value + simple) {
            return false;
        }
        let mut caps = vec![0u64; self.commodities];
        for i in 0..self.commodities {
            if per[i] == 0 {
                continue;
            }
            let edges = &self.suffix_edges[k][i];
            caps[i] = self.scratch.max_flow(
                self.nodes,
                edges
                    .iter()
                    .map(|&e| (self.tails[e], self.heads[e], self.residual[e])),
                self.sources[i],
                self.sinks[i],
                per[i],
            );
        }
        let separate: u64 = caps.iter().sum();
        if !need(self.value + separate) || self.commodities < 2 {
            return need(self.value + separate);
        }
        let (hub_in, hub_out) = (self.nodes, self.nodes + 1);
        let joint = self.scratch.max_flow(
            self.nodes + 2,
            self.suffix_union[k]
                .iter()
                .map(|&e| (self.tails[e], self.heads[e], self.residual[e]))
                .chain((0..self.commodities).flat_map(|i| {
                    [
                        (hub_in, self.sources[i], caps[i]),
                        (self.sinks[i], hub_out, caps[i]),
                    ]
                })),
            hub_in,
            hub_out,
            separate,
        );
        if !need(self.value + joint) {
            return false;
        }
        need(self.value + self.relaxation(k).min(joint))
    }

    /// Floor of the fractional optimum over paths `k..` under current residuals.
    fn relaxation(&self, k: usize) -> u64 {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let mut rows: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); self.residual.len()];
        let mut any = false;
        for j in k..self.paths.len() {
            let top = self.slack(j);
            if top == 0 {
                continue;
            }
            any = true;
            let x = lp.add_var(1.0, (0.0, top as f64));
            for &e in &self.paths[j].edges {
                rows[e].push((x, 1.0));
            }
        }
        if !any {
            return 0;
        }
        for (e, row) in rows.iter().enumerate() {
            if row.len() > 1 {
                lp.add_constraint(row.as_slice(), ComparisonOp::Le, self.residual[e] as f64);
            }
        }
        match lp.solve() {
            Ok(solution) => (solution.objective() + 1e-6).floor() as u64,
            Err(_) => u64::MAX,
        }
    }

    fn tick(&mut self) -> bool {
        self.explored += 1;
        if self.explored > self.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn maximize(&mut self, k: usize) {
        if !self.tick() {
            return;
        }
        if k == self.paths.len() {
            if self.value > self.best_value || !self.found {
                self.best_value = self.value;
                self.best.clone_from(&self.amounts);
                self.found = true;
            }
            return;
        }
        if self.found && !self.bound_exceeds(k, self.best_value, true) {
            return;
        }
        let top = self.slack(k);
        let lowest = if self.later_conflict[k] { 0 } else { top };
        for amount in (lowest..=top).rev() {
            self.set(k, amount);
            self.maximize(k + 1);
            self.unset(k);
            if self.exhausted {
                return;
            }
        }
    }

    fn lexmin(&mut self, k: usize, target: u64) {
        if self.found || !self.tick() {
            return;
        }
        if k == self.paths.len() {
            if self.value == target {
                self.best.clone_from(&self.amounts);
                self.found = true;
            }
            return;
        }
        if !self.bound_exceeds(k, target, false) {
            return;
        }
        for amount in 0..=self.slack(k) {
            self.set(k, amount);
            self.lexmin(k + 1, target);
            self.unset(k);
            if self.found || self.exhausted {
                return;
            }
        }
    }
}

/// Small breadth-first max flow used for search bounds.
#[derive(Default)]
struct FlowScratch {
    to: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
    prev: Vec<usize>,
    queue: VecDeque<usize>,
}

impl FlowScratch {
    /// Max flow from `s` to `t` over the given arcs, stopping early once
    /// `ceiling` is reached.
    fn max_flow(
        &mut self,
        nodes: usize,
        arcs: impl Iterator<Item = (usize, usize, u64)>,
        s: usize,
        t: usize,
        ceiling: u64,
    ) -> u64 {
        self.to.clear();
        self.cap.clear();
        self.adj.iter_mut().for_each(Vec::clear);
        self.adj.resize(nodes, Vec::new());
        for (u, v, c) in arcs {
            if c == 0 {
                continue;
            }
            self.adj[u].push(self.to.len());
            self.to.push(v);
            self.cap.push(c);
            self.adj[v].push(self.to.len());
            self.to.push(u);
            self.cap.push(0);
        }
        let mut flow = 0;
        while flow < ceiling {
            self.prev.clear();
            self.prev.resize(nodes, usize::MAX);
            self.queue.clear();
            self.queue.push_back(s);
            let mut reached = false;
            while let Some(u) = self.queue.pop_front() {
                for &a in &self.adj[u] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && v != s && self.prev[v] == usize::MAX {
                        self.prev[v] = a;
                        if v == t {
                            reached = true;
                            break;
                        }
                        self.queue.push_back(v);
                    }
                }
                if reached {
                    break;
                }
            }
            if !reached {
                break;
            }
            let mut push = ceiling - flow;
            let mut v = t;
            while v != s {
                let a = self.prev[v];
                push = push.min(self.cap[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = self.prev[v];
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
                v = self.to[a ^ 1];
            }
            flow += push;
        }
        flow
    }
}

/// Heuristic value next to the bounds and the exact optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub heuristic: u64,
    pub optimum: u64,
    pub sum_individual: u64,
    pub inclusion_exclusion: i64,
    /// `optimum - heuristic`; never negative for a correct heuristic.
    pub gap: i64,
    pub explored: u64,
}

pub fn gap_report(net: &Network, limits: OracleLimits) -> Result<GapReport, OracleError> {
    let mut bundle = initialize(net)?;
    let bounds = upper_bounds(net, &bundle);
    let assignment = greedy_solve(&mut bundle)?;
    let oracle = optimal_value(net, limits)?;
    if oracle.truncated {
        return Err(OracleError::Truncated {
            best: oracle.optimum,
            explored: oracle.explored,
        });
    }
    Ok(GapReport {
        heuristic: assignment.total_value,
        optimum: oracle.optimum,
        sum_individual: bounds.sum_individual,
        inclusion_exclusion: bounds.inclusion_exclusion,
        gap: oracle.optimum as i64 - assignment.total_value as i64,
        explored: oracle.explored,
    })
}
