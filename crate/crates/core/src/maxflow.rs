//! Single-commodity maximum flow by breadth-first labeling (Edmonds–Karp),
//! canonical minimum cut, and decomposition of a maximum flow into
//! source-to-sink paths.
//!
//! All arithmetic is on `u64`; capacities are integral so every augmentation
//! raises the flow value by at least one unit and the labeling loop always
//! terminates.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::netmodel::{EdgeId, Network, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxFlowError {
    #[error("node #{} is not in the network", .0 .0)]
    UnknownNode(NodeId),
    #[error("source and sink are the same node")]
    SameEndpoints,
    #[error("flow vector has {found} entries, network has {expected} edges")]
    SizeMismatch { expected: usize, found: usize },
    #[error("augmenting path is inconsistent with the flow: {0}")]
    Infeasible(String),
    #[error("flow is not maximal: an augmenting path exists")]
    NotMaximal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub edge: EdgeId,
    pub direction: Direction,
}

/// A residual source-to-sink path together with its leeway.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentResult {
    /// Visited nodes, `steps.len() + 1` of them, starting at the source.
    pub nodes: Vec<NodeId>,
    pub steps: Vec<PathStep>,
    pub leeway: u64,
}

/// A feasible single-commodity flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowState {
    pub source: NodeId,
    pub sink: NodeId,
    pub edge_flow: Vec<u64>,
    pub value: u64,
}

impl FlowState {
    pub fn zero(net: &Network, source: NodeId, sink: NodeId) -> Self {
        FlowState {
            source,
            sink,
            edge_flow: vec![0; net.edge_count()],
            value: 0,
        }
    }

    /// Checks capacity bounds, conservation, and the recorded value.
    /// Returns one message per problem.
    pub fn feasibility_errors(&self, net: &Network) -> Vec<String> {
        let mut errors = Vec::new();
        if self.edge_flow.len() != net.edge_count() {
            errors.push(format!(
                "flow has {} entries for {} edges",
                self.edge_flow.len(),
                net.edge_count()
            ));
            return errors;
        }
        let mut balance = vec![0i128; net.node_count()];
        for e in net.edges() {
            let f = self.edge_flow[e.id.0];
            if f > e.capacity {
                errors.push(format!("{} carries {f} > capacity {}", e.id, e.capacity));
            }
            balance[e.tail.0] -= f as i128;
            balance[e.head.0] += f as i128;
        }
        for (node, &b) in balance.iter().enumerate() {
            let id = NodeId(node);
            if id == self.source {
                if -b != self.value as i128 {
                    errors.push(format!(
                        "net outflow at source is {}, value {}",
                        -b, self.value
                    ));
                }
            } else if id == self.sink {
                if b != self.value as i128 {
                    errors.push(format!("net inflow at sink is {b}, value {}", self.value));
                }
            } else if b != 0 {
                errors.push(format!(
                    "conservation broken at {} by {b}",
                    net.node_name(id)
                ));
            }
        }
        errors
    }
}

/// An `[S, S']` cut separating a source from a sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub source_side: BTreeSet<NodeId>,
    /// Edges from `S` to `S'`, ascending id.
    pub cut_edges: Vec<EdgeId>,
    pub capacity: u64,
}

impl Cut {
    /// Builds the cut induced by `source_side`.
    pub fn from_source_side(net: &Network, source_side: BTreeSet<NodeId>) -> Self {
        let cut_edges: Vec<EdgeId> = net
            .edges()
            .iter()
            .filter(|e| source_side.contains(&e.tail) && !source_side.contains(&e.head))
            .map(|e| e.id)
            .collect();
        let capacity = cut_edges.iter().map(|&e| net.capacity(e)).sum();
        Cut {
            source_side,
            cut_edges,
            capacity,
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.source_side.contains(&node)
    }
}

/// Outcome of [`max_flow`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxFlow {
    pub flow: FlowState,
    pub min_cut: Cut,
    pub augmentations: usize,
}

impl MaxFlow {
    pub fn value(&self) -> u64 {
        self.flow.value
    }
}

/// A path of a flow decomposition. `cut_edge` is the single min-cut edge the
/// path crosses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecomposedPath {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub amount: u64,
    pub cut_edge: EdgeId,
}

struct Adjacency {
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
}

impl Adjacency {
    fn new(net: &Network) -> Self {
        Adjacency {
            out: net.out_edges(),
            inc: net.in_edges(),
        }
    }
}

fn check_endpoints(net: &Network, s: NodeId, t: NodeId) -> Result<(), MaxFlowError> {
    for node in [s, t] {
        if !net.contains_node(node) {
            return Err(MaxFlowError::UnknownNode(node));
        }
    }
    Ok(())
}

/// Breadth-first labeling over the residual graph. Returns, per node, the
/// step through which it was labeled (`None` for unlabeled nodes and `s`).
fn label(
    net: &Network,
    adj: &Adjacency,
    flow: &[u64],
    s: NodeId,
    stop_at: Option<NodeId>,
) -> (Vec<bool>, Vec<Option<PathStep>>) {
    let n = net.node_count();
    let mut seen = vec![false; n];
    let mut via = vec![None; n];
    let mut queue = VecDeque::new();
    seen[s.0] = true;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        if Some(u) == stop_at {
            break;
        }
        for &e in &adj.out[u.0] {
            let edge = net.edge(e);
            if flow[e.0] < edge.capacity && !seen[edge.head.0] {
                seen[edge.head.0] = true;
                via[edge.head.0] = Some(PathStep {
                    edge: e,
                    direction: Direction::Forward,
                });
                queue.push_back(edge.head);
            }
        }
        for &e in &adj.inc[u.0] {
            let edge = net.edge(e);
            if flow[e.0] > 0 && !seen[edge.tail.0] {
                seen[edge.tail.0] = true;
                via[edge.tail.0] = Some(PathStep {
                    edge: e,
                    direction: Direction::Backward,
                });
                queue.push_back(edge.tail);
            }
        }
    }
    (seen, via)
}

fn shortest_augmenting_path(
    net: &Network,
    adj: &Adjacency,
    f: &FlowState,
    s: NodeId,
    t: NodeId,
) -> Option<AugmentResult> {
    let (seen, via) = label(net, adj, &f.edge_flow, s, Some(t));
    if !seen[t.0] || s == t {
        return None;
    }
    let mut steps = Vec::new();
    let mut nodes = vec![t];
    let mut leeway = u64::MAX;
    let mut at = t;
    while at != s {
        let step = via[at.0].expect("labeled node has a predecessor");
        let edge = net.edge(step.edge);
        let (slack, prev) = match step.direction {
            Direction::Forward => (edge.capacity - f.edge_flow[step.edge.0], edge.tail),
            Direction::Backward => (f.edge_flow[step.edge.0], edge.head),
        };
        leeway = leeway.min(slack);
        steps.push(step);
        nodes.push(prev);
        at = prev;
    }
    steps.reverse();
    nodes.reverse();
    Some(AugmentResult {
        nodes,
        steps,
        leeway,
    })
}

/// Finds the shortest residual `s`→`t` path. Ties break forward edges before
/// backward ones, then by lower edge id.
pub fn find_augmenting_path(
    net: &Network,
    f: &FlowState,
    s: NodeId,
    t: NodeId,
) -> Result<Option<AugmentResult>, MaxFlowError> {
    check_endpoints(net, s, t)?;
    if f.edge_flow.len() != net.edge_count() {
        return Err(MaxFlowError::SizeMismatch {
            expected: net.edge_count(),
            found: f.edge_flow.len(),
        });
    }
    Ok(shortest_augmenting_path(net, &Adjacency::new(net), f, s, t))
}

/// Pushes `a.leeway` units along `a`. The returned flow has value
/// `f.value + a.leeway`.
pub fn augment(net: &Network, f: &FlowState, a: &AugmentResult) -> Result<FlowState, MaxFlowError> {
    if a.leeway == 0 {
        return Err(MaxFlowError::Infeasible("leeway is zero".into()));
    }
    if a.nodes.len() != a.steps.len() + 1
        || a.nodes.first() != Some(&f.source)
        || a.nodes.last() != Some(&f.sink)
    {
        return Err(MaxFlowError::Infeasible(
            "path does not run from source to sink".into(),
        ));
    }
    let mut next = f.clone();
    for (k, step) in a.steps.iter().enumerate() {
        let edge = net
            .edges()
            .get(step.edge.0)
            .ok_or_else(|| MaxFlowError::Infeasible(format!("unknown edge {}", step.edge)))?;
        let (from, to) = match step.direction {
            Direction::Forward => (edge.tail, edge.head),
            Direction::Backward => (edge.head, edge.tail),
        };
        if from != a.nodes[k] || to != a.nodes[k + 1] {
            return Err(MaxFlowError::Infeasible(format!(
                "step {k} over {} does not connect the listed nodes",
                step.edge
            )));
        }
        let slot = &mut next.edge_flow[step.edge.0];
        match step.direction {
            Direction::Forward => {
                if edge.capacity - *slot < a.leeway {
                    return Err(MaxFlowError::Infeasible(format!(
                        "{} has slack {} < leeway {}",
                        step.edge,
                        edge.capacity - *slot,
                        a.leeway
                    )));
                }
                *slot += a.leeway;
            }
            Direction::Backward => {
                if *slot < a.leeway {
                    return Err(MaxFlowError::Infeasible(format!(
                        "{} carries {} < leeway {}",
                        step.edge, *slot, a.leeway
                    )));
                }
                *slot -= a.leeway;
            }
        }
    }
    next.value += a.leeway;
    Ok(next)
}

/// The cut whose source side is everything reachable from `f.source` in the
/// residual graph of `f`.
pub fn residual_cut(net: &Network, f: &FlowState) -> Cut {
    let (seen, _) = label(net, &Adjacency::new(net), &f.edge_flow, f.source, None);
    let side = seen
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s)
        .map(|(i, _)| NodeId(i))
        .collect();
    Cut::from_source_side(net, side)
}

/// Runs the labeling algorithm from the zero flow until no augmenting path
/// remains, and returns the flow with its canonical minimum cut.
pub fn max_flow(net: &Network, s: NodeId, t: NodeId) -> Result<MaxFlow, MaxFlowError> {
    check_endpoints(net, s, t)?;
    if s == t {
        return Err(MaxFlowError::SameEndpoints);
    }
    let adj = Adjacency::new(net);
    let mut flow = FlowState::zero(net, s, t);
    let mut augmentations = 0;
    while let Some(path) = shortest_augmenting_path(net, &adj, &flow, s, t) {
        flow = augment(net, &flow, &path)?;
        augmentations += 1;
    }
    let min_cut = residual_cut(net, &flow);
    debug_assert_eq!(min_cut.capacity, flow.value);
    Ok(MaxFlow {
        flow,
        min_cut,
        augmentations,
    })
}

/// Finds a directed cycle among positive-flow edges, lowest node and lowest
/// edge id first.
fn find_flow_cycle(net: &Network, out: &[Vec<EdgeId>], flow: &[u64]) -> Option<Vec<EdgeId>> {
    // 0 = unvisited, 1 = on stack, 2 = finished
    let mut state = vec![0u8; net.node_count()];
    for start in 0..net.node_count() {
        if state[start] != 0 {
            continue;
        }
        state[start] = 1;
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut via: Vec<EdgeId> = Vec::new();
        while let Some(top) = stack.last_mut() {
            let (u, cursor) = (top.0, top.1);
            if cursor == out[u].len() {
                state[u] = 2;
                stack.pop();
                via.pop();
                continue;
            }
            top.1 += 1;
            let e = out[u][cursor];
            if flow[e.0] == 0 {
                continue;
            }
            let v = net.edge(e).head.0;
            match state[v] {
                0 => {
                    state[v] = 1;
                    via.push(e);
                    stack.push((v, 0));
                }
                1 => {
                    let pos = stack.iter().position(|&(x, _)| x == v).unwrap();
                    let mut cycle = via[pos..].to_vec();
                    cycle.push(e);
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}

/// Removes every positive-flow cycle. The flow value is unchanged.
pub fn cancel_cycles(net: &Network, edge_flow: &mut [u64]) -> usize {
    let out = net.out_edges();
    let mut cancelled = 0;
    while let Some(cycle) = find_flow_cycle(net, &out, edge_flow) {
        let amount = cycle.iter().map(|e| edge_flow[e.0]).min().unwrap_or(0);
        for e in &cycle {
            edge_flow[e.0] -= amount;
        }
        cancelled += 1;
    }
    cancelled
}

/// Decomposes a maximum flow into simple source-to-sink paths.
///
/// Cycles are cancelled first. Each path is peeled by starting at the
/// source and repeatedly following the lowest-id edge that still carries
/// flow; the path's bottleneck is subtracted before the next peel. Every
/// returned path crosses the canonical minimum cut exactly once.
pub fn decompose_cut_paths(
    net: &Network,
    f: &FlowState,
) -> Result<Vec<DecomposedPath>, MaxFlowError> {
    let (s, t) = (f.source, f.sink);
    if find_augmenting_path(net, f, s, t)?.is_some() {
        return Err(MaxFlowError::NotMaximal);
    }
    let cut = residual_cut(net, f);
    let out = net.out_edges();
    let mut flow = f.edge_flow.clone();
    cancel_cycles(net, &mut flow);

    let mut paths = Vec::new();
    while let Some(&first) = out[s.0].iter().find(|e| flow[e.0] > 0) {
        let mut edges = vec![first];
        let mut nodes = vec![s, net.edge(first).head];
        let mut at = net.edge(first).head;
        while at != t {
            let next = out[at.0]
                .iter()
                .copied()
                .find(|e| flow[e.0] > 0)
                .ok_or_else(|| {
                    MaxFlowError::Infeasible(format!(
                        "flow stops at {} without reaching the sink",
                        net.node_name(at)
                    ))
                })?;
            at = net.edge(next).head;
            edges.push(next);
            nodes.push(at);
        }
        let amount = edges.iter().map(|e| flow[e.0]).min().unwrap_or(0);
        for e in &edges {
            flow[e.0] -= amount;
        }
        let crossings: Vec<EdgeId> = edges
            .iter()
            .copied()
            .filter(|&e| cut.contains(net.edge(e).tail) && !cut.contains(net.edge(e).head))
            .collect();
        if crossings.len() != 1 {
            return Err(MaxFlowError::Infeasible(format!(
                "decomposed path crosses the minimum cut {} times",
                crossings.len()
            )));
        }
        paths.push(DecomposedPath {
            nodes,
            edges,
            amount,
            cut_edge: crossings[0],
        });
    }
    Ok(paths)
}
