//! Multicommodity network model.
//!
//! A [`Network`] is a directed graph with integer edge capacities and an
//! ordered list of commodities, each a `(source, sink)` pair. Nodes and edges
//! are addressed by dense indices ([`NodeId`], [`EdgeId`]) assigned in
//! declaration order.
//!
//! The builder methods on [`Network`] do not check anything; use
//! [`validate`] (or parse through [`parse_network`], which validates) to
//! confirm that the structural invariants hold.

mod dot;
mod parse;

use std::fmt;

pub use dot::{export_dot, ExportError};
pub use parse::{parse_network, parse_unchecked, render_network, ParseError, ParseErrorKind};

/// Dense node index, assigned in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Dense edge index, assigned in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: u64,
}

/// A source/sink pair. `index` is 1-based and follows declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commodity {
    pub index: usize,
    pub source: NodeId,
    pub sink: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    commodities: Vec<Commodity>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>) -> NodeId {
        self.nodes.push(name.into());
        NodeId(self.nodes.len() - 1)
    }

    pub fn add_edge(&mut self, tail: NodeId, head: NodeId, capacity: u64) -> EdgeId {
        let id = EdgeId(self.edges.len());
        self.edges.push(Edge {
            id,
            tail,
            head,
            capacity,
        });
        id
    }

    /// Appends a commodity and returns its 1-based index.
    pub fn add_commodity(&mut self, source: NodeId, sink: NodeId) -> usize {
        let index = self.commodities.len() + 1;
        self.commodities.push(Commodity {
            index,
            source,
            sink,
        });
        index
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn capacity(&self, id: EdgeId) -> u64 {
        self.edges[id.0].capacity
    }

    /// Looks up a commodity by its 1-based index.
    pub fn commodity(&self, index: usize) -> Option<&Commodity> {
        index.checked_sub(1).and_then(|i| self.commodities.get(i))
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        id.0 < self.nodes.len()
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == name).map(NodeId)
    }

    /// Name of a node; undeclared ids render as `#<index>`.
    pub fn node_name(&self, id: NodeId) -> String {
        self.nodes
            .get(id.0)
            .cloned()
            .unwrap_or_else(|| format!("#{}", id.0))
    }

    /// `tail->head` rendering of an edge.
    pub fn edge_label(&self, id: EdgeId) -> String {
        let e = &self.edges[id.0];
        format!("{}->{}", self.node_name(e.tail), self.node_name(e.head))
    }

    /// Outgoing edge ids per node, each list in ascending id order.
    /// Edges with undeclared endpoints are skipped.
    pub fn out_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if self.contains_node(e.tail) && self.contains_node(e.head) {
                out[e.tail.0].push(e.id);
            }
        }
        out
    }

    /// Incoming edge ids per node, each list in ascending id order.
    pub fn in_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if self.contains_node(e.tail) && self.contains_node(e.head) {
                inc[e.head.0].push(e.id);
            }
        }
        inc
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }
}

/// A broken structural invariant of a [`Network`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadNodeName { node: NodeId, name: String },
    DuplicateNode { node: NodeId, name: String },
    UndeclaredEndpoint { edge: EdgeId, node: NodeId },
    SelfLoop { edge: EdgeId, node: String },
    CommodityEndpointMissing { commodity: usize, node: NodeId },
    SourceEqualsSink { commodity: usize, node: String },
    NoEdges,
    NoCommodities,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadNodeName { node, name } => {
                write!(f, "node #{} has an invalid name {name:?}", node.0)
            }
            Violation::DuplicateNode { name, .. } => write!(f, "duplicate node name `{name}`"),
            Violation::UndeclaredEndpoint { edge, node } => {
                write!(f, "edge {edge} references undeclared node #{}", node.0)
            }
            Violation::SelfLoop { edge, node } => {
                write!(f, "edge {edge} is a self-loop on `{node}`")
            }
            Violation::CommodityEndpointMissing { commodity, node } => write!(
                f,
                "commodity {commodity} references undeclared node #{}",
                node.0
            ),
            Violation::SourceEqualsSink { commodity, node } => {
                write!(f, "commodity {commodity}: source equals sink (`{node}`)")
            }
            Violation::NoEdges => write!(f, "network has no edges"),
            Violation::NoCommodities => write!(f, "network has no commodities"),
        }
    }
}

pub(crate) fn valid_node_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c.is_control())
}

/// Checks every structural invariant; an empty list means the network is
/// well formed.
pub fn validate(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, name) in net.nodes.iter().enumerate() {
        if !valid_node_name(name) {
            out.push(Violation::BadNodeName {
                node: NodeId(i),
                name: name.clone(),
            });
        }
        if net.nodes[..i].contains(name) {
            out.push(Violation::DuplicateNode {
                node: NodeId(i),
                name: name.clone(),
            });
        }
    }
    if net.edges.is_empty() {
        out.push(Violation::NoEdges);
    }
    for e in &net.edges {
        let mut dangling = false;
        for node in [e.tail, e.head] {
            if !net.contains_node(node) {
                dangling = true;
                out.push(Violation::UndeclaredEndpoint { edge: e.id, node });
            }
        }
        if !dangling && e.tail == e.head {
            out.push(Violation::SelfLoop {
                edge: e.id,
                node: net.node_name(e.tail),
            });
        }
    }
    if net.commodities.is_empty() {
        out.push(Violation::NoCommodities);
    }
    for c in &net.commodities {
        let mut dangling = false;
        for node in [c.source, c.sink] {
            if !net.contains_node(node) {
                dangling = true;
                out.push(Violation::CommodityEndpointMissing {
                    commodity: c.index,
                    node,
                });
            }
        }
        if !dangling && c.source == c.sink {
            out.push(Violation::SourceEqualsSink {
                commodity: c.index,
                node: net.node_name(c.source),
            });
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The two-commodity example network, edges in the order used throughout
    /// the test suite.
    pub fn worked_network() -> Network {
        parse_network(WORKED_TEXT).unwrap()
    }

    pub const WORKED_TEXT: &str = "\
node s1
node s2
node a
node b
node t1
node t2
edge s1 t1 5
edge s1 a 10
edge a b 10
edge b t1 10
edge s2 s1 10
edge a t2 10
edge s2 b 10
edge t1 t2 10
commodity s1 t1
commodity s2 t2
";
}
