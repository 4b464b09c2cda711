//! Line-oriented text format.
//!
//! ```text
//! # comment
//! node <name>
//! edge <tail> <head> <capacity>
//! commodity <source> <sink>
//! ```
//!
//! Nodes must be declared before any line that references them. Edge ids and
//! commodity indices follow line order.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{valid_node_name, Network, NodeId, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number; `None` for whole-input problems.
    pub line: Option<usize>,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn at(line: usize, kind: ParseErrorKind) -> Self {
        ParseError {
            line: Some(line),
            kind,
        }
    }

    fn whole(kind: ParseErrorKind) -> Self {
        ParseError { line: None, kind }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.kind),
            None => write!(f, "end of input: {}", self.kind),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("`{directive}` expects {expected} argument(s), found {found}")]
    Arity {
        directive: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid node name {0:?}")]
    InvalidName(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("node `{0}` is not declared")]
    UndeclaredNode(String),
    #[error("negative capacity `{0}`")]
    NegativeCapacity(String),
    #[error("capacity `{0}` is not a nonnegative integer")]
    BadCapacity(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("source equals sink (`{0}`)")]
    SourceEqualsSink(String),
    #[error("network has no edges")]
    NoEdges,
    #[error("network has no commodities")]
    NoCommodities,
}

impl ParseErrorKind {
    /// True for input that is well formed text but describes an invalid
    /// network (as opposed to malformed text).
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            ParseErrorKind::SelfLoop(_)
                | ParseErrorKind::SourceEqualsSink(_)
                | ParseErrorKind::NoEdges
                | ParseErrorKind::NoCommodities
        )
    }
}

struct Lines {
    edges: Vec<usize>,
    commodities: Vec<usize>,
}

fn parse_capacity(token: &str) -> Result<u64, ParseErrorKind> {
    if let Some(rest) = token.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseErrorKind::NegativeCapacity(token.to_string()));
        }
    }
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseErrorKind::BadCapacity(token.to_string()));
    }
    token
        .parse()
        .map_err(|_| ParseErrorKind::BadCapacity(token.to_string()))
}

fn parse_lines(text: &str) -> Result<(Network, Lines), ParseError> {
    let mut net = Network::new();
    let mut names: HashMap<String, NodeId> = HashMap::new();
    let mut lines = Lines {
        edges: Vec::new(),
        commodities: Vec::new(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();
        let arity = |name: &'static str, expected: usize| {
            if args.len() == expected {
                Ok(())
            } else {
                Err(ParseError::at(
                    lineno,
                    ParseErrorKind::Arity {
                        directive: name,
                        expected,
                        found: args.len(),
                    },
                ))
            }
        };
        let lookup = |name: &str| {
            names.get(name).copied().ok_or_else(|| {
                ParseError::at(lineno, ParseErrorKind::UndeclaredNode(name.to_string()))
            })
        };

        match directive {
            "node" => {
                arity("node", 1)?;
                let name = args[0];
                if !valid_node_name(name) {
                    return Err(ParseError::at(
                        lineno,
                        ParseErrorKind::InvalidName(name.to_string()),
                    ));
                }
                if names.contains_key(name) {
                    return Err(ParseError::at(
                        lineno,
                        ParseErrorKind::DuplicateNode(name.to_string()),
                    ));
                }
                let id = net.add_node(name);
                names.insert(name.to_string(), id);
            }
            "edge" => {
                arity("edge", 3)?;
                let tail = lookup(args[0])?;
                let head = lookup(args[1])?;
                let capacity = parse_capacity(args[2]).map_err(|k| ParseError::at(lineno, k))?;
                net.add_edge(tail, head, capacity);
                lines.edges.push(lineno);
            }
            "commodity" => {
                arity("commodity", 2)?;
                let source = lookup(args[0])?;
                let sink = lookup(args[1])?;
                net.add_commodity(source, sink);
                lines.commodities.push(lineno);
            }
            other => {
                return Err(ParseError::at(
                    lineno,
                    ParseErrorKind::UnknownDirective(other.to_string()),
                ))
            }
        }
    }
    Ok((net, lines))
}

/// Parses and validates a network. Every accepted network satisfies
/// [`validate`](super::validate).
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let (net, lines) = parse_lines(text)?;
    // Name-level problems are rejected while reading, so only the
    // structural violations can remain here.
    if let Some(v) = net.validate().into_iter().next() {
        return Err(match v {
            Violation::SelfLoop { edge, node } => {
                ParseError::at(lines.edges[edge.0], ParseErrorKind::SelfLoop(node))
            }
            Violation::SourceEqualsSink { commodity, node } => ParseError::at(
                lines.commodities[commodity - 1],
                ParseErrorKind::SourceEqualsSink(node),
            ),
            Violation::NoEdges => ParseError::whole(ParseErrorKind::NoEdges),
            Violation::NoCommodities => ParseError::whole(ParseErrorKind::NoCommodities),
            other => unreachable!("reader admitted {other}"),
        });
    }
    Ok(net)
}

/// Parses without structural validation. Malformed text is still rejected.
pub fn parse_unchecked(text: &str) -> Result<Network, ParseError> {
    parse_lines(text).map(|(net, _)| net)
}

/// Serializes a network back into the text format; `parse_network` inverts it.
pub fn render_network(net: &Network) -> String {
    let mut out = String::new();
    for name in net.nodes() {
        let _ = writeln!(out, "node {name}");
    }
    for e in net.edges() {
        let _ = writeln!(
            out,
            "edge {} {} {}",
            net.node_name(e.tail),
            net.node_name(e.head),
            e.capacity
        );
    }
    for c in net.commodities() {
        let _ = writeln!(
            out,
            "commodity {} {}",
            net.node_name(c.source),
            net.node_name(c.sink)
        );
    }
    out
}
