//! Graphviz export.

use std::fmt::Write as _;

use thiserror::Error;

use super::Network;
use crate::heuristic::Assignment;

/// Stroke colors, one per commodity (cycled past the end).
const COMMODITY_COLORS: [&str; 8] = [
    "blue",
    "red",
    "darkgreen",
    "darkorange",
    "purple",
    "brown",
    "magenta",
    "cyan4",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("assignment covers {found} commodities, network has {expected}")]
    CommodityCount { expected: usize, found: usize },
    #[error(
        "assignment has flows for {found} edges of commodity {commodity}, network has {expected}"
    )]
    EdgeCount {
        commodity: usize,
        expected: usize,
        found: usize,
    },
}

fn commodity_color(index: usize) -> &'static str {
    COMMODITY_COLORS[(index - 1) % COMMODITY_COLORS.len()]
}

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the network as a `digraph`. Each commodity gets its own style
/// class `c<i>` and stroke color, applied to its terminals and, when an
/// assignment is given, to the edges carrying its flow. Edge labels are the
/// capacity, or `flow/capacity` with an assignment.
pub fn export_dot(net: &Network, assignment: Option<&Assignment>) -> Result<String, ExportError> {
    if let Some(a) = assignment {
        if a.per_commodity_edge_flow.len() != net.commodity_count() {
            return Err(ExportError::CommodityCount {
                expected: net.commodity_count(),
                found: a.per_commodity_edge_flow.len(),
            });
        }
        for (i, row) in a.per_commodity_edge_flow.iter().enumerate() {
            if row.len() != net.edge_count() {
                return Err(ExportError::EdgeCount {
                    commodity: i + 1,
                    expected: net.edge_count(),
                    found: row.len(),
                });
            }
        }
    }

    let mut out = String::new();
    out.push_str("digraph network {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, name) in net.nodes().iter().enumerate() {
        let roles: Vec<_> = net
            .commodities()
            .iter()
            .filter(|c| c.source.0 == i || c.sink.0 == i)
            .collect();
        match roles.first() {
            None => {
                let _ = writeln!(out, "  {};", quote(name));
            }
            Some(first) => {
                let classes: Vec<String> = roles.iter().map(|c| format!("c{}", c.index)).collect();
                let tags: Vec<String> = roles
                    .iter()
                    .map(|c| {
                        let role = if c.source.0 == i { "s" } else { "t" };
                        format!("{role}{}", c.index)
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    "  {} [class=\"{}\", color=\"{}\", penwidth=2, xlabel=\"{}\"];",
                    quote(name),
                    classes.join(" "),
                    commodity_color(first.index),
                    tags.join(",")
                );
            }
        }
    }
    for e in net.edges() {
        let tail = quote(&net.node_name(e.tail));
        let head = quote(&net.node_name(e.head));
        match assignment {
            None => {
                let _ = writeln!(out, "  {tail} -> {head} [label=\"{}\"];", e.capacity);
            }
            Some(a) => {
                let load = a.edge_load(e.id);
                let carriers: Vec<usize> = (1..=net.commodity_count())
                    .filter(|&i| a.per_commodity_edge_flow[i - 1][e.id.0] > 0)
                    .collect();
                let mut attrs = format!("label=\"{load}/{}\"", e.capacity);
                if !carriers.is_empty() {
                    let classes: Vec<String> = carriers.iter().map(|i| format!("c{i}")).collect();
                    let colors: Vec<&str> = carriers.iter().map(|&i| commodity_color(i)).collect();
                    let _ = write!(
                        attrs,
                        ", class=\"{}\", color=\"{}\", penwidth=2",
                        classes.join(" "),
                        colors.join(":")
                    );
                }
                let _ = writeln!(out, "  {tail} -> {head} [{attrs}];");
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristic::greedy_solve;
    use crate::netmodel::fixtures::worked_network;
    use crate::netmodel::parse_network;
    use crate::tableaux::initialize;

    fn edge_lines(dot: &str) -> Vec<&str> {
        dot.lines().filter(|l| l.contains(" -> ")).collect()
    }

    #[test]
    fn capacities_only() {
        let net = worked_network();
        let dot = export_dot(&net, None).unwrap();
        let lines = edge_lines(&dot);
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "  \"s1\" -> \"t1\" [label=\"5\"];");
        assert!(lines[1..].iter().all(|l| l.contains("label=\"10\"")));
        assert!(dot.contains("class=\"c1\""));
        assert!(dot.contains("class=\"c2\""));
    }

    #[test]
    fn with_greedy_assignment() {
        let net = worked_network();
        let mut bundle = initialize(&net).unwrap();
        let a = greedy_solve(&mut bundle).unwrap();
        let dot = export_dot(&net, Some(&a)).unwrap();
        let lines = edge_lines(&dot);
        assert!(lines[0].contains("label=\"5/5\""), "{}", lines[0]);
        assert!(lines[0].contains("class=\"c1\""));
        // a->b carried nothing once the red path was discarded.
        assert!(lines[2].contains("label=\"0/10\""));
    }

    #[test]
    fn zero_assignment_on_single_edge() {
        let net = parse_network("node s\nnode t\nedge s t 5\ncommodity s t").unwrap();
        let dot = export_dot(&net, Some(&Assignment::empty(1, 1))).unwrap();
        let lines = edge_lines(&dot);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].contains("label=\"0/5\""));
    }

    #[test]
    fn mismatched_assignment_is_rejected() {
        let net = worked_network();
        assert!(matches!(
            export_dot(&net, Some(&Assignment::empty(2, 3))),
            Err(ExportError::EdgeCount { .. })
        ));
    }
}
