//! Human and structured report rendering.
//!
//! Structured output is one `key<TAB>value` pair per line. Lists repeat the
//! key; values are space-separated tokens and never contain tabs.

use std::fmt::{Display, Write as _};

use super::OutputFormat;
use crate::heuristic::{inclusion_exclusion_bound, Assignment, AssignmentViolation, UpperBounds};
use crate::maxflow::{Cut, DecomposedPath, MaxFlow};
use crate::netmodel::{Commodity, EdgeId, Network, NodeId};
use crate::oracle::{GapReport, OracleResult};
use crate::tableaux::{PathId, TableauxBundle};

/// Parsed structured output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn all(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }
}

/// Reads structured output back. Fails on a line without a tab.
pub fn parse_structured(text: &str) -> Result<Report, String> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| format!("line {}: no tab separator", i + 1))?;
        entries.push((k.to_string(), v.to_string()));
    }
    Ok(Report { entries })
}

#[derive(Default)]
struct Kv(String);

impl Kv {
    fn put(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.0, "{key}\t{value}");
    }
}

fn route(net: &Network, nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(|&n| net.node_name(n))
        .collect::<Vec<_>>()
        .join(">")
}

fn arrows(net: &Network, nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(|&n| net.node_name(n))
        .collect::<Vec<_>>()
        .join(" -> ")
}

fn edge_ref(net: &Network, e: EdgeId) -> String {
    format!("{e} {}", net.edge_label(e))
}

fn side(net: &Network, cut: &Cut) -> String {
    cut.source_side
        .iter()
        .map(|&n| net.node_name(n))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Label column, bar, entry columns.
fn bitableau(out: &mut String, title: &str, rows: &[(String, String)]) {
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let _ = writeln!(out, "{title}");
    for (left, right) in rows {
        let _ = writeln!(out, "  {left:<width$} | {right}");
    }
    out.push('\n');
}

pub(super) fn validation(net: &Network, format: OutputFormat) -> String {
    match format {
        OutputFormat::Structured => {
            let mut kv = Kv::default();
            kv.put("command", "validate");
            kv.put("nodes", net.node_count());
            kv.put("edges", net.edge_count());
            kv.put("commodities", net.commodity_count());
            kv.put("status", "ok");
            kv.0
        }
        OutputFormat::Human => format!(
            "ok: {} nodes, {} edges, {} commodities\n",
            net.node_count(),
            net.edge_count(),
            net.commodity_count()
        ),
    }
}

pub(super) fn maxflow(
    net: &Network,
    results: &[(Commodity, MaxFlow, Vec<DecomposedPath>)],
    format: OutputFormat,
) -> String {
    let mut kv = Kv::default();
    let mut human = String::new();
    kv.put("command", "maxflow");
    for (c, mf, paths) in results {
        let cut = &mf.min_cut;
        match format {
            OutputFormat::Structured => {
                kv.put("commodity", c.index);
                kv.put("source", net.node_name(c.source));
                kv.put("sink", net.node_name(c.sink));
                kv.put("value", mf.value());
                kv.put("augmentations", mf.augmentations);
                kv.put("cut_capacity", cut.capacity);
                kv.put("source_side", side(net, cut));
                for &e in &cut.cut_edges {
                    kv.put(
                        "cut_edge",
                        format!("{} {}", edge_ref(net, e), net.capacity(e)),
                    );
                }
                for e in net.edges() {
                    let f = mf.flow.edge_flow[e.id.0];
                    if f > 0 {
                        kv.put("flow", format!("{} {f}", edge_ref(net, e.id)));
                    }
                }
                for (j, p) in paths.iter().enumerate() {
                    kv.put(
                        "path",
                        format!(
                            "P{}.{} {} {}",
                            c.index,
                            j + 1,
                            p.amount,
                            route(net, &p.nodes)
                        ),
                    );
                }
            }
            OutputFormat::Human => {
                let _ = writeln!(
                    human,
                    "commodity {} ({} -> {})",
                    c.index,
                    net.node_name(c.source),
                    net.node_name(c.sink)
                );
                let _ = writeln!(human, "  max flow       {}", mf.value());
                let _ = writeln!(human, "  augmentations  {}", mf.augmentations);
                let cut_list: Vec<String> = cut
                    .cut_edges
                    .iter()
                    .map(|&e| format!("{} ({})", net.edge_label(e), net.capacity(e)))
                    .collect();
                let _ = writeln!(
                    human,
                    "  min cut        {}  [{}]",
                    cut.capacity,
                    cut_list.join(", ")
                );
                let _ = writeln!(human, "  source side    {{{}}}", side(net, cut));
                let _ = writeln!(human, "  edge flows");
                for e in net.edges() {
                    let f = mf.flow.edge_flow[e.id.0];
                    if f > 0 {
                        let _ = writeln!(
                            human,
                            "    {:<4} {:<12} {f}/{}",
                            e.id.to_string(),
                            net.edge_label(e.id),
                            e.capacity
                        );
                    }
                }
                let _ = writeln!(human, "  paths");
                for (j, p) in paths.iter().enumerate() {
                    let _ = writeln!(
                        human,
                        "    P{}.{}  {:>4}  {}",
                        c.index,
                        j + 1,
                        p.amount,
                        arrows(net, &p.nodes)
                    );
                }
                human.push('\n');
            }
        }
    }
    match format {
        OutputFormat::Structured => kv.0,
        OutputFormat::Human => human,
    }
}

fn color_names(bundle: &TableauxBundle, colors: impl Iterator<Item = PathId>) -> String {
    colors
        .map(|c| bundle.prbt[c.0].color.name())
        .collect::<Vec<_>>()
        .join(" ")
}

fn recorded_edges(bundle: &TableauxBundle, id: PathId) -> String {
    let p = &bundle.prbt[id.0];
    p.edges
        .iter()
        .zip(&p.recorded_capacity)
        .map(|(e, w)| format!("{e}({w})"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub(super) fn tables(net: &Network, bundle: &TableauxBundle, format: OutputFormat) -> String {
    match format {
        OutputFormat::Structured => {
            let mut kv = Kv::default();
            kv.put("command", "tables");
            for e in net.edges() {
                let colors = color_names(bundle, bundle.ecbt[e.id.0].iter().copied());
                kv.put(
                    "ecbt",
                    format!("{} {colors}", edge_ref(net, e.id)).trim_end(),
                );
            }
            for e in net.edges() {
                kv.put(
                    "ecbv",
                    format!("{} {}", edge_ref(net, e.id), bundle.ecbv[e.id.0]),
                );
            }
            for p in bundle.paths() {
                kv.put(
                    "prbt",
                    format!(
                        "{} {} {}",
                        p.label(),
                        p.color.name(),
                        recorded_edges(bundle, p.id)
                    ),
                );
            }
            for p in bundle.paths() {
                kv.put("mecbv", format!("{} {}", p.label(), bundle.mecbv[p.id.0]));
            }
            for p in bundle.paths() {
                kv.put("pcbv", format!("{} {}", p.label(), bundle.pcbv[p.id.0]));
            }
            kv.0
        }
        OutputFormat::Human => {
            let edge_rows = |f: &dyn Fn(EdgeId) -> String| -> Vec<(String, String)> {
                net.edges()
                    .iter()
                    .map(|e| {
                        (
                            format!("{:<4} {}", e.id.to_string(), net.edge_label(e.id)),
                            f(e.id),
                        )
                    })
                    .collect()
            };
            let path_rows = |f: &dyn Fn(PathId) -> String| -> Vec<(String, String)> {
                bundle
                    .paths()
                    .iter()
                    .map(|p| (format!("{} {}", p.label(), p.color.name()), f(p.id)))
                    .collect()
            };
            let mut out = String::new();
            bitableau(
                &mut out,
                "Edge colors (ECBT)",
                &edge_rows(&|e| color_names(bundle, bundle.ecbt[e.0].iter().copied())),
            );
            bitableau(
                &mut out,
                "Edge capacities (ECBV)",
                &edge_rows(&|e| bundle.ecbv[e.0].to_string()),
            );
            bitableau(
                &mut out,
                "Path records (PRBT)",
                &path_rows(&|p| recorded_edges(bundle, p)),
            );
            bitableau(
                &mut out,
                "Path bottlenecks (MECBV)",
                &path_rows(&|p| bundle.mecbv[p.0].to_string()),
            );
            bitableau(
                &mut out,
                "Path color counts (PCBV)",
                &path_rows(&|p| bundle.pcbv[p.0].to_string()),
            );
            out
        }
    }
}

pub(super) fn solve(
    net: &Network,
    initial: &TableauxBundle,
    a: &Assignment,
    bounds: &UpperBounds,
    violations: &[AssignmentViolation],
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Structured => {
            let mut kv = Kv::default();
            kv.put("command", "solve");
            for p in initial.paths() {
                kv.put("card", format!("{} {}", p.label(), initial.pcbv[p.id.0]));
            }
            for s in &a.shipments {
                kv.put("shipment", format!("{} {}", s.path.label(), s.amount));
            }
            for p in &a.discarded {
                kv.put("discarded", p.label());
            }
            for (i, v) in a.per_commodity_value.iter().enumerate() {
                kv.put("commodity_value", format!("{} {v}", i + 1));
            }
            kv.put("total", a.total_value);
            kv.put("sum_individual", bounds.sum_individual);
            kv.put("inclusion_exclusion", bounds.inclusion_exclusion);
            kv.put("violations", violations.len());
            for v in violations {
                kv.put("violation", v);
            }
            kv.0
        }
        OutputFormat::Human => {
            let mut out = String::new();
            let _ = writeln!(out, "Initial color counts");
            for p in initial.paths() {
                let _ = writeln!(
                    out,
                    "  {:<6} {:<8} {:>3}   {}",
                    p.label(),
                    p.color.name(),
                    initial.pcbv[p.id.0],
                    arrows(net, &p.nodes)
                );
            }
            let _ = writeln!(out, "\nSelection");
            for (k, s) in a.shipments.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  {}) {} ({}) ships {} [color count {}]",
                    k + 1,
                    s.path.label(),
                    s.path.color.name(),
                    s.amount,
                    s.card
                );
            }
            if !a.discarded.is_empty() {
                let _ = writeln!(out, "\nDiscarded");
                for p in &a.discarded {
                    let _ = writeln!(out, "  {} ({})", p.label(), p.color.name());
                }
            }
            let _ = writeln!(out, "\nPer commodity");
            for (rec, v) in initial.commodities.iter().zip(&a.per_commodity_value) {
                let _ = writeln!(
                    out,
                    "  commodity {}: {v} of individual max {}",
                    rec.commodity.index, rec.max_flow
                );
            }
            let _ = writeln!(out, "\nTotal flow {}", a.total_value);
            let _ = writeln!(
                out,
                "Upper bounds: sum of individual max flows {}, inclusion-exclusion {}",
                bounds.sum_individual, bounds.inclusion_exclusion
            );
            if violations.is_empty() {
                let _ = writeln!(out, "Feasibility: ok");
            } else {
                let _ = writeln!(out, "Feasibility: {} violation(s)", violations.len());
                for v in violations {
                    let _ = writeln!(out, "  {v}");
                }
            }
            out
        }
    }
}

pub(super) fn bound(net: &Network, bundle: &TableauxBundle, format: OutputFormat) -> String {
    let cuts: Vec<Cut> = bundle.commodities.iter().map(|c| c.cut.clone()).collect();
    let report = inclusion_exclusion_bound(net, &cuts);
    let sum_individual: u64 = bundle.commodities.iter().map(|c| c.max_flow).sum();
    let members = |m: &[usize]| {
        m.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let sign = |s: i64| if s > 0 { '+' } else { '-' };
    match format {
        OutputFormat::Structured => {
            let mut kv = Kv::default();
            kv.put("command", "bound");
            for (rec, sum) in bundle.commodities.iter().zip(&report.individual_cut_sums) {
                let edges: Vec<String> = rec.cut.cut_edges.iter().map(|e| e.to_string()).collect();
                kv.put(
                    "cut",
                    format!("{} {sum} {}", rec.commodity.index, edges.join(" ")).trim_end(),
                );
            }
            for t in &report.intersection_terms {
                kv.put(
                    "term",
                    format!("{} {} {}", sign(t.sign()), members(&t.commodities), t.sum),
                );
            }
            kv.put("bound", report.bound);
            kv.put("sum_individual", sum_individual);
            kv.0
        }
        OutputFormat::Human => {
            let mut out = String::new();
            let _ = writeln!(out, "Min cuts");
            for (rec, sum) in bundle.commodities.iter().zip(&report.individual_cut_sums) {
                let edges: Vec<String> = rec
                    .cut
                    .cut_edges
                    .iter()
                    .map(|&e| net.edge_label(e))
                    .collect();
                let _ = writeln!(
                    out,
                    "  C{}  S = {sum:<4} {{{}}}",
                    rec.commodity.index,
                    edges.join(", ")
                );
            }
            let _ = writeln!(out, "\nTerms");
            for t in &report.intersection_terms {
                let _ = writeln!(
                    out,
                    "  {} S(C{}) = {}",
                    sign(t.sign()),
                    t.commodities
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" ∩ C"),
                    t.sum
                );
            }
            let _ = writeln!(out, "\nInclusion-exclusion bound {}", report.bound);
            let _ = writeln!(out, "Sum of individual max flows {sum_individual}");
            out
        }
    }
}

pub(super) fn oracle(net: &Network, r: &OracleResult, format: OutputFormat) -> String {
    let chosen: Vec<_> = r
        .catalog
        .flat()
        .zip(&r.witness)
        .filter(|(_, &a)| a > 0)
        .collect();
    match format {
        OutputFormat::Structured => {
            let mut kv = Kv::default();
            kv.put("command", "oracle");
            kv.put("paths", r.catalog.len());
            kv.put("optimum", r.optimum);
            kv.put("explored", r.explored);
            kv.put("truncated", r.truncated);
            for (p, amount) in chosen {
                kv.put(
                    "witness",
                    format!("{} {amount} {}", p.commodity, route(net, &p.nodes)),
                );
            }
            kv.0
        }
        OutputFormat::Human => {
            let mut out = String::new();
            let status = if r.truncated {
                " (truncated: best found, not proven optimal)"
            } else {
                ""
            };
            let _ = writeln!(out, "Optimum {}{status}", r.optimum);
            let _ = writeln!(
                out,
                "Searched {} nodes over {} simple paths",
                r.explored,
                r.catalog.len()
            );
            let _ = writeln!(out, "Witness");
            for (p, amount) in chosen {
                let _ = writeln!(
                    out,
                    "  commodity {}  {amount:>4}  {}",
                    p.commodity,
                    arrows(net, &p.nodes)
                );
            }
            out
        }
    }
}

pub(super) fn gap(g: &GapReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Structured => {
            let mut kv = Kv::default();
            kv.put("command", "gap");
            kv.put("heuristic", g.heuristic);
            kv.put("optimum", g.optimum);
            kv.put("sum_individual", g.sum_individual);
            kv.put("inclusion_exclusion", g.inclusion_exclusion);
            kv.put("gap", g.gap);
            kv.0
        }
        OutputFormat::Human => format!(
            "Heuristic                    {}\n\
             Exact optimum                {}\n\
             Sum of individual max flows  {}\n\
             Inclusion-exclusion bound    {}\n\
             Gap                          {}\n",
            g.heuristic, g.optimum, g.sum_individual, g.inclusion_exclusion, g.gap
        ),
    }
}
