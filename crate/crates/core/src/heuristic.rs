//! Greedy multicommodity path selection by minimum color count, the
//! inclusion–exclusion cut bound, and feasibility checking of assignments.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::maxflow::Cut;
use crate::netmodel::{EdgeId, Network, NodeId};
use crate::tableaux::{ColoredPath, PathId, PathStatus, TableauxBundle, TableauxError};

/// One selected path and the amount it carried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shipment {
    /// Snapshot of the path at selection time.
    pub path: ColoredPath,
    pub amount: u64,
    /// Color count of the path when it was selected.
    pub card: usize,
}

/// A multicommodity flow.
///
/// `per_commodity_edge_flow[i][e]` is the flow of commodity `i + 1` on edge
/// `e`. `shipments` may be empty for flows given directly in edge form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub per_commodity_edge_flow: Vec<Vec<u64>>,
    pub shipments: Vec<Shipment>,
    pub discarded: Vec<ColoredPath>,
    pub total_value: u64,
    pub per_commodity_value: Vec<u64>,
}

impl Assignment {
    /// All-zero flow for `commodities` commodities over `edges` edges.
    pub fn empty(commodities: usize, edges: usize) -> Self {
        Assignment {
            per_commodity_edge_flow: vec![vec![0; edges]; commodities],
            shipments: Vec::new(),
            discarded: Vec::new(),
            total_value: 0,
            per_commodity_value: vec![0; commodities],
        }
    }

    /// Total flow on an edge over all commodities.
    pub fn edge_load(&self, e: EdgeId) -> u64 {
        self.per_commodity_edge_flow
            .iter()
            .map(|row| row.get(e.0).copied().unwrap_or(0))
            .sum()
    }

    fn record(&mut self, path: &ColoredPath, amount: u64, card: usize) {
        let row = &mut self.per_commodity_edge_flow[path.commodity - 1];
        for e in &path.edges {
            row[e.0] += amount;
        }
        self.per_commodity_value[path.commodity - 1] += amount;
        self.total_value += amount;
        self.shipments.push(Shipment {
            path: path.clone(),
            amount,
            card,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("bundle is not freshly initialized: {0} is not active")]
    NotFresh(String),
    #[error(transparent)]
    Tableaux(#[from] TableauxError),
}

/// Runs the selection algorithm on a freshly initialized bundle, leaving the
/// bundle in its final state.
///
/// Every path that starts with a color count of one is shipped first. Then,
/// while active paths remain, the active path with the fewest colors is
/// shipped at its current bottleneck (ties go to the lowest commodity, then
/// the lowest ordinal).
pub fn greedy_solve(bundle: &mut TableauxBundle) -> Result<Assignment, SolveError> {
    if let Some(p) = bundle
        .paths()
        .iter()
        .find(|p| p.status != PathStatus::Active)
    {
        return Err(SolveError::NotFresh(p.label()));
    }
    let mut out = Assignment::empty(bundle.commodity_count(), bundle.edge_count());

    let unshared: Vec<PathId> = bundle
        .paths()
        .iter()
        .filter(|p| bundle.pcbv[p.id.0] == 1)
        .map(|p| p.id)
        .collect();
    for id in unshared {
        if bundle.paths()[id.0].status == PathStatus::Active {
            ship(bundle, &mut out, id)?;
        }
    }

    while let Some(id) = bundle
        .active()
        .min_by_key(|p| (bundle.pcbv[p.id.0], p.commodity, p.ordinal))
        .map(|p| p.id)
    {
        ship(bundle, &mut out, id)?;
    }

    out.discarded = bundle
        .paths()
        .iter()
        .filter(|p| p.status == PathStatus::Discarded)
        .cloned()
        .collect();
    Ok(out)
}

fn ship(bundle: &mut TableauxBundle, out: &mut Assignment, id: PathId) -> Result<(), SolveError> {
    let amount = bundle.mecbv[id.0];
    let card = bundle.pcbv[id.0];
    let snapshot = bundle.paths()[id.0].clone();
    bundle.apply_shipment(id, amount)?;
    out.record(&snapshot, amount, card);
    Ok(())
}

/// One term `S(C_a ∩ C_b ∩ ...)` of the alternating sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTerm {
    /// 1-based commodity indices, ascending.
    pub commodities: Vec<usize>,
    pub edges: Vec<EdgeId>,
    pub sum: u64,
}

impl IntersectionTerm {
    pub fn sign(&self) -> i64 {
        if self.commodities.len() % 2 == 1 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub individual_cut_sums: Vec<u64>,
    /// Terms for every subset with a nonempty intersection, plus all
    /// singletons; omitted subsets contribute zero.
    pub intersection_terms: Vec<IntersectionTerm>,
    pub bound: i64,
}

/// Alternating inclusion–exclusion sum of cut capacities over every
/// nonempty family of edge sets.
pub fn inclusion_exclusion(
    sets: &[BTreeSet<EdgeId>],
    capacity: impl Fn(EdgeId) -> u64,
) -> BoundReport {
    let sum = |edges: &BTreeSet<EdgeId>| edges.iter().map(|&e| capacity(e)).sum::<u64>();
    let mut terms = Vec::new();
    // Depth-first over subsets in lexicographic order; supersets of an empty
    // intersection are empty too and are skipped.
    let mut stack: Vec<(Vec<usize>, BTreeSet<EdgeId>)> = Vec::new();
    for i in (0..sets.len()).rev() {
        stack.push((vec![i], sets[i].clone()));
    }
    while let Some((members, inter)) = stack.pop() {
        terms.push(IntersectionTerm {
            commodities: members.iter().map(|i| i + 1).collect(),
            edges: inter.iter().copied().collect(),
            sum: sum(&inter),
        });
        let last = *members.last().unwrap();
        for j in (last + 1..sets.len()).rev() {
            let next: BTreeSet<EdgeId> = inter.intersection(&sets[j]).copied().collect();
            if !next.is_empty() {
                let mut m = members.clone();
                m.push(j);
                stack.push((m, next));
            }
        }
    }
    let bound = terms.iter().map(|t| t.sign() * t.sum as i64).sum();
    BoundReport {
        individual_cut_sums: sets.iter().map(sum).collect(),
        intersection_terms: terms,
        bound,
    }
}

/// [`inclusion_exclusion`] over the cut-edge sets of `cuts`.
pub fn inclusion_exclusion_bound(net: &Network, cuts: &[Cut]) -> BoundReport {
    let sets: Vec<BTreeSet<EdgeId>> = cuts
        .iter()
        .map(|c| c.cut_edges.iter().copied().collect())
        .collect();
    inclusion_exclusion(&sets, |e| net.capacity(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpperBounds {
    pub sum_individual: u64,
    pub inclusion_exclusion: i64,
}

pub fn upper_bounds(net: &Network, bundle: &TableauxBundle) -> UpperBounds {
    let cuts: Vec<Cut> = bundle.commodities.iter().map(|c| c.cut.clone()).collect();
    UpperBounds {
        sum_individual: bundle.commodities.iter().map(|c| c.max_flow).sum(),
        inclusion_exclusion: inclusion_exclusion_bound(net, &cuts).bound,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignmentViolation {
    Capacity {
        edge: EdgeId,
        label: String,
        load: u64,
        capacity: u64,
    },
    Conservation {
        commodity: usize,
        node: String,
        inflow: u64,
        outflow: u64,
    },
    CommodityValue {
        commodity: usize,
        reported: u64,
        net_outflow: i128,
    },
    ShippedValue {
        commodity: usize,
        reported: u64,
        shipped: u64,
    },
    Total {
        reported: u64,
        sum: u64,
    },
}

impl fmt::Display for AssignmentViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentViolation::Capacity {
                edge,
                label,
                load,
                capacity,
            } => write!(
                f,
                "edge {edge} ({label}) carries {load} > capacity {capacity}"
            ),
            AssignmentViolation::Conservation {
                commodity,
                node,
                inflow,
                outflow,
            } => write!(
                f,
                "commodity {commodity} at node {node}: inflow {inflow} != outflow {outflow}"
            ),
            AssignmentViolation::CommodityValue {
                commodity,
                reported,
                net_outflow,
            } => write!(
                f,
                "commodity {commodity}: reported {reported}, net outflow at source {net_outflow}"
            ),
            AssignmentViolation::ShippedValue {
                commodity,
                reported,
                shipped,
            } => write!(
                f,
                "commodity {commodity}: reported {reported}, shipments sum to {shipped}"
            ),
            AssignmentViolation::Total { reported, sum } => {
                write!(f, "total {reported} != sum of commodity values {sum}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("assignment covers {found} commodities, network has {expected}")]
    CommodityCount { expected: usize, found: usize },
    #[error("commodity {commodity} has flows for {found} edges, network has {expected}")]
    EdgeCount {
        commodity: usize,
        expected: usize,
        found: usize,
    },
    #[error("shipment references unknown commodity {0}")]
    UnknownCommodity(usize),
}

/// Checks shared capacities, per-commodity conservation, and the reported
/// values. An empty list means the assignment is a feasible multicommodity
/// flow whose totals are consistent.
pub fn validate_assignment(
    net: &Network,
    a: &Assignment,
) -> Result<Vec<AssignmentViolation>, AssignmentError> {
    let n = net.commodity_count();
    if a.per_commodity_edge_flow.len() != n || a.per_commodity_value.len() != n {
        return Err(AssignmentError::CommodityCount {
            expected: n,
            found: a.per_commodity_edge_flow.len(),
        });
    }
    for (i, row) in a.per_commodity_edge_flow.iter().enumerate() {
        if row.len() != net.edge_count() {
            return Err(AssignmentError::EdgeCount {
                commodity: i + 1,
                expected: net.edge_count(),
                found: row.len(),
            });
        }
    }
    if let Some(s) = a
        .shipments
        .iter()
        .find(|s| s.path.commodity == 0 || s.path.commodity > n)
    {
        return Err(AssignmentError::UnknownCommodity(s.path.commodity));
    }

    let mut out = Vec::new();
    for e in net.edges() {
        let load = a.edge_load(e.id);
        if load > e.capacity {
            out.push(AssignmentViolation::Capacity {
                edge: e.id,
                label: net.edge_label(e.id),
                load,
                capacity: e.capacity,
            });
        }
    }
    for (c, row) in net.commodities().iter().zip(&a.per_commodity_edge_flow) {
        let mut inflow = vec![0u64; net.node_count()];
        let mut outflow = vec![0u64; net.node_count()];
        for e in net.edges() {
            inflow[e.head.0] += row[e.id.0];
            outflow[e.tail.0] += row[e.id.0];
        }
        for v in 0..net.node_count() {
            let node = NodeId(v);
            if node != c.source && node != c.sink && inflow[v] != outflow[v] {
                out.push(AssignmentViolation::Conservation {
                    commodity: c.index,
                    node: net.node_name(node),
                    inflow: inflow[v],
                    outflow: outflow[v],
                });
            }
        }
        let net_outflow = outflow[c.source.0] as i128 - inflow[c.source.0] as i128;
        let reported = a.per_commodity_value[c.index - 1];
        if net_outflow != reported as i128 {
            out.push(AssignmentViolation::CommodityValue {
                commodity: c.index,
                reported,
                net_outflow,
            });
        }
        if !a.shipments.is_empty() {
            let shipped = a
                .shipments
                .iter()
                .filter(|s| s.path.commodity == c.index)
                .map(|s| s.amount)
                .sum();
            if shipped != reported {
                out.push(AssignmentViolation::ShippedValue {
                    commodity: c.index,
                    reported,
                    shipped,
                });
            }
        }
    }
    let sum = a.per_commodity_value.iter().sum();
    if a.total_value != sum {
        out.push(AssignmentViolation::Total {
            reported: a.total_value,
            sum,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::fixtures::worked_network;
    use crate::netmodel::parse_network;
    use crate::tableaux::initialize;

    fn solve(net: &Network) -> Assignment {
        let mut bundle = initialize(net).unwrap();
        greedy_solve(&mut bundle).unwrap()
    }

    #[test]
    fn worked_selection_order() {
        let net = worked_network();
        let a = solve(&net);
        let shipped: Vec<_> = a
            .shipments
            .iter()
            .map(|s| (s.path.label(), s.amount))
            .collect();
        assert_eq!(
            shipped,
            vec![
                ("P1.1".to_string(), 5),
                ("P2.1".to_string(), 10),
                ("P2.2".to_string(), 10)
            ]
        );
        let discarded: Vec<_> = a.discarded.iter().map(|p| p.label()).collect();
        assert_eq!(discarded, ["P1.2"]);
        assert_eq!(a.total_value, 25);
        assert_eq!(a.per_commodity_value, vec![5, 20]);
        assert!(validate_assignment(&net, &a).unwrap().is_empty());
    }

    #[test]
    fn disjoint_commodities_ship_everything() {
        let net = parse_network(
            "node a\nnode b\nnode c\nnode d\nnode m\n\
             edge a m 3\nedge m b 3\nedge c d 4\n\
             commodity a b\ncommodity c d",
        )
        .unwrap();
        let a = solve(&net);
        assert_eq!(a.total_value, 7);
        assert!(a.discarded.is_empty());
        let bundle = initialize(&net).unwrap();
        let ub = upper_bounds(&net, &bundle);
        assert_eq!(ub.sum_individual, 7);
        assert_eq!(ub.inclusion_exclusion, 7);
    }

    #[test]
    fn solve_requires_a_fresh_bundle() {
        let mut bundle = initialize(&worked_network()).unwrap();
        greedy_solve(&mut bundle).unwrap();
        assert!(matches!(
            greedy_solve(&mut bundle),
            Err(SolveError::NotFresh(_))
        ));
    }

    #[test]
    fn bound_on_disjoint_and_identical_cuts() {
        let caps = [15u64, 20, 7];
        let cap = |e: EdgeId| caps[e.0];
        let disjoint = [BTreeSet::from([EdgeId(0)]), BTreeSet::from([EdgeId(1)])];
        let r = inclusion_exclusion(&disjoint, cap);
        assert_eq!(r.bound, 35);
        assert_eq!(r.intersection_terms.len(), 2);

        let same = [BTreeSet::from([EdgeId(2)]), BTreeSet::from([EdgeId(2)])];
        let r = inclusion_exclusion(&same, cap);
        assert_eq!(r.bound, 7);
        let sums: Vec<_> = r
            .intersection_terms
            .iter()
            .map(|t| (t.sign(), t.sum))
            .collect();
        assert_eq!(sums, vec![(1, 7), (-1, 7), (1, 7)]);
    }

    #[test]
    fn worked_bounds() {
        let net = worked_network();
        let bundle = initialize(&net).unwrap();
        let ub = upper_bounds(&net, &bundle);
        assert_eq!(ub.sum_individual, 35);
        // Both canonical cuts leave their source directly and share no edge.
        assert_eq!(ub.inclusion_exclusion, 35);
    }

    #[test]
    fn single_commodity_bounds_coincide() {
        let net = parse_network(
            "node s\nnode a\nnode t\nedge s a 4\nedge a t 9\nedge s t 2\ncommodity s t",
        )
        .unwrap();
        let bundle = initialize(&net).unwrap();
        let ub = upper_bounds(&net, &bundle);
        assert_eq!(ub.sum_individual, 6);
        assert_eq!(ub.inclusion_exclusion, 6);
    }

    #[test]
    fn capacity_violation_names_the_edge() {
        let net = worked_network();
        let mut a = Assignment::empty(2, 8);
        a.per_commodity_edge_flow[0][0] = 6;
        a.per_commodity_value[0] = 6;
        a.total_value = 6;
        let v = validate_assignment(&net, &a).unwrap();
        assert_eq!(v.len(), 1);
        assert!(matches!(
            &v[0],
            AssignmentViolation::Capacity {
                edge: EdgeId(0),
                load: 6,
                ..
            }
        ));
        assert!(v[0].to_string().contains("s1->t1"));
    }

    #[test]
    fn conservation_violation_names_commodity_and_node() {
        let net = worked_network();
        let mut a = Assignment::empty(2, 8);
        // s2 -> s1 -> a, then nothing leaves a.
        a.per_commodity_edge_flow[1][4] = 3;
        a.per_commodity_edge_flow[1][1] = 3;
        let v = validate_assignment(&net, &a).unwrap();
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(v.iter().any(|x| matches!(
            x,
            AssignmentViolation::Conservation { commodity: 2, node, inflow: 3, outflow: 0 } if node == "a"
        )));
        // The reported value 0 also disagrees with the 3 units leaving s2.
        assert!(v
            .iter()
            .any(|x| matches!(x, AssignmentViolation::CommodityValue { commodity: 2, .. })));
    }

    #[test]
    fn malformed_assignment_is_an_error() {
        let net = worked_network();
        assert!(matches!(
            validate_assignment(&net, &Assignment::empty(3, 8)),
            Err(AssignmentError::CommodityCount { .. })
        ));
        assert!(matches!(
            validate_assignment(&net, &Assignment::empty(2, 7)),
            Err(AssignmentError::EdgeCount { .. })
        ));
    }
}
