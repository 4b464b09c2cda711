//! Colored path bookkeeping.
//!
//! Every commodity is solved on its own as a single-commodity network; each
//! path of its maximum-flow decomposition receives a unique [`Color`], and
//! that color is attached to every edge on the path. A [`TableauxBundle`]
//! carries five tables built from these paths:
//!
//! | table   | keyed by | entry                                          |
//! |---------|----------|------------------------------------------------|
//! | `ecbt`  | edge     | colors of the non-discarded paths through it   |
//! | `ecbv`  | edge     | residual capacity                              |
//! | `prbt`  | path     | edge sequence with capacities at construction  |
//! | `mecbv` | path     | minimum residual capacity along the path       |
//! | `pcbv`  | path     | number of distinct colors on the path's edges  |
//!
//! Shipping a path subtracts its bottleneck from `ecbv`, marks it used, and
//! discards every active path left with a zero-capacity edge. Discarded
//! paths lose their colors; used paths keep them.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::maxflow::{decompose_cut_paths, max_flow, Cut, MaxFlowError};
use crate::netmodel::{validate, Commodity, EdgeId, Network, NodeId, Violation};

const PALETTE: [&str; 16] = [
    "Violet", "Red", "Green", "Yellow", "Blue", "Orange", "Cyan", "Magenta", "Brown", "Pink",
    "Olive", "Teal", "Navy", "Maroon", "Lime", "Gray",
];

/// Index of a path in the path table; also the id of its color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color {
    pub id: usize,
    pub commodity: usize,
    pub ordinal: usize,
}

impl Color {
    /// Palette names for the first sixteen colors, `c<id>` beyond.
    pub fn name(&self) -> String {
        PALETTE
            .get(self.id)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("c{}", self.id))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Active,
    Used,
    Discarded,
}

impl fmt::Display for PathStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStatus::Active => "active",
            PathStatus::Used => "used",
            PathStatus::Discarded => "discarded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredPath {
    pub id: PathId,
    /// 1-based commodity index.
    pub commodity: usize,
    /// 1-based position among the commodity's paths.
    pub ordinal: usize,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    /// Edge capacities at construction time, parallel to `edges`.
    pub recorded_capacity: Vec<u64>,
    pub color: Color,
    /// Amount assigned to the path by the flow decomposition.
    pub amount: u64,
    pub cut_edge: EdgeId,
    pub status: PathStatus,
}

impl ColoredPath {
    /// `P<commodity>.<ordinal>`.
    pub fn label(&self) -> String {
        format!("P{}.{}", self.commodity, self.ordinal)
    }
}

/// The per-commodity single-commodity solution the tables were built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommodityRecord {
    pub commodity: Commodity,
    pub max_flow: u64,
    pub cut: Cut,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauxError {
    #[error("network is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetwork(Vec<Violation>),
    #[error("commodity {commodity}: {source}")]
    MaxFlow {
        commodity: usize,
        #[source]
        source: MaxFlowError,
    },
    #[error("no path with id {}", .0 .0)]
    UnknownPath(PathId),
    #[error("path {label} is {status}, not active")]
    NotActive { label: String, status: PathStatus },
    #[error("path {label}: shipment {amount} differs from bottleneck {bottleneck}")]
    AmountMismatch {
        label: String,
        amount: u64,
        bottleneck: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauxBundle {
    /// Colors present on each edge.
    pub ecbt: Vec<BTreeSet<PathId>>,
    /// Residual capacity per edge.
    pub ecbv: Vec<u64>,
    pub prbt: Vec<ColoredPath>,
    /// Residual bottleneck per path.
    pub mecbv: Vec<u64>,
    /// Distinct color count per path.
    pub pcbv: Vec<usize>,
    pub commodities: Vec<CommodityRecord>,
}

/// Solves every commodity on its own, decomposes, colors, and fills the
/// tables. All paths start active.
pub fn initialize(net: &Network) -> Result<TableauxBundle, TableauxError> {
    let violations = validate(net);
    if !violations.is_empty() {
        return Err(TableauxError::InvalidNetwork(violations));
    }
    let mut prbt = Vec::new();
    let mut commodities = Vec::new();
    for c in net.commodities() {
        let wrap = |source| TableauxError::MaxFlow {
            commodity: c.index,
            source,
        };
        let mf = max_flow(net, c.source, c.sink).map_err(wrap)?;
        let paths = decompose_cut_paths(net, &mf.flow).map_err(wrap)?;
        for (j, p) in paths.into_iter().enumerate() {
            let id = PathId(prbt.len());
            prbt.push(ColoredPath {
                id,
                commodity: c.index,
                ordinal: j + 1,
                recorded_capacity: p.edges.iter().map(|&e| net.capacity(e)).collect(),
                nodes: p.nodes,
                edges: p.edges,
                color: Color {
                    id: id.0,
                    commodity: c.index,
                    ordinal: j + 1,
                },
                amount: p.amount,
                cut_edge: p.cut_edge,
                status: PathStatus::Active,
            });
        }
        commodities.push(CommodityRecord {
            commodity: c.clone(),
            max_flow: mf.flow.value,
            cut: mf.min_cut,
        });
    }

    let mut ecbt = vec![BTreeSet::new(); net.edge_count()];
    for p in &prbt {
        for e in &p.edges {
            ecbt[e.0].insert(p.id);
        }
    }
    let mut bundle = TableauxBundle {
        ecbt,
        ecbv: net.edges().iter().map(|e| e.capacity).collect(),
        mecbv: vec![0; prbt.len()],
        pcbv: vec![0; prbt.len()],
        prbt,
        commodities,
    };
    bundle.refresh();
    Ok(bundle)
}

impl TableauxBundle {
    pub fn path(&self, id: PathId) -> Result<&ColoredPath, TableauxError> {
        self.prbt.get(id.0).ok_or(TableauxError::UnknownPath(id))
    }

    pub fn paths(&self) -> &[ColoredPath] {
        &self.prbt
    }

    pub fn active(&self) -> impl Iterator<Item = &ColoredPath> + '_ {
        self.prbt.iter().filter(|p| p.status == PathStatus::Active)
    }

    pub fn edge_count(&self) -> usize {
        self.ecbv.len()
    }

    pub fn commodity_count(&self) -> usize {
        self.commodities.len()
    }

    /// Distinct colors of non-discarded paths on the edges of `id`.
    pub fn colors_on(&self, id: PathId) -> Result<BTreeSet<PathId>, TableauxError> {
        let path = self.path(id)?;
        Ok(path
            .edges
            .iter()
            .flat_map(|e| self.ecbt[e.0].iter().copied())
            .collect())
    }

    /// Size of [`colors_on`](Self::colors_on).
    pub fn card_colors(&self, id: PathId) -> Result<usize, TableauxError> {
        self.colors_on(id).map(|s| s.len())
    }

    fn bottleneck(&self, path: &ColoredPath) -> u64 {
        path.edges.iter().map(|e| self.ecbv[e.0]).min().unwrap_or(0)
    }

    fn refresh(&mut self) {
        for k in 0..self.prbt.len() {
            self.mecbv[k] = self.bottleneck(&self.prbt[k]);
            self.pcbv[k] = if self.prbt[k].status == PathStatus::Discarded {
                0
            } else {
                self.card_colors(PathId(k)).unwrap_or(0)
            };
        }
    }

    /// Ships `amount` along an active path. `amount` must equal the path's
    /// current bottleneck. Returns the paths discarded as a consequence, in
    /// id order.
    pub fn apply_shipment(
        &mut self,
        id: PathId,
        amount: u64,
    ) -> Result<Vec<PathId>, TableauxError> {
        let path = self.path(id)?;
        if path.status != PathStatus::Active {
            return Err(TableauxError::NotActive {
                label: path.label(),
                status: path.status,
            });
        }
        let bottleneck = self.mecbv[id.0];
        if amount != bottleneck || amount == 0 {
            return Err(TableauxError::AmountMismatch {
                label: path.label(),
                amount,
                bottleneck,
            });
        }
        for e in path.edges.clone() {
            self.ecbv[e.0] -= amount;
        }
        self.prbt[id.0].status = PathStatus::Used;

        let mut discarded = Vec::new();
        for k in 0..self.prbt.len() {
            let p = &self.prbt[k];
            if p.status == PathStatus::Active && self.bottleneck(p) == 0 {
                discarded.push(PathId(k));
            }
        }
        for &d in &discarded {
            self.prbt[d.0].status = PathStatus::Discarded;
            for e in &self.prbt[d.0].edges {
                self.ecbt[e.0].remove(&d);
            }
        }
        self.refresh();
        Ok(discarded)
    }

    /// Cross-checks the tables against each other. Returns one message per
    /// inconsistency; empty when everything agrees.
    pub fn audit(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (e, colors) in self.ecbt.iter().enumerate() {
            let expected: BTreeSet<PathId> = self
                .prbt
                .iter()
                .filter(|p| p.status != PathStatus::Discarded && p.edges.contains(&EdgeId(e)))
                .map(|p| p.id)
                .collect();
            if *colors != expected {
                problems.push(format!("e{e}: colors {colors:?}, expected {expected:?}"));
            }
        }
        for p in &self.prbt {
            let k = p.id.0;
            if p.color.id != k {
                problems.push(format!(
                    "{}: color id {} is not path id",
                    p.label(),
                    p.color.id
                ));
            }
            let bottleneck = self.bottleneck(p);
            if self.mecbv[k] != bottleneck {
                problems.push(format!(
                    "{}: mecbv {} but edge minimum {bottleneck}",
                    p.label(),
                    self.mecbv[k]
                ));
            }
            if p.status == PathStatus::Active {
                let card = self.card_colors(p.id).unwrap_or(0);
                if self.pcbv[k] != card || card == 0 {
                    problems.push(format!(
                        "{}: pcbv {} but {card} colors",
                        p.label(),
                        self.pcbv[k]
                    ));
                }
                if !self.colors_on(p.id).unwrap_or_default().contains(&p.id) {
                    problems.push(format!("{}: own color missing", p.label()));
                }
                if bottleneck == 0 {
                    problems.push(format!("{}: active with zero bottleneck", p.label()));
                }
            }
        }
        problems
    }
}
