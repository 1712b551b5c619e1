//! General tensor-network states on a lattice.
//!
//! A [`Tns`] is a set of [`TensorNode`]s joined by [`ContractionLine`]s. Every
//! node carries the layer it belongs to and the cell of that layer's coarse
//! lattice it is assigned to. Physical legs are modeled by order-1
//! physical-anchor nodes in layer 0, one per site; the anchor's single slot is
//! contracted with the layer-1 tensor that owns the site, and its value is the
//! physical index of that site.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{structure, Result};
use crate::lattice::{LatticeSpec, Site};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TensorKind {
    /// Unitary on a block of sites with the given extent per axis. Slots are
    /// the lower legs (towards the physical layer) followed by the upper legs,
    /// both in row-major order over the footprint.
    Disentangler {
        footprint: Vec<usize>,
    },
    /// Coarse-graining map. Lower legs first, then one upper leg.
    Isometry,
    /// Top state.
    Top,
    PhysicalAnchor,
}

impl TensorKind {
    /// Key used to select placement offsets, e.g. `disentangler-2x1`.
    pub fn key(&self) -> String {
        match self {
            TensorKind::Disentangler { footprint } => {
                let parts: Vec<String> = footprint.iter().map(|x| format!("{x}")).collect();
                format!("disentangler-{}", parts.join("x"))
            }
            TensorKind::Isometry => "isometry".into(),
            TensorKind::Top => "top".into(),
            TensorKind::PhysicalAnchor => "physical-anchor".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorNode {
    pub id: NodeId,
    pub layer: usize,
    /// Cell in the layer's coarse lattice; for anchors, the physical site.
    pub cell: Vec<usize>,
    pub kind: TensorKind,
    /// Dimension of each index slot.
    pub dims: Vec<usize>,
    /// Dense elements, row-major over the slots.
    pub elements: Option<Vec<Complex64>>,
}

impl TensorNode {
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn is_anchor(&self) -> bool {
        self.kind == TensorKind::PhysicalAnchor
    }

    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }
}

/// One end of a contraction line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port {
    pub node: NodeId,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionLine {
    pub id: LineId,
    pub ends: [Port; 2],
    pub dim: usize,
}

/// The bounds a MERA must satisfy, all independent of the system size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeraMeta {
    /// Linear branching ratio `b`.
    pub branching: usize,
    /// Bound on index dimensions.
    pub chi: usize,
    /// Bound on tensor order.
    #[serde(rename = "C_o")]
    pub max_order: usize,
    /// Bound on tensors per cell of a layer.
    #[serde(rename = "C_t")]
    pub max_per_cell: usize,
    /// Bound on the L1 cell distance of contracted tensors.
    #[serde(rename = "C_r")]
    pub max_cell_distance: usize,
    /// Bound on the layer difference of contracted tensors.
    #[serde(rename = "C_T")]
    pub max_layer_gap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tns {
    pub spec: LatticeSpec,
    pub nodes: Vec<TensorNode>,
    pub lines: Vec<ContractionLine>,
    pub physical_dim: usize,
    pub meta: MeraMeta,
    line_at: Vec<Vec<LineId>>,
}

impl Tns {
    /// Assembles a network and checks its structural invariants: ids match
    /// positions, every slot is covered by exactly one line, line dimensions
    /// agree with slot dimensions, one anchor per site, element shapes.
    pub fn new(
        spec: LatticeSpec,
        nodes: Vec<TensorNode>,
        lines: Vec<ContractionLine>,
        physical_dim: usize,
        meta: MeraMeta,
    ) -> Result<Self> {
        for (i, n) in nodes.iter().enumerate() {
            if n.id.0 != i {
                return Err(structure!("node at position {i} has id {}", n.id.0));
            }
            if let Some(el) = &n.elements {
                if el.len() != n.size() {
                    return Err(structure!(
                        "node {i}: {} elements for shape {:?}",
                        el.len(),
                        n.dims
                    ));
                }
            }
        }
        let mut line_at: Vec<Vec<Option<LineId>>> =
            nodes.iter().map(|n| alloc::vec![None; n.order()]).collect();
        for (i, l) in lines.iter().enumerate() {
            if l.id.0 != i {
                return Err(structure!("line at position {i} has id {}", l.id.0));
            }
            if l.ends[0] == l.ends[1] {
                return Err(structure!("line {i} joins a slot to itself"));
            }
            for p in l.ends {
                let node = nodes
                    .get(p.node.0)
                    .ok_or_else(|| structure!("line {i} references missing node {}", p.node.0))?;
                let slot = line_at[p.node.0].get_mut(p.slot).ok_or_else(|| {
                    structure!(
                        "line {i} references missing slot {} of node {}",
                        p.slot,
                        p.node.0
                    )
                })?;
                if slot.is_some() {
                    return Err(structure!(
                        "slot {} of node {} is contracted twice",
                        p.slot,
                        p.node.0
                    ));
                }
                if node.dims[p.slot] != l.dim {
                    return Err(structure!(
                        "line {i} has dimension {} but slot {} of node {} has {}",
                        l.dim,
                        p.slot,
                        p.node.0,
                        node.dims[p.slot]
                    ));
                }
                *slot = Some(l.id);
            }
        }
        let mut line_at_full = Vec::with_capacity(nodes.len());
        for (i, slots) in line_at.into_iter().enumerate() {
            let mut v = Vec::with_capacity(slots.len());
            for (s, l) in slots.into_iter().enumerate() {
                v.push(l.ok_or_else(|| structure!("slot {s} of node {i} is not contracted"))?);
            }
            line_at_full.push(v);
        }

        let mut anchors = BTreeMap::new();
        for n in nodes.iter().filter(|n| n.is_anchor()) {
            if n.layer != 0 || n.dims != [physical_dim] {
                return Err(structure!(
                    "anchor {} must be an order-1 layer-0 node of dimension {physical_dim}",
                    n.id.0
                ));
            }
            let site = Site::new(n.cell.clone());
            if !spec.contains(&site) {
                return Err(structure!(
                    "anchor {} sits outside the lattice at {site}",
                    n.id.0
                ));
            }
            if anchors.insert(site.clone(), n.id).is_some() {
                return Err(structure!("two anchors at site {site}"));
            }
        }
        if anchors.len() != spec.num_sites() {
            return Err(structure!(
                "{} anchors for {} sites",
                anchors.len(),
                spec.num_sites()
            ));
        }
        for l in &lines {
            let a = &nodes[l.ends[0].node.0];
            let b = &nodes[l.ends[1].node.0];
            if a.is_anchor() && b.is_anchor() {
                return Err(structure!("line {} joins two anchors", l.id.0));
            }
        }

        Ok(Self {
            spec,
            nodes,
            lines,
            physical_dim,
            meta,
            line_at: line_at_full,
        })
    }

    pub fn node(&self, id: NodeId) -> &TensorNode {
        &self.nodes[id.0]
    }

    pub fn line(&self, id: LineId) -> &ContractionLine {
        &self.lines[id.0]
    }

    /// The line contracted with a given slot.
    pub fn line_at(&self, port: Port) -> LineId {
        self.line_at[port.node.0][port.slot]
    }

    pub fn anchors(&self) -> impl Iterator<Item = &TensorNode> {
        self.nodes.iter().filter(|n| n.is_anchor())
    }

    pub fn is_numeric(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| n.is_anchor() || n.elements.is_some())
    }

    pub fn max_layer(&self) -> usize {
        self.nodes.iter().map(|n| n.layer).max().unwrap_or(0)
    }

    /// Cell of a node mapped onto the layer-`tau` lattice (`tau >= layer`).
    pub fn cell_in_layer(&self, node: &TensorNode, tau: usize) -> Vec<usize> {
        let stride = self.spec.branching.pow((tau - node.layer.min(tau)) as u32);
        node.cell.iter().map(|&c| c / stride).collect()
    }
}

/// A violated MERA precondition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Condition 1: `L = b^T`.
    SizeNotPower {
        size: usize,
        branching: usize,
        layers: usize,
    },
    /// Condition 2: every tensor sits in a layer `0..=T`.
    LayerOutOfRange { node: NodeId, layer: usize },
    /// Condition 3: index dimension bounded by `chi`.
    LineDimension {
        line: LineId,
        dim: usize,
        bound: usize,
    },
    /// Condition 3: tensor order bounded by `C_o`.
    TensorOrder {
        node: NodeId,
        order: usize,
        bound: usize,
    },
    /// Condition 5a: tensors per cell bounded by `C_t`.
    CellOverfull {
        layer: usize,
        cell: Vec<usize>,
        nodes: Vec<NodeId>,
        bound: usize,
    },
    /// Condition 5b: contracted tensors within L1 cell distance `C_r`.
    CellDistance {
        line: LineId,
        distance: usize,
        bound: usize,
    },
    /// Condition 6: contracted tensors within `C_T` layers.
    LayerGap {
        line: LineId,
        gap: usize,
        bound: usize,
    },
}

impl Violation {
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::SizeNotPower { .. } => "1",
            Violation::LayerOutOfRange { .. } => "2",
            Violation::LineDimension { .. } | Violation::TensorOrder { .. } => "3",
            Violation::CellOverfull { .. } => "5a",
            Violation::CellDistance { .. } => "5b",
            Violation::LayerGap { .. } => "6",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreconditionReport {
    pub violations: Vec<Violation>,
}

impl PreconditionReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, condition: &str) -> bool {
        self.violations.iter().any(|v| v.condition() == condition)
    }
}

/// Checks the six MERA preconditions against `tns.meta`. Violations are
/// collected, never raised.
pub fn validate_preconditions(tns: &Tns) -> PreconditionReport {
    let meta = &tns.meta;
    let spec = &tns.spec;
    let mut violations = Vec::new();

    if !spec.is_mera_host() || spec.branching != meta.branching {
        violations.push(Violation::SizeNotPower {
            size: spec.size,
            branching: meta.branching,
            layers: spec.layers,
        });
    }
    for n in &tns.nodes {
        if n.layer > spec.layers {
            violations.push(Violation::LayerOutOfRange {
                node: n.id,
                layer: n.layer,
            });
        }
        if n.order() > meta.max_order {
            violations.push(Violation::TensorOrder {
                node: n.id,
                order: n.order(),
                bound: meta.max_order,
            });
        }
    }
    for l in &tns.lines {
        if l.dim > meta.chi {
            violations.push(Violation::LineDimension {
                line: l.id,
                dim: l.dim,
                bound: meta.chi,
            });
        }
    }

    let mut per_cell: BTreeMap<(usize, &[usize]), Vec<NodeId>> = BTreeMap::new();
    for n in tns.nodes.iter().filter(|n| n.layer >= 1) {
        per_cell
            .entry((n.layer, n.cell.as_slice()))
            .or_default()
            .push(n.id);
    }
    for ((layer, cell), nodes) in per_cell {
        if nodes.len() > meta.max_per_cell {
            violations.push(Violation::CellOverfull {
                layer,
                cell: cell.to_vec(),
                nodes,
                bound: meta.max_per_cell,
            });
        }
    }

    for l in &tns.lines {
        let a = tns.node(l.ends[0].node);
        let b = tns.node(l.ends[1].node);
        let gap = a.layer.abs_diff(b.layer);
        if gap > meta.max_layer_gap {
            violations.push(Violation::LayerGap {
                line: l.id,
                gap,
                bound: meta.max_layer_gap,
            });
        }
        let top = a.layer.max(b.layer);
        let ca = tns.cell_in_layer(a, top);
        let cb = tns.cell_in_layer(b, top);
        let distance: usize = ca.iter().zip(&cb).map(|(x, y)| x.abs_diff(*y)).sum();
        if distance > meta.max_cell_distance {
            violations.push(Violation::CellDistance {
                line: l.id,
                distance,
                bound: meta.max_cell_distance,
            });
        }
    }

    PreconditionReport { violations }
}

/// Smallest constants that the network actually satisfies.
pub fn measure_meta(tns: &Tns) -> MeraMeta {
    let mut per_cell: BTreeMap<(usize, &[usize]), usize> = BTreeMap::new();
    for n in tns.nodes.iter().filter(|n| n.layer >= 1) {
        *per_cell.entry((n.layer, n.cell.as_slice())).or_default() += 1;
    }
    let mut max_gap = 0;
    let mut max_dist = 0;
    for l in &tns.lines {
        let a = tns.node(l.ends[0].node);
        let b = tns.node(l.ends[1].node);
        max_gap = max_gap.max(a.layer.abs_diff(b.layer));
        let top = a.layer.max(b.layer);
        let d: usize = tns
            .cell_in_layer(a, top)
            .iter()
            .zip(&tns.cell_in_layer(b, top))
            .map(|(x, y)| x.abs_diff(*y))
            .sum();
        max_dist = max_dist.max(d);
    }
    MeraMeta {
        branching: tns.spec.branching,
        chi: tns.lines.iter().map(|l| l.dim).max().unwrap_or(1),
        max_order: tns.nodes.iter().map(|n| n.order()).max().unwrap_or(0),
        max_per_cell: per_cell.values().copied().max().unwrap_or(0),
        max_cell_distance: max_dist,
        max_layer_gap: max_gap,
    }
}
