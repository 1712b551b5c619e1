use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::lattice::{Boundary, LatticeSpec, Site};
use crate::tns::{NodeId, TensorKind, Tns};

/// Offsets `m` inside a cell for each tensor kind on a refined lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedOffsets {
    /// Keyed by [`TensorKind::key`].
    pub by_kind: BTreeMap<String, Vec<usize>>,
    /// Where inside its block of refined sites a physical site keeps its
    /// physical index.
    pub anchor: Vec<usize>,
}

impl RefinedOffsets {
    /// Isometries at `m = (1,1)`, disentanglers and the top at `m = (0,0)`.
    pub fn mera_2d_b2() -> Self {
        let mut by_kind = BTreeMap::new();
        by_kind.insert("isometry".into(), alloc::vec![1, 1]);
        by_kind.insert("disentangler-2x2".into(), alloc::vec![0, 0]);
        by_kind.insert("top".into(), alloc::vec![0, 0]);
        Self {
            by_kind,
            anchor: alloc::vec![1, 1],
        }
    }

    /// Isometries at `(1,1)`, 2x2 disentanglers at `(0,0)`, top at `(0,0)`.
    /// A disentangler spanning two sites along axis 1 (key `1x2`) sits on
    /// the lower boundary of its cell along that axis, at `(1,0)`; the `2x1`
    /// one at `(0,1)`.
    pub fn mera_2d_b3() -> Self {
        let mut by_kind = BTreeMap::new();
        by_kind.insert("isometry".into(), alloc::vec![1, 1]);
        by_kind.insert("disentangler-2x2".into(), alloc::vec![0, 0]);
        by_kind.insert("disentangler-1x2".into(), alloc::vec![1, 0]);
        by_kind.insert("disentangler-2x1".into(), alloc::vec![0, 1]);
        by_kind.insert("top".into(), alloc::vec![0, 0]);
        Self {
            by_kind,
            anchor: alloc::vec![1, 1],
        }
    }

    /// All offsets zero; with no refinement this reproduces the shifted scheme.
    pub fn zero(dim: usize, tns: &Tns) -> Self {
        let by_kind = tns
            .nodes
            .iter()
            .map(|n| (n.kind.key(), alloc::vec![0; dim]))
            .collect();
        Self {
            by_kind,
            anchor: alloc::vec![0; dim],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheme {
    /// Cell `n` of layer `tau` at `b^tau n`.
    Naive,
    /// Cell `n` of layer `tau` at `b^tau n + b^(tau-1) e`.
    Shifted,
    /// Cell `n` of layer `tau` at `b^(tau+dt) n + b^tau m + b^(tau-1) e` on a
    /// lattice refined by `b^dt` per axis.
    Refined {
        refinement: usize,
        offsets: RefinedOffsets,
    },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Naive => "naive",
            Scheme::Shifted => "shifted",
            Scheme::Refined { .. } => "refined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Lattice the tensors are placed on; refined lattices have
    /// `b^refinement` sites per physical site and axis.
    pub lattice: LatticeSpec,
    pub refinement: usize,
    pub scheme: Scheme,
    /// Host site of each node, indexed by node id.
    pub site_of: Vec<Site>,
}

impl Placement {
    pub fn site(&self, id: NodeId) -> &Site {
        &self.site_of[id.0]
    }

    /// Physical site whose block contains a refined-lattice site.
    pub fn physical_site(&self, site: &Site) -> Site {
        let f = self.lattice.branching.pow(self.refinement as u32);
        Site::new(site.coords().iter().map(|c| c / f).collect())
    }
}

/// Lattice refined by `b^refinement` per axis.
pub fn refined_lattice(spec: &LatticeSpec, refinement: usize) -> Result<LatticeSpec> {
    let f = crate::lattice::checked_pow(spec.branching, refinement)?;
    let size = spec
        .size
        .checked_mul(f)
        .ok_or_else(|| invalid!("refined lattice size overflows"))?;
    LatticeSpec::new(
        spec.dim,
        size,
        spec.branching,
        spec.layers + refinement,
        Boundary::Open,
    )
}

pub fn place_naive(tns: &Tns) -> Placement {
    let b = tns.spec.branching;
    let site_of = tns
        .nodes
        .iter()
        .map(|n| {
            let stride = b.pow(n.layer as u32);
            Site::new(n.cell.iter().map(|c| c * stride).collect())
        })
        .collect();
    Placement {
        lattice: tns.spec.clone(),
        refinement: 0,
        scheme: Scheme::Naive,
        site_of,
    }
}

pub fn place_shifted(tns: &Tns) -> Placement {
    let b = tns.spec.branching;
    let site_of = tns
        .nodes
        .iter()
        .map(|n| {
            if n.layer == 0 {
                return Site::new(n.cell.clone());
            }
            let stride = b.pow(n.layer as u32);
            let shift = stride / b;
            Site::new(n.cell.iter().map(|c| c * stride + shift).collect())
        })
        .collect();
    Placement {
        lattice: tns.spec.clone(),
        refinement: 0,
        scheme: Scheme::Shifted,
        site_of,
    }
}

pub fn place_refined(tns: &Tns, refinement: usize, offsets: &RefinedOffsets) -> Result<Placement> {
    let b = tns.spec.branching;
    let dim = tns.spec.dim;
    let f = crate::lattice::checked_pow(b, refinement)?;
    let lattice = refined_lattice(&tns.spec, refinement)?;
    let check = |m: &[usize], what: &str| -> Result<()> {
        if m.len() != dim || m.iter().any(|&x| x >= f) {
            return Err(invalid!(
                "offset {m:?} for {what} must lie in {{0..{}}}^{dim}",
                f - 1
            ));
        }
        Ok(())
    };
    check(&offsets.anchor, "physical anchors")?;
    for (k, m) in &offsets.by_kind {
        check(m, k)?;
    }
    let mut site_of = Vec::with_capacity(tns.nodes.len());
    for n in &tns.nodes {
        if n.layer == 0 {
            site_of.push(Site::new(
                n.cell
                    .iter()
                    .zip(&offsets.anchor)
                    .map(|(c, m)| c * f + m)
                    .collect(),
            ));
            continue;
        }
        let key = n.kind.key();
        let m = offsets
            .by_kind
            .get(&key)
            .ok_or_else(|| invalid!("no refined offset given for tensor kind {key}"))?;
        let unit = b.pow(n.layer as u32);
        site_of.push(Site::new(
            n.cell
                .iter()
                .zip(m)
                .map(|(c, m)| c * unit * f + unit * m + unit / b)
                .collect(),
        ));
    }
    let scheme = Scheme::Refined {
        refinement,
        offsets: offsets.clone(),
    };
    Ok(Placement {
        lattice,
        refinement,
        scheme,
        site_of,
    })
}

/// Per-site tensor counts, anchors excluded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stacks {
    pub counts: BTreeMap<Site, usize>,
    pub max_height: usize,
}

impl Stacks {
    pub fn height_at(&self, site: &Site) -> usize {
        self.counts.get(site).copied().unwrap_or(0)
    }
}

pub fn detect_stacks(tns: &Tns, p: &Placement) -> Stacks {
    let mut counts: BTreeMap<Site, usize> = BTreeMap::new();
    for n in tns
        .nodes
        .iter()
        .filter(|n| n.kind != TensorKind::PhysicalAnchor)
    {
        *counts.entry(p.site(n.id).clone()).or_default() += 1;
    }
    let max_height = counts.values().copied().max().unwrap_or(0);
    Stacks { counts, max_height }
}
