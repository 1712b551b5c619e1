use alloc::vec::Vec;

use crate::error::{structure, Result};
use crate::lattice::{in_grid, Edge, LatticeSpec, Site};
use crate::tns::{LineId, Tns};

use super::placement::{Placement, Scheme};

/// Lattice path of one contraction line, as the sequence of visited sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    /// Which end of the line the path starts at (0 or 1).
    pub start: usize,
    pub sites: Vec<Site>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.sites.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self, lattice: &LatticeSpec) -> Vec<Edge> {
        self.sites
            .windows(2)
            .map(|w| {
                Edge::between(lattice, &w[0], &w[1]).expect("consecutive path sites are neighbors")
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAssignment {
    pub lattice: LatticeSpec,
    /// Indexed by line id.
    pub paths: Vec<Path>,
    /// Set when the grid restriction could not be applied (`D = 1`, naive
    /// placement, or `D >= 3`) and lines were routed axis by axis on the full
    /// edge set.
    pub unrestricted: bool,
}

impl PathAssignment {
    pub fn path(&self, id: LineId) -> &Path {
        &self.paths[id.0]
    }
}

/// Walks from `from` to `to` changing coordinates in the given axis order.
fn axis_walk(from: &Site, to: &Site, axes: impl Iterator<Item = usize>, out: &mut Vec<Site>) {
    let mut cur = from.coords().to_vec();
    for axis in axes {
        while cur[axis] != to.coords()[axis] {
            if cur[axis] < to.coords()[axis] {
                cur[axis] += 1;
            } else {
                cur[axis] -= 1;
            }
            out.push(Site::new(cur.clone()));
        }
    }
}

/// Routes every line of `tns` on the placement's lattice.
///
/// Each path starts at the host of the lower-layer end and walks the axes
/// from last to first. With `D = 2` and a shifted or refined placement the
/// first leg keeps `s_0` fixed and runs along the lower layer's grid, the
/// second keeps `t_1` fixed and runs along the upper layer's grid; the
/// junction is `(s_0, t_1)` and the path is L1-shortest. Lines touching
/// physical anchors and all other cases use the same axis order on the full
/// edge set.
pub fn route_lines(tns: &Tns, p: &Placement) -> Result<PathAssignment> {
    let dim = p.lattice.dim;
    let grid_scheme = matches!(p.scheme, Scheme::Shifted | Scheme::Refined { .. });
    let mut paths = Vec::with_capacity(tns.lines.len());
    for line in &tns.lines {
        let a = tns.node(line.ends[0].node);
        let b = tns.node(line.ends[1].node);
        let start = usize::from(b.layer < a.layer);
        let (lo, hi) = if start == 0 { (a, b) } else { (b, a) };
        let s = p.site(lo.id);
        let t = p.site(hi.id);
        let mut sites = alloc::vec![s.clone()];
        axis_walk(s, t, (0..dim).rev(), &mut sites);
        if grid_scheme && dim == 2 && !lo.is_anchor() {
            let path = Path {
                start,
                sites: sites.clone(),
            };
            for e in path.edges(&p.lattice) {
                if !in_grid(&p.lattice, &e, lo.layer) && !in_grid(&p.lattice, &e, hi.layer) {
                    return Err(structure!(
                        "line {} leaves the grids of layers {} and {} at {e:?}; the placement is not on the sublattices",
                        line.id.0,
                        lo.layer,
                        hi.layer
                    ));
                }
            }
        }
        paths.push(Path { start, sites });
    }
    let unrestricted = dim != 2 || !grid_scheme;
    Ok(PathAssignment {
        lattice: p.lattice.clone(),
        paths,
        unrestricted,
    })
}

/// Checks that every path is a connected nearest-neighbor walk between the
/// hosts of its line's two ends and never reuses an edge.
pub fn validate_paths(tns: &Tns, p: &Placement, paths: &PathAssignment) -> Result<()> {
    if paths.paths.len() != tns.lines.len() {
        return Err(structure!(
            "{} paths for {} lines",
            paths.paths.len(),
            tns.lines.len()
        ));
    }
    if paths.lattice != p.lattice {
        return Err(structure!("paths and placement use different lattices"));
    }
    if p.site_of.len() != tns.nodes.len() {
        return Err(structure!(
            "{} placed nodes for {} nodes",
            p.site_of.len(),
            tns.nodes.len()
        ));
    }
    for s in &p.site_of {
        if !p.lattice.contains(s) {
            return Err(structure!("node placed outside the lattice at {s}"));
        }
    }
    for (line, path) in tns.lines.iter().zip(&paths.paths) {
        if path.start > 1 || path.sites.is_empty() {
            return Err(structure!("line {} has a malformed path", line.id.0));
        }
        let from = p.site(line.ends[path.start].node);
        let to = p.site(line.ends[1 - path.start].node);
        if path.sites.first() != Some(from) || path.sites.last() != Some(to) {
            return Err(structure!(
                "path of line {} does not join its tensors' sites",
                line.id.0
            ));
        }
        let mut seen = Vec::new();
        for w in path.sites.windows(2) {
            if !p.lattice.contains(&w[1]) {
                return Err(structure!("path of line {} leaves the lattice", line.id.0));
            }
            let e = Edge::between(&p.lattice, &w[0], &w[1]).ok_or_else(|| {
                structure!("path of line {} jumps from {} to {}", line.id.0, w[0], w[1])
            })?;
            if seen.contains(&e) {
                return Err(structure!(
                    "path of line {} traverses {e:?} twice",
                    line.id.0
                ));
            }
            seen.push(e);
        }
    }
    Ok(())
}

/// Lines whose routed edges are outside `E_tau ∪ E_tau'` of their two layers.
/// Lines touching anchors are exempt.
pub fn grid_violations(tns: &Tns, paths: &PathAssignment) -> Vec<LineId> {
    let lattice = &paths.lattice;
    tns.lines
        .iter()
        .zip(&paths.paths)
        .filter(|(line, path)| {
            let a = tns.node(line.ends[0].node);
            let b = tns.node(line.ends[1].node);
            if a.is_anchor() || b.is_anchor() {
                return false;
            }
            path.edges(lattice)
                .iter()
                .any(|e| !in_grid(lattice, e, a.layer) && !in_grid(lattice, e, b.layer))
        })
        .map(|(line, _)| line.id)
        .collect()
}
