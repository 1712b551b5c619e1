use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::lattice::Edge;
use crate::tns::{ContractionLine, LineId, MeraMeta, Tns};

use super::routing::PathAssignment;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeLoad {
    /// Lines traversing the edge, in line order.
    pub lines: Vec<LineId>,
    /// How many of `lines` end at a physical anchor.
    pub physical: usize,
    /// Product of the traversing lines' dimensions, saturating.
    pub bond_dim: u128,
}

impl EdgeLoad {
    pub fn paths(&self) -> usize {
        self.lines.len()
    }

    /// Lines between two TNS tensors, physical legs left out.
    pub fn internal(&self) -> usize {
        self.lines.len() - self.physical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Congestion {
    /// Loaded edges only; every other edge has bond dimension 1.
    pub edges: BTreeMap<Edge, EdgeLoad>,
    pub max_paths: usize,
    /// Maximum of [`EdgeLoad::internal`].
    pub max_internal_paths: usize,
    pub chi_peps: u128,
    /// `log(chi_peps) / log(chi)` for the network's `chi`.
    pub log_chi: f64,
}

impl Congestion {
    pub fn load(&self, edge: &Edge) -> Option<&EdgeLoad> {
        self.edges.get(edge)
    }
}

/// Per-edge congestion of routed lines.
pub fn measured_chi(tns: &Tns, paths: &PathAssignment) -> Congestion {
    measured_chi_where(tns, paths, |_| true)
}

/// Congestion counting only the lines accepted by `keep`.
pub fn measured_chi_where(
    tns: &Tns,
    paths: &PathAssignment,
    keep: impl Fn(&ContractionLine) -> bool,
) -> Congestion {
    let mut edges: BTreeMap<Edge, EdgeLoad> = BTreeMap::new();
    for (line, path) in tns.lines.iter().zip(&paths.paths).filter(|(l, _)| keep(l)) {
        let physical = line.ends.iter().any(|p| tns.node(p.node).is_anchor());
        let mut seen: Vec<Edge> = Vec::new();
        for e in path.edges(&paths.lattice) {
            assert!(
                !seen.contains(&e),
                "line {} traverses an edge twice",
                line.id.0
            );
            seen.push(e.clone());
            let load = edges.entry(e).or_insert(EdgeLoad {
                lines: Vec::new(),
                physical: 0,
                bond_dim: 1,
            });
            load.lines.push(line.id);
            load.physical += usize::from(physical);
            load.bond_dim = load.bond_dim.saturating_mul(line.dim as u128);
        }
    }
    let max_paths = edges.values().map(EdgeLoad::paths).max().unwrap_or(0);
    let max_internal_paths = edges.values().map(EdgeLoad::internal).max().unwrap_or(0);
    let chi_peps = edges.values().map(|l| l.bond_dim).max().unwrap_or(1);
    let chi = tns.meta.chi.max(2) as f64;
    let log_chi = libm::log(chi_peps as f64) / libm::log(chi);
    Congestion {
        edges,
        max_paths,
        max_internal_paths,
        chi_peps,
        log_chi,
    }
}

/// `(2 C_r)^D (C_T + b^(D (C_T + 1))) C_t C_o`, an upper bound on
/// `log_chi chi_peps` for the shifted scheme. Saturates at `u128::MAX`.
pub fn chi_bound(meta: &MeraMeta, dim: usize) -> u128 {
    let d = dim as u32;
    let b = meta.branching as u128;
    let reach = (2 * meta.max_cell_distance as u128).saturating_pow(d);
    let exp = (meta.max_layer_gap as u32)
        .saturating_add(1)
        .saturating_mul(d);
    let span = (meta.max_layer_gap as u128).saturating_add(b.saturating_pow(exp));
    reach
        .saturating_mul(span)
        .saturating_mul(meta.max_per_cell as u128)
        .saturating_mul(meta.max_order as u128)
}

/// `sum_{tau=0}^{T} b^(-(D-1) tau)`: the average number of line paths per
/// unit cell, up to a constant.
pub fn line_density_estimate(dim: usize, branching: usize, layers: usize) -> f64 {
    let ratio = libm::pow(branching as f64, -(dim as f64 - 1.0));
    (0..=layers).map(|tau| libm::pow(ratio, tau as f64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn meta(b: usize, chi: usize, co: usize, ct: usize, cr: usize, ctt: usize) -> MeraMeta {
        MeraMeta {
            branching: b,
            chi,
            max_order: co,
            max_per_cell: ct,
            max_cell_distance: cr,
            max_layer_gap: ctt,
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(chi_bound(&meta(2, 2, 8, 2, 2, 1), 2), 4352);
        assert_eq!(chi_bound(&meta(2, 2, 1, 1, 1, 0), 2), 16);
    }

    #[test]
    fn density() {
        assert!((line_density_estimate(1, 2, 5) - 6.0).abs() < 1e-12);
        assert!((line_density_estimate(2, 2, 60) - 2.0).abs() < 1e-12);
        assert!((line_density_estimate(3, 2, 60) - 4.0 / 3.0).abs() < 1e-12);
        assert!(line_density_estimate(2, 2, 5) < 2.0);
    }

    proptest! {
        #[test]
        fn bound_monotone(
            b in 2usize..5, co in 1usize..10, ct in 1usize..10, cr in 1usize..5, ctt in 0usize..3, d in 1usize..4,
            which in 0usize..5,
        ) {
            let base = meta(b, 2, co, ct, cr, ctt);
            let mut up = base;
            match which {
                0 => up.branching += 1,
                1 => up.max_order += 1,
                2 => up.max_per_cell += 1,
                3 => up.max_cell_distance += 1,
                _ => up.max_layer_gap += 1,
            }
            prop_assert!(chi_bound(&up, d) >= chi_bound(&base, d));
            prop_assert!(chi_bound(&base, d + 1) >= chi_bound(&base, d));
        }
    }
}
