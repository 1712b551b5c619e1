//! Hypercubic lattice geometry.
//!
//! Sites live in `{0, ..., L-1}^D`. The multi-scale sublattices `V_tau` and the
//! edge grids `E_tau` are derived from the b-adic valuation of the site
//! coordinates: a site belongs to `V_tau` when every coordinate has valuation
//! exactly `tau - 1` (and lies on the layer-`tau` cell lattice), and an edge
//! along axis `i` belongs to `E_tau` when every other coordinate of its base
//! site has valuation exactly `tau - 1`.
//!
//! Coordinate `0` has infinite valuation, so the grid lines through the origin
//! belong to no `E_tau`. This keeps the grids pairwise disjoint; placements
//! never put tensors on coordinate `0` so no routed path needs those lines.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Shape of a `D`-dimensional hypercubic lattice with linear size `L`.
///
/// When the lattice hosts a MERA, `size == branching^layers`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dim: usize,
    pub size: usize,
    pub branching: usize,
    pub layers: usize,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(
        dim: usize,
        size: usize,
        branching: usize,
        layers: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("lattice dimension must be positive"));
        }
        if size == 0 {
            return Err(invalid!("lattice size must be positive"));
        }
        if branching < 2 {
            return Err(invalid!(
                "branching ratio must be at least 2, got {branching}"
            ));
        }
        Ok(Self {
            dim,
            size,
            branching,
            layers,
            boundary,
        })
    }

    /// Open-boundary host lattice of a MERA with `layers` layers: `L = b^T`.
    pub fn mera(dim: usize, branching: usize, layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(invalid!("a MERA needs at least one layer"));
        }
        let size = checked_pow(branching, layers)?;
        Self::new(dim, size, branching, layers, Boundary::Open)
    }

    /// `true` when `L = b^T`.
    pub fn is_mera_host(&self) -> bool {
        checked_pow(self.branching, self.layers)
            .map(|p| p == self.size)
            .unwrap_or(false)
    }

    pub fn num_sites(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    /// Linear size of the layer-`tau` cell lattice, `L / b^tau`.
    pub fn cells_per_axis(&self, tau: usize) -> usize {
        self.size / self.branching.pow(tau as u32)
    }

    pub fn contains(&self, site: &Site) -> bool {
        site.dim() == self.dim && site.coords().iter().all(|&c| c < self.size)
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        grid_points(self.dim, self.size).map(Site::new)
    }

    /// Lexicographic index of a site (first coordinate most significant).
    pub fn linear_index(&self, site: &Site) -> usize {
        site.coords().iter().fold(0, |acc, &c| acc * self.size + c)
    }

    pub fn site_at(&self, mut index: usize) -> Site {
        let mut coords = alloc::vec![0; self.dim];
        for c in coords.iter_mut().rev() {
            *c = index % self.size;
            index /= self.size;
        }
        Site::new(coords)
    }

    /// Neighbor of `site` one step along `axis`, honoring the boundary.
    pub fn step(&self, site: &Site, axis: usize, forward: bool) -> Option<Site> {
        let c = site.coords()[axis];
        let next = match (forward, self.boundary) {
            (true, _) if c + 1 < self.size => c + 1,
            (true, Boundary::Periodic) => 0,
            (false, _) if c > 0 => c - 1,
            (false, Boundary::Periodic) => self.size - 1,
            _ => return None,
        };
        let mut coords = site.coords().to_vec();
        coords[axis] = next;
        Some(Site::new(coords))
    }

    /// All nearest-neighbor edges, canonical order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for site in self.sites() {
            for axis in 0..self.dim {
                if self.step(&site, axis, true).is_some() {
                    out.push(Edge {
                        base: site.clone(),
                        axis,
                    });
                }
            }
        }
        out
    }
}

/// A lattice site.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Site(Vec<usize>);

impl Site {
    pub fn new(coords: Vec<usize>) -> Self {
        Site(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Site(alloc::vec![0; dim])
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1_distance(&self, other: &Site) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.abs_diff(b))
            .sum()
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for Site {
    fn from(v: Vec<usize>) -> Self {
        Site(v)
    }
}

/// A nearest-neighbor edge `(base, base + e_axis)`; for periodic lattices the
/// second endpoint wraps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub base: Site,
    pub axis: usize,
}

impl Edge {
    /// The edge joining two neighboring sites, in canonical orientation.
    pub fn between(spec: &LatticeSpec, a: &Site, b: &Site) -> Option<Edge> {
        for axis in 0..spec.dim {
            if spec.step(a, axis, true).as_ref() == Some(b) {
                return Some(Edge {
                    base: a.clone(),
                    axis,
                });
            }
            if spec.step(b, axis, true).as_ref() == Some(a) {
                return Some(Edge {
                    base: b.clone(),
                    axis,
                });
            }
        }
        None
    }

    pub fn endpoints(&self, spec: &LatticeSpec) -> (Site, Site) {
        let far = spec
            .step(&self.base, self.axis, true)
            .expect("edge base must have a forward neighbor");
        (self.base.clone(), far)
    }
}

/// b-adic valuation; the origin carries the top value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn is(self, v: usize) -> bool {
        self == Valuation::Finite(v as u32)
    }
}

/// Largest `tau` with `n mod b^tau == 0`.
pub fn b_adic_valuation(n: u64, b: u64) -> Result<Valuation> {
    if b < 2 {
        return Err(invalid!("valuation base must be at least 2, got {b}"));
    }
    if n == 0 {
        return Ok(Valuation::Infinite);
    }
    let mut n = n;
    let mut v = 0;
    while n.is_multiple_of(b) {
        n /= b;
        v += 1;
    }
    Ok(Valuation::Finite(v))
}

pub(crate) fn valuation(n: usize, b: usize) -> Valuation {
    b_adic_valuation(n as u64, b as u64).expect("branching >= 2 checked by LatticeSpec")
}

fn check_layer(spec: &LatticeSpec, tau: usize) -> Result<()> {
    if tau == 0 || tau > spec.layers {
        return Err(invalid!("layer index {tau} outside [1, {}]", spec.layers));
    }
    if !spec.size.is_multiple_of(spec.branching.pow(tau as u32)) {
        return Err(invalid!(
            "lattice size {} is not divisible by b^{tau}",
            spec.size
        ));
    }
    Ok(())
}

/// `V_tau = { b^tau n + b^(tau-1) e : n in L_tau }`, lexicographic order.
pub fn sublattice_sites(spec: &LatticeSpec, tau: usize) -> Result<Vec<Site>> {
    check_layer(spec, tau)?;
    let stride = spec.branching.pow(tau as u32);
    let shift = stride / spec.branching;
    Ok(grid_points(spec.dim, spec.cells_per_axis(tau))
        .map(|n| Site::new(n.into_iter().map(|c| c * stride + shift).collect()))
        .collect())
}

/// Membership test for `E_tau`.
pub fn in_grid(spec: &LatticeSpec, edge: &Edge, tau: usize) -> bool {
    if spec.dim == 1 {
        return true;
    }
    if tau == 0 {
        return false;
    }
    edge.base
        .coords()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != edge.axis)
        .all(|(_, &c)| valuation(c, spec.branching).is(tau - 1))
}

/// `E_tau = {(r, r + e_i) : v_b(r_j) = tau - 1 for all j != i}`. For `D = 1`
/// the constraint is empty and every grid equals the full edge set.
pub fn grid_edges(spec: &LatticeSpec, tau: usize) -> Result<Vec<Edge>> {
    check_layer(spec, tau)?;
    Ok(spec
        .edges()
        .into_iter()
        .filter(|e| in_grid(spec, e, tau))
        .collect())
}

/// Cell of the layer-`tau` lattice containing `site`.
pub fn cell_of(site: &Site, tau: usize, spec: &LatticeSpec) -> Vec<usize> {
    let stride = spec.branching.pow(tau as u32);
    site.coords().iter().map(|&c| c / stride).collect()
}

/// Row-major enumeration of `{0, ..., extent-1}^dim`.
pub fn grid_points(dim: usize, extent: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if extent == 0 {
        0
    } else {
        extent.pow(dim as u32)
    };
    (0..total).map(move |mut idx| {
        let mut p = alloc::vec![0; dim];
        for c in p.iter_mut().rev() {
            *c = idx % extent;
            idx /= extent;
        }
        p
    })
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| invalid!("{base}^{exp} overflows"))
}
