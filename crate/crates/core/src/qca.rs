//! Entangled-pair tracking for the swap automaton.
//!
//! Each layer of diagonal plaquette swaps moves both ends of every pair two
//! sites outward along each axis. Endpoints are tracked unwrapped and reduced
//! modulo `L` on demand.

use alloc::vec::Vec;

use crate::error::{invalid, structure, Result};
use crate::lattice::grid_points;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    pub dim: usize,
    pub size: usize,
    /// Unwrapped endpoint coordinates.
    pub pairs: Vec<(Vec<i64>, Vec<i64>)>,
}

/// One layer of the displacement rule `r ± (1 + 2 sqrt(D) / |dr|) dr` for a
/// pair `r ± dr`. Valid pairs lie on lattice diagonals, where the rule moves
/// each endpoint by 2 along every axis.
pub fn step_pair(a: &[i64], b: &[i64]) -> Result<(Vec<i64>, Vec<i64>)> {
    if a.len() != b.len() || a.is_empty() {
        return Err(invalid!("endpoints must have the same positive dimension"));
    }
    let h = (b[0] - a[0]).abs();
    if h == 0 || a.iter().zip(b).any(|(x, y)| (y - x).abs() != h) {
        return Err(structure!(
            "pair {a:?}, {b:?} does not lie on a lattice diagonal"
        ));
    }
    let na = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - 2 * (y - x).signum())
        .collect();
    let nb = a
        .iter()
        .zip(b)
        .map(|(x, y)| y + 2 * (y - x).signum())
        .collect();
    Ok((na, nb))
}

impl PairSet {
    /// Pairs across the diagonals of the odd-offset plaquettes, antipodal
    /// corners paired.
    pub fn initial(dim: usize, size: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid!("dimension must be positive"));
        }
        if size < 2 || !size.is_multiple_of(2) {
            return Err(invalid!(
                "the automaton needs an even side length, got {size}"
            ));
        }
        let mut pairs = Vec::new();
        for origin in grid_points(dim, size / 2) {
            for corner in grid_points(dim, 2).filter(|c| c[0] == 0) {
                let at = |flip: bool| {
                    origin
                        .iter()
                        .zip(&corner)
                        .map(|(&o, &c)| (2 * o + 1 + if flip { 1 - c } else { c }) as i64)
                        .collect::<Vec<_>>()
                };
                pairs.push((at(false), at(true)));
            }
        }
        Ok(Self { dim, size, pairs })
    }

    pub fn step(&self) -> Result<Self> {
        let pairs = self
            .pairs
            .iter()
            .map(|(a, b)| step_pair(a, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim: self.dim,
            size: self.size,
            pairs,
        })
    }

    pub fn after(&self, layers: usize) -> Result<Self> {
        let mut p = self.clone();
        for _ in 0..layers {
            p = p.step()?;
        }
        Ok(p)
    }

    /// Lexicographic index of the wrapped site, first coordinate most
    /// significant.
    pub fn index(&self, r: &[i64]) -> usize {
        let l = self.size as i64;
        r.iter()
            .fold(0, |acc, &c| acc * self.size + c.rem_euclid(l) as usize)
    }

    pub fn wrapped(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .map(|(a, b)| (self.index(a), self.index(b)))
            .collect()
    }

    pub fn is_perfect_matching(&self) -> bool {
        let n = self.size.pow(self.dim as u32);
        let mut seen = alloc::vec![false; n];
        for (a, b) in self.wrapped() {
            for s in [a, b] {
                if core::mem::replace(&mut seen[s], true) {
                    return false;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Number of pairs with exactly one endpoint among the site indices `a`.
    pub fn entropy_across(&self, a: &[usize]) -> usize {
        let n = self.size.pow(self.dim as u32);
        let mut inside = alloc::vec![false; n];
        for &s in a {
            if s < n {
                inside[s] = true;
            }
        }
        self.wrapped()
            .into_iter()
            .filter(|&(x, y)| inside[x] != inside[y])
            .count()
    }
}

/// Sites with first coordinate below `L/2`.
pub fn half_cut(dim: usize, size: usize) -> Vec<usize> {
    let slab = size.pow(dim as u32 - 1);
    (0..size / 2 * slab).collect()
}

/// Cost figures in base-2 logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    /// `L^D`: storing the full state vector.
    pub log2_state_cost: f64,
    /// `2 T^D + log2 T`: evaluating a local observable.
    pub log2_local_obs_cost: f64,
}

impl CostEstimate {
    pub fn local_obs_cost(&self) -> f64 {
        libm::exp2(self.log2_local_obs_cost)
    }
}

/// Cost of the automaton state with `layers` rounds on `size^dim` sites;
/// `layers` may be fractional, as in `T = (log2 L)^(1/D)`.
pub fn cost_estimate(dim: usize, size: f64, layers: f64) -> CostEstimate {
    CostEstimate {
        log2_state_cost: libm::pow(size, dim as f64),
        log2_local_obs_cost: 2.0 * libm::pow(layers, dim as f64) + libm::log2(layers),
    }
}

/// `T = (log2 L)^(1/D)`, the depth keeping local observables polynomial.
pub fn polynomial_depth(dim: usize, size: f64) -> f64 {
    libm::pow(libm::log2(size), 1.0 / dim as f64)
}
