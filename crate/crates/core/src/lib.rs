//! Tensor-network states on hypercubic lattices.
//!
//! - [`lattice`]: sites, edges, b-adic sublattices and edge grids.
//! - [`tns`] and [`builders`]: the network data model and concrete MERA/TTN
//!   constructions.
//! - [`mapping`]: placing tensors on lattice sites, routing contraction lines
//!   along edges, congestion, and PEPS assembly.
//! - [`dense`]: exact contraction to amplitude vectors, reduced density
//!   operators and entropies.
//! - [`stabilizer`]: tableau simulation of the Clifford constructions.
//! - [`qca`]: entangled-pair tracking for the swap automaton.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod builders;
pub mod dense;
pub mod error;
pub mod lattice;
pub mod mapping;
mod numeric;
pub mod qca;
pub mod stabilizer;
pub mod tns;

pub use error::{Error, Result};

/// Default cap on the number of amplitudes in any dense tensor.
pub const DEFAULT_MAX_AMPLITUDES: usize = 1 << 26;
