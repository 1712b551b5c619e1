//! Exact desk-scale contraction.
//!
//! Networks are contracted to full amplitude vectors with a greedy
//! smallest-intermediate pairwise order. Amplitudes are indexed with the
//! physical sites in lexicographic order, first site most significant.
//! Entropies are in bits.

mod eigen;
mod tensor;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, structure, Error, Result};
use crate::lattice::{Edge, Site};
use crate::mapping::Peps;
use crate::tns::Tns;

pub use eigen::hermitian_eigenvalues;
pub use tensor::{contract_network, ContractionOrder, DenseTensor, Label, Labeled};

/// Largest subsystem for [`reduced_density`], in amplitudes per side.
pub const MAX_SUBSYSTEM_DIM: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractOptions {
    pub max_amplitudes: usize,
    pub order: ContractionOrder,
}

impl Default for ContractOptions {
    fn default() -> Self {
        Self {
            max_amplitudes: crate::DEFAULT_MAX_AMPLITUDES,
            order: ContractionOrder::Greedy,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub sites: Vec<Site>,
    pub local_dim: usize,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn position(&self, site: &Site) -> Option<usize> {
        self.sites.iter().position(|s| s == site)
    }
}

fn guard(what: &'static str, needed: u128, limit: usize) -> Result<()> {
    if needed > limit as u128 {
        return Err(Error::ResourceLimit {
            what,
            needed,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// Contracts a numeric TNS. Anchors carry no elements; the line attached to
/// an anchor is the open physical index of its site.
pub fn contract_tns(tns: &Tns, opts: &ContractOptions) -> Result<StateVector> {
    let n = tns.spec.num_sites() as u32;
    guard(
        "state amplitudes",
        (tns.physical_dim as u128).saturating_pow(n),
        opts.max_amplitudes,
    )?;
    let mut tensors = Vec::new();
    for node in tns.nodes.iter().filter(|n| !n.is_anchor()) {
        let el = node.elements.as_ref().ok_or_else(|| {
            invalid!(
                "node {} has no elements; build the network in numeric mode",
                node.id.0
            )
        })?;
        let labels = (0..node.order())
            .map(|slot| {
                tns.line_at(crate::tns::Port {
                    node: node.id,
                    slot,
                })
                .0
            })
            .collect();
        tensors.push(Labeled::new(
            labels,
            DenseTensor::new(node.dims.clone(), el.clone())?,
        ));
    }
    let mut anchors: Vec<(Site, Label)> = tns
        .anchors()
        .map(|a| {
            (
                Site::new(a.cell.clone()),
                tns.line_at(crate::tns::Port {
                    node: a.id,
                    slot: 0,
                })
                .0,
            )
        })
        .collect();
    anchors.sort();
    let output: Vec<Label> = anchors.iter().map(|(_, l)| *l).collect();
    let t = contract_network(tensors, &output, opts.order, opts.max_amplitudes)?;
    Ok(StateVector {
        amplitudes: t.data,
        sites: anchors.into_iter().map(|(s, _)| s).collect(),
        local_dim: tns.physical_dim,
    })
}

/// Contracts a dense PEPS over all of its bonds.
pub fn contract_peps(peps: &Peps, opts: &ContractOptions) -> Result<StateVector> {
    let phys: Vec<&Site> = peps
        .sites
        .iter()
        .filter_map(|s| s.physical.as_ref())
        .collect();
    guard(
        "state amplitudes",
        (peps.physical_dim as u128).saturating_pow(phys.len() as u32),
        opts.max_amplitudes,
    )?;

    let edge_label: BTreeMap<&Edge, Label> =
        peps.bonds.keys().enumerate().map(|(i, e)| (e, i)).collect();
    let phys_base = edge_label.len();
    let mut outputs: Vec<(Site, Label)> = Vec::new();
    let mut tensors = Vec::new();
    for (i, ps) in peps.sites.iter().enumerate() {
        let t = ps
            .tensor
            .as_ref()
            .ok_or_else(|| invalid!("PEPS site {} has no dense tensor", ps.site))?;
        let mut labels = Vec::new();
        let mut dims = Vec::new();
        if let Some(p) = &ps.physical {
            labels.push(phys_base + i);
            outputs.push((p.clone(), phys_base + i));
            dims.push(t.dims[0]);
        } else if t.dims[0] != 1 {
            return Err(structure!(
                "auxiliary site {} has a physical index of dimension {}",
                ps.site,
                t.dims[0]
            ));
        }
        for axis in 0..peps.lattice.dim {
            for (k, forward) in [(1 + 2 * axis, false), (2 + 2 * axis, true)] {
                let neighbor = peps.lattice.step(&ps.site, axis, forward);
                match neighbor.and_then(|nb| Edge::between(&peps.lattice, &ps.site, &nb)) {
                    Some(e) => {
                        let l = *edge_label
                            .get(&e)
                            .ok_or_else(|| structure!("missing bond {e:?}"))?;
                        labels.push(l);
                        dims.push(t.dims[k]);
                    }
                    None if t.dims[k] == 1 => {}
                    None => {
                        return Err(structure!(
                            "boundary index of {} has dimension {}",
                            ps.site,
                            t.dims[k]
                        ))
                    }
                }
            }
        }
        // dropping unit-dimension boundary axes is a reshape
        let tensor = t.clone().reshape(dims)?;
        tensors.push(Labeled::new(labels, tensor));
    }
    outputs.sort();
    let output: Vec<Label> = outputs.iter().map(|(_, l)| *l).collect();
    let t = contract_network(tensors, &output, opts.order, opts.max_amplitudes)?;
    Ok(StateVector {
        amplitudes: t.data,
        sites: outputs.into_iter().map(|(s, _)| s).collect(),
        local_dim: peps.physical_dim,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    pub dim: usize,
    /// Row-major `dim x dim`.
    pub matrix: Vec<Complex64>,
    /// Positions (into the state's site list) of the kept sites.
    pub subsystem: Vec<usize>,
}

impl DensityOperator {
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.matrix[i * self.dim + i]).sum()
    }
}

/// `Tr_{A^c} |psi><psi|` for the sites at positions `subsystem`.
pub fn reduced_density(psi: &StateVector, subsystem: &[usize]) -> Result<DensityOperator> {
    let n = psi.sites.len();
    let d = psi.local_dim;
    let mut keep = subsystem.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.len() != subsystem.len() || keep.iter().any(|&p| p >= n) {
        return Err(invalid!(
            "subsystem {subsystem:?} is not a set of positions below {n}"
        ));
    }
    let dim_a = (d as u128).saturating_pow(keep.len() as u32);
    if dim_a > MAX_SUBSYSTEM_DIM as u128 {
        return Err(Error::ResourceLimit {
            what: "subsystem dimension",
            needed: dim_a,
            limit: MAX_SUBSYSTEM_DIM as u128,
        });
    }
    let dim_a = dim_a as usize;
    let rest: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    let dim_b = d.pow(rest.len() as u32);

    // psi as a (kept) x (rest) matrix; keep the caller's subsystem order
    let mut m = alloc::vec![Complex64::new(0.0, 0.0); dim_a * dim_b];
    let mut digits = alloc::vec![0usize; n];
    for (idx, amp) in psi.amplitudes.iter().enumerate() {
        let mut x = idx;
        for p in (0..n).rev() {
            digits[p] = x % d;
            x /= d;
        }
        let ia = subsystem.iter().fold(0, |acc, &p| acc * d + digits[p]);
        let ib = rest.iter().fold(0, |acc, &p| acc * d + digits[p]);
        m[ia * dim_b + ib] = *amp;
    }
    let mut rho = alloc::vec![Complex64::new(0.0, 0.0); dim_a * dim_a];
    for i in 0..dim_a {
        for j in i..dim_a {
            let v: Complex64 = (0..dim_b)
                .map(|k| m[i * dim_b + k] * m[j * dim_b + k].conj())
                .sum();
            rho[i * dim_a + j] = v;
            rho[j * dim_a + i] = v.conj();
        }
    }
    Ok(DensityOperator {
        dim: dim_a,
        matrix: rho,
        subsystem: subsystem.to_vec(),
    })
}

/// Von Neumann entropy in bits; eigenvalues below `1e-12` count as zero.
pub fn entropy(rho: &DensityOperator) -> Result<f64> {
    let n = rho.dim;
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((rho.matrix[i * n + j] - rho.matrix[j * n + i].conj()).norm());
        }
    }
    if dev > 1e-10 {
        return Err(invalid!(
            "density operator is not Hermitian (deviation {dev:e})"
        ));
    }
    let ev = hermitian_eigenvalues(n, &rho.matrix)?;
    Ok(ev
        .into_iter()
        .filter(|&l| l > 1e-12)
        .map(|l| -l * libm::log2(l))
        .sum())
}

/// Entropy of the sites at `subsystem`, tracing out whichever side is smaller.
pub fn entanglement_entropy(psi: &StateVector, subsystem: &[usize]) -> Result<f64> {
    let n = psi.sites.len();
    if subsystem.len() * 2 > n {
        let rest: Vec<usize> = (0..n).filter(|p| !subsystem.contains(p)).collect();
        return entropy(&reduced_density(psi, &rest)?);
    }
    entropy(&reduced_density(psi, subsystem)?)
}

/// Equality up to a global phase: `|<a|b>| >= (1 - tol) |a| |b|`.
pub fn states_equal(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    if a.amplitudes.len() != b.amplitudes.len() {
        return Err(invalid!(
            "state lengths differ: {} vs {}",
            a.amplitudes.len(),
            b.amplitudes.len()
        ));
    }
    Ok(overlap(a, b) >= 1.0 - tol)
}

/// `|<a|b>| / (|a| |b|)`.
pub fn overlap(a: &StateVector, b: &StateVector) -> f64 {
    let ip: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return if na == nb { 1.0 } else { 0.0 };
    }
    ip.norm() / (na * nb)
}
