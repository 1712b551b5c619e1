use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dense::{contract_network, ContractionOrder, DenseTensor, Label, Labeled};
use crate::error::{invalid, structure, Error, Result};
use crate::lattice::{checked_pow, Edge, LatticeSpec, Site};
use crate::tns::{LineId, Port, Tns};

use super::placement::Placement;
use super::routing::{validate_paths, PathAssignment};

/// Tensor of one PEPS site. Dense tensors have shape
/// `[physical, (axis 0, -), (axis 0, +), (axis 1, -), ...]`, with dimension 1
/// for a missing physical index and for unused or boundary directions.
#[derive(Debug, Clone, PartialEq)]
pub struct PepsSite {
    pub site: Site,
    /// Physical site whose index lives here.
    pub physical: Option<Site>,
    pub tensor: Option<DenseTensor>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bond {
    /// Saturating product of the line dimensions; 1 when unused.
    pub dim: u128,
    pub lines: Vec<LineId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Peps {
    pub lattice: LatticeSpec,
    pub refinement: usize,
    pub physical_dim: usize,
    /// Every lattice site, in lexicographic order.
    pub sites: Vec<PepsSite>,
    /// Every lattice edge.
    pub bonds: BTreeMap<Edge, Bond>,
}

impl Peps {
    pub fn chi_peps(&self) -> u128 {
        self.bonds.values().map(|b| b.dim).max().unwrap_or(1)
    }

    pub fn is_dense(&self) -> bool {
        self.sites.iter().all(|s| s.tensor.is_some())
    }

    pub fn site(&self, site: &Site) -> &PepsSite {
        &self.sites[self.lattice.linear_index(site)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    /// Bond dimensions only.
    Symbolic,
    /// Dense site tensors of at most `max_amplitudes` elements each.
    Dense { max_amplitudes: usize },
}

fn unit_tensor(rank: usize) -> DenseTensor {
    DenseTensor::scalar(Complex64::new(1.0, 0.0))
        .reshape(alloc::vec![1; rank])
        .expect("unit shape")
}

fn bonds_of(lattice: &LatticeSpec, tns: &Tns, paths: &PathAssignment) -> BTreeMap<Edge, Bond> {
    let mut bonds: BTreeMap<Edge, Bond> = lattice
        .edges()
        .into_iter()
        .map(|e| {
            (
                e,
                Bond {
                    dim: 1,
                    lines: Vec::new(),
                },
            )
        })
        .collect();
    for (line, path) in tns.lines.iter().zip(&paths.paths) {
        for e in path.edges(lattice) {
            let b = bonds.get_mut(&e).expect("validated path edge");
            b.lines.push(line.id);
            b.dim = b.dim.saturating_mul(line.dim as u128);
        }
    }
    bonds
}

/// Regroups a placed and routed TNS into a PEPS. Each site tensor is the
/// product of the TNS tensors placed there with identity wires for every
/// path passing through; each bond carries the lines crossing its edge in
/// line order.
pub fn assemble_peps(
    tns: &Tns,
    p: &Placement,
    paths: &PathAssignment,
    mode: Assembly,
) -> Result<Peps> {
    validate_paths(tns, p, paths)?;
    let lattice = &p.lattice;
    let bonds = bonds_of(lattice, tns, paths);
    let mut physical: BTreeMap<Site, Site> = BTreeMap::new();
    for a in tns.anchors() {
        let host = p.site(a.id).clone();
        if physical
            .insert(host.clone(), Site::new(a.cell.clone()))
            .is_some()
        {
            return Err(structure!("two physical indices placed on site {host}"));
        }
    }
    let max_amplitudes = match mode {
        Assembly::Symbolic => {
            let sites = lattice
                .sites()
                .map(|s| PepsSite {
                    physical: physical.get(&s).cloned(),
                    site: s,
                    tensor: None,
                })
                .collect();
            return Ok(Peps {
                lattice: lattice.clone(),
                refinement: p.refinement,
                physical_dim: tns.physical_dim,
                sites,
                bonds,
            });
        }
        Assembly::Dense { max_amplitudes } => max_amplitudes,
    };

    let mut next: Label = 0;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    let mut port_label: BTreeMap<Port, Label> = BTreeMap::new();
    let mut seg_label: BTreeMap<(Edge, LineId), Label> = BTreeMap::new();
    let mut pieces: BTreeMap<Site, Vec<Labeled>> = BTreeMap::new();
    for (line, path) in tns.lines.iter().zip(&paths.paths) {
        let edges = path.edges(lattice);
        let segs: Vec<Label> = edges.iter().map(|_| fresh()).collect();
        for (e, &l) in edges.iter().zip(&segs) {
            seg_label.insert((e.clone(), line.id), l);
        }
        let (first, last) = match (segs.first(), segs.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                let l = fresh();
                (l, l)
            }
        };
        port_label.insert(line.ends[path.start], first);
        port_label.insert(line.ends[1 - path.start], last);
        for k in 1..path.sites.len().saturating_sub(1) {
            pieces
                .entry(path.sites[k].clone())
                .or_default()
                .push(Labeled::new(
                    alloc::vec![segs[k - 1], segs[k]],
                    DenseTensor::delta(line.dim),
                ));
        }
    }
    let mut phys_label: BTreeMap<Site, Label> = BTreeMap::new();
    for node in &tns.nodes {
        let host = p.site(node.id).clone();
        if node.is_anchor() {
            let l = fresh();
            phys_label.insert(host.clone(), l);
            let own = port_label[&Port {
                node: node.id,
                slot: 0,
            }];
            pieces.entry(host).or_default().push(Labeled::new(
                alloc::vec![l, own],
                DenseTensor::delta(tns.physical_dim),
            ));
            continue;
        }
        let el = node.elements.as_ref().ok_or_else(|| {
            invalid!(
                "node {} has no elements; build the network in numeric mode",
                node.id.0
            )
        })?;
        let labels = (0..node.order())
            .map(|slot| {
                port_label[&Port {
                    node: node.id,
                    slot,
                }]
            })
            .collect();
        pieces.entry(host).or_default().push(Labeled::new(
            labels,
            DenseTensor::new(node.dims.clone(), el.clone())?,
        ));
    }

    let dim = lattice.dim;
    let mut sites = Vec::with_capacity(lattice.num_sites());
    for s in lattice.sites() {
        let mut output = Vec::new();
        let mut shape = Vec::with_capacity(1 + 2 * dim);
        match phys_label.get(&s) {
            Some(&l) => {
                output.push(l);
                shape.push(tns.physical_dim);
            }
            None => shape.push(1),
        }
        for axis in 0..dim {
            for forward in [false, true] {
                let e = lattice
                    .step(&s, axis, forward)
                    .and_then(|nb| Edge::between(lattice, &s, &nb));
                let Some(e) = e else {
                    shape.push(1);
                    continue;
                };
                let bond = &bonds[&e];
                for id in &bond.lines {
                    output.push(seg_label[&(e.clone(), *id)]);
                }
                shape.push(usize::try_from(bond.dim).map_err(|_| Error::ResourceLimit {
                    what: "PEPS bond dimension",
                    needed: bond.dim,
                    limit: usize::MAX as u128,
                })?);
            }
        }
        let size = shape
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
            .unwrap_or(u128::MAX);
        if size > max_amplitudes as u128 {
            return Err(Error::ResourceLimit {
                what: "PEPS site tensor",
                needed: size,
                limit: max_amplitudes as u128,
            });
        }
        let tensor = match pieces.remove(&s) {
            None => unit_tensor(shape.len()),
            Some(parts) => {
                contract_network(parts, &output, ContractionOrder::Greedy, max_amplitudes)?
                    .reshape(shape)?
            }
        };
        sites.push(PepsSite {
            physical: physical.get(&s).cloned(),
            site: s,
            tensor: Some(tensor),
        });
    }
    Ok(Peps {
        lattice: lattice.clone(),
        refinement: p.refinement,
        physical_dim: tns.physical_dim,
        sites,
        bonds,
    })
}

/// Merges blocks of `b^dt` sites per axis into single tensors, turning a
/// refined PEPS into one with `dt` fewer refinement levels. Each merged bond
/// is the product of the parallel refined bonds crossing the block boundary.
pub fn contract_refined_to_normal(peps: &Peps, dt: usize, max_amplitudes: usize) -> Result<Peps> {
    if dt == 0 || dt > peps.refinement {
        return Err(invalid!(
            "cannot merge {dt} refinement levels of a PEPS refined {} times",
            peps.refinement
        ));
    }
    let fine = &peps.lattice;
    let f = checked_pow(fine.branching, dt)?;
    let dim = fine.dim;
    let coarse = LatticeSpec::new(
        dim,
        fine.size / f,
        fine.branching,
        fine.layers - dt,
        fine.boundary,
    )?;
    let block_of = |s: &Site| Site::new(s.coords().iter().map(|c| c / f).collect());

    // refined edges crossing each coarse edge, in edge order
    let mut crossing: BTreeMap<Edge, Vec<&Edge>> = coarse
        .edges()
        .into_iter()
        .map(|e| (e, Vec::new()))
        .collect();
    for e in peps.bonds.keys() {
        let (a, b) = e.endpoints(fine);
        let (ba, bb) = (block_of(&a), block_of(&b));
        if ba != bb {
            let ce = Edge::between(&coarse, &ba, &bb)
                .ok_or_else(|| structure!("refined edge {e:?} skips a block"))?;
            crossing.get_mut(&ce).expect("coarse edge").push(e);
        }
    }
    let bonds: BTreeMap<Edge, Bond> = crossing
        .iter()
        .map(|(ce, fes)| {
            let mut bond = Bond {
                dim: 1,
                lines: Vec::new(),
            };
            for fe in fes {
                let fb = &peps.bonds[*fe];
                bond.dim = bond.dim.saturating_mul(fb.dim);
                bond.lines.extend_from_slice(&fb.lines);
            }
            (ce.clone(), bond)
        })
        .collect();

    let mut members: BTreeMap<Site, Vec<&PepsSite>> = BTreeMap::new();
    for ps in &peps.sites {
        members.entry(block_of(&ps.site)).or_default().push(ps);
    }
    let edge_label: BTreeMap<&Edge, Label> =
        peps.bonds.keys().enumerate().map(|(i, e)| (e, i)).collect();
    let phys_label = edge_label.len();
    let dense = peps.is_dense();
    let mut sites = Vec::with_capacity(coarse.num_sites());
    for s in coarse.sites() {
        let block = members.remove(&s).unwrap_or_default();
        let phys: Vec<&Site> = block.iter().filter_map(|m| m.physical.as_ref()).collect();
        if phys.len() > 1 {
            return Err(structure!(
                "block {s} holds {} physical indices",
                phys.len()
            ));
        }
        let physical = phys.first().map(|&x| x.clone());
        if !dense {
            sites.push(PepsSite {
                site: s,
                physical,
                tensor: None,
            });
            continue;
        }
        let mut output = Vec::new();
        let mut shape = Vec::new();
        if physical.is_some() {
            output.push(phys_label);
            shape.push(peps.physical_dim);
        } else {
            shape.push(1);
        }
        for axis in 0..dim {
            for forward in [false, true] {
                let ce = coarse
                    .step(&s, axis, forward)
                    .and_then(|nb| Edge::between(&coarse, &s, &nb));
                match ce {
                    Some(ce) => {
                        output.extend(crossing[&ce].iter().map(|fe| edge_label[fe]));
                        shape.push(bonds[&ce].dim as usize);
                    }
                    None => shape.push(1),
                }
            }
        }
        let size = shape
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
            .unwrap_or(u128::MAX);
        if size > max_amplitudes as u128 {
            return Err(Error::ResourceLimit {
                what: "PEPS site tensor",
                needed: size,
                limit: max_amplitudes as u128,
            });
        }
        let mut parts = Vec::with_capacity(block.len());
        for m in &block {
            let t = m.tensor.as_ref().expect("dense PEPS");
            let mut labels = Vec::new();
            let mut dims = Vec::new();
            if m.physical.is_some() {
                labels.push(phys_label);
                dims.push(t.dims[0]);
            }
            for axis in 0..dim {
                for (k, forward) in [(1 + 2 * axis, false), (2 + 2 * axis, true)] {
                    match fine
                        .step(&m.site, axis, forward)
                        .and_then(|nb| Edge::between(fine, &m.site, &nb))
                    {
                        Some(e) => {
                            labels.push(edge_label[&e]);
                            dims.push(t.dims[k]);
                        }
                        None if t.dims[k] == 1 => {}
                        None => {
                            return Err(structure!(
                                "boundary index of {} has dimension {}",
                                m.site,
                                t.dims[k]
                            ))
                        }
                    }
                }
            }
            parts.push(Labeled::new(labels, t.clone().reshape(dims)?));
        }
        let tensor = contract_network(parts, &output, ContractionOrder::Greedy, max_amplitudes)?
            .reshape(shape)?;
        sites.push(PepsSite {
            site: s,
            physical,
            tensor: Some(tensor),
        });
    }
    Ok(Peps {
        lattice: coarse,
        refinement: peps.refinement - dt,
        physical_dim: peps.physical_dim,
        sites,
        bonds,
    })
}
