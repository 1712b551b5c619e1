//! Concrete networks: 1D and 2D MERA, and the 1D graph TTN with logarithmic
//! entanglement.
//!
//! MERA layers are built bottom-up on the lattice of the previous layer
//! (`M = L / b^(tau-1)` sites per axis). Disentanglers whose footprint would
//! cross the open boundary are left out.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::lattice::{grid_points, LatticeSpec};
use crate::numeric::{random_isometry, GaussianSource};
use crate::tns::{ContractionLine, LineId, MeraMeta, NodeId, Port, TensorKind, TensorNode, Tns};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub chi: usize,
    pub physical_dim: usize,
    /// Fill tensor elements from this seed; `None` builds a symbolic network.
    pub seed: Option<u64>,
}

impl BuildOptions {
    pub fn symbolic(chi: usize) -> Self {
        Self {
            chi,
            physical_dim: 2,
            seed: None,
        }
    }

    pub fn numeric(chi: usize, seed: u64) -> Self {
        Self {
            chi,
            physical_dim: 2,
            seed: Some(seed),
        }
    }
}

/// A disentangler footprint anchored at `offset` inside each `b^D` block.
#[derive(Debug, Clone)]
struct Pattern {
    offset: Vec<usize>,
    footprint: Vec<usize>,
}

struct Open {
    port: Port,
    dim: usize,
}

struct Builder {
    nodes: Vec<TensorNode>,
    lines: Vec<ContractionLine>,
    source: Option<GaussianSource>,
}

impl Builder {
    fn new(seed: Option<u64>) -> Self {
        Self {
            nodes: Vec::new(),
            lines: Vec::new(),
            source: seed.map(GaussianSource::new),
        }
    }

    fn add_node(
        &mut self,
        layer: usize,
        cell: Vec<usize>,
        kind: TensorKind,
        dims: Vec<usize>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(TensorNode {
            id,
            layer,
            cell,
            kind,
            dims,
            elements: None,
        });
        id
    }

    fn connect(&mut self, a: Port, b: Port, dim: usize) {
        let id = LineId(self.lines.len());
        self.lines.push(ContractionLine {
            id,
            ends: [a, b],
            dim,
        });
    }

    /// Random isometry with rows = lower legs, columns = upper legs.
    fn fill_random(&mut self, id: NodeId, lower: usize) {
        if let Some(src) = self.source.as_mut() {
            let dims = &self.nodes[id.0].dims;
            let rows: usize = dims[..lower].iter().product();
            let cols: usize = dims[lower..].iter().product();
            self.nodes[id.0].elements = Some(random_isometry(rows, cols, src));
        }
    }
}

fn build_mera(
    dim: usize,
    branching: usize,
    layers: usize,
    patterns: &[Pattern],
    mut meta: MeraMeta,
    opts: &BuildOptions,
) -> Result<Tns> {
    if opts.chi == 0 {
        return Err(invalid!("bond dimension must be positive"));
    }
    if opts.physical_dim < 2 {
        return Err(invalid!("physical dimension must be at least 2"));
    }
    let spec = LatticeSpec::mera(dim, branching, layers)?;
    let mut b = Builder::new(opts.seed);

    // open upward legs of the current layer's sites, row-major
    let mut open: Vec<Open> = spec
        .sites()
        .map(|site| {
            let id = b.add_node(
                0,
                site.coords().to_vec(),
                TensorKind::PhysicalAnchor,
                alloc::vec![opts.physical_dim],
            );
            Open {
                port: Port { node: id, slot: 0 },
                dim: opts.physical_dim,
            }
        })
        .collect();

    let mut extent = spec.size;
    for tau in 1..=layers {
        let cells = extent / branching;
        let index = |p: &[usize]| p.iter().fold(0, |acc, &c| acc * extent + c);

        for pat in patterns {
            for n in grid_points(dim, cells) {
                let base: Vec<usize> = n
                    .iter()
                    .zip(&pat.offset)
                    .map(|(c, o)| c * branching + o)
                    .collect();
                if base.iter().zip(&pat.footprint).any(|(s, f)| s + f > extent) {
                    continue;
                }
                let sites: Vec<usize> = footprint_points(&pat.footprint)
                    .map(|d| index(&base.iter().zip(&d).map(|(a, b)| a + b).collect::<Vec<_>>()))
                    .collect();
                let k = sites.len();
                let lower_dims: Vec<usize> = sites.iter().map(|&s| open[s].dim).collect();
                let dims: Vec<usize> = lower_dims
                    .iter()
                    .chain(lower_dims.iter())
                    .copied()
                    .collect();
                // the cell holding the footprint's far corner
                let cell = base
                    .iter()
                    .zip(&pat.footprint)
                    .map(|(s, f)| (s + f - 1) / branching)
                    .collect();
                let id = b.add_node(
                    tau,
                    cell,
                    TensorKind::Disentangler {
                        footprint: pat.footprint.clone(),
                    },
                    dims,
                );
                for (slot, &s) in sites.iter().enumerate() {
                    b.connect(open[s].port, Port { node: id, slot }, open[s].dim);
                    open[s].port = Port {
                        node: id,
                        slot: k + slot,
                    };
                }
                b.fill_random(id, k);
            }
        }

        let block = alloc::vec![branching; dim];
        let mut next = Vec::with_capacity(cells.pow(dim as u32));
        for n in grid_points(dim, cells) {
            let sites: Vec<usize> = footprint_points(&block)
                .map(|d| {
                    index(
                        &n.iter()
                            .zip(&d)
                            .map(|(c, o)| c * branching + o)
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            let lower_dims: Vec<usize> = sites.iter().map(|&s| open[s].dim).collect();
            let fine: usize = lower_dims.iter().product();
            let out = opts.chi.min(fine);
            let mut dims = lower_dims.clone();
            dims.push(out);
            let id = b.add_node(tau, n, TensorKind::Isometry, dims);
            for (slot, &s) in sites.iter().enumerate() {
                b.connect(open[s].port, Port { node: id, slot }, open[s].dim);
            }
            b.fill_random(id, sites.len());
            next.push(Open {
                port: Port {
                    node: id,
                    slot: sites.len(),
                },
                dim: out,
            });
        }
        open = next;
        extent = cells;
    }

    debug_assert_eq!(open.len(), 1);
    let last = &open[0];
    let top = b.add_node(
        layers,
        alloc::vec![0; dim],
        TensorKind::Top,
        alloc::vec![last.dim],
    );
    b.connect(last.port, Port { node: top, slot: 0 }, last.dim);
    b.fill_random(top, 1);

    meta.chi = opts.chi.max(opts.physical_dim);
    Tns::new(spec, b.nodes, b.lines, opts.physical_dim, meta)
}

fn footprint_points(extent: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = extent.iter().product();
    (0..total).map(move |mut idx| {
        let mut p = alloc::vec![0; extent.len()];
        for (c, &e) in p.iter_mut().zip(extent).rev() {
            *c = idx % e;
            idx /= e;
        }
        p
    })
}

/// Binary 1D MERA: two-site disentanglers on pairs `(2i+1, 2i+2)`, then
/// two-to-one isometries on `(2i, 2i+1)`, on `L = 2^T` sites.
pub fn build_mera_1d(layers: usize, opts: &BuildOptions) -> Result<Tns> {
    let meta = MeraMeta {
        branching: 2,
        chi: 0,
        max_order: 4,
        max_per_cell: 2,
        max_cell_distance: 1,
        max_layer_gap: 1,
    };
    let patterns = [Pattern {
        offset: alloc::vec![1],
        footprint: alloc::vec![2],
    }];
    build_mera(1, 2, layers, &patterns, meta, opts)
}

/// 2D MERA with `b = 2`: 2x2 disentanglers on plaquettes shifted by `(1,1)`
/// against the 2x2 isometry blocks.
pub fn build_mera_2d_b2(layers: usize, opts: &BuildOptions) -> Result<Tns> {
    let meta = MeraMeta {
        branching: 2,
        chi: 0,
        max_order: 8,
        max_per_cell: 2,
        max_cell_distance: 2,
        max_layer_gap: 1,
    };
    let patterns = [Pattern {
        offset: alloc::vec![1, 1],
        footprint: alloc::vec![2, 2],
    }];
    build_mera(2, 2, layers, &patterns, meta, opts)
}

/// 2D MERA with `b = 3`: 2x2 disentanglers on the block corners, 2x1 and 1x2
/// disentanglers across the middles of the vertical and horizontal block
/// boundaries, then 3x3 isometries. Applied in that order; the footprints are
/// disjoint so the order does not affect the state.
pub fn build_mera_2d_b3(layers: usize, opts: &BuildOptions) -> Result<Tns> {
    let meta = MeraMeta {
        branching: 3,
        chi: 0,
        max_order: 10,
        max_per_cell: 4,
        max_cell_distance: 2,
        max_layer_gap: 1,
    };
    let patterns = [
        Pattern {
            offset: alloc::vec![2, 2],
            footprint: alloc::vec![2, 2],
        },
        Pattern {
            offset: alloc::vec![2, 1],
            footprint: alloc::vec![2, 1],
        },
        Pattern {
            offset: alloc::vec![1, 2],
            footprint: alloc::vec![1, 2],
        },
    ];
    build_mera(2, 3, layers, &patterns, meta, opts)
}

/// Sites `(2^tau (k - 1/2) - 1, 2^tau k - 1)` acted on by the gates of layer
/// `tau`, `k = 1..=2^(T - tau)`.
pub fn ttn_gate_sites(layers: usize, tau: usize) -> impl Iterator<Item = (usize, usize)> {
    let span = 1usize << tau;
    (1..=(1usize << (layers - tau))).map(move |k| (span * k - span / 2 - 1, span * k - 1))
}

/// Matrix elements of `exp(-i pi X⊗X / 4)`, row-major over
/// `(out_a, out_b, in_a, in_b)`.
pub fn xx_rotation_elements() -> Vec<Complex64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut u = alloc::vec![Complex64::new(0.0, 0.0); 16];
    for out in 0..4usize {
        for inp in 0..4usize {
            let v = if out == inp {
                Complex64::new(s, 0.0)
            } else if out == inp ^ 0b11 {
                Complex64::new(0.0, -s)
            } else {
                continue;
            };
            u[out * 4 + inp] = v;
        }
    }
    u
}

/// Graph TTN on `L = 2^T` qubits (odd `T`): start from `|0...0>` and apply
/// `exp(-i pi XX/4)` gates layer by layer from `tau = T` down to `1`.
///
/// Each gate is an isometry written as a unitary with one input from the
/// layer above and one fresh `|0>` input; the `|0>` tensors are top-kind
/// nodes in the layer of the gate that consumes them.
pub fn build_ttn_example(layers: usize) -> Result<Tns> {
    if layers == 0 || layers.is_multiple_of(2) {
        return Err(invalid!(
            "the TTN example needs an odd positive number of layers, got {layers}"
        ));
    }
    if layers > 24 {
        return Err(invalid!("{layers} layers exceed the supported range"));
    }
    let spec = LatticeSpec::mera(1, 2, layers)?;
    let size = spec.size;
    let mut b = Builder::new(None);
    let mut open: Vec<Option<Port>> = alloc::vec![None; size];
    let gate = xx_rotation_elements();
    let zero = alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

    for tau in (1..=layers).rev() {
        for (k, (a, c)) in ttn_gate_sites(layers, tau).enumerate() {
            let cell = alloc::vec![k];
            for s in [a, c] {
                if open[s].is_none() {
                    let id = b.add_node(tau, cell.clone(), TensorKind::Top, alloc::vec![2]);
                    b.nodes[id.0].elements = Some(zero.clone());
                    open[s] = Some(Port { node: id, slot: 0 });
                }
            }
            let id = b.add_node(tau, cell, TensorKind::Isometry, alloc::vec![2; 4]);
            b.nodes[id.0].elements = Some(gate.clone());
            for (i, s) in [a, c].into_iter().enumerate() {
                b.connect(
                    open[s].take().expect("wire is open"),
                    Port {
                        node: id,
                        slot: 2 + i,
                    },
                    2,
                );
                open[s] = Some(Port { node: id, slot: i });
            }
        }
    }
    // anchors are created last so that their ids follow the gates
    for (s, port) in open.into_iter().enumerate() {
        let id = b.add_node(
            0,
            alloc::vec![s],
            TensorKind::PhysicalAnchor,
            alloc::vec![2],
        );
        b.connect(
            port.expect("every site is touched by a gate"),
            Port { node: id, slot: 0 },
            2,
        );
    }
    let meta = MeraMeta {
        branching: 2,
        chi: 2,
        max_order: 4,
        max_per_cell: 3,
        max_cell_distance: 1,
        max_layer_gap: 1,
    };
    Tns::new(spec, b.nodes, b.lines, 2, meta)
}

/// Cut position `p_T` for the TTN example: `p_1 = 1`, `p_(T+2) = 4 p_T - 1`.
pub fn ttn_cut_size(layers: usize) -> Result<usize> {
    if layers == 0 || layers.is_multiple_of(2) {
        return Err(invalid!(
            "cut sizes are defined for odd layer counts, got {layers}"
        ));
    }
    let mut p = 1usize;
    for _ in 0..(layers - 1) / 2 {
        p = 4 * p - 1;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tns::{measure_meta, validate_preconditions, Violation};
    use alloc::vec;

    fn count(tns: &Tns, layer: usize, pred: impl Fn(&TensorKind) -> bool) -> usize {
        tns.nodes
            .iter()
            .filter(|n| n.layer == layer && pred(&n.kind))
            .count()
    }

    #[test]
    fn mera_1d_smallest() {
        let t = build_mera_1d(1, &BuildOptions::symbolic(2)).unwrap();
        assert_eq!(t.spec.size, 2);
        assert_eq!(count(&t, 1, |k| matches!(k, TensorKind::Isometry)), 1);
        assert_eq!(
            count(&t, 1, |k| matches!(k, TensorKind::Disentangler { .. })),
            0
        );
        assert!(validate_preconditions(&t).is_ok());
    }

    #[test]
    fn mera_1d_layers_halve() {
        let t = build_mera_1d(3, &BuildOptions::symbolic(2)).unwrap();
        let isos: Vec<_> = (1..=3)
            .map(|l| count(&t, l, |k| matches!(k, TensorKind::Isometry)))
            .collect();
        assert_eq!(isos, vec![4, 2, 1]);
        // open boundary: disentanglers on (1,2),(3,4),(5,6) then (1,2)
        let dis: Vec<_> = (1..=3)
            .map(|l| count(&t, l, |k| matches!(k, TensorKind::Disentangler { .. })))
            .collect();
        assert_eq!(dis, vec![3, 1, 0]);
        assert_eq!(t.max_layer(), 3);
    }

    #[test]
    fn meta_is_layer_independent() {
        type B = fn(usize, &BuildOptions) -> Result<Tns>;
        let builders: [(B, usize); 3] = [
            (build_mera_1d, 5),
            (build_mera_2d_b2, 4),
            (build_mera_2d_b3, 3),
        ];
        for (build, max_t) in builders {
            let metas: Vec<_> = (1..=max_t)
                .map(|t| build(t, &BuildOptions::symbolic(2)).unwrap().meta)
                .collect();
            assert!(metas.windows(2).all(|w| w[0] == w[1]));
            for t in 1..=max_t {
                let tns = build(t, &BuildOptions::symbolic(2)).unwrap();
                let report = validate_preconditions(&tns);
                assert!(report.is_ok(), "T={t}: {:?}", report.violations);
            }
        }
        let t = build_mera_2d_b2(2, &BuildOptions::symbolic(2)).unwrap();
        assert_eq!(t.meta.max_order, 8);
        assert_eq!(t.meta.max_per_cell, 2);
        let t = build_mera_2d_b3(2, &BuildOptions::symbolic(2)).unwrap();
        assert_eq!(t.meta.max_order, 10);
        assert_eq!(t.meta.max_per_cell, 4);
    }

    #[test]
    fn measured_constants_match_declared() {
        let t = build_mera_2d_b2(4, &BuildOptions::symbolic(2)).unwrap();
        let m = measure_meta(&t);
        assert_eq!(
            (
                m.max_order,
                m.max_per_cell,
                m.max_cell_distance,
                m.max_layer_gap
            ),
            (8, 2, 2, 1)
        );
        let t = build_mera_2d_b3(3, &BuildOptions::symbolic(2)).unwrap();
        let m = measure_meta(&t);
        assert_eq!(
            (
                m.max_order,
                m.max_per_cell,
                m.max_cell_distance,
                m.max_layer_gap
            ),
            (10, 4, 2, 1)
        );
    }

    #[test]
    fn cell_counts_2d() {
        let t = build_mera_2d_b2(2, &BuildOptions::symbolic(2)).unwrap();
        assert_eq!(t.spec.size, 4);
        assert_eq!(count(&t, 2, |k| matches!(k, TensorKind::Isometry)), 1);
        assert_eq!(count(&t, 1, |k| matches!(k, TensorKind::Isometry)), 4);
        let t = build_mera_2d_b3(3, &BuildOptions::symbolic(2)).unwrap();
        for tau in 1..=3 {
            assert_eq!(
                count(&t, tau, |k| matches!(k, TensorKind::Isometry)),
                9usize.pow((3 - tau) as u32)
            );
        }
        let t1 = build_mera_2d_b3(1, &BuildOptions::symbolic(2)).unwrap();
        assert_eq!(count(&t1, 1, |k| matches!(k, TensorKind::Isometry)), 1);
    }

    #[test]
    fn builders_are_deterministic() {
        let a = build_mera_2d_b2(2, &BuildOptions::numeric(2, 5)).unwrap();
        let b = build_mera_2d_b2(2, &BuildOptions::numeric(2, 5)).unwrap();
        assert_eq!(a, b);
        let c = build_mera_2d_b2(2, &BuildOptions::numeric(2, 6)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ttn_schedule() {
        assert_eq!(ttn_gate_sites(1, 1).collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(ttn_gate_sites(3, 3).collect::<Vec<_>>(), vec![(3, 7)]);
        assert_eq!(
            ttn_gate_sites(3, 2).collect::<Vec<_>>(),
            vec![(1, 3), (5, 7)]
        );
        assert_eq!(
            ttn_gate_sites(3, 1).collect::<Vec<_>>(),
            vec![(0, 1), (2, 3), (4, 5), (6, 7)]
        );
        assert!(build_ttn_example(2).is_err());
        let t = build_ttn_example(5).unwrap();
        assert_eq!(t.spec.size, 32);
        assert!(
            validate_preconditions(&t).is_ok(),
            "{:?}",
            validate_preconditions(&t).violations
        );
    }

    #[test]
    fn cut_sizes() {
        let p: Vec<_> = [1, 3, 5, 7]
            .iter()
            .map(|&t| ttn_cut_size(t).unwrap())
            .collect();
        assert_eq!(p, vec![1, 3, 11, 43]);
        assert!(ttn_cut_size(4).is_err());
    }

    #[test]
    fn xx_gates_commute_on_overlap() {
        // gates of different layers share a site; their 4x4 (embedded 8x8)
        // products commute because both are functions of X operators only
        let u = xx_rotation_elements();
        let mul = |a: &[Complex64], b: &[Complex64], n: usize| {
            let mut c = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        c[i * n + j] += a[i * n + k] * b[k * n + j];
                    }
                }
            }
            c
        };
        // u on qubits (0,1) and (1,2) of three qubits, as 8x8 matrices
        let mut u01 = vec![Complex64::new(0.0, 0.0); 64];
        let mut u12 = vec![Complex64::new(0.0, 0.0); 64];
        for o in 0..8usize {
            for i in 0..8usize {
                if o & 1 == i & 1 {
                    u01[o * 8 + i] = u[(o >> 1) * 4 + (i >> 1)];
                }
                if o >> 2 == i >> 2 {
                    u12[o * 8 + i] = u[(o & 3) * 4 + (i & 3)];
                }
            }
        }
        let ab = mul(&u01, &u12, 8);
        let ba = mul(&u12, &u01, 8);
        for (x, y) in ab.iter().zip(&ba) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn constructed_violations() {
        let mut t = build_mera_1d(3, &BuildOptions::symbolic(2)).unwrap();
        // re-tag a layer-1 tensor as layer 3: its lines now span more than C_T
        let id = t.nodes.iter().find(|n| n.layer == 1).unwrap().id;
        t.nodes[id.0].layer = 3;
        assert!(validate_preconditions(&t).has("6"));

        let mut t = build_mera_2d_b2(2, &BuildOptions::symbolic(2)).unwrap();
        let extra: Vec<NodeId> = t
            .nodes
            .iter()
            .filter(|n| n.layer == 1)
            .map(|n| n.id)
            .take(3)
            .collect();
        for id in &extra {
            t.nodes[id.0].cell = vec![1, 1];
        }
        let report = validate_preconditions(&t);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CellOverfull { .. })));
    }
}
