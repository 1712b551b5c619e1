//! `tns-v1` and `map-v1` JSON documents.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use anyhow::{bail, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use tnkit_core::lattice::{LatticeSpec, Site};
use tnkit_core::mapping::{
    chi_bound, detect_stacks, measured_chi, Path, PathAssignment, Placement, RefinedOffsets, Scheme,
};
use tnkit_core::tns::{ContractionLine, MeraMeta, NodeId, TensorKind, TensorNode, Tns};

use crate::GENERATOR_VERSION;

pub const TNS_FORMAT: &str = "tns-v1";
pub const MAP_FORMAT: &str = "map-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NetworkKind {
    #[value(name = "mera1d")]
    #[serde(rename = "mera1d")]
    Mera1d,
    #[value(name = "mera2d-b2")]
    #[serde(rename = "mera2d-b2")]
    Mera2dB2,
    #[value(name = "mera2d-b3")]
    #[serde(rename = "mera2d-b3")]
    Mera2dB3,
    #[value(name = "ttn1d")]
    #[serde(rename = "ttn1d")]
    Ttn1d,
}

impl NetworkKind {
    /// Offsets used by the refined scheme for this family.
    pub fn refined_offsets(self, tns: &Tns) -> RefinedOffsets {
        match self {
            NetworkKind::Mera2dB2 => RefinedOffsets::mera_2d_b2(),
            NetworkKind::Mera2dB3 => RefinedOffsets::mera_2d_b3(),
            _ => RefinedOffsets::zero(tns.spec.dim, tns),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub layer: usize,
    pub cell: Vec<usize>,
    pub kind: TensorKind,
    pub dims: Vec<usize>,
    /// `[re, im]` pairs, row-major.
    pub elements: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TnsFile {
    pub format: String,
    #[serde(rename = "generator-version")]
    pub generator_version: String,
    pub kind: NetworkKind,
    pub layers: usize,
    pub seed: Option<u64>,
    pub lattice: LatticeSpec,
    pub physical_dim: usize,
    pub meta: MeraMeta,
    pub nodes: Vec<NodeRecord>,
    pub lines: Vec<ContractionLine>,
}

impl TnsFile {
    pub fn new(kind: NetworkKind, layers: usize, seed: Option<u64>, tns: &Tns) -> Self {
        let nodes = tns
            .nodes
            .iter()
            .map(|n| NodeRecord {
                id: n.id.0,
                layer: n.layer,
                cell: n.cell.clone(),
                kind: n.kind.clone(),
                dims: n.dims.clone(),
                elements: n
                    .elements
                    .as_ref()
                    .map(|el| el.iter().map(|c| [c.re, c.im]).collect()),
            })
            .collect();
        Self {
            format: TNS_FORMAT.into(),
            generator_version: GENERATOR_VERSION.into(),
            kind,
            layers,
            seed,
            lattice: tns.spec.clone(),
            physical_dim: tns.physical_dim,
            meta: tns.meta,
            nodes,
            lines: tns.lines.clone(),
        }
    }

    pub fn to_tns(&self) -> anyhow::Result<Tns> {
        if self.format != TNS_FORMAT {
            bail!("expected a {TNS_FORMAT} document, found {:?}", self.format);
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| TensorNode {
                id: NodeId(n.id),
                layer: n.layer,
                cell: n.cell.clone(),
                kind: n.kind.clone(),
                dims: n.dims.clone(),
                elements: n
                    .elements
                    .as_ref()
                    .map(|el| el.iter().map(|&[re, im]| Complex64::new(re, im)).collect()),
            })
            .collect();
        Ok(Tns::new(
            self.lattice.clone(),
            nodes,
            self.lines.clone(),
            self.physical_dim,
            self.meta,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetsRecord {
    pub by_kind: BTreeMap<String, Vec<usize>>,
    pub anchor: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedNode {
    pub id: usize,
    pub layer: usize,
    pub kind: String,
    pub site: Site,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub line: usize,
    pub start: usize,
    pub sites: Vec<Site>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub max_paths: usize,
    /// Paths per edge with physical legs left out.
    pub max_internal_paths: usize,
    pub chi_peps: u128,
    pub log_chi_chi_peps: f64,
    pub bound: u128,
    pub within_bound: bool,
    pub max_stack_height: usize,
    /// Set when some site hosts more tensors than a cell may hold.
    pub unbounded_stacks: bool,
    pub unrestricted_routing: bool,
}

impl MapSummary {
    pub fn compute(tns: &Tns, p: &Placement, paths: &PathAssignment) -> Self {
        let c = measured_chi(tns, paths);
        let bound = chi_bound(&tns.meta, tns.spec.dim);
        let stacks = detect_stacks(tns, p);
        Self {
            max_paths: c.max_paths,
            max_internal_paths: c.max_internal_paths,
            chi_peps: c.chi_peps,
            log_chi_chi_peps: c.log_chi,
            bound,
            within_bound: c.log_chi <= bound as f64,
            max_stack_height: stacks.max_height,
            unbounded_stacks: stacks.max_height > tns.meta.max_per_cell,
            unrestricted_routing: paths.unrestricted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub format: String,
    #[serde(rename = "generator-version")]
    pub generator_version: String,
    pub scheme: String,
    pub refinement: usize,
    pub offsets: Option<OffsetsRecord>,
    pub lattice: LatticeSpec,
    pub nodes: Vec<PlacedNode>,
    pub paths: Vec<PathRecord>,
    pub summary: MapSummary,
}

impl MapFile {
    pub fn new(tns: &Tns, p: &Placement, paths: &PathAssignment) -> Self {
        let offsets = match &p.scheme {
            Scheme::Refined { offsets, .. } => Some(OffsetsRecord {
                by_kind: offsets.by_kind.clone().into_iter().collect(),
                anchor: offsets.anchor.clone(),
            }),
            _ => None,
        };
        let nodes = tns
            .nodes
            .iter()
            .map(|n| PlacedNode {
                id: n.id.0,
                layer: n.layer,
                kind: n.kind.key(),
                site: p.site(n.id).clone(),
            })
            .collect();
        let paths_out = paths
            .paths
            .iter()
            .enumerate()
            .map(|(line, path)| PathRecord {
                line,
                start: path.start,
                sites: path.sites.clone(),
            })
            .collect();
        Self {
            format: MAP_FORMAT.into(),
            generator_version: GENERATOR_VERSION.into(),
            scheme: p.scheme.name().into(),
            refinement: p.refinement,
            offsets,
            lattice: p.lattice.clone(),
            nodes,
            paths: paths_out,
            summary: MapSummary::compute(tns, p, paths),
        }
    }

    /// Rebuilds the placement and routing, checking that the document
    /// belongs to `tns`.
    pub fn to_mapping(&self, tns: &Tns) -> Result<(Placement, PathAssignment), tnkit_core::Error> {
        use tnkit_core::Error::Structure;
        if self.format != MAP_FORMAT {
            return Err(Structure(format!(
                "expected a {MAP_FORMAT} document, found {:?}",
                self.format
            )));
        }
        if self.nodes.len() != tns.nodes.len() {
            return Err(Structure(format!(
                "map places {} nodes, network has {}",
                self.nodes.len(),
                tns.nodes.len()
            )));
        }
        for (rec, node) in self.nodes.iter().zip(&tns.nodes) {
            if rec.id != node.id.0 || rec.layer != node.layer || rec.kind != node.kind.key() {
                return Err(Structure(format!(
                    "map entry {} does not match network node {}",
                    rec.id, node.id.0
                )));
            }
        }
        let scheme = match self.scheme.as_str() {
            "naive" => Scheme::Naive,
            "shifted" => Scheme::Shifted,
            "refined" => {
                let o = self
                    .offsets
                    .as_ref()
                    .ok_or_else(|| Structure("refined map without offsets".into()))?;
                Scheme::Refined {
                    refinement: self.refinement,
                    offsets: RefinedOffsets {
                        by_kind: o.by_kind.clone().into_iter().collect(),
                        anchor: o.anchor.clone(),
                    },
                }
            }
            other => return Err(Structure(format!("unknown scheme {other:?}"))),
        };
        let placement = Placement {
            lattice: self.lattice.clone(),
            refinement: self.refinement,
            scheme,
            site_of: self.nodes.iter().map(|n| n.site.clone()).collect(),
        };
        if self.paths.iter().enumerate().any(|(i, r)| r.line != i) {
            return Err(Structure("paths are not listed in line order".into()));
        }
        let paths = PathAssignment {
            lattice: self.lattice.clone(),
            paths: self
                .paths
                .iter()
                .map(|r| Path {
                    start: r.start,
                    sites: r.sites.clone(),
                })
                .collect(),
            unrestricted: self.summary.unrestricted_routing,
        };
        Ok((placement, paths))
    }
}

/// Either document, told apart by its `format` field.
#[derive(Debug, Clone)]
pub enum Document {
    Tns(Box<TnsFile>),
    Map(Box<MapFile>),
}

#[derive(Deserialize)]
struct FormatProbe {
    format: String,
}

pub fn read_document(path: &FsPath) -> anyhow::Result<Document> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let probe: FormatProbe = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a tnkit document", path.display()))?;
    match probe.format.as_str() {
        TNS_FORMAT => Ok(Document::Tns(Box::new(
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
        ))),
        MAP_FORMAT => Ok(Document::Map(Box::new(
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?,
        ))),
        other => bail!("{}: unknown format {other:?}", path.display()),
    }
}

pub fn read_tns(path: &FsPath) -> anyhow::Result<TnsFile> {
    match read_document(path)? {
        Document::Tns(t) => Ok(*t),
        Document::Map(_) => bail!("{} is a map document, expected a network", path.display()),
    }
}

pub fn read_map(path: &FsPath) -> anyhow::Result<MapFile> {
    match read_document(path)? {
        Document::Map(m) => Ok(*m),
        Document::Tns(_) => bail!("{} is a network document, expected a map", path.display()),
    }
}

pub fn write_json<T: Serialize>(path: &FsPath, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tnkit_core::builders::{build_mera_2d_b2, BuildOptions};
    use tnkit_core::mapping::{place_shifted, route_lines};

    #[test]
    fn tns_round_trip() {
        let tns = build_mera_2d_b2(1, &BuildOptions::numeric(2, 7)).unwrap();
        let f = TnsFile::new(NetworkKind::Mera2dB2, 1, Some(7), &tns);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"generator-version\""));
        let back: TnsFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_tns().unwrap(), tns);
    }

    #[test]
    fn map_round_trip() {
        let tns = build_mera_2d_b2(2, &BuildOptions::symbolic(2)).unwrap();
        let p = place_shifted(&tns);
        let paths = route_lines(&tns, &p).unwrap();
        let m = MapFile::new(&tns, &p, &paths);
        assert_eq!(m.summary.max_paths, 6);
        let back: MapFile = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        let (p2, paths2) = back.to_mapping(&tns).unwrap();
        assert_eq!(p2, p);
        assert_eq!(paths2, paths);
    }

    #[test]
    fn map_for_other_network_rejected() {
        let a = build_mera_2d_b2(2, &BuildOptions::symbolic(2)).unwrap();
        let b = build_mera_2d_b2(1, &BuildOptions::symbolic(2)).unwrap();
        let p = place_shifted(&a);
        let m = MapFile::new(&a, &p, &route_lines(&a, &p).unwrap());
        assert!(m.to_mapping(&b).is_err());
    }
}
