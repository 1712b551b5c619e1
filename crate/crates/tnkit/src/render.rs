//! SVG 1.1 diagrams of placements and routed paths.

use std::collections::BTreeMap;
use std::fmt::Write;

use tnkit_core::lattice::{sublattice_sites, Edge, LatticeSpec, Site};
use tnkit_core::mapping::place_shifted;
use tnkit_core::tns::Tns;

use crate::format::MapFile;
use crate::GENERATOR_VERSION;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
const PITCH: f64 = 24.0;
const MARGIN: f64 = 30.0;
const LEGEND: f64 = 160.0;

fn color(layer: usize) -> &'static str {
    PALETTE[layer % PALETTE.len()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneNode {
    pub layer: usize,
    pub anchor: bool,
    pub site: Site,
}

/// Everything a diagram shows.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub lattice: Option<LatticeSpec>,
    pub nodes: Vec<SceneNode>,
    /// Site sequences; the layer is that of the upper end.
    pub paths: Vec<(usize, Vec<Site>)>,
}

impl Scene {
    pub fn empty() -> Self {
        Self {
            lattice: None,
            nodes: Vec::new(),
            paths: Vec::new(),
        }
    }

    pub fn from_map(m: &MapFile) -> Self {
        let nodes: Vec<SceneNode> = m
            .nodes
            .iter()
            .map(|n| SceneNode {
                layer: n.layer,
                anchor: n.kind == "physical-anchor",
                site: n.site.clone(),
            })
            .collect();
        let paths = m
            .paths
            .iter()
            .filter(|p| p.sites.len() > 1)
            .map(|p| {
                let layer = nodes
                    .iter()
                    .filter(|n| {
                        n.site == p.sites[0] || n.site == *p.sites.last().expect("non-empty")
                    })
                    .map(|n| n.layer)
                    .max()
                    .unwrap_or(0);
                (layer, p.sites.clone())
            })
            .collect();
        Self {
            lattice: Some(m.lattice.clone()),
            nodes,
            paths,
        }
    }

    /// Tensors at their shifted-scheme sites, without routing.
    pub fn from_tns(tns: &Tns) -> Self {
        let p = place_shifted(tns);
        let nodes = tns
            .nodes
            .iter()
            .map(|n| SceneNode {
                layer: n.layer,
                anchor: n.is_anchor(),
                site: p.site(n.id).clone(),
            })
            .collect();
        Self {
            lattice: Some(p.lattice),
            nodes,
            paths: Vec::new(),
        }
    }

    /// Number of paths on each loaded edge.
    pub fn edge_counts(&self) -> BTreeMap<Edge, usize> {
        let mut counts = BTreeMap::new();
        if let Some(lattice) = &self.lattice {
            for (_, sites) in &self.paths {
                for w in sites.windows(2) {
                    if let Some(e) = Edge::between(lattice, &w[0], &w[1]) {
                        *counts.entry(e).or_insert(0) += 1;
                    }
                }
            }
        }
        counts
    }
}

fn xy(site: &Site) -> (f64, f64) {
    let c = site.coords();
    let (x, y) = if c.len() == 1 {
        (c[0], 0)
    } else {
        (c[1], c[0])
    };
    (MARGIN + x as f64 * PITCH, MARGIN + y as f64 * PITCH)
}

pub fn render_svg(scene: &Scene) -> anyhow::Result<String> {
    let lattice = match &scene.lattice {
        Some(l) if !scene.nodes.is_empty() => l,
        _ => return Ok(empty_canvas()),
    };
    if lattice.dim > 2 {
        anyhow::bail!(
            "diagrams are drawn for 1D and 2D lattices only, got D = {}",
            lattice.dim
        );
    }
    let extent = (lattice.size.saturating_sub(1)) as f64 * PITCH;
    let width = 2.0 * MARGIN + extent + LEGEND;
    let height = 2.0 * MARGIN + if lattice.dim == 1 { 0.0 } else { extent };
    let mut s = header(width, height.max(120.0));

    let mut tau_of: BTreeMap<Site, usize> = BTreeMap::new();
    for tau in 1..=lattice.layers {
        if let Ok(sites) = sublattice_sites(lattice, tau) {
            tau_of.extend(sites.into_iter().map(|x| (x, tau)));
        }
    }
    s.push_str("<g id=\"sites\" fill=\"white\" stroke-width=\"1.5\">\n");
    for site in lattice.sites() {
        let (x, y) = xy(&site);
        let stroke = tau_of.get(&site).map_or("#bbbbbb", |&t| color(t));
        writeln!(
            s,
            "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" stroke=\"{stroke}\"/>"
        )?;
    }
    s.push_str("</g>\n<g id=\"paths\" fill=\"none\" stroke-width=\"2\" stroke-opacity=\"0.45\">\n");
    for (layer, sites) in &scene.paths {
        let pts: Vec<String> = sites
            .iter()
            .map(|p| {
                let (x, y) = xy(p);
                format!("{x},{y}")
            })
            .collect();
        writeln!(
            s,
            "<polyline points=\"{}\" stroke=\"{}\"/>",
            pts.join(" "),
            color(*layer)
        )?;
    }
    s.push_str("</g>\n<g id=\"tensors\" stroke=\"black\" stroke-width=\"0.5\">\n");
    let mut stack: BTreeMap<&Site, usize> = BTreeMap::new();
    for n in scene.nodes.iter().filter(|n| !n.anchor) {
        let k = stack.entry(&n.site).or_insert(0);
        let (x, y) = xy(&n.site);
        let off = *k as f64 * 3.0;
        writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"7\" height=\"7\" fill=\"{}\"/>",
            x - 3.5 + off,
            y - 3.5 - off,
            color(n.layer)
        )?;
        *k += 1;
    }
    s.push_str("</g>\n");

    let lx = 2.0 * MARGIN + extent;
    s.push_str("<g id=\"legend\" font-family=\"monospace\" font-size=\"10\">\n");
    let mut y = MARGIN;
    for tau in 1..=lattice.layers {
        writeln!(
            s,
            "<rect x=\"{lx}\" y=\"{}\" width=\"8\" height=\"8\" fill=\"{}\"/>",
            y - 8.0,
            color(tau)
        )?;
        writeln!(s, "<text x=\"{}\" y=\"{y}\">layer {tau}</text>", lx + 12.0)?;
        y += 14.0;
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for c in scene.edge_counts().into_values() {
        *hist.entry(c).or_insert(0) += 1;
    }
    for (paths, edges) in &hist {
        writeln!(
            s,
            "<text x=\"{lx}\" y=\"{y}\">{paths} paths: {edges} edges</text>"
        )?;
        y += 14.0;
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- generator-version: {GENERATOR_VERSION} -->\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

fn empty_canvas() -> String {
    let mut s = header(2.0 * MARGIN, 2.0 * MARGIN);
    s.push_str("</svg>\n");
    s
}
