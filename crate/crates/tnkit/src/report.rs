//! CSV reports: per-edge congestion and entropy scans.

use std::io::Write;

use serde::Serialize;
use tnkit_core::lattice::Site;
use tnkit_core::mapping::{measured_chi, PathAssignment};
use tnkit_core::qca::{half_cut, PairSet};
use tnkit_core::stabilizer::{run_qca, run_ttn_example};
use tnkit_core::tns::Tns;

use crate::GENERATOR_VERSION;

fn coords(s: &Site) -> String {
    s.coords()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongestionRow {
    pub from: String,
    pub to: String,
    pub paths: usize,
    pub internal: usize,
    pub bond_dim: u128,
}

/// Loaded edges in canonical order. Sites are written as `x:y`.
pub fn congestion_rows(tns: &Tns, paths: &PathAssignment) -> Vec<CongestionRow> {
    let c = measured_chi(tns, paths);
    c.edges
        .iter()
        .map(|(e, load)| {
            let (a, b) = e.endpoints(&paths.lattice);
            CongestionRow {
                from: coords(&a),
                to: coords(&b),
                paths: load.paths(),
                internal: load.internal(),
                bond_dim: load.bond_dim,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TtnRow {
    pub layers: usize,
    pub sites: usize,
    pub entropy: usize,
    pub expected: usize,
}

pub fn ttn_scan(layers: &[usize]) -> tnkit_core::Result<Vec<TtnRow>> {
    layers
        .iter()
        .map(|&t| {
            Ok(TtnRow {
                layers: t,
                sites: 1 << t,
                entropy: run_ttn_example(t)?,
                expected: t.div_ceil(2),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcaRow {
    pub dim: usize,
    pub size: usize,
    pub layers: usize,
    pub entropy: usize,
    /// `S / (L^(D-1) T)`.
    pub ratio: f64,
    pub stabilizer: Option<usize>,
    pub agree: Option<bool>,
}

/// Half-cut entropies from the pair tracker, optionally checked against the
/// stabilizer simulation.
pub fn qca_scan(
    dim: usize,
    sizes: &[usize],
    layers: &[usize],
    cross_check: bool,
) -> tnkit_core::Result<Vec<QcaRow>> {
    let mut rows = Vec::new();
    for &size in sizes {
        let cut = half_cut(dim, size);
        let initial = PairSet::initial(dim, size)?;
        for &t in layers {
            let entropy = initial.after(t)?.entropy_across(&cut);
            let stabilizer = if cross_check {
                Some(run_qca(dim, size, t)?.entropy(&cut)?)
            } else {
                None
            };
            let scale = size.pow(dim as u32 - 1) * t;
            rows.push(QcaRow {
                dim,
                size,
                layers: t,
                entropy,
                ratio: if scale == 0 {
                    f64::NAN
                } else {
                    entropy as f64 / scale as f64
                },
                stabilizer,
                agree: stabilizer.map(|s| s == entropy),
            });
        }
    }
    Ok(rows)
}

/// Least-squares `c` in `S = c L^(D-1) T` and the largest relative deviation
/// of a row's ratio from it.
pub fn qca_fit(rows: &[QcaRow]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.layers > 0)
        .map(|r| {
            (
                (r.size.pow(r.dim as u32 - 1) * r.layers) as f64,
                r.entropy as f64,
            )
        })
        .collect();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return None;
    }
    let c = pts.iter().map(|(x, y)| x * y).sum::<f64>() / sxx;
    let spread = pts
        .iter()
        .map(|(x, y)| ((y / x) - c).abs() / c.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Some((c, spread))
}

/// Writes rows as CSV behind a `# generator-version` comment line.
pub fn write_csv<W: Write, T: Serialize>(mut out: W, rows: &[T]) -> anyhow::Result<()> {
    writeln!(out, "# generator-version: {GENERATOR_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tnkit_core::builders::{build_mera_2d_b2, BuildOptions};
    use tnkit_core::mapping::{place_shifted, route_lines};

    #[test]
    fn congestion_csv_shape() {
        let tns = build_mera_2d_b2(2, &BuildOptions::symbolic(2)).unwrap();
        let p = place_shifted(&tns);
        let rows = congestion_rows(&tns, &route_lines(&tns, &p).unwrap());
        assert_eq!(rows.iter().map(|r| r.paths).max(), Some(6));
        assert!(rows.iter().all(|r| r.bond_dim == 1 << r.paths));
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# generator-version"));
        assert_eq!(lines.next(), Some("from,to,paths,internal,bond_dim"));
    }

    #[test]
    fn ttn_rows() {
        let rows = ttn_scan(&[1, 3, 5]).unwrap();
        assert!(rows.iter().all(|r| r.entropy == r.expected));
        assert!(ttn_scan(&[2]).is_err());
    }

    #[test]
    fn qca_cross_check_and_fit() {
        let rows = qca_scan(1, &[16, 32], &[1, 2], true).unwrap();
        assert!(rows.iter().all(|r| r.agree == Some(true)));
        let (c, _) = qca_fit(&rows).unwrap();
        assert!(c > 0.0);
        assert!(qca_fit(&[]).is_none());
    }
}
