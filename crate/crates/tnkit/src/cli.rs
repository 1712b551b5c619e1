use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use tnkit_core::builders::{
    build_mera_1d, build_mera_2d_b2, build_mera_2d_b3, build_ttn_example, BuildOptions,
};
use tnkit_core::dense::{contract_peps, contract_tns, overlap, ContractOptions};
use tnkit_core::mapping::{
    assemble_peps, contract_refined_to_normal, place_naive, place_refined, place_shifted,
    route_lines, Assembly,
};
use tnkit_core::Error;

use crate::format::{
    read_document, read_map, read_tns, write_json, Document, MapFile, NetworkKind, TnsFile,
};
use crate::render::{render_svg, Scene};
use crate::report::{congestion_rows, qca_fit, qca_scan, ttn_scan, write_csv};
use crate::MAX_AMPLITUDES_VAR;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

/// 2 for usage errors, 3 for resource-guard refusals, 4 for failed
/// verification or inconsistent inputs.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Usage(_) => 2,
                Failure::Verification(_) => 4,
            };
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidArgument(_) | Error::Unsupported(_) => 2,
                Error::ResourceLimit { .. } => 3,
                Error::Structure(_) => 4,
            };
        }
    }
    2
}

/// Integer list: `1,3,5`, `1..4` (inclusive) or `1..13:2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid(pub Vec<usize>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected a list like 1,2,3 or a range like 1..13:2, got {s:?}");
        if let Some((lo, rest)) = s.split_once("..") {
            let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            let step: usize = step.trim().parse().map_err(|_| bad())?;
            if step == 0 || hi < lo {
                return Err(bad());
            }
            return Ok(Grid((lo..=hi).step_by(step).collect()));
        }
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()
            .map(Grid)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tnkit",
    version,
    about = "Build tensor-network states, map them to PEPS and check entanglement scaling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Naive,
    Shifted,
    Refined,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a network and write it as tns-v1 JSON.
    Build {
        #[arg(long)]
        kind: NetworkKind,
        #[arg(long)]
        layers: usize,
        #[arg(long, default_value_t = 2)]
        chi: usize,
        #[arg(long, default_value_t = 2)]
        physical_dim: usize,
        /// Fill tensors with random elements from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Place and route a network; writes map-v1 JSON and prints a summary.
    Map {
        tns: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Refinement depth for the refined scheme.
        #[arg(long, default_value_t = 1)]
        refinement: usize,
        #[arg(long, short)]
        out: PathBuf,
        /// Per-edge congestion CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check that the mapped PEPS contracts to the network's state.
    Verify {
        tns: PathBuf,
        map: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Entanglement entropy scans.
    Entropy {
        #[command(subcommand)]
        family: Family,
    },
    /// Draw a network or mapping as SVG.
    Render {
        input: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Cut entropy of the 1D graph TTN.
    Ttn1d {
        #[arg(long, default_value = "1..13:2")]
        layers: Grid,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Half-cut entropy of the swap automaton.
    Qca {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        sizes: Grid,
        #[arg(long, default_value = "1..3")]
        layers: Grid,
        /// Also run the stabilizer simulation and compare.
        #[arg(long)]
        cross_check: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

pub fn max_amplitudes() -> anyhow::Result<usize> {
    match std::env::var(MAX_AMPLITUDES_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "{MAX_AMPLITUDES_VAR} must be a positive integer, got {v:?}"
            ))
            .into()
        }),
        Err(_) => Ok(tnkit_core::DEFAULT_MAX_AMPLITUDES),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Build {
            kind,
            layers,
            chi,
            physical_dim,
            seed,
            out,
        } => {
            let opts = BuildOptions {
                chi,
                physical_dim,
                seed,
            };
            let tns = match kind {
                NetworkKind::Mera1d => build_mera_1d(layers, &opts)?,
                NetworkKind::Mera2dB2 => build_mera_2d_b2(layers, &opts)?,
                NetworkKind::Mera2dB3 => build_mera_2d_b3(layers, &opts)?,
                NetworkKind::Ttn1d => build_ttn_example(layers)?,
            };
            write_json(&out, &TnsFile::new(kind, layers, seed, &tns))?;
            println!(
                "{} nodes, {} lines, {} sites",
                tns.nodes.len(),
                tns.lines.len(),
                tns.spec.num_sites()
            );
            Ok(())
        }
        Command::Map {
            tns,
            scheme,
            refinement,
            out,
            csv,
        } => {
            let file = read_tns(&tns)?;
            let net = file.to_tns()?;
            let p = match scheme {
                SchemeArg::Naive => place_naive(&net),
                SchemeArg::Shifted => place_shifted(&net),
                SchemeArg::Refined => {
                    place_refined(&net, refinement, &file.kind.refined_offsets(&net))?
                }
            };
            let paths = route_lines(&net, &p)?;
            let m = MapFile::new(&net, &p, &paths);
            write_json(&out, &m)?;
            if let Some(path) = csv {
                let f =
                    File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                write_csv(BufWriter::new(f), &congestion_rows(&net, &paths))?;
            }
            let s = &m.summary;
            println!("scheme: {} (refinement {})", m.scheme, m.refinement);
            println!(
                "max paths per edge: {} ({} between tensors)",
                s.max_paths, s.max_internal_paths
            );
            println!("chi_peps: {} (log_chi {})", s.chi_peps, s.log_chi_chi_peps);
            println!(
                "bound: {} ({})",
                s.bound,
                if s.within_bound {
                    "within bound"
                } else {
                    "BOUND EXCEEDED"
                }
            );
            println!("max stack height: {}", s.max_stack_height);
            if s.unbounded_stacks {
                println!(
                    "warning: stacks of {} tensors exceed the {} allowed per cell; naive stacks grow with the number of layers",
                    s.max_stack_height, net.meta.max_per_cell
                );
            }
            if net.spec.dim == 1 {
                println!("warning: in one dimension every line runs along the same axis; congestion grows with the number of layers");
            }
            Ok(())
        }
        Command::Verify { tns, map, tol } => verify(&tns, &map, tol),
        Command::Entropy { family } => entropy(family),
        Command::Render { input, out } => {
            let scene = match read_document(&input)? {
                Document::Tns(t) => Scene::from_tns(&t.to_tns()?),
                Document::Map(m) => Scene::from_map(&m),
            };
            let svg = render_svg(&scene).map_err(|e| Failure::Usage(e.to_string()))?;
            std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
    }
}

fn verify(tns: &std::path::Path, map: &std::path::Path, tol: f64) -> anyhow::Result<()> {
    let file = read_tns(tns)?;
    let net = file.to_tns()?;
    if !net.is_numeric() {
        return Err(Failure::Usage(
            "the network has no tensor elements; build it with --seed".into(),
        )
        .into());
    }
    let (p, paths) = read_map(map)?.to_mapping(&net)?;
    let max_amplitudes = max_amplitudes()?;
    let opts = ContractOptions {
        max_amplitudes,
        ..ContractOptions::default()
    };
    let psi = contract_tns(&net, &opts)?;
    let peps = assemble_peps(&net, &p, &paths, Assembly::Dense { max_amplitudes })?;
    let mut checks = vec![("peps", overlap(&psi, &contract_peps(&peps, &opts)?))];
    if p.refinement > 0 {
        let merged = contract_refined_to_normal(&peps, p.refinement, max_amplitudes)?;
        checks.push((
            "refined to normal",
            overlap(&psi, &contract_peps(&merged, &opts)?),
        ));
    }
    println!(
        "{} amplitudes, chi_peps {}",
        psi.amplitudes.len(),
        peps.chi_peps()
    );
    let mut ok = true;
    for (name, ov) in &checks {
        let pass = *ov >= 1.0 - tol;
        ok &= pass;
        println!(
            "{name}: overlap {ov:.15} {}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    if !ok {
        return Err(Failure::Verification(format!("overlap below 1 - {tol:e}")).into());
    }
    Ok(())
}

fn entropy(family: Family) -> anyhow::Result<()> {
    match family {
        Family::Ttn1d { layers, out } => {
            let rows = ttn_scan(&layers.0)?;
            emit(out.as_ref(), &rows)?;
            if let Some(r) = rows.iter().find(|r| r.entropy != r.expected) {
                return Err(Failure::Verification(format!(
                    "T = {}: S = {}, expected {}",
                    r.layers, r.entropy, r.expected
                ))
                .into());
            }
            Ok(())
        }
        Family::Qca {
            dim,
            sizes,
            layers,
            cross_check,
            out,
        } => {
            let rows = qca_scan(dim, &sizes.0, &layers.0, cross_check)?;
            emit(out.as_ref(), &rows)?;
            if let Some((c, spread)) = qca_fit(&rows) {
                let line = format!(
                    "fit: S = {c} L^{} T, max relative deviation {spread:e}",
                    dim - 1
                );
                if out.is_some() {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
            if let Some(r) = rows.iter().find(|r| r.agree == Some(false)) {
                return Err(Failure::Verification(format!(
                    "L = {}, T = {}: tracker gives {}, stabilizer {:?}",
                    r.size, r.layers, r.entropy, r.stabilizer
                ))
                .into());
            }
            Ok(())
        }
    }
}

fn emit<T: serde::Serialize>(out: Option<&PathBuf>, rows: &[T]) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(BufWriter::new(f), rows)
        }
        None => write_csv(io::stdout().lock(), rows),
    }
}
