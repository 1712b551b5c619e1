//! Placement of TNS tensors on lattice sites, routing of contraction lines
//! along lattice paths, and regrouping into a PEPS.

mod congestion;
mod peps;
mod placement;
mod routing;

pub use congestion::{
    chi_bound, line_density_estimate, measured_chi, measured_chi_where, Congestion, EdgeLoad,
};
pub use peps::{assemble_peps, contract_refined_to_normal, Assembly, Bond, Peps, PepsSite};
pub use placement::{
    detect_stacks, place_naive, place_refined, place_shifted, refined_lattice, Placement,
    RefinedOffsets, Scheme, Stacks,
};
pub use routing::{grid_violations, route_lines, validate_paths, Path, PathAssignment};
