//! Differential-kernel combinatorics: the bound C^n_{r,m}, the index maps
//! π, ψ, φ, triangular kernel presentations and point checks of (◇).

mod bounds;
mod diamond;
mod maps;
mod presentation;

pub use bounds::{ackermann, alpha_beta, bound_c, BoundTable, DEFAULT_BUDGET};
pub use diamond::{check_diamond, DiamondReport, ProbeOutcome};
pub use maps::{index_maps, IndexMaps};
pub use presentation::{leaders, validate_kernel, CoordSpec, KernelPresentation, KernelRejection};
