//! Prolongations τ_r X via ε-series, nabla maps, and UC_m instance data.

mod gamma;
mod series;
mod system;
mod ucm;

pub use gamma::{alpha_nr, binomial, gamma_set, nabla_symbolic, nabla_values};
pub use series::{exp_coeff, exp_embed, exp_variable, TruncatedSeries};
pub use system::{prolongation_equations, tau1_explicit, EquationTag, ProlongationSystem};
pub use ucm::{jet_system_off_h, theta_partition, ucm_instance, UcmInstance};
