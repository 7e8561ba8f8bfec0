//! Weil descent along a finite free differential extension.

mod derivations;
mod descent;
mod extension;
mod presentation;

pub use derivations::{check_thm32, check_thm33, DerivationExpr, IdentityReport};
pub use descent::{Coords, Descent};
pub use extension::{lambda_extract, reassemble, validate_extension, BElem, ExtensionRejection, FreeExtension};
pub use presentation::{
    counit_map, descend_presentation, eval_b, prolong_b_point, prolong_w_point, standardize_descent, transfer_to_base,
    transfer_to_extension, unit_map, BPoint, DescentOutput, IdealGen, Transfer, WPoint,
};

#[cfg(test)]
mod tests;
