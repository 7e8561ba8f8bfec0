//! Differential polynomials under the orderly ranking, and Ritt–Kolchin reduction.

mod indet;
mod pol;
mod poly;
mod reduce;
mod ring;

pub use indet::{
    compare_indets, derivative_prefix, fmt_indet, index_add, index_factorial, index_le, index_sub, indices_up_to,
    order_of, unit_index, DerIndet, IndetStyle, MultiIndex,
};
pub use pol::{polify, unpolify, PolPoly};
pub use poly::{DiffPoly, Monomial};
pub use reduce::{
    autoreduce, basic_set, compare_autoreduced, compare_rank, divide, h_of_set, leader_data, membership_test, rank,
    reduction_status, theta_set, Autoreduced, DivisionCertificate, LeaderData, Membership, Rank, RankedSet,
    ReductionStatus, ThetaElement,
};
pub use ring::DiffRing;
