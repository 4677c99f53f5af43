//! Branch points, continuation of the branches of P⁻¹, monodromy and
//! permutation-group algorithms.

pub mod group;
pub mod monodromy;
pub mod perm;
pub mod tracking;

pub use group::{closure_cap, group_properties, GroupProperties, PermGroup};
pub use monodromy::{branch_points, BranchSystem};
pub use perm::Permutation;
pub use tracking::{track_branches, Tracker};
