//! Exact finite-alphabet probability engine.
//!
//! All information quantities are in bits. Masses below [`ZERO_MASS`] are
//! treated as exact zeros in entropy sums, so `0 log 0 = 0`.

mod alphabet;
mod assemble;
mod cond;
mod info;
mod model;
mod pmf;

pub use alphabet::Alphabet;
pub use assemble::{
    assemble_joint_corollary1, assemble_joint_corollary1_capped, assemble_joint_theorem2,
    assemble_joint_theorem2_capped, product_joint, Factor,
};
pub use cond::CondPmf;
pub use info::InfoCalc;
pub use model::{ChannelKind, ChannelSpec, SideInfo, SourceSpec};
pub use pmf::{binary_entropy, entropy_of, JointPmf, DEFAULT_CELL_CAP, NORMALIZATION_TOL, ZERO_MASS};

/// Canonical axis names of the assembled joints.
pub mod names {
    pub const Q: &str = "Q";
    pub const U1: &str = "U1";
    pub const V1: &str = "V1";
    pub const U2: &str = "U2";
    pub const V2: &str = "V2";
    pub const W1: &str = "W1";
    pub const W2: &str = "W2";
    pub const WB1: &str = "WB1";
    pub const WB2: &str = "WB2";
    pub const WT1: &str = "WT1";
    pub const WT2: &str = "WT2";
    pub const X1: &str = "X1";
    pub const X2: &str = "X2";
    pub const Y1: &str = "Y1";
    pub const Y2: &str = "Y2";
    pub const W: &str = "W";
    pub const S1: &str = "S1";
    pub const S2: &str = "S2";

    pub const THEOREM2_AXES: [&str; 11] = [Q, U1, V1, U2, V2, W1, W2, X1, X2, Y1, Y2];
    pub const COROLLARY1_AXES: [&str; 13] =
        [Q, U1, V1, U2, V2, WB1, WB2, WT1, WT2, X1, X2, Y1, Y2];
}
