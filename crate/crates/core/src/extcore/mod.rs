//! Extended-real arithmetic and grid certification backends.

pub mod certify;
pub mod domain;
pub mod ext;
pub mod function;

pub use certify::{
    certify_concave, certify_convex, certify_quasiconvex, certify_shape, convexity_gap, grid_pairs, replay_violation,
    CertConfig, CertResult, Gap, PairScan, Shape, Verdict, Witness,
};
pub use domain::{Axis, BoxDomain};
pub use ext::{ext_exp_neg, ExtReal};
pub use function::FunctionSpec;
