//! Convexity indices of extended-real functions, quasiconvexity of additively
//! decomposable sums, and property certification for conditional risk measures
//! on finite probability spaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cindex;
pub mod decomp;
pub mod error;
pub mod extcore;
pub mod l2basis;
pub mod riskmeasure;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases.
pub type ExtReal64 = extcore::ExtReal<f64>;
pub type FunctionSpec64 = extcore::FunctionSpec<f64>;
pub type BoxDomain64 = extcore::BoxDomain<f64>;
pub type ConvexityIndex64 = cindex::ConvexityIndex<f64>;
pub type RiskMeasure64 = riskmeasure::RiskMeasure<f64>;
pub type BlockStructure64 = l2basis::BlockStructure<f64>;

/// Single-precision aliases.
pub type ExtReal32 = extcore::ExtReal<f32>;
pub type FunctionSpec32 = extcore::FunctionSpec<f32>;
pub type BoxDomain32 = extcore::BoxDomain<f32>;
pub type ConvexityIndex32 = cindex::ConvexityIndex<f32>;
pub type RiskMeasure32 = riskmeasure::RiskMeasure<f32>;
pub type BlockStructure32 = l2basis::BlockStructure<f32>;
