//! Kernelization and reduction toolkit for integer linear programs.
//!
//! * [`model`], [`format`]: instances, statistics and the JSON formats.
//! * [`oracle`]: bounded exact deciders used as ground truth.
//! * [`cover`], [`packing`], [`table`]: kernels for covering and packing
//!   programs and their table compression.
//! * [`gadgets`]: the power-of-two gadget, cross-composition and the
//!   hardness reductions.
//! * [`trivial`]: duplicate removal and same-pattern merging.
//! * [`corpus`]: seeded random instances.

pub mod corpus;
pub mod cover;
pub mod error;
pub mod format;
pub mod gadgets;
pub mod model;
pub mod oracle;
pub mod packing;
pub mod report;
mod search;
pub mod table;
pub mod trivial;

pub use error::{Error, Result};
pub use model::{
    Constraint, CoverPackInstance, GraphInstance, HittingSetInstance, IlpInstance, Relation, Scope,
    Sense, SparsenessStats, SubsetSumInstance, VarBounds,
};
pub use oracle::{Decision, OracleVerdict, SearchBox, DEFAULT_NODE_CAP};
pub use report::ReductionReport;
pub use table::TableInstance;
