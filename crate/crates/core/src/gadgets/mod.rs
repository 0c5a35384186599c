//! Instance generators for the lower-bound constructions: the power-of-two
//! gadget, OR-cross-composition from Independent Set, rewriting to at most
//! three variables per constraint and occurrences per variable, the
//! covering transformation, and the reductions from Independent Set,
//! Subset Sum and Hitting Set.

mod compose;
mod hardness;
mod power;
mod sparsify;
mod to_cover;

pub use compose::{
    compose_tally, cross_compose, cross_compose_with, ComposeOptions, ComposeTally, Composed,
};
pub use hardness::{
    hitting_set_to_cover, independent_set_to_packing, subset_sum_to_cover, subset_sum_to_packing,
};
pub use power::{
    power_big_m, power_bits, power_gadget, power_gadget_shared, GadgetHandle, Operand,
};
pub use sparsify::{sparsify_3, Sparsified, VarOrigin};
pub use to_cover::{to_cover, CoverTransform};

use num_bigint::BigInt;

use crate::model::{Constraint, IlpInstance, VarBounds};
use crate::oracle::SearchBox;

/// Grows a general instance together with a finite search box and a
/// diagnostic name per variable.
#[derive(Clone, Debug, Default)]
pub struct IlpBuilder {
    constraints: Vec<Constraint>,
    bounds: Vec<VarBounds>,
    ranges: Vec<(BigInt, BigInt)>,
    names: Vec<String>,
}

impl IlpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with the default bounds `x ≥ 0` and box range
    /// `[lo, hi]`.
    pub fn var(
        &mut self,
        name: impl Into<String>,
        lo: impl Into<BigInt>,
        hi: impl Into<BigInt>,
    ) -> usize {
        self.bounds.push(VarBounds::default());
        self.ranges.push((lo.into(), hi.into()));
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn push(&mut self, c: Constraint) -> usize {
        self.constraints.push(c);
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn range(&self, v: usize) -> &(BigInt, BigInt) {
        &self.ranges[v]
    }

    pub fn finish(self) -> (IlpInstance, SearchBox, Vec<String>) {
        let inst = IlpInstance {
            num_vars: self.names.len(),
            constraints: self.constraints,
            bounds: self.bounds,
        };
        (inst, SearchBox::new(self.ranges), self.names)
    }
}
