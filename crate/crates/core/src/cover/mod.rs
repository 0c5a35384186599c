//! Kernelization for covering programs `Ax ≥ b, cᵀx ≤ k` parameterized by
//! the budget `k`.
//!
//! The pipeline is the basic reduction (normalization plus per-scope
//! deduplication), followed by repeated sunflower extraction with the
//! marking rule, until the number of distinct scopes of every size `d` is
//! at most `d!·(t−1)^d` for `t = (k+1)^r + 1`. The `k+q` preprocessing and
//! the branching solver live here as well.

mod basic;
mod branch;
mod kernel;
mod kqr;
mod sunflower;

pub use basic::{basic_reduce_cover, DEDUP_ASSIGNMENT_CAP};
pub use branch::{branch_solve_cover, branch_solve_cover_capped, BranchOutcome};
pub use kernel::{
    cover_kernel_bound, kernelize_cover, kernelize_cover_with_petals, petal_threshold,
};
pub use kqr::reduce_cover_kqr;
pub use sunflower::{find_sunflower, sunflower_reduce_step, Sunflower};

use crate::error::{Error, Result};
use crate::model::{CoverPackInstance, Sense};

fn check_cover(inst: &CoverPackInstance) -> Result<()> {
    inst.validate()?;
    if inst.sense != Sense::Cover {
        return Err(Error::invalid("expected a covering instance"));
    }
    Ok(())
}
