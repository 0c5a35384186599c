use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::basic::normalize;
use super::check_cover;
use super::sunflower::{find_sunflower, sunflower_reduce_step};
use crate::error::{Error, Result};
use crate::model::{CoverPackInstance, Scope};
use crate::report::ReductionReport;

/// Sunflower size `t = (k+1)^r + 1`, saturating at `u64::MAX`.
pub fn petal_threshold(k: &BigInt, r: usize) -> u64 {
    let base = k + BigInt::one();
    let t = num_traits::pow(base, r) + BigInt::one();
    t.to_u64().unwrap_or(u64::MAX)
}

/// Upper bound on the kernel's constraint count:
/// `Σ_{d=1..r} d!·((k+1)^r)^d·(k+1)^d`.
pub fn cover_kernel_bound(k: &BigInt, r: usize) -> BigInt {
    let base = k + BigInt::one();
    let petals = num_traits::pow(base.clone(), r);
    let mut total = BigInt::from(0);
    let mut fact = BigInt::one();
    for d in 1..=r {
        fact *= d;
        total += &fact * num_traits::pow(petals.clone(), d) * num_traits::pow(base.clone(), d);
    }
    total
}

fn family_cap(d: usize, t: u64) -> u128 {
    let mut cap: u128 = 1;
    for i in 1..=d as u128 {
        cap = cap.saturating_mul(i).saturating_mul(u128::from(t - 1));
    }
    cap
}

/// Kernelizes an `r`-row-sparse covering instance.
///
/// After the basic reduction fixes `r`, sunflowers with `t = (k+1)^r + 1`
/// petals are removed while some size `d` has more than `d!·(t−1)^d`
/// distinct scopes, re-running the basic reduction after each pass. The
/// result has at most [`cover_kernel_bound`] constraints and `r` times as
/// many variables.
pub fn kernelize_cover(inst: &CoverPackInstance) -> Result<(CoverPackInstance, ReductionReport)> {
    kernelize(inst, None)
}

/// [`kernelize_cover`] with an explicit sunflower size `t`.
pub fn kernelize_cover_with_petals(
    inst: &CoverPackInstance,
    t: u64,
) -> Result<(CoverPackInstance, ReductionReport)> {
    if t < 1 {
        return Err(Error::invalid("sunflower size must be at least 1"));
    }
    kernelize(inst, Some(t))
}

fn kernelize(
    inst: &CoverPackInstance,
    t: Option<u64>,
) -> Result<(CoverPackInstance, ReductionReport)> {
    check_cover(inst)?;
    let mut report = ReductionReport::new("kernelize_cover", inst.stats());
    let mut cur = basic(inst, &mut report);
    if report.is_decided() {
        return Ok((cur, report));
    }
    let r = cur.stats().r;
    let t = t.unwrap_or_else(|| petal_threshold(&cur.budget, r));
    let petals = usize::try_from(t).unwrap_or(usize::MAX);
    loop {
        let mut changed = false;
        for d in 1..=r {
            loop {
                let family = distinct_scopes(&cur, d);
                if family.len() as u128 <= family_cap(d, t) {
                    break;
                }
                let sunflower = find_sunflower(&family, petals)?.ok_or_else(|| {
                    Error::Internal(format!(
                        "no {t}-sunflower among {} sets of size {d}",
                        family.len()
                    ))
                })?;
                let (next, step) = sunflower_reduce_step(&cur, &sunflower)?;
                let removed = step.total_constraints_removed();
                report.absorb(step);
                cur = next;
                if report.is_decided() {
                    return Ok((cur, report));
                }
                if removed == 0 {
                    // t too small for the marking rule to make progress
                    break;
                }
                changed = true;
            }
        }
        if !changed {
            return Ok((cur, report));
        }
        cur = basic(&cur, &mut report);
        if report.is_decided() {
            return Ok((cur, report));
        }
    }
}

fn basic(inst: &CoverPackInstance, report: &mut ReductionReport) -> CoverPackInstance {
    let mut step = ReductionReport::new("basic_reduce_cover", inst.stats());
    let out = normalize(inst, &mut step, true);
    report.absorb(step);
    out
}

/// Distinct scopes of size `d` in order of first occurrence.
fn distinct_scopes(inst: &CoverPackInstance, d: usize) -> Vec<Scope> {
    let mut seen = HashSet::new();
    inst.constraints
        .iter()
        .filter(|c| c.len() == d)
        .map(|c| c.scope())
        .filter(|s| seen.insert(s.clone()))
        .collect()
}
