use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::check_cover;
use crate::error::Result;
use crate::model::{Constraint, CoverPackInstance, Relation, Scope, Sense};
use crate::oracle::Decision;
use crate::report::ReductionReport;

/// Scopes whose local box `{0..k}^d` has more points than this are not
/// deduplicated.
pub const DEDUP_ASSIGNMENT_CAP: u64 = 1 << 20;

/// Normalizes a covering instance and removes redundant constraints per
/// scope:
///
/// 1. constraints with right-hand side 0 hold at `x = 0` and are dropped;
/// 2. zero-cost variables are deleted with their constraints (a zero-cost
///    variable with an upper bound is fixed at that bound instead), and
///    variables with `cᵢ > k` are deleted from their constraints;
/// 3. an empty constraint left with positive right-hand side decides NO;
/// 4. for every scope, one constraint (the first) is kept per local
///    assignment in `{0..k}^d` that the group rules out, so at most
///    `(k+1)^d` constraints share a scope.
///
/// Variables that end up in no constraint are removed (they are 0 in any
/// cheapest solution).
pub fn basic_reduce_cover(
    inst: &CoverPackInstance,
) -> Result<(CoverPackInstance, ReductionReport)> {
    check_cover(inst)?;
    let mut report = ReductionReport::new("basic_reduce_cover", inst.stats());
    let out = normalize(inst, &mut report, true);
    Ok((out, report))
}

pub(crate) fn normalize(
    inst: &CoverPackInstance,
    report: &mut ReductionReport,
    dedup: bool,
) -> CoverPackInstance {
    let k = &inst.budget;
    let n = inst.num_vars;
    let mut gone = vec![false; n];

    let mut cons: Vec<Constraint> = inst.constraints.clone();
    let before = cons.len();
    cons.retain(|c| c.rhs.is_positive());
    report.step(
        "satisfied-at-zero",
        (before - cons.len()) as i64,
        0,
        "dropped constraints whose right-hand side is 0",
    );

    let zero_cost: Vec<usize> = (0..n).filter(|&v| inst.cost[v].is_zero()).collect();
    if !zero_cost.is_empty() {
        let before = cons.len();
        let mut kept = Vec::with_capacity(cons.len());
        for c in cons {
            if c.coeffs
                .iter()
                .any(|(v, _)| inst.cost[*v].is_zero() && inst.upper[*v].is_none())
            {
                continue;
            }
            let mut rhs = c.rhs;
            let mut coeffs = Vec::with_capacity(c.coeffs.len());
            for (v, a) in c.coeffs {
                if inst.cost[v].is_zero() {
                    rhs -= &a * inst.upper[v].as_ref().expect("bounded zero-cost variable");
                } else {
                    coeffs.push((v, a));
                }
            }
            if rhs.is_positive() {
                kept.push(Constraint {
                    coeffs,
                    rel: Relation::Ge,
                    rhs,
                });
            }
        }
        cons = kept;
        for &v in &zero_cost {
            gone[v] = true;
        }
        report.step(
            "zero-cost-variable",
            (before - cons.len()) as i64,
            zero_cost.len() as i64,
            format!(
                "deleted {} zero-cost variables and the constraints they satisfy",
                zero_cost.len()
            ),
        );
    }

    let expensive: Vec<usize> = (0..n).filter(|&v| !gone[v] && inst.cost[v] > *k).collect();
    if !expensive.is_empty() {
        for c in &mut cons {
            c.coeffs.retain(|(v, _)| inst.cost[*v] <= *k);
        }
        for &v in &expensive {
            gone[v] = true;
        }
        report.step(
            "cost-exceeds-budget",
            0,
            expensive.len() as i64,
            format!(
                "removed {} variables with cost above k from their constraints",
                expensive.len()
            ),
        );
    }

    if let Some(c) = cons.iter().find(|c| c.coeffs.is_empty()) {
        let reason = format!("constraint 0 >= {} cannot be satisfied", c.rhs);
        return report.conclude(Sense::Cover, Decision::No, "empty-constraint", reason, k);
    }

    if dedup {
        let before = cons.len();
        cons = dedup_scopes(cons, k, &inst.upper);
        report.step(
            "scope-dedup",
            (before - cons.len()) as i64,
            0,
            "kept one constraint per ruled-out local assignment of each scope",
        );
    }

    let mut used = vec![false; n];
    for c in &cons {
        for (v, _) in &c.coeffs {
            used[*v] = true;
        }
    }
    let unused = (0..n).filter(|&v| !gone[v] && !used[v]).count();
    report.step(
        "unused-variable",
        0,
        unused as i64,
        "removed variables that occur in no constraint",
    );
    let staged = CoverPackInstance {
        constraints: cons,
        ..inst.clone()
    };
    let (out, var_map) = staged.restrict_vars(&used);
    report.finish(&out, var_map);
    out
}

/// Per scope, enumerates `∏ᵥ {0..min(k, uᵥ)}` in mixed radix and keeps the
/// first constraint (in input order) violated by each point.
fn dedup_scopes(cons: Vec<Constraint>, k: &BigInt, upper: &[Option<BigInt>]) -> Vec<Constraint> {
    let mut groups: BTreeMap<Scope, Vec<usize>> = BTreeMap::new();
    for (i, c) in cons.iter().enumerate() {
        groups.entry(c.scope()).or_default().push(i);
    }
    let mut keep = vec![true; cons.len()];
    for (scope, members) in &groups {
        if members.len() < 2 {
            continue;
        }
        let Some(radices) = local_radices(scope, k, upper) else {
            continue;
        };
        for m in members {
            keep[*m] = false;
        }
        let mut point = vec![0u64; radices.len()];
        loop {
            let x: Vec<BigInt> = point.iter().map(|&p| BigInt::from(p)).collect();
            if let Some(first) = members
                .iter()
                .find(|&&i| local_lhs(&cons[i], &x) < cons[i].rhs)
            {
                keep[*first] = true;
            }
            if !advance(&mut point, &radices) {
                break;
            }
        }
    }
    cons.into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

fn local_radices(scope: &Scope, k: &BigInt, upper: &[Option<BigInt>]) -> Option<Vec<u64>> {
    let mut total: u64 = 1;
    let mut radices = Vec::with_capacity(scope.len());
    for &v in scope.iter() {
        let top = match &upper[v] {
            Some(u) => u.min(k).clone(),
            None => k.clone(),
        };
        let r = top.to_u64()?.checked_add(1)?;
        total = total.checked_mul(r)?;
        radices.push(r);
    }
    (total <= DEDUP_ASSIGNMENT_CAP).then_some(radices)
}

fn local_lhs(c: &Constraint, x: &[BigInt]) -> BigInt {
    c.coeffs.iter().zip(x).map(|((_, a), v)| a * v).sum()
}

/// Mixed-radix increment, last position fastest.
pub(crate) fn advance(point: &mut [u64], radices: &[u64]) -> bool {
    for i in (0..point.len()).rev() {
        point[i] += 1;
        if point[i] < radices[i] {
            return true;
        }
        point[i] = 0;
    }
    false
}
