//! Reductions for packing programs `Ax ≤ b, cᵀx ≥ k` with parameter
//! `k + q` (and row-sparseness `r`).
//!
//! [`basic_reduce_packing`] either answers YES outright or leaves an
//! instance with at most `kqr` variables, `kq²r` constraints and costs in
//! `1..=k−1`. Table compression for the result is
//! [`crate::table::compress_packing`].

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Constraint, CoverPackInstance, Sense};
use crate::oracle::Decision;
use crate::report::ReductionReport;

/// Reduces a packing instance:
///
/// 1. `k = 0` is YES (`x = 0`);
/// 2. zero-cost variables are fixed to 0;
/// 3. variables that cannot be 1 (`aᵢⱼ > bⱼ` somewhere, or upper bound 0)
///    are fixed to 0;
/// 4. variables in no constraint are YES when unbounded, and otherwise are
///    fixed at their bound, lowering `k` by what they contribute;
/// 5. any cost `cᵢ ≥ k` is YES (`xᵢ = 1`);
/// 6. a greedy set `S` of variables, no two sharing a constraint, with
///    `|S| ≥ k` is YES (`x = 1_S`).
///
/// Otherwise every variable shares a constraint with some member of `S`,
/// which bounds the output. Constraints left without variables always hold
/// (`b ≥ 0`) and are dropped.
pub fn basic_reduce_packing(
    inst: &CoverPackInstance,
) -> Result<(CoverPackInstance, ReductionReport)> {
    inst.validate()?;
    if inst.sense != Sense::Packing {
        return Err(Error::invalid("expected a packing instance"));
    }
    let mut report = ReductionReport::new("basic_reduce_packing", inst.stats());
    let n = inst.num_vars;
    let mut k = inst.budget.clone();
    let yes = |report: &mut ReductionReport, rule: &str, reason: String| {
        report.conclude(Sense::Packing, Decision::Yes, rule, reason, &inst.budget)
    };
    if k.is_zero() {
        return Ok((
            yes(&mut report, "zero-budget", "x = 0 reaches k = 0".into()),
            report,
        ));
    }

    let mut alive = vec![true; n];
    let zero_cost = (0..n).filter(|&v| inst.cost[v].is_zero()).count();
    for v in 0..n {
        alive[v] = !inst.cost[v].is_zero();
    }
    report.step(
        "zero-cost-variable",
        0,
        zero_cost as i64,
        "fixed zero-cost variables to 0",
    );

    let mut blocked = 0;
    loop {
        let before = blocked;
        for v in 0..n {
            if alive[v] && !unit_feasible(inst, v) {
                alive[v] = false;
                blocked += 1;
            }
        }
        if blocked == before {
            break;
        }
    }
    report.step(
        "unit-infeasible",
        0,
        blocked as i64,
        "fixed to 0 the variables whose unit vector violates a constraint",
    );

    let mut in_constraint = vec![false; n];
    for c in &inst.constraints {
        for (v, _) in &c.coeffs {
            in_constraint[*v] = true;
        }
    }
    let isolated: Vec<usize> = (0..n).filter(|&v| alive[v] && !in_constraint[v]).collect();
    if let Some(&v) = isolated.iter().find(|&&v| inst.upper[v].is_none()) {
        let reason =
            format!("variable {v} is in no constraint and unbounded, so x{v} = k suffices");
        return Ok((yes(&mut report, "isolated-variable", reason), report));
    }
    if !isolated.is_empty() {
        for &v in &isolated {
            alive[v] = false;
            k -= &inst.cost[v] * inst.upper[v].as_ref().expect("bounded isolated variable");
        }
        report.step(
            "isolated-variable",
            0,
            isolated.len() as i64,
            format!(
                "fixed {} unconstrained variables at their upper bounds; k is now {k}",
                isolated.len()
            ),
        );
        if !k.is_positive() {
            let reason = "unconstrained variables at their upper bounds reach k".to_string();
            return Ok((yes(&mut report, "isolated-variable", reason), report));
        }
    }

    if let Some(v) = (0..n).find(|&v| alive[v] && inst.cost[v] >= k) {
        let reason = format!("x{v} = 1 is feasible with cost {} >= k = {k}", inst.cost[v]);
        return Ok((yes(&mut report, "cost-reaches-budget", reason), report));
    }

    let mut touched = vec![false; inst.constraints.len()];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (j, c) in inst.constraints.iter().enumerate() {
        for (v, _) in &c.coeffs {
            members[*v].push(j);
        }
    }
    let mut greedy = Vec::new();
    for v in 0..n {
        if alive[v] && members[v].iter().all(|&j| !touched[j]) {
            for &j in &members[v] {
                touched[j] = true;
            }
            greedy.push(v);
        }
    }
    if BigInt::from(greedy.len()) >= k {
        let reason = format!(
            "{} variables share no constraint, so setting each to 1 reaches k = {k}",
            greedy.len()
        );
        return Ok((yes(&mut report, "disjoint-greedy", reason), report));
    }

    let before = inst.constraints.len();
    let constraints: Vec<Constraint> = inst
        .constraints
        .iter()
        .filter_map(|c| {
            let coeffs: Vec<(usize, BigInt)> = c
                .coeffs
                .iter()
                .filter(|(v, _)| alive[*v])
                .cloned()
                .collect();
            (!coeffs.is_empty()).then(|| Constraint {
                coeffs,
                rel: c.rel,
                rhs: c.rhs.clone(),
            })
        })
        .collect();
    report.step(
        "constant-constraint",
        (before - constraints.len()) as i64,
        0,
        "dropped constraints left without variables",
    );
    let staged = CoverPackInstance {
        constraints,
        budget: k,
        ..inst.clone()
    };
    let (out, var_map) = staged.restrict_vars(&alive);
    report.finish(&out, var_map);
    Ok((out, report))
}

fn unit_feasible(inst: &CoverPackInstance, v: usize) -> bool {
    if inst.upper[v].as_ref().is_some_and(|u| *u < BigInt::one()) {
        return false;
    }
    inst.constraints
        .iter()
        .all(|c| c.coeff(v).is_none_or(|a| *a <= c.rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::solve_packing;

    fn pack(n: usize, cons: Vec<Constraint>, cost: &[i64], k: i64) -> CoverPackInstance {
        CoverPackInstance::new(
            Sense::Packing,
            n,
            cons,
            cost.iter().map(|&c| BigInt::from(c)).collect(),
            k,
        )
    }

    #[test]
    fn cost_at_budget_is_yes() {
        let inst = pack(2, vec![Constraint::le(vec![(0, 1), (1, 1)], 1)], &[3, 1], 3);
        let (_, rep) = basic_reduce_packing(&inst).unwrap();
        assert_eq!(rep.decision(), Some(Decision::Yes));
        assert!(rep.is_consistent());
    }

    #[test]
    fn pinned_variable_is_removed() {
        let inst = pack(
            2,
            vec![
                Constraint::le(vec![(0, 1)], 0),
                Constraint::le(vec![(1, 1)], 5),
            ],
            &[1, 1],
            3,
        );
        let (out, rep) = basic_reduce_packing(&inst).unwrap();
        assert!(rep.decision().is_none());
        assert_eq!(rep.var_map, vec![1]);
        assert_eq!(out.constraints, vec![Constraint::le(vec![(0, 1)], 5)]);
        assert!(rep.is_consistent());
        assert_eq!(
            solve_packing(&inst, 1000).unwrap().decision,
            solve_packing(&out, 1000).unwrap().decision
        );
    }

    #[test]
    fn three_disjoint_rows_give_greedy_yes() {
        let cons = (0..3)
            .map(|j| Constraint::le(vec![(2 * j, 1), (2 * j + 1, 1)], 1))
            .collect();
        let inst = pack(6, cons, &[1; 6], 2);
        let (_, rep) = basic_reduce_packing(&inst).unwrap();
        assert_eq!(rep.decision(), Some(Decision::Yes));
        assert_eq!(rep.early_decision.as_ref().unwrap().rule, "disjoint-greedy");
        assert!(solve_packing(&inst, 1000).unwrap().is_yes());
    }

    #[test]
    fn bounded_isolated_variables_lower_the_budget() {
        let mut inst = pack(
            3,
            vec![Constraint::le(vec![(0, 1), (1, 1)], 1)],
            &[1, 1, 2],
            4,
        );
        inst.upper[2] = Some(BigInt::from(1));
        let (out, rep) = basic_reduce_packing(&inst).unwrap();
        assert!(rep.decision().is_none());
        assert_eq!(out.budget, BigInt::from(2));
        assert!(rep.is_consistent());
        assert!(!solve_packing(&inst, 1000).unwrap().is_yes());
        assert!(!solve_packing(&out, 1000).unwrap().is_yes());
    }
}
