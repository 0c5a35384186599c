use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::check_cover;
use crate::error::{Error, Result};
use crate::model::CoverPackInstance;
use crate::oracle::{Decision, OracleVerdict};

/// Verdict of the branching solver with the size of its search tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchOutcome {
    pub verdict: OracleVerdict,
    /// Search-tree nodes without children, including the accepting one.
    pub leaves: u64,
}

/// Decides a covering instance by bounded search: starting from `x = 0`,
/// take the first violated constraint and branch on incrementing one of
/// its variables, skipping increments that would exceed the budget or an
/// upper bound. Every increment costs at least 1, so the tree has depth at
/// most `k` and at most `r^k` leaves.
///
/// Zero-cost variables are fixed first: at their upper bound, or, when
/// unbounded, high enough to satisfy every constraint they occur in (those
/// constraints then take no part in the search).
pub fn branch_solve_cover(inst: &CoverPackInstance) -> Result<BranchOutcome> {
    branch_solve_cover_capped(inst, u64::MAX)
}

/// [`branch_solve_cover`] failing with [`Error::SearchSpaceExceeded`] once
/// more than `node_cap` nodes have been visited.
pub fn branch_solve_cover_capped(inst: &CoverPackInstance, node_cap: u64) -> Result<BranchOutcome> {
    check_cover(inst)?;
    let n = inst.num_vars;
    let mut x = vec![BigInt::zero(); n];
    let mut rows = Vec::new();
    for c in &inst.constraints {
        let mut rhs = c.rhs.clone();
        let mut terms = Vec::new();
        let mut absorbed = false;
        for (v, a) in &c.coeffs {
            if !inst.cost[*v].is_zero() {
                terms.push((*v, a.clone()));
            } else if let Some(u) = &inst.upper[*v] {
                rhs -= a * u;
            } else {
                absorbed = true;
            }
        }
        if absorbed {
            for (v, a) in &c.coeffs {
                if inst.cost[*v].is_zero() && inst.upper[*v].is_none() {
                    let need = Integer::div_ceil(&c.rhs, a).max(BigInt::zero());
                    if need > x[*v] {
                        x[*v] = need;
                    }
                }
            }
        } else if rhs.is_positive() {
            rows.push((terms, rhs));
        }
    }
    for v in 0..n {
        if inst.cost[v].is_zero() {
            if let Some(u) = &inst.upper[v] {
                x[v] = u.clone();
            }
        }
    }
    let mut search = Branch {
        inst,
        rows: &rows,
        x,
        cost: BigInt::zero(),
        nodes: 0,
        leaves: 0,
        cap: node_cap,
    };
    let found = search.dfs()?;
    let witness = if found {
        let w = search.x.clone();
        if !inst.is_solution(&w) {
            return Err(Error::Internal(
                "branching witness fails re-verification".into(),
            ));
        }
        Some(w)
    } else {
        None
    };
    Ok(BranchOutcome {
        verdict: OracleVerdict {
            decision: Decision::from_bool(found),
            witness,
            nodes_explored: search.nodes,
        },
        leaves: search.leaves,
    })
}

struct Branch<'a> {
    inst: &'a CoverPackInstance,
    rows: &'a [(Vec<(usize, BigInt)>, BigInt)],
    x: Vec<BigInt>,
    cost: BigInt,
    nodes: u64,
    leaves: u64,
    cap: u64,
}

impl Branch<'_> {
    fn dfs(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SearchSpaceExceeded { cap: self.cap });
        }
        let violated = self.rows.iter().find(|(terms, rhs)| {
            let lhs: BigInt = terms.iter().map(|(v, a)| a * &self.x[*v]).sum();
            lhs < *rhs
        });
        let Some((terms, _)) = violated else {
            self.leaves += 1;
            return Ok(true);
        };
        let mut children = 0;
        for (v, _) in terms {
            let v = *v;
            let c = &self.inst.cost[v];
            if &self.cost + c > self.inst.budget {
                continue;
            }
            if self.inst.upper[v].as_ref().is_some_and(|u| self.x[v] >= *u) {
                continue;
            }
            children += 1;
            self.x[v] += BigInt::one();
            self.cost += c;
            if self.dfs()? {
                return Ok(true);
            }
            self.x[v] -= BigInt::one();
            self.cost -= c;
        }
        if children == 0 {
            self.leaves += 1;
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, Sense};
    use crate::oracle::solve_cover;

    fn single(k: i64) -> CoverPackInstance {
        CoverPackInstance::new(
            Sense::Cover,
            1,
            vec![Constraint::ge(vec![(0, 1)], 1)],
            vec![BigInt::one()],
            k,
        )
    }

    #[test]
    fn forced_increment() {
        let out = branch_solve_cover(&single(1)).unwrap();
        assert!(out.verdict.is_yes());
        assert_eq!(out.leaves, 1);
        assert_eq!(out.verdict.witness, Some(vec![BigInt::one()]));
    }

    #[test]
    fn zero_budget() {
        let out = branch_solve_cover(&single(0)).unwrap();
        assert!(!out.verdict.is_yes());
        assert_eq!(out.leaves, 1);
    }

    #[test]
    fn hitting_set_style() {
        let cons = vec![
            Constraint::ge(vec![(0, 1), (1, 1)], 1),
            Constraint::ge(vec![(2, 1), (3, 1)], 1),
            Constraint::ge(vec![(1, 1), (2, 1)], 1),
            Constraint::ge(vec![(0, 1), (4, 1)], 1),
        ];
        let inst = CoverPackInstance::new(Sense::Cover, 5, cons, vec![BigInt::one(); 5], 2);
        let out = branch_solve_cover(&inst).unwrap();
        assert_eq!(
            out.verdict.decision,
            solve_cover(&inst, 10_000).unwrap().decision
        );
        assert!(out.leaves <= 4);
    }

    #[test]
    fn cap_is_enforced() {
        let err = branch_solve_cover_capped(&single(1), 1).unwrap_err();
        assert!(matches!(err, Error::SearchSpaceExceeded { cap: 1 }));
    }
}
