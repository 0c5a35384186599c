//! Enumerative kernels: duplicate-constraint removal (parameter `n + C`
//! with row-sparseness `r`) and merging of variables with identical columns
//! (parameter `m + C` with column-sparseness `q`).

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{Constraint, IlpInstance, VarBounds};
use crate::oracle::SearchBox;
use crate::report::ReductionReport;

/// Drops every constraint identical (coefficients, relation, right-hand
/// side) to an earlier one.
pub fn dedup_constraints(inst: &IlpInstance) -> Result<(IlpInstance, ReductionReport)> {
    inst.validate()?;
    let mut seen: HashSet<&Constraint> = HashSet::new();
    let constraints: Vec<Constraint> = inst
        .constraints
        .iter()
        .filter(|c| seen.insert(c))
        .cloned()
        .collect();
    let out = IlpInstance {
        constraints,
        ..inst.clone()
    };
    let mut report = ReductionReport::new("dedup_constraints", inst.stats());
    let removed = inst.constraints.len() - out.constraints.len();
    report.step(
        "duplicate-constraint",
        removed as i64,
        0,
        format!("dropped {removed} repeated constraints"),
    );
    report.stats_after = out.stats();
    Ok((out, report))
}

/// Number of distinct constraints with at most `r` of `n` variables and
/// coefficients and right-hand side in `[−C, C]`:
/// `Σ_{d=1..r} 3·C(n,d)·(2C+1)^{d+1}`.
pub fn dedup_bound(n: usize, r: usize, c: &BigInt) -> BigInt {
    let width: BigInt = 2 * c + 1;
    let mut total = BigInt::zero();
    let mut binom = BigInt::one();
    for d in 1..=r.min(n) {
        binom = binom * (n - d + 1) / d;
        total += 3 * &binom * num_traits::pow(width.clone(), d + 1);
    }
    total
}

/// How the variables of a merged instance relate to the original ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeMap {
    /// `target[v]` is the merged variable that original variable `v` folds
    /// into.
    pub target: Vec<usize>,
    /// Whether `v` is the variable kept for its class (the lowest index).
    pub survivor: Vec<bool>,
}

impl MergeMap {
    pub fn num_merged(&self) -> usize {
        self.survivor.iter().filter(|&&s| s).count()
    }

    /// Gives each survivor the merged value and the other members 0.
    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.target
            .iter()
            .zip(&self.survivor)
            .map(|(&t, &s)| if s { y[t].clone() } else { BigInt::zero() })
            .collect()
    }

    /// Sums each class: the merged point for an original one.
    pub fn collapse(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.num_merged()];
        for (&t, v) in self.target.iter().zip(x) {
            y[t] += v;
        }
        y
    }

    /// Box for the merged instance: each survivor ranges over the sum of its
    /// class's ranges.
    pub fn merge_box(&self, bx: &SearchBox) -> SearchBox {
        let mut ranges = vec![(BigInt::zero(), BigInt::zero()); self.num_merged()];
        for (&t, (lo, hi)) in self.target.iter().zip(&bx.ranges) {
            ranges[t].0 += lo;
            ranges[t].1 += hi;
        }
        SearchBox::new(ranges)
    }
}

/// Merges variables whose columns (the list of `(constraint, coefficient)`
/// memberships) coincide; the lowest index survives. Since every variable
/// is only bounded below by 0, `x_i + x_j` can stand in for both.
pub fn merge_pattern_variables(
    inst: &IlpInstance,
) -> Result<(IlpInstance, ReductionReport, MergeMap)> {
    inst.validate()?;
    for (v, b) in inst.bounds.iter().enumerate() {
        if b.upper.is_some() {
            return Err(Error::invalid(format!(
                "variable {v} has an upper bound, so merging it is unsound"
            )));
        }
        if b.lower.as_ref().is_none_or(|l| !l.is_zero()) {
            return Err(Error::invalid(format!(
                "variable {v} must have lower bound 0"
            )));
        }
    }
    let n = inst.num_vars;
    let mut columns: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); n];
    for (ci, c) in inst.constraints.iter().enumerate() {
        for (v, a) in &c.coeffs {
            columns[*v].push((ci, a));
        }
    }
    let mut class_of: HashMap<&[(usize, &BigInt)], usize> = HashMap::new();
    let mut target = Vec::with_capacity(n);
    let mut survivor = Vec::with_capacity(n);
    for col in &columns {
        let next = class_of.len();
        let t = *class_of.entry(col.as_slice()).or_insert(next);
        survivor.push(t == next);
        target.push(t);
    }
    let map = MergeMap { target, survivor };
    let constraints = inst
        .constraints
        .iter()
        .map(|c| Constraint {
            coeffs: c
                .coeffs
                .iter()
                .filter(|(v, _)| map.survivor[*v])
                .map(|(v, a)| (map.target[*v], a.clone()))
                .collect(),
            rel: c.rel,
            rhs: c.rhs.clone(),
        })
        .collect();
    let out = IlpInstance {
        num_vars: map.num_merged(),
        constraints,
        bounds: vec![VarBounds::default(); map.num_merged()],
    };
    let mut report = ReductionReport::new("merge_pattern_variables", inst.stats());
    let merged = n - out.num_vars;
    report.step(
        "same-pattern",
        0,
        merged as i64,
        format!("merged {merged} variables into equal columns"),
    );
    let var_map = (0..n).filter(|&v| map.survivor[v]).collect();
    report.stats_after = out.stats();
    report.var_map = var_map;
    Ok((out, report, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;
    use crate::oracle::{solve_feasibility, DEFAULT_NODE_CAP};

    #[test]
    fn duplicates_collapse() {
        let inst = IlpInstance::new(
            2,
            vec![
                Constraint::ge([(0, 1), (1, 1)], 1),
                Constraint::ge([(1, 1), (0, 1)], 1),
                Constraint::ge([(0, 1), (1, 1)], 1),
            ],
        );
        let (out, rep) = dedup_constraints(&inst).unwrap();
        assert_eq!(out.constraints.len(), 1);
        assert!(rep.is_consistent());
    }

    #[test]
    fn saturated_two_variable_family() {
        let mut cons = Vec::new();
        for v in 0..2 {
            for a in -1..=1 {
                for rel in [Relation::Le, Relation::Ge, Relation::Eq] {
                    for b in -1..=1 {
                        cons.push(Constraint::new([(v, a)], rel, b));
                    }
                }
            }
        }
        assert_eq!(cons.len(), 54);
        let inst = IlpInstance::new(2, cons);
        let (out, _) = dedup_constraints(&inst).unwrap();
        let bound = dedup_bound(2, 1, &BigInt::one());
        assert_eq!(bound, BigInt::from(54));
        // zero coefficients collapse to 9 constant constraints
        assert_eq!(out.constraints.len(), 45);
    }

    #[test]
    fn equal_columns_merge_and_lift() {
        let inst = IlpInstance::new(
            3,
            vec![
                Constraint::eq([(0, 1), (1, 1), (2, 2)], 3),
                Constraint::le([(0, 2), (1, 2)], 2),
            ],
        );
        let (out, rep, map) = merge_pattern_variables(&inst).unwrap();
        assert_eq!(out.num_vars, 2);
        assert_eq!(map.target, vec![0, 0, 1]);
        assert!(rep.is_consistent());
        let bx = SearchBox::uniform(3, 0, 3);
        let a = solve_feasibility(&inst, &bx, DEFAULT_NODE_CAP).unwrap();
        let b = solve_feasibility(&out, &map.merge_box(&bx), DEFAULT_NODE_CAP).unwrap();
        assert_eq!(a.decision, b.decision);
        let lifted = map.lift(b.witness.as_ref().unwrap());
        assert!(inst.is_feasible(&lifted));
        assert!(out.is_feasible(&map.collapse(a.witness.as_ref().unwrap())));
    }

    #[test]
    fn upper_bounds_are_rejected() {
        let mut inst = IlpInstance::new(1, vec![]);
        inst.bounds[0].upper = Some(BigInt::one());
        assert!(merge_pattern_variables(&inst).is_err());
    }
}
