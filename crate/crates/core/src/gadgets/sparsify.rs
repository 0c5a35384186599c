use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::model::{Constraint, IlpInstance, Relation, VarBounds};
use crate::oracle::SearchBox;
use crate::report::ReductionReport;

/// Where a variable of the sparsified instance comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarOrigin {
    Original,
    /// `Σ_{i<prefix_len} αᵢxᵢ` over the first terms of an input constraint.
    PartialSum {
        constraint: usize,
        prefix_len: usize,
    },
    /// Equal to another variable.
    Copy(usize),
}

#[derive(Clone, Debug)]
pub struct Sparsified {
    pub instance: IlpInstance,
    /// One entry per output variable; the first `n` are the input variables.
    pub origins: Vec<VarOrigin>,
    pub report: ReductionReport,
    source: IlpInstance,
}

/// Rewrites a general instance so that every constraint has at most three
/// variables and every variable occurs in at most three constraints.
///
/// A constraint `Σ_{i=1..d} αᵢxᵢ ◀ b` with `d > 3` becomes
/// `s₂ = α₁x₁ + α₂x₂`, `s_j = s_{j−1} + α_j x_j` for `j < d`, and
/// `s_{d−1} + α_d x_d ◀ b`. A variable used more than three times keeps
/// its first two uses and hands each later use to a fresh copy, chained by
/// `x = c₁, c₁ = c₂, …`. The new variables are free and determined by the
/// input variables, so the result is equisatisfiable.
pub fn sparsify_3(inst: &IlpInstance) -> Result<Sparsified> {
    inst.validate()?;
    let n = inst.num_vars;
    let mut origins = vec![VarOrigin::Original; n];
    let mut bounds = inst.bounds.clone();
    let mut cons: Vec<Constraint> = Vec::new();
    let mut split = 0usize;

    let fresh = |origin: VarOrigin, origins: &mut Vec<VarOrigin>, bounds: &mut Vec<VarBounds>| {
        origins.push(origin);
        bounds.push(VarBounds::free());
        origins.len() - 1
    };

    for (ci, c) in inst.constraints.iter().enumerate() {
        let d = c.coeffs.len();
        if d <= 3 {
            cons.push(c.clone());
            continue;
        }
        split += 1;
        let terms = &c.coeffs;
        let mut prev = fresh(
            VarOrigin::PartialSum {
                constraint: ci,
                prefix_len: 2,
            },
            &mut origins,
            &mut bounds,
        );
        cons.push(Constraint::new(
            [
                (prev, BigInt::from(1)),
                (terms[0].0, -&terms[0].1),
                (terms[1].0, -&terms[1].1),
            ],
            Relation::Eq,
            0,
        ));
        for (j, (v, a)) in terms.iter().enumerate().take(d - 1).skip(2) {
            let s = fresh(
                VarOrigin::PartialSum {
                    constraint: ci,
                    prefix_len: j + 1,
                },
                &mut origins,
                &mut bounds,
            );
            cons.push(Constraint::new(
                [(s, BigInt::from(1)), (prev, BigInt::from(-1)), (*v, -a)],
                Relation::Eq,
                0,
            ));
            prev = s;
        }
        let (v, a) = &terms[d - 1];
        cons.push(Constraint::new(
            [(prev, BigInt::from(1)), (*v, a.clone())],
            c.rel,
            c.rhs.clone(),
        ));
    }
    let after_split = origins.len();

    let mut uses: Vec<Vec<usize>> = vec![Vec::new(); origins.len()];
    for (ci, c) in cons.iter().enumerate() {
        for (v, _) in &c.coeffs {
            uses[*v].push(ci);
        }
    }
    let mut chains = Vec::new();
    for (v, list) in uses.iter().enumerate() {
        if list.len() <= 3 {
            continue;
        }
        let mut prev = v;
        for &ci in &list[2..] {
            let copy = fresh(VarOrigin::Copy(v), &mut origins, &mut bounds);
            for term in cons[ci].coeffs.iter_mut() {
                if term.0 == v {
                    term.0 = copy;
                }
            }
            chains.push(Constraint::eq([(prev, 1), (copy, -1)], 0));
            prev = copy;
        }
    }
    let copies = origins.len() - after_split;
    let chain_count = chains.len();
    cons.extend(chains);
    // renaming may break the sorted-coefficient invariant
    for c in &mut cons {
        c.coeffs.sort_by_key(|(v, _)| *v);
    }

    let instance = IlpInstance {
        num_vars: origins.len(),
        constraints: cons,
        bounds,
    };
    let mut report = ReductionReport::new("sparsify_3", inst.stats());
    let added = instance.constraints.len() - inst.constraints.len() - chain_count;
    report.step(
        "partial-sums",
        -(added as i64),
        -((after_split - n) as i64),
        format!("split {split} constraints with more than 3 variables"),
    );
    report.step(
        "variable-copies",
        -(chain_count as i64),
        -(copies as i64),
        format!("{copies} copies for variables used more than 3 times"),
    );
    report.finish_ilp(&instance);
    Ok(Sparsified {
        instance,
        origins,
        report,
        source: inst.clone(),
    })
}

impl Sparsified {
    /// Extends a box over the input variables by interval arithmetic on the
    /// partial sums and copies.
    pub fn extend_box(&self, bx: &SearchBox) -> Result<SearchBox> {
        let n = self.source.num_vars;
        if bx.len() != n {
            return Err(Error::invalid(format!(
                "box has {} ranges for {n} variables",
                bx.len()
            )));
        }
        let mut ranges = bx.ranges.clone();
        for origin in &self.origins[n..] {
            let range = match origin {
                VarOrigin::Original => unreachable!("original variables come first"),
                VarOrigin::PartialSum {
                    constraint,
                    prefix_len,
                } => {
                    let mut lo = BigInt::from(0);
                    let mut hi = BigInt::from(0);
                    for (v, a) in &self.source.constraints[*constraint].coeffs[..*prefix_len] {
                        let (l, h) = &bx.ranges[*v];
                        let (x, y) = (a * l, a * h);
                        if x <= y {
                            lo += x;
                            hi += y;
                        } else {
                            lo += y;
                            hi += x;
                        }
                    }
                    (lo, hi)
                }
                VarOrigin::Copy(v) => ranges[*v].clone(),
            };
            ranges.push(range);
        }
        Ok(SearchBox::new(ranges))
    }

    /// Computes the values of the new variables from an input assignment.
    pub fn extend_witness(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = x.to_vec();
        for origin in &self.origins[x.len()..] {
            let value = match origin {
                VarOrigin::Original => unreachable!("original variables come first"),
                VarOrigin::PartialSum {
                    constraint,
                    prefix_len,
                } => self.source.constraints[*constraint].coeffs[..*prefix_len]
                    .iter()
                    .map(|(v, a)| a * &x[*v])
                    .sum(),
                VarOrigin::Copy(v) => out[*v].clone(),
            };
            out.push(value);
        }
        out
    }

    /// Restricts an output assignment to the input variables.
    pub fn lift_witness(&self, y: &[BigInt]) -> Vec<BigInt> {
        y[..self.source.num_vars].to_vec()
    }
}
