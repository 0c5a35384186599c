//! Bounded exact deciders used as ground truth.
//!
//! All entry points share one engine (see [`crate::search`]): a depth-first
//! enumeration of a finite box in lexicographic order with interval
//! propagation. `node_cap` bounds the number of visited search nodes, so a
//! verdict is either exact or an explicit [`Error::SearchSpaceExceeded`].
//! Every YES witness is re-checked against the raw input before it is
//! returned.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{CoverPackInstance, IlpInstance, Sense};
use crate::search::{CoverCost, Engine, LeRow};
use crate::table::TableInstance;

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

/// Inclusive per-variable ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBox {
    pub ranges: Vec<(BigInt, BigInt)>,
}

impl SearchBox {
    pub fn new(ranges: Vec<(BigInt, BigInt)>) -> Self {
        SearchBox { ranges }
    }

    pub fn uniform(n: usize, lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        let (lo, hi) = (lo.into(), hi.into());
        SearchBox {
            ranges: vec![(lo, hi); n],
        }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        x.len() == self.ranges.len()
            && x.iter()
                .zip(&self.ranges)
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Number of integer points, saturating.
    pub fn points(&self) -> u128 {
        crate::search::box_points(&self.ranges)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Yes,
    No,
}

impl Decision {
    pub fn from_bool(yes: bool) -> Self {
        if yes {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub decision: Decision,
    pub witness: Option<Vec<BigInt>>,
    pub nodes_explored: u64,
}

impl OracleVerdict {
    pub fn is_yes(&self) -> bool {
        self.decision.is_yes()
    }

    fn from_search(witness: Option<Vec<BigInt>>, nodes: u64) -> Self {
        OracleVerdict {
            decision: Decision::from_bool(witness.is_some()),
            witness,
            nodes_explored: nodes,
        }
    }
}

fn clip_to_bounds(inst: &IlpInstance, bx: &SearchBox) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    if bx.len() != inst.num_vars {
        return Err(Error::invalid(format!(
            "box has {} ranges for {} variables",
            bx.len(),
            inst.num_vars
        )));
    }
    let mut lo = Vec::with_capacity(inst.num_vars);
    let mut hi = Vec::with_capacity(inst.num_vars);
    for ((l, h), b) in bx.ranges.iter().zip(&inst.bounds) {
        lo.push(
            b.lower
                .as_ref()
                .map_or_else(|| l.clone(), |bl| bl.max(l).clone()),
        );
        hi.push(
            b.upper
                .as_ref()
                .map_or_else(|| h.clone(), |bu| bu.min(h).clone()),
        );
    }
    Ok((lo, hi))
}

fn engine_for(inst: &IlpInstance, bx: &SearchBox, node_cap: u64) -> Result<Engine> {
    inst.validate()?;
    let (lo, hi) = clip_to_bounds(inst, bx)?;
    let rows = inst
        .constraints
        .iter()
        .flat_map(LeRow::from_constraint)
        .collect();
    Ok(Engine::new(lo, hi, rows, None, node_cap))
}

/// Decides whether some integer point of `bx` (intersected with the
/// instance's own bounds) satisfies every constraint. The witness is the
/// lexicographically smallest such point.
pub fn solve_feasibility(
    inst: &IlpInstance,
    bx: &SearchBox,
    node_cap: u64,
) -> Result<OracleVerdict> {
    let mut engine = engine_for(inst, bx, node_cap)?;
    let witness = engine.first()?;
    if let Some(x) = &witness {
        if !inst.is_feasible(x) || !bx.contains(x) {
            return Err(Error::Internal(format!(
                "feasibility witness {x:?} fails re-verification"
            )));
        }
    }
    Ok(OracleVerdict::from_search(witness, engine.nodes()))
}

/// Visits every feasible point of the box in lexicographic order and
/// returns the number of search nodes used.
pub fn for_each_feasible(
    inst: &IlpInstance,
    bx: &SearchBox,
    node_cap: u64,
    mut visit: impl FnMut(&[BigInt]),
) -> Result<u64> {
    let mut engine = engine_for(inst, bx, node_cap)?;
    let mut bad = None;
    engine.run(&mut |x| {
        if !inst.is_feasible(x) {
            bad = Some(x.to_vec());
            return false;
        }
        visit(x);
        true
    })?;
    if let Some(x) = bad {
        return Err(Error::Internal(format!(
            "enumerated point {x:?} fails re-verification"
        )));
    }
    Ok(engine.nodes())
}

/// Decides a covering program `Ax ≥ b, cᵀx ≤ k` by enumeration with each
/// variable limited to `0..=⌊k/cᵢ⌋`, values tried from the top down (the
/// witness is the lexicographically largest solution). Zero-cost variables
/// without an upper bound are removed together with their constraints, since
/// raising them satisfies those constraints for free.
pub fn solve_cover(inst: &CoverPackInstance, node_cap: u64) -> Result<OracleVerdict> {
    inst.validate()?;
    if inst.sense != Sense::Cover {
        return Err(Error::invalid("solve_cover called on a packing instance"));
    }
    let n = inst.num_vars;
    let free_var: Vec<bool> = (0..n)
        .map(|v| inst.cost[v].is_zero() && inst.upper[v].is_none())
        .collect();
    let mut free_value = vec![BigInt::zero(); n];
    let lo = vec![BigInt::zero(); n];
    let mut hi = Vec::with_capacity(n);
    for v in 0..n {
        let cap = if free_var[v] {
            BigInt::zero()
        } else if inst.cost[v].is_zero() {
            inst.upper[v].clone().expect("bounded zero-cost variable")
        } else {
            let by_budget = inst.budget.div_floor(&inst.cost[v]);
            match &inst.upper[v] {
                Some(u) => by_budget.min(u.clone()),
                None => by_budget,
            }
        };
        hi.push(cap);
    }
    let mut rows = Vec::new();
    let mut cover_rows = Vec::new();
    for c in &inst.constraints {
        if c.coeffs.iter().any(|(v, _)| free_var[*v]) {
            for (v, a) in c.coeffs.iter().filter(|(v, _)| free_var[*v]) {
                let need = c.rhs.div_ceil(a);
                if need > free_value[*v] {
                    free_value[*v] = need;
                }
            }
            continue;
        }
        rows.extend(LeRow::from_constraint(c));
        cover_rows.push((c.coeffs.clone(), c.rhs.clone()));
    }
    rows.push(LeRow {
        terms: inst
            .cost
            .iter()
            .enumerate()
            .filter(|(v, c)| !c.is_zero() && !free_var[*v])
            .map(|(v, c)| (v, c.clone()))
            .collect(),
        rhs: inst.budget.clone(),
    });
    let cost = CoverCost {
        cost: inst.cost.clone(),
        budget: inst.budget.clone(),
        rows: cover_rows,
    };
    let mut engine = Engine::new(lo, hi, rows, Some(cost), node_cap).descending();
    let witness = engine.first()?.map(|mut x| {
        for v in 0..n {
            if free_var[v] {
                x[v] = free_value[v].clone();
            }
        }
        x
    });
    if let Some(x) = &witness {
        if !inst.is_solution(x) {
            return Err(Error::Internal(format!(
                "cover witness {x:?} fails re-verification"
            )));
        }
    }
    Ok(OracleVerdict::from_search(witness, engine.nodes()))
}

/// Decides a packing program `Ax ≤ b, cᵀx ≥ k` over `{0..k}ⁿ`. Feasible sets
/// are downward closed, so zero-cost variables are fixed to 0.
pub fn solve_packing(inst: &CoverPackInstance, node_cap: u64) -> Result<OracleVerdict> {
    inst.validate()?;
    if inst.sense != Sense::Packing {
        return Err(Error::invalid(
            "solve_packing called on a covering instance",
        ));
    }
    let n = inst.num_vars;
    let lo = vec![BigInt::zero(); n];
    let hi = (0..n)
        .map(|v| {
            if inst.cost[v].is_zero() {
                BigInt::zero()
            } else {
                match &inst.upper[v] {
                    Some(u) => u.min(&inst.budget).clone(),
                    None => inst.budget.clone(),
                }
            }
        })
        .collect();
    let mut rows: Vec<LeRow> = inst
        .constraints
        .iter()
        .flat_map(LeRow::from_constraint)
        .collect();
    rows.push(LeRow {
        terms: inst
            .cost
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_positive())
            .map(|(v, c)| (v, -c))
            .collect(),
        rhs: -&inst.budget,
    });
    let mut engine = Engine::new(lo, hi, rows, None, node_cap);
    let witness = engine.first()?;
    if let Some(x) = &witness {
        if !inst.is_solution(x) {
            return Err(Error::Internal(format!(
                "packing witness {x:?} fails re-verification"
            )));
        }
    }
    Ok(OracleVerdict::from_search(witness, engine.nodes()))
}

/// Dispatches on the instance sense.
pub fn solve(inst: &CoverPackInstance, node_cap: u64) -> Result<OracleVerdict> {
    match inst.sense {
        Sense::Cover => solve_cover(inst, node_cap),
        Sense::Packing => solve_packing(inst, node_cap),
    }
}

/// Decides a compressed instance: a point of `{0..k}ⁿ` within budget whose
/// projection onto every table scope is marked feasible.
pub fn solve_table(inst: &TableInstance, node_cap: u64) -> Result<OracleVerdict> {
    inst.validate()?;
    let (witness, nodes) = crate::table::search(inst, node_cap)?;
    if let Some(x) = &witness {
        if !inst.is_solution(x) {
            return Err(Error::Internal(format!(
                "table witness {x:?} fails re-verification"
            )));
        }
    }
    let witness = witness.map(|x| x.into_iter().map(BigInt::from).collect());
    Ok(OracleVerdict::from_search(witness, nodes))
}
