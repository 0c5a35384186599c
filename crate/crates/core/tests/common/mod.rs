//! Deciders written independently of the library's search engine: plain
//! exhaustive enumeration with no propagation or pruning beyond the budget.

#![allow(dead_code)]

use ilpk::{
    CoverPackInstance, GraphInstance, HittingSetInstance, IlpInstance, SearchBox, Sense,
    SubsetSumInstance,
};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Every point of the box in lexicographic order.
pub fn box_points(bx: &SearchBox) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for (lo, hi) in &bx.ranges {
        let lo = lo.to_i64().unwrap();
        let hi = hi.to_i64().unwrap();
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo..=hi {
                let mut p = prefix.clone();
                p.push(BigInt::from(v));
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn naive_feasible(inst: &IlpInstance, bx: &SearchBox) -> bool {
    box_points(bx).iter().any(|x| inst.is_feasible(x))
}

/// Enumerates `x ∈ ∏ {0..min(k, uᵢ)}` (zero-cost variables up to a given
/// ceiling) and checks `is_solution`.
pub fn naive_cover_pack(inst: &CoverPackInstance, zero_cost_ceiling: u64) -> bool {
    let k = inst.budget.to_u64().unwrap();
    let ranges = (0..inst.num_vars)
        .map(|v| {
            let mut hi = if inst.cost[v].is_zero() && inst.sense == Sense::Cover {
                zero_cost_ceiling
            } else {
                k
            };
            if let Some(u) = &inst.upper[v] {
                hi = hi.min(u.to_u64().unwrap());
            }
            (BigInt::zero(), BigInt::from(hi))
        })
        .collect();
    let mut x = vec![BigInt::zero(); inst.num_vars];
    rec(inst, &SearchBox::new(ranges), 0, &mut x)
}

fn rec(inst: &CoverPackInstance, bx: &SearchBox, v: usize, x: &mut Vec<BigInt>) -> bool {
    if v == x.len() {
        return inst.is_solution(x);
    }
    let hi = bx.ranges[v].1.to_i64().unwrap();
    for val in 0..=hi {
        x[v] = BigInt::from(val);
        if inst.sense == Sense::Cover && inst.objective(x) > inst.budget {
            break;
        }
        if rec(inst, bx, v + 1, x) {
            return true;
        }
    }
    x[v] = BigInt::zero();
    false
}

pub fn independent_set_exists(g: &GraphInstance) -> bool {
    (0u32..1 << g.n).any(|mask| {
        mask.count_ones() as usize >= g.k
            && g.edges
                .iter()
                .all(|&(u, v)| mask >> u & 1 == 0 || mask >> v & 1 == 0)
    })
}

/// Some at most `k` of the values sum to exactly the target.
pub fn subset_sum_exists(s: &SubsetSumInstance) -> bool {
    let n = s.values.len();
    (0u32..1 << n).any(|mask| {
        mask.count_ones() as usize <= s.k
            && (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &s.values[i])
                .sum::<BigInt>()
                == s.target
    })
}

pub fn hitting_set_exists(h: &HittingSetInstance) -> bool {
    (0u32..1 << h.universe).any(|mask| {
        mask.count_ones() as usize <= h.k
            && h.sets.iter().all(|s| s.iter().any(|&e| mask >> e & 1 == 1))
    })
}

/// Row-sparseness once zero-cost variables are fixed (constraints with an
/// unbounded zero-cost variable vanish, bounded ones leave the row).
pub fn r_after_zero_cost_cleanup(inst: &CoverPackInstance) -> usize {
    inst.constraints
        .iter()
        .filter(|c| {
            !c.coeffs
                .iter()
                .any(|(v, _)| inst.cost[*v].is_zero() && inst.upper[*v].is_none())
        })
        .map(|c| {
            c.coeffs
                .iter()
                .filter(|(v, _)| !inst.cost[*v].is_zero())
                .count()
        })
        .max()
        .unwrap_or(0)
}
