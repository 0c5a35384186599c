//! Depth-first search over a finite integer box with interval bound
//! propagation.
//!
//! Branching is on variables in index order with values ascending, and
//! propagation only removes values that cannot be part of any solution, so
//! the first solution found is the lexicographically smallest feasible point
//! of the box. A node is one visited search state: the root plus every
//! branching assignment.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Constraint, Relation};

/// `Σ aᵢ xᵢ ≤ rhs`.
#[derive(Clone, Debug)]
pub(crate) struct LeRow {
    pub terms: Vec<(usize, BigInt)>,
    pub rhs: BigInt,
}

impl LeRow {
    /// Rewrites one constraint as one or two `≤` rows.
    pub fn from_constraint(c: &Constraint) -> Vec<LeRow> {
        let le = || LeRow {
            terms: c.coeffs.clone(),
            rhs: c.rhs.clone(),
        };
        let ge = || LeRow {
            terms: c.coeffs.iter().map(|(v, a)| (*v, -a)).collect(),
            rhs: -&c.rhs,
        };
        match c.rel {
            Relation::Le => vec![le()],
            Relation::Ge => vec![ge()],
            Relation::Eq => vec![le(), ge()],
        }
    }
}

/// Budget side of a covering program, used for a lower bound on the cost of
/// any completion.
#[derive(Clone, Debug)]
pub(crate) struct CoverCost {
    pub cost: Vec<BigInt>,
    pub budget: BigInt,
    /// The covering rows `Σ aᵢ xᵢ ≥ b` with nonnegative data.
    pub rows: Vec<(Vec<(usize, BigInt)>, BigInt)>,
}

pub(crate) struct Engine {
    n: usize,
    rows: Vec<LeRow>,
    occ: Vec<Vec<usize>>,
    cover: Option<CoverCost>,
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
    trail: Vec<(usize, BigInt, BigInt)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    nodes: u64,
    cap: u64,
    descending: bool,
    // scratch for the cover bound
    stamp: Vec<u32>,
    epoch: u32,
}

impl Engine {
    pub fn new(
        lo: Vec<BigInt>,
        hi: Vec<BigInt>,
        rows: Vec<LeRow>,
        cover: Option<CoverCost>,
        cap: u64,
    ) -> Self {
        let n = lo.len();
        debug_assert_eq!(n, hi.len());
        let mut occ = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for (v, _) in &row.terms {
                occ[*v].push(i);
            }
        }
        let m = rows.len();
        Engine {
            n,
            rows,
            occ,
            cover,
            lo,
            hi,
            trail: Vec::new(),
            queue: VecDeque::new(),
            queued: vec![false; m],
            nodes: 0,
            cap,
            descending: false,
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    /// Tries values from the top of each range down, so the first point
    /// found is the lexicographically largest.
    pub fn descending(mut self) -> Self {
        self.descending = true;
        self
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    /// Lexicographically first feasible point of the box.
    pub fn first(&mut self) -> Result<Option<Vec<BigInt>>> {
        let mut found = None;
        self.run(&mut |x| {
            found = Some(x.to_vec());
            false
        })?;
        Ok(found)
    }

    /// Calls `visit` on feasible points in lexicographic order until it
    /// returns `false`.
    pub fn run(&mut self, visit: &mut dyn FnMut(&[BigInt]) -> bool) -> Result<()> {
        self.count_node()?;
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) {
            return Ok(());
        }
        self.queue.clear();
        self.queued.iter_mut().for_each(|q| *q = false);
        for i in 0..self.rows.len() {
            self.enqueue(i);
        }
        if !self.propagate() {
            return Ok(());
        }
        self.dfs(0, visit).map(|_| ())
    }

    fn count_node(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::SearchSpaceExceeded { cap: self.cap });
        }
        Ok(())
    }

    /// Returns `true` when the visitor asked to stop.
    fn dfs(&mut self, from: usize, visit: &mut dyn FnMut(&[BigInt]) -> bool) -> Result<bool> {
        let Some(v) = (from..self.n).find(|&v| self.lo[v] < self.hi[v]) else {
            if self.leaf_ok() {
                return Ok(!visit(&self.lo));
            }
            return Ok(false);
        };
        let (bottom, top) = (self.lo[v].clone(), self.hi[v].clone());
        let mut val = if self.descending {
            top.clone()
        } else {
            bottom.clone()
        };
        while bottom <= val && val <= top {
            self.count_node()?;
            let mark = self.trail.len();
            self.set(v, val.clone(), val.clone());
            if self.propagate() && self.dfs(v + 1, visit)? {
                return Ok(true);
            }
            self.undo(mark);
            if self.descending {
                val -= 1;
            } else {
                val += 1;
            }
        }
        Ok(false)
    }

    fn leaf_ok(&self) -> bool {
        self.rows.iter().all(|r| {
            let lhs: BigInt = r.terms.iter().map(|(v, a)| a * &self.lo[*v]).sum();
            lhs <= r.rhs
        })
    }

    fn set(&mut self, v: usize, lo: BigInt, hi: BigInt) {
        let old_lo = std::mem::replace(&mut self.lo[v], lo);
        let old_hi = std::mem::replace(&mut self.hi[v], hi);
        self.trail.push((v, old_lo, old_hi));
        for i in 0..self.occ[v].len() {
            let r = self.occ[v][i];
            self.enqueue(r);
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, lo, hi) = self.trail.pop().expect("trail entry");
            self.lo[v] = lo;
            self.hi[v] = hi;
        }
        for &r in &self.queue {
            self.queued[r] = false;
        }
        self.queue.clear();
    }

    fn enqueue(&mut self, r: usize) {
        if !self.queued[r] {
            self.queued[r] = true;
            self.queue.push_back(r);
        }
    }

    fn tighten_hi(&mut self, v: usize, hi: BigInt) -> bool {
        if hi < self.hi[v] {
            let lo = self.lo[v].clone();
            self.set(v, lo, hi);
        }
        self.lo[v] <= self.hi[v]
    }

    fn tighten_lo(&mut self, v: usize, lo: BigInt) -> bool {
        if lo > self.lo[v] {
            let hi = self.hi[v].clone();
            self.set(v, lo, hi);
        }
        self.lo[v] <= self.hi[v]
    }

    /// Runs rows to a fixpoint (or until the work budget is spent, which
    /// only weakens pruning). Returns `false` on a wipe-out.
    fn propagate(&mut self) -> bool {
        let mut budget = 64 * (self.rows.len() + self.n) + 4096;
        loop {
            while let Some(r) = self.queue.pop_front() {
                self.queued[r] = false;
                if budget == 0 {
                    continue;
                }
                budget -= 1;
                if !self.propagate_row(r) {
                    self.undo_queue();
                    return false;
                }
            }
            if self.cover.is_none() || budget == 0 {
                return true;
            }
            match self.cover_bound() {
                None => {
                    self.undo_queue();
                    return false;
                }
                Some(false) => return true,
                Some(true) => budget = budget.saturating_sub(1),
            }
        }
    }

    fn undo_queue(&mut self) {
        for &r in &self.queue {
            self.queued[r] = false;
        }
        self.queue.clear();
    }

    fn propagate_row(&mut self, r: usize) -> bool {
        let mut min_act = BigInt::zero();
        for (v, a) in &self.rows[r].terms {
            if a.is_positive() {
                min_act += a * &self.lo[*v];
            } else {
                min_act += a * &self.hi[*v];
            }
        }
        let slack = &self.rows[r].rhs - min_act;
        if slack.is_negative() {
            return false;
        }
        let len = self.rows[r].terms.len();
        for t in 0..len {
            let (v, a) = {
                let (v, a) = &self.rows[r].terms[t];
                (*v, a.clone())
            };
            if self.lo[v] == self.hi[v] {
                continue;
            }
            if a.is_positive() {
                let hi = &self.lo[v] + &slack / &a;
                if !self.tighten_hi(v, hi) {
                    return false;
                }
            } else {
                let hi = self.hi[v].clone();
                let lo = hi - &slack / (-a);
                if !self.tighten_lo(v, lo) {
                    return false;
                }
            }
        }
        true
    }

    /// Lower bound on the cost of any completion: the cost of the current
    /// lower bounds plus, for a greedy set of covering rows that share no
    /// free variable, the cheapest way to close each row's residual. Returns
    /// `None` when the bound exceeds the budget and `Some(changed)` after
    /// tightening upper bounds against the remaining slack.
    fn cover_bound(&mut self) -> Option<bool> {
        let cover = self.cover.take().expect("cover model");
        let out = self.cover_bound_with(&cover);
        self.cover = Some(cover);
        out
    }

    fn cover_bound_with(&mut self, cover: &CoverCost) -> Option<bool> {
        let mut total: BigInt = cover.cost.iter().zip(&self.lo).map(|(c, l)| c * l).sum();
        let mut needs: Vec<(BigInt, usize, usize)> = Vec::new();
        for (i, (terms, rhs)) in cover.rows.iter().enumerate() {
            let residual: BigInt =
                rhs - terms.iter().map(|(v, a)| a * &self.lo[*v]).sum::<BigInt>();
            if !residual.is_positive() {
                continue;
            }
            let mut need: Option<BigInt> = None;
            let mut free = 0;
            for (v, a) in terms {
                if self.lo[*v] == self.hi[*v] {
                    continue;
                }
                free += 1;
                let c = (&residual * &cover.cost[*v]).div_ceil(a);
                if need.as_ref().is_none_or(|n| c < *n) {
                    need = Some(c);
                }
            }
            match need {
                None => return None,
                Some(n) if n.is_positive() => needs.push((n, i, free)),
                Some(_) => {}
            }
        }
        // Any variable-disjoint selection gives a valid bound; try a few
        // greedy orders and keep the best.
        let mut best: Option<(BigInt, Vec<usize>)> = None;
        for order in 0..3 {
            match order {
                0 => needs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1))),
                1 => needs.sort_by(|a, b| (&b.0 * a.2).cmp(&(&a.0 * b.2)).then(a.1.cmp(&b.1))),
                _ => needs.sort_by(|a, b| a.2.cmp(&b.2).then(b.0.cmp(&a.0)).then(a.1.cmp(&b.1))),
            }
            let picked = self.disjoint_rows(cover, &needs);
            let sum: BigInt = picked.iter().map(|&j| &needs[j].0).sum();
            if best.as_ref().is_none_or(|(b, _)| sum > *b) {
                best = Some((sum, picked.into_iter().map(|j| needs[j].1).collect()));
            }
            if needs.len() < 2 {
                break;
            }
        }
        let mut row_need: Vec<Option<BigInt>> = vec![None; self.n];
        if let Some((sum, rows)) = best {
            total += sum;
            let need_of: std::collections::HashMap<usize, &BigInt> =
                needs.iter().map(|(n, i, _)| (*i, n)).collect();
            for i in rows {
                for (v, _) in &cover.rows[i].0 {
                    if self.lo[*v] < self.hi[*v] {
                        row_need[*v] = Some(need_of[&i].clone());
                    }
                }
            }
        }
        if total > cover.budget {
            return None;
        }
        let slack = &cover.budget - total;
        let mut updates = Vec::new();
        for v in 0..self.n {
            let c = &cover.cost[v];
            if self.lo[v] == self.hi[v] || c.is_zero() {
                continue;
            }
            let room = match &row_need[v] {
                Some(n) => &slack + n,
                None => slack.clone(),
            };
            let hi = &self.lo[v] + room / c;
            if hi < self.hi[v] {
                updates.push((v, hi));
            }
        }
        let changed = !updates.is_empty();
        for (v, hi) in updates {
            if !self.tighten_hi(v, hi) {
                return None;
            }
        }
        Some(changed)
    }
}

impl Engine {
    /// Greedy variable-disjoint subset of `needs` in the given order, by
    /// position in `needs`.
    fn disjoint_rows(&mut self, cover: &CoverCost, needs: &[(BigInt, usize, usize)]) -> Vec<usize> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut picked = Vec::new();
        for (j, (_, i, _)) in needs.iter().enumerate() {
            let terms = &cover.rows[*i].0;
            let free = |v: &usize| self.lo[*v] < self.hi[*v];
            if terms
                .iter()
                .filter(|(v, _)| free(v))
                .any(|(v, _)| self.stamp[*v] == self.epoch)
            {
                continue;
            }
            for (v, _) in terms.iter().filter(|(v, _)| free(v)) {
                self.stamp[*v] = self.epoch;
            }
            picked.push(j);
        }
        picked
    }
}

/// Number of integer points in a box, saturating at `u128::MAX`.
pub(crate) fn box_points(ranges: &[(BigInt, BigInt)]) -> u128 {
    let mut total: u128 = 1;
    for (lo, hi) in ranges {
        if hi < lo {
            return 0;
        }
        let width: BigInt = hi - lo + BigInt::one();
        let w = u128::try_from(width).unwrap_or(u128::MAX);
        total = total.saturating_mul(w);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn engine(ranges: &[(i64, i64)], cons: &[Constraint], cap: u64) -> Engine {
        let rows = cons.iter().flat_map(LeRow::from_constraint).collect();
        Engine::new(
            ranges.iter().map(|r| b(r.0)).collect(),
            ranges.iter().map(|r| b(r.1)).collect(),
            rows,
            None,
            cap,
        )
    }

    #[test]
    fn equality_is_found() {
        let mut e = engine(&[(0, 5)], &[Constraint::eq(vec![(0, 1)], 3)], 100);
        assert_eq!(e.first().unwrap(), Some(vec![b(3)]));
    }

    #[test]
    fn contradiction_is_no() {
        let cons = [
            Constraint::ge(vec![(0, 1)], 1),
            Constraint::le(vec![(0, 1)], 0),
        ];
        let mut e = engine(&[(-10, 10)], &cons, 100);
        assert_eq!(e.first().unwrap(), None);
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let cons = [Constraint::le(vec![(0, 1), (1, 1)], 2)];
        let mut e = engine(&[(0, 2), (0, 2)], &cons, 1000);
        let mut seen = Vec::new();
        e.run(&mut |x| {
            seen.push((x[0].clone(), x[1].clone()));
            true
        })
        .unwrap();
        let want: Vec<_> = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]
            .iter()
            .map(|&(p, q)| (b(p), b(q)))
            .collect();
        assert_eq!(seen, want);
    }

    #[test]
    fn cap_is_enforced() {
        let mut e = engine(&[(0, 1)], &[Constraint::le(vec![(0, 1)], 5)], 1);
        assert!(matches!(
            e.first(),
            Err(Error::SearchSpaceExceeded { cap: 1 })
        ));
    }

    #[test]
    fn points_saturate() {
        assert_eq!(box_points(&[(b(0), b(1)), (b(0), b(2))]), 6);
        assert_eq!(box_points(&[(b(1), b(0))]), 0);
        let huge = (b(0), BigInt::from(u128::MAX) * 4);
        assert_eq!(box_points(&[huge]), u128::MAX);
    }
}
