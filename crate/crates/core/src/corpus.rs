//! Seeded random instance generators for equivalence sweeps. Every
//! generator is a pure function of its parameters and the RNG state, and
//! [`corpus_rng`] gives each instance of a corpus its own ChaCha stream, so
//! a `(seed, index)` pair always reproduces the same instance.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Constraint, CoverPackInstance, GraphInstance, HittingSetInstance, IlpInstance, Sense,
    SubsetSumInstance,
};
use crate::oracle::SearchBox;

pub fn corpus_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Parameters for random covering or packing instances. Scope sizes are
/// drawn from `1..=r`; no variable is placed in more than `q` constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPackParams {
    pub sense: Sense,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub q: usize,
    pub k: u64,
    pub max_coeff: u64,
    pub max_rhs: u64,
    /// Costs are drawn from `0..=max_cost`.
    pub max_cost: u64,
    pub min_cost: u64,
}

impl CoverPackParams {
    pub fn cover(n: usize, m: usize, r: usize, k: u64) -> Self {
        CoverPackParams {
            sense: Sense::Cover,
            n,
            m,
            r,
            q: usize::MAX,
            k,
            max_coeff: 2,
            max_rhs: 3,
            max_cost: 2,
            min_cost: 1,
        }
    }

    pub fn packing(n: usize, m: usize, r: usize, q: usize, k: u64) -> Self {
        CoverPackParams {
            sense: Sense::Packing,
            n,
            m,
            r,
            q,
            k,
            max_coeff: 2,
            max_rhs: 3,
            max_cost: 2,
            min_cost: 1,
        }
    }

    pub fn generate(&self, rng: &mut impl Rng) -> CoverPackInstance {
        let mut load = vec![0usize; self.n];
        let mut cons = Vec::with_capacity(self.m);
        for _ in 0..self.m {
            let open: Vec<usize> = (0..self.n).filter(|&v| load[v] < self.q).collect();
            if open.is_empty() {
                break;
            }
            let d = rng.gen_range(1..=self.r.min(open.len()).max(1));
            let scope: Vec<usize> = open.choose_multiple(rng, d).copied().collect();
            for &v in &scope {
                load[v] += 1;
            }
            let terms: Vec<(usize, u64)> = scope
                .iter()
                .map(|&v| (v, rng.gen_range(1..=self.max_coeff)))
                .collect();
            let rhs = rng.gen_range(0..=self.max_rhs);
            cons.push(Constraint::new(terms, self.sense.relation(), rhs));
        }
        let cost = (0..self.n)
            .map(|_| BigInt::from(rng.gen_range(self.min_cost..=self.max_cost)))
            .collect();
        CoverPackInstance::new(self.sense, self.n, cons, cost, self.k)
    }
}

/// Random general instance over `0 ≤ x_i ≤ box_hi` with coefficients in
/// `[−max_coeff, max_coeff]`, plus its box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralParams {
    pub max_n: usize,
    pub max_m: usize,
    pub max_coeff: i64,
    pub max_rhs: i64,
    pub box_hi: i64,
}

impl Default for GeneralParams {
    fn default() -> Self {
        GeneralParams {
            max_n: 5,
            max_m: 4,
            max_coeff: 2,
            max_rhs: 4,
            box_hi: 2,
        }
    }
}

impl GeneralParams {
    pub fn generate(&self, rng: &mut impl Rng) -> (IlpInstance, SearchBox) {
        let n = rng.gen_range(1..=self.max_n);
        let m = rng.gen_range(1..=self.max_m);
        let mut cons = Vec::with_capacity(m);
        for _ in 0..m {
            let mut terms = Vec::new();
            for v in 0..n {
                if rng.gen_bool(0.7) {
                    let mut a = rng.gen_range(1..=self.max_coeff);
                    if rng.gen_bool(0.5) {
                        a = -a;
                    }
                    terms.push((v, a));
                }
            }
            let rel = *[
                crate::model::Relation::Le,
                crate::model::Relation::Ge,
                crate::model::Relation::Eq,
            ]
            .choose(rng)
            .expect("nonempty");
            let rhs = rng.gen_range(-self.max_rhs..=self.max_rhs);
            cons.push(Constraint::new(terms, rel, rhs));
        }
        (
            IlpInstance::new(n, cons),
            SearchBox::uniform(n, 0, self.box_hi),
        )
    }
}

/// `G(n, p)` with the given target size.
pub fn random_graph(rng: &mut impl Rng, n: usize, edge_prob: f64, k: usize) -> GraphInstance {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    GraphInstance::new(n, edges, k.min(n)).expect("generated graph is valid")
}

pub fn random_subset_sum(rng: &mut impl Rng, max_n: usize, max_target: u64) -> SubsetSumInstance {
    let n = rng.gen_range(1..=max_n);
    let target = rng.gen_range(0..=max_target);
    let values = (0..n)
        .map(|_| BigInt::from(rng.gen_range(0..=max_target + 5)))
        .collect();
    let k = rng.gen_range(1..=n.min(4));
    SubsetSumInstance {
        values,
        target: BigInt::from(target),
        k,
    }
}

pub fn random_hitting_set(
    rng: &mut impl Rng,
    universe: usize,
    sets: usize,
    max_size: usize,
    k: usize,
) -> HittingSetInstance {
    let elements: Vec<usize> = (0..universe).collect();
    let sets = (0..sets)
        .map(|_| {
            let d = rng.gen_range(1..=max_size.min(universe));
            let chosen: BTreeSet<usize> = elements.choose_multiple(rng, d).copied().collect();
            chosen.into_iter().collect()
        })
        .collect();
    HittingSetInstance { universe, sets, k }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let p = CoverPackParams::cover(8, 6, 3, 2);
        let a = p.generate(&mut corpus_rng(7, 3));
        let b = p.generate(&mut corpus_rng(7, 3));
        let c = p.generate(&mut corpus_rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.validate().unwrap();
    }

    #[test]
    fn packing_respects_q() {
        let p = CoverPackParams::packing(6, 10, 3, 2, 2);
        for i in 0..20 {
            let inst = p.generate(&mut corpus_rng(1, i));
            let s = inst.stats();
            assert!(s.q <= 2 && s.r <= 3);
        }
    }
}
