use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::model::{
    Constraint, CoverPackInstance, GraphInstance, HittingSetInstance, Sense, SubsetSumInstance,
};

/// `x_u + x_v ≤ 1` per edge, unit costs, budget `k`. Isolated vertices get
/// `x_v ≤ 1` so that every variable is a 0/1 choice.
pub fn independent_set_to_packing(g: &GraphInstance) -> Result<CoverPackInstance> {
    g.validate()?;
    let mut degree = vec![0usize; g.n];
    let mut cons = Vec::with_capacity(g.edges.len());
    for &(u, v) in &g.edges {
        degree[u] += 1;
        degree[v] += 1;
        cons.push(Constraint::le([(u, 1), (v, 1)], 1));
    }
    for v in (0..g.n).filter(|&v| degree[v] == 0) {
        cons.push(Constraint::le([(v, 1)], 1));
    }
    Ok(CoverPackInstance::new(
        Sense::Packing,
        g.n,
        cons,
        vec![BigInt::one(); g.n],
        g.k,
    ))
}

/// Packing form of "some `k` values sum to exactly `t`": over the normalized
/// values (those `≤ t` plus `k` zeros), `Σx ≤ k`, `x ≤ 1`, `Σaᵢxᵢ ≤ t` and
/// `Σ(t−aᵢ)xᵢ ≤ (k−1)t` with unit costs and budget `k`. The last row turns
/// `Σaᵢxᵢ ≥ t` into a packing row once exactly `k` variables are chosen.
/// Each variable occurs in at most four rows (zero coefficients are not
/// stored).
pub fn subset_sum_to_packing(s: &SubsetSumInstance) -> Result<CoverPackInstance> {
    s.validate()?;
    if s.k == 0 {
        return Ok(CoverPackInstance::trivial(
            Sense::Packing,
            s.target.is_zero(),
            &BigInt::zero(),
        ));
    }
    let values: Vec<BigInt> = s.normalized().into_iter().map(|(_, a)| a).collect();
    let n = values.len();
    let k = BigInt::from(s.k);
    let t = &s.target;
    let mut cons = vec![Constraint::le((0..n).map(|i| (i, 1)), k.clone())];
    cons.extend((0..n).map(|i| Constraint::le([(i, 1)], 1)));
    cons.push(Constraint::le(
        values.iter().cloned().enumerate(),
        t.clone(),
    ));
    cons.push(Constraint::le(
        values.iter().map(|a| t - a).enumerate(),
        (&k - 1) * t,
    ));
    Ok(CoverPackInstance::new(
        Sense::Packing,
        n,
        cons,
        vec![BigInt::one(); n],
        k,
    ))
}

/// Covering form with explicit upper bounds 1: `Σx ≥ k`, `Σaᵢxᵢ ≥ t`,
/// `Σ(t−aᵢ)xᵢ ≥ (k−1)t`, unit costs and budget `k`.
pub fn subset_sum_to_cover(s: &SubsetSumInstance) -> Result<CoverPackInstance> {
    s.validate()?;
    if s.k == 0 {
        return Ok(CoverPackInstance::trivial(
            Sense::Cover,
            s.target.is_zero(),
            &BigInt::zero(),
        ));
    }
    let values: Vec<BigInt> = s.normalized().into_iter().map(|(_, a)| a).collect();
    let n = values.len();
    let k = BigInt::from(s.k);
    let t = &s.target;
    let cons = vec![
        Constraint::ge((0..n).map(|i| (i, 1)), k.clone()),
        Constraint::ge(values.iter().cloned().enumerate(), t.clone()),
        Constraint::ge(values.iter().map(|a| t - a).enumerate(), (&k - 1) * t),
    ];
    let mut inst = CoverPackInstance::new(Sense::Cover, n, cons, vec![BigInt::one(); n], k);
    inst.upper = vec![Some(BigInt::one()); n];
    Ok(inst)
}

/// One indicator per element and `Σ_{e∈S} x_e ≥ 1` per set, unit costs and
/// budget `k`.
pub fn hitting_set_to_cover(h: &HittingSetInstance) -> Result<CoverPackInstance> {
    h.validate()?;
    let cons = h
        .sets
        .iter()
        .map(|set| Constraint::ge(set.iter().map(|&e| (e, 1)), 1))
        .collect();
    Ok(CoverPackInstance::new(
        Sense::Cover,
        h.universe,
        cons,
        vec![BigInt::one(); h.universe],
        h.k,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::solve;

    fn yes(inst: &CoverPackInstance) -> bool {
        solve(inst, 1_000_000).unwrap().is_yes()
    }

    fn ss(values: &[i64], target: i64, k: usize) -> SubsetSumInstance {
        SubsetSumInstance {
            values: values.iter().map(|&v| BigInt::from(v)).collect(),
            target: BigInt::from(target),
            k,
        }
    }

    #[test]
    fn triangle() {
        let k3 = |k| GraphInstance::new(3, [(0, 1), (1, 2), (0, 2)], k).unwrap();
        assert!(!yes(&independent_set_to_packing(&k3(2)).unwrap()));
        assert!(yes(&independent_set_to_packing(&k3(1)).unwrap()));
        let empty = GraphInstance::new(3, [], 3).unwrap();
        assert!(yes(&independent_set_to_packing(&empty).unwrap()));
        let path = GraphInstance::new(3, [(0, 1), (1, 2)], 2).unwrap();
        assert!(yes(&independent_set_to_packing(&path).unwrap()));
    }

    #[test]
    fn subset_sum_examples() {
        for reduce in [subset_sum_to_packing, subset_sum_to_cover] {
            assert!(yes(&reduce(&ss(&[1, 2, 3], 3, 2)).unwrap()));
            assert!(!yes(&reduce(&ss(&[5], 3, 1)).unwrap()));
            assert!(yes(&reduce(&ss(&[], 0, 1)).unwrap()));
            assert!(!yes(&reduce(&ss(&[1, 1], 3, 2)).unwrap()));
            assert!(yes(&reduce(&ss(&[4, 7, 2, 9], 16, 2)).unwrap()));
        }
    }

    #[test]
    fn packing_rows_per_variable() {
        let inst = subset_sum_to_packing(&ss(&[1, 2, 3], 3, 2)).unwrap();
        assert!(inst.stats().q <= 4);
    }

    #[test]
    fn hitting_sets() {
        let hs = |sets: Vec<Vec<usize>>, k| HittingSetInstance {
            universe: 3,
            sets,
            k,
        };
        assert!(yes(
            &hitting_set_to_cover(&hs(vec![vec![0], vec![1]], 2)).unwrap()
        ));
        assert!(!yes(
            &hitting_set_to_cover(&hs(vec![vec![0], vec![1]], 1)).unwrap()
        ));
        assert!(yes(&hitting_set_to_cover(&hs(
            vec![vec![0, 1], vec![1, 2]],
            1
        ))
        .unwrap()));
    }
}
