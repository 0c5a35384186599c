use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::basic::advance;
use super::check_cover;
use crate::error::{Error, Result};
use crate::model::{CoverPackInstance, Scope, Sense};
use crate::oracle::Decision;
use crate::report::ReductionReport;

/// `t` sets whose pairwise intersections all equal `core`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sunflower {
    pub core: Scope,
    /// `member_sets[i] \ core`, pairwise disjoint and nonempty.
    pub petals: Vec<Scope>,
    pub member_sets: Vec<Scope>,
    /// Positions of the member sets in the family passed to [`find_sunflower`].
    pub members: Vec<usize>,
}

impl Sunflower {
    pub fn len(&self) -> usize {
        self.member_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_sets.is_empty()
    }

    /// Checks the structural invariants: equal member sizes above the core
    /// size, pairwise intersections equal to the core, petals matching.
    pub fn check(&self) -> Result<()> {
        if self.petals.len() != self.member_sets.len() {
            return Err(Error::invalid(
                "sunflower has mismatched petal and member counts",
            ));
        }
        let d = self.member_sets.first().map_or(0, |s| s.len());
        for (i, (m, p)) in self.member_sets.iter().zip(&self.petals).enumerate() {
            if m.len() != d || d <= self.core.len() {
                return Err(Error::invalid(format!(
                    "sunflower member {i} has the wrong size"
                )));
            }
            if m.difference(&self.core) != *p || m.intersection(&self.core) != self.core {
                return Err(Error::invalid(format!(
                    "sunflower member {i} does not split into core and petal"
                )));
            }
        }
        for i in 0..self.petals.len() {
            for j in i + 1..self.petals.len() {
                if !self.petals[i].is_disjoint(&self.petals[j]) {
                    return Err(Error::invalid(format!("petals {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }
}

/// Searches `family` for a sunflower with `t` members.
///
/// A maximal disjoint subfamily is collected greedily; with at least `t`
/// members it is a sunflower with empty core. Otherwise the most frequent
/// element of that subfamily's union joins the core and the search recurses
/// on the sets containing it. This always succeeds when
/// `|family| > d!·(t−1)^d`.
pub fn find_sunflower(family: &[Scope], t: usize) -> Result<Option<Sunflower>> {
    if t == 0 {
        return Err(Error::invalid("sunflower cardinality must be at least 1"));
    }
    let Some(first) = family.first() else {
        return Ok(None);
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::invalid("sunflower sets must be nonempty"));
    }
    let mut seen = HashSet::new();
    for (i, s) in family.iter().enumerate() {
        if s.len() != d {
            return Err(Error::invalid(format!(
                "set {i} has size {} but set 0 has size {d}",
                s.len()
            )));
        }
        if !seen.insert(s) {
            return Err(Error::invalid(format!("set {i} occurs twice")));
        }
    }
    let sets: Vec<(usize, Vec<usize>)> = family.iter().map(|s| s.to_vec()).enumerate().collect();
    let Some((core, members)) = search(sets, t) else {
        return Ok(None);
    };
    let core = Scope::new(core);
    let member_sets: Vec<Scope> = members.iter().map(|&i| family[i].clone()).collect();
    let petals = member_sets.iter().map(|m| m.difference(&core)).collect();
    Ok(Some(Sunflower {
        core,
        petals,
        member_sets,
        members,
    }))
}

fn search(sets: Vec<(usize, Vec<usize>)>, t: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut taken: HashSet<usize> = HashSet::new();
    let mut disjoint = Vec::new();
    for (i, s) in &sets {
        if s.iter().all(|v| !taken.contains(v)) {
            taken.extend(s.iter().copied());
            disjoint.push(*i);
            if disjoint.len() == t {
                return Some((Vec::new(), disjoint));
            }
        }
    }
    if sets.first().is_none_or(|(_, s)| s.len() <= 1) {
        return None;
    }
    let mut freq: BTreeMap<usize, usize> = taken.iter().map(|&v| (v, 0)).collect();
    for (_, s) in &sets {
        for v in s {
            if let Some(f) = freq.get_mut(v) {
                *f += 1;
            }
        }
    }
    // max_by_key keeps the last maximum, so scan in reverse for the smallest
    let (&pivot, _) = freq.iter().rev().max_by_key(|(_, &f)| f)?;
    let inner: Vec<(usize, Vec<usize>)> = sets
        .into_iter()
        .filter(|(_, s)| s.contains(&pivot))
        .map(|(i, s)| (i, s.into_iter().filter(|&v| v != pivot).collect()))
        .collect();
    let (mut core, members) = search(inner, t)?;
    core.push(pivot);
    Some((core, members))
}

/// Deletes the sunflower's representative constraints (the first
/// constraint of each member scope) that no core assignment needs.
///
/// For every assignment of the core in `{0..k}^s`, the representatives not
/// satisfied by the core alone are collected; the first `k+1` of them (or
/// all, if there are at most `k`) are marked. Unmarked representatives are
/// redundant: a solution violating one would have to satisfy `k+1` marked
/// constraints through disjoint petals, costing more than `k`. With an empty
/// core and more than `k` members the instance is NO outright.
///
/// The input must be basic-reduced (right-hand sides and costs at least 1).
/// Variables are not renumbered.
pub fn sunflower_reduce_step(
    inst: &CoverPackInstance,
    sunflower: &Sunflower,
) -> Result<(CoverPackInstance, ReductionReport)> {
    check_cover(inst)?;
    sunflower.check()?;
    if let Some(c) = inst.constraints.iter().position(|c| !c.rhs.is_positive()) {
        return Err(Error::invalid(format!(
            "constraint {c} has right-hand side 0; run the basic reduction first"
        )));
    }
    if let Some(v) = inst.cost.iter().position(|c| !c.is_positive()) {
        return Err(Error::invalid(format!(
            "variable {v} has cost 0; run the basic reduction first"
        )));
    }
    let reps: Vec<usize> = sunflower
        .member_sets
        .iter()
        .map(|m| {
            inst.constraints
                .iter()
                .position(|c| {
                    c.coeffs.len() == m.len()
                        && c.coeffs.iter().zip(m.iter()).all(|((v, _), w)| v == w)
                })
                .ok_or_else(|| Error::invalid(format!("no constraint has scope {:?}", m.vars())))
        })
        .collect::<Result<_>>()?;

    let mut report = ReductionReport::new("sunflower_reduce_step", inst.stats());
    let k = &inst.budget;
    if sunflower.core.is_empty() && BigInt::from(reps.len()) > *k {
        let reason = format!(
            "{} constraints on disjoint variable sets need more than k = {k} units of cost",
            reps.len()
        );
        let out = report.conclude(
            Sense::Cover,
            Decision::No,
            "sunflower-empty-core",
            reason,
            k,
        );
        return Ok((out, report));
    }
    let limit = k + BigInt::one();
    let mark_cap = limit.to_usize().unwrap_or(usize::MAX);
    let radix = limit.to_u64().ok_or_else(|| {
        Error::invalid(format!(
            "budget {k} too large to enumerate core assignments"
        ))
    })?;

    let core = sunflower.core.vars();
    let radices = vec![radix; core.len()];
    let mut marked = vec![false; reps.len()];
    let mut point = vec![0u64; core.len()];
    loop {
        let mut count = 0;
        for (i, &ci) in reps.iter().enumerate() {
            if count == mark_cap {
                break;
            }
            let c = &inst.constraints[ci];
            let lhs: BigInt = c
                .coeffs
                .iter()
                .filter_map(|(v, a)| core.binary_search(v).ok().map(|p| a * point[p]))
                .sum();
            if lhs < c.rhs {
                marked[i] = true;
                count += 1;
            }
        }
        if !advance(&mut point, &radices) {
            break;
        }
    }

    let drop: HashSet<usize> = reps
        .iter()
        .zip(&marked)
        .filter(|(_, &m)| !m)
        .map(|(&c, _)| c)
        .collect();
    let mut out = inst.clone();
    out.constraints = inst
        .constraints
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, c)| c.clone())
        .collect();
    report.step(
        "sunflower-marking",
        drop.len() as i64,
        0,
        format!(
            "core of size {} with {} petals: deleted {} unmarked constraints",
            core.len(),
            reps.len(),
            drop.len()
        ),
    );
    report.finish(&out, (0..out.num_vars).collect());
    Ok((out, report))
}
