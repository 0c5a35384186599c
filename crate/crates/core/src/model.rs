//! # Instance model
//!
//! Sparse integer linear systems and the two nonnegative special forms
//! (covering and packing) that the kernels operate on. Coefficients are
//! arbitrary precision throughout: the gadget constructions produce
//! coefficients whose bit length grows quadratically in the number of
//! composed instances.
//!
//! Variables are dense `0..num_vars` indices. Every constraint keeps its
//! coefficients sorted by variable index without explicit zeros, so two
//! semantically equal constraints compare equal.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Relation symbol of a linear constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Le => "le",
            Relation::Ge => "ge",
            Relation::Eq => "eq",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "le" => Some(Relation::Le),
            "ge" => Some(Relation::Ge),
            "eq" => Some(Relation::Eq),
            _ => None,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

/// Sorted set of variable indices with nonzero coefficient in a constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scope(Vec<usize>);

impl Scope {
    pub fn new(mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Scope(vars)
    }

    /// Wraps an already sorted, duplicate-free list.
    pub(crate) fn from_sorted(vars: Vec<usize>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        Scope(vars)
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn is_disjoint(&self, other: &Scope) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn intersection(&self, other: &Scope) -> Scope {
        Scope(
            self.0
                .iter()
                .copied()
                .filter(|v| other.0.binary_search(v).is_ok())
                .collect(),
        )
    }

    pub fn difference(&self, other: &Scope) -> Scope {
        Scope(
            self.0
                .iter()
                .copied()
                .filter(|v| other.0.binary_search(v).is_err())
                .collect(),
        )
    }

    pub fn union(&self, other: &Scope) -> Scope {
        let set: BTreeSet<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        Scope(set.into_iter().collect())
    }
}

impl Deref for Scope {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Scope {
    fn from(vars: Vec<usize>) -> Self {
        Scope::new(vars)
    }
}

/// One row `Σ αᵢ xᵢ ◀ b` in sparse form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<(usize, BigInt)>,
    pub rel: Relation,
    pub rhs: BigInt,
}

impl Constraint {
    /// Builds a constraint in canonical form: terms are sorted by variable,
    /// repeated variables are summed and zero coefficients are dropped.
    pub fn new<C: Into<BigInt>>(
        terms: impl IntoIterator<Item = (usize, C)>,
        rel: Relation,
        rhs: impl Into<BigInt>,
    ) -> Self {
        let mut coeffs: Vec<(usize, BigInt)> =
            terms.into_iter().map(|(v, c)| (v, c.into())).collect();
        coeffs.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, BigInt)> = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Constraint {
            coeffs: merged,
            rel,
            rhs: rhs.into(),
        }
    }

    pub fn le<C: Into<BigInt>>(
        terms: impl IntoIterator<Item = (usize, C)>,
        rhs: impl Into<BigInt>,
    ) -> Self {
        Self::new(terms, Relation::Le, rhs)
    }

    pub fn ge<C: Into<BigInt>>(
        terms: impl IntoIterator<Item = (usize, C)>,
        rhs: impl Into<BigInt>,
    ) -> Self {
        Self::new(terms, Relation::Ge, rhs)
    }

    pub fn eq<C: Into<BigInt>>(
        terms: impl IntoIterator<Item = (usize, C)>,
        rhs: impl Into<BigInt>,
    ) -> Self {
        Self::new(terms, Relation::Eq, rhs)
    }

    pub fn scope(&self) -> Scope {
        Scope::from_sorted(self.coeffs.iter().map(|(v, _)| *v).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, var: usize) -> Option<&BigInt> {
        self.coeffs
            .binary_search_by_key(&var, |(v, _)| *v)
            .ok()
            .map(|i| &self.coeffs[i].1)
    }

    /// Left-hand side value under a full assignment.
    pub fn lhs(&self, x: &[BigInt]) -> BigInt {
        self.coeffs.iter().map(|(v, c)| c * &x[*v]).sum()
    }

    pub fn is_satisfied(&self, x: &[BigInt]) -> bool {
        self.rel.holds(&self.lhs(x), &self.rhs)
    }

    /// Checks the sparse canonical form against `num_vars`.
    pub fn validate(&self, num_vars: usize) -> Result<()> {
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            if *v >= num_vars {
                return Err(Error::validation(format!(
                    "coefficient references variable {v} but num_vars is {num_vars}"
                )));
            }
            if c.is_zero() {
                return Err(Error::validation(format!(
                    "explicit zero coefficient on variable {v}"
                )));
            }
            if i > 0 && self.coeffs[i - 1].0 >= *v {
                return Err(Error::validation(format!(
                    "variable indices must be strictly increasing (saw {} then {v})",
                    self.coeffs[i - 1].0
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*x{v}")?;
        }
        write!(f, " {} {}", self.rel, self.rhs)
    }
}

/// Per-variable bounds of a general instance. `lower: None` means unbounded
/// below, `upper: None` unbounded above. The default is the global `x ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarBounds {
    pub lower: Option<BigInt>,
    pub upper: Option<BigInt>,
}

impl Default for VarBounds {
    fn default() -> Self {
        VarBounds {
            lower: Some(BigInt::zero()),
            upper: None,
        }
    }
}

impl VarBounds {
    pub fn free() -> Self {
        VarBounds {
            lower: None,
            upper: None,
        }
    }

    pub fn contains(&self, value: &BigInt) -> bool {
        self.lower.as_ref().is_none_or(|lo| value >= lo)
            && self.upper.as_ref().is_none_or(|hi| value <= hi)
    }
}

/// General sparse integer linear system with relations `≤`, `≥`, `=`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IlpInstance {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

impl IlpInstance {
    pub fn new(num_vars: usize, constraints: Vec<Constraint>) -> Self {
        IlpInstance {
            num_vars,
            constraints,
            bounds: vec![VarBounds::default(); num_vars],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.len() != self.num_vars {
            return Err(Error::validation(format!(
                "bounds list has {} entries for {} variables",
                self.bounds.len(),
                self.num_vars
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            c.validate(self.num_vars)
                .map_err(|e| Error::validation(format!("constraint {i}: {}", strip(&e))))?;
        }
        for (v, b) in self.bounds.iter().enumerate() {
            if let (Some(lo), Some(hi)) = (&b.lower, &b.upper) {
                if lo > hi {
                    return Err(Error::validation(format!(
                        "variable {v} has lower bound {lo} > upper bound {hi}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True iff `x` satisfies every constraint and every variable bound.
    pub fn is_feasible(&self, x: &[BigInt]) -> bool {
        x.len() == self.num_vars
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
            && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    pub fn stats(&self) -> SparsenessStats {
        SparsenessStats::compute(self.num_vars, &self.constraints)
    }
}

/// Whether a nonnegative program is a covering (`Ax ≥ b, cᵀx ≤ k`) or a
/// packing (`Ax ≤ b, cᵀx ≥ k`) question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Cover,
    Packing,
}

impl Sense {
    pub fn relation(self) -> Relation {
        match self {
            Sense::Cover => Relation::Ge,
            Sense::Packing => Relation::Le,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Cover => "cover",
            Sense::Packing => "packing",
        }
    }
}

/// Nonnegative covering or packing program `(A, b, c, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoverPackInstance {
    pub sense: Sense,
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub cost: Vec<BigInt>,
    pub budget: BigInt,
    /// Optional per-variable upper bounds; `None` means unbounded above.
    pub upper: Vec<Option<BigInt>>,
}

impl CoverPackInstance {
    pub fn new(
        sense: Sense,
        num_vars: usize,
        constraints: Vec<Constraint>,
        cost: Vec<BigInt>,
        budget: impl Into<BigInt>,
    ) -> Self {
        CoverPackInstance {
            sense,
            num_vars,
            constraints,
            cost,
            budget: budget.into(),
            upper: vec![None; num_vars],
        }
    }

    /// A variable-free instance with a fixed answer, used as the output of
    /// reductions that decide the instance outright.
    pub fn trivial(sense: Sense, yes: bool, budget: &BigInt) -> Self {
        match (sense, yes) {
            (Sense::Cover, true) => {
                CoverPackInstance::new(sense, 0, vec![], vec![], budget.clone())
            }
            (Sense::Cover, false) => CoverPackInstance::new(
                sense,
                0,
                vec![Constraint::ge(Vec::<(usize, i64)>::new(), 1)],
                vec![],
                budget.clone(),
            ),
            (Sense::Packing, true) => CoverPackInstance::new(sense, 0, vec![], vec![], 0),
            (Sense::Packing, false) => CoverPackInstance::new(sense, 0, vec![], vec![], 1),
        }
    }

    pub fn has_upper_bounds(&self) -> bool {
        self.upper.iter().any(Option::is_some)
    }

    pub fn validate(&self) -> Result<()> {
        let rel = self.sense.relation();
        if self.cost.len() != self.num_vars {
            return Err(Error::validation(format!(
                "cost vector has {} entries for {} variables",
                self.cost.len(),
                self.num_vars
            )));
        }
        if self.upper.len() != self.num_vars {
            return Err(Error::validation(format!(
                "upper bound list has {} entries for {} variables",
                self.upper.len(),
                self.num_vars
            )));
        }
        if self.budget.is_negative() {
            return Err(Error::validation(format!(
                "budget k = {} is negative",
                self.budget
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            c.validate(self.num_vars)
                .map_err(|e| Error::validation(format!("constraint {i}: {}", strip(&e))))?;
            if c.rel != rel {
                return Err(Error::validation(format!(
                    "constraint {i} has relation {} but a {} instance requires {}",
                    c.rel.as_str(),
                    self.sense.as_str(),
                    rel.as_str()
                )));
            }
            if c.rhs.is_negative() {
                return Err(Error::validation(format!(
                    "constraint {i} has negative right-hand side {}",
                    c.rhs
                )));
            }
            if let Some((v, a)) = c.coeffs.iter().find(|(_, a)| a.is_negative()) {
                return Err(Error::validation(format!(
                    "constraint {i} has negative coefficient {a} on variable {v}"
                )));
            }
        }
        if let Some((v, c)) = self.cost.iter().enumerate().find(|(_, c)| c.is_negative()) {
            return Err(Error::validation(format!(
                "variable {v} has negative cost {c}"
            )));
        }
        if let Some((v, u)) = self
            .upper
            .iter()
            .enumerate()
            .find_map(|(v, u)| u.as_ref().filter(|u| u.is_negative()).map(|u| (v, u)))
        {
            return Err(Error::validation(format!(
                "variable {v} has negative upper bound {u}"
            )));
        }
        Ok(())
    }

    pub fn objective(&self, x: &[BigInt]) -> BigInt {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks constraints, nonnegativity, upper bounds and the budget side.
    pub fn is_solution(&self, x: &[BigInt]) -> bool {
        if x.len() != self.num_vars || x.iter().any(Signed::is_negative) {
            return false;
        }
        if self
            .upper
            .iter()
            .zip(x)
            .any(|(u, v)| u.as_ref().is_some_and(|u| v > u))
        {
            return false;
        }
        if !self.constraints.iter().all(|c| c.is_satisfied(x)) {
            return false;
        }
        let obj = self.objective(x);
        match self.sense {
            Sense::Cover => obj <= self.budget,
            Sense::Packing => obj >= self.budget,
        }
    }

    pub fn stats(&self) -> SparsenessStats {
        SparsenessStats::compute(self.num_vars, &self.constraints)
    }

    /// Variables occurring in at least one constraint.
    pub fn used_vars(&self) -> Vec<bool> {
        let mut used = vec![false; self.num_vars];
        for c in &self.constraints {
            for (v, _) in &c.coeffs {
                used[*v] = true;
            }
        }
        used
    }

    /// Keeps the variables with `keep[v]`, renumbering them in order. Kept
    /// constraints must not mention dropped variables. Returns the map from
    /// new to old indices.
    pub fn restrict_vars(&self, keep: &[bool]) -> (Self, Vec<usize>) {
        let var_map: Vec<usize> = (0..self.num_vars).filter(|&v| keep[v]).collect();
        let mut new_index = vec![usize::MAX; self.num_vars];
        for (i, &v) in var_map.iter().enumerate() {
            new_index[v] = i;
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let coeffs = c
                    .coeffs
                    .iter()
                    .map(|(v, a)| {
                        assert!(keep[*v], "constraint mentions dropped variable {v}");
                        (new_index[*v], a.clone())
                    })
                    .collect();
                Constraint {
                    coeffs,
                    rel: c.rel,
                    rhs: c.rhs.clone(),
                }
            })
            .collect();
        let inst = CoverPackInstance {
            sense: self.sense,
            num_vars: var_map.len(),
            constraints,
            cost: var_map.iter().map(|&v| self.cost[v].clone()).collect(),
            budget: self.budget.clone(),
            upper: var_map.iter().map(|&v| self.upper[v].clone()).collect(),
        };
        (inst, var_map)
    }

    /// Views the constraint system (without the objective side) as a
    /// general instance.
    pub fn to_ilp(&self) -> IlpInstance {
        let bounds = self
            .upper
            .iter()
            .map(|u| VarBounds {
                lower: Some(BigInt::zero()),
                upper: u.clone(),
            })
            .collect();
        IlpInstance {
            num_vars: self.num_vars,
            constraints: self.constraints.clone(),
            bounds,
        }
    }
}

/// Sparseness statistics: row-sparseness `r`, column-sparseness `q`, largest
/// absolute value `C` over all coefficients and right-hand sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsenessStats {
    pub r: usize,
    pub q: usize,
    pub max_abs_coeff: BigInt,
    pub n: usize,
    pub m: usize,
}

impl SparsenessStats {
    pub fn compute(num_vars: usize, constraints: &[Constraint]) -> Self {
        let mut occurrences = vec![0usize; num_vars];
        let mut r = 0;
        let mut c = BigInt::zero();
        for con in constraints {
            r = r.max(con.coeffs.len());
            for (v, a) in &con.coeffs {
                occurrences[*v] += 1;
                let abs = a.abs();
                if abs > c {
                    c = abs;
                }
            }
            let abs = con.rhs.abs();
            if abs > c {
                c = abs;
            }
        }
        SparsenessStats {
            r,
            q: occurrences.into_iter().max().unwrap_or(0),
            max_abs_coeff: c,
            n: num_vars,
            m: constraints.len(),
        }
    }
}

/// Graph on vertices `0..n` with target independent-set size `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphInstance {
    pub n: usize,
    /// Unordered pairs stored as `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
}

impl GraphInstance {
    /// Canonicalizes edge orientation and order, then validates.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        k: usize,
    ) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        list.sort_unstable();
        let g = GraphInstance { n, edges: list, k };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u == v {
                return Err(Error::validation(format!("self-loop on vertex {u}")));
            }
            if u >= self.n || v >= self.n {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{}",
                    self.n
                )));
            }
            if u > v {
                return Err(Error::validation(format!(
                    "edge ({u}, {v}) is not stored as (min, max)"
                )));
            }
            if i > 0 && self.edges[i - 1] >= (u, v) {
                return Err(Error::validation(format!(
                    "duplicate or unsorted edge ({u}, {v})"
                )));
            }
        }
        if self.k > self.n {
            return Err(Error::validation(format!(
                "k = {} exceeds the vertex count {}",
                self.k, self.n
            )));
        }
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }
}

/// Subset-Sum question: are there at most `k` of the values summing to exactly `target`?
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetSumInstance {
    pub values: Vec<BigInt>,
    pub target: BigInt,
    pub k: usize,
}

impl SubsetSumInstance {
    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.values.iter().find(|v| v.is_negative()) {
            return Err(Error::validation(format!("negative value {v}")));
        }
        if self.target.is_negative() {
            return Err(Error::validation(format!(
                "negative target {}",
                self.target
            )));
        }
        Ok(())
    }

    /// Values not exceeding the target, followed by `k` padding zeros.
    /// Each entry records the index of the original value it came from.
    pub fn normalized(&self) -> Vec<(Option<usize>, BigInt)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v <= self.target)
            .map(|(i, v)| (Some(i), v.clone()))
            .chain(std::iter::repeat_n((None, BigInt::zero()), self.k))
            .collect()
    }
}

/// Hitting-Set question over elements `0..universe`: is there a set of at
/// most `k` elements meeting every listed set?
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HittingSetInstance {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
}

impl HittingSetInstance {
    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.sets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::validation(format!("set {i} is empty")));
            }
            if let Some(e) = s.iter().find(|&&e| e >= self.universe) {
                return Err(Error::validation(format!(
                    "set {i} contains element {e} outside 0..{}",
                    self.universe
                )));
            }
            let distinct: BTreeSet<_> = s.iter().collect();
            if distinct.len() != s.len() {
                return Err(Error::validation(format!("set {i} repeats an element")));
            }
        }
        Ok(())
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}
