use num_bigint::BigInt;
use num_traits::One;

use super::power::{power_bits, power_gadget, power_gadget_shared, Operand};
use super::IlpBuilder;
use crate::error::{Error, Result};
use crate::model::{Constraint, GraphInstance, IlpInstance, SparsenessStats};
use crate::oracle::SearchBox;
use crate::report::ReductionReport;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComposeOptions {
    /// Give `p` one set of digit variables shared by all gadgets instead of
    /// one set per gadget.
    pub share_bits: bool,
}

/// Output of [`cross_compose`].
#[derive(Clone, Debug)]
pub struct Composed {
    pub instance: IlpInstance,
    /// A finite range for every variable that contains all solutions.
    pub search_box: SearchBox,
    pub names: Vec<String>,
    /// Number of instances after padding to a power of two.
    pub t: usize,
    pub ell: u32,
    pub selector: usize,
    /// `x_i` for the vertices.
    pub vertex_vars: Vec<usize>,
    pub report: ReductionReport,
}

/// Closed-form size of the composed system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComposeTally {
    pub num_vars: usize,
    pub num_constraints: usize,
}

/// Variable and constraint counts for `n` vertices and `t` (padded)
/// instances without bit sharing:
///
/// * variables: `p` and `one`, per pair 7 named variables plus three gadgets
///   of `2ℓ−1` each, and `n` vertex variables;
/// * constraints: 2 for `p`, 2 pinning `one`, per pair three gadgets of
///   `6ℓ+7` each plus 5 more, `2n` vertex ranges, one edge constraint per
///   pair, and the size constraint.
pub fn compose_tally(n: usize, t: usize) -> ComposeTally {
    let ell = power_bits((t - 1) as u32) as usize;
    let pairs = n * n.saturating_sub(1) / 2;
    ComposeTally {
        num_vars: 2 + pairs * (7 + 3 * (2 * ell - 1)) + n,
        num_constraints: 4 + pairs * (3 * (6 * ell + 7) + 5) + 2 * n + pairs + 1,
    }
}

/// OR-composes Independent Set instances sharing `n` and `k` into one
/// integer program, feasible iff some input graph has an independent set of
/// size `k`.
///
/// The list is padded to `t = 2^s` graphs by repeating the first. A
/// selector `p ∈ {0..t−1}` picks a graph; for each vertex pair `{i, j}` the
/// constant `D(i,j)` has bit `p` set iff `{i, j}` is an edge of graph `p`,
/// and `D = α + β + γ` with `α < 2^p`, `β = 2^p·e`, `γ = 2^(p+1)·ε` extracts
/// that bit into `e`. Vertex variables then satisfy `x_i + x_j + e ≤ 2` and
/// `Σ x_i ≥ k`.
pub fn cross_compose(instances: &[GraphInstance]) -> Result<Composed> {
    cross_compose_with(instances, ComposeOptions::default())
}

pub fn cross_compose_with(
    instances: &[GraphInstance],
    options: ComposeOptions,
) -> Result<Composed> {
    let first = instances
        .first()
        .ok_or_else(|| Error::invalid("cross-composition needs at least one graph"))?;
    for (i, g) in instances.iter().enumerate() {
        g.validate()?;
        if g.n != first.n || g.k != first.k {
            return Err(Error::invalid(format!(
                "graph {i} has n = {}, k = {} but graph 0 has n = {}, k = {}",
                g.n, g.k, first.n, first.k
            )));
        }
    }
    let (n, k) = (first.n, first.k);
    let t = instances.len().next_power_of_two();
    let graphs: Vec<&GraphInstance> = (0..t).map(|i| instances.get(i).unwrap_or(first)).collect();
    let p_max = (t - 1) as u32;
    let ell = power_bits(p_max);
    let top: BigInt = (BigInt::one() << t) - 1;
    let half = BigInt::one() << (t - 1);

    let mut bld = IlpBuilder::new();
    let p = bld.var("p", 0, p_max);
    let one = bld.var("one", 1, 1);
    bld.push(Constraint::ge([(p, 1)], 0));
    bld.push(Constraint::le([(p, 1)], p_max));
    bld.push(Constraint::ge([(one, 1)], 1));
    bld.push(Constraint::le([(one, 1)], 1));

    let shared_bits = options.share_bits.then(|| {
        let bits: Vec<usize> = (0..ell)
            .map(|i| bld.var(format!("p.bit{i}"), 0, 1))
            .collect();
        for &v in &bits {
            bld.push(Constraint::ge([(v, 1)], 0));
            bld.push(Constraint::le([(v, 1)], 1));
        }
        let mut terms = vec![(p, BigInt::one())];
        terms.extend(
            bits.iter()
                .enumerate()
                .map(|(i, &v)| (v, -(BigInt::one() << i))),
        );
        bld.push(Constraint::eq(terms, 0));
        bits
    });
    let gadget = |bld: &mut IlpBuilder, a: usize, b: usize, b_max: &BigInt| match &shared_bits {
        Some(bits) => power_gadget_shared(bld, a, Operand::Var(b), b_max, p, p_max, bits),
        None => power_gadget(bld, a, Operand::Var(b), b_max, p, p_max),
    };

    let mut edge_vars = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = graphs
                .iter()
                .enumerate()
                .filter(|(_, g)| g.has_edge(i, j))
                .fold(BigInt::from(0), |acc, (bit, _)| {
                    acc | (BigInt::one() << bit)
                });
            let tag = |s: &str| format!("{s}[{i},{j}]");
            let e = bld.var(tag("e"), 0, 1);
            let alpha = bld.var(tag("alpha"), 0, top.clone());
            let beta = bld.var(tag("beta"), 0, half.clone());
            let gamma = bld.var(tag("gamma"), 0, &top * &half);
            let delta = bld.var(tag("delta"), 0, half.clone());
            let eps = bld.var(tag("eps"), 0, top.clone());
            let b2 = bld.var(tag("b2"), 0, top.clone());
            gadget(&mut bld, delta, one, &BigInt::one());
            gadget(&mut bld, beta, e, &BigInt::one());
            gadget(&mut bld, gamma, b2, &top);
            bld.push(Constraint::ge([(alpha, 1)], 0));
            bld.push(Constraint::le([(alpha, 1), (delta, -1)], -1));
            bld.push(Constraint::ge([(eps, 1)], 0));
            bld.push(Constraint::eq([(b2, 1), (eps, -2)], 0));
            bld.push(Constraint::eq([(alpha, 1), (beta, 1), (gamma, 1)], d));
            edge_vars.push((i, j, e));
        }
    }

    let xs: Vec<usize> = (0..n).map(|i| bld.var(format!("x{i}"), 0, 1)).collect();
    for &x in &xs {
        bld.push(Constraint::ge([(x, 1)], 0));
        bld.push(Constraint::le([(x, 1)], 1));
    }
    for &(i, j, e) in &edge_vars {
        bld.push(Constraint::le([(xs[i], 1), (xs[j], 1), (e, 1)], 2));
    }
    bld.push(Constraint::ge(xs.iter().map(|&x| (x, 1)), k));

    let (instance, search_box, names) = bld.finish();
    let mut report = ReductionReport::new("cross_compose", SparsenessStats::compute(0, &[]));
    let (m, total) = (instance.constraints.len(), instance.num_vars);
    let vertex_constraints = 2 * n + edge_vars.len() + 1;
    report.step(
        "selector",
        -4,
        -2,
        format!("p in 0..={p_max} and the constant 1 for {t} instances"),
    );
    report.step(
        "edge-extraction",
        -((m - 4 - vertex_constraints) as i64),
        -((total - 2 - n) as i64),
        format!(
            "{} vertex pairs, three power gadgets each with l = {ell}",
            edge_vars.len()
        ),
    );
    report.step(
        "independent-set",
        -(vertex_constraints as i64),
        -(n as i64),
        format!("vertex variables, edge constraints and sum x >= {k}"),
    );
    report.finish_ilp(&instance);
    Ok(Composed {
        instance,
        search_box,
        names,
        t,
        ell,
        selector: p,
        vertex_vars: xs,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{solve_feasibility, DEFAULT_NODE_CAP};

    fn k3() -> GraphInstance {
        GraphInstance::new(3, [(0, 1), (1, 2), (0, 2)], 2).unwrap()
    }

    fn empty3() -> GraphInstance {
        GraphInstance::new(3, [], 2).unwrap()
    }

    #[test]
    fn or_of_two() {
        let c = cross_compose(&[k3(), empty3()]).unwrap();
        assert!(
            solve_feasibility(&c.instance, &c.search_box, DEFAULT_NODE_CAP)
                .unwrap()
                .is_yes()
        );
        let c = cross_compose(&[k3(), k3()]).unwrap();
        assert!(
            !solve_feasibility(&c.instance, &c.search_box, DEFAULT_NODE_CAP)
                .unwrap()
                .is_yes()
        );
    }

    #[test]
    fn counts_match_tally() {
        for (n, count) in [(3, 1), (3, 2), (4, 3)] {
            let graphs = vec![GraphInstance::new(n, [], 1).unwrap(); count];
            let c = cross_compose(&graphs).unwrap();
            let tally = compose_tally(n, c.t);
            assert_eq!(c.instance.num_vars, tally.num_vars);
            assert_eq!(c.instance.constraints.len(), tally.num_constraints);
            assert!(c.report.is_consistent());
        }
    }

    #[test]
    fn shared_bits_agree() {
        let graphs = [k3(), empty3(), k3()];
        let opts = ComposeOptions { share_bits: true };
        let c = cross_compose_with(&graphs, opts).unwrap();
        assert!(
            solve_feasibility(&c.instance, &c.search_box, DEFAULT_NODE_CAP)
                .unwrap()
                .is_yes()
        );
        assert!(c.instance.num_vars < compose_tally(3, 4).num_vars);
    }

    #[test]
    fn mismatched_inputs() {
        let g = GraphInstance::new(4, [], 2).unwrap();
        assert!(cross_compose(&[k3(), g]).is_err());
        assert!(cross_compose(&[]).is_err());
    }
}
