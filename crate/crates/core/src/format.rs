//! On-disk formats: `INSTANCE_JSON`, `GRAPH`, `SUBSETSUM`, `SETS` (hitting
//! set families), the variable box sidecar and the merge-map sidecar.
//!
//! All integers are decimal JSON numbers of arbitrary precision. Writers are
//! canonical: fixed key order, coefficients sorted by variable, one
//! constraint per line, and no elided fields.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::model::{
    Constraint, CoverPackInstance, GraphInstance, HittingSetInstance, IlpInstance, Relation, Sense,
    SubsetSumInstance, VarBounds,
};
use crate::oracle::SearchBox;
use crate::trivial::MergeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    InstanceJson,
    Graph,
    SubsetSum,
    Sets,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    General(IlpInstance),
    CoverPack(CoverPackInstance),
    Graph(GraphInstance),
    SubsetSum(SubsetSumInstance),
    HittingSet(HittingSetInstance),
}

/// JSON number holding an arbitrary-precision integer.
pub fn big_json(v: &BigInt) -> Value {
    Value::Number(Number::from_str(&v.to_string()).expect("integer literal"))
}

fn read_json(text: &str) -> Result<Map<String, Value>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse_at(e.line(), e.column(), e.to_string()))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(Error::parse_at(1, 1, "expected a JSON object at top level")),
    }
}

/// Guesses the format from the top-level keys.
pub fn detect_format(text: &str) -> Result<Format> {
    let map = read_json(text)?;
    if map.contains_key("kind") {
        Ok(Format::InstanceJson)
    } else if map.contains_key("edges") {
        Ok(Format::Graph)
    } else if map.contains_key("values") {
        Ok(Format::SubsetSum)
    } else if map.contains_key("sets") {
        Ok(Format::Sets)
    } else {
        Err(Error::validation(
            "cannot tell the file format from its keys",
        ))
    }
}

pub fn parse_instance(text: &str, format: Format) -> Result<Instance> {
    let map = read_json(text)?;
    match format {
        Format::InstanceJson => instance_from_map(map),
        Format::Graph => graph_from_map(map).map(Instance::Graph),
        Format::SubsetSum => subset_sum_from_map(map).map(Instance::SubsetSum),
        Format::Sets => sets_from_map(map).map(Instance::HittingSet),
    }
}

pub fn serialize_instance(obj: &Instance) -> String {
    match obj {
        Instance::General(i) => write_general(i),
        Instance::CoverPack(i) => write_cover_pack(i),
        Instance::Graph(g) => write_graph(g),
        Instance::SubsetSum(s) => write_subset_sum(s),
        Instance::HittingSet(h) => write_sets(h),
    }
}

pub fn parse_general(text: &str) -> Result<IlpInstance> {
    match parse_instance(text, Format::InstanceJson)? {
        Instance::General(i) => Ok(i),
        _ => Err(Error::validation("expected kind \"general\"")),
    }
}

pub fn parse_cover_pack(text: &str) -> Result<CoverPackInstance> {
    match parse_instance(text, Format::InstanceJson)? {
        Instance::CoverPack(i) => Ok(i),
        _ => Err(Error::validation("expected kind \"cover\" or \"packing\"")),
    }
}

pub fn parse_graph(text: &str) -> Result<GraphInstance> {
    graph_from_map(read_json(text)?)
}

struct Fields {
    map: Map<String, Value>,
    what: &'static str,
}

impl Fields {
    fn new(map: Map<String, Value>, what: &'static str, allowed: &[&str]) -> Result<Self> {
        if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::validation(format!(
                "unknown field \"{key}\" in {what}"
            )));
        }
        Ok(Fields { map, what })
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Value> {
        self.take(key)
            .ok_or_else(|| Error::validation(format!("missing field \"{key}\" in {}", self.what)))
    }
}

fn int(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::validation(format!("{path}: expected an integer, found {n}"))),
        other => Err(Error::validation(format!(
            "{path}: expected an integer, found {other}"
        ))),
    }
}

fn usize_of(v: &Value, path: &str) -> Result<usize> {
    let b = int(v, path)?;
    b.to_usize().ok_or_else(|| {
        Error::validation(format!("{path}: expected a nonnegative index, found {b}"))
    })
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::validation(format!("{path}: expected a list")))
}

fn parse_constraint(v: &Value, path: &str) -> Result<Constraint> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::validation(format!("{path}: expected an object")))?;
    if let Some(key) = obj
        .keys()
        .find(|k| !["coeffs", "rel", "rhs"].contains(&k.as_str()))
    {
        return Err(Error::validation(format!(
            "{path}: unknown field \"{key}\""
        )));
    }
    let get = |k: &str| {
        obj.get(k)
            .ok_or_else(|| Error::validation(format!("{path}: missing field \"{k}\"")))
    };
    let rel = get("rel")?
        .as_str()
        .and_then(Relation::parse)
        .ok_or_else(|| {
            Error::validation(format!("{path}.rel: expected \"le\", \"ge\" or \"eq\""))
        })?;
    let rhs = int(get("rhs")?, &format!("{path}.rhs"))?;
    let mut coeffs = Vec::new();
    let mut seen = BTreeSet::new();
    for (j, pair) in array(get("coeffs")?, &format!("{path}.coeffs"))?
        .iter()
        .enumerate()
    {
        let here = format!("{path}.coeffs[{j}]");
        let pair = array(pair, &here)?;
        if pair.len() != 2 {
            return Err(Error::validation(format!("{here}: expected [var, coef]")));
        }
        let var = usize_of(&pair[0], &here)?;
        let coef = int(&pair[1], &here)?;
        if !seen.insert(var) {
            return Err(Error::validation(format!(
                "{here}: variable {var} appears twice in one constraint"
            )));
        }
        if coef.is_zero() {
            return Err(Error::validation(format!(
                "{here}: explicit zero coefficient on variable {var}"
            )));
        }
        coeffs.push((var, coef));
    }
    coeffs.sort_by_key(|(v, _)| *v);
    Ok(Constraint { coeffs, rel, rhs })
}

/// Reads a bound list (`null` = absent) or a mapping from index to bound.
fn bound_list(
    v: &Value,
    n: usize,
    default: Option<BigInt>,
    path: &str,
) -> Result<Vec<Option<BigInt>>> {
    let entry = |x: &Value, here: &str| -> Result<Option<BigInt>> {
        if x.is_null() {
            Ok(None)
        } else {
            int(x, here).map(Some)
        }
    };
    match v {
        Value::Array(items) => {
            if items.len() != n {
                return Err(Error::validation(format!(
                    "{path}: expected {n} entries, found {}",
                    items.len()
                )));
            }
            items
                .iter()
                .enumerate()
                .map(|(i, x)| entry(x, &format!("{path}[{i}]")))
                .collect()
        }
        Value::Object(map) => {
            let mut out = vec![default; n];
            for (k, x) in map {
                let i: usize = k.parse().map_err(|_| {
                    Error::validation(format!("{path}: key \"{k}\" is not a variable index"))
                })?;
                if i >= n {
                    return Err(Error::validation(format!(
                        "{path}: variable {i} outside 0..{n}"
                    )));
                }
                out[i] = entry(x, &format!("{path}.{k}"))?;
            }
            Ok(out)
        }
        _ => Err(Error::validation(format!(
            "{path}: expected a list or a mapping"
        ))),
    }
}

fn instance_from_map(map: Map<String, Value>) -> Result<Instance> {
    let mut f = Fields::new(
        map,
        "instance",
        &["kind", "num_vars", "constraints", "cost", "k", "ub", "lb"],
    )?;
    let kind = f.require("kind")?;
    let kind = kind
        .as_str()
        .ok_or_else(|| Error::validation("kind: expected a string"))?
        .to_string();
    let n = usize_of(&f.require("num_vars")?, "num_vars")?;
    let cons_v = f.require("constraints")?;
    let constraints = array(&cons_v, "constraints")?
        .iter()
        .enumerate()
        .map(|(i, c)| parse_constraint(c, &format!("constraints[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let ub = match f.take("ub") {
        Some(v) => bound_list(&v, n, None, "ub")?,
        None => vec![None; n],
    };
    let lb = match f.take("lb") {
        Some(v) => Some(bound_list(&v, n, Some(BigInt::zero()), "lb")?),
        None => None,
    };
    match kind.as_str() {
        "general" => {
            for key in ["cost", "k"] {
                if f.take(key).is_some() {
                    return Err(Error::validation(format!(
                        "field \"{key}\" is not allowed for kind \"general\""
                    )));
                }
            }
            let lb = lb.unwrap_or_else(|| vec![Some(BigInt::zero()); n]);
            let bounds = lb
                .into_iter()
                .zip(ub)
                .map(|(lower, upper)| VarBounds { lower, upper })
                .collect();
            let inst = IlpInstance {
                num_vars: n,
                constraints,
                bounds,
            };
            inst.validate()?;
            Ok(Instance::General(inst))
        }
        "cover" | "packing" => {
            let sense = if kind == "cover" {
                Sense::Cover
            } else {
                Sense::Packing
            };
            if let Some(lb) = lb {
                if lb.iter().any(|l| l.as_ref().is_none_or(|l| !l.is_zero())) {
                    return Err(Error::validation(format!(
                        "{kind} instances require every lower bound to be 0"
                    )));
                }
            }
            let cost_v = f.require("cost")?;
            let cost = array(&cost_v, "cost")?
                .iter()
                .enumerate()
                .map(|(i, c)| int(c, &format!("cost[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let budget = int(&f.require("k")?, "k")?;
            let inst = CoverPackInstance {
                sense,
                num_vars: n,
                constraints,
                cost,
                budget,
                upper: ub,
            };
            inst.validate()?;
            Ok(Instance::CoverPack(inst))
        }
        other => Err(Error::validation(format!(
            "kind: expected \"general\", \"cover\" or \"packing\", found \"{other}\""
        ))),
    }
}

fn graph_from_map(map: Map<String, Value>) -> Result<GraphInstance> {
    let mut f = Fields::new(map, "graph", &["n", "edges", "k"])?;
    let n = usize_of(&f.require("n")?, "n")?;
    let k = usize_of(&f.require("k")?, "k")?;
    let edges_v = f.require("edges")?;
    let mut edges = Vec::new();
    for (i, e) in array(&edges_v, "edges")?.iter().enumerate() {
        let here = format!("edges[{i}]");
        let pair = array(e, &here)?;
        if pair.len() != 2 {
            return Err(Error::validation(format!("{here}: expected [u, v]")));
        }
        edges.push((usize_of(&pair[0], &here)?, usize_of(&pair[1], &here)?));
    }
    GraphInstance::new(n, edges, k)
}

fn subset_sum_from_map(map: Map<String, Value>) -> Result<SubsetSumInstance> {
    let mut f = Fields::new(map, "subset-sum instance", &["values", "target", "k"])?;
    let values_v = f.require("values")?;
    let values = array(&values_v, "values")?
        .iter()
        .enumerate()
        .map(|(i, v)| int(v, &format!("values[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let target = int(&f.require("target")?, "target")?;
    let k = usize_of(&f.require("k")?, "k")?;
    let s = SubsetSumInstance { values, target, k };
    s.validate()?;
    Ok(s)
}

fn sets_from_map(map: Map<String, Value>) -> Result<HittingSetInstance> {
    let mut f = Fields::new(map, "set family", &["universe", "sets", "k"])?;
    let universe = usize_of(&f.require("universe")?, "universe")?;
    let k = usize_of(&f.require("k")?, "k")?;
    let sets_v = f.require("sets")?;
    let sets = array(&sets_v, "sets")?
        .iter()
        .enumerate()
        .map(|(i, s)| {
            array(s, &format!("sets[{i}]"))?
                .iter()
                .map(|e| usize_of(e, &format!("sets[{i}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let h = HittingSetInstance { universe, sets, k };
    h.validate()?;
    Ok(h)
}

fn write_constraints(out: &mut String, constraints: &[Constraint]) {
    if constraints.is_empty() {
        out.push_str("  \"constraints\": [],\n");
        return;
    }
    out.push_str("  \"constraints\": [\n");
    for (i, c) in constraints.iter().enumerate() {
        let coeffs: Vec<String> = c
            .coeffs
            .iter()
            .map(|(v, a)| format!("[{v}, {a}]"))
            .collect();
        let _ = write!(
            out,
            "    {{\"coeffs\": [{}], \"rel\": \"{}\", \"rhs\": {}}}",
            coeffs.join(", "),
            c.rel.as_str(),
            c.rhs
        );
        out.push_str(if i + 1 < constraints.len() {
            ",\n"
        } else {
            "\n"
        });
    }
    out.push_str("  ],\n");
}

fn opt_list(items: impl Iterator<Item = Option<BigInt>>) -> String {
    let parts: Vec<String> = items
        .map(|x| x.map_or_else(|| "null".to_string(), |v| v.to_string()))
        .collect();
    format!("[{}]", parts.join(", "))
}

pub fn write_general(inst: &IlpInstance) -> String {
    let mut out = String::from("{\n  \"kind\": \"general\",\n");
    let _ = writeln!(out, "  \"num_vars\": {},", inst.num_vars);
    write_constraints(&mut out, &inst.constraints);
    let _ = writeln!(
        out,
        "  \"lb\": {},",
        opt_list(inst.bounds.iter().map(|b| b.lower.clone()))
    );
    let _ = writeln!(
        out,
        "  \"ub\": {}",
        opt_list(inst.bounds.iter().map(|b| b.upper.clone()))
    );
    out.push_str("}\n");
    out
}

pub fn write_cover_pack(inst: &CoverPackInstance) -> String {
    let mut out = format!("{{\n  \"kind\": \"{}\",\n", inst.sense.as_str());
    let _ = writeln!(out, "  \"num_vars\": {},", inst.num_vars);
    write_constraints(&mut out, &inst.constraints);
    let cost: Vec<String> = inst.cost.iter().map(BigInt::to_string).collect();
    let _ = writeln!(out, "  \"cost\": [{}],", cost.join(", "));
    let _ = writeln!(out, "  \"k\": {},", inst.budget);
    let _ = writeln!(out, "  \"ub\": {}", opt_list(inst.upper.iter().cloned()));
    out.push_str("}\n");
    out
}

pub fn write_graph(g: &GraphInstance) -> String {
    let edges: Vec<String> = g.edges.iter().map(|(u, v)| format!("[{u}, {v}]")).collect();
    format!(
        "{{\"n\": {}, \"edges\": [{}], \"k\": {}}}\n",
        g.n,
        edges.join(", "),
        g.k
    )
}

pub fn write_subset_sum(s: &SubsetSumInstance) -> String {
    let values: Vec<String> = s.values.iter().map(BigInt::to_string).collect();
    format!(
        "{{\"values\": [{}], \"target\": {}, \"k\": {}}}\n",
        values.join(", "),
        s.target,
        s.k
    )
}

pub fn write_sets(h: &HittingSetInstance) -> String {
    let sets: Vec<String> = h
        .sets
        .iter()
        .map(|s| {
            let items: Vec<String> = s.iter().map(usize::to_string).collect();
            format!("[{}]", items.join(", "))
        })
        .collect();
    format!(
        "{{\"universe\": {}, \"sets\": [{}], \"k\": {}}}\n",
        h.universe,
        sets.join(", "),
        h.k
    )
}

pub fn write_box(bx: &SearchBox) -> String {
    let ranges: Vec<String> = bx
        .ranges
        .iter()
        .map(|(lo, hi)| format!("[{lo}, {hi}]"))
        .collect();
    format!("{{\"ranges\": [{}]}}\n", ranges.join(", "))
}

pub fn parse_box(text: &str) -> Result<SearchBox> {
    let mut f = Fields::new(read_json(text)?, "box", &["ranges"])?;
    let ranges_v = f.require("ranges")?;
    let mut ranges = Vec::new();
    for (i, r) in array(&ranges_v, "ranges")?.iter().enumerate() {
        let here = format!("ranges[{i}]");
        let pair = array(r, &here)?;
        if pair.len() != 2 {
            return Err(Error::validation(format!("{here}: expected [lo, hi]")));
        }
        let (lo, hi) = (int(&pair[0], &here)?, int(&pair[1], &here)?);
        if lo > hi {
            return Err(Error::validation(format!(
                "{here}: lower end {lo} exceeds upper end {hi}"
            )));
        }
        ranges.push((lo, hi));
    }
    Ok(SearchBox::new(ranges))
}

pub fn write_merge_map(map: &MergeMap) -> String {
    let target: Vec<String> = map.target.iter().map(usize::to_string).collect();
    let survivor: Vec<String> = map.survivor.iter().map(bool::to_string).collect();
    format!(
        "{{\"target\": [{}], \"survivor\": [{}]}}\n",
        target.join(", "),
        survivor.join(", ")
    )
}

pub fn parse_merge_map(text: &str) -> Result<MergeMap> {
    let mut f = Fields::new(read_json(text)?, "merge map", &["target", "survivor"])?;
    let target_v = f.require("target")?;
    let target = array(&target_v, "target")?
        .iter()
        .map(|v| usize_of(v, "target"))
        .collect::<Result<Vec<_>>>()?;
    let survivor_v = f.require("survivor")?;
    let survivor = array(&survivor_v, "survivor")?
        .iter()
        .map(|v| {
            v.as_bool()
                .ok_or_else(|| Error::validation("survivor: expected booleans"))
        })
        .collect::<Result<Vec<_>>>()?;
    if target.len() != survivor.len() {
        return Err(Error::validation(
            "target and survivor lists differ in length",
        ));
    }
    Ok(MergeMap { target, survivor })
}

/// Witness vector as a JSON list of numbers.
pub fn witness_json(x: &[BigInt]) -> Value {
    Value::Array(x.iter().map(big_json).collect())
}

/// Reads a JSON list of integers, e.g. a stored witness.
pub fn parse_int_list(v: &Value, path: &str) -> Result<Vec<BigInt>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| int(x, &format!("{path}[{i}]")))
        .collect()
}
