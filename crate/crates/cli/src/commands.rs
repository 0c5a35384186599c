use std::fs;
use std::path::{Path, PathBuf};

use ilpk::corpus::{corpus_rng, CoverPackParams};
use ilpk::cover::{
    basic_reduce_cover, branch_solve_cover_capped, kernelize_cover, reduce_cover_kqr,
};
use ilpk::format::{self, witness_json, Instance};
use ilpk::gadgets::{
    cross_compose_with, hitting_set_to_cover, independent_set_to_packing, sparsify_3,
    subset_sum_to_cover, subset_sum_to_packing, to_cover, ComposeOptions,
};
use ilpk::oracle::{self, solve_feasibility, solve_table};
use ilpk::packing::basic_reduce_packing;
use ilpk::table::compress_any;
use ilpk::trivial::{dedup_constraints, merge_pattern_variables};
use ilpk::{CoverPackInstance, Decision, Error, OracleVerdict, ReductionReport, SearchBox, Sense};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::io::{
    node_cap, read_box, read_graph, read_input, read_instance, write, write_json, CliError,
    CliResult, Input, EXIT_DISAGREE, EXIT_NO, EXIT_OK, EXIT_YES,
};
use crate::{
    ComposeArgs, KernelizeArgs, Method, Op, Pipeline, Problem, SolveArgs, TransformArgs, VerifyArgs,
};

fn sense_of(problem: Problem) -> Sense {
    match problem {
        Problem::Cover => Sense::Cover,
        Problem::Packing => Sense::Packing,
    }
}

fn decision_code(d: Decision) -> u8 {
    match d {
        Decision::Yes => EXIT_YES,
        Decision::No => EXIT_NO,
    }
}

/// Runs a reduction pipeline on a covering or packing instance.
pub fn run_pipeline(
    inst: &CoverPackInstance,
    pipeline: Pipeline,
) -> CliResult<(CoverPackInstance, ReductionReport)> {
    let out = match (inst.sense, pipeline) {
        (Sense::Cover, Pipeline::Basic) => basic_reduce_cover(inst)?,
        (Sense::Cover, Pipeline::Sunflower) => kernelize_cover(inst)?,
        (Sense::Cover, Pipeline::Kqr) => reduce_cover_kqr(inst)?,
        (Sense::Cover, Pipeline::Full) => {
            let (kernel, mut report) = kernelize_cover(inst)?;
            if !report.is_decided() {
                let (out, step) = reduce_cover_kqr(&kernel)?;
                report.absorb(step);
                return Ok((out, report));
            }
            (kernel, report)
        }
        (Sense::Packing, Pipeline::Basic | Pipeline::Full) => basic_reduce_packing(inst)?,
        (Sense::Packing, p) => {
            return Err(CliError::usage(format!(
                "pipeline {p:?} applies to covering programs only"
            )));
        }
    };
    Ok(out)
}

fn expect_cover_pack(
    inst: Instance,
    problem: Problem,
    path: &Path,
) -> CliResult<CoverPackInstance> {
    match inst {
        Instance::CoverPack(i) if i.sense == sense_of(problem) => Ok(i),
        Instance::CoverPack(i) => Err(CliError::usage(format!(
            "{}: instance is {} but --problem is {problem:?}",
            path.display(),
            i.sense.as_str()
        ))),
        _ => Err(CliError::usage(format!(
            "{}: expected a cover or packing instance",
            path.display()
        ))),
    }
}

pub fn kernelize(a: &KernelizeArgs) -> CliResult<u8> {
    let inst = expect_cover_pack(read_instance(&a.input)?, a.problem, &a.input)?;
    let (out, report) = run_pipeline(&inst, a.pipeline)?;
    if let Some(path) = &a.out {
        write(path, &format::write_cover_pack(&out))?;
    }
    if let Some(path) = &a.report {
        write_json(path, &report.to_json())?;
    }
    if let Some(path) = &a.tables {
        write(path, &compress_any(&out)?.to_text())?;
    }
    let (b, f) = (&report.stats_before, &report.stats_after);
    println!(
        "{}: n {} -> {}, m {} -> {}, r {} -> {}, q {} -> {}",
        report.op, b.n, f.n, b.m, f.m, b.r, f.r, b.q, f.q
    );
    Ok(match report.decision() {
        Some(d) => {
            println!("early decision: {d}");
            decision_code(d)
        }
        None => EXIT_OK,
    })
}

fn verdict_json(v: &OracleVerdict, method: &str, extra: Option<(&str, Value)>) -> Value {
    let mut out = json!({
        "decision": v.decision.to_string(),
        "witness": v.witness.as_deref().map_or(Value::Null, witness_json),
        "nodes_explored": v.nodes_explored,
        "method": method,
    });
    if let Some((key, value)) = extra {
        out[key] = value;
    }
    out
}

pub fn solve(a: &SolveArgs) -> CliResult<u8> {
    let cap = node_cap(a.node_cap)?;
    let input = read_input(&a.input)?;
    let (verdict, extra) = match (&input, a.method) {
        (Input::Table(t), Method::Oracle) => (solve_table(t, cap)?, None),
        (Input::Json(Instance::General(inst)), Method::Oracle) => {
            let path = a
                .search_box
                .as_ref()
                .ok_or_else(|| CliError::usage("a general instance needs --box"))?;
            (solve_feasibility(inst, &read_box(path)?, cap)?, None)
        }
        (Input::Json(Instance::CoverPack(inst)), Method::Oracle) => {
            (oracle::solve(inst, cap)?, None)
        }
        (Input::Json(Instance::CoverPack(inst)), Method::Branch) if inst.sense == Sense::Cover => {
            let out = branch_solve_cover_capped(inst, cap)?;
            (out.verdict, Some(("leaves", json!(out.leaves))))
        }
        (_, Method::Branch) => {
            return Err(CliError::usage("--method branch needs a covering instance"))
        }
        (Input::Json(_), Method::Oracle) => {
            return Err(CliError::usage(
                "solve takes a general, cover, packing or table instance; transform it first",
            ))
        }
    };
    let method = match a.method {
        Method::Oracle => "oracle",
        Method::Branch => "branch",
    };
    println!("{} ({} nodes)", verdict.decision, verdict.nodes_explored);
    if let Some(path) = &a.out {
        write_json(path, &verdict_json(&verdict, method, extra))?;
    }
    Ok(decision_code(verdict.decision))
}

fn json_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries =
        fs::read_dir(dir).map_err(|e| CliError::usage(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn compose(a: &ComposeArgs) -> CliResult<u8> {
    let files = json_files(&a.graphs)?;
    if files.is_empty() {
        return Err(CliError::usage(format!(
            "{}: no .json graph files",
            a.graphs.display()
        )));
    }
    let graphs = files
        .iter()
        .map(|f| read_graph(f))
        .collect::<CliResult<Vec<_>>>()?;
    let composed = cross_compose_with(
        &graphs,
        ComposeOptions {
            share_bits: a.share_bits,
        },
    )?;
    write(&a.out, &format::write_general(&composed.instance))?;
    write(&a.box_out, &format::write_box(&composed.search_box))?;
    if let Some(path) = &a.report {
        let mut report = composed.report.to_json();
        report["inputs"] = json!(files
            .iter()
            .map(|f| f.display().to_string())
            .collect::<Vec<_>>());
        report["t"] = json!(composed.t);
        report["ell"] = json!(composed.ell);
        report["names"] = json!(composed.names);
        write_json(path, &report)?;
    }
    println!(
        "composed {} graphs (t = {}): {} variables, {} constraints",
        graphs.len(),
        composed.t,
        composed.instance.num_vars,
        composed.instance.constraints.len()
    );
    Ok(EXIT_OK)
}

pub fn transform(a: &TransformArgs) -> CliResult<u8> {
    let inst = read_instance(&a.input)?;
    let wrong = |want: &str| {
        CliError::usage(format!(
            "{}: --op {:?} expects {want}",
            a.input.display(),
            a.op
        ))
    };
    let (text, report): (String, ReductionReport) = match (a.op, inst) {
        (Op::Sparsify3, Instance::General(g)) => {
            let sp = sparsify_3(&g)?;
            if let Some(out) = &a.box_out {
                let path = a
                    .search_box
                    .as_ref()
                    .ok_or_else(|| CliError::usage("--box-out needs --box"))?;
                write(out, &format::write_box(&sp.extend_box(&read_box(path)?)?))?;
            }
            (format::write_general(&sp.instance), sp.report)
        }
        (Op::ToCover, Instance::General(g)) => {
            let bounds: Vec<Option<BigInt>> = match &a.search_box {
                Some(path) => read_box(path)?
                    .ranges
                    .into_iter()
                    .map(|(_, hi)| Some(hi))
                    .collect(),
                None => Vec::new(),
            };
            let tr = to_cover(&g, &bounds)?;
            (format::write_cover_pack(&tr.instance), tr.report)
        }
        (Op::Dedup, Instance::General(g)) => {
            let (out, rep) = dedup_constraints(&g)?;
            (format::write_general(&out), rep)
        }
        (Op::MergePatterns, Instance::General(g)) => {
            let (out, rep, map) = merge_pattern_variables(&g)?;
            if let Some(path) = &a.map_out {
                write(path, &format::write_merge_map(&map))?;
            }
            (format::write_general(&out), rep)
        }
        (Op::Is2pack, Instance::Graph(g)) => generated(independent_set_to_packing(&g)?, "is2pack"),
        (Op::Ss2pack, Instance::SubsetSum(s)) => generated(subset_sum_to_packing(&s)?, "ss2pack"),
        (Op::Ss2cover, Instance::SubsetSum(s)) => generated(subset_sum_to_cover(&s)?, "ss2cover"),
        (Op::Hs2cover, Instance::HittingSet(h)) => generated(hitting_set_to_cover(&h)?, "hs2cover"),
        (Op::Sparsify3 | Op::ToCover | Op::Dedup | Op::MergePatterns, _) => {
            return Err(wrong("a general instance"))
        }
        (Op::Is2pack, _) => return Err(wrong("a graph")),
        (Op::Ss2pack | Op::Ss2cover, _) => return Err(wrong("a subset-sum instance")),
        (Op::Hs2cover, _) => return Err(wrong("a set family")),
    };
    write(&a.out, &text)?;
    if let Some(path) = &a.report {
        write_json(path, &report.to_json())?;
    }
    let f = &report.stats_after;
    println!("{}: n {}, m {}, r {}, q {}", report.op, f.n, f.m, f.r, f.q);
    Ok(EXIT_OK)
}

/// A generated instance with a report that only records its size.
fn generated(inst: CoverPackInstance, op: &str) -> (String, ReductionReport) {
    let mut report = ReductionReport::new(op, inst.stats());
    report.stats_after = inst.stats();
    (format::write_cover_pack(&inst), report)
}

/// Outcome of deciding one side of a pair.
enum Side {
    Decided(OracleVerdict),
    Skipped(String),
}

fn decide(inst: &Instance, bx: Option<&SearchBox>, cap: u64) -> CliResult<Side> {
    let result = match inst {
        Instance::CoverPack(i) => oracle::solve(i, cap),
        Instance::General(g) => {
            let bx = bx.ok_or_else(|| CliError::usage("a general instance needs a box"))?;
            solve_feasibility(g, bx, cap)
        }
        _ => {
            return Err(CliError::usage(
                "verify compares general, cover or packing instances",
            ))
        }
    };
    match result {
        Ok(v) => Ok(Side::Decided(v)),
        Err(e @ Error::SearchSpaceExceeded { .. }) => Ok(Side::Skipped(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

fn side_json(side: &Side) -> Value {
    match side {
        Side::Decided(v) => json!({
            "decision": v.decision.to_string(),
            "witness": v.witness.as_deref().map_or(Value::Null, witness_json),
        }),
        Side::Skipped(why) => json!({ "skipped": why }),
    }
}

/// `Some(true)` agree, `Some(false)` disagree, `None` skipped.
fn agreement(before: &Side, after: &Side) -> Option<bool> {
    match (before, after) {
        (Side::Decided(b), Side::Decided(a)) => Some(b.decision == a.decision),
        _ => None,
    }
}

pub fn verify(a: &VerifyArgs) -> CliResult<u8> {
    let cap = node_cap(a.node_cap)?;
    match (&a.before, &a.after, &a.corpus) {
        (Some(before), Some(after), None) => verify_pair(a, before, after, cap),
        (None, None, Some(dir)) => verify_corpus(a, dir, cap),
        _ => Err(CliError::usage(
            "verify needs either --before and --after, or --corpus",
        )),
    }
}

fn verify_pair(a: &VerifyArgs, before: &Path, after: &Path, cap: u64) -> CliResult<u8> {
    let bx = a.search_box.as_deref().map(read_box).transpose()?;
    let after_bx = match &a.after_box {
        Some(p) => Some(read_box(p)?),
        None => bx.clone(),
    };
    let b = decide(&read_instance(before)?, bx.as_ref(), cap)?;
    let f = decide(&read_instance(after)?, after_bx.as_ref(), cap)?;
    let agree = agreement(&b, &f);
    let report = json!({
        "schema": ilpk::report::REPORT_SCHEMA,
        "op": "verify",
        "before": side_json(&b),
        "after": side_json(&f),
        "agree": agree,
    });
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    match agree {
        Some(true) => {
            println!("agree");
            Ok(EXIT_OK)
        }
        Some(false) => {
            println!(
                "DISAGREE: before {}, after {}",
                report["before"], report["after"]
            );
            Ok(EXIT_DISAGREE)
        }
        None => {
            println!("skipped: node cap {cap} exceeded");
            Ok(EXIT_OK)
        }
    }
}

fn corpus_params(a: &VerifyArgs) -> CoverPackParams {
    let mut p = match a.problem {
        Problem::Cover => CoverPackParams::cover(a.n, a.m, a.r, a.k),
        Problem::Packing => CoverPackParams::packing(a.n, a.m, a.r, usize::MAX, a.k),
    };
    if let Some(q) = a.q {
        p.q = q;
    }
    p.max_coeff = a.max_coeff;
    p.max_rhs = a.max_rhs;
    p.max_cost = a.max_cost;
    p
}

fn verify_corpus(a: &VerifyArgs, dir: &Path, cap: u64) -> CliResult<u8> {
    if a.n == 0 || a.r == 0 || a.max_coeff == 0 || a.max_cost == 0 {
        return Err(CliError::usage(
            "--n, --r, --max-coeff and --max-cost must be positive",
        ));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("{}: {e}", dir.display())))?;
    let params = corpus_params(a);
    let rows: Vec<CliResult<(String, Value, Option<bool>)>> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let name = format!("case-{i:04}");
            let inst = params.generate(&mut corpus_rng(a.seed, i));
            let (out, _) = run_pipeline(&inst, a.pipeline)?;
            write(&dir.join(format!("{name}.before.json")), &format::write_cover_pack(&inst))?;
            write(&dir.join(format!("{name}.after.json")), &format::write_cover_pack(&out))?;
            let b = decide(&Instance::CoverPack(inst), None, cap)?;
            let f = decide(&Instance::CoverPack(out), None, cap)?;
            let agree = agreement(&b, &f);
            let row = json!({ "name": name, "before": side_json(&b), "after": side_json(&f), "agree": agree });
            Ok((name, row, agree))
        })
        .collect();
    let mut cases = Vec::new();
    let (mut agreed, mut disagreed, mut skipped) = (0, 0, 0);
    for row in rows {
        let (name, value, agree) = row?;
        match agree {
            Some(true) => agreed += 1,
            Some(false) => {
                disagreed += 1;
                println!(
                    "DISAGREE {name}: before {}, after {}",
                    value["before"], value["after"]
                );
            }
            None => skipped += 1,
        }
        cases.push(value);
    }
    let report = json!({
        "schema": ilpk::report::REPORT_SCHEMA,
        "op": "verify",
        "seed": a.seed,
        "count": a.count,
        "problem": format!("{:?}", a.problem).to_lowercase(),
        "pipeline": format!("{:?}", a.pipeline).to_lowercase(),
        "params": {
            "n": a.n, "m": a.m, "r": a.r, "q": a.q, "k": a.k,
            "max_coeff": a.max_coeff, "max_rhs": a.max_rhs, "max_cost": a.max_cost,
        },
        "node_cap": cap,
        "agreed": agreed,
        "disagreed": disagreed,
        "skipped": skipped,
        "cases": cases,
    });
    let report_path = a.report.clone().unwrap_or_else(|| dir.join("report.json"));
    write_json(&report_path, &report)?;
    println!(
        "{agreed} agree, {disagreed} disagree, {skipped} skipped (seed {})",
        a.seed
    );
    Ok(if disagreed > 0 {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    })
}
