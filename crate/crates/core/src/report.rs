//! Trace of a reduction run, serialized as the `rep-v1` JSON document.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::format::big_json;
use crate::model::{CoverPackInstance, IlpInstance, Sense, SparsenessStats};
use crate::oracle::Decision;

pub const REPORT_SCHEMA: &str = "rep-v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: String,
    /// Negative when the step adds constraints.
    pub constraints_removed: i64,
    /// Negative when the step adds variables.
    pub variables_removed: i64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EarlyDecision {
    pub decision: Decision,
    pub rule: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub op: String,
    pub steps: Vec<ReductionStep>,
    pub early_decision: Option<EarlyDecision>,
    pub stats_before: SparsenessStats,
    pub stats_after: SparsenessStats,
    /// `var_map[i]` is the input variable that output variable `i` stands for.
    /// Empty when the output has fresh variables with no single preimage.
    pub var_map: Vec<usize>,
}

impl ReductionReport {
    pub fn new(op: impl Into<String>, before: SparsenessStats) -> Self {
        let n = before.n;
        ReductionReport {
            op: op.into(),
            steps: Vec::new(),
            early_decision: None,
            stats_after: before.clone(),
            stats_before: before,
            var_map: (0..n).collect(),
        }
    }

    pub fn step(
        &mut self,
        rule: &str,
        constraints_removed: i64,
        variables_removed: i64,
        detail: impl Into<String>,
    ) {
        self.steps.push(ReductionStep {
            rule: rule.to_string(),
            constraints_removed,
            variables_removed,
            detail: detail.into(),
        });
    }

    pub fn decide(&mut self, decision: Decision, rule: &str, reason: impl Into<String>) {
        self.early_decision = Some(EarlyDecision {
            decision,
            rule: rule.to_string(),
            reason: reason.into(),
        });
    }

    pub fn is_decided(&self) -> bool {
        self.early_decision.is_some()
    }

    pub fn decision(&self) -> Option<Decision> {
        self.early_decision.as_ref().map(|d| d.decision)
    }

    pub fn total_constraints_removed(&self) -> i64 {
        self.steps.iter().map(|s| s.constraints_removed).sum()
    }

    pub fn total_variables_removed(&self) -> i64 {
        self.steps.iter().map(|s| s.variables_removed).sum()
    }

    /// Removal totals agree with the before/after statistics.
    pub fn is_consistent(&self) -> bool {
        let dm = self.stats_before.m as i64 - self.stats_after.m as i64;
        let dn = self.stats_before.n as i64 - self.stats_after.n as i64;
        self.total_constraints_removed() == dm && self.total_variables_removed() == dn
    }

    /// Records an early decision and returns the fixed-answer instance that
    /// replaces the input. A closing step accounts for whatever the earlier
    /// steps did not remove, so the totals stay consistent.
    pub fn conclude(
        &mut self,
        sense: Sense,
        decision: Decision,
        rule: &str,
        reason: impl Into<String>,
        budget: &BigInt,
    ) -> CoverPackInstance {
        let out = CoverPackInstance::trivial(sense, decision.is_yes(), budget);
        self.decide(decision, rule, reason);
        let after = out.stats();
        let dm = self.stats_before.m as i64 - after.m as i64 - self.total_constraints_removed();
        let dn = self.stats_before.n as i64 - after.n as i64 - self.total_variables_removed();
        self.step(
            "trivial-instance",
            dm,
            dn,
            format!("replaced by a fixed {decision} instance"),
        );
        self.stats_after = after;
        self.var_map = Vec::new();
        out
    }

    /// Sets the output statistics and variable map.
    pub fn finish(&mut self, out: &CoverPackInstance, var_map: Vec<usize>) {
        self.stats_after = out.stats();
        self.var_map = var_map;
    }

    /// Sets the output statistics for a general instance built from
    /// scratch, which has no variable map.
    pub fn finish_ilp(&mut self, out: &IlpInstance) {
        self.stats_after = out.stats();
        self.var_map = Vec::new();
    }

    /// Appends another report run on this report's output.
    pub fn absorb(&mut self, other: ReductionReport) {
        self.steps.extend(other.steps);
        if self.early_decision.is_none() {
            self.early_decision = other.early_decision;
        }
        self.var_map = other.var_map.iter().map(|&v| self.var_map[v]).collect();
        self.stats_after = other.stats_after;
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("schema".into(), json!(REPORT_SCHEMA));
        root.insert("op".into(), json!(self.op));
        root.insert(
            "steps".into(),
            Value::Array(
                self.steps
                    .iter()
                    .map(|s| {
                        json!({
                            "rule": s.rule,
                            "constraints_removed": s.constraints_removed,
                            "variables_removed": s.variables_removed,
                            "detail": s.detail,
                        })
                    })
                    .collect(),
            ),
        );
        root.insert(
            "early_decision".into(),
            match &self.early_decision {
                None => Value::Null,
                Some(d) => json!({
                    "decision": d.decision.to_string(),
                    "rule": d.rule,
                    "reason": d.reason,
                }),
            },
        );
        root.insert("stats_before".into(), stats_json(&self.stats_before));
        root.insert("stats_after".into(), stats_json(&self.stats_after));
        root.insert("var_map".into(), json!(self.var_map));
        Value::Object(root)
    }
}

pub fn stats_json(s: &SparsenessStats) -> Value {
    json!({
        "n": s.n,
        "m": s.m,
        "r": s.r,
        "q": s.q,
        "C": big_json(&s.max_abs_coeff),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Constraint;

    #[test]
    fn absorb_composes_var_maps() {
        let before = SparsenessStats::compute(4, &[]);
        let mut a = ReductionReport::new("x", before.clone());
        a.var_map = vec![1, 3];
        let mut b = ReductionReport::new("y", SparsenessStats::compute(2, &[]));
        b.var_map = vec![1];
        b.stats_after = SparsenessStats::compute(1, &[]);
        a.absorb(b);
        assert_eq!(a.var_map, vec![3]);
    }

    #[test]
    fn json_has_schema_and_stats() {
        let cons = vec![Constraint::ge(vec![(0, 1)], 12)];
        let mut r = ReductionReport::new("basic", SparsenessStats::compute(1, &cons));
        r.decide(Decision::No, "empty-constraint", "0 >= 1");
        let v = r.to_json();
        assert_eq!(v["schema"], "rep-v1");
        assert_eq!(v["early_decision"]["decision"], "NO");
        assert_eq!(v["stats_before"]["C"].to_string(), "12");
    }
}
