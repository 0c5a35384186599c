use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{Constraint, CoverPackInstance, IlpInstance, Relation, Sense};
use crate::report::ReductionReport;

/// Output of [`to_cover`]: variable `z_i` is `i` and its complement `ẑ_i`
/// is `n + i`.
#[derive(Clone, Debug)]
pub struct CoverTransform {
    pub instance: CoverPackInstance,
    /// The range bound `B_i` used for each input variable.
    pub bounds: Vec<BigInt>,
    pub report: ReductionReport,
}

impl CoverTransform {
    /// `z = x`, `ẑ = B − x`.
    pub fn extend_witness(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = x.to_vec();
        out.extend(self.bounds.iter().zip(x).map(|(b, v)| b - v));
        out
    }

    pub fn lift_witness(&self, y: &[BigInt]) -> Vec<BigInt> {
        y[..self.bounds.len()].to_vec()
    }
}

/// Rewrites a general instance over `0 ≤ x_i ≤ B_i` as a covering program.
///
/// Equalities are split and `≤` rows negated, so every row reads
/// `Σ αᵢxᵢ ≥ b`. A negative coefficient `−γ` on `x_i` is moved to the
/// complement `ẑ_i = B_i − x_i`, adding `γB_i` to the right-hand side. Rows
/// whose right-hand side ends up at most 0 hold for every nonnegative point
/// and are dropped. Finally `z_i + ẑ_i ≥ B_i` for every `i`, with unit costs
/// and budget `Σ B_i`, forces `ẑ_i = B_i − z_i` exactly.
///
/// `bounds[i]` overrides the instance's upper bound on `x_i` (the smaller
/// one is used); a variable with neither is rejected, as is any lower bound
/// other than 0.
pub fn to_cover(inst: &IlpInstance, bounds: &[Option<BigInt>]) -> Result<CoverTransform> {
    inst.validate()?;
    let n = inst.num_vars;
    if bounds.len() != n && !bounds.is_empty() {
        return Err(Error::invalid(format!(
            "{} bounds given for {n} variables",
            bounds.len()
        )));
    }
    let mut big_b = Vec::with_capacity(n);
    for v in 0..n {
        let vb = &inst.bounds[v];
        if vb.lower.as_ref().is_none_or(|l| !l.is_zero()) {
            return Err(Error::invalid(format!(
                "variable {v} must have lower bound 0"
            )));
        }
        let given = bounds.get(v).cloned().flatten();
        let b = match (given, &vb.upper) {
            (Some(g), Some(u)) => g.min(u.clone()),
            (Some(g), None) => g,
            (None, Some(u)) => u.clone(),
            (None, None) => return Err(Error::invalid(format!("variable {v} has no upper bound"))),
        };
        if b.is_negative() {
            return Err(Error::invalid(format!(
                "variable {v} has negative bound {b}"
            )));
        }
        big_b.push(b);
    }

    let mut report = ReductionReport::new("to_cover", inst.stats());
    let mut rows = Vec::new();
    let mut split = 0;
    let mut dropped = 0;
    for c in &inst.constraints {
        let signs: &[i64] = match c.rel {
            Relation::Ge => &[1],
            Relation::Le => &[-1],
            Relation::Eq => {
                split += 1;
                &[1, -1]
            }
        };
        for &sign in signs {
            let mut rhs = &c.rhs * sign;
            let mut terms = Vec::with_capacity(c.coeffs.len());
            for (v, a) in &c.coeffs {
                let a = a * sign;
                if a.is_negative() {
                    rhs -= &a * &big_b[*v];
                    terms.push((n + v, -a));
                } else {
                    terms.push((*v, a));
                }
            }
            if rhs.is_positive() {
                rows.push(Constraint::ge(terms, rhs));
            } else {
                dropped += 1;
            }
        }
    }
    let rows_len = rows.len();
    for (v, b) in big_b.iter().enumerate() {
        rows.push(Constraint::ge(
            [(v, BigInt::one()), (n + v, BigInt::one())],
            b.clone(),
        ));
    }
    let budget: BigInt = big_b.iter().sum();
    let mut instance = CoverPackInstance::new(
        Sense::Cover,
        2 * n,
        rows,
        vec![BigInt::one(); 2 * n],
        budget,
    );
    instance.upper = vec![None; 2 * n];

    report.step(
        "split-equality",
        -(split as i64),
        0,
        format!("split {split} equalities into two rows"),
    );
    report.step(
        "trivial-row",
        dropped as i64,
        0,
        format!("dropped {dropped} rows with right-hand side at most 0"),
    );
    debug_assert_eq!(rows_len + dropped, inst.constraints.len() + split);
    report.step(
        "complement-variable",
        -(n as i64),
        -(n as i64),
        "added z_i + z'_i >= B_i for each variable",
    );
    report.finish(&instance, Vec::new());
    Ok(CoverTransform {
        instance,
        bounds: big_b,
        report,
    })
}
