use num_bigint::BigInt;

use super::basic::normalize;
use super::check_cover;
use crate::error::Result;
use crate::model::{CoverPackInstance, Sense};
use crate::oracle::Decision;
use crate::report::ReductionReport;

/// Normalizes (right-hand sides and costs at least 1, no unused variables)
/// and answers NO when more than `k·q` constraints remain: each of at most
/// `k` nonzero variables covers at most `q` constraints. A surviving
/// instance has at most `kq` constraints and `kqr` variables.
pub fn reduce_cover_kqr(inst: &CoverPackInstance) -> Result<(CoverPackInstance, ReductionReport)> {
    check_cover(inst)?;
    let mut report = ReductionReport::new("reduce_cover_kqr", inst.stats());
    let out = normalize(inst, &mut report, false);
    if report.is_decided() {
        return Ok((out, report));
    }
    let q = out.stats().q;
    let cap = &out.budget * BigInt::from(q);
    if BigInt::from(out.constraints.len()) > cap {
        let reason = format!("{} constraints exceed k·q = {cap}", out.constraints.len());
        let no = report.conclude(Sense::Cover, Decision::No, "kq-bound", reason, &out.budget);
        return Ok((no, report));
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Constraint;
    use num_traits::One;

    #[test]
    fn two_disjoint_rows_exceed_kq() {
        let inst = CoverPackInstance::new(
            Sense::Cover,
            2,
            vec![
                Constraint::ge(vec![(0, 1)], 1),
                Constraint::ge(vec![(1, 1)], 1),
            ],
            vec![BigInt::one(); 2],
            1,
        );
        let (_, rep) = reduce_cover_kqr(&inst).unwrap();
        assert_eq!(rep.decision(), Some(Decision::No));
        assert!(rep.is_consistent());
    }

    #[test]
    fn under_bounds_is_unchanged() {
        let inst = CoverPackInstance::new(
            Sense::Cover,
            2,
            vec![Constraint::ge(vec![(0, 1), (1, 1)], 1)],
            vec![BigInt::one(); 2],
            1,
        );
        let (out, rep) = reduce_cover_kqr(&inst).unwrap();
        assert_eq!(out, inst);
        assert!(rep.decision().is_none());
    }
}
