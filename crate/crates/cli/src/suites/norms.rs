//! Exact norm values, the dilation reindexing identity and the restriction table.

use fofana_core::hardy_fofana::restricted_at_infinity_diag;
use fofana_core::{amalgam_norm, dilate, fofana_norm, lp_norm, sample, Exponents};

use super::{max_rel_diff, rel_diff, Context};
use crate::error::LabError;
use crate::report::{Check, Record, SuiteResult};

pub const EXACT_TOLERANCE: f64 = 1e-12;
pub const REINDEX_TOLERANCE: f64 = 1e-12;

pub fn run(cx: &Context) -> Result<SuiteResult, LabError> {
    let mut out = SuiteResult::new("norms");
    exact_values(cx, &mut out)?;
    fofana_table(cx, &mut out)?;
    restriction_table(cx, &mut out)?;
    Ok(out)
}

fn unit_box(lo: f64, hi: f64) -> impl Fn(&[f64]) -> f64 {
    move |x: &[f64]| {
        let first = x[0] >= lo && x[0] < hi;
        let rest = x[1..].iter().all(|&v| (0.0..1.0).contains(&v));
        if first && rest {
            1.0
        } else {
            0.0
        }
    }
}

fn exact_values(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let spec = cx.spec();
    let mut worst = 0.0f64;
    let two = sample(unit_box(0.0, 2.0), spec)?;
    for p in [1.0, 2.0] {
        let v = amalgam_norm(&two, p, 4.0)?;
        let reference = 2f64.powf(0.25);
        let defect = rel_diff(v, reference);
        worst = worst.max(defect);
        out.push(
            Record::new("exact_amalgam", "chi[0,2)")
                .lebesgue(p, 4.0)
                .value(v)
                .reference(reference)
                .defect(defect)
                .pass(defect <= EXACT_TOLERANCE),
        );
    }
    let cube = sample(unit_box(0.0, 1.0), spec)?;
    for (p, q) in [(1.0, 1.0), (2.0, 4.0), (1.5, 3.0)] {
        let v = amalgam_norm(&cube, p, q)?;
        let defect = rel_diff(v, 1.0);
        worst = worst.max(defect);
        out.push(
            Record::new("exact_amalgam", "chi_Q0")
                .lebesgue(p, q)
                .value(v)
                .reference(1.0)
                .defect(defect)
                .pass(defect <= EXACT_TOLERANCE),
        );
    }
    let r = &cx.resolved.ladders.r;
    for (f, u) in cx.functions() {
        for a in [1.0, 2.0, 3.0] {
            let e = Exponents::new(a, a, a)?;
            let v = fofana_norm(u, &e, r)?.value;
            let reference = lp_norm(u, a)?;
            let defect = rel_diff(v, reference);
            worst = worst.max(defect);
            out.push(
                Record::new("exact_diagonal", &f.name)
                    .exponents(&e)
                    .value(v)
                    .reference(reference)
                    .defect(defect)
                    .pass(defect <= EXACT_TOLERANCE),
            );
        }
    }
    out.check(Check::at_most("exact_values", worst, EXACT_TOLERANCE));
    Ok(())
}

fn fofana_table(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let r = &cx.resolved.ladders.r;
    let rhos = cx.resolved.ladders.rho.members();
    let mut worst = 0.0f64;
    for (f, u) in cx.functions() {
        for e in cx.exponents() {
            let report = fofana_norm(u, e, r)?;
            let amalgam = amalgam_norm(u, e.p(), e.q())?;
            let mut rows = Vec::new();
            let mut local = 0.0f64;
            for &rho in &rhos {
                let dilated = fofana_norm(&dilate(u, e.alpha(), rho)?, e, r)?;
                let shifted = fofana_norm(u, e, &r.rescaled(rho)?)?;
                let defect = max_rel_diff(&dilated.terms, &shifted.terms);
                local = local.max(defect);
                rows.push(
                    Record::new("reindex", &f.name)
                        .exponents(e)
                        .parameter(rho)
                        .value(dilated.value)
                        .reference(shifted.value)
                        .defect(defect)
                        .pass(defect <= REINDEX_TOLERANCE),
                );
            }
            worst = worst.max(local);
            out.push(
                Record::new("fofana", &f.name)
                    .exponents(e)
                    .parameter(report.argmax)
                    .value(report.value)
                    .reference(amalgam)
                    .defect(local)
                    .pass(local <= REINDEX_TOLERANCE)
                    .note("parameter = maximizing r, reference = amalgam norm"),
            );
            out.records.extend(rows);
        }
    }
    out.check(Check::at_most("dilation_reindexing", worst, REINDEX_TOLERANCE));
    Ok(())
}

fn restriction_table(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let ladders = cx.ladders();
    let mu = &cx.resolved.ladders.mu;
    let mut violations = 0usize;
    for (f, u) in cx.functions() {
        for e in cx.exponents() {
            for row in restricted_at_infinity_diag(u, e, mu, &ladders)? {
                violations += usize::from(row.violated);
                let slack = if row.bound > 0.0 { row.norm / row.bound - 1.0 } else { 0.0 };
                out.push(
                    Record::new("restriction", &f.name)
                        .exponents(e)
                        .parameter(row.mu)
                        .value(row.norm)
                        .reference(row.bound)
                        .defect(slack)
                        .pass(!row.violated),
                );
            }
        }
    }
    out.check(Check::at_most("restriction_violations", violations as f64, 0.0));
    Ok(())
}
