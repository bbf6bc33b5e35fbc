//! Harmonic Cauchy-Riemann systems built from Poisson extensions.

use fofana_core::cauchy_riemann::{
    harmonic_cr_residual, harmonic_symbol_defect, harmonic_system, laplacian_residual, slice_identity_defect, HARMONIC_TOLERANCE,
};
use fofana_core::transforms::{heat_extend, poisson_extend};
use fofana_core::dilate;

use super::{excluded, require_smooth, system_defect, Context, Convergence};
use crate::error::LabError;
use crate::report::{Check, Record, SuiteResult};

pub const MIN_ORDER: f64 = 1.8;
pub const NEGATIVE_FACTOR: f64 = 10.0;
pub const SYMBOL_TOLERANCE: f64 = 1e-10;
pub const SLICE_IDENTITY_TOLERANCE: f64 = 1e-10;
pub const COVARIANCE_TOLERANCE: f64 = 1e-10;

struct Worst {
    cr: f64,
    laplacian: f64,
    cr_order: f64,
    laplacian_order: f64,
    cr_negative: f64,
    laplacian_negative: f64,
    slice: f64,
    covariance: f64,
}

impl Worst {
    fn new() -> Self {
        Self {
            cr: 0.0,
            laplacian: 0.0,
            cr_order: f64::INFINITY,
            laplacian_order: f64::INFINITY,
            cr_negative: f64::INFINITY,
            laplacian_negative: f64::INFINITY,
            slice: 0.0,
            covariance: 0.0,
        }
    }
}

pub fn run(cx: &Context) -> Result<SuiteResult, LabError> {
    let mut out = SuiteResult::new("cr-harmonic");
    let symbol = harmonic_symbol_defect(cx.spec());
    out.push(
        Record::new("symbol_identity", "lattice")
            .defect(symbol)
            .reference(SYMBOL_TOLERANCE)
            .pass(symbol <= SYMBOL_TOLERANCE),
    );
    out.check(Check::at_most("harmonic_symbol_identity", symbol, SYMBOL_TOLERANCE));
    let slab = &cx.resolved.ladders.slab;
    let fine_slab = slab.refined();
    let fine_spec = cx.spec().refined();
    let alpha = cx.alpha();
    let mut w = Worst::new();
    let mut checked = 0usize;
    for (f, u) in cx.functions() {
        if !f.smooth {
            out.push(excluded("harmonic_cr", f));
            continue;
        }
        checked += 1;
        let system = harmonic_system(u, slab)?;
        let report = harmonic_cr_residual(&system)?;
        for c in &report.conditions {
            out.push(
                Record::new("harmonic_cr", &f.name)
                    .value(c.residual)
                    .reference(report.tolerance)
                    .pass(c.residual <= report.tolerance)
                    .note(&c.name),
            );
        }
        w.cr = w.cr.max(report.max());

        let u_fine = f.sample(&fine_spec);
        let cr = Convergence { coarse: report.max(), fine: harmonic_cr_residual(&harmonic_system(&u_fine, &fine_slab)?)?.max() };
        w.cr_order = w.cr_order.min(cr.order());
        out.push(cr.record("harmonic_cr_order", &f.name).pass(cr.order() >= MIN_ORDER));

        let broken = harmonic_cr_residual(&system.with_component_negated(0))?.max() / report.max();
        w.cr_negative = w.cr_negative.min(broken);
        out.push(
            Record::new("harmonic_cr_negative", &f.name)
                .value(broken)
                .reference(NEGATIVE_FACTOR)
                .pass(broken >= NEGATIVE_FACTOR)
                .note("first component negated; value = residual / baseline"),
        );

        let lap = laplacian_residual(&poisson_extend(u, slab)?)?.max();
        w.laplacian = w.laplacian.max(lap);
        out.push(
            Record::new("laplacian", &f.name)
                .value(lap)
                .reference(HARMONIC_TOLERANCE)
                .pass(lap <= HARMONIC_TOLERANCE),
        );
        let conv = Convergence { coarse: lap, fine: laplacian_residual(&poisson_extend(&u_fine, &fine_slab)?)?.max() };
        w.laplacian_order = w.laplacian_order.min(conv.order());
        out.push(conv.record("laplacian_order", &f.name).pass(conv.order() >= MIN_ORDER));
        let wrong = laplacian_residual(&heat_extend(u, slab)?)?.max() / lap;
        w.laplacian_negative = w.laplacian_negative.min(wrong);
        out.push(
            Record::new("laplacian_negative", &f.name)
                .value(wrong)
                .reference(NEGATIVE_FACTOR)
                .pass(wrong >= NEGATIVE_FACTOR)
                .note("heat extension fed in; value = residual / baseline"),
        );

        let slice = slice_identity_defect(&system)?;
        w.slice = w.slice.max(slice);
        out.push(
            Record::new("slice_identity", &f.name)
                .defect(slice)
                .reference(SLICE_IDENTITY_TOLERANCE)
                .pass(slice <= SLICE_IDENTITY_TOLERANCE),
        );

        for rho in cx.dilations() {
            let moved = harmonic_system(&dilate(u, alpha, rho)?, &slab.rescaled(rho)?)?;
            let defect = system_defect(&moved, &system.dilated(alpha, rho)?)?;
            w.covariance = w.covariance.max(defect);
            out.push(
                Record::new("dilation_covariance", &f.name)
                    .parameter(rho)
                    .defect(defect)
                    .reference(COVARIANCE_TOLERANCE)
                    .pass(defect <= COVARIANCE_TOLERANCE),
            );
        }
    }
    if !require_smooth(&mut out, checked) {
        return Ok(out);
    }
    out.check(Check::at_most("harmonic_cr_residual", w.cr, HARMONIC_TOLERANCE));
    out.check(Check::at_least("harmonic_cr_order", w.cr_order, MIN_ORDER));
    out.check(Check::at_least("harmonic_cr_negative_control", w.cr_negative, NEGATIVE_FACTOR));
    out.check(Check::at_most("laplacian_residual", w.laplacian, HARMONIC_TOLERANCE));
    out.check(Check::at_least("laplacian_order", w.laplacian_order, MIN_ORDER));
    out.check(Check::at_least("laplacian_negative_control", w.laplacian_negative, NEGATIVE_FACTOR));
    out.check(Check::at_most("slice_identity", w.slice, SLICE_IDENTITY_TOLERANCE));
    out.check(Check::at_most("dilation_covariance", w.covariance, COVARIANCE_TOLERANCE));
    Ok(out)
}
