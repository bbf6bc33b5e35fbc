//! Temperature Cauchy-Riemann systems built from heat extensions.

use fofana_core::cauchy_riemann::{
    caloric_map, caloric_norm, heat_residual, slice_identity_defect, temperature_cr_residual,
    temperature_symbol_defect, HEAT_TOLERANCE, TEMPERATURE_TOLERANCE,
};
use fofana_core::hardy_fofana::hardy_fofana_norm;
use fofana_core::dilate;
use fofana_core::transforms::{heat_extend, poisson_extend};

use super::{excluded, reindexed, require_smooth, system_defect, triple_key, Context, Convergence};
use crate::error::LabError;
use crate::report::{Check, Record, SuiteResult};

pub const MIN_ORDER: f64 = 1.8;
pub const NEGATIVE_FACTOR: f64 = 10.0;
pub const SYMBOL_TOLERANCE: f64 = 1e-10;
pub const SLICE_IDENTITY_TOLERANCE: f64 = 1e-10;
pub const COVARIANCE_TOLERANCE: f64 = 1e-10;
pub const CALORIC_DRIFT_TOLERANCE: f64 = 0.1;

struct Worst {
    cr: f64,
    heat: f64,
    cr_order: f64,
    heat_order: f64,
    cr_negative: f64,
    heat_negative: f64,
    slice: f64,
    covariance: f64,
    caloric_drift: f64,
}

impl Worst {
    fn new() -> Self {
        Self {
            cr: 0.0,
            heat: 0.0,
            cr_order: f64::INFINITY,
            heat_order: f64::INFINITY,
            cr_negative: f64::INFINITY,
            heat_negative: f64::INFINITY,
            slice: 0.0,
            covariance: 0.0,
            caloric_drift: 0.0,
        }
    }
}

pub fn run(cx: &Context) -> Result<SuiteResult, LabError> {
    let mut out = SuiteResult::new("cr-temperature");
    let symbol = temperature_symbol_defect(cx.spec());
    out.push(
        Record::new("symbol_identity", "lattice")
            .defect(symbol)
            .reference(SYMBOL_TOLERANCE)
            .pass(symbol <= SYMBOL_TOLERANCE),
    );
    out.check(Check::at_most("temperature_symbol_identity", symbol, SYMBOL_TOLERANCE));

    let slab = &cx.resolved.ladders.slab;
    let fine_slab = slab.refined();
    let fine_spec = cx.spec().refined();
    let alpha = cx.alpha();
    let ladders = cx.ladders();
    let mut w = Worst::new();
    let mut checked = 0usize;
    for (f, u) in cx.functions() {
        if !f.smooth {
            out.push(excluded("temperature_cr", f));
            continue;
        }
        checked += 1;
        let system = caloric_map(u, slab)?;
        let report = temperature_cr_residual(&system)?;
        for c in &report.conditions {
            out.push(
                Record::new("temperature_cr", &f.name)
                    .value(c.residual)
                    .reference(report.tolerance)
                    .pass(c.residual <= report.tolerance)
                    .note(&c.name),
            );
        }
        w.cr = w.cr.max(report.max());

        let u_fine = f.sample(&fine_spec);
        let cr = Convergence { coarse: report.max(), fine: temperature_cr_residual(&caloric_map(&u_fine, &fine_slab)?)?.max() };
        w.cr_order = w.cr_order.min(cr.order());
        out.push(cr.record("temperature_cr_order", &f.name).pass(cr.order() >= MIN_ORDER));

        let broken = temperature_cr_residual(&system.with_component_negated(0))?.max() / report.max();
        w.cr_negative = w.cr_negative.min(broken);
        out.push(
            Record::new("temperature_cr_negative", &f.name)
                .value(broken)
                .reference(NEGATIVE_FACTOR)
                .pass(broken >= NEGATIVE_FACTOR)
                .note("first component negated; value = residual / baseline"),
        );

        let heat = heat_residual(&heat_extend(u, slab)?)?.max();
        w.heat = w.heat.max(heat);
        out.push(Record::new("heat", &f.name).value(heat).reference(HEAT_TOLERANCE).pass(heat <= HEAT_TOLERANCE));
        let conv = Convergence { coarse: heat, fine: heat_residual(&heat_extend(&u_fine, &fine_slab)?)?.max() };
        w.heat_order = w.heat_order.min(conv.order());
        out.push(conv.record("heat_order", &f.name).pass(conv.order() >= MIN_ORDER));
        let wrong = heat_residual(&poisson_extend(u, slab)?)?.max() / heat;
        w.heat_negative = w.heat_negative.min(wrong);
        out.push(
            Record::new("heat_negative", &f.name)
                .value(wrong)
                .reference(NEGATIVE_FACTOR)
                .pass(wrong >= NEGATIVE_FACTOR)
                .note("Poisson extension fed in; value = residual / baseline"),
        );

        let slice = slice_identity_defect(&system)?;
        w.slice = w.slice.max(slice);
        out.push(
            Record::new("slice_identity", &f.name)
                .defect(slice)
                .reference(SLICE_IDENTITY_TOLERANCE)
                .pass(slice <= SLICE_IDENTITY_TOLERANCE),
        );

        let bands = cx
            .exponents()
            .iter()
            .map(|e| Ok(caloric_norm(&system, e, &ladders)?.value / hardy_fofana_norm(u, e, &ladders)?.value))
            .collect::<Result<Vec<f64>, LabError>>()?;
        let mut drifts = vec![0.0f64; bands.len()];
        for rho in cx.dilations() {
            let g = dilate(u, alpha, rho)?;
            let sys = caloric_map(&g, &slab.rescaled(rho * rho)?)?;
            let defect = system_defect(&sys, &system.dilated(alpha, rho)?)?;
            w.covariance = w.covariance.max(defect);
            out.push(
                Record::new("dilation_covariance", &f.name)
                    .parameter(rho)
                    .defect(defect)
                    .reference(COVARIANCE_TOLERANCE)
                    .pass(defect <= COVARIANCE_TOLERANCE),
            );
            let l = reindexed(&ladders, rho)?;
            for ((e, c), drift) in cx.exponents().iter().zip(&bands).zip(&mut drifts) {
                let c_rho = caloric_norm(&sys, e, &l)?.value / hardy_fofana_norm(&g, e, &l)?.value;
                *drift = drift.max((c_rho / c - 1.0).abs());
            }
        }
        for ((e, c), drift) in cx.exponents().iter().zip(bands).zip(drifts) {
            out.band(format!("caloric/{}/{}", f.name, triple_key(e)), c);
            w.caloric_drift = w.caloric_drift.max(drift);
            out.push(
                Record::new("caloric_band", &f.name)
                    .exponents(e)
                    .value(c)
                    .defect(drift)
                    .reference(CALORIC_DRIFT_TOLERANCE)
                    .pass(drift <= CALORIC_DRIFT_TOLERANCE)
                    .note("value = caloric norm / Hardy-Fofana norm, defect = drift under dilation"),
            );
        }
    }
    if !require_smooth(&mut out, checked) {
        return Ok(out);
    }
    out.check(Check::at_most("temperature_cr_residual", w.cr, TEMPERATURE_TOLERANCE));
    out.check(Check::at_least("temperature_cr_order", w.cr_order, MIN_ORDER));
    out.check(Check::at_least("temperature_cr_negative_control", w.cr_negative, NEGATIVE_FACTOR));
    out.check(Check::at_most("heat_residual", w.heat, HEAT_TOLERANCE));
    out.check(Check::at_least("heat_order", w.heat_order, MIN_ORDER));
    out.check(Check::at_least("heat_negative_control", w.heat_negative, NEGATIVE_FACTOR));
    out.check(Check::at_most("slice_identity", w.slice, SLICE_IDENTITY_TOLERANCE));
    out.check(Check::at_most("dilation_covariance", w.covariance, COVARIANCE_TOLERANCE));
    out.check(Check::at_most("caloric_band_drift", w.caloric_drift, CALORIC_DRIFT_TOLERANCE));
    Ok(out)
}
