//! The four characterizing functionals, their dilation behaviour, and the
//! laws of the maximal operators.

use fofana_core::hardy_fofana::{characterize, hardy_fofana_norm, CharacterizationReport};
use fofana_core::kernels::closed_form;
use fofana_core::maximal::{grand_maximal, hl_maximal, nontangential_maximal, vector_maximal_experiment};
use fofana_core::transforms::poisson_extend;
use fofana_core::{dilate, sample, Exponents, GridFunction, Ladder, MollifierShape};

use super::{reindexed, rel_diff, rel_max_diff, triple_key, Context};
use crate::error::LabError;
use crate::report::{Check, Record, SuiteResult};

pub const RATIO_DRIFT_TOLERANCE: f64 = 1e-2;
pub const DILATION_EQUALS_MAXIMAL: f64 = 1e-10;
pub const NON_DYADIC_HOMOGENEITY: f64 = 1e-13;
pub const SUBLINEARITY_TOLERANCE: f64 = 1e-12;
pub const COMMUTATION_TOLERANCE: f64 = 1e-10;
pub const VECTOR_BAND: (f64, f64) = (1.0, 20.0);
pub const VECTOR_DRIFT_TOLERANCE: f64 = 0.1;
pub const MOLLIFIER_SPREAD_TOLERANCE: f64 = 0.05;

const PAIRS: [(&str, &str); 3] = [("poisson", "maximal"), ("riesz", "maximal"), ("dilation", "maximal")];

pub fn run(cx: &Context) -> Result<SuiteResult, LabError> {
    let mut out = SuiteResult::new("characterization");
    functionals(cx, &mut out)?;
    mollifier_shape(cx, &mut out)?;
    maximal_laws(cx, &mut out)?;
    vector_maximal(cx, &mut out)?;
    Ok(out)
}

fn functionals(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let ladders = cx.ladders();
    let rhos = cx.dilations();
    let (mut mixed, mut worst_drift, mut worst_dilation) = (0usize, 0.0f64, 0.0f64);
    for (f, u) in cx.functions() {
        for e in cx.exponents() {
            let base = characterize(u, e, &ladders)?;
            let values = base.values();
            for (name, v) in CharacterizationReport::NAMES.iter().zip(values) {
                out.push(Record::new("functional", &f.name).exponents(e).value(v).note(*name));
            }
            let zeros = values.iter().filter(|&&v| v == 0.0).count();
            let together = zeros == 0 || zeros == values.len();
            mixed += usize::from(!together);
            out.push(
                Record::new("zero_together", &f.name)
                    .exponents(e)
                    .value(zeros as f64)
                    .pass(together)
                    .note("value = number of vanishing functionals"),
            );

            let dm = rel_diff(base.dilation_norm.value, base.maximal_norm.value);
            worst_dilation = worst_dilation.max(dm);
            out.push(
                Record::new("dilation_vs_maximal", &f.name)
                    .exponents(e)
                    .value(base.dilation_norm.value)
                    .reference(base.maximal_norm.value)
                    .defect(dm)
                    .pass(dm <= DILATION_EQUALS_MAXIMAL),
            );

            for (a, b) in PAIRS {
                if let Some(r) = base.ratio(a, b) {
                    out.band(format!("characterization/{}/{}/{a}:{b}", f.name, triple_key(e)), r);
                }
            }
            for &rho in &rhos {
                let g = dilate(u, e.alpha(), rho)?;
                let moved = characterize(&g, e, &reindexed(&ladders, rho)?)?;
                let drift = ratio_drift(&base, &moved);
                worst_drift = worst_drift.max(drift);
                out.push(
                    Record::new("ratio_drift", &f.name)
                        .exponents(e)
                        .parameter(rho)
                        .value(drift)
                        .reference(RATIO_DRIFT_TOLERANCE)
                        .pass(drift <= RATIO_DRIFT_TOLERANCE)
                        .note("largest relative change of a pairwise ratio"),
                );
            }
        }
    }
    out.check(Check::at_most("zero_together_violations", mixed as f64, 0.0));
    out.check(Check::at_most("dilation_equals_maximal", worst_dilation, DILATION_EQUALS_MAXIMAL));
    out.check(Check::at_most("ratio_dilation_drift", worst_drift, RATIO_DRIFT_TOLERANCE));
    Ok(())
}

/// Largest relative change of any pairwise ratio; a ratio defined on one side only counts as 1.
fn ratio_drift(a: &CharacterizationReport, b: &CharacterizationReport) -> f64 {
    a.ratios
        .iter()
        .zip(&b.ratios)
        .map(|(x, y)| match (x.value, y.value) {
            (Some(p), Some(q)) => (q / p - 1.0).abs(),
            (None, None) => 0.0,
            _ => 1.0,
        })
        .fold(0.0, f64::max)
}

fn mollifier_shape(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let gaussian = cx.ladders();
    let bump = gaussian.clone().with_shape(MollifierShape::CosineBump);
    let mut mixed = 0usize;
    let mut ratios = vec![Vec::new(); cx.exponents().len()];
    for (f, u) in cx.functions() {
        for (e, per_triple) in cx.exponents().iter().zip(&mut ratios) {
            let g = hardy_fofana_norm(u, e, &gaussian)?.value;
            let c = hardy_fofana_norm(u, e, &bump)?.value;
            let together = (g == 0.0) == (c == 0.0);
            mixed += usize::from(!together);
            let mut rec = Record::new("mollifier_shape", &f.name).exponents(e).value(c).reference(g).pass(together);
            if g > 0.0 {
                rec = rec.defect(c / g).note("defect = cosine bump / gaussian");
                out.band(format!("mollifier/{}/{}", f.name, triple_key(e)), c / g);
                per_triple.push(c / g);
            }
            out.push(rec);
        }
    }
    out.check(Check::at_most("mollifier_shape_zero_together", mixed as f64, 0.0));
    let mut spread = 0.0f64;
    for (e, r) in cx.exponents().iter().zip(&ratios) {
        let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let s = if r.is_empty() { 0.0 } else { hi / lo - 1.0 };
        spread = spread.max(s);
        out.push(
            Record::new("mollifier_spread", "catalog")
                .exponents(e)
                .value(s)
                .reference(MOLLIFIER_SPREAD_TOLERANCE)
                .pass(s <= MOLLIFIER_SPREAD_TOLERANCE)
                .note("largest / smallest cosine-bump to gaussian ratio, minus one"),
        );
    }
    out.check(Check::at_most("mollifier_ratio_spread", spread, MOLLIFIER_SPREAD_TOLERANCE));
    Ok(())
}

#[derive(Clone, Copy)]
enum Operator {
    Grand,
    HardyLittlewood,
    Nontangential,
}

impl Operator {
    const ALL: [Operator; 3] = [Operator::Grand, Operator::HardyLittlewood, Operator::Nontangential];

    fn name(self) -> &'static str {
        match self {
            Operator::Grand => "grand",
            Operator::HardyLittlewood => "hardy_littlewood",
            Operator::Nontangential => "nontangential",
        }
    }

    /// Applies the operator with scales `t` (mollifier and Poisson) and `radii` (balls).
    fn apply(self, f: &GridFunction<f64>, t: &Ladder, radii: &Ladder) -> Result<GridFunction<f64>, LabError> {
        Ok(match self {
            Operator::Grand => grand_maximal(f, t, MollifierShape::Gaussian)?,
            Operator::HardyLittlewood => hl_maximal(f, radii)?,
            Operator::Nontangential => nontangential_maximal(&poisson_extend(f, t)?)?,
        })
    }
}

/// `max (lhs - rhs)_+ / max rhs`.
fn excess(lhs: &GridFunction<f64>, rhs: &GridFunction<f64>) -> Result<f64, LabError> {
    let scale = rhs.max_abs();
    let over = lhs.zip_with(rhs, |a, b| (a - b).max(0.0))?.max_abs();
    Ok(if scale == 0.0 { over } else { over / scale })
}

fn maximal_laws(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let t = &cx.resolved.ladders.t;
    let radii = &cx.resolved.ladders.radii;
    let alpha = cx.alpha();
    let rhos = cx.dilations();
    let functions: Vec<_> = cx.functions().collect();
    let n = functions.len();
    let (mut homogeneity_ok, mut monotone_ok) = (true, true);
    let (mut worst_sub, mut worst_comm) = (0.0f64, 0.0f64);
    for (i, (f, u)) in functions.iter().enumerate() {
        let (_, v) = functions[(i + 1) % n];
        let sum = u.add(v)?;
        for op in Operator::ALL {
            let mu = op.apply(u, t, radii)?;
            let section = format!("{}_homogeneity", op.name());
            for c in [2.0, -4.0, 8.0, 3.0, -0.7] {
                let lhs = op.apply(&u.scale(c), t, radii)?;
                let defect = rel_max_diff(&lhs, &mu.scale(c.abs()))?;
                let exact = c.abs().log2().fract() == 0.0;
                let tol = if exact { 0.0 } else { NON_DYADIC_HOMOGENEITY };
                homogeneity_ok &= defect <= tol;
                out.push(
                    Record::new(&section, &f.name)
                        .parameter(c)
                        .defect(defect)
                        .reference(tol)
                        .pass(defect <= tol),
                );
            }

            let rhs = mu.add(&op.apply(v, t, radii)?)?;
            let over = excess(&op.apply(&sum, t, radii)?, &rhs)?;
            worst_sub = worst_sub.max(over);
            out.push(
                Record::new(&format!("{}_sublinearity", op.name()), &f.name)
                    .defect(over)
                    .reference(SUBLINEARITY_TOLERANCE)
                    .pass(over <= SUBLINEARITY_TOLERANCE),
            );

            for &rho in &rhos {
                let dilated = dilate(u, alpha, rho)?;
                let lhs = op.apply(&dilated, &t.rescaled(rho)?, &radii.rescaled(rho)?)?;
                let defect = rel_max_diff(&lhs, &dilate(&mu, alpha, rho)?)?;
                worst_comm = worst_comm.max(defect);
                out.push(
                    Record::new(&format!("{}_commutation", op.name()), &f.name)
                        .parameter(rho)
                        .defect(defect)
                        .reference(COMMUTATION_TOLERANCE)
                        .pass(defect <= COMMUTATION_TOLERANCE),
                );
            }
        }

        let weight = sample(|x| 0.5 + 0.5 * x[0].cos(), u.spec())?;
        let smaller = u.zip_with(&weight, |a, w| a * w)?;
        let over = hl_maximal(&smaller, radii)?.zip_with(&hl_maximal(u, radii)?, |a, b| (a - b).max(0.0))?.max_abs();
        monotone_ok &= over == 0.0;
        out.push(Record::new("hardy_littlewood_monotonicity", &f.name).defect(over).reference(0.0).pass(over == 0.0));
    }
    out.check(Check::holds("maximal_homogeneity", homogeneity_ok));
    out.check(Check::at_most("maximal_sublinearity", worst_sub, SUBLINEARITY_TOLERANCE));
    out.check(Check::holds("hardy_littlewood_monotonicity", monotone_ok));
    out.check(Check::at_most("maximal_dilation_commutation", worst_comm, COMMUTATION_TOLERANCE));
    Ok(())
}

/// Eight unit-spaced heat bumps along the first axis, spread over the middle half of the box.
fn bump_family(cx: &Context) -> Result<Vec<GridFunction<f64>>, LabError> {
    let spec = cx.spec();
    let step = spec.side() / 16.0;
    (0..8)
        .map(|k| {
            let c = (k as f64 - 3.5) * step;
            let g = sample(
                |x| {
                    let mut y = x.to_vec();
                    y[0] -= c;
                    closed_form::heat(&y, 0.25)
                },
                spec,
            )?;
            Ok(g)
        })
        .collect()
}

fn vector_maximal(cx: &Context, out: &mut SuiteResult) -> Result<(), LabError> {
    let e = Exponents::new(2.0, 4.0, 3.0)?;
    let radii = &cx.resolved.ladders.radii;
    let r = &cx.resolved.ladders.r;
    let fs = bump_family(cx)?;
    let base = vector_maximal_experiment(&fs, 2.0, &e, radii, r)?;
    let in_band = base.ratio >= VECTOR_BAND.0 && base.ratio <= VECTOR_BAND.1;
    out.push(
        Record::new("vector_maximal", "bumps(8)")
            .exponents(&e)
            .parameter(1.0)
            .value(base.maximal_side)
            .reference(base.plain_side)
            .defect(base.ratio)
            .pass(base.lower_bound_holds() && in_band)
            .note("defect = ratio"),
    );
    out.band("vector_maximal/ratio", base.ratio);
    out.check(Check::at_least("vector_maximal_lower", base.ratio, 1.0 - 1e-2));
    out.check(Check::holds("vector_maximal_band", in_band));
    let mut worst = 0.0f64;
    for rho in cx.dilations() {
        let gs = fs.iter().map(|g| dilate(g, e.alpha(), rho)).collect::<Result<Vec<_>, _>>()?;
        let rep = vector_maximal_experiment(&gs, 2.0, &e, &radii.rescaled(rho)?, &r.rescaled(1.0 / rho)?)?;
        let drift = (rep.ratio / base.ratio - 1.0).abs();
        worst = worst.max(drift);
        out.push(
            Record::new("vector_maximal", "bumps(8)")
                .exponents(&e)
                .parameter(rho)
                .value(rep.maximal_side)
                .reference(rep.plain_side)
                .defect(rep.ratio)
                .pass(drift <= VECTOR_DRIFT_TOLERANCE)
                .note("defect = ratio"),
        );
    }
    out.check(Check::at_most("vector_maximal_dilation_drift", worst, VECTOR_DRIFT_TOLERANCE));
    Ok(())
}
