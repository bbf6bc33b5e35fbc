//! Acceptance criteria, one pass/fail line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fofana_core::cauchy_riemann::{
    caloric_map, half_time_derivative, harmonic_cr_residual, harmonic_symbol_defect, harmonic_system, heat_residual,
    laplacian_residual, temperature_cr_residual, temperature_symbol_defect,
};
use fofana_core::hardy_fofana::{
    characterize, dilation_characterization, hardy_fofana_norm, restricted_at_infinity_diag, Ladders,
};
use fofana_core::kernels::{closed_form, heat_kernel, poisson_kernel};
use fofana_core::maximal::{grand_maximal, hl_maximal, nontangential_maximal, vector_maximal_experiment};
use fofana_core::transforms::{convolve, heat_extend, poisson_extend, riesz_pv_oracle, riesz_transform};
use fofana_core::{
    amalgam_norm, dilate, fofana_norm, lp_norm, make_grid, sample, Exponents, GridFunction, GridSpec, Ladder,
    MollifierShape,
};
use fofana_lab::config::Resolved;
use fofana_lab::{run, ExperimentConfig, Suite};

type Outcome = Result<String, String>;
type Operator<'a> = Box<dyn Fn(&GridFunction<f64>, f64) -> GridFunction<f64> + 'a>;
type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn resolved() -> Resolved {
    ExperimentConfig::default().resolve().expect("default config resolves")
}

fn rel(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn ladders(cfg: &Resolved) -> Ladders {
    Ladders::new(cfg.ladders.t.clone(), cfg.ladders.r.clone())
}

fn reindexed(l: &Ladders, rho: f64) -> Ladders {
    Ladders { t: l.t.rescaled(rho).unwrap(), r: l.r.rescaled(1.0 / rho).unwrap(), shape: l.shape }
}

fn samples(cfg: &Resolved) -> Vec<(String, bool, GridFunction<f64>)> {
    cfg.catalog.functions().iter().map(|f| (f.name.clone(), f.smooth, f.sample(&cfg.spec))).collect()
}

fn gate(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

const RHOS: [f64; 4] = [0.25, 0.5, 2.0, 4.0];

fn exact_norm_values() -> Outcome {
    let mut worst = 0.0f64;
    for spec in [make_grid(1, 64, 64).unwrap(), make_grid(2, 16, 16).unwrap()] {
        let boxed = |hi: f64| {
            move |x: &[f64]| {
                let inside = x[0] >= 0.0 && x[0] < hi && x[1..].iter().all(|&v| (0.0..1.0).contains(&v));
                f64::from(u8::from(inside))
            }
        };
        let two = sample(boxed(2.0), &spec).unwrap();
        let cube = sample(boxed(1.0), &spec).unwrap();
        for p in [1.0, 2.0, 3.0] {
            worst = worst.max(rel(amalgam_norm(&two, p, 4.0).unwrap(), 2f64.powf(0.25)));
            for q in [1.0, 2.0, 5.0] {
                worst = worst.max(rel(amalgam_norm(&cube, p, q).unwrap(), 1.0));
            }
        }
        let bump = sample(|x| (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp(), &spec).unwrap();
        for a in [1.0, 2.0, 3.0] {
            let e = Exponents::new(a, a, a).unwrap();
            let f = fofana_norm(&bump, &e, &Ladder::dyadic(-6, 6).unwrap()).unwrap().value;
            worst = worst.max(rel(f, lp_norm(&bump, a).unwrap()));
        }
    }
    gate(worst <= 1e-12, format!("largest relative defect {worst:.2e} (gate 1e-12)"))
}

fn dilation_reindexing() -> Outcome {
    let cfg = resolved();
    let r = &cfg.ladders.r;
    let mut worst = 0.0f64;
    for (_, _, u) in samples(&cfg) {
        for e in &cfg.exponents {
            for rho in RHOS {
                let lhs = fofana_norm(&dilate(&u, e.alpha(), rho).unwrap(), e, r).unwrap();
                let rhs = fofana_norm(&u, e, &r.rescaled(rho).unwrap()).unwrap();
                for (a, b) in lhs.terms.iter().zip(&rhs.terms) {
                    worst = worst.max(rel(*a, *b));
                }
            }
        }
    }
    gate(worst <= 1e-12, format!("largest termwise defect {worst:.2e} (gate 1e-12)"))
}

fn interpolation_inequality() -> Outcome {
    let cfg = resolved();
    let l = ladders(&cfg);
    let mu = Ladder::new(1.0, 2.0, 4).unwrap();
    let (mut violations, mut rows) = (0usize, 0usize);
    for (_, _, u) in samples(&cfg) {
        for e in &cfg.exponents {
            for row in restricted_at_infinity_diag(&u, e, &mu, &l).unwrap() {
                rows += 1;
                violations += usize::from(row.norm > row.bound * (1.0 + 1e-12));
            }
        }
    }
    gate(violations == 0, format!("{violations} violations in {rows} rows"))
}

fn riesz_oracle() -> Outcome {
    let cfg = resolved();
    let eps = 4.0 * cfg.spec.spacing();
    let mut worst = 0.0f64;
    for name in &cfg.oracle_names {
        let u = cfg.catalog.get(name).unwrap().sample(&cfg.spec);
        let err = riesz_transform(&u, 0).unwrap().rel_l2_diff(&riesz_pv_oracle(&u, 0, eps).unwrap()).unwrap();
        worst = worst.max(err);
    }
    let spec = make_grid(1, 256, 16).unwrap();
    let p1 = sample(|x| 1.0 / (PI * (1.0 + x[0] * x[0])), &spec).unwrap();
    let h = riesz_transform(&p1, 0).unwrap();
    let pair = (0..spec.len())
        .filter(|&k| spec.coordinate(k).abs() <= 16.0)
        .map(|k| {
            let x = spec.coordinate(k);
            (h.values()[k] - x / (PI * (1.0 + x * x))).abs()
        })
        .fold(0.0, f64::max);
    gate(
        worst <= 5e-2 && pair <= 1e-3 && cfg.oracle_names.len() == 5,
        format!(
            "PV relative L2 {worst:.3e} on {} functions (gate 5e-2), Hilbert pair {pair:.3e} (gate 1e-3)",
            cfg.oracle_names.len()
        ),
    )
}

fn semigroups() -> Outcome {
    let spec = make_grid(1, 64, 64).unwrap();
    let h = spec.spacing();
    let pair = |k: &dyn Fn(&GridSpec, f64) -> GridFunction<f64>, t: f64, s: f64| {
        convolve(&k(&spec, t), &k(&spec, s)).unwrap().rel_l2_diff(&k(&spec, t + s)).unwrap()
    };
    let p = |g: &GridSpec, t: f64| poisson_kernel(g, t).unwrap().values;
    let w = |g: &GridSpec, t: f64| heat_kernel(g, t).unwrap().values;
    let ps = [0.25, 0.5, 1.0, 2.0];
    let mut poisson = 0.0f64;
    for t in ps {
        for s in ps {
            poisson = poisson.max(pair(&p, t, s));
        }
    }
    let mut heat = 0.0f64;
    let mut t = 4.0 * h * h;
    while t <= 64.0 {
        for s in [4.0 * h * h, t, 64.0] {
            heat = heat.max(pair(&w, t, s));
        }
        t *= 2.0;
    }
    gate(
        poisson <= 1e-6 && heat <= 1e-8,
        format!("Poisson {poisson:.2e} (gate 1e-6), heat {heat:.2e} (gate 1e-8)"),
    )
}

fn pde_residuals() -> Outcome {
    let cfg = resolved();
    let slab = &cfg.ladders.slab;
    let fine_spec = cfg.spec.refined();
    let fine_slab = slab.refined();
    let (mut lap, mut heat, mut order) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut count = 0;
    for f in cfg.catalog.functions().iter().filter(|f| f.smooth) {
        count += 1;
        let (u, v) = (f.sample(&cfg.spec), f.sample(&fine_spec));
        let l0 = laplacian_residual(&poisson_extend(&u, slab).unwrap()).unwrap().max();
        let l1 = laplacian_residual(&poisson_extend(&v, &fine_slab).unwrap()).unwrap().max();
        let h0 = heat_residual(&heat_extend(&u, slab).unwrap()).unwrap().max();
        let h1 = heat_residual(&heat_extend(&v, &fine_slab).unwrap()).unwrap().max();
        lap = lap.max(l0);
        heat = heat.max(h0);
        order = order.min((l0 / l1).log2()).min((h0 / h1).log2());
    }
    gate(
        lap <= 1e-2 && heat <= 1e-2 && order >= 1.8,
        format!("{count} functions: Laplacian {lap:.2e}, heat {heat:.2e} (gate 1e-2), smallest order {order:.3} (gate 1.8)"),
    )
}

fn harmonic_cr() -> Outcome {
    let cfg = resolved();
    let (mut worst, mut control) = (0.0f64, f64::INFINITY);
    for f in cfg.catalog.functions().iter().filter(|f| f.smooth) {
        let system = harmonic_system(&f.sample(&cfg.spec), &cfg.ladders.slab).unwrap();
        let base = harmonic_cr_residual(&system).unwrap().max();
        let broken = harmonic_cr_residual(&system.with_component_negated(0)).unwrap().max();
        worst = worst.max(base);
        control = control.min(broken / base);
    }
    let symbol = harmonic_symbol_defect(&cfg.spec);
    gate(
        worst <= 1e-2 && control > 10.0 && symbol <= 1e-10,
        format!("residual {worst:.2e} (gate 1e-2), negative control {control:.1}x (gate 10x), symbol {symbol:.1e}"),
    )
}

fn half_derivative() -> Outcome {
    let mut worst = 0.0f64;
    for lambda in [1.0f64, 4.0, 9.0] {
        for t in [0.1, 0.5, 1.0, 2.0] {
            let z = half_time_derivative(|s| -lambda * (-lambda * s).exp(), t).unwrap();
            let exact = -lambda.sqrt() * (-lambda * t).exp();
            worst = worst.max(((z.im - exact).powi(2) + z.re.powi(2)).sqrt() / exact.abs());
        }
    }
    gate(worst <= 1e-6, format!("largest relative error {worst:.2e} (gate 1e-6)"))
}

fn temperature_cr() -> Outcome {
    let cfg = resolved();
    let (mut worst, mut control) = (0.0f64, f64::INFINITY);
    for f in cfg.catalog.functions().iter().filter(|f| f.smooth) {
        let system = caloric_map(&f.sample(&cfg.spec), &cfg.ladders.slab).unwrap();
        let base = temperature_cr_residual(&system).unwrap().max();
        let broken = temperature_cr_residual(&system.with_component_negated(0)).unwrap().max();
        worst = worst.max(base);
        control = control.min(broken / base);
    }
    let symbol = temperature_symbol_defect(&cfg.spec);
    gate(
        worst <= 3e-2 && control > 10.0 && symbol <= 1e-10,
        format!("residual {worst:.2e} (gate 3e-2), negative control {control:.1}x (gate 10x), symbol {symbol:.1e} (gate 1e-10)"),
    )
}

fn max_excess(a: &GridFunction<f64>, b: &GridFunction<f64>) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| x - y).fold(f64::NEG_INFINITY, f64::max)
}

fn maximal_laws() -> Outcome {
    let cfg = resolved();
    let t = &cfg.ladders.t;
    let radii = &cfg.ladders.radii;
    let all = samples(&cfg);
    let ops: [Operator; 3] = [
        Box::new(|f, rho| grand_maximal(f, &t.rescaled(rho).unwrap(), MollifierShape::Gaussian).unwrap()),
        Box::new(|f, rho| hl_maximal(f, &radii.rescaled(rho).unwrap()).unwrap()),
        Box::new(|f, rho| nontangential_maximal(&poisson_extend(f, &t.rescaled(rho).unwrap()).unwrap()).unwrap()),
    ];
    let (mut homogeneous, mut sub, mut commute, mut monotone) = (true, 0.0f64, 0.0f64, true);
    for (i, (_, _, u)) in all.iter().enumerate() {
        let v = &all[(i + 1) % all.len()].2;
        for op in &ops {
            let m = op(u, 1.0);
            for c in [2.0, -4.0] {
                homogeneous &= op(&u.scale(c), 1.0) == m.scale(c.abs());
            }
            let rhs = m.add(&op(v, 1.0)).unwrap();
            sub = sub.max(max_excess(&op(&u.add(v).unwrap(), 1.0), &rhs) / rhs.max_abs());
            for rho in RHOS {
                let lhs = op(&dilate(u, 1.5, rho).unwrap(), rho);
                let d = dilate(&m, 1.5, rho).unwrap();
                commute = commute.max(lhs.max_diff(&d).unwrap() / d.max_abs());
            }
        }
        let w = sample(|x| 0.5 + 0.5 * (0.7 * x[0]).sin(), &cfg.spec).unwrap();
        let smaller = u.zip_with(&w, |a, b| a * b).unwrap();
        monotone &= max_excess(&hl_maximal(&smaller, radii).unwrap(), &hl_maximal(u, radii).unwrap()) <= 0.0;
    }
    let e = Exponents::new(2.0, 4.0, 3.0).unwrap();
    let family = |rho: f64| -> Vec<GridFunction<f64>> {
        (0..8)
            .map(|k| {
                let c = (k as f64 - 3.5) * 4.0;
                let g = sample(|x| closed_form::heat(&[x[0] - c], 0.25), &cfg.spec).unwrap();
                dilate(&g, 3.0, rho).unwrap()
            })
            .collect()
    };
    let ratio = |rho: f64| {
        vector_maximal_experiment(&family(rho), 2.0, &e, &radii.rescaled(rho).unwrap(), &cfg.ladders.r.rescaled(1.0 / rho).unwrap())
            .unwrap()
            .ratio
    };
    let base = ratio(1.0);
    let drift = RHOS.iter().map(|&rho| (ratio(rho) / base - 1.0).abs()).fold(0.0, f64::max);
    gate(
        homogeneous && monotone && sub <= 1e-12 && commute <= 1e-10 && base >= 0.99 && drift <= 0.1,
        format!(
            "homogeneity exact {homogeneous}, sublinearity excess {sub:.1e}, monotone {monotone}, commutation {commute:.1e} (gate 1e-10), vector ratio {base:.4} drift {drift:.1e} (gate 10%)"
        ),
    )
}

fn characterization_bands() -> Outcome {
    let cfg = resolved();
    let l = ladders(&cfg);
    let mut all = samples(&cfg);
    all.push(("zero".into(), true, GridFunction::zeros(cfg.spec)));
    let (mut mixed, mut drift, mut dilation) = (0usize, 0.0f64, 0.0f64);
    for (_, _, u) in &all {
        for e in &cfg.exponents {
            let base = characterize(u, e, &l).unwrap();
            let zeros = base.values().iter().filter(|&&v| v == 0.0).count();
            mixed += usize::from(zeros != 0 && zeros != 4);
            let direct = dilation_characterization(u, e, &l.r, &l).unwrap().value;
            dilation = dilation.max(rel(direct, hardy_fofana_norm(u, e, &l).unwrap().value));
            for rho in RHOS {
                let moved = characterize(&dilate(u, e.alpha(), rho).unwrap(), e, &reindexed(&l, rho)).unwrap();
                for (a, b) in base.ratios.iter().zip(&moved.ratios) {
                    drift = drift.max(match (a.value, b.value) {
                        (Some(x), Some(y)) => (y / x - 1.0).abs(),
                        (None, None) => 0.0,
                        _ => 1.0,
                    });
                }
            }
        }
    }
    gate(
        mixed == 0 && drift <= 1e-2 && dilation <= 1e-10,
        format!("{mixed} mixed zero patterns, ratio drift {drift:.1e} (gate 1e-2), dilation vs maximal {dilation:.1e} (gate 1e-10)"),
    )
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig::default();
    let first = run(&cfg, &Suite::ALL, Some(7)).map_err(|e| e.to_string())?;
    let second = run(&cfg, &Suite::ALL, Some(7)).map_err(|e| e.to_string())?;
    let mut differing = Vec::new();
    for (a, b) in first.results.iter().zip(&second.results) {
        if a.to_csv().unwrap() != b.to_csv().unwrap() {
            differing.push(a.name);
        }
    }
    let rows: usize = first.results.iter().map(|r| r.records.len()).sum();
    gate(
        differing.is_empty() && first.summary.to_json().unwrap() == second.summary.to_json().unwrap(),
        format!("{} suites, {rows} rows, differing tables {differing:?}, all checks passed {}", first.results.len(), first.passed()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "exact norm values", Duration::from_secs(1), exact_norm_values),
        (2, "dilation reindexing identity", Duration::from_secs(10), dilation_reindexing),
        (3, "interpolation inequality", Duration::from_secs(30), interpolation_inequality),
        (4, "Riesz oracle gate", Duration::from_secs(120), riesz_oracle),
        (5, "semigroup identities", Duration::from_secs(30), semigroups),
        (6, "PDE residuals", Duration::from_secs(180), pde_residuals),
        (7, "harmonic Cauchy-Riemann residuals", Duration::from_secs(120), harmonic_cr),
        (8, "half-derivative oracle", Duration::from_secs(5), half_derivative),
        (9, "temperature Cauchy-Riemann residuals", Duration::from_secs(180), temperature_cr),
        (10, "maximal-operator laws", Duration::from_secs(120), maximal_laws),
        (11, "characterization bands", Duration::from_secs(300), characterization_bands),
        (12, "determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = Vec::new();
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= limit, d),
            Err(d) => (false, d),
        };
        let status = if ok { "PASS" } else { "FAIL" };
        println!("criterion {n}: {status} {name}: {detail}; {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs());
        if !ok {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
