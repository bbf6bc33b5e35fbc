use fofana_core::maximal::{grand_maximal, hl_maximal};
use fofana_core::transforms::riesz_transform;
use fofana_core::{amalgam_norm, dilate, fofana_norm, lp_norm, make_grid, Exponents, GridFunction, GridSpec, Ladder, MollifierShape};
use proptest::prelude::*;

fn line() -> GridSpec {
    make_grid(1, 16, 4).unwrap()
}

fn plane() -> GridSpec {
    make_grid(2, 4, 4).unwrap()
}

fn field(spec: GridSpec) -> impl Strategy<Value = GridFunction<f64>> {
    prop::collection::vec(-1.0f64..1.0, spec.len()).prop_map(move |v| GridFunction::new(spec, v).unwrap())
}

fn triple() -> impl Strategy<Value = Exponents> {
    (1.0f64..3.0, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(p, a, b)| Exponents::new(p, p + a + b, p + a).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `||x - y||` on the torus of the spec.
fn torus_distance(spec: &GridSpec, a: usize, b: usize) -> f64 {
    let (x, y) = (spec.point(a), spec.point(b));
    let s = spec.side();
    (0..spec.dim())
        .map(|k| {
            let t = (x[k] - y[k]).rem_euclid(s);
            t.min(s - t).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn amalgam_of_cube_steps_is_sequence_norm(
        cubes in prop::collection::vec(-2.0f64..2.0, 16),
        p in 1.0f64..4.0,
        q in 1.0f64..4.0,
    ) {
        let spec = line();
        let values: Vec<f64> = (0..spec.len()).map(|i| cubes[(spec.coordinate(i) + 8.0).floor() as usize]).collect();
        let u = GridFunction::new(spec, values).unwrap();
        let exact = cubes.iter().map(|a| a.abs().powf(q)).sum::<f64>().powf(1.0 / q);
        prop_assert!(rel(amalgam_norm(&u, p, q).unwrap(), exact) <= 1e-12);
    }

    #[test]
    fn amalgam_on_the_plane_with_p_equal_q_is_lp(u in field(plane()), p in 1.0f64..4.0) {
        prop_assert!(rel(amalgam_norm(&u, p, p).unwrap(), lp_norm(&u, p).unwrap()) <= 1e-12);
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(u in field(line()), v in field(line()), e in triple(), c in -3.0f64..3.0) {
        let r = Ladder::dyadic(-3, 3).unwrap();
        let n = |w: &GridFunction<f64>| fofana_norm(w, &e, &r).unwrap().value;
        prop_assert!(rel(n(&u.scale(c)), c.abs() * n(&u)) <= 1e-12);
        prop_assert!(n(&u.add(&v).unwrap()) <= (n(&u) + n(&v)) * (1.0 + 1e-12));
        let a = |w: &GridFunction<f64>| amalgam_norm(w, e.p(), e.q()).unwrap();
        prop_assert!(a(&u.add(&v).unwrap()) <= (a(&u) + a(&v)) * (1.0 + 1e-12));
    }

    #[test]
    fn dilation_moves_the_radius_ladder(u in field(line()), e in triple(), k in -2i32..=2) {
        let rho = 2f64.powi(k);
        let r = Ladder::dyadic(-3, 3).unwrap();
        let moved = fofana_norm(&dilate(&u, e.alpha(), rho).unwrap(), &e, &r).unwrap();
        let direct = fofana_norm(&u, &e, &r.rescaled(rho).unwrap()).unwrap();
        for (a, b) in moved.terms.iter().zip(&direct.terms) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
    }

    #[test]
    fn dilation_inverts_at_reciprocal_factor(u in field(plane()), alpha in 1.0f64..4.0, k in -2i32..=2) {
        let rho = 2f64.powi(k);
        let back = dilate(&dilate(&u, alpha, rho).unwrap(), alpha, 1.0 / rho).unwrap();
        prop_assert_eq!(back.spec(), u.spec());
        for (a, b) in back.values().iter().zip(u.values()) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn hl_maximal_matches_brute_force(u in field(plane())) {
        let spec = *u.spec();
        let radii = Ladder::new(spec.spacing(), 2.0, 4).unwrap();
        let fast = hl_maximal(&u, &radii).unwrap();
        for x in 0..spec.len() {
            let brute = radii
                .members()
                .into_iter()
                .map(|r| {
                    let ball: Vec<f64> =
                        (0..spec.len()).filter(|&y| torus_distance(&spec, x, y) < r).map(|y| u.values()[y].abs()).collect();
                    ball.iter().sum::<f64>() / ball.len() as f64
                })
                .fold(0.0, f64::max);
            prop_assert!((fast.values()[x] - brute).abs() <= 1e-12);
        }
    }

    #[test]
    fn hl_maximal_is_monotone_and_sublinear(u in field(line()), v in field(line()), w in prop::collection::vec(0.0f64..1.0, 64)) {
        let radii = Ladder::new(0.25, 2.0, 5).unwrap();
        let m = |f: &GridFunction<f64>| hl_maximal(f, &radii).unwrap();
        let weight = GridFunction::new(*u.spec(), w).unwrap();
        let smaller = u.zip_with(&weight, |a, b| a * b).unwrap();
        let (mu, ms, mv, msum) = (m(&u), m(&smaller), m(&v), m(&u.add(&v).unwrap()));
        for i in 0..mu.values().len() {
            prop_assert!(ms.values()[i] <= mu.values()[i]);
            prop_assert!(msum.values()[i] <= (mu.values()[i] + mv.values()[i]) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn grand_maximal_is_homogeneous_and_sublinear(u in field(plane()), v in field(plane())) {
        let t = Ladder::new(0.5, 2.0, 3).unwrap();
        let m = |f: &GridFunction<f64>| grand_maximal(f, &t, MollifierShape::Gaussian).unwrap();
        let (mu, mv) = (m(&u), m(&v));
        prop_assert_eq!(m(&u.scale(-2.0)), mu.scale(2.0));
        let msum = m(&u.add(&v).unwrap());
        let scale = mu.max_abs() + mv.max_abs();
        for i in 0..mu.values().len() {
            prop_assert!(msum.values()[i] <= mu.values()[i] + mv.values()[i] + 1e-12 * scale);
        }
    }

    #[test]
    fn riesz_transforms_are_antisymmetric(u in field(plane()), v in field(plane()), j in 0usize..2) {
        let dot = |a: &GridFunction<f64>, b: &GridFunction<f64>| a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum::<f64>();
        let lhs = dot(&riesz_transform(&u, j).unwrap(), &v);
        let rhs = -dot(&u, &riesz_transform(&v, j).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}
