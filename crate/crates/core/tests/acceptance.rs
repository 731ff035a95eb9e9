//! Acceptance suite: one test per exit criterion, each printing a PASS line
//! with its headline numbers. Oracle-equality criteria run on the exact
//! rational backend, inequality and localization criteria on the float
//! backend at the stated tolerances.

mod common;

use common::*;
use ghp_metrics::cghp::{cghp_distance, project_subspace, Mode};
use ghp_metrics::flat::{
    hall_transport, prokhorov_distance, relation_image, strassen_coupling, HallOutcome,
};
use ghp_metrics::ghp::{
    check_convergence, empirical_prokhorov_with, empirical_weak_distance, ghp_distance,
    localized_a, ConvergenceCriteria, ConvergenceOptions, Direction, LocalizationQuery,
};
use ghp_metrics::graphs::{bs_distance, graph_to_space, GraphMeasure, RootedGraph};
use ghp_metrics::oracles::{cghp_bruteforce, ghp_grid, prokhorov_bruteforce};
use ghp_metrics::scalar::{Rational, Scalar};
use ghp_metrics::spaces::{is_pmm_subspace, validate_space, FiniteSpace, SubspaceSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

/// Criterion 1: the approximate-coupling characterization agrees exactly
/// with the direct subset definition of the Prokhorov distance, on 1000
/// random rational instances with at most 5 ground points and entries in
/// [0, 4]. Runtime budget 60 seconds.
#[test]
fn c01_strassen_equivalence_holds_exactly_on_1000_instances() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(101);
    for case in 0..1000 {
        let n = rng.gen_range(1..=5);
        let scale = rng.gen_range(1..=2);
        let g = random_ground_scaled(&mut rng, n, scale);
        let mu = random_measure(&mut rng, &g, 4);
        let nu = random_measure(&mut rng, &g, 4);
        let fast = prokhorov_distance(&mu, &nu).unwrap().p;
        let slow = prokhorov_bruteforce(&mu, &nu).unwrap();
        assert_eq!(fast, slow, "disagreement on case {case}");
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "runtime budget exceeded: {elapsed:?}"
    );
    println!("criterion 01 strassen equivalence (1000 exact agreements, {elapsed:?}): PASS");
}

/// Criterion 2: on 500 random equal-mass instances the coupling has exact
/// marginals and carries mass at most p on pairs farther than p apart.
#[test]
fn c02_coupling_certificates_are_rational_exact() {
    let mut rng = StdRng::seed_from_u64(102);
    for case in 0..500 {
        let n = rng.gen_range(1..=4);
        let g = random_ground(&mut rng, n);
        let mu = random_measure(&mut rng, &g, 3);
        let nu_raw = random_measure(&mut rng, &g, 3);
        // Rescale the second measure to the exact same total mass.
        let nu = if nu_raw.total() == rat(0, 1) {
            ghp_metrics::flat::FiniteMeasure::new(g.clone(), mu.mass().to_vec()).unwrap()
        } else {
            let factor = mu.total() / nu_raw.total();
            let mass = nu_raw
                .mass()
                .iter()
                .map(|m| m.clone() * factor.clone())
                .collect();
            ghp_metrics::flat::FiniteMeasure::new(g.clone(), mass).unwrap()
        };
        assert_eq!(mu.total(), nu.total());
        let p = prokhorov_distance(&mu, &nu).unwrap().p;
        let plan = strassen_coupling(&mu, &nu).unwrap();
        assert_eq!(plan.row_marginal(), mu.mass().to_vec(), "case {case}");
        assert_eq!(plan.col_marginal(), nu.mass().to_vec(), "case {case}");
        let far_mass = plan.mass_where(|i, j| *g.dist(i, j) > p);
        assert!(far_mass <= p, "far mass {far_mass} > {p} on case {case}");
    }
    println!("criterion 02 coupling certificates (500 rational-exact instances): PASS");
}

/// Criterion 3: marriage-type feasibility is decided with a certificate
/// either way, and the outcomes are mutually exclusive and exhaustive.
#[test]
fn c03_hall_feasibility_with_certificates() {
    let mut rng = StdRng::seed_from_u64(103);
    let mut feasible = 0;
    let mut violating = 0;
    for case in 0..500 {
        let nx = rng.gen_range(1..=4);
        let ny = rng.gen_range(1..=4);
        let mut k = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                if rng.gen_bool(0.4) {
                    k.push((i, j));
                }
            }
        }
        let mu: Vec<Rational> = (0..nx).map(|_| random_mass(&mut rng, 2)).collect();
        let nu: Vec<Rational> = (0..ny).map(|_| random_mass(&mut rng, 2)).collect();
        // Independent exhaustive check of the marriage condition.
        let condition_holds = (0..(1usize << nx)).all(|mask| {
            let a: Vec<usize> = (0..nx).filter(|i| mask >> i & 1 == 1).collect();
            let mu_a: Rational = a.iter().map(|&i| mu[i].clone()).sum();
            let nu_img: Rational = relation_image(&k, &a).iter().map(|&j| nu[j].clone()).sum();
            mu_a <= nu_img
        });
        match hall_transport(nx, ny, &k, &mu, &nu).unwrap() {
            HallOutcome::Feasible(plan) => {
                assert!(
                    condition_holds,
                    "feasible despite a violating set, case {case}"
                );
                assert_eq!(plan.row_marginal(), mu);
                for (got, cap) in plan.col_marginal().iter().zip(&nu) {
                    assert!(got <= cap);
                }
                for i in 0..nx {
                    for j in 0..ny {
                        if !k.contains(&(i, j)) {
                            assert_eq!(plan.get(i, j), &rat(0, 1));
                        }
                    }
                }
                feasible += 1;
            }
            HallOutcome::Violating(a) => {
                assert!(
                    !condition_holds,
                    "violation reported on a feasible case {case}"
                );
                let mu_a: Rational = a.iter().map(|&i| mu[i].clone()).sum();
                let nu_img: Rational = relation_image(&k, &a).iter().map(|&j| nu[j].clone()).sum();
                assert!(mu_a > nu_img);
                violating += 1;
            }
        }
    }
    println!(
        "criterion 03 hall transport (500 instances: {feasible} feasible, {violating} violating): PASS"
    );
}

fn criterion4_corpus(count: usize) -> Vec<(FiniteSpace<Rational>, FiniteSpace<Rational>)> {
    let mut rng = StdRng::seed_from_u64(104);
    (0..count)
        .map(|_| (random_space(&mut rng, 4, 2), random_space(&mut rng, 4, 2)))
        .collect()
}

/// Criterion 4: the branch-and-bound distance equals the unpruned
/// enumeration oracle exactly on 300 random pairs, and the metric axioms
/// hold on 200 random triples. Runtime budget 5 minutes.
#[test]
fn c04_compact_distance_matches_oracle_and_is_a_metric() {
    let start = Instant::now();
    for (case, (x, y)) in criterion4_corpus(300).iter().enumerate() {
        let fast = cghp_distance(x, y, Mode::Exact).unwrap().value;
        let slow = cghp_bruteforce(x, y).unwrap();
        assert_eq!(fast, slow, "disagreement on case {case}");
    }
    let mut rng = StdRng::seed_from_u64(1040);
    for _ in 0..200 {
        let x = random_space(&mut rng, 4, 2);
        let y = random_space(&mut rng, 4, 2);
        let z = random_space(&mut rng, 4, 2);
        assert_eq!(cghp_distance(&x, &x, Mode::Exact).unwrap().value, rat(0, 1));
        let xy = cghp_distance(&x, &y, Mode::Exact).unwrap().value;
        let yx = cghp_distance(&y, &x, Mode::Exact).unwrap().value;
        assert_eq!(xy, yx, "symmetry must be exact");
        let xz = cghp_distance(&x, &z, Mode::Exact).unwrap().value;
        let yz = cghp_distance(&y, &z, Mode::Exact).unwrap().value;
        // 3 tau slack; the rational tolerance is zero, so this is exact.
        let slack = Rational::tol() + Rational::tol() + Rational::tol();
        assert!(xz <= xy + yz + slack);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "runtime budget exceeded: {elapsed:?}"
    );
    println!(
        "criterion 04 compact-distance oracle equivalence (300 pairs) and metric axioms (200 triples), {elapsed:?}: PASS"
    );
}

/// Criterion 5: the radius inequality holds on every pair of the criterion-4
/// corpus.
#[test]
fn c05_radius_bound_on_corpus() {
    for (case, (x, y)) in criterion4_corpus(300).iter().enumerate() {
        let d = cghp_distance(x, y, Mode::Exact).unwrap().value;
        assert!(
            y.radius() <= x.radius() + d.clone() + d.clone(),
            "radius bound failed on case {case}"
        );
        assert!(x.radius() <= y.radius() + d.clone() + d);
    }
    println!("criterion 05 radius bound (600 directed checks): PASS");
}

/// Criterion 6: projecting a subspace across an exact witness lands within
/// the certified distance (exact re-check), and the inner-ball clause holds
/// whenever a radius is supplied.
#[test]
fn c06_subspace_projection_monotonicity() {
    let mut rng = StdRng::seed_from_u64(106);
    let mut with_radius = 0;
    for case in 0..200 {
        let x = random_space(&mut rng, 3, 2);
        let y = random_space(&mut rng, 3, 2);
        let witness = cghp_distance(&x, &y, Mode::Exact).unwrap();
        let eps = witness.value.clone();

        let supply_radius = rng.gen_bool(0.5);
        if supply_radius {
            // The full subspace carries every ball; any radius covering X
            // (and at least twice the distance, as required) works.
            let r = (x.radius() + rat(1, 1)).max_val(eps.clone() + eps.clone());
            let full = SubspaceSpec::full(&x);
            let choice: Vec<Rational> = x.masses().to_vec();
            let proj = project_subspace(&x, &y, &full, &choice, &witness, Some(&r)).unwrap();
            assert!(
                proj.verified.value <= eps,
                "projection exceeded the witness value on case {case}"
            );
            // Inner-ball clause: the (r - 2 eps)-ball of Y is a pmm-subspace
            // of the result.
            let inner_r = r - (eps.clone() + eps.clone());
            let inner = y.ball_support(&inner_r);
            let inner_mass: Vec<Rational> = inner.iter().map(|&j| y.mass(j).clone()).collect();
            assert!(
                is_pmm_subspace(&inner, &inner_mass, &proj.support, &proj.mass),
                "inner ball escaped the projection on case {case}"
            );
            with_radius += 1;
        } else {
            let (sub, choice) = random_subspace(&mut rng, &x);
            let proj = project_subspace(&x, &y, &sub, &choice, &witness, None).unwrap();
            assert!(
                proj.verified.value <= eps,
                "projection exceeded the witness value on case {case}"
            );
        }
    }
    assert!(with_radius >= 50);
    println!(
        "criterion 06 subspace projection (200 triples, {with_radius} with the inner-ball clause): PASS"
    );
}

/// Criterion 7: localization closed forms. The two-point collapse
/// `{0, n} with counting measure vs a unit atom` has distance exactly `1/n`,
/// and a space is within `1/r` of its own `r`-ball.
#[test]
fn c07_localization_closed_forms() {
    let tol = 1e-6f64;
    for n in [2i64, 5, 10] {
        let x = FiniteSpace::<f64>::line(&[0, n], 0, &[1, 1]);
        let y = validate_space(vec![vec![0.0]], 0, vec![1.0], None).unwrap();
        let res = ghp_distance(&x, &y, &tol).unwrap();
        let expected = 1.0 / n as f64;
        assert!(
            (res.value - expected).abs() <= tol + 1e-9,
            "collapse distance for n = {n}: got {}, want {expected}",
            res.value
        );
        assert!(res.lower <= expected + 1e-9 && expected <= res.upper + 1e-9);
    }

    let mut rng = StdRng::seed_from_u64(107);
    for _ in 0..50 {
        let xq = random_space(&mut rng, 3, 2);
        let x = to_float_space(&xq);
        for r in [1.0f64, 2.0, 5.0] {
            let ball = x.closed_ball(&r);
            let res = ghp_distance(&x, &ball, &tol).unwrap();
            assert!(
                res.value <= 1.0 / r + tol + 1e-9,
                "ghp(X, ball_r X) = {} > 1/{r}",
                res.value
            );
        }
    }
    println!("criterion 07 localization closed forms (3 collapses + 150 ball bounds): PASS");
}

/// Criterion 8: the localization value is non-increasing in the level at
/// fixed radius, and the bisection predicate flips exactly once across an
/// independently evaluated grid that brackets the bisection result.
#[test]
fn c08_monotonicity_and_bisection_soundness() {
    let mut rng = StdRng::seed_from_u64(108);
    let tol = 1e-6f64;
    for case in 0..100 {
        let xq = random_space(&mut rng, 3, 2);
        let yq = random_space(&mut rng, 3, 2);
        let x = to_float_space(&xq);
        let y = to_float_space(&yq);

        // Non-increasing in eps at fixed r over a grid of 8 levels.
        let r = 2.0f64;
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let eps = r * k as f64 / 8.0;
            let q = LocalizationQuery::new(eps, r, Direction::XToY).unwrap();
            let a = localized_a(&q, &x, &y).unwrap().value;
            assert!(a <= prev + 1e-9, "a not monotone on case {case}");
            prev = a;
        }

        // Single false-to-true transition on the oracle grid, bracketing the
        // bisection result.
        let grid: Vec<f64> = (1..=8).map(|k| k as f64 / 8.0).collect();
        let table = ghp_grid(&x, &y, &grid).unwrap();
        // At most one transition, and only in the false-to-true direction.
        for w in table.windows(2) {
            assert!(
                !(w[0].1 && !w[1].1),
                "predicate fell back from true to false on case {case}"
            );
        }
        let res = ghp_distance(&x, &y, &tol).unwrap();
        let max_false = table
            .iter()
            .filter(|(_, p)| !p)
            .map(|(e, _)| *e)
            .fold(0.0, f64::max);
        let min_true = table
            .iter()
            .filter(|(_, p)| *p)
            .map(|(e, _)| *e)
            .fold(f64::INFINITY, f64::min);
        assert!(
            max_false <= res.lower + tol + 1e-9,
            "oracle-false level above the bracket on case {case}"
        );
        if res.value < 1.0 {
            assert!(
                res.upper <= min_true + tol + 1e-9,
                "bracket above an oracle-true level on case {case}"
            );
        }
    }
    println!("criterion 08 localization monotonicity and bisection soundness (100 pairs): PASS");
}

/// Criterion 9: convergence fixtures. The shrinking-perturbation sequence
/// `{0, 1 + 1/n, -1 - 2/n}` against `{0, 1, -1}`, the two-point collapse
/// onto a doubled atom, and monotone ball criteria at continuity radii.
#[test]
fn c09_convergence_fixtures() {
    let tol = 1e-7f64;

    // Collapse of {0, 1/n} with counting measure onto one atom of mass 2.
    let limit_atom = validate_space(vec![vec![0.0]], 0, vec![2.0], None).unwrap();
    let x100 = {
        let d = 0.01f64;
        validate_space(vec![vec![0.0, d], vec![d, 0.0]], 0, vec![1.0, 1.0], None).unwrap()
    };
    let g = ghp_distance(&x100, &limit_atom, &tol).unwrap().value;
    assert!(g < 0.02, "two-point collapse at n = 100: got {g}");

    // Ball criteria decrease monotonically at continuity radii 0.5 and 2.5.
    let line_space = |n: i64| -> FiniteSpace<f64> {
        let a = 1.0 + 1.0 / n as f64;
        let b = -1.0 - 2.0 / n as f64;
        let coords = [0.0, a, b];
        let dist: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| (coords[i] - coords[j]).abs()).collect())
            .collect();
        validate_space(dist, 0, vec![0.0; 3], None).unwrap()
    };
    let limit = {
        let coords = [0.0, 1.0, -1.0];
        let dist: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| (coords[i] - coords[j]).abs()).collect())
            .collect();
        validate_space(dist, 0, vec![0.0; 3], None).unwrap()
    };
    let seq: Vec<FiniteSpace<f64>> = [5i64, 10, 20, 50].iter().map(|&n| line_space(n)).collect();
    let opts = ConvergenceOptions {
        criteria: ConvergenceCriteria {
            ghp: false,
            balls: true,
            integral: false,
        },
        radius_grid: vec![0.5, 2.5],
        tol,
        budget: 25,
    };
    let report = check_convergence(&seq, &limit, &opts).unwrap();
    let balls = report.balls.unwrap();
    assert_eq!(
        balls.len(),
        2,
        "0.5 and 2.5 are continuity radii of the limit"
    );
    for (radius, values, summary) in &balls {
        assert!(
            summary.nonincreasing,
            "ball criterion not monotone at radius {radius}: {values:?}"
        );
    }

    // Shrinking-perturbation sequence at n = 50.
    let x50 = line_space(50);
    let i = ghp_metrics::ghp::integral_ghp(&x50, &limit).unwrap();
    assert!(i < 0.05, "integral criterion at n = 50: got {i}");
    // The true localized distance of this fixture is exactly 3/n: every
    // admissible correspondence pairs 1 + 1/n and -1 - 2/n with {1, -1}, and
    // the cross-pair distortion |d(1 + 1/n, -1 - 2/n) - d(1, -1)| = 3/n is
    // unavoidable, so the compact distance is 3/(2n) and the localization
    // doubles it. At n = 50 that is 0.06, so the pinned threshold below is
    // not attainable; the assertion is kept as pinned and documents the gap.
    let g = ghp_distance(&x50, &limit, &tol).unwrap().value;
    assert!(g < 0.05, "localized distance at n = 50: got {g}");

    println!("criterion 09 convergence fixtures: PASS");
}

/// Criterion 10: localized-vs-compact inequalities on the criterion-4
/// corpus, and the unit-interval bound.
#[test]
fn c10_ghp_vs_cghp_inequalities() {
    let tol = 1e-6f64;
    let slack = 2.0 * tol + 1e-9;
    for (case, (xq, yq)) in criterion4_corpus(300).iter().enumerate() {
        let x = to_float_space(xq);
        let y = to_float_space(yq);
        let g = ghp_distance(&x, &y, &tol).unwrap();
        assert!(
            0.0 <= g.value && g.value <= 1.0,
            "unit bound on case {case}"
        );
        let compact = cghp_distance(&x, &y, Mode::Exact).unwrap().value;
        assert!(
            g.value <= 2.0 * compact + slack,
            "compact bound on case {case}"
        );
        for r in [1.0f64, 2.0, 4.0] {
            let cb = cghp_distance(&x.closed_ball(&r), &y.closed_ball(&r), Mode::Exact)
                .unwrap()
                .value;
            let bound = (1.0 / r).max(2.0 * cb);
            assert!(
                g.value <= bound + slack,
                "localized bound failed on case {case} at radius {r}"
            );
        }
    }
    println!("criterion 10 localized-vs-compact inequalities (300 pairs x 4 bounds): PASS");
}

/// Criterion 11: the graph distance is zero exactly on rooted-isomorphic
/// pairs (exhaustive over rooted trees with at most 6 vertices), the
/// edge-vs-vertex fixture is 1/2, and the zero sets of the graph distance
/// and the localized distance agree on random tree pairs.
#[test]
fn c11_benjamini_schramm() {
    let trees = all_rooted_trees_up_to(6);
    assert!(
        trees.len() >= 30,
        "expected all rooted tree classes, got {}",
        trees.len()
    );
    for a in &trees {
        for b in &trees {
            let (d, _) = bs_distance::<Rational>(a, b);
            let iso = rooted_tree_canonical(a) == rooted_tree_canonical(b);
            assert_eq!(d == rat(0, 1), iso, "zero set mismatch");
        }
    }

    let edge = RootedGraph::path(2);
    let vertex = RootedGraph::path(1);
    let (d, _) = bs_distance::<Rational>(&edge, &vertex);
    assert_eq!(d, rat(1, 2));

    let mut rng = StdRng::seed_from_u64(111);
    let tol = 1e-6f64;
    for case in 0..100 {
        let na = rng.gen_range(1..=5);
        let a = random_tree(&mut rng, na);
        let nb = rng.gen_range(1..=5);
        let b = random_tree(&mut rng, nb);
        let (bs, _) = bs_distance::<f64>(&a, &b);
        let xa: FiniteSpace<f64> = graph_to_space(&a, GraphMeasure::Zero);
        let xb: FiniteSpace<f64> = graph_to_space(&b, GraphMeasure::Zero);
        let g = ghp_distance(&xa, &xb, &tol).unwrap().value;
        assert_eq!(
            bs == 0.0,
            g <= 2.0 * tol,
            "zero-set disagreement on case {case}: bs = {bs}, ghp = {g}"
        );
    }
    println!(
        "criterion 11 benjamini-schramm ({} tree classes exhaustively, fixture, 100 random pairs): PASS",
        trees.len()
    );
}

/// Criterion 12: the empirical weak distance obeys the localization bound
/// `P <= 1/r or 2 P^c(r-balls)`, with both sides computed independently.
#[test]
fn c12_weak_convergence_reduction() {
    let mut rng = StdRng::seed_from_u64(112);
    let tol = 1e-6f64;
    let r = 2.0f64;
    for case in 0..50 {
        let na = rng.gen_range(1..=3);
        let nb = rng.gen_range(1..=3);
        let a: Vec<FiniteSpace<f64>> = (0..na)
            .map(|_| to_float_space(&random_space(&mut rng, 3, 2)))
            .collect();
        let b: Vec<FiniteSpace<f64>> = (0..nb)
            .map(|_| to_float_space(&random_space(&mut rng, 3, 2)))
            .collect();
        let left = empirical_weak_distance(&a, &b, &tol, 25).unwrap().p;

        let balls_a: Vec<FiniteSpace<f64>> = a.iter().map(|x| x.closed_ball(&r)).collect();
        let balls_b: Vec<FiniteSpace<f64>> = b.iter().map(|x| x.closed_ball(&r)).collect();
        let pc = empirical_prokhorov_with(
            &balls_a,
            &balls_b,
            |p, q| Ok(cghp_distance(p, q, Mode::Exact)?.value),
            &1e-9,
        )
        .unwrap()
        .p;
        let bound = (1.0 / r).max(2.0 * pc);
        assert!(
            left <= bound + 3.0 * tol + 1e-9,
            "weak bound failed on case {case}: {left} > {bound}"
        );
    }
    println!("criterion 12 weak-convergence reduction (50 collections): PASS");
}
