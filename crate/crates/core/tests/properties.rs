use pqmetric::axioms::PointSampler;
use pqmetric::completeness::builtin_completeness;
use pqmetric::prelude::*;
use pqmetric::spaces::{BUILTIN_SPACES, PAPER_EXAMPLE, PAPER_EXAMPLE_PUNCTURED};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_from(seed: u64, n: usize) -> Space {
    random_valid_space(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn pairs(space: &Space) -> Vec<(Point, Point)> {
    match space.len() {
        Some(_) => {
            let pts = space.points();
            pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).collect()
        }
        None => {
            let mut s = PointSampler::new(space, &CheckStrategy::sampled(1, 7), 5).unwrap();
            (0..2000).map(|_| (s.sample(), s.sample())).collect()
        }
    }
}

fn every_space(seed: u64, n: usize) -> Vec<Space> {
    let mut all: Vec<Space> = BUILTIN_SPACES.iter().map(|n| builtin_space(n).unwrap()).collect();
    all.push(space_from(seed, n));
    all
}

fn kannan_tables(space: &Space) -> Vec<(Mapping, f64)> {
    enumerate_self_maps(space, 8)
        .unwrap()
        .filter_map(|m| {
            let l = min_kannan_constant(space, &m).unwrap().lambda()?;
            (l < 0.25).then_some((m, l))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugation_is_an_involution(seed in any::<u64>(), n in 1usize..=5) {
        for s in every_space(seed, n) {
            let back = s.conjugate().conjugate();
            for (x, y) in pairs(&s) {
                prop_assert_eq!(back.distance(x, y).unwrap(), s.distance(x, y).unwrap());
            }
        }
    }

    #[test]
    fn symmetrization_invariants(seed in any::<u64>(), n in 1usize..=5) {
        for s in every_space(seed, n) {
            let plus = s.symmetrize();
            for (x, y) in pairs(&s) {
                let pxy = plus.distance(x, y).unwrap();
                prop_assert_eq!(pxy, plus.distance(y, x).unwrap());
                prop_assert!(s.distance(x, y).unwrap() <= pxy);
                prop_assert_eq!(plus.distance(x, x).unwrap(), 2.0 * s.distance(x, x).unwrap());
            }
        }
    }

    #[test]
    fn balls_contain_their_centre(seed in any::<u64>(), n in 1usize..=5, eps in 1e-300f64..1e6) {
        for s in every_space(seed, n) {
            for (x, _) in pairs(&s).into_iter().take(200) {
                prop_assert!(s.ball_contains(x, eps, x).unwrap());
            }
        }
    }

    #[test]
    fn inequality_axioms_are_monotone_in_slack(seed in any::<u64>(), lo in 0.0f64..1.0, extra in 0.0f64..1.0) {
        // a perturbed matrix so some checks fail at small slack
        let base = space_from(seed, 4).matrix().unwrap();
        let bumped: Vec<Vec<f64>> = base
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, v)| v + ((i * 3 + j) % 2) as f64 * 0.7).collect())
            .collect();
        let s = Space::from_matrix(bumped).unwrap();
        let tight = check_axioms(&s, &CheckStrategy::exhaustive().with_slack(lo)).unwrap();
        let loose = check_axioms(&s, &CheckStrategy::exhaustive().with_slack(lo + extra)).unwrap();
        for id in ["1a", "1b", "2"] {
            let (a, b) = (tight.entry(id).unwrap(), loose.entry(id).unwrap());
            prop_assert!(b.violations <= a.violations);
            prop_assert!(!a.pass || b.pass);
        }
    }

    #[test]
    fn derived_structures_follow_from_axioms(seed in any::<u64>(), n in 1usize..=5) {
        let s = space_from(seed, n);
        prop_assert!(check_derived_lemma(&s, &CheckStrategy::exhaustive()).unwrap().passed());
    }

    #[test]
    fn kannan_implies_symmetrized_bounds(seed in any::<u64>(), n in 2usize..=4) {
        let s = space_from(seed, n);
        let exact = CheckStrategy::exhaustive().with_slack(0.0);
        for (map, l) in kannan_tables(&s) {
            let c = KannanConstant::new(l).unwrap();
            prop_assert!(check_kannan(&s, &map, c, &exact).unwrap().passed());
            prop_assert!(check_lemma2(&s, &map, c, &exact).unwrap().passed());
        }
    }

    #[test]
    fn estimator_is_sound(seed in any::<u64>(), n in 2usize..=4) {
        let s = space_from(seed, n);
        let exact = CheckStrategy::exhaustive().with_slack(0.0);
        for map in enumerate_self_maps(&s, 8).unwrap() {
            if let Some(l) = estimate_lambda(&s, &map, &exact).unwrap().lambda_hat().filter(|&l| l < 0.25) {
                let c = KannanConstant::new(l).unwrap();
                prop_assert!(check_kannan(&s, &map, c, &exact).unwrap().passed());
                let above = KannanConstant::new((l + 0.25) / 2.0).unwrap();
                prop_assert!(check_kannan(&s, &map, above, &exact).unwrap().passed());
            }
        }
    }

    #[test]
    fn oracle_agrees_with_checker(seed in any::<u64>(), n in 2usize..=4) {
        let s = space_from(seed, n);
        let exact = CheckStrategy::exhaustive().with_slack(0.0);
        for map in enumerate_self_maps(&s, 8).unwrap() {
            match min_kannan_constant(&s, &map).unwrap() {
                MinConstant::Exact { lambda_min } if lambda_min < 0.25 => {
                    let c = KannanConstant::new(lambda_min).unwrap();
                    prop_assert!(check_kannan(&s, &map, c, &exact).unwrap().passed());
                    if lambda_min > 0.0 {
                        let below = KannanConstant::new(lambda_min.next_down()).unwrap();
                        prop_assert!(!check_kannan(&s, &map, below, &exact).unwrap().passed());
                    }
                }
                // no constant below 1/4 works, so the largest allowed one fails
                _ => {
                    let c = KannanConstant::new(0.25f64.next_down()).unwrap();
                    prop_assert!(!check_kannan(&s, &map, c, &exact).unwrap().passed());
                }
            }
        }
    }

    #[test]
    fn solver_agrees_with_oracle(seed in any::<u64>(), n in 1usize..=5) {
        let s = space_from(seed, n);
        let audit = exhaustive_kannan_audit(&s, 8).unwrap();
        let tol: f64 = 1e-12;
        for k in &audit.kannan_maps {
            let map = Mapping::Table(k.table.clone());
            let expected = fixed_points_of(&k.table);
            prop_assert_eq!(expected.len(), 1);
            let r = KannanConstant::new(k.min_lambda).unwrap().rate();
            let steps = (tol.ln() / r.ln()).ceil().max(0.0) as usize;
            for start in s.points() {
                let (trace, res) = iterate(&s, &map, start, tol, 10_000).unwrap();
                prop_assert_eq!(res.point, Point::Index(expected[0]));
                prop_assert_eq!(res.self_distance, 0.0);
                prop_assert!(verify_fixed_point(&s, &map, res.point, tol).unwrap());
                prop_assert!(res.iterations <= n * steps + n);
                let d0 = trace.steps[0].step_displacement;
                prop_assert!(trace.total_displacement() <= d0 / (1.0 - r) + 1e-9);
            }
            prop_assert!(uniqueness_probe(&s, &map, &s.points(), tol, 10_000).unwrap().passed);
        }
    }

    #[test]
    fn classification_is_coherent(ratio in 0.05f64..0.99, horizon in 16usize..200) {
        for name in BUILTIN_SPACES {
            let s = builtin_space(name).unwrap();
            let seqs = [
                SequenceSpec::geometric(ratio, horizon).unwrap(),
                SequenceSpec::harmonic(horizon).unwrap(),
                SequenceSpec::saturating(horizon).unwrap(),
            ];
            for seq in &seqs {
                let c = classify_sequence(&s, seq, &default_candidates(&s), 1e-12).unwrap();
                if c.tau_p_plus_cauchy.limit_is_zero(1e-12) {
                    prop_assert!(c.left_p_cauchy.holds);
                }
            }
        }
    }
}

fn fixed_points_of(table: &[usize]) -> Vec<usize> {
    (0..table.len()).filter(|&i| table[i] == i).collect()
}

#[test]
fn example_trace_sums_geometrically() {
    let s = builtin_space(PAPER_EXAMPLE).unwrap();
    let r = KannanConstant::new(2.0 / 15.0).unwrap().rate();
    for start in [1.5, 64.0, 9.0e5] {
        let (trace, _) = iterate(&s, &Mapping::ExampleMap, Point::Coord(start), 1e-12, 1000).unwrap();
        let d0 = trace.steps[0].step_displacement;
        assert!(trace.total_displacement() <= d0 / (1.0 - r) + 1e-12);
    }
}

#[test]
fn underflowing_terms_are_reported() {
    let s = builtin_space(PAPER_EXAMPLE_PUNCTURED).unwrap();
    let seq = SequenceSpec::geometric(0.01, 200).unwrap();
    match classify_sequence(&s, &seq, &[], 1e-12) {
        Err(Error::Argument(msg)) => assert!(msg.contains("underflows")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn implication_chain_holds_on_builtins() {
    let family = default_family(256).unwrap();
    for name in BUILTIN_SPACES {
        let facts = builtin_completeness(name).unwrap();
        let s = builtin_space(name).unwrap();
        let report = probe_completeness(&s, &family, &default_candidates(&s), 1e-12).unwrap();
        if facts.left_p_sequential == Some(true) {
            assert!(!report.counterexample_found(Notion::PSequential), "{name}");
        }
        // evidence against a weaker notion is evidence against every stronger one
        if report.counterexample_found(Notion::PSequential) {
            assert!(report.counterexample_found(Notion::LeftPSequential), "{name}");
        }
    }
    assert_eq!(builtin_completeness(PAPER_EXAMPLE_PUNCTURED).unwrap().p_sequential, Some(false));
}
