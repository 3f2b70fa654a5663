//! Property suites with fixed seeds, shared by the core property tests and
//! the acceptance target.

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::sample::subsequence;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestCaseError, TestRunner};

use wignerlab_core::exact::{rat, solve_affine, Rational};
use wignerlab_core::geometry::{AffineFunctional, StateSpace};
use wignerlab_core::symmetry::{
    enumerate_lifted_symmetries, find_transported_channel, induced_action, is_g_symmetric, product_generators,
    solve_covariant, CovariantOutcome, Obstruction, PhasePointMap,
};
use wignerlab_core::theory::{jointly_info_complete, ChannelSearch, Observable};
use wignerlab_core::wigner::{construct_family, degenerate_rep, marginal_system, Anchor, SignedGrid, WignerRep};

pub type Outcome = Result<(), String>;

fn check<S: Strategy>(seed: u64, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    TestRunner::new(config(seed))
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn config(seed: u64) -> Config {
    Config {
        cases: 256,
        rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

/// Rational point on the unit circle, `t ↦ ((1 - t²)/(1 + t²), 2t/(1 + t²))`.
fn circle_point(t: Rational) -> Vec<Rational> {
    let one = Rational::one();
    let d = &one + &t * &t;
    vec![(&one - &t * &t) / &d, (&t + &t) / &d]
}

/// Polygons inscribed in the unit circle; every point is a vertex.
fn polygon(min: usize, max: usize) -> impl Strategy<Value = StateSpace> {
    subsequence((-12i64..=12).collect::<Vec<_>>(), min..=max).prop_map(|ts| {
        StateSpace::polytope(ts.into_iter().map(|t| circle_point(rat(t, 4))).collect()).expect("convex position")
    })
}

/// A linear part with entries in {-1, 0, 1}.
fn direction() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1i64..=1, 2)
}

/// Effects `(c + l·x) / (2 c n)` for the first `n - 1` outcomes and the
/// remainder for the last, with `c = |l|_1`. On the unit disk they lie in
/// `[0, 1]`.
fn observable(name: &'static str, max_outcomes: usize) -> impl Strategy<Value = Observable> {
    (2..=max_outcomes)
        .prop_flat_map(|n| prop::collection::vec(direction(), n - 1))
        .prop_map(move |dirs| {
            let n = dirs.len() as i64 + 1;
            let mut effects: Vec<AffineFunctional> = dirs
                .iter()
                .map(|l| {
                    let c: i64 = l.iter().map(|v| v.abs()).sum();
                    if c == 0 {
                        AffineFunctional::constant(2, rat(1, 2 * n))
                    } else {
                        AffineFunctional::new(l.iter().map(|&v| rat(v, 2 * c * n)).collect(), rat(1, 2 * n))
                    }
                })
                .collect();
            let used = AffineFunctional::sum(2, effects.iter());
            effects.push(&AffineFunctional::one(2) - &used);
            let outcomes = (0..effects.len()).map(|i| i.to_string()).collect();
            Observable::new(name, outcomes, effects).expect("shape")
        })
}

fn functional() -> impl Strategy<Value = AffineFunctional> {
    (prop::collection::vec(-4i64..=4, 2), -4i64..=4)
        .prop_map(|(l, c)| AffineFunctional::new(l.into_iter().map(|v| rat(v, 2)).collect(), rat(c, 4)))
}

fn setting(max_outcomes: usize) -> impl Strategy<Value = (StateSpace, Observable, Observable)> {
    (
        polygon(3, 6),
        observable("A", max_outcomes),
        observable("B", max_outcomes),
    )
}

/// Row and column sums recomputed without the library's checker.
fn marginals_hold(w: &WignerRep) -> bool {
    let zero = AffineFunctional::zero(w.dim());
    let rows_ok = (0..w.rows()).all(|a| {
        let sum = (0..w.cols()).fold(zero.clone(), |acc, b| &acc + w.entry(a, b));
        &sum == w.obs_a().effect(a)
    });
    let cols_ok = (0..w.cols()).all(|b| {
        let sum = (0..w.rows()).fold(zero.clone(), |acc, a| &acc + w.entry(a, b));
        &sum == w.obs_b().effect(b)
    });
    rows_ok && cols_ok
}

pub fn family_members_have_the_right_marginals() -> Outcome {
    check(
        0x5eed_0001,
        (
            setting(3),
            prop::collection::vec(functional(), 4),
            (0usize..3, 0usize..3, 0usize..3, 0usize..3),
            -8i64..=8,
        ),
        |((_, a, b), free, corner, t)| {
            let anchor = Anchor::last(&a, &b);
            let needed = (a.len() - 1) * (b.len() - 1);
            let w = construct_family(&a, &b, anchor, &free[..needed]).unwrap();
            prop_assert!(marginals_hold(&w));
            prop_assert!(w.check_marginals().is_ok());
            let (a1, a2, b1, b2) = corner;
            let (a1, a2, b1, b2) = (a1 % a.len(), a2 % a.len(), b1 % b.len(), b2 % b.len());
            prop_assume!(a1 != a2 && b1 != b2);
            let p = w.perturb(a1, a2, b1, b2, &rat(t, 3)).unwrap();
            prop_assert!(marginals_hold(&p));
            Ok(())
        },
    )
}

pub fn all_members_faithful_iff_info_complete() -> Outcome {
    check(
        0x5eed_0002,
        (setting(3), prop::collection::vec(functional(), 4)),
        |((space, a, b), free)| {
            let complete = jointly_info_complete(&a, &b, &space);
            let anchor = Anchor::last(&a, &b);
            // The zero choice lies in the span of the effects, so it is faithful
            // exactly when the effects already separate states.
            let w0 = degenerate_rep(&a, &b, anchor).unwrap();
            prop_assert_eq!(w0.is_faithful(&space), complete);
            if complete {
                let needed = (a.len() - 1) * (b.len() - 1);
                let w = construct_family(&a, &b, anchor, &free[..needed]).unwrap();
                prop_assert!(w.is_faithful(&space));
            }
            Ok(())
        },
    )
}

fn binary_setting() -> impl Strategy<Value = (StateSpace, WignerRep)> {
    (polygon(3, 5), observable("A", 2), observable("B", 2), functional()).prop_map(|(space, a, b, q)| {
        let w = construct_family(&a, &b, Anchor::last(&a, &b), &[q]).unwrap();
        (space, w)
    })
}

pub fn symmetries_of_faithful_reps_are_transported() -> Outcome {
    check(0x5eed_0003, binary_setting(), |(space, w)| {
        prop_assume!(w.is_faithful(&space));
        for phi in enumerate_lifted_symmetries(&w, &space).unwrap() {
            let search = find_transported_channel(&w, &space, &phi.lift().to_affine_map()).unwrap();
            let found = matches!(search, ChannelSearch::Found(_));
            prop_assert!(found, "{} not transported", phi);
        }
        Ok(())
    })
}
pub fn induced_action_is_a_homomorphism() -> Outcome {
    check(0x5eed_0003, binary_setting(), |(space, w)| {
        prop_assume!(w.is_faithful(&space));
        let symmetries = enumerate_lifted_symmetries(&w, &space).unwrap();
        for g in &symmetries {
            for h in &symmetries {
                let composed = induced_action(&w, &space, &g.compose(h)).unwrap();
                let product = induced_action(&w, &space, g)
                    .unwrap()
                    .compose(&induced_action(&w, &space, h).unwrap());
                prop_assert!(composed.agrees_on(&product, &space));
            }
        }
        Ok(())
    })
}

pub fn free_parameter_count() -> Outcome {
    check(0x5eed_0004, (1usize..=6, 1usize..=6), |(rows, cols)| {
        let system = marginal_system(rows, cols);
        let rhs = vec![Rational::zero(); system.rows()];
        let solved = solve_affine(&system, &rhs);
        let nullity = match solved {
            wignerlab_core::exact::AffineSolution::Solved { nullspace, .. } => nullspace.len(),
            wignerlab_core::exact::AffineSolution::Inconsistent { .. } => unreachable!("homogeneous"),
        };
        prop_assert_eq!(nullity, (rows - 1) * (cols - 1));
        Ok(())
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn lift_case() -> impl Strategy<Value = (usize, usize, Vec<usize>, Vec<usize>, Vec<i64>)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| {
        let n = r * c;
        (
            Just(r),
            Just(c),
            permutation(n),
            permutation(n),
            prop::collection::vec(0i64..=9, n),
        )
    })
}

pub fn lifts_preserve_mass_and_positivity() -> Outcome {
    check(0x5eed_0005, lift_case(), |(r, c, p, q, weights)| {
        let phi = PhasePointMap::new(r, c, p).unwrap();
        let psi = PhasePointMap::new(r, c, q).unwrap();
        let total: i64 = weights.iter().sum::<i64>().max(1);
        let grid = SignedGrid::new(r, c, weights.iter().map(|&w| rat(w, total)).collect()).unwrap();
        let image = phi.lift().apply(&grid);
        prop_assert_eq!(image.total(), grid.total());
        prop_assert!(image.is_nonnegative());
        let composed = phi.compose(&psi).lift();
        prop_assert_eq!(composed.apply(&grid), phi.lift().apply(&psi.lift().apply(&grid)));
        prop_assert_eq!(composed.matrix(), &phi.lift().matrix().mul(psi.lift().matrix()));
        Ok(())
    })
}

/// Polygons symmetric under both coordinate flips that reach `(±1, 0)` and
/// `(0, ±1)`, with the `(1 ± z)/2`, `(1 ± x)/2` observables.
fn symmetric_setting() -> impl Strategy<Value = (StateSpace, Observable, Observable)> {
    subsequence((1i64..=7).collect::<Vec<_>>(), 0..=3).prop_map(|ts| {
        let mut vertices = vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(-1, 1), rat(0, 1)],
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(-1, 1)],
        ];
        for t in ts {
            let p = circle_point(rat(t, 8));
            for (sx, sz) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                vertices.push(vec![&p[0] * rat(sx, 1), &p[1] * rat(sz, 1)]);
            }
        }
        let space = StateSpace::polytope(vertices).unwrap();
        let half = rat(1, 2);
        let sign =
            |i: usize| &AffineFunctional::coordinate(2, i).scaled(&half) + &AffineFunctional::constant(2, half.clone());
        (
            space,
            Observable::binary("A", sign(1)),
            Observable::binary("B", sign(0)),
        )
    })
}

pub fn covariant_solutions_are_unique_and_symmetric() -> Outcome {
    check(0x5eed_0006, symmetric_setting(), |(space, a, b)| {
        let report = solve_covariant(&a, &b, &space, &[]).unwrap();
        let stage_one_failed = matches!(report.outcome, CovariantOutcome::None(Obstruction::Channel(_)));
        if report.hypotheses.all_hold() && !stage_one_failed {
            let family = matches!(report.outcome, CovariantOutcome::Family { .. });
            prop_assert!(!family, "several covariant representations");
        }
        if let CovariantOutcome::Unique { rep, symmetric } = report.outcome {
            prop_assert!(symmetric);
            let generators: Vec<PhasePointMap> = product_generators(2, 2).iter().map(|g| g.phase_map()).collect();
            prop_assert!(is_g_symmetric(&rep, &space, &generators).unwrap().holds());
            for entry in rep.grid() {
                prop_assert!(entry.linear.iter().all(|c| c.abs() <= rat(1, 2)));
            }
        }
        Ok(())
    })
}
