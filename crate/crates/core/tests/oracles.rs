//! Expected values checked against oracles written independently of the
//! engine: brute-force searches, closed forms and direct vertex checks.

use num_traits::One;

use wignerlab_core::catalog::load;
use wignerlab_core::exact::{int, ints, rat, rats, Rational};
use wignerlab_core::geometry::AffineFunctional;
use wignerlab_core::symmetry::{
    enumerate_lifted_symmetries, find_permutation_channels, induced_action, solve_covariant, CovariantOutcome,
    Obstruction, PermutationChannels, PhasePointMap,
};
use wignerlab_core::theory::{are_compatible, Compatibility};
use wignerlab_core::wigner::{find_positive_member, Anchor, Positivity, PositiveSearch};

fn boxworld_grid(q: &Rational, x: &Rational, y: &Rational) -> [Rational; 4] {
    [
        q.clone(),
        x - q,
        y - q,
        Rational::one() + q - x - y,
    ]
}

/// Searches `q = αx + βy + γ` over a grid of quarters for the choices whose
/// grids transform under the two outcome swaps as the swapped cells do.
#[test]
fn boxworld_covariant_brute_force() {
    let square = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut found = Vec::new();
    let range: Vec<Rational> = (-8..=8).map(|n| rat(n, 4)).collect();
    for alpha in &range {
        for beta in &range {
            for gamma in &range {
                let q = |x: &Rational, y: &Rational| alpha * x + beta * y + gamma;
                let covariant = square.iter().all(|&(i, j)| {
                    let (x, y) = (int(i), int(j));
                    let here = boxworld_grid(&q(&x, &y), &x, &y);
                    // Swapping the outcomes of A reflects x; of B reflects y.
                    let fx = Rational::one() - &x;
                    let fy = Rational::one() - &y;
                    let a_swapped = boxworld_grid(&q(&fx, &y), &fx, &y);
                    let b_swapped = boxworld_grid(&q(&x, &fy), &x, &fy);
                    a_swapped == [here[2].clone(), here[3].clone(), here[0].clone(), here[1].clone()]
                        && b_swapped == [here[1].clone(), here[0].clone(), here[3].clone(), here[2].clone()]
                });
                if covariant {
                    found.push((alpha.clone(), beta.clone(), gamma.clone()));
                }
            }
        }
    }
    assert_eq!(found, vec![(rat(1, 2), rat(1, 2), rat(-1, 4))]);

    let entry = load("boxworld").unwrap();
    let space = entry.theory.state_space();
    let (a, b) = (entry.theory.observable("A").unwrap(), entry.theory.observable("B").unwrap());
    let CovariantOutcome::Unique { rep, .. } = solve_covariant(a, b, space, &[]).unwrap().outcome else {
        panic!("unique solution expected");
    };
    assert_eq!(rep.entry(0, 0), &AffineFunctional::new(rats(&[(1, 2), (1, 2)]), rat(-1, 4)));
    let s00 = rep.evaluate(space, &ints(&[0, 0])).unwrap();
    assert_eq!(s00.to_rows(), vec![rats(&[(-1, 4), (1, 4)]), rats(&[(1, 4), (3, 4)])]);
}

#[test]
fn boxworld_incompatibility_matches_positive_search() {
    let entry = load("boxworld").unwrap();
    let space = entry.theory.state_space();
    for (x, y, compatible) in [("A", "B", false), ("C", "D", true)] {
        let (a, b) = (entry.theory.observable(x).unwrap(), entry.theory.observable(y).unwrap());
        let verdict = are_compatible(a, b, space).unwrap();
        let search = find_positive_member(a, b, space, Anchor::last(a, b)).unwrap();
        assert_eq!(verdict.is_compatible(), compatible);
        assert_eq!(matches!(search, PositiveSearch::Found(_)), compatible);
        if let Compatibility::Incompatible(cert) = verdict {
            let program = wignerlab_core::theory::compatibility_program(a, b, space).unwrap();
            assert!(cert.check(&program).is_ok());
        }
    }
    let w_plus = entry.representation("W_+").unwrap();
    assert!(w_plus.is_positive(space).unwrap().is_positive());
}

/// `¼(1 + x + y + z)` is smallest at `-(1,1,1)/√3`, where it equals
/// `¼(1 - √3)`.
#[test]
fn qubit_minimum_closed_form() {
    let entry = load("qubit_ball").unwrap();
    let w = entry.representation("W").unwrap();
    let Positivity::Negative(witness) = w.is_positive(entry.theory.state_space()).unwrap() else {
        panic!("the qubit grid has negative entries");
    };
    assert_eq!((witness.row, witness.col), (0, 0));
    let exact = (1.0 - 3f64.sqrt()) / 4.0;
    assert!((witness.minimum.to_f64() - exact).abs() < 1e-15);
    assert_eq!(witness.minimum.rational_part(), &rat(1, 4));
    assert_eq!(witness.minimum.radical_part(), &rat(-1, 4));
    // A coarse scan of the sphere never goes below the closed form.
    let mut lowest = f64::INFINITY;
    for i in 0..=60 {
        for j in 0..120 {
            let (theta, phi) = (std::f64::consts::PI * i as f64 / 60.0, std::f64::consts::PI * j as f64 / 60.0);
            let r = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            lowest = lowest.min((1.0 + r[0] + r[1] + r[2]) / 4.0);
        }
    }
    assert!(lowest >= exact - 1e-12 && lowest < exact + 1e-3);
}

/// Each `φ_ij` exchanges two entries of the grid; the stated state change
/// must reproduce that exchange entry by entry.
#[test]
fn qubit_induced_actions_by_substitution() {
    let entry = load("qubit_ball").unwrap();
    let space = entry.theory.state_space();
    let w = entry.representation("W").unwrap();
    let r = rats(&[(1, 3), (-1, 5), (2, 7)]);
    let cases: [((usize, usize), [i64; 9]); 3] = [
        ((0, 1), [0, -1, 0, -1, 0, 0, 0, 0, 1]),
        ((1, 0), [1, 0, 0, 0, 0, -1, 0, -1, 0]),
        ((1, 1), [0, 0, -1, 0, 1, 0, -1, 0, 0]),
    ];
    for (cell, m) in cases {
        let phi = PhasePointMap::swap(2, 2, (0, 0), cell);
        let moved: Vec<Rational> =
            (0..3).map(|i| (0..3).map(|j| int(m[3 * i + j]) * &r[j]).sum()).collect();
        let swapped = phi.lift().apply(&w.evaluate(space, &r).unwrap());
        assert_eq!(w.evaluate(space, &moved).unwrap(), swapped);
        let action = induced_action(w, space, &phi).unwrap();
        assert_eq!(action.apply(&r), moved);
    }
}

#[test]
fn boxworld_half_symmetries() {
    let entry = load("boxworld").unwrap();
    let space = entry.theory.state_space();
    let w = entry.representation("W_1/2").unwrap();
    let found = enumerate_lifted_symmetries(w, space).unwrap();
    let expect = |p, q| PhasePointMap::swap(2, 2, p, q);
    assert!(found.contains(&expect((1, 0), (0, 1))));
    assert!(found.contains(&expect((0, 0), (1, 1))));
    assert!(!found.contains(&expect((0, 0), (0, 1))));
    for g in &found {
        for h in &found {
            assert!(found.contains(&g.compose(h)));
        }
        assert!(found.contains(&g.inverse().unwrap()));
    }
    // Homomorphism identity on the non-trivial symmetries.
    for g in &found {
        for h in &found {
            let lhs = induced_action(w, space, &g.compose(h)).unwrap();
            let rhs = induced_action(w, space, g).unwrap().compose(&induced_action(w, space, h).unwrap());
            assert!(lhs.agrees_on(&rhs, space));
        }
    }
}

/// The deformed polygon keeps the edge from (0,1) to (1,0), so any point
/// with `x + z > 1` lies outside.
#[test]
fn deformed_polygon_loses_the_z_flip() {
    let entry = load("deformed_12gon").unwrap();
    let space = entry.theory.state_space();
    let flipped = rats(&[(3, 5), (4, 5)]);
    assert!(&flipped[0] + &flipped[1] > Rational::one());
    assert!(!space.contains(&flipped).unwrap());
    let (a, b) = (entry.theory.observable("A").unwrap(), entry.theory.observable("B").unwrap());
    let PermutationChannels::Infeasible(obstruction) = find_permutation_channels(a, b, space, &[]).unwrap() else {
        panic!("the A swap has no channel");
    };
    assert_eq!(obstruction.element.g1, vec![1, 0]);
    assert_eq!(obstruction.witness, Some((rats(&[(3, 5), (-4, 5)]), flipped)));
    let program = wignerlab_core::theory::channel_program(
        space,
        space,
        &wignerlab_core::symmetry::permutation_equations(a, b, &obstruction.element),
    )
    .unwrap();
    assert!(obstruction.certificate.check(&program).is_ok());
    let report = solve_covariant(a, b, space, &[]).unwrap();
    assert!(report.hypotheses.all_hold());
    assert!(matches!(report.outcome, CovariantOutcome::None(Obstruction::Channel(_))));
}

/// The rotation sends `s_1 ↦ s_2` and `s_2 ↦ s_0`; W agrees on `s_1` and
/// `s_2` but not on their images.
#[test]
fn trit_rotation_collapses() {
    let entry = load("trit").unwrap();
    let space = entry.theory.state_space();
    let w = entry.representation("W").unwrap();
    let (s0, s1, s2) = (ints(&[1, 0]), ints(&[0, 1]), ints(&[0, 0]));
    assert_eq!(w.evaluate(space, &s1).unwrap(), w.evaluate(space, &s2).unwrap());
    assert_ne!(w.evaluate(space, &s2).unwrap(), w.evaluate(space, &s0).unwrap());
}

#[test]
fn cube_ranks() {
    let entry = load("cube").unwrap();
    let space = entry.theory.state_space();
    assert_eq!(entry.representation("W_0").unwrap().representation_rank(space), 3);
    assert_eq!(entry.representation("W_z").unwrap().representation_rank(space), 4);
    let w0 = entry.representation("W_0").unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(
                w0.evaluate(space, &ints(&[i, j, 0])).unwrap(),
                w0.evaluate(space, &ints(&[i, j, 1])).unwrap()
            );
        }
    }
}

#[test]
fn qubit_xz_grid_is_covariant_under_reflections() {
    let entry = load("qubit_xz").unwrap();
    let space = entry.theory.state_space();
    let w = entry.representation("W").unwrap();
    let r = rats(&[(2, 5), (-1, 3)]);
    let here = w.evaluate(space, &r).unwrap();
    // Flipping z swaps the rows, flipping x swaps the columns.
    let z_flip = w.evaluate(space, &[r[0].clone(), -r[1].clone()]).unwrap();
    let x_flip = w.evaluate(space, &[-r[0].clone(), r[1].clone()]).unwrap();
    assert_eq!(z_flip.to_rows(), vec![here.to_rows()[1].clone(), here.to_rows()[0].clone()]);
    let swapped_cols: Vec<Vec<Rational>> = here.to_rows().iter().map(|row| vec![row[1].clone(), row[0].clone()]).collect();
    assert_eq!(x_flip.to_rows(), swapped_cols);
    assert!(solve_covariant(
        entry.theory.observable("A").unwrap(),
        entry.theory.observable("B").unwrap(),
        space,
        &[]
    )
    .is_err());
}

#[test]
fn catalog_replays() {
    for name in wignerlab_core::catalog::ENTRY_NAMES {
        let entry = load(name).unwrap();
        for r in entry.replay().unwrap() {
            assert!(r.passed, "{name}: {} {:?}", r.description, r.detail);
        }
    }
}
