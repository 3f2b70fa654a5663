//! Acceptance criteria. Runs without the test harness, prints one PASS or
//! FAIL line per criterion and exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_traits::One;
use serde_json::Value;

use wignerlab_core::catalog::{load, CatalogEntry};
use wignerlab_core::exact::{int, ints, rat, rats, Rational};
use wignerlab_core::geometry::{hull_membership, AffineFunctional};
use wignerlab_core::symmetry::{
    enumerate_lifted_symmetries, induced_action, is_g_symmetric, is_lifted_symmetry, permutation_equations,
    solve_covariant, CovariantOutcome, GridMapSearch, Obstruction, PhasePointMap, SymmetryCheck,
};
use wignerlab_core::theory::{are_compatible, channel_program, compatibility_program, Channel, Compatibility, Observable};
use wignerlab_core::wigner::{find_positive_member, positive_member_program, Anchor, Positivity, PositiveSearch, WignerRep};

#[allow(dead_code)]
#[path = "../../core/tests/suites/mod.rs"]
mod suites;

type Outcome = Result<(), String>;
type Named<T> = (&'static str, T);
type Grid = [[(i64, i64); 2]; 2];

fn ensure(ok: bool, what: &str) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn entry(name: &str) -> CatalogEntry {
    load(name).unwrap()
}

fn observables<'a>(e: &'a CatalogEntry, a: &str, b: &str) -> (&'a Observable, &'a Observable) {
    (e.theory.observable(a).unwrap(), e.theory.observable(b).unwrap())
}

fn grid(rows: &Grid) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| rats(r)).collect()
}

fn f(linear: &[(i64, i64)], constant: (i64, i64)) -> AffineFunctional {
    AffineFunctional::new(rats(linear), rat(constant.0, constant.1))
}

/// The twelve Boxworld grids at `s_00, s_01, s_10, s_11`.
fn boxworld_matrices() -> Outcome {
    let e = entry("boxworld");
    let space = e.theory.state_space();
    let z = (0, 1);
    let one = (1, 1);
    let h = (1, 2);
    let mh = (-1, 2);
    let expected: [Named<[Grid; 4]>; 3] = [
        (
            "W_0",
            [[[z, z], [z, one]], [[z, z], [one, z]], [[z, one], [z, z]], [[z, one], [one, (-1, 1)]]],
        ),
        ("W_1/2", [[[z, z], [z, one]], [[h, mh], [h, h]], [[h, h], [mh, h]], [[one, z], [z, z]]]),
        ("W_+", [[[z, z], [z, one]], [[z, z], [h, h]], [[z, h], [z, h]], [[z, h], [h, z]]]),
    ];
    let states = [ints(&[0, 0]), ints(&[0, 1]), ints(&[1, 0]), ints(&[1, 1])];
    for (name, grids) in expected {
        let w = e.representation(name).map_err(|err| err.to_string())?;
        for (s, g) in states.iter().zip(&grids) {
            let got = w.evaluate(space, s).map_err(|err| err.to_string())?.to_rows();
            ensure(got == grid(g), &format!("{name} at {s:?}: got {got:?}"))?;
        }
    }
    Ok(())
}

fn compatibility_iff_positive() -> Outcome {
    let e = entry("boxworld");
    let space = e.theory.state_space();
    let (a, b) = observables(&e, "A", "B");
    let Compatibility::Incompatible(cert) = are_compatible(a, b, space).unwrap() else {
        return Err("A and B reported compatible".into());
    };
    ensure(cert.check(&compatibility_program(a, b, space).unwrap()).is_ok(), "incompatibility certificate")?;
    let PositiveSearch::Infeasible(cert) = find_positive_member(a, b, space, Anchor::last(a, b)).unwrap() else {
        return Err("a positive member was found for A, B".into());
    };
    let program = positive_member_program(a, b, space, Anchor::last(a, b)).unwrap();
    ensure(cert.check(&program).is_ok(), "positive-member certificate")?;
    let (c, d) = observables(&e, "C", "D");
    ensure(are_compatible(c, d, space).unwrap().is_compatible(), "C and D incompatible")?;
    ensure(
        matches!(find_positive_member(c, d, space, Anchor::last(c, d)).unwrap(), PositiveSearch::Found(_)),
        "no positive member for C, D",
    )?;
    ensure(e.representation("W_+").unwrap().is_positive(space).unwrap().is_positive(), "W_+ not positive")
}

fn symmetry_tables() -> Outcome {
    let e = entry("boxworld");
    let space = e.theory.state_space();
    let swap = |p, q| PhasePointMap::swap(2, 2, p, q);
    let w0 = e.representation("W_0").unwrap();
    let found = enumerate_lifted_symmetries(w0, space).unwrap();
    ensure(found == vec![PhasePointMap::identity(2, 2), swap((1, 0), (0, 1))], "W_0 symmetry list")?;
    let half = e.representation("W_1/2").unwrap();
    for good in [swap((1, 0), (0, 1)), swap((0, 0), (1, 1))] {
        ensure(is_lifted_symmetry(half, space, &good).unwrap().holds(), &format!("{good} should hold"))?;
    }
    let bad = swap((0, 0), (0, 1));
    let SymmetryCheck::Violated { image, .. } = is_lifted_symmetry(half, space, &bad).unwrap() else {
        return Err("(00 01) reported as a symmetry".into());
    };
    let outside = grid(&[[(-1, 2), (1, 2)], [(1, 2), (1, 2)]]);
    ensure(image.to_rows() == outside, &format!("non-member grid {:?}", image.to_rows()))?;
    let vertex_images = half.images(space.vertices().unwrap());
    let flat: Vec<Rational> = outside.concat();
    ensure(!hull_membership(&vertex_images, &flat).is_feasible(), "the grid lies in the image")
}

fn qubit_ball() -> Outcome {
    let e = entry("qubit_ball");
    let space = e.theory.state_space();
    let w = e.representation("W").unwrap();
    // Cell (a, b) is ¼(1 + sx x + sy y + sz z).
    let q = (1, 4);
    let expected = [
        f(&[(1, 4), (1, 4), (1, 4)], q),
        f(&[(-1, 4), (-1, 4), (1, 4)], q),
        f(&[(1, 4), (-1, 4), (-1, 4)], q),
        f(&[(-1, 4), (1, 4), (-1, 4)], q),
    ];
    ensure(w.grid() == expected, "grid differs from the qubit operators")?;
    // Pauli recovery: sums of cells give x, y and z.
    let combine = |signs: [i64; 4]| {
        AffineFunctional::sum(3, w.grid().iter().zip(signs).map(|(c, s)| c.scaled(&int(s))).collect::<Vec<_>>().iter())
    };
    ensure(combine([1, -1, 1, -1]) == AffineFunctional::coordinate(3, 0), "x recovery")?;
    ensure(combine([1, -1, -1, 1]) == AffineFunctional::coordinate(3, 1), "y recovery")?;
    ensure(combine([1, 1, -1, -1]) == AffineFunctional::coordinate(3, 2), "z recovery")?;
    ensure(w.representation_rank(space) == 4 && w.is_faithful(space), "faithfulness")?;
    let Positivity::Negative(neg) = w.is_positive(space).unwrap() else {
        return Err("W reported positive".into());
    };
    ensure((neg.row, neg.col) == (0, 0), "negative entry position")?;
    ensure(
        neg.minimum.rational_part() == &rat(1, 4) && neg.minimum.radical_part() == &rat(-1, 4) && *neg.minimum.radicand() == 3.into(),
        &format!("minimum {}", neg.minimum),
    )?;
    let swaps = [
        (PhasePointMap::swap(2, 2, (0, 0), (0, 1)), [[0, -1, 0], [-1, 0, 0], [0, 0, 1]]),
        (PhasePointMap::swap(2, 2, (0, 0), (1, 0)), [[1, 0, 0], [0, 0, -1], [0, -1, 0]]),
        (PhasePointMap::swap(2, 2, (0, 0), (1, 1)), [[0, 0, -1], [0, 1, 0], [-1, 0, 0]]),
    ];
    let generators: Vec<PhasePointMap> = swaps.iter().map(|(g, _)| g.clone()).collect();
    ensure(is_g_symmetric(w, space, &generators).unwrap().holds(), "G4 symmetry")?;
    let r = rats(&[(1, 3), (-1, 5), (2, 7)]);
    let basis = [ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1]), r];
    for (g, m) in swaps {
        let action = induced_action(w, space, &g).unwrap();
        for v in &basis {
            let want: Vec<Rational> = m.iter().map(|row| row.iter().zip(v).map(|(c, x)| int(*c) * x).sum()).collect();
            ensure(action.apply(v) == want, &format!("induced action of {g}"))?;
        }
    }
    Ok(())
}

fn covariant_uniqueness() -> Outcome {
    let xz = entry("qubit_xz");
    let (a, b) = observables(&xz, "A", "B");
    let report = solve_covariant(a, b, xz.theory.state_space(), &xz.channels).unwrap();
    let CovariantOutcome::Unique { rep, .. } = report.outcome else {
        return Err("qubit_xz: no unique solution".into());
    };
    let q = (1, 4);
    let expected = [
        f(&[(1, 4), (1, 4)], q),
        f(&[(-1, 4), (1, 4)], q),
        f(&[(1, 4), (-1, 4)], q),
        f(&[(-1, 4), (-1, 4)], q),
    ];
    ensure(rep.grid() == expected, "qubit_xz grid")?;

    let diamond = entry("rebit_diamond");
    let (a, b) = observables(&diamond, "A", "B");
    let report = solve_covariant(a, b, diamond.theory.state_space(), &[]).unwrap();
    ensure(report.hypotheses.all_hold(), "rebit_diamond hypotheses")?;
    ensure(matches!(report.outcome, CovariantOutcome::Unique { .. }), "rebit_diamond not unique")?;

    let boxworld = entry("boxworld");
    let space = boxworld.theory.state_space();
    let (a, b) = observables(&boxworld, "A", "B");
    let CovariantOutcome::Unique { rep, .. } = solve_covariant(a, b, space, &[]).unwrap().outcome else {
        return Err("boxworld: no unique solution".into());
    };
    let oracle = boxworld_brute_force();
    ensure(oracle == vec![(rat(1, 2), rat(1, 2), rat(-1, 4))], &format!("brute force found {oracle:?}"))?;
    ensure(rep.entry(0, 0) == &f(&[(1, 2), (1, 2)], (-1, 4)), "boxworld q")?;

    let deformed = entry("deformed_12gon");
    let space = deformed.theory.state_space();
    let (a, b) = observables(&deformed, "A", "B");
    let CovariantOutcome::None(Obstruction::Channel(o)) = solve_covariant(a, b, space, &[]).unwrap().outcome else {
        return Err("deformed_12gon: expected no channel".into());
    };
    let program = channel_program(space, space, &permutation_equations(a, b, &o.element)).unwrap();
    ensure(o.certificate.check(&program).is_ok(), "deformed certificate")
}

/// `q = αx + βy + γ` over quarters in `[-2, 2]`, keeping the choices whose
/// grids permute like the cells under both outcome swaps.
fn boxworld_brute_force() -> Vec<(Rational, Rational, Rational)> {
    let cells = |q: Rational, x: &Rational, y: &Rational| [q.clone(), x - &q, y - &q, Rational::one() + &q - x - y];
    let range: Vec<Rational> = (-8..=8).map(|n| rat(n, 4)).collect();
    let mut found = Vec::new();
    for al in &range {
        for be in &range {
            for ga in &range {
                let q = |x: &Rational, y: &Rational| al * x + be * y + ga;
                let ok = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().all(|&(i, j)| {
                    let (x, y) = (int(i), int(j));
                    let (fx, fy) = (Rational::one() - &x, Rational::one() - &y);
                    let here = cells(q(&x, &y), &x, &y);
                    let sa = cells(q(&fx, &y), &fx, &y);
                    let sb = cells(q(&x, &fy), &x, &fy);
                    sa == [here[2].clone(), here[3].clone(), here[0].clone(), here[1].clone()]
                        && sb == [here[1].clone(), here[0].clone(), here[3].clone(), here[2].clone()]
                });
                if ok {
                    found.push((al.clone(), be.clone(), ga.clone()));
                }
            }
        }
    }
    found
}

fn cube_and_trit() -> Outcome {
    let cube = entry("cube");
    let space = cube.theory.state_space();
    let rank = |n: &str| cube.representation(n).unwrap().representation_rank(space);
    ensure(rank("W_z") == 4 && rank("W_0") == 3, "cube ranks")?;
    let trit = entry("trit");
    let space = trit.theory.state_space();
    let w: &WignerRep = trit.representation("W").unwrap();
    let map = wignerlab_core::geometry::AffineMap::new(
        wignerlab_core::exact::RationalMatrix::from_rows(2, &[ints(&[-1, -1]), ints(&[1, 0])]),
        ints(&[1, 0]),
    )
    .unwrap();
    let rotation = Channel::new(space, map, space).unwrap();
    match wignerlab_core::symmetry::find_symmetry_for_channel(w, space, &rotation).unwrap() {
        GridMapSearch::Collapsed { first, second } => {
            ensure(first == ints(&[0, 1]) && second == ints(&[0, 0]), "witness pair is not (s_1, s_2)")
        }
        GridMapSearch::Found(_) => Err("a transported symmetry was found".into()),
    }
}

fn property_suites() -> Outcome {
    let runs: [Named<fn() -> suites::Outcome>; 5] = [
        ("marginals", suites::family_members_have_the_right_marginals),
        ("faithful iff info-complete", suites::all_members_faithful_iff_info_complete),
        ("symmetries transported", suites::symmetries_of_faithful_reps_are_transported),
        ("induced-action homomorphism", suites::induced_action_is_a_homomorphism),
        ("free-parameter count", suites::free_parameter_count),
    ];
    for (name, run) in runs {
        run().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["wignerlab"];
    full.extend_from_slice(args);
    let code = wignerlab::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

/// Exports an entry, runs `command` with `FILE` standing for the theory
/// file, and replays the report; every infeasibility
/// claim must be checked without rerunning a solver.
fn replay(dir: &Path, name: &str, command: &[&str], infeasible: &[&str]) -> Outcome {
    let theory = dir.join(format!("{name}.json"));
    let theory = theory.to_str().unwrap();
    ensure(cli(&["example", name, "--out", theory]).0 == 0, "export")?;
    let mut args = vec!["--format", "json"];
    args.extend(command.iter().map(|a| if *a == "FILE" { theory } else { a }));
    let (_, text) = cli(&args);
    let report: Value = serde_json::from_str(&text).map_err(|e| format!("{name}: {e}"))?;
    let kinds: Vec<&str> = report["claims"].as_array().unwrap().iter().map(|c| c["claim"].as_str().unwrap()).collect();
    for k in infeasible {
        ensure(kinds.contains(k), &format!("{name}: no {k} claim"))?;
    }
    let path = dir.join(format!("{name}-{}.report.json", command[0]));
    std::fs::write(&path, &text).unwrap();
    let (code, verified) = cli(&["--format", "json", "verify", theory, path.to_str().unwrap()]);
    ensure(code == 0, &format!("{name}: verify exited {code}: {verified}"))?;
    let rows: Vec<Value> = serde_json::from_str(&verified).unwrap();
    for (kind, row) in kinds.iter().zip(&rows) {
        if infeasible.contains(kind) {
            ensure(row["status"] == "checked", &format!("{name}: {kind} was {}", row["status"]))?;
        }
    }
    Ok(())
}

fn certificates_verify() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    replay(dir.path(), "boxworld", &["analyze", "FILE"], &["incompatible"])?;
    replay(dir.path(), "boxworld", &["wigner", "FILE", "--positive"], &["no_positive_member"])?;
    replay(dir.path(), "deformed_12gon", &["covariant", "FILE"], &["covariant_no_channel"])
}

fn main() {
    let criteria: [Named<fn() -> Outcome>; 8] = [
        ("boxworld exact matrices", boxworld_matrices),
        ("compatibility iff positive representation", compatibility_iff_positive),
        ("symmetry tables", symmetry_tables),
        ("qubit ball faithful, negative, G4-symmetric", qubit_ball),
        ("covariant uniqueness", covariant_uniqueness),
        ("cube ranks and trit collapse", cube_and_trit),
        ("property suites", property_suites),
        ("certificates re-verify", certificates_verify),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(()) => println!("criterion {}: PASS {name}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    if !failures.is_empty() {
        println!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
