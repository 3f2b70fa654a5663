//! Built-in example theories with their representations and the results
//! expected of them. Each expectation can be replayed against the engine.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, ints, rat, rats, Rational, RationalMatrix};
use crate::geometry::{AffineFunctional, AffineMap, ExtremalValue, StateSpace};
use crate::symmetry::{
    enumerate_lifted_symmetries, find_permutation_channels, find_symmetry_for_channel, induced_action,
    is_g_symmetric, is_lifted_symmetry, solve_covariant, CovariantOutcome, GridMapSearch, Obstruction,
    PermutationChannels, PhasePointMap, ProductGroupElement, SuppliedChannel, SymmetryCheck,
};
use crate::theory::{are_compatible, are_complementary, is_surjective, jointly_info_complete, Channel, Observable, Theory};
use crate::wigner::{construct_family, degenerate_rep, Anchor, Positivity, SignedGrid, WignerRep};

/// Names accepted by [`load`].
pub const ENTRY_NAMES: [&str; 7] = [
    "cube",
    "trit",
    "boxworld",
    "qubit_ball",
    "qubit_xz",
    "rebit_diamond",
    "deformed_12gon",
];

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Stated in the published worked example.
    Stated,
    /// Worked out independently (by hand or brute force).
    Computed,
    /// Follows immediately from the definitions.
    Immediate,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Stated => "stated",
            Origin::Computed => "computed",
            Origin::Immediate => "immediate",
        })
    }
}

/// A result the engine must reproduce. Observables and representations are
/// referred to by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Grid { rep: String, point: Vec<Rational>, grid: SignedGrid },
    Entry { rep: String, a: usize, b: usize, functional: AffineFunctional },
    Rank { rep: String, rank: usize, faithful: bool },
    Positive { rep: String, positive: bool },
    /// Minimum over the space of entry `(a, b)`, for a non-positive rep.
    Minimum { rep: String, a: usize, b: usize, value: ExtremalValue },
    Compatible { a: String, b: String, compatible: bool },
    InfoComplete { a: String, b: String, holds: bool },
    Complementary { a: String, b: String, holds: bool },
    Surjective { observable: String, holds: bool },
    Contains { point: Vec<Rational>, holds: bool },
    /// The exact list of lifted symmetries, in enumeration order.
    LiftedSymmetries { rep: String, maps: Vec<PhasePointMap> },
    LiftedSymmetry { rep: String, map: PhasePointMap, holds: bool, image: Option<SignedGrid> },
    GroupSymmetric { rep: String, generators: Vec<PhasePointMap>, holds: bool },
    InducedAction { rep: String, map: PhasePointMap, action: AffineMap },
    /// No grid map transports `channel`; the collapsed pair is given.
    NoTransportedSymmetry { rep: String, channel: AffineMap, first: Vec<Rational>, second: Vec<Rational> },
    CovariantUnique { a: String, b: String, grid: Vec<AffineFunctional> },
    /// Stage-1 failure at `element` with a vertex sent to `image`.
    CovariantNone { a: String, b: String, element: ProductGroupElement, point: Vec<Rational>, image: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub description: String,
    pub origin: Origin,
    pub check: Check,
}

/// Result of replaying one expectation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub description: String,
    pub passed: bool,
    /// What the engine produced when it disagreed.
    pub detail: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub theory: Theory,
    pub representations: Vec<(String, WignerRep)>,
    /// Permutation channels handed to the covariant solver (needed on balls).
    pub channels: Vec<SuppliedChannel>,
    pub expected: Vec<Expectation>,
    pub notes: Vec<String>,
}

impl CatalogEntry {
    pub fn representation(&self, name: &str) -> Result<&WignerRep> {
        self.representations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| w)
            .ok_or_else(|| Error::UnknownEntry(format!("representation {name}")))
    }

    fn observable(&self, name: &str) -> Result<&Observable> {
        self.theory.observable(name)
    }

    fn space(&self) -> &StateSpace {
        self.theory.state_space()
    }

    /// Re-runs every expectation against the engine.
    pub fn replay(&self) -> Result<Vec<Replay>> {
        self.expected.iter().map(|e| self.replay_one(e)).collect()
    }

    fn replay_one(&self, e: &Expectation) -> Result<Replay> {
        let space = self.space();
        let mismatch: Option<String> = match &e.check {
            Check::Grid { rep, point, grid } => {
                let got = self.representation(rep)?.evaluate(space, point)?;
                (got != *grid).then(|| format!("grid {got}"))
            }
            Check::Entry { rep, a, b, functional } => {
                let got = self.representation(rep)?.entry(*a, *b);
                (got != functional).then(|| format!("entry {got}"))
            }
            Check::Rank { rep, rank, faithful } => {
                let w = self.representation(rep)?;
                let (r, f) = (w.representation_rank(space), w.is_faithful(space));
                (r != *rank || f != *faithful).then(|| format!("rank {r}, faithful {f}"))
            }
            Check::Positive { rep, positive } => {
                let got = self.representation(rep)?.is_positive(space)?.is_positive();
                (got != *positive).then(|| format!("positive {got}"))
            }
            Check::Minimum { rep, a, b, value } => match self.representation(rep)?.is_positive(space)? {
                Positivity::Negative(w) if w.row == *a && w.col == *b && w.minimum == *value => None,
                Positivity::Negative(w) => Some(format!("entry ({}, {}) minimum {}", w.row, w.col, w.minimum)),
                Positivity::Positive => Some("positive".into()),
            },
            Check::Compatible { a, b, compatible } => {
                let got = are_compatible(self.observable(a)?, self.observable(b)?, space)?.is_compatible();
                (got != *compatible).then(|| format!("compatible {got}"))
            }
            Check::InfoComplete { a, b, holds } => {
                let got = jointly_info_complete(self.observable(a)?, self.observable(b)?, space);
                (got != *holds).then(|| format!("info-complete {got}"))
            }
            Check::Complementary { a, b, holds } => {
                let got = are_complementary(self.observable(a)?, self.observable(b)?, space)?.is_none();
                (got != *holds).then(|| format!("complementary {got}"))
            }
            Check::Surjective { observable, holds } => {
                let got = is_surjective(self.observable(observable)?, space)?.is_surjective();
                (got != *holds).then(|| format!("surjective {got}"))
            }
            Check::Contains { point, holds } => {
                let got = space.contains(point)?;
                (got != *holds).then(|| format!("contains {got}"))
            }
            Check::LiftedSymmetries { rep, maps } => {
                let got = enumerate_lifted_symmetries(self.representation(rep)?, space)?;
                (got != *maps).then(|| format!("symmetries {}", got.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
            }
            Check::LiftedSymmetry { rep, map, holds, image } => {
                let got = is_lifted_symmetry(self.representation(rep)?, space, map)?;
                let got_image = match &got {
                    SymmetryCheck::Violated { image, .. } => Some(image.clone()),
                    SymmetryCheck::Symmetry => None,
                };
                let image_ok = image.is_none() || *image == got_image;
                (got.holds() != *holds || !image_ok).then(|| format!("{got:?}"))
            }
            Check::GroupSymmetric { rep, generators, holds } => {
                let got = is_g_symmetric(self.representation(rep)?, space, generators)?;
                (got.holds() != *holds).then(|| format!("symmetric {}", got.holds()))
            }
            Check::InducedAction { rep, map, action } => {
                let got = induced_action(self.representation(rep)?, space, map)?;
                let expected = Channel::new(space, action.clone(), space)?;
                (!got.agrees_on(&expected, space)).then(|| format!("action {}", got.map()))
            }
            Check::NoTransportedSymmetry { rep, channel, first, second } => {
                let channel = Channel::new(space, channel.clone(), space)?;
                match find_symmetry_for_channel(self.representation(rep)?, space, &channel)? {
                    GridMapSearch::Collapsed { first: f, second: s } if f == *first && s == *second => None,
                    other => Some(format!("{other:?}")),
                }
            }
            Check::CovariantUnique { a, b, grid } => {
                let report = solve_covariant(self.observable(a)?, self.observable(b)?, space, &self.channels)?;
                match report.outcome {
                    CovariantOutcome::Unique { rep, symmetric: true } if rep.grid() == grid.as_slice() => None,
                    other => Some(format!("{other:?}")),
                }
            }
            Check::CovariantNone { a, b, element, point, image } => {
                let report = solve_covariant(self.observable(a)?, self.observable(b)?, space, &self.channels)?;
                match report.outcome {
                    CovariantOutcome::None(Obstruction::Channel(o))
                        if o.element == *element && o.witness.as_ref() == Some(&(point.clone(), image.clone())) =>
                    {
                        None
                    }
                    other => Some(format!("{other:?}")),
                }
            }
        };
        Ok(Replay {
            description: e.description.clone(),
            passed: mismatch.is_none(),
            detail: mismatch,
        })
    }
}

/// Loads a built-in entry by name.
pub fn load(name: &str) -> Result<CatalogEntry> {
    match name {
        "cube" => cube(),
        "trit" => trit(),
        "boxworld" => boxworld(),
        "qubit_ball" => qubit_ball(),
        "qubit_xz" => qubit_xz(),
        "rebit_diamond" => rebit_diamond(),
        "deformed_12gon" => deformed_polygon(),
        other => Err(Error::UnknownEntry(other.to_string())),
    }
}

fn expect(description: &str, origin: Origin, check: Check) -> Expectation {
    Expectation {
        description: description.to_string(),
        origin,
        check,
    }
}

fn grid(rows: &[&[(i64, i64)]]) -> SignedGrid {
    let rows: Vec<Vec<Rational>> = rows.iter().map(|r| rats(r)).collect();
    SignedGrid::from_rows(&rows).expect("rectangular")
}

fn functional(linear: &[(i64, i64)], constant: (i64, i64)) -> AffineFunctional {
    AffineFunctional::new(rats(linear), rat(constant.0, constant.1))
}

fn swap(p: (usize, usize), q: (usize, usize)) -> PhasePointMap {
    PhasePointMap::swap(2, 2, p, q)
}

fn cube() -> Result<CatalogEntry> {
    let mut vertices = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                vertices.push(ints(&[i, j, k]));
            }
        }
    }
    let space = StateSpace::polytope(vertices)?;
    let a = Observable::binary("A", AffineFunctional::coordinate(3, 0));
    let b = Observable::binary("B", AffineFunctional::coordinate(3, 1));
    let anchor = Anchor::last(&a, &b);
    let w0 = degenerate_rep(&a, &b, anchor)?;
    let wz = construct_family(&a, &b, anchor, &[AffineFunctional::coordinate(3, 2)])?;
    let expected = vec![
        expect(
            "W_0 does not separate s_ij0 from s_ij1",
            Origin::Stated,
            Check::Rank { rep: "W_0".into(), rank: 3, faithful: false },
        ),
        expect(
            "W_z separates all states",
            Origin::Stated,
            Check::Rank { rep: "W_z".into(), rank: 4, faithful: true },
        ),
        expect(
            "A and B are not jointly info-complete",
            Origin::Immediate,
            Check::InfoComplete { a: "A".into(), b: "B".into(), holds: false },
        ),
        expect(
            "W_0 at s_001 equals W_0 at s_000",
            Origin::Stated,
            Check::Grid { rep: "W_0".into(), point: ints(&[0, 0, 1]), grid: grid(&[&[(0, 1), (0, 1)], &[(0, 1), (1, 1)]]) },
        ),
    ];
    Ok(CatalogEntry {
        name: "cube".into(),
        summary: "unit cube with the x and y coordinate observables".into(),
        theory: Theory::new(space, vec![a, b])?,
        representations: vec![("W_0".into(), w0), ("W_z".into(), wz)],
        channels: Vec::new(),
        expected,
        notes: Vec::new(),
    })
}

fn trit() -> Result<CatalogEntry> {
    // s_0, s_1, s_2 with f(s_0) = 1.
    let space = StateSpace::polytope(vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[0, 0])])?;
    let a = Observable::binary("A", AffineFunctional::coordinate(2, 0));
    let t = Observable::trivial("T", 2);
    let w = degenerate_rep(&a, &t, Anchor::last(&a, &t))?;
    // s_0 -> s_1 -> s_2 -> s_0, i.e. (x, y) -> (1 - x - y, x).
    let rotation = AffineMap::new(
        RationalMatrix::from_rows(2, &[ints(&[-1, -1]), ints(&[1, 0])]),
        ints(&[1, 0]),
    )?;
    let expected = vec![
        expect(
            "the rotation channel has no transported symmetry",
            Origin::Stated,
            Check::NoTransportedSymmetry {
                rep: "W".into(),
                channel: rotation,
                first: ints(&[0, 1]),
                second: ints(&[0, 0]),
            },
        ),
        expect(
            "W is not faithful",
            Origin::Immediate,
            Check::Rank { rep: "W".into(), rank: 2, faithful: false },
        ),
    ];
    Ok(CatalogEntry {
        name: "trit".into(),
        summary: "triangle with a two-outcome observable certain only at s_0".into(),
        theory: Theory::new(space, vec![a, t])?,
        representations: vec![("W".into(), w)],
        channels: Vec::new(),
        expected,
        notes: vec!["the second observable T has a single certain outcome, so W is the statistics of A".into()],
    })
}

fn boxworld() -> Result<CatalogEntry> {
    let space = StateSpace::polytope(vec![ints(&[0, 0]), ints(&[0, 1]), ints(&[1, 0]), ints(&[1, 1])])?;
    let fx = AffineFunctional::coordinate(2, 0);
    let fy = AffineFunctional::coordinate(2, 1);
    let half = rat(1, 2);
    let a = Observable::binary("A", fx.clone());
    let b = Observable::binary("B", fy.clone());
    let c = Observable::binary("C", fx.scaled(&half));
    let d = Observable::binary("D", fy.scaled(&half));
    let w0 = degenerate_rep(&a, &b, Anchor::last(&a, &b))?;
    let w_half = construct_family(&a, &b, Anchor::last(&a, &b), &[&fx.scaled(&half) + &fy.scaled(&half)])?;
    let w_plus = degenerate_rep(&c, &d, Anchor::last(&c, &d))?;
    let s = |i: i64, j: i64| ints(&[i, j]);
    let g = |rep: &str, point: Vec<Rational>, value: SignedGrid| Check::Grid { rep: rep.into(), point, grid: value };
    let mut expected = vec![
        expect("W_0(s_00)", Origin::Stated, g("W_0", s(0, 0), grid(&[&[(0, 1), (0, 1)], &[(0, 1), (1, 1)]]))),
        expect("W_0(s_01)", Origin::Stated, g("W_0", s(0, 1), grid(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)]]))),
        expect("W_0(s_10)", Origin::Stated, g("W_0", s(1, 0), grid(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]))),
        expect("W_0(s_11)", Origin::Stated, g("W_0", s(1, 1), grid(&[&[(0, 1), (1, 1)], &[(1, 1), (-1, 1)]]))),
        expect("W_1/2(s_00)", Origin::Stated, g("W_1/2", s(0, 0), grid(&[&[(0, 1), (0, 1)], &[(0, 1), (1, 1)]]))),
        expect("W_1/2(s_01)", Origin::Stated, g("W_1/2", s(0, 1), grid(&[&[(1, 2), (-1, 2)], &[(1, 2), (1, 2)]]))),
        expect("W_1/2(s_10)", Origin::Stated, g("W_1/2", s(1, 0), grid(&[&[(1, 2), (1, 2)], &[(-1, 2), (1, 2)]]))),
        expect("W_1/2(s_11)", Origin::Stated, g("W_1/2", s(1, 1), grid(&[&[(1, 1), (0, 1)], &[(0, 1), (0, 1)]]))),
        expect("W_+(s_00)", Origin::Stated, g("W_+", s(0, 0), grid(&[&[(0, 1), (0, 1)], &[(0, 1), (1, 1)]]))),
        expect("W_+(s_01)", Origin::Stated, g("W_+", s(0, 1), grid(&[&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]]))),
        expect("W_+(s_10)", Origin::Stated, g("W_+", s(1, 0), grid(&[&[(0, 1), (1, 2)], &[(0, 1), (1, 2)]]))),
        expect("W_+(s_11)", Origin::Stated, g("W_+", s(1, 1), grid(&[&[(0, 1), (1, 2)], &[(1, 2), (0, 1)]]))),
    ];
    expected.extend([
        expect(
            "A and B are incompatible",
            Origin::Stated,
            Check::Compatible { a: "A".into(), b: "B".into(), compatible: false },
        ),
        expect(
            "C and D are compatible",
            Origin::Computed,
            Check::Compatible { a: "C".into(), b: "D".into(), compatible: true },
        ),
        expect("W_0 is not positive", Origin::Stated, Check::Positive { rep: "W_0".into(), positive: false }),
        expect("W_+ is positive", Origin::Stated, Check::Positive { rep: "W_+".into(), positive: true }),
        expect(
            "A and B are jointly info-complete",
            Origin::Stated,
            Check::InfoComplete { a: "A".into(), b: "B".into(), holds: true },
        ),
        expect(
            "A and B are not complementary",
            Origin::Stated,
            Check::Complementary { a: "A".into(), b: "B".into(), holds: false },
        ),
        expect("A is surjective", Origin::Immediate, Check::Surjective { observable: "A".into(), holds: true }),
        expect("B is surjective", Origin::Immediate, Check::Surjective { observable: "B".into(), holds: true }),
        expect("W_0 is faithful", Origin::Stated, Check::Rank { rep: "W_0".into(), rank: 3, faithful: true }),
        expect(
            "the only nontrivial lifted symmetry of W_0 swaps 10 and 01",
            Origin::Stated,
            Check::LiftedSymmetries {
                rep: "W_0".into(),
                maps: vec![PhasePointMap::identity(2, 2), swap((0, 1), (1, 0))],
            },
        ),
        expect(
            "swapping 10 and 01 is a symmetry of W_1/2",
            Origin::Stated,
            Check::LiftedSymmetry { rep: "W_1/2".into(), map: swap((1, 0), (0, 1)), holds: true, image: None },
        ),
        expect(
            "swapping 00 and 11 is a symmetry of W_1/2",
            Origin::Stated,
            Check::LiftedSymmetry { rep: "W_1/2".into(), map: swap((0, 0), (1, 1)), holds: true, image: None },
        ),
        expect(
            "swapping 00 and 01 sends W_1/2(s_01) outside W_1/2(S)",
            Origin::Stated,
            Check::LiftedSymmetry {
                rep: "W_1/2".into(),
                map: swap((0, 0), (0, 1)),
                holds: false,
                image: Some(grid(&[&[(-1, 2), (1, 2)], &[(1, 2), (1, 2)]])),
            },
        ),
        expect(
            "W_0 is not symmetric under all phase point permutations",
            Origin::Stated,
            Check::GroupSymmetric {
                rep: "W_0".into(),
                generators: vec![swap((0, 0), (0, 1)), swap((0, 0), (1, 0)), swap((0, 0), (1, 1))],
                holds: false,
            },
        ),
        expect(
            "the induced action of 00<->11 on W_1/2 swaps s_00 and s_11",
            Origin::Computed,
            Check::InducedAction {
                rep: "W_1/2".into(),
                map: swap((0, 0), (1, 1)),
                action: AffineMap::new(RationalMatrix::from_rows(2, &[ints(&[0, -1]), ints(&[-1, 0])]), ints(&[1, 1]))?,
            },
        ),
        expect(
            "the covariant representation has q = (2 f_x + 2 f_y - 1)/4",
            Origin::Computed,
            Check::CovariantUnique {
                a: "A".into(),
                b: "B".into(),
                grid: vec![
                    functional(&[(1, 2), (1, 2)], (-1, 4)),
                    functional(&[(1, 2), (-1, 2)], (1, 4)),
                    functional(&[(-1, 2), (1, 2)], (1, 4)),
                    functional(&[(-1, 2), (-1, 2)], (3, 4)),
                ],
            },
        ),
    ]);
    Ok(CatalogEntry {
        name: "boxworld".into(),
        summary: "square with the Boxworld observables A, B and their halved versions C, D".into(),
        theory: Theory::new(space, vec![a, b, c, d])?,
        representations: vec![("W_0".into(), w0), ("W_1/2".into(), w_half), ("W_+".into(), w_plus)],
        channels: Vec::new(),
        expected,
        notes: vec!["s_ij is the vertex (i, j); f_x and f_y are the coordinates".into()],
    })
}

/// Effects `(1 ± c)/2` for coordinate `c`.
fn sign_observable(name: &str, dim: usize, coordinate: usize) -> Observable {
    let half = rat(1, 2);
    let f = &AffineFunctional::coordinate(dim, coordinate).scaled(&half) + &AffineFunctional::constant(dim, half);
    Observable::binary(name, f)
}

/// Entries `(1 + s_x x + s_y y + s_z z)/4` of the qubit grid; `y` is
/// dropped when `with_y` is false.
fn qubit_grid(with_y: bool) -> Vec<AffineFunctional> {
    let signs: [[i64; 3]; 4] = [[1, 1, 1], [-1, -1, 1], [1, -1, -1], [-1, 1, -1]];
    signs
        .iter()
        .map(|[x, y, z]| {
            let linear: Vec<(i64, i64)> = if with_y {
                vec![(*x, 4), (*y, 4), (*z, 4)]
            } else {
                vec![(*x, 4), (*z, 4)]
            };
            functional(&linear, (1, 4))
        })
        .collect()
}

fn signed_permutation(rows: &[[i64; 3]]) -> AffineMap {
    let rows: Vec<Vec<Rational>> = rows.iter().map(|r| ints(r)).collect();
    AffineMap::linear(RationalMatrix::from_rows(3, &rows))
}

fn qubit_ball() -> Result<CatalogEntry> {
    let space = StateSpace::ball(vec![Rational::zero(); 3], Rational::one())?;
    let a = sign_observable("A", 3, 2);
    let b = sign_observable("B", 3, 0);
    let w = WignerRep::new(a.clone(), b.clone(), qubit_grid(true))?;
    let generators = vec![swap((0, 0), (0, 1)), swap((0, 0), (1, 0)), swap((0, 0), (1, 1))];
    let quarter = rat(1, 4);
    let expected = vec![
        expect("W is faithful", Origin::Stated, Check::Rank { rep: "W".into(), rank: 4, faithful: true }),
        expect("W is not positive", Origin::Stated, Check::Positive { rep: "W".into(), positive: false }),
        expect(
            "entry (0,0) has minimum (1 - sqrt 3)/4",
            Origin::Computed,
            Check::Minimum { rep: "W".into(), a: 0, b: 0, value: ExtremalValue::new(quarter.clone(), -quarter, int(3)) },
        ),
        expect(
            "A and B are complementary",
            Origin::Stated,
            Check::Complementary { a: "A".into(), b: "B".into(), holds: true },
        ),
        expect(
            "A and B are not jointly info-complete",
            Origin::Stated,
            Check::InfoComplete { a: "A".into(), b: "B".into(), holds: false },
        ),
        expect(
            "W is symmetric under all phase point permutations",
            Origin::Stated,
            Check::GroupSymmetric { rep: "W".into(), generators: generators.clone(), holds: true },
        ),
        expect(
            "swapping 00 and 01 acts as (x, y, z) -> (-y, -x, z)",
            Origin::Stated,
            Check::InducedAction {
                rep: "W".into(),
                map: generators[0].clone(),
                action: signed_permutation(&[[0, -1, 0], [-1, 0, 0], [0, 0, 1]]),
            },
        ),
        expect(
            "swapping 00 and 10 acts as (x, y, z) -> (x, -z, -y)",
            Origin::Stated,
            Check::InducedAction {
                rep: "W".into(),
                map: generators[1].clone(),
                action: signed_permutation(&[[1, 0, 0], [0, 0, -1], [0, -1, 0]]),
            },
        ),
        expect(
            "swapping 00 and 11 acts as (x, y, z) -> (-z, y, -x)",
            Origin::Stated,
            Check::InducedAction {
                rep: "W".into(),
                map: generators[2].clone(),
                action: signed_permutation(&[[0, 0, -1], [0, 1, 0], [-1, 0, 0]]),
            },
        ),
    ];
    Ok(CatalogEntry {
        name: "qubit_ball".into(),
        summary: "Bloch ball with the sigma_z and sigma_x measurements".into(),
        theory: Theory::new(space, vec![a, b])?,
        representations: vec![("W".into(), w)],
        channels: Vec::new(),
        expected,
        notes: vec!["coordinates are the Bloch vector (x, y, z)".into()],
    })
}

/// Coordinate flips realising the outcome swaps of the `(x, z)` observables.
fn reflection_channels() -> Vec<SuppliedChannel> {
    let flip = |sx: i64, sz: i64| AffineMap::linear(RationalMatrix::from_rows(2, &[ints(&[sx, 0]), ints(&[0, sz])]));
    let element = |g1: [usize; 2], g2: [usize; 2]| ProductGroupElement {
        g1: g1.to_vec(),
        g2: g2.to_vec(),
    };
    vec![
        (element([0, 1], [0, 1]), flip(1, 1)),
        (element([1, 0], [0, 1]), flip(1, -1)),
        (element([0, 1], [1, 0]), flip(-1, 1)),
        (element([1, 0], [1, 0]), flip(-1, -1)),
    ]
}

fn xz_theory(space: StateSpace) -> Result<Theory> {
    Theory::new(space, vec![sign_observable("A", 2, 1), sign_observable("B", 2, 0)])
}

fn hypotheses(all: bool, origin: Origin) -> Vec<Expectation> {
    vec![
        expect(
            "A and B are jointly info-complete",
            origin,
            Check::InfoComplete { a: "A".into(), b: "B".into(), holds: true },
        ),
        expect(
            "A and B are complementary",
            origin,
            Check::Complementary { a: "A".into(), b: "B".into(), holds: all },
        ),
        expect("A is surjective", origin, Check::Surjective { observable: "A".into(), holds: all }),
        expect("B is surjective", origin, Check::Surjective { observable: "B".into(), holds: all }),
    ]
}

fn qubit_xz() -> Result<CatalogEntry> {
    let theory = xz_theory(StateSpace::ball(vec![Rational::zero(); 2], Rational::one())?)?;
    let (a, b) = (theory.observables()[0].clone(), theory.observables()[1].clone());
    let w = WignerRep::new(a, b, qubit_grid(false))?;
    let mut expected = hypotheses(true, Origin::Stated);
    expected.extend([
        expect(
            "entry (0,0) is (x + z + 1)/4",
            Origin::Stated,
            Check::Entry { rep: "W".into(), a: 0, b: 0, functional: functional(&[(1, 4), (1, 4)], (1, 4)) },
        ),
        expect(
            "the restricted qubit grid is the unique covariant representation",
            Origin::Stated,
            Check::CovariantUnique { a: "A".into(), b: "B".into(), grid: qubit_grid(false) },
        ),
    ]);
    Ok(CatalogEntry {
        name: "qubit_xz".into(),
        summary: "unit disk of real qubit states with the sigma_z and sigma_x measurements".into(),
        theory,
        representations: vec![("W".into(), w)],
        channels: reflection_channels(),
        expected,
        notes: vec!["coordinates are (x, z); the supplied channels are the coordinate reflections".into()],
    })
}

fn rebit_diamond() -> Result<CatalogEntry> {
    let space = StateSpace::polytope(vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[-1, 0]), ints(&[0, -1])])?;
    let theory = xz_theory(space)?;
    let (a, b) = (theory.observables()[0].clone(), theory.observables()[1].clone());
    let w = WignerRep::new(a, b, qubit_grid(false))?;
    let mut expected = hypotheses(true, Origin::Computed);
    expected.push(expect(
        "the covariant representation is unique and equals the qubit grid",
        Origin::Computed,
        Check::CovariantUnique { a: "A".into(), b: "B".into(), grid: qubit_grid(false) },
    ));
    Ok(CatalogEntry {
        name: "rebit_diamond".into(),
        summary: "square with vertices (+-1, 0), (0, +-1) and the qubit effect formulas".into(),
        theory,
        representations: vec![("W".into(), w)],
        channels: Vec::new(),
        expected,
        notes: Vec::new(),
    })
}

fn deformed_polygon() -> Result<CatalogEntry> {
    let vertices = vec![
        ints(&[0, 1]),
        ints(&[0, -1]),
        ints(&[1, 0]),
        ints(&[-1, 0]),
        rats(&[(3, 5), (-4, 5)]),
        rats(&[(-3, 5), (-4, 5)]),
        rats(&[(4, 5), (-3, 5)]),
        rats(&[(-4, 5), (-3, 5)]),
    ];
    let theory = xz_theory(StateSpace::polytope(vertices)?)?;
    let mut expected = hypotheses(true, Origin::Computed);
    expected.extend([
        expect(
            "(3/5, 4/5) was cut away",
            Origin::Computed,
            Check::Contains { point: rats(&[(3, 5), (4, 5)]), holds: false },
        ),
        expect(
            "no covariant representation: swapping the outcomes of A needs the z-flip",
            Origin::Computed,
            Check::CovariantNone {
                a: "A".into(),
                b: "B".into(),
                element: ProductGroupElement {
                    g1: vec![1, 0],
                    g2: vec![0, 1],
                },
                point: rats(&[(3, 5), (-4, 5)]),
                image: rats(&[(3, 5), (4, 5)]),
            },
        ),
    ]);
    Ok(CatalogEntry {
        name: "deformed_12gon".into(),
        summary: "polygon inscribed in the unit disk with the region z + |x| > 1 removed".into(),
        theory,
        representations: Vec::new(),
        channels: Vec::new(),
        expected,
        notes: vec![
            "coordinates are (x, z); rational points on the unit circle keep the arithmetic exact".into(),
            "a polygon stands in for the disk with a region removed, which neither backend represents".into(),
        ],
    })
}

/// Checks that every permutation channel of a polytope entry exists, for
/// callers that want the channel list itself.
pub fn permutation_channels(entry: &CatalogEntry, a: &str, b: &str) -> Result<PermutationChannels> {
    find_permutation_channels(entry.observable(a)?, entry.observable(b)?, entry.space(), &entry.channels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_replays() {
        for name in ENTRY_NAMES {
            let entry = load(name).unwrap();
            for r in entry.replay().unwrap() {
                assert!(r.passed, "{name}: {} ({:?})", r.description, r.detail);
            }
        }
    }

    #[test]
    fn unknown_entry() {
        assert!(matches!(load("nope"), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn deformed_polygon_witness() {
        let entry = load("deformed_12gon").unwrap();
        let PermutationChannels::Infeasible(o) = permutation_channels(&entry, "A", "B").unwrap() else {
            panic!("the A swap has no channel");
        };
        assert_eq!(o.witness.map(|w| w.0), Some(rats(&[(3, 5), (-4, 5)])));
    }
}
