//! Observables on a state space and the questions one can ask about a pair
//! of them: compatibility, joint information completeness, complementarity,
//! surjectivity, and channels prescribed by effect equations.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    lp_feasible, solve_affine, AffineSolution, FarkasCertificate, FeasibilityResult, LinearProgram,
    Rational, RationalMatrix,
};
use crate::geometry::{map_into, AffineFunctional, AffineMap, ExtremalValue, MapCheck, StateSpace};

/// A finite-outcome measurement: one effect per outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    name: String,
    outcomes: Vec<String>,
    effects: Vec<AffineFunctional>,
}

impl Observable {
    /// Checks the shape only (labels vs. effects, common dimension). Range
    /// and normalisation are checked against a state space by [`validate`].
    pub fn new(name: impl Into<String>, outcomes: Vec<String>, effects: Vec<AffineFunctional>) -> Result<Self> {
        let name = name.into();
        if outcomes.is_empty() {
            return Err(Error::NoOutcomes(name));
        }
        if outcomes.len() != effects.len() {
            return Err(Error::OutcomeCount {
                name,
                outcomes: outcomes.len(),
                effects: effects.len(),
            });
        }
        let dim = effects[0].dim();
        if let Some(bad) = effects.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self {
            name,
            outcomes,
            effects,
        })
    }

    /// Outcomes `"0"`, `"1"` with effects `f` and `1 - f`.
    pub fn binary(name: impl Into<String>, f: AffineFunctional) -> Self {
        let complement = &AffineFunctional::one(f.dim()) - &f;
        Self::new(name, vec!["0".into(), "1".into()], vec![f, complement]).expect("two matching effects")
    }

    /// The measurement with a single certain outcome.
    pub fn trivial(name: impl Into<String>, dim: usize) -> Self {
        Self::new(name, vec!["0".into()], vec![AffineFunctional::one(dim)]).expect("one effect")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[AffineFunctional] {
        &self.effects
    }

    pub fn effect(&self, outcome: usize) -> &AffineFunctional {
        &self.effects[outcome]
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Outcome statistics at `x`; `x` must lie in `space`.
    pub fn measure(&self, space: &StateSpace, x: &[Rational]) -> Result<Distribution> {
        if !space.contains(x)? {
            return Err(Error::OutsideStateSpace);
        }
        Ok(self.distribution_at(x))
    }

    /// Outcome statistics at `x` without a membership check.
    pub fn distribution_at(&self, x: &[Rational]) -> Distribution {
        Distribution(self.effects.iter().map(|f| f.eval(x)).collect())
    }

    pub fn uniform_value(&self) -> Rational {
        Rational::new(1.into(), self.len().into())
    }
}

/// Outcome probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution(pub Vec<Rational>);

impl Distribution {
    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_uniform(&self) -> bool {
        let n = Rational::new(1.into(), self.0.len().into());
        self.0.iter().all(|p| *p == n)
    }

    pub fn is_deterministic(&self) -> bool {
        self.0.iter().any(One::is_one)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// A failed requirement on an observable, with an exact witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch {
        observable: String,
        expected: usize,
        found: usize,
    },
    /// The effect leaves `[0, 1]`; `value` is its extreme over the space and
    /// `point` a rational state where the bound is broken.
    EffectRange {
        observable: String,
        outcome: usize,
        bound: Bound,
        value: ExtremalValue,
        point: Option<Vec<Rational>>,
    },
    /// The effects do not sum to one at `point`.
    Normalization {
        observable: String,
        point: Vec<Rational>,
        sum: Rational,
    },
}

/// Checks effect ranges and normalisation of every observable.
pub fn validate(space: &StateSpace, observables: &[Observable]) -> Vec<Violation> {
    let mut out = Vec::new();
    let dim = space.ambient_dim();
    for obs in observables {
        if obs.dim() != dim {
            out.push(Violation::DimensionMismatch {
                observable: obs.name.clone(),
                expected: dim,
                found: obs.dim(),
            });
            continue;
        }
        for (a, f) in obs.effects.iter().enumerate() {
            let (lo, hi) = space.extremal_range(f).expect("dimension checked");
            if lo.is_negative() {
                out.push(Violation::EffectRange {
                    observable: obs.name.clone(),
                    outcome: a,
                    bound: Bound::Lower,
                    value: lo,
                    point: space.point_below(f, &Rational::zero()).expect("dimension checked"),
                });
            }
            if hi.cmp_rational(&Rational::one()) == Ordering::Greater {
                out.push(Violation::EffectRange {
                    observable: obs.name.clone(),
                    outcome: a,
                    bound: Bound::Upper,
                    value: hi,
                    point: space.point_below(&-f, &-Rational::one()).expect("dimension checked"),
                });
            }
        }
        // Σ f_a = 1 on the affine hull, checked at the frame points.
        let total = AffineFunctional::sum(dim, &obs.effects);
        for p in space.frame().points() {
            let sum = total.eval(p);
            if !sum.is_one() {
                out.push(Violation::Normalization {
                    observable: obs.name.clone(),
                    point: p.clone(),
                    sum,
                });
                break;
            }
        }
    }
    out
}

/// A state space with observables that passed [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    state_space: StateSpace,
    observables: Vec<Observable>,
}

impl Theory {
    pub fn new(state_space: StateSpace, observables: Vec<Observable>) -> Result<Self> {
        let violations = validate(&state_space, &observables);
        if !violations.is_empty() {
            return Err(Error::InvalidTheory(violations));
        }
        Ok(Self {
            state_space,
            observables,
        })
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.state_space
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn observable(&self, name: &str) -> Result<&Observable> {
        self.observables
            .iter()
            .find(|o| o.name == name)
            .ok_or_else(|| Error::InvalidIndex(format!("no observable named {name}")))
    }
}

/// Index of the value of joint effect `(a, b)` at frame point `i` among the
/// variables of [`compatibility_program`].
pub fn compatibility_variable(b_len: usize, frame_len: usize, a: usize, b: usize, i: usize) -> usize {
    (a * b_len + b) * frame_len + i
}

/// The feasibility program of a joint observable for `A` and `B`.
///
/// Each joint effect is represented by its values at the frame points of
/// the space; equalities impose the two marginals at every frame point and
/// inequalities impose nonnegativity at every vertex (vertex-major order,
/// then row-major over the grid).
pub fn compatibility_program(a: &Observable, b: &Observable, space: &StateSpace) -> Result<LinearProgram> {
    let vertices = space.require_vertices("the compatibility program")?;
    let frame = space.frame();
    let k = frame.len();
    let (na, nb) = (a.len(), b.len());
    let var = |x: usize, y: usize, i: usize| compatibility_variable(nb, k, x, y, i);
    let mut lp = LinearProgram::new(na * nb * k);
    for x in 0..na {
        for (i, p) in frame.points().iter().enumerate() {
            let terms: Vec<(usize, Rational)> = (0..nb).map(|y| (var(x, y, i), Rational::one())).collect();
            lp.add_sparse_equality(&terms, a.effect(x).eval(p));
        }
    }
    for y in 0..nb {
        for (i, p) in frame.points().iter().enumerate() {
            let terms: Vec<(usize, Rational)> = (0..na).map(|x| (var(x, y, i), Rational::one())).collect();
            lp.add_sparse_equality(&terms, b.effect(y).eval(p));
        }
    }
    for v in vertices {
        let weights = frame.barycentric(v);
        for x in 0..na {
            for y in 0..nb {
                let terms: Vec<(usize, Rational)> = weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(i, w)| (var(x, y, i), w.clone()))
                    .collect();
                lp.add_sparse_inequality(&terms, Rational::zero());
            }
        }
    }
    Ok(lp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    /// Joint effects in row-major order over `A × B`.
    Compatible { joint: Vec<AffineFunctional> },
    Incompatible(FarkasCertificate),
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible { .. })
    }
}

/// Decides whether `A` and `B` admit a joint observable on a polytope.
pub fn are_compatible(a: &Observable, b: &Observable, space: &StateSpace) -> Result<Compatibility> {
    let lp = compatibility_program(a, b, space)?;
    let frame = space.frame();
    let k = frame.len();
    Ok(match lp_feasible(&lp) {
        FeasibilityResult::Feasible(x) => {
            let joint = x.chunks(k).map(|values| frame.functional_from_values(values)).collect();
            Compatibility::Compatible { joint }
        }
        FeasibilityResult::Infeasible(cert) => Compatibility::Incompatible(cert),
    })
}

/// Dimension of the span of all effects of `A` and `B` as functions on the
/// space.
pub fn effect_span_rank(a: &Observable, b: &Observable, space: &StateSpace) -> usize {
    let frame = space.frame();
    let rows: Vec<Vec<Rational>> = a.effects.iter().chain(&b.effects).map(|f| frame.values(f)).collect();
    RationalMatrix::from_rows(frame.len(), &rows).rank()
}

/// Whether the statistics of `A` and `B` together determine the state.
pub fn jointly_info_complete(a: &Observable, b: &Observable, space: &StateSpace) -> bool {
    effect_span_rank(a, b, space) == space.dimension() + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// A state where one observable is certain while the other is not uniform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementarityWitness {
    /// Which observable has a certain outcome.
    pub certain: Side,
    pub outcome: usize,
    /// The state, when it is rational (always for polytopes).
    pub point: Option<Vec<Rational>>,
    /// Effect values of the other observable at the state.
    pub other_values: Vec<ExtremalValue>,
}

/// `Ok(None)` when `A` and `B` are complementary, otherwise a witness.
///
/// Both directions are checked: a certain outcome of `A` must leave `B`
/// uniform, and a certain outcome of `B` must leave `A` uniform.
pub fn are_complementary(
    a: &Observable,
    b: &Observable,
    space: &StateSpace,
) -> Result<Option<ComplementarityWitness>> {
    for (certain, first, second) in [(Side::A, a, b), (Side::B, b, a)] {
        if let Some(w) = one_sided_complementarity(certain, first, second, space)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn one_sided_complementarity(
    certain: Side,
    first: &Observable,
    second: &Observable,
    space: &StateSpace,
) -> Result<Option<ComplementarityWitness>> {
    let uniform = second.uniform_value();
    for (outcome, f) in first.effects.iter().enumerate() {
        if let Some(vertices) = space.vertices() {
            for v in vertices.iter().filter(|v| f.eval(v).is_one()) {
                let values = second.distribution_at(v);
                if !values.is_uniform() {
                    return Ok(Some(ComplementarityWitness {
                        certain,
                        outcome,
                        point: Some(v.clone()),
                        other_values: values.0.into_iter().map(ExtremalValue::rational).collect(),
                    }));
                }
            }
            continue;
        }
        let (_, hi) = space.extremal_range(f)?;
        if hi.cmp_rational(&Rational::one()) != Ordering::Equal {
            continue;
        }
        if f.is_constant() {
            return Err(Error::UnsupportedDegenerateFace {
                observable: first.name.clone(),
                outcome,
            });
        }
        // The face is the single point c + r·l/‖l‖.
        let crate::geometry::Shape::Ball { center, radius } = space.shape() else {
            unreachable!("non-polytope spaces are balls")
        };
        let sq = crate::exact::norm_squared(&f.linear);
        let values: Vec<ExtremalValue> = second
            .effects
            .iter()
            .map(|g| {
                let along = crate::exact::dot(&g.linear, &f.linear);
                ExtremalValue::new(g.eval(center), radius * along / &sq, sq.clone())
            })
            .collect();
        if values.iter().any(|v| v.cmp_rational(&uniform) != Ordering::Equal) {
            return Ok(Some(ComplementarityWitness {
                certain,
                outcome,
                point: space.rational_maximizer(f)?,
                other_values: values,
            }));
        }
    }
    Ok(None)
}

/// For each outcome, a state where it is certain (`None` if there is none,
/// or if the only such state is irrational on a ball).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surjectivity {
    pub reached: Vec<bool>,
    pub witnesses: Vec<Option<Vec<Rational>>>,
}

impl Surjectivity {
    pub fn is_surjective(&self) -> bool {
        self.reached.iter().all(|r| *r)
    }
}

/// Whether every deterministic distribution is attained by some state.
pub fn is_surjective(obs: &Observable, space: &StateSpace) -> Result<Surjectivity> {
    let mut reached = Vec::new();
    let mut witnesses = Vec::new();
    for f in &obs.effects {
        let (_, hi) = space.extremal_range(f)?;
        let hit = hi.cmp_rational(&Rational::one()) != Ordering::Less;
        reached.push(hit);
        witnesses.push(if hit { space.rational_maximizer(f)? } else { None });
    }
    Ok(Surjectivity { reached, witnesses })
}

/// An affine map certified to send its source state space into its target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    map: AffineMap,
}

impl Channel {
    pub fn new(source: &StateSpace, map: AffineMap, target: &StateSpace) -> Result<Self> {
        match map_into(source, &map, target)? {
            MapCheck::Inside { .. } => Ok(Self { map }),
            MapCheck::Outside { .. } => Err(Error::NotAChannel),
        }
    }

    pub fn identity(space: &StateSpace) -> Self {
        Self {
            map: AffineMap::identity(space.ambient_dim()),
        }
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    pub fn into_map(self) -> AffineMap {
        self.map
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.map.apply(x)
    }

    /// `self ∘ inner`; channels compose to channels.
    pub fn compose(&self, inner: &Channel) -> Channel {
        Channel {
            map: self.map.compose(&inner.map),
        }
    }

    /// Whether two channels agree on the affine hull of `space`.
    pub fn agrees_on(&self, other: &Channel, space: &StateSpace) -> bool {
        space.frame().points().iter().all(|p| self.apply(p) == other.apply(p))
    }
}

/// An equation `g ∘ Φ = h` on the source space: `g` lives on the target,
/// `h` on the source.
pub type ChannelEquation = (AffineFunctional, AffineFunctional);

/// Index of coordinate `r` of the image of frame point `i` among the
/// variables of [`channel_program`].
pub fn channel_image_variable(target_dim: usize, i: usize, r: usize) -> usize {
    i * target_dim + r
}

/// Feasibility program for a channel satisfying `equations`.
///
/// Unknowns are the images `y_i` of the source frame points, followed by
/// weights `μ_{v,w} ≥ 0` expressing the image of every source vertex `v` as a
/// convex combination of target vertices `w`.
pub fn channel_program(source: &StateSpace, target: &StateSpace, equations: &[ChannelEquation]) -> Result<LinearProgram> {
    let sv = source.require_vertices("channel search")?;
    let tv = target.require_vertices("channel search")?;
    let frame = source.frame();
    let n2 = target.ambient_dim();
    let k = frame.len();
    let images = k * n2;
    let mu = |v: usize, w: usize| images + v * tv.len() + w;
    let mut lp = LinearProgram::new(images + sv.len() * tv.len());
    for (g, h) in equations {
        if g.dim() != n2 || h.dim() != source.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: n2,
                found: g.dim(),
            });
        }
        for (i, p) in frame.points().iter().enumerate() {
            let terms: Vec<(usize, Rational)> = g
                .linear
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(r, c)| (channel_image_variable(n2, i, r), c.clone()))
                .collect();
            lp.add_sparse_equality(&terms, h.eval(p) - &g.constant);
        }
    }
    for (v, point) in sv.iter().enumerate() {
        let weights = frame.barycentric(point);
        for r in 0..n2 {
            let mut terms: Vec<(usize, Rational)> = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, w)| (channel_image_variable(n2, i, r), w.clone()))
                .collect();
            for (w, target_vertex) in tv.iter().enumerate() {
                if !target_vertex[r].is_zero() {
                    terms.push((mu(v, w), -target_vertex[r].clone()));
                }
            }
            lp.add_sparse_equality(&terms, Rational::zero());
        }
        let terms: Vec<(usize, Rational)> = (0..tv.len()).map(|w| (mu(v, w), Rational::one())).collect();
        lp.add_sparse_equality(&terms, Rational::one());
        for w in 0..tv.len() {
            lp.add_nonnegative(mu(v, w));
        }
    }
    Ok(lp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChannelSearch {
    Found(Channel),
    Infeasible(FarkasCertificate),
}

impl ChannelSearch {
    pub fn channel(&self) -> Option<&Channel> {
        match self {
            ChannelSearch::Found(c) => Some(c),
            ChannelSearch::Infeasible(_) => None,
        }
    }
}

/// Finds a channel `Φ: source → target` with `g ∘ Φ = h` on the source for
/// every equation, or proves that none exists. Polytopes only.
pub fn find_channel(source: &StateSpace, target: &StateSpace, equations: &[ChannelEquation]) -> Result<ChannelSearch> {
    let lp = channel_program(source, target, equations)?;
    Ok(match lp_feasible(&lp) {
        FeasibilityResult::Feasible(x) => {
            let n2 = target.ambient_dim();
            let images: Vec<Vec<Rational>> = x[..source.frame().len() * n2].chunks(n2).map(<[Rational]>::to_vec).collect();
            let map = source.frame().map_from_images(&images);
            ChannelSearch::Found(Channel::new(source, map, target)?)
        }
        FeasibilityResult::Infeasible(cert) => ChannelSearch::Infeasible(cert),
    })
}

/// The map determined by `equations` alone, when they pin down the image of
/// every frame point uniquely.
pub fn candidate_channel_map(
    source: &StateSpace,
    target_dim: usize,
    equations: &[ChannelEquation],
) -> Option<AffineMap> {
    let rows: Vec<Vec<Rational>> = equations.iter().map(|(g, _)| g.linear.clone()).collect();
    let system = RationalMatrix::from_rows(target_dim, &rows);
    let mut images = Vec::new();
    for p in source.frame().points() {
        let rhs: Vec<Rational> = equations.iter().map(|(g, h)| h.eval(p) - &g.constant).collect();
        match solve_affine(&system, &rhs) {
            AffineSolution::Solved {
                particular,
                nullspace,
            } if nullspace.is_empty() => images.push(particular),
            _ => return None,
        }
    }
    Some(source.frame().map_from_images(&images))
}

/// Checks a user-supplied map against `equations` and containment. Works
/// for every backend pair supported by [`map_into`].
pub fn verify_channel(
    source: &StateSpace,
    target: &StateSpace,
    map: AffineMap,
    equations: &[ChannelEquation],
) -> Result<Channel> {
    for (g, h) in equations {
        let pulled = g.compose(&map);
        if source.frame().points().iter().any(|p| pulled.eval(p) != h.eval(p)) {
            return Err(Error::ChannelEquations);
        }
    }
    Channel::new(source, map, target)
}
