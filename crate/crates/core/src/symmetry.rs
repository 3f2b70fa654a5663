//! Maps on the phase space `A × B`, their push-forwards to signed grids, and
//! symmetries of Wigner representations. Also the covariant solver: given
//! the channels that permute outcome statistics, find every representation
//! that transforms along with them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    self, solve_affine, AffineSolution, FarkasCertificate, FeasibilityResult, Rational, RationalMatrix,
};
use crate::geometry::{
    affine_extension, hull_membership, map_into, AffineFunctional, AffineMap, MapCheck, StateSpace,
};
use crate::theory::{
    are_complementary, candidate_channel_map, find_channel, is_surjective, jointly_info_complete, verify_channel,
    Channel, ChannelEquation, ChannelSearch, Observable,
};
use crate::wigner::{SignedGrid, WignerRep};

/// Largest phase space whose full permutation group is enumerated.
pub const MAX_ENUMERATED_PHASE_POINTS: usize = 8;
/// Largest group generated by [`is_g_symmetric`] or used by the covariant
/// solver.
pub const MAX_GROUP_ORDER: usize = 10_000;

/// A map of the phase space to itself; cells are indexed row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePointMap {
    rows: usize,
    cols: usize,
    table: Vec<usize>,
}

impl PhasePointMap {
    pub fn new(rows: usize, cols: usize, table: Vec<usize>) -> Result<Self> {
        let n = rows * cols;
        if table.len() != n {
            return Err(Error::GridShape { rows, cols });
        }
        if let Some(bad) = table.iter().find(|&&t| t >= n) {
            return Err(Error::InvalidIndex(format!("phase point {bad} outside a {rows}x{cols} grid")));
        }
        Ok(Self { rows, cols, table })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            table: (0..rows * cols).collect(),
        }
    }

    /// Exchanges cells `p` and `q`, each given as `(a, b)`.
    pub fn swap(rows: usize, cols: usize, p: (usize, usize), q: (usize, usize)) -> Self {
        let mut m = Self::identity(rows, cols);
        let (i, j) = (p.0 * cols + p.1, q.0 * cols + q.1);
        m.table.swap(i, j);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, cell: usize) -> usize {
        self.table[cell]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PhasePointMap) -> PhasePointMap {
        PhasePointMap {
            rows: self.rows,
            cols: self.cols,
            table: other.table.iter().map(|&j| self.table[j]).collect(),
        }
    }

    pub fn is_permutation(&self) -> bool {
        self.table.iter().collect::<BTreeSet<_>>().len() == self.table.len()
    }

    pub fn inverse(&self) -> Option<PhasePointMap> {
        if !self.is_permutation() {
            return None;
        }
        let mut table = vec![0; self.table.len()];
        for (j, &i) in self.table.iter().enumerate() {
            table[i] = j;
        }
        Some(PhasePointMap {
            rows: self.rows,
            cols: self.cols,
            table,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &t)| i == t)
    }

    /// Push-forward of signed grids along the map.
    pub fn lift(&self) -> LiftedMap {
        let n = self.table.len();
        let mut matrix = RationalMatrix::zeros(n, n);
        for (j, &i) in self.table.iter().enumerate() {
            matrix[(i, j)] = Rational::one();
        }
        LiftedMap { matrix }
    }

    fn cell_label(&self, cell: usize) -> String {
        let (a, b) = (cell / self.cols, cell % self.cols);
        if self.rows <= 10 && self.cols <= 10 {
            format!("{a}{b}")
        } else {
            format!("{a}.{b}")
        }
    }
}

impl fmt::Display for PhasePointMap {
    /// Cycle notation over cell labels `ab`, e.g. `(01 10)`; `id` for the
    /// identity. Non-bijective maps print as a table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_permutation() {
            let parts: Vec<String> = self
                .table
                .iter()
                .enumerate()
                .map(|(j, &i)| format!("{}->{}", self.cell_label(j), self.cell_label(i)))
                .collect();
            return write!(f, "{{{}}}", parts.join(", "));
        }
        if self.is_identity() {
            return write!(f, "id");
        }
        let mut seen = vec![false; self.table.len()];
        for start in 0..self.table.len() {
            if seen[start] || self.table[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(self.cell_label(j));
                j = self.table[j];
            }
            write!(f, "({})", cycle.join(" "))?;
        }
        Ok(())
    }
}

/// The push-forward `ν ↦ (Σ_{φ(j)=i} ν_j)_i`; column `j` of the matrix has
/// a single one, in row `φ(j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedMap {
    matrix: RationalMatrix,
}

impl LiftedMap {
    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn apply(&self, grid: &SignedGrid) -> SignedGrid {
        let entries = self.matrix.mul_vec(grid.entries());
        SignedGrid::new(grid.rows(), grid.cols(), entries).expect("shape preserved")
    }

    pub fn to_affine_map(&self) -> AffineMap {
        AffineMap::linear(self.matrix.clone())
    }
}

/// A pair of outcome permutations acting as `(a, b) ↦ (g1(a), g2(b))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductGroupElement {
    pub g1: Vec<usize>,
    pub g2: Vec<usize>,
}

impl ProductGroupElement {
    pub fn new(g1: Vec<usize>, g2: Vec<usize>) -> Result<Self> {
        for g in [&g1, &g2] {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            if sorted != (0..g.len()).collect::<Vec<_>>() {
                return Err(Error::InvalidIndex(format!("{g:?} is not a permutation")));
            }
        }
        Ok(Self { g1, g2 })
    }

    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            g1: (0..rows).collect(),
            g2: (0..cols).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.g1.iter().enumerate().all(|(i, &g)| i == g) && self.g2.iter().enumerate().all(|(i, &g)| i == g)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProductGroupElement) -> ProductGroupElement {
        ProductGroupElement {
            g1: other.g1.iter().map(|&a| self.g1[a]).collect(),
            g2: other.g2.iter().map(|&b| self.g2[b]).collect(),
        }
    }

    pub fn inverse(&self) -> ProductGroupElement {
        let invert = |g: &[usize]| {
            let mut out = vec![0; g.len()];
            for (i, &x) in g.iter().enumerate() {
                out[x] = i;
            }
            out
        };
        ProductGroupElement {
            g1: invert(&self.g1),
            g2: invert(&self.g2),
        }
    }

    pub fn phase_map(&self) -> PhasePointMap {
        let cols = self.g2.len();
        let mut table = vec![0; self.g1.len() * cols];
        for (a, &ga) in self.g1.iter().enumerate() {
            for (b, &gb) in self.g2.iter().enumerate() {
                table[a * cols + b] = ga * cols + gb;
            }
        }
        PhasePointMap {
            rows: self.g1.len(),
            cols,
            table,
        }
    }
}

impl fmt::Display for ProductGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |g: &[usize]| g.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        write!(f, "([{}], [{}])", show(&self.g1), show(&self.g2))
    }
}

/// Adjacent transpositions of the outcomes of `A` (with `B` fixed) followed
/// by those of `B` (with `A` fixed). They generate the product of the two
/// full symmetric groups.
pub fn product_generators(rows: usize, cols: usize) -> Vec<ProductGroupElement> {
    let mut out = Vec::new();
    for i in 0..rows.saturating_sub(1) {
        let mut g = ProductGroupElement::identity(rows, cols);
        g.g1.swap(i, i + 1);
        out.push(g);
    }
    for j in 0..cols.saturating_sub(1) {
        let mut g = ProductGroupElement::identity(rows, cols);
        g.g2.swap(j, j + 1);
        out.push(g);
    }
    out
}

/// Outcome of [`is_symmetry`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryCheck {
    Symmetry,
    /// `point` is a state whose image under the grid map leaves `W(K)`.
    Violated {
        point: Vec<Rational>,
        vertex: Option<usize>,
        image: SignedGrid,
        /// For polytopes, a proof that `image ∉ conv W(vertices)`.
        certificate: Option<FarkasCertificate>,
    },
}

impl SymmetryCheck {
    pub fn holds(&self) -> bool {
        matches!(self, SymmetryCheck::Symmetry)
    }
}

fn grid_of(w: &WignerRep, entries: Vec<Rational>) -> SignedGrid {
    SignedGrid::new(w.rows(), w.cols(), entries).expect("grid map preserves the shape")
}

/// Whether `lambda` maps `W(K)` into itself.
///
/// Polytopes: every vertex image must lie in the hull of the vertex images.
/// Balls: `W` must be faithful; the map is pulled back to the space and
/// tested as a ball self-map.
pub fn is_symmetry(w: &WignerRep, space: &StateSpace, lambda: &AffineMap) -> Result<SymmetryCheck> {
    let n = w.rows() * w.cols();
    if lambda.source_dim() != n || lambda.target_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: lambda.source_dim(),
        });
    }
    if let Some(vertices) = space.vertices() {
        let images = w.images(vertices);
        for (index, (v, img)) in vertices.iter().zip(&images).enumerate() {
            let moved = lambda.apply(img);
            if images.contains(&moved) {
                continue;
            }
            if let FeasibilityResult::Infeasible(cert) = hull_membership(&images, &moved) {
                return Ok(SymmetryCheck::Violated {
                    point: v.clone(),
                    vertex: Some(index),
                    image: grid_of(w, moved),
                    certificate: Some(cert),
                });
            }
        }
        return Ok(SymmetryCheck::Symmetry);
    }
    if !w.is_faithful(space) {
        return Err(Error::UnsupportedGeometry(
            "symmetry test on a ball needs a faithful representation".into(),
        ));
    }
    let frame = space.frame();
    let mut preimages = Vec::new();
    for p in frame.points() {
        let moved = lambda.apply(&w.evaluate_unchecked(p).into_entries());
        match preimage(w, space, &moved) {
            Some(z) => preimages.push(z),
            None => {
                return Ok(SymmetryCheck::Violated {
                    point: p.clone(),
                    vertex: None,
                    image: grid_of(w, moved),
                    certificate: None,
                })
            }
        }
    }
    let pulled = frame.map_from_images(&preimages);
    Ok(match map_into(space, &pulled, space)? {
        MapCheck::Inside { .. } => SymmetryCheck::Symmetry,
        MapCheck::Outside { point, .. } => {
            let moved = lambda.apply(&w.evaluate_unchecked(&point).into_entries());
            SymmetryCheck::Violated {
                point,
                vertex: None,
                image: grid_of(w, moved),
                certificate: None,
            }
        }
    })
}

/// The state of the affine hull mapped to `grid`, if there is exactly one.
fn preimage(w: &WignerRep, space: &StateSpace, grid: &[Rational]) -> Option<Vec<Rational>> {
    let frame = space.frame();
    let images = w.images(frame.points());
    let mut columns = images.clone();
    for c in &mut columns {
        c.push(Rational::one());
    }
    let system = RationalMatrix::from_columns(grid.len() + 1, &columns);
    let mut rhs = grid.to_vec();
    rhs.push(Rational::one());
    let weights = solve_affine(&system, &rhs).unique()?.to_vec();
    Some(exact::combination(&weights, frame.points(), space.ambient_dim()))
}

pub fn is_lifted_symmetry(w: &WignerRep, space: &StateSpace, phi: &PhasePointMap) -> Result<SymmetryCheck> {
    is_symmetry(w, space, &phi.lift().to_affine_map())
}

/// All permutations of the phase space whose lifts are symmetries of `W`,
/// in lexicographic order of their tables.
pub fn enumerate_lifted_symmetries(w: &WignerRep, space: &StateSpace) -> Result<Vec<PhasePointMap>> {
    let n = w.rows() * w.cols();
    if n > MAX_ENUMERATED_PHASE_POINTS {
        return Err(Error::GroupTooLarge {
            limit: (1..=MAX_ENUMERATED_PHASE_POINTS).product(),
        });
    }
    let mut out = Vec::new();
    for table in (0..n).permutations(n) {
        let phi = PhasePointMap::new(w.rows(), w.cols(), table)?;
        if is_lifted_symmetry(w, space, &phi)?.holds() {
            out.push(phi);
        }
    }
    Ok(out)
}

/// The effect equations `q_ab ∘ Φ = (Ψ ∘ W)_ab`.
pub fn transport_equations(w: &WignerRep, psi: &AffineMap) -> Vec<ChannelEquation> {
    let dim = w.dim();
    (0..w.rows() * w.cols())
        .map(|cell| {
            let mut rhs = AffineFunctional::constant(dim, psi.offset[cell].clone());
            for (j, q) in w.grid().iter().enumerate() {
                let c = &psi.matrix[(cell, j)];
                if !c.is_zero() {
                    rhs = &rhs + &q.scaled(c);
                }
            }
            (w.grid()[cell].clone(), rhs)
        })
        .collect()
}

/// A channel `Φ` with `Ψ ∘ W = W ∘ Φ`, or a proof that none exists.
pub fn find_transported_channel(w: &WignerRep, space: &StateSpace, psi: &AffineMap) -> Result<ChannelSearch> {
    find_channel(space, space, &transport_equations(w, psi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridMapSearch {
    /// `Ψ` with `Ψ ∘ W = W ∘ Φ`.
    Found(AffineMap),
    /// States with `W(first) = W(second)` but `W(Φ first) ≠ W(Φ second)`.
    Collapsed {
        first: Vec<Rational>,
        second: Vec<Rational>,
    },
}

/// A grid map `Ψ` with `Ψ ∘ W = W ∘ Φ` (polytopes only).
pub fn find_symmetry_for_channel(w: &WignerRep, space: &StateSpace, channel: &Channel) -> Result<GridMapSearch> {
    let vertices = space.require_vertices("the grid map search")?;
    let sources = w.images(vertices);
    let moved: Vec<Vec<Rational>> = vertices.iter().map(|v| channel.apply(v)).collect();
    let targets = w.images(&moved);
    Ok(match affine_extension(&sources, &targets, w.rows() * w.cols()) {
        Ok(map) => GridMapSearch::Found(map),
        Err(dep) => {
            // Split Σ c_k v_k into its positive and negative parts.
            let total: Rational = dep.coefficients.iter().filter(|c| c.is_positive()).sum();
            let dim = space.ambient_dim();
            let part = |positive: bool| {
                let weights: Vec<Rational> = dep
                    .coefficients
                    .iter()
                    .map(|c| {
                        if c.is_positive() == positive && !c.is_zero() {
                            c.abs() / &total
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect();
                exact::combination(&weights, vertices, dim)
            };
            let (first, second) = (part(true), part(false));
            let first_index = dep.coefficients.iter().position(Signed::is_positive);
            let second_index = dep.coefficients.iter().position(Signed::is_negative);
            if first_index <= second_index {
                GridMapSearch::Collapsed { first, second }
            } else {
                GridMapSearch::Collapsed {
                    first: second,
                    second: first,
                }
            }
        }
    })
}

/// The channel `W⁻¹ ∘ φ↑ ∘ W` induced by a lifted symmetry of a faithful
/// representation.
pub fn induced_action(w: &WignerRep, space: &StateSpace, phi: &PhasePointMap) -> Result<Channel> {
    if !w.is_faithful(space) {
        return Err(Error::NotFaithful);
    }
    if !is_lifted_symmetry(w, space, phi)?.holds() {
        return Err(Error::NotASymmetry);
    }
    let lift = phi.lift();
    let frame = space.frame();
    let images: Vec<Vec<Rational>> = frame
        .points()
        .iter()
        .map(|p| {
            let moved = lift.apply(&w.evaluate_unchecked(p));
            preimage(w, space, moved.entries()).expect("symmetry keeps the image inside W(K)")
        })
        .collect();
    Channel::new(space, frame.map_from_images(&images), space)
}

/// Result of [`is_g_symmetric`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSymmetry {
    pub order: usize,
    /// The first group element (in generation order) that fails, if any.
    pub failure: Option<(PhasePointMap, SymmetryCheck)>,
}

impl GroupSymmetry {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// The group generated by `generators`, breadth first from the identity.
pub fn generate_group(rows: usize, cols: usize, generators: &[PhasePointMap]) -> Result<Vec<PhasePointMap>> {
    let identity = PhasePointMap::identity(rows, cols);
    let mut seen = BTreeSet::from([identity.clone()]);
    let mut order = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let next = s.compose(&g);
            if seen.insert(next.clone()) {
                if seen.len() > MAX_GROUP_ORDER {
                    return Err(Error::GroupTooLarge { limit: MAX_GROUP_ORDER });
                }
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(order)
}

/// Whether the lift of every element of the generated group is a symmetry.
pub fn is_g_symmetric(w: &WignerRep, space: &StateSpace, generators: &[PhasePointMap]) -> Result<GroupSymmetry> {
    if let Some(bad) = generators.iter().find(|g| !g.is_permutation()) {
        return Err(Error::InvalidIndex(format!("generator {bad} is not a permutation")));
    }
    let group = generate_group(w.rows(), w.cols(), generators)?;
    for g in &group {
        let check = is_lifted_symmetry(w, space, g)?;
        if !check.holds() {
            return Ok(GroupSymmetry {
                order: group.len(),
                failure: Some((g.clone(), check)),
            });
        }
    }
    Ok(GroupSymmetry {
        order: group.len(),
        failure: None,
    })
}

/// Equations `f_a ∘ Φ = f_{g1⁻¹(a)}` and `f_b ∘ Φ = f_{g2⁻¹(b)}`.
pub fn permutation_equations(a: &Observable, b: &Observable, g: &ProductGroupElement) -> Vec<ChannelEquation> {
    let inv = g.inverse();
    let mut eqs = Vec::new();
    for x in 0..a.len() {
        eqs.push((a.effect(x).clone(), a.effect(inv.g1[x]).clone()));
    }
    for y in 0..b.len() {
        eqs.push((b.effect(y).clone(), b.effect(inv.g2[y]).clone()));
    }
    eqs
}

/// Why a permutation of outcomes has no channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelObstruction {
    pub element: ProductGroupElement,
    pub certificate: FarkasCertificate,
    /// When the equations alone fix the map: a vertex sent outside the space.
    pub witness: Option<(Vec<Rational>, Vec<Rational>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PermutationChannels {
    /// One channel per group element, sorted by element.
    Found(Vec<(ProductGroupElement, Channel)>),
    Infeasible(ChannelObstruction),
}

/// A user-supplied map for a group element (needed for balls).
pub type SuppliedChannel = (ProductGroupElement, AffineMap);

/// Channels realising every pair of outcome permutations.
///
/// Generator channels are solved for on polytopes, or looked up in
/// `supplied` and verified on balls; the rest of the group is obtained by
/// composition.
pub fn find_permutation_channels(
    a: &Observable,
    b: &Observable,
    space: &StateSpace,
    supplied: &[SuppliedChannel],
) -> Result<PermutationChannels> {
    let (rows, cols) = (a.len(), b.len());
    let group_order = factorial(rows).saturating_mul(factorial(cols));
    if group_order > MAX_GROUP_ORDER {
        return Err(Error::GroupTooLarge { limit: MAX_GROUP_ORDER });
    }
    let mut generator_channels = Vec::new();
    for g in product_generators(rows, cols) {
        let eqs = permutation_equations(a, b, &g);
        let given = supplied.iter().find(|(e, _)| *e == g);
        let channel = match (given, space.is_ball()) {
            (Some((_, map)), _) => verify_channel(space, space, map.clone(), &eqs)?,
            (None, true) => return Err(Error::ChannelsRequired),
            (None, false) => match find_channel(space, space, &eqs)? {
                ChannelSearch::Found(c) => c,
                ChannelSearch::Infeasible(certificate) => {
                    let witness = candidate_channel_map(space, space.ambient_dim(), &eqs)
                        .and_then(|m| match map_into(space, &m, space) {
                            Ok(MapCheck::Outside { point, image }) => Some((point, image)),
                            _ => None,
                        });
                    return Ok(PermutationChannels::Infeasible(ChannelObstruction {
                        element: g,
                        certificate,
                        witness,
                    }));
                }
            },
        };
        generator_channels.push((g, channel));
    }
    let identity = ProductGroupElement::identity(rows, cols);
    let mut found = BTreeMap::from([(identity.clone(), Channel::identity(space))]);
    let mut queue = VecDeque::from([identity]);
    while let Some(e) = queue.pop_front() {
        let current = found[&e].clone();
        for (s, phi) in &generator_channels {
            let next = s.compose(&e);
            if !found.contains_key(&next) {
                found.insert(next.clone(), phi.compose(&current));
                queue.push_back(next);
            }
        }
    }
    Ok(PermutationChannels::Found(found.into_iter().collect()))
}

fn factorial(n: usize) -> usize {
    (1..=n).fold(1usize, |acc, k| acc.saturating_mul(k))
}

/// The three hypotheses of the uniqueness theorem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypotheses {
    pub jointly_info_complete: bool,
    /// `None` when complementarity could not be decided (degenerate face
    /// on a ball).
    pub complementary: Option<bool>,
    pub surjective_a: bool,
    pub surjective_b: bool,
}

impl Hypotheses {
    pub fn evaluate(a: &Observable, b: &Observable, space: &StateSpace) -> Result<Self> {
        let complementary = match are_complementary(a, b, space) {
            Ok(w) => Some(w.is_none()),
            Err(Error::UnsupportedDegenerateFace { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            jointly_info_complete: jointly_info_complete(a, b, space),
            complementary,
            surjective_a: is_surjective(a, space)?.is_surjective(),
            surjective_b: is_surjective(b, space)?.is_surjective(),
        })
    }

    pub fn all_hold(&self) -> bool {
        self.jointly_info_complete && self.complementary == Some(true) && self.surjective_a && self.surjective_b
    }
}

/// Why no covariant representation exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// Some outcome permutation has no channel.
    Channel(ChannelObstruction),
    /// The channels exist but the covariance equations are inconsistent;
    /// the certificate has one multiplier per equation of
    /// [`covariance_system`] and none on inequalities.
    Covariance(FarkasCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CovariantOutcome {
    /// `symmetric` records the post-check that every lifted generator is a
    /// symmetry of the solution.
    Unique { rep: WignerRep, symmetric: bool },
    /// Solutions are `base + Σ t_i directions[i]` (grids of functionals
    /// with vanishing marginals).
    Family {
        base: WignerRep,
        directions: Vec<Vec<AffineFunctional>>,
    },
    None(Obstruction),
    /// The solver declined to run.
    HypothesisFailure(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovariantReport {
    pub hypotheses: Hypotheses,
    pub outcome: CovariantOutcome,
}

/// Linear system for covariant grids. Unknowns are the values of each
/// `q_ab` at the frame points (cell-major, row-major cells); equations are
/// the marginals at the frame points followed by `q_ab(Φ_g p_i) =
/// q_{g⁻¹(a,b)}(p_i)` for each generator `g`.
pub fn covariance_system(
    a: &Observable,
    b: &Observable,
    space: &StateSpace,
    generators: &[(ProductGroupElement, Channel)],
) -> (RationalMatrix, Vec<Rational>) {
    let (rows, cols) = (a.len(), b.len());
    let frame = space.frame();
    let k = frame.len();
    let var = |cell: usize, i: usize| cell * k + i;
    let n = rows * cols * k;
    let mut matrix_rows = Vec::new();
    let mut rhs = Vec::new();
    for x in 0..rows {
        for (i, p) in frame.points().iter().enumerate() {
            let mut row = vec![Rational::zero(); n];
            for y in 0..cols {
                row[var(x * cols + y, i)] = Rational::one();
            }
            matrix_rows.push(row);
            rhs.push(a.effect(x).eval(p));
        }
    }
    for y in 0..cols {
        for (i, p) in frame.points().iter().enumerate() {
            let mut row = vec![Rational::zero(); n];
            for x in 0..rows {
                row[var(x * cols + y, i)] = Rational::one();
            }
            matrix_rows.push(row);
            rhs.push(b.effect(y).eval(p));
        }
    }
    for (g, channel) in generators {
        let source = g.inverse().phase_map();
        for cell in 0..rows * cols {
            let pulled = source.apply(cell);
            for (i, p) in frame.points().iter().enumerate() {
                let weights = frame.barycentric(&channel.apply(p));
                let mut row = vec![Rational::zero(); n];
                for (j, w) in weights.iter().enumerate() {
                    row[var(cell, j)] += w;
                }
                row[var(pulled, i)] -= Rational::one();
                matrix_rows.push(row);
                rhs.push(Rational::zero());
            }
        }
    }
    (RationalMatrix::from_rows(n, &matrix_rows), rhs)
}

/// Finds the Wigner representations whose lifted outcome permutations act
/// through the permutation channels.
///
/// Without joint information completeness the channels need not be unique
/// and the solver declines unless `supplied` names them explicitly.
pub fn solve_covariant(
    a: &Observable,
    b: &Observable,
    space: &StateSpace,
    supplied: &[SuppliedChannel],
) -> Result<CovariantReport> {
    let hypotheses = Hypotheses::evaluate(a, b, space)?;
    if space.is_ball() && supplied.is_empty() {
        return Err(Error::ChannelsRequired);
    }
    if !hypotheses.jointly_info_complete && supplied.is_empty() {
        return Ok(CovariantReport {
            hypotheses,
            outcome: CovariantOutcome::HypothesisFailure(
                "observables are not jointly info-complete, so permutation channels are not unique".into(),
            ),
        });
    }
    let channels = match find_permutation_channels(a, b, space, supplied)? {
        PermutationChannels::Found(c) => c,
        PermutationChannels::Infeasible(obstruction) => {
            return Ok(CovariantReport {
                hypotheses,
                outcome: CovariantOutcome::None(Obstruction::Channel(obstruction)),
            })
        }
    };
    let generators: Vec<(ProductGroupElement, Channel)> = product_generators(a.len(), b.len())
        .into_iter()
        .map(|g| {
            let channel = channels.iter().find(|(e, _)| *e == g).expect("every generator has a channel").1.clone();
            (g, channel)
        })
        .collect();
    let (matrix, rhs) = covariance_system(a, b, space, &generators);
    let frame = space.frame();
    let k = frame.len();
    let to_grid = |values: &[Rational]| -> Vec<AffineFunctional> {
        values.chunks(k).map(|v| frame.functional_from_values(v)).collect()
    };
    let outcome = match solve_affine(&matrix, &rhs) {
        AffineSolution::Inconsistent { certificate } => CovariantOutcome::None(Obstruction::Covariance(FarkasCertificate {
            equality_multipliers: certificate,
            inequality_multipliers: Vec::new(),
        })),
        AffineSolution::Solved {
            particular,
            nullspace,
        } => {
            let base = WignerRep::new(a.clone(), b.clone(), to_grid(&particular))?;
            if nullspace.is_empty() {
                let mut symmetric = true;
                for (g, _) in &generators {
                    symmetric &= is_lifted_symmetry(&base, space, &g.phase_map())?.holds();
                }
                CovariantOutcome::Unique { rep: base, symmetric }
            } else {
                CovariantOutcome::Family {
                    base,
                    directions: nullspace.iter().map(|d| to_grid(d)).collect(),
                }
            }
        }
    };
    Ok(CovariantReport { hypotheses, outcome })
}
