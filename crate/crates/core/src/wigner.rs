//! Wigner representations: grids of affine functionals whose row and column
//! sums reproduce the effects of two observables.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{lp_feasible, FarkasCertificate, FeasibilityResult, LinearProgram, Rational, RationalMatrix};
use crate::geometry::{affine_extension, AffineFunctional, AffineMap, ExtremalValue, StateSpace};
use crate::theory::{effect_span_rank, Observable};

/// A signed distribution on `A × B`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedGrid {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl SignedGrid {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::GridShape { rows, cols });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::GridShape {
                rows: rows.len(),
                cols,
            });
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> &Rational {
        &self.entries[a * self.cols + b]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn total(&self) -> Rational {
        self.entries.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.entries.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|b| (0..self.rows).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        self.entries.chunks(self.cols).map(<[Rational]>::to_vec).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative())
    }
}

impl fmt::Display for SignedGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// The phase point whose row and column are completed from the marginals
/// when building a family member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub a: usize,
    pub b: usize,
}

impl Anchor {
    /// Last outcome of each observable.
    pub fn last(a: &Observable, b: &Observable) -> Self {
        Self {
            a: a.len() - 1,
            b: b.len() - 1,
        }
    }

    /// Grid cells that carry a free functional, row-major.
    pub fn free_cells(&self, rows: usize, cols: usize) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for x in (0..rows).filter(|&x| x != self.a) {
            for y in (0..cols).filter(|&y| y != self.b) {
                cells.push((x, y));
            }
        }
        cells
    }
}

/// Which marginal identity failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Marginal {
    Row(usize),
    Column(usize),
}

/// `residual = Σ entries − effect` for the failing row or column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalViolation {
    pub marginal: Marginal,
    pub residual: AffineFunctional,
}

impl fmt::Display for MarginalViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.marginal {
            Marginal::Row(a) => write!(f, "row {a} sums to its effect plus {}", self.residual),
            Marginal::Column(b) => write!(f, "column {b} sums to its effect plus {}", self.residual),
        }
    }
}

/// Affine functionals `q_ab`, one per phase point, with row sums equal to
/// the effects of `A` and column sums equal to the effects of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WignerRep {
    obs_a: Observable,
    obs_b: Observable,
    grid: Vec<AffineFunctional>,
}

impl WignerRep {
    /// `grid` is row-major over `A × B`; the marginals are checked
    /// coefficient by coefficient.
    pub fn new(obs_a: Observable, obs_b: Observable, grid: Vec<AffineFunctional>) -> Result<Self> {
        let rep = Self::new_unchecked(obs_a, obs_b, grid)?;
        if let Err(v) = rep.check_marginals() {
            return Err(Error::Marginals(v.to_string()));
        }
        Ok(rep)
    }

    /// Checks the shape but not the marginals.
    pub fn new_unchecked(obs_a: Observable, obs_b: Observable, grid: Vec<AffineFunctional>) -> Result<Self> {
        let (rows, cols) = (obs_a.len(), obs_b.len());
        if grid.len() != rows * cols {
            return Err(Error::GridShape { rows, cols });
        }
        let dim = obs_a.dim();
        for d in [obs_b.dim()].into_iter().chain(grid.iter().map(AffineFunctional::dim)) {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        Ok(Self { obs_a, obs_b, grid })
    }

    pub fn obs_a(&self) -> &Observable {
        &self.obs_a
    }

    pub fn obs_b(&self) -> &Observable {
        &self.obs_b
    }

    pub fn rows(&self) -> usize {
        self.obs_a.len()
    }

    pub fn cols(&self) -> usize {
        self.obs_b.len()
    }

    pub fn dim(&self) -> usize {
        self.obs_a.dim()
    }

    pub fn grid(&self) -> &[AffineFunctional] {
        &self.grid
    }

    pub fn entry(&self, a: usize, b: usize) -> &AffineFunctional {
        &self.grid[a * self.cols() + b]
    }

    /// The grid at `x`, which must lie in `space`.
    pub fn evaluate(&self, space: &StateSpace, x: &[Rational]) -> Result<SignedGrid> {
        if !space.contains(x)? {
            return Err(Error::OutsideStateSpace);
        }
        Ok(self.evaluate_unchecked(x))
    }

    pub fn evaluate_unchecked(&self, x: &[Rational]) -> SignedGrid {
        SignedGrid {
            rows: self.rows(),
            cols: self.cols(),
            entries: self.grid.iter().map(|q| q.eval(x)).collect(),
        }
    }

    /// Row-major image vectors of the given points.
    pub fn images(&self, points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        points.iter().map(|p| self.evaluate_unchecked(p).into_entries()).collect()
    }

    /// Verifies both marginal identities as identities of functionals.
    pub fn check_marginals(&self) -> std::result::Result<(), MarginalViolation> {
        let dim = self.dim();
        for a in 0..self.rows() {
            let sum = AffineFunctional::sum(dim, (0..self.cols()).map(|b| self.entry(a, b)));
            let residual = &sum - self.obs_a.effect(a);
            if !residual.is_zero() {
                return Err(MarginalViolation {
                    marginal: Marginal::Row(a),
                    residual,
                });
            }
        }
        for b in 0..self.cols() {
            let sum = AffineFunctional::sum(dim, (0..self.rows()).map(|a| self.entry(a, b)));
            let residual = &sum - self.obs_b.effect(b);
            if !residual.is_zero() {
                return Err(MarginalViolation {
                    marginal: Marginal::Column(b),
                    residual,
                });
            }
        }
        Ok(())
    }

    /// Adds `t` at `(a1, b1)` and `(a2, b2)` and subtracts it at `(a1, b2)`
    /// and `(a2, b1)`; the marginals are unchanged.
    pub fn perturb(&self, a1: usize, a2: usize, b1: usize, b2: usize, t: &Rational) -> Result<Self> {
        self.perturb_with(a1, a2, b1, b2, &AffineFunctional::constant(self.dim(), t.clone()))
    }

    /// As [`perturb`](Self::perturb) with an affine functional in place of
    /// the scalar.
    pub fn perturb_with(&self, a1: usize, a2: usize, b1: usize, b2: usize, t: &AffineFunctional) -> Result<Self> {
        if a1 == a2 || b1 == b2 {
            return Err(Error::InvalidIndex("perturbation needs two distinct rows and two distinct columns".into()));
        }
        if a1.max(a2) >= self.rows() || b1.max(b2) >= self.cols() {
            return Err(Error::InvalidIndex(format!(
                "perturbation outside the {}x{} grid",
                self.rows(),
                self.cols()
            )));
        }
        let mut out = self.clone();
        let cols = self.cols();
        for (a, b, add) in [(a1, b1, true), (a2, b2, true), (a1, b2, false), (a2, b1, false)] {
            let cell = &mut out.grid[a * cols + b];
            *cell = if add { &*cell + t } else { &*cell - t };
        }
        Ok(out)
    }

    /// Decides whether every `q_ab` is nonnegative on the space.
    pub fn is_positive(&self, space: &StateSpace) -> Result<Positivity> {
        for a in 0..self.rows() {
            for b in 0..self.cols() {
                let q = self.entry(a, b);
                let (minimum, _) = space.extremal_range(q)?;
                if !minimum.is_negative() {
                    continue;
                }
                let point = space.point_below(q, &Rational::zero())?;
                let value = point.as_ref().map(|p| q.eval(p));
                let direction = space
                    .is_ball()
                    .then(|| q.linear.iter().map(|c| -c.clone()).collect());
                return Ok(Positivity::Negative(Box::new(NegativityWitness {
                    row: a,
                    col: b,
                    minimum,
                    point,
                    value,
                    direction,
                })));
            }
        }
        Ok(Positivity::Positive)
    }

    /// Dimension of the span of the `q_ab` as functions on the space.
    pub fn representation_rank(&self, space: &StateSpace) -> usize {
        let frame = space.frame();
        let rows: Vec<Vec<Rational>> = self.grid.iter().map(|q| frame.values(q)).collect();
        RationalMatrix::from_rows(frame.len(), &rows).rank()
    }

    /// Whether distinct states have distinct images.
    pub fn is_faithful(&self, space: &StateSpace) -> bool {
        self.representation_rank(space) == space.dimension() + 1
    }
}

/// A phase point whose quasi-probability goes negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativityWitness {
    pub row: usize,
    pub col: usize,
    /// Exact minimum of the entry over the space.
    pub minimum: ExtremalValue,
    /// A rational state with a negative entry.
    pub point: Option<Vec<Rational>>,
    /// The entry at `point`.
    pub value: Option<Rational>,
    /// For balls, the direction from the center towards the minimiser.
    pub direction: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    Negative(Box<NegativityWitness>),
}

impl Positivity {
    pub fn is_positive(&self) -> bool {
        matches!(self, Positivity::Positive)
    }
}

/// Builds the family member with the given free functionals.
///
/// `free` lists one functional per cell off the anchored row and column, in
/// row-major order. The anchored row and column are completed from the
/// marginals, and the anchor cell from normalisation.
pub fn construct_family(a: &Observable, b: &Observable, anchor: Anchor, free: &[AffineFunctional]) -> Result<WignerRep> {
    let (rows, cols) = (a.len(), b.len());
    if anchor.a >= rows || anchor.b >= cols {
        return Err(Error::InvalidIndex(format!("anchor ({}, {}) outside the grid", anchor.a, anchor.b)));
    }
    let cells = anchor.free_cells(rows, cols);
    if free.len() != cells.len() {
        return Err(Error::FreeParameterCount {
            expected: cells.len(),
            found: free.len(),
        });
    }
    let dim = a.dim();
    let mut grid = vec![AffineFunctional::zero(dim); rows * cols];
    for (&(x, y), q) in cells.iter().zip(free) {
        grid[x * cols + y] = q.clone();
    }
    for x in (0..rows).filter(|&x| x != anchor.a) {
        let taken = AffineFunctional::sum(dim, (0..cols).filter(|&y| y != anchor.b).map(|y| &grid[x * cols + y]));
        grid[x * cols + anchor.b] = a.effect(x) - &taken;
    }
    for y in (0..cols).filter(|&y| y != anchor.b) {
        let taken = AffineFunctional::sum(dim, (0..rows).filter(|&x| x != anchor.a).map(|x| &grid[x * cols + y]));
        grid[anchor.a * cols + y] = b.effect(y) - &taken;
    }
    let taken = AffineFunctional::sum(
        dim,
        (0..cols).filter(|&y| y != anchor.b).map(|y| &grid[anchor.a * cols + y]),
    );
    grid[anchor.a * cols + anchor.b] = a.effect(anchor.a) - &taken;
    WignerRep::new(a.clone(), b.clone(), grid)
}

/// The member with every free functional zero. It separates only what the
/// effects of `A` and `B` separate.
pub fn degenerate_rep(a: &Observable, b: &Observable, anchor: Anchor) -> Result<WignerRep> {
    let count = (a.len() - 1) * (b.len() - 1);
    construct_family(a, b, anchor, &vec![AffineFunctional::zero(a.dim()); count])
}

/// Both sides of the counting condition for a faithful member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaithfulChoice {
    /// `(|A| − 1)(|B| − 1)`.
    pub free_slots: usize,
    /// `dim K + 1 − rank(span of all effects)`.
    pub required: usize,
    pub possible: bool,
}

pub fn faithful_choice_possible(a: &Observable, b: &Observable, space: &StateSpace) -> FaithfulChoice {
    let free_slots = (a.len() - 1) * (b.len() - 1);
    let required = space.dimension() + 1 - effect_span_rank(a, b, space);
    FaithfulChoice {
        free_slots,
        required,
        possible: free_slots >= required,
    }
}

/// A faithful member, built by filling free cells one at a time with the
/// first barycentric coordinate functional that raises the rank. `None`
/// when the counting condition fails.
pub fn faithful_member(a: &Observable, b: &Observable, space: &StateSpace, anchor: Anchor) -> Result<Option<WignerRep>> {
    let frame = space.frame();
    let mut rows: Vec<Vec<Rational>> = a.effects().iter().chain(b.effects()).map(|f| frame.values(f)).collect();
    let mut rank = RationalMatrix::from_rows(frame.len(), &rows).rank();
    let mut free = Vec::new();
    for _ in anchor.free_cells(a.len(), b.len()) {
        let mut chosen = AffineFunctional::zero(a.dim());
        if rank < frame.len() {
            for beta in frame.barycentric_functionals() {
                let mut trial = rows.clone();
                trial.push(frame.values(beta));
                let r = RationalMatrix::from_rows(frame.len(), &trial).rank();
                if r > rank {
                    rows = trial;
                    rank = r;
                    chosen = beta.clone();
                    break;
                }
            }
        }
        free.push(chosen);
    }
    let rep = construct_family(a, b, anchor, &free)?;
    Ok(rep.is_faithful(space).then_some(rep))
}

/// An affine map `Λ` on grids with `Λ ∘ W1 = W2` on the space. Both
/// representations must be faithful. Off the affine hull of `W1(K)` the map
/// is extended by the identity on the orthogonal complement.
pub fn isomorphism(w1: &WignerRep, w2: &WignerRep, space: &StateSpace) -> Result<AffineMap> {
    if !w1.is_faithful(space) || !w2.is_faithful(space) {
        return Err(Error::NotFaithful);
    }
    if w1.rows() * w1.cols() != w2.rows() * w2.cols() {
        return Err(Error::GridShape {
            rows: w1.rows(),
            cols: w1.cols(),
        });
    }
    let points = space.frame().points();
    affine_extension(&w1.images(points), &w2.images(points), w2.rows() * w2.cols())
        .map_err(|_| Error::NotFaithful)
}

/// Homogeneous marginal system of an `rows × cols` grid: one equation per
/// row sum and per column sum, unknowns row-major. Its kernel is the set of
/// directions along which a family member can move.
pub fn marginal_system(rows: usize, cols: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(rows + cols, rows * cols);
    for a in 0..rows {
        for b in 0..cols {
            m[(a, a * cols + b)] = Rational::one();
            m[(rows + b, a * cols + b)] = Rational::one();
        }
    }
    m
}

/// Coefficients of every grid cell in terms of the free cells, for the
/// completion performed by [`construct_family`].
fn completion_coefficients(rows: usize, cols: usize, anchor: Anchor) -> Vec<Vec<Rational>> {
    let cells = anchor.free_cells(rows, cols);
    let mut out = vec![vec![Rational::zero(); cells.len()]; rows * cols];
    for (s, &(x, y)) in cells.iter().enumerate() {
        out[x * cols + y][s] += Rational::one();
        out[x * cols + anchor.b][s] -= Rational::one();
        out[anchor.a * cols + y][s] -= Rational::one();
        out[anchor.a * cols + anchor.b][s] += Rational::one();
    }
    out
}

/// Program searching the family for a positive member. Variables are the
/// values of the free functionals at the frame points (slot-major);
/// inequalities require every cell to be nonnegative at every vertex.
pub fn positive_member_program(a: &Observable, b: &Observable, space: &StateSpace, anchor: Anchor) -> Result<LinearProgram> {
    let vertices = space.require_vertices("the positive member search")?;
    let base = degenerate_rep(a, b, anchor)?;
    let frame = space.frame();
    let k = frame.len();
    let coefficients = completion_coefficients(a.len(), b.len(), anchor);
    let slots = coefficients.first().map_or(0, Vec::len);
    let mut lp = LinearProgram::new(slots * k);
    for v in vertices {
        let weights = frame.barycentric(v);
        for (cell, coeff) in coefficients.iter().enumerate() {
            let mut terms = Vec::new();
            for (s, c) in coeff.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (i, w) in weights.iter().enumerate().filter(|(_, w)| !w.is_zero()) {
                    terms.push((s * k + i, c * w));
                }
            }
            lp.add_sparse_inequality(&terms, -base.grid[cell].eval(v));
        }
    }
    Ok(lp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositiveSearch {
    Found(WignerRep),
    Infeasible(FarkasCertificate),
}

/// Searches the family of `A`, `B` for a positive member (polytopes only).
pub fn find_positive_member(a: &Observable, b: &Observable, space: &StateSpace, anchor: Anchor) -> Result<PositiveSearch> {
    let lp = positive_member_program(a, b, space, anchor)?;
    Ok(match lp_feasible(&lp) {
        FeasibilityResult::Feasible(x) => {
            let k = space.frame().len();
            let free: Vec<AffineFunctional> = x.chunks(k).map(|v| space.frame().functional_from_values(v)).collect();
            PositiveSearch::Found(construct_family(a, b, anchor, &free)?)
        }
        FeasibilityResult::Infeasible(cert) => PositiveSearch::Infeasible(cert),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ints, rat, rats};

    fn square() -> StateSpace {
        StateSpace::polytope(vec![ints(&[0, 0]), ints(&[0, 1]), ints(&[1, 0]), ints(&[1, 1])]).unwrap()
    }

    fn boxworld() -> (Observable, Observable) {
        (
            Observable::binary("A", AffineFunctional::coordinate(2, 0)),
            Observable::binary("B", AffineFunctional::coordinate(2, 1)),
        )
    }

    fn grid(rows: &[&[(i64, i64)]]) -> SignedGrid {
        SignedGrid::from_rows(&rows.iter().map(|r| rats(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn w0_values() {
        let (a, b) = boxworld();
        let w0 = degenerate_rep(&a, &b, Anchor::last(&a, &b)).unwrap();
        let s = square();
        assert_eq!(
            w0.evaluate(&s, &ints(&[1, 1])).unwrap(),
            grid(&[&[(0, 1), (1, 1)], &[(1, 1), (-1, 1)]])
        );
        let Positivity::Negative(w) = w0.is_positive(&s).unwrap() else {
            panic!("W_0 is not positive");
        };
        assert_eq!((w.row, w.col, w.point, w.value), (1, 1, Some(ints(&[1, 1])), Some(int(-1))));
        assert!(w0.is_faithful(&s));
    }

    #[test]
    fn perturbation_keeps_marginals() {
        let (a, b) = boxworld();
        let w0 = degenerate_rep(&a, &b, Anchor::last(&a, &b)).unwrap();
        let w = w0.perturb(0, 1, 0, 1, &int(1)).unwrap();
        assert!(w.check_marginals().is_ok());
        assert_ne!(w, w0);
        assert_eq!(w.entry(0, 0), &AffineFunctional::constant(2, int(1)));
        assert_eq!(w.perturb(0, 1, 0, 1, &int(-1)).unwrap(), w0);
        assert_eq!(w0.perturb(0, 1, 0, 1, &int(0)).unwrap(), w0);
        assert!(w0.perturb(0, 0, 0, 1, &int(1)).is_err());
    }

    #[test]
    fn bumped_entry_is_reported() {
        let (a, b) = boxworld();
        let w0 = degenerate_rep(&a, &b, Anchor::last(&a, &b)).unwrap();
        let mut cells = w0.grid().to_vec();
        cells[2] = &cells[2] + &AffineFunctional::one(2);
        let bad = WignerRep::new_unchecked(a.clone(), b.clone(), cells.clone()).unwrap();
        let v = bad.check_marginals().unwrap_err();
        assert_eq!(v.marginal, Marginal::Row(1));
        assert!(matches!(WignerRep::new(a, b, cells), Err(Error::Marginals(_))));
    }

    #[test]
    fn free_parameter_count() {
        let (a, b) = boxworld();
        assert_eq!(
            construct_family(&a, &b, Anchor::last(&a, &b), &[]),
            Err(Error::FreeParameterCount { expected: 1, found: 0 })
        );
        for (r, c) in [(2, 2), (2, 3), (3, 3), (1, 4)] {
            assert_eq!(marginal_system(r, c).nullspace().len(), (r - 1) * (c - 1));
        }
    }

    #[test]
    fn counting_condition() {
        let (a, b) = boxworld();
        let s = square();
        assert_eq!(
            faithful_choice_possible(&a, &b, &s),
            FaithfulChoice {
                free_slots: 1,
                required: 0,
                possible: true
            }
        );
        let segment = StateSpace::polytope(vec![ints(&[0, 0]), ints(&[1, 0]), ints(&[0, 1])]).unwrap();
        let t = Observable::trivial("T", 2);
        let f = Observable::binary("F", AffineFunctional::new(ints(&[-1, -1]), int(1)));
        let choice = faithful_choice_possible(&f, &t, &segment);
        assert_eq!((choice.free_slots, choice.required, choice.possible), (0, 1, false));
        assert_eq!(faithful_member(&f, &t, &segment, Anchor::last(&f, &t)).unwrap(), None);
    }

    #[test]
    fn positive_member_search() {
        let (a, b) = boxworld();
        let s = square();
        assert!(matches!(
            find_positive_member(&a, &b, &s, Anchor::last(&a, &b)).unwrap(),
            PositiveSearch::Infeasible(_)
        ));
        let half = rat(1, 2);
        let c = Observable::binary("C", AffineFunctional::coordinate(2, 0).scaled(&half));
        let d = Observable::binary("D", AffineFunctional::coordinate(2, 1).scaled(&half));
        let PositiveSearch::Found(w) = find_positive_member(&c, &d, &s, Anchor::last(&c, &d)).unwrap() else {
            panic!("C and D are compatible");
        };
        assert!(w.is_positive(&s).unwrap().is_positive());
    }

    #[test]
    fn ball_negativity() {
        let bloch = StateSpace::ball(ints(&[0, 0, 0]), int(1)).unwrap();
        let quarter = rat(1, 4);
        let a = Observable::binary("A", AffineFunctional::new(rats(&[(0, 1), (0, 1), (1, 2)]), rat(1, 2)));
        let b = Observable::binary("B", AffineFunctional::new(rats(&[(1, 2), (0, 1), (0, 1)]), rat(1, 2)));
        let q = |sx: i64, sy: i64, sz: i64| AffineFunctional::new(rats(&[(sx, 4), (sy, 4), (sz, 4)]), quarter.clone());
        let w = WignerRep::new(a, b, vec![q(1, 1, 1), q(-1, -1, 1), q(1, -1, -1), q(-1, 1, -1)]).unwrap();
        let Positivity::Negative(n) = w.is_positive(&bloch).unwrap() else {
            panic!("qubit grid has negative entries");
        };
        assert_eq!((n.row, n.col), (0, 0));
        assert_eq!(n.minimum, ExtremalValue::new(rat(1, 4), rat(-1, 4), int(3)));
        assert_eq!(n.direction, Some(rats(&[(-1, 4), (-1, 4), (-1, 4)])));
        let p = n.point.unwrap();
        assert!(bloch.contains(&p).unwrap());
        assert!(n.value.unwrap().is_negative());
        assert!(w.is_faithful(&bloch));
    }
}
