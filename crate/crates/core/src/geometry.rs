//! State spaces (polytopes and balls), affine functionals and affine maps.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    self, affinely_independent_subset, dot, lp_feasible, norm_squared, rational_with_square_in,
    solve_affine, AffineSolution, FeasibilityResult, LinearProgram, Rational, RationalMatrix,
};

/// `x ↦ linear · x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineFunctional {
    pub linear: Vec<Rational>,
    pub constant: Rational,
}

impl AffineFunctional {
    pub fn new(linear: Vec<Rational>, constant: Rational) -> Self {
        Self { linear, constant }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, Rational::zero())
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, value: Rational) -> Self {
        Self::new(vec![Rational::zero(); dim], value)
    }

    /// The `i`-th ambient coordinate.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut linear = vec![Rational::zero(); dim];
        linear[i] = Rational::one();
        Self::new(linear, Rational::zero())
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.linear, x) + &self.constant
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && exact::is_zero_vector(&self.linear)
    }

    pub fn is_constant(&self) -> bool {
        exact::is_zero_vector(&self.linear)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self::new(exact::scale(&self.linear, factor), &self.constant * factor)
    }

    /// `self ∘ map`.
    pub fn compose(&self, map: &AffineMap) -> Self {
        let linear = map.matrix.transpose().mul_vec(&self.linear);
        let constant = dot(&self.linear, &map.offset) + &self.constant;
        Self::new(linear, constant)
    }

    /// Coefficients followed by the constant.
    pub fn to_row(&self) -> Vec<Rational> {
        let mut row = self.linear.clone();
        row.push(self.constant.clone());
        row
    }

    pub fn from_row(row: &[Rational]) -> Self {
        let (constant, linear) = row.split_last().expect("row holds at least the constant");
        Self::new(linear.to_vec(), constant.clone())
    }

    pub fn sum<'a>(dim: usize, items: impl IntoIterator<Item = &'a AffineFunctional>) -> Self {
        items
            .into_iter()
            .fold(Self::zero(dim), |acc, f| &acc + f)
    }
}

impl Add for &AffineFunctional {
    type Output = AffineFunctional;

    fn add(self, rhs: &AffineFunctional) -> AffineFunctional {
        AffineFunctional::new(exact::add(&self.linear, &rhs.linear), &self.constant + &rhs.constant)
    }
}

impl Sub for &AffineFunctional {
    type Output = AffineFunctional;

    fn sub(self, rhs: &AffineFunctional) -> AffineFunctional {
        AffineFunctional::new(exact::sub(&self.linear, &rhs.linear), &self.constant - &rhs.constant)
    }
}

impl Neg for &AffineFunctional {
    type Output = AffineFunctional;

    fn neg(self) -> AffineFunctional {
        self.scaled(&-Rational::one())
    }
}

impl Mul<&AffineFunctional> for &Rational {
    type Output = AffineFunctional;

    fn mul(self, rhs: &AffineFunctional) -> AffineFunctional {
        rhs.scaled(self)
    }
}

impl fmt::Display for AffineFunctional {
    /// Renders as `1/2*x0 - x1 + 1/4`; coordinates are named `x0, x1, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(Rational, String)> = self
            .linear
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.clone(), format!("x{i}")))
            .collect();
        if !self.constant.is_zero() || terms.is_empty() {
            terms.push((self.constant.clone(), String::new()));
        }
        for (k, (c, var)) in terms.iter().enumerate() {
            let magnitude = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (var.is_empty(), magnitude.is_one()) {
                (true, _) => write!(f, "{magnitude}")?,
                (false, true) => write!(f, "{var}")?,
                (false, false) => write!(f, "{magnitude}*{var}")?,
            }
        }
        Ok(())
    }
}

/// `x ↦ matrix · x + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub matrix: RationalMatrix,
    pub offset: Vec<Rational>,
}

impl AffineMap {
    pub fn new(matrix: RationalMatrix, offset: Vec<Rational>) -> Result<Self> {
        if matrix.rows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: offset.len(),
            });
        }
        Ok(Self { matrix, offset })
    }

    pub fn identity(dim: usize) -> Self {
        Self::linear(RationalMatrix::identity(dim))
    }

    pub fn linear(matrix: RationalMatrix) -> Self {
        let offset = vec![Rational::zero(); matrix.rows()];
        Self { matrix, offset }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        exact::add(&self.matrix.mul_vec(x), &self.offset)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            matrix: self.matrix.mul(&inner.matrix),
            offset: self.apply(&inner.offset),
        }
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.matrix.rows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}] + {}", row.join(", "), self.offset[i])?;
        }
        Ok(())
    }
}

/// A real number `rational + radical·√radicand` with an integer radicand
/// free of small square factors. Ball extremes are of this form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtremalValue {
    rational: Rational,
    radical: Rational,
    radicand: BigInt,
}

const TRIAL_DIVISION_LIMIT: u32 = 10_000;

impl ExtremalValue {
    pub fn rational(value: Rational) -> Self {
        Self {
            rational: value,
            radical: Rational::zero(),
            radicand: BigInt::zero(),
        }
    }

    /// `rational + radical·√radicand`; panics on a negative radicand.
    pub fn new(rational: Rational, radical: Rational, radicand: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        if radical.is_zero() || radicand.is_zero() {
            return Self::rational(rational);
        }
        // √(p/q) = √(pq)/q
        let mut n = radicand.numer() * radicand.denom();
        let mut radical = radical / Rational::from_integer(radicand.denom().clone());
        let mut k = BigInt::from(2u32);
        while k <= BigInt::from(TRIAL_DIVISION_LIMIT) && &k * &k <= n {
            let square = &k * &k;
            while (&n % &square).is_zero() {
                n /= &square;
                radical *= Rational::from_integer(k.clone());
            }
            k += 1u32;
        }
        let root = n.sqrt();
        if &root * &root == n {
            radical *= Rational::from_integer(root);
            n = BigInt::one();
        }
        if n.is_one() {
            return Self::rational(rational + radical);
        }
        Self {
            rational,
            radical,
            radicand: n,
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn radical_part(&self) -> &Rational {
        &self.radical
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.radical.is_zero().then_some(&self.rational)
    }

    /// Exact comparison of `self` against `t`.
    pub fn cmp_rational(&self, t: &Rational) -> Ordering {
        let d = t - &self.rational;
        if self.radical.is_zero() {
            return Rational::zero().cmp(&d);
        }
        // compare L = radical·√radicand with d
        let l_sign = sign(&self.radical);
        let d_sign = sign(&d);
        if l_sign != d_sign || d_sign == 0 {
            return l_sign.cmp(&d_sign);
        }
        let l_sq = &self.radical * &self.radical * Rational::from_integer(self.radicand.clone());
        let d_sq = &d * &d;
        if l_sign > 0 {
            l_sq.cmp(&d_sq)
        } else {
            d_sq.cmp(&l_sq)
        }
    }

    pub fn is_negative(&self) -> bool {
        self.cmp_rational(&Rational::zero()) == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.radical.is_zero() {
            return r;
        }
        let s = self.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
        r + self.radical.to_f64().unwrap_or(f64::NAN) * s
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for ExtremalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radical.is_zero() {
            return write!(f, "{}", self.rational);
        }
        let magnitude = self.radical.abs();
        let coefficient = if magnitude.is_one() {
            String::new()
        } else {
            format!("{magnitude}*")
        };
        let op = if self.radical.is_negative() { "-" } else { "+" };
        if self.rational.is_zero() {
            let lead = if self.radical.is_negative() { "-" } else { "" };
            write!(f, "{lead}{coefficient}sqrt({})", self.radicand)
        } else {
            write!(f, "{} {op} {coefficient}sqrt({})", self.rational, self.radicand)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Polytope { vertices: Vec<Vec<Rational>> },
    Ball { center: Vec<Rational>, radius: Rational },
}

/// `dim + 1` affinely independent points of a state space together with the
/// barycentric coordinate functionals they induce on its affine hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineFrame {
    points: Vec<Vec<Rational>>,
    barycentric: Vec<AffineFunctional>,
}

impl AffineFrame {
    fn new(points: Vec<Vec<Rational>>) -> Self {
        let ambient = points[0].len();
        let rows: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| {
                let mut r = p.clone();
                r.push(Rational::one());
                r
            })
            .collect();
        let system = RationalMatrix::from_rows(ambient + 1, &rows);
        let barycentric = (0..points.len())
            .map(|i| {
                let mut e = vec![Rational::zero(); points.len()];
                e[i] = Rational::one();
                match solve_affine(&system, &e) {
                    AffineSolution::Solved { particular, .. } => AffineFunctional::from_row(&particular),
                    AffineSolution::Inconsistent { .. } => {
                        unreachable!("frame points are affinely independent")
                    }
                }
            })
            .collect();
        Self { points, barycentric }
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Barycentric coordinate functionals; they agree with the true
    /// coordinates on the affine hull of the frame.
    pub fn barycentric_functionals(&self) -> &[AffineFunctional] {
        &self.barycentric
    }

    pub fn barycentric(&self, x: &[Rational]) -> Vec<Rational> {
        self.barycentric.iter().map(|b| b.eval(x)).collect()
    }

    /// Values of `f` at the frame points. On the affine hull these determine
    /// `f` completely.
    pub fn values(&self, f: &AffineFunctional) -> Vec<Rational> {
        self.points.iter().map(|p| f.eval(p)).collect()
    }

    /// The functional taking `values[i]` at frame point `i`.
    pub fn functional_from_values(&self, values: &[Rational]) -> AffineFunctional {
        let dim = self.points[0].len();
        let mut out = AffineFunctional::zero(dim);
        for (v, b) in values.iter().zip(&self.barycentric) {
            if !v.is_zero() {
                out = &out + &b.scaled(v);
            }
        }
        out
    }

    /// The affine map sending frame point `i` to `images[i]`.
    pub fn map_from_images(&self, images: &[Vec<Rational>]) -> AffineMap {
        let target = images[0].len();
        let source = self.points[0].len();
        let mut matrix = RationalMatrix::zeros(target, source);
        let mut offset = vec![Rational::zero(); target];
        for (img, b) in images.iter().zip(&self.barycentric) {
            for r in 0..target {
                if img[r].is_zero() {
                    continue;
                }
                for c in 0..source {
                    if !b.linear[c].is_zero() {
                        matrix[(r, c)] += &img[r] * &b.linear[c];
                    }
                }
                offset[r] += &img[r] * &b.constant;
            }
        }
        AffineMap { matrix, offset }
    }

    /// Whether `f` vanishes on the affine hull.
    pub fn vanishes(&self, f: &AffineFunctional) -> bool {
        self.points.iter().all(|p| f.eval(p).is_zero())
    }
}

/// A compact convex set: the hull of finitely many extreme points, or a
/// Euclidean ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    shape: Shape,
    frame: AffineFrame,
    frame_vertices: Vec<usize>,
}

impl StateSpace {
    /// Convex hull of `vertices`. Every listed point must be an extreme point
    /// and appear once.
    pub fn polytope(vertices: Vec<Vec<Rational>>) -> Result<Self> {
        let ambient = vertices.first().ok_or(Error::EmptyPolytope)?.len();
        if let Some(bad) = vertices.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: bad.len(),
            });
        }
        for (i, v) in vertices.iter().enumerate() {
            let others: Vec<Vec<Rational>> = vertices
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, w)| w.clone())
                .collect();
            if !others.is_empty() && hull_membership(&others, v).is_feasible() {
                return Err(Error::RedundantVertex { index: i });
            }
        }
        let frame_vertices = affinely_independent_subset(&vertices);
        let frame = AffineFrame::new(frame_vertices.iter().map(|&i| vertices[i].clone()).collect());
        Ok(Self {
            shape: Shape::Polytope { vertices },
            frame,
            frame_vertices,
        })
    }

    pub fn ball(center: Vec<Rational>, radius: Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::NonPositiveRadius);
        }
        let mut points = vec![center.clone()];
        for i in 0..center.len() {
            let mut p = center.clone();
            p[i] += &radius;
            points.push(p);
        }
        Ok(Self {
            shape: Shape::Ball { center, radius },
            frame: AffineFrame::new(points),
            frame_vertices: Vec::new(),
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.shape, Shape::Ball { .. })
    }

    pub fn vertices(&self) -> Option<&[Vec<Rational>]> {
        match &self.shape {
            Shape::Polytope { vertices } => Some(vertices),
            Shape::Ball { .. } => None,
        }
    }

    /// Vertices, or an error naming `operation` for balls.
    pub fn require_vertices(&self, operation: &str) -> Result<&[Vec<Rational>]> {
        self.vertices().ok_or_else(|| {
            Error::UnsupportedGeometry(format!("{operation} needs a polytope state space"))
        })
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.shape {
            Shape::Polytope { vertices } => vertices[0].len(),
            Shape::Ball { center, .. } => center.len(),
        }
    }

    /// Dimension of the affine hull.
    pub fn dimension(&self) -> usize {
        self.frame.len() - 1
    }

    pub fn frame(&self) -> &AffineFrame {
        &self.frame
    }

    /// For polytopes, indices of the vertices used as frame points.
    pub fn frame_vertex_indices(&self) -> &[usize] {
        &self.frame_vertices
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: len,
            });
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(match &self.shape {
            Shape::Polytope { vertices } => hull_membership(vertices, x).is_feasible(),
            Shape::Ball { center, radius } => {
                norm_squared(&exact::sub(x, center)) <= radius * radius
            }
        })
    }

    /// Minimum and maximum of `f` over the state space.
    pub fn extremal_range(&self, f: &AffineFunctional) -> Result<(ExtremalValue, ExtremalValue)> {
        self.check_dim(f.dim())?;
        Ok(match &self.shape {
            Shape::Polytope { vertices } => {
                let values: Vec<Rational> = vertices.iter().map(|v| f.eval(v)).collect();
                let min = values.iter().min().expect("nonempty polytope").clone();
                let max = values.iter().max().expect("nonempty polytope").clone();
                (ExtremalValue::rational(min), ExtremalValue::rational(max))
            }
            Shape::Ball { center, radius } => {
                let mid = f.eval(center);
                let sq = norm_squared(&f.linear);
                (
                    ExtremalValue::new(mid.clone(), -radius.clone(), sq.clone()),
                    ExtremalValue::new(mid, radius.clone(), sq),
                )
            }
        })
    }

    /// A rational point of the space where `f < threshold`, if one exists.
    pub fn point_below(&self, f: &AffineFunctional, threshold: &Rational) -> Result<Option<Vec<Rational>>> {
        self.check_dim(f.dim())?;
        Ok(match &self.shape {
            Shape::Polytope { vertices } => vertices.iter().find(|v| f.eval(v) < *threshold).cloned(),
            Shape::Ball { center, radius } => {
                let direction: Vec<Rational> = f.linear.iter().map(|c| -c.clone()).collect();
                let slope = norm_squared(&f.linear);
                // f(c + s·direction) = f(c) - s·slope
                let need = f.eval(center) - threshold;
                if need.is_negative() {
                    return Ok(Some(center.clone()));
                }
                if slope.is_zero() {
                    return Ok(None);
                }
                let lower = &need / &slope;
                let upper = radius * radius / &slope;
                if lower.clone() * &lower >= upper {
                    return Ok(None);
                }
                let s = rational_with_square_in(&(&lower * &lower), &upper);
                Some(exact::add(center, &exact::scale(&direction, &s)))
            }
        })
    }

    /// A rational point of the space where `f` attains its maximum, when
    /// that maximum is attained at a rational point (always for polytopes).
    pub fn rational_maximizer(&self, f: &AffineFunctional) -> Result<Option<Vec<Rational>>> {
        self.check_dim(f.dim())?;
        Ok(match &self.shape {
            Shape::Polytope { vertices } => vertices.iter().max_by(|a, b| f.eval(a).cmp(&f.eval(b))).cloned(),
            Shape::Ball { center, radius } => {
                let sq = norm_squared(&f.linear);
                if sq.is_zero() {
                    Some(center.clone())
                } else {
                    exact::rational_sqrt(&sq).map(|norm| {
                        exact::add(center, &exact::scale(&f.linear, &(radius / norm)))
                    })
                }
            }
        })
    }
}

/// Convex-combination program for `x ∈ conv(points)`: variables are the
/// weights, constrained nonnegative and summing to one.
pub fn hull_membership_program(points: &[Vec<Rational>], x: &[Rational]) -> LinearProgram {
    let n = points.len();
    let mut lp = LinearProgram::new(n);
    for (r, target) in x.iter().enumerate() {
        let row: Vec<Rational> = points.iter().map(|p| p[r].clone()).collect();
        lp.add_equality(row, target.clone());
    }
    lp.add_equality(vec![Rational::one(); n], Rational::one());
    for i in 0..n {
        lp.add_nonnegative(i);
    }
    lp
}

pub fn hull_membership(points: &[Vec<Rational>], x: &[Rational]) -> FeasibilityResult {
    lp_feasible(&hull_membership_program(points, x))
}

/// Result of [`map_into`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapCheck {
    /// The image lies inside the target. `exact` is false only when the
    /// verdict came from the numeric fallback for off-center ball maps.
    Inside { exact: bool },
    /// `point` lies in the source and `image` outside the target.
    Outside {
        point: Vec<Rational>,
        image: Vec<Rational>,
    },
}

impl MapCheck {
    pub fn is_inside(&self) -> bool {
        matches!(self, MapCheck::Inside { .. })
    }
}

const NUMERIC_TOLERANCE: f64 = 1e-12;

/// Decides whether `map` sends `source` into `target`.
///
/// Polytope sources are checked on their vertices. Ball to ball maps are
/// decided exactly for centered maps (a semidefiniteness test) and through
/// an exact sufficient norm bound otherwise, with a numeric search at
/// tolerance `1e-12` as the last resort.
pub fn map_into(source: &StateSpace, map: &AffineMap, target: &StateSpace) -> Result<MapCheck> {
    if map.source_dim() != source.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: source.ambient_dim(),
            found: map.source_dim(),
        });
    }
    if map.target_dim() != target.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: target.ambient_dim(),
            found: map.target_dim(),
        });
    }
    match (&source.shape, &target.shape) {
        (Shape::Polytope { vertices }, _) => {
            for v in vertices {
                let image = map.apply(v);
                if !target.contains(&image)? {
                    return Ok(MapCheck::Outside {
                        point: v.clone(),
                        image,
                    });
                }
            }
            Ok(MapCheck::Inside { exact: true })
        }
        (
            Shape::Ball {
                center: c1,
                radius: r1,
            },
            Shape::Ball {
                center: c2,
                radius: r2,
            },
        ) => ball_into_ball(c1, r1, map, c2, r2),
        (Shape::Ball { .. }, Shape::Polytope { .. }) => Err(Error::UnsupportedGeometry(
            "containment of a ball image in a polytope".into(),
        )),
    }
}

fn ball_into_ball(
    c1: &[Rational],
    r1: &Rational,
    map: &AffineMap,
    c2: &[Rational],
    r2: &Rational,
) -> Result<MapCheck> {
    let a = &map.matrix;
    let shift = exact::sub(&map.apply(c1), c2);
    let outside = |point: Vec<Rational>| {
        let image = map.apply(&point);
        MapCheck::Outside { point, image }
    };
    let r1_sq = r1 * r1;
    let r2_sq = r2 * r2;

    if exact::is_zero_vector(&shift) {
        // sup ‖A u‖ ≤ r2 / r1 over the unit ball ⟺ r2² I − r1² AᵀA ⪰ 0
        let ata = a.transpose().mul(a);
        let n = ata.rows();
        let mut q = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] = -&r1_sq * &ata[(i, j)];
            }
            q[(i, i)] += &r2_sq;
        }
        return Ok(match negative_direction(&q) {
            None => MapCheck::Inside { exact: true },
            Some(w) => {
                // r2²‖w‖² < r1²‖Aw‖²: pick s with s²‖Aw‖² > r2² and s²‖w‖² ≤ r1².
                let aw = a.mul_vec(&w);
                let lower = &r2_sq / norm_squared(&aw);
                let upper = &r1_sq / norm_squared(&w);
                let s = rational_with_square_in(&lower, &upper);
                outside(exact::add(c1, &exact::scale(&w, &s)))
            }
        });
    }

    let centre_image_sq = norm_squared(&shift);
    if centre_image_sq > r2_sq {
        return Ok(outside(c1.to_vec()));
    }
    // ‖d + r1 A u‖ ≤ ‖d‖ + r1‖A‖_F; the square of the bound is compared exactly.
    let frob: Rational = (0..a.rows()).map(|i| norm_squared(a.row(i))).sum();
    let p = &r1_sq * &frob;
    let slack = &r2_sq - &p - &centre_image_sq;
    if !slack.is_negative() && int4() * &p * &centre_image_sq <= &slack * &slack {
        return Ok(MapCheck::Inside { exact: true });
    }
    numeric_ball_check(c1, r1, map, c2, r2)
}

fn int4() -> Rational {
    exact::int(4)
}

fn numeric_ball_check(
    c1: &[Rational],
    r1: &Rational,
    map: &AffineMap,
    c2: &[Rational],
    r2: &Rational,
) -> Result<MapCheck> {
    let to_f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
    let n = map.source_dim();
    let m = map.target_dim();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|i| map.matrix.row(i).iter().map(to_f).collect())
        .collect();
    let shift: Vec<f64> = exact::sub(&map.apply(c1), c2).iter().map(to_f).collect();
    let rf = to_f(r1);
    let r2f = to_f(r2);
    let value = |u: &[f64]| -> f64 {
        (0..m)
            .map(|i| {
                let y = shift[i] + rf * (0..n).map(|j| a[i][j] * u[j]).sum::<f64>();
                y * y
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut best_u = vec![0.0; n];
    let mut best = value(&best_u);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; n];
            u[j] = s;
            starts.push(u);
        }
    }
    starts.push(vec![1.0 / (n as f64).sqrt(); n]);
    for mut u in starts {
        for _ in 0..500 {
            // ascent step u ← Aᵀ(A u r + d) normalized
            let y: Vec<f64> = (0..m)
                .map(|i| shift[i] + rf * (0..n).map(|j| a[i][j] * u[j]).sum::<f64>())
                .collect();
            let g: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[i][j] * y[i]).sum()).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let next: Vec<f64> = g.iter().map(|x| x / norm).collect();
            let moved = next.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            u = next;
            if moved < 1e-15 {
                break;
            }
        }
        let v = value(&u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    if best <= r2f * (1.0 + NUMERIC_TOLERANCE) {
        return Ok(MapCheck::Inside { exact: false });
    }
    // Turn the numeric maximiser into a rational point and confirm exactly.
    let scale = 1u64 << 40;
    let mut point: Vec<Rational> = best_u
        .iter()
        .map(|x| Rational::new(BigInt::from((x * scale as f64).round() as i64), BigInt::from(scale)))
        .collect();
    let norm = norm_squared(&point);
    if norm > Rational::one() {
        let shrink = Rational::new(BigInt::from(scale - 1), BigInt::from(scale));
        let factor = rational_with_square_in(&Rational::zero(), &(Rational::one() / norm)).max(Rational::zero());
        point = exact::scale(&point, &(factor * shrink));
    }
    let x = exact::add(c1, &exact::scale(&point, r1));
    let image = map.apply(&x);
    if norm_squared(&exact::sub(&image, c2)) > r2 * r2 {
        return Ok(MapCheck::Outside { point: x, image });
    }
    Err(Error::Inconclusive)
}

/// A vector `w` with `wᵀ Q w < 0`, or `None` when the symmetric matrix `Q`
/// is positive semidefinite. Uses congruent symmetric elimination, tracking
/// the change of basis so the witness is expressed in original coordinates.
pub fn negative_direction(q: &RationalMatrix) -> Option<Vec<Rational>> {
    let n = q.rows();
    let mut s = q.clone();
    let mut basis = RationalMatrix::identity(n);
    for k in 0..n {
        let pivot = s[(k, k)].clone();
        if pivot.is_negative() {
            return Some(basis.column(k));
        }
        if pivot.is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !s[(k, j)].is_zero()) {
                // (t e_k + e_j)ᵀ S (t e_k + e_j) = 2 t s_kj + s_jj < 0
                let t = -(s[(j, j)].abs() + Rational::one()) / (exact::int(2) * &s[(k, j)]);
                let mut w = exact::scale(&basis.column(k), &t);
                w = exact::add(&w, &basis.column(j));
                return Some(w);
            }
            continue;
        }
        for j in k + 1..n {
            if s[(k, j)].is_zero() {
                continue;
            }
            let f = &s[(k, j)] / &pivot;
            for i in 0..n {
                let v = &f * &s[(i, k)];
                s[(i, j)] -= v;
            }
            for i in 0..n {
                let v = &f * &s[(k, i)];
                s[(j, i)] -= v;
            }
            for i in 0..n {
                let v = &f * &basis[(i, k)];
                basis[(i, j)] -= v;
            }
        }
    }
    None
}

/// Weights showing that the sources are affinely dependent in a way the
/// targets do not follow: `Σ c_k s_k = 0`, `Σ c_k = 0`, `Σ c_k t_k ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineDependency {
    pub coefficients: Vec<Rational>,
}

/// An affine map sending `sources[k]` to `targets[k]` for every `k`.
///
/// On the orthogonal complement of the source hull's direction space the map
/// acts as the identity when source and target dimensions agree and as zero
/// otherwise; this choice is a convention, any extension would do.
pub fn affine_extension(
    sources: &[Vec<Rational>],
    targets: &[Vec<Rational>],
    target_dim: usize,
) -> std::result::Result<AffineMap, AffineDependency> {
    assert_eq!(sources.len(), targets.len(), "one target per source");
    let Some(first) = sources.first() else {
        return Ok(AffineMap::linear(RationalMatrix::zeros(target_dim, 0)));
    };
    let n = first.len();
    let basis = affinely_independent_subset(sources);

    // Affine dependencies of the remaining sources on the basis.
    let b0 = &sources[basis[0]];
    let directions: Vec<Vec<Rational>> = basis[1..].iter().map(|&i| exact::sub(&sources[i], b0)).collect();
    let dir_matrix = RationalMatrix::from_columns(n, &directions);
    for k in 0..sources.len() {
        if basis.contains(&k) {
            continue;
        }
        let rhs = exact::sub(&sources[k], b0);
        let coords = solve_affine(&dir_matrix, &rhs)
            .particular()
            .expect("basis spans the hull")
            .to_vec();
        let mut predicted = targets[basis[0]].clone();
        for (c, &i) in coords.iter().zip(&basis[1..]) {
            let step = exact::scale(&exact::sub(&targets[i], &targets[basis[0]]), c);
            predicted = exact::add(&predicted, &step);
        }
        if predicted != targets[k] {
            let mut coefficients = vec![Rational::zero(); sources.len()];
            let total: Rational = coords.iter().sum();
            coefficients[basis[0]] = Rational::one() - total;
            for (c, &i) in coords.iter().zip(&basis[1..]) {
                coefficients[i] = c.clone();
            }
            coefficients[k] = -Rational::one();
            return Err(AffineDependency { coefficients });
        }
    }

    // Complete the directions to a basis of the source space.
    let complement = if directions.is_empty() {
        RationalMatrix::zeros(0, n).nullspace()
    } else {
        RationalMatrix::from_rows(n, &directions).nullspace()
    };
    let mut columns = directions.clone();
    let mut images: Vec<Vec<Rational>> = basis[1..]
        .iter()
        .map(|&i| exact::sub(&targets[i], &targets[basis[0]]))
        .collect();
    for c in complement {
        images.push(if target_dim == n {
            c.clone()
        } else {
            vec![Rational::zero(); target_dim]
        });
        columns.push(c);
    }
    let full = RationalMatrix::from_columns(n, &columns);
    let inverse = full.inverse().expect("directions plus complement form a basis");
    let matrix = RationalMatrix::from_columns(target_dim, &images).mul(&inverse);
    let offset = exact::sub(&targets[basis[0]], &matrix.mul_vec(b0));
    Ok(AffineMap { matrix, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ints, rat, rats};

    fn square() -> StateSpace {
        StateSpace::polytope(vec![ints(&[0, 0]), ints(&[0, 1]), ints(&[1, 0]), ints(&[1, 1])]).unwrap()
    }

    fn unit_disk() -> StateSpace {
        StateSpace::ball(ints(&[0, 0]), int(1)).unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(square().dimension(), 2);
        assert_eq!(StateSpace::polytope(vec![ints(&[3, 4])]).unwrap().dimension(), 0);
        let mut cube = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    cube.push(ints(&[x, y, z]));
                }
            }
        }
        assert_eq!(StateSpace::polytope(cube).unwrap().dimension(), 3);
        assert_eq!(unit_disk().dimension(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(StateSpace::polytope(vec![]), Err(Error::EmptyPolytope));
        assert_eq!(
            StateSpace::polytope(vec![ints(&[0, 0]), ints(&[2, 0]), ints(&[1, 0])]),
            Err(Error::RedundantVertex { index: 2 })
        );
        assert_eq!(
            StateSpace::polytope(vec![ints(&[0, 0]), ints(&[0, 0])]),
            Err(Error::RedundantVertex { index: 0 })
        );
        assert_eq!(StateSpace::ball(ints(&[0]), int(0)), Err(Error::NonPositiveRadius));
    }

    #[test]
    fn membership() {
        let s = square();
        assert!(s.contains(&rats(&[(1, 2), (1, 2)])).unwrap());
        assert!(!s.contains(&ints(&[2, 0])).unwrap());
        assert!(unit_disk().contains(&rats(&[(3, 5), (4, 5)])).unwrap());
        assert!(!unit_disk().contains(&rats(&[(3, 5), (5, 5)])).unwrap());
    }

    #[test]
    fn extremal_values() {
        let s = square();
        let fx = AffineFunctional::coordinate(2, 0);
        let (lo, hi) = s.extremal_range(&fx).unwrap();
        assert_eq!((lo.as_rational(), hi.as_rational()), (Some(&int(0)), Some(&int(1))));

        let bloch = StateSpace::ball(ints(&[0, 0, 0]), int(1)).unwrap();
        let w00 = AffineFunctional::new(rats(&[(1, 4), (1, 4), (1, 4)]), rat(1, 4));
        let (lo, _) = bloch.extremal_range(&w00).unwrap();
        assert_eq!(lo, ExtremalValue::new(rat(1, 4), rat(-1, 4), int(3)));
        assert_eq!(lo.to_string(), "1/4 - 1/4*sqrt(3)");
        assert!(lo.is_negative());
        assert!((lo.to_f64() - (1.0 - 3f64.sqrt()) / 4.0).abs() < 1e-12);

        let c = AffineFunctional::constant(3, rat(2, 7));
        let (lo, hi) = bloch.extremal_range(&c).unwrap();
        assert_eq!(lo, ExtremalValue::rational(rat(2, 7)));
        assert_eq!(hi, ExtremalValue::rational(rat(2, 7)));
    }

    #[test]
    fn extremal_value_normalisation_and_order() {
        let v = ExtremalValue::new(int(0), int(1), int(12));
        assert_eq!(v, ExtremalValue::new(int(0), int(2), int(3)));
        assert_eq!(ExtremalValue::new(int(1), int(1), rat(9, 4)), ExtremalValue::rational(rat(5, 2)));
        let third = ExtremalValue::new(int(0), int(1), rat(1, 3));
        assert_eq!(third, ExtremalValue::new(int(0), rat(1, 3), int(3)));
        let root2 = ExtremalValue::new(int(0), int(1), int(2));
        assert_eq!(root2.cmp_rational(&rat(7, 5)), Ordering::Greater);
        assert_eq!(root2.cmp_rational(&rat(3, 2)), Ordering::Less);
        let neg = ExtremalValue::new(int(1), int(-1), int(2));
        assert_eq!(neg.cmp_rational(&int(0)), Ordering::Less);
        assert_eq!(neg.cmp_rational(&rat(-1, 2)), Ordering::Greater);
    }

    #[test]
    fn point_below_threshold() {
        let bloch = StateSpace::ball(ints(&[0, 0, 0]), int(1)).unwrap();
        let w00 = AffineFunctional::new(rats(&[(1, 4), (1, 4), (1, 4)]), rat(1, 4));
        let p = bloch.point_below(&w00, &int(0)).unwrap().unwrap();
        assert!(bloch.contains(&p).unwrap());
        assert!(w00.eval(&p).is_negative());
        assert_eq!(bloch.point_below(&AffineFunctional::one(3), &int(0)).unwrap(), None);
    }

    #[test]
    fn map_into_polytopes() {
        let s = square();
        assert_eq!(map_into(&s, &AffineMap::identity(2), &s), Ok(MapCheck::Inside { exact: true }));
        let stretch = AffineMap::linear(RationalMatrix::from_rows(2, &[ints(&[2, 0]), ints(&[0, 1])]));
        match map_into(&s, &stretch, &s).unwrap() {
            MapCheck::Outside { point, image } => {
                assert_eq!(point, ints(&[1, 0]));
                assert_eq!(image, ints(&[2, 0]));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn map_into_balls() {
        let bloch = StateSpace::ball(ints(&[0, 0, 0]), int(1)).unwrap();
        let swap = AffineMap::linear(RationalMatrix::from_rows(
            3,
            &[ints(&[0, -1, 0]), ints(&[-1, 0, 0]), ints(&[0, 0, 1])],
        ));
        assert_eq!(map_into(&bloch, &swap, &bloch), Ok(MapCheck::Inside { exact: true }));

        let grow = AffineMap::linear(RationalMatrix::from_rows(
            3,
            &[ints(&[1, 1, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])],
        ));
        match map_into(&bloch, &grow, &bloch).unwrap() {
            MapCheck::Outside { point, image } => {
                assert!(bloch.contains(&point).unwrap());
                assert!(!bloch.contains(&image).unwrap());
            }
            other => panic!("expected failure, got {other:?}"),
        }

        let half = AffineMap::new(
            RationalMatrix::from_rows(2, &[rats(&[(1, 4), (0, 1)]), rats(&[(0, 1), (1, 4)])]),
            rats(&[(1, 2), (0, 1)]),
        )
        .unwrap();
        assert_eq!(map_into(&unit_disk(), &half, &unit_disk()), Ok(MapCheck::Inside { exact: true }));

        // ‖A‖_F bound fails but the true norm fits: decided numerically.
        let tight = AffineMap::new(
            RationalMatrix::from_rows(2, &[rats(&[(1, 2), (0, 1)]), rats(&[(0, 1), (1, 2)])]),
            rats(&[(1, 3), (0, 1)]),
        )
        .unwrap();
        assert_eq!(map_into(&unit_disk(), &tight, &unit_disk()), Ok(MapCheck::Inside { exact: false }));

        let off = AffineMap::new(
            RationalMatrix::from_rows(2, &[rats(&[(1, 2), (0, 1)]), rats(&[(0, 1), (1, 2)])]),
            rats(&[(3, 5), (0, 1)]),
        )
        .unwrap();
        match map_into(&unit_disk(), &off, &unit_disk()).unwrap() {
            MapCheck::Outside { point, image } => {
                assert!(unit_disk().contains(&point).unwrap());
                assert!(!unit_disk().contains(&image).unwrap());
            }
            other => panic!("expected failure, got {other:?}"),
        }

        assert!(matches!(
            map_into(&unit_disk(), &AffineMap::identity(2), &square()),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn semidefinite_witness() {
        let q = RationalMatrix::from_rows(2, &[ints(&[0, 1]), ints(&[1, 0])]);
        let w = negative_direction(&q).unwrap();
        assert!(dot(&w, &q.mul_vec(&w)).is_negative());
        let psd = RationalMatrix::from_rows(2, &[ints(&[1, 1]), ints(&[1, 1])]);
        assert_eq!(negative_direction(&psd), None);
        let q = RationalMatrix::from_rows(3, &[ints(&[2, 2, 0]), ints(&[2, 1, 0]), ints(&[0, 0, 5])]);
        let w = negative_direction(&q).unwrap();
        assert!(dot(&w, &q.mul_vec(&w)).is_negative());
    }

    #[test]
    fn frames_reconstruct_functionals() {
        let s = square();
        let f = AffineFunctional::new(rats(&[(1, 2), (-3, 1)]), rat(2, 3));
        let values = s.frame().values(&f);
        assert_eq!(s.frame().functional_from_values(&values), f);

        // A segment in the plane: functionals are only determined on the line.
        let seg = StateSpace::polytope(vec![ints(&[0, 0]), ints(&[1, 1])]).unwrap();
        assert_eq!(seg.dimension(), 1);
        let g = AffineFunctional::coordinate(2, 0);
        let h = seg.frame().functional_from_values(&seg.frame().values(&g));
        assert_eq!(h.eval(&rats(&[(1, 3), (1, 3)])), rat(1, 3));
    }

    #[test]
    fn affine_extension_roundtrip() {
        let sources = vec![ints(&[0, 0]), ints(&[1, 0]), ints(&[0, 1]), ints(&[1, 1])];
        let targets = vec![ints(&[1, 0]), ints(&[0, 0]), ints(&[1, 1]), ints(&[0, 1])];
        let m = affine_extension(&sources, &targets, 2).unwrap();
        for (s, t) in sources.iter().zip(&targets) {
            assert_eq!(&m.apply(s), t);
        }
        let broken = vec![ints(&[1, 0]), ints(&[0, 0]), ints(&[1, 1]), ints(&[5, 1])];
        let dep = affine_extension(&sources, &broken, 2).unwrap_err();
        let total: Rational = dep.coefficients.iter().sum();
        assert!(total.is_zero());
        assert!(exact::is_zero_vector(&exact::combination(&dep.coefficients, &sources, 2)));
        assert!(!exact::is_zero_vector(&exact::combination(&dep.coefficients, &broken, 2)));
    }

    #[test]
    fn functional_display() {
        let f = AffineFunctional::new(rats(&[(1, 2), (-1, 1)]), rat(1, 4));
        assert_eq!(f.to_string(), "1/2*x0 - x1 + 1/4");
        assert_eq!(AffineFunctional::zero(2).to_string(), "0");
        assert_eq!(AffineFunctional::new(ints(&[-1, 0]), int(1)).to_string(), "-x0 + 1");
    }
}
