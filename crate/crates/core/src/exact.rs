//! Exact rational scalars, dense matrices, affine solving and LP feasibility.
//!
//! Nothing in this module touches floating point. Feasibility questions are
//! answered by a dense simplex (Bland's rule) whose answers are checked before
//! they are returned: a feasible program yields a witness that satisfies every
//! constraint exactly, an infeasible one yields Farkas multipliers.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary precision fraction, always reduced with a positive denominator.
pub type Rational = BigRational;

/// `num/den` as a [`Rational`]. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(num.into(), den.into())
}

/// Integer `n` as a [`Rational`].
pub fn int(n: i64) -> Rational {
    BigRational::from_integer(n.into())
}

/// Converts a slice of `(num, den)` pairs.
pub fn rats(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(n, d)| rat(n, d)).collect()
}

/// Converts a slice of integers.
pub fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&n| int(n)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.25"`.
///
/// Decimals are read digit by digit, so `"0.1"` is exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_integer(num.trim()).ok_or_else(malformed)?;
        let den: BigInt = parse_integer(den.trim()).ok_or_else(malformed)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        if !digits.bytes().all(|c| c.is_ascii_digit()) || (digits.is_empty() && frac.is_empty()) {
            return Err(malformed());
        }
        let combined = format!("{digits}{frac}");
        let mut num: BigInt = combined.parse().map_err(|_| malformed())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    parse_integer(s).map(BigRational::from_integer).ok_or_else(malformed)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_squared(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], factor: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * factor).collect()
}

pub fn is_zero_vector(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// `Σ weights[i] · points[i]`.
pub fn combination(weights: &[Rational], points: &[Vec<Rational>], dim: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); dim];
    for (w, p) in weights.iter().zip(points) {
        if w.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(p) {
            *o += w * x;
        }
    }
    out
}

/// Dense row-major matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<Rational>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix row");
            data.extend(row.iter().cloned());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged matrix column");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    ///
    /// Rows are first scaled to integers; every intermediate entry is then a
    /// minor of the scaled matrix, so the divisions below are exact.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect()
            })
            .collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pivot = a[rank][col].clone();
            for i in rank + 1..self.rows {
                let lead = a[i][col].clone();
                #[allow(clippy::needless_range_loop)]
                for j in col + 1..self.cols {
                    let v = &a[i][j] * &pivot - &lead * &a[rank][j];
                    debug_assert!((&v % &prev).is_zero());
                    a[i][j] = v / &prev;
                }
                a[i][col] = BigInt::zero();
            }
            prev = pivot;
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &f * &m[(r, j)];
                    m[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Basis of the right kernel, each vector scaled so that its first
    /// nonzero entry is positive.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        kernel_from_rref(&r, &pivots, self.cols)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn kernel_from_rref(r: &RationalMatrix, pivots: &[usize], cols: usize) -> Vec<Vec<Rational>> {
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r[(row, free)].clone();
        }
        if let Some(first) = v.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                v.iter_mut().for_each(|x| *x = -x.clone());
            }
        }
        basis.push(v);
    }
    basis
}

/// Outcome of [`solve_affine`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    /// Every solution is `particular + Σ t_i nullspace[i]`.
    Solved {
        particular: Vec<Rational>,
        nullspace: Vec<Vec<Rational>>,
    },
    /// `y` with `yᵀA = 0` and `yᵀb = 1`.
    Inconsistent { certificate: Vec<Rational> },
}

impl AffineSolution {
    pub fn particular(&self) -> Option<&[Rational]> {
        match self {
            AffineSolution::Solved { particular, .. } => Some(particular),
            AffineSolution::Inconsistent { .. } => None,
        }
    }

    /// The solution when it is unique.
    pub fn unique(&self) -> Option<&[Rational]> {
        match self {
            AffineSolution::Solved {
                particular,
                nullspace,
            } if nullspace.is_empty() => Some(particular),
            _ => None,
        }
    }
}

/// Solves `A x = b` exactly. Free variables of the particular solution are zero.
pub fn solve_affine(a: &RationalMatrix, b: &[Rational]) -> AffineSolution {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    match rref_solve(a, b) {
        Some(solution) => solution,
        None => {
            // Fredholm alternative: [Aᵀ; bᵀ] y = (0, 1) is consistent.
            let mut rows = a.transpose().to_rows();
            rows.push(b.to_vec());
            let system = RationalMatrix::from_rows(a.rows(), &rows);
            let mut rhs = vec![Rational::zero(); a.cols()];
            rhs.push(Rational::one());
            let certificate = rref_solve(&system, &rhs)
                .and_then(|s| s.particular().map(<[Rational]>::to_vec))
                .expect("inconsistent system admits a left certificate");
            AffineSolution::Inconsistent { certificate }
        }
    }
}

fn rref_solve(a: &RationalMatrix, b: &[Rational]) -> Option<AffineSolution> {
    let n = a.cols();
    let mut aug = RationalMatrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut particular = vec![Rational::zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = r[(row, n)].clone();
    }
    let mut coeff = RationalMatrix::zeros(r.rows(), n);
    for i in 0..r.rows() {
        for j in 0..n {
            coeff[(i, j)] = r[(i, j)].clone();
        }
    }
    Some(AffineSolution::Solved {
        particular,
        nullspace: kernel_from_rref(&coeff, &pivots, n),
    })
}

/// Greedy maximal affinely independent subset of `points`, as indices in
/// increasing order. Empty input gives an empty subset.
pub fn affinely_independent_subset(points: &[Vec<Rational>]) -> Vec<usize> {
    let Some(origin) = points.first() else {
        return Vec::new();
    };
    let mut chosen = vec![0];
    let mut directions: Vec<Vec<Rational>> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        let d = sub(p, origin);
        let mut trial = directions.clone();
        trial.push(d.clone());
        if RationalMatrix::from_rows(origin.len(), &trial).rank() == trial.len() {
            directions.push(d);
            chosen.push(i);
        }
    }
    chosen
}

/// A linear constraint row; its meaning (`=` or `≥`) is given by the list
/// of [`LinearProgram`] it sits in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

/// Feasibility problem over free variables:
/// `E x = e` (equalities) and `G x ≥ g` (inequalities).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    equalities: Vec<LinearConstraint>,
    inequalities: Vec<LinearConstraint>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn equalities(&self) -> &[LinearConstraint] {
        &self.equalities
    }

    pub fn inequalities(&self) -> &[LinearConstraint] {
        &self.inequalities
    }

    pub fn add_equality(&mut self, coefficients: Vec<Rational>, rhs: Rational) -> &mut Self {
        assert_eq!(coefficients.len(), self.num_vars, "constraint width");
        self.equalities.push(LinearConstraint { coefficients, rhs });
        self
    }

    /// Adds `coefficients · x ≥ rhs`.
    pub fn add_inequality(&mut self, coefficients: Vec<Rational>, rhs: Rational) -> &mut Self {
        assert_eq!(coefficients.len(), self.num_vars, "constraint width");
        self.inequalities.push(LinearConstraint { coefficients, rhs });
        self
    }

    /// Adds `x_var ≥ 0`.
    pub fn add_nonnegative(&mut self, var: usize) -> &mut Self {
        let mut row = vec![Rational::zero(); self.num_vars];
        row[var] = Rational::one();
        self.add_inequality(row, Rational::zero())
    }

    /// Sparse form of [`add_equality`](Self::add_equality).
    pub fn add_sparse_equality(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> &mut Self {
        let row = self.dense(terms);
        self.add_equality(row, rhs)
    }

    /// Sparse form of [`add_inequality`](Self::add_inequality).
    pub fn add_sparse_inequality(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> &mut Self {
        let row = self.dense(terms);
        self.add_inequality(row, rhs)
    }

    fn dense(&self, terms: &[(usize, Rational)]) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.num_vars];
        for (j, c) in terms {
            row[*j] += c;
        }
        row
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && self
                .equalities
                .iter()
                .all(|c| dot(&c.coefficients, x) == c.rhs)
            && self
                .inequalities
                .iter()
                .all(|c| dot(&c.coefficients, x) >= c.rhs)
    }
}

/// Multipliers proving a [`LinearProgram`] infeasible.
///
/// With `y` on the equalities (any sign) and `z ≥ 0` on the inequalities,
/// `yᵀE + zᵀG = 0` while `yᵀe + zᵀg > 0`. Summing the constraints with these
/// weights yields `0 ≥ δ > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub equality_multipliers: Vec<Rational>,
    pub inequality_multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("certificate has {found} multipliers, program has {expected} constraints")]
    Length { expected: usize, found: usize },
    #[error("inequality multiplier {index} is negative")]
    NegativeMultiplier { index: usize },
    #[error("combined coefficient of variable {var} is {value}, not zero")]
    NonzeroCombination { var: usize, value: Rational },
    #[error("combined bound {delta} is not positive")]
    NonPositiveBound { delta: Rational },
}

impl FarkasCertificate {
    /// Checks the certificate by plain arithmetic and returns `δ`.
    pub fn check(&self, lp: &LinearProgram) -> Result<Rational, CertificateError> {
        if self.equality_multipliers.len() != lp.equalities.len() {
            return Err(CertificateError::Length {
                expected: lp.equalities.len(),
                found: self.equality_multipliers.len(),
            });
        }
        if self.inequality_multipliers.len() != lp.inequalities.len() {
            return Err(CertificateError::Length {
                expected: lp.inequalities.len(),
                found: self.inequality_multipliers.len(),
            });
        }
        if let Some(index) = self.inequality_multipliers.iter().position(Signed::is_negative) {
            return Err(CertificateError::NegativeMultiplier { index });
        }
        let mut combined = vec![Rational::zero(); lp.num_vars];
        let mut delta = Rational::zero();
        let rows = lp
            .equalities
            .iter()
            .zip(&self.equality_multipliers)
            .chain(lp.inequalities.iter().zip(&self.inequality_multipliers));
        for (row, m) in rows {
            if m.is_zero() {
                continue;
            }
            for (acc, c) in combined.iter_mut().zip(&row.coefficients) {
                if !c.is_zero() {
                    *acc += m * c;
                }
            }
            delta += m * &row.rhs;
        }
        if let Some(var) = combined.iter().position(|c| !c.is_zero()) {
            return Err(CertificateError::NonzeroCombination {
                var,
                value: combined[var].clone(),
            });
        }
        if !delta.is_positive() {
            return Err(CertificateError::NonPositiveBound { delta });
        }
        Ok(delta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible(x) => Some(x),
            FeasibilityResult::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            FeasibilityResult::Feasible(_) => None,
            FeasibilityResult::Infeasible(c) => Some(c),
        }
    }
}

#[derive(Clone, Copy)]
enum Column {
    Plus(usize),
    Minus(usize),
    Slack,
}

/// Decides feasibility of `lp` exactly.
///
/// Phase one of the simplex method on the standard form
/// `A w + s = b, w, s ≥ 0` with one artificial `s_i` per row. Inequalities of
/// the form `c·x_j ≥ 0` with `c > 0` become sign restrictions instead of rows.
/// At a positive optimum the duals of the artificial columns are the Farkas
/// multipliers.
pub fn lp_feasible(lp: &LinearProgram) -> FeasibilityResult {
    let n = lp.num_vars;

    // Sign restrictions.
    let mut bound_of: Vec<Option<usize>> = vec![None; lp.inequalities.len()];
    let mut nonneg = vec![false; n];
    let mut general = Vec::new();
    for (k, row) in lp.inequalities.iter().enumerate() {
        if row.rhs.is_zero() {
            let mut nz = row.coefficients.iter().enumerate().filter(|(_, c)| !c.is_zero());
            if let (Some((j, c)), None) = (nz.next(), nz.next()) {
                if c.is_positive() {
                    bound_of[k] = Some(j);
                    nonneg[j] = true;
                    continue;
                }
            }
        }
        general.push(k);
    }

    let mut columns = Vec::new();
    let mut plus_col = vec![0; n];
    let mut minus_col = vec![None; n];
    for j in 0..n {
        plus_col[j] = columns.len();
        columns.push(Column::Plus(j));
        if !nonneg[j] {
            minus_col[j] = Some(columns.len());
            columns.push(Column::Minus(j));
        }
    }
    let mut slack_col = Vec::with_capacity(general.len());
    for _ in &general {
        slack_col.push(columns.len());
        columns.push(Column::Slack);
    }

    let row_sources: Vec<&LinearConstraint> = lp
        .equalities
        .iter()
        .chain(general.iter().map(|&k| &lp.inequalities[k]))
        .collect();
    let m = row_sources.len();
    let structural = columns.len();
    let width = structural + m + 1;
    let rhs_col = width - 1;

    let mut signs = Vec::with_capacity(m);
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, src) in row_sources.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (j, c) in src.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            row[plus_col[j]] = c.clone();
            if let Some(mc) = minus_col[j] {
                row[mc] = -c.clone();
            }
        }
        if i >= lp.equalities.len() {
            row[slack_col[i - lp.equalities.len()]] = -Rational::one();
        }
        row[rhs_col] = src.rhs.clone();
        let negate = src.rhs.is_negative();
        if negate {
            for v in row.iter_mut().take(structural) {
                if !v.is_zero() {
                    *v = -v.clone();
                }
            }
            row[rhs_col] = -row[rhs_col].clone();
        }
        signs.push(if negate { -Rational::one() } else { Rational::one() });
        row[structural + i] = Rational::one();
        tableau.push(row);
    }

    // Reduced costs of the phase-one objective (sum of artificials); the last
    // entry holds minus the objective value.
    let mut objective = vec![Rational::zero(); width];
    for row in &tableau {
        for j in 0..structural {
            if !row[j].is_zero() {
                objective[j] -= &row[j];
            }
        }
        objective[rhs_col] -= &row[rhs_col];
    }
    let mut basis: Vec<usize> = (structural..structural + m).collect();

    while let Some(entering) = (0..width - 1).find(|&j| objective[j].is_negative()) {
        let mut leaving: Option<(usize, Rational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if !row[entering].is_positive() {
                continue;
            }
            let ratio = &row[rhs_col] / &row[entering];
            let better = match &leaving {
                None => true,
                Some((best, best_ratio)) => {
                    ratio < *best_ratio || (ratio == *best_ratio && basis[i] < basis[*best])
                }
            };
            if better {
                leaving = Some((i, ratio));
            }
        }
        let (pivot_row, _) = leaving.expect("phase-one objective is bounded below");
        pivot(&mut tableau, &mut objective, pivot_row, entering);
        basis[pivot_row] = entering;
    }

    if objective[rhs_col].is_zero() {
        let mut values = vec![Rational::zero(); structural];
        for (i, &b) in basis.iter().enumerate() {
            if b < structural {
                values[b] = tableau[i][rhs_col].clone();
            }
        }
        let mut x = vec![Rational::zero(); n];
        for (col, kind) in columns.iter().enumerate() {
            match *kind {
                Column::Plus(j) => x[j] += &values[col],
                Column::Minus(j) => x[j] -= &values[col],
                Column::Slack => {}
            }
        }
        assert!(lp.is_satisfied_by(&x), "simplex witness failed verification");
        return FeasibilityResult::Feasible(x);
    }

    // Duals: reduced cost of artificial i is 1 - u_i.
    let duals: Vec<Rational> = (0..m)
        .map(|i| (Rational::one() - &objective[structural + i]) * &signs[i])
        .collect();
    let (eq_part, gen_part) = duals.split_at(lp.equalities.len());
    let mut inequality_multipliers = vec![Rational::zero(); lp.inequalities.len()];
    for (&k, z) in general.iter().zip(gen_part) {
        inequality_multipliers[k] = z.clone();
    }
    let mut combined = vec![Rational::zero(); n];
    for (row, y) in lp.equalities.iter().zip(eq_part) {
        for (acc, c) in combined.iter_mut().zip(&row.coefficients) {
            *acc += y * c;
        }
    }
    for (&k, z) in general.iter().zip(gen_part) {
        for (acc, c) in combined.iter_mut().zip(&lp.inequalities[k].coefficients) {
            *acc += z * c;
        }
    }
    let mut settled = vec![false; n];
    for (k, bound) in bound_of.iter().enumerate() {
        if let Some(j) = *bound {
            if !settled[j] {
                settled[j] = true;
                let c = &lp.inequalities[k].coefficients[j];
                inequality_multipliers[k] = -&combined[j] / c;
            }
        }
    }
    let certificate = FarkasCertificate {
        equality_multipliers: eq_part.to_vec(),
        inequality_multipliers,
    };
    if let Err(e) = certificate.check(lp) {
        panic!("simplex certificate failed verification: {e}");
    }
    FeasibilityResult::Infeasible(certificate)
}

fn pivot(tableau: &mut [Vec<Rational>], objective: &mut [Rational], r: usize, c: usize) {
    let p = tableau[r][c].clone();
    if !p.is_one() {
        for v in tableau[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
    }
    let pivot_row = tableau[r].clone();
    let eliminate = |row: &mut [Rational]| {
        let f = row[c].clone();
        if f.is_zero() {
            return;
        }
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    };
    for (i, row) in tableau.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(objective);
}

/// Largest perfect-square rational root, if `value` is a square.
pub fn rational_sqrt(value: &Rational) -> Option<Rational> {
    if value.is_negative() {
        return None;
    }
    let n = value.numer().sqrt();
    let d = value.denom().sqrt();
    (&n * &n == *value.numer() && &d * &d == *value.denom()).then(|| BigRational::new(n, d))
}

/// A rational `s ≥ 0` with `lower < s² ≤ upper`. Requires `lower < upper`
/// and `upper ≥ 0`.
pub fn rational_with_square_in(lower: &Rational, upper: &Rational) -> Rational {
    assert!(lower < upper && !upper.is_negative(), "empty square interval");
    if lower.is_negative() {
        return Rational::zero();
    }
    if let Some(root) = rational_sqrt(upper) {
        return root;
    }
    let mut lo = Rational::zero();
    let mut hi = if *upper > Rational::one() {
        upper.clone()
    } else {
        Rational::one()
    };
    let two = int(2);
    loop {
        if &lo * &lo > *lower {
            return lo;
        }
        let mid = (&lo + &hi) / &two;
        if &mid * &mid <= *upper {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RationalMatrix::from_rows(cols, &rows.iter().map(|r| ints(r)).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RationalMatrix::identity(2).rank(), 2);
        assert_eq!(RationalMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(m(&[&[1, 1], &[2, 2]]).rank(), 1);
        assert_eq!(RationalMatrix::zeros(0, 4).rank(), 0);
    }

    #[test]
    fn rank_with_fractions_and_skipped_columns() {
        let a = RationalMatrix::from_rows(
            4,
            &[
                rats(&[(0, 1), (1, 2), (1, 3), (0, 1)]),
                rats(&[(0, 1), (1, 1), (2, 3), (1, 1)]),
                rats(&[(0, 1), (3, 2), (1, 1), (1, 1)]),
            ],
        );
        assert_eq!(a.rank(), 2);
        assert_eq!(a.rref().1.len(), 2);
    }

    #[test]
    fn solve_affine_examples() {
        let id = RationalMatrix::identity(2);
        assert_eq!(
            solve_affine(&id, &ints(&[3, 4])),
            AffineSolution::Solved {
                particular: ints(&[3, 4]),
                nullspace: vec![]
            }
        );

        let row = m(&[&[1, 1]]);
        assert_eq!(
            solve_affine(&row, &ints(&[1])),
            AffineSolution::Solved {
                particular: ints(&[1, 0]),
                nullspace: vec![ints(&[1, -1])]
            }
        );

        let zero = m(&[&[0, 0]]);
        match solve_affine(&zero, &ints(&[1])) {
            AffineSolution::Inconsistent { certificate } => {
                assert_eq!(certificate, ints(&[1]));
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_certificate_annihilates_rows() {
        let a = m(&[&[1, 2], &[2, 4], &[1, 0]]);
        let b = ints(&[1, 3, 0]);
        let AffineSolution::Inconsistent { certificate } = solve_affine(&a, &b) else {
            panic!("system should be inconsistent");
        };
        let at = a.transpose();
        assert!(is_zero_vector(&at.mul_vec(&certificate)));
        assert_eq!(dot(&certificate, &b), Rational::one());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RationalMatrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn lp_feasible_examples() {
        let mut lp = LinearProgram::new(1);
        lp.add_inequality(ints(&[1]), int(0))
            .add_inequality(ints(&[1]), int(1))
            .add_inequality(ints(&[-1]), int(-2));
        let FeasibilityResult::Feasible(x) = lp_feasible(&lp) else {
            panic!("feasible program reported infeasible");
        };
        assert!(lp.is_satisfied_by(&x));
        assert!(x[0] >= int(1) && x[0] <= int(2));

        let mut lp = LinearProgram::new(1);
        lp.add_inequality(ints(&[1]), int(1))
            .add_inequality(ints(&[-1]), int(0));
        let FeasibilityResult::Infeasible(cert) = lp_feasible(&lp) else {
            panic!("infeasible program reported feasible");
        };
        assert_eq!(cert.inequality_multipliers, ints(&[1, 1]));
        assert_eq!(cert.check(&lp), Ok(int(1)));
    }

    #[test]
    fn empty_program_is_feasible() {
        assert_eq!(lp_feasible(&LinearProgram::new(0)), FeasibilityResult::Feasible(vec![]));
        assert_eq!(
            lp_feasible(&LinearProgram::new(2)),
            FeasibilityResult::Feasible(ints(&[0, 0]))
        );
    }

    #[test]
    fn zero_variable_contradiction() {
        let mut lp = LinearProgram::new(0);
        lp.add_equality(vec![], int(3));
        let cert = lp_feasible(&lp);
        assert!(!cert.is_feasible());
        assert!(cert.certificate().unwrap().check(&lp).is_ok());
    }

    #[test]
    fn certificate_uses_sign_restrictions() {
        // x, y ≥ 0, x + y = -1.
        let mut lp = LinearProgram::new(2);
        lp.add_equality(ints(&[1, 1]), int(-1));
        lp.add_nonnegative(0).add_nonnegative(1);
        let FeasibilityResult::Infeasible(cert) = lp_feasible(&lp) else {
            panic!("program has no solution");
        };
        assert!(cert.check(&lp).is_ok());
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let mut lp = LinearProgram::new(1);
        lp.add_inequality(ints(&[1]), int(1))
            .add_inequality(ints(&[-1]), int(0));
        let bad = FarkasCertificate {
            equality_multipliers: vec![],
            inequality_multipliers: ints(&[1, 2]),
        };
        assert!(matches!(
            bad.check(&lp),
            Err(CertificateError::NonzeroCombination { .. })
        ));
        let negative = FarkasCertificate {
            equality_multipliers: vec![],
            inequality_multipliers: ints(&[-1, -1]),
        };
        assert!(matches!(
            negative.check(&lp),
            Err(CertificateError::NegativeMultiplier { .. })
        ));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn square_interval() {
        let s = rational_with_square_in(&rat(1, 2), &int(1));
        assert_eq!(s, int(1));
        let s = rational_with_square_in(&int(1), &int(2));
        assert!(&s * &s > int(1) && &s * &s <= int(2));
        assert_eq!(rational_with_square_in(&int(-1), &int(2)), int(0));
    }
}
