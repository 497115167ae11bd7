//! Dense matrices over an exact or floating field, with row reduction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rug::{Assign, Integer, Rational};

use crate::field::{GroundField, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("cells do not form a direct sum (rank {rank} of {n})")]
    NotADirectSum { rank: usize, n: usize },
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(usize, usize),
}

/// Scalar type usable as a matrix entry.
///
/// Method names avoid `add`/`mul` so they never collide with the `std::ops`
/// impls that some entry types also carry.
pub trait FieldElem: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Exact entries compare with `==`; floating entries need a tolerance.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    /// Absolute value, used for residual reporting and float pivoting.
    fn magnitude(&self) -> f64;
    /// Converts a field value, or `None` if it is not representable.
    fn from_scalar(s: &Scalar, field: &GroundField) -> Option<Self>;

    fn add_assign_product(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }

    fn row_reduce(m: &Mat<Self>) -> Echelon<Self> {
        gauss_jordan(m)
    }

    /// Specialized product, when the entry type has one.
    fn matmul(_a: &Mat<Self>, _b: &Mat<Self>) -> Option<Mat<Self>> {
        None
    }
}

impl FieldElem for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from(v)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }
    fn plus(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn negated(&self) -> Self {
        Rational::from(-self)
    }
    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.clone().recip())
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn from_scalar(s: &Scalar, _field: &GroundField) -> Option<Self> {
        s.as_rational().cloned()
    }
    fn add_assign_product(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += Rational::from(a * b);
    }
    fn row_reduce(m: &Mat<Self>) -> Echelon<Self> {
        if m.rows() * m.cols() >= crate::modular::MODULAR_THRESHOLD {
            if let Some(e) = crate::modular::modular_rref(m) {
                return e;
            }
        }
        bareiss_rational(m)
    }
    fn matmul(a: &Mat<Self>, b: &Mat<Self>) -> Option<Mat<Self>> {
        (a.rows() * a.cols() * b.cols() >= 1 << 15).then(|| crate::modular::rational_matmul(a, b))
    }
}

impl FieldElem for Scalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_i64(v: i64) -> Self {
        Scalar::from_i64(v)
    }
    fn from_rational(r: &Rational) -> Self {
        Scalar::from_rational(r.clone())
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn conj(&self) -> Self {
        Scalar::conj(self)
    }
    fn magnitude(&self) -> f64 {
        // |a0| + |a1| * |q| would need b; callers only use this to test for zero
        self.a0().to_f64().abs() + self.a1().to_f64().abs()
    }
    fn from_scalar(s: &Scalar, field: &GroundField) -> Option<Self> {
        Some(field.scalar(s.a0().clone(), s.a1().clone()))
    }
}

impl FieldElem for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(r.to_f64(), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.inv())
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn from_scalar(s: &Scalar, field: &GroundField) -> Option<Self> {
        Some(field.to_complex(s))
    }
    fn add_assign_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn row_reduce(m: &Mat<Self>) -> Echelon<Self> {
        gauss_jordan_partial_pivot(m, FLOAT_RANK_TOL)
    }
}

/// Relative pivot threshold for floating row reduction.
pub const FLOAT_RANK_TOL: f64 = 1e-9;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<F> Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<F> Mat<F> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn map<G>(&self, f: impl FnMut(&F) -> G) -> Mat<G> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<F: FieldElem> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { F::one() } else { F::zero() })
    }

    pub fn all_ones(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::one(); rows * cols],
        }
    }

    pub fn diagonal(diag: &[F]) -> Self {
        let n = diag.len();
        Mat::from_fn(n, n, |r, c| if r == c { diag[r].clone() } else { F::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(n: usize, cols: &[Vec<F>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == n), "column length mismatch");
        Mat::from_fn(n, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn col(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|c| self.col(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn conj(&self) -> Self {
        self.map(F::conj)
    }

    pub fn conj_transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    fn check_same_shape(&self, rhs: &Self, op: &str) -> Result<(), LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(rhs, "add")?;
        Ok(self.zip_map(rhs, F::plus))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(rhs, "sub")?;
        Ok(self.zip_map(rhs, F::minus))
    }

    /// Entrywise (Hadamard) product.
    pub fn try_hadamard(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_same_shape(rhs, "hadamard")?;
        Ok(self.zip_map(rhs, F::times))
    }

    fn zip_map(&self, rhs: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Panicking `+`; shapes are an internal invariant at every call site.
    pub fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("matrix add")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.try_sub(rhs).expect("matrix sub")
    }

    pub fn hadamard(&self, rhs: &Self) -> Self {
        self.try_hadamard(rhs).expect("hadamard product")
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|x| x.times(s))
    }

    pub fn add_assign_scaled(&mut self, rhs: &Self, s: &F) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        if s.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            a.add_assign_product(b, s);
        }
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if let Some(m) = F::matmul(self, rhs) {
            return Ok(m);
        }
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row: &mut [F] = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    o.add_assign_product(a, b);
                }
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        self.try_matmul(rhs).expect("matmul")
    }

    pub fn try_matvec(&self, v: &[F]) -> Result<Vec<F>, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::ShapeMismatch(format!(
                "matvec: {}x{} * {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = F::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    acc.add_assign_product(a, b);
                }
                acc
            })
            .collect())
    }

    pub fn matvec(&self, v: &[F]) -> Vec<F> {
        self.try_matvec(v).expect("matvec")
    }

    pub fn trace(&self) -> F {
        let mut acc = F::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc.plus(&self[(i, i)]);
        }
        acc
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Mat::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Mat::from_fn(rows.len(), self.cols, |r, c| self[(rows[r], c)].clone())
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "hstack row mismatch");
        Mat::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                rhs[(r, c - self.cols)].clone()
            }
        })
    }

    pub fn hstack_all(rows: usize, parts: &[&Self]) -> Self {
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            for r in 0..rows {
                for c in 0..p.cols {
                    out[(r, off + c)] = p[(r, c)].clone();
                }
            }
            off += p.cols;
        }
        out
    }

    pub fn rref(&self) -> Echelon<F> {
        F::row_reduce(self)
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Basis of `{v : self * v = 0}` as the columns of a `cols x nullity` matrix.
    pub fn kernel(&self) -> Mat<F> {
        self.rref().kernel()
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(n));
        let e = aug.rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Err(LinalgError::SingularMatrix);
        }
        Ok(Mat::from_fn(n, n, |r, c| e.reduced[(r, n + c)].clone()))
    }

    /// Solves `self * X = rhs` for square nonsingular `self`.
    pub fn solve(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if !self.is_square() || self.rows != rhs.rows {
            return Err(LinalgError::ShapeMismatch("solve".into()));
        }
        let n = self.rows;
        let e = self.hstack(rhs).rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Err(LinalgError::SingularMatrix);
        }
        Ok(Mat::from_fn(n, rhs.cols, |r, c| e.reduced[(r, n + c)].clone()))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(F::magnitude).fold(0.0, f64::max)
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon<F> {
    pub reduced: Mat<F>,
    pub pivots: Vec<usize>,
}

impl<F: FieldElem> Echelon<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The nonzero rows.
    pub fn row_basis(&self) -> Mat<F> {
        let r = self.rank();
        Mat::from_fn(r, self.reduced.cols, |i, j| self.reduced[(i, j)].clone())
    }

    pub fn kernel(&self) -> Mat<F> {
        let n = self.reduced.cols;
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut k = Mat::zeros(n, free.len());
        for (j, &f) in free.iter().enumerate() {
            k[(f, j)] = F::one();
            for (row, &p) in self.pivots.iter().enumerate() {
                k[(p, j)] = self.reduced[(row, f)].negated();
            }
        }
        k
    }
}

/// Plain Gauss-Jordan with first-nonzero pivoting.
pub fn gauss_jordan<F: FieldElem>(m: &Mat<F>) -> Echelon<F> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a[(r, c)].inverse().expect("nonzero pivot");
        for j in c..cols {
            a[(r, j)] = a[(r, j)].times(&inv);
        }
        eliminate_column(&mut a, r, c);
        pivots.push(c);
        r += 1;
    }
    Echelon { reduced: a, pivots }
}

fn eliminate_column<F: FieldElem>(a: &mut Mat<F>, r: usize, c: usize) {
    let cols = a.cols;
    let pivot_row: Vec<F> = a.row(r)[c..].to_vec();
    for i in 0..a.rows {
        if i == r || a[(i, c)].is_zero() {
            continue;
        }
        let factor = a[(i, c)].negated();
        let row: &mut [F] = &mut a.data[i * cols + c..(i + 1) * cols];
        for (x, p) in row.iter_mut().zip(&pivot_row) {
            x.add_assign_product(&factor, p);
        }
    }
}

/// Gauss-Jordan with partial (magnitude) pivoting for floating entries.
pub fn gauss_jordan_partial_pivot<F: FieldElem>(m: &Mat<F>, rel_tol: f64) -> Echelon<F> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, mag) = (r..rows)
            .map(|i| (i, a[(i, c)].magnitude()))
            .fold((r, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if mag <= rel_tol * scale {
            for i in r..rows {
                a[(i, c)] = F::zero();
            }
            continue;
        }
        a.swap_rows(r, p);
        let inv = a[(r, c)].inverse().expect("nonzero pivot");
        for j in c..cols {
            a[(r, j)] = a[(r, j)].times(&inv);
        }
        eliminate_column(&mut a, r, c);
        for i in 0..rows {
            if i != r {
                a[(i, c)] = F::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { reduced: a, pivots }
}

/// Fraction-free Gauss-Jordan for rational matrices.
///
/// Rows are scaled to integers, reduced with the Bareiss update
/// `a_ij <- (p * a_ij - a_ic * a_rj) / p_prev` applied to every non-pivot row
/// (exact division), and divided by the final pivot at the end.
pub fn bareiss_rational(m: &Mat<Rational>) -> Echelon<Rational> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<Integer>> = (0..rows).map(|r| integer_row(m.row(r))).collect();
    let mut pivots = Vec::new();
    let mut prev = Integer::from(1);
    let mut r = 0;
    let mut t1 = Integer::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i][c].cmp0() != Ordering::Equal) else {
            continue;
        };
        a.swap(r, p);
        let pivot_row = std::mem::take(&mut a[r]);
        let pivot = pivot_row[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c].clone();
            let factor_zero = factor.cmp0() == Ordering::Equal;
            // columns before c are zero in every non-pivot row except at
            // earlier pivot rows, whose pivot entries must scale too
            let start = if i < r { 0 } else { c };
            for j in start..cols {
                let x = &mut row[j];
                if factor_zero || pivot_row[j].cmp0() == Ordering::Equal {
                    if x.cmp0() == Ordering::Equal {
                        continue;
                    }
                    *x *= &pivot;
                } else {
                    *x *= &pivot;
                    t1.assign(&factor * &pivot_row[j]);
                    *x -= &t1;
                }
                x.div_exact_mut(&prev);
            }
        }
        a[r] = pivot_row;
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    let rank = r;
    let mut out = Mat::zeros(rows, cols);
    for (i, row) in a.iter().enumerate().take(rank) {
        for (j, x) in row.iter().enumerate() {
            if x.cmp0() != Ordering::Equal {
                out[(i, j)] = Rational::from((x.clone(), prev.clone()));
            }
        }
    }
    Echelon {
        reduced: out,
        pivots,
    }
}

/// Scales a rational row by the lcm of its denominators.
pub fn integer_row(row: &[Rational]) -> Vec<Integer> {
    let mut l = Integer::from(1);
    for x in row {
        if x.denom() != &1 {
            l.lcm_mut(x.denom());
        }
    }
    row.iter()
        .map(|x| {
            if x.cmp0() == Ordering::Equal {
                Integer::new()
            } else {
                Integer::from(x.numer() * Integer::from(&l / x.denom()))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GroundField, QSign};

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn rat_mat(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    #[test]
    fn identity_is_neutral() {
        let m = rat_mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(Mat::identity(3).matmul(&m), m);
        assert_eq!(m.matmul(&Mat::identity(3)), m);
    }

    #[test]
    fn zero_matrix_rank_and_kernel() {
        let z: Mat<Rational> = Mat::zeros(3, 3);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel().cols(), 3);
    }

    #[test]
    fn rank_one_kernel() {
        let m = rat_mat(&[&[1, 1], &[1, 1]]);
        let e = m.rref();
        assert_eq!(e.rank(), 1);
        let k = e.kernel();
        assert_eq!(k, rat_mat(&[&[-1], &[1]]));
        assert!(m.matmul(&k).is_zero());
    }

    #[test]
    fn quadratic_rank() {
        let f = GroundField::new(2, QSign::Plus).unwrap();
        let m = Mat::from_rows(vec![vec![f.q(), f.int(2)], vec![f.int(1), f.q()]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert!(m.matmul(&k).is_zero());
    }

    #[test]
    fn conj_transpose_of_imaginary_q() {
        let f = GroundField::new(-2, QSign::Plus).unwrap();
        let m = Mat::from_rows(vec![vec![f.q()]]);
        assert_eq!(m.conj_transpose(), Mat::from_rows(vec![vec![-f.q()]]));
    }

    #[test]
    fn inverse_round_trip() {
        let m = rat_mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(3));
        let s = rat_mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(LinalgError::SingularMatrix));
        let r = rat_mat(&[&[1, 2, 3]]);
        assert!(matches!(r.inverse(), Err(LinalgError::ShapeMismatch(_))));
    }

    #[test]
    fn shape_errors() {
        let a: Mat<Rational> = Mat::zeros(2, 3);
        let b: Mat<Rational> = Mat::zeros(2, 3);
        assert!(matches!(a.try_matmul(&b), Err(LinalgError::ShapeMismatch(_))));
        assert!(a.try_add(&b).is_ok());
        assert!(matches!(a.try_add(&Mat::zeros(3, 2)), Err(LinalgError::ShapeMismatch(_))));
    }

    #[test]
    fn bareiss_agrees_with_plain_gauss_jordan() {
        let m = Mat::from_rows(vec![
            vec![q(0), q(2), Rational::from((1, 3)), q(4), q(0)],
            vec![q(1), q(-1), q(0), Rational::from((5, 7)), q(2)],
            vec![q(2), q(0), Rational::from((2, 3)), Rational::from((38, 7)), q(4)],
            vec![q(0), q(0), q(0), q(0), q(0)],
        ]);
        let a = bareiss_rational(&m);
        let b = gauss_jordan(&m);
        assert_eq!(a.pivots, b.pivots);
        assert_eq!(a.reduced, b.reduced);
    }

    #[test]
    fn float_partial_pivoting() {
        let m: Mat<Complex64> = Mat::from_rows(vec![
            vec![Complex64::new(1e-3, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0)],
        ]);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        assert!(id.sub(&Mat::identity(2)).max_abs() < 1e-12);
    }
}
