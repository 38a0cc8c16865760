//! Dense exact matrices: products, row reduction, rank, kernel and image
//! bases, inversion and full-rank factorisation.
//!
//! Matrices act on column vectors (`M * v`), so a product `A * B` means "apply
//! `B`, then `A`". Shapes with a zero dimension are legal and behave as the
//! maps to and from the zero space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldDescriptor, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// `left * right` reproduces the factored matrix; `left` has full column
/// rank and `right` full row rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFactorization {
    pub left: Matrix,
    pub right: Matrix,
    pub rank: usize,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

impl Matrix {
    /// Builds a matrix from row-major entries, checking the length and that
    /// every entry lives in `field`.
    pub fn new(field: FieldDescriptor, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        let field = field.validate()?;
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| s.field() != field) {
            return Err(Error::FieldMismatch {
                left: field,
                right: bad.field(),
            });
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Integer entries embedded into `field`. Panics on ragged rows.
    pub fn from_ints<R: AsRef<[i64]>>(field: FieldDescriptor, rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| field.int(v)))
            .collect();
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(
        field: FieldDescriptor,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(field: FieldDescriptor, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldDescriptor, n: usize) -> Self {
        Matrix::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    /// Square block diagonal matrix with `a` then `b`.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Result<Matrix> {
        a.same_field(b)?;
        let n = a.rows + b.rows;
        let m = a.cols + b.cols;
        let zero = a.field.zero();
        Ok(Matrix::from_fn(a.field, n, m, |i, j| {
            if i < a.rows && j < a.cols {
                a[(i, j)].clone()
            } else if i >= a.rows && j >= a.cols {
                b[(i - a.rows, j - a.cols)].clone()
            } else {
                zero.clone()
            }
        }))
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert_eq!(value.field(), self.field, "entry from another field");
        self.data[i * self.cols + j] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = &self[(i, j)];
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_square() && &(self * self) == self
    }

    pub(crate) fn same_field(&self, other: &Matrix) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            })
        }
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.same_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Matrix) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..rhs.cols {
                let mut acc = self.field.zero();
                for (k, a) in row.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let b = &rhs.data[k * rhs.cols + j];
                    if !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                data.push(acc);
            }
        }
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: rhs.cols,
            data,
        }
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Matrix> {
        self.same_field(rhs)?;
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} and {}x{} differ in shape",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| op(a, b)).collect();
        Ok(self.with_data(data))
    }

    fn with_data(&self, data: Vec<Scalar>) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        self.with_data(self.data.iter().map(|a| a * s).collect())
    }

    /// `self^k` for a square matrix; `k = 0` gives the identity.
    pub fn pow(&self, k: usize) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Matrix::identity(self.field, self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix> {
        self.same_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(Error::ShapeMismatch("hstack needs equal row counts".into()));
        }
        Ok(Matrix::from_fn(self.field, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                rhs[(i, j - self.cols)].clone()
            }
        }))
    }

    /// `self` stacked on top of `rhs`.
    pub fn vstack(&self, rhs: &Matrix) -> Result<Matrix> {
        Ok(self.transpose().hstack(&rhs.transpose())?.transpose())
    }

    /// Reduced row echelon form. The pivot in each column is the first
    /// nonzero entry at or below the current row.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].invert().expect("pivot is nonzero");
            for j in col..m.cols {
                let v = &m[(row, j)] * &inv;
                m.data[row * m.cols + j] = v;
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for j in col..m.cols {
                    let v = &m[(r, j)] - &(&factor * &m[(row, j)]);
                    m.data[r * m.cols + j] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            rank: pivots.len(),
            reduced: m,
            pivot_columns: pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{v : self * v = 0}` as columns, one per free column of the
    /// reduced form.
    pub fn kernel_basis(&self) -> Matrix {
        let Rref {
            reduced,
            pivot_columns,
            ..
        } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_columns.contains(c)).collect();
        let mut basis = Matrix::zeros(self.field, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, self.field.one());
            for (r, &pc) in pivot_columns.iter().enumerate() {
                basis.set(pc, k, -&reduced[(r, fc)]);
            }
        }
        basis
    }

    /// Basis of the column space: the pivot columns of `self`.
    pub fn image_basis(&self) -> Matrix {
        self.select_columns(&self.rref().pivot_columns)
    }

    /// `left` = pivot columns of `self`, `right` = nonzero rows of the reduced
    /// form.
    pub fn full_rank_factorization(&self) -> RankFactorization {
        let Rref {
            reduced,
            pivot_columns,
            rank,
        } = self.rref();
        let rows: Vec<usize> = (0..rank).collect();
        RankFactorization {
            left: self.select_columns(&pivot_columns),
            right: reduced.select_rows(&rows),
            rank,
        }
    }

    /// Inverse by Gauss-Jordan on `[self | I]`.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.ensure_square()?;
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let Rref {
            reduced,
            pivot_columns,
            ..
        } = aug.rref();
        let rank = pivot_columns.iter().filter(|&&c| c < n).count();
        if rank < n {
            return Err(Error::SingularMatrix { rank, size: n });
        }
        let right: Vec<usize> = (n..2 * n).collect();
        Ok(reduced.select_columns(&right))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// `{"rows":n,"cols":m,"entries":[[...],...]}`.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array(self.row(i).iter().map(Scalar::to_json).collect()))
            .collect();
        json!({"rows": self.rows, "cols": self.cols, "entries": entries})
    }

    /// Reads the object encoding, or a bare nested array (`[[1,2],[3,4]]`)
    /// whose shape is inferred.
    pub fn from_json(field: FieldDescriptor, value: &Value) -> Result<Matrix> {
        let bad = |msg: &str| Error::Parse(format!("matrix: {msg}"));
        let (rows_v, shape) = match value {
            Value::Array(rows) => (rows.as_slice(), None),
            Value::Object(obj) => {
                let dim = |key: &str| {
                    obj.get(key)
                        .and_then(Value::as_u64)
                        .map(|v| v as usize)
                        .ok_or_else(|| bad(&format!("missing or invalid {key:?}")))
                };
                let entries = obj
                    .get("entries")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("missing \"entries\""))?;
                (entries.as_slice(), Some((dim("rows")?, dim("cols")?)))
            }
            _ => return Err(bad("expected an array or object")),
        };
        let mut data = Vec::new();
        let mut width = None;
        for row in rows_v {
            let row = row.as_array().ok_or_else(|| bad("rows must be arrays"))?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => return Err(bad("ragged rows")),
                _ => {}
            }
            for v in row {
                data.push(field.parse_value(v)?);
            }
        }
        let (rows, cols) = match shape {
            Some((r, c)) => {
                if rows_v.len() != r || (r > 0 && width != Some(c)) {
                    return Err(Error::ShapeMismatch(format!(
                        "declared {r}x{c} does not match entries"
                    )));
                }
                (r, c)
            }
            None => (rows_v.len(), width.unwrap_or(0)),
        };
        Matrix::new(field, rows, cols, data)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

/// Panics on a shape or field mismatch; use [`Matrix::try_mul`] for a
/// `Result`.
impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.with_data(self.data.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(Scalar::short).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(0);
        if self.rows == 0 || self.cols == 0 {
            return write!(f, "[{}x{} empty]", self.rows, self.cols);
        }
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
