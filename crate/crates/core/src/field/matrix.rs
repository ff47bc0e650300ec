//! Dense exact matrices over a [`FieldDesc`].
//!
//! Row reduction and solving require a field kind (or the rationals);
//! `solve_unit` additionally works over Z/p^k for square systems whose
//! matrix is invertible mod p, which is what Newton lifting needs.

use super::{FieldDesc, FieldElement};
use crate::error::{Error, Result};

/// Row-major dense matrix with a fixed coefficient domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixF {
    field: FieldDesc,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Result of row reduction: the reduced matrix, its rank and the pivot
/// column indices in ascending order.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub matrix: MatrixF,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Affine solution set of a linear system: one particular solution plus
/// a kernel basis (canonical, ordered by free column).
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub particular: Vec<FieldElement>,
    pub kernel: Vec<Vec<FieldElement>>,
}

impl MatrixF {
    pub fn zero(field: FieldDesc, rows: usize, cols: usize) -> Self {
        let z = field.zero();
        MatrixF {
            field,
            rows,
            cols,
            data: vec![z; rows * cols],
        }
    }

    pub fn identity(field: FieldDesc, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            let one = m.field.one();
            m.set(i, i, one);
        }
        m
    }

    /// Builds a matrix from rows, validating every entry.
    pub fn from_rows(field: FieldDesc, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for x in row {
                field.check_element(x)?;
                data.push(x.clone());
            }
        }
        Ok(MatrixF {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_int_rows(field: FieldDesc, rows: &[Vec<i64>]) -> Result<Self> {
        let converted = rows
            .iter()
            .map(|row| row.iter().map(|&v| field.from_int(v)).collect())
            .collect();
        Self::from_rows(field, converted)
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatrixF {
        let mut t = MatrixF::zero(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &MatrixF) -> Result<MatrixF> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("matrix product".into()));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatrixF::zero(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = f.zero();
                for k in 0..self.cols {
                    acc = f.add(&acc, &f.mul(self.get(i, k), other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector product".into()));
        }
        let f = &self.field;
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = f.zero();
            for k in 0..self.cols {
                acc = f.add(&acc, &f.mul(self.get(i, k), &v[k]));
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn require_field_kind(&self) -> Result<()> {
        if self.field.is_field() {
            Ok(())
        } else {
            Err(Error::PreconditionViolated(format!(
                "row reduction needs a field, got {}",
                self.field.name()
            )))
        }
    }

    /// Reduced row echelon form with rank and pivot columns.
    pub fn row_reduce(&self) -> Result<Reduced> {
        self.require_field_kind()?;
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut pivot_row = None;
            for i in r..m.rows {
                if !f.is_zero(m.get(i, col)) {
                    pivot_row = Some(i);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != r {
                for j in 0..m.cols {
                    let a = m.get(pr, j).clone();
                    let b = m.get(r, j).clone();
                    m.set(pr, j, b);
                    m.set(r, j, a);
                }
            }
            let inv = f.inverse(m.get(r, col))?;
            for j in col..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, col)) {
                    continue;
                }
                let factor = m.get(i, col).clone();
                for j in col..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        Ok(Reduced {
            matrix: m,
            rank: r,
            pivots,
        })
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.row_reduce()?.rank)
    }

    /// Canonical kernel basis: one vector per free column, ascending,
    /// with a 1 in the free coordinate.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<FieldElement>>> {
        let red = self.row_reduce()?;
        let f = &self.field;
        let mut basis = Vec::new();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in red.pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![f.zero(); self.cols];
            vec[free] = f.one();
            for (col, rowopt) in pivot_set.iter().enumerate() {
                if let Some(row) = rowopt {
                    vec[col] = f.neg(red.matrix.get(*row, free));
                }
            }
            basis.push(vec);
        }
        Ok(basis)
    }

    /// Solves `self * x = rhs`.  Returns `None` when inconsistent.
    pub fn solve(&self, rhs: &[FieldElement]) -> Result<Option<LinearSolution>> {
        self.require_field_kind()?;
        if rhs.len() != self.rows {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let f = &self.field;
        let mut aug = MatrixF::zero(f.clone(), self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, rhs[i].clone());
        }
        let red = aug.row_reduce()?;
        if red.pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut particular = vec![f.zero(); self.cols];
        for (row, &col) in red.pivots.iter().enumerate() {
            particular[col] = red.matrix.get(row, self.cols).clone();
        }
        let kernel = self.kernel_basis()?;
        Ok(Some(LinearSolution { particular, kernel }))
    }

    /// Determinant by fraction-preserving Gaussian elimination; exact
    /// over field kinds and the rationals.
    pub fn det(&self) -> Result<FieldElement> {
        self.require_field_kind()?;
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of non-square".into()));
        }
        let f = self.field.clone();
        let mut m = self.clone();
        let n = self.rows;
        let mut det = f.one();
        for col in 0..n {
            let mut pivot_row = None;
            for i in col..n {
                if !f.is_zero(m.get(i, col)) {
                    pivot_row = Some(i);
                    break;
                }
            }
            let Some(pr) = pivot_row else {
                return Ok(f.zero());
            };
            if pr != col {
                for j in 0..n {
                    let a = m.get(pr, j).clone();
                    let b = m.get(col, j).clone();
                    m.set(pr, j, b);
                    m.set(col, j, a);
                }
                det = f.neg(&det);
            }
            let pivot = m.get(col, col).clone();
            det = f.mul(&det, &pivot);
            let inv = f.inverse(&pivot)?;
            for i in col + 1..n {
                if f.is_zero(m.get(i, col)) {
                    continue;
                }
                let factor = f.mul(m.get(i, col), &inv);
                for j in col..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(col, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Solves a square system over any kind, using only unit pivots.
    /// Intended for Z/p^k systems invertible mod p; errors with
    /// `NonUnit` when no unit pivot is available.
    pub fn solve_unit(&self, rhs: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if self.rows != self.cols || rhs.len() != self.rows {
            return Err(Error::DimensionMismatch("square unit solve".into()));
        }
        let f = self.field.clone();
        let n = self.rows;
        let mut m = self.clone();
        let mut b: Vec<FieldElement> = rhs.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot_row = None;
            for i in col..n {
                if f.inverse(m.get(i, col)).is_ok() {
                    pivot_row = Some(i);
                    break;
                }
            }
            let pr = pivot_row.ok_or(Error::NonUnit)?;
            if pr != col {
                for j in 0..n {
                    let a = m.get(pr, j).clone();
                    let c = m.get(col, j).clone();
                    m.set(pr, j, c);
                    m.set(col, j, a);
                }
                b.swap(pr, col);
                perm.swap(pr, col);
            }
            let inv = f.inverse(m.get(col, col))?;
            for j in col..n {
                let v = f.mul(m.get(col, j), &inv);
                m.set(col, j, v);
            }
            b[col] = f.mul(&b[col], &inv);
            for i in 0..n {
                if i == col || f.is_zero(m.get(i, col)) {
                    continue;
                }
                let factor = m.get(i, col).clone();
                for j in col..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(col, j)));
                    m.set(i, j, v);
                }
                let v = f.sub(&b[i], &f.mul(&factor, &b[col]));
                b[i] = v;
            }
        }
        Ok(b)
    }
}
