//! Small dense integer matrices, Kronecker products, and the adjacency
//! identity that rebuilds the joint strict best-response digraph from the
//! best-response digraph.
//!
//! Joint strategy `(i, j)` (0-based) sits at row/column `i * n + j` of every
//! `n^2 x n^2` matrix here.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NonSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) = {value} is not 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: i64 },
    #[error("formula produced {value} at ({row}, {col}); input is not a best-response adjacency matrix")]
    NonBinaryResult { row: usize, col: usize, value: i64 },
    #[error("basis index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("ragged rows: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
}

/// Dense row-major matrix of signed integers.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// `n x 1` all-ones column.
    pub fn ones_column(n: usize) -> Self {
        Matrix {
            rows: n,
            cols: 1,
            data: vec![1; n],
        }
    }

    /// `n x 1` standard basis column `e_k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut m = Matrix::zeros(n, 1);
        m.set(k, 0, 1);
        m
    }

    /// `e_k e_k^T`.
    pub fn basis_projector(n: usize, k: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m.set(k, k, 1);
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, AlgebraError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(AlgebraError::Ragged {
                    row: i,
                    len: row.len(),
                    expected: cols,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: i64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Positions where `self` and `other` differ. Shapes must match.
    pub fn differing_entries(&self, other: &Matrix) -> Vec<(usize, usize)> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) != other.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn require_square(&self) -> Result<usize, AlgebraError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(AlgebraError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        out
    }
}

/// A matrix whose entries are all 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix(Matrix);

impl BinaryMatrix {
    pub fn new(matrix: Matrix) -> Result<Self, AlgebraError> {
        for i in 0..matrix.rows {
            for j in 0..matrix.cols {
                let value = matrix.get(i, j);
                if value != 0 && value != 1 {
                    return Err(AlgebraError::NonBinaryEntry { row: i, col: j, value });
                }
            }
        }
        Ok(BinaryMatrix(matrix))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, 1);
                }
            }
        }
        BinaryMatrix(m)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows
    }

    pub fn cols(&self) -> usize {
        self.0.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.0.get(i, j) == 1
    }
}

/// Standard Kronecker product `a ⊗ b`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = Matrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let scale = a.get(ai, aj);
            if scale == 0 {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out.set(ai * b.rows + bi, aj * b.cols + bj, scale * b.get(bi, bj));
                }
            }
        }
    }
    out
}

/// `Ā_k = 1 e_kᵀ A_B − A_Bᵀ e_k e_kᵀ A_B`, evaluated with matrix products.
pub fn abar_k(a_b: &BinaryMatrix, k: usize) -> Result<Matrix, AlgebraError> {
    let a = a_b.as_matrix();
    let n = a.require_square()?;
    if k >= n {
        return Err(AlgebraError::IndexOutOfRange { index: k, n });
    }
    let e_k = Matrix::basis(n, k);
    let e_k_t = e_k.transpose();
    let ones = Matrix::ones_column(n);
    let row_k = &e_k_t * a; // e_kᵀ A_B
    let broadcast = &ones * &row_k;
    let cancel = &(&a.transpose() * &e_k) * &row_k;
    Ok(&broadcast - &cancel)
}

/// `Σ_k (e_k e_kᵀ ⊗ Ā_k + Ā_k ⊗ e_k e_kᵀ)`; must come out binary.
pub fn joint_strict_adjacency_from_formula(a_b: &BinaryMatrix) -> Result<BinaryMatrix, AlgebraError> {
    let n = a_b.as_matrix().require_square()?;
    let mut sum = Matrix::zeros(n * n, n * n);
    for k in 0..n {
        let abar = abar_k(a_b, k)?;
        let projector = Matrix::basis_projector(n, k);
        sum = &sum + &kronecker(&projector, &abar);
        sum = &sum + &kronecker(&abar, &projector);
    }
    BinaryMatrix::new(sum).map_err(|e| match e {
        AlgebraError::NonBinaryEntry { row, col, value } => {
            AlgebraError::NonBinaryResult { row, col, value }
        }
        other => other,
    })
}

/// Adjacency of the digraph Cartesian product: `I ⊗ a2 + a1 ⊗ I`.
pub fn cartesian_product_adjacency(a1: &Matrix, a2: &Matrix) -> Result<Matrix, AlgebraError> {
    let n1 = a1.require_square()?;
    let n2 = a2.require_square()?;
    Ok(&kronecker(&Matrix::identity(n1), a2) + &kronecker(a1, &Matrix::identity(n2)))
}
