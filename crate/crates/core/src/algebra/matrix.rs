//! Dense matrices over a [`Field`] and exact elimination routines.

use std::ops::{Index, IndexMut};

use super::field::{check_compatible, ExactField, Field};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn diagonal(d: &[F]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors (all of length `len`).
    pub fn from_columns(cols: &[Vec<F>], len: usize) -> Self {
        let mut m = Self::zeros(len, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn entries(&self) -> impl Iterator<Item = &F> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
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

    pub fn mul(&self, rhs: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| super::field::dot(self.row(i), v))
            .collect())
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Determinant by Gaussian elimination with largest-magnitude pivots.
    pub fn det(&self) -> Result<F> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = F::one();
        for k in 0..n {
            let Some(p) = pivot_row(&a, k, k) else {
                return Ok(F::zero());
            };
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let piv = a[(k, k)].clone();
            det = det * piv.clone();
            let inv = piv.inv().ok_or(Error::NotInvertible)?;
            for i in k + 1..n {
                let f = a[(i, k)].clone() * inv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                }
            }
        }
        Ok(det)
    }

    /// Solves the square system `self x = b`.
    pub fn solve(&self, b: &[F]) -> Result<Vec<F>> {
        let n = self.rows;
        if self.cols != n || b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut a = Matrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = self[(i, j)].clone();
            }
            a[(i, n)] = b[i].clone();
        }
        for k in 0..n {
            let p = pivot_row(&a, k, k).ok_or(Error::NotInvertible)?;
            a.swap_rows(p, k);
            let inv = a[(k, k)].inv().ok_or(Error::NotInvertible)?;
            for i in k + 1..n {
                let f = a[(i, k)].clone() * inv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..=n {
                    a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(k, j)].clone();
                }
            }
        }
        let mut x = vec![F::zero(); n];
        for i in (0..n).rev() {
            let mut s = a[(i, n)].clone();
            for j in i + 1..n {
                s = s - a[(i, j)].clone() * x[j].clone();
            }
            x[i] = s.try_div(&a[(i, i)])?;
        }
        Ok(x)
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

// Largest-magnitude nonzero entry in column `col`, rows `from..`.
fn pivot_row<F: Field>(a: &Matrix<F>, from: usize, col: usize) -> Option<usize> {
    (from..a.rows)
        .filter(|&i| !a[(i, col)].is_zero())
        .max_by(|&i, &j| {
            a[(i, col)]
                .magnitude()
                .partial_cmp(&a[(j, col)].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}

/// Row echelon form by fraction-free (Bareiss) elimination.
///
/// Every update is `(p * a_ij - a_ik * a_kj) / p_prev`, and the division is
/// exact, so entries stay minors of the input.
pub fn fraction_free_echelon<F: ExactField>(m: &Matrix<F>) -> Result<(Matrix<F>, Vec<usize>)> {
    check_compatible(m.entries())?;
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut prev = F::one();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let piv = a[(r, c)].clone();
        let prev_inv = prev.inv().ok_or(Error::NotInvertible)?;
        for i in r + 1..a.rows {
            let lead = a[(i, c)].clone();
            for j in c..a.cols {
                let v = (piv.clone() * a[(i, j)].clone() - lead.clone() * a[(r, j)].clone())
                    * prev_inv.clone();
                a[(i, j)] = v;
            }
        }
        // Columns left of `c` in rows below are already zero.
        pivots.push(c);
        prev = piv;
        r += 1;
    }
    Ok((a, pivots))
}

/// Right nullspace via fraction-free elimination followed by back substitution.
///
/// One basis vector per free column, with a `1` in that column and zeros in
/// the other free columns. Empty when the kernel is trivial.
pub fn nullspace_exact<F: ExactField>(m: &Matrix<F>) -> Result<Vec<Vec<F>>> {
    let (u, pivots) = fraction_free_echelon(m)?;
    Ok(kernel_from_echelon(&u, &pivots))
}

fn kernel_from_echelon<F: Field>(u: &Matrix<F>, pivots: &[usize]) -> Vec<Vec<F>> {
    let n = u.cols;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); n];
            x[f] = F::one();
            for (i, &pc) in pivots.iter().enumerate().rev() {
                let mut s = F::zero();
                for j in pc + 1..n {
                    if !x[j].is_zero() {
                        s = s + u[(i, j)].clone() * x[j].clone();
                    }
                }
                x[pc] = (-s).try_div(&u[(i, pc)]).expect("pivot is nonzero");
            }
            x
        })
        .collect()
}

/// Reduced row echelon form by plain Gauss-Jordan elimination over the field.
pub fn rref<F: ExactField>(m: &Matrix<F>) -> Result<(Matrix<F>, Vec<usize>)> {
    check_compatible(m.entries())?;
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let inv = a[(r, c)].inv().ok_or(Error::NotInvertible)?;
        for j in c..a.cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..a.cols {
                a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok((a, pivots))
}

/// Nullspace read off the reduced row echelon form.
pub fn nullspace_naive<F: ExactField>(m: &Matrix<F>) -> Result<Vec<Vec<F>>> {
    let (r, pivots) = rref(m)?;
    Ok(kernel_from_echelon(&r, &pivots))
}

pub fn rank_exact<F: ExactField>(m: &Matrix<F>) -> usize {
    fraction_free_echelon(m)
        .map(|(_, p)| p.len())
        .expect("rank of a matrix with mixed contexts")
}

/// Rank of a list of vectors of common length `len`.
pub fn rank_of_vectors<F: Field>(vs: &[Vec<F>], len: usize, rel_tol: f64) -> usize {
    if vs.is_empty() {
        return 0;
    }
    F::matrix_rank(&Matrix::from_columns(vs, len), rel_tol)
}

/// True iff the two families span the same subspace.
pub fn same_span<F: Field>(a: &[Vec<F>], b: &[Vec<F>], len: usize, rel_tol: f64) -> bool {
    let ra = rank_of_vectors(a, len, rel_tol);
    let rb = rank_of_vectors(b, len, rel_tol);
    let all: Vec<Vec<F>> = a.iter().chain(b).cloned().collect();
    ra == rb && rank_of_vectors(&all, len, rel_tol) == ra
}
