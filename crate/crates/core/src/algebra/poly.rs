//! Dense univariate polynomials in `t` and polynomial matrices.

use super::field::Field;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Coefficients low to high; the last stored coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(Field::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `t - a`
    pub fn linear_root(a: F) -> Self {
        Self::new(vec![-a, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &F) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![F::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::new(c)
    }
}

/// A vector of polynomials, i.e. a column of a polynomial matrix.
pub type PolyVec<F> = Vec<Poly<F>>;

/// Degree of a polynomial vector: the maximum entry degree (`None` if zero).
pub fn vec_degree<F: Field>(v: &[Poly<F>]) -> Option<usize> {
    v.iter().filter_map(Poly::degree).max()
}

/// Coefficient vector of `t^k` in a polynomial vector.
pub fn vec_coeff<F: Field>(v: &[Poly<F>], k: usize) -> Vec<F> {
    v.iter().map(|p| p.coeff(k)).collect()
}

/// Assembles `sum_k c_k t^k` from coefficient vectors.
pub fn vec_from_coeffs<F: Field>(coeffs: &[Vec<F>]) -> PolyVec<F> {
    let n = coeffs.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| Poly::new(coeffs.iter().map(|c| c[i].clone()).collect()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix<F> {
    rows: usize,
    cols: usize,
    entries: Vec<Poly<F>>,
}

impl<F: Field> PolyMatrix<F> {
    pub fn new(rows: usize, cols: usize, entries: Vec<Poly<F>>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly<F> {
        &self.entries[i * self.cols + j]
    }

    pub fn degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(Poly::degree).max()
    }

    pub fn eval(&self, t: &F) -> Matrix<F> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.entry(i, j).eval(t);
            }
        }
        m
    }

    /// Constant matrix of `t^k` coefficients.
    pub fn coeff_matrix(&self, k: usize) -> Matrix<F> {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.entry(i, j).coeff(k);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Poly<F>]) -> Result<PolyVec<F>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Poly::zero(), |acc, j| acc.add(&self.entry(i, j).mul(&v[j])))
            })
            .collect())
    }
}
