//! Complex floating-point linear algebra on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Singular values within this factor of the rank tolerance are ambiguous.
const AMBIGUITY_BAND: f64 = 100.0;

pub fn to_dmatrix(m: &Matrix<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub fn from_dvector(v: &DVector<Complex64>) -> Vec<Complex64> {
    v.iter().copied().collect()
}

/// Singular values plus the full right singular basis (rows of `V^H`).
///
/// Wide matrices are padded with zero rows so that `V` is square.
pub fn full_svd(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let (r, c) = m.shape();
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    // nalgebra does not promise sorted output
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v_t = DMatrix::from_fn(v_t.nrows(), v_t.ncols(), |i, j| v_t[(order[i], j)]);
    (s, v_t)
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank: singular values above `rel_tol * sigma_max`.
pub fn rank_dm(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

pub fn rank(m: &Matrix<Complex64>, rel_tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    rank_dm(&to_dmatrix(m), rel_tol)
}

/// Orthonormal kernel basis. Fails when a singular value sits inside the
/// band around the tolerance, where the rank cannot be decided.
pub fn nullspace(m: &Matrix<Complex64>, rel_tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let n = m.cols();
    if m.rows() == 0 || m.is_zero() {
        return Ok((0..n)
            .map(|i| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[i] = Complex64::new(1.0, 0.0);
                e
            })
            .collect());
    }
    let (s, v_t) = full_svd(&to_dmatrix(m));
    let top = s[0];
    for &x in &s {
        let ratio = x / top;
        if ratio > rel_tol / AMBIGUITY_BAND && ratio <= rel_tol * AMBIGUITY_BAND {
            return Err(Error::RankAmbiguity(ratio));
        }
    }
    let r = s.iter().filter(|&&x| x > rel_tol * top).count();
    Ok((r..n)
        .map(|k| (0..n).map(|j| v_t[(k, j)].conj()).collect())
        .collect())
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = norm(v);
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|z| z / n).collect()
}

/// Chordal distance between the lines spanned by `a` and `b`: the norm of
/// the component of `b/|b|` orthogonal to `a`, i.e. `min_phase |b - e^{i t} a|`
/// up to second order. Zero vectors are at distance 1 from everything.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 || a.len() != b.len() {
        return 1.0;
    }
    let ua: Vec<Complex64> = a.iter().map(|z| z / na).collect();
    let ub: Vec<Complex64> = b.iter().map(|z| z / nb).collect();
    let overlap: Complex64 = ua.iter().zip(&ub).map(|(x, y)| x.conj() * y).sum();
    ub.iter()
        .zip(&ua)
        .map(|(y, x)| (y - x * overlap).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = Matrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let k = nullspace(&m, 1e-9).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            let r = m.mul_vec(v).unwrap();
            assert!(r[0].norm() < 1e-12);
        }
    }

    #[test]
    fn ambiguous_rank_is_reported() {
        let m = Matrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1e-9, 0.0)],
        ])
        .unwrap();
        assert!(matches!(nullspace(&m, 1e-9), Err(Error::RankAmbiguity(_))));
    }

    #[test]
    fn projective_distance_ignores_phase() {
        let a = vec![c(1.0, 0.0), c(2.0, -1.0)];
        let b: Vec<Complex64> = a.iter().map(|z| z * c(0.0, -3.0)).collect();
        assert!(projective_distance(&a, &b) < 1e-15);
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let e2 = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!((projective_distance(&e1, &e2) - 1.0).abs() < 1e-15);
    }
}
