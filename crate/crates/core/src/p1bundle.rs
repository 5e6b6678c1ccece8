//! The bundle `V^⊥ ⊂ U ⊗ O_{P^1}` attached to a point of `X`, its splitting
//! type, and the Vandermonde kernel vector.
//!
//! `V^⊥` is the kernel of the `1 x (2g+2)` polynomial matrix
//! `M(t) = ((t - lambda_k) x_k)_k`. A minimal kernel column of degree `d`
//! stands for a summand `O(-d)`.

use std::fmt;

use serde::Serialize;

use crate::algebra::field::{check_compatible, rat, Field};
use crate::algebra::matrix::{rank_of_vectors, same_span};
use crate::algebra::poly::{vec_coeff, vec_degree, vec_from_coeffs};
use crate::algebra::{nullspace_exact, Matrix, Mode, Poly, PolyMatrix, PolyVec, Rational};
use crate::error::{Error, Result};
use crate::pencil::PencilOfQuadrics;
use crate::variety::{tangent_frame, PointOnX, TangentFrame};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis<F> {
    columns: Vec<PolyVec<F>>,
    degrees: Vec<usize>,
    row_map: PolyMatrix<F>,
    point: Vec<F>,
}

impl<F: Field> KernelBasis<F> {
    pub fn columns(&self) -> &[PolyVec<F>] {
        &self.columns
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn row_map(&self) -> &PolyMatrix<F> {
        &self.row_map
    }

    /// Sum of column degrees; `V^⊥` has degree minus this.
    pub fn degree_sum(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// `M(t) w(t) ≡ 0` for every column, by polynomial arithmetic.
    pub fn annihilated(&self) -> bool {
        self.columns.iter().all(|c| {
            self.row_map
                .mul_vec(c)
                .is_ok_and(|r| r.iter().all(Poly::is_zero))
        })
    }

    pub fn leading_coefficients(&self) -> Vec<Vec<F>> {
        self.columns
            .iter()
            .zip(&self.degrees)
            .map(|(c, &d)| vec_coeff(c, d))
            .collect()
    }

    /// Predictable-degree certificate: leading coefficient vectors are
    /// independent.
    pub fn is_minimal(&self) -> bool {
        let lead = self.leading_coefficients();
        rank_of_vectors(&lead, self.point.len(), 0.0) == lead.len()
    }

    /// The degree-0 columns as constant vectors.
    pub fn constant_columns(&self) -> Vec<Vec<F>> {
        self.columns
            .iter()
            .zip(&self.degrees)
            .filter(|(_, &d)| d == 0)
            .map(|(c, _)| vec_coeff(c, 0))
            .collect()
    }
}

/// `M(t) = ((t - lambda_k) x_k)_k`.
pub fn row_map<F: Field>(p: &PencilOfQuadrics, x: &[F]) -> PolyMatrix<F> {
    let entries = p
        .lambdas_in::<F>()
        .into_iter()
        .zip(x)
        .map(|(l, xk)| Poly::linear_root(l).scale(xk))
        .collect();
    PolyMatrix::new(1, x.len(), entries).expect("one row")
}

/// Subtracts multiples of `x` so that entry `p` vanishes.
fn reduce_mod<F: Field>(w: &[F], x: &[F], p: usize) -> Result<Vec<F>> {
    let c = w[p].try_div(&x[p])?;
    Ok(w.iter()
        .zip(x)
        .map(|(wi, xi)| wi.clone() - c.clone() * xi.clone())
        .collect())
}

/// Minimal polynomial basis of `ker M(t)`, found degree by degree.
pub fn v_perp_kernel<F: Field>(x: &PointOnX<F>) -> Result<KernelBasis<F>> {
    if F::MODE != Mode::Exact {
        return Err(Error::NonExactPoint);
    }
    let n = x.coords().len();
    let v = x.coords().to_vec();
    let lx = x.lambda_x();
    let frame = tangent_frame(x, 0.0)?;
    let p = frame.pivot();

    let mut columns: Vec<PolyVec<F>> = frame
        .s_basis()
        .iter()
        .map(|w| vec_from_coeffs(std::slice::from_ref(w)))
        .collect();
    let mut degrees = vec![0; columns.len()];

    // w_0 + t w_1: t^0: (lx).w_0 = 0, t^1: x.w_0 - (lx).w_1 = 0, t^2: x.w_1 = 0
    let zero = vec![F::zero(); n];
    let row = |a: &[F], b: &[F]| -> Vec<F> { a.iter().chain(b).cloned().collect() };
    let neg_lx: Vec<F> = lx.iter().map(|c| -c.clone()).collect();
    let block = Matrix::from_rows(vec![row(&lx, &zero), row(&v, &neg_lx), row(&zero, &v)])?;
    let known: Vec<Vec<F>> = frame
        .s_basis()
        .iter()
        .flat_map(|w| [row(w, &zero), row(&zero, w)])
        .collect();
    let base_rank = rank_of_vectors(&known, 2 * n, 0.0);
    let extra = F::kernel_basis(&block, 0.0)?.into_iter().find(|k| {
        let mut all = known.clone();
        all.push(k.clone());
        rank_of_vectors(&all, 2 * n, 0.0) > base_rank
    });
    let Some(k) = extra else {
        return Err(Error::UnexpectedSplitting(degrees));
    };
    let w0 = reduce_mod(&k[..n], &v, p)?;
    let w1 = reduce_mod(&k[n..], &v, p)?;
    columns.push(vec_from_coeffs(&[w0, w1]));
    degrees.push(1);

    if columns.len() != n - 1 {
        return Err(Error::UnexpectedSplitting(degrees));
    }
    let kb = KernelBasis {
        columns,
        degrees,
        row_map: row_map(x.pencil(), &v),
        point: v,
    };
    if !kb.annihilated() || !kb.is_minimal() {
        return Err(Error::UnexpectedSplitting(kb.degrees));
    }
    Ok(kb)
}

/// Multiset of twists, sorted; degree `d` stands for `O(-d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingType {
    pub degrees: Vec<usize>,
}

impl SplittingType {
    pub fn new(mut degrees: Vec<usize>) -> Self {
        degrees.sort_unstable();
        SplittingType { degrees }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn total_degree(&self) -> i64 {
        -(self.degrees.iter().sum::<usize>() as i64)
    }

    /// `O^{2g-1} ⊕ O(-1)` for genus `g`.
    pub fn expected_n_tilde(g: usize) -> Self {
        let mut d = vec![0; 2 * g - 1];
        d.push(1);
        SplittingType { degrees: d }
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.degrees.len() {
            let d = self.degrees[i];
            let j = self.degrees[i..].iter().take_while(|&&e| e == d).count();
            let base = if d == 0 { "O".to_string() } else { format!("O(-{d})") };
            parts.push(if j == 1 { base } else { format!("{base}^{j}") });
            i += j;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Splitting type of `V^⊥ / (V ⊗ O)`: drop one constant column whose span
/// is recovered by `x`, reduce the rest modulo `x` and certify minimality of
/// the quotient.
pub fn n_tilde_splitting<F: Field>(kb: &KernelBasis<F>) -> Result<SplittingType> {
    let x = &kb.point;
    let n = x.len();
    let p = crate::variety::argmax_magnitude(x);
    let unexpected = || Error::UnexpectedSplitting(kb.degrees.clone());
    let full: Vec<Vec<F>> = kb.constant_columns();
    let drop = (0..kb.columns.len())
        .filter(|&i| kb.degrees[i] == 0)
        .find(|&i| {
            let mut rest: Vec<Vec<F>> = kb
                .columns
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i && kb.degrees[j] == 0)
                .map(|(_, c)| vec_coeff(c, 0))
                .collect();
            rest.push(x.clone());
            same_span(&rest, &full, n, 0.0)
        })
        .ok_or_else(unexpected)?;

    let mut reduced = Vec::new();
    let mut degrees = Vec::new();
    for (j, c) in kb.columns.iter().enumerate() {
        if j == drop {
            continue;
        }
        let d = kb.degrees[j];
        let coeffs = (0..=d)
            .map(|k| reduce_mod(&vec_coeff(c, k), x, p))
            .collect::<Result<Vec<_>>>()?;
        let col = vec_from_coeffs(&coeffs);
        let deg = vec_degree(&col).ok_or_else(unexpected)?;
        reduced.push(vec_coeff(&col, deg));
        degrees.push(deg);
    }
    reduced.push(x.clone());
    if rank_of_vectors(&reduced, n, 0.0) != reduced.len() {
        return Err(unexpected());
    }
    let st = SplittingType::new(degrees);
    let g = n / 2 - 1;
    if st != SplittingType::expected_n_tilde(g) {
        return Err(Error::UnexpectedSplitting(st.degrees));
    }
    Ok(st)
}

/// Whether the constant kernel columns span exactly `S`.
///
/// Data over different coefficient fields never match.
pub fn trivial_factor_matches_tangent<F: Field>(kb: &KernelBasis<F>, frame: &TangentFrame<F>) -> bool {
    let consts = kb.constant_columns();
    if check_compatible(consts.iter().chain(frame.s_basis()).flatten()).is_err() {
        return false;
    }
    same_span(&consts, frame.s_basis(), kb.point.len(), 0.0)
}

/// Rows `lambda^0, ..., lambda^{2g}`.
pub fn power_matrix(p: &PencilOfQuadrics) -> Matrix<Rational> {
    let n = p.ambient_dim();
    let rows = (0..n - 1)
        .map(|i| {
            p.lambdas()
                .iter()
                .map(|l| (0..i).fold(rat(1), |acc, _| acc * l))
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).expect("rectangular")
}

/// The kernel vector of the power matrix, scaled so that its last entry is
/// `1 / prod_{k != last} (lambda_last - lambda_k)`.
pub fn vandermonde_normalizer(p: &PencilOfQuadrics) -> Result<Vec<Rational>> {
    let ker = nullspace_exact(&power_matrix(p))?;
    let [a] = <[Vec<Rational>; 1]>::try_from(ker)
        .map_err(|k| Error::Precondition(format!("kernel dimension {}", k.len())))?;
    let last = p.last();
    let ls = p.lambdas();
    let target = (0..last).fold(rat(1), |acc, k| acc * (&ls[last] - &ls[k])).recip();
    let c = &target / &a[last];
    Ok(a.iter().map(|v| v * &c).collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::field::ratio;
    use crate::algebra::Biquad;
    use crate::fibration::exact_sample;
    use crate::variety::{point_from_tail, RANK_TOL};

    fn point(g: usize, seed: u64) -> PointOnX<Biquad> {
        let p = Arc::new(PencilOfQuadrics::canonical(g).unwrap());
        exact_sample(&p, seed, 0, 0, false).unwrap().point
    }

    #[test]
    fn kernel_of_example_point() {
        let p = Arc::new(PencilOfQuadrics::canonical(2).unwrap());
        let x = point_from_tail(&p, &[rat(1), rat(1), rat(1), rat(1)]).unwrap();
        let kb = v_perp_kernel(&x).unwrap();
        assert_eq!(kb.columns().len(), 5);
        let mut d = kb.degrees().to_vec();
        d.sort();
        assert_eq!(d, vec![0, 0, 0, 0, 1]);
        assert_eq!(kb.degree_sum(), 1);
        assert!(kb.annihilated());
        assert!(kb.is_minimal());
        let consts = kb.constant_columns();
        assert!(same_span(&consts, &[x.coords().to_vec()].iter().chain(&consts).cloned().collect::<Vec<_>>(), 6, 0.0));
    }

    #[test]
    fn splitting_types() {
        for g in [2, 3] {
            let x = point(g, 1);
            let kb = v_perp_kernel(&x).unwrap();
            let st = n_tilde_splitting(&kb).unwrap();
            assert_eq!(st, SplittingType::expected_n_tilde(g));
            assert_eq!(st.total_degree(), -1);
            assert_eq!(st.rank(), 2 * g);
        }
        assert_eq!(SplittingType::expected_n_tilde(2).to_string(), "O^3 + O(-1)");
    }

    #[test]
    fn trivial_factor_is_tangent_space() {
        let x = point(2, 2);
        let kb = v_perp_kernel(&x).unwrap();
        let frame = tangent_frame(&x, RANK_TOL).unwrap();
        assert!(trivial_factor_matches_tangent(&kb, &frame));
        let other = tangent_frame(&point(2, 3), RANK_TOL).unwrap();
        assert!(!trivial_factor_matches_tangent(&kb, &other));
        // a rescaled lift lives in the same field but has the same S
        let same = tangent_frame(&x.scaled(&Biquad::rational(rat(3))).unwrap(), RANK_TOL).unwrap();
        assert!(trivial_factor_matches_tangent(&kb, &same));
    }

    #[test]
    fn rescaling_keeps_span_and_degrees() {
        let x = point(2, 4);
        let y = x.scaled(&Biquad::rational(ratio(-5, 3))).unwrap();
        let (a, b) = (v_perp_kernel(&x).unwrap(), v_perp_kernel(&y).unwrap());
        assert_eq!(a.degrees(), b.degrees());
        assert!(same_span(&a.constant_columns(), &b.constant_columns(), 6, 0.0));
    }

    #[test]
    fn float_points_are_rejected() {
        let x = point(2, 5).to_complex().unwrap();
        assert_eq!(v_perp_kernel(&x), Err(Error::NonExactPoint));
    }

    #[test]
    fn vandermonde_example() {
        let p = PencilOfQuadrics::canonical(2).unwrap();
        let a = vandermonde_normalizer(&p).unwrap();
        let expected = [ratio(-1, 120), ratio(1, 24), ratio(-1, 12), ratio(1, 12), ratio(-1, 24), ratio(1, 120)];
        assert_eq!(a, expected);
    }
}
