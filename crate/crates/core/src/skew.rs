//! Invariants of skew-symmetric matrices: characteristic coefficients, the
//! Pfaffian, and the rank-two structure results.

use rand::Rng;
use serde::Serialize;

use crate::algebra::field::{check_compatible, dot, Field, Rational};
use crate::algebra::{Matrix, Mode};
use crate::error::{Error, Result};
use crate::rng::small_int;

/// Relative tolerance for skew symmetry and zero tests in float mode.
pub const SKEW_TOL: f64 = 1e-12;
/// Relative singular-value threshold for float ranks.
pub const SKEW_RANK_TOL: f64 = 1e-9;
const EXPANSION_MAX: usize = 8;

/// An even-size skew-symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMap<F> {
    a: Matrix<F>,
}

impl<F: Field> SkewMap<F> {
    pub fn new(a: Matrix<F>) -> Result<Self> {
        if a.rows() != a.cols() || a.rows() % 2 == 1 || a.rows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: a.cols() + a.cols() % 2,
                found: a.rows(),
            });
        }
        check_compatible(a.entries())?;
        let scale = a.entries().map(Field::magnitude).fold(0.0, f64::max);
        let n = a.rows();
        for i in 0..n {
            for j in i..n {
                if !(a[(i, j)].clone() + a[(j, i)].clone()).is_negligible(scale, SKEW_TOL) {
                    return Err(Error::NotSkew);
                }
            }
        }
        Ok(SkewMap { a })
    }

    /// Skew matrix from its strictly upper triangle, listed row by row.
    pub fn from_upper(size: usize, upper: &[F]) -> Result<Self> {
        if upper.len() != size * size.saturating_sub(1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: size * size.saturating_sub(1) / 2,
                found: upper.len(),
            });
        }
        let mut a = Matrix::zeros(size, size);
        let mut it = upper.iter();
        for i in 0..size {
            for j in i + 1..size {
                let v = it.next().expect("length checked").clone();
                a[(j, i)] = -v.clone();
                a[(i, j)] = v;
            }
        }
        Self::new(a)
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.a
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    /// Half the size.
    pub fn half(&self) -> usize {
        self.a.rows() / 2
    }

    /// `P^T A P`.
    pub fn congruent(&self, p: &Matrix<F>) -> Result<Self> {
        Self::new(p.transpose().mul(&self.a)?.mul(p)?)
    }

    fn scale(&self) -> f64 {
        self.a.entries().map(Field::magnitude).fold(0.0, f64::max)
    }
}

/// All coefficients `c_1, ..., c_N` of `det(xI - A) = sum_k c_k x^{N-k}`
/// by the Faddeev–LeVerrier recursion.
pub fn char_poly_coeffs<F: Field>(a: &Matrix<F>) -> Result<Vec<F>> {
    let n = a.rows();
    let mut c = vec![F::one()];
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.mul(&m)?;
        for i in 0..n {
            next[(i, i)] = next[(i, i)].clone() + c[k - 1].clone();
        }
        let am = a.mul(&next)?;
        let ck = (-am.trace()).try_div(&F::from_i64(k as i64))?;
        c.push(ck);
        m = next;
    }
    c.remove(0);
    Ok(c)
}

/// `(a_1, ..., a_n)` with `det(xI - A) = x^{2n} + a_1 x^{2n-2} + ... + a_n`.
/// The odd coefficients are checked to vanish.
pub fn char_coeffs<F: Field>(s: &SkewMap<F>) -> Result<Vec<F>> {
    let c = char_poly_coeffs(&s.a)?;
    let scale = s.scale().max(1.0);
    for (k, ck) in c.iter().enumerate().filter(|(k, _)| k % 2 == 0) {
        // c[k] is the coefficient c_{k+1}
        if !ck.is_negligible(scale.powi(k as i32 + 1), SKEW_TOL) {
            return Err(Error::NotSkew);
        }
    }
    Ok(c.into_iter().skip(1).step_by(2).collect())
}

/// Pfaffian by congruence elimination; in float mode, sizes up to 8 use the
/// expansion along the first row instead.
pub fn pfaffian<F: Field>(s: &SkewMap<F>) -> F {
    if F::MODE == Mode::Float && s.size() <= EXPANSION_MAX {
        return pfaffian_expansion(&s.a);
    }
    pfaffian_elimination(&s.a)
}

/// Reduces `A` to a direct sum of `2 x 2` blocks by simultaneous row and
/// column operations; swaps flip the sign, additions keep it.
pub fn pfaffian_elimination<F: Field>(a: &Matrix<F>) -> F {
    let n = a.rows();
    let mut a = a.clone();
    let mut pf = F::one();
    for k in (0..n).step_by(2) {
        let candidates = k + 1..n;
        let j = match F::MODE {
            Mode::Exact => candidates.clone().find(|&j| !a[(k, j)].is_zero()),
            Mode::Float => candidates
                .clone()
                .max_by(|&x, &y| a[(k, x)].magnitude().total_cmp(&a[(k, y)].magnitude()))
                .filter(|&j| !a[(k, j)].is_zero()),
        };
        let Some(j) = j else {
            return F::zero();
        };
        if j != k + 1 {
            swap(&mut a, j, k + 1);
            pf = -pf;
        }
        let piv = a[(k, k + 1)].clone();
        pf = pf * piv.clone();
        let inv = piv.inv().expect("nonzero pivot");
        for i in k + 2..n {
            let c = a[(k, i)].clone() * inv.clone();
            if !c.is_zero() {
                add_multiple(&mut a, i, k + 1, &c);
            }
            // a[(k+1, k)] = -piv
            let d = -(a[(k + 1, i)].clone() * inv.clone());
            if !d.is_zero() {
                add_multiple(&mut a, i, k, &d);
            }
        }
    }
    pf
}

/// Swaps rows and columns `i`, `j`.
fn swap<F: Field>(a: &mut Matrix<F>, i: usize, j: usize) {
    let n = a.rows();
    for c in 0..n {
        let t = a[(i, c)].clone();
        a[(i, c)] = a[(j, c)].clone();
        a[(j, c)] = t;
    }
    for r in 0..n {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
}

/// Column `i` -= `c` column `j`, then row `i` -= `c` row `j`.
fn add_multiple<F: Field>(a: &mut Matrix<F>, i: usize, j: usize, c: &F) {
    let n = a.rows();
    for r in 0..n {
        a[(r, i)] = a[(r, i)].clone() - c.clone() * a[(r, j)].clone();
    }
    for s in 0..n {
        a[(i, s)] = a[(i, s)].clone() - c.clone() * a[(j, s)].clone();
    }
}

/// `Pf(A) = sum_{j >= 1} (-1)^{j-1} a_{0j} Pf(A_{0j})` with rows and
/// columns `0`, `j` removed.
pub fn pfaffian_expansion<F: Field>(a: &Matrix<F>) -> F {
    fn rec<F: Field>(a: &Matrix<F>, idx: &[usize]) -> F {
        if idx.is_empty() {
            return F::one();
        }
        let first = idx[0];
        let mut total = F::zero();
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            let entry = a[(first, j)].clone();
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..].iter().copied().filter(|&k| k != j).collect();
            let term = entry * rec(a, &rest);
            total = if pos % 2 == 1 { total + term } else { total - term };
        }
        total
    }
    let idx: Vec<usize> = (0..a.rows()).collect();
    rec(a, &idx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitchinVector<F> {
    /// `a_1, ..., a_{g-1}`
    pub a: Vec<F>,
    pub pf: F,
}

impl<F: Field> HitchinVector<F> {
    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Field::is_zero) && self.pf.is_zero()
    }
}

/// The invariant vector `(a_1, ..., a_{g-1}, Pf)` of a `2g x 2g` skew map.
pub fn hitchin_vector<F: Field>(s: &SkewMap<F>, g: usize) -> Result<HitchinVector<F>> {
    if s.size() != 2 * g {
        return Err(Error::DimensionMismatch {
            expected: 2 * g,
            found: s.size(),
        });
    }
    let mut a = char_coeffs(s)?;
    a.truncate(g - 1);
    Ok(HitchinVector { a, pf: pfaffian(s) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NilpotencyReport {
    pub rank: usize,
    pub nilpotent: bool,
}

/// Rank, and nilpotency decided by the vanishing of every `a_i`.
pub fn nilpotency_and_rank<F: Field>(s: &SkewMap<F>) -> Result<NilpotencyReport> {
    let rank = F::matrix_rank(&s.a, SKEW_RANK_TOL);
    let scale = s.scale().max(f64::MIN_POSITIVE);
    let nilpotent = char_coeffs(s)?
        .iter()
        .enumerate()
        .all(|(i, ai)| ai.is_negligible(scale.powi(2 * i as i32 + 2), SKEW_RANK_TOL));
    Ok(NilpotencyReport { rank, nilpotent })
}

/// Bases of `ker A` and `Im A`, orthogonal for the standard form.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank2Decomposition<F> {
    pub kernel: Vec<Vec<F>>,
    pub image: Vec<Vec<F>>,
}

impl<F: Field> Rank2Decomposition<F> {
    /// Largest `|q(k, m)|` over the two bases.
    pub fn max_pairing(&self) -> f64 {
        self.kernel
            .iter()
            .flat_map(|k| self.image.iter().map(move |m| dot(k, m).magnitude()))
            .fold(0.0, f64::max)
    }

    pub fn is_orthogonal(&self) -> bool {
        self.kernel
            .iter()
            .all(|k| self.image.iter().all(|m| dot(k, m).is_zero()))
    }
}

/// `M = ker A ⊕ Im A`, orthogonally, for a rank-two non-nilpotent `A`.
pub fn rank2_orthogonal_decomposition<F: Field>(s: &SkewMap<F>) -> Result<Rank2Decomposition<F>> {
    let rep = nilpotency_and_rank(s)?;
    if rep.rank != 2 {
        return Err(Error::RankNotTwo(rep.rank));
    }
    if rep.nilpotent {
        return Err(Error::NilpotentInput);
    }
    let n = s.size();
    let kernel = F::kernel_basis(&s.a, SKEW_RANK_TOL)?;
    let cols: Vec<Vec<F>> = (0..n).map(|j| s.a.column(j)).collect();
    let mut image: Vec<Vec<F>> = Vec::new();
    for c in cols {
        let mut trial = image.clone();
        trial.push(c.clone());
        if F::matrix_rank(&Matrix::from_columns(&trial, n), SKEW_RANK_TOL) == trial.len() {
            image = trial;
        }
        if image.len() == 2 {
            break;
        }
    }
    Ok(Rank2Decomposition { kernel, image })
}

/// Random skew map with entries in `-range..=range`.
pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, size: usize, range: i64) -> SkewMap<Rational> {
    let upper: Vec<Rational> = (0..size * (size - 1) / 2)
        .map(|_| small_int(rng, range))
        .collect();
    SkewMap::from_upper(size, &upper).expect("valid size")
}

/// `u w^T - w u^T` for random integer vectors `u`, `w`; rank 2 unless they
/// are parallel.
pub fn random_rank2<R: Rng + ?Sized>(rng: &mut R, size: usize, range: i64) -> SkewMap<Rational> {
    loop {
        let u: Vec<Rational> = (0..size).map(|_| small_int(rng, range)).collect();
        let w: Vec<Rational> = (0..size).map(|_| small_int(rng, range)).collect();
        let mut a = Matrix::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                a[(i, j)] = &u[i] * &w[j] - &w[i] * &u[j];
            }
        }
        if !a.is_zero() {
            return SkewMap::new(a).expect("skew by construction");
        }
    }
}

/// Product of `reflections` rational Householder reflections.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, size: usize, reflections: usize) -> Matrix<Rational> {
    let mut q = Matrix::identity(size);
    for _ in 0..reflections {
        let v: Vec<Rational> = loop {
            let v: Vec<Rational> = (0..size).map(|_| small_int(rng, 3)).collect();
            if v.iter().any(|c| !Field::is_zero(c)) {
                break v;
            }
        };
        let two_over = (dot(&v, &v) / Rational::from_integer(2.into())).recip();
        let mut h: Matrix<Rational> = Matrix::identity(size);
        for i in 0..size {
            for j in 0..size {
                h[(i, j)] = h[(i, j)].clone() - &v[i] * &v[j] * &two_over;
            }
        }
        q = q.mul(&h).expect("square");
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::rat;
    use crate::algebra::{Biquad, Radicands};
    use crate::rng::substream;

    fn skew(size: usize, upper: &[i64]) -> SkewMap<Rational> {
        SkewMap::from_upper(size, &upper.iter().map(|&v| rat(v)).collect::<Vec<_>>()).unwrap()
    }

    fn block(size: usize) -> SkewMap<Rational> {
        let mut a = Matrix::zeros(size, size);
        a[(0, 1)] = rat(1);
        a[(1, 0)] = rat(-1);
        SkewMap::new(a).unwrap()
    }

    #[test]
    fn rejects_non_skew() {
        let mut a = Matrix::<Rational>::zeros(2, 2);
        a[(0, 1)] = rat(1);
        assert_eq!(SkewMap::new(a), Err(Error::NotSkew));
        assert!(SkewMap::new(Matrix::<Rational>::zeros(3, 3)).is_err());
    }

    #[test]
    fn char_coeffs_of_single_block() {
        let c = char_coeffs(&block(6)).unwrap();
        assert_eq!(c, vec![rat(1), rat(0), rat(0)]);
        assert!(char_coeffs(&SkewMap::new(Matrix::<Rational>::zeros(4, 4)).unwrap())
            .unwrap()
            .iter()
            .all(|v| v.is_zero()));
    }

    #[test]
    fn small_pfaffians() {
        assert_eq!(pfaffian(&skew(2, &[7])), rat(7));
        // (a, b, c | d, e | f) = (2, 3, 5 | 7, 11 | 13): af - be + cd
        let s = skew(4, &[2, 3, 5, 7, 11, 13]);
        assert_eq!(pfaffian(&s), rat(2 * 13 - 3 * 11 + 5 * 7));
        assert_eq!(pfaffian_expansion(s.matrix()), pfaffian(&s));
        assert_eq!(pfaffian(&s) * pfaffian(&s), s.matrix().det().unwrap());
        // blocks with entries 3 and -4
        let b = skew(4, &[3, 0, 0, 0, 0, -4]);
        assert_eq!(pfaffian(&b), rat(-12));
    }

    #[test]
    fn pfaffian_needs_swaps() {
        // a_01 = 0 forces a pivot swap
        let s = skew(4, &[0, 1, 0, 0, 1, 0]);
        assert_eq!(pfaffian(&s), pfaffian_expansion(s.matrix()));
        assert_eq!(pfaffian(&s), rat(-1));
    }

    #[test]
    fn hitchin_vectors() {
        let z = SkewMap::new(Matrix::<Rational>::zeros(4, 4)).unwrap();
        let h = hitchin_vector(&z, 2).unwrap();
        assert!(h.is_zero());
        let j = skew(4, &[1, 0, 0, 0, 0, 1]);
        let h = hitchin_vector(&j, 2).unwrap();
        assert_eq!(h.pf, rat(1));
        assert_eq!(h.a, vec![rat(2)]);
        assert_eq!(char_coeffs(&j).unwrap()[1], rat(1));
        assert!(hitchin_vector(&j, 3).is_err());
    }

    #[test]
    fn nilpotency() {
        let j = skew(4, &[1, 0, 0, 0, 0, 1]);
        assert_eq!(
            nilpotency_and_rank(&j).unwrap(),
            NilpotencyReport {
                rank: 4,
                nilpotent: false
            }
        );
        // u w^T - w u^T with u = e_0 + i e_1, w = e_2 over Q(i, sqrt 2)
        let ctx = Radicands::new(rat(-1), rat(2)).unwrap();
        let i = Biquad::sqrt_u(&ctx);
        let mut a = Matrix::<Biquad>::zeros(4, 4);
        a[(0, 2)] = Biquad::one();
        a[(2, 0)] = -Biquad::one();
        a[(1, 2)] = i.clone();
        a[(2, 1)] = -i;
        let s = SkewMap::new(a).unwrap();
        let rep = nilpotency_and_rank(&s).unwrap();
        assert_eq!((rep.rank, rep.nilpotent), (2, true));
        let sq = s.matrix().mul(s.matrix()).unwrap();
        assert!(sq.mul(&sq).unwrap().is_zero());
        assert_eq!(rank2_orthogonal_decomposition(&s), Err(Error::NilpotentInput));
    }

    #[test]
    fn decomposition_of_block() {
        let d = rank2_orthogonal_decomposition(&block(6)).unwrap();
        assert_eq!(d.kernel.len(), 4);
        assert_eq!(d.image.len(), 2);
        assert!(d.is_orthogonal());
        for k in &d.kernel {
            assert!(k[0].is_zero() && k[1].is_zero());
        }
        assert_eq!(rank2_orthogonal_decomposition(&skew(4, &[1, 0, 0, 0, 0, 1])), Err(Error::RankNotTwo(4)));
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = substream(3, 0, 0);
        let q = random_orthogonal(&mut rng, 5, 5);
        assert_eq!(q.transpose().mul(&q).unwrap(), Matrix::identity(5));
        let a = block(6).congruent(&random_orthogonal(&mut rng, 6, 6)).unwrap();
        let d = rank2_orthogonal_decomposition(&a).unwrap();
        assert!(d.is_orthogonal());
        let r = random_rank2(&mut rng, 6, 4);
        assert_eq!(nilpotency_and_rank(&r).unwrap().rank, 2);
    }

    #[test]
    fn float_mode_agrees() {
        let s = skew(6, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]);
        let f = SkewMap::new(s.matrix().map(|v: &Rational| v.to_complex())).unwrap();
        let exact = pfaffian(&s).to_complex();
        assert!((pfaffian(&f) - exact).norm() <= 1e-9 * exact.norm().max(1.0));
        assert!((pfaffian_elimination(f.matrix()) - exact).norm() <= 1e-9 * exact.norm().max(1.0));
    }
}
