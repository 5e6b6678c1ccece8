//! Homogeneous binary forms `f(a, b) = sum_k c_k a^{d-k} b^k`.
//!
//! A parameter `[a:b]` of the projective line is stored as a pair. The
//! pencil chart `q_t = t q_1 - q_2` uses the affine parameter `t <-> [t:-1]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::field::{Field, Mode};
use super::matrix::Matrix;
use super::poly::Poly;
use crate::error::{Error, Result};

/// A point `[a:b]` of the projective line.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjParam<F> {
    pub a: F,
    pub b: F,
}

impl<F: Field> ProjParam<F> {
    pub fn new(a: F, b: F) -> Self {
        ProjParam { a, b }
    }

    /// The pencil chart: `t <-> [t : -1]`.
    pub fn from_pencil_chart(t: F) -> Self {
        ProjParam { a: t, b: -F::one() }
    }

    pub fn coincides(&self, other: &Self) -> bool {
        (self.a.clone() * other.b.clone() - self.b.clone() * other.a.clone()).is_zero()
    }

    pub fn to_complex(&self) -> ProjParam<Complex64> {
        ProjParam::new(self.a.to_complex(), self.b.to_complex())
    }
}

impl ProjParam<Complex64> {
    /// Representative with the larger coordinate equal to one.
    pub fn normalized(&self) -> Self {
        if self.a.norm() >= self.b.norm() {
            ProjParam::new(Complex64::new(1.0, 0.0), self.b / self.a)
        } else {
            ProjParam::new(self.a / self.b, Complex64::new(1.0, 0.0))
        }
    }

    /// Chordal distance between two parameters.
    pub fn distance(&self, other: &Self) -> f64 {
        super::numeric::projective_distance(&[self.a, self.b], &[other.a, other.b])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForm<F> {
    degree: usize,
    coeffs: Vec<F>,
}

impl<F: Field> BinaryForm<F> {
    pub fn new(degree: usize, coeffs: Vec<F>) -> Result<Self> {
        if coeffs.len() != degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: degree + 1,
                found: coeffs.len(),
            });
        }
        Ok(BinaryForm { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm {
            degree,
            coeffs: vec![F::zero(); degree + 1],
        }
    }

    /// Homogenization of `p(t)` in the pencil chart, so that `f(t, -1) = p(t)`.
    pub fn from_pencil_poly(p: &Poly<F>, degree: usize) -> Result<Self> {
        if p.degree().is_some_and(|d| d > degree) {
            return Err(Error::DimensionMismatch {
                expected: degree,
                found: p.degree().unwrap_or(0),
            });
        }
        // p(t) = f(t,-1) = sum_k c_k (-1)^k t^{d-k}
        let coeffs = (0..=degree)
            .map(|k| {
                let c = p.coeff(degree - k);
                if k % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Self::new(degree, coeffs)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Field::is_zero)
    }

    pub fn eval(&self, a: &F, b: &F) -> F {
        let d = self.degree;
        let mut apow = vec![F::one(); d + 1];
        let mut bpow = vec![F::one(); d + 1];
        for k in 1..=d {
            apow[k] = apow[k - 1].clone() * a.clone();
            bpow[k] = bpow[k - 1].clone() * b.clone();
        }
        self.coeffs
            .iter()
            .enumerate()
            .fold(F::zero(), |acc, (k, c)| {
                acc + c.clone() * apow[d - k].clone() * bpow[k].clone()
            })
    }

    pub fn eval_param(&self, p: &ProjParam<F>) -> F {
        self.eval(&p.a, &p.b)
    }

    /// Value in the pencil chart, `f(t, -1)`.
    pub fn eval_pencil(&self, t: &F) -> F {
        self.eval(t, &-F::one())
    }

    pub fn to_complex(&self) -> BinaryForm<Complex64> {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(Field::to_complex).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        BinaryForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    /// Roots with multiplicity as points of the projective line.
    pub fn roots(&self) -> Result<Vec<ProjParam<Complex64>>> {
        binary_form_roots(&self.to_complex())
    }
}

impl BinaryForm<Complex64> {
    pub fn norm(&self) -> f64 {
        super::numeric::norm(&self.coeffs)
    }
}

/// Below this relative size a coefficient counts as zero when picking a chart.
const LEAD_SAFEGUARD: f64 = 1e-12;

/// Roots of a nonzero form, with multiplicity, via companion-matrix
/// eigenvalues in a chart where the leading coefficient is not negligible.
pub fn binary_form_roots(f: &BinaryForm<Complex64>) -> Result<Vec<ProjParam<Complex64>>> {
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::ZeroForm);
    }
    let thr = LEAD_SAFEGUARD * norm;
    let mut coeffs = f.coeffs.clone();
    let mut roots = Vec::new();
    loop {
        let d = coeffs.len() - 1;
        if d == 0 {
            break;
        }
        // chart a = 1, s = b: p(s) = sum c_k s^k, leading c_d
        if coeffs[d].norm() > thr {
            for s in poly_roots(&coeffs) {
                roots.push(ProjParam::new(Complex64::new(1.0, 0.0), s));
            }
            break;
        }
        // chart b = 1, s = a: p(s) = sum c_k s^{d-k}, leading c_0
        if coeffs[0].norm() > thr {
            let rev: Vec<Complex64> = coeffs.iter().rev().copied().collect();
            for s in poly_roots(&rev) {
                roots.push(ProjParam::new(s, Complex64::new(1.0, 0.0)));
            }
            break;
        }
        // c_d ~ 0: [0:1] is a root; deflate f = a * g
        roots.push(ProjParam::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
        coeffs.pop();
    }
    Ok(roots.into_iter().map(|r| r.normalized()).collect())
}

/// Roots of `sum c_k s^k` (leading coefficient nonzero), polished by Newton steps.
fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut comp = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i] / lead;
    }
    let eig = comp
        .clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form is triangular");
    eig.iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..3 {
                let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for &ck in c.iter().rev() {
                    dp = dp * z + p;
                    p = p * z + ck;
                }
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                let z_new = z - step;
                let p_new = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * z_new + ck);
                if p_new.norm() < p.norm() {
                    z = z_new;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

/// The unique form of degree `degree` through the samples `f(a_i, b_i) = y_i`.
///
/// Needs at least `degree + 1` pairwise distinct parameters. Extra samples
/// are checked for consistency in exact mode.
pub fn interpolate_binary_form<F: Field>(
    samples: &[(ProjParam<F>, F)],
    degree: usize,
) -> Result<BinaryForm<F>> {
    let n = degree + 1;
    if samples.len() < n {
        return Err(Error::NotEnoughSamples {
            need: n,
            got: samples.len(),
        });
    }
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if samples[i].0.coincides(&samples[j].0) {
                return Err(Error::RepeatedParameter(i, j));
            }
        }
    }
    let row = |p: &ProjParam<F>| -> Vec<F> {
        let mut apow = vec![F::one(); n];
        let mut bpow = vec![F::one(); n];
        for k in 1..n {
            apow[k] = apow[k - 1].clone() * p.a.clone();
            bpow[k] = bpow[k - 1].clone() * p.b.clone();
        }
        (0..n)
            .map(|k| apow[degree - k].clone() * bpow[k].clone())
            .collect()
    };
    let sys = Matrix::from_rows(samples[..n].iter().map(|(p, _)| row(p)).collect())?;
    let rhs: Vec<F> = samples[..n].iter().map(|(_, y)| y.clone()).collect();
    let coeffs = sys.solve(&rhs)?;
    let form = BinaryForm::new(degree, coeffs)?;
    if F::MODE == Mode::Exact {
        for (p, y) in &samples[n..] {
            if form.eval_param(p) != *y {
                return Err(Error::InconsistentData);
            }
        }
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{rat, Rational};

    fn cf(c: &[f64]) -> BinaryForm<Complex64> {
        BinaryForm::new(c.len() - 1, c.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    fn has_root(roots: &[ProjParam<Complex64>], a: Complex64, b: Complex64) -> bool {
        let target = ProjParam::new(a, b);
        roots.iter().any(|r| r.distance(&target) < 1e-10)
    }

    #[test]
    fn monomial_roots() {
        // a*b
        let r = binary_form_roots(&cf(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(r.len(), 2);
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(has_root(&r, one, zero));
        assert!(has_root(&r, zero, one));
    }

    #[test]
    fn difference_of_squares() {
        let r = binary_form_roots(&cf(&[1.0, 0.0, -1.0])).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!(has_root(&r, one, one));
        assert!(has_root(&r, one, -one));
    }

    #[test]
    fn sum_of_squares_has_imaginary_roots() {
        let r = binary_form_roots(&cf(&[1.0, 0.0, 1.0])).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        assert!(has_root(&r, one, i));
        assert!(has_root(&r, one, -i));
    }

    #[test]
    fn zero_form_is_rejected() {
        assert_eq!(binary_form_roots(&cf(&[0.0, 0.0])), Err(Error::ZeroForm));
    }

    #[test]
    fn interpolation_of_vanishing_samples() {
        let s: Vec<(ProjParam<Rational>, Rational)> = (0..3)
            .map(|t| (ProjParam::new(rat(1), rat(t)), rat(0)))
            .collect();
        assert!(interpolate_binary_form(&s, 2).unwrap().is_zero());
    }

    #[test]
    fn interpolation_of_linear_sample() {
        // f(1, t) = t  =>  f = b
        let s = vec![
            (ProjParam::new(rat(1), rat(0)), rat(0)),
            (ProjParam::new(rat(1), rat(1)), rat(1)),
        ];
        let f = interpolate_binary_form(&s, 1).unwrap();
        assert_eq!(f.coeffs(), &[rat(0), rat(1)]);
    }

    #[test]
    fn interpolation_errors() {
        let dup = vec![
            (ProjParam::new(rat(1), rat(2)), rat(0)),
            (ProjParam::new(rat(2), rat(4)), rat(1)),
        ];
        assert_eq!(interpolate_binary_form(&dup, 1), Err(Error::RepeatedParameter(0, 1)));
        let inconsistent = vec![
            (ProjParam::new(rat(1), rat(0)), rat(0)),
            (ProjParam::new(rat(1), rat(1)), rat(1)),
            (ProjParam::new(rat(1), rat(2)), rat(5)),
        ];
        assert_eq!(interpolate_binary_form(&inconsistent, 1), Err(Error::InconsistentData));
    }

    #[test]
    fn determinant_of_symmetric_pencil() {
        // det [[t-1, 2], [2, 3t]] = 3t^2 - 3t - 4, sampled in the pencil chart.
        let det = |t: &Rational| {
            let m = Matrix::from_rows(vec![vec![t - rat(1), rat(2)], vec![rat(2), t * rat(3)]]).unwrap();
            m.det().unwrap()
        };
        let samples: Vec<_> = [5, 6, 7]
            .iter()
            .map(|&t| (ProjParam::from_pencil_chart(rat(t)), det(&rat(t))))
            .collect();
        let f = interpolate_binary_form(&samples, 2).unwrap();
        let expected = BinaryForm::from_pencil_poly(&Poly::new(vec![rat(-4), rat(-3), rat(3)]), 2).unwrap();
        assert_eq!(f, expected);
        for t in -3..3 {
            assert_eq!(f.eval_pencil(&rat(t)), det(&rat(t)));
        }
    }
}
