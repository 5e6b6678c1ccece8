use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{self, Matrix};
use super::numeric;
use crate::error::{Error, Result};

/// Exact rational numbers, always reduced with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `p/q` for proper fractions, `p` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parsed = if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s}")));
        }
        Rational::new(n, d)
    } else {
        Rational::from_integer(s.parse().map_err(|_| Error::Parse(s.to_string()))?)
    };
    Ok(parsed)
}

/// True iff `q` is the square of a rational number.
pub fn is_rational_square(q: &Rational) -> bool {
    if q.is_negative() {
        return false;
    }
    let is_sq = |n: &BigInt| {
        let r = n.sqrt();
        &(&r * &r) == n
    };
    is_sq(q.numer()) && is_sq(q.denom())
}

/// Arithmetic mode of a scalar type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A commutative field usable by the generic linear algebra in this crate.
///
/// Exact fields decide zero-ness exactly and ignore tolerance arguments;
/// the complex-float field uses them for rank decisions.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse, `None` for zero (or a zero divisor).
    fn inv(&self) -> Option<Self>;
    fn to_complex(&self) -> Complex64;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&rat(n))
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Whether two values may be combined (same algebraic context).
    fn compatible(&self, _other: &Self) -> bool {
        true
    }

    /// Zero test relative to `scale`; exact fields test exactly.
    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool {
        match Self::MODE {
            Mode::Exact => self.is_zero(),
            Mode::Float => self.magnitude() <= rel_tol * scale.max(f64::MIN_POSITIVE),
        }
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        rhs.inv()
            .map(|r| self.clone() * r)
            .ok_or(Error::NotInvertible)
    }

    /// Right kernel of `m`. Exact fields use fraction-free elimination.
    fn kernel_basis(m: &Matrix<Self>, rel_tol: f64) -> Result<Vec<Vec<Self>>>;

    fn matrix_rank(m: &Matrix<Self>, rel_tol: f64) -> usize;
}

/// Marker for fields whose arithmetic is exact.
pub trait ExactField: Field {}

impl Field for Rational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn kernel_basis(m: &Matrix<Self>, _rel_tol: f64) -> Result<Vec<Vec<Self>>> {
        matrix::nullspace_exact(m)
    }
    fn matrix_rank(m: &Matrix<Self>, _rel_tol: f64) -> usize {
        matrix::rank_exact(m)
    }
}

impl ExactField for Rational {}

impl Field for Complex64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn inv(&self) -> Option<Self> {
        if Field::is_zero(self) {
            None
        } else {
            Some(1.0 / *self)
        }
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn kernel_basis(m: &Matrix<Self>, rel_tol: f64) -> Result<Vec<Vec<Self>>> {
        numeric::nullspace(m, rel_tol)
    }
    fn matrix_rank(m: &Matrix<Self>, rel_tol: f64) -> usize {
        numeric::rank(m, rel_tol)
    }
}

/// Standard bilinear pairing `sum a_j b_j` (no conjugation).
pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn scale_vec<F: Field>(v: &[F], s: &F) -> Vec<F> {
    v.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn axpy<F: Field>(y: &[F], a: &F, x: &[F]) -> Vec<F> {
    y.iter()
        .zip(x)
        .map(|(yi, xi)| yi.clone() + a.clone() * xi.clone())
        .collect()
}

pub fn to_complex_vec<F: Field>(v: &[F]) -> Vec<Complex64> {
    v.iter().map(Field::to_complex).collect()
}

pub fn norm_f64<F: Field>(v: &[F]) -> f64 {
    v.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt()
}

/// Checks that every value shares one arithmetic context.
pub fn check_compatible<'a, F: Field>(values: impl IntoIterator<Item = &'a F>) -> Result<()> {
    let mut first: Option<&F> = None;
    for v in values {
        match first {
            None => first = Some(v),
            Some(f) => {
                if !f.compatible(v) {
                    return Err(Error::ModeMismatch(format!("{f:?} vs {v:?}")));
                }
            }
        }
    }
    Ok(())
}
