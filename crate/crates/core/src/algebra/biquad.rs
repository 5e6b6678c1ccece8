//! The biquadratic field `Q(sqrt u, sqrt w)` as a rank-4 algebra over `Q`.
//!
//! Elements are `c0 + c1 sqrt(u) + c2 sqrt(w) + c3 sqrt(u) sqrt(w)`. Rational
//! elements carry no context and mix freely with any context; two elements
//! with different radicands cannot be combined.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use super::field::{
    format_rational, is_rational_square, rat, rational_to_f64, ExactField, Field, Mode, Rational,
};
use super::matrix::{self, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radicands {
    pub u: Rational,
    pub w: Rational,
}

impl Radicands {
    /// Accepts `(u, w)` only when `u`, `w` and `u w` are non-squares, so
    /// the algebra is a field of degree 4.
    pub fn new(u: Rational, w: Rational) -> Result<Arc<Self>> {
        let uw = &u * &w;
        if Zero::is_zero(&u)
            || Zero::is_zero(&w)
            || is_rational_square(&u)
            || is_rational_square(&w)
            || is_rational_square(&uw)
        {
            return Err(Error::NotAField(format_rational(&u), format_rational(&w)));
        }
        Ok(Arc::new(Radicands { u, w }))
    }

    fn sqrt_c(q: &Rational) -> Complex64 {
        let f = rational_to_f64(q);
        if f >= 0.0 {
            Complex64::new(f.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-f).sqrt())
        }
    }
}

#[derive(Clone)]
pub struct Biquad {
    ctx: Option<Arc<Radicands>>,
    c: [Rational; 4],
}

impl Biquad {
    pub fn rational(q: Rational) -> Self {
        Biquad {
            ctx: None,
            c: [q, rat(0), rat(0), rat(0)],
        }
    }

    pub fn new(ctx: &Arc<Radicands>, c: [Rational; 4]) -> Self {
        let b = Biquad {
            ctx: Some(ctx.clone()),
            c,
        };
        b.normalized()
    }

    pub fn sqrt_u(ctx: &Arc<Radicands>) -> Self {
        let z = rat(0);
        Self::new(ctx, [z.clone(), rat(1), z.clone(), z])
    }

    pub fn sqrt_w(ctx: &Arc<Radicands>) -> Self {
        let z = rat(0);
        Self::new(ctx, [z.clone(), z.clone(), rat(1), z])
    }

    pub fn coords(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn context(&self) -> Option<&Arc<Radicands>> {
        self.ctx.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.c[0])
    }

    // Purely rational values drop their context so they combine with anything.
    fn normalized(mut self) -> Self {
        if self.is_rational() {
            self.ctx = None;
        }
        self
    }

    fn merge_ctx(a: &Option<Arc<Radicands>>, b: &Option<Arc<Radicands>>) -> Option<Arc<Radicands>> {
        match (a, b) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(x), Some(y)) => {
                assert!(
                    Arc::ptr_eq(x, y) || x == y,
                    "biquadratic context mismatch: {x:?} vs {y:?}"
                );
                Some(x.clone())
            }
        }
    }

    /// Conjugation `sqrt(w) -> -sqrt(w)`.
    fn conj_w(&self) -> Self {
        Biquad {
            ctx: self.ctx.clone(),
            c: [
                self.c[0].clone(),
                self.c[1].clone(),
                -self.c[2].clone(),
                -self.c[3].clone(),
            ],
        }
    }

    /// Conjugation `sqrt(u) -> -sqrt(u)`.
    fn conj_u(&self) -> Self {
        Biquad {
            ctx: self.ctx.clone(),
            c: [
                self.c[0].clone(),
                -self.c[1].clone(),
                self.c[2].clone(),
                -self.c[3].clone(),
            ],
        }
    }

    /// Field norm down to `Q`; zero exactly when the element is zero.
    pub fn norm(&self) -> Rational {
        let n1 = self.clone() * self.conj_w();
        let n = n1.clone() * n1.conj_u();
        debug_assert!(n.is_rational());
        n.c[0].clone()
    }
}

impl PartialEq for Biquad {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.compatible(other)
    }
}

impl fmt::Debug for Biquad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Biquad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(ctx) = &self.ctx else {
            return write!(f, "{}", format_rational(&self.c[0]));
        };
        let u = format_rational(&ctx.u);
        let w = format_rational(&ctx.w);
        let basis = ["1".to_string(), format!("√({u})"), format!("√({w})"), format!("√({u})√({w})")];
        let terms: Vec<String> = self
            .c
            .iter()
            .zip(basis.iter())
            .filter(|(c, _)| !Zero::is_zero(*c))
            .map(|(c, b)| {
                if b == "1" {
                    format_rational(c)
                } else {
                    format!("{}·{}", format_rational(c), b)
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for Biquad {
    type Output = Biquad;
    fn add(self, rhs: Biquad) -> Biquad {
        let ctx = Self::merge_ctx(&self.ctx, &rhs.ctx);
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        Biquad {
            ctx,
            c: [a0 + b0, a1 + b1, a2 + b2, a3 + b3],
        }
        .normalized()
    }
}

impl Sub for Biquad {
    type Output = Biquad;
    fn sub(self, rhs: Biquad) -> Biquad {
        self + (-rhs)
    }
}

impl Neg for Biquad {
    type Output = Biquad;
    fn neg(self) -> Biquad {
        let [a0, a1, a2, a3] = self.c;
        Biquad {
            ctx: self.ctx,
            c: [-a0, -a1, -a2, -a3],
        }
    }
}

impl Mul for Biquad {
    type Output = Biquad;
    fn mul(self, rhs: Biquad) -> Biquad {
        let ctx = Self::merge_ctx(&self.ctx, &rhs.ctx);
        if self.is_rational() || rhs.is_rational() {
            let (s, v) = if self.is_rational() { (self.c[0].clone(), rhs) } else { (rhs.c[0].clone(), self) };
            let c = v.c.map(|x| x * &s);
            return Biquad { ctx, c }.normalized();
        }
        let r = ctx.as_ref().expect("irrational element without context");
        let (u, w) = (&r.u, &r.w);
        let uw = u * w;
        let [a0, a1, a2, a3] = &self.c;
        let [b0, b1, b2, b3] = &rhs.c;
        let c0 = a0 * b0 + u * a1 * b1 + w * a2 * b2 + &uw * a3 * b3;
        let c1 = a0 * b1 + a1 * b0 + w * (a2 * b3 + a3 * b2);
        let c2 = a0 * b2 + a2 * b0 + u * (a1 * b3 + a3 * b1);
        let c3 = a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1;
        Biquad {
            ctx,
            c: [c0, c1, c2, c3],
        }
        .normalized()
    }
}

impl Field for Biquad {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Biquad::rational(rat(0))
    }
    fn one() -> Self {
        Biquad::rational(rat(1))
    }
    fn from_rational(q: &Rational) -> Self {
        Biquad::rational(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
    fn inv(&self) -> Option<Self> {
        if let Some(q) = self.as_rational() {
            return (!Zero::is_zero(q)).then(|| Biquad::rational(q.recip()));
        }
        // x^{-1} = conj_w(x) conj_u(x conj_w(x)) / N(x)
        let cw = self.conj_w();
        let n1 = self.clone() * cw.clone();
        let num = cw * n1.conj_u();
        let n = self.norm();
        if Zero::is_zero(&n) {
            return None;
        }
        let s = n.recip();
        Some(Biquad {
            ctx: num.ctx.clone(),
            c: num.c.map(|x| x * &s),
        }
        .normalized())
    }
    fn to_complex(&self) -> Complex64 {
        let base = Complex64::new(rational_to_f64(&self.c[0]), 0.0);
        let Some(ctx) = &self.ctx else { return base };
        let su = Radicands::sqrt_c(&ctx.u);
        let sw = Radicands::sqrt_c(&ctx.w);
        base + su * rational_to_f64(&self.c[1])
            + sw * rational_to_f64(&self.c[2])
            + su * sw * rational_to_f64(&self.c[3])
    }
    fn compatible(&self, other: &Self) -> bool {
        match (&self.ctx, &other.ctx) {
            (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => true,
        }
    }
    fn kernel_basis(m: &Matrix<Self>, _rel_tol: f64) -> Result<Vec<Vec<Self>>> {
        matrix::nullspace_exact(m)
    }
    fn matrix_rank(m: &Matrix<Self>, _rel_tol: f64) -> usize {
        matrix::rank_exact(m)
    }
}

impl ExactField for Biquad {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{rat, ratio};

    fn ctx() -> Arc<Radicands> {
        Radicands::new(rat(10), rat(-14)).unwrap()
    }

    #[test]
    fn square_roots_square_to_radicands() {
        let c = ctx();
        let su = Biquad::sqrt_u(&c);
        let sw = Biquad::sqrt_w(&c);
        assert_eq!(su.clone() * su.clone(), Biquad::from_i64(10));
        assert_eq!(sw.clone() * sw.clone(), Biquad::from_i64(-14));
        let p = su * sw;
        assert_eq!(p.clone() * p, Biquad::from_i64(-140));
    }

    #[test]
    fn inverse_roundtrip() {
        let c = ctx();
        let x = Biquad::new(&c, [rat(1), ratio(2, 3), rat(-1), rat(5)]);
        let y = x.inv().unwrap();
        assert_eq!(x * y, Biquad::one());
    }

    #[test]
    fn rejects_non_fields() {
        assert!(Radicands::new(rat(4), rat(3)).is_err());
        assert!(Radicands::new(rat(2), rat(8)).is_err());
        assert!(Radicands::new(rat(0), rat(3)).is_err());
        assert!(Radicands::new(rat(-1), rat(2)).is_ok());
    }

    #[test]
    fn complex_embedding_is_a_homomorphism() {
        let c = ctx();
        let x = Biquad::new(&c, [rat(1), rat(2), rat(3), rat(4)]);
        let y = Biquad::new(&c, [ratio(-1, 2), rat(0), rat(1), rat(-1)]);
        let lhs = (x.clone() * y.clone()).to_complex();
        let rhs = x.to_complex() * y.to_complex();
        assert!((lhs - rhs).norm() < 1e-9 * rhs.norm());
    }

    #[test]
    fn mixing_contexts_is_incompatible() {
        let a = Biquad::sqrt_u(&ctx());
        let b = Biquad::sqrt_u(&Radicands::new(rat(2), rat(3)).unwrap());
        assert!(!a.compatible(&b));
        assert!(crate::algebra::field::check_compatible([&a, &b]).is_err());
    }
}
