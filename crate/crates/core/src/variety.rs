//! Points of `X = {q_1 = q_2 = 0}` and of `Y = X ∩ {x_{2g+1} = 0}`, tangent
//! frames, cotangent representatives and the sign-group quotients.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::field::{check_compatible, dot, norm_f64, rat, Field};
use crate::algebra::{Biquad, Matrix, Mode, Radicands, Rational};
use crate::error::{Error, Result};
use crate::pencil::{sign_group_elements, PencilOfQuadrics, SignGroupElement};
use crate::rng::{small_rational, substream, unit_box_complex, RandomScalar};

/// Relative tolerance for `q_i(x) = 0` and `eta(x) = 0` in float mode.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Relative singular-value threshold for float rank decisions.
pub const RANK_TOL: f64 = 1e-9;
pub const RESAMPLE_BUDGET: usize = 64;

/// A fixed homogeneous lift of a point of `X`.
#[derive(Debug, Clone)]
pub struct PointOnX<F> {
    pencil: Arc<PencilOfQuadrics>,
    coords: Vec<F>,
    on_y: bool,
}

impl<F: PartialEq> PartialEq for PointOnX<F> {
    fn eq(&self, other: &Self) -> bool {
        self.pencil == other.pencil && self.coords == other.coords
    }
}

impl<F: Field> PointOnX<F> {
    pub fn new(pencil: Arc<PencilOfQuadrics>, coords: Vec<F>) -> Result<Self> {
        Self::with_tolerance(pencil, coords, MEMBERSHIP_TOL)
    }

    pub fn with_tolerance(pencil: Arc<PencilOfQuadrics>, coords: Vec<F>, tol: f64) -> Result<Self> {
        if coords.len() != pencil.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: pencil.ambient_dim(),
                found: coords.len(),
            });
        }
        check_compatible(&coords)?;
        if coords.iter().all(Field::is_zero) {
            return Err(Error::NotOnVariety("zero vector".into()));
        }
        let scale = norm_f64(&coords).powi(2);
        let r1 = pencil.q1(&coords);
        let r2 = pencil.q2(&coords);
        if !r1.is_negligible(scale, tol) || !r2.is_negligible(scale, tol) {
            return Err(Error::NotOnVariety(format!(
                "{:.3e}",
                r1.magnitude().max(r2.magnitude()) / scale
            )));
        }
        let on_y = coords[pencil.last()].is_zero();
        Ok(PointOnX {
            pencil,
            coords,
            on_y,
        })
    }

    pub fn pencil(&self) -> &Arc<PencilOfQuadrics> {
        &self.pencil
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn on_y(&self) -> bool {
        self.on_y
    }

    pub fn genus(&self) -> usize {
        self.pencil.genus()
    }

    pub fn mode(&self) -> Mode {
        F::MODE
    }

    /// Coordinate of largest magnitude (first one on ties).
    pub fn pivot(&self) -> usize {
        argmax_magnitude(&self.coords)
    }

    pub fn lambda_x(&self) -> Vec<F> {
        self.pencil.polar_covectors(&self.coords)[1].clone()
    }

    /// Rows `q_1(v, .)` and `q_2(v, .)`.
    pub fn polar_rows(&self) -> Matrix<F> {
        self.pencil.polar_rows(&self.coords)
    }

    pub fn scaled(&self, s: &F) -> Result<Self> {
        Self::new(
            self.pencil.clone(),
            self.coords.iter().map(|c| c.clone() * s.clone()).collect(),
        )
    }

    pub fn act(&self, e: &SignGroupElement) -> Result<Self> {
        Self::new(self.pencil.clone(), e.act(&self.coords)?)
    }

    pub fn to_complex(&self) -> Result<PointOnX<Complex64>> {
        PointOnX::new(
            self.pencil.clone(),
            self.coords.iter().map(Field::to_complex).collect(),
        )
    }

    /// Equality as points of projective space.
    pub fn projectively_equal(&self, other: &Self, tol: f64) -> bool {
        projectively_equal(&self.coords, &other.coords, tol)
    }
}

pub(crate) fn argmax_magnitude<F: Field>(v: &[F]) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, x) in v.iter().enumerate() {
        let m = x.magnitude();
        if m > best_mag {
            best = i;
            best_mag = m;
        }
    }
    best
}

/// `a` and `b` span the same line: all 2x2 minors vanish.
pub fn projectively_equal<F: Field>(a: &[F], b: &[F], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = norm_f64(a) * norm_f64(b);
    if scale == 0.0 {
        return false;
    }
    let p = argmax_magnitude(a);
    (0..a.len()).all(|j| {
        (a[p].clone() * b[j].clone() - a[j].clone() * b[p].clone()).is_negligible(scale, tol)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub exact: bool,
    pub on_y: bool,
    pub avoid_coordinate_hyperplanes: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            exact: true,
            on_y: false,
            avoid_coordinate_hyperplanes: true,
        }
    }
}

/// Given `x_2, ..., x_{2g+1}`, the values `u_0 = x_0^2`, `u_1 = x_1^2` forced
/// by `q_1 = q_2 = 0`.
pub fn head_squares<F: Field>(p: &PencilOfQuadrics, tail: &[F]) -> Result<(F, F)> {
    if tail.len() != p.ambient_dim() - 2 {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_dim() - 2,
            found: tail.len(),
        });
    }
    let lam = p.lambdas_in::<F>();
    let s1 = dot(tail, tail);
    let s2 = tail
        .iter()
        .zip(&lam[2..])
        .fold(F::zero(), |acc, (t, l)| acc + l.clone() * t.clone() * t.clone());
    let u0 = (lam[1].clone() * s1.clone() - s2).try_div(&(lam[0].clone() - lam[1].clone()))?;
    let u1 = -s1 - u0.clone();
    Ok((u0, u1))
}

/// The exact point `(sqrt(u_0), sqrt(u_1), tail)` over `Q(sqrt(u_0), sqrt(u_1))`.
pub fn point_from_tail(p: &Arc<PencilOfQuadrics>, tail: &[Rational]) -> Result<PointOnX<Biquad>> {
    let (u0, u1) = head_squares(p, tail)?;
    let ctx = Radicands::new(u0, u1)?;
    let mut coords = vec![Biquad::sqrt_u(&ctx), Biquad::sqrt_w(&ctx)];
    coords.extend(tail.iter().map(|t| Biquad::rational(t.clone())));
    PointOnX::new(p.clone(), coords)
}

pub fn point_from_complex_tail(
    p: &Arc<PencilOfQuadrics>,
    tail: &[Complex64],
) -> Result<PointOnX<Complex64>> {
    let (u0, u1) = head_squares(p, tail)?;
    let mut coords = vec![u0.sqrt(), u1.sqrt()];
    coords.extend_from_slice(tail);
    PointOnX::new(p.clone(), coords)
}

/// First tail (out of at most [`RESAMPLE_BUDGET`]) that yields an exact point.
pub fn first_exact_point(
    p: &Arc<PencilOfQuadrics>,
    tails: impl IntoIterator<Item = Vec<Rational>>,
) -> Result<PointOnX<Biquad>> {
    for tail in tails.into_iter().take(RESAMPLE_BUDGET) {
        match point_from_tail(p, &tail) {
            Ok(x) => return Ok(x),
            Err(Error::NotAField(..)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

fn random_tail<R: Rng + ?Sized>(p: &PencilOfQuadrics, rng: &mut R, opts: &SampleOptions) -> Vec<Rational> {
    let n = p.ambient_dim() - 2;
    (0..n)
        .map(|j| {
            if opts.on_y && j == n - 1 {
                rat(0)
            } else {
                small_rational(rng, opts.avoid_coordinate_hyperplanes)
            }
        })
        .collect()
}

pub fn sample_exact_point<R: Rng + ?Sized>(
    p: &Arc<PencilOfQuadrics>,
    rng: &mut R,
    opts: &SampleOptions,
) -> Result<PointOnX<Biquad>> {
    first_exact_point(p, std::iter::repeat_with(|| random_tail(p, rng, opts)))
}

pub fn sample_float_point<R: Rng + ?Sized>(
    p: &Arc<PencilOfQuadrics>,
    rng: &mut R,
    opts: &SampleOptions,
) -> Result<PointOnX<Complex64>> {
    let n = p.ambient_dim() - 2;
    for _ in 0..RESAMPLE_BUDGET {
        let tail: Vec<Complex64> = (0..n)
            .map(|j| {
                if opts.on_y && j == n - 1 {
                    Complex64::new(0.0, 0.0)
                } else {
                    unit_box_complex(rng)
                }
            })
            .collect();
        if opts.avoid_coordinate_hyperplanes {
            let live = if opts.on_y { &tail[..n - 1] } else { &tail[..] };
            if live.iter().any(|t| t.norm() < 1e-3) {
                continue;
            }
            let (u0, u1) = head_squares(p, &tail)?;
            if u0.norm() < 1e-6 || u1.norm() < 1e-6 {
                continue;
            }
        }
        return point_from_complex_tail(p, &tail);
    }
    Err(Error::ResampleBudgetExceeded(RESAMPLE_BUDGET))
}

/// A point in either arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoint {
    Exact(PointOnX<Biquad>),
    Float(PointOnX<Complex64>),
}

impl AnyPoint {
    pub fn mode(&self) -> Mode {
        match self {
            AnyPoint::Exact(_) => Mode::Exact,
            AnyPoint::Float(_) => Mode::Float,
        }
    }

    pub fn on_y(&self) -> bool {
        match self {
            AnyPoint::Exact(x) => x.on_y(),
            AnyPoint::Float(x) => x.on_y(),
        }
    }

    pub fn pencil(&self) -> &Arc<PencilOfQuadrics> {
        match self {
            AnyPoint::Exact(x) => x.pencil(),
            AnyPoint::Float(x) => x.pencil(),
        }
    }
}

/// Seeded sampling entry point.
pub fn sample_point(p: &Arc<PencilOfQuadrics>, seed: u64, opts: &SampleOptions) -> Result<AnyPoint> {
    let mut rng = substream(seed, 0, 0);
    if opts.exact {
        sample_exact_point(p, &mut rng, opts).map(AnyPoint::Exact)
    } else {
        sample_float_point(p, &mut rng, opts).map(AnyPoint::Float)
    }
}

/// Basis of `S = V^{⊥q_1} ∩ V^{⊥q_2}` and lifts of a basis of `S/V`.
#[derive(Debug, Clone)]
pub struct TangentFrame<F> {
    point: PointOnX<F>,
    s_basis: Vec<Vec<F>>,
    quotient_basis: Vec<Vec<F>>,
    pivot: usize,
}

impl<F: Field> TangentFrame<F> {
    pub fn point(&self) -> &PointOnX<F> {
        &self.point
    }

    /// `v` followed by the quotient lifts.
    pub fn s_basis(&self) -> &[Vec<F>] {
        &self.s_basis
    }

    /// Lifts with vanishing coordinate at [`Self::pivot`].
    pub fn quotient_basis(&self) -> &[Vec<F>] {
        &self.quotient_basis
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// Coordinates of `w` in `S/V` with respect to the quotient basis.
    pub fn quotient_coords(&self, w: &[F]) -> Result<Vec<F>> {
        let x = self.point.coords();
        let p = self.pivot;
        let c = w[p].try_div(&x[p])?;
        let reduced: Vec<F> = w
            .iter()
            .zip(x)
            .map(|(wi, xi)| wi.clone() - c.clone() * xi.clone())
            .collect();
        let m = Matrix::from_columns(&self.quotient_basis, reduced.len());
        let normal = m.transpose().mul(&m)?;
        normal.solve(&m.transpose().mul_vec(&reduced)?)
    }
}

pub fn tangent_frame<F: Field>(x: &PointOnX<F>, rel_tol: f64) -> Result<TangentFrame<F>> {
    let g = x.genus();
    let n = x.pencil().ambient_dim();
    let s = F::kernel_basis(&x.polar_rows(), rel_tol)?;
    if s.len() != 2 * g {
        return Err(Error::Precondition(format!(
            "dim S = {} instead of {}",
            s.len(),
            2 * g
        )));
    }
    let pivot = x.pivot();
    let mut e = vec![F::zero(); n];
    e[pivot] = F::one();
    let [r1, r2] = x.pencil().polar_covectors(x.coords());
    let quotient_basis = F::kernel_basis(&Matrix::from_rows(vec![r1, r2, e])?, rel_tol)?;
    if quotient_basis.len() != 2 * g - 1 {
        return Err(Error::Precondition(format!(
            "dim S/V = {} instead of {}",
            quotient_basis.len(),
            2 * g - 1
        )));
    }
    let mut s_basis = vec![x.coords().to_vec()];
    s_basis.extend(quotient_basis.iter().cloned());
    Ok(TangentFrame {
        point: x.clone(),
        s_basis,
        quotient_basis,
        pivot,
    })
}

/// A covector `eta` with `eta(v) = 0`, standing for its class modulo
/// `q_1(v, .)` and `q_2(v, .)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentRep<F> {
    eta: Vec<F>,
    even_restricted: bool,
}

impl<F: Field> CotangentRep<F> {
    pub fn new(x: &PointOnX<F>, eta: Vec<F>) -> Result<Self> {
        check_covector(x, &eta)?;
        Ok(CotangentRep {
            eta,
            even_restricted: false,
        })
    }

    /// A cotangent vector of `Y`: needs `y_{2g+1} = 0` and `eta_{2g+1} = 0`.
    pub fn new_even(y: &PointOnX<F>, eta: Vec<F>) -> Result<Self> {
        check_covector(y, &eta)?;
        if !y.on_y() {
            return Err(Error::Precondition("point is not on Y".into()));
        }
        if !eta[y.pencil().last()].is_zero() {
            return Err(Error::Precondition("last covector entry must vanish".into()));
        }
        Ok(CotangentRep {
            eta,
            even_restricted: true,
        })
    }

    /// Skips the constraint check.
    pub fn unchecked(eta: Vec<F>, even_restricted: bool) -> Self {
        CotangentRep {
            eta,
            even_restricted,
        }
    }

    pub fn eta(&self) -> &[F] {
        &self.eta
    }

    pub fn is_even_restricted(&self) -> bool {
        self.even_restricted
    }

    pub fn scaled(&self, s: &F) -> Self {
        CotangentRep {
            eta: self.eta.iter().map(|e| e.clone() * s.clone()).collect(),
            even_restricted: self.even_restricted,
        }
    }

    /// `eta + alpha q_1(v, .) + beta q_2(v, .)`
    pub fn gauge_shift(&self, x: &PointOnX<F>, alpha: &F, beta: &F) -> Self {
        let [g1, g2] = x.pencil().polar_covectors(x.coords());
        let eta = self
            .eta
            .iter()
            .zip(g1.iter().zip(&g2))
            .map(|(e, (a, b))| e.clone() + alpha.clone() * a.clone() + beta.clone() * b.clone())
            .collect();
        CotangentRep {
            eta,
            even_restricted: self.even_restricted,
        }
    }

    /// Sign change of the coordinates flipped by `e`, matching [`PointOnX::act`].
    pub fn act(&self, e: &SignGroupElement) -> Result<Self> {
        Ok(CotangentRep {
            eta: e.act(&self.eta)?,
            even_restricted: self.even_restricted,
        })
    }

    pub fn pairing(&self, w: &[F]) -> F {
        dot(&self.eta, w)
    }
}

fn check_covector<F: Field>(x: &PointOnX<F>, eta: &[F]) -> Result<()> {
    if eta.len() != x.coords().len() {
        return Err(Error::DimensionMismatch {
            expected: x.coords().len(),
            found: eta.len(),
        });
    }
    check_compatible(eta.iter().chain(x.coords()))?;
    let r = dot(eta, x.coords());
    let scale = norm_f64(eta) * norm_f64(x.coords());
    if !r.is_negligible(scale, MEMBERSHIP_TOL) {
        return Err(Error::CovectorConstraint(format!("{:.3e}", r.magnitude())));
    }
    Ok(())
}

/// Random covector vanishing on `v`; the pivot entry is solved for.
pub fn sample_covector<F: RandomScalar, R: Rng + ?Sized>(
    x: &PointOnX<F>,
    rng: &mut R,
    even: bool,
) -> Result<CotangentRep<F>> {
    let n = x.coords().len();
    let mut eta: Vec<F> = (0..n).map(|_| F::random(rng)).collect();
    if even {
        eta[n - 1] = F::zero();
    }
    let p = x.pivot();
    eta[p] = F::zero();
    eta[p] = (-dot(&eta, x.coords())).try_div(&x.coords()[p])?;
    if even {
        CotangentRep::new_even(x, eta)
    } else {
        CotangentRep::new(x, eta)
    }
}

/// The coordinate pair maximizing `|x_i x_j (lambda_j - lambda_i)|`.
fn gauge_pivots<F: Field>(x: &PointOnX<F>) -> Result<(usize, usize)> {
    let c = x.coords();
    let lam = x.pencil().lambdas_in::<F>();
    let mut best = None;
    let mut best_mag = 0.0;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let m = (c[i].clone() * c[j].clone() * (lam[j].clone() - lam[i].clone())).magnitude();
            if m > best_mag {
                best = Some((i, j));
                best_mag = m;
            }
        }
    }
    best.ok_or(Error::ChartSelection)
}

/// The representative of the gauge class vanishing at a fixed pair of
/// coordinates chosen from `x` alone. Idempotent, and constant on gauge
/// classes.
pub fn canonical_gauge<F: Field>(x: &PointOnX<F>, xi: &CotangentRep<F>) -> Result<CotangentRep<F>> {
    let (i, j) = gauge_pivots(x)?;
    let c = x.coords();
    let lam = x.pencil().lambdas_in::<F>();
    let eta = xi.eta();
    let det = c[i].clone() * c[j].clone() * (lam[j].clone() - lam[i].clone());
    let alpha = (lam[i].clone() * c[i].clone() * eta[j].clone()
        - lam[j].clone() * c[j].clone() * eta[i].clone())
    .try_div(&det)?;
    let beta = (c[j].clone() * eta[i].clone() - c[i].clone() * eta[j].clone()).try_div(&det)?;
    let mut out = xi.gauge_shift(x, &alpha, &beta);
    out.eta[i] = F::zero();
    out.eta[j] = F::zero();
    Ok(out)
}

pub fn gauge_equivalent<F: Field>(
    x: &PointOnX<F>,
    a: &CotangentRep<F>,
    b: &CotangentRep<F>,
    tol: f64,
) -> Result<bool> {
    let ca = canonical_gauge(x, a)?;
    let cb = canonical_gauge(x, b)?;
    let scale = norm_f64(a.eta()).max(norm_f64(b.eta()));
    Ok(ca
        .eta()
        .iter()
        .zip(cb.eta())
        .all(|(u, v)| (u.clone() - v.clone()).is_negligible(scale, tol)))
}

/// `[x_0^2 : ... : x_{2g+1}^2]`, the quotient by the full sign group.
pub fn quotient_full<F: Field>(x: &PointOnX<F>) -> Vec<F> {
    x.coords().iter().map(|c| c.clone() * c.clone()).collect()
}

/// A point `[y_0 : ... : y_{2g+1} : w]` of `P(1^{2g+2}, g+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoint<F> {
    pub y: Vec<F>,
    pub w: F,
}

impl<F: Field> WeightedPoint<F> {
    /// Residuals of `sum y_j`, `sum lambda_j y_j` and `w^2 - prod y_j`.
    pub fn z_equations(&self, p: &PencilOfQuadrics) -> [F; 3] {
        let lam = p.lambdas_in::<F>();
        let s1 = self.y.iter().fold(F::zero(), |a, y| a + y.clone());
        let s2 = self
            .y
            .iter()
            .zip(&lam)
            .fold(F::zero(), |a, (y, l)| a + l.clone() * y.clone());
        let prod = self.y.iter().fold(F::one(), |a, y| a * y.clone());
        [s1, s2, self.w.clone() * self.w.clone() - prod]
    }

    /// Equality under `(y, w) ~ (c y, c^{g+1} w)`.
    pub fn weighted_equal(&self, other: &Self, weight: usize, tol: f64) -> bool {
        if self.y.len() != other.y.len() {
            return false;
        }
        let k = argmax_magnitude(&self.y);
        let Ok(c) = other.y[k].try_div(&self.y[k]) else {
            return false;
        };
        let scale = norm_f64(&other.y) + other.w.magnitude();
        let ys = self
            .y
            .iter()
            .zip(&other.y)
            .all(|(a, b)| (b.clone() - c.clone() * a.clone()).is_negligible(scale, tol));
        let cw = (0..weight).fold(F::one(), |acc, _| acc * c.clone());
        ys && (other.w.clone() - cw * self.w.clone()).is_negligible(scale, tol)
    }
}

/// `[x_0^2 : ... : x_{2g+1}^2 : prod x_j]`, the quotient by the even subgroup.
pub fn quotient_even<F: Field>(x: &PointOnX<F>) -> WeightedPoint<F> {
    WeightedPoint {
        y: quotient_full(x),
        w: x.coords().iter().fold(F::one(), |a, c| a * c.clone()),
    }
}

/// Images of `x` under every element of the sign group.
pub fn sign_orbit<F: Field>(x: &PointOnX<F>) -> Result<Vec<PointOnX<F>>> {
    sign_group_elements(x.pencil())
        .iter()
        .map(|e| x.act(e))
        .collect()
}
