//! The fibration `Phi_X` on the cotangent bundle, computed two ways: through
//! the quadratic functions `s_j`, and through the degenerate members of the
//! pencil restricted to a hyperplane of the tangent space.

mod identification;
mod lagrangian;

pub use identification::{
    fit_identification, verify_identification, DiagramSample, IdentificationMap, VerificationReport,
};
pub use lagrangian::{verify_lagrangian, LagrangianReport, DEFAULT_FD_STEP, DEFAULT_ISOTROPY_TOL};

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::field::{check_compatible, norm_f64, to_complex_vec, Field};
use crate::algebra::{interpolate_binary_form, BinaryForm, Biquad, Matrix, ProjParam, Rational};
use crate::error::{Error, Result};
use crate::pencil::PencilOfQuadrics;
use crate::rng::{substream, RandomScalar};
use crate::variety::{
    argmax_magnitude, sample_covector, sample_exact_point, sample_float_point, tangent_frame,
    CotangentRep, PointOnX, SampleOptions,
};

/// The components `(v_0, ..., v_{2g+1})` of `Phi_X(x, xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FibrationValue<F> {
    pub components: Vec<F>,
}

impl<F: Field> FibrationValue<F> {
    pub fn to_complex(&self) -> Vec<Complex64> {
        to_complex_vec(&self.components)
    }
}

/// `v_j = sum_{k != j} (x_j eta_k - x_k eta_j)^2 / (lambda_k - lambda_j)`.
pub fn phi_x<F: Field>(x: &PointOnX<F>, xi: &CotangentRep<F>) -> Result<FibrationValue<F>> {
    let c = x.coords();
    let eta = xi.eta();
    if eta.len() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            found: eta.len(),
        });
    }
    check_compatible(c.iter().chain(eta))?;
    Ok(FibrationValue {
        components: phi_raw(x.pencil(), c, eta),
    })
}

pub(crate) fn phi_raw<F: Field>(p: &PencilOfQuadrics, x: &[F], eta: &[F]) -> Vec<F> {
    let lam = p.lambdas();
    let n = x.len();
    (0..n)
        .map(|j| {
            (0..n).filter(|&k| k != j).fold(F::zero(), |acc, k| {
                let m = x[j].clone() * eta[k].clone() - x[k].clone() * eta[j].clone();
                let inv: Rational = (&lam[k] - &lam[j]).recip();
                acc + m.clone() * m * F::from_rational(&inv)
            })
        })
        .collect()
}

/// `Phi_Y` for a point of `Y` and a covector with vanishing last entry.
pub fn phi_y<F: Field>(y: &PointOnX<F>, xi: &CotangentRep<F>) -> Result<FibrationValue<F>> {
    let last = y.pencil().last();
    if !y.on_y() {
        return Err(Error::Precondition("point is not on Y".into()));
    }
    if !xi.is_even_restricted() || !xi.eta()[last].is_zero() {
        return Err(Error::Precondition("covector is not restricted to Y".into()));
    }
    phi_x(y, xi)
}

/// Parameters `t = lambda_max + 1, ..., lambda_max + 2g - 1` used to sample
/// determinants; all lie off the branch set.
pub fn evaluation_parameters(p: &PencilOfQuadrics) -> Vec<Rational> {
    let top = p.max_lambda().clone();
    (1..2 * p.genus() as i64)
        .map(|m| &top + Rational::from_integer(m.into()))
        .collect()
}

/// A basis of the hyperplane `H = ker(eta|_{S/V})`, as lifts to `S`.
pub fn hyperplane_basis<F: Field>(
    x: &PointOnX<F>,
    xi: &CotangentRep<F>,
    rel_tol: f64,
) -> Result<Vec<Vec<F>>> {
    let frame = tangent_frame(x, rel_tol)?;
    let w = frame.quotient_basis();
    let r: Vec<F> = w.iter().map(|wi| xi.pairing(wi)).collect();
    let scale = norm_f64(xi.eta()) * w.iter().map(|wi| norm_f64(wi)).fold(0.0, f64::max);
    if r.iter().all(|ri| ri.is_negligible(scale, rel_tol)) {
        return Err(Error::DegenerateCovector);
    }
    let i0 = argmax_magnitude(&r);
    (0..w.len())
        .filter(|&k| k != i0)
        .map(|k| {
            let c = r[k].try_div(&r[i0])?;
            Ok(w[k]
                .iter()
                .zip(&w[i0])
                .map(|(a, b)| a.clone() - c.clone() * b.clone())
                .collect())
        })
        .collect()
}

/// `det(q_t|_H)` in the basis `h`.
pub fn restricted_determinant<F: Field>(p: &PencilOfQuadrics, h: &[Vec<F>], t: &F) -> Result<F> {
    let d: Vec<F> = p.lambdas_in::<F>().into_iter().map(|l| t.clone() - l).collect();
    let m = h.len();
    let mut gram = Matrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let v = h[a]
                .iter()
                .zip(&h[b])
                .zip(&d)
                .fold(F::zero(), |acc, ((u, w), dk)| acc + u.clone() * w.clone() * dk.clone());
            gram[(a, b)] = v.clone();
            gram[(b, a)] = v;
        }
    }
    gram.det()
}

/// The binary form of degree `2g - 2` whose roots are the degenerate members
/// of the pencil restricted to `H = ker(eta|_{S/V})`. Defined up to scale.
pub fn f_h<F: Field>(x: &PointOnX<F>, xi: &CotangentRep<F>, rel_tol: f64) -> Result<BinaryForm<F>> {
    let h = hyperplane_basis(x, xi, rel_tol)?;
    let p = x.pencil();
    let samples = evaluation_parameters(p)
        .iter()
        .map(|t| {
            let tf = F::from_rational(t);
            Ok((ProjParam::from_pencil_chart(tf.clone()), restricted_determinant(p, &h, &tf)?))
        })
        .collect::<Result<Vec<_>>>()?;
    interpolate_binary_form(&samples, 2 * p.genus() - 2)
}

/// A sampled point with a cotangent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentSample<F> {
    pub point: PointOnX<F>,
    pub covector: CotangentRep<F>,
}

fn draw_pair<F: RandomScalar, R: Rng + ?Sized>(
    point: Result<PointOnX<F>>,
    rng: &mut R,
    even: bool,
) -> Result<CotangentSample<F>> {
    let point = point?;
    let covector = sample_covector(&point, rng, even)?;
    Ok(CotangentSample { point, covector })
}

/// Exact sample on `X` (or on `Y` with a restricted covector when `even`),
/// drawn from substream `(section, index)`.
pub fn exact_sample(
    p: &Arc<PencilOfQuadrics>,
    seed: u64,
    section: u32,
    index: u32,
    even: bool,
) -> Result<CotangentSample<Biquad>> {
    let mut rng = substream(seed, section, index);
    let opts = SampleOptions {
        exact: true,
        on_y: even,
        avoid_coordinate_hyperplanes: true,
    };
    let point = sample_exact_point(p, &mut rng, &opts);
    draw_pair(point, &mut rng, even)
}

pub fn float_sample(
    p: &Arc<PencilOfQuadrics>,
    seed: u64,
    section: u32,
    index: u32,
    even: bool,
) -> Result<CotangentSample<Complex64>> {
    let mut rng = substream(seed, section, index);
    let opts = SampleOptions {
        exact: false,
        on_y: even,
        avoid_coordinate_hyperplanes: true,
    };
    let point = sample_float_point(p, &mut rng, &opts);
    draw_pair(point, &mut rng, even)
}
