//! Fitting and checking the linear identification between the values of
//! `Phi_X` and the coefficient vectors of `f_H`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{f_h, phi_x, phi_y};
use crate::algebra::field::{to_complex_vec, Field};
use crate::algebra::numeric::{full_svd, normalize, projective_distance};
use crate::error::{Error, Result};
use crate::pencil::PencilOfQuadrics;
use crate::variety::{CotangentRep, PointOnX, RANK_TOL};

/// Both sides of the diagram at one cotangent vector, as complex vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSample {
    pub fingerprint: String,
    pub phi: Vec<Complex64>,
    pub fh: Vec<Complex64>,
}

impl DiagramSample {
    /// Uses `phi_Y` when the covector is restricted to `Y`.
    pub fn compute<F: Field>(x: &PointOnX<F>, xi: &CotangentRep<F>, rel_tol: f64) -> Result<Self> {
        let phi = if xi.is_even_restricted() {
            phi_y(x, xi)?
        } else {
            phi_x(x, xi)?
        };
        let fh = f_h(x, xi, rel_tol)?;
        Ok(DiagramSample {
            fingerprint: x.pencil().fingerprint(),
            phi: phi.to_complex(),
            fh: to_complex_vec(fh.coeffs()),
        })
    }

    /// Identity of the sample up to rescaling of either side.
    pub fn key(&self) -> [u8; 16] {
        let mut h = Sha256::new();
        for z in normalize_phase(&self.phi).iter().chain(&normalize_phase(&self.fh)) {
            // rounded so that the key survives rescaling noise
            h.update(format!("{:.9e},{:.9e};", z.re, z.im).as_bytes());
        }
        h.finalize()[..16].try_into().expect("16 bytes")
    }
}

/// Unit vector with the largest entry made real and positive.
fn normalize_phase(v: &[Complex64]) -> Vec<Complex64> {
    let u = normalize(v);
    let Some(big) = u.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return u;
    };
    if big.norm() == 0.0 {
        return u;
    }
    let phase = big.conj() / big.norm();
    u.iter().map(|z| z * phase).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationMap {
    matrix: DMatrix<Complex64>,
    fit_residual: f64,
    fingerprint: String,
    training_keys: BTreeSet<[u8; 16]>,
}

impl IdentificationMap {
    /// Wraps a given matrix, e.g. to run a control experiment.
    pub fn from_matrix(matrix: DMatrix<Complex64>, fingerprint: String) -> Self {
        IdentificationMap {
            matrix,
            fit_residual: f64::NAN,
            fingerprint,
            training_keys: BTreeSet::new(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn apply(&self, phi: &[Complex64]) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(phi);
        (&self.matrix * v).iter().copied().collect()
    }

    pub fn residual(&self, s: &DiagramSample) -> f64 {
        projective_distance(&self.apply(&s.phi), &s.fh)
    }

    /// Same map with `eps` times `delta` added to the matrix.
    pub fn perturbed(&self, delta: &DMatrix<Complex64>, eps: f64) -> Self {
        let scale = self.matrix.norm();
        IdentificationMap {
            matrix: &self.matrix + delta * Complex64::new(eps * scale, 0.0),
            fit_residual: f64::NAN,
            fingerprint: self.fingerprint.clone(),
            training_keys: self.training_keys.clone(),
        }
    }
}

/// Orthonormal basis (columns) of the span of the given unit vectors.
fn span_basis(vs: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let n = vs[0].len();
    let m = DMatrix::from_fn(n, vs.len(), |i, j| vs[j][i]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > RANK_TOL * top)
        .collect();
    DMatrix::from_fn(n, keep.len(), |i, j| u[(i, keep[j])])
}

/// Fits `L` with `L phi_i ∝ f_H,i` on the training samples.
///
/// `L` is only determined on the span of the `phi` values, so the fit is
/// carried out in orthonormal coordinates of the two spans: with `P`, `Q`
/// the bases and `w_i = P^H phi_i`, `z_i = Q^H f_i` (unit vectors), solve
/// `(I - z_i z_i^H) A w_i = 0` for all `i` in the least-squares sense and
/// set `L = Q A P^H`.
pub fn fit_identification(p: &PencilOfQuadrics, train: &[DiagramSample]) -> Result<IdentificationMap> {
    let need = 4 * p.genus();
    if train.len() < need {
        return Err(Error::NotEnoughSamples {
            need,
            got: train.len(),
        });
    }
    let fp = p.fingerprint();
    if train.iter().any(|s| s.fingerprint != fp) {
        return Err(Error::PencilMismatch);
    }
    let phis: Vec<Vec<Complex64>> = train.iter().map(|s| normalize(&s.phi)).collect();
    let fhs: Vec<Vec<Complex64>> = train.iter().map(|s| normalize(&s.fh)).collect();
    let pb = span_basis(&phis);
    let qb = span_basis(&fhs);
    let r = pb.ncols();
    if qb.ncols() != r {
        return Err(Error::RankDeficientTraining(format!(
            "value span has dimension {r}, form span {}",
            qb.ncols()
        )));
    }
    let expected = if train.iter().all(|s| s.phi.last().is_some_and(|v| *v == Complex64::new(0.0, 0.0))) {
        2 * p.genus() - 2
    } else {
        2 * p.genus() - 1
    };
    if r != expected {
        return Err(Error::RankDeficientTraining(format!(
            "value span has dimension {r}, expected {expected}"
        )));
    }

    let ph = pb.adjoint();
    let qh = qb.adjoint();
    let mut sys = DMatrix::<Complex64>::zeros(train.len() * r, r * r);
    for (i, (v, f)) in phis.iter().zip(&fhs).enumerate() {
        let w = &ph * nalgebra::DVector::from_column_slice(v);
        let z = (&qh * nalgebra::DVector::from_column_slice(f)).normalize();
        let proj = DMatrix::<Complex64>::identity(r, r) - &z * z.adjoint();
        // (I - z z^H)(I_r ⊗ w^T), row-major vec(A)
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    sys[(i * r + a, b * r + c)] = proj[(a, b)] * w[c];
                }
            }
        }
    }
    let (s, v_t) = full_svd(&sys);
    let k = r * r;
    if k >= 2 && s[k - 2] <= RANK_TOL * s[0] {
        return Err(Error::RankDeficientTraining(format!(
            "solution is not unique up to scale (second smallest singular value {:.3e})",
            s[k - 2] / s[0]
        )));
    }
    let a = DMatrix::from_fn(r, r, |i, j| v_t[(k - 1, i * r + j)].conj());
    let matrix = &qb * a * &ph;
    let mut map = IdentificationMap {
        matrix,
        fit_residual: 0.0,
        fingerprint: fp,
        training_keys: train.iter().map(DiagramSample::key).collect(),
    };
    map.fit_residual = train.iter().map(|s| map.residual(s)).fold(0.0, f64::max);
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub max_residual: f64,
    pub samples: usize,
    pub tol: f64,
    pub pass: bool,
}

/// Maximum projective residual of `L` over held-out samples.
pub fn verify_identification(
    map: &IdentificationMap,
    holdout: &[DiagramSample],
    tol: f64,
) -> Result<VerificationReport> {
    for (i, s) in holdout.iter().enumerate() {
        if s.fingerprint != map.fingerprint {
            return Err(Error::PencilMismatch);
        }
        if map.training_keys.contains(&s.key()) {
            return Err(Error::HoldoutOverlap(i));
        }
    }
    let max_residual = holdout.iter().map(|s| map.residual(s)).fold(0.0, f64::max);
    Ok(VerificationReport {
        max_residual,
        samples: holdout.len(),
        tol,
        pass: !holdout.is_empty() && max_residual <= tol,
    })
}
