//! Finite-difference check that the fibres of `Phi_X` are Lagrangian.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::phi_raw;
use crate::algebra::field::dot;
use crate::algebra::numeric::full_svd;
use crate::error::{Error, Result};
use crate::pencil::PencilOfQuadrics;
use crate::variety::{argmax_magnitude, CotangentRep, PointOnX};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_ISOTROPY_TOL: f64 = 1e-6;
/// Relative singular-value threshold for the finite-difference Jacobian.
const JACOBIAN_RANK_TOL: f64 = 1e-6;
const CHART_TOL: f64 = 1e-8;
const NEWTON_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangianReport {
    pub jacobian_rank: usize,
    pub expected_rank: usize,
    pub generic: bool,
    /// `max |omega(u, u')|` over a kernel basis; `None` for non-generic samples.
    pub isotropy_defect: Option<f64>,
    /// Dehomogenizing coordinate followed by the two dependent coordinates.
    pub chart: [usize; 3],
    pub pass: bool,
}

/// Affine chart of `X` around a point: coordinate `a` set to 1, coordinates
/// `dep` solved from `q_1 = q_2 = 0`, the rest free.
struct Chart<'a> {
    pencil: &'a PencilOfQuadrics,
    lam: Vec<f64>,
    base: Vec<Complex64>,
    a: usize,
    dep: [usize; 2],
    free: Vec<usize>,
}

impl Chart<'_> {
    fn constraint_block(&self, y: &[Complex64], cols: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(2, cols.len(), |r, c| {
            let k = cols[c];
            let l = if r == 0 { 1.0 } else { self.lam[k] };
            y[k] * (2.0 * l)
        })
    }

    /// The point of `X` with free coordinates `z`.
    fn lift(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut y = self.base.clone();
        for (i, &k) in self.free.iter().enumerate() {
            y[k] = z[i];
        }
        for _ in 0..NEWTON_STEPS {
            let r = nalgebra::Vector2::new(
                dot(&y, &y),
                y.iter().zip(&self.lam).map(|(v, l)| v * v * *l).sum(),
            );
            let j = self.constraint_block(&y, &self.dep);
            let step = nalgebra::Matrix2::new(j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)])
                .try_inverse()
                .ok_or(Error::ChartSelection)?
                * r;
            y[self.dep[0]] -= step[0];
            y[self.dep[1]] -= step[1];
            if step.norm() <= 1e-15 * (1.0 + y[self.dep[0]].norm() + y[self.dep[1]].norm()) {
                break;
            }
        }
        Ok(y)
    }

    /// Columns `D psi e_i`, the pushforwards of the coordinate vectors.
    fn pushforwards(&self, y: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        let jd = self.constraint_block(y, &self.dep);
        let inv = nalgebra::Matrix2::new(jd[(0, 0)], jd[(0, 1)], jd[(1, 0)], jd[(1, 1)])
            .try_inverse()
            .ok_or(Error::ChartSelection)?;
        let jf = self.constraint_block(y, &self.free);
        Ok((0..self.free.len())
            .map(|i| {
                let d = -(inv * nalgebra::Vector2::new(jf[(0, i)], jf[(1, i)]));
                let mut col = vec![Complex64::new(0.0, 0.0); y.len()];
                col[self.free[i]] = Complex64::new(1.0, 0.0);
                col[self.dep[0]] = d[0];
                col[self.dep[1]] = d[1];
                col
            })
            .collect())
    }

    /// `Phi_X` in canonical coordinates `(z, p)` of `T^*X`.
    fn phi(&self, zp: &[Complex64]) -> Result<Vec<Complex64>> {
        let m = self.free.len();
        let (z, p) = zp.split_at(m);
        let y = self.lift(z)?;
        let mut e = vec![Complex64::new(0.0, 0.0); y.len()];
        for (i, &k) in self.free.iter().enumerate() {
            e[k] = p[i];
        }
        e[self.a] = -(0..m).map(|i| p[i] * y[self.free[i]]).sum::<Complex64>();
        Ok(phi_raw(self.pencil, &y, &e))
    }
}

fn choose_chart<'a>(x: &'a PointOnX<Complex64>) -> Result<Chart<'a>> {
    let p = x.pencil();
    let lam: Vec<f64> = p
        .lambdas_in::<Complex64>()
        .iter()
        .map(|l| l.re)
        .collect();
    let a = argmax_magnitude(x.coords());
    let base: Vec<Complex64> = x.coords().iter().map(|c| c / x.coords()[a]).collect();
    let n = base.len();
    let mut best = None;
    let mut best_mag = 0.0;
    for i in (0..n).filter(|&i| i != a) {
        for j in (i + 1..n).filter(|&j| j != a) {
            let m = (base[i] * base[j] * (lam[j] - lam[i])).norm();
            if m > best_mag {
                best = Some([i, j]);
                best_mag = m;
            }
        }
    }
    let dep = match best {
        Some(d) if best_mag > CHART_TOL => d,
        _ => return Err(Error::ChartSelection),
    };
    let free = (0..n).filter(|&k| k != a && !dep.contains(&k)).collect();
    Ok(Chart {
        pencil: p,
        lam,
        base,
        a,
        dep,
        free,
    })
}

/// Rank of the Jacobian of `Phi_X` at `(x, xi)` and isotropy of its kernel.
pub fn verify_lagrangian(
    x: &PointOnX<Complex64>,
    xi: &CotangentRep<Complex64>,
    fd_step: f64,
    tol: f64,
) -> Result<LagrangianReport> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(Error::Precondition(format!("finite-difference step {fd_step}")));
    }
    let chart = choose_chart(x)?;
    let scale = x.coords()[chart.a];
    let eta: Vec<Complex64> = xi.eta().iter().map(|e| e * scale).collect();
    let push = chart.pushforwards(&chart.base)?;
    let m = chart.free.len();
    let mut zp: Vec<Complex64> = chart.free.iter().map(|&k| chart.base[k]).collect();
    zp.extend(push.iter().map(|col| dot(&eta, col)));

    let n = chart.base.len();
    let mut jac = DMatrix::<Complex64>::zeros(n, 2 * m);
    for c in 0..2 * m {
        let mut plus = zp.clone();
        let mut minus = zp.clone();
        plus[c] += fd_step;
        minus[c] -= fd_step;
        let fp = chart.phi(&plus)?;
        let fm = chart.phi(&minus)?;
        for r in 0..n {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * fd_step);
        }
    }

    let expected_rank = 2 * x.genus() - 1;
    let (s, v_t) = full_svd(&jac);
    let top = s.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 {
        0
    } else {
        s.iter().filter(|&&v| v > JACOBIAN_RANK_TOL * top).count()
    };
    let generic = rank == expected_rank;
    let isotropy_defect = generic.then(|| {
        let kernel: Vec<Vec<Complex64>> = (rank..2 * m)
            .map(|k| (0..2 * m).map(|j| v_t[(k, j)].conj()).collect())
            .collect();
        let omega = |u: &[Complex64], w: &[Complex64]| -> Complex64 {
            (0..m).map(|i| u[i] * w[m + i] - u[m + i] * w[i]).sum()
        };
        let mut worst: f64 = 0.0;
        for (i, u) in kernel.iter().enumerate() {
            for w in &kernel[i + 1..] {
                worst = worst.max(omega(u, w).norm());
            }
        }
        worst
    });
    Ok(LagrangianReport {
        jacobian_rank: rank,
        expected_rank,
        generic,
        isotropy_defect,
        chart: [chart.a, chart.dep[0], chart.dep[1]],
        pass: generic && isotropy_defect.is_some_and(|d| d <= tol),
    })
}
