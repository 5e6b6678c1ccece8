//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use qplab::algebra::field::{rat, ratio};
use qplab::algebra::matrix::rank_exact;
use qplab::algebra::{Biquad, Field, Matrix, Rational};
use qplab::fibration::{
    exact_sample, f_h, fit_identification, float_sample, phi_x, phi_y, verify_identification,
    verify_lagrangian, CotangentSample, DiagramSample,
};
use qplab::p1bundle::{n_tilde_splitting, trivial_factor_matches_tangent, v_perp_kernel, vandermonde_normalizer};
use qplab::pencil::{sign_group_elements, PencilOfQuadrics};
use qplab::rng::{small_rational, substream};
use qplab::skew::{
    char_coeffs, pfaffian, random_orthogonal, random_rank2, random_skew, rank2_orthogonal_decomposition, SkewMap,
};
use qplab::variety::{quotient_even, sample_exact_point, tangent_frame, CotangentRep, SampleOptions, RANK_TOL};
use rand::Rng;

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn canonical(g: usize) -> Arc<PencilOfQuadrics> {
    Arc::new(PencilOfQuadrics::canonical(g).unwrap())
}

/// `min_theta |u/|u| - e^{i theta} v/|v||`
fn proj_dist(u: &[Complex64], v: &[Complex64]) -> f64 {
    let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ip: Complex64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
    u.iter()
        .zip(v)
        .map(|(a, b)| (a / nu - phase * b / nv).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `a_j = 1 / prod_{k != j} (lambda_j - lambda_k)`
fn closed_form(lambdas: &[Rational]) -> Vec<Rational> {
    (0..lambdas.len())
        .map(|j| {
            let mut d = rat(1);
            for k in 0..lambdas.len() {
                if k != j {
                    d *= &lambdas[j] - &lambdas[k];
                }
            }
            d.recip()
        })
        .collect()
}

/// `sum_k c_k t^{d-k} (-1)^k`, the form at the pencil member `t`.
fn eval_form_at(coeffs: &[Complex64], t: f64) -> Complex64 {
    let d = coeffs.len() - 1;
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * t.powi((d - k) as i32) * if k % 2 == 0 { 1.0 } else { -1.0 })
        .sum()
}

fn float_diagram(p: &Arc<PencilOfQuadrics>, section: u32, n: usize) -> Vec<DiagramSample> {
    (0..n as u32)
        .map(|i| {
            let s = float_sample(p, SEED, section, i, false).unwrap();
            DiagramSample::compute(&s.point, &s.covector, RANK_TOL).unwrap()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for g in [2, 3] {
        let start = Instant::now();
        let p = canonical(g);
        let map = fit_identification(&p, &float_diagram(&p, 1, 4 * g)).unwrap();
        let holdout = float_diagram(&p, 2, 100);
        let rep = verify_identification(&map, &holdout, 1e-8).unwrap();
        let elapsed = start.elapsed();

        // independent of the fit: v_j is proportional to a_j f_H(lambda_j)
        let a: Vec<f64> = closed_form(p.lambdas()).iter().map(|q| q.to_complex().re).collect();
        let oracle = holdout
            .iter()
            .map(|s| {
                let w: Vec<Complex64> = (0..p.ambient_dim())
                    .map(|j| a[j] * eval_form_at(&s.fh, j as f64))
                    .collect();
                proj_dist(&s.phi, &w)
            })
            .fold(0.0, f64::max);

        let ok = rep.pass && elapsed < Duration::from_secs(10) && oracle <= 1e-8;
        pass &= ok;
        details.push(format!(
            "g={g}: residual {:.1e}, closed form {:.1e}, {:.2}s",
            rep.max_residual,
            oracle,
            elapsed.as_secs_f64()
        ));
    }
    outcome(pass, details.join("; "))
}

fn exact_y_diagram(p: &Arc<PencilOfQuadrics>, section: u32, n: usize) -> (Vec<DiagramSample>, bool) {
    let last = p.last();
    let mut all_zero = true;
    let samples = (0..n as u32)
        .map(|i| {
            let s = exact_sample(p, SEED, section, i, true).unwrap();
            let v = phi_y(&s.point, &s.covector).unwrap();
            let f = f_h(&s.point, &s.covector, RANK_TOL).unwrap();
            all_zero &= v.components[last].is_zero();
            all_zero &= f.eval_pencil(&p.lambda(last)).is_zero();
            DiagramSample::compute(&s.point, &s.covector, RANK_TOL).unwrap()
        })
        .collect();
    (samples, all_zero)
}

fn criterion_2() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for g in [2, 3] {
        let p = canonical(g);
        let (train, z1) = exact_y_diagram(&p, 3, 4 * g);
        let (holdout, z2) = exact_y_diagram(&p, 4, 100);
        let map = fit_identification(&p, &train).unwrap();
        let rep = verify_identification(&map, &holdout, 1e-8).unwrap();
        pass &= rep.pass && z1 && z2;
        details.push(format!(
            "g={g}: residual {:.1e}, exact vanishing {}",
            rep.max_residual,
            z1 && z2
        ));
    }
    outcome(pass, details.join("; "))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let p = canonical(2);
    let reports: Vec<_> = (0..20)
        .map(|i| {
            let s = float_sample(&p, SEED, 5, i, false).unwrap();
            verify_lagrangian(&s.point, &s.covector, 1e-5, 1e-6).unwrap()
        })
        .collect();
    let elapsed = start.elapsed();
    let ranks_ok = reports.iter().all(|r| r.generic && r.jacobian_rank == 3);
    let defect = reports
        .iter()
        .map(|r| r.isotropy_defect.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    outcome(
        ranks_ok && defect <= 1e-6 && elapsed < Duration::from_secs(5),
        format!(
            "20 samples, ranks all 3: {ranks_ok}, max defect {defect:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut checked = 0;
    for g in [2, 3] {
        let p = canonical(g);
        let mut expected = vec![0; 2 * g - 1];
        expected.push(1);
        let lam = p.lambdas_in::<Biquad>();
        for i in 0..50 {
            let x = sample_exact_point(&p, &mut substream(SEED, 6, i), &SampleOptions::default()).unwrap();
            let kb = v_perp_kernel(&x).unwrap();
            let mut degrees = n_tilde_splitting(&kb).unwrap().degrees.clone();
            degrees.sort_unstable();
            let frame = tangent_frame(&x, RANK_TOL).unwrap();
            // constant kernel vectors w satisfy x.w = 0 and (lambda x).w = 0
            let orth = frame.s_basis().iter().all(|w| {
                let a = x.coords().iter().zip(w).fold(Biquad::zero(), |s, (c, e)| s + c.clone() * e.clone());
                let b = x
                    .coords()
                    .iter()
                    .zip(w)
                    .zip(&lam)
                    .fold(Biquad::zero(), |s, ((c, e), l)| s + l.clone() * c.clone() * e.clone());
                a.is_zero() && b.is_zero()
            });
            pass &= degrees == expected && trivial_factor_matches_tangent(&kb, &frame) && orth;
            checked += 1;
        }
    }
    outcome(pass, format!("{checked} exact points, degrees {{0^(2g-1), 1}}"))
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut checked = 0;
    for g in [2usize, 3, 4] {
        for i in 0..100u32 {
            let mut rng = substream(SEED, 12, (g as u32) << 16 | i);
            let mut lambdas: Vec<Rational> = Vec::new();
            while lambdas.len() < 2 * g + 2 {
                let l = ratio(rng.gen_range(-40..=40), rng.gen_range(1..=9));
                if !lambdas.contains(&l) {
                    lambdas.push(l);
                }
            }
            let p = PencilOfQuadrics::new(lambdas.clone()).unwrap();
            let a = vandermonde_normalizer(&p).unwrap();
            let n = lambdas.len();
            let b = Matrix::from_rows(
                (0..n - 1)
                    .map(|r| lambdas.iter().map(|l| num_traits::pow(l.clone(), r)).collect())
                    .collect(),
            )
            .unwrap();
            let in_kernel = b.mul_vec(&a).unwrap().iter().all(|v| v.is_zero());
            let rank_ok = rank_exact(&b) == n - 1;
            let cf = closed_form(&lambdas);
            let scale = &a[0] / &cf[0];
            let proportional = a.iter().zip(&cf).all(|(x, y)| *x == &scale * y);
            let nonzero = a.iter().all(|v| !v.is_zero());
            pass &= in_kernel && rank_ok && proportional && nonzero;
            checked += 1;
        }
    }
    outcome(pass, format!("{checked} random pencils, g in 2..=4"))
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    for g in [2, 3] {
        let p = canonical(g);
        let lam = p.lambdas_in::<Biquad>();
        for i in 0..200 {
            let opts = SampleOptions {
                on_y: i % 4 == 3,
                ..Default::default()
            };
            let x = sample_exact_point(&p, &mut substream(SEED, 10, i), &opts).unwrap();
            let y: Vec<Biquad> = x.coords().iter().map(|c| c.clone() * c.clone()).collect();
            let w = x.coords().iter().fold(Biquad::one(), |a, c| a * c.clone());
            let s1 = y.iter().fold(Biquad::zero(), |a, v| a + v.clone());
            let s2 = y.iter().zip(&lam).fold(Biquad::zero(), |a, (v, l)| a + l.clone() * v.clone());
            let prod = y.iter().fold(Biquad::one(), |a, v| a * v.clone());
            let z = quotient_even(&x);
            pass &= s1.is_zero() && s2.is_zero() && (w.clone() * w.clone() - prod).is_zero();
            pass &= z.y == y && z.w == w && z.z_equations(&p).iter().all(Field::is_zero);
        }
    }
    outcome(pass, "200 exact points per g in {2, 3}")
}

/// Laplace expansion along the first row; `n` small.
fn pf_oracle(m: &Matrix<Rational>, idx: &[usize]) -> Rational {
    if idx.is_empty() {
        return rat(1);
    }
    let (i, rest) = (idx[0], &idx[1..]);
    let mut total = rat(0);
    for (k, &j) in rest.iter().enumerate() {
        let sub: Vec<usize> = rest.iter().copied().filter(|&c| c != j).collect();
        let term = m[(i, j)].clone() * pf_oracle(m, &sub);
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut pf_ok = true;
    for i in 0..500 {
        let mut rng = substream(SEED, 9, i);
        let size = 4 + 2 * (i as usize % 4);
        let a = random_skew(&mut rng, size, 6);
        let pf = pfaffian(&a);
        pf_ok &= pf.clone() * pf.clone() == a.matrix().det().unwrap();
        if size <= 6 {
            pf_ok &= pf == pf_oracle(a.matrix(), &(0..size).collect::<Vec<_>>());
        }
    }
    let mut rank2_ok = true;
    let mut decomp_ok = true;
    for i in 0..200 {
        let mut rng = substream(SEED, 9, 1000 + i);
        let size = 4 + 2 * (i as usize % 4);
        let r = random_rank2(&mut rng, size, 5);
        let c = char_coeffs(&r).unwrap();
        rank2_ok &= c.iter().skip(1).all(|v| v.is_zero()) && rank_exact(r.matrix()) == 2;

        let mut block = Matrix::<Rational>::zeros(size, size);
        let v = small_rational(&mut rng, true);
        block[(0, 1)] = v.clone();
        block[(1, 0)] = -v;
        let o = random_orthogonal(&mut rng, size, 3);
        let conj = SkewMap::new(block).unwrap().congruent(&o).unwrap();
        for s in [&conj, &r] {
            let d = rank2_orthogonal_decomposition(s).unwrap();
            let orth = d.kernel.iter().all(|k| {
                d.image
                    .iter()
                    .all(|m| k.iter().zip(m).fold(rat(0), |a, (x, y)| a + x * y) == rat(0))
            });
            decomp_ok &= orth && d.kernel.len() == size - 2 && d.image.len() == 2;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        pf_ok && rank2_ok && decomp_ok && elapsed < Duration::from_secs(10),
        format!(
            "Pf^2 = det {pf_ok}, rank two {rank2_ok}, decomposition {decomp_ok}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// Counts gauge, sign and scaling failures of `Phi_X` over the samples.
fn invariance_failures(samples: &[CotangentSample<Biquad>], salt: u32) -> [usize; 3] {
    let group = sign_group_elements(samples[0].point.pencil());
    let mut fails = [0; 3];
    for (i, s) in samples.iter().enumerate() {
        let mut rng = substream(SEED, 7, salt + i as u32);
        let v = phi_x(&s.point, &s.covector).unwrap();
        let alpha = Biquad::rational(small_rational(&mut rng, false));
        let beta = Biquad::rational(small_rational(&mut rng, true));
        if phi_x(&s.point, &s.covector.gauge_shift(&s.point, &alpha, &beta)).unwrap() != v {
            fails[0] += 1;
        }
        let e = &group[rng.gen_range(0..group.len())];
        if phi_x(&s.point.act(e).unwrap(), &s.covector.act(e).unwrap()).unwrap() != v {
            fails[1] += 1;
        }
        let c = Biquad::rational(small_rational(&mut rng, true));
        let scaled = phi_x(&s.point, &s.covector.scaled(&c)).unwrap();
        if scaled
            .components
            .iter()
            .zip(&v.components)
            .any(|(a, b)| *a != c.clone() * c.clone() * b.clone())
        {
            fails[2] += 1;
        }
    }
    fails
}

fn image_rank(p: &Arc<PencilOfQuadrics>) -> usize {
    let n = 10 * p.genus();
    let vals: Vec<Vec<Complex64>> = (0..n as u32)
        .map(|i| {
            let s = float_sample(p, SEED, 8, i, false).unwrap();
            let v = phi_x(&s.point, &s.covector).unwrap().components;
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter().map(|z| z / norm).collect()
        })
        .collect();
    let m = DMatrix::from_fn(p.ambient_dim(), n, |r, c| vals[c][r]);
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

fn exact_samples(p: &Arc<PencilOfQuadrics>, n: u32) -> Vec<CotangentSample<Biquad>> {
    (0..n).map(|i| exact_sample(p, SEED, 7, i, false).unwrap()).collect()
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for g in [2, 3] {
        let p = canonical(g);
        let fails = invariance_failures(&exact_samples(&p, 100), 0);
        let rank = image_rank(&p);
        pass &= fails == [0, 0, 0] && rank == 2 * g - 1;
        details.push(format!("g={g}: failures {fails:?}, rank {rank}"));
    }
    outcome(pass, details.join("; "))
}

fn criterion_9() -> Outcome {
    let p = canonical(2);
    let map = fit_identification(&p, &float_diagram(&p, 1, 8)).unwrap();
    let holdout = float_diagram(&p, 2, 100);
    let clean = verify_identification(&map, &holdout, 1e-8).unwrap();
    let (r, c) = map.matrix().shape();
    let delta = DMatrix::from_fn(r, c, |i, j| Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, 0.5));
    let bad = verify_identification(&map.perturbed(&delta, 1e-3), &holdout, 1e-8).unwrap();
    let l_flips = clean.pass && !bad.pass;

    // adding e_p gives eta(x) = x_p != 0, which breaks invariance under eta -> eta + beta (lambda x)
    let samples = exact_samples(&p, 20);
    let broken: Vec<CotangentSample<Biquad>> = samples
        .iter()
        .map(|s| {
            let k = s.point.pivot();
            let mut eta = s.covector.eta().to_vec();
            eta[k] = eta[k].clone() + Biquad::one();
            CotangentSample {
                point: s.point.clone(),
                covector: CotangentRep::unchecked(eta, false),
            }
        })
        .collect();
    let gauge_flips = invariance_failures(&samples, 500) == [0, 0, 0] && invariance_failures(&broken, 500)[0] > 0;
    outcome(
        l_flips && gauge_flips,
        format!(
            "perturbed L residual {:.1e} (clean {:.1e}); broken gauge detected {gauge_flips}",
            bad.max_residual, clean.max_residual
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("diagram commutativity", criterion_1),
        ("even-case commutativity", criterion_2),
        ("lagrangian fibres", criterion_3),
        ("splitting type", criterion_4),
        ("vandermonde normalizer", criterion_5),
        ("quotient equations", criterion_6),
        ("skew battery", criterion_7),
        ("invariance suite", criterion_8),
        ("falsifiability controls", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!(
            "criterion {} {:<24} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
