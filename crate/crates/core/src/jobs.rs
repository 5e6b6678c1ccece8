//! Seeded batch jobs with deterministic JSON reports.
//!
//! Samples are drawn from independent substreams and evaluated in parallel;
//! every reduction is a max or a conjunction, so reports do not depend on the
//! number of worker threads.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::field::{format_rational, rat, Field};
use crate::algebra::numeric::rank_dm;
use crate::algebra::{Biquad, Matrix, Rational};
use crate::error::Error;
use crate::fibration::{
    exact_sample, f_h, fit_identification, float_sample, phi_x, phi_y, verify_identification,
    verify_lagrangian, CotangentSample, DiagramSample, DEFAULT_FD_STEP, DEFAULT_ISOTROPY_TOL,
};
use crate::io::{form_json, param_json, vec_json, AnyMatrix, MatrixJson, PointJson, ScalarJson, ToJson};
use crate::p1bundle::{
    n_tilde_splitting, trivial_factor_matches_tangent, v_perp_kernel, vandermonde_normalizer, SplittingType,
};
use crate::pencil::{even_sign_group_elements, sign_group_elements, PencilOfQuadrics, SignGroupElement};
use crate::rng::{small_rational, substream, RNG_NAME};
use crate::skew::{
    char_coeffs, hitchin_vector, nilpotency_and_rank, pfaffian, random_orthogonal, random_rank2, random_skew,
    rank2_orthogonal_decomposition, SkewMap,
};
use crate::variety::{
    quotient_even, sample_covector, sample_exact_point, tangent_frame, AnyPoint, CotangentRep, PointOnX,
    SampleOptions, RANK_TOL,
};

pub const REPORT_VERSION: &str = "qplab-report/1";
pub const DEFAULT_DIAGRAM_TOL: f64 = 1e-8;
pub const DEFAULT_HOLDOUT: usize = 100;
pub const DEFAULT_LAGRANGIAN_SAMPLES: usize = 20;
pub const DEFAULT_BUDGET: usize = 1000;

/// Substream sections, one per kind of sample.
pub mod section {
    pub const SINGLE: u32 = 0;
    pub const TRAIN: u32 = 1;
    pub const HOLDOUT: u32 = 2;
    pub const EVEN_TRAIN: u32 = 3;
    pub const EVEN_HOLDOUT: u32 = 4;
    pub const LAGRANGIAN: u32 = 5;
    pub const SPLITTING: u32 = 6;
    pub const INVARIANCE: u32 = 7;
    pub const IMAGE_RANK: u32 = 8;
    pub const SKEW: u32 = 9;
    pub const QUOTIENT: u32 = 10;
    pub const MEMBERSHIP: u32 = 11;
    pub const VANDERMONDE: u32 = 12;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    PencilInfo,
    Sample,
    Phi,
    Fh,
    BundleSplitting,
    SkewInvariants,
    Vandermonde,
    VerifyDiagram,
    VerifyEven,
    VerifyLagrangian,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PencilInfo => "pencil-info",
            Command::Sample => "sample",
            Command::Phi => "phi",
            Command::Fh => "fh",
            Command::BundleSplitting => "bundle-splitting",
            Command::SkewInvariants => "skew-invariants",
            Command::Vandermonde => "vandermonde",
            Command::VerifyDiagram => "verify-diagram",
            Command::VerifyEven => "verify-even",
            Command::VerifyLagrangian => "verify-lagrangian",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// A complete, reproducible job description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub lambdas: Option<Vec<String>>,
    #[serde(default)]
    pub g: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub train: Option<usize>,
    #[serde(default)]
    pub holdout: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub fd_step: Option<f64>,
    #[serde(default)]
    pub float: bool,
    #[serde(default)]
    pub on_y: bool,
    #[serde(default)]
    pub point: Option<PointJson>,
    #[serde(default)]
    pub matrix: Option<MatrixJson>,
    #[serde(default)]
    pub budget: Option<usize>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            lambdas: None,
            g: None,
            seed: 0,
            tol: None,
            train: None,
            holdout: None,
            samples: None,
            fd_step: None,
            float: false,
            on_y: false,
            point: None,
            matrix: None,
            budget: None,
        }
    }

    /// The pencil from `lambdas`, else the canonical one for `g` (default 2).
    pub fn pencil(&self) -> Result<Arc<PencilOfQuadrics>, JobError> {
        let p = match &self.lambdas {
            Some(l) => PencilOfQuadrics::parse(l).map_err(JobError::input)?,
            None => PencilOfQuadrics::canonical(self.g.unwrap_or(2)).map_err(JobError::input)?,
        };
        if self.g.is_some_and(|g| g != p.genus()) {
            return Err(JobError::Input(format!(
                "--g {} disagrees with {} coefficients",
                self.g.unwrap_or_default(),
                p.ambient_dim()
            )));
        }
        if p.genus() < 2 {
            return Err(JobError::Input("genus must be at least 2".into()));
        }
        Ok(Arc::new(p))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JobError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl JobError {
    pub fn input(e: Error) -> Self {
        JobError::Input(e.to_string())
    }

    pub fn internal(e: Error) -> Self {
        JobError::Internal(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Input(_) => 2,
            JobError::Internal(_) => 3,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub pass: bool,
    pub samples_used: usize,
    pub metrics: BTreeMap<String, Value>,
}

impl Section {
    fn new(pass: bool, samples_used: usize) -> Self {
        Section {
            pass,
            samples_used,
            metrics: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, v: impl Serialize) -> Self {
        self.metrics
            .insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
        self
    }

    fn failed(err: &Error) -> Self {
        Section::new(false, 0).with("error", err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub pass: bool,
    pub seed: u64,
    pub samples_used: usize,
    pub rng: String,
    pub metrics: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub sections: BTreeMap<String, Section>,
}

impl Report {
    fn from_section(command: Command, seed: u64, s: Section) -> Self {
        Report {
            version: REPORT_VERSION.to_string(),
            command: command.name().to_string(),
            pass: s.pass,
            seed,
            samples_used: s.samples_used,
            rng: RNG_NAME.to_string(),
            metrics: s.metrics,
            sections: BTreeMap::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Runs a job. Input problems map to exit code 2, failures inside the
/// computation to 3, and a completed run to 0 or 1 via [`Report::exit_code`].
pub fn run(spec: &JobSpec) -> Result<Report, JobError> {
    for (name, v) in [("tol", spec.tol), ("fd-step", spec.fd_step)] {
        if v.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return Err(JobError::Input(format!("--{name} must be positive")));
        }
    }
    let p = spec.pencil()?;
    let seed = spec.seed;
    let section = match spec.command {
        Command::PencilInfo => pencil_info(&p),
        Command::Sample => sample_job(&p, spec)?,
        Command::Phi => phi_job(&p, spec)?,
        Command::Fh => fh_job(&p, spec)?,
        Command::BundleSplitting => bundle_job(&p, spec)?,
        Command::SkewInvariants => skew_job(spec)?,
        Command::Vandermonde => vandermonde_job(&p)?,
        Command::VerifyDiagram => diagram_check(
            &p,
            seed,
            spec.train.unwrap_or(4 * p.genus()),
            spec.holdout.unwrap_or(DEFAULT_HOLDOUT),
            spec.tol.unwrap_or(DEFAULT_DIAGRAM_TOL),
            false,
        )
        .map_err(JobError::internal)?,
        Command::VerifyEven => diagram_check(
            &p,
            seed,
            spec.train.unwrap_or(4 * p.genus()),
            spec.holdout.unwrap_or(DEFAULT_HOLDOUT),
            spec.tol.unwrap_or(DEFAULT_DIAGRAM_TOL),
            true,
        )
        .map_err(JobError::internal)?,
        Command::VerifyLagrangian => lagrangian_check(
            &p,
            seed,
            spec.samples.unwrap_or(DEFAULT_LAGRANGIAN_SAMPLES),
            spec.fd_step.unwrap_or(DEFAULT_FD_STEP),
            spec.tol.unwrap_or(DEFAULT_ISOTROPY_TOL),
        )
        .map_err(JobError::internal)?,
        Command::VerifyAll => return Ok(verify_all(&p, seed, spec.budget.unwrap_or(DEFAULT_BUDGET))),
    };
    Ok(Report::from_section(spec.command, seed, section))
}

fn pencil_info(p: &PencilOfQuadrics) -> Section {
    let h = p.hyperelliptic();
    let degenerate: Vec<Value> = p
        .degenerate_parameters()
        .expect("diagonal Gram matrices")
        .iter()
        .map(|m| {
            json!({
                "parameter": format_rational(&m.parameter),
                "kernel_dimension": m.kernel.len(),
                "kernel_line": m.index,
            })
        })
        .collect();
    let branch: Vec<Value> = h
        .branch_params
        .iter()
        .map(|r| json!([format_rational(&r.a), format_rational(&r.b)]))
        .collect();
    let order = 1u128 << (2 * p.genus() + 1);
    let ok = degenerate.len() == p.ambient_dim();
    Section::new(ok, 0)
        .with("g", p.genus())
        .with("lambdas", p.to_json().lambdas)
        .with("fingerprint", p.fingerprint())
        .with("branch_params", branch)
        .with("degenerate_members", degenerate)
        .with("discriminant", vec_json(p.discriminant_poly().coeffs()))
        .with("sign_group_order", order.to_string())
        .with("even_subgroup_order", (order / 2).to_string())
}

enum AnyPair {
    Exact(CotangentSample<Biquad>),
    Float(CotangentSample<Complex64>),
}

fn covector_from_json<F: Field>(
    x: &PointOnX<F>,
    entries: &[ScalarJson],
    parse: impl Fn(&ScalarJson) -> crate::Result<F>,
    even: bool,
) -> Result<CotangentRep<F>, JobError> {
    let eta = entries.iter().map(parse).collect::<crate::Result<Vec<F>>>().map_err(JobError::input)?;
    let rep = if even {
        CotangentRep::new_even(x, eta)
    } else {
        CotangentRep::new(x, eta)
    };
    rep.map_err(JobError::input)
}

fn point_from_spec(p: &Arc<PencilOfQuadrics>, spec: &JobSpec) -> Result<Option<AnyPoint>, JobError> {
    let Some(pj) = &spec.point else {
        return Ok(None);
    };
    let q = pj.pencil(Some(p)).map_err(JobError::input)?;
    if spec.lambdas.is_some() && q != *p {
        return Err(JobError::Input("point file and --lambdas disagree".into()));
    }
    pj.to_point(&q).map(Some).map_err(JobError::input)
}

/// The point and covector of a single-sample job: from the point file when
/// given (sampling a covector if it has none), else drawn from the seed.
fn pair_from_spec(p: &Arc<PencilOfQuadrics>, spec: &JobSpec) -> Result<AnyPair, JobError> {
    let even = spec.on_y;
    let Some(point) = point_from_spec(p, spec)? else {
        return if spec.float {
            float_sample(p, spec.seed, section::SINGLE, 0, even)
                .map(AnyPair::Float)
                .map_err(JobError::internal)
        } else {
            exact_sample(p, spec.seed, section::SINGLE, 0, even)
                .map(AnyPair::Exact)
                .map_err(JobError::internal)
        };
    };
    let given = spec.point.as_ref().and_then(|pj| pj.covector.clone());
    let mut rng = substream(spec.seed, section::SINGLE, 1);
    match point {
        AnyPoint::Exact(x) => {
            let ctx = spec.point.as_ref().and_then(|pj| pj.context().ok().flatten());
            let covector = match given {
                Some(e) => covector_from_json(&x, &e, |s| s.to_biquad(ctx.as_ref()), even)?,
                None => sample_covector(&x, &mut rng, even).map_err(JobError::input)?,
            };
            Ok(AnyPair::Exact(CotangentSample { point: x, covector }))
        }
        AnyPoint::Float(x) => {
            let covector = match given {
                Some(e) => covector_from_json(&x, &e, ScalarJson::to_complex, even)?,
                None => sample_covector(&x, &mut rng, even).map_err(JobError::input)?,
            };
            Ok(AnyPair::Float(CotangentSample { point: x, covector }))
        }
    }
}

fn sample_job(p: &Arc<PencilOfQuadrics>, spec: &JobSpec) -> Result<Section, JobError> {
    let opts = SampleOptions {
        exact: !spec.float,
        on_y: spec.on_y,
        avoid_coordinate_hyperplanes: true,
    };
    let x = crate::variety::sample_point(p, spec.seed, &opts).map_err(JobError::internal)?;
    Ok(Section::new(true, 1)
        .with("point", PointJson::from_any(&x))
        .with("on_y", x.on_y()))
}

fn phi_metrics<F: Field + ToJson>(s: &CotangentSample<F>) -> crate::Result<Section> {
    let v = if s.covector.is_even_restricted() {
        phi_y(&s.point, &s.covector)?
    } else {
        phi_x(&s.point, &s.covector)?
    };
    let lam = s.point.pencil().lambdas_in::<F>();
    let scale = crate::algebra::field::norm_f64(&v.components);
    // sum_j lambda_j^k v_j = 0 for k = 0, 1, 2
    let relations = (0..3).all(|k| {
        v.components
            .iter()
            .zip(&lam)
            .fold(F::zero(), |acc, (vj, l)| {
                acc + (0..k).fold(F::one(), |a, _| a * l.clone()) * vj.clone()
            })
            .is_negligible(scale.max(f64::MIN_POSITIVE), 1e-10)
    });
    Ok(Section::new(relations, 1)
        .with("covector", vec_json(s.covector.eta()))
        .with("phi", vec_json(&v.components))
        .with("linear_relations_hold", relations))
}

fn fh_metrics<F: Field + ToJson>(s: &CotangentSample<F>) -> crate::Result<Section> {
    let f = f_h(&s.point, &s.covector, RANK_TOL)?;
    let roots: Vec<Value> = f.roots()?.iter().map(param_json).collect();
    Ok(Section::new(!f.is_zero(), 1)
        .with("covector", vec_json(s.covector.eta()))
        .with("form", form_json(&f))
        .with("roots", roots))
}

fn phi_job(p: &Arc<PencilOfQuadrics>, spec: &JobSpec) -> Result<Section, JobError> {
    let (section, point) = match pair_from_spec(p, spec)? {
        AnyPair::Exact(s) => (phi_metrics(&s), PointJson::from_exact(&s.point)),
        AnyPair::Float(s) => (phi_metrics(&s), PointJson::from_float(&s.point)),
    };
    Ok(section.map_err(JobError::internal)?.with("point", point))
}

fn fh_job(p: &Arc<PencilOfQuadrics>, spec: &JobSpec) -> Result<Section, JobError> {
    let (section, point) = match pair_from_spec(p, spec)? {
        AnyPair::Exact(s) => (fh_metrics(&s), PointJson::from_exact(&s.point)),
        AnyPair::Float(s) => (fh_metrics(&s), PointJson::from_float(&s.point)),
    };
    let section = section.map_err(|e| match e {
        Error::DegenerateCovector => JobError::input(e),
        e => JobError::internal(e),
    })?;
    Ok(section.with("point", point))
}

fn bundle_job(p: &Arc<PencilOfQuadrics>, spec: &JobSpec) -> Result<Section, JobError> {
    let x = match point_from_spec(p, spec)? {
        Some(AnyPoint::Exact(x)) => x,
        Some(AnyPoint::Float(_)) => return Err(JobError::input(Error::NonExactPoint)),
        None => {
            let opts = SampleOptions {
                on_y: spec.on_y,
                ..Default::default()
            };
            sample_exact_point(p, &mut substream(spec.seed, section::SINGLE, 0), &opts)
                .map_err(JobError::internal)?
        }
    };
    let kb = v_perp_kernel(&x).map_err(JobError::internal)?;
    let st = n_tilde_splitting(&kb).map_err(JobError::internal)?;
    let frame = tangent_frame(&x, RANK_TOL).map_err(JobError::internal)?;
    let matches = trivial_factor_matches_tangent(&kb, &frame);
    let mut kernel_degrees = kb.degrees().to_vec();
    kernel_degrees.sort_unstable();
    Ok(Section::new(matches && kb.is_minimal() && kb.annihilated(), 1)
        .with("point", PointJson::from_exact(&x))
        .with("kernel_degrees", kernel_degrees)
        .with("degrees", &st.degrees)
        .with("splitting", st.to_string())
        .with("minimal", kb.is_minimal())
        .with("trivial_matches_tangent", matches))
}

fn skew_metrics<F: Field + ToJson>(m: Matrix<F>) -> Result<Section, JobError> {
    let s = SkewMap::new(m).map_err(JobError::input)?;
    let a = char_coeffs(&s).map_err(JobError::internal)?;
    let pf = pfaffian(&s);
    let rep = nilpotency_and_rank(&s).map_err(JobError::internal)?;
    let det = s.matrix().det().map_err(JobError::internal)?;
    let diff = pf.clone() * pf.clone() - det.clone();
    let consistent = diff.is_negligible(det.magnitude().max(1.0), 1e-9);
    Ok(Section::new(consistent, 1)
        .with("a", vec_json(&a))
        .with("pf", pf.to_json())
        .with("rank", rep.rank)
        .with("nilpotent", rep.nilpotent)
        .with("pf_squared_equals_det", consistent))
}

fn skew_job(spec: &JobSpec) -> Result<Section, JobError> {
    let m = spec
        .matrix
        .as_ref()
        .ok_or_else(|| JobError::Input("skew-invariants needs --matrix".into()))?;
    match m.parse().map_err(JobError::input)? {
        AnyMatrix::Exact(a) => skew_metrics(a),
        AnyMatrix::Float(a) => skew_metrics(a),
    }
}

/// `a_j = 1 / prod_{k != j} (lambda_j - lambda_k)`
pub fn vandermonde_closed_form(p: &PencilOfQuadrics) -> Vec<Rational> {
    let l = p.lambdas();
    (0..l.len())
        .map(|j| {
            (0..l.len())
                .filter(|&k| k != j)
                .fold(rat(1), |acc, k| acc * (&l[j] - &l[k]))
                .recip()
        })
        .collect()
}

fn vandermonde_job(p: &PencilOfQuadrics) -> Result<Section, JobError> {
    let a = vandermonde_normalizer(p).map_err(JobError::internal)?;
    let nonzero = a.iter().all(|v| !Field::is_zero(v));
    let matches = a == vandermonde_closed_form(p);
    Ok(Section::new(nonzero && matches, 0)
        .with("normalizer", vec_json(&a))
        .with("kernel_dimension", 1)
        .with("all_nonzero", nonzero)
        .with("matches_closed_form", matches))
}

fn par_collect<T: Send>(n: usize, f: impl Fn(u32) -> crate::Result<T> + Sync + Send) -> crate::Result<Vec<T>> {
    (0..n as u32).into_par_iter().map(f).collect()
}

/// Fits the identification on `train` samples and checks it on `holdout`
/// others. The even variant works on `Y` with exact samples and also checks
/// `v_{2g+1} = 0` and `f_H(lambda_{2g+1}) = 0` exactly.
pub fn diagram_check(
    p: &Arc<PencilOfQuadrics>,
    seed: u64,
    train: usize,
    holdout: usize,
    tol: f64,
    even: bool,
) -> crate::Result<Section> {
    let last = p.last();
    let make = |sec: u32, n: usize| -> crate::Result<Vec<(DiagramSample, bool)>> {
        par_collect(n, |i| {
            if even {
                let s = exact_sample(p, seed, sec, i, true)?;
                let v = phi_y(&s.point, &s.covector)?;
                let f = f_h(&s.point, &s.covector, RANK_TOL)?;
                let exact_ok = v.components[last].is_zero() && f.eval_pencil(&p.lambda(last)).is_zero();
                let d = DiagramSample {
                    fingerprint: p.fingerprint(),
                    phi: v.to_complex(),
                    fh: f.to_complex().coeffs().to_vec(),
                };
                Ok((d, exact_ok))
            } else {
                let s = float_sample(p, seed, sec, i, false)?;
                Ok((DiagramSample::compute(&s.point, &s.covector, RANK_TOL)?, true))
            }
        })
    };
    let (tr, ho) = if even {
        (section::EVEN_TRAIN, section::EVEN_HOLDOUT)
    } else {
        (section::TRAIN, section::HOLDOUT)
    };
    let train_s = make(tr, train)?;
    let hold_s = make(ho, holdout)?;
    let exact_ok = train_s.iter().chain(&hold_s).all(|(_, ok)| *ok);
    let train_d: Vec<DiagramSample> = train_s.into_iter().map(|(d, _)| d).collect();
    let hold_d: Vec<DiagramSample> = hold_s.into_iter().map(|(d, _)| d).collect();
    let map = fit_identification(p, &train_d)?;
    let rep = verify_identification(&map, &hold_d, tol)?;
    let mut s = Section::new(rep.pass && exact_ok, train + holdout)
        .with("fit_residual", map.fit_residual())
        .with("max_residual", rep.max_residual)
        .with("tol", tol)
        .with("train", train)
        .with("holdout", holdout);
    if even {
        s = s.with("exact_vanishing", exact_ok);
    }
    Ok(s)
}

pub fn lagrangian_check(
    p: &Arc<PencilOfQuadrics>,
    seed: u64,
    samples: usize,
    fd_step: f64,
    tol: f64,
) -> crate::Result<Section> {
    let reports = par_collect(samples, |i| {
        let s = float_sample(p, seed, section::LAGRANGIAN, i, false)?;
        verify_lagrangian(&s.point, &s.covector, fd_step, tol)
    })?;
    let ranks: Vec<usize> = reports.iter().map(|r| r.jacobian_rank).collect();
    let max_defect = reports
        .iter()
        .filter_map(|r| r.isotropy_defect)
        .fold(0.0, f64::max);
    let non_generic = reports.iter().filter(|r| !r.generic).count();
    let pass = samples > 0 && reports.iter().all(|r| r.pass);
    Ok(Section::new(pass, samples)
        .with("jacobian_ranks", ranks)
        .with("expected_rank", 2 * p.genus() - 1)
        .with("max_isotropy_defect", max_defect)
        .with("non_generic", non_generic)
        .with("fd_step", fd_step)
        .with("tol", tol))
}

/// `q_1 = q_2 = 0` exactly on sampled points of `X` and `Y`.
pub fn membership_check(p: &Arc<PencilOfQuadrics>, seed: u64, n: usize) -> crate::Result<Section> {
    let ok = par_collect(n, |i| {
        let opts = SampleOptions {
            on_y: i % 2 == 1,
            ..Default::default()
        };
        let x = sample_exact_point(p, &mut substream(seed, section::MEMBERSHIP, i), &opts)?;
        let c = x.coords();
        Ok(p.q1(c).is_zero() && p.q2(c).is_zero() && (x.on_y() == opts.on_y))
    })?;
    Ok(Section::new(ok.iter().all(|&b| b), n).with("failures", ok.iter().filter(|&&b| !b).count()))
}

/// The quotient equations of `Z`, and constancy on even sign orbits.
pub fn quotient_check(p: &Arc<PencilOfQuadrics>, seed: u64, n: usize) -> crate::Result<Section> {
    let even = even_sign_group_elements(p);
    let ok = par_collect(n, |i| {
        let mut rng = substream(seed, section::QUOTIENT, i);
        let x = sample_exact_point(p, &mut rng, &SampleOptions::default())?;
        let z = quotient_even(&x);
        let eqs = z.z_equations(p).iter().all(Field::is_zero);
        let e = &even[rng.gen_range(0..even.len())];
        let orbit = quotient_even(&x.act(e)?) == z;
        Ok(eqs && orbit)
    })?;
    Ok(Section::new(ok.iter().all(|&b| b), n).with("failures", ok.iter().filter(|&&b| !b).count()))
}

/// Sign, gauge and scaling behaviour of `Phi_X` on exact samples.
pub fn invariance_check(p: &Arc<PencilOfQuadrics>, seed: u64, n: usize) -> crate::Result<Section> {
    let group = sign_group_elements(p);
    let results = par_collect(n, |i| {
        let s = exact_sample(p, seed, section::INVARIANCE, i, false)?;
        let mut rng = substream(seed, section::INVARIANCE, u32::MAX - i);
        let v = phi_x(&s.point, &s.covector)?;
        let e: &SignGroupElement = &group[rng.gen_range(0..group.len())];
        let sign = phi_x(&s.point.act(e)?, &s.covector.act(e)?)? == v;
        let (alpha, beta) = (
            Biquad::rational(small_rational(&mut rng, false)),
            Biquad::rational(small_rational(&mut rng, false)),
        );
        let gauge = phi_x(&s.point, &s.covector.gauge_shift(&s.point, &alpha, &beta))? == v;
        let c = Biquad::rational(small_rational(&mut rng, true));
        let scaled = phi_x(&s.point, &s.covector.scaled(&c))?;
        let quad = scaled
            .components
            .iter()
            .zip(&v.components)
            .all(|(a, b)| *a == c.clone() * c.clone() * b.clone());
        Ok([sign, gauge, quad])
    })?;
    let count = |k: usize| results.iter().filter(|r| !r[k]).count();
    let pass = results.iter().all(|r| r.iter().all(|&b| b));
    Ok(Section::new(pass, n)
        .with("sign_failures", count(0))
        .with("gauge_failures", count(1))
        .with("scaling_failures", count(2)))
}

/// Numerical rank of stacked `Phi_X` values, expected `2g - 1`.
pub fn image_rank_check(p: &Arc<PencilOfQuadrics>, seed: u64, n: usize) -> crate::Result<Section> {
    let values = par_collect(n, |i| {
        let s = float_sample(p, seed, section::IMAGE_RANK, i, false)?;
        Ok(crate::algebra::numeric::normalize(&phi_x(&s.point, &s.covector)?.components))
    })?;
    let m = nalgebra::DMatrix::from_fn(p.ambient_dim(), n, |r, c| values[c][r]);
    let rank = rank_dm(&m, RANK_TOL);
    Ok(Section::new(rank == 2 * p.genus() - 1, n)
        .with("rank", rank)
        .with("expected", 2 * p.genus() - 1))
}

/// Splitting type of the quotient bundle and the tangent-space match.
pub fn splitting_check(p: &Arc<PencilOfQuadrics>, seed: u64, n: usize) -> crate::Result<Section> {
    let expected = SplittingType::expected_n_tilde(p.genus());
    let results = par_collect(n, |i| {
        let x = sample_exact_point(p, &mut substream(seed, section::SPLITTING, i), &SampleOptions::default())?;
        let kb = v_perp_kernel(&x)?;
        let st = n_tilde_splitting(&kb)?;
        let frame = tangent_frame(&x, RANK_TOL)?;
        Ok((st == expected, trivial_factor_matches_tangent(&kb, &frame)))
    })?;
    let pass = results.iter().all(|&(a, b)| a && b);
    Ok(Section::new(pass, n)
        .with("expected", expected.to_string())
        .with("splitting_failures", results.iter().filter(|r| !r.0).count())
        .with("tangent_mismatches", results.iter().filter(|r| !r.1).count()))
}

/// Random pencils with distinct rational coefficients: kernel dimension one,
/// nonzero entries, agreement with the closed form.
pub fn vandermonde_check(g: usize, seed: u64, n: usize) -> crate::Result<Section> {
    let ok = par_collect(n, |i| {
        let mut rng = substream(seed, section::VANDERMONDE, i);
        let mut lambdas: Vec<Rational> = Vec::new();
        while lambdas.len() < 2 * g + 2 {
            let l = crate::algebra::field::ratio(rng.gen_range(-30..=30), rng.gen_range(1..=7));
            if !lambdas.contains(&l) {
                lambdas.push(l);
            }
        }
        let p = PencilOfQuadrics::new(lambdas)?;
        let a = vandermonde_normalizer(&p)?;
        Ok(a.iter().all(|v| !Field::is_zero(v)) && a == vandermonde_closed_form(&p))
    })?;
    Ok(Section::new(ok.iter().all(|&b| b), n).with("failures", ok.iter().filter(|&&b| !b).count()))
}

/// `Pf^2 = det`, vanishing of `a_{>=2}` in rank two, and the orthogonal
/// decomposition of conjugated rank-two blocks.
pub fn skew_check(seed: u64, n: usize) -> crate::Result<Section> {
    let results = par_collect(n, |i| {
        let mut rng = substream(seed, section::SKEW, i);
        let size = 4 + 2 * (i as usize % 4);
        let a = random_skew(&mut rng, size, 5);
        let pf = pfaffian(&a);
        let pf_ok = pf.clone() * pf == a.matrix().det()?;

        let r2 = random_rank2(&mut rng, size, 4);
        let coeffs = char_coeffs(&r2)?;
        let rank2_ok = coeffs[1..].iter().all(Field::is_zero)
            && hitchin_vector(&r2, size / 2)?.pf == rat(0);

        let mut block = Matrix::zeros(size, size);
        let v = crate::rng::small_rational(&mut rng, true);
        block[(0, 1)] = v.clone();
        block[(1, 0)] = -v;
        let conj = SkewMap::new(block)?.congruent(&random_orthogonal(&mut rng, size, 3))?;
        let d = rank2_orthogonal_decomposition(&conj)?;
        let d2 = rank2_orthogonal_decomposition(&r2)?;
        let decomp_ok = d.is_orthogonal()
            && d.kernel.len() + d.image.len() == size
            && d2.is_orthogonal();
        Ok([pf_ok, rank2_ok, decomp_ok])
    })?;
    let count = |k: usize| results.iter().filter(|r| !r[k]).count();
    let pass = results.iter().all(|r| r.iter().all(|&b| b));
    Ok(Section::new(pass, n)
        .with("pfaffian_failures", count(0))
        .with("rank_two_failures", count(1))
        .with("decomposition_failures", count(2)))
}

/// Per-section sample plans of [`verify_all`].
fn plan(g: usize) -> Vec<(&'static str, usize)> {
    vec![
        ("membership", 50),
        ("quotient", 50),
        ("invariance", 30),
        ("image_rank", 10 * g),
        ("splitting", 20),
        ("diagram", 4 * g + 50),
        ("even", 4 * g + 50),
        ("lagrangian", 10),
        ("vandermonde", 30),
        ("skew", 100),
    ]
}

/// Runs every check on one pencil. Sections that do not fit into `budget`
/// samples are reported as skipped and fail the run.
pub fn verify_all(p: &Arc<PencilOfQuadrics>, seed: u64, budget: usize) -> Report {
    let g = p.genus();
    let mut used = 0;
    let mut sections = BTreeMap::new();
    let mut exhausted = false;
    for (name, n) in plan(g) {
        if used + n > budget {
            exhausted = true;
            sections.insert(
                name.to_string(),
                Section::new(false, 0).with("skipped", "budget exhausted"),
            );
            continue;
        }
        used += n;
        let result = match name {
            "membership" => membership_check(p, seed, n),
            "quotient" => quotient_check(p, seed, n),
            "invariance" => invariance_check(p, seed, n),
            "image_rank" => image_rank_check(p, seed, n),
            "splitting" => splitting_check(p, seed, n),
            "diagram" => diagram_check(p, seed, 4 * g, n - 4 * g, DEFAULT_DIAGRAM_TOL, false),
            "even" => diagram_check(p, seed, 4 * g, n - 4 * g, DEFAULT_DIAGRAM_TOL, true),
            "lagrangian" => lagrangian_check(p, seed, n, DEFAULT_FD_STEP, DEFAULT_ISOTROPY_TOL),
            "vandermonde" => vandermonde_check(g, seed, n),
            "skew" => skew_check(seed, n),
            _ => unreachable!("planned section"),
        };
        sections.insert(name.to_string(), result.unwrap_or_else(|e| Section::failed(&e)));
    }
    let pass = !exhausted && sections.values().all(|s| s.pass);
    let mut metrics = BTreeMap::new();
    metrics.insert("budget".to_string(), json!(budget));
    metrics.insert("budget_exhausted".to_string(), json!(exhausted));
    metrics.insert("g".to_string(), json!(g));
    metrics.insert("lambdas".to_string(), json!(p.to_json().lambdas));
    Report {
        version: REPORT_VERSION.to_string(),
        command: Command::VerifyAll.name().to_string(),
        pass,
        seed,
        samples_used: used,
        rng: RNG_NAME.to_string(),
        metrics,
        sections,
    }
}
