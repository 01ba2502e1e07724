//! Experiment drivers.
//!
//! Every trial draws from its own stream derived from `(seed, experiment,
//! labels)`, trials run on the current rayon pool and rows are collected in
//! trial order, so reports do not depend on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{Body, SymmetricGaugeSpec, MEMBERSHIP_TOL};
use crate::constructions::{
    bobkov_check, dr_parallelepiped, gaussian_inclusion_position, gluskin_polytope,
    inclusion_test_points, schatten_sandwich_check, unitary_invariant_ball,
};
use crate::error::{Error, Result};
use crate::operators::{euclidean_to_body_norm, ell_norm, operator_norm, LinearMap};
use crate::report::{ExperimentReport, ReportConfig, TrialRecord};
use crate::rng::{derive_stream_id, RngStream};
use crate::solver::{vr_estimate, vr_estimate_with_volumes, SolverOptions};
use crate::stats::{fit_constant, fit_power_law, median, quantile, MeanEstimate};
use crate::volume::{
    default_isotropic_samples, isotropic_normalize, isotropic_with_volume, log_unit_ball_volume,
    log_volume, santalo_product, VolumeEstimate,
};

pub const NOTE_UPPER: &str = "vr values are upper bounds witnessed by feasible max-determinant positions; \
     the local solver is cross-checked against a global grid search for n <= 3";
pub const NOTE_PROBABILITY: &str =
    "probability statements are checked as empirical success fractions only";
pub const NOTE_CONSTANTS: &str =
    "absolute constants of asymptotic statements are fitted; acceptance windows are choices";
pub const NOTE_ISOTROPIC: &str =
    "Rudelson position replaced by isotropic position (covariance whitening, volume one)";
pub const NOTE_APPROX_GENERATORS: &str =
    "bodies without a finite generator list are replaced by inscribed polytopes through 16n boundary points";

/// A body given per dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum BodyFamily {
    /// `B_pⁿ`.
    Lp(f64),
    /// A body of one fixed dimension.
    Fixed(Body),
}

impl BodyFamily {
    pub fn at(&self, n: usize) -> Result<Body> {
        match self {
            BodyFamily::Lp(p) => {
                let b = Body::lp(*p, n);
                b.validate()?;
                Ok(b)
            }
            BodyFamily::Fixed(b) if b.dim() == n => Ok(b.clone()),
            BodyFamily::Fixed(b) => Err(Error::DimensionMismatch {
                expected: n,
                found: b.dim(),
            }),
        }
    }

    pub fn name(&self) -> String {
        match self {
            BodyFamily::Lp(p) if *p == 1.0 => "b1".into(),
            BodyFamily::Lp(p) if *p == 2.0 => "b2".into(),
            BodyFamily::Lp(p) if p.is_infinite() => "binf".into(),
            BodyFamily::Lp(p) => format!("bp{p}"),
            BodyFamily::Fixed(_) => "body".into(),
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            BodyFamily::Lp(_) => serde_json::Value::String(self.name()),
            BodyFamily::Fixed(b) => json_value(b),
        }
    }
}

fn json_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

/// FNV-1a hash of the experiment name, used as the root stream id.
fn name_tag(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn experiment_stream(seed: u64, experiment: &str, labels: &[u64]) -> RngStream {
    RngStream::new(seed, derive_stream_id(name_tag(experiment), labels))
}

/// Runs `f` on every job in parallel and returns the results in job order.
fn par_jobs<J: Sync, T: Send>(jobs: &[J], f: impl Fn(&J) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    jobs.par_iter().map(f).collect()
}

fn grid(dims: &[usize], trials: usize) -> Vec<(usize, usize)> {
    dims.iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect()
}

fn row(experiment: &str, n: usize, trial: usize, seed: u64, value: f64, stderr: f64, flag: &str) -> TrialRecord {
    TrialRecord {
        experiment: experiment.to_string(),
        n,
        trial,
        seed,
        value,
        stderr,
        flag: flag.to_string(),
    }
}

fn base_config(seed: u64, dims: &[usize], trials: usize, samples: usize) -> ReportConfig {
    ReportConfig {
        seed,
        dims: dims.to_vec(),
        trials,
        samples,
        ..Default::default()
    }
}

fn solver_params(cfg: &mut ReportConfig, opts: &SolverOptions) {
    cfg.params.insert("restarts".into(), opts.restarts.to_string());
    cfg.params.insert("max_iter".into(), opts.max_iter.to_string());
    cfg.params.insert("tol".into(), opts.tol.to_string());
    cfg.params.insert("volume_samples".into(), opts.volume_samples.to_string());
}

/// Fitted exponent and constant of `median ≈ c·√n` over the dimensions.
fn sqrt_fit(report: &mut ExperimentReport, prefix: &str, dims: &[usize], medians: &[f64]) {
    let xs: Vec<f64> = dims.iter().map(|&n| n as f64).collect();
    if dims.len() >= 2 {
        let (a, c) = fit_power_law(&xs, medians);
        report.aggregate(format!("{prefix}exponent"), a);
        report.aggregate(format!("{prefix}power_law_c"), c);
    }
    if !dims.is_empty() {
        let model: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        report.aggregate(format!("{prefix}sqrt_n_c"), fit_constant(&model, medians));
    }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct GluskinLowerConfig {
    pub ks: Vec<BodyFamily>,
    pub delta: f64,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

/// `vr(K, L^{(⌈δn⌉)})` for Gluskin polytopes `L`, one row per trial and `K`.
/// Each `L` and its volume are shared across the `K` list. Rows carry the
/// name of `K` in the flag column.
pub fn lvr_gluskin_experiment(cfg: &GluskinLowerConfig) -> Result<ExperimentReport> {
    const NAME: &str = "gluskin-lower";
    if cfg.delta <= 0.0 {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let mut rc = base_config(cfg.seed, &cfg.dims, cfg.trials, cfg.solver.volume_samples);
    rc.delta = Some(cfg.delta);
    for (i, k) in cfg.ks.iter().enumerate() {
        rc.bodies.insert(format!("k{i}"), k.describe());
    }
    solver_params(&mut rc, &cfg.solver);
    let mut report = ExperimentReport::new(NAME, rc);

    let k_bodies: Vec<Vec<(Body, VolumeEstimate)>> = par_jobs(&cfg.dims, |&n| {
        cfg.ks
            .iter()
            .enumerate()
            .map(|(ki, fam)| {
                let k = fam.at(n)?;
                let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, u64::MAX, ki as u64]);
                let v = log_volume(&k, cfg.solver.volume_samples, &mut rng)?;
                Ok((k, v))
            })
            .collect()
    })?;

    let jobs = grid(&cfg.dims, cfg.trials);
    let results = par_jobs(&jobs, |&(n, t)| {
        let di = cfg.dims.iter().position(|&d| d == n).expect("job dims");
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, t as u64]);
        let m = (cfg.delta * n as f64).ceil() as usize;
        let l = gluskin_polytope(n, m, &mut rng)?;
        let vl = log_volume(&l, cfg.solver.volume_samples, &mut rng.substream(&[1]))?;
        k_bodies[di]
            .iter()
            .enumerate()
            .map(|(ki, (k, vk))| {
                let est = vr_estimate_with_volumes(k, &l, vk, &vl, &cfg.solver, &mut rng.substream(&[2, ki as u64]))?;
                Ok((ki, est))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut violations = 0;
    let mut converged = 0usize;
    for (&(n, t), per_k) in jobs.iter().zip(&results) {
        for (ki, est) in per_k {
            if est.solve.max_generator_gauge > 1.0 + MEMBERSHIP_TOL {
                violations += 1;
            }
            converged += est.solve.converged as usize;
            report.rows.push(row(NAME, n, t, cfg.seed, est.vr, est.std_error, &cfg.ks[*ki].name()));
        }
    }
    for (ki, fam) in cfg.ks.iter().enumerate() {
        let name = fam.name();
        let mut medians = Vec::new();
        for &n in &cfg.dims {
            let vals: Vec<f64> = jobs
                .iter()
                .zip(&results)
                .filter(|((d, _), _)| *d == n)
                .map(|(_, per_k)| per_k[ki].1.vr)
                .collect();
            let med = median(&vals);
            report.aggregate(format!("{name}_median_n{n}"), med);
            report.aggregate(format!("{name}_q10_n{n}"), quantile(&vals, 0.1));
            report.aggregate(format!("{name}_q90_n{n}"), quantile(&vals, 0.9));
            medians.push(med);
        }
        sqrt_fit(&mut report, &format!("{name}_"), &cfg.dims, &medians);
    }
    let total = results.iter().map(Vec::len).sum::<usize>().max(1);
    report.aggregate("converged_fraction", converged as f64 / total as f64);
    report.aggregate("inclusion_violations", violations as f64);
    report.violations = violations;
    report.note(NOTE_UPPER);
    report.note(NOTE_PROBABILITY);
    report.note(NOTE_CONSTANTS);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DrConfig {
    pub l: BodyFamily,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Samples for the isotropic normalisation of `L°` (0: `50n²`).
    pub samples: usize,
    /// Boundary points of `L` used when it has no generator list.
    pub test_points: usize,
    /// Fitted constant in the ratio bound `c·√n / L_{L°}`.
    pub ratio_constant: f64,
    /// Fitted constant in the determinant bound `c·√n·L_{L°}`.
    pub det_constant: f64,
}

impl DrConfig {
    pub fn new(l: BodyFamily, dims: Vec<usize>, trials: usize, seed: u64) -> Self {
        DrConfig {
            l,
            dims,
            trials,
            seed,
            samples: 0,
            test_points: 1000,
            ratio_constant: 3.0,
            det_constant: 0.1,
        }
    }
}

struct DrSetup {
    l: Body,
    volume: VolumeEstimate,
    points: Vec<Vec<f64>>,
    l_constant: f64,
}

/// Random parallelepipeds `P ⊇ L` whose rows come from the isotropic `L°`.
/// Each row is `(|P|/|L|)^{1/n}`; the flag is `violation` if a tested point
/// of `∂L` lies outside `P`.
pub fn dr_parallelepiped_experiment(cfg: &DrConfig) -> Result<ExperimentReport> {
    const NAME: &str = "dr-parallelepiped";
    let mut rc = base_config(cfg.seed, &cfg.dims, cfg.trials, cfg.samples);
    rc.bodies.insert("l".into(), cfg.l.describe());
    rc.params.insert("test_points".into(), cfg.test_points.to_string());
    let mut report = ExperimentReport::new(NAME, rc);

    let setups: Vec<DrSetup> = par_jobs(&cfg.dims, |&n| {
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, u64::MAX]);
        let l0 = cfg.l.at(n)?;
        let polar = l0.polar()?;
        let samples = if cfg.samples == 0 { default_isotropic_samples(n) } else { cfg.samples };
        let iso = isotropic_normalize(&polar, samples, &mut rng)?;
        let l = iso.body(&polar)?.polar()?;
        // analytic for linear images of lp balls
        let volume = log_volume(&l, 1000, &mut rng.substream(&[1]))?;
        let points = inclusion_test_points(&l, cfg.test_points, &mut rng.substream(&[2]))?;
        Ok(DrSetup {
            l,
            volume,
            points,
            l_constant: iso.l_constant,
        })
    })?;

    let jobs = grid(&cfg.dims, cfg.trials);
    let results = par_jobs(&jobs, |&(n, t)| {
        let s = &setups[cfg.dims.iter().position(|&d| d == n).expect("job dims")];
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, t as u64]);
        dr_parallelepiped(&s.l, &s.volume, &s.points, &mut rng)
    })?;

    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for (&(n, t), dr) in jobs.iter().zip(&results) {
        let bad = dr.max_violation > MEMBERSHIP_TOL;
        violations += bad as usize;
        worst = worst.max(dr.max_violation);
        let flag = if bad { "violation" } else { "ok" };
        report.rows.push(row(NAME, n, t, cfg.seed, dr.ratio, dr.ratio_std_error, flag));
    }
    for (&n, s) in cfg.dims.iter().zip(&setups) {
        let sel: Vec<_> = jobs
            .iter()
            .zip(&results)
            .filter(|((d, _), _)| *d == n)
            .map(|(_, r)| r)
            .collect();
        let ratios: Vec<f64> = sel.iter().map(|r| r.ratio).collect();
        let med = median(&ratios);
        let bound = cfg.ratio_constant * (n as f64).sqrt() / s.l_constant;
        let nf = n as f64;
        let det_ok = sel
            .iter()
            .filter(|r| (r.t.log_abs_det() / nf).exp() >= cfg.det_constant * nf.sqrt() * s.l_constant)
            .count();
        report.aggregate(format!("median_ratio_n{n}"), med);
        report.aggregate(format!("ratio_bound_n{n}"), bound);
        report.aggregate(format!("ratio_within_bound_n{n}"), (med <= bound) as u8 as f64);
        report.aggregate(format!("l_constant_polar_n{n}"), s.l_constant);
        report.aggregate(format!("det_fraction_n{n}"), det_ok as f64 / sel.len().max(1) as f64);
        report.aggregate(format!("det_target_n{n}"), 1.0 - (-nf).exp());
        report.aggregate(format!("points_tested_n{n}"), s.points.len() as f64);
    }
    report.aggregate("inclusion_violations", violations as f64);
    report.aggregate("max_violation", worst);
    report.violations = violations;
    report.note("isotropic constant of the polar body estimated from hit-and-run samples");
    report.note(NOTE_PROBABILITY);
    report.note(NOTE_CONSTANTS);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DetBoundConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
}

/// `|det A|^{1/n}/√n` for standard Gaussian `A`.
pub fn det_bound_experiment(cfg: &DetBoundConfig) -> Result<ExperimentReport> {
    const NAME: &str = "det-bound";
    let mut rc = base_config(cfg.seed, &cfg.dims, cfg.trials, 0);
    rc.params.insert("threshold".into(), cfg.threshold.to_string());
    let mut report = ExperimentReport::new(NAME, rc);
    let jobs = grid(&cfg.dims, cfg.trials);
    let values = par_jobs(&jobs, |&(n, t)| {
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, t as u64]);
        let a = rng.gaussian_matrix(n);
        let (ld, _) = crate::linalg::log_abs_det(&a);
        Ok((ld / n as f64).exp() / (n as f64).sqrt())
    })?;
    for (&(n, t), &v) in jobs.iter().zip(&values) {
        let flag = if v >= cfg.threshold { "ok" } else { "below" };
        report.rows.push(row(NAME, n, t, cfg.seed, v, 0.0, flag));
    }
    for &n in &cfg.dims {
        let vals = report.values_at(n);
        let frac = vals.iter().filter(|&&v| v >= cfg.threshold).count() as f64 / vals.len().max(1) as f64;
        report.aggregate(format!("fraction_n{n}"), frac);
        report.aggregate(format!("target_n{n}"), 1.0 - (-(n as f64)).exp());
        report.aggregate(format!("median_n{n}"), median(&vals));
    }
    report.note(NOTE_PROBABILITY);
    report.note(NOTE_CONSTANTS);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SchattenConfig {
    pub tau: SymmetricGaugeSpec,
    /// Matrix sizes `d` (ambient dimension `d²`).
    pub ds: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub delta: f64,
    /// Samples for the isotropic normalisation (0: `50n²`).
    pub samples: usize,
    pub solver: SolverOptions,
}

/// Both sides of `lvr(B_N) ∼ d` for the unitary invariant ball `B_N`.
///
/// Per trial one Gluskin polytope `L ⊂ ℝ^{d²}` with `⌈δd²⌉` random points is
/// drawn. The `lower` row is the estimated `vr(B_N, L)`. The `upper` row puts
/// `L` in isotropic position, applies a Gaussian `A` and scales to
/// `L̃ = A(L)/(‖A: X_L → S∞‖·τ(u)) ⊆ B_N`, reporting `(|B_N|/|L̃|)^{1/d²}`.
/// `n` holds `d` in this report.
pub fn schatten_lvr_experiment(cfg: &SchattenConfig) -> Result<ExperimentReport> {
    const NAME: &str = "schatten-lvr";
    cfg.tau.validate()?;
    let mut rc = base_config(cfg.seed, &cfg.ds, cfg.trials, cfg.samples);
    rc.delta = Some(cfg.delta);
    rc.bodies.insert("tau".into(), json_value(&cfg.tau));
    solver_params(&mut rc, &cfg.solver);
    let mut report = ExperimentReport::new(NAME, rc);

    let balls: Vec<(Body, VolumeEstimate)> = par_jobs(&cfg.ds, |&d| {
        let ball = unitary_invariant_ball(&cfg.tau, d);
        let mut rng = experiment_stream(cfg.seed, NAME, &[d as u64, u64::MAX]);
        let v = log_volume(&ball, cfg.solver.volume_samples, &mut rng)?;
        Ok((ball, v))
    })?;

    let jobs = grid(&cfg.ds, cfg.trials);
    let results = par_jobs(&jobs, |&(d, t)| {
        let (ball, vball) = &balls[cfg.ds.iter().position(|&x| x == d).expect("job dims")];
        let n = d * d;
        let mut rng = experiment_stream(cfg.seed, NAME, &[d as u64, t as u64]);
        let m = (cfg.delta * n as f64).ceil() as usize;
        let l = gluskin_polytope(n, m, &mut rng)?;
        let vl = log_volume(&l, cfg.solver.volume_samples, &mut rng.substream(&[1]))?;
        let lower = vr_estimate_with_volumes(ball, &l, vball, &vl, &cfg.solver, &mut rng.substream(&[2]))?;

        let samples = if cfg.samples == 0 { default_isotropic_samples(n) } else { cfg.samples };
        let iso = isotropic_with_volume(&l, samples, vl, &mut rng.substream(&[3]))?;
        let l_iso = iso.body(&l)?;
        let a = LinearMap::new(rng.substream(&[4]).gaussian_matrix(n))?;
        let (lt, norm_a) = gaussian_inclusion_position(&l_iso, &a, &cfg.tau, d)?;
        let log_lt = vl.log_volume + iso.map.log_abs_det() + a.log_abs_det()
            - n as f64 * (norm_a * cfg.tau.tau_u(d)).ln();
        let upper = ((vball.log_volume - log_lt) / n as f64).exp();
        let upper_se = upper * (vball.std_error.powi(2) + vl.std_error.powi(2)).sqrt() / n as f64;
        let mut max_gauge = 0.0_f64;
        for v in lt.exact_generators().expect("polytope image") {
            max_gauge = max_gauge.max(ball.gauge(&v)?);
        }
        Ok((lower, upper, upper_se, max_gauge))
    })?;

    let mut violations = 0;
    for (&(d, t), (lower, upper, upper_se, max_gauge)) in jobs.iter().zip(&results) {
        let lower_bad = lower.solve.max_generator_gauge > 1.0 + MEMBERSHIP_TOL;
        let upper_bad = *max_gauge > 1.0 + MEMBERSHIP_TOL;
        violations += lower_bad as usize + upper_bad as usize;
        report.rows.push(row(NAME, d, t, cfg.seed, lower.vr, lower.std_error, if lower_bad { "lower-violation" } else { "lower" }));
        report.rows.push(row(NAME, d, t, cfg.seed, *upper, *upper_se, if upper_bad { "upper-violation" } else { "upper" }));
    }
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for &d in &cfg.ds {
        let sel: Vec<_> = jobs.iter().zip(&results).filter(|((x, _), _)| *x == d).map(|(_, r)| r).collect();
        let lo = median(&sel.iter().map(|r| r.0.vr).collect::<Vec<_>>());
        let up = median(&sel.iter().map(|r| r.1).collect::<Vec<_>>());
        let worst = sel.iter().map(|r| r.3).fold(0.0, f64::max);
        report.aggregate(format!("median_lower_d{d}"), lo);
        report.aggregate(format!("median_upper_d{d}"), up);
        report.aggregate(format!("lower_over_d_d{d}"), lo / d as f64);
        report.aggregate(format!("upper_over_d_d{d}"), up / d as f64);
        report.aggregate(format!("max_membership_gauge_d{d}"), worst);
        lowers.push(lo);
        uppers.push(up);
    }
    if !cfg.ds.is_empty() {
        let model: Vec<f64> = cfg.ds.iter().map(|&d| d as f64).collect();
        report.aggregate("lower_c", fit_constant(&model, &lowers));
        report.aggregate("upper_c", fit_constant(&model, &uppers));
    }
    report.aggregate("membership_violations", violations as f64);
    report.violations = violations;
    report.note(NOTE_ISOTROPIC);
    report.note(NOTE_UPPER);
    report.note(NOTE_CONSTANTS);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ChevetConfig {
    pub l: BodyFamily,
    pub k: BodyFamily,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub u_grid: Vec<f64>,
    /// Gaussian samples for the `ℓ`-norm estimates.
    pub ell_samples: usize,
}

/// Tail of `‖A: X_L → X_K‖` for Gaussian `A` against
/// `ℓ(K)·‖id: ℓ₂ → X_{L°}‖ + ℓ(L°)·‖id: ℓ₂ → X_K‖ + u·‖id: ℓ₂ → X_{L°}‖·‖id: ℓ₂ → X_K‖`.
/// For each `u` the empirical `(1 − e^{−u²})`-quantile is divided by the
/// bound. The largest such ratio is the smallest constant `C` for which the
/// bound holds on the sample.
pub fn chevet_tail_experiment(cfg: &ChevetConfig) -> Result<ExperimentReport> {
    const NAME: &str = "chevet-tail";
    let mut rc = base_config(cfg.seed, &cfg.dims, cfg.trials, cfg.ell_samples);
    rc.bodies.insert("l".into(), cfg.l.describe());
    rc.bodies.insert("k".into(), cfg.k.describe());
    rc.params.insert("u_grid".into(), format!("{:?}", cfg.u_grid));
    let mut report = ExperimentReport::new(NAME, rc);

    struct Setup {
        l: Body,
        k: Body,
        ell_k: MeanEstimate,
        ell_lp: MeanEstimate,
        a: f64,
        b: f64,
    }
    let setups: Vec<Setup> = par_jobs(&cfg.dims, |&n| {
        let l = cfg.l.at(n)?;
        let k = cfg.k.at(n)?;
        let lp = l.polar()?;
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, u64::MAX]);
        let ell_k = ell_norm(&k, cfg.ell_samples, &mut rng)?;
        let ell_lp = ell_norm(&lp, cfg.ell_samples, &mut rng)?;
        Ok(Setup {
            a: euclidean_to_body_norm(&lp)?,
            b: euclidean_to_body_norm(&k)?,
            l,
            k,
            ell_k,
            ell_lp,
        })
    })?;

    let jobs = grid(&cfg.dims, cfg.trials);
    let norms = par_jobs(&jobs, |&(n, t)| {
        let s = &setups[cfg.dims.iter().position(|&d| d == n).expect("job dims")];
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, t as u64]);
        let a = LinearMap::new(rng.gaussian_matrix(n))?;
        operator_norm(&a, &s.l, &s.k)
    })?;
    let mut inexact = 0;
    for (&(n, t), nm) in jobs.iter().zip(&norms) {
        inexact += (!nm.exact) as usize;
        report.rows.push(row(NAME, n, t, cfg.seed, nm.value, 0.0, if nm.exact { "exact" } else { "approx" }));
    }
    let mut c_max = f64::NEG_INFINITY;
    for (&n, s) in cfg.dims.iter().zip(&setups) {
        let vals = report.values_at(n);
        report.aggregate(format!("ell_k_n{n}"), s.ell_k.mean);
        report.aggregate(format!("ell_l_polar_n{n}"), s.ell_lp.mean);
        for &u in &cfg.u_grid {
            let q = quantile(&vals, 1.0 - (-u * u).exp());
            let bound = s.ell_k.mean * s.a + s.ell_lp.mean * s.b + u * s.a * s.b;
            let c = q / bound;
            report.aggregate(format!("quantile_n{n}_u{u}"), q);
            report.aggregate(format!("bound_n{n}_u{u}"), bound);
            report.aggregate(format!("c_n{n}_u{u}"), c);
            c_max = c_max.max(c);
        }
    }
    report.aggregate("c_fit", c_max);
    report.aggregate("inexact_norms", inexact as f64);
    if inexact > 0 {
        report.note("some operator norms are lower estimates from local search");
    }
    report.note(NOTE_PROBABILITY);
    report.note(NOTE_CONSTANTS);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ProductoConfig {
    pub zoo: Vec<BodyFamily>,
    pub dims: Vec<usize>,
    pub seed: u64,
    /// Samples for the isotropic constant of `L°` (0: `50n²`).
    pub samples: usize,
    pub solver: SolverOptions,
}

/// `vr(B∞ⁿ, L)·L_{L°}/√n` per body of the zoo and dimension. Rows use the
/// zoo index as trial number and the body name as flag.
pub fn producto_piola_check(cfg: &ProductoConfig) -> Result<ExperimentReport> {
    const NAME: &str = "producto-piola";
    let mut rc = base_config(cfg.seed, &cfg.dims, cfg.zoo.len(), cfg.samples);
    for (i, b) in cfg.zoo.iter().enumerate() {
        rc.bodies.insert(format!("l{i}"), b.describe());
    }
    solver_params(&mut rc, &cfg.solver);
    let mut report = ExperimentReport::new(NAME, rc);
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&n| (0..cfg.zoo.len()).map(move |i| (n, i)))
        .collect();
    let results = par_jobs(&jobs, |&(n, i)| {
        let rng = experiment_stream(cfg.seed, NAME, &[n as u64, i as u64]);
        let l = cfg.zoo[i].at(n)?;
        let est = vr_estimate(&Body::linf(n), &l, &cfg.solver, &mut rng.substream(&[1]))?;
        let samples = if cfg.samples == 0 { default_isotropic_samples(n) } else { cfg.samples };
        let iso = isotropic_normalize(&l.polar()?, samples, &mut rng.substream(&[2]))?;
        let scale = iso.l_constant / (n as f64).sqrt();
        let se = scale * est.std_error + est.vr * iso.l_std_error / (n as f64).sqrt();
        Ok((est.vr * scale, se))
    })?;
    let mut worst = f64::NEG_INFINITY;
    for (&(n, i), &(v, se)) in jobs.iter().zip(&results) {
        let name = cfg.zoo[i].name();
        report.rows.push(row(NAME, n, i, cfg.seed, v, se, &name));
        report.aggregate(format!("{name}_n{n}"), v);
        worst = worst.max(v);
    }
    report.aggregate("max_product", worst);
    report.note(NOTE_UPPER);
    report.note(NOTE_CONSTANTS);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SantaloConfig {
    pub body: Body,
    pub trials: usize,
    pub seed: u64,
    /// Samples per annealing phase.
    pub samples: usize,
}

/// `n·(|K|·|K°|)^{1/n}` per trial, compared with the value for `B₂ⁿ`.
pub fn santalo_experiment(cfg: &SantaloConfig) -> Result<ExperimentReport> {
    const NAME: &str = "santalo";
    let n = cfg.body.dim();
    let mut rc = base_config(cfg.seed, &[n], cfg.trials, cfg.samples);
    rc.bodies.insert("body".into(), json_value(&cfg.body));
    let mut report = ExperimentReport::new(NAME, rc);
    let trials: Vec<usize> = (0..cfg.trials).collect();
    let results = par_jobs(&trials, |&t| {
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, t as u64]);
        santalo_product(&cfg.body, cfg.samples, &mut rng)
    })?;
    let ball = n as f64 * (2.0 * log_unit_ball_volume(n) / n as f64).exp();
    for (t, &(v, se)) in results.iter().enumerate() {
        report.rows.push(row(NAME, n, t, cfg.seed, v, se, "ok"));
    }
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let est = MeanEstimate::from_samples(&values);
    report.aggregate("mean", est.mean);
    report.aggregate("mean_std_error", est.std_error);
    report.aggregate("ball_value", ball);
    report.aggregate("ratio_to_ball", est.mean / ball);
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct VrConfig {
    pub k: Body,
    pub l: Body,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverOptions,
}

/// Repeated `vr(K, L)` estimates.
pub fn vr_experiment(cfg: &VrConfig) -> Result<ExperimentReport> {
    const NAME: &str = "vr";
    let n = cfg.k.dim();
    if cfg.l.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cfg.l.dim(),
        });
    }
    let mut rc = base_config(cfg.seed, &[n], cfg.trials, cfg.solver.volume_samples);
    rc.bodies.insert("k".into(), json_value(&cfg.k));
    rc.bodies.insert("l".into(), json_value(&cfg.l));
    solver_params(&mut rc, &cfg.solver);
    let mut report = ExperimentReport::new(NAME, rc);
    let trials: Vec<usize> = (0..cfg.trials).collect();
    let results = par_jobs(&trials, |&t| {
        let mut rng = experiment_stream(cfg.seed, NAME, &[n as u64, t as u64]);
        vr_estimate(&cfg.k, &cfg.l, &cfg.solver, &mut rng)
    })?;
    let mut violations = 0;
    let mut approx = false;
    for (t, est) in results.iter().enumerate() {
        let bad = est.solve.max_generator_gauge > 1.0 + MEMBERSHIP_TOL;
        violations += bad as usize;
        approx |= !est.exact_generators;
        let flag = match (bad, est.exact_generators) {
            (true, _) => "violation",
            (false, true) => "exact",
            (false, false) => "approx",
        };
        report.rows.push(row(NAME, n, t, cfg.seed, est.vr, est.std_error, flag));
    }
    let vals = report.values_at(n);
    report.aggregate("median", median(&vals));
    report.aggregate("min", vals.iter().copied().fold(f64::INFINITY, f64::min));
    report.aggregate("inclusion_violations", violations as f64);
    report.violations = violations;
    report.note(NOTE_UPPER);
    if approx {
        report.note(NOTE_APPROX_GENERATORS);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct BobkovConfig {
    pub body: Body,
    pub samples: usize,
    pub seed: u64,
    /// Samples for the isotropic normalisation (0: `50n²`).
    pub iso_samples: usize,
}

/// Puts an unconditional body in isotropic position and checks
/// `c₁·B∞ⁿ ⊆ K ⊆ c₂·n·B₁ⁿ` pointwise. One row with the largest relative
/// excess over both inclusions.
pub fn bobkov_experiment(cfg: &BobkovConfig) -> Result<ExperimentReport> {
    const NAME: &str = "bobkov-check";
    if !cfg.body.is_unconditional() {
        return Err(Error::InvalidArgument(
            "bobkov-check needs an unconditional body (lp ball or diagonal image)".into(),
        ));
    }
    let n = cfg.body.dim();
    let mut rc = base_config(cfg.seed, &[n], 1, cfg.samples);
    rc.bodies.insert("body".into(), json_value(&cfg.body));
    let mut report = ExperimentReport::new(NAME, rc);
    let rng = experiment_stream(cfg.seed, NAME, &[n as u64, 0]);
    let iso_samples = if cfg.iso_samples == 0 { default_isotropic_samples(n) } else { cfg.iso_samples };
    let iso = isotropic_normalize(&cfg.body, iso_samples, &mut rng.substream(&[1]))?;
    let k = iso.body(&cfg.body)?;
    let check = bobkov_check(&k, cfg.samples, &mut rng.substream(&[2]))?;
    let excess = check.max_inner_excess.max(check.max_outer_excess);
    let flag = if check.violations() > 0 { "violation" } else { "ok" };
    report.rows.push(row(NAME, n, 0, cfg.seed, excess, 0.0, flag));
    report.aggregate("tested", check.tested as f64);
    report.aggregate("inner_violations", check.inner_violations as f64);
    report.aggregate("outer_violations", check.outer_violations as f64);
    report.aggregate("max_inner_excess", check.max_inner_excess);
    report.aggregate("max_outer_excess", check.max_outer_excess);
    report.aggregate("l_constant", iso.l_constant);
    report.aggregate("covariance_deviation", iso.covariance_deviation);
    report.violations = check.violations();
    report.note("constants relaxed by the factor 1.1 for the sampling error of the isotropic map");
    Ok(report)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SandwichConfig {
    pub tau: SymmetricGaugeSpec,
    pub d: usize,
    pub samples: usize,
    pub seed: u64,
}

/// Checks `(1/τ(u))·S∞ ⊆ B_N ⊆ (d/τ(u))·S₁` at random matrices. One row with
/// the largest relative excess; `n` holds `d`.
pub fn sandwich_experiment(cfg: &SandwichConfig) -> Result<ExperimentReport> {
    const NAME: &str = "sandwich-check";
    cfg.tau.validate()?;
    let mut rc = base_config(cfg.seed, &[cfg.d], 1, cfg.samples);
    rc.bodies.insert("tau".into(), json_value(&cfg.tau));
    let mut report = ExperimentReport::new(NAME, rc);
    let mut rng = experiment_stream(cfg.seed, NAME, &[cfg.d as u64, 0]);
    let check = schatten_sandwich_check(&cfg.tau, cfg.d, cfg.samples, &mut rng)?;
    let excess = check.max_inner_excess.max(check.max_outer_excess);
    let flag = if check.violations() > 0 { "violation" } else { "ok" };
    report.rows.push(row(NAME, cfg.d, 0, cfg.seed, excess, 0.0, flag));
    report.aggregate("tested", check.tested as f64);
    report.aggregate("inner_violations", check.inner_violations as f64);
    report.aggregate("outer_violations", check.outer_violations as f64);
    report.aggregate("max_inner_excess", check.max_inner_excess);
    report.aggregate("max_outer_excess", check.max_outer_excess);
    report.aggregate("tau_u", cfg.tau.tau_u(cfg.d));
    report.violations = check.violations();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_solver() -> SolverOptions {
        SolverOptions {
            restarts: 1,
            max_iter: 300,
            volume_samples: 200,
            ..Default::default()
        }
    }

    #[test]
    fn gluskin_lower_one_dimension_is_one() {
        let cfg = GluskinLowerConfig {
            ks: vec![BodyFamily::Lp(2.0), BodyFamily::Lp(f64::INFINITY)],
            delta: 2.0,
            dims: vec![1],
            trials: 3,
            seed: 1,
            solver: quick_solver(),
        };
        let r = lvr_gluskin_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 6);
        for row in &r.rows {
            assert!((row.value - 1.0).abs() < 1e-9, "{row:?}");
        }
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn det_bound_rows_and_fraction() {
        let cfg = DetBoundConfig {
            dims: vec![2, 5],
            trials: 40,
            seed: 3,
            threshold: 0.1,
        };
        let r = det_bound_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 80);
        let f = r.get("fraction_n5").unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn chevet_l1_to_linf_is_max_entry() {
        let cfg = ChevetConfig {
            l: BodyFamily::Lp(1.0),
            k: BodyFamily::Lp(f64::INFINITY),
            dims: vec![4],
            trials: 20,
            seed: 5,
            u_grid: vec![0.0, 1.0, 2.0],
            ell_samples: 2000,
        };
        let r = chevet_tail_experiment(&cfg).unwrap();
        for (t, row) in r.rows.iter().enumerate() {
            let mut rng = experiment_stream(5, "chevet-tail", &[4, t as u64]);
            let a = rng.gaussian_matrix(4);
            assert_eq!(row.value, a.max_abs());
            assert_eq!(row.flag, "exact");
        }
        let b0 = r.get("bound_n4_u0").unwrap();
        let b1 = r.get("bound_n4_u1").unwrap();
        let b2 = r.get("bound_n4_u2").unwrap();
        assert!(b0 < b1 && b1 < b2);
    }

    #[test]
    fn fixed_family_checks_dimension() {
        let f = BodyFamily::Fixed(Body::l2(3));
        assert!(f.at(3).is_ok());
        assert!(matches!(f.at(4), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sandwich_and_bobkov_have_no_violations() {
        let s = sandwich_experiment(&SandwichConfig {
            tau: SymmetricGaugeSpec::KyFan { k: 2 },
            d: 3,
            samples: 600,
            seed: 2,
        })
        .unwrap();
        assert_eq!(s.violations, 0);
        let b = bobkov_experiment(&BobkovConfig {
            body: Body::l1(4),
            samples: 3000,
            seed: 1,
            iso_samples: 0,
        })
        .unwrap();
        assert_eq!(b.violations, 0);
    }

    #[test]
    fn vr_rejects_dimension_mismatch() {
        let cfg = VrConfig {
            k: Body::l2(2),
            l: Body::l1(3),
            trials: 1,
            seed: 0,
            solver: quick_solver(),
        };
        assert!(matches!(vr_experiment(&cfg), Err(Error::DimensionMismatch { .. })));
    }
}
