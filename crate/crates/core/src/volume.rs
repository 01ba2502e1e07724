//! Volumes, isotropic position and volume-product quantities.
//!
//! Volumes are always carried as logarithms. Monte Carlo estimates come with
//! the standard error of the log-volume.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::linalg::{dot, inv_sqrt_psd, log_abs_det, Lu, Matrix};
use crate::operators::LinearMap;
use crate::rng::RngStream;
use crate::sampling::{ball_point, hit_and_run, second_moments, uniform_samples, ChainParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Analytic,
    Rejection,
    Annealed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub dim: usize,
    pub log_volume: f64,
    /// Standard error of `log_volume`; zero exactly for analytic values.
    pub std_error: f64,
    pub method: VolumeMethod,
    pub n_samples: usize,
}

impl VolumeEstimate {
    fn analytic(dim: usize, log_volume: f64) -> Self {
        VolumeEstimate {
            dim,
            log_volume,
            std_error: 0.0,
            method: VolumeMethod::Analytic,
            n_samples: 0,
        }
    }

    /// `|B|^{1/n}`.
    pub fn nth_root(&self) -> f64 {
        (self.log_volume / self.dim as f64).exp()
    }

    /// The estimate for `T(B)`.
    pub fn mapped(&self, t: &LinearMap) -> Self {
        VolumeEstimate {
            log_volume: self.log_volume + t.log_abs_det(),
            ..*self
        }
    }
}

/// `log |B₂ⁿ| = (n/2) log π − log Γ(n/2 + 1)`.
pub fn log_unit_ball_volume(n: usize) -> f64 {
    0.5 * n as f64 * std::f64::consts::PI.ln() - ln_gamma(n as f64 / 2.0 + 1.0)
}

/// `log |B_pⁿ| = n log(2Γ(1 + 1/p)) − log Γ(1 + n/p)`.
pub fn log_lp_ball_volume(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    if p.is_infinite() {
        nf * 2f64.ln()
    } else {
        nf * (2.0 * ln_gamma(1.0 + 1.0 / p).exp()).ln() - ln_gamma(1.0 + nf / p)
    }
}

/// Closed-form log-volume for `ℓp` balls, their linear images, cross-polytope
/// images (exactly `n` generators) and their polars (parallelepipeds), and
/// small simplicial V-polytopes through their facets.
pub fn log_volume_analytic(b: &Body) -> Result<VolumeEstimate> {
    let n = b.dim();
    if n == 1 {
        // every symmetric body on the line is an interval
        let r = b.outer_radius()?;
        if r.exact {
            return Ok(VolumeEstimate::analytic(1, (2.0 * r.value).ln()));
        }
    }
    let lv = match b {
        Body::LpBall { p, n } => log_lp_ball_volume(*p, *n),
        Body::LinearImage { base, map } => log_volume_analytic(base)?.log_volume + map.log_abs_det(),
        Body::VPolytope { generators } if generators.len() == n => {
            let (ld, _) = log_abs_det(&Matrix::from_columns(generators)?);
            n as f64 * 2f64.ln() + ld - ln_gamma(n as f64 + 1.0)
        }
        Body::VPolytope { generators } => simplicial_log_volume(generators)
            .ok_or_else(|| Error::Unsupported("no closed-form volume".into()))?,
        Body::PolarPolytope { generators } if generators.len() == n => {
            let (ld, _) = log_abs_det(&Matrix::from_rows(generators)?);
            n as f64 * 2f64.ln() - ld
        }
        Body::BallIntersection { base, radius } => {
            if *radius >= base.outer_radius_upper_bound()? {
                log_volume_analytic(base)?.log_volume
            } else if *radius <= base.inner_radius_lower_bound()? {
                log_unit_ball_volume(n) + n as f64 * radius.ln()
            } else {
                return Err(Error::Unsupported("no closed-form volume".into()));
            }
        }
        _ => return Err(Error::Unsupported("no closed-form volume".into())),
    };
    Ok(VolumeEstimate::analytic(n, lv))
}

/// Largest number of (generator subset, sign pattern) pairs searched for facets.
pub const FACET_SEARCH_LIMIT: u64 = 1_000_000;

/// `log |absconv{v_j}|` as the sum of the facet cones `|det F| / n!`. Facets
/// are the hyperplanes `a·x = 1` through `n` signed generators with
/// `max_j |a·v_j| ≤ 1`. `None` when the search exceeds [`FACET_SEARCH_LIMIT`]
/// or some facet is not a simplex.
pub fn simplicial_log_volume(generators: &[Vec<f64>]) -> Option<f64> {
    let m = generators.len();
    let n = generators.first()?.len();
    if n == 0 || m < n || n > 20 {
        return None;
    }
    let subsets = (0..n as u64).try_fold(1u64, |c, i| c.checked_mul(m as u64 - i).map(|c| c / (i + 1)))?;
    if subsets.checked_mul(1 << (n - 1))? > FACET_SEARCH_LIMIT {
        return None;
    }
    let tol = 1e-9;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    loop {
        let cols: Vec<Vec<f64>> = idx.iter().map(|&i| generators[i].clone()).collect();
        let lu = Lu::new(&Matrix::from_columns(&cols).ok()?);
        if !lu.is_singular() {
            let (ld, _) = lu.log_abs_det();
            for mask in 0..(1u64 << (n - 1)) {
                let signs: Vec<f64> = (0..n)
                    .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                let a = lu.solve_transpose(&signs);
                let mut tight = 0;
                let mut ok = true;
                for v in generators {
                    let h = dot(&a, v).abs();
                    if h > 1.0 + tol {
                        ok = false;
                        break;
                    }
                    if h >= 1.0 - tol {
                        tight += 1;
                    }
                }
                if ok {
                    if tight > n {
                        return None;
                    }
                    total += 2.0 * ld.exp();
                }
            }
        }
        // next n-subset in lexicographic order
        let mut i = n;
        while i > 0 && idx[i - 1] == m - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    (total > 0.0).then(|| total.ln() - ln_gamma(n as f64 + 1.0))
}

/// `|B| ≈ |R·B₂ⁿ| · hits/N` with `R` a guaranteed outer radius.
pub fn log_volume_rejection(b: &Body, samples: usize, rng: &mut RngStream) -> Result<VolumeEstimate> {
    let n = b.dim();
    let r = b.outer_radius_upper_bound()?;
    let mut hits = 0usize;
    for _ in 0..samples {
        if b.contains(&ball_point(n, r, rng))? {
            hits += 1;
        }
    }
    if hits < 50 {
        return Err(Error::DegenerateAcceptance { hits, needed: 50 });
    }
    let frac = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        dim: n,
        log_volume: log_unit_ball_volume(n) + n as f64 * r.ln() + frac.ln(),
        std_error: ((1.0 - frac) / (samples as f64 * frac)).sqrt(),
        method: VolumeMethod::Rejection,
        n_samples: samples,
    })
}

/// Number of batches used for batch-means standard errors of chain averages.
const BATCHES: usize = 20;

/// Multiphase estimate over `B_k = B ∩ r_k B₂ⁿ`, `r_k = r₀·2^{k/2}`, from a
/// guaranteed inner radius `r₀` to a guaranteed outer radius. Each ratio
/// `|B_{k−1}|/|B_k|` is the fraction of hit-and-run points of `B_k` within
/// radius `r_{k−1}`; standard errors by batch means, combined in quadrature.
pub fn log_volume_annealed(
    b: &Body,
    samples_per_phase: usize,
    rng: &mut RngStream,
) -> Result<VolumeEstimate> {
    let n = b.dim();
    let r_max = b.outer_radius_upper_bound()?;
    let r0 = b
        .inner_radius_lower_bound()?
        .min(r_max / std::f64::consts::SQRT_2);
    let mut radii = vec![r0];
    while *radii.last().unwrap() < r_max {
        let next = radii.last().unwrap() * std::f64::consts::SQRT_2;
        radii.push(next.min(r_max));
    }
    let samples = samples_per_phase.max(BATCHES);
    let chain = ChainParams::standard(n);
    let mut log_volume = log_unit_ball_volume(n) + n as f64 * r0.ln();
    let mut var = 0.0;
    let mut start = vec![0.0; n];
    for k in 1..radii.len() {
        let phase = if radii[k] >= r_max {
            b.clone()
        } else {
            Body::BallIntersection {
                base: Box::new(b.clone()),
                radius: radii[k],
            }
        };
        let pts = hit_and_run(&phase, samples, chain, Some(start.clone()), rng)?;
        start = pts.last().cloned().unwrap_or(start);
        let r_prev2 = radii[k - 1] * radii[k - 1];
        let inside: Vec<f64> = pts
            .iter()
            .map(|p| {
                if crate::linalg::dot(p, p) <= r_prev2 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let frac = inside.iter().sum::<f64>() / samples as f64;
        if frac == 0.0 {
            return Err(Error::DegenerateAcceptance {
                hits: 0,
                needed: 1,
            });
        }
        let per = samples / BATCHES;
        let means: Vec<f64> = (0..BATCHES)
            .map(|j| inside[j * per..(j + 1) * per].iter().sum::<f64>() / per as f64)
            .collect();
        let mb = means.iter().sum::<f64>() / BATCHES as f64;
        let var_batch =
            means.iter().map(|m| (m - mb).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
        // binomial variance is a floor: batch means can read zero by chance
        let var_frac = (var_batch / BATCHES as f64).max(frac * (1.0 - frac) / samples as f64);
        var += var_frac / (frac * frac);
        log_volume -= frac.ln();
    }
    Ok(VolumeEstimate {
        dim: n,
        log_volume,
        std_error: var.sqrt(),
        method: VolumeMethod::Annealed,
        n_samples: samples * (radii.len() - 1),
    })
}

/// Analytic when available, annealed otherwise.
pub fn log_volume(b: &Body, samples_per_phase: usize, rng: &mut RngStream) -> Result<VolumeEstimate> {
    match log_volume_analytic(b) {
        Ok(v) => Ok(v),
        Err(Error::Unsupported(_)) => log_volume_annealed(b, samples_per_phase, rng),
        Err(e) => Err(e),
    }
}

/// `(|A|/|B|)^{1/n}` with its propagated standard error.
pub fn vr_nthroot_ratio(a: &VolumeEstimate, b: &VolumeEstimate) -> Result<(f64, f64)> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    let n = a.dim as f64;
    let ratio = ((a.log_volume - b.log_volume) / n).exp();
    let se = ratio * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt() / n;
    Ok((ratio, se))
}

/// Isotropic position of a symmetric body estimated from uniform samples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsotropicReport {
    /// Volume-one whitening map: `map(B)` has volume 1 and covariance `L²·I`.
    pub map: LinearMap,
    /// Factor applied after `C^{−1/2}` to reach volume one.
    pub scale: f64,
    pub l_constant: f64,
    pub l_std_error: f64,
    /// Relative Frobenius deviation from `I` of the whitened half-sample
    /// covariances (worst half).
    pub covariance_deviation: f64,
    pub volume: VolumeEstimate,
    pub samples: usize,
}

impl IsotropicReport {
    pub fn body(&self, b: &Body) -> Result<Body> {
        Body::image(self.map.clone(), b.clone())
    }
}

/// Default sample count for covariance estimation, `50·n²`.
pub fn default_isotropic_samples(n: usize) -> usize {
    50 * n * n
}

/// Estimates `C = E[x xᵀ]` over `B`, whitens by `C^{−1/2}` and rescales to
/// volume one. `L_B = det(C)^{1/(2n)} / |B|^{1/n}`.
pub fn isotropic_normalize(b: &Body, samples: usize, rng: &mut RngStream) -> Result<IsotropicReport> {
    let mut vol_rng = rng.substream(&[0x701]);
    let volume = log_volume(b, samples.max(400), &mut vol_rng)?;
    isotropic_with_volume(b, samples, volume, rng)
}

/// As [`isotropic_normalize`] with a known volume of `B`.
pub fn isotropic_with_volume(
    b: &Body,
    samples: usize,
    volume: VolumeEstimate,
    rng: &mut RngStream,
) -> Result<IsotropicReport> {
    let n = b.dim();
    let batch = uniform_samples(b, samples.max(2 * n + 2), rng)?;
    let c = batch.second_moments();
    let s = inv_sqrt_psd(&c)?;
    let (log_det_c, _) = log_abs_det(&c);
    let log_det_s = -0.5 * log_det_c;
    let scale = (-(volume.log_volume + log_det_s) / n as f64).exp();
    let map = LinearMap::new(s.scaled(scale))?;

    let half = batch.points.len() / 2;
    let mut deviation = 0.0_f64;
    let mut half_l = Vec::new();
    for part in [&batch.points[..half], &batch.points[half..]] {
        let ch = second_moments(part, n);
        let w = s.matmul(&ch).matmul(&s);
        deviation = deviation
            .max(crate::sampling::relative_deviation(&w, &Matrix::identity(n)));
        half_l.push(log_abs_det(&ch).0 / (2.0 * n as f64));
    }
    let log_l = log_det_c / (2.0 * n as f64) - volume.log_volume / n as f64;
    let l_constant = log_l.exp();
    // half-sample spread ≈ √2 × full-sample error on the log scale
    let cov_se = (half_l[0] - half_l[1]).abs() / 2.0;
    let l_std_error = l_constant * (cov_se.powi(2) + (volume.std_error / n as f64).powi(2)).sqrt();
    Ok(IsotropicReport {
        map,
        scale,
        l_constant,
        l_std_error,
        covariance_deviation: deviation,
        volume,
        samples: batch.points.len(),
    })
}

/// `n·(|B|·|B°|)^{1/n}` with standard error.
pub fn santalo_product(b: &Body, samples_per_phase: usize, rng: &mut RngStream) -> Result<(f64, f64)> {
    let n = b.dim() as f64;
    let polar = b.polar()?;
    let mut r1 = rng.substream(&[1]);
    let mut r2 = rng.substream(&[2]);
    let vb = log_volume(b, samples_per_phase, &mut r1)?;
    let vp = log_volume(&polar, samples_per_phase, &mut r2)?;
    let value = n * ((vb.log_volume + vp.log_volume) / n).exp();
    let se = value * (vb.std_error.powi(2) + vp.std_error.powi(2)).sqrt() / n;
    Ok((value, se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_examples() {
        assert!((log_volume_analytic(&Body::l1(2)).unwrap().log_volume - 2f64.ln()).abs() < 1e-14);
        let v = log_volume_analytic(&Body::l2(3)).unwrap().log_volume;
        assert!((v - (4.0 * PI / 3.0).ln()).abs() < 1e-13);
        let v = log_volume_analytic(&Body::linf(5)).unwrap().log_volume;
        assert!((v - 5.0 * 2f64.ln()).abs() < 1e-14);
        assert!(matches!(
            log_volume_analytic(&Body::schatten(1.0, 2)),
            Err(Error::Unsupported(_))
        ));
        // B₁³ as a 3-generator V-polytope: 8/3!
        let c = Body::vpolytope(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        let v = log_volume_analytic(&c).unwrap().log_volume;
        assert!((v - (8.0f64 / 6.0).ln()).abs() < 1e-13);
        let v = log_volume_analytic(&c.polar().unwrap()).unwrap().log_volume;
        assert!((v - 8f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn simplicial_polytope_volumes() {
        let e = |i: usize, n: usize| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
        // B₁³ with an interior generator
        let mut g: Vec<Vec<f64>> = (0..3).map(|i| e(i, 3)).collect();
        g.push(vec![0.2, -0.3, 0.1]);
        let v = simplicial_log_volume(&g).unwrap();
        assert!((v - (4.0f64 / 3.0).ln()).abs() < 1e-12);
        // the square as absconv of its corners has 2-vertex facets
        let sq = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        assert!((simplicial_log_volume(&sq).unwrap() - 4f64.ln()).abs() < 1e-12);
        // the cube has square facets
        let cube = Body::linf(3).exact_generators().unwrap();
        assert!(simplicial_log_volume(&cube).is_none());
        // a generator on a facet makes that facet non-simplicial
        let mut g: Vec<Vec<f64>> = (0..3).map(|i| e(i, 3)).collect();
        g.push(vec![0.5, 0.5, 0.0]);
        assert!(simplicial_log_volume(&g).is_none());
        // random polytope against rejection sampling
        let mut rng = RngStream::new(5, 0);
        let g: Vec<Vec<f64>> = (0..7).map(|_| rng.sphere(3)).collect();
        let exact = simplicial_log_volume(&g).unwrap();
        let body = Body::vpolytope(g).unwrap();
        let mc = log_volume_rejection(&body, 400_000, &mut rng).unwrap();
        assert!((mc.log_volume - exact).abs() < 4.0 * mc.std_error, "{mc:?} vs {exact}");
    }

    #[test]
    fn rejection_examples() {
        let mut rng = RngStream::new(1, 0);
        let v = log_volume_rejection(&Body::linf(2), 1_000_000, &mut rng).unwrap();
        assert!((v.log_volume - 4f64.ln()).abs() < 0.01, "{v:?}");
        let v = log_volume_rejection(&Body::l1(3), 1_000_000, &mut rng).unwrap();
        assert!((v.log_volume - (4.0f64 / 3.0).ln()).abs() < 0.02, "{v:?}");
        let thin = Body::image(LinearMap::diagonal(&[1.0, 1e-6]).unwrap(), Body::l2(2)).unwrap();
        assert!(matches!(
            log_volume_rejection(&thin, 10_000, &mut rng),
            Err(Error::DegenerateAcceptance { .. })
        ));
    }

    #[test]
    fn annealed_ball() {
        let mut rng = RngStream::new(2, 0);
        let v = log_volume_annealed(&Body::l2(4), 4000, &mut rng).unwrap();
        let exact = (PI * PI / 2.0).ln();
        assert!((v.log_volume - exact).abs() < 3.0 * v.std_error, "{v:?} vs {exact}");
        assert!(v.std_error > 0.0);
    }

    #[test]
    fn nth_root_ratios() {
        let a = log_volume_analytic(&Body::linf(2)).unwrap();
        let b = log_volume_analytic(&Body::l2(2)).unwrap();
        let (r, se) = vr_nthroot_ratio(&a, &b).unwrap();
        assert!((r - (4.0 / PI).sqrt()).abs() < 1e-14 && se == 0.0);
        let (r, _) = vr_nthroot_ratio(&a, &a).unwrap();
        assert_eq!(r, 1.0);
        let twice = a.mapped(&LinearMap::diagonal(&[2.0, 2.0]).unwrap());
        assert!((vr_nthroot_ratio(&twice, &a).unwrap().0 - 2.0).abs() < 1e-14);
        let c = log_volume_analytic(&Body::l2(3)).unwrap();
        assert!(vr_nthroot_ratio(&a, &c).is_err());
    }

    #[test]
    fn santalo_closed_forms() {
        let mut rng = RngStream::new(3, 0);
        let (v, _) = santalo_product(&Body::l2(2), 100, &mut rng).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-12);
        let (v, _) = santalo_product(&Body::l1(2), 100, &mut rng).unwrap();
        assert!((v - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cube_isotropic_constant() {
        let mut rng = RngStream::new(4, 0);
        let rep = isotropic_normalize(&Body::linf(3), 20_000, &mut rng).unwrap();
        let target = 1.0 / 12f64.sqrt();
        assert!((rep.l_constant - target).abs() < 0.02 * target, "{rep:?}");
        assert!(rep.covariance_deviation < 0.05);
        let img = rep.body(&Body::linf(3)).unwrap();
        let v = log_volume_analytic(&img).unwrap().log_volume;
        assert!(v.abs() < 1e-10);
    }
}
