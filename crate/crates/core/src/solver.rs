//! Upper bounds on the volume ratio `vr(K, L)` through the inclusion program
//!
//! ```text
//! maximise log|det T|  subject to  gauge_K(T v_j) ≤ 1 for every generator v_j of L.
//! ```
//!
//! Any feasible `T` witnesses `vr(K, L) ≤ (|K| / |T(L)|)^{1/n}`. The program is
//! solved in its scale-free form: maximise
//! `F(T) = log|det T| − n·log max_j gauge_K(T v_j)`, whose maximisers rescale to
//! optimal feasible maps. Ascent works on a smoothed `F` (the max replaced by
//! a `q`-norm, kinks of `K` rounded) with `q` raised in stages; the exact `F`
//! is tracked at every iterate and the best map is kept.

use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::linalg::{inv_sqrt_psd, log_abs_det, norm2, Matrix};
use crate::operators::LinearMap;
use crate::rng::RngStream;
use crate::volume::{log_volume, VolumeEstimate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop a stage when the smoothed objective gains less than this over
    /// 50 consecutive iterations.
    pub tol: f64,
    /// Samples per annealing phase for volumes without a closed form.
    pub volume_samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            restarts: 5,
            max_iter: 2000,
            tol: 1e-6,
            volume_samples: 1000,
        }
    }
}

/// Sharpness levels of the smoothed objective.
const Q_LEVELS: [f64; 6] = [4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0];
const STALL_WINDOW: usize = 50;

/// A feasible position `T(L) ⊆ K` with maximal determinant found.
#[derive(Clone, Debug)]
pub struct Position {
    /// Feasible map: `max_j gauge_K(T v_j) = 1`.
    pub t: Matrix,
    pub log_det: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VrSolveResult {
    pub t_best: LinearMap,
    /// `(|K|/|T_best(L)|)^{1/n}`.
    pub vr_upper: f64,
    pub vr_std_error: f64,
    pub log_det: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// `max_j gauge_K(T_best v_j)`, the inclusion certificate.
    pub max_generator_gauge: f64,
}

struct Problem<'a> {
    k: &'a Body,
    gens: &'a [Vec<f64>],
    n: usize,
    /// Optional left factor `A`: the problem is posed for `A⁻¹K`.
    a: Option<Matrix>,
}

impl Problem<'_> {
    fn gauge(&self, y: &[f64]) -> Result<f64> {
        match &self.a {
            Some(a) => self.k.gauge(&a.mul_vec(y)),
            None => self.k.gauge(y),
        }
    }

    fn smooth_gauge(&self, y: &[f64], q: f64) -> Result<(f64, Vec<f64>)> {
        match &self.a {
            Some(a) => {
                let (h, g) = self.k.smooth_gauge(&a.mul_vec(y), q)?;
                Ok((h, a.tr_mul_vec(&g)))
            }
            None => self.k.smooth_gauge(y, q),
        }
    }

    fn max_gauge(&self, t: &Matrix) -> Result<f64> {
        let mut m = 0.0_f64;
        for v in self.gens {
            m = m.max(self.gauge(&t.mul_vec(v))?);
        }
        Ok(m)
    }

    /// Exact scale-free objective `log|det T| − n log max_j gauge_K(T v_j)`.
    fn exact(&self, t: &Matrix) -> Result<f64> {
        let (ld, sign) = log_abs_det(t);
        if sign == 0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(ld - self.n as f64 * self.max_gauge(t)?.ln())
    }

    /// Smoothed objective and its left-relative gradient `M`:
    /// `Φ((I + εM)T) = Φ(T) + ε‖M‖² + o(ε)`.
    fn smooth(&self, t: &Matrix, q: f64) -> Result<(f64, Matrix)> {
        let n = self.n;
        let (ld, sign) = log_abs_det(t);
        if sign == 0 {
            return Ok((f64::NEG_INFINITY, Matrix::zeros(n, n)));
        }
        let mut parts = Vec::with_capacity(self.gens.len());
        let mut hmax = 0.0_f64;
        for v in self.gens {
            let y = t.mul_vec(v);
            let (h, g) = self.smooth_gauge(&y, q)?;
            hmax = hmax.max(h);
            parts.push((y, h, g));
        }
        if !(hmax > 0.0) || !hmax.is_finite() {
            return Err(Error::Singular);
        }
        let weights: Vec<f64> = parts.iter().map(|(_, h, _)| (h / hmax).powf(q)).collect();
        let total: f64 = weights.iter().sum();
        let log_s = hmax.ln() + total.ln() / q;
        let mut m = Matrix::identity(n);
        for ((y, h, g), w) in parts.iter().zip(&weights) {
            if *w == 0.0 || *h == 0.0 {
                continue;
            }
            let c = n as f64 * w / (total * h);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] -= c * g[i] * y[j];
                }
            }
        }
        Ok((ld - n as f64 * log_s, m))
    }
}

fn normalize_det(t: &Matrix) -> Option<Matrix> {
    let (ld, sign) = log_abs_det(t);
    if sign <= 0 || !ld.is_finite() {
        return None;
    }
    Some(t.scaled((-ld / t.rows() as f64).exp()))
}

struct AscentResult {
    t: Matrix,
    f: f64,
    iterations: usize,
    converged: bool,
}

fn ascend(p: &Problem, t0: &Matrix, opts: &SolverOptions) -> Result<AscentResult> {
    let n = p.n;
    let mut t = normalize_det(t0).ok_or(Error::Singular)?;
    let mut best_t = t.clone();
    let mut best_f = p.exact(&t)?;
    let per_level = (opts.max_iter / Q_LEVELS.len()).max(1);
    let mut iterations = 0;
    let mut converged = true;
    for &q in &Q_LEVELS {
        let (mut phi, mut m) = p.smooth(&t, q)?;
        let mut history = vec![phi];
        let mut alpha = 0.5;
        let mut level_done = false;
        for _ in 0..per_level {
            iterations += 1;
            let m2 = m.frobenius_norm().powi(2);
            if m2 < 1e-20 {
                level_done = true;
                break;
            }
            let mut a = alpha;
            let mut accepted = None;
            while a > 1e-13 {
                let step = Matrix::identity(n).add(&m.scaled(a)).matmul(&t);
                if let Some(cand) = normalize_det(&step) {
                    let (phi_c, m_c) = p.smooth(&cand, q)?;
                    if phi_c >= phi + 1e-4 * a * m2 {
                        accepted = Some((cand, phi_c, m_c));
                        break;
                    }
                }
                a *= 0.5;
            }
            let Some((cand, phi_c, m_c)) = accepted else {
                level_done = true;
                break;
            };
            t = cand;
            phi = phi_c;
            m = m_c;
            alpha = (4.0 * a).min(0.5);
            let f = p.exact(&t)?;
            if f > best_f {
                best_f = f;
                best_t = t.clone();
            }
            history.push(phi);
            let h = history.len();
            if h > STALL_WINDOW && phi - history[h - 1 - STALL_WINDOW] < opts.tol {
                level_done = true;
                break;
            }
        }
        converged &= level_done;
        // continue the next stage from the best exact iterate
        t = best_t.clone();
    }
    Ok(AscentResult {
        t: best_t,
        f: best_f,
        iterations,
        converged,
    })
}

/// Map `A` with `A⁻¹K` roughly round: linear images are unwrapped and
/// polytopes whitened by the second moments of their generators or normals.
fn shape_map(k: &Body) -> Option<Matrix> {
    match k {
        Body::LinearImage { base, map } => Some(match shape_map(base) {
            Some(inner) => map.matrix().matmul(&inner),
            None => map.matrix().clone(),
        }),
        Body::VPolytope { generators } => inv_sqrt_psd(&second_moments(generators)).ok()?.inverse().ok(),
        Body::PolarPolytope { generators } => inv_sqrt_psd(&second_moments(generators)).ok(),
        _ => None,
    }
}

fn second_moments(vs: &[Vec<f64>]) -> Matrix {
    let n = vs[0].len();
    let mut c = Matrix::zeros(n, n);
    for v in vs {
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] += v[i] * v[j];
            }
        }
    }
    c.scaled(1.0 / vs.len() as f64)
}

/// Largest-determinant feasible `T` with `T(absconv gens) ⊆ K`, by multistart
/// smoothed ascent. The search runs for `A⁻¹K` and whitened generators `W v_j`
/// (`T = A S W`), which makes it insensitive to linear changes of either body.
/// Starts are `S = id` and random rotations.
pub fn maxdet_position(
    k: &Body,
    gens: &[Vec<f64>],
    opts: &SolverOptions,
    rng: &mut RngStream,
) -> Result<Position> {
    let n = k.dim();
    if gens.is_empty() || gens.iter().any(|g| g.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gens.first().map_or(0, Vec::len),
        });
    }
    let a = shape_map(k);
    let w = inv_sqrt_psd(&second_moments(gens)).unwrap_or_else(|_| Matrix::identity(n));
    let white: Vec<Vec<f64>> = gens.iter().map(|v| w.mul_vec(v)).collect();
    let p = Problem { k, gens: &white, n, a: a.clone() };
    let mut best: Option<AscentResult> = None;
    let mut iterations = 0;
    for r in 0..opts.restarts.max(1) {
        let start = if r == 0 { Matrix::identity(n) } else { rng.rotation(n) };
        let res = ascend(&p, &start, opts)?;
        iterations += res.iterations;
        if best.as_ref().is_none_or(|b| res.f > b.f) {
            best = Some(res);
        }
    }
    let best = best.expect("at least one restart");
    let s = best.t.matmul(&w);
    let t = match &a {
        Some(a) => a.matmul(&s),
        None => s,
    };
    let original = Problem { k, gens, n, a: None };
    position_from(&original, t, iterations, opts.restarts.max(1), best.converged)
}

fn position_from(
    p: &Problem,
    t: Matrix,
    iterations: usize,
    restarts: usize,
    converged: bool,
) -> Result<Position> {
    let g = p.max_gauge(&t)?;
    let t = t.scaled(1.0 / g);
    let log_det = log_abs_det(&t).0;
    Ok(Position {
        t,
        log_det,
        iterations,
        restarts,
        converged,
    })
}

/// Volumes of `K` and `L`; the same estimate is reused when `K = L`.
fn pair_volumes(
    k: &Body,
    l: &Body,
    opts: &SolverOptions,
    rng: &mut RngStream,
) -> Result<(VolumeEstimate, VolumeEstimate)> {
    let vk = log_volume(k, opts.volume_samples, &mut rng.substream(&[0xB0D1]))?;
    let vl = if k == l {
        vk
    } else {
        log_volume(l, opts.volume_samples, &mut rng.substream(&[0xB0D2]))?
    };
    Ok((vk, vl))
}

/// `(|K|/|T(L)|)^{1/n}` for a feasible position, with its standard error.
pub fn vr_from_position(pos: &Position, vk: &VolumeEstimate, vl: &VolumeEstimate) -> (f64, f64) {
    let n = vk.dim as f64;
    let vr = ((vk.log_volume - vl.log_volume - pos.log_det) / n).exp();
    let se = vr * (vk.std_error.powi(2) + vl.std_error.powi(2)).sqrt() / n;
    (vr, se)
}

fn solve_result(k: &Body, gens: &[Vec<f64>], pos: Position, vk: &VolumeEstimate, vl: &VolumeEstimate) -> Result<VrSolveResult> {
    let (vr_upper, vr_std_error) = vr_from_position(&pos, vk, vl);
    let p = Problem { k, gens, n: k.dim(), a: None };
    let max_generator_gauge = p.max_gauge(&pos.t)?;
    Ok(VrSolveResult {
        t_best: LinearMap::new(pos.t)?,
        vr_upper,
        vr_std_error,
        log_det: pos.log_det,
        iterations: pos.iterations,
        restarts: pos.restarts,
        converged: pos.converged,
        max_generator_gauge,
    })
}

/// Max-determinant inclusion of a body `L` with exact generators into `K`.
pub fn maxdet_inclusion(
    k: &Body,
    l: &Body,
    opts: &SolverOptions,
    rng: &mut RngStream,
) -> Result<VrSolveResult> {
    check_pair(k, l)?;
    let gens = l.exact_generators().ok_or_else(|| {
        Error::Unsupported("maxdet_inclusion needs a body with exact generators".into())
    })?;
    let (vk, vl) = pair_volumes(k, l, opts, rng)?;
    let pos = maxdet_position(k, &gens, opts, &mut rng.substream(&[0x501]))?;
    solve_result(k, &gens, pos, &vk, &vl)
}

fn check_pair(k: &Body, l: &Body) -> Result<()> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: l.dim(),
        });
    }
    Ok(())
}

/// Estimate of `vr(K, L)` together with how it was obtained.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VrEstimate {
    pub vr: f64,
    pub std_error: f64,
    /// False when `L` was replaced by an inscribed polytope through sampled
    /// boundary points (the inclusion is then certified for that polytope only).
    pub exact_generators: bool,
    pub solve: VrSolveResult,
}

/// `16·n` spread boundary points of `L` (`n = 2`: equally spaced angles).
pub fn boundary_generators(l: &Body, rng: &mut RngStream) -> Result<Vec<Vec<f64>>> {
    let n = l.dim();
    let count = 16 * n;
    let dirs = if n == 2 {
        (0..count)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()
    } else {
        spread_directions(n, count, rng)
    };
    dirs.iter().map(|u| l.radial_boundary_point(u)).collect()
}

/// Sphere points spread by a few rounds of antipodal-aware repulsion.
pub fn spread_directions(n: usize, count: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = (0..count).map(|_| rng.sphere(n)).collect();
    for round in 0..60 {
        let step = 0.05 / (1.0 + round as f64 * 0.05);
        let mut next = pts.clone();
        for i in 0..count {
            let mut force = vec![0.0; n];
            for j in 0..count {
                if i == j {
                    continue;
                }
                for s in [1.0, -1.0] {
                    let diff: Vec<f64> = (0..n).map(|c| pts[i][c] - s * pts[j][c]).collect();
                    let d = norm2(&diff).max(1e-6);
                    let w = 1.0 / (d * d * d);
                    for c in 0..n {
                        force[c] += w * diff[c];
                    }
                }
            }
            let fnorm = norm2(&force).max(1e-12);
            let moved: Vec<f64> = (0..n).map(|c| pts[i][c] + step * force[c] / fnorm).collect();
            let r = norm2(&moved);
            next[i] = moved.into_iter().map(|v| v / r).collect();
        }
        pts = next;
    }
    pts
}

/// `vr(K, L)` upper estimate. Polytope-like `L` (V-polytopes, `B₁ⁿ`, `B∞ⁿ` with
/// `n ≤ 12`, their images) use exact generators; other bodies are replaced by
/// `16n` boundary points and flagged. Volumes are those of the true `K`, `L`.
pub fn vr_estimate(k: &Body, l: &Body, opts: &SolverOptions, rng: &mut RngStream) -> Result<VrEstimate> {
    check_pair(k, l)?;
    let (gens, exact) = match l.exact_generators() {
        Some(g) => (g, true),
        None => (boundary_generators(l, &mut rng.substream(&[0x6E5]))?, false),
    };
    let (vk, vl) = pair_volumes(k, l, opts, rng)?;
    let pos = maxdet_position(k, &gens, opts, &mut rng.substream(&[0x501]))?;
    let solve = solve_result(k, &gens, pos, &vk, &vl)?;
    Ok(VrEstimate {
        vr: solve.vr_upper,
        std_error: solve.vr_std_error,
        exact_generators: exact,
        solve,
    })
}

/// As [`vr_estimate`] with known volumes of `K` and `L`.
pub fn vr_estimate_with_volumes(
    k: &Body,
    l: &Body,
    vk: &VolumeEstimate,
    vl: &VolumeEstimate,
    opts: &SolverOptions,
    rng: &mut RngStream,
) -> Result<VrEstimate> {
    check_pair(k, l)?;
    let (gens, exact) = match l.exact_generators() {
        Some(g) => (g, true),
        None => (boundary_generators(l, &mut rng.substream(&[0x6E5]))?, false),
    };
    let pos = maxdet_position(k, &gens, opts, &mut rng.substream(&[0x501]))?;
    let solve = solve_result(k, &gens, pos, vk, vl)?;
    Ok(VrEstimate {
        vr: solve.vr_upper,
        std_error: solve.vr_std_error,
        exact_generators: exact,
        solve,
    })
}

pub const GRID_MAX_DIM: usize = 3;
const GRID_ANGLES: usize = 24;
const GRID_RATIOS: usize = 16;
const GRID_MAX_RATIO: f64 = 32.0;
const GRID_ROTATIONS_3D: usize = 48;
const GRID_RATIOS_3D: usize = 8;
const GRID_POLISH: usize = 10;

/// Result of the coarse global search.
#[derive(Clone, Debug)]
pub struct GridOracleResult {
    pub vr: f64,
    pub std_error: f64,
    pub log_det: f64,
    pub t: Matrix,
    pub candidates: usize,
}

fn rot2(a: f64) -> Matrix {
    Matrix::from_rows(&[vec![a.cos(), -a.sin()], vec![a.sin(), a.cos()]]).expect("2x2")
}

/// Global search over `T = R₁ D R₂` (`det D = 1`) for `n ≤ 3`, each candidate
/// rescaled to feasibility; the best candidates are polished with the local
/// solver. `n = 2`: 24 × 24 angles and 16 log-spaced axis ratios in `[1, 32]`.
/// `n = 3`: 48 × 48 Haar rotations from a fixed stream and 8 × 8 ratios.
pub fn vr_grid_oracle(k: &Body, l: &Body, opts: &SolverOptions, rng: &mut RngStream) -> Result<GridOracleResult> {
    check_pair(k, l)?;
    let n = k.dim();
    if n > GRID_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: GRID_MAX_DIM,
        });
    }
    let gens = match l.exact_generators() {
        Some(g) => g,
        None => boundary_generators(l, &mut rng.substream(&[0x6E5]))?,
    };
    let (vk, vl) = pair_volumes(k, l, opts, rng)?;
    let p = Problem { k, gens: &gens, n, a: None };

    let ratios = |count: usize| -> Vec<f64> {
        (0..count)
            .map(|i| GRID_MAX_RATIO.powf(i as f64 / (count - 1) as f64))
            .collect()
    };
    let mut candidates: Vec<(f64, Matrix)> = Vec::new();
    match n {
        1 => candidates.push((p.exact(&Matrix::identity(1))?, Matrix::identity(1))),
        2 => {
            let rots: Vec<Matrix> = (0..GRID_ANGLES)
                .map(|i| rot2(std::f64::consts::PI * i as f64 / GRID_ANGLES as f64))
                .collect();
            for r in ratios(GRID_RATIOS) {
                let s = r.sqrt();
                let d = Matrix::from_diag(&[s, 1.0 / s]);
                for r1 in &rots {
                    let r1d = r1.matmul(&d);
                    for r2 in &rots {
                        let t = r1d.matmul(r2);
                        candidates.push((p.exact(&t)?, t));
                    }
                }
            }
        }
        _ => {
            let mut grid_rng = RngStream::new(0x6121D, 3);
            let rots: Vec<Matrix> = (0..GRID_ROTATIONS_3D)
                .map(|i| {
                    if i == 0 {
                        Matrix::identity(3)
                    } else {
                        grid_rng.rotation(3)
                    }
                })
                .collect();
            let rs = ratios(GRID_RATIOS_3D);
            for &a in &rs {
                for &b in &rs {
                    let c = 1.0 / (a * b).cbrt();
                    let d = Matrix::from_diag(&[a * c, b * c, c]);
                    for r1 in &rots {
                        let r1d = r1.matmul(&d);
                        for r2 in &rots {
                            let t = r1d.matmul(r2);
                            let f = p.exact(&t)?;
                            candidates.push((f, t));
                        }
                    }
                    // keep memory bounded: retain the current best few
                    if candidates.len() > 20_000 {
                        candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
                        candidates.truncate(GRID_POLISH);
                    }
                }
            }
        }
    }
    let total = match n {
        1 => 1,
        2 => GRID_ANGLES * GRID_ANGLES * GRID_RATIOS,
        _ => GRID_ROTATIONS_3D * GRID_ROTATIONS_3D * GRID_RATIOS_3D * GRID_RATIOS_3D,
    };
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0));
    candidates.truncate(GRID_POLISH);
    let mut best_f = f64::NEG_INFINITY;
    let mut best_t = Matrix::identity(n);
    for (f, t) in &candidates {
        if *f > best_f {
            best_f = *f;
            best_t = t.clone();
        }
        if n > 1 {
            let res = ascend(&p, t, opts)?;
            if res.f > best_f {
                best_f = res.f;
                best_t = res.t;
            }
        }
    }
    let pos = position_from(&p, best_t, 0, 1, true)?;
    let (vr, se) = vr_from_position(&pos, &vk, &vl);
    Ok(GridOracleResult {
        vr,
        std_error: se,
        log_det: pos.log_det,
        t: pos.t,
        candidates: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gluskin_polytope;
    use std::f64::consts::PI;

    fn opts() -> SolverOptions {
        SolverOptions {
            restarts: 3,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn square_in_disc() {
        let mut rng = RngStream::new(1, 0);
        let r = maxdet_inclusion(&Body::l2(2), &Body::l1(2), &opts(), &mut rng).unwrap();
        let target = (PI / 2.0).sqrt();
        assert!((r.vr_upper - target).abs() < 0.01 * target, "{r:?}");
        assert!(r.max_generator_gauge <= 1.0 + 1e-9);
    }

    #[test]
    fn cross_polytope_in_square_is_a_rotation() {
        // B₁² is a rotated, scaled copy of B∞², so the ratio is 1
        let mut rng = RngStream::new(2, 0);
        let r = maxdet_inclusion(&Body::linf(2), &Body::l1(2), &opts(), &mut rng).unwrap();
        assert!((r.vr_upper - 1.0).abs() < 0.01, "{r:?}");
    }

    #[test]
    fn body_in_itself() {
        let mut rng = RngStream::new(3, 0);
        let l = gluskin_polytope(3, 6, &mut rng).unwrap();
        let r = maxdet_inclusion(&l, &l, &opts(), &mut rng).unwrap();
        assert!((r.vr_upper - 1.0).abs() < 1e-6, "{r:?}");
        let c = Body::linf(3);
        let r = maxdet_inclusion(&c, &c, &opts(), &mut rng).unwrap();
        assert!((r.vr_upper - 1.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn disc_in_square_via_boundary_points() {
        let mut rng = RngStream::new(4, 0);
        let e = vr_estimate(&Body::linf(2), &Body::l2(2), &opts(), &mut rng).unwrap();
        let target = (4.0 / PI).sqrt();
        assert!(!e.exact_generators);
        assert!((e.vr - target).abs() < 0.03 * target, "{e:?}");
    }

    #[test]
    fn grid_oracle_agrees() {
        let mut rng = RngStream::new(5, 0);
        let g = vr_grid_oracle(&Body::l2(2), &Body::l1(2), &opts(), &mut rng).unwrap();
        let s = maxdet_inclusion(&Body::l2(2), &Body::l1(2), &opts(), &mut rng).unwrap();
        assert!((g.vr / s.vr_upper - 1.0).abs() < 0.05, "{} {}", g.vr, s.vr_upper);
        assert!(matches!(
            vr_grid_oracle(&Body::l2(4), &Body::l1(4), &opts(), &mut rng),
            Err(Error::DimensionTooLarge { .. })
        ));
        let c = Body::linf(2);
        let g = vr_grid_oracle(&c, &c, &opts(), &mut rng).unwrap();
        assert!((g.vr - 1.0).abs() < 1e-6);
    }

    #[test]
    fn doubling_k_doubles_the_position() {
        // positions into 2K are twice as large: measured against |K| the
        // ratio halves, while vr(2K, L) = vr(K, L)
        let mut rng = RngStream::new(6, 0);
        let l = gluskin_polytope(3, 6, &mut rng).unwrap();
        let k = Body::l2(3);
        let a = maxdet_inclusion(&k, &l, &opts(), &mut RngStream::new(6, 1)).unwrap();
        let b = maxdet_inclusion(&k.dilate(2.0).unwrap(), &l, &opts(), &mut RngStream::new(6, 1))
            .unwrap();
        let against_k = a.vr_upper * ((a.log_det - b.log_det) / 3.0).exp();
        assert!((against_k / a.vr_upper - 0.5).abs() < 0.005, "{against_k}");
        assert!((a.vr_upper / b.vr_upper - 1.0).abs() < 0.01);
    }

    #[test]
    fn one_dimensional_pairs_have_unit_ratio() {
        let mut rng = RngStream::new(7, 0);
        let l = gluskin_polytope(1, 2, &mut rng).unwrap();
        let r = maxdet_inclusion(&Body::l2(1), &l, &opts(), &mut rng).unwrap();
        assert!((r.vr_upper - 1.0).abs() < 1e-9);
    }
}
