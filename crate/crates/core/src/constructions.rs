//! Random and deterministic constructions of bodies and positions.

use serde::{Deserialize, Serialize};

use crate::bodies::{lp_norm, Body, SymmetricGaugeSpec, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{log_abs_det, Matrix};
use crate::operators::{operator_norm, LinearMap};
use crate::rng::RngStream;
use crate::sampling::{hit_and_run, uniform_samples, ChainParams};
use crate::volume::VolumeEstimate;

/// `absconv{X₁, …, X_m, e₁, …, e_n}` with `X_j` uniform on the sphere.
pub fn gluskin_polytope(n: usize, m: usize, rng: &mut RngStream) -> Result<Body> {
    let mut generators: Vec<Vec<f64>> = (0..m).map(|_| rng.sphere(n)).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        generators.push(e);
    }
    Body::vpolytope(generators)
}

/// Points of `∂L` used to certify inclusions of `L`: its generators when it
/// has them, otherwise radial projections of `count` hit-and-run points.
pub fn inclusion_test_points(l: &Body, count: usize, rng: &mut RngStream) -> Result<Vec<Vec<f64>>> {
    if let Some(g) = l.exact_generators() {
        return Ok(g);
    }
    let pts = uniform_samples(l, count, rng)?.points;
    pts.iter()
        .filter(|p| p.iter().any(|v| *v != 0.0))
        .map(|p| l.radial_boundary_point(p))
        .collect()
}

/// A random parallelepiped containing `L`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DrParallelepiped {
    /// Rows are the sampled points `X_j ∈ L°`.
    pub t: LinearMap,
    /// `P = T⁻¹(B∞ⁿ)`.
    pub p: Body,
    pub log_volume_p: f64,
    /// `(|P|/|L|)^{1/n}` and its standard error.
    pub ratio: f64,
    pub ratio_std_error: f64,
    /// Largest `gauge_P(y) − 1` over the tested points `y ∈ ∂L`.
    pub max_violation: f64,
    pub points_tested: usize,
    pub attempts: usize,
}

/// Samples the rows of `T` uniformly from `L°` (hit-and-run) and returns
/// `P = T⁻¹(B∞ⁿ)`, which contains `L` by polarity: `|⟨X_j, y⟩| ≤ 1` for
/// `y ∈ L`. `L°` should already be in isotropic position.
pub fn dr_parallelepiped(
    l: &Body,
    l_volume: &VolumeEstimate,
    test_points: &[Vec<f64>],
    rng: &mut RngStream,
) -> Result<DrParallelepiped> {
    let n = l.dim();
    let polar = l.polar()?;
    const MAX_ATTEMPTS: usize = 3;
    for attempt in 1..=MAX_ATTEMPTS {
        let rows = hit_and_run(&polar, n, ChainParams::standard(n), None, rng)?;
        let m = Matrix::from_rows(&rows)?;
        let (ld, sign) = log_abs_det(&m);
        if sign == 0 || !ld.is_finite() {
            continue;
        }
        let t = LinearMap::new(m)?;
        let p = Body::image(t.inverse()?, Body::linf(n))?;
        let mut max_violation = f64::NEG_INFINITY;
        for y in test_points {
            let g = lp_norm(&t.apply(y), f64::INFINITY);
            max_violation = max_violation.max(g - 1.0);
        }
        let log_volume_p = n as f64 * 2f64.ln() - ld;
        let ratio = ((log_volume_p - l_volume.log_volume) / n as f64).exp();
        return Ok(DrParallelepiped {
            t,
            p,
            log_volume_p,
            ratio,
            ratio_std_error: ratio * l_volume.std_error / n as f64,
            max_violation,
            points_tested: test_points.len(),
            attempts: attempt,
        });
    }
    Err(Error::SingularT {
        attempts: MAX_ATTEMPTS,
    })
}

/// `(1/‖T‖)·T(L)` for the exact operator norm `‖T : X_L → X_K‖`.
pub fn include_via_operator(t: &LinearMap, l: &Body, k: &Body) -> Result<Body> {
    let norm = operator_norm(t, l, k)?;
    if !norm.exact {
        return Err(Error::Unsupported(
            "inclusion needs an exact operator norm (polytope source)".into(),
        ));
    }
    Body::image(t.scaled(1.0 / norm.value)?, l.clone())
}

/// The unit ball of `N(X) = τ(s(X))` on `d × d` matrices.
pub fn unitary_invariant_ball(tau: &SymmetricGaugeSpec, d: usize) -> Body {
    match tau {
        SymmetricGaugeSpec::Lp { p } => Body::schatten(*p, d),
        other => Body::sym_gauge(other.clone(), d),
    }
}

/// `τ(1, …, 1)`.
pub fn tau_u(tau: &SymmetricGaugeSpec, d: usize) -> f64 {
    tau.tau_u(d)
}

/// Pointwise check of a pair of inclusions `a·A ⊆ K ⊆ b·B`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub tested: usize,
    /// Points where the inner inclusion fails beyond tolerance.
    pub inner_violations: usize,
    pub outer_violations: usize,
    /// Largest relative excess `(lhs − rhs)/rhs` seen (negative if none).
    pub max_inner_excess: f64,
    pub max_outer_excess: f64,
}

impl InclusionReport {
    fn new() -> Self {
        InclusionReport {
            max_inner_excess: f64::NEG_INFINITY,
            max_outer_excess: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    /// Records `lhs ≤ rhs` checks for both inclusions at one point.
    fn record(&mut self, inner: (f64, f64), outer: (f64, f64)) {
        self.tested += 1;
        let ei = (inner.0 - inner.1) / inner.1.max(f64::MIN_POSITIVE);
        let eo = (outer.0 - outer.1) / outer.1.max(f64::MIN_POSITIVE);
        self.max_inner_excess = self.max_inner_excess.max(ei);
        self.max_outer_excess = self.max_outer_excess.max(eo);
        if ei > MEMBERSHIP_TOL {
            self.inner_violations += 1;
        }
        if eo > MEMBERSHIP_TOL {
            self.outer_violations += 1;
        }
    }

    pub fn violations(&self) -> usize {
        self.inner_violations + self.outer_violations
    }
}

/// Checks `(1/τ(u))·S∞ ⊆ B_N ⊆ (d/τ(u))·S₁` through the gauge inequalities
/// `N(X) ≤ τ(u)·σ∞(X)` and `(τ(u)/d)·σ₁(X) ≤ N(X)`.
///
/// Test matrices cycle through sphere directions, scaled orthogonal matrices
/// (all singular values equal) and rank-one matrices, which are where the two
/// inclusions are tight.
pub fn schatten_sandwich_check(
    tau: &SymmetricGaugeSpec,
    d: usize,
    samples: usize,
    rng: &mut RngStream,
) -> Result<InclusionReport> {
    let ball = unitary_invariant_ball(tau, d);
    let s_inf = Body::schatten(f64::INFINITY, d);
    let s_one = Body::schatten(1.0, d);
    let tu = tau.tau_u(d);
    let mut rep = InclusionReport::new();
    for i in 0..samples {
        let x: Vec<f64> = match i % 3 {
            0 => rng.sphere(d * d),
            1 => rng.rotation(d).scaled(rng.normal()).into_vec(),
            _ => {
                let u = rng.gaussian_vector(d);
                let v = rng.gaussian_vector(d);
                (0..d * d).map(|k| u[k / d] * v[k % d]).collect()
            }
        };
        let g = ball.gauge(&x)?;
        if g == 0.0 {
            continue;
        }
        rep.record(
            (g, tu * s_inf.gauge(&x)?),
            (tu / d as f64 * s_one.gauge(&x)?, g),
        );
    }
    Ok(rep)
}

/// `1/(2√(πe))`.
pub fn bobkov_inner_constant() -> f64 {
    1.0 / (2.0 * (std::f64::consts::PI * std::f64::consts::E).sqrt())
}

/// `√6/2`.
pub fn bobkov_outer_constant() -> f64 {
    6f64.sqrt() / 2.0
}

/// Allowance on both constants for the sampling error of the isotropic map.
pub const BOBKOV_ALLOWANCE: f64 = 1.1;

/// Checks `c₁·B∞ⁿ ⊆ K ⊆ c₂·n·B₁ⁿ` for an isotropic unconditional `K`, with
/// `c₁ = 1/(2√(πe))/1.1` and `c₂ = 1.1·√6/2`, pointwise through
/// `gauge_K(x) ≤ ‖x‖∞/c₁` and `‖x‖₁/(c₂ n) ≤ gauge_K(x)`.
///
/// Test points are sphere directions interleaved with cube corners and
/// coordinate vectors, the extremal directions of the two inclusions.
pub fn bobkov_check(k_iso: &Body, samples: usize, rng: &mut RngStream) -> Result<InclusionReport> {
    let n = k_iso.dim();
    let c1 = bobkov_inner_constant() / BOBKOV_ALLOWANCE;
    let c2 = bobkov_outer_constant() * BOBKOV_ALLOWANCE;
    let mut rep = InclusionReport::new();
    for i in 0..samples {
        let x: Vec<f64> = match i % 3 {
            0 => rng.sphere(n),
            1 => (0..n)
                .map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 })
                .collect(),
            _ => {
                let mut e = vec![0.0; n];
                e[rng.below(n)] = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
                e
            }
        };
        let g = k_iso.gauge(&x)?;
        rep.record(
            (g, lp_norm(&x, f64::INFINITY) / c1),
            (lp_norm(&x, 1.0) / (c2 * n as f64), g),
        );
    }
    Ok(rep)
}

/// `L̃ = A(L) / (‖A : X_L → S∞‖ · τ(u))`, contained in `B_N` by the sandwich
/// `(1/τ(u))·S∞ ⊆ B_N`. `L` must have exact generators.
pub fn gaussian_inclusion_position(
    l: &Body,
    a: &LinearMap,
    tau: &SymmetricGaugeSpec,
    d: usize,
) -> Result<(Body, f64)> {
    let s_inf = Body::schatten(f64::INFINITY, d);
    let norm = operator_norm(a, l, &s_inf)?;
    if !norm.exact {
        return Err(Error::Unsupported(
            "Gaussian position needs a polytope source".into(),
        ));
    }
    let scale = 1.0 / (norm.value * tau.tau_u(d));
    Ok((Body::image(a.scaled(scale)?, l.clone())?, norm.value))
}
