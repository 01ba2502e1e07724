//! Symbolic descriptions of centrally symmetric convex bodies.
//!
//! A [`Body`] is an immutable description; every geometric query (gauge,
//! support function, polar, chords, radii) is evaluated from it on demand.
//! Matrix balls act on `ℝ^{d²}` through the row-major reshape
//! `x[i·d + j] = X[i][j]`.
//!
//! Membership uses a single global tolerance: `x ∈ B` iff
//! `gauge(B, x) ≤ 1 + MEMBERSHIP_TOL`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, svd, Matrix};
use crate::lp::{solve_standard, LpError};
use crate::operators::LinearMap;
use crate::rng::RngStream;

pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Endpoint residual `|gauge − 1|` required of chord endpoints.
pub const CHORD_TOL: f64 = 1e-10;
/// Largest dimension for which `B∞ⁿ` is handled through its `2ⁿ` corners.
pub const MAX_CUBE_CORNER_DIM: usize = 12;

/// JSON cannot hold `inf`; exponents serialise `∞` as the string `"inf"`.
mod exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Str(s) => match s.as_str() {
                "inf" | "infinity" | "Infinity" => Ok(f64::INFINITY),
                other => other
                    .parse()
                    .map_err(|_| de::Error::custom(format!("bad exponent {other:?}"))),
            },
        }
    }
}

/// Conjugate exponent `p' = p/(p−1)`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        norm2(x)
    } else if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// A subgradient `y` of `‖·‖_p` at `x`: `⟨y, x⟩ = ‖x‖_p` and `‖y‖_{p'} ≤ 1`.
pub fn lp_subgradient(x: &[f64], p: f64) -> (f64, Vec<f64>) {
    let val = lp_norm(x, p);
    if val == 0.0 {
        return (0.0, vec![0.0; x.len()]);
    }
    let g = if p == 1.0 {
        x.iter().map(|v| sign(*v)).collect()
    } else if p.is_infinite() {
        let (imax, _) = x
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        let mut g = vec![0.0; x.len()];
        g[imax] = sign(x[imax]);
        g
    } else {
        x.iter()
            .map(|v| sign(*v) * (v.abs() / val).powf(p - 1.0))
            .collect()
    };
    (val, g)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Smooth, 1-homogeneous stand-in for `‖·‖_p` used by the inclusion solver.
/// `q` controls sharpness; `p ∉ {1, ∞}` is already smooth and returned as is.
fn lp_smooth(x: &[f64], p: f64, q: f64) -> (f64, Vec<f64>) {
    if p.is_infinite() {
        lp_subgradient(x, q)
    } else if p == 1.0 {
        let mu2 = 1.0 / (q * q);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return (0.0, vec![0.0; x.len()]);
        }
        let roots: Vec<f64> = x.iter().map(|v| (v * v + mu2 * r2).sqrt()).collect();
        let val = roots.iter().sum();
        let inv_sum: f64 = roots.iter().map(|r| 1.0 / r).sum();
        let g = x
            .iter()
            .zip(&roots)
            .map(|(v, r)| v / r + mu2 * v * inv_sum)
            .collect();
        (val, g)
    } else {
        lp_subgradient(x, p)
    }
}

/// Permutation- and sign-invariant norm on `ℝ^d`, normalised so `τ(e₁) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetricGaugeSpec {
    Lp {
        #[serde(with = "exponent")]
        p: f64,
    },
    /// Sum of the `k` largest absolute entries.
    KyFan { k: usize },
    /// Dual of the Ky-Fan norm: `max(‖x‖∞, ‖x‖₁/k)`.
    KyFanDual { k: usize },
}

impl SymmetricGaugeSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SymmetricGaugeSpec::Lp { p } if !(p >= 1.0) => {
                Err(Error::InvalidBody(format!("exponent p = {p} must be ≥ 1")))
            }
            SymmetricGaugeSpec::KyFan { k } | SymmetricGaugeSpec::KyFanDual { k } if k == 0 => {
                Err(Error::InvalidBody("Ky-Fan index k must be ≥ 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, s: &[f64]) -> f64 {
        self.subgradient(s).0
    }

    /// Value and a subgradient (dual-norm at most one) at `s`.
    pub fn subgradient(&self, s: &[f64]) -> (f64, Vec<f64>) {
        match *self {
            SymmetricGaugeSpec::Lp { p } => lp_subgradient(s, p),
            SymmetricGaugeSpec::KyFan { k } => {
                let mut idx: Vec<usize> = (0..s.len()).collect();
                idx.sort_by(|&a, &b| s[b].abs().total_cmp(&s[a].abs()));
                let mut g = vec![0.0; s.len()];
                let mut val = 0.0;
                for &i in idx.iter().take(k) {
                    val += s[i].abs();
                    g[i] = sign(s[i]);
                }
                (val, g)
            }
            SymmetricGaugeSpec::KyFanDual { k } => {
                let kk = k.min(s.len()).max(1) as f64;
                let (vinf, ginf) = lp_subgradient(s, f64::INFINITY);
                let (v1, g1) = lp_subgradient(s, 1.0);
                if vinf >= v1 / kk {
                    (vinf, ginf)
                } else {
                    (v1 / kk, g1.into_iter().map(|v| v / kk).collect())
                }
            }
        }
    }

    fn smooth(&self, s: &[f64], q: f64) -> (f64, Vec<f64>) {
        match *self {
            SymmetricGaugeSpec::Lp { p } => lp_smooth(s, p, q),
            _ => self.subgradient(s),
        }
    }

    pub fn dual(&self) -> SymmetricGaugeSpec {
        match *self {
            SymmetricGaugeSpec::Lp { p } => SymmetricGaugeSpec::Lp { p: dual_exponent(p) },
            SymmetricGaugeSpec::KyFan { k } => SymmetricGaugeSpec::KyFanDual { k },
            SymmetricGaugeSpec::KyFanDual { k } => SymmetricGaugeSpec::KyFan { k },
        }
    }

    /// `τ(u)` for `u = e₁ + … + e_d`.
    pub fn tau_u(&self, d: usize) -> f64 {
        let df = d as f64;
        match *self {
            SymmetricGaugeSpec::Lp { p } => {
                if p.is_infinite() {
                    1.0
                } else {
                    df.powf(1.0 / p)
                }
            }
            SymmetricGaugeSpec::KyFan { k } => k.min(d) as f64,
            SymmetricGaugeSpec::KyFanDual { k } => (df / k.min(d) as f64).max(1.0),
        }
    }

    /// `max τ(s)` over the Euclidean unit sphere of `ℝ^d`.
    pub fn sphere_max(&self, d: usize) -> f64 {
        let df = d as f64;
        match *self {
            SymmetricGaugeSpec::Lp { p } => {
                if p >= 2.0 {
                    1.0
                } else {
                    df.powf(1.0 / p - 0.5)
                }
            }
            SymmetricGaugeSpec::KyFan { k } => (k.min(d) as f64).sqrt(),
            SymmetricGaugeSpec::KyFanDual { k } => (df.sqrt() / k.min(d) as f64).max(1.0),
        }
    }
}

/// Euclidean radius with a flag saying whether it is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radius {
    pub value: f64,
    pub exact: bool,
}

impl Radius {
    fn exact(value: f64) -> Self {
        Radius { value, exact: true }
    }
    fn approx(value: f64) -> Self {
        Radius {
            value,
            exact: false,
        }
    }
}

/// Immutable description of a centrally symmetric convex body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Body {
    /// `absconv{v₁, …, v_m}`; the generators must span.
    #[serde(rename = "vpolytope")]
    VPolytope { generators: Vec<Vec<f64>> },
    /// `{x : |⟨v_i, x⟩| ≤ 1 ∀i}`, the polar of a V-polytope (gauge-only form).
    #[serde(rename = "polar_vpolytope")]
    PolarPolytope { generators: Vec<Vec<f64>> },
    LpBall {
        #[serde(with = "exponent")]
        p: f64,
        n: usize,
    },
    /// Unit ball of the Schatten `p`-norm on `d × d` matrices.
    #[serde(rename = "schatten")]
    SchattenBall {
        #[serde(with = "exponent")]
        p: f64,
        d: usize,
    },
    /// Unit ball of the unitary-invariant norm `τ ∘ s`.
    #[serde(rename = "sym_gauge")]
    SymmetricGaugeBall { tau: SymmetricGaugeSpec, d: usize },
    /// `map(base)`.
    LinearImage { base: Box<Body>, map: LinearMap },
    /// `base ∩ radius·B₂ⁿ`.
    BallIntersection { base: Box<Body>, radius: f64 },
}

pub type BodyDescriptor = Body;

impl Body {
    pub fn lp(p: f64, n: usize) -> Body {
        Body::LpBall { p, n }
    }

    pub fn l1(n: usize) -> Body {
        Body::lp(1.0, n)
    }

    pub fn l2(n: usize) -> Body {
        Body::lp(2.0, n)
    }

    pub fn linf(n: usize) -> Body {
        Body::lp(f64::INFINITY, n)
    }

    pub fn schatten(p: f64, d: usize) -> Body {
        Body::SchattenBall { p, d }
    }

    pub fn sym_gauge(tau: SymmetricGaugeSpec, d: usize) -> Body {
        Body::SymmetricGaugeBall { tau, d }
    }

    /// Absolute convex hull of the given generators (checked to span).
    pub fn vpolytope(generators: Vec<Vec<f64>>) -> Result<Body> {
        let b = Body::VPolytope { generators };
        b.validate()?;
        Ok(b)
    }

    /// `map(base)`. Images of V-polytopes and their polars stay in generator form.
    pub fn image(map: LinearMap, base: Body) -> Result<Body> {
        if map.dim() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: map.dim(),
            });
        }
        if !map.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(match base {
            Body::VPolytope { generators } => Body::VPolytope {
                generators: generators.iter().map(|v| map.apply(v)).collect(),
            },
            Body::PolarPolytope { generators } => Body::PolarPolytope {
                generators: generators
                    .iter()
                    .map(|v| map.apply_inverse_transpose(v))
                    .collect::<Result<_>>()?,
            },
            Body::LinearImage { base, map: inner } => Body::LinearImage {
                base,
                map: map.compose(&inner)?,
            },
            other => Body::LinearImage {
                base: Box::new(other),
                map,
            },
        })
    }

    /// `λ·B`.
    pub fn dilate(&self, lambda: f64) -> Result<Body> {
        let n = self.dim();
        Body::image(LinearMap::new(Matrix::identity(n).scaled(lambda))?, self.clone())
    }

    pub fn ball_intersection(base: Body, radius: f64) -> Result<Body> {
        let b = Body::BallIntersection {
            base: Box::new(base),
            radius,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::VPolytope { generators } | Body::PolarPolytope { generators } => {
                generators.first().map_or(0, Vec::len)
            }
            Body::LpBall { n, .. } => *n,
            Body::SchattenBall { d, .. } | Body::SymmetricGaugeBall { d, .. } => d * d,
            Body::LinearImage { base, .. } | Body::BallIntersection { base, .. } => base.dim(),
        }
    }

    /// Checks the structural invariants (spanning generators, invertible maps,
    /// valid exponents and radii).
    pub fn validate(&self) -> Result<()> {
        match self {
            Body::VPolytope { generators } | Body::PolarPolytope { generators } => {
                let n = self.dim();
                if n == 0 {
                    return Err(Error::InvalidBody("polytope needs generators".into()));
                }
                if generators.iter().any(|g| g.len() != n) {
                    return Err(Error::InvalidBody("generators of unequal length".into()));
                }
                if generators.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidBody("non-finite generator entry".into()));
                }
                if rank(generators, n) < n {
                    return Err(Error::RankDeficient { dim: n });
                }
                Ok(())
            }
            Body::LpBall { p, n } => {
                if *n == 0 || !(*p >= 1.0) {
                    return Err(Error::InvalidBody(format!("bad lp ball p={p} n={n}")));
                }
                Ok(())
            }
            Body::SchattenBall { p, d } => {
                if *d == 0 || !(*p >= 1.0) {
                    return Err(Error::InvalidBody(format!("bad schatten ball p={p} d={d}")));
                }
                Ok(())
            }
            Body::SymmetricGaugeBall { tau, d } => {
                if *d == 0 {
                    return Err(Error::InvalidBody("d must be ≥ 1".into()));
                }
                tau.validate()
            }
            Body::LinearImage { base, map } => {
                base.validate()?;
                if map.dim() != base.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: base.dim(),
                        found: map.dim(),
                    });
                }
                if !map.is_invertible() {
                    return Err(Error::InvalidBody("linear image map is singular".into()));
                }
                Ok(())
            }
            Body::BallIntersection { base, radius } => {
                base.validate()?;
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidBody(format!("radius {radius} must be > 0")));
                }
                Ok(())
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Body> {
        let b: Body = serde_json::from_str(s)?;
        b.validate()?;
        Ok(b)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Minkowski functional `‖x‖_B = inf{t > 0 : x ∈ tB}`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match self {
            Body::LpBall { p, .. } => lp_norm(x, *p),
            Body::SchattenBall { p, d } => lp_norm(&singular_values_of(x, *d), *p),
            Body::SymmetricGaugeBall { tau, d } => tau.eval(&singular_values_of(x, *d)),
            Body::PolarPolytope { generators } => generators
                .iter()
                .fold(0.0, |m, v| m.max(dot(v, x).abs())),
            Body::VPolytope { generators } => polytope_gauge(generators, x)?.0,
            Body::LinearImage { base, map } => base.gauge(&map.apply_inverse(x)?)?,
            Body::BallIntersection { base, radius } => {
                base.gauge(x)?.max(norm2(x) / radius)
            }
        })
    }

    /// Gauge value together with a subgradient `y ∈ B°` with `⟨y, x⟩ = ‖x‖_B`.
    pub fn gauge_subgradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim(x)?;
        match self {
            Body::LpBall { p, .. } => Ok(lp_subgradient(x, *p)),
            Body::SchattenBall { p, d } => Ok(matrix_gauge(x, *d, |s| lp_subgradient(s, *p))),
            Body::SymmetricGaugeBall { tau, d } => Ok(matrix_gauge(x, *d, |s| tau.subgradient(s))),
            Body::PolarPolytope { generators } => {
                let mut best = (0.0, vec![0.0; x.len()]);
                for v in generators {
                    let a = dot(v, x);
                    if a.abs() > best.0 {
                        best = (a.abs(), v.iter().map(|c| c * sign(a)).collect());
                    }
                }
                Ok(best)
            }
            Body::VPolytope { generators } => polytope_gauge(generators, x),
            Body::LinearImage { base, map } => {
                let (g, y) = base.gauge_subgradient(&map.apply_inverse(x)?)?;
                Ok((g, map.apply_inverse_transpose(&y)?))
            }
            Body::BallIntersection { base, radius } => {
                let (g, y) = base.gauge_subgradient(x)?;
                let r = norm2(x) / radius;
                if g >= r {
                    Ok((g, y))
                } else {
                    let nx = norm2(x);
                    Ok((r, x.iter().map(|v| v / (nx * radius)).collect()))
                }
            }
        }
    }

    /// Smooth 1-homogeneous surrogate of the gauge with its gradient, used by
    /// the max-determinant solver. Max-type gauges (`ℓ∞`, `σ∞`, polar
    /// polytopes) are replaced by `q`-norm versions; `ℓ₁`-type gauges are
    /// rounded at their kinks. Other bodies return the exact gauge and a
    /// subgradient.
    pub fn smooth_gauge(&self, x: &[f64], q: f64) -> Result<(f64, Vec<f64>)> {
        self.check_dim(x)?;
        match self {
            Body::LpBall { p, .. } => Ok(lp_smooth(x, *p, q)),
            Body::SchattenBall { p, d } => Ok(matrix_gauge(x, *d, |s| lp_smooth(s, *p, q))),
            Body::SymmetricGaugeBall { tau, d } => Ok(matrix_gauge(x, *d, |s| tau.smooth(s, q))),
            Body::PolarPolytope { generators } => {
                let a: Vec<f64> = generators.iter().map(|v| dot(v, x)).collect();
                let (val, w) = lp_subgradient(&a, q);
                let mut g = vec![0.0; x.len()];
                for (v, wi) in generators.iter().zip(&w) {
                    for (gj, vj) in g.iter_mut().zip(v) {
                        *gj += wi * vj;
                    }
                }
                Ok((val, g))
            }
            Body::VPolytope { .. } => self.gauge_subgradient(x),
            Body::LinearImage { base, map } => {
                let (g, y) = base.smooth_gauge(&map.apply_inverse(x)?, q)?;
                Ok((g, map.apply_inverse_transpose(&y)?))
            }
            Body::BallIntersection { base, radius } => {
                let (g1, y1) = base.smooth_gauge(x, q)?;
                let nx = norm2(x);
                if nx == 0.0 {
                    return Ok((0.0, vec![0.0; x.len()]));
                }
                let g2 = nx / radius;
                let y2: Vec<f64> = x.iter().map(|v| v / (nx * radius)).collect();
                let (val, w) = lp_subgradient(&[g1, g2], q);
                let g = y1
                    .iter()
                    .zip(&y2)
                    .map(|(a, b)| w[0] * a + w[1] * b)
                    .collect();
                Ok((val, g))
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.gauge(x)? <= 1.0 + MEMBERSHIP_TOL)
    }

    /// Support function `h_B(y) = max_{x∈B} ⟨x, y⟩`.
    pub fn support(&self, y: &[f64]) -> Result<f64> {
        Ok(self.support_with_point(y)?.0)
    }

    /// Support function value with a maximising point of `B`.
    pub fn support_with_point(&self, y: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim(y)?;
        match self {
            Body::LpBall { p, .. } => Ok(lp_subgradient(y, dual_exponent(*p))),
            Body::SchattenBall { p, d } => {
                let q = dual_exponent(*p);
                Ok(matrix_gauge(y, *d, |s| lp_subgradient(s, q)))
            }
            Body::SymmetricGaugeBall { tau, d } => {
                let dual = tau.dual();
                Ok(matrix_gauge(y, *d, |s| dual.subgradient(s)))
            }
            Body::VPolytope { generators } => {
                let mut best = (0.0, generators[0].clone());
                for v in generators {
                    let a = dot(v, y);
                    if a.abs() > best.0 {
                        best = (a.abs(), v.iter().map(|c| c * sign(a)).collect());
                    }
                }
                Ok(best)
            }
            Body::PolarPolytope { generators } => polytope_gauge(generators, y),
            Body::LinearImage { base, map } => {
                let (h, p) = base.support_with_point(&map.apply_transpose(y))?;
                Ok((h, map.apply(&p)))
            }
            Body::BallIntersection { .. } => Err(Error::Unsupported(
                "support function of a ball intersection has no closed form".into(),
            )),
        }
    }

    /// The polar body `B° = {x : ⟨x, y⟩ ≤ 1 ∀y ∈ B}`.
    pub fn polar(&self) -> Result<Body> {
        Ok(match self {
            Body::LpBall { p, n } => Body::LpBall {
                p: dual_exponent(*p),
                n: *n,
            },
            Body::SchattenBall { p, d } => Body::SchattenBall {
                p: dual_exponent(*p),
                d: *d,
            },
            Body::SymmetricGaugeBall { tau, d } => Body::SymmetricGaugeBall {
                tau: tau.dual(),
                d: *d,
            },
            Body::VPolytope { generators } => Body::PolarPolytope {
                generators: generators.clone(),
            },
            Body::PolarPolytope { generators } => Body::VPolytope {
                generators: generators.clone(),
            },
            Body::LinearImage { base, map } => Body::LinearImage {
                base: Box::new(base.polar()?),
                map: map.inverse_transpose()?,
            },
            Body::BallIntersection { .. } => {
                return Err(Error::Unsupported(
                    "polar of a ball intersection has no closed form".into(),
                ))
            }
        })
    }

    /// First `t > 0` with `gauge(x + t·d) = 1`, for interior `x`.
    ///
    /// Newton steps from outside the body using supporting functionals (valid
    /// lower bounds of the convex map `t ↦ gauge(x + td)`), safeguarded by
    /// bisection on the bracket.
    fn ray_exit(&self, x: &[f64], d: &[f64], g0: f64) -> Result<f64> {
        let nd = norm2(d);
        let r_out = self.outer_radius_upper_bound()?;
        let mut lo = 0.0;
        let mut hi = (1.01 * r_out + norm2(x)) / nd + 1e-12;
        let mut g_lo = g0;
        let (mut g_hi, mut y_hi) = self.gauge_subgradient(&crate::linalg::axpy(x, hi, d))?;
        let mut last_t = f64::NAN;
        for _ in 0..500 {
            if (g_hi - 1.0).abs() <= CHORD_TOL {
                return Ok(hi);
            }
            let slope = dot(&y_hi, d);
            let mut t = if slope > 0.0 {
                hi - (g_hi - 1.0) / slope
            } else {
                f64::NAN
            };
            if !(t > lo && t < hi) || t == last_t {
                // secant on the convex bracket lands inside; bisect if degenerate
                let sec = lo + (1.0 - g_lo) * (hi - lo) / (g_hi - g_lo);
                t = if sec > lo && sec < hi && last_t != sec {
                    sec
                } else {
                    0.5 * (lo + hi)
                };
            }
            last_t = t;
            let (g, y) = self.gauge_subgradient(&crate::linalg::axpy(x, t, d))?;
            if (g - 1.0).abs() <= CHORD_TOL {
                return Ok(t);
            }
            if g > 1.0 {
                hi = t;
                g_hi = g;
                y_hi = y;
            } else {
                lo = t;
                g_lo = g;
            }
            if hi - lo <= 1e-15 * hi {
                return Ok(hi);
            }
        }
        Ok(hi)
    }

    /// Chord `(t_lo, t_hi)` of the line `x + t·d` through interior `x`.
    pub fn chord_interval(&self, x: &[f64], d: &[f64]) -> Result<(f64, f64)> {
        self.check_dim(x)?;
        self.check_dim(d)?;
        if norm2(d) == 0.0 {
            return Err(Error::InvalidArgument("chord direction is zero".into()));
        }
        let g0 = self.gauge(x)?;
        if g0 >= 1.0 - 1e-12 {
            return Err(Error::NotInterior { gauge: g0 });
        }
        self.chord_unchecked(x, d, g0)
    }

    fn chord_unchecked(&self, x: &[f64], d: &[f64], g0: f64) -> Result<(f64, f64)> {
        match self {
            Body::LpBall { p, .. } if *p == 2.0 => Ok(sphere_chord(x, d, 1.0)),
            Body::LpBall { p, .. } if p.is_infinite() => {
                Ok(slab_chord(x.iter().copied().zip(d.iter().copied())))
            }
            Body::PolarPolytope { generators } => Ok(slab_chord(
                generators.iter().map(|v| (dot(v, x), dot(v, d))),
            )),
            Body::VPolytope { generators } => {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                Ok((
                    -polytope_ray_exit(generators, x, &neg)?,
                    polytope_ray_exit(generators, x, d)?,
                ))
            }
            Body::LinearImage { base, map } => {
                let bx = map.apply_inverse(x)?;
                let bd = map.apply_inverse(d)?;
                base.chord_unchecked(&bx, &bd, g0)
            }
            Body::BallIntersection { base, radius } => {
                let (a, b) = base.chord_unchecked(x, d, base.gauge(x)?)?;
                let (c, e) = sphere_chord(x, d, *radius);
                Ok((a.max(c), b.min(e)))
            }
            _ => {
                let hi = self.ray_exit(x, d, g0)?;
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                let lo = self.ray_exit(x, &neg, g0)?;
                Ok((-lo, hi))
            }
        }
    }

    /// Finite list `{v_i}` with `B = absconv{v_i}`, when one is available
    /// without approximation.
    pub fn exact_generators(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Body::VPolytope { generators } => Some(generators.clone()),
            Body::LpBall { p, n } if *p == 1.0 => Some(
                (0..*n)
                    .map(|i| {
                        let mut e = vec![0.0; *n];
                        e[i] = 1.0;
                        e
                    })
                    .collect(),
            ),
            Body::LpBall { p, n } if p.is_infinite() && *n <= MAX_CUBE_CORNER_DIM => {
                Some(cube_corners(*n))
            }
            Body::LinearImage { base, map } => base
                .exact_generators()
                .map(|g| g.iter().map(|v| map.apply(v)).collect()),
            _ => None,
        }
    }

    /// Largest Euclidean norm of a point of `B`.
    pub fn outer_radius(&self) -> Result<Radius> {
        Ok(match self {
            Body::LpBall { p, n } => Radius::exact(lp_ball_outer(*p, *n)),
            Body::SchattenBall { p, d } => Radius::exact(lp_ball_outer(*p, *d)),
            Body::SymmetricGaugeBall { tau, d } => Radius::exact(tau.dual().sphere_max(*d)),
            Body::VPolytope { generators } => {
                Radius::exact(generators.iter().map(|v| norm2(v)).fold(0.0, f64::max))
            }
            Body::PolarPolytope { generators } => {
                let inner = Body::VPolytope {
                    generators: generators.clone(),
                }
                .inner_radius()?;
                Radius {
                    value: 1.0 / inner.value,
                    exact: inner.exact,
                }
            }
            Body::LinearImage { base, map } => {
                if let Some(gens) = self.exact_generators() {
                    Radius::exact(gens.iter().map(|v| norm2(v)).fold(0.0, f64::max))
                } else if is_euclidean_ball(base) {
                    Radius::exact(crate::linalg::singular_values(map.matrix())[0])
                } else {
                    Radius::approx(self.searched_outer_radius()?)
                }
            }
            Body::BallIntersection { base, radius } => {
                let r = base.outer_radius()?;
                if *radius <= r.value {
                    Radius::exact(*radius)
                } else {
                    r
                }
            }
        })
    }

    /// Largest `r` with `r·B₂ⁿ ⊆ B`.
    pub fn inner_radius(&self) -> Result<Radius> {
        Ok(match self {
            Body::LpBall { p, n } => Radius::exact(1.0 / lp_sphere_max(*p, *n)),
            Body::SchattenBall { p, d } => Radius::exact(1.0 / lp_sphere_max(*p, *d)),
            Body::SymmetricGaugeBall { tau, d } => Radius::exact(1.0 / tau.sphere_max(*d)),
            Body::PolarPolytope { generators } => Radius::exact(
                1.0 / generators.iter().map(|v| norm2(v)).fold(0.0, f64::max),
            ),
            Body::VPolytope { .. } => Radius::approx(self.searched_inner_radius()?),
            Body::LinearImage { base, map } => {
                if is_euclidean_ball(base) {
                    let s = crate::linalg::singular_values(map.matrix());
                    Radius::exact(s[s.len() - 1])
                } else if let Body::PolarPolytope { .. } = **base {
                    Body::image(map.clone(), (**base).clone())?.inner_radius()?
                } else {
                    Radius::approx(self.searched_inner_radius()?)
                }
            }
            Body::BallIntersection { base, radius } => {
                let r = base.inner_radius()?;
                if *radius <= r.value {
                    Radius::exact(*radius)
                } else {
                    r
                }
            }
        })
    }

    /// A radius `r` with `B ⊆ r·B₂ⁿ` guaranteed.
    pub fn outer_radius_upper_bound(&self) -> Result<f64> {
        match self {
            Body::PolarPolytope { generators } => Ok(1.0
                / Body::VPolytope {
                    generators: generators.clone(),
                }
                .inner_radius_lower_bound()?),
            Body::LinearImage { base, map } => {
                if self.exact_generators().is_some() || is_euclidean_ball(base) {
                    Ok(self.outer_radius()?.value)
                } else {
                    Ok(crate::linalg::singular_values(map.matrix())[0]
                        * base.outer_radius_upper_bound()?)
                }
            }
            Body::BallIntersection { base, radius } => {
                Ok(base.outer_radius_upper_bound()?.min(*radius))
            }
            _ => Ok(self.outer_radius()?.value),
        }
    }

    /// A radius `r` with `r·B₂ⁿ ⊆ B` guaranteed.
    pub fn inner_radius_lower_bound(&self) -> Result<f64> {
        match self {
            Body::VPolytope { generators } => {
                let n = self.dim();
                let basis = greedy_basis(generators, n);
                let m = Matrix::from_columns(&basis)?;
                let s = crate::linalg::singular_values(&m);
                Ok(s[n - 1] / (n as f64).sqrt())
            }
            Body::LinearImage { base, map } => {
                let r = self.inner_radius()?;
                if r.exact {
                    return Ok(r.value);
                }
                let s = crate::linalg::singular_values(map.matrix());
                Ok(s[s.len() - 1] * base.inner_radius_lower_bound()?)
            }
            Body::BallIntersection { base, radius } => {
                Ok(base.inner_radius_lower_bound()?.min(*radius))
            }
            _ => Ok(self.inner_radius()?.value),
        }
    }

    /// `1 / max_{|u|=1} gauge(u)` with the maximum found from `64·n` random
    /// directions, each polished by the monotone iteration `u ← y/|y|`,
    /// `y ∈ ∂gauge(u)`.
    fn searched_inner_radius(&self) -> Result<f64> {
        let n = self.dim();
        let mut rng = RngStream::new(0x1AAE_5EED, n as u64);
        let mut best = 0.0_f64;
        for _ in 0..64 * n {
            let mut u = rng.sphere(n);
            let mut val = self.gauge(&u)?;
            for _ in 0..50 {
                let (_, y) = self.gauge_subgradient(&u)?;
                let ny = norm2(&y);
                if ny == 0.0 {
                    break;
                }
                let un: Vec<f64> = y.iter().map(|v| v / ny).collect();
                let vn = self.gauge(&un)?;
                if vn <= val * (1.0 + 1e-14) {
                    break;
                }
                val = vn;
                u = un;
            }
            best = best.max(val);
        }
        Ok(1.0 / best)
    }

    /// Largest `|x|` found over `B` by support-point ascent of `x ↦ |x|`.
    fn searched_outer_radius(&self) -> Result<f64> {
        let n = self.dim();
        let mut rng = RngStream::new(0x0DE5_5EED, n as u64);
        let mut best = 0.0_f64;
        for _ in 0..64 * n {
            let u = rng.sphere(n);
            let (_, mut x) = self.support_with_point(&u)?;
            let mut val = norm2(&x);
            for _ in 0..50 {
                let (_, xn) = self.support_with_point(&x)?;
                let vn = norm2(&xn);
                if vn <= val * (1.0 + 1e-14) {
                    break;
                }
                val = vn;
                x = xn;
            }
            best = best.max(val);
        }
        Ok(best)
    }

    /// `x / gauge(x)`, the boundary point in direction `x`.
    pub fn radial_boundary_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.gauge(x)?;
        if g == 0.0 {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        Ok(x.iter().map(|v| v / g).collect())
    }

    /// True for `LpBall` with `p ∈ {1, ∞}`, `p = 2`, or diagonal images of
    /// `ℓp` balls: the unconditional variants.
    pub fn is_unconditional(&self) -> bool {
        match self {
            Body::LpBall { .. } => true,
            Body::LinearImage { base, map } => {
                matches!(**base, Body::LpBall { .. }) && is_diagonal(map.matrix())
            }
            _ => false,
        }
    }
}

fn is_diagonal(m: &Matrix) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)] == 0.0))
}

fn is_euclidean_ball(b: &Body) -> bool {
    matches!(b, Body::LpBall { p, .. } if *p == 2.0)
}

fn lp_sphere_max(p: f64, n: usize) -> f64 {
    SymmetricGaugeSpec::Lp { p }.sphere_max(n)
}

fn lp_ball_outer(p: f64, n: usize) -> f64 {
    lp_sphere_max(dual_exponent(p), n)
}

/// Corners of `B∞ⁿ` up to sign (first coordinate fixed to +1).
pub fn cube_corners(n: usize) -> Vec<Vec<f64>> {
    if n == 0 {
        return vec![];
    }
    (0..1usize << (n - 1))
        .map(|mask| {
            let mut v = vec![1.0; n];
            for (i, c) in v.iter_mut().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 1 {
                    *c = -1.0;
                }
            }
            v
        })
        .collect()
}

fn reshape(x: &[f64], d: usize) -> Matrix {
    Matrix::from_row_major(d, d, x.to_vec()).expect("length d²")
}

fn singular_values_of(x: &[f64], d: usize) -> Vec<f64> {
    crate::linalg::singular_values(&reshape(x, d))
}

/// Evaluates a unitary-invariant gauge `f ∘ s` and lifts the singular-value
/// subgradient back: `Y = U diag(∂f(s)) Vᵀ`.
fn matrix_gauge(
    x: &[f64],
    d: usize,
    f: impl Fn(&[f64]) -> (f64, Vec<f64>),
) -> (f64, Vec<f64>) {
    let dec = svd(&reshape(x, d));
    let (val, gs) = f(&dec.s);
    let mut y = vec![0.0; d * d];
    for (k, &g) in gs.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        for i in 0..d {
            let uik = dec.u[(i, k)] * g;
            if uik == 0.0 {
                continue;
            }
            for j in 0..d {
                y[i * d + j] += uik * dec.v[(j, k)];
            }
        }
    }
    (val, y)
}

/// Gauge of `absconv{v_i}` at `x` by the LP
/// `min Σ(a⁺ + a⁻)  s.t.  V(a⁺ − a⁻) = x, a± ≥ 0`;
/// the optimal dual is a subgradient.
fn polytope_gauge(generators: &[Vec<f64>], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = x.len();
    if x.iter().all(|v| *v == 0.0) {
        return Ok((0.0, vec![0.0; n]));
    }
    let m = generators.len();
    let mut a = Matrix::zeros(n, 2 * m);
    for (j, v) in generators.iter().enumerate() {
        for i in 0..n {
            a[(i, j)] = v[i];
            a[(i, m + j)] = -v[i];
        }
    }
    let c = vec![1.0; 2 * m];
    match solve_standard(&a, x, &c) {
        Ok(sol) => Ok((sol.objective, sol.dual)),
        Err(LpError::Infeasible) => Err(Error::RankDeficient { dim: n }),
        Err(LpError::Unbounded) => unreachable!("gauge LP has nonnegative costs"),
    }
}

/// Roots of `|x + t·d| = r`.
fn sphere_chord(x: &[f64], d: &[f64], r: f64) -> (f64, f64) {
    let a = dot(d, d);
    let b = dot(x, d);
    let c = dot(x, x) - r * r;
    let disc = (b * b - a * c).max(0.0).sqrt();
    // numerically stable pair of roots
    let q = if b >= 0.0 { -(b + disc) } else { -b + disc };
    let (t1, t2) = (q / a, c / q);
    (t1.min(t2), t1.max(t2))
}

/// Intersection over `i` of `{t : |a_i + t·b_i| ≤ 1}` for pairs `(a_i, b_i)`.
fn slab_chord(pairs: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (a, b) in pairs {
        if b > 0.0 {
            hi = hi.min((1.0 - a) / b);
            lo = lo.max((-1.0 - a) / b);
        } else if b < 0.0 {
            hi = hi.min((-1.0 - a) / b);
            lo = lo.max((1.0 - a) / b);
        }
    }
    (lo, hi)
}

/// `max t` with `x + t·d ∈ absconv{v_i}`, as the LP
/// `max t  s.t.  V(a⁺ − a⁻) − t·d = x, Σ(a⁺ + a⁻) + s = 1`.
fn polytope_ray_exit(generators: &[Vec<f64>], x: &[f64], d: &[f64]) -> Result<f64> {
    let n = x.len();
    let m = generators.len();
    let cols = 2 * m + 2;
    let mut a = Matrix::zeros(n + 1, cols);
    for (j, v) in generators.iter().enumerate() {
        for i in 0..n {
            a[(i, j)] = v[i];
            a[(i, m + j)] = -v[i];
        }
        a[(n, j)] = 1.0;
        a[(n, m + j)] = 1.0;
    }
    for i in 0..n {
        a[(i, 2 * m)] = -d[i];
    }
    a[(n, 2 * m + 1)] = 1.0;
    let mut b = x.to_vec();
    b.push(1.0);
    let mut c = vec![0.0; cols];
    c[2 * m] = -1.0;
    match solve_standard(&a, &b, &c) {
        Ok(sol) => Ok(sol.x[2 * m]),
        Err(LpError::Infeasible) => Err(Error::NotInterior {
            gauge: polytope_gauge(generators, x)?.0,
        }),
        Err(LpError::Unbounded) => Err(Error::RankDeficient { dim: n }),
    }
}

/// Numerical rank of a generator set by Gaussian elimination with full pivoting.
fn rank(generators: &[Vec<f64>], n: usize) -> usize {
    greedy_basis(generators, n).len()
}

/// Up to `n` generators chosen by pivoted Gram–Schmidt (largest residual first).
fn greedy_basis(generators: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let scale = generators.iter().map(|v| norm2(v)).fold(0.0, f64::max);
    let mut residuals: Vec<Vec<f64>> = generators.to_vec();
    let mut chosen = Vec::new();
    let mut used = vec![false; generators.len()];
    for _ in 0..n {
        let best = residuals
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, r)| (i, norm2(r)))
            .fold(None, |acc: Option<(usize, f64)>, x| match acc {
                Some(a) if a.1 >= x.1 => Some(a),
                _ => Some(x),
            });
        let Some((i, r)) = best else { break };
        if r <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        used[i] = true;
        chosen.push(generators[i].clone());
        let q: Vec<f64> = residuals[i].iter().map(|v| v / r).collect();
        for res in residuals.iter_mut() {
            let proj = dot(res, &q);
            for (a, b) in res.iter_mut().zip(&q) {
                *a -= proj * b;
            }
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn cross2() -> Body {
        Body::vpolytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn gauge_examples() {
        assert!(close(Body::linf(2).gauge(&[0.5, -0.5]).unwrap(), 0.5, 1e-15));
        assert!(close(cross2().gauge(&[0.5, 0.5]).unwrap(), 1.0, 1e-12));
        let s1 = Body::schatten(1.0, 2);
        assert!(close(s1.gauge(&[1.0, 0.0, 0.0, 1.0]).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn support_examples() {
        assert!(close(Body::l1(3).support(&[1.0, -2.0, 3.0]).unwrap(), 3.0, 1e-15));
        let seg = Body::VPolytope {
            generators: vec![vec![1.0, 1.0]],
        };
        assert!(close(seg.support(&[2.0, 0.0]).unwrap(), 2.0, 1e-15));
        let sinf = Body::schatten(f64::INFINITY, 2);
        assert!(close(sinf.support(&[1.0, 0.0, 0.0, 1.0]).unwrap(), 2.0, 1e-12));
        assert!(matches!(
            Body::ball_intersection(Body::l2(2), 0.5).unwrap().support(&[1.0, 0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn polar_examples() {
        assert_eq!(Body::l2(3).polar().unwrap(), Body::l2(3));
        assert_eq!(Body::l1(3).polar().unwrap(), Body::linf(3));
        let e = Body::image(LinearMap::diagonal(&[2.0, 1.0]).unwrap(), Body::l2(2)).unwrap();
        match e.polar().unwrap() {
            Body::LinearImage { base, map } => {
                assert_eq!(*base, Body::l2(2));
                assert!(map
                    .matrix()
                    .sub(&Matrix::from_diag(&[0.5, 1.0]))
                    .max_abs()
                    < 1e-15);
            }
            other => panic!("unexpected polar {other:?}"),
        }
        assert!(Body::ball_intersection(Body::l2(2), 1.0).unwrap().polar().is_err());
    }

    #[test]
    fn chord_examples() {
        let (a, b) = Body::l2(2).chord_interval(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(close(a, -1.0, 1e-10) && close(b, 1.0, 1e-10));
        let (a, b) = Body::linf(2).chord_interval(&[0.5, 0.0], &[1.0, 0.0]).unwrap();
        assert!(close(a, -1.5, 1e-10) && close(b, 0.5, 1e-10));
        let (a, b) = cross2().chord_interval(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(close(a, -0.5, 1e-10) && close(b, 0.5, 1e-10));
        assert!(matches!(
            Body::l2(2).chord_interval(&[1.0, 0.0], &[0.0, 1.0]),
            Err(Error::NotInterior { .. })
        ));
    }

    #[test]
    fn chord_endpoints_hit_the_boundary() {
        let mut rng = RngStream::new(8, 1);
        let bodies = vec![
            Body::lp(3.0, 4),
            Body::schatten(1.0, 2),
            Body::sym_gauge(SymmetricGaugeSpec::KyFan { k: 2 }, 2),
            Body::vpolytope((0..6).map(|_| rng.sphere(4)).collect()).unwrap(),
            Body::ball_intersection(Body::linf(4), 1.5).unwrap(),
            Body::vpolytope((0..6).map(|_| rng.sphere(4)).collect())
                .unwrap()
                .polar()
                .unwrap(),
        ];
        for b in &bodies {
            for _ in 0..20 {
                let u = rng.sphere(4);
                let x: Vec<f64> = b
                    .radial_boundary_point(&u)
                    .unwrap()
                    .iter()
                    .map(|v| v * 0.7 * rng.uniform())
                    .collect();
                let d = rng.sphere(4);
                let (lo, hi) = b.chord_interval(&x, &d).unwrap();
                assert!(lo < 0.0 && hi > 0.0);
                for t in [lo, hi] {
                    let g = b.gauge(&crate::linalg::axpy(&x, t, &d)).unwrap();
                    assert!((g - 1.0).abs() <= CHORD_TOL, "{b:?} residual {}", g - 1.0);
                }
            }
        }
    }

    #[test]
    fn radii_examples() {
        for n in [2, 5] {
            let r = Body::linf(n);
            assert!(close(r.inner_radius().unwrap().value, 1.0, 1e-15));
            assert!(close(r.outer_radius().unwrap().value, (n as f64).sqrt(), 1e-14));
            let r = Body::l1(n);
            assert!(close(r.inner_radius().unwrap().value, 1.0 / (n as f64).sqrt(), 1e-14));
            assert!(close(r.outer_radius().unwrap().value, 1.0, 1e-15));
        }
        let e = Body::image(LinearMap::diagonal(&[3.0, 1.0]).unwrap(), Body::l2(2)).unwrap();
        assert!(close(e.inner_radius().unwrap().value, 1.0, 1e-13));
        assert!(close(e.outer_radius().unwrap().value, 3.0, 1e-13));
    }

    #[test]
    fn vpolytope_radii_and_bounds() {
        let c = Body::vpolytope(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])
            .unwrap();
        let r = c.inner_radius().unwrap();
        assert!(!r.exact);
        assert!(close(r.value, 1.0 / 3f64.sqrt(), 1e-9));
        assert!(c.inner_radius_lower_bound().unwrap() <= r.value + 1e-12);
        let p = c.polar().unwrap();
        assert!(close(p.inner_radius().unwrap().value, 1.0, 1e-15));
        assert!(close(p.outer_radius().unwrap().value, 3f64.sqrt(), 1e-9));
    }

    #[test]
    fn rank_deficient_generators_rejected() {
        let r = Body::vpolytope(vec![vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(r, Err(Error::RankDeficient { dim: 2 })));
    }

    #[test]
    fn schatten_reshape_is_row_major() {
        // X = [[0, 2], [0, 0]] has singular values (2, 0); its transpose too,
        // but [[0,2],[0,0]] ≠ [[0,0],[2,0]] as vectors.
        let s = Body::schatten(f64::INFINITY, 2);
        let x = [0.0, 2.0, 0.0, 0.0];
        let (_, y) = s.gauge_subgradient(&x).unwrap();
        assert!(close(y[1], 1.0, 1e-12), "{y:?}");
        assert!(close(s.gauge(&x).unwrap(), 2.0, 1e-14));
        let m = reshape(&[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], 3.0);
    }

    #[test]
    fn json_roundtrip() {
        let bodies = vec![
            Body::lp(f64::INFINITY, 3),
            Body::lp(2.5, 2),
            Body::schatten(1.0, 2),
            Body::sym_gauge(SymmetricGaugeSpec::KyFan { k: 2 }, 3),
            Body::vpolytope(vec![vec![0.1, 0.7], vec![-0.3, 1e-17]]).unwrap(),
            Body::image(LinearMap::diagonal(&[2.0, 1.0 / 3.0]).unwrap(), Body::l2(2)).unwrap(),
            Body::ball_intersection(Body::l1(2), 0.6).unwrap(),
        ];
        for b in bodies {
            let s = b.to_json().unwrap();
            let back = Body::from_json(&s).unwrap();
            assert_eq!(back, b, "{s}");
        }
        let parsed =
            Body::from_json(r#"{"variant":"schatten","p":"inf","d":2}"#).unwrap();
        assert_eq!(parsed, Body::schatten(f64::INFINITY, 2));
        assert!(Body::from_json(r#"{"variant":"lp_ball","p":0.5,"n":2}"#).is_err());
        assert!(Body::from_json(r#"{"variant":"nope"}"#).is_err());
    }

    #[test]
    fn tau_u_values() {
        assert_eq!(SymmetricGaugeSpec::Lp { p: 1.0 }.tau_u(3), 3.0);
        assert_eq!(SymmetricGaugeSpec::Lp { p: f64::INFINITY }.tau_u(3), 1.0);
        assert_eq!(SymmetricGaugeSpec::KyFan { k: 2 }.tau_u(3), 2.0);
    }
}
