//! Linear maps between body-normed spaces: operator norms, SL normalisation,
//! and the Gaussian ℓ-norm / mean-width estimators.

use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::linalg::{log_abs_det, norm2, Matrix};
use crate::rng::RngStream;
use crate::stats::MeanEstimate;

/// Square invertible-or-not matrix with its log-determinant cached.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LinearMap {
    matrix: Matrix,
    inverse: Option<Matrix>,
    log_abs_det: f64,
    det_sign: i8,
}

impl PartialEq for LinearMap {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl LinearMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let (log_abs_det, det_sign) = log_abs_det(&matrix);
        let inverse = if det_sign != 0 {
            Some(matrix.inverse()?)
        } else {
            None
        };
        Ok(LinearMap {
            matrix,
            inverse,
            log_abs_det,
            det_sign,
        })
    }

    pub fn identity(n: usize) -> Self {
        LinearMap::new(Matrix::identity(n)).expect("identity is valid")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        LinearMap::new(Matrix::from_diag(d))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    pub fn det_sign(&self) -> i8 {
        self.det_sign
    }

    pub fn is_invertible(&self) -> bool {
        self.det_sign != 0
    }

    pub fn inverse_matrix(&self) -> Result<&Matrix> {
        self.inverse.as_ref().ok_or(Error::Singular)
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        LinearMap::new(self.inverse_matrix()?.clone())
    }

    /// `A⁻ᵀ`, the map that carries polars: `(A K)° = A⁻ᵀ K°`.
    pub fn inverse_transpose(&self) -> Result<LinearMap> {
        LinearMap::new(self.inverse_matrix()?.transpose())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.tr_mul_vec(x)
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.inverse_matrix()?.mul_vec(x))
    }

    /// `A⁻ᵀ y`
    pub fn apply_inverse_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        Ok(self.inverse_matrix()?.tr_mul_vec(y))
    }

    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        LinearMap::new(self.matrix.matmul(&inner.matrix))
    }

    pub fn scaled(&self, s: f64) -> Result<LinearMap> {
        LinearMap::new(self.matrix.scaled(s))
    }
}

impl TryFrom<Vec<Vec<f64>>> for LinearMap {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        LinearMap::new(Matrix::from_rows(&rows)?)
    }
}

impl From<LinearMap> for Vec<Vec<f64>> {
    fn from(m: LinearMap) -> Self {
        (0..m.matrix.rows()).map(|i| m.matrix.row(i).to_vec()).collect()
    }
}

/// Value of `‖T: X_L → X_K‖` with a flag telling whether it is exact or a
/// certified lower estimate found by local search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorNorm {
    pub value: f64,
    pub exact: bool,
}

const NORM_STARTS: usize = 32;
const NORM_POLISH_ITERS: usize = 200;

/// `‖T: X_L → X_K‖ = max_{x∈L} ‖Tx‖_K`.
///
/// Exact when `L` has a finite generator list (V-polytopes, `B₁ⁿ`, `B∞ⁿ` for
/// `n ≤ 12`, and linear images of these). Otherwise the maximum is searched
/// from 32 random boundary starts and the result is a lower estimate.
pub fn operator_norm(t: &LinearMap, l: &Body, k: &Body) -> Result<OperatorNorm> {
    let n = t.dim();
    for d in [l.dim(), k.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d,
            });
        }
    }
    if let Some(gens) = l.exact_generators() {
        let mut best = 0.0_f64;
        for v in &gens {
            best = best.max(k.gauge(&t.apply(v))?);
        }
        return Ok(OperatorNorm {
            value: best,
            exact: true,
        });
    }
    let mut rng = RngStream::new(0x0bad_5eed, n as u64);
    let mut best = 0.0_f64;
    for _ in 0..NORM_STARTS {
        let u = rng.sphere(n);
        let gl = l.gauge(&u)?;
        let x: Vec<f64> = u.iter().map(|v| v / gl).collect();
        best = best.max(polish_operator_norm(t, l, k, x)?);
    }
    Ok(OperatorNorm {
        value: best,
        exact: false,
    })
}

/// Alternating support-point ascent: `x ← argmax_{L} ⟨Tᵀ∂‖Tx‖_K, ·⟩`.
/// Monotone; falls back to coordinate perturbations when `L` has no
/// closed-form support point.
fn polish_operator_norm(t: &LinearMap, l: &Body, k: &Body, mut x: Vec<f64>) -> Result<f64> {
    let mut value = k.gauge(&t.apply(&x))?;
    if l.support_with_point(&x).is_ok() {
        for _ in 0..NORM_POLISH_ITERS {
            let (_, y) = k.gauge_subgradient(&t.apply(&x))?;
            let w = t.apply_transpose(&y);
            let (_, xn) = l.support_with_point(&w)?;
            let vn = k.gauge(&t.apply(&xn))?;
            if vn <= value * (1.0 + 1e-13) {
                if vn > value {
                    value = vn;
                }
                break;
            }
            value = vn;
            x = xn;
        }
        return Ok(value);
    }
    let n = x.len();
    let mut step = 0.25;
    while step > 1e-6 {
        let mut improved = false;
        for i in 0..n {
            for s in [-1.0, 1.0] {
                let mut u = x.clone();
                u[i] += s * step * norm2(&x).max(1e-12);
                let gl = l.gauge(&u)?;
                if gl <= 0.0 {
                    continue;
                }
                u.iter_mut().for_each(|v| *v /= gl);
                let vn = k.gauge(&t.apply(&u))?;
                if vn > value {
                    value = vn;
                    x = u;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(value)
}

/// `T / |det T|^{1/n}`, so that `|det| = 1`.
pub fn sl_normalize(t: &LinearMap) -> Result<LinearMap> {
    if !t.is_invertible() {
        return Err(Error::Singular);
    }
    let n = t.dim() as f64;
    t.scaled((-t.log_abs_det() / n).exp())
}

/// `ℓ(K) = E ‖g‖_K` for a standard Gaussian vector `g`.
pub fn ell_norm(k: &Body, samples: usize, rng: &mut RngStream) -> Result<MeanEstimate> {
    let n = k.dim();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let g = rng.gaussian_vector(n);
        values.push(k.gauge(&g)?);
    }
    Ok(MeanEstimate::from_samples(&values))
}

/// Mean width `w(K) = 2 E_θ h_K(θ)` over the uniform measure on the sphere.
pub fn mean_width(k: &Body, samples: usize, rng: &mut RngStream) -> Result<MeanEstimate> {
    let n = k.dim();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let theta = rng.sphere(n);
        values.push(2.0 * k.support(&theta)?);
    }
    Ok(MeanEstimate::from_samples(&values))
}

/// `‖id: ℓ₂ⁿ → X_K‖ = max_{|x|=1} ‖x‖_K = 1 / inner radius`.
pub fn euclidean_to_body_norm(k: &Body) -> Result<f64> {
    Ok(1.0 / k.inner_radius()?.value)
}

/// Certificate that `T(L)/‖T‖ ⊆ K` at the generators: the largest gauge value.
pub fn max_generator_gauge(t: &LinearMap, gens: &[Vec<f64>], k: &Body) -> Result<f64> {
    let mut best = 0.0_f64;
    for v in gens {
        best = best.max(k.gauge(&t.apply(v))?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn operator_norm_examples() {
        let id = LinearMap::identity(3);
        let r = operator_norm(&id, &Body::l1(3), &Body::l2(3)).unwrap();
        assert!(r.exact && close(r.value, 1.0, 1e-12));

        let t = LinearMap::diagonal(&[2.0, 1.0]).unwrap();
        let cross = Body::vpolytope(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let r = operator_norm(&t, &cross, &Body::linf(2)).unwrap();
        assert!(r.exact && close(r.value, 2.0, 1e-12));

        let id2 = LinearMap::identity(2);
        let r = operator_norm(&id2, &Body::l2(2), &Body::l1(2)).unwrap();
        assert!(!r.exact);
        assert!(close(r.value, 2f64.sqrt(), 1e-9), "{}", r.value);
    }

    #[test]
    fn operator_norm_dimension_mismatch() {
        let id = LinearMap::identity(2);
        assert!(matches!(
            operator_norm(&id, &Body::l1(3), &Body::l2(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sl_normalize_examples() {
        let t = sl_normalize(&LinearMap::diagonal(&[4.0, 1.0]).unwrap()).unwrap();
        assert!(t.matrix().sub(&Matrix::from_diag(&[2.0, 0.5])).max_abs() < 1e-14);
        let t = sl_normalize(&LinearMap::new(Matrix::identity(3).scaled(3.0)).unwrap()).unwrap();
        assert!(t.matrix().sub(&Matrix::identity(3)).max_abs() < 1e-14);
        let mut rng = RngStream::new(3, 0);
        let g = LinearMap::new(rng.gaussian_matrix(5)).unwrap();
        let t = sl_normalize(&g).unwrap();
        assert!((t.log_abs_det().exp() - 1.0).abs() < 1e-10);
        let sing = LinearMap::new(Matrix::zeros(2, 2)).unwrap();
        assert!(matches!(sl_normalize(&sing), Err(Error::Singular)));
    }

    #[test]
    fn ell_norm_examples() {
        let mut rng = RngStream::new(17, 0);
        let e = ell_norm(&Body::l2(2), 1_000_000, &mut rng).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!(close(e.mean, exact, 0.003), "{e:?}");

        let e = ell_norm(&Body::l1(4), 200_000, &mut rng).unwrap();
        let exact = 4.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((e.mean / exact - 1.0).abs() < 0.01, "{e:?}");

        let mut r1 = RngStream::new(5, 5);
        let mut r2 = RngStream::new(5, 5);
        let base = Body::lp(3.0, 3);
        let scaled = base.dilate(2.0).unwrap();
        let a = ell_norm(&base, 2000, &mut r1).unwrap();
        let b = ell_norm(&scaled, 2000, &mut r2).unwrap();
        assert!(close(b.mean, a.mean / 2.0, 1e-12));
    }

    #[test]
    fn mean_width_examples() {
        let mut rng = RngStream::new(2, 0);
        let w = mean_width(&Body::l2(4), 100, &mut rng).unwrap();
        assert!(close(w.mean, 2.0, 1e-12));
        let w = mean_width(&Body::l2(4).dilate(3.0).unwrap(), 100, &mut rng).unwrap();
        assert!(close(w.mean, 6.0, 1e-12));
    }

    #[test]
    fn ell_vs_mean_width_of_polar() {
        use statrs::function::gamma::ln_gamma;
        let n = 8;
        let mut rng = RngStream::new(23, 1);
        for k in [Body::l1(n), Body::l2(n), Body::linf(n)] {
            let ell = ell_norm(&k, 20_000, &mut rng).unwrap().mean;
            let w = mean_width(&k.polar().unwrap(), 20_000, &mut rng).unwrap().mean;
            // mean width carries a factor 2; E|g| = √2 Γ((n+1)/2) / Γ(n/2)
            let e_norm = (2f64.sqrt()
                * (ln_gamma((n as f64 + 1.0) / 2.0) - ln_gamma(n as f64 / 2.0)).exp())
                / (n as f64).sqrt();
            let ratio = ell / ((n as f64).sqrt() * w / 2.0);
            assert!((0.5..=1.5).contains(&ratio), "{ratio}");
            assert!((ratio - e_norm).abs() < 0.02 * e_norm, "{ratio} vs {e_norm}");
        }
    }

    #[test]
    fn rescaled_map_has_unit_norm_and_includes() {
        let mut rng = RngStream::new(9, 2);
        let t = LinearMap::new(rng.gaussian_matrix(4)).unwrap();
        let l = crate::constructions::gluskin_polytope(4, 8, &mut rng).unwrap();
        let k = Body::linf(4);
        let nrm = operator_norm(&t, &l, &k).unwrap();
        let s = t.scaled(1.0 / nrm.value).unwrap();
        let again = operator_norm(&s, &l, &k).unwrap();
        assert!(close(again.value, 1.0, 1e-9));
        for v in l.exact_generators().unwrap() {
            assert!(k.contains(&s.apply(&v)).unwrap());
        }
    }

    #[test]
    fn inexact_norm_never_exceeds_exact() {
        let mut rng = RngStream::new(4, 4);
        let l = crate::constructions::gluskin_polytope(3, 5, &mut rng).unwrap();
        let as_polar_of_polar = l.polar().unwrap().polar().unwrap();
        let k = Body::l2(3);
        for _ in 0..5 {
            let t = LinearMap::new(rng.gaussian_matrix(3)).unwrap();
            let exact = operator_norm(&t, &l, &k).unwrap();
            assert!(exact.exact);
            let searched = operator_norm(&t, &Body::BallIntersection {
                base: Box::new(as_polar_of_polar.clone()),
                radius: 10.0,
            }, &k)
            .unwrap();
            assert!(!searched.exact);
            assert!(searched.value <= exact.value * (1.0 + 1e-9));
        }
    }
}
