//! Reproducible random streams.
//!
//! A stream is identified by `(seed, stream_id)` and backed by ChaCha8, whose
//! native stream parameter gives independent substreams without any shared
//! state. Parallel trials each take their own `stream_id`, so results do not
//! depend on scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm2, Matrix};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A new stream under the same seed whose id is derived from this one and
    /// the given labels. Does not consume randomness from `self`.
    pub fn substream(&self, labels: &[u64]) -> RngStream {
        RngStream::new(self.seed, derive_stream_id(self.stream_id, labels))
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Uniform point on the unit sphere `S^{n-1}` (normalised Gaussian).
    pub fn sphere(&mut self, n: usize) -> Vec<f64> {
        loop {
            let g = self.gaussian_vector(n);
            let r = norm2(&g);
            if r > 1e-150 {
                return g.into_iter().map(|v| v / r).collect();
            }
        }
    }

    /// `n × n` matrix with i.i.d. standard normal entries.
    pub fn gaussian_matrix(&mut self, n: usize) -> Matrix {
        let data = (0..n * n).map(|_| self.normal()).collect();
        Matrix::from_row_major(n, n, data).expect("sizes agree")
    }

    /// Haar-distributed orthogonal matrix with determinant +1.
    pub fn rotation(&mut self, n: usize) -> Matrix {
        loop {
            let g = self.gaussian_matrix(n);
            if let Ok(mut q) = crate::linalg::orthonormalize(&g) {
                if crate::linalg::log_abs_det(&q).1 < 0 {
                    for i in 0..n {
                        q[(i, 0)] = -q[(i, 0)];
                    }
                }
                return q;
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic stream id for a (parent, labels...) path.
pub fn derive_stream_id(parent: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(parent), |acc, &l| splitmix64(acc ^ splitmix64(l)))
}

pub fn sample_gaussian_matrix(n: usize, rng: &mut RngStream) -> Matrix {
    rng.gaussian_matrix(n)
}

pub fn sample_gaussian_vector(n: usize, rng: &mut RngStream) -> Vec<f64> {
    rng.gaussian_vector(n)
}

pub fn sample_sphere(n: usize, rng: &mut RngStream) -> Vec<f64> {
    rng.sphere(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_reproduces() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let xa: Vec<f64> = (0..100).map(|_| a.normal()).collect();
        let xb: Vec<f64> = (0..100).map(|_| b.normal()).collect();
        assert_eq!(xa, xb);
        let mut c = RngStream::new(7, 4);
        let xc: Vec<f64> = (0..100).map(|_| c.normal()).collect();
        assert_ne!(xa, xc);
    }

    #[test]
    fn sphere_samples_have_unit_norm() {
        let mut r = RngStream::new(1, 0);
        for n in 1..8 {
            let s = r.sphere(n);
            assert!((norm2(&s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_vector_moments() {
        let mut r = RngStream::new(11, 0);
        let n_draws = 100_000;
        let mut mean = [0.0; 3];
        for _ in 0..n_draws {
            let g = r.gaussian_vector(3);
            for i in 0..3 {
                mean[i] += g[i] / n_draws as f64;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.02), "{mean:?}");

        let sq: f64 = (0..n_draws)
            .map(|_| r.gaussian_vector(5).iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            / n_draws as f64;
        assert!((sq - 5.0).abs() < 0.05, "{sq}");
    }

    #[test]
    fn rotations_are_orthogonal_with_unit_det() {
        let mut r = RngStream::new(5, 9);
        let q = r.rotation(4);
        let qtq = q.transpose().matmul(&q);
        assert!(qtq.sub(&Matrix::identity(4)).max_abs() < 1e-12);
        let (l, s) = crate::linalg::log_abs_det(&q);
        assert!(l.abs() < 1e-12 && s == 1);
    }
}
