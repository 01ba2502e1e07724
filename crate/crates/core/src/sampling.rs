//! Uniform sampling inside convex bodies.
//!
//! The default sampler is hit-and-run started at the origin. For small
//! dimensions a rejection sampler from the bounding ball gives independent
//! draws and serves as the reference.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::linalg::{norm2, Matrix};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    pub burn_in: usize,
    pub thinning: usize,
}

impl ChainParams {
    /// Burn-in `10n²` steps, one kept point every `n` steps.
    pub fn standard(n: usize) -> Self {
        ChainParams {
            burn_in: 10 * n * n,
            thinning: n.max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    HitAndRun,
    Rejection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleBatch {
    pub points: Vec<Vec<f64>>,
    pub body: Body,
    pub sampler: SamplerKind,
    pub chain: Option<ChainParams>,
    pub seed: u64,
    pub stream_id: u64,
    /// Proposals drawn by the rejection sampler (zero for hit-and-run).
    pub proposals: usize,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// Second-moment matrix `(1/N) Σ x xᵀ` (the bodies are centred at 0).
    pub fn second_moments(&self) -> Matrix {
        second_moments(&self.points, self.dim())
    }

    /// One point per row, columns `x0 … x{n-1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record((0..self.dim()).map(|i| format!("x{i}")))?;
        for p in &self.points {
            w.write_record(p.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn second_moments(points: &[Vec<f64>], n: usize) -> Matrix {
    let mut c = Matrix::zeros(n, n);
    for p in points {
        for i in 0..n {
            for j in i..n {
                c[(i, j)] += p[i] * p[j];
            }
        }
    }
    let inv = 1.0 / points.len().max(1) as f64;
    for i in 0..n {
        for j in i..n {
            let v = c[(i, j)] * inv;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    c
}

/// `count` hit-and-run points using the standard chain parameters.
pub fn uniform_samples(b: &Body, count: usize, rng: &mut RngStream) -> Result<SampleBatch> {
    let chain = ChainParams::standard(b.dim());
    let points = hit_and_run(b, count, chain, None, rng)?;
    Ok(SampleBatch {
        points,
        body: b.clone(),
        sampler: SamplerKind::HitAndRun,
        chain: Some(chain),
        seed: rng.seed(),
        stream_id: rng.stream_id(),
        proposals: 0,
    })
}

/// Hit-and-run chain: random direction, uniform point on the chord.
pub fn hit_and_run(
    b: &Body,
    count: usize,
    chain: ChainParams,
    start: Option<Vec<f64>>,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    let n = b.dim();
    let mut x = start.unwrap_or_else(|| vec![0.0; n]);
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let mut out = Vec::with_capacity(count);
    let total = chain.burn_in + count * chain.thinning;
    for step in 1..=total {
        hit_and_run_step(b, &mut x, rng)?;
        if step > chain.burn_in && (step - chain.burn_in) % chain.thinning == 0 {
            out.push(x.clone());
        }
    }
    Ok(out)
}

fn hit_and_run_step(b: &Body, x: &mut [f64], rng: &mut RngStream) -> Result<()> {
    let d = rng.sphere(x.len());
    let (lo, hi) = loop {
        match b.chord_interval(x, &d) {
            Ok(c) => break c,
            // a point that drifted onto the boundary is pulled inwards
            Err(Error::NotInterior { .. }) => x.iter_mut().for_each(|v| *v *= 1.0 - 1e-9),
            Err(e) => return Err(e),
        }
    };
    let t = lo + rng.uniform() * (hi - lo);
    for (xi, di) in x.iter_mut().zip(&d) {
        *xi += t * di;
    }
    Ok(())
}

/// Independent uniform points by rejection from the ball of radius
/// `outer_radius_upper_bound(B)`.
pub fn rejection_samples(b: &Body, count: usize, rng: &mut RngStream) -> Result<SampleBatch> {
    let n = b.dim();
    let r = b.outer_radius_upper_bound()?;
    let mut points = Vec::with_capacity(count);
    let mut proposals = 0usize;
    let max_proposals = count.saturating_mul(1_000_000).max(1_000_000);
    while points.len() < count {
        if proposals >= max_proposals {
            return Err(Error::DegenerateAcceptance {
                hits: points.len(),
                needed: count,
            });
        }
        proposals += 1;
        let x = ball_point(n, r, rng);
        if b.contains(&x)? {
            points.push(x);
        }
    }
    Ok(SampleBatch {
        points,
        body: b.clone(),
        sampler: SamplerKind::Rejection,
        chain: None,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
        proposals,
    })
}

/// Uniform point of `r·B₂ⁿ`.
pub fn ball_point(n: usize, r: f64, rng: &mut RngStream) -> Vec<f64> {
    let u = rng.sphere(n);
    let rad = r * rng.uniform().powf(1.0 / n as f64);
    u.into_iter().map(|v| v * rad).collect()
}

/// Relative Frobenius distance `‖C − target‖ / ‖target‖`.
pub fn relative_deviation(c: &Matrix, target: &Matrix) -> f64 {
    c.sub(target).frobenius_norm() / target.frobenius_norm()
}

/// Largest Euclidean norm in a batch (diagnostic).
pub fn max_norm(points: &[Vec<f64>]) -> f64 {
    points.iter().map(|p| norm2(p)).fold(0.0, f64::max)
}
