//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0` for the tiny programs that arise as
//! polytope gauges. Bland's rule is slow in theory but deterministic and
//! cycle-free, and the instances here have at most a few hundred columns.

use crate::linalg::Matrix;

const EPS: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub enum LpError {
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Optimal dual vector `y` (one entry per equality row): `Aᵀy ≤ c`, `bᵀy = cᵀx`.
    pub dual: Vec<f64>,
}

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64], allowed: usize) -> Vec<f64> {
        (0..allowed)
            .map(|j| {
                cost[j]
                    - (0..self.m)
                        .map(|i| cost[self.basis[i]] * self.at(i, j))
                        .sum::<f64>()
            })
            .collect()
    }

    /// Runs simplex iterations over columns `0..allowed` with the given costs.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<(), LpError> {
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let rc = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| rc[j] < -EPS && !self.basis.contains(&j))
            else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, enter);
                if a > EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || ((ratio - lr).abs() <= 1e-14 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, enter);
        }
        Ok(())
    }
}

/// Solves `min cᵀx` subject to `A x = b`, `x ≥ 0`.
pub fn solve_standard(a: &Matrix, b: &[f64], c: &[f64]) -> Result<LpSolution, LpError> {
    let m = a.rows();
    let k = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), k);
    let width = k + m + 1;
    let mut t = vec![0.0; m * width];
    let mut flips = vec![1.0; m];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        flips[i] = s;
        for j in 0..k {
            t[i * width + j] = s * a[(i, j)];
        }
        t[i * width + k + i] = 1.0;
        t[i * width + width - 1] = s * b[i];
    }
    let mut tab = Tableau {
        m,
        width,
        t,
        basis: (k..k + m).collect(),
    };

    // Phase 1: minimise the sum of artificials.
    let mut phase1 = vec![0.0; k + m];
    phase1[k..].iter_mut().for_each(|v| *v = 1.0);
    tab.optimize(&phase1, k + m)?;
    let infeas: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= k)
        .map(|i| tab.rhs(i))
        .sum();
    let bscale = b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    if infeas > 1e-9 * bscale {
        return Err(LpError::Infeasible);
    }
    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= k {
            if let Some(j) = (0..k).find(|&j| tab.at(i, j).abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase 2: artificials may not re-enter.
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat(0.0).take(m));
    tab.optimize(&cost, k)?;

    let mut x = vec![0.0; k];
    for i in 0..m {
        if tab.basis[i] < k {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    // y' = c_Bᵀ B⁻¹, with B⁻¹ stored in the artificial block.
    let dual = (0..m)
        .map(|r| {
            let yr: f64 = (0..m).map(|i| cost[tab.basis[i]] * tab.at(i, k + r)).sum();
            yr * flips[r]
        })
        .collect();
    Ok(LpSolution { x, objective, dual })
}
