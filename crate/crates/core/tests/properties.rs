//! Property tests for gauges, support functions, chords and the dense
//! linear algebra helpers.

use proptest::prelude::*;
use volratio::linalg::{dot, log_abs_det, norm2, singular_values, Matrix};
use volratio::volume::simplicial_log_volume;
use volratio::{Body, LinearMap, RngStream, SymmetricGaugeSpec};

const TOL: f64 = 1e-7;

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n).prop_filter("nonzero", |v| norm2(v) > 1e-3)
}

fn zoo(n: usize, seed: u64) -> Vec<Body> {
    let mut rng = RngStream::new(seed, 0);
    let mut out = vec![
        Body::l1(n),
        Body::l2(n),
        Body::linf(n),
        Body::lp(3.0, n),
        volratio::constructions::gluskin_polytope(n, n + 2, &mut rng).unwrap(),
    ];
    let a = LinearMap::new(rng.gaussian_matrix(n)).unwrap();
    out.push(Body::image(a, Body::lp(1.5, n)).unwrap());
    out
}

fn matrix_zoo(d: usize) -> Vec<Body> {
    vec![
        Body::schatten(1.0, d),
        Body::schatten(2.5, d),
        Body::schatten(f64::INFINITY, d),
        Body::sym_gauge(SymmetricGaugeSpec::KyFan { k: 2 }, d),
    ]
}

/// Gauge of `absconv{v_i}` by enumerating the vertices of its polar: every
/// choice of `n` independent generators and signs solving `⟨v_i, y⟩ = ±1`
/// that satisfies all constraints `|⟨v_j, y⟩| ≤ 1`.
fn brute_force_gauge(gens: &[Vec<f64>], x: &[f64]) -> f64 {
    let n = x.len();
    let m = gens.len();
    let mut best = 0.0_f64;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| gens[i].clone()).collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let lu = a.lu();
        if !lu.is_singular() {
            for signs in 0..(1u32 << n) {
                let b: Vec<f64> = (0..n)
                    .map(|k| if signs >> k & 1 == 1 { -1.0 } else { 1.0 })
                    .collect();
                let y = lu.solve(&b);
                if gens.iter().all(|v| dot(v, &y).abs() <= 1.0 + 1e-9) {
                    best = best.max(dot(x, &y));
                }
            }
        }
        // next combination of n indices out of m
        let mut k = n;
        while k > 0 && idx[k - 1] == m - n + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return best;
        }
        idx[k - 1] += 1;
        for j in k..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauge_is_positively_homogeneous(n in 2usize..5, seed in 0u64..1000, x in vec_strategy(4), lambda in 0.01..50.0f64) {
        let x = &x[..n];
        for b in zoo(n, seed) {
            let g = b.gauge(x).unwrap();
            let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
            let gl = b.gauge(&scaled).unwrap();
            prop_assert!((gl - lambda * g).abs() <= TOL * gl.max(1.0), "{b:?}: {gl} vs {}", lambda * g);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert!((b.gauge(&neg).unwrap() - g).abs() <= TOL * g.max(1.0));
        }
    }

    #[test]
    fn gauge_satisfies_triangle_inequality(n in 2usize..5, seed in 0u64..1000, x in vec_strategy(4), y in vec_strategy(4)) {
        let (x, y) = (&x[..n], &y[..n]);
        let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        for b in zoo(n, seed) {
            let lhs = b.gauge(&s).unwrap();
            let rhs = b.gauge(x).unwrap() + b.gauge(y).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + TOL) + TOL, "{b:?}");
        }
    }

    #[test]
    fn support_is_gauge_of_polar(n in 2usize..5, seed in 0u64..1000, y in vec_strategy(4)) {
        let y = &y[..n];
        for b in zoo(n, seed) {
            let h = b.support(y).unwrap();
            let g = b.polar().unwrap().gauge(y).unwrap();
            prop_assert!((h - g).abs() <= 1e-6 * h.max(1.0), "{b:?}: {h} vs {g}");
            // Hölder: ⟨x, y⟩ ≤ gauge_K(x)·h_K(y)
            let x = b.radial_boundary_point(y).unwrap();
            prop_assert!(dot(&x, y) <= h * (1.0 + TOL) + TOL);
        }
    }

    #[test]
    fn matrix_balls_duality(x in vec_strategy(9)) {
        for b in matrix_zoo(3) {
            let h = b.support(&x).unwrap();
            let g = b.polar().unwrap().gauge(&x).unwrap();
            prop_assert!((h - g).abs() <= 1e-6 * h.max(1.0), "{b:?}");
            let gl = b.gauge(&x.iter().map(|v| 2.0 * v).collect::<Vec<_>>()).unwrap();
            prop_assert!((gl - 2.0 * b.gauge(&x).unwrap()).abs() <= TOL * gl.max(1.0));
        }
    }

    #[test]
    fn lp_gauge_matches_vertex_enumeration(
        n in 2usize..4,
        gens in prop::collection::vec(vec_strategy(3), 1..6),
        x in vec_strategy(3),
    ) {
        let mut g: Vec<Vec<f64>> = gens.iter().map(|v| v[..n].to_vec()).collect();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            g.push(e);
        }
        prop_assume!(g.len() <= 8);
        let body = Body::vpolytope(g.clone()).unwrap();
        let lp = body.gauge(&x[..n]).unwrap();
        let brute = brute_force_gauge(&g, &x[..n]);
        prop_assert!((lp - brute).abs() <= 1e-7 * brute.max(1.0), "{lp} vs {brute}");
    }

    #[test]
    fn radii_sandwich_the_gauge(n in 2usize..5, seed in 0u64..1000, x in vec_strategy(4)) {
        let x = &x[..n];
        let r = norm2(x);
        for b in zoo(n, seed) {
            let g = b.gauge(x).unwrap();
            let inner = b.inner_radius_lower_bound().unwrap();
            let outer = b.outer_radius_upper_bound().unwrap();
            prop_assert!(r / outer <= g * (1.0 + TOL), "{b:?}");
            prop_assert!(g <= r / inner * (1.0 + TOL), "{b:?}");
        }
    }

    #[test]
    fn chord_endpoints_are_on_the_boundary(n in 2usize..5, seed in 0u64..1000, d in vec_strategy(4), s in 0.0..0.9f64) {
        let d = &d[..n];
        let mut rng = RngStream::new(seed, 1);
        for b in zoo(n, seed) {
            let dir = rng.sphere(n);
            let x: Vec<f64> = b.radial_boundary_point(&dir).unwrap().iter().map(|v| v * s).collect();
            let (lo, hi) = b.chord_interval(&x, d).unwrap();
            prop_assert!(lo < 0.0 && hi > 0.0);
            for t in [lo, hi] {
                let p: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + t * b).collect();
                prop_assert!((b.gauge(&p).unwrap() - 1.0).abs() <= 1e-8, "{b:?}");
            }
        }
    }

    #[test]
    fn log_det_of_product_is_additive(n in 1usize..6, seed in 0u64..1000) {
        let mut rng = RngStream::new(seed, 2);
        let a = rng.gaussian_matrix(n);
        let b = rng.gaussian_matrix(n);
        let (la, sa) = log_abs_det(&a);
        let (lb, sb) = log_abs_det(&b);
        let (lab, sab) = log_abs_det(&a.matmul(&b));
        prop_assert!((lab - la - lb).abs() < 1e-9 * (1.0 + lab.abs()));
        prop_assert_eq!(sab, sa * sb);
        let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
        prop_assert!((na.determinant().abs().ln() - la).abs() < 1e-9);
    }

    #[test]
    fn singular_values_match_reference_and_are_invariant(n in 1usize..6, seed in 0u64..1000) {
        let mut rng = RngStream::new(seed, 3);
        let a = rng.gaussian_matrix(n);
        let q = rng.rotation(n);
        let s = singular_values(&a);
        let sq = singular_values(&q.matmul(&a).matmul(&q.transpose()));
        let mut reference: Vec<f64> = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice())
            .singular_values()
            .iter()
            .copied()
            .collect();
        reference.sort_by(|x, y| y.total_cmp(x));
        for i in 0..n {
            prop_assert!((s[i] - reference[i]).abs() < 1e-9 * (1.0 + s[0]));
            prop_assert!((s[i] - sq[i]).abs() < 1e-9 * (1.0 + s[0]));
        }
    }

    #[test]
    fn polytope_volume_is_linearly_covariant(n in 2usize..5, extra in 1usize..6, seed in 0u64..1000) {
        let mut rng = RngStream::new(seed, 4);
        let gens: Vec<Vec<f64>> = (0..n + extra).map(|_| rng.sphere(n)).collect();
        let t = rng.gaussian_matrix(n);
        let mapped: Vec<Vec<f64>> = gens.iter().map(|v| t.mul_vec(v)).collect();
        let v = simplicial_log_volume(&gens).unwrap();
        let tv = simplicial_log_volume(&mapped).unwrap();
        prop_assert!((tv - v - log_abs_det(&t).0).abs() < 1e-9 * (1.0 + v.abs()));
        // an absolute convex hull contains the cross-polytope on any n of its generators
        let cross = simplicial_log_volume(&gens[..n]).unwrap();
        prop_assert!(v >= cross - 1e-12);
    }
}
