//! Experiment drivers at the sizes of their documented examples.

use volratio::constructions::{gluskin_polytope, include_via_operator};
use volratio::experiments::{
    chevet_tail_experiment, producto_piola_check, BodyFamily, ChevetConfig, ProductoConfig,
};
use volratio::solver::SolverOptions;
use volratio::stats::median;
use volratio::volume::{log_lp_ball_volume, log_volume};
use volratio::{Body, LinearMap, RngStream};

#[test]
fn chevet_constant_is_moderate() {
    let r = chevet_tail_experiment(&ChevetConfig {
        l: BodyFamily::Lp(1.0),
        k: BodyFamily::Lp(f64::INFINITY),
        dims: vec![5, 10],
        trials: 2000,
        seed: 1,
        u_grid: vec![0.0, 1.0, 2.0],
        ell_samples: 20_000,
    })
    .unwrap();
    assert_eq!(r.rows.len(), 4000);
    assert!(r.rows.iter().all(|row| row.flag == "exact"));
    let c = r.get("c_fit").unwrap();
    assert!(c <= 5.0, "{c}");
    for n in [5, 10] {
        let q: Vec<f64> = [0, 1, 2].iter().map(|u| r.get(&format!("quantile_n{n}_u{u}")).unwrap()).collect();
        assert!(q[0] <= q[1] && q[1] <= q[2]);
    }
}

#[test]
fn cube_volume_ratio_times_isotropic_constant() {
    let solver = SolverOptions {
        restarts: 3,
        volume_samples: 500,
        ..Default::default()
    };
    let ball = producto_piola_check(&ProductoConfig {
        zoo: vec![BodyFamily::Lp(2.0)],
        dims: vec![4],
        seed: 2,
        samples: 0,
        solver,
    })
    .unwrap();
    let v = ball.get("b2_n4").unwrap();
    assert!(v <= 2.0, "{v}");

    let zoo = producto_piola_check(&ProductoConfig {
        zoo: vec![BodyFamily::Lp(1.0), BodyFamily::Lp(2.0), BodyFamily::Lp(f64::INFINITY), BodyFamily::Lp(3.0)],
        dims: vec![3, 4, 5, 6],
        seed: 3,
        samples: 0,
        solver,
    })
    .unwrap();
    let worst = zoo.get("max_product").unwrap();
    assert!(worst <= 3.0, "{worst}");
    // vr(B∞, B∞) = 1, so the product is L_{B₁ⁿ}/√n
    for n in 3..=6 {
        let v = zoo.get(&format!("binf_n{n}")).unwrap();
        assert!(v <= 2.0 / (n as f64).sqrt(), "{n}: {v}");
    }
}

#[test]
fn gluskin_volume_radius_is_of_order_sqrt_log_over_n() {
    // |L|^{1/n} ≤ C·√log(m/n)/n. L contains B₁ⁿ, whose radius already needs C ≥ 2.4
    // at these sizes, so C is checked against a fitted window.
    for (n, trials) in [(4, 50), (6, 15)] {
        let m = 6 * n;
        let roots: Vec<f64> = (0..trials)
            .map(|seed| {
                let mut rng = RngStream::new(seed, 0);
                let l = gluskin_polytope(n, m, &mut rng).unwrap();
                log_volume(&l, 400, &mut rng).unwrap().nth_root()
            })
            .collect();
        let scale = ((m as f64 / n as f64).ln()).sqrt() / n as f64;
        let floor = (log_lp_ball_volume(1.0, n) / n as f64).exp();
        let med = median(&roots);
        assert!(med >= floor, "{n}: {med} below the cross-polytope {floor}");
        assert!(med <= 6.0 * scale, "{n}: C = {}", med / scale);
    }
}

#[test]
fn gaussian_map_of_gluskin_polytope_fits_in_cube() {
    let mut rng = RngStream::new(4, 0);
    let l = gluskin_polytope(4, 8, &mut rng).unwrap();
    let k = Body::linf(4);
    let t = LinearMap::new(rng.gaussian_matrix(4)).unwrap();
    let inside = include_via_operator(&t, &l, &k).unwrap();
    let gens = inside.exact_generators().unwrap();
    assert_eq!(gens.len(), 12);
    let worst = gens.iter().map(|v| k.gauge(v).unwrap()).fold(0.0, f64::max);
    assert!(worst <= 1.0 + 1e-9 && worst >= 1.0 - 1e-9, "{worst}");
}
