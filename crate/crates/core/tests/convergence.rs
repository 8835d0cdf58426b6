mod common;

use std::f64::consts::PI;

use common::*;
use dfn_osm_core::convergence::max_over_modes;
use dfn_osm_core::{
    f_symbols, optimal_params_1d, optimize_equioscillation, rho_1d, rho_2d, rho_tilde,
    TwoFractureGeometry,
};

fn fig() -> TwoFractureGeometry {
    TwoFractureGeometry::new(L, G1, G2, 1.0, 1.0).unwrap()
}

#[test]
fn first_symbol_against_precise_coth() {
    let (f1, f2) = f_symbols(1.0, &fig()).unwrap();
    let expected1 = PI * (precise_coth(0.2 * PI) + precise_coth(0.8 * PI));
    let expected2 = PI * (precise_coth(0.6 * PI) + precise_coth(0.4 * PI));
    assert!((f1 - expected1).abs() <= 4.0 * f64::EPSILON * expected1);
    assert!((f2 - expected2).abs() <= 4.0 * f64::EPSILON * expected2);
}

#[test]
fn symbols_small_mode_series() {
    let g = fig();
    let k = 1e-4;
    let x = |t: f64| k * PI * t;
    // coth(x) ~ 1/x + x/3
    let series = |t: f64| k * PI * (1.0 / x(t) + x(t) / 3.0);
    let f1_series = series(G1) + series(L - G1);
    let (f1, _) = f_symbols(k, &g).unwrap();
    assert!((f1 - f1_series).abs() < 1e-10 * f1_series);
    let (s_minus, _) = optimal_params_1d(&g);
    assert!((f1 - s_minus).abs() < 1e-4 * s_minus);
}

#[test]
fn rho_tilde_converges_monotonically_at_zero() {
    let g = fig();
    for p in [1.0, 10.0, 50.0] {
        let at_zero = rho_tilde(0.0, p, &g).unwrap();
        let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|k| (rho_tilde(*k, p, &g).unwrap() - at_zero).abs())
            .collect();
        assert!(gaps[0] >= gaps[1] && gaps[1] >= gaps[2], "{gaps:?}");
        assert!(gaps[2] < 1e-3);
    }
}

#[test]
fn rho_2d_bounded_on_log_grid() {
    let g = fig();
    let logspace = |a: f64, b: f64, n: usize| {
        (0..n).map(move |i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
    };
    for k in logspace(0.1, 300.0, 60) {
        for p in logspace(0.1, 100.0, 60) {
            let r = rho_2d(k, p, p, &g).unwrap();
            assert!(r.abs() < 1.0, "k={k} p={p}: {r}");
        }
    }
}

#[test]
fn equioscillation_agrees_with_grid_search() {
    let g = fig();
    let res = optimize_equioscillation(&g, 100.0).unwrap();
    assert!(res.equioscillation_residual <= 1e-10);
    let (p_grid, value_grid) = minmax_grid_search(L, G1, G2, 100.0, 2000, 2000, 2);
    assert!((res.value - value_grid).abs() <= 1e-6, "{} vs {}", res.value, value_grid);
    assert!((res.p_star - p_grid).abs() <= 5e-4 * res.p_star, "{} vs {}", res.p_star, p_grid);
}

#[test]
fn equioscillation_is_optimal_among_neighbours() {
    let g = fig();
    let res = optimize_equioscillation(&g, 100.0).unwrap();
    for scale in [0.5, 0.9, 1.1, 2.0] {
        let other = max_over_modes(scale * res.p_star, 100.0, &g);
        assert!(other >= res.value - 1e-10, "scale {scale}");
    }
}

#[test]
fn equioscillation_with_tiny_range() {
    let res = optimize_equioscillation(&fig(), 1e-3).unwrap();
    assert!(res.equioscillation_residual <= 1e-10);
}

#[test]
fn heterogeneous_diffusivities_still_nilpotent() {
    let g = TwoFractureGeometry::new(2.0, 0.5, 1.5, 0.3, 4.0).unwrap();
    let (sm, sp) = optimal_params_1d(&g);
    assert!(rho_1d(sm, sp, &g).abs() < 1e-12);
    let (f1, f2) = f_symbols(2.5, &g).unwrap();
    assert!(rho_2d(2.5, f1, f2, &g).unwrap().abs() < 1e-12);
    let res = optimize_equioscillation(&g, 60.0).unwrap();
    assert!(res.equioscillation_residual <= 1e-10);
}
