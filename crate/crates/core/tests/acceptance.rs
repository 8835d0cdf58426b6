//! Acceptance checks, one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::*;
use dfn_osm_core::solver::{BoundaryData, Discretization, InitialGuess, OsmOptions};
use dfn_osm_core::{
    assemble_1d, assemble_dirichlet_1d, assemble_mode_2d, inf_norm, monolithic_solve,
    observed_vs_predicted, optimal_params_1d, optimize_equioscillation, osm_iterate, rho_1d, rho_2d,
    spectral_radius, symmetric_norm_bound, BoundaryKind, Network, RobinParams, SourceTerm,
    TwoFractureGeometry,
};
use nalgebra::DMatrix;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rho(t: &DMatrix<f64>) -> f64 {
    spectral_radius(t).unwrap().rho
}

fn rho_1d_operator(n: usize, bc: BoundaryKind, rp: &RobinParams) -> f64 {
    rho(&assemble_1d(&fig_net(n, bc), rp).unwrap().iteration_matrix().unwrap())
}

fn radius_sweep(bc: BoundaryKind, p: f64) -> Vec<f64> {
    (2..=200usize)
        .into_par_iter()
        .map(|n| rho_1d_operator(n, bc, &RobinParams::Uniform(p)))
        .collect()
}

fn fig_geometry() -> TwoFractureGeometry {
    TwoFractureGeometry::new(L, G1, G2, 1.0, 1.0).unwrap()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn argmin(xs: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let values: Vec<f64> = xs.par_iter().map(|x| f(*x)).collect();
    let i = (0..xs.len()).min_by(|a, b| values[*a].total_cmp(&values[*b])).unwrap();
    xs[i]
}

fn nearest_relative_gap(x: f64, targets: &[f64]) -> (f64, f64) {
    targets
        .iter()
        .map(|t| (*t, (x - t).abs() / t))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

fn criterion_1() -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut failures = Vec::new();
    for n in [2usize, 5, 20, 100] {
        let net = Network::uniform(n, 1.0, 0.4, 0.6, 1.0, BoundaryKind::DirichletEverywhere).unwrap();
        for p in [0.1, 1.0, 10.0, 100.0] {
            let pair = assemble_dirichlet_1d(&net, &RobinParams::Uniform(p)).unwrap();
            let norm = inf_norm(&pair.right_product().unwrap());
            let bound = symmetric_norm_bound(1.0, 0.6, p).unwrap();
            let r = rho(&pair.iteration_matrix().unwrap());
            let gap = (norm - bound).abs();
            worst_gap = worst_gap.max(gap);
            if gap > 1e-12 || r > bound {
                failures.push(format!("N={n} p={p}: norm={norm:.6} bound={bound:.6} rho={r:.6}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("max |norm - bound| = {worst_gap:.3e}; violations: {failures:?}"),
    )
}

fn criterion_2() -> Outcome {
    let radii = radius_sweep(BoundaryKind::DirichletEverywhere, 20.0);
    let sup = radii.iter().cloned().fold(0.0, f64::max);
    let plateau = (radii[198] - radii[98]).abs();
    outcome(
        sup <= 0.999 && plateau < 1e-3,
        format!("sup rho = {sup:.6}, |rho(200) - rho(100)| = {plateau:.3e}"),
    )
}

fn criterion_3() -> Outcome {
    let radii = radius_sweep(BoundaryKind::NeumannInterior, 20.0);
    let drops: Vec<usize> = radii
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0])
        .map(|(i, _)| i + 3)
        .collect();
    let (r10, r200) = (radii[8], radii[198]);
    outcome(
        drops.is_empty() && r200 > r10 && r200 > 0.95,
        format!("rho(10) = {r10:.6}, rho(200) = {r200:.6}, decreases at N = {drops:?}"),
    )
}

fn criterion_4() -> Outcome {
    let net = fig_net(2, BoundaryKind::DirichletEverywhere);
    let g = TwoFractureGeometry::from_network(&net);
    let (sm, sp) = optimal_params_1d(&g);
    let rp = RobinParams::PerTrace { s_minus: vec![sm], s_plus: vec![sp] };
    let t = assemble_1d(&net, &rp).unwrap().iteration_matrix().unwrap();
    let r = rho(&t);
    let t2 = (&t * &t).abs().max();
    let disc = Discretization::new(&net, 1.0 / 160.0).unwrap();
    let cmp = observed_vs_predicted(&net, &disc, &rp, 2024, 2).unwrap();
    let limit = 10.0 * disc.h().powi(2) * cmp.report.initial_error;
    let reached = cmp.report.error_history.iter().any(|e| *e <= limit);
    outcome(
        r < 1e-12 && t2 < 1e-12 && reached,
        format!(
            "rho(T) = {r:.3e}, max|T^2| = {t2:.3e}, OSM errors {:?} vs limit {limit:.3e}",
            cmp.report.error_history
        ),
    )
}

fn criterion_5() -> Outcome {
    let net = fig_net(10, BoundaryKind::DirichletEverywhere);
    let disc = Discretization::new(&net, 1.0 / 160.0).unwrap();
    let cmp = observed_vs_predicted(&net, &disc, &RobinParams::Uniform(20.0), 2024, 5000).unwrap();
    outcome(
        (0.95..=1.05).contains(&cmp.ratio),
        format!(
            "observed = {:.6}, predicted = {:.6}, ratio = {:.6} after {} iterations",
            cmp.observed, cmp.predicted, cmp.ratio, cmp.report.iterations
        ),
    )
}

fn criterion_6() -> Outcome {
    let g = fig_geometry();
    let scalar_gap = [1.0, 10.0, 50.0]
        .iter()
        .map(|p| (rho_2d(1e-3, *p, *p, &g).unwrap() - rho_1d(*p, *p, &g)).abs())
        .fold(0.0, f64::max);
    let rp = RobinParams::Uniform(20.0);
    let matrix_gap = [2usize, 10, 50]
        .iter()
        .map(|n| {
            let net = fig_net(*n, BoundaryKind::DirichletEverywhere);
            let mode = assemble_mode_2d(&net, &rp, 1e-3, BoundaryKind::DirichletEverywhere).unwrap();
            (rho(&mode.iteration_matrix().unwrap()) - rho_1d_operator(*n, BoundaryKind::DirichletEverywhere, &rp)).abs()
        })
        .fold(0.0, f64::max);
    outcome(
        scalar_gap < 1e-3 && matrix_gap < 1e-3,
        format!("two-fracture gap = {scalar_gap:.3e}, mode-matrix gap = {matrix_gap:.3e}"),
    )
}

fn criterion_7() -> Outcome {
    let k_max = L / (1.0 / 100.0);
    let res = optimize_equioscillation(&fig_geometry(), k_max).unwrap();
    let (p_grid, v_grid) = minmax_grid_search(L, G1, G2, k_max, 2000, 2000, 2);
    let value_gap = (res.value - v_grid).abs();
    let p_gap = (res.p_star - p_grid).abs() / res.p_star;
    outcome(
        res.equioscillation_residual <= 1e-10 && value_gap <= 1e-6 && p_gap <= 5e-4,
        format!(
            "p* = {:.8}, value = {:.10}, residual = {:.3e}; grid p* = {p_grid:.8}, value = {v_grid:.10}",
            res.p_star, res.value, res.equioscillation_residual
        ),
    )
}

fn criterion_8() -> Outcome {
    let g = fig_geometry();
    let net = fig_net(10, BoundaryKind::DirichletEverywhere);
    let p_1d = argmin(&logspace(0.1, 100.0, 4001), |p| {
        rho(&assemble_dirichlet_1d(&net, &RobinParams::Uniform(p)).unwrap().iteration_matrix().unwrap())
    });
    let (sm, sp) = optimal_params_1d(&g);
    let (t1, gap_1d) = nearest_relative_gap(p_1d, &[sm, sp]);

    let k_max = 100.0;
    let opt = optimize_equioscillation(&g, k_max).unwrap();
    let modes: Vec<f64> = (1..=100).map(f64::from).collect();
    let p_2d = argmin(&logspace(1.0, 400.0, 1201), |p| {
        let rp = RobinParams::Uniform(p);
        modes
            .iter()
            .map(|k| {
                rho(&assemble_mode_2d(&net, &rp, *k, BoundaryKind::DirichletEverywhere)
                    .unwrap()
                    .iteration_matrix()
                    .unwrap())
            })
            .fold(0.0, f64::max)
    });
    let (t2, gap_2d) = nearest_relative_gap(p_2d, &[opt.s_minus, opt.s_plus]);
    outcome(
        gap_1d <= 0.15 && gap_2d <= 0.15,
        format!(
            "1D argmin p = {p_1d:.4} vs {t1:.4} ({:.1}%); 2D argmin p = {p_2d:.3} vs {t2:.3} ({:.1}%)",
            100.0 * gap_1d,
            100.0 * gap_2d
        ),
    )
}

fn criterion_9() -> Outcome {
    let net = fig_net(4, BoundaryKind::DirichletEverywhere);
    let exact = Manufactured::new(&net, 2.5 * PI);
    let errors: Vec<f64> = [40.0, 80.0, 160.0]
        .iter()
        .map(|m| {
            let disc = Discretization::new(&net, 1.0 / m).unwrap();
            let sol = monolithic_solve(&net, &disc, &|j: usize, t: f64| exact.source(j, t), &exact.boundary_data(&net))
                .unwrap();
            exact.max_error(&sol, &disc)
        })
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    outcome(
        orders.iter().all(|o| (1.8..=2.2).contains(o)),
        format!(
            "errors = {:?}, orders = {:?}",
            errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            orders.iter().map(|o| format!("{o:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn iterations_to_tol(n: usize, bc: BoundaryKind, rp: &RobinParams, max_iter: usize) -> (usize, bool) {
    let net = fig_net(n, bc);
    let disc = Discretization::new(&net, 1.0 / 40.0).unwrap();
    let options = OsmOptions { tol: 1e-8, max_iter, initial: InitialGuess::Zero };
    let rep = osm_iterate(&net, &disc, rp, &SourceTerm::Constant(1.0), &BoundaryData::homogeneous(n), &options)
        .unwrap();
    (rep.iterations, rep.converged)
}

fn criterion_10() -> Outcome {
    let sizes = [5usize, 20, 80];
    let counts = |bc: BoundaryKind, rp: &(dyn Fn(usize) -> RobinParams + Sync), max_iter: usize| -> Vec<(usize, bool)> {
        sizes
            .par_iter()
            .map(|n| iterations_to_tol(*n, bc, &rp(*n), max_iter))
            .collect()
    };
    let uniform = |p: f64| move |_: usize| RobinParams::Uniform(p);
    let dir = counts(BoundaryKind::DirichletEverywhere, &uniform(20.0), 10_000);
    let neu = counts(BoundaryKind::NeumannInterior, &uniform(20.0), 2_000_000);
    let dir_n: Vec<usize> = dir.iter().map(|c| c.0).collect();
    let neu_n: Vec<usize> = neu.iter().map(|c| c.0).collect();
    let spread = dir_n.iter().max().unwrap() - dir_n.iter().min().unwrap();
    let all_converged = dir.iter().chain(&neu).all(|c| c.1);
    let increasing = neu_n.windows(2).all(|w| w[1] > w[0]);

    // Other parameter choices, reported for context only.
    let (sm, sp) = optimal_params_1d(&fig_geometry());
    let only_counts = |c: Vec<(usize, bool)>| c.into_iter().map(|c| c.0).collect::<Vec<_>>();
    let pair = only_counts(counts(BoundaryKind::DirichletEverywhere, &|n| RobinParams::repeated_pair(sm, sp, n - 1), 10_000));
    let lo = only_counts(counts(BoundaryKind::DirichletEverywhere, &uniform(sp), 10_000));
    let hi = only_counts(counts(BoundaryKind::DirichletEverywhere, &uniform(sm), 10_000));
    outcome(
        all_converged && spread <= 2 && increasing,
        format!(
            "p = 20, h = 1/40: Dirichlet {dir_n:?} (spread {spread}), Neumann {neu_n:?}; \
             Dirichlet with s = ({sm:.4}, {sp:.4}) per trace {pair:?}, p = {sp:.4} {lo:?}, p = {sm:.4} {hi:?}"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("symmetric-geometry norm bound", criterion_1),
        ("Dirichlet weak scalability", criterion_2),
        ("Neumann non-scalability", criterion_3),
        ("two-fracture nilpotency", criterion_4),
        ("matrix vs PDE rate", criterion_5),
        ("k -> 0 limit", criterion_6),
        ("equioscillation optimum", criterion_7),
        ("two-fracture prediction quality", criterion_8),
        ("monolithic solver order", criterion_9),
        ("end-to-end iteration counts", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{verdict}] {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
