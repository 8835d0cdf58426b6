//! The experiment kinds: each produces tables (with an optional chart each)
//! and a summary for the metadata sidecar.

use std::collections::BTreeMap;

use dfn_osm_core::solver::{BoundaryData, Discretization, InitialGuess, OsmOptions};
use dfn_osm_core::{
    assemble_1d, assemble_mode_2d, max_mode_radius, observed_vs_predicted, optimal_params_1d,
    optimize_equioscillation, osm_iterate, rho_tilde, spectral_radius, BoundaryKind, ModeRange,
    Network, RobinParams, SpectrumReport,
};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{invalid, Result};
use crate::plot::{PlotSpec, MARKER_COLUMN};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SweepN,
    SweepP,
    SweepMode,
    Optimize,
    OsmValidate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SweepN => "sweep-n",
            ExperimentKind::SweepP => "sweep-p",
            ExperimentKind::SweepMode => "sweep-mode",
            ExperimentKind::Optimize => "optimize",
            ExperimentKind::OsmValidate => "osm-validate",
        }
    }

    fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

#[derive(Debug, Clone)]
pub struct NamedTable {
    /// File name without extension.
    pub stem: String,
    pub table: Table,
    pub plot: Option<PlotSpec>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub tables: Vec<NamedTable>,
    pub summary: BTreeMap<String, Value>,
}

impl ExperimentOutput {
    fn add(&mut self, stem: String, table: Table, plot: Option<PlotSpec>) {
        self.tables.push(NamedTable { stem, table, plot });
    }

    fn note(&mut self, key: &str, value: Value) {
        self.summary.insert(key.to_string(), value);
    }
}

pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    match kind {
        ExperimentKind::SweepN => sweep_n(cfg),
        ExperimentKind::SweepP => sweep_p(cfg),
        ExperimentKind::SweepMode => sweep_mode(cfg),
        ExperimentKind::Optimize => optimize(cfg),
        ExperimentKind::OsmValidate => osm_validate(cfg, seed),
    }
}

/// `M`, `N` and `T = M^{-1} N` of the configured 1D operator.
pub fn operator_matrices(cfg: &ExperimentConfig) -> Result<Vec<(&'static str, DMatrix<f64>)>> {
    let net = cfg.network(cfg.n_fractures)?;
    let pair = assemble_1d(&net, &cfg.robin_params(&net)?)?;
    let t = pair.iteration_matrix()?;
    Ok(vec![("M", pair.m().clone()), ("N", pair.n().clone()), ("T", t)])
}

fn radius_1d(net: &Network, rp: &RobinParams) -> Result<f64> {
    Ok(spectral_radius(&assemble_1d(net, rp)?.iteration_matrix()?)?.rho)
}

fn mode_range(cfg: &ExperimentConfig, bc: BoundaryKind) -> Result<ModeRange> {
    Ok(ModeRange::from_mesh(cfg.length, cfg.h, cfg.include_zero_for(bc))?)
}

fn mode_report(cfg: &ExperimentConfig, net: &Network, rp: &RobinParams, bc: BoundaryKind) -> Result<SpectrumReport> {
    Ok(max_mode_radius(net, rp, &mode_range(cfg, bc)?, bc)?)
}

fn sweep_n(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut columns = vec!["n", "rho_dirichlet", "rho_neumann"];
    if cfg.modes {
        columns.extend(["rho2d_dirichlet", "argmax_k_dirichlet", "rho2d_neumann", "argmax_k_neumann"]);
    }
    let rows: Vec<Vec<Cell>> = cfg
        .n_grid
        .par_iter()
        .map(|&n| -> Result<Vec<Cell>> {
            let base = cfg.network(n)?;
            let rp = cfg.robin_params(&base)?;
            let mut row: Vec<Cell> = vec![n.into()];
            let bcs = [BoundaryKind::DirichletEverywhere, BoundaryKind::NeumannInterior];
            for bc in bcs {
                row.push(radius_1d(&base.with_bc(bc), &rp)?.into());
            }
            if cfg.modes {
                for bc in bcs {
                    let rep = mode_report(cfg, &base.with_bc(bc), &rp, bc)?;
                    row.push(rep.rho.into());
                    row.push(rep.argmax_k.unwrap_or(f64::NAN).into());
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let column = |i: usize| -> Vec<f64> {
        rows.iter()
            .map(|r| match r[i] {
                Cell::Real(v) => v,
                _ => f64::NAN,
            })
            .collect()
    };
    let dirichlet = column(1);
    let neumann = column(2);
    let mut out = ExperimentOutput::default();
    out.note("sup_rho_dirichlet", json!(dirichlet.iter().cloned().fold(0.0, f64::max)));
    out.note(
        "neumann_nondecreasing",
        json!(neumann.windows(2).all(|w| w[1] >= w[0])),
    );
    if cfg.modes {
        out.note("sup_rho2d_dirichlet", json!(column(3).iter().cloned().fold(0.0, f64::max)));
    }
    let mut table = Table::new(&columns);
    for r in rows {
        table.push(r);
    }
    let ys: Vec<&str> = columns
        .iter()
        .copied()
        .filter(|c| c.starts_with("rho"))
        .collect();
    out.add(
        ExperimentKind::SweepN.stem(),
        table,
        Some(PlotSpec::new("Spectral radius against network size", "n", &ys, false, false)),
    );
    Ok(out)
}

fn argmin(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (*x, *y))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// The candidate closest to `x`, with its relative distance.
fn nearest(x: f64, candidates: &[f64]) -> (f64, f64) {
    candidates
        .iter()
        .map(|c| (*c, (x - c).abs() / c))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates are nonempty")
}

fn sweep_p(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let net = cfg.network(cfg.n_fractures)?;
    let bc = cfg.bc;
    let eval = |p: f64| -> Result<(f64, Option<f64>)> {
        let rp = RobinParams::Uniform(p);
        let one = radius_1d(&net, &rp)?;
        let two = if cfg.modes {
            Some(mode_report(cfg, &net, &rp, bc)?.rho)
        } else {
            None
        };
        Ok((one, two))
    };
    let values: Vec<(f64, Option<f64>)> = cfg.p_grid.par_iter().map(|p| eval(*p)).collect::<Result<_>>()?;

    let mut columns = vec!["p", "rho"];
    if cfg.modes {
        columns.push("rho_2d");
    }
    columns.push(MARKER_COLUMN);
    let mut table = Table::new(&columns);
    let row = |p: f64, v: (f64, Option<f64>), marker: &str| {
        let mut r: Vec<Cell> = vec![p.into(), v.0.into()];
        if let Some(two) = v.1 {
            r.push(two.into());
        }
        r.push(marker.into());
        r
    };
    for (p, v) in cfg.p_grid.iter().zip(&values) {
        table.push(row(*p, *v, ""));
    }

    let mut out = ExperimentOutput::default();
    out.note("n_fractures", json!(cfg.n_fractures));
    if cfg.p_grid.len() > 1 {
        let g = cfg.geometry()?;
        let (sm, sp) = optimal_params_1d(&g);
        let ones: Vec<f64> = values.iter().map(|v| v.0).collect();
        let (p_min, _) = argmin(&cfg.p_grid, &ones).expect("grid is nonempty");
        let (predicted, gap) = nearest(p_min, &[sm, sp]);
        out.note("argmin_p", json!(p_min));
        out.note("predicted_p", json!(predicted));
        out.note("relative_gap", json!(gap));
        let mut markers = vec![
            ("two_fracture_s_minus", sm),
            ("two_fracture_s_plus", sp),
            ("grid_argmin", p_min),
        ];
        if cfg.modes {
            let opt = optimize_equioscillation(&g, cfg.k_max())?;
            let twos: Vec<f64> = values.iter().map(|v| v.1.unwrap_or(f64::NAN)).collect();
            let (p2_min, _) = argmin(&cfg.p_grid, &twos).expect("grid is nonempty");
            let (predicted2, gap2) = nearest(p2_min, &[opt.s_minus, opt.s_plus]);
            out.note("argmin_p_2d", json!(p2_min));
            out.note("predicted_p_2d", json!(predicted2));
            out.note("relative_gap_2d", json!(gap2));
            markers.extend([
                ("equioscillation_s_minus", opt.s_minus),
                ("equioscillation_s_plus", opt.s_plus),
                ("grid_argmin_2d", p2_min),
            ]);
        }
        for (name, p) in markers {
            table.push(row(p, eval(p)?, name));
        }
    }
    let ys: Vec<&str> = if cfg.modes { vec!["rho", "rho_2d"] } else { vec!["rho"] };
    out.add(
        ExperimentKind::SweepP.stem(),
        table,
        Some(PlotSpec::new("Spectral radius against the Robin parameter", "p", &ys, true, false)),
    );
    Ok(out)
}

fn sweep_mode(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let net = cfg.network(cfg.n_fractures)?;
    let rp = cfg.robin_params(&net)?;
    let ks = match &cfg.k_grid {
        Some(k) => k.clone(),
        None => mode_range(cfg, cfg.bc)?.samples(),
    };
    let reports: Vec<SpectrumReport> = ks
        .par_iter()
        .map(|&k| -> Result<SpectrumReport> {
            let pair = if k == 0.0 {
                assemble_1d(&net, &rp)?
            } else {
                assemble_mode_2d(&net, &rp, k, cfg.bc)?
            };
            Ok(spectral_radius(&pair.iteration_matrix()?)?)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["k", "rho", "inf_norm"]);
    for (k, rep) in ks.iter().zip(&reports) {
        table.push(vec![(*k).into(), rep.rho.into(), rep.inf_norm.into()]);
    }
    let rhos: Vec<f64> = reports.iter().map(|r| r.rho).collect();
    let (k_arg, rho_max) = ks
        .iter()
        .zip(&rhos)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, r)| (*k, *r))
        .expect("grid is nonempty");
    let mut out = ExperimentOutput::default();
    out.note("max_rho", json!(rho_max));
    out.note("argmax_k", json!(k_arg));
    out.add(
        ExperimentKind::SweepMode.stem(),
        table,
        Some(PlotSpec::new("Spectral radius per Fourier mode", "k", &["rho"], false, false)),
    );
    Ok(out)
}

/// Points of the convergence-factor profile written by `optimize`.
const PROFILE_POINTS: usize = 1001;

fn optimize(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let g = cfg.geometry()?;
    let k_max = cfg.k_max();
    let res = optimize_equioscillation(&g, k_max)?;
    let (sm, sp) = optimal_params_1d(&g);
    let mut table = Table::new(&[
        "p_star",
        "value",
        "equioscillation_residual",
        "k_max",
        "s_minus",
        "s_plus",
        "s_minus_1d",
        "s_plus_1d",
    ]);
    table.push(vec![
        res.p_star.into(),
        res.value.into(),
        res.equioscillation_residual.into(),
        res.k_max.into(),
        res.s_minus.into(),
        res.s_plus.into(),
        sm.into(),
        sp.into(),
    ]);
    let mut profile = Table::new(&["k", "rho_tilde"]);
    for i in 0..PROFILE_POINTS {
        let k = k_max * i as f64 / (PROFILE_POINTS - 1) as f64;
        profile.push(vec![k.into(), rho_tilde(k, res.p_star, &g)?.into()]);
    }
    let mut out = ExperimentOutput::default();
    out.note("p_star", json!(res.p_star));
    out.note("value", json!(res.value));
    out.note("equioscillation_residual", json!(res.equioscillation_residual));
    out.add(ExperimentKind::Optimize.stem(), table, None);
    out.add(
        format!("{}_profile", ExperimentKind::Optimize.stem()),
        profile,
        Some(PlotSpec::new("Convergence factor at the optimal parameter", "k", &["rho_tilde"], false, false)),
    );
    Ok(out)
}

fn osm_validate(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentOutput> {
    if cfg.max_iter == 0 {
        return invalid("max_iter: osm-validate needs at least one iteration");
    }
    let mut table = Table::new(&[
        "n",
        "h",
        "observed_rate",
        "predicted_rho",
        "ratio",
        "rate_iterations",
        "iterations_to_tol",
        "converged",
    ]);
    let mut history = Table::new(&["n", "iteration", "error"]);
    for &n in &cfg.n_grid {
        let net = cfg.network(n)?;
        let disc = Discretization::new(&net, cfg.solver_h)?;
        let rp = cfg.robin_params(&net)?;
        let cmp = observed_vs_predicted(&net, &disc, &rp, seed, cfg.max_iter)?;
        let data = BoundaryData {
            start: vec![cfg.boundary_start; n],
            end: vec![cfg.boundary_end; n],
        };
        let options = OsmOptions {
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            initial: InitialGuess::Zero,
        };
        let run = osm_iterate(&net, &disc, &rp, &cfg.source, &data, &options)?;
        table.push(vec![
            n.into(),
            disc.h().into(),
            cmp.observed.into(),
            cmp.predicted.into(),
            cmp.ratio.into(),
            cmp.report.iterations.into(),
            run.iterations.into(),
            run.converged.into(),
        ]);
        for (i, e) in run.error_history.iter().enumerate() {
            history.push(vec![n.into(), (i + 1).into(), (*e).into()]);
        }
    }
    let mut out = ExperimentOutput::default();
    out.note("seed", json!(seed));
    out.add(
        ExperimentKind::OsmValidate.stem(),
        table,
        Some(PlotSpec::new(
            "Observed and predicted contraction",
            "n",
            &["observed_rate", "predicted_rho"],
            false,
            false,
        )),
    );
    out.add(format!("{}_history", ExperimentKind::OsmValidate.stem()), history, None);
    Ok(out)
}
