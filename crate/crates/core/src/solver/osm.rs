use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::matrices::{assemble_1d, RobinParams};
use crate::network::{Network, TraceSide};
use crate::spectral::spectral_radius;

use super::banded::{BandedLu, BandedMatrix};
use super::discretization::{scaled_jump, Discretization};
use super::monolithic::{
    add_jump, boundary_row, interior_row, monolithic_solve, BoundaryData, Solution, Source,
    SourceTerm,
};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    Zero,
    /// Piecewise linear on each fracture, with independent uniform values in
    /// `[-1, 1]` at both ends and at every trace node.
    Random { seed: u64 },
    Given(Solution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmOptions {
    /// Stop once the trace error is at most `tol` times the initial one.
    pub tol: f64,
    pub max_iter: usize,
    pub initial: InitialGuess,
}

impl Default for OsmOptions {
    fn default() -> Self {
        OsmOptions {
            tol: 1e-8,
            max_iter: 1000,
            initial: InitialGuess::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmRunReport {
    pub iterations: usize,
    /// Trace-error infinity norm after each iteration.
    pub error_history: Vec<f64>,
    pub initial_error: f64,
    /// Geometric-mean contraction per iteration over the last third of the run.
    pub observed_rate: f64,
    pub converged: bool,
    /// Set when the error grew tenfold above its running minimum.
    pub diverged: bool,
    pub p: Option<f64>,
    pub n_fractures: usize,
}

/// One Jacobi sweep of local Robin solves, with the local operators factored
/// once up front.
#[derive(Debug, Clone)]
pub struct SchwarzIteration {
    net: Network,
    disc: Discretization,
    rp: RobinParams,
    locals: Vec<LocalProblem>,
}

#[derive(Debug, Clone)]
struct LocalProblem {
    lu: BandedLu,
    /// Right-hand side without the transmission data.
    base_rhs: Vec<f64>,
}

impl SchwarzIteration {
    pub fn new(
        net: &Network,
        disc: &Discretization,
        rp: &RobinParams,
        source: &impl Source,
        bc: &BoundaryData,
    ) -> Result<Self> {
        rp.validate(net.trace_count())?;
        bc.check(net)?;
        let n = net.n_fractures();
        let nodes = disc.nodes();
        let h = disc.h();
        let kind = net.bc_kind();
        let locals = (0..n)
            .map(|j| {
                let nu = net.diffusivity(j);
                let mut a = BandedMatrix::zeros(nodes, 2, 2);
                let mut rhs = vec![0.0; nodes];
                rhs[0] = boundary_row(&mut a, 0, disc, true, kind.dirichlet_at_start(j, n), bc.start[j]);
                rhs[nodes - 1] =
                    boundary_row(&mut a, 0, disc, false, kind.dirichlet_at_end(j, n), bc.end[j]);
                for i in 1..nodes - 1 {
                    match disc.side_at(net, j, i) {
                        Some(side) => {
                            add_jump(&mut a, i, i, nu);
                            a.add(i, i, h * rp.for_side(j, side));
                        }
                        None => rhs[i] = interior_row(&mut a, i, nu, h, source.value(j, disc.coord(i))),
                    }
                }
                Ok(LocalProblem {
                    lu: a.factor()?,
                    base_rhs: rhs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SchwarzIteration {
            net: net.clone(),
            disc: disc.clone(),
            rp: rp.clone(),
            locals,
        })
    }

    /// Robin data `h (-nu_i [[u_i']] + s u_i)` received by `fracture` on each
    /// of its traces from the previous iterate.
    fn transmission_rhs(&self, prev: &Solution, fracture: usize, rhs: &mut [f64]) {
        let h = self.disc.h();
        for &side in self.net.sides(fracture) {
            let nb = self.net.neighbour(fracture, side);
            let t_nb = self.disc.trace_node(side.opposite());
            let u_nb = &prev.fractures[nb];
            let s = self.rp.for_side(fracture, side);
            rhs[self.disc.trace_node(side)] =
                -self.net.diffusivity(nb) * scaled_jump(u_nb, t_nb) + h * s * u_nb[t_nb];
        }
    }

    pub fn step(&self, prev: &Solution) -> Solution {
        let fractures = (0..self.net.n_fractures())
            .into_par_iter()
            .with_min_len(16)
            .map(|j| {
                let local = &self.locals[j];
                let mut rhs = local.base_rhs.clone();
                self.transmission_rhs(prev, j, &mut rhs);
                local.lu.solve(&mut rhs);
                rhs
            })
            .collect();
        Solution { fractures }
    }
}

fn initial_solution(net: &Network, disc: &Discretization, guess: &InitialGuess) -> Result<Solution> {
    match guess {
        InitialGuess::Zero => Ok(Solution::zeros(net, disc)),
        InitialGuess::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let knots = [
                0,
                disc.trace_node(TraceSide::Lower),
                disc.trace_node(TraceSide::Upper),
                disc.nodes() - 1,
            ];
            let fractures = (0..net.n_fractures())
                .map(|_| {
                    let values: Vec<f64> = knots.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
                    let mut u = vec![0.0; disc.nodes()];
                    for (w, v) in knots.windows(2).zip(values.windows(2)) {
                        for (i, x) in u.iter_mut().enumerate().take(w[1] + 1).skip(w[0]) {
                            let t = (i - w[0]) as f64 / (w[1] - w[0]) as f64;
                            *x = v[0] + t * (v[1] - v[0]);
                        }
                    }
                    u
                })
                .collect();
            Ok(Solution { fractures })
        }
        InitialGuess::Given(sol) => {
            if sol.fractures.len() != net.n_fractures()
                || sol.fractures.iter().any(|f| f.len() != disc.nodes())
            {
                return domain("initial guess", "shape does not match the discretization");
            }
            Ok(sol.clone())
        }
    }
}

/// Geometric-mean contraction over the last third of the history (at least
/// one step; the initial error counts as step zero).
pub(crate) fn tail_rate(initial: f64, history: &[f64]) -> f64 {
    let n = history.len();
    if n == 0 {
        return 0.0;
    }
    let span = (n / 3).max(1);
    let start = n - span;
    let from = if start == 0 { initial } else { history[start - 1] };
    let to = history[n - 1];
    if from == 0.0 || to == 0.0 {
        return 0.0;
    }
    (to / from).powf(1.0 / span as f64)
}

/// Runs the Schwarz iteration, measuring trace errors against the monolithic
/// solution of the same discrete problem.
pub fn osm_iterate(
    net: &Network,
    disc: &Discretization,
    rp: &RobinParams,
    source: &impl Source,
    bc: &BoundaryData,
    options: &OsmOptions,
) -> Result<OsmRunReport> {
    if !(options.tol.is_finite() && options.tol >= 0.0) {
        return domain("tol", format!("must be nonnegative, got {}", options.tol));
    }
    let reference = monolithic_solve(net, disc, source, bc)?;
    let iteration = SchwarzIteration::new(net, disc, rp, source, bc)?;
    let mut u = initial_solution(net, disc, &options.initial)?;
    let initial_error = u.trace_distance(&reference, net, disc);

    let mut history = Vec::new();
    let mut converged = initial_error == 0.0;
    let mut diverged = false;
    let mut min_error = initial_error;
    while !converged && !diverged && history.len() < options.max_iter {
        u = iteration.step(&u);
        let e = u.trace_distance(&reference, net, disc);
        history.push(e);
        min_error = min_error.min(e);
        converged = e <= options.tol * initial_error;
        diverged = !e.is_finite() || e > 10.0 * min_error;
    }

    Ok(OsmRunReport {
        iterations: history.len(),
        observed_rate: tail_rate(initial_error, &history),
        error_history: history,
        initial_error,
        converged,
        diverged,
        p: match rp {
            RobinParams::Uniform(p) => Some(*p),
            RobinParams::PerTrace { .. } => None,
        },
        n_fractures: net.n_fractures(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateComparison {
    pub observed: f64,
    pub predicted: f64,
    /// `observed / predicted`; infinite when only the prediction is zero.
    pub ratio: f64,
    pub report: OsmRunReport,
}

/// Relative error at which rate measurements stop.
pub const RATE_TOL: f64 = 1e-12;

/// Observed contraction of the homogeneous iteration from a random start,
/// next to the spectral radius of the matching 1D operator.
pub fn observed_vs_predicted(
    net: &Network,
    disc: &Discretization,
    rp: &RobinParams,
    seed: u64,
    max_iter: usize,
) -> Result<RateComparison> {
    let options = OsmOptions {
        tol: RATE_TOL,
        max_iter,
        initial: InitialGuess::Random { seed },
    };
    let report = osm_iterate(
        net,
        disc,
        rp,
        &SourceTerm::Zero,
        &BoundaryData::homogeneous(net.n_fractures()),
        &options,
    )?;
    let predicted = spectral_radius(&assemble_1d(net, rp)?.iteration_matrix()?)?.rho;
    let observed = report.observed_rate;
    let ratio = if predicted == 0.0 {
        if observed == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        observed / predicted
    };
    Ok(RateComparison {
        observed,
        predicted,
        ratio,
        report,
    })
}
