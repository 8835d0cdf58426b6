//! Spectral radii of iteration operators and their maxima over Fourier modes.

use nalgebra::linalg::Schur;
use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{domain, OsmError, Result};
use crate::matrices::{assemble_1d, assemble_mode_2d, IterationMatrixPair, RobinParams};
use crate::network::{BoundaryKind, Network};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub rho: f64,
    pub dominant_eig: Complex<f64>,
    pub inf_norm: f64,
    pub n_fractures: Option<usize>,
    /// Uniform Robin parameter, if any.
    pub p: Option<f64>,
    /// Mode index this report belongs to (`Some(0.0)` for the constant mode).
    pub mode_k: Option<f64>,
    /// Mode attaining the maximum, for aggregated reports.
    pub argmax_k: Option<f64>,
}

/// Maximum absolute row sum.
pub fn inf_norm(t: &DMatrix<f64>) -> f64 {
    t.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `||T^m||_inf^(1/m)` for `m = 2^steps`; an upper bound on the spectral radius
/// that converges to it as `steps` grows.
pub fn power_norm_estimate(t: &DMatrix<f64>, steps: u32) -> f64 {
    let mut a = t.clone();
    let mut log_scale = 0.0;
    for _ in 0..steps {
        a = &a * &a;
        log_scale *= 2.0;
        let s = inf_norm(&a);
        if s == 0.0 {
            return 0.0;
        }
        a /= s;
        log_scale += s.ln();
    }
    let m = f64::from(2u32.pow(steps));
    (log_scale / m).exp()
}

/// Largest eigenvalue modulus of a square matrix, via Hessenberg reduction and
/// shifted QR (real Schur form).
pub fn spectral_radius(t: &DMatrix<f64>) -> Result<SpectrumReport> {
    if !t.is_square() {
        return domain("matrix", format!("not square: {}x{}", t.nrows(), t.ncols()));
    }
    if t.iter().any(|v| !v.is_finite()) {
        return domain("matrix", "non-finite entry");
    }
    let norm = inf_norm(t);
    if t.nrows() == 0 {
        return Ok(report(0.0, Complex::new(0.0, 0.0), 0.0));
    }
    let dominant = dominant_eigenvalue(t, norm).ok_or_else(|| OsmError::EigenNonConvergence {
        size: t.nrows(),
        estimate: power_norm_estimate(t, 10),
    })?;
    Ok(report(dominant.norm(), dominant, norm))
}

/// Shifts tried, as fractions of the infinity norm, when plain QR stalls.
/// Nearly decoupled operators carry many `+-lambda` pairs that make the
/// unshifted iteration cycle; `T + sigma I` has the same eigenvectors and
/// eigenvalues moved by `sigma`, which breaks that symmetry.
const FALLBACK_SHIFTS: [f64; 3] = [0.25, -0.375, 0.625];

fn dominant_eigenvalue(t: &DMatrix<f64>, norm: f64) -> Option<Complex<f64>> {
    let largest = |eigs: &[Complex<f64>], shift: f64| {
        eigs.iter()
            .map(|z| z - shift)
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or_default()
    };
    if let Some(schur) = Schur::try_new(t.clone(), SCHUR_EPS, SCHUR_MAX_ITER) {
        return Some(largest(schur.complex_eigenvalues().as_slice(), 0.0));
    }
    FALLBACK_SHIFTS.iter().find_map(|frac| {
        let sigma = frac * norm.max(f64::MIN_POSITIVE);
        let shifted = t + DMatrix::identity(t.nrows(), t.ncols()) * sigma;
        Schur::try_new(shifted, SCHUR_EPS, SCHUR_MAX_ITER)
            .map(|schur| largest(schur.complex_eigenvalues().as_slice(), sigma))
    })
}

fn report(rho: f64, dominant_eig: Complex<f64>, inf_norm: f64) -> SpectrumReport {
    SpectrumReport {
        rho,
        dominant_eig,
        inf_norm,
        n_fractures: None,
        p: None,
        mode_k: None,
        argmax_k: None,
    }
}

/// Spectral report of `M^{-1} N`, annotated with the network size and `p`.
pub fn analyze_pair(
    pair: &IterationMatrixPair,
    net: &Network,
    rp: &RobinParams,
) -> Result<SpectrumReport> {
    let mut rep = spectral_radius(&pair.iteration_matrix()?)?;
    rep.n_fractures = Some(net.n_fractures());
    rep.p = match rp {
        RobinParams::Uniform(p) => Some(*p),
        RobinParams::PerTrace { .. } => None,
    };
    Ok(rep)
}

/// Sampled Fourier modes, as mode indices (frequency `k pi / L`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRange {
    pub k_min: f64,
    pub k_max: f64,
    pub n_samples: usize,
    /// Also evaluate the constant mode through the 1D operator.
    pub include_zero: bool,
}

impl ModeRange {
    pub fn new(k_min: f64, k_max: f64, n_samples: usize, include_zero: bool) -> Result<Self> {
        if !(k_min.is_finite() && k_max.is_finite() && k_min >= 0.0 && k_min <= k_max) {
            return domain("modes", format!("need 0 <= k_min <= k_max, got [{k_min}, {k_max}]"));
        }
        if n_samples == 0 || (n_samples == 1) != (k_min == k_max) {
            return domain(
                "modes",
                format!("{n_samples} samples on [{k_min}, {k_max}]"),
            );
        }
        Ok(ModeRange {
            k_min,
            k_max,
            n_samples,
            include_zero,
        })
    }

    /// Integer modes `1..=ceil(L/h)`: frequencies from `pi/L` up to the grid
    /// limit `pi/h`.
    pub fn from_mesh(length: f64, h: f64, include_zero: bool) -> Result<Self> {
        if !(h.is_finite() && h > 0.0 && h < length) {
            return domain("h", format!("must lie in (0, L), got {h}"));
        }
        let k_max = (length / h - 1e-9).ceil().max(1.0);
        let n = k_max as usize;
        if n == 1 {
            return Self::single(1.0, include_zero);
        }
        Self::new(1.0, k_max, n, include_zero)
    }

    pub fn single(k: f64, include_zero: bool) -> Result<Self> {
        Self::new(k, k, 1, include_zero)
    }

    /// The modes evaluated, in increasing order.
    pub fn samples(&self) -> Vec<f64> {
        let mut ks = Vec::with_capacity(self.n_samples + 1);
        if self.include_zero && self.k_min > 0.0 {
            ks.push(0.0);
        }
        if self.n_samples == 1 {
            ks.push(self.k_min);
        } else {
            let step = (self.k_max - self.k_min) / (self.n_samples - 1) as f64;
            ks.extend((0..self.n_samples).map(|i| {
                if i + 1 == self.n_samples {
                    self.k_max
                } else {
                    self.k_min + step * i as f64
                }
            }));
        }
        ks
    }
}

/// Per-mode spectral reports; `k = 0` uses the 1D operator of the same
/// boundary configuration.
pub fn mode_radii(
    net: &Network,
    rp: &RobinParams,
    range: &ModeRange,
    bc: BoundaryKind,
) -> Result<Vec<SpectrumReport>> {
    let net_bc = net.with_bc(bc);
    range
        .samples()
        .into_par_iter()
        .map(|k| {
            let pair = if k == 0.0 {
                assemble_1d(&net_bc, rp)?
            } else {
                assemble_mode_2d(&net_bc, rp, k, bc)?
            };
            let mut rep = analyze_pair(&pair, &net_bc, rp)?;
            rep.mode_k = Some(k);
            Ok(rep)
        })
        .collect()
}

/// Maximum spectral radius over the sampled modes.
pub fn max_mode_radius(
    net: &Network,
    rp: &RobinParams,
    range: &ModeRange,
    bc: BoundaryKind,
) -> Result<SpectrumReport> {
    let reports = mode_radii(net, rp, range, bc)?;
    let best = reports
        .into_iter()
        .max_by(|a, b| a.rho.total_cmp(&b.rho))
        .expect("mode range is never empty");
    Ok(SpectrumReport {
        argmax_k: best.mode_k,
        mode_k: None,
        ..best
    })
}
