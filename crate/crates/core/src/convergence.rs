//! Two-fracture convergence factors and Robin parameter optimization.
//!
//! Two fractures coupled across one trace: `F_1` carries it at `gamma2`,
//! `F_2` at `gamma1`. Over two Schwarz iterations the trace error of each
//! fracture is multiplied by `rho_1d` (1D) or by `rho_2d(k)` per Fourier mode
//! `k` (2D). All mode arguments are mode indices; the frequency is `k pi / L`.

use std::f64::consts::PI;

use crate::error::{domain, OsmError, Result};
use crate::matrices::x_coth;
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFractureGeometry {
    pub length: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub nu1: f64,
    pub nu2: f64,
}

impl TwoFractureGeometry {
    pub fn new(length: f64, gamma1: f64, gamma2: f64, nu1: f64, nu2: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return domain("length", format!("must be positive, got {length}"));
        }
        if !(gamma1 > 0.0 && gamma2 < length) {
            return domain("gamma", format!("need 0 < gamma1 < gamma2 < L, got {gamma1}, {gamma2}"));
        }
        if gamma1 >= gamma2 {
            return domain("gamma1", "gamma1 >= gamma2");
        }
        for (field, nu) in [("nu1", nu1), ("nu2", nu2)] {
            if !(nu.is_finite() && nu > 0.0) {
                return domain(field, format!("must be positive, got {nu}"));
            }
        }
        Ok(TwoFractureGeometry {
            length,
            gamma1,
            gamma2,
            nu1,
            nu2,
        })
    }

    /// Geometry of the first two fractures of a network.
    pub fn from_network(net: &Network) -> Self {
        TwoFractureGeometry {
            length: net.length(),
            gamma1: net.gamma1(),
            gamma2: net.gamma2(),
            nu1: net.diffusivity(0),
            nu2: net.diffusivity(1),
        }
    }

    /// Symbols at `k >= 0`; `k = 0` gives their continuous limits.
    fn symbols(&self, k: f64) -> (f64, f64) {
        let l = self.length;
        let w = k * PI / l;
        let side = |g: f64| x_coth(w * g) / g + x_coth(w * (l - g)) / (l - g);
        (self.nu2 * side(self.gamma1), self.nu1 * side(self.gamma2))
    }
}

/// Two-iteration contraction factor of the 1D two-fracture problem. May be
/// negative.
pub fn rho_1d(s_minus: f64, s_plus: f64, g: &TwoFractureGeometry) -> f64 {
    let (a, b) = g.symbols(0.0);
    (a - s_minus) * (b - s_plus) / ((b + s_minus) * (a + s_plus))
}

/// The `(s^-, s^+)` pair that makes the two-fracture iteration nilpotent.
pub fn optimal_params_1d(g: &TwoFractureGeometry) -> (f64, f64) {
    g.symbols(0.0)
}

/// The hyperbolic symbols `(f_1(k), f_2(k))` for `k > 0`.
pub fn f_symbols(k: f64, g: &TwoFractureGeometry) -> Result<(f64, f64)> {
    if !(k.is_finite() && k > 0.0) {
        return domain("k", format!("must be positive, got {k}"));
    }
    Ok(g.symbols(k))
}

/// Two-iteration contraction factor of mode `k > 0`.
pub fn rho_2d(k: f64, s_minus: f64, s_plus: f64, g: &TwoFractureGeometry) -> Result<f64> {
    let (f1, f2) = f_symbols(k, g)?;
    Ok((f1 - s_minus) / (f2 + s_minus) * (f2 - s_plus) / (f1 + s_plus))
}

/// Mode factor with `s^- = f_1(p)`, `s^+ = f_2(p)`, extended to `k = 0` by the
/// 1D factor. Nonnegative, and zero at `k = p`.
pub fn rho_tilde(k: f64, p: f64, g: &TwoFractureGeometry) -> Result<f64> {
    if !(k.is_finite() && k >= 0.0) {
        return domain("k", format!("must be nonnegative, got {k}"));
    }
    if !(p.is_finite() && p > 0.0) {
        return domain("p", format!("must be positive, got {p}"));
    }
    Ok(rho_tilde_unchecked(k, p, g))
}

fn rho_tilde_unchecked(k: f64, p: f64, g: &TwoFractureGeometry) -> f64 {
    let (s_minus, s_plus) = g.symbols(p);
    if k == 0.0 {
        return rho_1d(s_minus, s_plus, g);
    }
    let (f1, f2) = g.symbols(k);
    (f1 - s_minus) / (f2 + s_minus) * (f2 - s_plus) / (f1 + s_plus)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    /// Optimal parameter, in mode-index units.
    pub p_star: f64,
    /// `max_k rho_tilde(k, p_star)` over `[0, k_max]`.
    pub value: f64,
    /// `|rho_tilde(0, p*) - rho_tilde(k_max, p*)|`.
    pub equioscillation_residual: f64,
    pub k_max: f64,
    /// Robin parameters `f_1(p*)`, `f_2(p*)`.
    pub s_minus: f64,
    pub s_plus: f64,
}

/// Target for the equioscillation residual.
pub const EQUIOSCILLATION_TOL: f64 = 1e-10;

/// Number of points of the dense `k`-grid used to evaluate the achieved
/// min-max value.
pub const VALUE_GRID_POINTS: usize = 4096;

/// Solves `min_p max_{k in [0, k_max]} rho_tilde(k, p)` through the
/// equioscillation condition `rho_tilde(0, p) = rho_tilde(k_max, p)`,
/// by bracketing and bisection.
pub fn optimize_equioscillation(g: &TwoFractureGeometry, k_max: f64) -> Result<OptimizationResult> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return domain("k_max", format!("must be positive, got {k_max}"));
    }
    let residual = |p: f64| rho_tilde_unchecked(0.0, p, g) - rho_tilde_unchecked(k_max, p, g);

    let mut lo = (1e-6f64).min(1e-3 * k_max);
    let mut hi = k_max;
    let mut r_lo = residual(lo);
    let mut r_hi = residual(hi);
    let mut expansions = 0;
    while !(r_lo < 0.0 && r_hi > 0.0) {
        if expansions == 60 {
            return Err(OsmError::Bracketing { lo, hi });
        }
        if r_lo >= 0.0 {
            lo *= 0.1;
            r_lo = residual(lo);
        }
        if r_hi <= 0.0 {
            hi *= 2.0;
            r_hi = residual(hi);
        }
        expansions += 1;
    }

    let (mut best_p, mut best_r) = if r_lo.abs() < r_hi.abs() { (lo, r_lo) } else { (hi, r_hi) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = residual(mid);
        if r.abs() < best_r.abs() {
            best_p = mid;
            best_r = r;
        }
        if r == 0.0 {
            break;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let (s_minus, s_plus) = g.symbols(best_p);
    Ok(OptimizationResult {
        p_star: best_p,
        value: max_over_modes(best_p, k_max, g),
        equioscillation_residual: best_r.abs(),
        k_max,
        s_minus,
        s_plus,
    })
}

/// `max rho_tilde(k, p)` over `k = 0`, `k_max`, and a dense grid in between
/// that mixes linear and logarithmic spacing.
pub fn max_over_modes(p: f64, k_max: f64, g: &TwoFractureGeometry) -> f64 {
    let half = VALUE_GRID_POINTS / 2;
    let lin = (0..=half).map(|i| k_max * i as f64 / half as f64);
    let log_lo = (k_max * 1e-6).ln();
    let log_step = (k_max.ln() - log_lo) / (half - 1) as f64;
    let log = (0..half).map(|i| (log_lo + log_step * i as f64).exp());
    lin.chain(log)
        .chain([0.0, k_max])
        .map(|k| rho_tilde_unchecked(k, p, g))
        .fold(f64::NEG_INFINITY, f64::max)
}
