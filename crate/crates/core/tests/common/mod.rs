//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dfn_osm_core::solver::{BoundaryData, Discretization, Solution};
use dfn_osm_core::{BoundaryKind, Network};
use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub const L: f64 = 1.0;
pub const G1: f64 = 0.2;
pub const G2: f64 = 0.6;

pub fn fig_net(n: usize, bc: BoundaryKind) -> Network {
    Network::uniform(n, L, G1, G2, 1.0, bc).unwrap()
}

/// Iteration matrix through a dense LU solve of `M X = N`.
pub fn dense_lu_iteration(m: &DMatrix<f64>, n: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().lu().solve(n).expect("M invertible")
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Written-out block entries of the operator pair for unit diffusivity and
/// uniform `p`, at angular frequency `w` (`w = 0`: the 1D blocks).
pub struct PrintedBlocks {
    pub f1: f64,
    pub f2: [[f64; 2]; 2],
    pub f4: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn dirichlet_blocks(l: f64, g1: f64, g2: f64, p: f64) -> PrintedBlocks {
    let d = g2 - g1;
    PrintedBlocks {
        f1: p + l / (g2 * (l - g2)),
        f2: [
            [p + g2 / (g1 * d), -1.0 / d],
            [-1.0 / d, p + (l - g1) / ((l - g2) * d)],
        ],
        f4: p + l / (g1 * (l - g1)),
        a: p - g2 / (g1 * d),
        b: 1.0 / d,
        c: p - (l - g1) / ((l - g2) * d),
        d1: p - l / (g1 * (l - g1)),
        d2: p - l / (g2 * (l - g2)),
    }
}

/// Neumann blocks, with `d2 = p - 1/gamma2` (the entry pairing with
/// `F1 = p + 1/gamma2`).
pub fn neumann_blocks(l: f64, g1: f64, g2: f64, p: f64) -> PrintedBlocks {
    let d = g2 - g1;
    PrintedBlocks {
        f1: p + 1.0 / g2,
        f2: [[p + 1.0 / d, -1.0 / d], [-1.0 / d, p + 1.0 / d]],
        f4: p + 1.0 / (l - g1),
        a: p - 1.0 / d,
        b: 1.0 / d,
        c: p - 1.0 / d,
        d1: p - 1.0 / (l - g1),
        d2: p - 1.0 / g2,
    }
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// 2D Dirichlet blocks of mode `k`, each hyperbolic term scaled by `w = k pi / L`.
pub fn mode_blocks(l: f64, g1: f64, g2: f64, p: f64, k: f64) -> PrintedBlocks {
    let w = k * PI / l;
    let d = g2 - g1;
    let ct = |x: f64| w * coth(w * x);
    let cs = w / (w * d).sinh();
    PrintedBlocks {
        f1: p + ct(g2) + ct(l - g2),
        f2: [[p + ct(g1) + ct(d), -cs], [-cs, p + ct(l - g2) + ct(d)]],
        f4: p + ct(l - g1) + ct(g1),
        a: p - ct(g1) - ct(d),
        b: cs,
        c: p - ct(l - g2) - ct(d),
        d1: p - ct(l - g1) - ct(g1),
        d2: p - ct(l - g2) - ct(g2),
    }
}

/// Places the blocks according to the sparsity pattern of the operator pair.
pub fn place_blocks(n_fractures: usize, b: &PrintedBlocks) -> (DMatrix<f64>, DMatrix<f64>) {
    let size = 2 * (n_fractures - 2) + 2;
    let mut m = DMatrix::zeros(size, size);
    let mut nm = DMatrix::zeros(size, size);
    m[(0, 0)] = b.f1;
    m[(size - 1, size - 1)] = b.f4;
    for j in 1..n_fractures - 1 {
        let r = 2 * j - 1;
        m[(r, r)] = b.f2[0][0];
        m[(r, r + 1)] = b.f2[0][1];
        m[(r + 1, r)] = b.f2[1][0];
        m[(r + 1, r + 1)] = b.f2[1][1];
    }
    if n_fractures == 2 {
        nm[(0, 1)] = b.d1;
        nm[(1, 0)] = b.d2;
        return (m, nm);
    }
    // F_1 receives from the lower trace of F_2.
    nm[(0, 1)] = b.a;
    nm[(0, 2)] = b.b;
    for j in 1..n_fractures - 1 {
        let lower = 2 * j - 1;
        let upper = 2 * j;
        // From the previous fracture's upper trace.
        if j == 1 {
            nm[(lower, 0)] = b.d2;
        } else {
            nm[(lower, lower - 2)] = b.b;
            nm[(lower, lower - 1)] = b.c;
        }
        // From the next fracture's lower trace.
        if j + 2 == n_fractures {
            nm[(upper, size - 1)] = b.d1;
        } else {
            nm[(upper, upper + 1)] = b.a;
            nm[(upper, upper + 2)] = b.b;
        }
    }
    nm[(size - 1, size - 3)] = b.b;
    nm[(size - 1, size - 2)] = b.c;
    (m, nm)
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

/// Characteristic polynomial coefficients (constant term first, monic) by
/// the Faddeev-LeVerrier recursion in exact rational arithmetic.
pub fn exact_charpoly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let ar: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| rational(a[(i, j)])).collect())
        .collect();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for k in 1..=n {
        let mut am = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for t in 0..n {
                    if !ar[i][t].is_zero() && !mk[t][j].is_zero() {
                        acc += &ar[i][t] * &mk[t][j];
                    }
                }
                am[i][j] = acc;
            }
        }
        let trace: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -trace / BigRational::from_integer(BigInt::from(k));
        coeffs[n - k] = c.clone();
        for i in 0..n {
            am[i][i] += &c;
        }
        mk = am;
    }
    coeffs.iter().map(|c| c.to_f64().unwrap()).collect()
}

/// All roots of a monic polynomial (constant term first) by Aberth-Ehrlich
/// iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex<f64>> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex<f64>| {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|i| Complex::from_polar(0.5 * radius, 2.0 * PI * (i as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex<f64> = (0..n)
                .filter(|j| *j != i)
                .map(|j| Complex::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

pub fn charpoly_spectral_radius(a: &DMatrix<f64>) -> f64 {
    polynomial_roots(&exact_charpoly(a))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `exp(x)` of the exact binary value of `x` by a rational Taylor series,
/// accurate far beyond double precision for `|x| < 8`.
fn exact_exp(x: f64) -> BigRational {
    let xr = rational(x);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for n in 1..120u32 {
        term = term * &xr / BigRational::from_integer(BigInt::from(n));
        sum += &term;
    }
    sum
}

/// `coth(x)` in extended precision, rounded once to `f64`.
pub fn precise_coth(x: f64) -> f64 {
    let e = exact_exp(2.0 * x);
    let one = BigRational::one();
    ((&e + &one) / (&e - &one)).to_f64().unwrap()
}

/// Piecewise smooth exact solution with kinks at every trace:
/// `u_j = c_j + sin(w tau) + kl_j |tau - gamma1| + ku_j |tau - gamma2|`,
/// with the kink slopes balanced so the weighted jumps cancel and `c_j`
/// chosen for continuity. Source `f_j = nu_j w^2 sin(w tau)`.
pub struct Manufactured {
    pub w: f64,
    pub c: Vec<f64>,
    pub kink_lower: Vec<f64>,
    pub kink_upper: Vec<f64>,
    pub nu: Vec<f64>,
    pub g1: f64,
    pub g2: f64,
}

impl Manufactured {
    pub fn new(net: &Network, w: f64) -> Self {
        let n = net.n_fractures();
        let nu = net.diffusivities().to_vec();
        let (g1, g2) = (net.gamma1(), net.gamma2());
        let mut kink_lower = vec![0.0; n];
        let mut kink_upper = vec![0.0; n];
        for j in 0..n - 1 {
            kink_upper[j] = 0.3 + 0.1 * j as f64;
            kink_lower[j + 1] = -kink_upper[j] * nu[j] / nu[j + 1];
        }
        let mut m = Manufactured {
            w,
            c: vec![0.0; n],
            kink_lower,
            kink_upper,
            nu,
            g1,
            g2,
        };
        m.c[0] = 0.5;
        for j in 0..n - 1 {
            let target = m.value(j, g2);
            m.c[j + 1] = target - (m.value(j + 1, g1) - m.c[j + 1]);
        }
        m
    }

    pub fn value(&self, j: usize, tau: f64) -> f64 {
        self.c[j]
            + (self.w * tau).sin()
            + self.kink_lower[j] * (tau - self.g1).abs()
            + self.kink_upper[j] * (tau - self.g2).abs()
    }

    pub fn derivative(&self, j: usize, tau: f64) -> f64 {
        self.w * (self.w * tau).cos()
            + self.kink_lower[j] * (tau - self.g1).signum()
            + self.kink_upper[j] * (tau - self.g2).signum()
    }

    pub fn source(&self, j: usize, tau: f64) -> f64 {
        self.nu[j] * self.w * self.w * (self.w * tau).sin()
    }

    pub fn boundary_data(&self, net: &Network) -> BoundaryData {
        let n = net.n_fractures();
        let kind = net.bc_kind();
        let l = net.length();
        BoundaryData {
            start: (0..n)
                .map(|j| {
                    if kind.dirichlet_at_start(j, n) {
                        self.value(j, 0.0)
                    } else {
                        self.derivative(j, 0.0)
                    }
                })
                .collect(),
            end: (0..n)
                .map(|j| {
                    if kind.dirichlet_at_end(j, n) {
                        self.value(j, l)
                    } else {
                        self.derivative(j, l)
                    }
                })
                .collect(),
        }
    }

    pub fn max_error(&self, sol: &Solution, disc: &Discretization) -> f64 {
        sol.fractures
            .iter()
            .enumerate()
            .flat_map(|(j, u)| {
                u.iter()
                    .enumerate()
                    .map(move |(i, v)| (v - self.value(j, disc.coord(i))).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Two-fracture symbols written out with `coth = 1/tanh`.
pub fn symbols_direct(k: f64, l: f64, g1: f64, g2: f64, nu1: f64, nu2: f64) -> (f64, f64) {
    let w = k * PI / l;
    (
        nu2 * w * (coth(w * g1) + coth(w * (l - g1))),
        nu1 * w * (coth(w * g2) + coth(w * (l - g2))),
    )
}

/// Grid-search solution of
/// `min_p max{ rho_1d(p), max_{k in [1, k_max]} rho(k, p) }`
/// with `s^- = f_1(p)`, `s^+ = f_2(p)`. The `p` grid is refined around the
/// best point for `levels` additional passes.
pub fn minmax_grid_search(
    l: f64,
    g1: f64,
    g2: f64,
    k_max: f64,
    n_p: usize,
    n_k: usize,
    levels: usize,
) -> (f64, f64) {
    let a = l / (g1 * (l - g1));
    let b = l / (g2 * (l - g2));
    let half = n_k / 2;
    let ks: Vec<f64> = (0..half)
        .map(|i| 1.0 + (k_max - 1.0) * i as f64 / (half - 1) as f64)
        .chain((0..n_k - half).map(|i| (k_max.ln() * i as f64 / (n_k - half - 1) as f64).exp()))
        .collect();
    let symbols: Vec<(f64, f64)> = ks.iter().map(|k| symbols_direct(*k, l, g1, g2, 1.0, 1.0)).collect();
    let objective = |p: f64| {
        let (sm, sp) = symbols_direct(p, l, g1, g2, 1.0, 1.0);
        let one_d = (a - sm) * (b - sp) / ((b + sm) * (a + sp));
        symbols
            .iter()
            .map(|(f1, f2)| (f1 - sm) / (f2 + sm) * (f2 - sp) / (f1 + sp))
            .fold(one_d, f64::max)
    };
    let mut grid: Vec<f64> = (0..n_p)
        .map(|i| (1e-2f64.ln() + (k_max.ln() - 1e-2f64.ln()) * i as f64 / (n_p - 1) as f64).exp())
        .collect();
    let mut best = (f64::NAN, f64::INFINITY);
    for _ in 0..=levels {
        let values: Vec<f64> = grid.iter().map(|p| objective(*p)).collect();
        let i = (0..n_p).min_by(|x, y| values[*x].total_cmp(&values[*y])).unwrap();
        best = (grid[i], values[i]);
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n_p - 1)];
        grid = (0..n_p)
            .map(|t| lo + (hi - lo) * t as f64 / (n_p - 1) as f64)
            .collect();
    }
    best
}
