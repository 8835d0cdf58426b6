//! Transmission operators of the Schwarz iteration on the trace unknowns.
//!
//! Every fracture error is harmonic between its traces (1D) or per Fourier
//! mode `cos(k pi tau_2 / L)` (2D). The derivative jump of such a profile at
//! a trace is a linear combination of the fracture's own trace values, with
//! coefficients given by one Dirichlet-to-Neumann symbol per segment:
//!
//! | segment                         | self coefficient       | coupling           |
//! |---------------------------------|------------------------|--------------------|
//! | trace to Dirichlet end, length l | `w coth(w l)` (`1/l`)  | -                  |
//! | trace to Neumann end, length l   | `w tanh(w l)` (`0`)    | -                  |
//! | trace to trace, length d         | `w coth(w d)` (`1/d`)  | `-w / sinh(w d)`   |
//!
//! with `w = k pi / L` and the 1D limits in parentheses. The Robin rows
//! `nu_j [[u_j']] + s u_j = -nu_i [[u_i']] + s u_i` then give `M e^n = N e^{n-1}`.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, Matrix2};

use crate::error::{domain, OsmError, Result};
use crate::network::{BoundaryKind, Network, TraceSide};

/// Robin transmission parameters `s_j^-`, `s_j^+`.
///
/// On trace `S_j` the lower-indexed fracture `F_j` uses `s_j^-` and the
/// higher-indexed fracture `F_{j+1}` uses `s_j^+`.
#[derive(Debug, Clone, PartialEq)]
pub enum RobinParams {
    Uniform(f64),
    PerTrace { s_minus: Vec<f64>, s_plus: Vec<f64> },
}

impl RobinParams {
    /// The same `(s^-, s^+)` pair on each of `traces` traces.
    pub fn repeated_pair(s_minus: f64, s_plus: f64, traces: usize) -> Self {
        RobinParams::PerTrace {
            s_minus: vec![s_minus; traces],
            s_plus: vec![s_plus; traces],
        }
    }

    pub fn validate(&self, traces: usize) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self {
            RobinParams::Uniform(p) if !positive(*p) => {
                domain("robin", format!("parameter must be positive, got {p}"))
            }
            RobinParams::Uniform(_) => Ok(()),
            RobinParams::PerTrace { s_minus, s_plus } => {
                if s_minus.len() != traces || s_plus.len() != traces {
                    return domain(
                        "robin",
                        format!(
                            "expected {traces} values per side, got {} and {}",
                            s_minus.len(),
                            s_plus.len()
                        ),
                    );
                }
                match s_minus.iter().chain(s_plus).find(|v| !positive(**v)) {
                    Some(v) => domain("robin", format!("parameter must be positive, got {v}")),
                    None => Ok(()),
                }
            }
        }
    }

    /// Parameter used by the equation of `fracture` on its `side` trace.
    pub fn for_side(&self, fracture: usize, side: TraceSide) -> f64 {
        match self {
            RobinParams::Uniform(p) => *p,
            RobinParams::PerTrace { s_minus, s_plus } => match side {
                TraceSide::Upper => s_minus[fracture],
                TraceSide::Lower => s_plus[fracture - 1],
            },
        }
    }

    /// Representative scalar for reports: `p` when uniform, else `NaN`.
    pub fn uniform_value(&self) -> f64 {
        match self {
            RobinParams::Uniform(p) => *p,
            RobinParams::PerTrace { .. } => f64::NAN,
        }
    }
}

/// Which operator a pair represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixKind {
    Dirichlet1D,
    Neumann1D,
    /// Fourier mode `k` (index, frequency `k pi / L`) of the 2D network.
    Mode2D { k: f64, bc: BoundaryKind },
}

/// `(M, N)` with `M` block diagonal, so that `e^n = M^{-1} N e^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationMatrixPair {
    m: DMatrix<f64>,
    n: DMatrix<f64>,
    kind: MatrixKind,
    blocks: Vec<Range<usize>>,
}

/// `x coth x`, continuous at zero.
pub(crate) fn x_coth(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

/// `x / sinh x`, continuous at zero.
pub(crate) fn x_csch(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x / x.sinh()
    }
}

/// Dirichlet-to-Neumann symbols of a single segment at angular frequency `w`.
#[derive(Debug, Clone, Copy)]
struct Symbols {
    w: f64,
}

impl Symbols {
    fn to_dirichlet(self, len: f64) -> f64 {
        x_coth(self.w * len) / len
    }

    fn to_neumann(self, len: f64) -> f64 {
        self.w * (self.w * len).tanh()
    }

    fn to_end(self, len: f64, dirichlet: bool) -> f64 {
        if dirichlet {
            self.to_dirichlet(len)
        } else {
            self.to_neumann(len)
        }
    }

    fn between_self(self, d: f64) -> f64 {
        x_coth(self.w * d) / d
    }

    fn between_cross(self, d: f64) -> f64 {
        -x_csch(self.w * d) / d
    }
}

/// Derivative jump `[[e']] = e'(t-) - e'(t+)` of fracture `j` at its `side`
/// trace, as coefficients on the stacked unknowns. Not weighted by `nu`.
fn jump_coefficients(
    net: &Network,
    bc: BoundaryKind,
    sym: Symbols,
    j: usize,
    side: TraceSide,
) -> [(usize, f64); 2] {
    let n = net.n_fractures();
    let (l, g1, g2) = (net.length(), net.gamma1(), net.gamma2());
    let d = g2 - g1;
    let me = net.unknown_index(j, side);
    let has = |s| net.sides(j).contains(&s);
    match side {
        TraceSide::Lower => {
            let left = sym.to_end(g1, bc.dirichlet_at_start(j, n));
            if has(TraceSide::Upper) {
                let other = net.unknown_index(j, TraceSide::Upper);
                [(me, left + sym.between_self(d)), (other, sym.between_cross(d))]
            } else {
                let right = sym.to_end(l - g1, bc.dirichlet_at_end(j, n));
                [(me, left + right), (me, 0.0)]
            }
        }
        TraceSide::Upper => {
            let right = sym.to_end(l - g2, bc.dirichlet_at_end(j, n));
            if has(TraceSide::Lower) {
                let other = net.unknown_index(j, TraceSide::Lower);
                [(me, right + sym.between_self(d)), (other, sym.between_cross(d))]
            } else {
                let left = sym.to_end(g2, bc.dirichlet_at_start(j, n));
                [(me, left + right), (me, 0.0)]
            }
        }
    }
}

fn assemble(
    net: &Network,
    rp: &RobinParams,
    bc: BoundaryKind,
    w: f64,
    kind: MatrixKind,
) -> Result<IterationMatrixPair> {
    rp.validate(net.trace_count())?;
    let size = net.unknown_count();
    let sym = Symbols { w };
    let mut m = DMatrix::zeros(size, size);
    let mut nm = DMatrix::zeros(size, size);
    let mut blocks = Vec::with_capacity(net.n_fractures());
    for j in 0..net.n_fractures() {
        let sides = net.sides(j);
        let start = net.unknown_index(j, sides[0]);
        blocks.push(start..start + sides.len());
        for &side in sides {
            let row = net.unknown_index(j, side);
            let s = rp.for_side(j, side);
            let nu = net.diffusivity(j);
            for (col, v) in jump_coefficients(net, bc, sym, j, side) {
                m[(row, col)] += nu * v;
            }
            m[(row, row)] += s;

            let nb = net.neighbour(j, side);
            let nb_side = side.opposite();
            let nu_nb = net.diffusivity(nb);
            for (col, v) in jump_coefficients(net, bc, sym, nb, nb_side) {
                nm[(row, col)] -= nu_nb * v;
            }
            nm[(row, net.unknown_index(nb, nb_side))] += s;
        }
    }
    Ok(IterationMatrixPair {
        m,
        n: nm,
        kind,
        blocks,
    })
}

/// Operator for Dirichlet data at both ends of every fracture, independent of
/// `net.bc_kind()`.
pub fn assemble_dirichlet_1d(net: &Network, rp: &RobinParams) -> Result<IterationMatrixPair> {
    assemble(net, rp, BoundaryKind::DirichletEverywhere, 0.0, MatrixKind::Dirichlet1D)
}

/// Operator for Neumann data on all ends except the two outermost ones,
/// independent of `net.bc_kind()`.
pub fn assemble_neumann_1d(net: &Network, rp: &RobinParams) -> Result<IterationMatrixPair> {
    assemble(net, rp, BoundaryKind::NeumannInterior, 0.0, MatrixKind::Neumann1D)
}

/// 1D operator matching `net.bc_kind()`.
pub fn assemble_1d(net: &Network, rp: &RobinParams) -> Result<IterationMatrixPair> {
    match net.bc_kind() {
        BoundaryKind::DirichletEverywhere => assemble_dirichlet_1d(net, rp),
        BoundaryKind::NeumannInterior => assemble_neumann_1d(net, rp),
    }
}

/// Operator of Fourier mode `k > 0` for the 2D network. The constant mode is
/// the 1D operator and is rejected here.
pub fn assemble_mode_2d(
    net: &Network,
    rp: &RobinParams,
    k: f64,
    bc: BoundaryKind,
) -> Result<IterationMatrixPair> {
    if !(k.is_finite() && k > 0.0) {
        return domain("k", format!("mode index must be positive, got {k}"));
    }
    let w = k * PI / net.length();
    assemble(net, rp, bc, w, MatrixKind::Mode2D { k, bc })
}

impl IterationMatrixPair {
    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn n(&self) -> &DMatrix<f64> {
        &self.n
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Row ranges of the diagonal blocks of `M`, one per fracture.
    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    fn block_inverse(&self, r: &Range<usize>) -> Result<Matrix2<f64>> {
        let singular = || OsmError::SingularBlock {
            row: r.start,
            end: r.end,
        };
        let tol = 1e-14;
        match r.len() {
            1 => {
                let a = self.m[(r.start, r.start)];
                if !(a.abs() > tol) {
                    return Err(singular());
                }
                Ok(Matrix2::new(1.0 / a, 0.0, 0.0, 0.0))
            }
            2 => {
                let i = r.start;
                let b = Matrix2::new(
                    self.m[(i, i)],
                    self.m[(i, i + 1)],
                    self.m[(i + 1, i)],
                    self.m[(i + 1, i + 1)],
                );
                let scale = b.abs().max();
                let det = b.determinant();
                if !(det.abs() > tol * scale * scale) {
                    return Err(singular());
                }
                Ok(Matrix2::new(b[(1, 1)], -b[(0, 1)], -b[(1, 0)], b[(0, 0)]) / det)
            }
            _ => unreachable!("blocks are 1x1 or 2x2"),
        }
    }

    /// `T = M^{-1} N`, by explicit inversion of each diagonal block.
    pub fn iteration_matrix(&self) -> Result<DMatrix<f64>> {
        let mut t = DMatrix::zeros(self.dim(), self.dim());
        for r in &self.blocks {
            let inv = self.block_inverse(r)?;
            for (bi, row) in r.clone().enumerate() {
                for col in 0..self.dim() {
                    let mut acc = 0.0;
                    for (bj, src) in r.clone().enumerate() {
                        acc += inv[(bi, bj)] * self.n[(src, col)];
                    }
                    t[(row, col)] = acc;
                }
            }
        }
        Ok(t)
    }

    /// `N M^{-1}`, similar to `M^{-1} N`.
    pub fn right_product(&self) -> Result<DMatrix<f64>> {
        let mut x = DMatrix::zeros(self.dim(), self.dim());
        for r in &self.blocks {
            let inv = self.block_inverse(r)?;
            for row in 0..self.dim() {
                for (bj, col) in r.clone().enumerate() {
                    let mut acc = 0.0;
                    for (bi, src) in r.clone().enumerate() {
                        acc += self.n[(row, src)] * inv[(bi, bj)];
                    }
                    x[(row, col)] = acc;
                }
            }
        }
        Ok(x)
    }
}

/// Closed-form `||N M^{-1}||_inf` of the Dirichlet operator with uniform `p`
/// and unit diffusivity, valid when `gamma1 + gamma2 = L` and the network
/// has at least one interior fracture. The caller is responsible for the
/// symmetric trace placement; `gamma1` is implied.
pub fn symmetric_norm_bound(length: f64, gamma2: f64, p: f64) -> Result<f64> {
    if !(gamma2 > 0.5 * length && gamma2 < length) {
        return Err(OsmError::Hypothesis(format!(
            "need L/2 < gamma2 < L, got gamma2 = {gamma2}, L = {length}"
        )));
    }
    if !(p.is_finite() && p > 0.0) {
        return domain("p", format!("must be positive, got {p}"));
    }
    let l = length;
    let q = l - gamma2;
    let first = ((p * gamma2 * q - l) / (p * gamma2 * q + l)).abs();
    let sign_term = l + (l - 2.0 * gamma2) * q * q * p * p;
    let second = if sign_term < 0.0 {
        ((p * q - 1.0) / (p * q + 1.0)).abs()
    } else {
        let r = p * q * (2.0 * gamma2 - l);
        ((r - l) / (r + l)).abs()
    };
    Ok(first.max(second))
}
