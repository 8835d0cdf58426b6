use crate::error::{domain, Result};
use crate::network::{Network, TraceSide};

use super::banded::BandedMatrix;
use super::discretization::{
    Discretization, SCALED_END_DERIVATIVE, SCALED_JUMP, SCALED_START_DERIVATIVE,
};

/// Right-hand side `f` of `-nu u'' = f`, evaluated per fracture.
pub trait Source: Sync {
    fn value(&self, fracture: usize, tau: f64) -> f64;
}

impl<F: Fn(usize, f64) -> f64 + Sync> Source for F {
    fn value(&self, fracture: usize, tau: f64) -> f64 {
        self(fracture, tau)
    }
}

/// Built-in sources, identical on every fracture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceTerm {
    Zero,
    Constant(f64),
    /// `amplitude * sin(wavenumber * tau)`
    Sine { amplitude: f64, wavenumber: f64 },
}

impl Source for SourceTerm {
    fn value(&self, _fracture: usize, tau: f64) -> f64 {
        match *self {
            SourceTerm::Zero => 0.0,
            SourceTerm::Constant(c) => c,
            SourceTerm::Sine {
                amplitude,
                wavenumber,
            } => amplitude * (wavenumber * tau).sin(),
        }
    }
}

/// Data at the outer ends of each fracture: the value where the end is
/// Dirichlet, the derivative `u'` where it is Neumann.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl BoundaryData {
    pub fn homogeneous(n_fractures: usize) -> Self {
        BoundaryData {
            start: vec![0.0; n_fractures],
            end: vec![0.0; n_fractures],
        }
    }

    pub(crate) fn check(&self, net: &Network) -> Result<()> {
        let n = net.n_fractures();
        if self.start.len() != n || self.end.len() != n {
            return domain("boundary data", format!("expected {n} values per end"));
        }
        if self.start.iter().chain(&self.end).any(|v| !v.is_finite()) {
            return domain("boundary data", "non-finite value");
        }
        Ok(())
    }
}

/// Nodal values, one vector per fracture.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub fractures: Vec<Vec<f64>>,
}

impl Solution {
    pub fn zeros(net: &Network, disc: &Discretization) -> Self {
        Solution {
            fractures: vec![vec![0.0; disc.nodes()]; net.n_fractures()],
        }
    }

    /// Trace values stacked as the operator unknowns `(e_1, e_2^1, e_2^2, ...)`.
    pub fn trace_values(&self, net: &Network, disc: &Discretization) -> Vec<f64> {
        (0..net.n_fractures())
            .flat_map(|j| {
                net.sides(j)
                    .iter()
                    .map(move |s| self.fractures[j][disc.trace_node(*s)])
            })
            .collect()
    }

    /// Largest trace-value difference to `other`.
    pub fn trace_distance(&self, other: &Solution, net: &Network, disc: &Discretization) -> f64 {
        self.trace_values(net, disc)
            .iter()
            .zip(other.trace_values(net, disc))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Adds the Dirichlet or Neumann row of an outer end. Returns the right-hand side.
pub(super) fn boundary_row(
    a: &mut BandedMatrix,
    offset: usize,
    disc: &Discretization,
    at_start: bool,
    dirichlet: bool,
    data: f64,
) -> f64 {
    let last = disc.cells();
    let (row, stencil, first) = if at_start {
        (offset, SCALED_START_DERIVATIVE, offset)
    } else {
        (offset + last, SCALED_END_DERIVATIVE, offset + last - 2)
    };
    if dirichlet {
        a.add(row, row, 1.0);
        data
    } else {
        for (c, col) in stencil.iter().zip(first..) {
            a.add(row, col, *c);
        }
        disc.h() * data
    }
}

/// `-nu (u_{i-1} - 2 u_i + u_{i+1})`. Returns the right-hand side `h^2 f`.
pub(super) fn interior_row(
    a: &mut BandedMatrix,
    row: usize,
    nu: f64,
    h: f64,
    f: f64,
) -> f64 {
    a.add(row, row - 1, -nu);
    a.add(row, row, 2.0 * nu);
    a.add(row, row + 1, -nu);
    h * h * f
}

/// Adds `nu * h [[u']]` centred at global node `centre` to `row`.
pub(super) fn add_jump(a: &mut BandedMatrix, row: usize, centre: usize, nu: f64) {
    for (c, col) in SCALED_JUMP.iter().zip(centre - 2..) {
        a.add(row, col, nu * c);
    }
}

/// Direct solve of the coupled network: the trace node of `F_j` at `gamma2`
/// carries the flux balance `nu_j [[u_j']] + nu_{j+1} [[u_{j+1}']] = 0`, the
/// node of `F_{j+1}` at `gamma1` the continuity condition.
pub fn monolithic_solve(
    net: &Network,
    disc: &Discretization,
    source: &impl Source,
    bc: &BoundaryData,
) -> Result<Solution> {
    bc.check(net)?;
    let n = net.n_fractures();
    let nodes = disc.nodes();
    let i1 = disc.trace_node(TraceSide::Lower);
    let i2 = disc.trace_node(TraceSide::Upper);
    let gap = nodes - i2 + i1;
    let kl = gap.max(2);
    let ku = gap + 2;
    let mut a = BandedMatrix::zeros(n * nodes, kl, ku);
    let mut rhs = vec![0.0; n * nodes];
    let h = disc.h();
    let kind = net.bc_kind();

    for j in 0..n {
        let off = j * nodes;
        let nu = net.diffusivity(j);
        rhs[off] = boundary_row(&mut a, off, disc, true, kind.dirichlet_at_start(j, n), bc.start[j]);
        rhs[off + nodes - 1] =
            boundary_row(&mut a, off, disc, false, kind.dirichlet_at_end(j, n), bc.end[j]);
        for i in 1..nodes - 1 {
            let row = off + i;
            match disc.side_at(net, j, i) {
                Some(TraceSide::Upper) => {
                    add_jump(&mut a, row, row, nu);
                    add_jump(&mut a, row, off + nodes + i1, net.diffusivity(j + 1));
                }
                Some(TraceSide::Lower) => {
                    a.add(row, row, 1.0);
                    a.add(row, off - nodes + i2, -1.0);
                }
                None => {
                    rhs[row] = interior_row(&mut a, row, nu, h, source.value(j, disc.coord(i)));
                }
            }
        }
    }

    a.factor()?.solve(&mut rhs);
    Ok(Solution {
        fractures: rhs.chunks(nodes).map(<[f64]>::to_vec).collect(),
    })
}
