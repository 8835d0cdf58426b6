use crate::error::{domain, Result};
use crate::network::{Network, TraceSide};

/// Uniform grid shared by all fractures, aligned with both trace positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    length: f64,
    h: f64,
    cells: usize,
    lower_node: usize,
    upper_node: usize,
}

/// Minimum number of cells between consecutive traces or boundaries.
pub const MIN_SEGMENT_CELLS: usize = 4;

impl Discretization {
    /// Grid with mesh size at most `h_target`, refined until both traces
    /// fall on grid nodes.
    pub fn new(net: &Network, h_target: f64) -> Result<Self> {
        let l = net.length();
        if !(h_target.is_finite() && h_target > 0.0 && h_target < l) {
            return domain("h", format!("must lie in (0, L), got {h_target}"));
        }
        let start = (l / h_target - 1e-9).ceil() as usize;
        let aligned = |g: f64, cells: usize| {
            let x = g / l * cells as f64;
            let r = x.round();
            ((x - r).abs() < 1e-8 * cells as f64).then_some(r as usize)
        };
        for cells in start..=start.saturating_mul(64) {
            let (Some(i1), Some(i2)) = (aligned(net.gamma1(), cells), aligned(net.gamma2(), cells))
            else {
                continue;
            };
            let segs = [i1, i2 - i1, cells - i2];
            if segs.iter().any(|s| *s < MIN_SEGMENT_CELLS) {
                return domain(
                    "h",
                    format!("{cells} cells leave fewer than {MIN_SEGMENT_CELLS} cells in a segment"),
                );
            }
            return Ok(Discretization {
                length: l,
                h: l / cells as f64,
                cells,
                lower_node: i1,
                upper_node: i2,
            });
        }
        domain("h", format!("no grid near h = {h_target} aligns with the traces"))
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i == self.cells {
            self.length
        } else {
            i as f64 * self.h
        }
    }

    pub fn trace_node(&self, side: TraceSide) -> usize {
        match side {
            TraceSide::Lower => self.lower_node,
            TraceSide::Upper => self.upper_node,
        }
    }

    /// Trace side located at node `i` of `fracture`, if any.
    pub fn side_at(&self, net: &Network, fracture: usize, i: usize) -> Option<TraceSide> {
        net.sides(fracture)
            .iter()
            .copied()
            .find(|s| self.trace_node(*s) == i)
    }
}

/// `h` times the one-sided derivative jump `u'(t-) - u'(t+)` at node `t`:
/// coefficients on nodes `t-2 ..= t+2`. Exact for quadratics on each side.
pub(crate) const SCALED_JUMP: [f64; 5] = [0.5, -2.0, 3.0, -2.0, 0.5];

/// `h u'(0)` and `h u'(L)` one-sided stencils on the first/last three nodes.
pub(crate) const SCALED_START_DERIVATIVE: [f64; 3] = [-1.5, 2.0, -0.5];
pub(crate) const SCALED_END_DERIVATIVE: [f64; 3] = [0.5, -2.0, 1.5];

pub(crate) fn scaled_jump(u: &[f64], t: usize) -> f64 {
    SCALED_JUMP
        .iter()
        .zip(&u[t - 2..=t + 2])
        .map(|(c, v)| c * v)
        .sum()
}
