//! Staircase fracture network geometry.
//!
//! Fractures `F_1 .. F_N` share a common length `L` and local coordinate
//! `tau in [0, L]`. Fracture `j` meets fracture `j + 1` at trace `S_j`; on
//! fracture `j` that trace sits at `gamma2`, on fracture `j + 1` at `gamma1`.
//! Hence the first fracture carries one trace at `gamma2`, the last one trace
//! at `gamma1`, and every interior fracture both.

use crate::error::{domain, Result};

/// Outer boundary configuration of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// Homogeneous Dirichlet data at both ends of every fracture.
    DirichletEverywhere,
    /// Dirichlet only at the left end of the first fracture and the right end
    /// of the last fracture; Neumann everywhere else.
    NeumannInterior,
}

impl BoundaryKind {
    /// Whether fracture `j` (0-based) of an `n`-fracture network has a
    /// Dirichlet condition at `tau = 0`.
    pub fn dirichlet_at_start(self, j: usize, n: usize) -> bool {
        let _ = n;
        match self {
            BoundaryKind::DirichletEverywhere => true,
            BoundaryKind::NeumannInterior => j == 0,
        }
    }

    /// Whether fracture `j` (0-based) has a Dirichlet condition at `tau = L`.
    pub fn dirichlet_at_end(self, j: usize, n: usize) -> bool {
        match self {
            BoundaryKind::DirichletEverywhere => true,
            BoundaryKind::NeumannInterior => j + 1 == n,
        }
    }
}

/// Which of a fracture's traces a trace unknown refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceSide {
    /// The trace at `gamma1`, shared with the previous fracture.
    Lower,
    /// The trace at `gamma2`, shared with the next fracture.
    Upper,
}

impl TraceSide {
    pub fn opposite(self) -> Self {
        match self {
            TraceSide::Lower => TraceSide::Upper,
            TraceSide::Upper => TraceSide::Lower,
        }
    }
}

/// A validated staircase network. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n_fractures: usize,
    length: f64,
    gamma1: f64,
    gamma2: f64,
    diffusivities: Vec<f64>,
    bc_kind: BoundaryKind,
}

impl Network {
    pub fn build_staircase(
        n_fractures: usize,
        length: f64,
        gamma1: f64,
        gamma2: f64,
        diffusivities: Vec<f64>,
        bc_kind: BoundaryKind,
    ) -> Result<Self> {
        if n_fractures < 2 {
            return domain("n_fractures", format!("need at least 2 fractures, got {n_fractures}"));
        }
        if !(length.is_finite() && length > 0.0) {
            return domain("length", format!("must be positive and finite, got {length}"));
        }
        if !(gamma1.is_finite() && gamma1 > 0.0) {
            return domain("gamma1", format!("must lie in (0, L), got {gamma1}"));
        }
        if !(gamma2.is_finite() && gamma2 < length) {
            return domain("gamma2", format!("must lie in (0, L), got {gamma2}"));
        }
        if gamma1 >= gamma2 {
            return domain("gamma1", "gamma1 >= gamma2");
        }
        if diffusivities.len() != n_fractures {
            return domain(
                "diffusivities",
                format!("expected {n_fractures} values, got {}", diffusivities.len()),
            );
        }
        if let Some(bad) = diffusivities.iter().find(|nu| !(nu.is_finite() && **nu > 0.0)) {
            return domain("diffusivities", format!("all entries must be positive, got {bad}"));
        }
        Ok(Network {
            n_fractures,
            length,
            gamma1,
            gamma2,
            diffusivities,
            bc_kind,
        })
    }

    /// Network with the same diffusivity on every fracture.
    pub fn uniform(
        n_fractures: usize,
        length: f64,
        gamma1: f64,
        gamma2: f64,
        nu: f64,
        bc_kind: BoundaryKind,
    ) -> Result<Self> {
        Self::build_staircase(n_fractures, length, gamma1, gamma2, vec![nu; n_fractures], bc_kind)
    }

    pub fn n_fractures(&self) -> usize {
        self.n_fractures
    }

    /// Number of traces `M = N - 1`.
    pub fn trace_count(&self) -> usize {
        self.n_fractures - 1
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn diffusivities(&self) -> &[f64] {
        &self.diffusivities
    }

    pub fn diffusivity(&self, fracture: usize) -> f64 {
        self.diffusivities[fracture]
    }

    pub fn bc_kind(&self) -> BoundaryKind {
        self.bc_kind
    }

    /// Same geometry with a different boundary configuration.
    pub fn with_bc(&self, bc_kind: BoundaryKind) -> Self {
        Network {
            bc_kind,
            ..self.clone()
        }
    }

    /// Total number of trace-value unknowns, `2(N - 2) + 2`.
    pub fn unknown_count(&self) -> usize {
        2 * (self.n_fractures - 2) + 2
    }

    /// Position of a trace in local coordinates.
    pub fn trace_position(&self, side: TraceSide) -> f64 {
        match side {
            TraceSide::Lower => self.gamma1,
            TraceSide::Upper => self.gamma2,
        }
    }

    /// Traces present on fracture `j`, in increasing coordinate order.
    pub fn sides(&self, fracture: usize) -> &'static [TraceSide] {
        if fracture == 0 {
            &[TraceSide::Upper]
        } else if fracture + 1 == self.n_fractures {
            &[TraceSide::Lower]
        } else {
            &[TraceSide::Lower, TraceSide::Upper]
        }
    }

    /// Index of the trace unknown `(fracture, side)` in the stacked vector
    /// `(e_1, e_2^1, e_2^2, ..., e_N)`. Panics if the fracture has no such trace.
    pub fn unknown_index(&self, fracture: usize, side: TraceSide) -> usize {
        assert!(
            self.sides(fracture).contains(&side),
            "fracture {fracture} has no {side:?} trace"
        );
        match (fracture, side) {
            (0, _) => 0,
            (j, TraceSide::Lower) => 2 * j - 1,
            (j, TraceSide::Upper) => 2 * j,
        }
    }

    /// Index of trace `S_m` (0-based) touched by `(fracture, side)`.
    pub fn trace_of(&self, fracture: usize, side: TraceSide) -> usize {
        match side {
            TraceSide::Lower => fracture - 1,
            TraceSide::Upper => fracture,
        }
    }

    /// The fracture on the other side of the trace at `(fracture, side)`.
    pub fn neighbour(&self, fracture: usize, side: TraceSide) -> usize {
        match side {
            TraceSide::Lower => fracture - 1,
            TraceSide::Upper => fracture + 1,
        }
    }

    pub fn trace_layout(&self) -> TraceLayout {
        let traces = (0..self.n_fractures)
            .map(|j| self.sides(j).iter().map(|s| self.trace_position(*s)).collect())
            .collect();
        TraceLayout { traces }
    }
}

/// Local trace coordinates per fracture.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLayout {
    traces: Vec<Vec<f64>>,
}

impl TraceLayout {
    pub fn fracture(&self, j: usize) -> &[f64] {
        &self.traces[j]
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Total number of trace values over all fractures.
    pub fn unknown_count(&self) -> usize {
        self.traces.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.traces.iter().map(Vec::as_slice)
    }
}
