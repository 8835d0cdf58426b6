//! Optimized Schwarz methods on staircase discrete fracture networks.
//!
//! * [`network`]: geometry, diffusivities and outer boundary configuration.
//! * [`matrices`]: the trace-error operators `M^{-1} N` for 1D networks and
//!   per Fourier mode for 2D networks, plus a closed-form norm bound.
//! * [`spectral`]: spectral radii and their maxima over modes.
//! * [`convergence`]: two-fracture convergence factors, optimal Robin
//!   parameters and the equioscillation optimizer.
//! * [`solver`]: finite-difference discretization, a monolithic reference
//!   solve and the Schwarz iteration itself.

pub mod convergence;
pub mod error;
pub mod matrices;
pub mod network;
pub mod solver;
pub mod spectral;

pub use convergence::{
    f_symbols, optimal_params_1d, optimize_equioscillation, rho_1d, rho_2d, rho_tilde,
    OptimizationResult, TwoFractureGeometry,
};
pub use error::{OsmError, Result};
pub use matrices::{
    assemble_1d, assemble_dirichlet_1d, assemble_mode_2d, assemble_neumann_1d,
    symmetric_norm_bound, IterationMatrixPair, MatrixKind, RobinParams,
};
pub use network::{BoundaryKind, Network, TraceLayout, TraceSide};
pub use solver::{
    monolithic_solve, observed_vs_predicted, osm_iterate, BoundaryData, Discretization,
    InitialGuess, OsmOptions, OsmRunReport, RateComparison, SourceTerm,
};
pub use spectral::{
    analyze_pair, inf_norm, max_mode_radius, mode_radii, spectral_radius, ModeRange,
    SpectrumReport,
};
