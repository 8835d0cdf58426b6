//! Finite-difference model of the 1D network and its Schwarz iteration.

mod banded;
mod discretization;
mod monolithic;
mod osm;

pub use banded::{BandedLu, BandedMatrix};
pub use discretization::{Discretization, MIN_SEGMENT_CELLS};
pub use monolithic::{monolithic_solve, BoundaryData, Solution, Source, SourceTerm};
pub use osm::{
    observed_vs_predicted, osm_iterate, InitialGuess, OsmOptions, OsmRunReport, RateComparison,
    SchwarzIteration,
};
