//! Pair correlation functions for exclusion processes on discrete domains.
//!
//! A PCF compares the number of agent pairs observed at each separation with
//! the number expected under uniform random placement: values above one mean
//! aggregation, below one segregation, and a correctly calibrated PCF sits at
//! exactly one for uncorrelated data. This crate provides:
//!
//! * [`lattice`] — square, triangular, hexagonal and cubic grids with
//!   exclusion occupancy, periodic/non-periodic boundaries and the valid
//!   distance domain of every combination;
//! * [`metric`] — taxicab, uniform (Chebyshev), Euclidean-annular and
//!   rectilinear distances with unordered pair-count histograms;
//! * [`norm`] — exact closed-form site-pair counts `s_d(m)` and expected
//!   pair counts, evaluated in integer/rational arithmetic;
//! * [`profile`] — PCF assembly `f(m) = c(m)/E[c̄(m)]`, the Rectilinear and
//!   Annular comparison PCFs, averaging and the first-minimum statistic;
//! * [`graph`] — the General PCF on arbitrary site graphs via per-source
//!   BFS distances, plus the grid→graph bridge used for cross-validation;
//! * [`pattern`] — seeded generators: uniform random occupancy, chessboard,
//!   diagonal stripes, concentric circles, a proliferation agent-based
//!   model, perturbed-grid Voronoi lattices, aggregation and segregation;
//! * [`oracle`] — brute-force enumeration validating every analytic formula;
//! * [`io`] — occupancy/graph/profile file formats and PGM/PPM ingestion.
//!
//! With the default `parallel` feature, pair counting, BFS sweeps and the
//! oracle run data-parallel via rayon; results are bit-identical to the
//! sequential build.

pub mod error;
pub mod graph;
pub mod io;
pub mod lattice;
pub mod metric;
pub mod norm;
pub mod oracle;
pub mod pattern;
pub mod profile;

pub use error::{Error, Result};
pub use graph::{build_distance_matrix, graph_pcf, grid_to_graph, GeneralLattice};
pub use lattice::{
    distance_domain, make_grid, BoundaryKind, Coord, Dims, DistanceDomain, OccupancyGrid,
    TessellationKind,
};
pub use metric::{
    annular_bin_counts, count_agent_pairs, neighbor_list, pair_distance, rectilinear_counts,
    Bandwidth, MetricKind, PairCounts,
};
pub use norm::{expected_annular, expected_pairs, expected_rectilinear, site_pairs_analytic};
pub use profile::{
    annular_profile, average_profiles, first_minimum, pcf_profile, rectilinear_profile,
    PcfProfile, Value,
};
