//! Lattices, volumes of vector families, Hermite bases of sublattices and successive minima.

mod bohr;
mod gram;
pub mod intmat;
mod minima;
mod sublattice;

pub use bohr::{bohr_structure, refine_structure, slab_concentration, BohrChecks, BohrStructure, RawBohr, RefineParams, SlabReport, Discard};
pub use gram::{base_times_height_check, dist_to_span, gram_volume, volume_dichotomy, Dichotomy};
pub use intmat::rational_rank;
pub use minima::{box_norm, lll, successive_minima, MinimaConfig, SuccessiveMinima, MAX_EXACT_DIM};
pub use sublattice::{
    coords_in_basis, count_points_in_subspace, for_each_box_point, hnf_sub_basis, integral_point_basis, points_in_subspace,
    IntegralBasis, SubBasis, SubspaceCount, BOX_BUDGET,
};
