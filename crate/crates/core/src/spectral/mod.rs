//! Diagonalisation, band scans along pump paths, gap detection and
//! bulk/edge/corner classification.

mod classify;
mod eig;
mod scan;

pub use classify::{
    boundary_weights, classify_probabilities, classify_state, BoundaryWeights, Corner, RegionOptions, Side, StateClass,
};
pub use eig::{eig_hermitian, eig_hermitian_matrix, eig_real_symmetric, eigvals_hermitian, Eigen};
pub use scan::{find_gaps, phase_path, scan_bands, track_state, BandScan, Gap, PathPreset, ScanOptions, TrackedState};
