//! Hamiltonian builders.

mod geometric;
mod harper;

pub use geometric::{build_geometric_model, geometric_from_positions, GeometricOptions};
pub use harper::{
    axis_chain_matrix, build_1d_harper, build_2d_direct_sum, build_bloch, build_bloch_chain, bloch_chain_matrix, hopping_amplitude,
    kron_sum, real_kron_sum,
};
