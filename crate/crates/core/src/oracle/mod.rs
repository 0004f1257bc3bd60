//! Exact references: sinc-DVR grid spectra, spectral Kubo correlators, the
//! finite-`N` Kubo transform, and closed-form harmonic results.

mod grid;
mod harmonic;
mod kubo;
pub mod quadrature;

pub use grid::{diagonalize, diagonalize_with_hbar, EigenSystem, GridSpec};
pub use harmonic::{
    centroid_density_reference, harmonic_caq_reference, harmonic_centroid_mean,
    harmonic_centroid_variances, harmonic_j_kernel, harmonic_kubo_qq, harmonic_swarm_trace,
    SWARM_TOL,
};
pub use kubo::{
    discrete_kubo_transform, exact_kubo_correlator, kubo_weight, kubo_weight_quadrature,
    lambda_quadrature_kubo, DiscreteKubo, COMPLETENESS_TOL, IMAGINARY_TOL,
};
