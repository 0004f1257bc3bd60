//! Kubo correlators from trajectory ensembles, delta-filtered densities,
//! spectra and error bars.

mod correlators;
mod density;
mod series;
mod spectrum;

pub use correlators::{
    cmd_kubo_correlator, correlator_from_ensemble, kubo_momentum_correlator_via_derivative,
    rpmd_kubo_correlator, rpmd_kubo_correlator_time_reversed,
};
pub(crate) use correlators::block_average;
pub use density::{
    density_from_samples, filtered_conditional_average, filtered_density_estimate,
    integrate_conditional, DensityGrid, DensityTable, FilterSpec,
};
pub use series::{CorrelationSeries, SeriesMetadata};
pub use spectrum::{spectrum, spectrum_padded, Spectrum, Window, DEFAULT_PAD};
pub use crate::stats::{block_error, block_errors};
