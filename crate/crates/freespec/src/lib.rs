//! Free-probability random-matrix toolkit.
//!
//! The crate computes spectral distributions of random-matrix ensembles and
//! data covariance matrices, Stieltjes and R transforms, free additive
//! convolution of spectra, and residual-based decomposition of an observed
//! composite event into candidate atom events.
//!
//! The pipeline, bottom to top:
//!
//! * [`ensembles`] — GUE/LUE sampling and covariance matrices of sensor
//!   panels;
//! * [`spectral`] — eigenvalues, empirical spectral distributions, the
//!   semicircle / Marchenko-Pastur / Wishart-sum laws, Kolmogorov distance;
//! * [`xform`] — Stieltjes transforms and their inversion, moments, free and
//!   classical cumulants, the functional inverse of G, the R-transform;
//! * [`freeconv`] — the addition algebra on R-signatures and full free
//!   additive convolution of densities;
//! * [`events`] — synthetic scenes, spike counting, and composite-event
//!   decomposition by residual scoring.

pub mod ensembles;
pub mod error;
pub mod events;
pub mod freeconv;
mod rng;
pub mod spectral;
pub mod xform;

pub use ensembles::{covariance, sample_gue, sample_lue, DataMatrix, HermitianMatrix, MatrixOrigin};
pub use error::{Error, Result};
pub use events::{
    count_spikes, count_spikes_with_slack, decompose, decompose_with_options, residual_score,
    signature, simulate_scene, spike_band_contour, ComboScore, DecompositionResult,
    EventSignature, ResidualConvention, ResidualOptions, SceneConfig, SceneSource, SourceProfile,
};
pub use freeconv::{
    align_to_w_grid, free_convolve_density, free_convolve_many, r_add, r_scale,
    wishart_sum_reference, wishart_sum_support, AlignedR,
};
pub use spectral::{
    eigenvalues, esd_cdf, esd_histogram, kolmogorov_distance, law_cdf, law_density, law_moment,
    law_support, DensityEstimate, LawSpec, SpectrumSample,
};
pub use xform::{
    classical_cumulants, classical_cumulants_to_moments, free_cumulants,
    free_cumulants_to_moments, invert_stieltjes_density, inverse_g, moments, r_contour,
    r_transform, stieltjes, stieltjes_analytic, stieltjes_empirical, stieltjes_from_density,
    ContourSpec, GSource, RSignature,
};

pub use num_complex::Complex64;
