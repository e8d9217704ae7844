//! Spectra of truncated blocks and their statistics: boundary-condition
//! truncations, dense and secular eigenphase routes, empirical spectral
//! measures, density-of-states moments, free-case closed forms, and the
//! support theorem's arc arithmetic.

pub mod free;
pub mod measure;
pub mod moments;
pub mod secular;
pub mod support;
pub mod truncate;

pub use free::{band_functions, free_dos, free_dos_moment, integrate_dk0, sigma0, BandFunctions, FreeDos};
pub use measure::{Histogram, MeasureSummary, SpectralMeasure};
pub use moments::{dos_moments, MomentEstimate};
pub use secular::{boundary_vectors, secular_roots, BoundaryVectors, SecularOutcome};
pub use support::{predicted_support, support_check, SupportReport};
pub use truncate::{
    counting_vs_projected_defects, pooled_eigenphases, truncate, truncate_free, TruncatedBlock,
};
