//! Random unitary five-diagonal band matrices on ℓ²(ℤ): transfer-matrix
//! cocycles and Lyapunov exponents, density-of-states estimation from
//! unitary truncations, the Thouless formula linking the two, spectral
//! support arithmetic, and the lattice-path combinatorics controlling
//! analyticity of the density of states.
//!
//! The operator family has matrix elements of constant modulus (r², rt, t²
//! with r² + t² = 1) and random torus phases; setting all phases to zero
//! gives the deterministic "free" operator whose band structure, density of
//! states and Lyapunov exponent are known in closed form and serve as
//! cross-checks throughout.
//!
//! All numerics are generic over the real scalar through [`Real`]
//! (`f32`/`f64`); concrete `f64` aliases for the main types live at the
//! crate root. Exact integer/rational arithmetic backs the balanced-case
//! path identities.
//!
//! ```
//! use ubm::model::{Coefficients, PhaseModel};
//! use ubm::transfer::{lyapunov_estimate, SpectralParameter};
//!
//! // uniform phases at r = t = 1/√2: γ(e^{iλ}) = ln(1/t²) = ln 2
//! let params = Coefficients::<f64>::balanced();
//! let z = SpectralParameter::from_angle(0.7);
//! let est = lyapunov_estimate(z, &PhaseModel::uniform(), params, 5_000, 8, 42).unwrap();
//! assert!((est.gamma - 2.0f64.ln()).abs() < 0.05);
//! ```

pub mod arcs;
pub mod comb;
pub mod eig;
pub mod error;
pub mod laurent;
pub mod mat2;
pub mod model;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod spectrum;
pub mod thouless;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` aliases for the main types.
pub type Coefficients64 = model::Coefficients<f64>;
pub type DistributionSpec64 = model::DistributionSpec<f64>;
pub type PhaseModel64 = model::PhaseModel<f64>;
pub type PhaseField64 = model::PhaseField<f64>;
pub type BandUnitary64 = model::BandUnitary<f64>;
pub type SpectralParameter64 = transfer::SpectralParameter<f64>;
pub type TransferMatrix64 = transfer::TransferMatrix<f64>;
pub type Cocycle64 = transfer::Cocycle<f64>;
pub type TruncatedBlock64 = spectrum::TruncatedBlock<f64>;
pub type SpectralMeasure64 = spectrum::SpectralMeasure<f64>;
pub type ArcUnion64 = arcs::ArcUnion<f64>;
pub type LaurentPolyC64 = laurent::LaurentPoly<scalar::C<f64>>;
