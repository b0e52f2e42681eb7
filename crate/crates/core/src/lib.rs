//! Computable multipartite Gaussian correlation measure.
//!
//! For a `k`-party Gaussian state with covariance matrix `Γ` and reduced
//! blocks `Aⱼⱼ`, the measure is `M⁽ᵏ⁾ = 1 − det Γ / Πⱼ det Aⱼⱼ`. It vanishes
//! exactly on product states, never increases under local Gaussian channels,
//! and respects the hierarchy and monogamy relations checked in [`verify`].

pub mod channels;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod rng;
pub mod verify;

pub use channels::{apply_channel, apply_symplectic, GaussianChannel, SymplecticTransform};
pub use error::{Error, Result};
pub use gaussian::{PartitionedCovariance, PureFactors, SstsParams, StandardFormParams};
pub use linalg::SymMatrix;
pub use measure::{measure, MeasureReport};
