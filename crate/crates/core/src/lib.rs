//! Joint antenna-position and transmit-beamforming optimization for a linear
//! movable-antenna (MA) array serving several cooperating receivers.
//!
//! With the beamformer set to the principal eigenvector of the channel Gram
//! matrix, the received SNR is `P_S * lambda_max(B(x)) / sigma^2`, so the
//! position problem reduces to maximizing the principal eigenvalue of `B(x)`.
//! [`optimizer::mm_optimize`] does that by minorization-maximization;
//! [`baselines`] holds the fixed-array, grid-selection and alternating
//! schemes it is compared against, and [`harness`] drives the experiments.

pub mod baselines;
pub mod eigen;
pub mod error;
pub mod harness;
pub mod model;
pub mod optimizer;
pub mod projection;

pub use error::{Error, Result};
pub use model::{AntennaPositions, Beamformer, ChannelGram, ScenarioConfig};
pub use optimizer::{mm_optimize, MMOptions, SolveResult};
