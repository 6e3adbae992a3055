//! Bell-nonlocality robustness of symmetric qubit Dicke states subject to
//! excitation loss and particle loss.
//!
//! The crate is organised bottom-up:
//!
//! * [`state`]: Dicke labels, Dicke mixtures and the two loss channels.
//! * [`bell`]: the multipartite Hardy expression and the MABK expression
//!   evaluated on Dicke mixtures under symmetric equatorial measurements.
//! * [`oracle`]: a dense brute-force simulator used as ground truth.
//! * [`ansatz`], [`optimize`], [`threshold`]: measurement-angle families,
//!   the angle optimizer and the loss-threshold searches.
//!
//! Measurement angles are Bloch angles: setting `j` measures
//! `cos(alpha_j) Z + sin(alpha_j) X` on every party, and outcome `+1` is the
//! label "0" of the Hardy expression.

pub mod angles;
pub mod ansatz;
pub mod bell;
pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod optimize;
pub mod oracle;
pub mod state;
pub mod threshold;

pub use angles::MeasurementPair;
pub use ansatz::{ansatz_angles, AnsatzFamily};
pub use bell::{
    beta_coefficient, hardy_value, hardy_value_mixture, mabk_closed_vacuum, mabk_closed_w,
    mabk_value_mixture, symmetric_correlator, BellValue, EvalOptions, InequalityKind, Precision,
};
pub use combinatorics::log_binomial;
pub use error::{Error, Result};
pub use optimize::{optimize_angles, OptimizeOutcome, OptimizerConfig};
pub use state::{make_pure, DickeLabel, DickeMixture, LossKind, LossModel};
pub use threshold::{
    ansatz_family, threshold_excitation, threshold_excitation_w, threshold_particle, AngleSource,
    Flag, Method, ThresholdOptions, ThresholdResult,
};
