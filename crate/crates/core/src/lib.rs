//! Degrees-of-freedom laboratory for the full-duplex MIMO 3-way channel.
//!
//! * [`bounds`]: closed-form cut-set and genie-aided upper bounds.
//! * [`allocation`]: optimal transmit/receive antenna allocation with exact
//!   certificates (closed form, rational LP enumeration, grid search).
//! * [`schemes`]: zero-forcing / null-space achievable schemes and their
//!   numerical verification.
//! * [`rate`]: Monte-Carlo sum rates and high-SNR slope estimation.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod allocation;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod rate;
pub mod rational;
pub mod schemes;
pub mod sweep;

pub use channel::{AntennaConfig, AntennaSplit, ChannelSet, IntegerSplit, MessageConfig, MessageId, MessageSet};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use rational::Rational;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 1;
