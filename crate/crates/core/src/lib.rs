//! Rate-region exploration for two-user discrete memoryless broadcast channels
//! with transmitter side information.
//!
//! The crate models state-dependent broadcast channels together with the
//! auxiliary-variable strategies that parameterize their single-letter rate
//! bounds. On top of an exact finite-probability layer it provides
//!
//! * evaluators for the inner and outer bounds on the achievable rate region,
//!   both for the plain side-information setting and for the variant where
//!   each message must stay confidential from the unintended receiver,
//! * a numerical audit of the information identities (Csiszar sum identity,
//!   Fano's inequality, chain rule, the genie-bound gap identity) that the
//!   converse arguments rest on, and
//! * a Pareto-frontier search over strategy space with weighted-sum
//!   scalarization, time-sharing convexification, and an exhaustive lattice
//!   oracle for tiny instances.
//!
//! All information quantities are in bits. Everything is deterministic given
//! the configured seed, including parallel runs.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod identity;
pub mod prob;
pub mod search;

pub use error::{Error, Result};

/// Tolerance on the total mass of a joint distribution.
pub const JOINT_NORM_TOL: f64 = 1e-12;

/// Tolerance on the total mass of a freshly composed joint before it is
/// renormalized.
pub const COMPOSE_NORM_TOL: f64 = 1e-10;

/// Tolerance applied when validating channel and strategy tables from
/// external input.
pub const INPUT_NORM_TOL: f64 = 1e-9;

/// Default tolerance for the Markov-chain audit.
pub const DEFAULT_MARKOV_TOL: f64 = 1e-9;

/// Default cap on dense table sizes.
pub const DEFAULT_MAX_CELLS: usize = 1_000_000;
