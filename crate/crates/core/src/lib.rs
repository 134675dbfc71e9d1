//! Analytic and Monte Carlo performance models for a multi-antenna multicast
//! downlink that delivers information and power simultaneously.
//!
//! The transmitter sweeps randomized beams across sub-blocks; each receiver
//! either decodes a sub-block or harvests its energy. Two switching rules are
//! covered: periodic switching (a fixed fraction of sub-blocks is decoded)
//! and threshold switching (a sub-block is decoded when its beamformed power
//! falls at or below a threshold, so the strongest sub-blocks are harvested).
//!
//! Module map:
//! - [`params`]: system/beam/policy parameter types shared by every layer.
//! - [`specfun`]: the special functions the closed forms need.
//! - [`quad`], [`rootfind`]: adaptive quadrature and bracketing kernels.
//! - [`channel`]: channel and sub-block power distributions plus samplers.
//! - [`analytic`]: per-block and fading-averaged rate/power, outage, and
//!   scaling expressions for Gaussian beams.
//! - [`altbeams`]: closed forms for unitary and binary beam variants.
//! - [`mcsim`]: deterministic Monte Carlo estimators and the multicast
//!   network simulation.

// Validation uses negated comparisons (`!(x > 0.0)`) so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod altbeams;
pub mod analytic;
pub mod channel;
pub mod mcsim;
pub mod params;
pub mod quad;
pub mod rootfind;
pub mod specfun;

pub use analytic::AnalyticError;
pub use channel::{ChannelRealization, RngStream};
pub use mcsim::{Estimate, McConfig, McError, NetworkResult, NetworkSpec};
pub use params::{BeamKind, BeamScheme, ParamError, PointSource, REPoint, SwitchPolicy, SystemParams};
