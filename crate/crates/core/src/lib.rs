//! Learning control for a mobile robot that must empty a data buffer over a
//! wireless channel whose rate depends on the robot position and is not
//! known in advance.
//!
//! Two problems are covered:
//!
//! * **transmission** ([`pt`]): empty the buffer as fast as possible, with
//!   free final position and rectangular obstacles;
//! * **navigation and transmission** ([`pn`]): reach a goal position in
//!   minimum time with the buffer empty on arrival.
//!
//! [`world`] holds the simulator, [`llr`] and [`pn::fit_snr`] the rate
//! estimators, [`baseline`] a myopic gradient-ascent controller and
//! [`harness`] the experiment runner used by the `txnav` command line tool.

// Range checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod episode;
pub mod error;
pub mod gridfn;
pub mod harness;
pub mod llr;
pub mod numopt;
pub mod pn;
pub mod pt;
pub mod rng;
pub mod world;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;
