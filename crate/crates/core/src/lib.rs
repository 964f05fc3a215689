//! Capacity analysis and simulation toolkit for multi-radio multi-channel
//! cognitive radio networks viewed as small-world graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`sop`]: spectrum-opportunity probabilities from the preemptive-resume
//!   priority queue (PU on an M/M/1/1 loss system, SUs on M/M/N/K) and the
//!   pairwise connectivity ratio, plus a discrete-event oracle in [`sop::des`].
//! * [`topology`] and [`graph`]: random geometric SU/PU deployments and the
//!   graph quantities the capacity formulas consume (degree, clustering,
//!   path length).
//! * [`shortcuts`]: hub selection, the angular search region and the
//!   create-shortcut handshake, with random and wide-region baselines.
//! * [`assignment`]: slack-ordered channel assignment and a random baseline.
//! * [`capacity`]: consumed links/nodes, per-node capacity and the
//!   sensing-adjusted network capacity.
//! * [`dissemination`]: slot-based flooding latency under PU interruption.
//! * [`harness`]: batch experiments that wire everything together and write
//!   CSV output.

// `!(x > 0.0)` style checks reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod capacity;
pub mod dissemination;
pub mod error;
pub mod graph;
pub mod harness;
pub mod shortcuts;
pub mod sop;
pub mod topology;

pub use error::{Error, Result};
