//! Queue stability for scheduled transmissions of finite-length messages
//! on multiaccess and degraded broadcast channels.
//!
//! The crate couples random-coding bounds with a discrete-time
//! processor-sharing queue. Messages of `J` classes wait in queues; each
//! slot a policy picks a schedule `s` of at most `K` messages; the channel
//! turns every schedule into a service quantum (independent decoding) or a
//! codeword length `N(s)` (joint or successive decoding). The modules cover
//! the whole chain:
//!
//! * [`channel`]: channels, input laws, mutual informations, rate regions.
//! * [`exponents`]: error exponents for every decoding scheme.
//! * [`codelen`]: service requirements and minimal codeword lengths.
//! * [`sched`]: schedule spaces and policies.
//! * [`qsim`]: the slotted queue simulator and empirical stability verdicts.
//! * [`regions`]: analytic stability thresholds, rate regions and capacity limits.
//! * [`scenario`]: scenario files and the command implementations behind the binary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod codelen;
pub mod error;
pub mod exponents;
mod lp;
pub mod qsim;
pub mod regions;
pub mod scenario;
pub mod sched;

pub use error::{Error, Result};
