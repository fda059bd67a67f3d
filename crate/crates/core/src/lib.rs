//! System-level simulator for multi-cell cellular networks with device-to-device
//! (D2D) capable users.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] builds hexagonal multi-cell layouts and drops users.
//! * [`channel`] holds the link budget, noise, SINR and Shannon capacity, plus
//!   the empirical boundary-interference distribution used for cells that lack a
//!   physical neighbour.
//! * [`rrm`] turns one snapshot into a 0-1 linear program for joint mode
//!   selection and scheduling and solves it exactly.
//! * [`sim`] drives the snapshot loop, accounts uplink/downlink throughput and
//!   computes the D2D gain metrics.
//! * [`parallel`] fans independent replications out over a thread pool (or runs
//!   them sequentially when the `parallel` feature is disabled).

pub mod channel;
pub mod parallel;
pub mod rrm;
pub mod sim;
pub mod topology;

pub use channel::RadioParams;
pub use rrm::{Decision, SchedulerPolicy, SharingScheme};
pub use sim::{GainReport, RunResult, SimConfig};
pub use topology::{CellLayout, CellType, UePopulation};
