//! Simulation of preemptive single-server queues under size-aware and blind
//! scheduling policies, with regenerative estimators for heavy-traffic
//! experiments.

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod instance;
pub mod policies;
pub mod simulator;
pub mod sweep;
pub mod verify;

pub use distributions::{DistributionSpec, RandomStream};
pub use error::{Error, Result};
pub use instance::{CycleRecord, Instance, Job, JobId};
pub use policies::{PolicyKind, Scheduler};
pub use simulator::{simulate, simulate_with, SimOptions, SimResult};
