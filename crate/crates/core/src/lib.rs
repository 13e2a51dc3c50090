//! State discrimination on a three-level nuclear spin: qudit algebra, the
//! USD / IDP / Helstrom measurement schemes, pulse compilation, a noisy
//! readout simulator and the sweep harness behind the `qsd` binary.

pub mod error;
pub mod harness;
pub mod protocols;
pub mod pulse;
pub mod qudit;
pub mod readout;

pub use error::{Error, Result};
pub use harness::{run_sweep, RunConfig};
pub use protocols::{
    helstrom_bound, ideal_stats, Branch, IdealStats, Prepared, Protocol, ProtocolKind, StatePair, SusdBasis,
};
pub use pulse::{compile_protocol, verify_schedule, PulseSchedule, Transition, TwoLevelRotation};
pub use qudit::{
    born_probabilities, validate_povm, Dim, Level, Operator, Outcome, OutcomeDistribution, Povm, StateVector,
};
pub use readout::{run_batch, Experiment, Mode, NoiseProfile, SweepRow};
