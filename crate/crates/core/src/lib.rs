//! Single-photon W-state nonlocality.
//!
//! Exact measurement statistics for one photon spread over `n` modes, the
//! Bell expression family Ω(n) with its exhaustively certified local bound, the
//! Hardy-type implication check, and noisy finite-shot simulation.

pub mod error;
pub mod inequality;
pub mod lhv;
pub mod measurement;
pub mod noise;
pub mod state;

pub use error::{Error, Result};
pub use inequality::{
    build_omega, evaluate_on_state, omega_closed_form, violation_probability, BellExpression,
    BellTerm,
};
pub use lhv::{
    enumerate_bound, enumerate_bound_with, evaluate_strategy, hardy_implication_check,
    hardy_implication_check_with, mixture_bound_check, BoundCertificate, DeterministicStrategy,
    EnumerationOptions, HardyReport,
};
pub use measurement::{
    Basis, Event, MeasurementSetting, OutcomeAssignment, PartialAssignment, Sign,
};
pub use noise::{
    critical_parameter, estimate_omega, noisy_omega, noisy_term_probability, sample_setting,
    ExpressionEstimate, NoiseKind, NoiseModel, NoisyW, ShotRecord,
};
pub use state::{
    analytic_w_probability, build_vacuum, build_w_state, conditional_probability,
    event_probability, outcome_probability, OutcomeModel, PureState, WState,
};

/// Crate version, stamped into machine-readable outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
