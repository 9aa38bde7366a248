//! Simulation of P systems with simplex channels and a firing squad
//! synchronization program for strongly connected digraphs.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod fssp;
pub mod multiset;
pub mod pattern;
pub mod rule;
pub mod symbol;
pub mod topology;
pub mod trace;

pub use engine::{
    CellState, Engine, Granularity, HaltReason, Selection, SystemConfiguration, Trace,
};
pub use error::{ParseError, RuleError, SimulationError, TopologyError, TraceError};
pub use fssp::{
    build_fssp_program, check_synchronization, default_budget, initial_configuration, simulate,
    SyncFailure, SyncReport,
};
pub use multiset::Multiset;
pub use pattern::{Bindings, PatArg, Pattern, Var};
pub use rule::{GroundRule, Multiplicity, Program, Rule, RuleMode, StateId};
pub use symbol::{Arg, CellId, Symbol};
pub use topology::{Digraph, DigraphFile, TopologyMetrics, ValidationReport};
pub use trace::{CellRecord, TraceRecord};
