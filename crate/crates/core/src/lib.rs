//! Multi-period event scheduling: periodic timetabling where every event
//! repeats with its own period.
//!
//! The crate covers the whole pipeline: validated event-activity networks,
//! congruence-based timetable reconstruction, sharp spanning trees and cycle
//! bases, mixed-integer formulations, an exact branch-and-bound solver, passenger
//! routing, and file formats.

pub mod congruence;
pub mod exec;
pub mod fixtures;
pub mod formulation;
pub mod generate;
pub mod io;
pub mod network;
pub mod num;
pub mod quotient;
pub mod routing;
pub mod solver;
pub mod tree;

pub use exec::Execution;
pub use network::{
    Activity, ActivityId, ActivityKind, Event, EventActivityNetwork, EventId, FeasibilityReport,
    NetworkBuilder, NetworkError, OrientedArc, Tension, Timetable, Violation,
};
pub use num::Rational;
