//! Middleware-independent multi-object tracking toolkit for fixed-perspective
//! (infrastructure/roadside) localization.
//!
//! The toolkit provides a unified object model and the full discrete-time
//! tracking cycle Prediction -> Detection -> Association -> Update ->
//! Management, plus a deterministic scenario simulator, an offline evaluation
//! suite, and an assignment-solver benchmark harness.

pub mod angles;
pub mod association;
pub mod error;
pub mod evaluation;
pub mod management;
pub mod motion;
pub mod object;
pub mod pipeline;
pub mod records;
pub mod scenario;
pub mod update;

pub use error::{Error, Result};
pub use object::{
    ClassVector, Detection, DimensionVector, Object, ObjectClass, ObjectList, StateMask,
    StateVector, TrackStatus,
};
