//! Register-structured statevector simulator.

mod layout;
mod state;

pub use layout::{RegId, Register, RegisterLayout, DEFAULT_QUBIT_CAP};
pub use state::{plan_iterations, AmplificationLog, Control, Gate, OpRecord, QState};
