//! Semiclassical traces, action spectra and cat-map period functions.

mod actions;
mod periods;
mod scaling;
mod trace;

pub use actions::{
    action_distance, action_spectrum, action_spectrum_from_traces, quantizable_at, trace_at, trace_sweep,
    ActionPeak, ActionSpectrum,
};
pub use periods::{
    classical_period, dist_2pi, period_functions, period_functions_with_budget, period_phase, quantum_period,
    PeriodRecord, PERIOD_SEARCH_BUDGET,
};
pub use scaling::{amplitude_exponent, scaling_constants, ScalingConstants};
pub use trace::{
    amplitude_sum, calibrate_maslov, calibrated, default_calibration_dim, semiclassical_trace, trace_reports,
    MaslovCalibration, TraceReport,
};
