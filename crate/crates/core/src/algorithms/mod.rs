//! Statevector pipelines: spectra from periodic orbits, traces from quantum evolution, an
//! integrability probe, and phase estimation of cat-map periods.

mod phase;
mod probe;
mod spectrum;
mod traces;

pub use phase::{
    phase_estimation, phase_estimation_cat, period_from_phases, PeriodEstimate, PhaseCluster, PhaseEstimationRun,
    PhaseInput,
};
pub use probe::{integrability_probe, integrability_probe_unitary, ProbeResult, Verdict};
pub use spectrum::{error_bound, run_spectrum_from_orbits, SpectrumPipelineConfig};
pub use traces::{run_traces_from_quantum, run_traces_from_quantum_model};

use crate::error::{Error, Result};
use crate::prelude::*;
use crate::qsim::AmplificationLog;

/// How register amplitudes are read out at the end of a pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase", tag = "mode"))]
pub enum Readout {
    /// Exact projected amplitudes.
    Exact,
    /// Exact amplitudes plus magnitude estimates from sampled measurements.
    Shots { shots: u64, seed: u64 },
}

/// Outcome of one step check.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Checkpoint {
    pub step: String,
    pub passed: bool,
    pub max_error: f64,
    pub detail: String,
}

/// Estimate of one trace together with its classical reference.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceEstimate {
    pub t: usize,
    pub estimate: Complex64,
    pub oracle: Complex64,
    pub defect: f64,
    /// Quantization error bound, when the pipeline has one.
    pub bound: Option<f64>,
    /// Set when the target overlap vanished and the value is reported as an exact zero.
    pub zero: bool,
    /// `|estimate|` reconstructed from sampled counts (shots readout only).
    pub shot_magnitude: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineResult {
    pub estimates: Vec<TraceEstimate>,
    pub checkpoints: Vec<Checkpoint>,
    pub amplifications: Vec<AmplificationLog>,
    /// Weight outside the `D = 0` component after amplitude imprinting.
    pub residual_d_mass: Option<f64>,
    /// Weight of the in-range (`i < N`) component after state preparation.
    pub valid_weight: Option<f64>,
    pub qubits: usize,
    pub warnings: Vec<String>,
}

impl PipelineResult {
    pub fn max_defect(&self) -> f64 {
        self.estimates.iter().map(|e| e.defect).fold(0.0, f64::max)
    }
}

pub(crate) struct Checks {
    list: Vec<Checkpoint>,
}

impl Checks {
    pub(crate) fn new() -> Self {
        Checks { list: Vec::new() }
    }

    /// Records the check; returns a step-labelled error when it fails.
    pub(crate) fn check(&mut self, step: &str, max_error: f64, tol: f64, detail: String) -> Result<()> {
        let passed = max_error <= tol;
        self.list.push(Checkpoint { step: step.into(), passed, max_error, detail: detail.clone() });
        if passed {
            Ok(())
        } else {
            Err(Error::Checkpoint { step: step.into(), detail: format!("{detail}: error {max_error:e} > {tol:e}") })
        }
    }

    pub(crate) fn into_inner(self) -> Vec<Checkpoint> {
        self.list
    }
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
