//! Quantized maps as dense unitaries and their exact spectral data.

mod quantize;
mod random;
mod spectral;
mod unitary;

pub use quantize::{quantize, quantize_baker, quantize_cat, quantize_kicked};
pub use random::{haar_unitary, random_state};
pub use spectral::{
    char_poly_from_traces, det_neg, eigenphases, eigensystem, eigensystem_with_cap, resurgence_residual,
    spectral_density, trace_powers, trace_powers_from_phases, trace_powers_with_cap, CharPoly, Eigensystem,
    TraceSeries, DENSE_DIAG_CAP, MATRIX_POWER_CAP,
};
pub(crate) use spectral::phase_of;
pub use unitary::{dft_matrix, UnitaryMatrix, UNITARITY_TOL};

#[cfg(test)]
mod tests;
