use core::f64::consts::PI;

use crate::classical::{MapKind, MapModel};
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::quantum::{quantize, trace_powers};

/// A local maximum of the Fourier transform over `N`, read as an action mod 1.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActionPeak {
    pub bin: usize,
    /// Action mod 1, `bin / N_max`.
    pub frequency: f64,
    /// `|X_f|` divided by the number of populated slots.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionSpectrum {
    pub n_max: usize,
    pub magnitudes: Vec<f64>,
    pub peaks: Vec<ActionPeak>,
}

/// Whether the model has a quantization at dimension `n` (baker: even `n` only).
pub fn quantizable_at(model: &MapModel, n: usize) -> bool {
    match model.kind() {
        MapKind::Baker => n >= 2 && n.is_multiple_of(2),
        _ => n >= 1,
    }
}

/// `tr U_N^t` for `N = 0..n_max`, with zeros in slots without a quantization.
pub fn trace_sweep(model: &MapModel, t: usize, n_max: usize) -> Result<Vec<Complex64>> {
    (0..n_max).map(|n| trace_at(model, t, n)).collect()
}

pub fn trace_at(model: &MapModel, t: usize, n: usize) -> Result<Complex64> {
    if !quantizable_at(model, n) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(trace_powers(&quantize(model, n)?, t)?.values[t - 1])
}

/// Fourier transform over `N` of exact traces with peak detection.
pub fn action_spectrum(model: &MapModel, t: usize, n_max: usize) -> Result<ActionSpectrum> {
    if n_max < 8 {
        return Err(Error::InvalidParameter(format!("N_max = {n_max} is below the minimum resolution of 8")));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let traces = trace_sweep(model, t, n_max)?;
    let populated = (0..n_max).filter(|&n| quantizable_at(model, n)).count();
    action_spectrum_from_traces(&traces, populated)
}

/// `X_f = Σ_N x_N e^{-2πi fN/N_max}` with a flat window; peaks are local maxima above three
/// times the median magnitude.
pub fn action_spectrum_from_traces(traces: &[Complex64], populated: usize) -> Result<ActionSpectrum> {
    let n_max = traces.len();
    if n_max < 8 {
        return Err(Error::InvalidParameter(format!("N_max = {n_max} is below the minimum resolution of 8")));
    }
    if populated == 0 {
        return Err(Error::InsufficientData("no populated trace slots".into()));
    }
    let magnitudes: Vec<f64> = (0..n_max)
        .map(|f| {
            traces
                .iter()
                .enumerate()
                .map(|(n, x)| x * Complex64::cis(-2.0 * PI * ((f * n) % n_max) as f64 / n_max as f64))
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    let mut sorted = magnitudes.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = if n_max % 2 == 1 {
        sorted[n_max / 2]
    } else {
        0.5 * (sorted[n_max / 2 - 1] + sorted[n_max / 2])
    };
    let threshold = 3.0 * median;
    let peaks = (0..n_max)
        .filter(|&f| {
            let m = magnitudes[f];
            m > threshold && m > magnitudes[(f + n_max - 1) % n_max] && m >= magnitudes[(f + 1) % n_max]
        })
        .map(|f| ActionPeak { bin: f, frequency: f as f64 / n_max as f64, weight: magnitudes[f] / populated as f64 })
        .collect();
    Ok(ActionSpectrum { n_max, magnitudes, peaks })
}

/// Circular distance between two actions mod 1.
pub fn action_distance(a: f64, b: f64) -> f64 {
    let x = (a - b) - (a - b).floor();
    x.min(1.0 - x)
}
