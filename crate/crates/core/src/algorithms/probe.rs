use core::f64::consts::PI;

use super::traces::{prepare_copied, Copied};
use crate::classical::MapModel;
use crate::error::Result;
use crate::qsim::{plan_iterations, DEFAULT_QUBIT_CAP};
use crate::quantum::{quantize, UnitaryMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    IntegrableLike,
    ChaoticLike,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeResult {
    pub n: usize,
    /// Round budget `⌈(π/4)√N⌉`.
    pub round_budget: usize,
    /// Rounds spent selecting the diagonal `B = C`.
    pub diagonal_rounds: usize,
    pub diagonal_probability: f64,
    /// Probability of `B = 0` within the diagonal branch after the Fourier transform,
    /// `|tr U²|² / (M Σ_i |(U²)_ii|²)`.
    pub success_probability: f64,
    /// Rounds a search for `B = 0` would need from that probability.
    pub planned_rounds: Option<usize>,
    /// `|tr U²|` from the dense matrix, for reference.
    pub exact_trace: f64,
    pub verdict: Verdict,
}

pub fn integrability_probe(model: &MapModel, n: usize) -> Result<ProbeResult> {
    integrability_probe_unitary(&quantize(model, n)?)
}

/// Classifies `U` by how strongly the `t = 2` trace concentrates the `B = 0` amplitude:
/// traces of order `√N` give a success probability of order one, traces of order one give `O(1/N)`.
pub fn integrability_probe_unitary(u: &UnitaryMatrix) -> Result<ProbeResult> {
    let n = u.dim();
    let u2 = u.pow(2);
    let Copied { mut state, b, c, d, .. } = prepare_copied(n, &[], DEFAULT_QUBIT_CAP)?;
    let layout = state.layout().clone();
    state.apply_unitary(b, &u2, None)?;
    let round_budget = (PI / 4.0 * (n as f64).sqrt()).ceil() as usize;
    let diag = |i: usize| layout.value(i, b) == layout.value(i, c) && layout.value(i, d) == 0;
    let a1 = state.probability(diag);
    let k1 = plan_iterations(a1)?.min(round_budget);
    let log = state.amplitude_amplify(diag, k1)?;
    state.apply_xor(c, |i| layout.value(i, b), "uncopy C")?;
    state.apply_dft(b, layout.width(b), None, false)?;
    let branch = state.probability(|i| layout.value(i, c) == 0 && layout.value(i, d) == 0);
    let hit = state.probability(|i| layout.value(i, b) == 0 && layout.value(i, c) == 0 && layout.value(i, d) == 0);
    let success_probability = hit / branch;
    let planned_rounds = if success_probability > 0.0 { Some(plan_iterations(success_probability)?) } else { None };
    Ok(ProbeResult {
        n,
        round_budget,
        diagonal_rounds: k1,
        diagonal_probability: log.achieved_probability,
        success_probability,
        planned_rounds,
        exact_trace: u2.trace().norm(),
        verdict: if success_probability >= 0.5 { Verdict::IntegrableLike } else { Verdict::ChaoticLike },
    })
}
