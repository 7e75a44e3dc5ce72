use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ceil_log2, Checks, PipelineResult, Readout, TraceEstimate};
use crate::classical::MapModel;
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::qsim::{plan_iterations, Control, Gate, QState, RegId, RegisterLayout, DEFAULT_QUBIT_CAP};
use crate::quantum::{quantize, UnitaryMatrix};

/// Registers `B`, `C` of `m` qubits and flag `D`, prepared as `Σ_i |i⟩_B |i⟩_C |[i ≥ N]⟩_D / √M`
/// (plus any registers listed in `extra`, which are left in `|0⟩`).
pub(crate) struct Copied {
    pub state: QState,
    pub b: RegId,
    pub c: RegId,
    pub d: RegId,
    pub valid_weight: f64,
}

pub(crate) fn prepare_copied(n: usize, extra: &[(&str, usize)], cap: usize) -> Result<Copied> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let m = ceil_log2(n).max(1);
    let mut spec: Vec<(&str, usize)> = extra.to_vec();
    spec.extend_from_slice(&[("B", m), ("C", m), ("D", 1)]);
    let layout = RegisterLayout::with_cap(&spec, cap)?;
    let (b, c, d) = (layout.id("B")?, layout.id("C")?, layout.id("D")?);
    let mut state = QState::zero(layout.clone());
    for k in 0..m {
        state.apply_gate(Gate::H, b, k, None)?;
    }
    state.apply_xor(c, |i| layout.value(i, b), "copy B into C")?;
    state.apply_xor(d, |i| (layout.value(i, b) >= n as u64) as u64, "flag padding")?;
    let valid_weight = state.probability(|i| layout.value(i, d) == 0);
    Ok(Copied { state, b, c, d, valid_weight })
}

/// Estimates of `tr U^t` for `1 ≤ t < t_max` from the register pipeline, checked against dense
/// matrix powers after every step.
pub fn run_traces_from_quantum(u: &UnitaryMatrix, t_max: usize, readout: Readout) -> Result<PipelineResult> {
    run_traces_with_cap(u, t_max, readout, DEFAULT_QUBIT_CAP)
}

pub fn run_traces_from_quantum_model(model: &MapModel, n: usize, t_max: usize, readout: Readout) -> Result<PipelineResult> {
    run_traces_from_quantum(&quantize(model, n)?, t_max, readout)
}

fn run_traces_with_cap(u: &UnitaryMatrix, t_max: usize, readout: Readout, cap: usize) -> Result<PipelineResult> {
    if t_max < 2 {
        return Err(Error::Config("t_max must be at least 2".into()));
    }
    let n = u.dim();
    let n_a = ceil_log2(t_max).max(1);
    let Copied { mut state, b, c, d, valid_weight } = prepare_copied(n, &[("A", n_a)], cap)?;
    let layout = state.layout().clone();
    let a = layout.id("A")?;
    let m_dim = 1usize << layout.width(b);
    let branches = 1usize << n_a;
    let mut checks = Checks::new();
    let mut warnings = Vec::new();

    // Step I
    for k in 0..n_a {
        state.apply_gate(Gate::H, a, k, None)?;
    }
    let expect = n as f64 / m_dim as f64;
    checks.check("I", (valid_weight - expect).abs(), 1e-12, format!("D=0 weight {valid_weight:.6} against N/M"))?;
    if valid_weight <= 0.5 {
        warnings.push(format!("D=0 weight {valid_weight:.4} does not exceed 1/2"));
    }

    // Step II: U^t on B in branch A = t
    for s in 1..branches {
        state.apply_unitary(b, u, Some(&Control::at_least(a, s as u64)))?;
    }
    let powers: Vec<UnitaryMatrix> = (0..branches as u64).map(|t| u.pow(t)).collect();
    let norm = 1.0 / ((branches * m_dim) as f64).sqrt();
    let mut err = 0.0f64;
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let t = layout.value(idx, a) as usize;
        let (j, i) = (layout.value(idx, b) as usize, layout.value(idx, c) as usize);
        let flagged = layout.value(idx, d) == 1;
        let expect = match (flagged, i < n, j < n) {
            (false, true, true) => powers[t].get(j, i) * norm,
            (true, false, false) if i == j => Complex64::new(norm, 0.0),
            _ => Complex64::new(0.0, 0.0),
        };
        err = err.max((amp - expect).norm() / norm);
    }
    checks.check("II", err, 1e-10, "register amplitudes against dense powers U^t".into())?;

    // Step III: select the diagonal, Fourier transform B, select B = 0
    let mut amplifications = Vec::new();
    let diag = |i: usize| layout.value(i, b) == layout.value(i, c) && layout.value(i, d) == 0;
    let a1 = state.probability(diag);
    amplifications.push(state.amplitude_amplify(diag, plan_iterations(a1)?)?);
    state.apply_xor(c, |i| layout.value(i, b), "uncopy C")?;
    state.apply_dft(b, layout.width(b), None, false)?;
    let traces: Vec<Complex64> = powers.iter().map(|p| p.trace()).collect();
    let zero_pins = [(b, 0u64), (c, 0u64), (d, 0u64)];
    let v = state.project_amplitudes(a, &zero_pins)?;
    let scale = v[0] / n as f64;
    let err = (0..branches).map(|t| (v[t] - scale * traces[t]).norm()).fold(0.0, f64::max) / (scale.norm() * n as f64);
    checks.check("III", err, 1e-10, "B=0 amplitudes proportional to tr U^t".into())?;
    let target = |i: usize| layout.value(i, b) == 0 && layout.value(i, c) == 0 && layout.value(i, d) == 0;
    let a2 = state.probability(target);
    let k2 = plan_iterations(a2)?;
    let log = state.amplitude_amplify(target, k2)?;
    checks.check(
        "III",
        (log.predicted_probability - log.achieved_probability).max(0.0),
        1e-9,
        format!("amplification with k = {k2}"),
    )?;
    amplifications.push(log);

    // Step IV: read register A and rescale by the classically computed tr U (or by N via t = 0)
    let v = state.project_amplitudes(a, &zero_pins)?;
    let tr1 = u.trace();
    let (anchor, anchor_t) = if tr1.norm() > 1e-12 { (tr1, 1) } else { (Complex64::new(n as f64, 0.0), 0) };
    let r = anchor / v[anchor_t];
    let shot_counts = match readout {
        Readout::Exact => None,
        Readout::Shots { shots, seed } => {
            let counts = state.sample(shots, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut per_t = vec![0u64; branches];
            for (&i, &k) in &counts {
                if target(i) {
                    per_t[layout.value(i, a) as usize] += k;
                }
            }
            Some(per_t)
        }
    };
    let tiny = 1e-12 * v[0].norm();
    let estimates = (1..t_max)
        .map(|t| {
            let zero = v[t].norm() <= tiny;
            let estimate = if zero { Complex64::new(0.0, 0.0) } else { v[t] * r };
            let shot_magnitude = shot_counts.as_ref().and_then(|c| {
                (c[anchor_t] > 0).then(|| anchor.norm() * (c[t] as f64 / c[anchor_t] as f64).sqrt())
            });
            TraceEstimate {
                t,
                estimate,
                oracle: traces[t],
                defect: (estimate - traces[t]).norm(),
                bound: None,
                zero,
                shot_magnitude,
            }
        })
        .collect();
    Ok(PipelineResult {
        estimates,
        checkpoints: checks.into_inner(),
        amplifications,
        residual_d_mass: None,
        valid_weight: Some(valid_weight),
        qubits: layout.total_qubits(),
        warnings,
    })
}
