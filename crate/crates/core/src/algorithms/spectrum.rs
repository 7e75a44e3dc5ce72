use alloc::collections::BTreeMap;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ceil_log2, Checks, PipelineResult, Readout, TraceEstimate};
use crate::classical::{orbits_with_invariants, MapKind, MapModel, SymbolCode};
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::qsim::{plan_iterations, Control, Gate, QState, RegisterLayout, DEFAULT_QUBIT_CAP};
use crate::semiclassics::{amplitude_exponent, amplitude_sum, scaling_constants, semiclassical_trace, ScalingConstants};

/// Parameters of the orbit-sum pipeline. Estimates are produced for `1 ≤ t < t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPipelineConfig {
    pub model: MapModel,
    pub t_max: usize,
    /// Hilbert dimension entering the orbit phases.
    pub n: usize,
    pub phase_bits: u32,
    pub amplitude_bits: u32,
    pub constants: ScalingConstants,
    pub readout: Readout,
    pub qubit_cap: usize,
}

impl SpectrumPipelineConfig {
    /// Config with constants computed from the orbits of length below `t_max`.
    pub fn new(model: MapModel, t_max: usize, n: usize, phase_bits: u32, amplitude_bits: u32, readout: Readout) -> Result<Self> {
        if t_max < 2 {
            return Err(Error::Config("t_max must be at least 2".into()));
        }
        let constants = scaling_constants(&model, t_max - 1, amplitude_bits)?;
        Ok(SpectrumPipelineConfig {
            model,
            t_max,
            n,
            phase_bits,
            amplitude_bits,
            constants,
            readout,
            qubit_cap: DEFAULT_QUBIT_CAP,
        })
    }

    pub fn workspace_bits(&self) -> usize {
        self.phase_bits.max(self.amplitude_bits) as usize
    }

    pub fn qubits(&self) -> usize {
        ceil_log2(self.t_max) + self.t_max + self.workspace_bits()
    }
}

/// `ε(b) = (Σ_p A_p)(2π 2^{-b_C} + κ 2^{-b_D})` at length `t`.
pub fn error_bound(config: &SpectrumPipelineConfig, t: usize) -> Result<f64> {
    let s = amplitude_sum(&config.model, t)?;
    Ok(s * (2.0 * PI * (-(config.phase_bits as f64)).exp2() + config.constants.kappa * (-(config.amplitude_bits as f64)).exp2()))
}

struct Codeword {
    phase: f64,
    exponent: f64,
    phase_code: u64,
    amp_code: u64,
}

fn codeword_table(config: &SpectrumPipelineConfig) -> Result<Vec<Vec<Codeword>>> {
    let c = &config.constants;
    let (bc, bd) = (config.phase_bits, config.amplitude_bits);
    let levels_c = 1u64 << bc;
    let max_d = (1u64 << bd) - 1;
    let mut table = vec![Vec::new()];
    for t in 1..config.t_max {
        let orbits = orbits_with_invariants(&config.model, t, config.n)?;
        let mut by_code = BTreeMap::new();
        for o in &orbits {
            let inv = o.invariants()?;
            if inv.amplitude > (-c.big_lambda * t as f64).exp() * (1.0 + 1e-12) {
                return Err(Error::Config(format!(
                    "amplitude {} of a length-{t} orbit exceeds e^(-Λt) with Λ = {}",
                    inv.amplitude, c.big_lambda
                )));
            }
            if let crate::classical::OrbitLabel::Code(code) = &o.label {
                by_code.insert(code.clone(), (inv.phase, amplitude_exponent(inv.amplitude, o.t_p, c.big_lambda, t)));
            }
        }
        let mut row = Vec::with_capacity(1 << t);
        for v in 0..1u64 << t {
            let code = SymbolCode::from_bits(v, t).canonical().primitive();
            let &(phase, exponent) = by_code
                .get(&code)
                .ok_or_else(|| Error::Inconsistent(format!("codeword {code} has no enumerated orbit")))?;
            let phase_code = ((phase / (2.0 * PI) * levels_c as f64).round() as u64) % levels_c;
            let amp_code = ((exponent / c.kappa).round().max(0.0) as u64).min(max_d);
            row.push(Codeword { phase, exponent, phase_code, amp_code });
        }
        table.push(row);
    }
    Ok(table)
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let x = (a - b).rem_euclid_2pi();
    x.min(2.0 * PI - x)
}

trait Wrap2Pi {
    fn rem_euclid_2pi(self) -> f64;
}

impl Wrap2Pi for f64 {
    fn rem_euclid_2pi(self) -> f64 {
        self - 2.0 * PI * (self / (2.0 * PI)).floor()
    }
}

/// Runs the orbit-sum pipeline with a checkpoint after each step.
pub fn run_spectrum_from_orbits(config: &SpectrumPipelineConfig) -> Result<PipelineResult> {
    if !matches!(config.model.kind(), MapKind::Baker) {
        return Err(Error::Unsupported("orbit-sum pipeline needs full-shift symbolic dynamics (baker)".into()));
    }
    let sym = config.model.symbolic()?;
    if sym.alphabet() != 2 || sym.trace_power(1) != 2 || sym.trace_power(2) != 4 {
        return Err(Error::Unsupported("orbit-sum pipeline needs the full binary shift".into()));
    }
    if config.t_max < 2 {
        return Err(Error::Config("t_max must be at least 2".into()));
    }
    if config.phase_bits == 0 || config.amplitude_bits == 0 {
        return Err(Error::Config("phase and amplitude registers need at least one bit".into()));
    }
    if config.amplitude_bits != config.constants.amplitude_bits {
        return Err(Error::Config("amplitude bits differ from the bits used for κ".into()));
    }
    let consts = config.constants;
    let t_max = config.t_max;
    let n_a = ceil_log2(t_max);
    let n_b = t_max;
    let n_w = config.workspace_bits();
    let layout = RegisterLayout::with_cap(&[("A", n_a), ("B", n_b), ("W", n_w)], config.qubit_cap)?;
    let (ra, rb, rw) = (layout.id("A")?, layout.id("B")?, layout.id("W")?);
    let table = codeword_table(config)?;
    let mut checks = Checks::new();
    let mut warnings = Vec::new();
    let mut state = QState::zero(layout.clone());
    let active = |i: usize| {
        let t = layout.value(i, ra) as usize;
        (1..t_max).contains(&t)
    };

    // Step I: e^{-μt} profile on register A
    let mut c_a = 1.0;
    for k in 0..n_a {
        let th = (-consts.mu * (1u64 << k) as f64).exp().atan();
        c_a *= th.cos();
        state.apply_gate(Gate::Ry(th), ra, k, None)?;
    }
    let mut err = 0.0f64;
    for t in 0..1u64 << n_a {
        let idx = layout.index_of(&[(ra, t)])?;
        let expect = c_a * (-consts.mu * t as f64).exp();
        err = err.max((state.amplitude(idx).re - expect).abs() / expect);
    }
    checks.check("I", err, 1e-12, "amplitude of |t>_A against e^(-mu t)".into())?;

    // Step II: uniform codewords on the low t qubits of B
    for t in 1..t_max.min(1 << n_a) {
        let ctl = Control::equals(ra, t as u64);
        for j in 0..t {
            state.apply_gate(Gate::H, rb, j, Some(&ctl))?;
        }
    }
    let mut err = 0.0f64;
    for (i, a) in state.amplitudes().iter().enumerate() {
        let t = layout.value(i, ra) as usize;
        let v = layout.value(i, rb);
        let populated = t < t_max && v < 1u64 << t && layout.value(i, rw) == 0;
        let expect = if populated { c_a * (-consts.mu * t as f64).exp() * (-(t as f64) / 2.0).exp2() } else { 0.0 };
        err = err.max((a - Complex64::new(expect, 0.0)).norm() / c_a);
    }
    checks.check("II", err, 1e-12, "codeword amplitudes against e^(-mu t) 2^(-t/2)".into())?;

    // Step III: write phase codes into the workspace
    let phase_of = |i: usize| -> u64 {
        let t = layout.value(i, ra) as usize;
        if (1..t_max).contains(&t) {
            table[t][layout.value(i, rb) as usize].phase_code
        } else {
            0
        }
    };
    let amp_of = |i: usize| -> u64 {
        let t = layout.value(i, ra) as usize;
        if (1..t_max).contains(&t) {
            table[t][layout.value(i, rb) as usize].amp_code
        } else {
            0
        }
    };
    state.apply_xor(rw, phase_of, "phase oracle")?;
    let lsb_c = 2.0 * PI * (-(config.phase_bits as f64)).exp2();
    let mut err = 0.0f64;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 || !active(i) {
            continue;
        }
        let w = table[layout.value(i, ra) as usize][layout.value(i, rb) as usize].phase;
        let stored = layout.value(i, rw);
        let e = if stored == phase_of(i) { circ_dist(stored as f64 * lsb_c, w) / lsb_c } else { f64::INFINITY };
        err = err.max(e);
    }
    checks.check("III", err, 1.0, "encoded phases within one LSB of the orbit phases (in LSB units)".into())?;

    // Step IV: imprint phases, uncompute, then imprint amplitudes
    let mut global = 0.0;
    for k in 0..config.phase_bits as usize {
        let th = PI * (1u64 << k) as f64 * (-(config.phase_bits as f64)).exp2();
        global -= th;
        state.apply_gate(Gate::Pz(th), rw, k, None)?;
    }
    state.apply_xor(rw, phase_of, "phase oracle uncompute")?;
    let stray = state.probability(|i| layout.value(i, rw) != 0);
    checks.check("IV", stray, 0.0, "workspace cleared after phase uncompute".into())?;
    state.apply_xor(rw, amp_of, "amplitude oracle")?;
    let mut err = 0.0f64;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 || !active(i) {
            continue;
        }
        let cw = &table[layout.value(i, ra) as usize][layout.value(i, rb) as usize];
        err = err.max((layout.value(i, rw) as f64 * consts.kappa - cw.exponent).abs() / consts.kappa);
    }
    checks.check("IV", err, 1.0, "encoded log-amplitudes within one LSB (in LSB units)".into())?;
    let mut c_d = 1.0;
    for k in 0..config.amplitude_bits as usize {
        let th = (-consts.kappa * (1u64 << k) as f64).exp().atan();
        c_d *= th.cos();
        state.apply_gate(Gate::Ry(-th), rw, k, None)?;
    }
    let scale = Complex64::from_polar(c_a * c_d, global);
    let mut err = 0.0f64;
    for (t, row) in table.iter().enumerate().take(t_max).skip(1) {
        for (v, cw) in row.iter().enumerate() {
            let idx = layout.index_of(&[(ra, t as u64), (rb, v as u64)])?;
            let encoded = (-consts.mu * t as f64).exp() * (-(t as f64) / 2.0).exp2()
                * (-consts.kappa * cw.amp_code as f64).exp();
            let expect = scale * Complex64::from_polar(encoded, cw.phase_code as f64 * lsb_c);
            err = err.max((state.amplitude(idx) - expect).norm() / scale.norm());
        }
    }
    checks.check("IV", err, 1e-12, "D=0 amplitudes against the encoded a_p e^(i phi_p)".into())?;
    let residual_d = state.probability(|i| layout.value(i, rw) != 0);
    if residual_d >= 0.5 {
        warnings.push(format!("residual D mass {residual_d:.4} is not small"));
    }

    // Step V: DFT over the codeword qubits
    let before: Vec<Complex64> = (1..t_max)
        .map(|t| {
            (0..1u64 << t)
                .map(|v| state.amplitude(layout.index_of(&[(ra, t as u64), (rb, v)]).unwrap()))
                .sum::<Complex64>()
                * (-(t as f64) / 2.0).exp2()
        })
        .collect();
    for t in 1..t_max.min(1 << n_a) {
        state.apply_dft(rb, t, Some(&Control::equals(ra, t as u64)), false)?;
    }
    let mut err = 0.0f64;
    for t in 1..t_max {
        let idx = layout.index_of(&[(ra, t as u64)])?;
        err = err.max((state.amplitude(idx) - before[t - 1]).norm() / scale.norm());
    }
    checks.check("V", err, 1e-12, "B=0 amplitude against the scaled codeword sum".into())?;

    // Step VI: amplify B=0 ∧ D=0 and read register A
    let target = |i: usize| layout.value(i, rb) == 0 && layout.value(i, rw) == 0;
    let a = state.probability(target);
    let mut amplifications = Vec::new();
    let zero = a <= 0.0;
    if !zero {
        let k = plan_iterations(a)?;
        let log = state.amplitude_amplify(target, k)?;
        checks.check(
            "VI",
            (log.predicted_probability - log.achieved_probability).max(0.0),
            1e-9,
            format!("amplification with k = {k}"),
        )?;
        amplifications.push(log);
    }
    let v = state.project_amplitudes(ra, &[(rb, 0), (rw, 0)])?;
    let tau1 = semiclassical_trace(&config.model, 1, config.n)?;
    // branch t carries e^{(Λ-μ)t} 2^{-t} τ_t up to a t-independent factor
    let profile = |t: usize| ((consts.big_lambda - consts.mu) * t as f64).exp() * (-(t as f64)).exp2();
    let norm1 = v[1] / profile(1);
    let shot_counts = match config.readout {
        Readout::Exact => None,
        Readout::Shots { shots, seed } => {
            let counts = state.sample(shots, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut per_t = vec![0u64; 1 << n_a];
            for (&i, &c) in &counts {
                if target(i) {
                    per_t[layout.value(i, ra) as usize] += c;
                }
            }
            Some(per_t)
        }
    };
    let mut estimates = Vec::with_capacity(t_max - 1);
    for t in 1..t_max {
        let oracle = semiclassical_trace(&config.model, t, config.n)?;
        let bound = error_bound(config, t)?;
        let (estimate, zero_t) = if zero || norm1.norm() == 0.0 {
            (Complex64::new(0.0, 0.0), true)
        } else {
            (tau1 * v[t] / profile(t) / norm1, false)
        };
        let shot_magnitude = shot_counts.as_ref().and_then(|c| {
            (c[1] > 0).then(|| tau1.norm() * (c[t] as f64 / c[1] as f64).sqrt() * profile(1) / profile(t))
        });
        estimates.push(TraceEstimate {
            t,
            estimate,
            oracle,
            defect: (estimate - oracle).norm(),
            bound: Some(bound),
            zero: zero_t,
            shot_magnitude,
        });
    }
    let worst = estimates.iter().map(|e| e.defect / e.bound.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    checks.check("VI", worst, 1.0, "estimates within the quantization bound (ratio to bound)".into())?;
    Ok(PipelineResult {
        estimates,
        checkpoints: checks.into_inner(),
        amplifications,
        residual_d_mass: Some(residual_d),
        valid_weight: None,
        qubits: layout.total_qubits(),
        warnings,
    })
}
