use crate::classical::{orbits_with_invariants, MapModel};
use crate::error::{Error, Result};
use crate::prelude::*;

/// Constants fixing the amplitude encoding of the orbit-sum pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingConstants {
    /// Topological entropy `λ`.
    pub lambda: f64,
    /// `Λ` with `A_p ≤ e^{-Λt}` on every enumerated orbit.
    pub big_lambda: f64,
    /// `Λ - λ/2`.
    pub mu: f64,
    /// Value of one least significant bit of the amplitude register.
    pub kappa: f64,
    pub amplitude_bits: u32,
}

/// Codeword amplitude `a_c = A_p / t_p = |det(I - M_p^r)|^{-1/2}` and the exponent
/// `x = -(ln a_c + Λt) ≥ 0` stored in the amplitude register.
pub fn amplitude_exponent(amplitude: f64, t_p: usize, big_lambda: f64, t: usize) -> f64 {
    -((amplitude / t_p as f64).ln() + big_lambda * t as f64)
}

/// `Λ` from the enumerated orbits with `t ≤ t_max`, and `κ` as the register LSB covering the
/// largest exponent with `amplitude_bits` bits.
pub fn scaling_constants(model: &MapModel, t_max: usize, amplitude_bits: u32) -> Result<ScalingConstants> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("t_max must be at least 1".into()));
    }
    if amplitude_bits == 0 || amplitude_bits > 32 {
        return Err(Error::InvalidParameter("amplitude bits must be in 1..=32".into()));
    }
    let lambda = model.entropy()?;
    let mut per_t = Vec::new();
    let mut big_lambda = f64::INFINITY;
    for t in 1..=t_max {
        let orbits = orbits_with_invariants(model, t, 1)?;
        for o in &orbits {
            big_lambda = big_lambda.min(-o.invariants()?.amplitude.ln() / t as f64);
        }
        per_t.push(orbits);
    }
    if !big_lambda.is_finite() {
        return Err(Error::InvalidParameter("no periodic orbits enumerated".into()));
    }
    let mut x_max = 0.0f64;
    for (i, orbits) in per_t.iter().enumerate() {
        for o in orbits {
            x_max = x_max.max(amplitude_exponent(o.invariants()?.amplitude, o.t_p, big_lambda, i + 1));
        }
    }
    let levels = ((1u64 << amplitude_bits) - 1) as f64;
    let kappa = if x_max > 0.0 { x_max / levels } else { 1.0 / levels };
    Ok(ScalingConstants { lambda, big_lambda, mu: big_lambda - lambda / 2.0, kappa, amplitude_bits })
}
