use crate::classical::{orbits_with_invariants, MapKind, MapModel};
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::quantum::{quantize, trace_powers};

/// `τ_t = Σ_p A_p e^{iφ_p}` over distinct orbits of period dividing `t`.
pub fn semiclassical_trace(model: &MapModel, t: usize, n: usize) -> Result<Complex64> {
    let orbits = orbits_with_invariants(model, t, n)?;
    let mut terms = Vec::with_capacity(orbits.len());
    for o in &orbits {
        let inv = o.invariants()?;
        terms.push(Complex64::from_polar(inv.amplitude, inv.phase));
    }
    Ok(terms.iter().sum())
}

/// `Σ_p A_p` over orbits of period dividing `t`.
pub fn amplitude_sum(model: &MapModel, t: usize) -> Result<f64> {
    let orbits = orbits_with_invariants(model, t, 1)?;
    orbits.iter().map(|o| o.invariants().map(|i| i.amplitude)).sum()
}

/// Outcome of the per-step Maslov fit.
#[derive(Clone, Debug, PartialEq)]
pub struct MaslovCalibration {
    pub per_step: i64,
    pub reference_n: usize,
    /// `|τ_1 - tr U|` at the reference dimension with the chosen index.
    pub residual: f64,
}

/// Reference dimension used by default: the smallest convenient `N` for cat maps, and a larger one
/// for the baker whose `t = 1` trace carries an `O(ln N)` diffraction term at small `N`.
pub fn default_calibration_dim(model: &MapModel) -> usize {
    match model.kind() {
        MapKind::Baker => 64,
        _ => 5,
    }
}

/// Chooses the per-step Maslov index in `{0,1,2,3}` minimising `|τ_1 - tr U_N|` at `n_ref`.
pub fn calibrate_maslov(model: &MapModel, n_ref: usize) -> Result<MaslovCalibration> {
    let exact = quantize(model, n_ref)?.trace();
    let bare = model.clone().with_maslov(0);
    let tau0 = semiclassical_trace(&bare, 1, n_ref)?;
    let mut best: Option<MaslovCalibration> = None;
    // a uniform per-step index multiplies every fixed-point term of τ_1 by e^{-iνπ/2}
    for nu in 0..4i64 {
        let tau = tau0 * Complex64::cis(-(nu as f64) * core::f64::consts::FRAC_PI_2);
        let residual = (tau - exact).norm();
        if best.as_ref().is_none_or(|b| residual < b.residual - 1e-12) {
            best = Some(MaslovCalibration { per_step: nu, reference_n: n_ref, residual });
        }
    }
    let best = best.ok_or_else(|| Error::Calibration("no candidate".into()))?;
    if tau0.norm() < 1e-9 && exact.norm() < 1e-9 {
        return Err(Error::Calibration(format!("τ_1 and tr U both vanish at N = {n_ref}")));
    }
    Ok(best)
}

/// Model with the calibrated per-step Maslov index at the default reference dimension.
pub fn calibrated(model: &MapModel) -> Result<(MapModel, MaslovCalibration)> {
    let cal = calibrate_maslov(model, default_calibration_dim(model))?;
    Ok((model.clone().with_maslov(cal.per_step), cal))
}

/// Exact and semiclassical trace at one `(N, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub n: usize,
    pub t: usize,
    pub exact: Complex64,
    pub semiclassical: Complex64,
    pub quantum_estimate: Option<Complex64>,
}

impl TraceReport {
    pub fn abs_defect(&self) -> f64 {
        (self.semiclassical - self.exact).norm()
    }

    pub fn rel_defect(&self) -> f64 {
        let d = self.exact.norm();
        if d > 0.0 {
            self.abs_defect() / d
        } else {
            f64::INFINITY
        }
    }
}

/// Reports for `t = 1..=t_max` at dimension `n`.
pub fn trace_reports(model: &MapModel, n: usize, t_max: usize) -> Result<Vec<TraceReport>> {
    let u = quantize(model, n)?;
    let exact = trace_powers(&u, t_max)?;
    (1..=t_max)
        .map(|t| {
            Ok(TraceReport {
                n,
                t,
                exact: exact.values[t - 1],
                semiclassical: semiclassical_trace(model, t, n)?,
                quantum_estimate: None,
            })
        })
        .collect()
}
