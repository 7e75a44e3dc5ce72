use core::f64::consts::PI;

use nalgebra::{DMatrix, Schur};

use super::unitary::UnitaryMatrix;
use crate::error::{Error, Result};
use crate::prelude::*;

/// Largest dimension diagonalized densely by default.
pub const DENSE_DIAG_CAP: usize = 512;
/// Largest dimension for traces by repeated multiplication.
pub const MATRIX_POWER_CAP: usize = 4096;

/// `tr U^t` for `t = 1..=t_max`; `values[t-1]` holds `tr U^t`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl TraceSeries {
    pub fn t_max(&self) -> usize {
        self.values.len()
    }

    /// `tr U^t`; `t = 0` gives `N`.
    pub fn get(&self, t: usize) -> Option<Complex64> {
        if t == 0 {
            Some(Complex64::new(self.n as f64, 0.0))
        } else {
            self.values.get(t - 1).copied()
        }
    }
}

pub fn trace_powers(u: &UnitaryMatrix, t_max: usize) -> Result<TraceSeries> {
    trace_powers_with_cap(u, t_max, MATRIX_POWER_CAP)
}

/// Traces by repeated multiplication `U^t = U^{t-1} U`.
pub fn trace_powers_with_cap(u: &UnitaryMatrix, t_max: usize, cap: usize) -> Result<TraceSeries> {
    let n = u.dim();
    if n > cap {
        return Err(Error::CapExceeded { what: "matrix-power dimension", value: n as u64, cap: cap as u64 });
    }
    if t_max == 0 {
        return Err(Error::InvalidParameter("t_max must be at least 1".into()));
    }
    let mut values = Vec::with_capacity(t_max);
    let mut p = u.matrix().clone();
    values.push(p.trace());
    for _ in 1..t_max {
        p = &p * u.matrix();
        values.push(p.trace());
    }
    Ok(TraceSeries { n, values })
}

/// Traces from eigenphases, `Σ_k e^{itθ_k}`.
pub fn trace_powers_from_phases(phases: &[f64], t_max: usize) -> TraceSeries {
    let values = (1..=t_max)
        .map(|t| phases.iter().map(|&th| Complex64::cis(t as f64 * th)).sum())
        .collect();
    TraceSeries { n: phases.len(), values }
}

/// Eigenphases in `[0, 2π)` and the matching eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub phases: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

pub fn eigensystem(u: &UnitaryMatrix) -> Result<Eigensystem> {
    eigensystem_with_cap(u, DENSE_DIAG_CAP)
}

pub fn eigensystem_with_cap(u: &UnitaryMatrix, cap: usize) -> Result<Eigensystem> {
    let n = u.dim();
    if n > cap {
        return Err(Error::CapExceeded { what: "dense diagonalization dimension", value: n as u64, cap: cap as u64 });
    }
    let schur = Schur::try_new(u.matrix().clone(), f64::EPSILON, 1000 * n.max(10)).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let mut idx: Vec<(f64, usize)> = (0..n).map(|k| (phase_of(t[(k, k)]), k)).collect();
    idx.sort_by(|a, b| a.0.total_cmp(&b.0));
    let phases = idx.iter().map(|x| x.0).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| q[(r, idx[c].1)]);
    Ok(Eigensystem { phases, vectors })
}

pub fn eigenphases(u: &UnitaryMatrix) -> Result<Vec<f64>> {
    Ok(eigensystem(u)?.phases)
}

pub(crate) fn phase_of(z: Complex64) -> f64 {
    let a = z.arg();
    let a = if a < 0.0 { a + 2.0 * PI } else { a };
    if a >= 2.0 * PI {
        0.0
    } else {
        a
    }
}

/// `det(-U)`, from eigenphases when the dimension allows, else by LU.
pub fn det_neg(u: &UnitaryMatrix) -> Result<Complex64> {
    let n = u.dim();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if n <= DENSE_DIAG_CAP {
        let ph = eigenphases(u)?;
        Ok(Complex64::cis(ph.iter().sum::<f64>()) * sign)
    } else {
        Ok(u.matrix().clone().determinant() * sign)
    }
}

/// Coefficients of `det(I - xU) = Σ_k β_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    pub beta: Vec<Complex64>,
    /// `max_k |β_{N-k} - det(-U) conj(β_k)|` when both sides were available.
    pub resurgence_residual: Option<f64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.beta.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &b| acc * x + b)
    }
}

fn newton(traces: &TraceSeries, kmax: usize) -> Vec<Complex64> {
    let mut beta = Vec::with_capacity(kmax + 1);
    beta.push(Complex64::new(1.0, 0.0));
    for k in 1..=kmax {
        let s: Complex64 = (1..=k).map(|t| beta[k - t] * traces.values[t - 1]).sum();
        beta.push(-s / k as f64);
    }
    beta
}

/// Newton recurrence `β_k = -(1/k) Σ_{t≤k} β_{k-t} tr U^t`.
///
/// With traces up to `N` every coefficient comes from the recurrence and, given `det(-U)`,
/// the resurgence residual is reported. With traces only up to `⌈N/2⌉` the upper half is
/// completed from `β_{N-k} = det(-U) conj(β_k)`, which then requires `det(-U)`.
pub fn char_poly_from_traces(traces: &TraceSeries, n: usize, det_neg_u: Option<Complex64>) -> Result<CharPoly> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be positive".into()));
    }
    if traces.t_max() >= n {
        let beta = newton(traces, n);
        let resurgence_residual = det_neg_u.map(|d| resurgence_residual(&beta, d));
        return Ok(CharPoly { beta, resurgence_residual });
    }
    let half = n.div_ceil(2);
    let d = match det_neg_u {
        Some(d) if traces.t_max() >= half => d,
        Some(_) => {
            return Err(Error::InsufficientData(format!("need {half} traces, have {}", traces.t_max())))
        }
        None => {
            return Err(Error::InsufficientData(format!(
                "need {n} traces, or {half} together with det(-U); have {}",
                traces.t_max()
            )))
        }
    };
    let low = newton(traces, half);
    let mut beta = vec![Complex64::new(0.0, 0.0); n + 1];
    beta[..=half].copy_from_slice(&low);
    for k in 0..=n - half {
        if n - k > half {
            beta[n - k] = d * low[k].conj();
        }
    }
    let resurgence_residual = Some(resurgence_residual(&beta, d));
    Ok(CharPoly { beta, resurgence_residual })
}

pub fn resurgence_residual(beta: &[Complex64], det_neg_u: Complex64) -> f64 {
    let n = beta.len() - 1;
    (0..=n).map(|k| (beta[n - k] - det_neg_u * beta[k].conj()).norm()).fold(0.0, f64::max)
}

/// `d(θ) = N/2π + (1/2π) Σ_{t≤T} (e^{-itθ} tr U^t + c.c.)` on the grid.
pub fn spectral_density(traces: &TraceSeries, theta_grid: &[f64], t_cutoff: usize) -> Result<Vec<f64>> {
    if t_cutoff > traces.t_max() {
        return Err(Error::InsufficientData(format!(
            "cutoff {t_cutoff} exceeds {} available traces",
            traces.t_max()
        )));
    }
    Ok(theta_grid
        .iter()
        .map(|&th| {
            let osc: f64 =
                (1..=t_cutoff).map(|t| 2.0 * (Complex64::cis(-(t as f64) * th) * traces.values[t - 1]).re).sum();
            (traces.n as f64 + osc) / (2.0 * PI)
        })
        .collect())
}
