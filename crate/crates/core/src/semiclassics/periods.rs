use core::f64::consts::PI;

use crate::classical::CatMatrix;
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::quantum::{eigenphases, quantize_cat, UnitaryMatrix};

/// Default cap on the number of powers tried when searching for a period.
pub const PERIOD_SEARCH_BUDGET: u64 = 1 << 20;

/// Classical and quantum periods of a cat map at dimension `N`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeriodRecord {
    pub n: usize,
    pub g: u64,
    pub n_period: u64,
    /// `arg (U^n)_{00}` in `[0, 2π)`; absent when the matrix has no quantization.
    pub phi: Option<f64>,
    /// `max_j dist(n θ_j - φ, 2πZ)`.
    pub lattice_residual: Option<f64>,
}

fn mul_mod(a: &[[i128; 2]; 2], b: &[[i128; 2]; 2], m: i128) -> [[i128; 2]; 2] {
    let e = |i: usize, j: usize| (a[i][0] * b[0][j] + a[i][1] * b[1][j]).rem_euclid(m);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Smallest `k ≥ 1` with `M^k ≡ I (mod n)`.
pub fn classical_period(m: &CatMatrix, n: usize, budget: u64) -> Result<u64> {
    first_power(m, n as i128, budget, |p| p[0][0] == 1 % n as i128 && p[1][1] == 1 % n as i128 && p[0][1] == 0 && p[1][0] == 0)
}

/// Smallest `k ≥ 1` with `M^k ≡ I (mod N)` for odd `N`; for even `N` the diagonal is taken mod `N`
/// and the off-diagonal mod `2N`.
pub fn quantum_period(m: &CatMatrix, n: usize, budget: u64) -> Result<u64> {
    let ni = n as i128;
    if n % 2 == 1 {
        return classical_period(m, n, budget);
    }
    first_power(m, 2 * ni, budget, |p| {
        p[0][0].rem_euclid(ni) == 1 % ni && p[1][1].rem_euclid(ni) == 1 % ni && p[0][1] == 0 && p[1][0] == 0
    })
}

fn first_power(m: &CatMatrix, modulus: i128, budget: u64, done: impl Fn(&[[i128; 2]; 2]) -> bool) -> Result<u64> {
    if modulus < 1 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let a = m.as_array();
    let base = [[a[0][0].rem_euclid(modulus), a[0][1].rem_euclid(modulus)], [a[1][0].rem_euclid(modulus), a[1][1].rem_euclid(modulus)]];
    let mut p = base;
    for k in 1..=budget {
        if done(&p) {
            return Ok(k);
        }
        p = mul_mod(&p, &base, modulus);
    }
    Err(Error::BudgetExceeded { needed: budget + 1, budget })
}

/// Distance from `x` to the nearest multiple of `2π`.
pub fn dist_2pi(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).floor();
    y.min(2.0 * PI - y)
}

/// `(φ, lattice residual)` for a unitary with `U^n ∝ I`.
pub fn period_phase(u: &UnitaryMatrix, n_period: u64) -> Result<(f64, f64)> {
    let p = u.pow(n_period);
    let z = p.get(0, 0);
    let dim = u.dim();
    let mut defect = 0.0f64;
    for j in 0..dim {
        for k in 0..dim {
            let target = if j == k { z } else { Complex64::new(0.0, 0.0) };
            defect = defect.max((p.get(j, k) - target).norm());
        }
    }
    if defect > 1e-8 || (z.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::Inconsistent(format!(
            "U^{n_period} is not proportional to the identity (defect {defect:e}); quantization inconsistent"
        )));
    }
    let phi = crate::quantum::phase_of(z);
    let residual = eigenphases(u)?
        .iter()
        .map(|&th| dist_2pi(n_period as f64 * th - phi))
        .fold(0.0, f64::max);
    Ok((phi, residual))
}

/// Periods `g(N)` and `n(N)`, and for quantizable matrices the phase `φ(N)` and lattice residual.
pub fn period_functions(m: &CatMatrix, n: usize) -> Result<PeriodRecord> {
    period_functions_with_budget(m, n, PERIOD_SEARCH_BUDGET)
}

pub fn period_functions_with_budget(m: &CatMatrix, n: usize, budget: u64) -> Result<PeriodRecord> {
    if n < 2 {
        return Err(Error::InvalidParameter("N must be at least 2".into()));
    }
    let g = classical_period(m, n, budget)?;
    let n_period = quantum_period(m, n, budget)?;
    let (phi, lattice_residual) = if m.is_quantizable() {
        let u = quantize_cat(m, n)?;
        let (phi, res) = period_phase(&u, n_period)?;
        (Some(phi), Some(res))
    } else {
        (None, None)
    };
    Ok(PeriodRecord { n, g, n_period, phi, lattice_residual })
}
