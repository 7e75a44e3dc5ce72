use core::f64::consts::PI;

use nalgebra::DMatrix;

use super::unitary::{dft_matrix, UnitaryMatrix, UNITARITY_TOL};
use crate::classical::{CatMatrix, KickedParams, MapKind, MapModel};
use crate::error::{Error, Result};
use crate::prelude::*;

/// Quantized cat map. The Gauss-sum average over integer shifts runs over one period `2|t12|`
/// and the result is rescaled by the constant `U†U = cI`.
pub fn quantize_cat(m: &CatMatrix, n: usize) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !m.is_quantizable() {
        return Err(Error::NotQuantizable(format!(
            "t11*t12 = {} and t21*t22 = {} must both be even",
            m.t11 * m.t12,
            m.t21 * m.t22
        )));
    }
    let (t11, t12, t22) = (m.t11 as i128, m.t12 as i128, m.t22 as i128);
    let ni = n as i128;
    let den = 2 * t12.abs() * ni;
    let sign = t12.signum();
    let shifts = 2 * t12.abs();
    let pref = (Complex64::new(0.0, m.t12 as f64 / n as f64)).sqrt() / shifts as f64;
    let mut u = DMatrix::<Complex64>::zeros(n, n);
    for q1 in 0..ni {
        for q2 in 0..ni {
            let mut acc = Complex64::new(0.0, 0.0);
            for mm in 0..shifts {
                let x2 = q2 + mm * ni;
                // N S(q1/N, x2/N) = (t11 q1^2 - 2 q1 x2 + t22 x2^2) / (2 t12 N)
                let num = sign * (t11 * q1 * q1 - 2 * q1 * x2 + t22 * x2 * x2);
                let r = num.rem_euclid(den);
                acc += Complex64::cis(2.0 * PI * r as f64 / den as f64);
            }
            u[(q2 as usize, q1 as usize)] = acc * pref;
        }
    }
    normalize(u)
}

fn normalize(u: DMatrix<Complex64>) -> Result<UnitaryMatrix> {
    let g = u.adjoint() * &u;
    let n = g.nrows();
    let c = (0..n).map(|j| g[(j, j)].re).sum::<f64>() / n as f64;
    if c.is_nan() || c <= 0.0 {
        return Err(Error::NotUnitary(f64::INFINITY));
    }
    let mut defect = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let target = if j == k { c } else { 0.0 };
            defect = defect.max((g[(j, k)] - Complex64::new(target, 0.0)).norm() / c);
        }
    }
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    UnitaryMatrix::new(u / Complex64::new(c.sqrt(), 0.0))
}

/// Quantized baker map `F_N^{-1} · blockdiag(F_{N/2}, F_{N/2})`.
pub fn quantize_baker(n: usize) -> Result<UnitaryMatrix> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::DimensionMismatch { expected: n + (n % 2), got: n });
    }
    let h = n / 2;
    let fh = dft_matrix(h);
    let mut b = DMatrix::<Complex64>::zeros(n, n);
    b.view_mut((0, 0), (h, h)).copy_from(&fh);
    b.view_mut((h, h), (h, h)).copy_from(&fh);
    let finv = dft_matrix(n).adjoint();
    UnitaryMatrix::new(finv * b)
}

/// Quantized kicked map `F^{-1} diag(e^{-iT p_j^2/2ħ}) F diag(e^{-ikV(q_j)/ħ})` with `ħ = 2π/N`
/// and grids `q_j = p_j = 2πj/N`.
pub fn quantize_kicked(params: &KickedParams, n: usize) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let nf = n as f64;
    let hbar = 2.0 * PI / nf;
    let kinetic: Vec<Complex64> = (0..n).map(|j| Complex64::cis(-kinetic_phase(params.period, j, n))).collect();
    let kick: Vec<Complex64> = (0..n)
        .map(|j| {
            let q = 2.0 * PI * j as f64 / nf;
            Complex64::cis(-params.k * params.potential.value(q) / hbar)
        })
        .collect();
    let f = dft_matrix(n);
    let mut kf = f.clone();
    for (row, ph) in kinetic.iter().enumerate() {
        for c in 0..n {
            kf[(row, c)] *= ph;
        }
    }
    let mut u = f.adjoint() * kf;
    for (col, ph) in kick.iter().enumerate() {
        for r in 0..n {
            u[(r, col)] *= ph;
        }
    }
    UnitaryMatrix::new(u)
}

// T p_j^2 / 2ħ = π T j^2 / N; reduced exactly when T is an integer
fn kinetic_phase(period: f64, j: usize, n: usize) -> f64 {
    if period.fract() == 0.0 && period.abs() < 1e9 {
        let r = (period as i128 * j as i128 * j as i128).rem_euclid(2 * n as i128);
        PI * r as f64 / n as f64
    } else {
        PI * period * (j as f64) * (j as f64) / n as f64
    }
}

/// Dispatches on the model kind.
pub fn quantize(model: &MapModel, n: usize) -> Result<UnitaryMatrix> {
    match model.kind() {
        MapKind::Cat(m) => quantize_cat(m, n),
        MapKind::Baker => quantize_baker(n),
        MapKind::Kicked(p) => quantize_kicked(p, n),
    }
}
