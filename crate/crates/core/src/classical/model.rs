use core::f64::consts::PI;

use crate::prelude::*;


use crate::error::{Error, Result};

/// Point on the torus. Cat and baker maps live on `[0,1)^2`, kicked maps on `[0,2π)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TorusPoint {
    pub q: f64,
    pub p: f64,
}

impl TorusPoint {
    pub const fn new(q: f64, p: f64) -> Self {
        TorusPoint { q, p }
    }

    /// Distance on the torus of the given period (componentwise wrap, max norm).
    pub fn torus_distance(&self, other: &TorusPoint, period: f64) -> f64 {
        let d = |a: f64, b: f64| {
            let x = wrap(a - b, period);
            x.min(period - x)
        };
        d(self.q, other.q).max(d(self.p, other.p))
    }
}

/// Integer matrix in SL(2,Z) acting on `(p, q)` as `p' = t11 p + t12 q`, `q' = t21 p + t22 q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CatMatrix {
    pub t11: i64,
    pub t12: i64,
    pub t21: i64,
    pub t22: i64,
}

impl CatMatrix {
    /// Validates unit determinant and hyperbolicity.
    pub fn new(t11: i64, t12: i64, t21: i64, t22: i64) -> Result<Self> {
        let det = t11 as i128 * t22 as i128 - t12 as i128 * t21 as i128;
        if det != 1 {
            return Err(Error::InvalidMatrix(format!("determinant {det} != 1")));
        }
        if (t11 as i128 + t22 as i128).abs() <= 2 {
            return Err(Error::InvalidMatrix(format!(
                "trace {} is not hyperbolic",
                t11 + t22
            )));
        }
        Ok(CatMatrix { t11, t12, t21, t22 })
    }

    /// Arnold's cat `[[2,1],[1,1]]`.
    pub fn arnold() -> Self {
        CatMatrix { t11: 2, t12: 1, t21: 1, t22: 1 }
    }

    /// `[[2,1],[3,2]]`, the smallest-trace matrix satisfying the parity condition.
    pub fn standard() -> Self {
        CatMatrix { t11: 2, t12: 1, t21: 3, t22: 2 }
    }

    pub fn trace(&self) -> i64 {
        self.t11 + self.t22
    }

    /// Parity condition for the cat quantization: `t11 t12` and `t21 t22` even, `t12 != 0`.
    pub fn is_quantizable(&self) -> bool {
        self.t12 != 0 && (self.t11 * self.t12) % 2 == 0 && (self.t21 * self.t22) % 2 == 0
    }

    /// Expanding eigenvalue `λ > 1` in absolute value.
    pub fn stretching(&self) -> f64 {
        let tr = self.trace().abs() as f64;
        (tr + (tr * tr - 4.0).sqrt()) / 2.0
    }

    pub fn as_array(&self) -> [[i128; 2]; 2] {
        [
            [self.t11 as i128, self.t12 as i128],
            [self.t21 as i128, self.t22 as i128],
        ]
    }

    /// Exact `M^t`, failing on overflow.
    pub fn pow(&self, t: u32) -> Result<[[i128; 2]; 2]> {
        let mut acc = [[1i128, 0], [0, 1]];
        let m = self.as_array();
        for _ in 0..t {
            acc = mat_mul(&acc, &m).ok_or(Error::Overflow("matrix power"))?;
        }
        Ok(acc)
    }

    pub fn apply_f64(&self, p: f64, q: f64) -> (f64, f64) {
        (
            self.t11 as f64 * p + self.t12 as f64 * q,
            self.t21 as f64 * p + self.t22 as f64 * q,
        )
    }
}

pub(crate) fn mat_mul(a: &[[i128; 2]; 2], b: &[[i128; 2]; 2]) -> Option<[[i128; 2]; 2]> {
    let e = |i: usize, j: usize| -> Option<i128> {
        a[i][0].checked_mul(b[0][j])?.checked_add(a[i][1].checked_mul(b[1][j])?)
    };
    Some([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

/// Kick potential of the kicked map.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Potential {
    /// `V(q) = cos q`
    Cosine,
    /// `V(q) = -(q - π)^2 / 2`
    Sawtooth,
}

impl Potential {
    pub fn value(&self, q: f64) -> f64 {
        match self {
            Potential::Cosine => q.cos(),
            Potential::Sawtooth => -(q - PI) * (q - PI) / 2.0,
        }
    }

    /// `V'(q)`; for the sawtooth this is `-(q - π)` on `[0, 2π)`.
    pub fn derivative(&self, q: f64) -> f64 {
        match self {
            Potential::Cosine => -q.sin(),
            Potential::Sawtooth => -(q - PI),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KickedParams {
    pub k: f64,
    pub period: f64,
    pub potential: Potential,
}

/// Boolean transition matrix of a subshift on `m` symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    m: usize,
    allowed: Vec<bool>,
}

impl TransitionMatrix {
    pub fn full_shift(m: usize) -> Self {
        TransitionMatrix { m, allowed: vec![true; m * m] }
    }

    pub fn from_rows(rows: &[&[bool]]) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParameter("transition matrix must be square".into()));
        }
        Ok(TransitionMatrix { m, allowed: rows.iter().flat_map(|r| r.iter().copied()).collect() })
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }

    pub fn allows(&self, a: u8, b: u8) -> bool {
        self.allowed[a as usize * self.m + b as usize]
    }

    /// `tr(T^t)`, the number of period-`t` points of the subshift.
    pub fn trace_power(&self, t: u32) -> u128 {
        let m = self.m;
        let mut acc: Vec<u128> = (0..m * m).map(|i| (i / m == i % m) as u128).collect();
        for _ in 0..t {
            let mut next = vec![0u128; m * m];
            for i in 0..m {
                for k in 0..m {
                    if acc[i * m + k] == 0 {
                        continue;
                    }
                    for j in 0..m {
                        if self.allowed[k * m + j] {
                            next[i * m + j] = next[i * m + j].saturating_add(acc[i * m + k]);
                        }
                    }
                }
            }
            acc = next;
        }
        (0..m).map(|i| acc[i * m + i]).sum()
    }

    /// Logarithm of the spectral radius (topological entropy of the subshift).
    pub fn entropy(&self) -> f64 {
        let m = self.m;
        let mut v = vec![1.0f64; m];
        let mut growth = 0.0;
        for _ in 0..500 {
            let w: Vec<f64> = (0..m)
                .map(|i| (0..m).filter(|&j| self.allowed[i * m + j]).map(|j| v[j]).sum())
                .collect();
            let norm = w.iter().fold(0.0f64, |a, &b| a.max(b));
            if norm == 0.0 {
                return f64::NEG_INFINITY;
            }
            growth = norm;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        growth.ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Cat(CatMatrix),
    Baker,
    Kicked(KickedParams),
}

/// A classical map together with its per-step Maslov index.
#[derive(Clone, Debug, PartialEq)]
pub struct MapModel {
    kind: MapKind,
    symbolic: Option<TransitionMatrix>,
    maslov_per_step: i64,
}

impl MapModel {
    pub fn cat(m: CatMatrix) -> Self {
        MapModel { kind: MapKind::Cat(m), symbolic: None, maslov_per_step: 0 }
    }

    pub fn baker() -> Self {
        MapModel {
            kind: MapKind::Baker,
            symbolic: Some(TransitionMatrix::full_shift(2)),
            maslov_per_step: 0,
        }
    }

    pub fn kicked(k: f64, period: f64, potential: Potential) -> Result<Self> {
        if !k.is_finite() || !period.is_finite() {
            return Err(Error::InvalidParameter("kick strength and period must be finite".into()));
        }
        Ok(MapModel {
            kind: MapKind::Kicked(KickedParams { k, period, potential }),
            symbolic: None,
            maslov_per_step: 0,
        })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Cat(_) => "cat",
            MapKind::Baker => "baker",
            MapKind::Kicked(_) => "kicked",
        }
    }

    pub fn cat_matrix(&self) -> Option<CatMatrix> {
        match self.kind {
            MapKind::Cat(m) => Some(m),
            _ => None,
        }
    }

    pub fn torus_period(&self) -> f64 {
        match self.kind {
            MapKind::Kicked(_) => 2.0 * PI,
            _ => 1.0,
        }
    }

    /// Transition matrix of the symbolic dynamics (baker only).
    pub fn symbolic(&self) -> Result<&TransitionMatrix> {
        self.symbolic.as_ref().ok_or(Error::SymbolicUnavailable)
    }

    pub fn maslov_per_step(&self) -> i64 {
        self.maslov_per_step
    }

    pub fn with_maslov(mut self, per_step: i64) -> Self {
        self.maslov_per_step = per_step.rem_euclid(4);
        self
    }

    /// Topological entropy: `ln 2` for the baker, `ln λ` for a cat map.
    pub fn entropy(&self) -> Result<f64> {
        match &self.kind {
            MapKind::Cat(m) => Ok(m.stretching().ln()),
            MapKind::Baker => Ok(self.symbolic()?.entropy()),
            MapKind::Kicked(_) => Err(Error::Unsupported("entropy of kicked map".into())),
        }
    }

    pub fn contains(&self, x: &TorusPoint) -> bool {
        let l = self.torus_period();
        (0.0..l).contains(&x.q) && (0.0..l).contains(&x.p)
    }

    /// One step of the map, reduced to the fundamental domain.
    pub fn step(&self, x: TorusPoint) -> TorusPoint {
        match &self.kind {
            MapKind::Cat(m) => {
                let (p, q) = m.apply_f64(x.p, x.q);
                TorusPoint { q: wrap(q, 1.0), p: wrap(p, 1.0) }
            }
            MapKind::Baker => {
                if x.q <= 0.5 {
                    TorusPoint { q: wrap(2.0 * x.q, 1.0), p: x.p / 2.0 }
                } else {
                    TorusPoint { q: wrap(2.0 * x.q - 1.0, 1.0), p: (x.p + 1.0) / 2.0 }
                }
            }
            MapKind::Kicked(kp) => {
                let l = 2.0 * PI;
                let p = wrap(x.p - kp.k * kp.potential.derivative(x.q), l);
                let q = wrap(x.q + kp.period * p, l);
                TorusPoint { q, p }
            }
        }
    }
}

pub(crate) fn wrap(x: f64, l: f64) -> f64 {
    let y = x - l * (x / l).floor();
    if y >= l {
        0.0
    } else {
        y
    }
}

/// Forward trajectory of `steps` iterations, including the start point.
pub fn iterate_map(model: &MapModel, start: TorusPoint, steps: usize) -> Result<Vec<TorusPoint>> {
    if !model.contains(&start) {
        return Err(Error::OutOfDomain { q: start.q, p: start.p });
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start);
    let mut x = start;
    for _ in 0..steps {
        x = model.step(x);
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_validation() {
        assert!(CatMatrix::new(2, 1, 3, 2).is_ok());
        assert!(matches!(CatMatrix::new(2, 1, 1, 2), Err(Error::InvalidMatrix(_))));
        assert!(matches!(CatMatrix::new(1, 1, 0, 1), Err(Error::InvalidMatrix(_))));
        assert!(CatMatrix::standard().is_quantizable());
        assert!(!CatMatrix::arnold().is_quantizable());
    }

    #[test]
    fn arnold_origin_is_fixed() {
        let m = MapModel::cat(CatMatrix::arnold());
        let traj = iterate_map(&m, TorusPoint::new(0.0, 0.0), 3).unwrap();
        assert_eq!(traj.len(), 4);
        assert!(traj.iter().all(|x| x.q == 0.0 && x.p == 0.0));
    }

    #[test]
    fn arnold_half_point() {
        let m = MapModel::cat(CatMatrix::arnold());
        let traj = iterate_map(&m, TorusPoint { q: 0.5, p: 0.5 }, 1).unwrap();
        assert_eq!(traj[1], TorusPoint { q: 0.0, p: 0.5 });
    }

    #[test]
    fn baker_left_branch() {
        let traj = iterate_map(&MapModel::baker(), TorusPoint { q: 0.25, p: 0.5 }, 1).unwrap();
        assert_eq!(traj[1], TorusPoint { q: 0.5, p: 0.25 });
    }

    #[test]
    fn rejects_points_off_torus() {
        let r = iterate_map(&MapModel::baker(), TorusPoint { q: 1.0, p: 0.0 }, 1);
        assert!(matches!(r, Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn kicked_stays_in_domain() {
        let m = MapModel::kicked(1.3, 1.0, Potential::Cosine).unwrap();
        let traj = iterate_map(&m, TorusPoint { q: 6.0, p: 0.1 }, 200).unwrap();
        assert!(traj.iter().all(|x| m.contains(x)));
    }

    #[test]
    fn full_shift_counts() {
        let t = TransitionMatrix::full_shift(2);
        for n in 1..=12 {
            assert_eq!(t.trace_power(n), 1u128 << n);
        }
        assert!((t.entropy() - core::f64::consts::LN_2).abs() < 1e-12);
    }
}
