//! Exact enumeration of cat-map periodic points as rationals with common denominator.

use crate::prelude::*;

use num_integer::Integer;

use super::model::CatMatrix;
use crate::error::{Error, Result};

/// Rational torus point `(p, q) = (p_num, q_num) / den` with numerators in `[0, den)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LatticePoint {
    pub p_num: i128,
    pub q_num: i128,
    pub den: i128,
}

impl LatticePoint {
    pub fn p(&self) -> f64 {
        self.p_num as f64 / self.den as f64
    }

    pub fn q(&self) -> f64 {
        self.q_num as f64 / self.den as f64
    }

    /// Image under `m`, reduced mod 1.
    pub fn step(&self, m: &CatMatrix) -> Result<LatticePoint> {
        let a = m.as_array();
        let lin = |r: usize| -> Option<i128> {
            a[r][0].checked_mul(self.p_num)?.checked_add(a[r][1].checked_mul(self.q_num)?)
        };
        let p = lin(0).ok_or(Error::Overflow("lattice step"))?;
        let q = lin(1).ok_or(Error::Overflow("lattice step"))?;
        Ok(LatticePoint { p_num: p.rem_euclid(self.den), q_num: q.rem_euclid(self.den), den: self.den })
    }
}

/// Lower-triangular Hermite form `[[h11, 0], [h21, h22]]` of the column lattice of `a`.
pub fn hermite_lower(a: [[i128; 2]; 2]) -> Result<(i128, i128, i128)> {
    let [[a11, a12], [a21, a22]] = a;
    let det = a11 * a22 - a12 * a21;
    if det == 0 {
        return Err(Error::InvalidMatrix("singular lattice".into()));
    }
    let eg = a11.extended_gcd(&a12);
    let g = eg.gcd;
    // columns (u, v) and (-a12/g, a11/g) form a unimodular change of basis
    let mut h11 = g;
    let mut h21 = a21 * eg.x + a22 * eg.y;
    let mut h22 = det / g;
    if h11 < 0 {
        h11 = -h11;
        h21 = -h21;
    }
    if h22 < 0 {
        h22 = -h22;
    }
    h21 = h21.rem_euclid(h22);
    Ok((h11, h21, h22))
}

/// All solutions of `(M^t - I) x ∈ Z^2` in `[0,1)^2`, sorted.
pub fn cat_periodic_points(m: &CatMatrix, t: u32, budget: u64) -> Result<Vec<LatticePoint>> {
    if t == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    let mut a = m.pow(t)?;
    a[0][0] -= 1;
    a[1][1] -= 1;
    let det = a[0][0]
        .checked_mul(a[1][1])
        .and_then(|x| x.checked_sub(a[0][1].checked_mul(a[1][0])?))
        .ok_or(Error::Overflow("det(M^t - I)"))?;
    let d = det.abs();
    if d > budget as i128 {
        return Err(Error::BudgetExceeded { needed: d.min(u64::MAX as i128) as u64, budget });
    }
    let (h11, _, h22) = hermite_lower(a)?;
    debug_assert_eq!(h11 * h22, d);
    let s = det.signum();
    // x = adj(A) k / det
    let adj = [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
    let mut pts = Vec::with_capacity(d as usize);
    for k1 in 0..h11 {
        for k2 in 0..h22 {
            let p = (s * (adj[0][0] * k1 + adj[0][1] * k2)).rem_euclid(d);
            let q = (s * (adj[1][0] * k1 + adj[1][1] * k2)).rem_euclid(d);
            pts.push(LatticePoint { p_num: p, q_num: q, den: d });
        }
    }
    pts.sort();
    pts.dedup();
    if pts.len() as i128 != d {
        return Err(Error::InvalidMatrix("coset enumeration produced duplicates".into()));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_form_index() {
        let (h11, h21, h22) = hermite_lower([[1, 1], [3, 1]]).unwrap();
        assert_eq!(h11 * h22, 2);
        assert!(h21 >= 0 && h21 < h22);
    }

    // brute-force oracle: scan every rational point with the given denominator
    fn brute(m: &CatMatrix, t: u32) -> Vec<LatticePoint> {
        let mut a = m.pow(t).unwrap();
        a[0][0] -= 1;
        a[1][1] -= 1;
        let d = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
        let mut out = Vec::new();
        for p in 0..d {
            for q in 0..d {
                let ok = (a[0][0] * p + a[0][1] * q) % d == 0 && (a[1][0] * p + a[1][1] * q) % d == 0;
                if ok {
                    out.push(LatticePoint { p_num: p, q_num: q, den: d });
                }
            }
        }
        out
    }

    #[test]
    fn matches_brute_force() {
        let mats = [CatMatrix::standard(), CatMatrix::arnold(), CatMatrix::new(2, -1, -3, 2).unwrap()];
        for m in &mats {
            for t in 1..=3 {
                assert_eq!(cat_periodic_points(m, t, 1 << 20).unwrap(), brute(m, t), "{m:?} t={t}");
            }
        }
    }

    #[test]
    fn standard_counts() {
        let m = CatMatrix::standard();
        assert_eq!(cat_periodic_points(&m, 1, 1 << 20).unwrap().len(), 2);
        assert_eq!(cat_periodic_points(&m, 2, 1 << 20).unwrap().len(), 12);
    }

    #[test]
    fn points_are_periodic() {
        let m = CatMatrix::standard();
        for x in cat_periodic_points(&m, 3, 1 << 20).unwrap() {
            let mut y = x;
            for _ in 0..3 {
                y = y.step(&m).unwrap();
            }
            assert_eq!(x, y);
        }
    }
}
