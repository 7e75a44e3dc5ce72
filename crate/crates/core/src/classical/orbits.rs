


use core::f64::consts::PI;

use crate::prelude::*;
use core::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use super::lattice::{cat_periodic_points, LatticePoint};
use super::model::{CatMatrix, MapKind, MapModel, TorusPoint};
use super::symbolic::{periodic_orbit_codes, SymbolCode};
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Default cap on the number of periodic points an enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 22;

/// Identity of an orbit: a symbol code (baker) or a representative lattice point (cat).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum OrbitLabel {
    Code(SymbolCode),
    Lattice(LatticePoint),
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitLabel::Code(c) => write!(f, "{c}"),
            OrbitLabel::Lattice(x) => write!(f, "({};{})/{}", x.p_num, x.q_num, x.den),
        }
    }
}

/// Quantities entering the trace formula for one orbit at a fixed Hilbert dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitInvariants {
    pub hilbert_dim: usize,
    /// Primitive action mod 1.
    pub action: Rational,
    /// Monodromy of the primitive orbit.
    pub monodromy: [[f64; 2]; 2],
    /// `|det(I - M_p^r)|`.
    pub stability: f64,
    pub maslov: i64,
    pub amplitude: f64,
    /// Total phase reduced to `[0, 2π)`.
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub t: usize,
    pub t_p: usize,
    pub r: usize,
    pub label: OrbitLabel,
    pub points: Vec<TorusPoint>,
    pub invariants: Option<OrbitInvariants>,
}

impl PeriodicOrbit {
    pub fn start(&self) -> TorusPoint {
        self.points[0]
    }

    pub fn invariants(&self) -> Result<&OrbitInvariants> {
        self.invariants
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("orbit invariants not computed".into()))
    }
}

pub fn enumerate_periodic_orbits(model: &MapModel, t: usize) -> Result<Vec<PeriodicOrbit>> {
    enumerate_periodic_orbits_with_budget(model, t, DEFAULT_ENUMERATION_BUDGET)
}

/// One entry per distinct orbit of period dividing `t`, sorted by `(t_p, label)`.
pub fn enumerate_periodic_orbits_with_budget(
    model: &MapModel,
    t: usize,
    budget: u64,
) -> Result<Vec<PeriodicOrbit>> {
    if t == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    match model.kind() {
        MapKind::Baker => {
            let codes = periodic_orbit_codes(model.symbolic()?, t, budget)?;
            Ok(codes
                .into_iter()
                .map(|c| {
                    let t_p = c.len();
                    let points = baker_points(&c).into_iter().map(|(q, p)| TorusPoint { q, p }).collect();
                    PeriodicOrbit { t, t_p, r: t / t_p, label: OrbitLabel::Code(c), points, invariants: None }
                })
                .collect())
        }
        MapKind::Cat(m) => cat_orbits(m, t, budget),
        MapKind::Kicked(_) => Err(Error::Unsupported("periodic-orbit enumeration for kicked maps".into())),
    }
}

fn cat_orbits(m: &CatMatrix, t: usize, budget: u64) -> Result<Vec<PeriodicOrbit>> {
    let t32 = u32::try_from(t).map_err(|_| Error::Overflow("period"))?;
    let pts = cat_periodic_points(m, t32, budget)?;
    let mut seen = vec![false; pts.len()];
    let mut out = Vec::new();
    for i in 0..pts.len() {
        if seen[i] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = pts[i];
        loop {
            let j = pts.binary_search(&x).map_err(|_| Error::InvalidMatrix("orbit left the lattice".into()))?;
            if seen[j] {
                break;
            }
            seen[j] = true;
            orbit.push(x);
            x = x.step(m)?;
        }
        // pts is sorted, so the first unseen point is the least element of its orbit
        let t_p = orbit.len();
        out.push(PeriodicOrbit {
            t,
            t_p,
            r: t / t_p,
            label: OrbitLabel::Lattice(pts[i]),
            points: orbit.iter().map(|x| TorusPoint { q: x.q(), p: x.p() }).collect(),
            invariants: None,
        });
    }
    out.sort_by(|a, b| a.t_p.cmp(&b.t_p).then_with(|| a.label.cmp(&b.label)));
    Ok(out)
}

/// Exact points `(q_j, p_j)` of a baker code, unreduced: `q_j = 0.ε_j ε_{j+1}…`, `p_j = 0.ε_{j-1} ε_{j-2}…`.
fn baker_points_exact(code: &SymbolCode) -> Vec<(Rational, Rational)> {
    let w = code.symbols();
    let t = w.len();
    let den = (1i128 << t) - 1;
    (0..t)
        .map(|j| {
            let q = (0..t).fold(0i128, |acc, i| (acc << 1) | w[(j + i) % t] as i128);
            let p = (0..t).fold(0i128, |acc, i| (acc << 1) | w[(j + 2 * t - 1 - i) % t] as i128);
            (Rational::new(q, den), Rational::new(p, den))
        })
        .collect()
}

fn baker_points(code: &SymbolCode) -> Vec<(f64, f64)> {
    let reduce = |x: Rational| {
        let y = x - x.floor();
        *y.numer() as f64 / *y.denom() as f64
    };
    baker_points_exact(code).into_iter().map(|(q, p)| (reduce(q), reduce(p))).collect()
}

fn frac(x: Rational) -> Rational {
    x - x.floor()
}

/// Primitive action mod 1 of a baker code.
pub fn baker_action(code: &SymbolCode) -> Rational {
    let pts = baker_points_exact(code);
    let w = code.symbols();
    let t = w.len();
    let mut s = Rational::zero();
    for j in 0..t {
        let (q, _) = pts[j];
        let (q1, p1) = pts[(j + 1) % t];
        let e = Rational::from_integer(w[j] as i128);
        s = frac(s + q1 * p1 - Rational::from_integer(2) * q * p1 + e * (q + p1));
    }
    s
}

/// Primitive action mod 1 of the cat orbit through `x`, from the generating function on the lift.
pub fn cat_action(m: &CatMatrix, x: &LatticePoint, t_p: usize) -> Result<Rational> {
    if m.t12 == 0 {
        return Err(Error::InvalidMatrix("generating function is singular for t12 = 0".into()));
    }
    let a = m.as_array();
    let ov = || Error::Overflow("cat action");
    let (p0, q0) = (x.p_num, x.q_num);
    let (mut p, mut q) = (p0, q0);
    // numerator of the sum over the common denominator 2 t12 den^2
    let mut num: i128 = 0;
    for _ in 0..t_p {
        let pn = a[0][0].checked_mul(p).and_then(|v| v.checked_add(a[0][1].checked_mul(q)?)).ok_or_else(ov)?;
        let qn = a[1][0].checked_mul(p).and_then(|v| v.checked_add(a[1][1].checked_mul(q)?)).ok_or_else(ov)?;
        let term = (|| {
            a[0][0]
                .checked_mul(p.checked_mul(p)?)?
                .checked_sub(2i128.checked_mul(p)?.checked_mul(pn)?)?
                .checked_add(a[1][1].checked_mul(pn.checked_mul(pn)?)?)
        })()
        .ok_or_else(ov)?;
        num = num.checked_add(term).ok_or_else(ov)?;
        p = pn;
        q = qn;
    }
    let den = x.den;
    // subtract the winding of the second coordinate times the start of the first
    let wind = (q - q0).checked_mul(p0).and_then(|v| v.checked_mul(2 * m.t12 as i128)).ok_or_else(ov)?;
    num = num.checked_sub(wind).ok_or_else(ov)?;
    let d = den.checked_mul(den).and_then(|v| v.checked_mul(2 * m.t12 as i128)).ok_or_else(ov)?;
    Ok(frac(Rational::new(num, d)))
}

/// Completes `orbit` with action, monodromy, Maslov index, amplitude and phase at dimension `n`.
pub fn orbit_invariants(model: &MapModel, orbit: &PeriodicOrbit, n: usize) -> Result<PeriodicOrbit> {
    if n == 0 {
        return Err(Error::InvalidParameter("Hilbert dimension must be positive".into()));
    }
    let (t_p, r) = (orbit.t_p, orbit.r);
    let (action, monodromy, stability) = match (model.kind(), &orbit.label) {
        (MapKind::Baker, OrbitLabel::Code(c)) => {
            let lam = (t_p as f64).exp2();
            let s = (1.0 - lam.powi(r as i32)) * (1.0 - lam.powi(-(r as i32)));
            (baker_action(c), [[lam, 0.0], [0.0, 1.0 / lam]], s.abs())
        }
        (MapKind::Cat(m), OrbitLabel::Lattice(x)) => {
            let mp = m.pow(t_p as u32)?;
            let mt = m.pow(orbit.t as u32)?;
            let s = 2 - (mt[0][0] + mt[1][1]);
            let mono = [[mp[0][0] as f64, mp[0][1] as f64], [mp[1][0] as f64, mp[1][1] as f64]];
            (cat_action(m, x, t_p)?, mono, s.abs() as f64)
        }
        (MapKind::Kicked(_), _) => return Err(Error::Unsupported("kicked orbit invariants".into())),
        _ => return Err(Error::InvalidParameter("orbit label does not match model".into())),
    };
    let maslov = t_p as i64 * model.maslov_per_step();
    let amplitude = t_p as f64 / stability.sqrt();
    let turns = frac(
        Rational::from_integer(r as i128)
            * (Rational::from_integer(n as i128) * action - Rational::new(maslov as i128, 4)),
    );
    let phase = 2.0 * PI * (*turns.numer() as f64 / *turns.denom() as f64);
    let mut out = orbit.clone();
    out.invariants = Some(OrbitInvariants { hilbert_dim: n, action, monodromy, stability, maslov, amplitude, phase });
    Ok(out)
}

/// Enumerates orbits of period dividing `t` and completes their invariants at dimension `n`.
pub fn orbits_with_invariants(model: &MapModel, t: usize, n: usize) -> Result<Vec<PeriodicOrbit>> {
    enumerate_periodic_orbits(model, t)?.iter().map(|o| orbit_invariants(model, o, n)).collect()
}

pub fn rational_to_f64(x: Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn describe(orbit: &PeriodicOrbit) -> String {
    format!("t={} t_p={} r={} {}", orbit.t, orbit.t_p, orbit.r, orbit.label)
}
