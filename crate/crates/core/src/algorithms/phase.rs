use alloc::collections::BTreeMap;
use core::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ceil_log2;
use crate::classical::CatMatrix;
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::qsim::{Control, Gate, QState, RegisterLayout, DEFAULT_QUBIT_CAP};
use crate::quantum::{eigensystem, quantize_cat, random_state, UnitaryMatrix};

/// System-register input of a phase-estimation run.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseInput {
    /// The `j`-th eigenvector of the dense eigensystem (phases sorted ascending).
    Eigenvector(usize),
    /// Normalized complex Gaussian vector from the given seed.
    Random { seed: u64 },
    State(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseEstimationRun {
    pub bits: u32,
    /// Exact distribution of the ancilla readout.
    pub distribution: Vec<f64>,
    /// Sampled ancilla values, `y → count`; `θ̂ = 2π y / 2^b`.
    pub counts: BTreeMap<u64, u64>,
    /// Eigenphase of the input for eigenvector inputs.
    pub eigenphase: Option<f64>,
}

impl PhaseEstimationRun {
    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Phase estimation of `U` on `bits` ancillas, with `U^{2^j}` formed by repeated squaring.
pub fn phase_estimation(u: &UnitaryMatrix, bits: u32, input: &PhaseInput, shots: u64, seed: u64) -> Result<PhaseEstimationRun> {
    if bits == 0 {
        return Err(Error::InvalidParameter("phase estimation needs at least one ancilla".into()));
    }
    let n = u.dim();
    let m = ceil_log2(n).max(1);
    let b = bits as usize;
    let layout = RegisterLayout::with_cap(&[("anc", b), ("sys", m)], DEFAULT_QUBIT_CAP)?;
    let (anc, sys) = (layout.id("anc")?, layout.id("sys")?);
    let (psi, eigenphase) = match input {
        PhaseInput::Eigenvector(j) => {
            let es = eigensystem(u)?;
            if *j >= n {
                return Err(Error::InvalidParameter(format!("eigenvector index {j} out of range")));
            }
            (es.vectors.column(*j).iter().copied().collect::<Vec<_>>(), Some(es.phases[*j]))
        }
        PhaseInput::Random { seed } => (random_state(n, &mut ChaCha8Rng::seed_from_u64(*seed)), None),
        PhaseInput::State(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            (v.clone(), None)
        }
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
    for (k, z) in psi.iter().enumerate() {
        amps[layout.index_of(&[(sys, k as u64)])?] = *z;
    }
    let mut state = QState::from_amplitudes(layout.clone(), amps)?;
    for k in 0..b {
        state.apply_gate(Gate::H, anc, k, None)?;
    }
    let mut power = u.clone();
    for j in 0..b {
        let ctl = Control::when(anc, "bit set", move |v| (v >> j) & 1 == 1);
        state.apply_unitary(sys, &power, Some(&ctl))?;
        if j + 1 < b {
            power = power.mul(&power)?;
        }
    }
    state.apply_dft(anc, b, None, false)?;
    let distribution = state.marginal(anc);
    let mut counts = BTreeMap::new();
    for (i, k) in state.sample(shots, &mut ChaCha8Rng::seed_from_u64(seed)) {
        *counts.entry(layout.value(i, anc)).or_insert(0) += k;
    }
    Ok(PhaseEstimationRun { bits, distribution, counts, eigenphase })
}

pub fn phase_estimation_cat(
    m: &CatMatrix,
    n: usize,
    bits: u32,
    input: &PhaseInput,
    shots: u64,
    seed: u64,
) -> Result<PhaseEstimationRun> {
    phase_estimation(&quantize_cat(m, n)?, bits, input, shots, seed)
}

/// A group of neighbouring readout bins attributed to one eigenphase.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCluster {
    /// Interpolated position in bins, in `[0, 2^b)`.
    pub centre: f64,
    pub count: u64,
}

impl PhaseCluster {
    pub fn phase(&self, bits: u32) -> f64 {
        2.0 * PI * self.centre / (1u64 << bits) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodEstimate {
    pub n: u64,
    pub phi: f64,
    pub clusters: Vec<PhaseCluster>,
    /// Readout values within half a bin of a cluster centre, `y → count`.
    pub accepted: BTreeMap<u64, u64>,
    /// Least common multiple of the continued-fraction denominators of the cluster offsets.
    pub continued_fraction_n: Option<u64>,
    pub warnings: Vec<String>,
}

fn circ(x: f64, len: f64) -> f64 {
    let y = x - len * (x / len).floor();
    y.min(len - y)
}

fn dist_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest denominator `q ≤ q_max` of a convergent of `x` within `tol` of `x`.
fn convergent_denominator(x: f64, tol: f64, q_max: u64) -> Option<u64> {
    let x = x - x.floor();
    let (mut h0, mut h1, mut k0, mut k1) = (0f64, 1f64, 1f64, 0f64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > q_max as f64 {
            return None;
        }
        if k2 >= 1.0 && (x - h2 / k2).abs() <= tol {
            return Some(k2 as u64);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = r - a;
        if f < 1e-15 {
            return None;
        }
        r = 1.0 / f;
    }
    None
}

/// Reconstructs the period `n` and phase `φ` of an eigenphase lattice `(2πj + φ)/n` from
/// phase-estimation counts.
///
/// Clusters are seeded at local maxima with at least `min_count` counts that rise above the
/// leakage tails of stronger peaks; centres are interpolated from the two largest bins. `n` is the
/// smallest `q` for which every cluster offset times `q` is an integer within the readout
/// resolution.
pub fn period_from_phases(counts: &BTreeMap<u64, u64>, bits: u32, min_count: u64) -> Result<PeriodEstimate> {
    let len = 1u64 << bits;
    let lenf = len as f64;
    let mut hist = vec![0u64; len as usize];
    for (&y, &c) in counts {
        if y >= len {
            return Err(Error::InvalidParameter(format!("readout {y} exceeds {bits} bits")));
        }
        hist[y as usize] = c;
    }
    let l = len as usize;
    let at = |y: isize| hist[y.rem_euclid(l as isize) as usize];
    let mut seeds: Vec<usize> = (0..l)
        .filter(|&y| {
            let c = hist[y];
            c >= min_count.max(1) && c > at(y as isize - 1) && c >= at(y as isize + 1)
        })
        .collect();
    seeds.sort_by_key(|&y| (core::cmp::Reverse(hist[y]), y));
    // a weaker local maximum is kept only if it stands clear of the sinc² tails of stronger ones
    let mass = |y: usize| (-2..=2isize).map(|k| at(y as isize + k)).sum::<u64>() as f64;
    let mut kept: Vec<usize> = Vec::new();
    for &y in &seeds {
        let clear = kept.iter().all(|&a| {
            let d = circ(y as f64 - a as f64, lenf);
            if d < 2.0 {
                return false;
            }
            let e = mass(a) / (PI * PI * (d - 1.0) * (d - 1.0));
            hist[y] as f64 > 2.0 * e + 4.0 * e.sqrt()
        });
        if clear {
            kept.push(y);
        }
    }
    if kept.is_empty() {
        return Err(Error::InsufficientData("no readout bin reaches the count threshold".into()));
    }
    kept.sort_unstable();
    let clusters: Vec<PhaseCluster> = kept
        .iter()
        .map(|&top| {
            let (left, right) = (at(top as isize - 1), at(top as isize + 1));
            let (p1, dir) = if right >= left { (right as f64, 1.0) } else { (left as f64, -1.0) };
            let p0 = hist[top] as f64;
            let offset = if p1 > 0.0 { 1.0 / (1.0 + (p0 / p1).sqrt()) } else { 0.0 };
            let centre = top as f64 + dir * offset;
            PhaseCluster { centre: centre - lenf * (centre / lenf).floor(), count: hist[top] + left + right }
        })
        .collect();
    let mut warnings = Vec::new();
    let c0 = clusters[0].centre;
    let offsets: Vec<f64> = clusters.iter().map(|c| (c.centre - c0) / lenf).collect();
    let q_max = (len / 4).max(1);
    let n = (1..=q_max)
        .find(|&q| offsets.iter().all(|&d| dist_int(q as f64 * d) <= q as f64 / lenf))
        .ok_or_else(|| Error::InsufficientData(format!("no lattice with period ≤ {q_max} fits the clusters")))?;
    if len / n < 8 {
        warnings.push(format!("{bits} ancilla bits leave {} bins per lattice spacing", len / n));
    }
    if clusters.len() < 2 {
        warnings.push("a single cluster does not determine the period".into());
    }
    let mut continued_fraction_n = Some(1u64);
    for &d in &offsets[1..] {
        continued_fraction_n = match (continued_fraction_n, convergent_denominator(d, 1.0 / lenf, q_max)) {
            (Some(l), Some(q)) => Some(l / gcd(l, q) * q),
            _ => None,
        };
    }
    if continued_fraction_n.is_some_and(|q| q != n) {
        warnings.push(format!("continued fractions give {} instead of {n}", continued_fraction_n.unwrap()));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for c in &clusters {
        s += Complex64::cis(2.0 * PI * n as f64 * c.centre / lenf) * c.count as f64;
    }
    let phi = crate::quantum::phase_of(s);
    let mut accepted = BTreeMap::new();
    for c in &clusters {
        for (&y, &k) in counts {
            if circ(y as f64 - c.centre, lenf) <= 0.5 {
                accepted.insert(y, k);
            }
        }
    }
    Ok(PeriodEstimate { n, phi, clusters, accepted, continued_fraction_n, warnings })
}
