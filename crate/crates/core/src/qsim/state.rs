use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use core::f64::consts::PI;

use rand::Rng;

use super::layout::{RegId, RegisterLayout};
use crate::error::{Error, Result};
use crate::prelude::*;
use crate::quantum::UnitaryMatrix;

/// Single-qubit gates. `Ry(θ) = exp(-iθσ_y)`, `Pz(θ) = exp(-iθσ_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Ry(f64),
    Pz(f64),
}

impl Gate {
    fn matrix(&self) -> [[Complex64; 2]; 2] {
        let r = |x: f64| Complex64::new(x, 0.0);
        match *self {
            Gate::H => {
                let s = core::f64::consts::FRAC_1_SQRT_2;
                [[r(s), r(s)], [r(s), r(-s)]]
            }
            Gate::X => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
            Gate::Ry(t) => [[r(t.cos()), r(-t.sin())], [r(t.sin()), r(t.cos())]],
            Gate::Pz(t) => [[Complex64::cis(-t), r(0.0)], [r(0.0), Complex64::cis(t)]],
        }
    }

    fn name(&self) -> String {
        match self {
            Gate::H => "H".into(),
            Gate::X => "X".into(),
            Gate::Ry(t) => format!("Ry({t})"),
            Gate::Pz(t) => format!("Pz({t})"),
        }
    }
}

/// Predicate on the value of one register; an operation acts only on basis states where it holds.
pub struct Control<'a> {
    reg: RegId,
    pred: Box<dyn Fn(u64) -> bool + 'a>,
    label: String,
}

impl<'a> Control<'a> {
    pub fn when(reg: RegId, label: &str, pred: impl Fn(u64) -> bool + 'a) -> Self {
        Control { reg, pred: Box::new(pred), label: label.into() }
    }

    pub fn equals(reg: RegId, v: u64) -> Self {
        Control { reg, pred: Box::new(move |x| x == v), label: format!("=={v}") }
    }

    pub fn at_least(reg: RegId, v: u64) -> Self {
        Control { reg, pred: Box::new(move |x| x >= v), label: format!(">={v}") }
    }

    pub fn register(&self) -> RegId {
        self.reg
    }
}

/// One entry of the operation log.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OpRecord {
    pub seq: usize,
    pub op: String,
    pub target: String,
    pub control: Option<String>,
    pub detail: String,
}

/// Statistics of one amplitude-amplification call.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AmplificationLog {
    pub rounds: usize,
    pub initial_probability: f64,
    /// `sin²((2k+1)θ₀)` with `sin²θ₀` the initial probability.
    pub predicted_probability: f64,
    pub achieved_probability: f64,
}

/// `k* = floor(π / (4 asin √a))`.
pub fn plan_iterations(a: f64) -> Result<usize> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::EmptyTarget);
    }
    if a > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("overlap {a} exceeds 1")));
    }
    let theta = a.min(1.0).sqrt().asin();
    Ok((PI / (4.0 * theta)).floor() as usize)
}

/// Dense statevector over a [`RegisterLayout`].
#[derive(Clone, Debug)]
pub struct QState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
    log: Option<Vec<OpRecord>>,
}

impl QState {
    /// `|0…0⟩`.
    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[index % layout.dim()] = Complex64::new(1.0, 0.0);
        QState { layout, amps, log: None }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), got: amps.len() });
        }
        let s = QState { layout, amps, log: None };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("state norm² {n} differs from 1")));
        }
        Ok(s)
    }

    pub fn enable_log(&mut self) {
        if self.log.is_none() {
            self.log = Some(Vec::new());
        }
    }

    pub fn log(&self) -> &[OpRecord] {
        self.log.as_deref().unwrap_or(&[])
    }

    fn record(&mut self, op: &str, target: String, control: Option<&Control>, detail: String) {
        if let Some(log) = self.log.as_mut() {
            let seq = log.len();
            log.push(OpRecord {
                seq,
                op: op.into(),
                target,
                control: control.map(|c| format!("{}{}", self.layout.register(c.reg).name, c.label)),
                detail,
            });
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability mass on basis states satisfying `pred`.
    pub fn probability(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| pred(*i)).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn holds(&self, control: Option<&Control>, index: usize) -> bool {
        control.is_none_or(|c| (c.pred)(self.layout.value(index, c.reg)))
    }

    fn check_disjoint(&self, target: RegId, control: Option<&Control>) -> Result<()> {
        if control.is_some_and(|c| c.reg == target) {
            return Err(Error::Register(format!(
                "control register {} overlaps the target",
                self.layout.register(target).name
            )));
        }
        Ok(())
    }

    /// Applies `gate` to qubit `bit` of `reg` on branches where `control` holds.
    pub fn apply_gate(&mut self, gate: Gate, reg: RegId, bit: usize, control: Option<&Control>) -> Result<()> {
        self.check_disjoint(reg, control)?;
        let q = self.layout.qubit(reg, bit)?;
        self.apply_2x2(q, gate.matrix(), control);
        let target = format!("{}[{bit}]", self.layout.register(reg).name);
        self.record("gate", target, control, gate.name());
        Ok(())
    }

    fn apply_2x2(&mut self, q: usize, m: [[Complex64; 2]; 2], control: Option<&Control>) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit != 0 || !self.holds(control, i) {
                continue;
            }
            let j = i | bit;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    /// Phase `e^{iα}` on basis states with both qubits set.
    fn controlled_phase(&mut self, q1: usize, q2: usize, alpha: f64, control: Option<&Control>) {
        let mask = (1usize << q1) | (1usize << q2);
        let ph = Complex64::cis(alpha);
        for i in 0..self.amps.len() {
            if i & mask == mask && self.holds(control, i) {
                self.amps[i] *= ph;
            }
        }
    }

    fn swap_qubits(&mut self, q1: usize, q2: usize, control: Option<&Control>) {
        let (b1, b2) = (1usize << q1, 1usize << q2);
        for i in 0..self.amps.len() {
            if i & b1 != 0 && i & b2 == 0 && self.holds(control, i) {
                self.amps.swap(i, (i & !b1) | b2);
            }
        }
    }

    /// DFT `|j⟩ → 2^{-t/2} Σ_k e^{-2πi jk/2^t} |k⟩` on the low `width` qubits of `reg`, built from
    /// Hadamards, controlled phases and a final bit reversal. `inverse` flips the exponent sign.
    pub fn apply_dft(&mut self, reg: RegId, width: usize, control: Option<&Control>, inverse: bool) -> Result<()> {
        self.check_disjoint(reg, control)?;
        if width == 0 || width > self.layout.width(reg) {
            return Err(Error::Register(format!(
                "active width {width} invalid for register {}",
                self.layout.register(reg).name
            )));
        }
        let sign = if inverse { 1.0 } else { -1.0 };
        let q0 = self.layout.qubit(reg, 0)?;
        let h = Gate::H.matrix();
        for b in (0..width).rev() {
            self.apply_2x2(q0 + b, h, control);
            for c in (0..b).rev() {
                let alpha = sign * 2.0 * PI / (1u64 << (b - c + 1)) as f64;
                self.controlled_phase(q0 + c, q0 + b, alpha, control);
            }
        }
        for i in 0..width / 2 {
            self.swap_qubits(q0 + i, q0 + width - 1 - i, control);
        }
        let op = if inverse { "inverse_dft" } else { "dft" };
        let target = format!("{}[0..{width}]", self.layout.register(reg).name);
        self.record(op, target, control, String::new());
        Ok(())
    }

    /// Applies `u` to the value of `reg`; indices `≥ dim(u)` are left alone.
    pub fn apply_unitary(&mut self, reg: RegId, u: &UnitaryMatrix, control: Option<&Control>) -> Result<()> {
        self.check_disjoint(reg, control)?;
        let width = self.layout.width(reg);
        let n = u.dim();
        if n > 1usize << width {
            return Err(Error::CapExceeded { what: "unitary dimension", value: n as u64, cap: 1u64 << width });
        }
        let mask = self.layout.register(reg).mask();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for base in 0..self.amps.len() {
            if base & mask != 0 || !self.holds(control, base) {
                continue;
            }
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = self.amps[self.layout.with_value(base, reg, k as u64)];
            }
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, v) in buf.iter().enumerate() {
                    acc += u.get(j, k) * v;
                }
                let idx = self.layout.with_value(base, reg, j as u64);
                self.amps[idx] = acc;
            }
        }
        let target = self.layout.register(reg).name.clone();
        self.record("unitary", target, control, format!("dim {n}"));
        Ok(())
    }

    /// Permutes basis states by `f`. Fails without modifying the state if two populated states
    /// collide.
    pub fn apply_basis_function(&mut self, f: impl Fn(usize) -> usize, label: &str) -> Result<()> {
        let dim = self.amps.len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        let mut taken = vec![false; dim];
        for (i, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let j = f(i);
            if j >= dim {
                return Err(Error::Irreversible(format!("{label}: image {j} outside the state space")));
            }
            if taken[j] {
                return Err(Error::Irreversible(format!("{label}: two populated states map to {j}")));
            }
            taken[j] = true;
            out[j] = a;
        }
        self.amps = out;
        self.record("basis_function", String::new(), None, label.into());
        Ok(())
    }

    /// `|x, y⟩ → |x, y ⊕ g(x)⟩` with `y` the value of `target`; `g` sees the index with the
    /// target register cleared, so the map is its own inverse.
    pub fn apply_xor(&mut self, target: RegId, g: impl Fn(usize) -> u64, label: &str) -> Result<()> {
        let mask = self.layout.register(target).mask();
        let width = self.layout.width(target);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let v = g(i & !mask);
            if v >> width != 0 {
                return Err(Error::Register(format!("{label}: value {v} does not fit {width} bits")));
            }
            out[self.layout.with_value(i, target, self.layout.value(i, target) ^ v)] = a;
        }
        self.amps = out;
        let name = self.layout.register(target).name.clone();
        self.record("xor", name, None, label.into());
        Ok(())
    }

    /// `k` rounds of `(2|ψ₀⟩⟨ψ₀| - I)(I - 2Π_target)` with `ψ₀` the current state.
    pub fn amplitude_amplify(&mut self, target: impl Fn(usize) -> bool, k: usize) -> Result<AmplificationLog> {
        let mark: Vec<bool> = (0..self.amps.len()).map(&target).collect();
        let a = self.amps.iter().zip(&mark).filter(|(_, m)| **m).map(|(x, _)| x.norm_sqr()).sum::<f64>();
        if a <= 0.0 {
            return Err(Error::EmptyTarget);
        }
        let psi0 = self.amps.clone();
        for _ in 0..k {
            for (x, m) in self.amps.iter_mut().zip(&mark) {
                if *m {
                    *x = -*x;
                }
            }
            let overlap: Complex64 = psi0.iter().zip(&self.amps).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in self.amps.iter_mut().zip(&psi0) {
                *x = *p * (overlap * 2.0) - *x;
            }
        }
        let achieved = self.amps.iter().zip(&mark).filter(|(_, m)| **m).map(|(x, _)| x.norm_sqr()).sum::<f64>();
        let theta = a.min(1.0).sqrt().asin();
        let predicted = ((2 * k + 1) as f64 * theta).sin().powi(2);
        self.record("amplify", String::new(), None, format!("k={k} a={a:e}"));
        Ok(AmplificationLog { rounds: k, initial_probability: a, predicted_probability: predicted, achieved_probability: achieved })
    }

    /// Amplitudes over `keep` with every other register pinned.
    pub fn project_amplitudes(&self, keep: RegId, pins: &[(RegId, u64)]) -> Result<Vec<Complex64>> {
        let mut seen = vec![false; self.layout.registers().len()];
        seen[keep.0] = true;
        for &(r, _) in pins {
            if seen[r.0] {
                return Err(Error::Register(format!(
                    "register {} pinned twice or also kept",
                    self.layout.register(r).name
                )));
            }
            seen[r.0] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Register(format!("register {} is neither kept nor pinned", self.layout.registers()[i].name)));
        }
        let base = self.layout.index_of(pins)?;
        Ok((0..1u64 << self.layout.width(keep)).map(|v| self.amps[self.layout.with_value(base, keep, v)]).collect())
    }

    /// Marginal distribution of one register.
    pub fn marginal(&self, reg: RegId) -> Vec<f64> {
        let mut p = vec![0.0; 1usize << self.layout.width(reg)];
        for (i, a) in self.amps.iter().enumerate() {
            p[self.layout.value(i, reg) as usize] += a.norm_sqr();
        }
        p
    }

    /// `shots` draws of a full measurement in the computational basis, as index → count.
    pub fn sample<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> BTreeMap<usize, u64> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            *counts.entry(i).or_insert(0) += 1;
        }
        counts
    }

    /// Normalizes the state; used after projective post-selection.
    pub fn renormalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::EmptyTarget);
        }
        let s = 1.0 / n.sqrt();
        for a in &mut self.amps {
            *a *= s;
        }
        Ok(())
    }
}
