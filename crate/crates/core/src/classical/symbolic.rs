use crate::prelude::*;
use core::fmt;

use super::model::TransitionMatrix;
use crate::error::{Error, Result};

/// Periodic symbol sequence; rotations denote the same orbit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolCode {
    word: Vec<u8>,
}

impl SymbolCode {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidParameter("empty symbol code".into()));
        }
        Ok(SymbolCode { word })
    }

    /// Code from the low `t` bits of `bits`, most significant symbol first.
    pub fn from_bits(bits: u64, t: usize) -> Self {
        SymbolCode { word: (0..t).map(|j| ((bits >> (t - 1 - j)) & 1) as u8).collect() }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.word
    }

    /// Binary value of the word read most significant symbol first.
    pub fn to_bits(&self) -> u64 {
        self.word.iter().fold(0u64, |acc, &s| (acc << 1) | s as u64)
    }

    pub fn rotate(&self, k: usize) -> Self {
        let mut w = self.word.clone();
        let n = w.len();
        w.rotate_left(k % n);
        SymbolCode { word: w }
    }

    /// Smallest period of the cyclic word.
    pub fn primitive_period(&self) -> usize {
        let n = self.word.len();
        (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| self.word[i] == self.word[(i + d) % n]))
            .unwrap_or(n)
    }

    pub fn primitive(&self) -> Self {
        SymbolCode { word: self.word[..self.primitive_period()].to_vec() }
    }

    /// Lexicographically least rotation.
    pub fn canonical(&self) -> Self {
        (0..self.word.len()).map(|k| self.rotate(k)).min().unwrap_or_else(|| self.clone())
    }

    pub fn is_admissible(&self, tm: &TransitionMatrix) -> bool {
        let n = self.word.len();
        (0..n).all(|i| {
            let (a, b) = (self.word[i], self.word[(i + 1) % n]);
            (a as usize) < tm.alphabet() && (b as usize) < tm.alphabet() && tm.allows(a, b)
        })
    }
}

impl fmt::Display for SymbolCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.word {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// All cyclically admissible words of length `t`, in lexicographic order.
pub fn periodic_words(tm: &TransitionMatrix, t: usize, budget: u64) -> Result<Vec<SymbolCode>> {
    if t == 0 {
        return Err(Error::InvalidParameter("period must be at least 1".into()));
    }
    let count = tm.trace_power(t as u32);
    if count > budget as u128 {
        return Err(Error::BudgetExceeded { needed: count.min(u64::MAX as u128) as u64, budget });
    }
    let m = tm.alphabet();
    let mut out = Vec::with_capacity(count as usize);
    let mut word = vec![0u8; t];
    fn extend(tm: &TransitionMatrix, m: usize, word: &mut Vec<u8>, i: usize, out: &mut Vec<SymbolCode>) {
        let t = word.len();
        if i == t {
            if tm.allows(word[t - 1], word[0]) {
                out.push(SymbolCode { word: word.clone() });
            }
            return;
        }
        for s in 0..m as u8 {
            if i == 0 || tm.allows(word[i - 1], s) {
                word[i] = s;
                extend(tm, m, word, i + 1, out);
            }
        }
    }
    extend(tm, m, &mut word, 0, &mut out);
    Ok(out)
}

/// One canonical primitive code per periodic orbit whose period divides `t`.
pub fn periodic_orbit_codes(tm: &TransitionMatrix, t: usize, budget: u64) -> Result<Vec<SymbolCode>> {
    let mut codes: Vec<SymbolCode> = periodic_words(tm, t, budget)?
        .into_iter()
        .filter(|w| *w == w.canonical())
        .map(|w| w.primitive())
        .collect();
    codes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(codes)
}
