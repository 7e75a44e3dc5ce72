use crate::error::{Error, Result};
use crate::prelude::*;

/// Default limit on the total number of simulated qubits.
pub const DEFAULT_QUBIT_CAP: usize = 26;

/// Handle to a register of a [`RegisterLayout`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegId(pub(crate) usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

impl Register {
    pub fn mask(&self) -> usize {
        ((1usize << self.width) - 1) << self.offset
    }
}

/// Named registers packed little-endian into a basis index: the first register occupies the
/// lowest bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    regs: Vec<Register>,
    total: usize,
}

impl RegisterLayout {
    pub fn new(spec: &[(&str, usize)]) -> Result<Self> {
        Self::with_cap(spec, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(spec: &[(&str, usize)], cap: usize) -> Result<Self> {
        let mut regs = Vec::with_capacity(spec.len());
        let mut offset = 0;
        for &(name, width) in spec {
            if width == 0 {
                return Err(Error::Register(format!("register {name} has zero width")));
            }
            if regs.iter().any(|r: &Register| r.name == name) {
                return Err(Error::Register(format!("duplicate register name {name}")));
            }
            regs.push(Register { name: name.into(), offset, width });
            offset += width;
        }
        if offset > cap {
            return Err(Error::CapExceeded { what: "qubits", value: offset as u64, cap: cap as u64 });
        }
        Ok(RegisterLayout { regs, total: offset })
    }

    pub fn total_qubits(&self) -> usize {
        self.total
    }

    pub fn dim(&self) -> usize {
        1usize << self.total
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    pub fn id(&self, name: &str) -> Result<RegId> {
        self.regs
            .iter()
            .position(|r| r.name == name)
            .map(RegId)
            .ok_or_else(|| Error::Register(format!("unknown register {name}")))
    }

    pub fn register(&self, id: RegId) -> &Register {
        &self.regs[id.0]
    }

    pub fn width(&self, id: RegId) -> usize {
        self.regs[id.0].width
    }

    /// Value of register `id` in basis state `index`.
    pub fn value(&self, index: usize, id: RegId) -> u64 {
        let r = &self.regs[id.0];
        ((index >> r.offset) & ((1usize << r.width) - 1)) as u64
    }

    /// `index` with register `id` overwritten by `v`.
    pub fn with_value(&self, index: usize, id: RegId, v: u64) -> usize {
        let r = &self.regs[id.0];
        (index & !r.mask()) | (((v as usize) << r.offset) & r.mask())
    }

    /// Global index of qubit `bit` of register `id`.
    pub fn qubit(&self, id: RegId, bit: usize) -> Result<usize> {
        let r = &self.regs[id.0];
        if bit >= r.width {
            return Err(Error::Register(format!("qubit {bit} outside register {} of width {}", r.name, r.width)));
        }
        Ok(r.offset + bit)
    }

    /// Basis index with the given register values and zeros elsewhere.
    pub fn index_of(&self, values: &[(RegId, u64)]) -> Result<usize> {
        let mut idx = 0;
        for &(id, v) in values {
            if v >> self.width(id) != 0 {
                return Err(Error::Register(format!("value {v} does not fit register {}", self.register(id).name)));
            }
            idx = self.with_value(idx, id, v);
        }
        Ok(idx)
    }
}
