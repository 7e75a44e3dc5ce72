#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod prelude;

pub mod algorithms;
pub mod classical;
pub mod qsim;
pub mod quantum;
pub mod semiclassics;
pub mod error;

pub use error::{Error, Result};
