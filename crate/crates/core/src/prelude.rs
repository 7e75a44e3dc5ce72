//! Crate-internal imports shared by every module.
#![allow(unused_imports)]

pub(crate) use alloc::{format, string::String, vec, vec::Vec};
pub(crate) use num_complex::Complex64;
pub(crate) use num_traits::Float;
