#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod entanglement;
pub mod error;
pub mod fixtures;
pub mod fock;
pub mod optimize;
pub mod permanent;
pub mod transform;

pub use error::{Error, Result};
