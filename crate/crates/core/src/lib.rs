//! Exact computation with A-fibered bisets over finite groups, with A modeled
//! as the cyclic group Z/N.
//!
//! Groups are Cayley tables with the identity at index 0. Elements of a direct
//! product G×H are encoded as `i·|H| + j`. The crate only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bits;
pub mod cohom;
pub mod error;
pub mod fib;
pub mod grp;
pub mod idem;
pub mod lin;
pub mod linalg;
pub mod oracle;
pub mod ring;
pub mod simp;

pub use error::{Error, Result};
