//! Exact reduced dynamics of one or two central qubits coupled to an Ising
//! spin bath.
//!
//! The bath Hamiltonian is diagonal in the product basis of environment
//! spins, so the total evolution splits into independent 2×2 (or 4×4)
//! blocks, one per bath configuration. This crate evaluates the resulting
//! configuration sums, either by brute-force enumeration or by collapsing
//! configurations into equivalence classes with combinatorial
//! multiplicities, which keeps baths of several hundred spins tractable.
//!
//! Two initial preparations are modelled for every scenario:
//!
//! * `woc`: the qubit is prepared from a product state, ignoring the
//!   system–bath interaction before the pulse.
//! * `wc`: the qubit and bath start in their joint Gibbs state, so the
//!   pulse acts on a correlated state.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bath;
mod error;
pub mod logsum;
pub mod qmatrix;
pub mod series;
pub mod single;
pub mod two_qubit;

pub use error::{Error, Result};
