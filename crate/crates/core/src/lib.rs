//! Simulation and verification lab for whip circuits and WALA.
//!
//! Three engines compute the same expectation values: a dense statevector
//! ([`statevector`]), exact or truncated Heisenberg-picture Pauli propagation
//! ([`propagation::naive_expectation`]), and the polynomial-time early-evaluation
//! propagation on 2-d whip circuits ([`propagation::early_eval_expectation`]).
//! [`analytic`] holds the closed forms and exact path counts they are checked
//! against.

pub mod analytic;
pub mod bench;
pub mod error;
pub mod lattice;
pub mod par;
pub mod pauli;
pub mod propagation;
pub mod scan;
pub mod statevector;
pub mod verify;
pub mod vqe;
pub mod wala;

pub use error::{Error, Result};
