//! Split compilation of quantum circuits.
//!
//! The pipeline hides a circuit `C` from untrusted compilers by inserting a
//! random circuit `R` and its inverse into idle slots (no depth cost), then
//! cutting the result along a jagged per-qubit boundary so that `R⁻¹` and
//! `R` land with different compilers. The owner recombines the compiled
//! halves and `R` cancels.

pub mod attack;
pub mod bench;
pub mod circuit;
pub mod cli;
pub mod compiler;
pub mod error;
pub mod io;
pub mod obfuscate;
pub mod pipeline;
pub mod rng;
pub mod sim;
pub mod split;
