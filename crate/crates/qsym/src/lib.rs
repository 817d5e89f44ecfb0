//! Identity harness and command-line interface on top of [`qsym_core`].
//!
//! The [`harness`] module holds the identity ledger, the seeded samplers
//! and the suite runner; [`cli`] wires them to the `qsym` binary.

pub mod cli;
pub mod harness;
