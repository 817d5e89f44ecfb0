//! Quantum 3j and 6j symbols for Verma modules of `U_q(sl2)` at generic `q`,
//! evaluated in arbitrary-precision complex arithmetic.
//!
//! The crate is `no_std` (it needs `alloc`). Every evaluator takes a
//! [`QContext`] that fixes `q`, the working precision and the tolerances.
//!
//! ```
//! use qsym_core::{qarith, QContext};
//!
//! let ctx = QContext::from_decimal("2", 32).unwrap();
//! let three = qarith::qnum(&ctx, &ctx.int(3));
//! assert!((three.re_f64() - 5.25).abs() < 1e-12);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod complex;
mod context;
mod error;
mod residual;

pub mod q3j;
pub mod q6j;
pub mod qarith;
pub mod verma;

pub use astro_float::BigFloat;
pub use complex::{big_to_f64, ApComplex};
pub use context::{bits_for_digits, signed, QContext, QPow, GUARD_BITS, MAX_DIGITS, MIN_DIGITS};
pub use error::{QError, Result};
pub use residual::Residual;
pub use verma::Weight;
