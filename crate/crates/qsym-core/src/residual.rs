//! Residual bookkeeping for identity checks.

use astro_float::BigFloat;

use crate::complex::{big_max, big_to_f64, ApComplex, RM};

/// Absolute and relative discrepancy between two sides of an identity.
///
/// The relative figure is `|lhs - rhs| / max(1, |lhs|, |rhs|)`, so it falls
/// back to the absolute difference when both sides are below one.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub rel: f64,
}

impl Residual {
    pub fn between(lhs: &ApComplex, rhs: &ApComplex) -> Self {
        let bits = lhs.bits().max(rhs.bits());
        let diff = (lhs - rhs).abs();
        let scale = big_max(
            BigFloat::from_word(1, bits),
            big_max(lhs.abs(), rhs.abs()),
        );
        Self {
            abs: big_to_f64(&diff),
            rel: big_to_f64(&diff.div(&scale, bits, RM)),
        }
    }

    /// Residual of `value` against the exact constant `target`.
    pub fn against_int(value: &ApComplex, target: i64) -> Self {
        Self::between(value, &ApComplex::from_i64(target, value.bits()))
    }

    /// Entrywise maximum. A NaN on either side propagates as infinity so a
    /// broken evaluation can never look like a pass.
    pub fn max(self, other: Self) -> Self {
        fn pick(a: f64, b: f64) -> f64 {
            if a.is_nan() || b.is_nan() {
                f64::INFINITY
            } else {
                a.max(b)
            }
        }
        Self {
            abs: pick(self.abs, other.abs),
            rel: pick(self.rel, other.rel),
        }
    }

    pub fn absorb(&mut self, lhs: &ApComplex, rhs: &ApComplex) {
        *self = self.max(Self::between(lhs, rhs));
    }
}
