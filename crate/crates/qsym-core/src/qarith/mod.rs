//! Quantum numbers, q-factorials, Gaussian binomials, the `⟨a|b⟩` product
//! function, q-Pochhammer symbols and the basic hypergeometric series `₂φ₁`.

pub mod checks;

use alloc::format;

use crate::complex::{big_lt, big_max, ApComplex, RM};
use crate::context::QContext;
use crate::error::{QError, Result};

/// Quantum number `[x] = (q^x - q^-x) / (q - q^-1)`.
pub fn qnum(ctx: &QContext, x: &ApComplex) -> ApComplex {
    ctx.qnum_of(&ctx.qpow(x))
}

/// Quantum factorial `[n]! = [1][2]...[n]`.
pub fn qfact(ctx: &QContext, n: i64) -> Result<ApComplex> {
    if n < 0 {
        return Err(QError::Domain(format!("qfact of negative integer {n}")));
    }
    Ok(ctx.fact_table(n as usize))
}

/// `1/[n]!`, and exactly zero for negative `n`.
///
/// Sums throughout the crate run over rectangular index ranges and rely on
/// this zero to drop the terms that lie outside the true summation range.
pub fn inv_qfact_reg(ctx: &QContext, n: i64) -> ApComplex {
    if n < 0 {
        ctx.zero()
    } else {
        ctx.inv_fact_table(n as usize)
    }
}

/// Gaussian binomial `[m]! / ([n]! [m-n]!)`, zero when `n` is outside `0..=m`.
pub fn qbinom(ctx: &QContext, m: i64, n: i64) -> Result<ApComplex> {
    let top = qfact(ctx, m)?;
    Ok(top * inv_qfact_reg(ctx, n) * inv_qfact_reg(ctx, m - n))
}

/// `∏_{j=1..m} [b+j]`; the empty product for `m <= 0`.
pub fn rising(ctx: &QContext, b: &ApComplex, m: i64) -> ApComplex {
    shifted_product(ctx, b, 1..=m)
}

/// `∏_{j=0..m-1} [x-j]`; the empty product for `m <= 0`.
pub fn falling(ctx: &QContext, x: &ApComplex, m: i64) -> ApComplex {
    shifted_product(ctx, x, (0..m).map(|j| -j))
}

/// [`rising`] for use as a denominator: every factor must be generic.
pub fn rising_checked(ctx: &QContext, b: &ApComplex, m: i64, what: &'static str) -> Result<ApComplex> {
    checked_product(ctx, b, 1..=m, what)
}

/// [`falling`] for use as a denominator: every factor must be generic.
pub fn falling_checked(ctx: &QContext, x: &ApComplex, m: i64, what: &'static str) -> Result<ApComplex> {
    checked_product(ctx, x, (0..m).map(|j| -j), what)
}

fn shifted_product(ctx: &QContext, base: &ApComplex, offsets: impl Iterator<Item = i64>) -> ApComplex {
    let mut offsets = offsets.peekable();
    if offsets.peek().is_none() {
        return ctx.one();
    }
    let p = ctx.qpow(base);
    let mut acc: Option<ApComplex> = None;
    for j in offsets {
        let f = ctx.qnum_of(&ctx.shift(&p, j));
        acc = Some(match acc {
            None => f,
            Some(a) => a * f,
        });
    }
    acc.unwrap_or_else(|| ctx.one())
}

fn checked_product(
    ctx: &QContext,
    base: &ApComplex,
    offsets: impl Iterator<Item = i64>,
    what: &'static str,
) -> Result<ApComplex> {
    let p = ctx.qpow(base);
    let mut acc = ctx.one();
    for j in offsets {
        let f = ctx.qnum_of(&ctx.shift(&p, j));
        ctx.ensure_generic(&f, what)?;
        acc = acc * f;
    }
    Ok(acc)
}

/// The product function `⟨a|b⟩` with `a = b + d`:
/// `∏_{j=1..d} [b+j]` for `d > 0`, its reciprocal form for `d < 0`, and `1`
/// for `d = 0`. The integer offset is always passed explicitly.
pub fn qpair(ctx: &QContext, b: &ApComplex, d: i64) -> Result<ApComplex> {
    match d.signum() {
        1 => Ok(rising(ctx, b, d)),
        -1 => Ok(rising_checked(ctx, &(b + d), -d, "qpair denominator")?.recip()),
        _ => Ok(ctx.one()),
    }
}

/// `∏_{j=0..m-1}[x-j]` continued to negative `m` as `⟨x|x-m⟩`.
pub fn falling_ext(ctx: &QContext, x: &ApComplex, m: i64) -> Result<ApComplex> {
    qpair(ctx, &(x - m), m)
}

/// Integer power `z^n`, including negative `n`.
pub fn powi(ctx: &QContext, z: &ApComplex, n: i64) -> ApComplex {
    let mut base = if n < 0 { z.recip() } else { z.clone() };
    let mut e = n.unsigned_abs();
    let mut acc = ctx.one();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Finite q-Pochhammer symbol `(a; base)_n = ∏_{j=0..n-1} (1 - a base^j)`.
pub fn poch(ctx: &QContext, a: &ApComplex, base: &ApComplex, n: u32) -> ApComplex {
    let one = ctx.one();
    let mut acc = ctx.one();
    let mut t = a.clone();
    for _ in 0..n {
        acc = &acc * &(&one - &t);
        t = &t * base;
    }
    acc
}

/// Infinite q-Pochhammer symbol `(a; base)_∞`, truncated at the first `M`
/// with `|a base^M|` below the context's tail target.
pub fn poch_inf(ctx: &QContext, a: &ApComplex, base: &ApComplex) -> Result<ApComplex> {
    if !big_lt(&base.norm_sqr(), &ctx.one().norm_sqr()) {
        return Err(QError::Domain("poch_inf needs |base| < 1".into()));
    }
    let eps_sq = ctx.poch_tail_eps().mul(ctx.poch_tail_eps(), ctx.bits(), RM);
    let one = ctx.one();
    let mut acc = ctx.one();
    let mut t = a.clone();
    for _ in 0..=ctx.poch_max_terms() {
        if big_lt(&t.norm_sqr(), &eps_sq) {
            return Ok(acc);
        }
        acc = &acc * &(&one - &t);
        t = &t * base;
    }
    Err(QError::Convergence(ctx.poch_max_terms()))
}

/// First numerator parameter of [`phi21`].
#[derive(Clone, Debug)]
pub enum Upper {
    /// A generic value; the series is summed until its tail is negligible.
    Generic(ApComplex),
    /// `a = base^{-m}`: the series stops exactly after the `m`-th term.
    Terminating(u32),
}

/// Basic hypergeometric series `₂φ₁(a, b; c; base, z)`.
pub fn phi21(
    ctx: &QContext,
    a: &Upper,
    b: &ApComplex,
    c: &ApComplex,
    base: &ApComplex,
    z: &ApComplex,
) -> Result<ApComplex> {
    let one = ctx.one();
    let (a_val, last) = match a {
        Upper::Generic(v) => (v.clone(), None),
        Upper::Terminating(m) => (powi(ctx, base, -(*m as i64)), Some(*m as usize)),
    };
    let cap = ctx.poch_max_terms();
    let eps = ctx.poch_tail_eps();
    let mut sum = ctx.one();
    let mut term = ctx.one();
    let mut base_n = ctx.one();
    for n in 0..cap {
        if last == Some(n) {
            return Ok(sum);
        }
        let base_n1 = &base_n * base;
        let den = &(&one - &base_n1) * &(&one - &(c * &base_n));
        ctx.ensure_generic(&den, "phi21 denominator")?;
        let num = &(&one - &(&a_val * &base_n)) * &(&one - &(b * &base_n));
        let next = &(&(&term * &num) / &den) * z;
        sum = &sum + &next;
        if last.is_none() {
            if next.is_zero() {
                return Ok(sum);
            }
            let ratio_sq = next.norm_sqr().div(&term.norm_sqr(), ctx.bits(), RM);
            let ratio = ratio_sq.sqrt(ctx.bits(), RM);
            let one_r = one.re();
            if big_lt(&ratio, one_r) {
                // geometric bound on the remaining tail
                let gap = one_r.sub(&ratio, ctx.bits(), RM);
                let tail = next.abs().mul(&ratio, ctx.bits(), RM).div(&gap, ctx.bits(), RM);
                let scale = big_max(one_r.clone(), sum.abs());
                if big_lt(&tail, &eps.mul(&scale, ctx.bits(), RM)) {
                    return Ok(sum);
                }
            }
        }
        term = next;
        base_n = base_n1;
    }
    Err(QError::Convergence(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Residual;

    fn ctx2() -> QContext {
        QContext::from_decimal("2", 64).unwrap()
    }

    fn close(a: &ApComplex, re: f64) -> bool {
        (a.re_f64() - re).abs() <= 1e-13 * re.abs().max(1.0) && a.im_f64().abs() < 1e-30
    }

    #[test]
    fn qnum_values() {
        let ctx = ctx2();
        assert!(qnum(&ctx, &ctx.int(0)).is_zero());
        assert!(close(&qnum(&ctx, &ctx.int(1)), 1.0));
        // (8 - 1/8) / (2 - 1/2)
        let oracle = (8.0 - 0.125) / 1.5;
        assert!(close(&qnum(&ctx, &ctx.int(3)), oracle));
        assert!(close(&ctx.qnum_int(3), oracle));
        assert!(close(&ctx.qnum_int(-3), -oracle));
    }

    #[test]
    fn factorials_and_binomials() {
        let ctx = ctx2();
        assert!(close(&qfact(&ctx, 0).unwrap(), 1.0));
        assert!(close(&qfact(&ctx, 1).unwrap(), 1.0));
        assert!(close(&qfact(&ctx, 3).unwrap(), 1.0 * 2.5 * 5.25));
        assert!(qfact(&ctx, -1).is_err());
        assert!(inv_qfact_reg(&ctx, -1).is_zero());
        assert!(close(&inv_qfact_reg(&ctx, 0), 1.0));
        assert!(close(&inv_qfact_reg(&ctx, 2), 0.4));
        for m in 0..6 {
            assert!(close(&qbinom(&ctx, m, 0).unwrap(), 1.0));
            assert!(close(&qbinom(&ctx, m, m).unwrap(), 1.0));
        }
        let q4 = (16.0 - 1.0 / 16.0) / 1.5;
        assert!(close(&qbinom(&ctx, 4, 2).unwrap(), q4 * 5.25 / 2.5));
        assert!(qbinom(&ctx, 4, 5).unwrap().is_zero());
    }

    #[test]
    fn qpair_values() {
        let ctx = ctx2();
        assert!(close(&qpair(&ctx, &ctx.real(0.37), 0).unwrap(), 1.0));
        assert!(close(&qpair(&ctx, &ctx.int(1), 2).unwrap(), 2.5 * 5.25));
        assert!(close(&qpair(&ctx, &ctx.int(3), -2).unwrap(), 1.0 / (2.5 * 5.25)));
        assert!(matches!(qpair(&ctx, &ctx.int(1), -3), Err(QError::NonGeneric(_))));
    }

    #[test]
    fn pochhammer_values() {
        let ctx = ctx2();
        let half = ctx.real(0.5);
        assert!(close(&poch(&ctx, &half, &half, 0), 1.0));
        assert!(poch(&ctx, &ctx.one(), &half, 3).is_zero());
        assert!(close(&poch(&ctx, &half, &half, 2), 0.375));
        assert!(close(&poch_inf(&ctx, &ctx.zero(), &half).unwrap(), 1.0));
        let oracle = poch(&ctx, &half, &half, 400);
        let r = Residual::between(&poch_inf(&ctx, &half, &half).unwrap(), &oracle);
        assert!(r.rel < 1e-62, "{r:?}");
        assert!(matches!(poch_inf(&ctx, &half, &ctx.real(1.2)), Err(QError::Domain(_))));
        let capped = ctx2().with_poch_limits(64, 5);
        assert_eq!(
            poch_inf(&capped, &half, &ctx.real(0.9)).unwrap_err(),
            QError::Convergence(5)
        );
    }

    #[test]
    fn phi21_special_cases() {
        let ctx = ctx2();
        let (b, c, base) = (ctx.real(0.3), ctx.real(0.45), ctx.real(0.6));
        let a = ctx.real(0.7);
        let s = phi21(&ctx, &Upper::Generic(a.clone()), &b, &c, &base, &ctx.zero()).unwrap();
        assert!(close(&s, 1.0));
        let z = ctx.real(0.8);
        let t = phi21(&ctx, &Upper::Terminating(1), &b, &c, &base, &z).unwrap();
        let a1 = 1.0 / 0.6;
        let expect = 1.0 + (1.0 - a1) * (1.0 - 0.3) / ((1.0 - 0.6) * (1.0 - 0.45)) * 0.8;
        assert!(close(&t, expect));
        let diverge = phi21(&ctx, &Upper::Generic(a), &b, &c, &base, &ctx.real(3.0));
        assert!(matches!(diverge, Err(QError::Convergence(_))));
    }
}
