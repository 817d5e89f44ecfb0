//! Residual evaluators for the identities satisfied by quantum numbers,
//! Gaussian binomials, `⟨a|b⟩` and q-Pochhammer symbols.
//!
//! Each function scans a fixed integer parameter range and returns the
//! largest residual seen. Generic (non-integer) parameters are supplied by
//! the caller.

use crate::complex::ApComplex;
use crate::context::{signed, QContext};
use crate::error::{QError, Result};
use crate::residual::Residual;

use super::{
    falling, falling_ext, inv_qfact_reg as iqf, poch, poch_inf, phi21, powi, qbinom, qfact, qpair,
    rising, Upper,
};

/// Sign choice for identities stated with `±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlusMinus {
    Plus,
    Minus,
}

impl PlusMinus {
    pub const BOTH: [PlusMinus; 2] = [PlusMinus::Plus, PlusMinus::Minus];

    pub fn sign(self) -> i64 {
        match self {
            PlusMinus::Plus => 1,
            PlusMinus::Minus => -1,
        }
    }
}

/// Pascal-type recursion of Gaussian binomials for `0 <= m <= n <= 12`.
pub fn qbinrec(ctx: &QContext, pm: PlusMinus) -> Result<Residual> {
    let s = pm.sign();
    let mut res = Residual::default();
    for n in 1..=12 {
        for m in 0..=n {
            let lhs = qbinom(ctx, n, m)?;
            let rhs = ctx.qp_int(s * m) * qbinom(ctx, n - 1, m)?
                + ctx.qp_int(-s * (n - m)) * qbinom(ctx, n - 1, m - 1)?;
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// Alternating sum with a Kronecker delta on the right, `0 <= a, b <= 10`.
pub fn qbid1(ctx: &QContext, pm: PlusMinus) -> Result<Residual> {
    let s = pm.sign();
    let mut res = Residual::default();
    for a in 0..=10i64 {
        for b in 0..=10i64 {
            let lhs: ApComplex = (-1..=12)
                .map(|j| {
                    let t = ctx.qp_int(s * ((a - b) * j - (j - b))) * iqf(ctx, a - j) * iqf(ctx, j - b);
                    signed(j, t)
                })
                .sum();
            let rhs = if a == b { ctx.int(if a % 2 == 0 { 1 } else { -1 }) } else { ctx.zero() };
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// Four-factorial sum, on integers `a, b, c <= 10` and with `a` continued to
/// the generic value `big_a`.
pub fn qbid2(ctx: &QContext, big_a: &ApComplex, pm: PlusMinus) -> Result<Residual> {
    let s = pm.sign();
    let mut res = Residual::default();
    for a in 0..=10i64 {
        for b in 0..=10i64 {
            for c in 0..=10i64 {
                let lhs: ApComplex = (0..=10)
                    .map(|j| {
                        ctx.qp_int(s * a * j) * iqf(ctx, j) * iqf(ctx, b - j) * iqf(ctx, c - j) * iqf(ctx, a - b - c + j)
                    })
                    .sum();
                let rhs = ctx.qp_int(s * b * c)
                    * qfact(ctx, a)?
                    * iqf(ctx, b)
                    * iqf(ctx, c)
                    * iqf(ctx, a - b)
                    * iqf(ctx, a - c);
                res.absorb(&lhs, &rhs);
            }
        }
    }
    for b in 0..=8i64 {
        for c in 0..=8i64 {
            let base = big_a - (b + c);
            let mut lhs = ctx.zero();
            for j in 0..=b.min(c) {
                let t = ctx.qp(&(big_a * (s * j))) / qpair(ctx, &base, j)? * iqf(ctx, j) * iqf(ctx, b - j) * iqf(ctx, c - j);
                lhs = lhs + t;
            }
            let rhs = ctx.qp_int(s * b * c) * qpair(ctx, &(big_a - b), b)? / qpair(ctx, &base, b)?
                * iqf(ctx, b)
                * iqf(ctx, c);
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// Factorial-ratio sum, on integers `a, b <= 10`, `c <= a`, and with `a, b`
/// continued to the generic values `big_a, big_b`.
pub fn qbid3(ctx: &QContext, big_a: &ApComplex, big_b: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    for a in 0..=10i64 {
        for b in 0..=10i64 {
            for c in 0..=a {
                let mut lhs = ctx.zero();
                for j in 0..=c {
                    lhs = lhs
                        + ctx.qp_int(j * (a + b - c + 2)) * qfact(ctx, a - j)? * qfact(ctx, b + j)? * iqf(ctx, j) * iqf(ctx, c - j);
                }
                let rhs = ctx.qp_int(c * (b + 1))
                    * qfact(ctx, a - c)?
                    * qfact(ctx, b)?
                    * qfact(ctx, a + b + 1)?
                    * iqf(ctx, c)
                    * iqf(ctx, a + b - c + 1);
                res.absorb(&lhs, &rhs);
            }
        }
    }
    let ab = big_a + big_b;
    for c in 0..=8i64 {
        let mut lhs = ctx.zero();
        for j in 0..=c {
            let t = ctx.qp(&(&ab - (c - 2)).scale(j)) * qpair(ctx, big_a, -j)? * qpair(ctx, big_b, j)? * iqf(ctx, j) * iqf(ctx, c - j);
            lhs = lhs + t;
        }
        let rhs = ctx.qp(&(big_b + 1).scale(c)) * qpair(ctx, big_a, -c)? * qpair(ctx, &(&ab - (c - 1)), c)? * iqf(ctx, c);
        res.absorb(&lhs, &rhs);
    }
    Ok(res)
}

/// Alternating three-factorial sum, on integers `b, c <= a <= 10` and with
/// `a` continued to the generic value `big_a`.
pub fn qbid4(ctx: &QContext, big_a: &ApComplex, pm: PlusMinus) -> Result<Residual> {
    let s = pm.sign();
    let mut res = Residual::default();
    for a in 0..=10i64 {
        for b in 0..=a {
            for c in 0..=a {
                let mut lhs = ctx.zero();
                for j in 0..=b.min(c) {
                    let t = ctx.qp_int(s * j * (a - b - c + 1)) * qfact(ctx, a - j)? * iqf(ctx, j) * iqf(ctx, b - j) * iqf(ctx, c - j);
                    lhs = lhs + signed(j, t);
                }
                let rhs = ctx.qp_int(-s * b * c)
                    * qfact(ctx, a - b)?
                    * qfact(ctx, a - c)?
                    * iqf(ctx, b)
                    * iqf(ctx, c)
                    * iqf(ctx, a - b - c);
                res.absorb(&lhs, &rhs);
            }
        }
    }
    for b in 0..=8i64 {
        for c in 0..=8i64 {
            let mut lhs = ctx.zero();
            for j in 0..=b.min(c) {
                let e = (big_a - (b + c - 1)).scale(s * j);
                let t = ctx.qp(&e) * qpair(ctx, big_a, -j)? * iqf(ctx, j) * iqf(ctx, b - j) * iqf(ctx, c - j);
                lhs = lhs + signed(j, t);
            }
            let rhs = ctx.qp_int(-s * b * c)
                * qpair(ctx, big_a, -b)?
                * qpair(ctx, &(big_a - (b + c)), b)?
                * iqf(ctx, b)
                * iqf(ctx, c);
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// `⟨a|b⟩ ∏_{j<c}[b-j] = ⟨a|b-c⟩` for offsets `|a-b| <= 8`, `c <= 8`.
pub fn qpfid2(ctx: &QContext, b: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    for d in -8..=8i64 {
        for c in 0..=8i64 {
            let lhs = qpair(ctx, b, d)? * falling(ctx, b, c);
            let rhs = qpair(ctx, &(b - c), d + c)?;
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// `⟨a|b⟩ / ∏_{j=1..c-b}[b+j] = ⟨a|c⟩` for offsets `|a-b| <= 8`, `0 <= c-b <= 8`.
pub fn qpfid3(ctx: &QContext, b: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    for d in -8..=8i64 {
        for e in 0..=8i64 {
            let lhs = qpair(ctx, b, d)? / rising(ctx, b, e);
            let rhs = qpair(ctx, &(b + e), d - e)?;
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// `(a; base)_n (a base^n; base)_∞ = (a; base)_∞` for `n <= 8`.
pub fn id1(ctx: &QContext, a: &ApComplex, base: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    let full = poch_inf(ctx, a, base)?;
    for n in 0..=8u32 {
        let shifted = a * &powi(ctx, base, n as i64);
        let lhs = poch(ctx, a, base, n) * poch_inf(ctx, &shifted, base)?;
        res.absorb(&lhs, &full);
    }
    Ok(res)
}

/// Shift identity for `(a; base)_{n-k}`, `k <= n <= 10`.
pub fn id2(ctx: &QContext, a: &ApComplex, base: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    let a_inv = a.recip();
    let factor = -(base * &a_inv);
    for n in 0..=10i64 {
        let pn = poch(ctx, a, base, n as u32);
        let lower = &a_inv * &powi(ctx, base, 1 - n);
        for k in 0..=n {
            let lhs = poch(ctx, a, base, (n - k) as u32);
            let den = poch(ctx, &lower, base, k as u32);
            ctx.ensure_generic(&den, "id2 denominator")?;
            let rhs = powi(ctx, &factor, k) * powi(ctx, base, k * (k - 1) / 2 - n * k) * &pn / den;
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

/// `[k]!` through `(q^2; q^2)_k`, `k <= 10`.
pub fn qid1(ctx: &QContext) -> Result<Residual> {
    let mut res = Residual::default();
    let q2 = ctx.qp_int(2);
    for k in 0..=10i64 {
        let lhs = qfact(ctx, k)?;
        let rhs = signed(k, ctx.qp_int(-k * (k + 1) / 2))
            * powi(ctx, ctx.inv_diff(), k)
            * poch(ctx, &q2, &q2, k as u32);
        res.absorb(&lhs, &rhs);
    }
    Ok(res)
}

/// `∏_{j<k}[J-j]` through `(q^{-2J}; q^2)_k` for generic `J`, `k <= 10`.
pub fn qid2(ctx: &QContext, big_j: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    let q2 = ctx.qp_int(2);
    let a = ctx.qp(&big_j.scale(-2));
    for k in 0..=10i64 {
        let lhs = falling(ctx, big_j, k);
        let e = big_j.scale(k) + k * (1 - k) / 2;
        let rhs = ctx.qp(&e) * powi(ctx, ctx.inv_diff(), k) * poch(ctx, &a, &q2, k as u32);
        res.absorb(&lhs, &rhs);
    }
    Ok(res)
}

/// Gauss summation `₂φ₁(a, b; c; base, c/(ab))` as a ratio of infinite products.
pub fn hid1(ctx: &QContext, a: &ApComplex, b: &ApComplex, c: &ApComplex, base: &ApComplex) -> Result<Residual> {
    let z = c / &(a * b);
    if z.abs_f64() >= 1.0 {
        return Err(QError::Domain("hid1 needs |c/(ab)| < 1".into()));
    }
    let lhs = phi21(ctx, &Upper::Generic(a.clone()), b, c, base, &z)?;
    let num = poch_inf(ctx, &(c / a), base)? * poch_inf(ctx, &(c / b), base)?;
    let den = poch_inf(ctx, c, base)? * poch_inf(ctx, &z, base)?;
    ctx.ensure_generic(&den, "hid1 denominator")?;
    Ok(Residual::between(&lhs, &(num / den)))
}

/// Reciprocity `⟨a|b⟩⟨b|a⟩ = 1` and agreement with factorial ratios on integers.
pub fn qpf_basic(ctx: &QContext, b: &ApComplex) -> Result<Residual> {
    let mut res = Residual::default();
    for d in -6..=6i64 {
        let prod = qpair(ctx, b, d)? * qpair(ctx, &(b + d), -d)?;
        res.absorb(&prod, &ctx.one());
        let ext = falling_ext(ctx, b, d)?;
        res.absorb(&ext, &qpair(ctx, &(b - d), d)?);
    }
    for n in 0..=8i64 {
        for d in -n..=6 {
            let lhs = qpair(ctx, &ctx.int(n), d)?;
            let rhs = qfact(ctx, n + d)? * iqf(ctx, n);
            res.absorb(&lhs, &rhs);
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> QContext {
        QContext::from_decimal("1.37", 64).unwrap()
    }

    const TOL: f64 = 1e-32;

    #[test]
    fn binomial_and_sum_identities() {
        let ctx = ctx();
        let big_a = ctx.parse("3.77").unwrap();
        let big_b = ctx.parse("2.31").unwrap();
        for pm in PlusMinus::BOTH {
            assert!(qbinrec(&ctx, pm).unwrap().rel < TOL);
            assert!(qbid1(&ctx, pm).unwrap().rel < TOL);
            assert!(qbid2(&ctx, &big_a, pm).unwrap().rel < TOL);
            assert!(qbid4(&ctx, &big_a, pm).unwrap().rel < TOL);
        }
        assert!(qbid3(&ctx, &big_a, &big_b).unwrap().rel < TOL);
    }

    #[test]
    fn product_function_identities() {
        let ctx = ctx();
        let b = ctx.complex(2.618, 0.21);
        assert!(qpfid2(&ctx, &b).unwrap().rel < TOL);
        assert!(qpfid3(&ctx, &b).unwrap().rel < TOL);
        assert!(qpf_basic(&ctx, &b).unwrap().rel < TOL);
    }

    #[test]
    fn pochhammer_identities() {
        let ctx = ctx();
        let a = ctx.complex(0.41, 0.2);
        let base = ctx.complex(0.55, -0.1);
        assert!(id1(&ctx, &a, &base).unwrap().rel < 1e-62);
        assert!(id2(&ctx, &a, &base).unwrap().rel < TOL);
        assert!(qid1(&ctx).unwrap().rel < TOL);
        assert!(qid2(&ctx, &ctx.complex(4.3, 0.25)).unwrap().rel < TOL);
        let (b, c) = (ctx.real(0.62), ctx.real(0.13));
        let r = hid1(&ctx, &ctx.real(0.7), &b, &c, &ctx.real(0.5)).unwrap();
        assert!(r.rel < 1e-62, "{r:?}");
    }
}
