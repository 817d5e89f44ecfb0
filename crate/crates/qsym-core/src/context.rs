//! The evaluation context: deformation parameter, precision and tolerances.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix};

use crate::complex::{big_lt, ApComplex, ValueKey, RM};
use crate::error::{QError, Result};

/// Smallest accepted working precision in decimal digits.
pub const MIN_DIGITS: u32 = 16;
/// Largest accepted working precision in decimal digits.
pub const MAX_DIGITS: u32 = 600;
/// Extra binary digits carried beyond the requested decimal precision.
pub const GUARD_BITS: usize = 32;

const CACHE_LIMIT: usize = 1 << 16;

/// Number of mantissa bits used for a given decimal precision.
pub fn bits_for_digits(digits: u32) -> usize {
    // log2(10) ~ 3.3219281
    let b = (digits as usize * 33_219_281).div_ceil(10_000_000) + GUARD_BITS;
    b.div_ceil(64) * 64
}

/// `q^x` together with `q^{-x}`.
#[derive(Clone, Debug)]
pub struct QPow {
    pub pos: ApComplex,
    pub neg: ApComplex,
}

/// Ambient environment for every evaluation: `q`, working precision,
/// tolerances and truncation limits.
///
/// Construction validates the invariants (precision range, `q` away from
/// `±1`). Internally the context memoizes powers of `q` and a few derived
/// tables; the caches are private to the context and never change results.
pub struct QContext {
    q: ApComplex,
    log_q: ApComplex,
    inv_diff: ApComplex,
    pi: ApComplex,
    digits: u32,
    bits: usize,
    rel_tolerance: BigFloat,
    poch_tail_eps: BigFloat,
    poch_max_terms: usize,
    singular_sq: BigFloat,
    consts: RefCell<Consts>,
    pow_cache: RefCell<BTreeMap<ValueKey, QPow>>,
    int_qnum: RefCell<Vec<ApComplex>>,
    fact: RefCell<Vec<ApComplex>>,
    inv_fact: RefCell<Vec<ApComplex>>,
    pub(crate) dd_cache: RefCell<BTreeMap<(ValueKey, ValueKey, i64), ApComplex>>,
}

impl core::fmt::Debug for QContext {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("QContext")
            .field("q", &self.q)
            .field("precision_digits", &self.digits)
            .field("bits", &self.bits)
            .finish()
    }
}

fn power_of_ten(exp: i64, bits: usize, cc: &mut Consts) -> BigFloat {
    BigFloat::parse(&format!("1e{exp}"), Radix::Dec, bits, RM, cc)
}

impl QContext {
    /// Context for a decimal `q` (`"1.37"` or `"re,im"`) at `digits` digits.
    pub fn from_decimal(q: &str, digits: u32) -> Result<Self> {
        check_digits(digits)?;
        let bits = bits_for_digits(digits);
        let mut cc = new_consts();
        let q = ApComplex::parse(q, bits, &mut cc).ok_or_else(|| QError::Parse(q.to_string()))?;
        Self::build(q, digits, cc)
    }

    /// Context for an already constructed `q`, rounded to the working precision.
    pub fn new(q: &ApComplex, digits: u32) -> Result<Self> {
        check_digits(digits)?;
        let bits = bits_for_digits(digits);
        Self::build(q.with_bits(bits), digits, new_consts())
    }

    fn build(q: ApComplex, digits: u32, mut cc: Consts) -> Result<Self> {
        let bits = q.bits();
        let rel_tolerance = half_power_of_ten(digits, bits, &mut cc);
        let poch_tail_eps = power_of_ten(-(digits as i64), bits, &mut cc);
        let diff = &q - &q.recip();
        let tol = &rel_tolerance;
        let one = ApComplex::one(bits);
        if !big_lt(tol, &(&q - &one).abs()) || !big_lt(tol, &(&q + &one).abs()) || diff.is_zero() {
            return Err(QError::DegenerateQ);
        }
        let log_q = q.ln(&mut cc);
        let pi = ApComplex::from_parts(cc.pi(bits, RM), BigFloat::from_word(0, bits), bits);
        let singular_sq = rel_tolerance.mul(&rel_tolerance, bits, RM);
        Ok(Self {
            inv_diff: diff.recip(),
            q,
            log_q,
            pi,
            digits,
            bits,
            rel_tolerance,
            poch_tail_eps,
            poch_max_terms: 10 * digits as usize,
            singular_sq,
            consts: RefCell::new(cc),
            pow_cache: RefCell::new(BTreeMap::new()),
            int_qnum: RefCell::new(Vec::new()),
            fact: RefCell::new(Vec::new()),
            inv_fact: RefCell::new(Vec::new()),
            dd_cache: RefCell::new(BTreeMap::new()),
        })
    }

    /// Sibling context with `q` replaced by `1/q`, same precision and limits.
    pub fn inverted(&self) -> Result<Self> {
        let mut inv = Self::build(self.q.recip(), self.digits, new_consts())?;
        inv.singular_sq = self.singular_sq.clone();
        inv.poch_max_terms = self.poch_max_terms;
        inv.poch_tail_eps = self.poch_tail_eps.clone();
        inv.rel_tolerance = self.rel_tolerance.clone();
        Ok(inv)
    }

    /// Sets the modulus below which a denominator quantum number is treated
    /// as a pole, given as a power of ten (`threshold = 10^-exp10`).
    pub fn with_singular_threshold(mut self, exp10: u32) -> Self {
        let t = power_of_ten(-(exp10 as i64), self.bits, &mut self.consts.borrow_mut());
        self.singular_sq = t.mul(&t, self.bits, RM);
        self
    }

    pub fn with_poch_limits(mut self, tail_exp10: u32, max_terms: usize) -> Self {
        self.poch_tail_eps = power_of_ten(-(tail_exp10 as i64), self.bits, &mut self.consts.borrow_mut());
        self.poch_max_terms = max_terms;
        self
    }

    pub fn q(&self) -> &ApComplex {
        &self.q
    }

    pub fn log_q(&self) -> &ApComplex {
        &self.log_q
    }

    pub fn precision_digits(&self) -> u32 {
        self.digits
    }

    /// Mantissa length of every value produced by this context.
    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn rel_tolerance(&self) -> &BigFloat {
        &self.rel_tolerance
    }

    pub fn poch_tail_eps(&self) -> &BigFloat {
        &self.poch_tail_eps
    }

    pub fn poch_max_terms(&self) -> usize {
        self.poch_max_terms
    }

    pub fn zero(&self) -> ApComplex {
        ApComplex::zero(self.bits)
    }

    pub fn one(&self) -> ApComplex {
        ApComplex::one(self.bits)
    }

    pub fn int(&self, v: i64) -> ApComplex {
        ApComplex::from_i64(v, self.bits)
    }

    pub fn real(&self, v: f64) -> ApComplex {
        ApComplex::from_f64(v, 0.0, self.bits)
    }

    pub fn complex(&self, re: f64, im: f64) -> ApComplex {
        ApComplex::from_f64(re, im, self.bits)
    }

    /// Parses `"x"` or `"x,y"` at working precision.
    pub fn parse(&self, s: &str) -> Result<ApComplex> {
        ApComplex::parse(s, self.bits, &mut self.consts.borrow_mut())
            .ok_or_else(|| QError::Parse(s.to_string()))
    }

    /// Decimal strings for the real and imaginary part.
    pub fn to_decimal(&self, z: &ApComplex) -> (alloc::string::String, alloc::string::String) {
        z.to_decimal(&mut self.consts.borrow_mut())
    }

    /// Like [`QContext::to_decimal`], rounded to `digits` significant digits.
    pub fn to_decimal_digits(&self, z: &ApComplex, digits: u32) -> (alloc::string::String, alloc::string::String) {
        let (re, im) = self.to_decimal(z);
        let d = digits as usize;
        (crate::complex::round_decimal(&re, d), crate::complex::round_decimal(&im, d))
    }

    pub fn with_consts<R>(&self, f: impl FnOnce(&mut Consts) -> R) -> R {
        f(&mut self.consts.borrow_mut())
    }

    pub fn pi(&self) -> &ApComplex {
        &self.pi
    }

    pub fn exp(&self, z: &ApComplex) -> ApComplex {
        z.exp(&mut self.consts.borrow_mut())
    }

    pub fn ln(&self, z: &ApComplex) -> ApComplex {
        z.ln(&mut self.consts.borrow_mut())
    }

    /// `q^x` and `q^{-x}` on the principal branch of `log q`.
    pub fn qpow(&self, x: &ApComplex) -> QPow {
        let key = x.key();
        if let Some(v) = self.pow_cache.borrow().get(&key) {
            return v.clone();
        }
        let pos = self.exp(&(x * &self.log_q));
        let neg = pos.recip();
        let v = QPow { pos, neg };
        let mut cache = self.pow_cache.borrow_mut();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, v.clone());
        v
    }

    /// `q^x` alone.
    pub fn qp(&self, x: &ApComplex) -> ApComplex {
        self.qpow(x).pos
    }

    /// `q^k` for an integer `k`.
    pub fn qp_int(&self, k: i64) -> ApComplex {
        self.qpow(&self.int(k)).pos
    }

    /// `q^{x+j}` and `q^{-x-j}` from a known `q^x`.
    pub fn shift(&self, base: &QPow, j: i64) -> QPow {
        if j == 0 {
            return base.clone();
        }
        let step = self.qpow(&self.int(j));
        QPow {
            pos: &base.pos * &step.pos,
            neg: &base.neg * &step.neg,
        }
    }

    /// `[x]` from `q^x` and `q^{-x}`.
    pub fn qnum_of(&self, p: &QPow) -> ApComplex {
        &(&p.pos - &p.neg) * &self.inv_diff
    }

    /// `1/(q - q^{-1})`.
    pub fn inv_diff(&self) -> &ApComplex {
        &self.inv_diff
    }

    /// Integer quantum number `[n]`, tabulated.
    pub fn qnum_int(&self, n: i64) -> ApComplex {
        if n < 0 {
            return -self.qnum_int(-n);
        }
        let n = n as usize;
        if let Some(v) = self.int_qnum.borrow().get(n) {
            return v.clone();
        }
        let mut table = self.int_qnum.borrow_mut();
        while table.len() <= n {
            let k = table.len() as i64;
            let p = self.qpow(&self.int(k));
            table.push(self.qnum_of(&p));
        }
        table[n].clone()
    }

    /// `[n]!` for `n >= 0`, tabulated.
    pub(crate) fn fact_table(&self, n: usize) -> ApComplex {
        if let Some(v) = self.fact.borrow().get(n) {
            return v.clone();
        }
        let mut built: Vec<ApComplex> = self.fact.borrow().clone();
        if built.is_empty() {
            built.push(self.one());
        }
        while built.len() <= n {
            let k = built.len() as i64;
            let next = built.last().expect("seeded") * &self.qnum_int(k);
            built.push(next);
        }
        let v = built[n].clone();
        *self.fact.borrow_mut() = built;
        v
    }

    /// `1/[n]!` for `n >= 0`, tabulated.
    pub(crate) fn inv_fact_table(&self, n: usize) -> ApComplex {
        if let Some(v) = self.inv_fact.borrow().get(n) {
            return v.clone();
        }
        let mut built: Vec<ApComplex> = self.inv_fact.borrow().clone();
        while built.len() <= n {
            let k = built.len();
            built.push(self.fact_table(k).recip());
        }
        let v = built[n].clone();
        *self.inv_fact.borrow_mut() = built;
        v
    }

    /// Fails with [`QError::NonGeneric`] when `|v|` is below the pole threshold.
    pub fn ensure_generic(&self, v: &ApComplex, what: &'static str) -> Result<()> {
        if big_lt(&v.norm_sqr(), &self.singular_sq) {
            Err(QError::NonGeneric(what))
        } else {
            Ok(())
        }
    }

    /// `i^k`, exact.
    pub fn i_pow(&self, k: i64) -> ApComplex {
        match k.rem_euclid(4) {
            0 => self.one(),
            1 => ApComplex::i(self.bits),
            2 => self.int(-1),
            _ => -ApComplex::i(self.bits),
        }
    }

    /// `(-1)^x = exp(i pi x)` for complex `x`.
    pub fn minus_one_pow(&self, x: &ApComplex) -> ApComplex {
        self.exp(&(x * &self.pi).mul_i())
    }
}

/// Exact `(-1)^k` applied to `v`.
pub fn signed(k: i64, v: ApComplex) -> ApComplex {
    if k.rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

fn half_power_of_ten(digits: u32, bits: usize, cc: &mut Consts) -> BigFloat {
    let full = power_of_ten(-(digits as i64), bits, cc);
    full.sqrt(bits, RM)
}

fn check_digits(digits: u32) -> Result<()> {
    if !(MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
        return Err(QError::Precision {
            got: digits,
            min: MIN_DIGITS,
            max: MAX_DIGITS,
        });
    }
    Ok(())
}

fn new_consts() -> Consts {
    Consts::new().expect("allocating the constants cache")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::big_to_f64;

    #[test]
    fn defaults_follow_precision() {
        let ctx = QContext::from_decimal("2", 64).unwrap();
        assert_eq!(ctx.precision_digits(), 64);
        assert_eq!(ctx.poch_max_terms(), 640);
        let tol = big_to_f64(ctx.rel_tolerance());
        assert!((tol / 1e-32 - 1.0).abs() < 1e-12);
        let eps = big_to_f64(ctx.poch_tail_eps());
        assert!((eps / 1e-64 - 1.0).abs() < 1e-12);
        assert!(ctx.bits() >= 64 * 3322 / 1000);
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(matches!(QContext::from_decimal("2", 15), Err(QError::Precision { .. })));
        assert_eq!(QContext::from_decimal("1", 64).unwrap_err(), QError::DegenerateQ);
        assert_eq!(QContext::from_decimal("-1", 64).unwrap_err(), QError::DegenerateQ);
        assert!(matches!(QContext::from_decimal("x", 64), Err(QError::Parse(_))));
        assert!(QContext::from_decimal("1.000001", 16).is_ok());
        assert_eq!(QContext::from_decimal("1.0000000001", 16).unwrap_err(), QError::DegenerateQ);
    }

    #[test]
    fn powers_and_shifts_agree() {
        let ctx = QContext::from_decimal("1.37", 64).unwrap();
        let x = ctx.parse("2.71828").unwrap();
        let direct = ctx.qpow(&(&x + 3));
        let shifted = ctx.shift(&ctx.qpow(&x), 3);
        assert!((&direct.pos - &shifted.pos).abs_f64() < 1e-60);
        assert!((&direct.neg - &shifted.neg).abs_f64() < 1e-60);
        let prod = &direct.pos * &direct.neg;
        assert!((&prod - &ctx.one()).abs_f64() < 1e-70);
    }

    #[test]
    fn phases_are_exact() {
        let ctx = QContext::from_decimal("1.5", 32).unwrap();
        assert_eq!(ctx.i_pow(2).re_f64(), -1.0);
        assert_eq!(ctx.i_pow(-1).im_f64(), -1.0);
        let half = ctx.minus_one_pow(&ctx.real(0.5));
        assert!(half.re_f64().abs() < 1e-30 && (half.im_f64() - 1.0).abs() < 1e-30);
        assert_eq!(signed(3, ctx.one()).re_f64(), -1.0);
    }

    #[test]
    fn inverted_context_has_reciprocal_q() {
        let ctx = QContext::from_decimal("1.37", 40).unwrap();
        let inv = ctx.inverted().unwrap();
        assert!((&(ctx.q() * inv.q()) - &ctx.one()).abs_f64() < 1e-45);
    }
}
