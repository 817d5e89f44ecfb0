//! Arbitrary-precision complex numbers backed by `astro-float`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// A complex number whose parts carry a fixed binary precision.
///
/// Binary operations run at the larger precision of the two operands, so
/// values created through one [`crate::QContext`] stay at that context's
/// working precision.
#[derive(Clone)]
pub struct ApComplex {
    re: BigFloat,
    im: BigFloat,
    bits: usize,
}

impl fmt::Debug for ApComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApComplex({:e}, {:e})", self.re_f64(), self.im_f64())
    }
}

/// Lossy conversion of a `BigFloat` to the nearest `f64`, saturating to
/// infinity and flushing to zero outside the `f64` range.
pub fn big_to_f64(x: &BigFloat) -> f64 {
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return if x.is_inf_pos() {
            f64::INFINITY
        } else if x.is_inf_neg() {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        };
    };
    let Some(&top) = words.last() else {
        return 0.0;
    };
    if top == 0 {
        return 0.0;
    }
    // value = 0.m * 2^exp with the leading word holding the top 64 bits
    let mut v = top as f64;
    if words.len() > 1 {
        v += words[words.len() - 2] as f64 / 18_446_744_073_709_551_616.0;
    }
    let v = ldexp(v, exp as i64 - 64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

fn ldexp(mut v: f64, mut e: i64) -> f64 {
    let step = |k: i64| f64::from_bits(((k + 1023) as u64) << 52);
    while e > 1000 {
        v *= step(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= step(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * step(e)
}

pub(crate) fn big_int(i: i64, bits: usize) -> BigFloat {
    BigFloat::from_i64(i, bits)
}

impl ApComplex {
    /// Builds a value from real and imaginary parts, rounding both to `bits`.
    pub fn from_parts(re: BigFloat, im: BigFloat, bits: usize) -> Self {
        let mut re = re;
        let mut im = im;
        let _ = re.set_precision(bits, RM);
        let _ = im.set_precision(bits, RM);
        Self { re, im, bits }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_i64(0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_i64(1, bits)
    }

    /// The imaginary unit.
    pub fn i(bits: usize) -> Self {
        Self {
            re: BigFloat::from_word(0, bits),
            im: BigFloat::from_word(1, bits),
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        Self {
            re: big_int(v, bits),
            im: BigFloat::from_word(0, bits),
            bits,
        }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        Self {
            re: BigFloat::from_f64(re, bits),
            im: BigFloat::from_f64(im, bits),
            bits,
        }
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn re_f64(&self) -> f64 {
        big_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        big_to_f64(&self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    /// Same value rounded to a different precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        Self::from_parts(self.re.clone(), self.im.clone(), bits)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: BigFloat::neg(&self.im),
            bits: self.bits,
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self {
            re: BigFloat::neg(&self.im),
            im: self.re.clone(),
            bits: self.bits,
        }
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let p = self.bits;
        if self.im.is_zero() {
            return self.re.mul(&self.re, p, RM);
        }
        self.re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        self.norm_sqr().sqrt(self.bits, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        big_to_f64(&self.abs())
    }

    pub fn scale(&self, k: i64) -> Self {
        match k {
            1 => self.clone(),
            -1 => -self,
            _ => {
                let f = big_int(k, self.bits);
                self.scale_big(&f)
            }
        }
    }

    pub fn scale_big(&self, f: &BigFloat) -> Self {
        let p = self.bits;
        Self {
            re: self.re.mul(f, p, RM),
            im: if self.im.is_zero() {
                self.im.clone()
            } else {
                self.im.mul(f, p, RM)
            },
            bits: p,
        }
    }

    pub fn add_int(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        Self {
            re: self.re.add(&big_int(k, self.bits), self.bits, RM),
            im: self.im.clone(),
            bits: self.bits,
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.bits;
        if self.im.is_zero() {
            return Self {
                re: self.re.reciprocal(p, RM),
                im: BigFloat::from_word(0, p),
                bits: p,
            };
        }
        let n = self.norm_sqr();
        Self {
            re: self.re.div(&n, p, RM),
            im: BigFloat::neg(&self.im).div(&n, p, RM),
            bits: p,
        }
    }

    /// Principal square root, with the cut along the negative real axis and
    /// `sqrt(-x) = +i sqrt(x)` on the cut.
    pub fn sqrt(&self) -> Self {
        let p = self.bits;
        if self.is_zero() {
            return Self::zero(p);
        }
        if self.im.is_zero() {
            return if self.re.is_positive() {
                Self::from_parts(self.re.sqrt(p, RM), BigFloat::from_word(0, p), p)
            } else {
                Self::from_parts(BigFloat::from_word(0, p), self.re.abs().sqrt(p, RM), p)
            };
        }
        let r = self.abs();
        let two = BigFloat::from_word(2, p);
        if !self.re.is_negative() {
            let t = r.add(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
            let im = self.im.div(&t.mul(&two, p, RM), p, RM);
            Self::from_parts(t, im, p)
        } else {
            let t = r.sub(&self.re, p, RM).div(&two, p, RM).sqrt(p, RM);
            let re = self.im.abs().div(&t.mul(&two, p, RM), p, RM);
            let im = if self.im.is_negative() { BigFloat::neg(&t) } else { t };
            Self::from_parts(re, im, p)
        }
    }

    /// `e^self`.
    pub fn exp(&self, cc: &mut Consts) -> Self {
        let p = self.bits;
        let m = self.re.exp(p, RM, cc);
        if self.im.is_zero() {
            return Self {
                re: m,
                im: BigFloat::from_word(0, p),
                bits: p,
            };
        }
        let c = self.im.cos(p, RM, cc);
        let s = self.im.sin(p, RM, cc);
        Self {
            re: m.mul(&c, p, RM),
            im: m.mul(&s, p, RM),
            bits: p,
        }
    }

    /// Principal logarithm with argument in `(-pi, pi]`.
    pub fn ln(&self, cc: &mut Consts) -> Self {
        let p = self.bits;
        let modulus = self.abs();
        let re = modulus.ln(p, RM, cc);
        let im = atan2(&self.im, &self.re, p, cc);
        Self { re, im, bits: p }
    }

    /// Parses `"x"` or `"x,y"` (meaning `x + y i`) from decimal notation.
    pub fn parse(s: &str, bits: usize, cc: &mut Consts) -> Option<Self> {
        let s = s.trim();
        let (re_s, im_s) = match s.split_once(',') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let re = parse_real(re_s, bits, cc)?;
        let im = match im_s {
            Some(t) => parse_real(t, bits, cc)?,
            None => BigFloat::from_word(0, bits),
        };
        Some(Self { re, im, bits })
    }

    /// Decimal rendering of the real and imaginary parts.
    pub fn to_decimal(&self, cc: &mut Consts) -> (String, String) {
        (format_real(&self.re, cc), format_real(&self.im, cc))
    }

    /// Bit pattern of the value, usable as an exact map key.
    pub(crate) fn key(&self) -> ValueKey {
        let mut out = Vec::with_capacity(2 * (self.bits / 64 + 2));
        push_key(&self.re, &mut out);
        push_key(&self.im, &mut out);
        ValueKey(out)
    }
}

/// Exact bit-pattern key of one or more values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct ValueKey(pub(crate) Vec<u64>);

#[allow(clippy::useless_conversion)]
fn push_key(x: &BigFloat, out: &mut Vec<u64>) {
    match x.as_raw_parts() {
        Some((words, _, sign, exp, _)) => {
            let zero = words.iter().all(|w| *w == 0);
            if zero {
                out.push(0);
                return;
            }
            out.push(if sign == Sign::Neg { 2 } else { 1 });
            out.push(exp as i64 as u64);
            out.push(words.len() as u64);
            out.extend(words.iter().map(|w| u64::from(*w)));
        }
        None => out.push(u64::MAX),
    }
}

fn parse_real(s: &str, bits: usize, cc: &mut Consts) -> Option<BigFloat> {
    if s.is_empty()
        || !s
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
    {
        return None;
    }
    let v = BigFloat::parse(s, Radix::Dec, bits, RM, cc);
    if v.is_nan() || v.is_inf() {
        None
    } else {
        Some(v)
    }
}

/// Rounds a scientific decimal string such as `-2.6207999e+5` to `digits`
/// significant digits, half away from zero, and drops trailing zeros.
pub(crate) fn round_decimal(s: &str, digits: usize) -> String {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", s),
    };
    let (mantissa, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return String::from(s);
    }
    let mut ds: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).map(|b| b - b'0').collect();
    let mut exp = exp + int_part.len() as i64 - 1;
    let lead = ds.iter().take_while(|&&d| d == 0).count();
    if lead == ds.len() {
        return String::from("0");
    }
    ds.drain(..lead);
    exp -= lead as i64;
    let digits = digits.max(1);
    if ds.len() > digits {
        let up = ds[digits] >= 5;
        ds.truncate(digits);
        if up {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    while ds.len() > 1 && ds.last() == Some(&0) {
        ds.pop();
    }
    let mut out = String::from(sign);
    out.push((b'0' + ds[0]) as char);
    if ds.len() > 1 {
        out.push('.');
        out.extend(ds[1..].iter().map(|&d| (b'0' + d) as char));
    }
    out.push_str(&format!("e{}{}", if exp < 0 { '-' } else { '+' }, exp.unsigned_abs()));
    out
}

fn format_real(x: &BigFloat, cc: &mut Consts) -> String {
    if x.is_zero() {
        return String::from("0");
    }
    x.format(Radix::Dec, RM, cc)
        .unwrap_or_else(|_| String::from("NaN"))
}

fn atan2(y: &BigFloat, x: &BigFloat, p: usize, cc: &mut Consts) -> BigFloat {
    if y.is_zero() {
        return if x.is_negative() {
            cc.pi(p, RM)
        } else {
            BigFloat::from_word(0, p)
        };
    }
    if x.is_zero() {
        let half_pi = cc.pi(p, RM).div(&BigFloat::from_word(2, p), p, RM);
        return if y.is_negative() { BigFloat::neg(&half_pi) } else { half_pi };
    }
    let base = y.div(x, p, RM).atan(p, RM, cc);
    if x.is_positive() {
        base
    } else if y.is_positive() {
        base.add(&cc.pi(p, RM), p, RM)
    } else {
        base.sub(&cc.pi(p, RM), p, RM)
    }
}

/// Compares two non-negative reals.
pub(crate) fn big_lt(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c < 0)
}

pub(crate) fn big_max(a: BigFloat, b: BigFloat) -> BigFloat {
    match a.cmp(&b) {
        Some(c) if c < 0 => b,
        _ => a,
    }
}

fn add_impl(a: &ApComplex, b: &ApComplex) -> ApComplex {
    let p = a.bits.max(b.bits);
    let im = match (a.im.is_zero(), b.im.is_zero()) {
        (true, true) => BigFloat::from_word(0, p),
        (false, true) => a.im.clone(),
        (true, false) => b.im.clone(),
        (false, false) => a.im.add(&b.im, p, RM),
    };
    ApComplex {
        re: a.re.add(&b.re, p, RM),
        im,
        bits: p,
    }
}

fn sub_impl(a: &ApComplex, b: &ApComplex) -> ApComplex {
    let p = a.bits.max(b.bits);
    let im = match (a.im.is_zero(), b.im.is_zero()) {
        (true, true) => BigFloat::from_word(0, p),
        (false, true) => a.im.clone(),
        (true, false) => BigFloat::neg(&b.im),
        (false, false) => a.im.sub(&b.im, p, RM),
    };
    ApComplex {
        re: a.re.sub(&b.re, p, RM),
        im,
        bits: p,
    }
}

fn mul_impl(a: &ApComplex, b: &ApComplex) -> ApComplex {
    let p = a.bits.max(b.bits);
    match (a.im.is_zero(), b.im.is_zero()) {
        (true, true) => ApComplex {
            re: a.re.mul(&b.re, p, RM),
            im: BigFloat::from_word(0, p),
            bits: p,
        },
        (true, false) => ApComplex {
            re: a.re.mul(&b.re, p, RM),
            im: a.re.mul(&b.im, p, RM),
            bits: p,
        },
        (false, true) => ApComplex {
            re: a.re.mul(&b.re, p, RM),
            im: a.im.mul(&b.re, p, RM),
            bits: p,
        },
        (false, false) => {
            let rr = a.re.mul(&b.re, p, RM);
            let ii = a.im.mul(&b.im, p, RM);
            let ri = a.re.mul(&b.im, p, RM);
            let ir = a.im.mul(&b.re, p, RM);
            ApComplex {
                re: rr.sub(&ii, p, RM),
                im: ri.add(&ir, p, RM),
                bits: p,
            }
        }
    }
}

fn div_impl(a: &ApComplex, b: &ApComplex) -> ApComplex {
    let p = a.bits.max(b.bits);
    if b.im.is_zero() {
        return ApComplex {
            re: a.re.div(&b.re, p, RM),
            im: if a.im.is_zero() {
                BigFloat::from_word(0, p)
            } else {
                a.im.div(&b.re, p, RM)
            },
            bits: p,
        };
    }
    let n = b.norm_sqr();
    let num = mul_impl(a, &b.conj());
    ApComplex {
        re: num.re.div(&n, p, RM),
        im: num.im.div(&n, p, RM),
        bits: p,
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&ApComplex> for &ApComplex {
            type Output = ApComplex;
            fn $m(self, rhs: &ApComplex) -> ApComplex {
                $f(self, rhs)
            }
        }
        impl $tr<ApComplex> for &ApComplex {
            type Output = ApComplex;
            fn $m(self, rhs: ApComplex) -> ApComplex {
                $f(self, &rhs)
            }
        }
        impl $tr<&ApComplex> for ApComplex {
            type Output = ApComplex;
            fn $m(self, rhs: &ApComplex) -> ApComplex {
                $f(&self, rhs)
            }
        }
        impl $tr<ApComplex> for ApComplex {
            type Output = ApComplex;
            fn $m(self, rhs: ApComplex) -> ApComplex {
                $f(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);
binop!(Div, div, div_impl);

macro_rules! intop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<i64> for &ApComplex {
            type Output = ApComplex;
            fn $m(self, rhs: i64) -> ApComplex {
                let f: fn(&ApComplex, i64) -> ApComplex = $body;
                f(self, rhs)
            }
        }
        impl $tr<i64> for ApComplex {
            type Output = ApComplex;
            fn $m(self, rhs: i64) -> ApComplex {
                let f: fn(&ApComplex, i64) -> ApComplex = $body;
                f(&self, rhs)
            }
        }
    };
}

intop!(Add, add, |a, k| a.add_int(k));
intop!(Sub, sub, |a, k| a.add_int(-k));
intop!(Mul, mul, |a, k| a.scale(k));

impl Neg for &ApComplex {
    type Output = ApComplex;
    fn neg(self) -> ApComplex {
        ApComplex {
            re: BigFloat::neg(&self.re),
            im: BigFloat::neg(&self.im),
            bits: self.bits,
        }
    }
}

impl Neg for ApComplex {
    type Output = ApComplex;
    fn neg(self) -> ApComplex {
        -&self
    }
}

impl core::iter::Sum for ApComplex {
    fn sum<I: Iterator<Item = ApComplex>>(iter: I) -> Self {
        let mut acc: Option<ApComplex> = None;
        for v in iter {
            acc = Some(match acc {
                None => v,
                Some(a) => a + v,
            });
        }
        acc.unwrap_or_else(|| ApComplex::zero(64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cc() -> Consts {
        Consts::new().expect("constants cache")
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(round_decimal("2.6207999999999999e+5", 10), "2.6208e+5");
        assert_eq!(round_decimal("-9.9999e-3", 3), "-1e-2");
        assert_eq!(round_decimal("1.2345e+0", 3), "1.23e+0");
        assert_eq!(round_decimal("1.2355e+0", 4), "1.236e+0");
        assert_eq!(round_decimal("0.00125e+2", 2), "1.3e-1");
        assert_eq!(round_decimal("0", 5), "0");
        assert_eq!(round_decimal("NaN", 5), "NaN");
    }

    #[test]
    fn f64_round_trip() {
        for v in [1.0, -2.5, 1e-300, 3.0e250, 0.1, -7.0e-12] {
            let b = BigFloat::from_f64(v, 256);
            assert_eq!(big_to_f64(&b), v);
        }
        assert_eq!(big_to_f64(&BigFloat::from_word(0, 128)), 0.0);
    }

    #[test]
    fn arithmetic_matches_f64() {
        let a = ApComplex::from_f64(1.5, -0.25, 192);
        let b = ApComplex::from_f64(-0.75, 2.0, 192);
        let prod = &a * &b;
        assert!((prod.re_f64() - (1.5 * -0.75 + 0.25 * 2.0)).abs() < 1e-15);
        assert!((prod.im_f64() - (1.5 * 2.0 + 0.25 * 0.75)).abs() < 1e-15);
        let back = &prod / &b;
        assert!((&back - &a).abs_f64() < 1e-50);
        assert!((&(&a + &b) - &b - &a).abs_f64() < 1e-50);
        assert_eq!((&a * 3).re_f64(), 4.5);
        assert_eq!((&a + 2).re_f64(), 3.5);
    }

    #[test]
    fn sqrt_is_principal() {
        let z = ApComplex::from_f64(-4.0, 0.0, 128);
        let r = z.sqrt();
        assert_eq!(r.re_f64(), 0.0);
        assert_eq!(r.im_f64(), 2.0);
        let w = ApComplex::from_f64(-3.0, -4.0, 128).sqrt();
        assert!((w.re_f64() - 1.0).abs() < 1e-15);
        assert!((w.im_f64() + 2.0).abs() < 1e-15);
        let s = ApComplex::from_f64(3.0, 4.0, 128).sqrt();
        assert!((s.re_f64() - 2.0).abs() < 1e-15 && (s.im_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_ln_inverse() {
        let mut c = cc();
        let z = ApComplex::from_f64(0.3, -2.9, 256);
        let back = z.exp(&mut c).ln(&mut c);
        assert!((&back - &z).abs_f64() < 1e-70);
        let neg = ApComplex::from_f64(-2.0, 0.0, 256).ln(&mut c);
        assert!((neg.im_f64() - core::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn parse_and_format() {
        let mut c = cc();
        let z = ApComplex::parse("5.3,-0.25", 256, &mut c).unwrap();
        assert_eq!(z.re_f64(), 5.3);
        assert_eq!(z.im_f64(), -0.25);
        assert!(ApComplex::parse("abc", 256, &mut c).is_none());
        assert!(ApComplex::parse("", 256, &mut c).is_none());
        let (re, im) = ApComplex::from_i64(3, 128).to_decimal(&mut c);
        assert!(re.starts_with('3'));
        assert_eq!(im, "0");
    }

    #[test]
    fn keys_distinguish_values() {
        let a = ApComplex::from_f64(1.25, 0.0, 128);
        let b = ApComplex::from_f64(1.25, 0.0, 128);
        let c = ApComplex::from_f64(1.25, 1e-30, 128);
        assert_eq!(a.key(), b.key());
        assert_ne!(a.key(), c.key());
    }
}
