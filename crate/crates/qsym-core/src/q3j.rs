//! Quantum Clebsch–Gordan (q3j) symbols for `M_λ1 ⊗ M_λ2 ⊃ M_λ`,
//! `λ = λ1 + λ2 - J`.
//!
//! A symbol is indexed by the defect `J` and the depths `k1`, `k2` of the
//! tensor factors; the depth of the image vector is `n = k1 + k2 - J`.
//! Keys with a negative depth or with `n < 0` lie outside the decomposition
//! and evaluate to an exact zero.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::ApComplex;
use crate::context::{signed, QContext};
use crate::error::{QError, Result};
use crate::qarith::{falling, inv_qfact_reg as iqf, qfact, qnum, qpair, rising_checked};
use crate::residual::Residual;
use crate::verma::{alpha, apply_coproduct, rmat_elem, Generator, TensorVector, TruncatedModule, Weight};

/// Embedding coefficient (`ψ`) or projection coefficient (`π`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Psi,
    Pi,
}

/// Full index set of a q3j symbol.
#[derive(Clone, Copy, Debug)]
pub struct CgKey<'a> {
    pub lambda1: &'a Weight,
    pub lambda2: &'a Weight,
    pub defect: i64,
    pub k1: i64,
    pub k2: i64,
    pub variant: Variant,
}

impl<'a> CgKey<'a> {
    pub fn psi(lambda1: &'a Weight, lambda2: &'a Weight, defect: i64, k1: i64, k2: i64) -> Self {
        Self {
            lambda1,
            lambda2,
            defect,
            k1,
            k2,
            variant: Variant::Psi,
        }
    }

    pub fn pi(lambda1: &'a Weight, lambda2: &'a Weight, defect: i64, k1: i64, k2: i64) -> Self {
        Self {
            variant: Variant::Pi,
            ..Self::psi(lambda1, lambda2, defect, k1, k2)
        }
    }

    /// Depth `n = k1 + k2 - J` of the vector in `M_λ`.
    pub fn depth(&self) -> i64 {
        self.k1 + self.k2 - self.defect
    }

    /// `λ = λ1 + λ2 - J`.
    pub fn lambda(&self) -> Weight {
        self.lambda1.fuse(self.lambda2, self.defect)
    }

    pub fn is_admissible(&self) -> bool {
        self.k1 >= 0 && self.k2 >= 0 && self.depth() >= 0
    }

    fn check(&self) -> Result<bool> {
        if self.defect < 0 {
            return Err(QError::InvalidKey(format!("negative defect {}", self.defect)));
        }
        Ok(self.is_admissible())
    }
}

/// Normalization `Δ = sqrt([J]! ∏_{j<J} [2λ1-j][2λ2-j] / [2λ+2+j])`, principal root.
pub fn dd(ctx: &QContext, l1: &Weight, l2: &Weight, defect: i64) -> Result<ApComplex> {
    if defect < 0 {
        return Err(QError::InvalidKey(format!("negative defect {defect}")));
    }
    let key = (l1.value().key(), l2.value().key(), defect);
    if let Some(v) = ctx.dd_cache.borrow().get(&key) {
        return Ok(v.clone());
    }
    let lam = l1.fuse(l2, defect);
    let num = qfact(ctx, defect)? * falling(ctx, &l1.doubled(), defect) * falling(ctx, &l2.doubled(), defect);
    let den = rising_checked(ctx, &(lam.doubled() + 1), defect, "[2λ+2+j] in Δ")?;
    let v = (num / den).sqrt();
    ctx.dd_cache.borrow_mut().insert(key, v.clone());
    Ok(v)
}

/// Symbol of the highest weight vector of `M_λ`: `k1 = k`, `k2 = J - k`, `n = 0`.
pub fn q3j_hw(ctx: &QContext, l1: &Weight, l2: &Weight, defect: i64, k: i64) -> Result<ApComplex> {
    if defect < 0 || !(0..=defect).contains(&k) {
        return Err(QError::InvalidKey(format!("highest weight symbol needs 0 <= k <= J, got k = {k}, J = {defect}")));
    }
    let e = l2.value().scale(2 * (defect - k)) + (k * (2 * defect - k - 1) - defect * defect);
    let v = ctx.i_pow(defect) * ctx.qp(&e) * iqf(ctx, k) * iqf(ctx, defect - k) * dd(ctx, l1, l2, defect)?;
    Ok(signed(k, v))
}

/// `[n]! / ∏_{j=1..n}[λ+a+j]`, shared by both closed formulas.
fn depth_ratio(ctx: &QContext, lam: &Weight, n: i64) -> Result<ApComplex> {
    let den = rising_checked(ctx, &(lam.doubled() - n), n, "[λ+a+j]")?;
    Ok(qfact(ctx, n)? / den)
}

/// Products `∏_{j=1..m}[b+j]` for `m = 0..=len`.
fn rising_table(ctx: &QContext, b: &ApComplex, len: i64) -> Vec<ApComplex> {
    let p = ctx.qpow(b);
    let mut out = Vec::with_capacity(len.max(0) as usize + 1);
    out.push(ctx.one());
    for j in 1..=len {
        let f = ctx.qnum_of(&ctx.shift(&p, j));
        let next = out.last().expect("seeded") * &f;
        out.push(next);
    }
    out
}

/// Powers `step^z` for `z = 0..=len`.
fn power_table(ctx: &QContext, step: &ApComplex, len: i64) -> Vec<ApComplex> {
    let mut out = Vec::with_capacity(len.max(0) as usize + 1);
    out.push(ctx.one());
    for _ in 1..=len {
        let next = out.last().expect("seeded") * step;
        out.push(next);
    }
    out
}

/// Racah–Fock closed formula for `ψ`: a sum over `z = 0..=n`.
pub fn q3j_rf(ctx: &QContext, key: &CgKey<'_>) -> Result<ApComplex> {
    if !key.check()? {
        return Ok(ctx.zero());
    }
    let (l1, l2) = (key.lambda1, key.lambda2);
    let (k1, k2, n) = (key.k1, key.k2, key.depth());
    let lam = key.lambda();
    // (λ2² - a2²) - (λ² - a²) - k1 with a_i = λ_i - k_i, a = λ - n
    let e = l2.value().scale(2 * k2) - lam.value().scale(2 * n) + (n * n - k2 * k2 - k1);
    let pre = ctx.i_pow(key.defect) * ctx.qp(&e) * depth_ratio(ctx, &lam, n)? * dd(ctx, l1, l2, key.defect)?;
    let r1 = rising_table(ctx, &(l1.doubled() - k1), n);
    let r2 = rising_table(ctx, &(l2.doubled() - k2), n);
    let qz = power_table(ctx, &ctx.qp(&(lam.doubled() - (n - 1))), n);
    let mut sum = ctx.zero();
    for z in 0..=n.min(k1) {
        let w = n - z;
        if w > k2 {
            continue;
        }
        let (zu, wu) = (z as usize, w as usize);
        let t = &qz[zu] * &r1[zu] * &r2[wu] * iqf(ctx, z) * iqf(ctx, w) * iqf(ctx, k1 - z) * iqf(ctx, k2 - w);
        sum = sum + signed(z, t);
    }
    Ok(signed(k1, pre * sum))
}

/// Van der Waerden form of the same symbol: a sum over `z = 0..=J`.
pub fn q3j_vdw(ctx: &QContext, key: &CgKey<'_>) -> Result<ApComplex> {
    if !key.check()? {
        return Ok(ctx.zero());
    }
    let (l1, l2) = (key.lambda1, key.lambda2);
    let (j, k1, k2, n) = (key.defect, key.k1, key.k2, key.depth());
    let lam = key.lambda();
    let e = l1.value().scale(2 * (j - k2)) + l2.value().scale(2 * j) + (k1 * k2 - j * j);
    let pre = ctx.i_pow(j) * ctx.qp(&e) * depth_ratio(ctx, &lam, n)? * dd(ctx, l1, l2, j)?;
    let step = ctx.qpow(&((l1.value() + l2.value()).scale(2) - (j - 1))).neg;
    let qz = power_table(ctx, &step, j);
    let (b1, b2) = (l1.doubled() - k1, l2.doubled() - k2);
    let mut sum = ctx.zero();
    for z in 0..=j {
        let w = j - z;
        if k1 < z || k2 < w {
            continue;
        }
        let t = &qz[z as usize]
            * qpair(ctx, &(&b2 - z), k2 + z - j)?
            * qpair(ctx, &(&b1 - w), k1 + w - j)?
            * iqf(ctx, z)
            * iqf(ctx, w)
            * iqf(ctx, k1 - z)
            * iqf(ctx, k2 - w);
        sum = sum + signed(z, t);
    }
    Ok(pre * sum)
}

/// One step of the lowering recursion: the value at `(kk1, J+m-kk1)` from
/// the stratum `m-1`, where `prev(k)` returns the symbol at `(k, J+m-1-k)`.
fn recursion_step(
    ctx: &QContext,
    l1: &Weight,
    l2: &Weight,
    j: i64,
    m: i64,
    kk1: i64,
    prev: impl Fn(i64) -> Option<ApComplex>,
) -> Result<ApComplex> {
    let lam = l1.fuse(l2, j);
    let kk2 = j + m - kk1;
    let mut v = ctx.zero();
    if kk1 >= 1 {
        if let Some(c) = prev(kk1 - 1) {
            v = v + qnum(ctx, &(l1.doubled() - (kk1 - 1))) * c;
        }
    }
    if kk2 >= 1 {
        if let Some(c) = prev(kk1) {
            let w = ctx.qpow(&l1.lowered(kk1).scale(2)).neg;
            v = v + w * qnum(ctx, &(l2.doubled() - (kk2 - 1))) * c;
        }
    }
    let den = qnum(ctx, &(lam.doubled() - (m - 1)));
    ctx.ensure_generic(&den, "[2λ-m+1] in the recursion")?;
    Ok(v / den)
}

/// Forward substitution through the recursion, seeded by [`q3j_hw`].
pub fn q3j_rec_oracle(ctx: &QContext, key: &CgKey<'_>) -> Result<ApComplex> {
    if !key.check()? {
        return Ok(ctx.zero());
    }
    let (l1, l2, j) = (key.lambda1, key.lambda2, key.defect);
    let mut row: Vec<ApComplex> = (0..=j).map(|k| q3j_hw(ctx, l1, l2, j, k)).collect::<Result<_>>()?;
    for m in 1..=key.depth() {
        let next = (0..=j + m)
            .map(|kk1| recursion_step(ctx, l1, l2, j, m, kk1, |k| row.get(k as usize).cloned()))
            .collect::<Result<Vec<_>>>()?;
        row = next;
    }
    Ok(row[key.k1 as usize].clone())
}

/// Projection coefficient `π = α_{λ1,k1} α_{λ2,k2} / α_{λ,n} · ψ`.
pub fn q3j_pi(ctx: &QContext, key: &CgKey<'_>) -> Result<ApComplex> {
    if !key.check()? {
        return Ok(ctx.zero());
    }
    let a = alpha(ctx, &key.lambda(), key.depth())?;
    let psi = q3j_rf(ctx, &CgKey { variant: Variant::Psi, ..*key })?;
    Ok(alpha(ctx, key.lambda1, key.k1)? * alpha(ctx, key.lambda2, key.k2)? / a * psi)
}

/// Evaluates the symbol named by `key.variant` through the closed formula.
pub fn q3j(ctx: &QContext, key: &CgKey<'_>) -> Result<ApComplex> {
    match key.variant {
        Variant::Psi => q3j_rf(ctx, key),
        Variant::Pi => q3j_pi(ctx, key),
    }
}

/// Memo of ψ and π values for one pair of weights.
struct Symbols<'a> {
    ctx: &'a QContext,
    l1: &'a Weight,
    l2: &'a Weight,
    psi: BTreeMap<(i64, i64, i64), ApComplex>,
    pi: BTreeMap<(i64, i64, i64), ApComplex>,
}

impl<'a> Symbols<'a> {
    fn new(ctx: &'a QContext, l1: &'a Weight, l2: &'a Weight) -> Self {
        Self {
            ctx,
            l1,
            l2,
            psi: BTreeMap::new(),
            pi: BTreeMap::new(),
        }
    }

    fn get(&mut self, variant: Variant, j: i64, k1: i64, k2: i64) -> Result<ApComplex> {
        let map = match variant {
            Variant::Psi => &mut self.psi,
            Variant::Pi => &mut self.pi,
        };
        if let Some(v) = map.get(&(j, k1, k2)) {
            return Ok(v.clone());
        }
        let key = CgKey {
            lambda1: self.l1,
            lambda2: self.l2,
            defect: j,
            k1,
            k2,
            variant,
        };
        let v = q3j(self.ctx, &key)?;
        map.insert((j, k1, k2), v.clone());
        Ok(v)
    }

    fn psi(&mut self, j: i64, k1: i64, k2: i64) -> Result<ApComplex> {
        self.get(Variant::Psi, j, k1, k2)
    }

    fn pi(&mut self, j: i64, k1: i64, k2: i64) -> Result<ApComplex> {
        self.get(Variant::Pi, j, k1, k2)
    }
}

/// Identities satisfied by the q3j symbols, with the ranges they are
/// checked over.
#[derive(Clone, Debug)]
pub enum Q3jIdentity {
    /// `π ∘ ψ = Id`, for defects `<= max_defect` and total depth `<= max_total`.
    Orth1 { lambda1: Weight, lambda2: Weight, max_defect: i64, max_total: i64 },
    /// `Σ_λ ψ ∘ π = Id` for total depth `<= max_total`.
    Orth2 { lambda1: Weight, lambda2: Weight, max_total: i64 },
    /// R-matrix contracted with ψ equals the swapped symbol times a phase.
    Rmat1 { lambda1: Weight, lambda2: Weight, max_defect: i64, max_depth: i64 },
    /// Diagonal R-matrix element on `M_λ ⊗ M_λ3` against the product of the
    /// diagonal elements on the factors, for ψ and π.
    Rmat2 { lambda1: Weight, lambda2: Weight, lambda3: Weight, max_defect: i64, max_depth: i64, max_k3: i64 },
    /// The `q ↔ 1/q` symmetry with `λ1 ↔ λ2`.
    Sym { lambda1: Weight, lambda2: Weight, max_defect: i64, max_depth: i64 },
    /// `Δ(X) ∘ ψ = ψ ∘ X` for `X` in `E, F, K`, images at depth `<= window`.
    Intertwine { lambda1: Weight, lambda2: Weight, max_defect: i64, window: i64 },
    /// The lowering recursion holds for the closed formula.
    Recursion { lambda1: Weight, lambda2: Weight, max_defect: i64, max_depth: i64 },
    /// Racah–Fock and van der Waerden forms agree.
    RfVdw { lambda1: Weight, lambda2: Weight, max_defect: i64, max_depth: i64 },
    /// Racah–Fock and Van der Waerden forms agree with forward substitution through the recursion.
    RfRecursion { lambda1: Weight, lambda2: Weight, max_defect: i64, max_depth: i64 },
}

fn casimir_shift(l: &ApComplex) -> ApComplex {
    l * &l.add_int(1)
}

/// Largest relative residual of `which` over its whole range.
pub fn verify_q3j_identity(ctx: &QContext, which: &Q3jIdentity) -> Result<Residual> {
    let mut res = Residual::default();
    match which {
        Q3jIdentity::Orth1 { lambda1, lambda2, max_defect, max_total } => {
            let mut s = Symbols::new(ctx, lambda1, lambda2);
            for t in 0..=*max_total {
                let top = t.min(*max_defect);
                for j in 0..=top {
                    for jp in 0..=top {
                        let mut sum = ctx.zero();
                        for k1 in 0..=t {
                            sum = sum + s.pi(j, k1, t - k1)? * s.psi(jp, k1, t - k1)?;
                        }
                        res = res.max(Residual::against_int(&sum, i64::from(j == jp)));
                    }
                }
            }
        }
        Q3jIdentity::Orth2 { lambda1, lambda2, max_total } => {
            let mut s = Symbols::new(ctx, lambda1, lambda2);
            for t in 0..=*max_total {
                for k1 in 0..=t {
                    for k1p in 0..=t {
                        let mut sum = ctx.zero();
                        for j in 0..=t {
                            sum = sum + s.pi(j, k1, t - k1)? * s.psi(j, k1p, t - k1p)?;
                        }
                        res = res.max(Residual::against_int(&sum, i64::from(k1 == k1p)));
                    }
                }
            }
        }
        Q3jIdentity::Rmat1 { lambda1, lambda2, max_defect, max_depth } => {
            let mut s = Symbols::new(ctx, lambda1, lambda2);
            let mut swapped = Symbols::new(ctx, lambda2, lambda1);
            for j in 0..=*max_defect {
                let lam = lambda1.fuse(lambda2, j);
                let e = casimir_shift(lam.value()) - casimir_shift(lambda1.value()) - casimir_shift(lambda2.value());
                let phase = signed(j, ctx.qp(&e));
                for n in 0..=*max_depth {
                    for k1 in 0..=j + n {
                        let k2 = j + n - k1;
                        let mut lhs = ctx.zero();
                        for m in 0..=k2 {
                            let r = rmat_elem(ctx, lambda1, lambda2, k1 + m, k2 - m, m)?;
                            lhs = lhs + r * s.psi(j, k1 + m, k2 - m)?;
                        }
                        res.absorb(&lhs, &(&phase * &swapped.psi(j, k2, k1)?));
                    }
                }
            }
        }
        Q3jIdentity::Rmat2 { lambda1, lambda2, lambda3, max_defect, max_depth, max_k3 } => {
            let mut s = Symbols::new(ctx, lambda1, lambda2);
            for j in 0..=*max_defect {
                let lam = lambda1.fuse(lambda2, j);
                for n in 0..=*max_depth {
                    for k3 in 0..=*max_k3 {
                        let outer = rmat_elem(ctx, &lam, lambda3, n, k3, 0)?;
                        for k1 in 0..=j + n {
                            let k2 = j + n - k1;
                            let inner =
                                rmat_elem(ctx, lambda1, lambda3, k1, k3, 0)? * rmat_elem(ctx, lambda2, lambda3, k2, k3, 0)?;
                            for v in [s.psi(j, k1, k2)?, s.pi(j, k1, k2)?] {
                                res.absorb(&(&outer * &v), &(&inner * &v));
                            }
                        }
                    }
                }
            }
        }
        Q3jIdentity::Sym { lambda1, lambda2, max_defect, max_depth } => {
            let inv = ctx.inverted()?;
            let mut s = Symbols::new(ctx, lambda1, lambda2);
            let mut t = Symbols::new(&inv, lambda2, lambda1);
            for j in 0..=*max_defect {
                let lam = lambda1.fuse(lambda2, j);
                for n in 0..=*max_depth {
                    for k1 in 0..=j + n {
                        let k2 = j + n - k1;
                        // k(λ+a-1) with a = λ - k, i.e. k(2λ-k-1)
                        let part = |l: &Weight, k: i64| l.value().scale(2 * k) - k * (k + 1);
                        let e = part(lambda1, k1) + part(lambda2, k2) - part(&lam, n);
                        let up = signed(j, ctx.qp(&e));
                        let down = signed(j, ctx.qp(&-&e));
                        res.absorb(&s.psi(j, k1, k2)?, &(up * t.psi(j, k2, k1)?));
                        res.absorb(&s.pi(j, k1, k2)?, &(down * t.pi(j, k2, k1)?));
                    }
                }
            }
        }
        Q3jIdentity::Intertwine { lambda1, lambda2, max_defect, window } => {
            for j in 0..=*max_defect {
                res = res.max(intertwine(ctx, lambda1, lambda2, j, *window)?);
            }
        }
        Q3jIdentity::Recursion { lambda1, lambda2, max_defect, max_depth } => {
            let mut s = Symbols::new(ctx, lambda1, lambda2);
            for j in 0..=*max_defect {
                for m in 1..=*max_depth {
                    for kk1 in 0..=j + m {
                        let prev: Vec<ApComplex> =
                            (0..j + m).map(|k| s.psi(j, k, j + m - 1 - k)).collect::<Result<_>>()?;
                        let v = recursion_step(ctx, lambda1, lambda2, j, m, kk1, |k| prev.get(k as usize).cloned())?;
                        res.absorb(&s.psi(j, kk1, j + m - kk1)?, &v);
                    }
                }
            }
        }
        Q3jIdentity::RfVdw { lambda1, lambda2, max_defect, max_depth } => {
            for_each_key(lambda1, lambda2, *max_defect, *max_depth, |key| {
                res.absorb(&q3j_rf(ctx, key)?, &q3j_vdw(ctx, key)?);
                Ok(())
            })?;
        }
        Q3jIdentity::RfRecursion { lambda1, lambda2, max_defect, max_depth } => {
            for j in 0..=*max_defect {
                let mut row: Vec<ApComplex> =
                    (0..=j).map(|k| q3j_hw(ctx, lambda1, lambda2, j, k)).collect::<Result<_>>()?;
                for n in 0..=*max_depth {
                    if n > 0 {
                        row = (0..=j + n)
                            .map(|kk1| recursion_step(ctx, lambda1, lambda2, j, n, kk1, |k| row.get(k as usize).cloned()))
                            .collect::<Result<_>>()?;
                    }
                    for (k1, v) in row.iter().enumerate() {
                        let k1 = k1 as i64;
                        let key = CgKey::psi(lambda1, lambda2, j, k1, j + n - k1);
                        res.absorb(&q3j_rf(ctx, &key)?, v);
                        res.absorb(&q3j_vdw(ctx, &key)?, v);
                    }
                }
            }
        }
    }
    Ok(res)
}

fn for_each_key(
    l1: &Weight,
    l2: &Weight,
    max_defect: i64,
    max_depth: i64,
    mut f: impl FnMut(&CgKey<'_>) -> Result<()>,
) -> Result<()> {
    for j in 0..=max_defect {
        for n in 0..=max_depth {
            for k1 in 0..=j + n {
                f(&CgKey::psi(l1, l2, j, k1, j + n - k1))?;
            }
        }
    }
    Ok(())
}

/// `ψ(e_n)` as a vector of `M_λ1 ⊗ M_λ2`.
fn embedded(s: &mut Symbols<'_>, legs: &[TruncatedModule], j: i64, n: i64) -> Result<TensorVector> {
    let mut coeffs = BTreeMap::new();
    for k1 in 0..=j + n {
        coeffs.insert(vec![k1 as usize, (j + n - k1) as usize], s.psi(j, k1, j + n - k1)?);
    }
    Ok(TensorVector {
        legs: legs.to_vec(),
        coeffs,
    })
}

fn intertwine(ctx: &QContext, l1: &Weight, l2: &Weight, j: i64, window: i64) -> Result<Residual> {
    let lam = l1.fuse(l2, j);
    let span = (j + window + 1) as usize;
    let legs = [TruncatedModule::new(l1.clone(), span), TruncatedModule::new(l2.clone(), span)];
    let mut s = Symbols::new(ctx, l1, l2);
    let mut res = Residual::default();
    let mut compare = |lhs: &TensorVector, rhs: &TensorVector, scale: &ApComplex| {
        for key in lhs.coeffs.keys().chain(rhs.coeffs.keys()) {
            let a = lhs.coeff(key).cloned().unwrap_or_else(|| ctx.zero());
            let b = rhs.coeff(key).map(|v| v * scale).unwrap_or_else(|| ctx.zero());
            res.absorb(&a, &b);
        }
    };
    for n in 0..=window {
        let v = embedded(&mut s, &legs, j, n)?;
        let kv = apply_coproduct(ctx, Generator::K, &v)?;
        compare(&kv, &v, &ctx.qp(&lam.lowered(n).scale(2)));
        if n < window {
            let fv = apply_coproduct(ctx, Generator::F, &v)?;
            let up = embedded(&mut s, &legs, j, n + 1)?;
            compare(&fv, &up, &qnum(ctx, &(lam.doubled() - n)));
        }
        let ev = apply_coproduct(ctx, Generator::E, &v)?;
        if n == 0 {
            compare(&ev, &v, &ctx.zero());
        } else {
            let down = embedded(&mut s, &legs, j, n - 1)?;
            compare(&ev, &down, &ctx.qnum_int(n));
        }
    }
    Ok(res)
}
