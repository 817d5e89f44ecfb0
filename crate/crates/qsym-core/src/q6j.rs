//! Quantum 6j symbols relating the two bracketings of
//! `M_λ1 ⊗ M_λ2 ⊗ M_λ3 ⊃ M_λ123`.
//!
//! The intermediate weights are `λ12 = λ1 + λ2 - J12`, `λ23 = λ2 + λ3 - J23`
//! and `λ123 = λ1 + λ2 + λ3 - J123`.

use alloc::collections::BTreeMap;
use alloc::format;

use crate::complex::{ApComplex, ValueKey};
use crate::context::{signed, QContext};
use crate::error::{QError, Result};
use crate::q3j::{dd, q3j_pi, q3j_rf, CgKey};
use crate::qarith::{falling, falling_checked, falling_ext, inv_qfact_reg as iqf, qpair, rising};
use crate::residual::Residual;
use crate::verma::{alpha, rmat_elem, Weight};

/// Index set of a q6j symbol. Construction enforces
/// `0 <= J12 <= J123` and `0 <= J23 <= J123`.
#[derive(Clone, Copy, Debug)]
pub struct SixJKey<'a> {
    lambda1: &'a Weight,
    lambda2: &'a Weight,
    lambda3: &'a Weight,
    j12: i64,
    j23: i64,
    j123: i64,
}

impl<'a> SixJKey<'a> {
    pub fn new(
        lambda1: &'a Weight,
        lambda2: &'a Weight,
        lambda3: &'a Weight,
        j12: i64,
        j23: i64,
        j123: i64,
    ) -> Result<Self> {
        if !Self::admissible(j12, j23, j123) {
            return Err(QError::InvalidKey(format!(
                "6j defects need 0 <= J12, J23 <= J123, got ({j12}, {j23}, {j123})"
            )));
        }
        Ok(Self {
            lambda1,
            lambda2,
            lambda3,
            j12,
            j23,
            j123,
        })
    }

    pub fn admissible(j12: i64, j23: i64, j123: i64) -> bool {
        (0..=j123).contains(&j12) && (0..=j123).contains(&j23)
    }

    pub fn defects(&self) -> (i64, i64, i64) {
        (self.j12, self.j23, self.j123)
    }

    pub fn lambda12(&self) -> Weight {
        self.lambda1.fuse(self.lambda2, self.j12)
    }

    pub fn lambda23(&self) -> Weight {
        self.lambda2.fuse(self.lambda3, self.j23)
    }

    pub fn lambda123(&self) -> Weight {
        Weight::new(self.lambda1.value() + self.lambda2.value() + self.lambda3.value() - self.j123)
    }
}

fn inv_falling(ctx: &QContext, x: &ApComplex, m: i64, what: &'static str) -> Result<ApComplex> {
    Ok(falling_checked(ctx, x, m, what)?.recip())
}

/// Closed single-sum formula.
pub fn q6j_closed(ctx: &QContext, key: &SixJKey<'_>) -> Result<ApComplex> {
    let (l1, l2, l3) = (key.lambda1, key.lambda2, key.lambda3);
    let (j12, j23, j123) = key.defects();
    let (l12, l23) = (key.lambda12(), key.lambda23());
    let (a, b) = (j123 - j23, j123 - j12);
    let pre = dd(ctx, l1, &l23, a)?
        * inv_falling(ctx, &l23.doubled(), a, "[2λ23-j]")?
        * dd(ctx, l2, l3, j23)?
        * inv_falling(ctx, &l3.doubled(), j23, "[2λ3-j]")?
        * dd(ctx, &l12, l3, b)?
        * inv_falling(ctx, &l12.doubled(), b, "[2λ12-j]")?
        * dd(ctx, l1, l2, j12)?
        * inv_falling(ctx, &l1.doubled(), j12, "[2λ1-j]")?
        * inv_falling(ctx, &l2.doubled(), j12, "[2λ2-j]")?;
    // 2λ123 + 1, λ123 + λ1 - λ23, λ123 - λ12 + λ3 and λ2 + λ23 - λ3 with
    // their integer parts split off
    let top = (l1.value() + l2.value() + l3.value()).scale(2) - (2 * j123 - 1);
    let x1 = l1.doubled() + (j23 - j123);
    let x3 = l3.doubled() + (j12 - j123);
    let x2 = l2.doubled() - j23;
    let mut sum = ctx.zero();
    for z in 0..=j12 {
        let tail = j123 - j12 - j23 + z;
        if z > j23 || tail < 0 {
            continue;
        }
        let t = rising(ctx, &top, j123 - z)
            * falling(ctx, &x1, z)
            * falling(ctx, &x3, z)
            * falling(ctx, &x2, j12 - z)
            * iqf(ctx, z)
            * iqf(ctx, j12 - z)
            * iqf(ctx, j23 - z)
            * iqf(ctx, tail);
        sum = sum + signed(z, t);
    }
    Ok(pre * sum)
}

/// Independent value contracted from q3j symbols and Shapovalov factors:
/// a single sum over `k = 0..=J123-J12` divided by a boundary ψ symbol.
pub fn q6j_contraction_oracle(ctx: &QContext, key: &SixJKey<'_>) -> Result<ApComplex> {
    let (l1, l2, l3) = (key.lambda1, key.lambda2, key.lambda3);
    let (j12, j23, j123) = key.defects();
    let (l12, l23) = (key.lambda12(), key.lambda23());
    let (a, b) = (j123 - j23, j123 - j12);
    let div = q3j_rf(ctx, &CgKey::psi(l1, &l23, a, a, 0))?;
    ctx.ensure_generic(&div, "boundary q3j symbol")?;
    let mut sum = ctx.zero();
    for k in 0..=b.min(j23) {
        let t = alpha(ctx, l2, j23 - k)?
            * alpha(ctx, l3, k)?
            * q3j_rf(ctx, &CgKey::psi(l2, l3, j23, j23 - k, k))?
            * q3j_rf(ctx, &CgKey::psi(&l12, l3, b, b - k, k))?
            * q3j_rf(ctx, &CgKey::psi(l1, l2, j12, a, j23 - k))?;
        sum = sum + t;
    }
    Ok(sum / div)
}

type SixKey = (ValueKey, ValueKey, ValueKey, i64, i64, i64);

/// Memoized closed 6j values that read as zero outside the admissible range,
/// which is how the identity sums treat absent terms.
struct SixTable<'a> {
    ctx: &'a QContext,
    memo: BTreeMap<SixKey, ApComplex>,
}

impl<'a> SixTable<'a> {
    fn new(ctx: &'a QContext) -> Self {
        Self { ctx, memo: BTreeMap::new() }
    }

    fn get(&mut self, l1: &Weight, l2: &Weight, l3: &Weight, j12: i64, j23: i64, j123: i64) -> Result<ApComplex> {
        if !SixJKey::admissible(j12, j23, j123) {
            return Ok(self.ctx.zero());
        }
        let k = (l1.value().key(), l2.value().key(), l3.value().key(), j12, j23, j123);
        if let Some(v) = self.memo.get(&k) {
            return Ok(v.clone());
        }
        let v = q6j_closed(self.ctx, &SixJKey::new(l1, l2, l3, j12, j23, j123)?)?;
        self.memo.insert(k, v.clone());
        Ok(v)
    }
}

/// Identities satisfied by the q6j symbols.
///
/// `max_defect` bounds `J123` (or `J1234` for the four-weight identities);
/// `stid_depth` bounds the extra depth of the external vectors sampled by
/// the shadow-transit checks.
#[derive(Clone, Debug)]
pub enum Q6jIdentity {
    ClosedVsOracle { weights: [Weight; 3], max_defect: i64 },
    Stid1 { weights: [Weight; 3], max_defect: i64, stid_depth: i64 },
    Stid2 { weights: [Weight; 3], max_defect: i64, stid_depth: i64 },
    Stid3 { weights: [Weight; 3], max_defect: i64, stid_depth: i64 },
    Orthogonality { weights: [Weight; 3], max_defect: i64 },
    Racah { weights: [Weight; 3], max_defect: i64 },
    Pentagon { weights: [Weight; 4], max_defect: i64 },
    YangBaxter { weights: [Weight; 4], max_defect: i64 },
    Lemma2 { weights: [Weight; 3], max_defect: i64 },
    Lemma3 { weights: [Weight; 3], max_defect: i64 },
    Lemma5 { weights: [Weight; 3], max_defect: i64 },
    Lemma6 { weights: [Weight; 3], max_defect: i64 },
    Lemma7 { weights: [Weight; 3], max_defect: i64 },
}

fn cas(x: &ApComplex) -> ApComplex {
    x * &x.add_int(1)
}

fn psi(ctx: &QContext, l1: &Weight, l2: &Weight, j: i64, k1: i64, k2: i64) -> Result<ApComplex> {
    q3j_rf(ctx, &CgKey::psi(l1, l2, j, k1, k2))
}

/// Largest relative residual of `which` over its whole range.
pub fn verify_q6j_identity(ctx: &QContext, which: &Q6jIdentity) -> Result<Residual> {
    let mut res = Residual::default();
    let mut six = SixTable::new(ctx);
    match which {
        Q6jIdentity::ClosedVsOracle { weights: [l1, l2, l3], max_defect } => {
            for_each_triple(*max_defect, |j12, j23, j123| {
                let key = SixJKey::new(l1, l2, l3, j12, j23, j123)?;
                res.absorb(&q6j_closed(ctx, &key)?, &q6j_contraction_oracle(ctx, &key)?);
                Ok(())
            })?;
        }
        Q6jIdentity::Stid1 { weights: [l1, l2, l3], max_defect, stid_depth } => {
            for_each_triple(*max_defect, |j12, j23, j123| {
                let key = SixJKey::new(l1, l2, l3, j12, j23, j123)?;
                let (l12, l23) = (key.lambda12(), key.lambda23());
                let (a, b) = (j123 - j23, j123 - j12);
                let w = six.get(l1, l2, l3, j12, j23, j123)?;
                for n in 0..=*stid_depth {
                    for d1 in 0..=a + n {
                        let d23 = a + n - d1;
                        let mut lhs = ctx.zero();
                        for e2 in 0..=j23 + d23 {
                            let e3 = j23 + d23 - e2;
                            lhs = lhs
                                + q3j_pi(ctx, &CgKey::pi(l2, l3, j23, e2, e3))?
                                    * psi(ctx, &l12, l3, b, d1 + e2 - j12, e3)?
                                    * psi(ctx, l1, l2, j12, d1, e2)?;
                        }
                        res.absorb(&lhs, &(&w * &psi(ctx, l1, &l23, a, d1, d23)?));
                    }
                }
                Ok(())
            })?;
        }
        Q6jIdentity::Stid2 { weights: [l1, l2, l3], max_defect, stid_depth } => {
            for j123 in 0..=*max_defect {
                for j23 in 0..=j123 {
                    let l23 = l2.fuse(l3, j23);
                    for n in 0..=*stid_depth {
                        let t = j123 + n;
                        for_each_split(t, |d1, d2, d3| {
                            let lhs = psi(ctx, l1, &l23, j123 - j23, d1, d2 + d3 - j23)? * psi(ctx, l2, l3, j23, d2, d3)?;
                            let mut rhs = ctx.zero();
                            for j12 in 0..=j123.min(d1 + d2) {
                                let l12 = l1.fuse(l2, j12);
                                rhs = rhs
                                    + six.get(l3, l2, l1, j23, j12, j123)?
                                        * psi(ctx, &l12, l3, j123 - j12, d1 + d2 - j12, d3)?
                                        * psi(ctx, l1, l2, j12, d1, d2)?;
                            }
                            res.absorb(&lhs, &rhs);
                            Ok(())
                        })?;
                    }
                }
            }
        }
        Q6jIdentity::Stid3 { weights: [l1, l2, l3], max_defect, stid_depth } => {
            let c1 = cas(l1.value());
            for j123 in 0..=*max_defect {
                let l123 = Weight::new(l1.value() + l2.value() + l3.value() - j123);
                let c123 = cas(l123.value());
                for j13 in 0..=j123 {
                    let l13 = l1.fuse(l3, j13);
                    let c13 = cas(l13.value());
                    for n in 0..=*stid_depth {
                        let t = j123 + n;
                        for_each_split(t, |d1, d2, d3| {
                            let mut lhs = ctx.zero();
                            for m in 0..=d2 {
                                let (e3, e2) = (d3 + m, d2 - m);
                                let d13 = d1 + e3 - j13;
                                if d13 < 0 {
                                    continue;
                                }
                                lhs = lhs
                                    + rmat_elem(ctx, l3, l2, e3, e2, m)?
                                        * psi(ctx, &l13, l2, j123 - j13, d13, e2)?
                                        * psi(ctx, l1, l3, j13, d1, e3)?;
                            }
                            let mut rhs = ctx.zero();
                            for j12 in 0..=j123.min(d1 + d2) {
                                let l12 = l1.fuse(l2, j12);
                                let e = &c123 + &c1 - &c13 - cas(l12.value());
                                let v = ctx.qp(&e)
                                    * six.get(l3, l1, l2, j13, j12, j123)?
                                    * psi(ctx, &l12, l3, j123 - j12, d1 + d2 - j12, d3)?
                                    * psi(ctx, l1, l2, j12, d1, d2)?;
                                rhs = rhs + signed(j123 - j13 - j12, v);
                            }
                            res.absorb(&lhs, &rhs);
                            Ok(())
                        })?;
                    }
                }
            }
        }
        Q6jIdentity::Orthogonality { weights: [l1, l2, l3], max_defect } => {
            for j123 in 0..=*max_defect {
                for m in 0..=j123 {
                    for n in 0..=j123 {
                        let mut sum = ctx.zero();
                        for j in 0..=j123 {
                            sum = sum + six.get(l1, l2, l3, j, m, j123)? * six.get(l3, l2, l1, n, j, j123)?;
                        }
                        res = res.max(Residual::against_int(&sum, i64::from(m == n)));
                    }
                }
            }
        }
        Q6jIdentity::Racah { weights: [l1, l2, l3], max_defect } => {
            let x = l1.value() + l2.value();
            let c_fixed = cas(&x) - cas(l1.value()) - cas(l2.value()) - cas(l3.value());
            for j123 in 0..=*max_defect {
                let l123 = l1.value() + l2.value() + l3.value() - j123;
                for j13 in 0..=j123 {
                    for j23 in 0..=j123 {
                        let mut lhs = ctx.zero();
                        for j in 0..=j123 {
                            let e = (&x.scale(2) - (j - 1)).scale(j);
                            let v = ctx.qp(&e) * six.get(l1, l2, l3, j, j23, j123)? * six.get(l3, l1, l2, j13, j, j123)?;
                            lhs = lhs + signed(j, v);
                        }
                        let l13 = l1.value() + l3.value() - j13;
                        let l23 = l2.value() + l3.value() - j23;
                        let e = cas(&l13) + cas(&l23) + &c_fixed - cas(&l123);
                        let rhs = signed(j13 + j23 - j123, ctx.qp(&e) * six.get(l1, l3, l2, j13, j23, j123)?);
                        res.absorb(&lhs, &rhs);
                    }
                }
            }
        }
        Q6jIdentity::Pentagon { weights: [l1, l2, l3, l4], max_defect } => {
            for_each_pentagon_key(*max_defect, |j12, j123, j234, j34, j1234| {
                let mut lhs = ctx.zero();
                for j in 0..=j234.min(j123) {
                    let al = l2.fuse(l3, j);
                    lhs = lhs
                        + six.get(l1, l2, l3, j12, j, j123)?
                            * six.get(l1, &al, l4, j123 - j, j234 - j, j1234 - j)?
                            * six.get(l2, l3, l4, j, j34, j234)?;
                }
                let (l12, l34) = (l1.fuse(l2, j12), l3.fuse(l4, j34));
                let rhs = six.get(&l12, l3, l4, j123 - j12, j34, j1234 - j12)?
                    * six.get(l1, l2, &l34, j12, j234 - j34, j1234 - j34)?;
                res.absorb(&lhs, &rhs);
                Ok(())
            })?;
        }
        Q6jIdentity::YangBaxter { weights: [l1, l2, l3, l4], max_defect } => {
            let x = l1.value() + l2.value();
            let all = &x + l3.value() + l4.value();
            for j1234 in 0..=*max_defect {
                for j23 in 0..=j1234 {
                    for j123 in j23..=j1234 {
                        for j24 in 0..=j1234 {
                            for j124 in j24..=j1234 {
                                let l23 = l2.fuse(l3, j23);
                                let l24 = l2.fuse(l4, j24);
                                let mut lhs = ctx.zero();
                                for j in 0..=j123.min(j124) {
                                    let al = l1.fuse(l2, j);
                                    let e = (&x.scale(2) - (j - 1)).scale(j);
                                    let v = ctx.qp(&e)
                                        * six.get(l1, l2, l3, j, j23, j123)?
                                        * six.get(l4, &al, l3, j124 - j, j123 - j, j1234 - j)?
                                        * six.get(l4, l2, l1, j24, j, j124)?;
                                    lhs = lhs + signed(j, v);
                                }
                                let c_fixed = cas(&(&all - j1234))
                                    - cas(&(&x + l3.value() - j123))
                                    - cas(&(&x + l4.value() - j124))
                                    - cas(l2.value())
                                    + cas(l23.value())
                                    + cas(&x)
                                    + cas(l24.value());
                                let mut rhs = ctx.zero();
                                for k in 0..=j1234 {
                                    let be = l2.value() + l3.value() + l4.value() - k;
                                    let e = &c_fixed - cas(&be);
                                    let v = ctx.qp(&e)
                                        * six.get(l4, &l23, l1, k - j23, j123 - j23, j1234 - j23)?
                                        * six.get(l4, l2, l3, j24, j23, k)?
                                        * six.get(l1, &l24, l3, j124 - j24, k - j24, j1234 - j24)?;
                                    rhs = rhs + signed(j123 + j124 + k - j1234 - j23 - j24, v);
                                }
                                res.absorb(&lhs, &rhs);
                            }
                        }
                    }
                }
            }
        }
        Q6jIdentity::Lemma2 { weights, max_defect } => {
            lemma_grid(weights, *max_defect, |g| {
                for z in 0..=g.j12 {
                    for sig in 0..=g.b {
                        let (lhs, rhs) = lemma2(ctx, g, z, sig)?;
                        res.absorb(&lhs, &rhs);
                    }
                }
                Ok(())
            })?;
        }
        Q6jIdentity::Lemma3 { weights, max_defect } => {
            lemma_grid(weights, *max_defect, |g| {
                for z in 0..=g.j12 {
                    for sig in 0..=g.b {
                        let (lhs, rhs) = lemma3(ctx, g, z, sig)?;
                        res.absorb(&lhs, &rhs);
                    }
                }
                Ok(())
            })?;
        }
        Q6jIdentity::Lemma5 { weights, max_defect } => {
            lemma_grid(weights, *max_defect, |g| {
                for r in 0..=g.j12 {
                    let (lhs, rhs) = lemma5(ctx, g, r)?;
                    res.absorb(&lhs, &rhs);
                }
                Ok(())
            })?;
        }
        Q6jIdentity::Lemma6 { weights, max_defect } => {
            lemma_grid(weights, *max_defect, |g| {
                for r in 0..=g.j12 {
                    for ups in 0..=*max_defect {
                        let (lhs, rhs) = lemma6(ctx, g, r, ups)?;
                        res.absorb(&lhs, &rhs);
                    }
                }
                Ok(())
            })?;
        }
        Q6jIdentity::Lemma7 { weights, max_defect } => {
            lemma_grid(weights, *max_defect, |g| {
                for r in 0..=g.j12 {
                    let (lhs, rhs) = lemma7(ctx, g, r)?;
                    res.absorb(&lhs, &rhs);
                }
                Ok(())
            })?;
        }
    }
    Ok(res)
}

fn for_each_triple(max_defect: i64, mut f: impl FnMut(i64, i64, i64) -> Result<()>) -> Result<()> {
    for j123 in 0..=max_defect {
        for j12 in 0..=j123 {
            for j23 in 0..=j123 {
                f(j12, j23, j123)?;
            }
        }
    }
    Ok(())
}

fn for_each_split(total: i64, mut f: impl FnMut(i64, i64, i64) -> Result<()>) -> Result<()> {
    for d1 in 0..=total {
        for d2 in 0..=total - d1 {
            f(d1, d2, total - d1 - d2)?;
        }
    }
    Ok(())
}

/// Defect tuples `(J12, J123, J234, J34, J1234)` for which every symbol on
/// the right-hand side of the pentagon is admissible.
fn for_each_pentagon_key(max_defect: i64, mut f: impl FnMut(i64, i64, i64, i64, i64) -> Result<()>) -> Result<()> {
    for j1234 in 0..=max_defect {
        for j12 in 0..=j1234 {
            for j123 in j12..=j1234 {
                for j34 in 0..=j1234 - j12 {
                    for j234 in j34..=j1234 {
                        f(j12, j123, j234, j34, j1234)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Weights and defects shared by the step lemmas.
struct LemmaPoint {
    l1: ApComplex,
    l2: ApComplex,
    l3: ApComplex,
    l12: ApComplex,
    l23: ApComplex,
    l: ApComplex,
    j12: i64,
    j23: i64,
    a: i64,
    b: i64,
}

fn lemma_grid(weights: &[Weight; 3], max_defect: i64, mut f: impl FnMut(&LemmaPoint) -> Result<()>) -> Result<()> {
    let [l1, l2, l3] = weights;
    for_each_triple(max_defect, |j12, j23, j123| {
        let key = SixJKey::new(l1, l2, l3, j12, j23, j123)?;
        f(&LemmaPoint {
            l1: l1.value().clone(),
            l2: l2.value().clone(),
            l3: l3.value().clone(),
            l12: key.lambda12().value().clone(),
            l23: key.lambda23().value().clone(),
            l: key.lambda123().value().clone(),
            j12,
            j23,
            a: j123 - j23,
            b: j123 - j12,
        })
    })
}

/// `1 / ∏_{j=0..m-1}[x-j]`, continued to negative `m`.
fn inv_pd(ctx: &QContext, x: &ApComplex, m: i64) -> Result<ApComplex> {
    if m >= 0 {
        inv_falling(ctx, x, m, "lemma denominator")
    } else {
        Ok(rising(ctx, x, -m))
    }
}

type Sides = (ApComplex, ApComplex);

fn lemma2(ctx: &QContext, g: &LemmaPoint, z: i64, sig: i64) -> Result<Sides> {
    let s = &g.l3 - sig;
    let c0 = g.j23 - g.j12 + z - sig;
    let base = &g.l1 + &g.l2 + &g.l3 + g.l23.scale(2) - &g.l12 - z - &s;
    let (two2, two3) = (g.l2.scale(2), g.l3.scale(2));
    let mut lhs = ctx.zero();
    for p in 0..=c0 {
        lhs = lhs
            + ctx.qp(&(&base + 2).scale(p))
                * iqf(ctx, p)
                * iqf(ctx, c0 - p)
                * inv_pd(ctx, &two3, sig + p)?
                * inv_pd(ctx, &two2, g.j23 - sig - p)?;
    }
    let rhs = ctx.qp(&(&g.l2 + &g.l23 - &s + 1).scale(c0))
        * qpair(ctx, &(&base + 1), c0)?
        * iqf(ctx, c0)
        * inv_pd(ctx, &two3, c0 + sig)?
        * inv_pd(ctx, &two2, g.j23 - sig)?;
    Ok((lhs, rhs))
}

fn lemma3(ctx: &QContext, g: &LemmaPoint, z: i64, sig: i64) -> Result<Sides> {
    let s = &g.l3 - sig;
    let c0 = g.j23 - g.j12 + z - sig;
    let step = &g.l3 + &g.l2 + &g.l23 - &g.l - &g.l12 - z - &s - 1;
    let b0 = &g.l2 + &g.l23 - &s - z;
    let two12 = g.l12.scale(2);
    let mut lhs = ctx.zero();
    for p in 0..=sig {
        let t = ctx.qp(&step.scale(p))
            * qpair(ctx, &(&b0 - p), c0 + p)?
            * iqf(ctx, sig - p)
            * iqf(ctx, p)
            * inv_pd(ctx, &two12, g.b - sig + p)?;
        lhs = lhs + signed(p, t);
    }
    let rhs = ctx.qp(&b0.scale(sig))
        * qpair(ctx, &b0, c0)?
        * falling_ext(ctx, &(&g.l + &g.l12 - &g.l2 - &g.l23 + z), sig)?
        * iqf(ctx, sig)
        * inv_pd(ctx, &two12, g.b)?;
    Ok((lhs, rhs))
}

fn lemma5(ctx: &QContext, g: &LemmaPoint, r: i64) -> Result<Sides> {
    let step = &g.l3 - &g.l2 - &g.l1 + &g.l + (r + 1);
    let two3 = g.l3.scale(2);
    let mut lhs = ctx.zero();
    for p in 0..=(g.j12 - r).min(g.a - r) {
        let t = ctx.qp(&step.scale(p))
            * iqf(ctx, p)
            * iqf(ctx, g.j12 - r - p)
            * iqf(ctx, g.a - r - p)
            * inv_pd(ctx, &two3, g.j23 - g.j12 + r + p)?;
        lhs = lhs + signed(p, t);
    }
    let rhs = ctx.qp_int(-(g.j12 - r) * (g.a - r))
        * falling_ext(ctx, &(&g.l3 + &g.l - &g.l12), g.j12 - r)?
        * iqf(ctx, g.j12 - r)
        * iqf(ctx, g.a - r)
        * inv_pd(ctx, &two3, g.j23)?;
    Ok((lhs, rhs))
}

fn lemma6(ctx: &QContext, g: &LemmaPoint, r: i64, ups: i64) -> Result<Sides> {
    let step = -(&g.l2 - &g.l3 + &g.l23 - (r - 1));
    let two2 = g.l2.scale(2);
    let mut lhs = ctx.zero();
    for p in 0..=r {
        let t = ctx.qp(&step.scale(p))
            * iqf(ctx, r - p)
            * iqf(ctx, p)
            * iqf(ctx, ups + r - p)
            * inv_pd(ctx, &two2, g.j23 - ups - r + p)?;
        lhs = lhs + signed(p, t);
    }
    let rhs = ctx.qp_int(r * (ups + r))
        * falling_ext(ctx, &(&g.l2 + &g.l23 - &g.l3), r)?
        * iqf(ctx, r)
        * iqf(ctx, ups + r)
        * inv_pd(ctx, &two2, g.j23 - ups)?;
    Ok((lhs, rhs))
}

fn lemma7(ctx: &QContext, g: &LemmaPoint, r: i64) -> Result<Sides> {
    let m = g.j23 - g.j12 + r;
    let step = &g.l3 + &g.l + &g.l12 + (r + 1);
    let first = &g.l1 + &g.l2 + g.l23.scale(2) - &g.l12 - (r - 1);
    let second = &g.l + &g.l12 - &g.l2 - &g.l23 + r;
    let mut lhs = ctx.zero();
    for p in 0..=m {
        lhs = lhs
            + ctx.qp(&step.scale(p))
                * qpair(ctx, &(&first + p), m - p)?
                * qpair(ctx, &(&second - p), g.a + p - r)?
                * iqf(ctx, p)
                * iqf(ctx, m - p);
    }
    let rhs = ctx.qp(&second.scale(m))
        * qpair(ctx, &second, g.a - r)?
        * falling_ext(ctx, &step, m)?
        * iqf(ctx, m);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-30;

    fn weights(ctx: &QContext) -> [Weight; 4] {
        ["5.41", "6.13", "4.77", "7.29"].map(|s| Weight::new(ctx.parse(s).unwrap()))
    }

    #[test]
    fn trivial_key_is_one() {
        let ctx = QContext::from_decimal("1.37", 40).unwrap();
        let [a, b, c, _] = weights(&ctx);
        let key = SixJKey::new(&a, &b, &c, 0, 0, 0).unwrap();
        assert!(Residual::against_int(&q6j_closed(&ctx, &key).unwrap(), 1).rel < TOL);
        assert!(Residual::against_int(&q6j_contraction_oracle(&ctx, &key).unwrap(), 1).rel < TOL);
        assert!(matches!(SixJKey::new(&a, &b, &c, 2, 0, 1), Err(QError::InvalidKey(_))));
    }

    #[test]
    fn closed_value_is_reproducible() {
        let ctx = QContext::from_decimal("1.37", 40).unwrap();
        let [a, b, c, _] = weights(&ctx);
        let key = SixJKey::new(&a, &b, &c, 2, 1, 3).unwrap();
        let first = q6j_closed(&ctx, &key).unwrap();
        let fresh = QContext::from_decimal("1.37", 40).unwrap();
        let [a2, b2, c2, _] = weights(&fresh);
        let again = q6j_closed(&fresh, &SixJKey::new(&a2, &b2, &c2, 2, 1, 3).unwrap()).unwrap();
        assert_eq!(first.key(), again.key());
    }

    #[test]
    fn identities_hold() {
        let ctx = QContext::from_decimal("1.37", 40).unwrap();
        let [a, b, c, d] = weights(&ctx);
        let three = [a.clone(), b.clone(), c.clone()];
        let four = [a, b, c, d];
        let checks = [
            Q6jIdentity::ClosedVsOracle { weights: three.clone(), max_defect: 3 },
            Q6jIdentity::Stid1 { weights: three.clone(), max_defect: 2, stid_depth: 1 },
            Q6jIdentity::Stid2 { weights: three.clone(), max_defect: 2, stid_depth: 1 },
            Q6jIdentity::Stid3 { weights: three.clone(), max_defect: 2, stid_depth: 1 },
            Q6jIdentity::Orthogonality { weights: three.clone(), max_defect: 3 },
            Q6jIdentity::Racah { weights: three.clone(), max_defect: 2 },
            Q6jIdentity::Pentagon { weights: four.clone(), max_defect: 2 },
            Q6jIdentity::YangBaxter { weights: four, max_defect: 2 },
            Q6jIdentity::Lemma2 { weights: three.clone(), max_defect: 3 },
            Q6jIdentity::Lemma3 { weights: three.clone(), max_defect: 3 },
            Q6jIdentity::Lemma5 { weights: three.clone(), max_defect: 3 },
            Q6jIdentity::Lemma6 { weights: three.clone(), max_defect: 3 },
            Q6jIdentity::Lemma7 { weights: three, max_defect: 3 },
        ];
        for id in &checks {
            let r = verify_q6j_identity(&ctx, id).unwrap();
            assert!(r.rel < TOL, "{id:?}: {r:?}");
        }
    }
}
