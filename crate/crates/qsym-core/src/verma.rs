//! Truncated Verma modules `M_λ` and their duals, Shapovalov coefficients
//! and matrix elements of the universal R-matrix.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::ApComplex;
use crate::context::{signed, QContext};
use crate::error::{QError, Result};
use crate::qarith::{falling, falling_checked, inv_qfact_reg, powi, qfact, qnum};
use crate::residual::Residual;

/// A generic highest weight `λ`.
#[derive(Clone, Debug)]
pub struct Weight {
    value: ApComplex,
}

impl Weight {
    pub fn new(value: ApComplex) -> Self {
        Self { value }
    }

    pub fn value(&self) -> &ApComplex {
        &self.value
    }

    /// `self + other - defect`, the weight of a summand of `M_self ⊗ M_other`.
    pub fn fuse(&self, other: &Weight, defect: i64) -> Weight {
        Weight::new(&self.value + &other.value - defect)
    }

    /// The weight `a = λ - k` of the basis vector at depth `k`.
    pub fn lowered(&self, k: i64) -> ApComplex {
        &self.value - k
    }

    /// `2λ`.
    pub fn doubled(&self) -> ApComplex {
        self.value.scale(2)
    }
}

impl From<ApComplex> for Weight {
    fn from(value: ApComplex) -> Self {
        Self::new(value)
    }
}

/// Basis vectors `e_{λ-k}` of `M_λ` for `k = 0..=depth`.
#[derive(Clone, Debug)]
pub struct TruncatedModule {
    pub weight: Weight,
    pub depth: usize,
}

impl TruncatedModule {
    pub fn new(weight: Weight, depth: usize) -> Self {
        Self { weight, depth }
    }
}

/// A finitely supported vector of a truncated module.
#[derive(Clone, Debug)]
pub struct ModuleVector {
    pub module: TruncatedModule,
    pub coeffs: BTreeMap<usize, ApComplex>,
}

/// Generators of `U_q(sl2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    E,
    F,
    K,
    KInv,
}

/// Image of the basis vector at depth `k` under `gen`, in the module
/// (`dual = false`) or in its dual (`dual = true`).
///
/// Returns `None` when the image vanishes: `E` on the highest weight vector,
/// or `F` leaving the truncation.
pub fn act(
    ctx: &QContext,
    module: &TruncatedModule,
    dual: bool,
    gen: Generator,
    k: usize,
) -> Result<Option<(usize, ApComplex)>> {
    if k > module.depth {
        return Err(QError::Domain(format!("depth {k} exceeds module depth {}", module.depth)));
    }
    let lam = &module.weight;
    let ki = k as i64;
    let two_l = lam.doubled();
    let k_exp = lam.lowered(ki).scale(2);
    Ok(match gen {
        Generator::K => Some((k, ctx.qp(&k_exp))),
        Generator::KInv => Some((k, ctx.qpow(&k_exp).neg)),
        Generator::E if k == 0 => None,
        Generator::E if dual => {
            let c = ctx.qp(&k_exp) * qnum(ctx, &(&two_l - (ki - 1)));
            Some((k - 1, -c))
        }
        Generator::E => Some((k - 1, ctx.qnum_int(ki))),
        Generator::F if k == module.depth => None,
        Generator::F if dual => {
            let c = ctx.qpow(&lam.lowered(ki + 1).scale(2)).neg * ctx.qnum_int(ki + 1);
            Some((k + 1, -c))
        }
        Generator::F => Some((k + 1, qnum(ctx, &(&two_l - ki)))),
    })
}

/// Applies `gen` to a module vector.
pub fn apply(ctx: &QContext, dual: bool, gen: Generator, v: &ModuleVector) -> Result<ModuleVector> {
    let mut out = BTreeMap::new();
    for (&k, c) in &v.coeffs {
        if let Some((k2, f)) = act(ctx, &v.module, dual, gen, k)? {
            accumulate(&mut out, k2, c * &f);
        }
    }
    Ok(ModuleVector {
        module: v.module.clone(),
        coeffs: out,
    })
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, ApComplex>, k: K, v: ApComplex) {
    match map.get_mut(&k) {
        Some(slot) => *slot = &*slot + &v,
        None => {
            map.insert(k, v);
        }
    }
}

/// Shapovalov diagonal `α_{λ,k} = (-1)^k q^{k(k-2λ+1)} [k]! / ∏_{j<k}[2λ-j]`.
pub fn alpha(ctx: &QContext, lambda: &Weight, k: i64) -> Result<ApComplex> {
    if k < 0 {
        return Err(QError::Domain(format!("alpha at negative depth {k}")));
    }
    let two_l = lambda.doubled();
    let den = falling_checked(ctx, &two_l, k, "[2λ-j] in alpha")?;
    let e = (-&two_l + (k + 1)).scale(k);
    Ok(signed(k, ctx.qp(&e) * qfact(ctx, k)? / den))
}

/// Shapovalov form on basis vectors: `α_{λ,k} δ_{k,k2}`.
pub fn shapovalov(ctx: &QContext, lambda: &Weight, k: i64, k2: i64) -> Result<ApComplex> {
    if k < 0 || k2 < 0 {
        return Err(QError::Domain(format!("negative depth in shapovalov ({k}, {k2})")));
    }
    if k == k2 {
        alpha(ctx, lambda, k)
    } else {
        Ok(ctx.zero())
    }
}

fn rmat_factors(ctx: &QContext, l2: &Weight, k1: i64, k2: i64, n: i64) -> Result<ApComplex> {
    // ∏_{j<n}[λ1-a1-j] = [k1]!/[k1-n]!, ∏_{j<n}[λ2+a2-j] with λ2+a2 = 2λ2-k2
    let first = qfact(ctx, k1)? * inv_qfact_reg(ctx, k1 - n);
    let second = falling(ctx, &(l2.doubled() - k2), n);
    let diff_pow = powi(ctx, ctx.inv_diff(), -n);
    Ok(first * second * diff_pow * inv_qfact_reg(ctx, n))
}

fn check_rmat_args(k1: i64, k2: i64, n: i64) -> Result<()> {
    if n < 0 || k1 < 0 || k2 < 0 {
        return Err(QError::Domain(format!("R-matrix element needs k1, k2, n >= 0, got ({k1}, {k2}, {n})")));
    }
    Ok(())
}

/// Coefficient of `e_{a1+n} ⊗ e_{a2-n}` in `R (e_{a1} ⊗ e_{a2})`, with
/// `a_i = λ_i - k_i`. The output depths are `(k1-n, k2+n)`; the element is
/// zero for `n > k1`.
pub fn rmat_elem(ctx: &QContext, l1: &Weight, l2: &Weight, k1: i64, k2: i64, n: i64) -> Result<ApComplex> {
    check_rmat_args(k1, k2, n)?;
    if n > k1 {
        return Ok(ctx.zero());
    }
    let a1n = l1.lowered(k1 - n);
    let a2n = l2.lowered(k2 + n);
    let e = (&a1n * &a2n).scale(2) + n * (n - 1) / 2;
    Ok(ctx.qp(&e) * rmat_factors(ctx, l2, k1, k2, n)?)
}

/// Matrix element of `R^{-1}`, indexed like [`rmat_elem`].
pub fn rmat_inv_elem(ctx: &QContext, l1: &Weight, l2: &Weight, k1: i64, k2: i64, n: i64) -> Result<ApComplex> {
    check_rmat_args(k1, k2, n)?;
    if n > k1 {
        return Ok(ctx.zero());
    }
    let a1 = l1.lowered(k1);
    let a2 = l2.lowered(k2);
    let e = (&a1 * &a2).scale(-2) + (n * (n - 1) / 2 - n * (n - 1));
    Ok(signed(n, ctx.qp(&e) * rmat_factors(ctx, l2, k1, k2, n)?))
}

/// A vector of a tensor product of truncated modules, keyed by the tuple
/// of depths.
#[derive(Clone, Debug)]
pub struct TensorVector {
    pub legs: Vec<TruncatedModule>,
    pub coeffs: BTreeMap<Vec<usize>, ApComplex>,
}

impl TensorVector {
    pub fn basis(legs: Vec<TruncatedModule>, depths: Vec<usize>, coeff: ApComplex) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(depths, coeff);
        Self { legs, coeffs }
    }

    pub fn coeff(&self, depths: &[usize]) -> Option<&ApComplex> {
        self.coeffs.get(depths)
    }
}

/// Action of the iterated coproduct of `gen` on a tensor vector:
/// `ΔE = E⊗K + 1⊗E`, `ΔF = F⊗1 + K⁻¹⊗F`, `ΔK = K⊗K`.
pub fn apply_coproduct(ctx: &QContext, gen: Generator, vec: &TensorVector) -> Result<TensorVector> {
    let legs = &vec.legs;
    let mut out: BTreeMap<Vec<usize>, ApComplex> = BTreeMap::new();
    for (depths, c) in &vec.coeffs {
        match gen {
            Generator::K | Generator::KInv => {
                let mut f = c.clone();
                for (leg, &k) in legs.iter().zip(depths) {
                    let (_, g) = act(ctx, leg, false, gen, k)?.expect("K is diagonal");
                    f = f * g;
                }
                accumulate(&mut out, depths.clone(), f);
            }
            Generator::E | Generator::F => {
                let (before, after) = if gen == Generator::E {
                    (None, Some(Generator::K))
                } else {
                    (Some(Generator::KInv), None)
                };
                for i in 0..legs.len() {
                    let Some((ki, g)) = act(ctx, &legs[i], false, gen, depths[i])? else {
                        continue;
                    };
                    let mut f = c * &g;
                    for (j, leg) in legs.iter().enumerate() {
                        let side = if j < i { before } else if j > i { after } else { None };
                        if let Some(h) = side {
                            let (_, d) = act(ctx, leg, false, h, depths[j])?.expect("K is diagonal");
                            f = f * d;
                        }
                    }
                    let mut target = depths.clone();
                    target[i] = ki;
                    accumulate(&mut out, target, f);
                }
            }
        }
    }
    Ok(TensorVector {
        legs: legs.clone(),
        coeffs: out,
    })
}

type Dense = Vec<Vec<ApComplex>>;

fn matmul(ctx: &QContext, a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![ctx.zero(); n]; n];
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &(aik * &b[k][j]);
                }
            }
        }
    }
    out
}

/// Residual of the Yang–Baxter equation `R12 R13 R23 = R23 R13 R12` on
/// `M_λ1 ⊗ M_λ2 ⊗ M_λ3`, over every block of total depth `<= depth`.
///
/// `R_ij` acts on legs `i` and `j` with weights `(λ_i, λ_j)`.
pub fn check_yang_baxter_modules(
    ctx: &QContext,
    l1: &Weight,
    l2: &Weight,
    l3: &Weight,
    depth: usize,
) -> Result<Residual> {
    let lams = [l1, l2, l3];
    let mut res = Residual::default();
    for total in 0..=depth {
        let basis: Vec<[usize; 3]> = (0..=total)
            .flat_map(|a| (0..=total - a).map(move |b| [a, b, total - a - b]))
            .collect();
        let index: BTreeMap<[usize; 3], usize> = basis.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let r_op = |i: usize, j: usize| -> Result<Dense> {
            let mut m = vec![vec![ctx.zero(); basis.len()]; basis.len()];
            for (col, v) in basis.iter().enumerate() {
                for n in 0..=v[i] {
                    let mut w = *v;
                    w[i] -= n;
                    w[j] += n;
                    let e = rmat_elem(ctx, lams[i], lams[j], v[i] as i64, v[j] as i64, n as i64)?;
                    let row = index[&w];
                    m[row][col] = &m[row][col] + &e;
                }
            }
            Ok(m)
        };
        let (r12, r13, r23) = (r_op(0, 1)?, r_op(0, 2)?, r_op(1, 2)?);
        let lhs = matmul(ctx, &matmul(ctx, &r12, &r13), &r23);
        let rhs = matmul(ctx, &r23, &matmul(ctx, &r13, &r12));
        for (lr, rr) in lhs.iter().zip(&rhs) {
            for (a, b) in lr.iter().zip(rr) {
                res.absorb(a, b);
            }
        }
    }
    Ok(res)
}

/// Residual of `R R⁻¹ = R⁻¹ R = 1` on `M_λ1 ⊗ M_λ2`, total depth `<= depth`.
pub fn check_rmat_inverse(ctx: &QContext, l1: &Weight, l2: &Weight, depth: i64) -> Result<Residual> {
    let mut res = Residual::default();
    for total in 0..=depth {
        for k1 in 0..=total {
            let k2 = total - k1;
            for n in 0..=k1 {
                let mut fwd = ctx.zero();
                let mut bwd = ctx.zero();
                for m in 0..=n {
                    fwd = fwd
                        + rmat_elem(ctx, l1, l2, k1, k2, m)? * rmat_inv_elem(ctx, l1, l2, k1 - m, k2 + m, n - m)?;
                    bwd = bwd
                        + rmat_inv_elem(ctx, l1, l2, k1, k2, m)? * rmat_elem(ctx, l1, l2, k1 - m, k2 + m, n - m)?;
                }
                let target = i64::from(n == 0);
                res = res.max(Residual::against_int(&fwd, target));
                res = res.max(Residual::against_int(&bwd, target));
            }
        }
    }
    Ok(res)
}

/// Residual of `[k] α_{λ,k-1} + q^{2(λ-k)} [2λ-k+1] α_{λ,k} = 0` for `1 <= k <= max_k`.
pub fn check_alpha_recursion(ctx: &QContext, lambda: &Weight, max_k: i64) -> Result<Residual> {
    let mut res = Residual::default();
    for k in 1..=max_k {
        let lhs = ctx.qnum_int(k) * alpha(ctx, lambda, k - 1)?;
        let rhs = -(ctx.qp(&lambda.lowered(k).scale(2)) * qnum(ctx, &(lambda.doubled() - (k - 1))) * alpha(ctx, lambda, k)?);
        res.absorb(&lhs, &rhs);
    }
    Ok(res)
}

/// Residual of the algebra relations `KE = q²EK`, `KF = q⁻²FK` and
/// `[E,F] = (K-K⁻¹)/(q-q⁻¹)` on the module and its dual, over inputs at
/// depth `< depth` so that no term leaves the truncation.
pub fn check_module_relations(ctx: &QContext, lambda: &Weight, depth: usize) -> Result<Residual> {
    let module = TruncatedModule::new(lambda.clone(), depth);
    let q2 = ctx.qp_int(2);
    let qm2 = ctx.qp_int(-2);
    let mut res = Residual::default();
    for dual in [false, true] {
        for k in 0..depth {
            let mut coeffs = BTreeMap::new();
            coeffs.insert(k, ctx.one());
            let v = ModuleVector {
                module: module.clone(),
                coeffs,
            };
            let go = |gens: &[Generator]| -> Result<ModuleVector> {
                let mut w = v.clone();
                for &g in gens.iter().rev() {
                    w = apply(ctx, dual, g, &w)?;
                }
                Ok(w)
            };
            let ke = go(&[Generator::K, Generator::E])?;
            let ek = go(&[Generator::E, Generator::K])?;
            let kf = go(&[Generator::K, Generator::F])?;
            let fk = go(&[Generator::F, Generator::K])?;
            let ef = go(&[Generator::E, Generator::F])?;
            let fe = go(&[Generator::F, Generator::E])?;
            let kk = go(&[Generator::K])?;
            let kinv = go(&[Generator::KInv])?;
            for j in 0..=depth {
                let get = |w: &ModuleVector| w.coeffs.get(&j).cloned().unwrap_or_else(|| ctx.zero());
                res.absorb(&get(&ke), &(&q2 * &get(&ek)));
                res.absorb(&get(&kf), &(&qm2 * &get(&fk)));
                let comm = get(&ef) - get(&fe);
                let cartan = (get(&kk) - get(&kinv)) * ctx.inv_diff();
                res.absorb(&comm, &cartan);
            }
        }
    }
    Ok(res)
}

/// Residual of the contravariance `(E x, y) = (x, -K F y)` of the
/// Shapovalov form on basis vectors of depth `<= max_depth`.
pub fn check_shapovalov_contravariance(ctx: &QContext, lambda: &Weight, max_depth: usize) -> Result<Residual> {
    let module = TruncatedModule::new(lambda.clone(), max_depth + 1);
    let mut res = Residual::default();
    for x in 0..=max_depth {
        for y in 0..=max_depth {
            let lhs = match act(ctx, &module, false, Generator::E, x)? {
                Some((k, c)) => c * shapovalov(ctx, lambda, k as i64, y as i64)?,
                None => ctx.zero(),
            };
            let rhs = match act(ctx, &module, false, Generator::F, y)? {
                Some((k, c)) => {
                    let (_, kc) = act(ctx, &module, false, Generator::K, k)?.expect("K is diagonal");
                    -(c * kc * shapovalov(ctx, lambda, x as i64, k as i64)?)
                }
                None => ctx.zero(),
            };
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

    fn weight(ctx: &QContext, s: &str) -> Weight {
        Weight::new(ctx.parse(s).unwrap())
    }

    #[test]
    fn action_examples() {
        let ctx = QContext::from_decimal("2", 64).unwrap();
        let m = TruncatedModule::new(Weight::new(ctx.int(3)), 4);
        assert!(act(&ctx, &m, false, Generator::E, 0).unwrap().is_none());
        let (k, c) = act(&ctx, &m, false, Generator::E, 1).unwrap().unwrap();
        assert_eq!(k, 0);
        assert_eq!(c.re_f64(), 1.0);
        let (k, c) = act(&ctx, &m, true, Generator::E, 1).unwrap().unwrap();
        assert_eq!(k, 0);
        // -q^{2(λ-1)} [2λ] at q = 2, λ = 3
        let oracle = -16.0 * (64.0 - 1.0 / 64.0) / 1.5;
        assert!((c.re_f64() / oracle - 1.0).abs() < 1e-14);
        assert!(act(&ctx, &m, false, Generator::F, 4).unwrap().is_none());
        assert!(act(&ctx, &m, false, Generator::K, 5).is_err());
    }

    #[test]
    fn alpha_examples() {
        let ctx = ctx();
        let l = weight(&ctx, "5.3");
        assert_eq!(alpha(&ctx, &l, 0).unwrap().re_f64(), 1.0);
        let a1 = alpha(&ctx, &l, 1).unwrap();
        let expect = -(ctx.qp(&(-l.value() + 1).scale(2))) / qnum(&ctx, &l.doubled());
        assert!(Residual::between(&a1, &expect).rel < 1e-60);
        assert!(check_alpha_recursion(&ctx, &l, 8).unwrap().rel < 1e-32);
        assert!(shapovalov(&ctx, &l, 1, 2).unwrap().is_zero());
        let s = shapovalov(&ctx, &l, 2, 2).unwrap();
        assert!(Residual::between(&s, &alpha(&ctx, &l, 2).unwrap()).rel < 1e-60);
        assert!(matches!(alpha(&ctx, &Weight::new(ctx.real(1.0)), 4), Err(QError::NonGeneric(_))));
    }

    #[test]
    fn module_relations_hold() {
        let ctx = ctx();
        for s in ["5.3", "4.71,0.2"] {
            let l = weight(&ctx, s);
            assert!(check_module_relations(&ctx, &l, 6).unwrap().rel < 1e-32);
            assert!(check_shapovalov_contravariance(&ctx, &l, 5).unwrap().rel < 1e-32);
        }
    }

    #[test]
    fn rmat_examples() {
        let ctx = QContext::from_decimal("2", 64).unwrap();
        let l = Weight::new(ctx.int(3));
        let r0 = rmat_elem(&ctx, &l, &l, 1, 0, 0).unwrap();
        assert_eq!(r0.re_f64(), 2f64.powi(12));
        assert!(rmat_elem(&ctx, &l, &l, 1, 0, 2).unwrap().is_zero());
        assert!(rmat_inv_elem(&ctx, &l, &l, 1, 0, 2).unwrap().is_zero());
        let r1 = rmat_elem(&ctx, &l, &l, 1, 0, 1).unwrap();
        let q6 = (64.0 - 1.0 / 64.0) / 1.5;
        let expect = 2f64.powi(12) * 1.5 * q6;
        assert!((r1.re_f64() / expect - 1.0).abs() < 1e-14);
        let ri = rmat_inv_elem(&ctx, &l, &l, 1, 1, 0).unwrap();
        assert_eq!(ri.re_f64(), 2f64.powi(-8));
        assert!(rmat_elem(&ctx, &l, &l, 1, 0, -1).is_err());
    }

    #[test]
    fn rmat_inverse_and_yang_baxter() {
        let ctx = ctx();
        let (a, b, c) = (weight(&ctx, "5.414"), weight(&ctx, "6.828"), weight(&ctx, "4.243"));
        assert!(check_rmat_inverse(&ctx, &a, &b, 5).unwrap().rel < 1e-32);
        let zero = check_yang_baxter_modules(&ctx, &a, &b, &c, 0).unwrap();
        assert!(zero.rel < 1e-60);
        assert!(check_yang_baxter_modules(&ctx, &a, &b, &c, 1).unwrap().rel < 1e-32);
        assert!(check_yang_baxter_modules(&ctx, &a, &b, &c, 4).unwrap().rel < 1e-32);
    }

    #[test]
    fn coproduct_examples() {
        let ctx = ctx();
        let (l1, l2) = (weight(&ctx, "5.3"), weight(&ctx, "4.9"));
        let legs = vec![TruncatedModule::new(l1.clone(), 3), TruncatedModule::new(l2.clone(), 3)];
        let top = TensorVector::basis(legs.clone(), vec![0, 0], ctx.one());
        let e = apply_coproduct(&ctx, Generator::E, &top).unwrap();
        assert!(e.coeffs.values().all(ApComplex::is_zero));
        let f = apply_coproduct(&ctx, Generator::F, &top).unwrap();
        let c10 = f.coeff(&[1, 0]).unwrap();
        assert!(Residual::between(c10, &qnum(&ctx, &l1.doubled())).rel < 1e-60);
        let c01 = f.coeff(&[0, 1]).unwrap();
        let expect = ctx.qp(&l1.doubled()).recip() * qnum(&ctx, &l2.doubled());
        assert!(Residual::between(c01, &expect).rel < 1e-60);
        let v = TensorVector::basis(legs, vec![2, 1], ctx.one());
        let k = apply_coproduct(&ctx, Generator::K, &v).unwrap();
        let a_sum = l1.lowered(2) + l2.lowered(1);
        assert!(Residual::between(k.coeff(&[2, 1]).unwrap(), &ctx.qp(&a_sum.scale(2))).rel < 1e-60);
    }
}
