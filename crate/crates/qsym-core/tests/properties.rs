//! Randomized invariants of the arithmetic layer and the symbols.

use proptest::prelude::*;
use qsym_core::q3j::{dd, q3j_rf, q3j_vdw, CgKey};
use qsym_core::q6j::{q6j_closed, SixJKey};
use qsym_core::qarith::{inv_qfact_reg, qbinom, qnum, qpair};
use qsym_core::{ApComplex, QContext, Residual, Weight};

const DIGITS: u32 = 40;
const TOL: f64 = 1e-20;

fn ctx(q: f64) -> QContext {
    QContext::new(&ApComplex::from_f64(q, 0.0, 64), DIGITS).unwrap()
}

fn weight(ctx: &QContext, u: i64, frac: f64, im: f64) -> Weight {
    Weight::new(ctx.complex(u as f64 + frac, im))
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn qnum_is_odd(q in 1.05f64..2.0, re in -6.0f64..6.0, im in -0.5f64..0.5) {
        let ctx = ctx(q);
        let x = ctx.complex(re, im);
        let r = Residual::between(&qnum(&ctx, &-x.clone()), &-qnum(&ctx, &x));
        prop_assert!(r.rel < TOL);
    }

    #[test]
    fn qnum_invariant_under_q_inversion(q in 1.05f64..2.0, re in -6.0f64..6.0) {
        let ctx = ctx(q);
        let inv = ctx.inverted().unwrap();
        let r = Residual::between(&qnum(&ctx, &ctx.real(re)), &qnum(&inv, &inv.real(re)));
        prop_assert!(r.rel < TOL);
    }

    #[test]
    fn qpair_reciprocity(q in 1.05f64..2.0, b in 0.1f64..0.9, d in -3i64..=3) {
        let ctx = ctx(q);
        let b = ctx.real(b);
        let prod = qpair(&ctx, &b, d).unwrap() * qpair(&ctx, &(&b + d), -d).unwrap();
        prop_assert!(Residual::against_int(&prod, 1).rel < TOL);
    }

    #[test]
    fn qbinom_is_symmetric(q in 1.05f64..2.0, m in 0i64..=12, n in 0i64..=12) {
        prop_assume!(n <= m);
        let ctx = ctx(q);
        let r = Residual::between(&qbinom(&ctx, m, n).unwrap(), &qbinom(&ctx, m, m - n).unwrap());
        prop_assert!(r.rel < TOL);
    }

    #[test]
    fn negative_factorial_reciprocal_is_exact_zero(q in 1.05f64..2.0, n in -20i64..0) {
        prop_assert!(inv_qfact_reg(&ctx(q), n).is_zero());
    }

    #[test]
    fn dd_squares_to_positive_real(q in 1.05f64..2.0, u1 in 4i64..=9, u2 in 4i64..=9, j in 0i64..=5) {
        let ctx = ctx(q);
        let (l1, l2) = (weight(&ctx, u1, 0.414, 0.0), weight(&ctx, u2, 0.828, 0.0));
        let d = dd(&ctx, &l1, &l2, j).unwrap();
        prop_assert!(d.re_f64() > 0.0);
        prop_assert!(d.im().is_zero());
    }

    #[test]
    fn racah_fock_matches_van_der_waerden(
        q in 1.05f64..2.0,
        u1 in 4i64..=9,
        u2 in 4i64..=9,
        im in 0.0f64..0.3,
        j in 0i64..=5,
        n in 0i64..=6,
        split in 0i64..=11,
    ) {
        let ctx = ctx(q);
        let (l1, l2) = (weight(&ctx, u1, 0.414, im), weight(&ctx, u2, 0.828, -im));
        let depth = j + n;
        let k1 = split % (depth + 1);
        let key = CgKey::psi(&l1, &l2, j, k1, depth - k1);
        let r = Residual::between(&q3j_rf(&ctx, &key).unwrap(), &q3j_vdw(&ctx, &key).unwrap());
        prop_assert!(r.rel < TOL);
    }

    #[test]
    fn six_j_is_deterministic(q in 1.05f64..2.0, j123 in 0i64..=3, a in 0i64..=3, b in 0i64..=3) {
        prop_assume!(a <= j123 && b <= j123);
        let (c1, c2) = (ctx(q), ctx(q));
        let (l1, l2, l3) = (weight(&c1, 5, 0.41, 0.0), weight(&c1, 6, 0.13, 0.0), weight(&c1, 4, 0.77, 0.0));
        let key = SixJKey::new(&l1, &l2, &l3, a, b, j123).unwrap();
        let first = q6j_closed(&c1, &key).unwrap();
        let warm = q6j_closed(&c1, &key).unwrap();
        let fresh = q6j_closed(&c2, &key).unwrap();
        prop_assert_eq!(c1.to_decimal(&first), c1.to_decimal(&warm));
        prop_assert_eq!(c1.to_decimal(&first), c2.to_decimal(&fresh));
    }
}
