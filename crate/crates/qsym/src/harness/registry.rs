//! The identity ledger: every checked identity with its reference label,
//! parameter draws and evaluator.

use qsym_core::q3j::{verify_q3j_identity, Q3jIdentity};
use qsym_core::q6j::{verify_q6j_identity, Q6jIdentity};
use qsym_core::qarith::checks::{self, PlusMinus};
use qsym_core::verma;
use qsym_core::{ApComplex, QContext, QError, Residual, Result, Weight};

use super::sampler::{param, ParamKind, ParamSpec};

pub type Evaluator = fn(&QContext, &[ApComplex]) -> Result<Residual>;

/// One registry entry.
#[derive(Clone, Copy)]
pub struct IdentityDescriptor {
    pub id: &'static str,
    pub reference: &'static str,
    pub default_trials: u32,
    pub params: &'static [ParamSpec],
    pub evaluator: Evaluator,
}

impl IdentityDescriptor {
    /// Whether the identity involves a q-Pochhammer base; only those draw a small `q` in the SmallQ regime.
    pub fn uses_base(&self) -> bool {
        self.params.iter().any(|p| matches!(p.kind, ParamKind::Base))
    }
}

impl core::fmt::Debug for IdentityDescriptor {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("IdentityDescriptor")
            .field("id", &self.id)
            .field("reference", &self.reference)
            .field("default_trials", &self.default_trials)
            .finish()
    }
}

const A: ParamSpec = param("A", ParamKind::Real(2.5, 6.5));
const B: ParamSpec = param("B", ParamKind::Real(1.5, 4.5));
const L1: ParamSpec = param("lambda1", ParamKind::Weight(1));
const L2: ParamSpec = param("lambda2", ParamKind::Weight(2));
const L3: ParamSpec = param("lambda3", ParamKind::Weight(3));
const L4: ParamSpec = param("lambda4", ParamKind::Weight(4));
const BASE: ParamSpec = param("base", ParamKind::Base);

const TWO: &[ParamSpec] = &[L1, L2];
const THREE: &[ParamSpec] = &[L1, L2, L3];
const FOUR: &[ParamSpec] = &[L1, L2, L3, L4];

fn weight(p: &[ApComplex], i: usize) -> Weight {
    Weight::new(p[i].clone())
}

fn three(p: &[ApComplex]) -> [Weight; 3] {
    [weight(p, 0), weight(p, 1), weight(p, 2)]
}

fn four(p: &[ApComplex]) -> [Weight; 4] {
    [weight(p, 0), weight(p, 1), weight(p, 2), weight(p, 3)]
}

fn both(f: impl Fn(PlusMinus) -> Result<Residual>) -> Result<Residual> {
    PlusMinus::BOTH
        .into_iter()
        .try_fold(Residual::default(), |acc, pm| Ok(acc.max(f(pm)?)))
}

fn q3j(ctx: &QContext, id: Q3jIdentity) -> Result<Residual> {
    verify_q3j_identity(ctx, &id)
}

fn q6j(ctx: &QContext, id: Q6jIdentity) -> Result<Residual> {
    verify_q6j_identity(ctx, &id)
}

fn eval_qbinrec(ctx: &QContext, _: &[ApComplex]) -> Result<Residual> {
    both(|pm| checks::qbinrec(ctx, pm))
}

fn eval_qbid1(ctx: &QContext, _: &[ApComplex]) -> Result<Residual> {
    both(|pm| checks::qbid1(ctx, pm))
}

fn eval_qbid2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    both(|pm| checks::qbid2(ctx, &p[0], pm))
}

fn eval_qbid3(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    checks::qbid3(ctx, &p[0], &p[1])
}

fn eval_qbid4(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    both(|pm| checks::qbid4(ctx, &p[0], pm))
}

fn eval_qpfid2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    checks::qpfid2(ctx, &p[0])
}

fn eval_qpfid3(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    checks::qpfid3(ctx, &p[0])
}

fn eval_id1(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    checks::id1(ctx, &p[0], &p[1])
}

fn eval_id2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    checks::id2(ctx, &p[0], &p[1])
}

fn eval_qid1(ctx: &QContext, _: &[ApComplex]) -> Result<Residual> {
    checks::qid1(ctx)
}

fn eval_qid2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    checks::qid2(ctx, &p[0])
}

/// Draws with `|c/(ab)| >= 0.75` are rejected so the series converges within the term budget.
fn eval_hid1(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    if (&p[2] / &(&p[0] * &p[1])).abs_f64() >= 0.75 {
        return Err(QError::Domain("hid1 draw with |c/(ab)| >= 0.75".into()));
    }
    checks::hid1(ctx, &p[0], &p[1], &p[2], &p[3])
}

fn eval_recmor(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    verma::check_alpha_recursion(ctx, &weight(p, 0), 10)
}

fn eval_module_rel(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    verma::check_module_relations(ctx, &weight(p, 0), 8)
}

fn eval_shapovalov(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    verma::check_shapovalov_contravariance(ctx, &weight(p, 0), 6)
}

fn eval_rmat_inv(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    verma::check_rmat_inverse(ctx, &weight(p, 0), &weight(p, 1), 6)
}

fn eval_ybr(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    verma::check_yang_baxter_modules(ctx, &weight(p, 0), &weight(p, 1), &weight(p, 2), 4)
}

fn eval_rec(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::Recursion { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 5, max_depth: 6 })
}

fn eval_rf_vdw(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::RfVdw { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 5, max_depth: 6 })
}

fn eval_rf_rec(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::RfRecursion { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 5, max_depth: 6 })
}

fn eval_orth1(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::Orth1 { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 4, max_total: 10 })
}

fn eval_orth2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::Orth2 { lambda1: weight(p, 0), lambda2: weight(p, 1), max_total: 6 })
}

fn eval_rmat1(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::Rmat1 { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 3, max_depth: 3 })
}

fn eval_rmat2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(
        ctx,
        Q3jIdentity::Rmat2 {
            lambda1: weight(p, 0),
            lambda2: weight(p, 1),
            lambda3: weight(p, 2),
            max_defect: 3,
            max_depth: 3,
            max_k3: 3,
        },
    )
}

fn eval_sym(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::Sym { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 4, max_depth: 3 })
}

fn eval_intertwine(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q3j(ctx, Q3jIdentity::Intertwine { lambda1: weight(p, 0), lambda2: weight(p, 1), max_defect: 3, window: 5 })
}

fn eval_q6j_oracle(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::ClosedVsOracle { weights: three(p), max_defect: 4 })
}

fn eval_stid1(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Stid1 { weights: three(p), max_defect: 2, stid_depth: 3 })
}

fn eval_stid2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Stid2 { weights: three(p), max_defect: 2, stid_depth: 3 })
}

fn eval_stid3(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Stid3 { weights: three(p), max_defect: 2, stid_depth: 3 })
}

fn eval_qsorth(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Orthogonality { weights: three(p), max_defect: 4 })
}

fn eval_qsracah(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Racah { weights: three(p), max_defect: 3 })
}

fn eval_qsbe(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Pentagon { weights: four(p), max_defect: 3 })
}

fn eval_qsyb(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::YangBaxter { weights: four(p), max_defect: 3 })
}

fn eval_lemma2(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Lemma2 { weights: three(p), max_defect: 5 })
}

fn eval_lemma3(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Lemma3 { weights: three(p), max_defect: 5 })
}

fn eval_lemma5(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Lemma5 { weights: three(p), max_defect: 5 })
}

fn eval_lemma6(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Lemma6 { weights: three(p), max_defect: 5 })
}

fn eval_lemma7(ctx: &QContext, p: &[ApComplex]) -> Result<Residual> {
    q6j(ctx, Q6jIdentity::Lemma7 { weights: three(p), max_defect: 5 })
}

macro_rules! entry {
    ($id:literal, $reference:literal, $trials:expr, $params:expr, $eval:ident) => {
        IdentityDescriptor {
            id: $id,
            reference: $reference,
            default_trials: $trials,
            params: $params,
            evaluator: $eval,
        }
    };
}

/// The full ledger, sorted by id.
pub static REGISTRY: &[IdentityDescriptor] = &[
    entry!("HID1", "hid1, q-Gauss summation of 2phi1", 10, &[
        param("a", ParamKind::Real(0.5, 0.9)),
        param("b", ParamKind::Real(0.5, 0.9)),
        param("c", ParamKind::Real(0.05, 0.2)),
        BASE
    ], eval_hid1),
    entry!("ID1", "id1, splitting of the infinite q-Pochhammer symbol", 25, &[param("a", ParamKind::Real(0.2, 0.9)), BASE], eval_id1),
    entry!("ID2", "id2, reversal of the finite q-Pochhammer symbol", 25, &[param("a", ParamKind::Real(0.2, 0.9)), BASE], eval_id2),
    entry!("INTERTWINE", "orthrelth, invariance of the embedding", 10, TWO, eval_intertwine),
    entry!("LEMMA2", "lemstep2, shifted q-Chu-Vandermonde sum", 10, THREE, eval_lemma2),
    entry!("LEMMA3", "lemstep3, alternating product-function sum", 10, THREE, eval_lemma3),
    entry!("LEMMA5", "lemstep5, sum over r", 10, THREE, eval_lemma5),
    entry!("LEMMA6", "lemstep6, alternating factorial sum", 10, THREE, eval_lemma6),
    entry!("LEMMA7", "lemstep7, product-function convolution", 10, THREE, eval_lemma7),
    entry!("MODULE-REL", "map and dualmap1, algebra relations on M and its dual", 10, &[L1], eval_module_rel),
    entry!("ORTH1", "projth1, projection after embedding is the identity", 10, TWO, eval_orth1),
    entry!("ORTH2", "projth2, completeness of the decomposition", 10, TWO, eval_orth2),
    entry!("Q6J-ORACLE", "q6jfinal, closed 6j formula against the contraction", 10, THREE, eval_q6j_oracle),
    entry!("QBID1", "qbid1, alternating binomial orthogonality", 25, &[], eval_qbid1),
    entry!("QBID2", "qbid2, q-Vandermonde sum", 25, &[A], eval_qbid2),
    entry!("QBID3", "qbid3, factorial convolution", 25, &[A, B], eval_qbid3),
    entry!("QBID4", "qbid4, alternating factorial sum", 25, &[A], eval_qbid4),
    entry!("QBINREC", "qbinrec, q-Pascal recursion", 25, &[], eval_qbinrec),
    entry!("QID1", "qid1, q-factorial as a q-Pochhammer symbol", 25, &[], eval_qid1),
    entry!("QID2", "qid2, falling product as a q-Pochhammer symbol", 25, &[param("J", ParamKind::Real(2.0, 6.0))], eval_qid2),
    entry!("QPFID2", "qpfid2, product function times falling product", 25, &[param("b", ParamKind::Real(2.0, 6.0))], eval_qpfid2),
    entry!("QPFID3", "qpfid3, product function over rising product", 25, &[param("b", ParamKind::Real(2.0, 6.0))], eval_qpfid3),
    entry!("QSBE", "qsBE, pentagon identity", 10, FOUR, eval_qsbe),
    entry!("QSORTH", "qsorth, orthogonality of 6j symbols", 10, THREE, eval_qsorth),
    entry!("QSRACAH", "qsracah, Racah identity", 10, THREE, eval_qsracah),
    entry!("QSYB", "qsYB, Yang-Baxter identity for 6j symbols", 10, FOUR, eval_qsyb),
    entry!("REC", "rec, lowering recursion of the embedding coefficients", 10, TWO, eval_rec),
    entry!("RECMOR", "recmor, recursion of the Shapovalov coefficients", 10, &[L1], eval_recmor),
    entry!("RF-REC", "rf2 and vdw2 against forward substitution through rec", 10, TWO, eval_rf_rec),
    entry!("RF-VDW", "rf2 against vdw2", 10, TWO, eval_rf_vdw),
    entry!("RMAT-INV", "rmatrel, R-matrix times its inverse", 10, TWO, eval_rmat_inv),
    entry!("RMAT1", "rmatid1, braiding of the embedding", 10, TWO, eval_rmat1),
    entry!("RMAT2", "rmatid2, reduced diagonal form", 10, THREE, eval_rmat2),
    entry!("SHAPOVALOV", "defshap, contravariance of the Shapovalov form", 10, &[L1], eval_shapovalov),
    entry!("STID1", "stid1, shadow transit of a projection", 10, THREE, eval_stid1),
    entry!("STID2", "stid2, re-bracketing of double embeddings", 10, THREE, eval_stid2),
    entry!("STID3", "stid3, braided re-bracketing", 10, THREE, eval_stid3),
    entry!("SYM", "q3j symmetry under q to 1/q", 10, TWO, eval_sym),
    entry!("YBR-MODULE", "YBR, Yang-Baxter equation on a triple tensor product", 5, THREE, eval_ybr),
];
