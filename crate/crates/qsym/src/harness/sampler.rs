//! Seeded draws of generic parameters.

use core::fmt;
use core::str::FromStr;

use qsym_core::{ApComplex, QContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Parameter regime of a suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Real `q` in `[1.05, 2]`, real weights.
    Real,
    /// Real `q` in `[1.05, 2]`, weights and generic scalars with imaginary parts up to `0.3`.
    Complex,
    /// Real `q` in `[0.2, 0.8]` for q-Pochhammer identities, `[1.05, 2]` otherwise; real weights.
    SmallQ,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Real => "real",
            Regime::Complex => "complex",
            Regime::SmallQ => "smallq",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "real" => Ok(Regime::Real),
            "complex" => Ok(Regime::Complex),
            "smallq" => Ok(Regime::SmallQ),
            other => Err(format!("unknown regime `{other}` (expected real, complex or smallq)")),
        }
    }
}

/// How a single parameter of an identity is drawn.
#[derive(Clone, Copy, Debug)]
pub enum ParamKind {
    /// Highest weight `u + frac(i√2)` with `u` an integer in `[4, 9]`, so
    /// weights and all their integer combinations stay away from the
    /// integers and half-integers.
    Weight(u8),
    /// Uniform real in `[lo, hi]`.
    Real(f64, f64),
    /// Base of a q-Pochhammer symbol: modulus in `[0.2, 0.8]`.
    Base,
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
}

pub const fn param(name: &'static str, kind: ParamKind) -> ParamSpec {
    ParamSpec { name, kind }
}

/// Stateful sampler for one identity; the stream depends only on the suite
/// seed and the identity id.
pub struct Sampler {
    rng: ChaCha8Rng,
    regime: Regime,
    small_q: bool,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

impl Sampler {
    pub fn new(seed: u64, id: &str, regime: Regime) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed.rotate_left(17) ^ fnv1a(id)),
            regime,
            small_q: regime == Regime::SmallQ,
        }
    }

    /// Keeps `q` in `[1.05, 2]` even in the SmallQ regime.
    pub fn large_q_only(mut self) -> Self {
        self.small_q = false;
        self
    }

    pub fn draw_q(&mut self) -> f64 {
        if self.small_q {
            self.rng.gen_range(0.2..=0.8)
        } else {
            self.rng.gen_range(1.05..=2.0)
        }
    }

    fn imag(&mut self) -> f64 {
        match self.regime {
            Regime::Complex => self.rng.gen_range(0.0..=0.3),
            Regime::Real | Regime::SmallQ => 0.0,
        }
    }

    pub fn draw(&mut self, ctx: &QContext, spec: &ParamSpec) -> ApComplex {
        match spec.kind {
            ParamKind::Weight(i) => {
                let u: i64 = self.rng.gen_range(4..=9);
                let t = ctx.int(2).sqrt().scale(i64::from(i));
                let frac = &t - t.re_f64().floor() as i64;
                let im = self.imag();
                frac.add_int(u) + ctx.complex(0.0, im)
            }
            ParamKind::Real(lo, hi) => {
                let re = self.rng.gen_range(lo..=hi);
                let im = self.imag();
                ctx.complex(re, im)
            }
            ParamKind::Base => {
                let r: f64 = self.rng.gen_range(0.2..=0.8);
                let arg: f64 = match self.regime {
                    Regime::Complex => self.rng.gen_range(-0.3..=0.3),
                    Regime::Real | Regime::SmallQ => 0.0,
                };
                ctx.complex(r * arg.cos(), r * arg.sin())
            }
        }
    }
}
