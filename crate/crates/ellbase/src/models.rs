//! Reduced Weierstrass model shapes and seeded context search, shared by the
//! benchmark table and the verification suites.

use serde::{Deserialize, Serialize};

use crate::counters::A1Shape;
use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::field::{BaseField, Field};
use crate::omega::OmegaContext;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveModel {
    /// All coefficients free, a1 not in {0, 1} and a3 != 0.
    General,
    /// y^2 = x^3 + a4 x + a6 (char != 2, 3).
    Short,
    /// y^2 = x^3 + a2 x^2 + a6 (char 3, j != 0).
    Char3NonzeroJ,
    /// y^2 = x^3 + a4 x + a6 (char 3, j = 0).
    Char3ZeroJ,
    /// y^2 + xy = x^3 + a2 x^2 + a6 (char 2, j != 0).
    Char2NonzeroJ,
    /// y^2 + a3 y = x^3 + a4 x + a6 (char 2, j = 0).
    Char2ZeroJ,
}

impl CurveModel {
    pub fn name(&self) -> &'static str {
        match self {
            CurveModel::General => "general",
            CurveModel::Short => "short",
            CurveModel::Char3NonzeroJ => "char3-j-nonzero",
            CurveModel::Char3ZeroJ => "char3-j-zero",
            CurveModel::Char2NonzeroJ => "char2-j-nonzero",
            CurveModel::Char2ZeroJ => "char2-j-zero",
        }
    }

    pub fn parse(s: &str) -> Option<CurveModel> {
        [
            CurveModel::General,
            CurveModel::Short,
            CurveModel::Char3NonzeroJ,
            CurveModel::Char3ZeroJ,
            CurveModel::Char2NonzeroJ,
            CurveModel::Char2ZeroJ,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }

    /// Models testable over a field of characteristic p.
    pub fn applicable(p: u64) -> Vec<CurveModel> {
        match p {
            2 => vec![CurveModel::Char2NonzeroJ, CurveModel::Char2ZeroJ],
            3 => vec![CurveModel::Char3NonzeroJ, CurveModel::Char3ZeroJ],
            _ => vec![CurveModel::General, CurveModel::Short],
        }
    }

    pub fn is_applicable(&self, p: u64) -> bool {
        Self::applicable(p).contains(self)
    }

    pub fn a1_shape(&self) -> A1Shape {
        match self {
            CurveModel::General => A1Shape::General,
            CurveModel::Char2NonzeroJ => A1Shape::One,
            _ => A1Shape::Zero,
        }
    }

    pub fn a3_nonzero(&self) -> bool {
        matches!(self, CurveModel::General | CurveModel::Char2ZeroJ)
    }

    /// One random curve of this shape (may be singular; caller filters).
    pub fn sample(&self, k: &BaseField, rng: &mut SplitMix64) -> Result<WeierstrassCurve<BaseField>> {
        let z = k.zero();
        let (a1, a2, a3, a4, a6) = match self {
            CurveModel::General => {
                // a1 outside {0, 1} so the general closed forms are exercised
                let a1 = loop {
                    let c = k.random(rng);
                    if !k.is_zero(&c) && !k.is_one(&c) {
                        break c;
                    }
                };
                let a3 = loop {
                    let c = k.random(rng);
                    if !k.is_zero(&c) {
                        break c;
                    }
                };
                (a1, k.random(rng), a3, k.random(rng), k.random(rng))
            }
            CurveModel::Short | CurveModel::Char3ZeroJ => {
                (z.clone(), z.clone(), z, k.random(rng), k.random(rng))
            }
            CurveModel::Char3NonzeroJ => {
                let a2 = loop {
                    let c = k.random(rng);
                    if !k.is_zero(&c) {
                        break c;
                    }
                };
                (z.clone(), a2, z, k.zero(), k.random(rng))
            }
            CurveModel::Char2NonzeroJ => {
                (k.one(), k.random(rng), z, k.zero(), k.random(rng))
            }
            CurveModel::Char2ZeroJ => {
                let a3 = loop {
                    let c = k.random(rng);
                    if !k.is_zero(&c) {
                        break c;
                    }
                };
                (z.clone(), z.clone(), a3, k.random(rng), k.random(rng))
            }
        };
        WeierstrassCurve::new(k.clone(), a1, a2, a3, a4, a6)
    }

    /// Search a curve of this shape carrying a point of exact order d and
    /// build the elliptic-basis context.
    pub fn find_context(
        &self,
        k: &BaseField,
        d: usize,
        rng: &mut SplitMix64,
    ) -> Result<OmegaContext> {
        if !self.is_applicable(k.p()) {
            return Err(Error::Malformed(format!(
                "model {} does not apply in characteristic {}",
                self.name(),
                k.p()
            )));
        }
        // the achievable group orders form a small set per model shape; a
        // first sampling pass detects (model, d) pairs with no usable order
        let mut seen = std::collections::HashSet::new();
        let mut divisible_seen = false;
        for attempt in 0..4096 {
            let e = match self.sample(k, rng) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let m = match e.group_order() {
                Ok(m) => m,
                Err(_) => continue,
            };
            seen.insert(m);
            if m % d as u64 != 0 {
                if attempt >= 200 && !divisible_seen {
                    return Err(Error::SearchExhausted("no group order divisible by d"));
                }
                continue;
            }
            divisible_seen = true;
            let t = match e.find_point_of_order(d as u64, rng) {
                Ok(t) => t,
                Err(_) => continue,
            };
            match OmegaContext::build(&e, &t, None, rng.next_u64()) {
                Ok(ctx) => return Ok(ctx),
                Err(_) => continue,
            }
        }
        Err(Error::SearchExhausted("model context search"))
    }
}
