use std::fmt;
use std::sync::Arc;

use crate::bitint::BitInt;
use crate::error::{Error, Result};
use crate::field::{BaseField, BaseFieldElement, ExtFieldElement, Field};
use crate::poly::Polynomial;
use crate::rng::SplitMix64;

#[derive(Debug)]
struct QuotientRepr {
    base: BaseField,
    modulus: Polynomial<BaseField>,
    d: usize,
}

/// The quotient ring `L = F_q[x]/Pi(x)` for irreducible Pi: the polynomial
/// (Psi) representation used as oracle field throughout.
#[derive(Clone)]
pub struct QuotientField {
    repr: Arc<QuotientRepr>,
}

impl fmt::Debug for QuotientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.repr.base.q(), self.repr.d)
    }
}

impl PartialEq for QuotientField {
    fn eq(&self, other: &Self) -> bool {
        self.repr.base == other.repr.base && self.repr.modulus == other.repr.modulus
    }
}

impl QuotientField {
    pub fn new(base: BaseField, modulus: Polynomial<BaseField>) -> Result<Self> {
        let d = modulus.degree().ok_or(Error::Malformed("zero modulus".into()))?;
        if d == 0 {
            return Err(Error::Malformed("constant modulus".into()));
        }
        if !modulus.is_irreducible(&base) {
            return Err(Error::NotIrreducible);
        }
        let modulus = modulus.monic(&base)?;
        Ok(QuotientField { repr: Arc::new(QuotientRepr { base, modulus, d }) })
    }

    pub fn base(&self) -> &BaseField {
        &self.repr.base
    }

    pub fn modulus(&self) -> &Polynomial<BaseField> {
        &self.repr.modulus
    }

    pub fn d(&self) -> usize {
        self.repr.d
    }

    /// The residue class of x: the generator whose powers form the polynomial basis.
    pub fn x_elem(&self) -> ExtFieldElement {
        let k = &self.repr.base;
        let mut v = vec![k.zero(); self.repr.d];
        if self.repr.d > 1 {
            v[1] = k.one();
        } else {
            // x reduces to -c0 for modulus x + c0
            v[0] = k.neg(&self.repr.modulus.coeffs[0]);
        }
        v
    }

    pub fn embed_base(&self, c: &BaseFieldElement) -> ExtFieldElement {
        let k = &self.repr.base;
        let mut v = vec![k.zero(); self.repr.d];
        v[0] = c.clone();
        v
    }

    pub fn from_poly(&self, p: &Polynomial<BaseField>) -> ExtFieldElement {
        let k = &self.repr.base;
        let r = p.rem(k, &self.repr.modulus).expect("modulus nonzero");
        let mut v = r.coeffs;
        v.resize(self.repr.d, k.zero());
        v
    }

    pub fn to_poly(&self, e: &ExtFieldElement) -> Polynomial<BaseField> {
        Polynomial::from_coeffs(&self.repr.base, e.clone())
    }

    /// q-power Frobenius on L.
    pub fn frobenius(&self, e: &ExtFieldElement) -> ExtFieldElement {
        self.pow_u64(e, self.repr.base.q())
    }

    /// q^k-power Frobenius.
    pub fn frobenius_iter(&self, e: &ExtFieldElement, k: usize) -> ExtFieldElement {
        let mut out = e.clone();
        for _ in 0..k {
            out = self.frobenius(&out);
        }
        out
    }

    /// Evaluate a polynomial with F_q coefficients at an element of L.
    pub fn eval_lifted(&self, p: &Polynomial<BaseField>, x: &ExtFieldElement) -> ExtFieldElement {
        let mut acc = self.zero();
        for c in p.coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.embed_base(c));
        }
        acc
    }
}

impl Field for QuotientField {
    type Elem = ExtFieldElement;

    fn zero(&self) -> ExtFieldElement {
        vec![self.repr.base.zero(); self.repr.d]
    }

    fn one(&self) -> ExtFieldElement {
        let mut v = self.zero();
        v[0] = self.repr.base.one();
        v
    }

    fn is_zero(&self, a: &ExtFieldElement) -> bool {
        a.iter().all(|c| self.repr.base.is_zero(c))
    }

    fn add(&self, a: &ExtFieldElement, b: &ExtFieldElement) -> ExtFieldElement {
        let k = &self.repr.base;
        a.iter().zip(b).map(|(x, y)| k.add(x, y)).collect()
    }

    fn sub(&self, a: &ExtFieldElement, b: &ExtFieldElement) -> ExtFieldElement {
        let k = &self.repr.base;
        a.iter().zip(b).map(|(x, y)| k.sub(x, y)).collect()
    }

    fn neg(&self, a: &ExtFieldElement) -> ExtFieldElement {
        let k = &self.repr.base;
        a.iter().map(|x| k.neg(x)).collect()
    }

    fn mul(&self, a: &ExtFieldElement, b: &ExtFieldElement) -> ExtFieldElement {
        let k = &self.repr.base;
        let pa = Polynomial::from_coeffs(k, a.clone());
        let pb = Polynomial::from_coeffs(k, b.clone());
        self.from_poly(&pa.mul(k, &pb))
    }

    fn inv(&self, a: &ExtFieldElement) -> Result<ExtFieldElement> {
        if self.is_zero(a) {
            return Err(Error::ZeroInversion);
        }
        let k = &self.repr.base;
        let pa = Polynomial::from_coeffs(k, a.clone());
        let inv = pa.inv_mod(k, &self.repr.modulus)?;
        Ok(self.from_poly(&inv))
    }

    fn characteristic(&self) -> u64 {
        self.repr.base.p()
    }

    fn degree_over_prime(&self) -> usize {
        self.repr.base.m() * self.repr.d
    }

    fn order(&self) -> BitInt {
        let mut n = BitInt::from_u64(1);
        for _ in 0..self.repr.d {
            n.mul_u64(self.repr.base.q());
        }
        n
    }

    fn from_u64(&self, n: u64) -> ExtFieldElement {
        self.embed_base(&self.repr.base.from_u64(n))
    }

    fn element_from_index(&self, idx: u64) -> ExtFieldElement {
        let k = &self.repr.base;
        let q = k.q();
        let mut idx = idx;
        let mut v = Vec::with_capacity(self.repr.d);
        for _ in 0..self.repr.d {
            v.push(k.element_from_index(idx % q));
            idx /= q;
        }
        v
    }

    fn random(&self, rng: &mut SplitMix64) -> ExtFieldElement {
        (0..self.repr.d).map(|_| self.repr.base.random(rng)).collect()
    }
}
