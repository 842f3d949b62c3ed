//! The base field tower: F_p scalars and `F_q = F_p[w]/g(w)`.

use std::fmt;
use std::sync::Arc;

use crate::bitint::BitInt;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Context-object interface for exact finite field arithmetic.
///
/// Fields are cheap-to-clone handles; elements are plain data owned by the
/// caller. All operations are pure, so any field handle can be shared across
/// threads freely.
pub trait Field: Clone {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn characteristic(&self) -> u64;
    /// Degree over the prime field F_p.
    fn degree_over_prime(&self) -> usize;
    /// Field order as a big integer.
    fn order(&self) -> BitInt;
    fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    fn from_u64(&self, n: u64) -> Self::Elem;
    /// Deterministic enumeration of field elements by index (used to scan for
    /// non-residues and trace-one elements). Indices wrap modulo the order.
    fn element_from_index(&self, idx: u64) -> Self::Elem;
    fn random(&self, rng: &mut SplitMix64) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn double(&self, a: &Self::Elem) -> Self::Elem {
        self.add(a, a)
    }

    fn pow_u64(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    fn pow_bits(&self, a: &Self::Elem, e: &BitInt) -> Self::Elem {
        let n = e.bit_len();
        if n == 0 {
            return self.one();
        }
        let mut acc = a.clone();
        for i in (0..n - 1).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// F_p scalar arithmetic
// ---------------------------------------------------------------------------

pub(crate) mod fp {
    pub fn add(p: u64, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % p as u128) as u64
    }

    pub fn sub(p: u64, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (p - b)
        }
    }

    pub fn neg(p: u64, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            p - a
        }
    }

    pub fn mul(p: u64, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn pow(p: u64, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1u64 % p;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(p, r, a);
            }
            a = mul(p, a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(p: u64, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (a as i128, p as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        let mut s = s0 % p as i128;
        if s < 0 {
            s += p as i128;
        }
        Some(s as u64)
    }
}

/// Deterministic Miller-Rabin, exact for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = fp::pow(n, a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = fp::mul(n, x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Decompose q = p^m with p prime, or fail.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    if is_prime_u64(q) {
        return Ok((q, 1));
    }
    for m in 2..=63u32 {
        // candidate p = floor(q^(1/m))
        let p = (q as f64).powf(1.0 / m as f64).round() as u64;
        for cand in p.saturating_sub(1)..=p + 1 {
            if cand >= 2 && cand.checked_pow(m) == Some(q) && is_prime_u64(cand) {
                return Ok((cand, m));
            }
        }
    }
    Err(Error::NotPrimePower(q))
}

// ---------------------------------------------------------------------------
// The base field F_q = F_p[w]/g(w)
// ---------------------------------------------------------------------------

/// A validated prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// An element of F_q, stored as its length-m coefficient vector over F_p,
/// low degree first, each coefficient in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseFieldElement(pub Vec<u64>);

pub type ExtFieldElement = Vec<BaseFieldElement>;

#[derive(Debug)]
struct BaseFieldRepr {
    prime: PrimeField,
    m: usize,
    /// Monic modulus of degree m, coefficients low to high, length m+1.
    /// For m = 1 this is w itself, so elements are plain residues.
    modulus: Vec<u64>,
    q: u64,
}

/// Handle for `F_q = F_p[w]/g(w)`. Cheap to clone.
#[derive(Clone)]
pub struct BaseField {
    repr: Arc<BaseFieldRepr>,
}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.repr.q)
    }
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.repr.prime == other.repr.prime && self.repr.modulus == other.repr.modulus
    }
}

impl BaseField {
    /// Prime field F_p.
    pub fn prime_field(p: u64) -> Result<Self> {
        let prime = PrimeField::new(p)?;
        Ok(BaseField {
            repr: Arc::new(BaseFieldRepr {
                prime,
                m: 1,
                modulus: vec![0, 1],
                q: p,
            }),
        })
    }

    /// F_{p^m} with an explicitly given monic irreducible modulus
    /// (coefficients low to high, length m+1).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let prime = PrimeField::new(p)?;
        let m = modulus.len().checked_sub(1).ok_or(Error::Malformed("empty modulus".into()))?;
        if m == 0 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::Malformed("modulus must be monic with coefficients in [0,p)".into()));
        }
        let q = (0..m).try_fold(1u64, |acc, _| acc.checked_mul(p)).ok_or(Error::NotPrimePower(0))?;
        let field = BaseField {
            repr: Arc::new(BaseFieldRepr { prime, m, modulus, q }),
        };
        if m > 1 && !field.modulus_is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        Ok(field)
    }

    /// F_{p^m} with the lexicographically first monic irreducible modulus.
    pub fn extension(p: u64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Malformed("extension degree must be >= 1".into()));
        }
        if m == 1 {
            return Self::prime_field(p);
        }
        PrimeField::new(p)?;
        // enumerate the low coefficients (c_0, ..., c_{m-1}) counting in base p
        let m = m as usize;
        let mut counter = vec![0u64; m];
        loop {
            let mut modulus = counter.clone();
            modulus.push(1);
            if let Ok(f) = Self::with_modulus(p, modulus) {
                return Ok(f);
            }
            // increment
            let mut i = 0;
            loop {
                if i == m {
                    return Err(Error::SearchExhausted("irreducible modulus"));
                }
                counter[i] += 1;
                if counter[i] < p {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
        }
    }

    /// Build a field for a prime power q, with canonical modulus.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, m) = prime_power(q)?;
        Self::extension(p, m)
    }

    pub fn p(&self) -> u64 {
        self.repr.prime.p
    }

    pub fn m(&self) -> usize {
        self.repr.m
    }

    pub fn q(&self) -> u64 {
        self.repr.q
    }

    pub fn prime(&self) -> PrimeField {
        self.repr.prime
    }

    pub fn modulus(&self) -> &[u64] {
        &self.repr.modulus
    }

    pub fn elem_from_coeffs(&self, mut coeffs: Vec<u64>) -> Result<BaseFieldElement> {
        if coeffs.len() > self.repr.m {
            return Err(Error::Malformed("too many coefficients".into()));
        }
        if coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::Malformed("coefficient out of range".into()));
        }
        coeffs.resize(self.repr.m, 0);
        Ok(BaseFieldElement(coeffs))
    }

    /// The generator w of F_q over F_p (for m = 1 this is 0).
    pub fn gen(&self) -> BaseFieldElement {
        let mut c = vec![0; self.repr.m];
        if self.repr.m > 1 {
            c[1] = 1;
        }
        BaseFieldElement(c)
    }

    fn reduce_vec(&self, mut v: Vec<u64>) -> Vec<u64> {
        let p = self.p();
        let m = self.repr.m;
        let g = &self.repr.modulus;
        // reduce degree by degree using the monic modulus
        while v.len() > m {
            let top = v.pop().unwrap();
            if top != 0 {
                let deg = v.len() - m;
                for i in 0..m {
                    let t = fp::mul(p, top, g[i]);
                    v[deg + i] = fp::sub(p, v[deg + i], t);
                }
            }
        }
        v.resize(m, 0);
        v
    }

    fn modulus_is_irreducible(&self) -> bool {
        // Rabin test over F_p using raw coefficient vectors:
        // x^(p^m) == x mod g and gcd(x^(p^(m/l)) - x, g) = 1 for prime l | m.
        let m = self.repr.m;
        let mut factors = vec![];
        let mut n = m;
        let mut l = 2;
        while l * l <= n {
            if n % l == 0 {
                factors.push(l);
                while n % l == 0 {
                    n /= l;
                }
            }
            l += 1;
        }
        if n > 1 {
            factors.push(n);
        }
        let x = self.gen_raw();
        let mut xp = x.clone();
        let mut powers = vec![x.clone()]; // x^(p^i)
        for _ in 0..m {
            xp = self.raw_pow_p(&xp);
            powers.push(xp.clone());
        }
        if powers[m] != x {
            return false;
        }
        for &l in &factors {
            let diff = self.raw_sub(&powers[m / l], &x);
            if self.raw_gcd_with_modulus(&diff).len() > 1 {
                return false;
            }
        }
        true
    }

    // raw (un-newtyped) helpers used only for the modulus self-check
    fn gen_raw(&self) -> Vec<u64> {
        let mut v = vec![0; self.repr.m];
        if self.repr.m > 1 {
            v[1] = 1;
        } else {
            // x mod (w) is 0; irrelevant since m = 1 bypasses the check
        }
        v
    }

    fn raw_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p();
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = fp::add(p, prod[i + j], fp::mul(p, ai, bj));
            }
        }
        self.reduce_vec(prod)
    }

    fn raw_pow_p(&self, a: &[u64]) -> Vec<u64> {
        let mut e = self.p();
        let mut base = a.to_vec();
        let mut acc = {
            let mut o = vec![0; self.repr.m];
            o[0] = 1;
            o
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(&acc, &base);
            }
            base = self.raw_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn raw_sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p();
        a.iter().zip(b).map(|(&x, &y)| fp::sub(p, x, y)).collect()
    }

    fn raw_gcd_with_modulus(&self, a: &[u64]) -> Vec<u64> {
        // gcd over F_p of a (as polynomial) with the modulus
        let p = self.p();
        let trim = |mut v: Vec<u64>| {
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        let mut r0 = trim(self.repr.modulus.clone());
        let mut r1 = trim(a.to_vec());
        while !r1.is_empty() {
            // r0 mod r1
            let lead_inv = fp::inv(p, *r1.last().unwrap()).unwrap();
            let mut rem = r0.clone();
            while rem.len() >= r1.len() && !rem.is_empty() {
                let coef = fp::mul(p, *rem.last().unwrap(), lead_inv);
                let off = rem.len() - r1.len();
                for (i, &c) in r1.iter().enumerate() {
                    rem[off + i] = fp::sub(p, rem[off + i], fp::mul(p, coef, c));
                }
                rem = trim(rem);
                if rem.len() < r1.len() {
                    break;
                }
            }
            r0 = r1;
            r1 = trim(rem);
        }
        if r0.is_empty() {
            r0.push(0);
        }
        r0
    }
}

impl Field for BaseField {
    type Elem = BaseFieldElement;

    fn zero(&self) -> BaseFieldElement {
        BaseFieldElement(vec![0; self.repr.m])
    }

    fn one(&self) -> BaseFieldElement {
        let mut c = vec![0; self.repr.m];
        c[0] = 1 % self.p();
        BaseFieldElement(c)
    }

    fn is_zero(&self, a: &BaseFieldElement) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &BaseFieldElement, b: &BaseFieldElement) -> BaseFieldElement {
        let p = self.p();
        BaseFieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| fp::add(p, x, y)).collect())
    }

    fn sub(&self, a: &BaseFieldElement, b: &BaseFieldElement) -> BaseFieldElement {
        let p = self.p();
        BaseFieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| fp::sub(p, x, y)).collect())
    }

    fn neg(&self, a: &BaseFieldElement) -> BaseFieldElement {
        let p = self.p();
        BaseFieldElement(a.0.iter().map(|&x| fp::neg(p, x)).collect())
    }

    fn mul(&self, a: &BaseFieldElement, b: &BaseFieldElement) -> BaseFieldElement {
        if self.repr.m == 1 {
            return BaseFieldElement(vec![fp::mul(self.p(), a.0[0], b.0[0])]);
        }
        let p = self.p();
        let mut prod = vec![0u64; 2 * self.repr.m - 1];
        for (i, &ai) in a.0.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.0.iter().enumerate() {
                prod[i + j] = fp::add(p, prod[i + j], fp::mul(p, ai, bj));
            }
        }
        BaseFieldElement(self.reduce_vec(prod))
    }

    fn inv(&self, a: &BaseFieldElement) -> Result<BaseFieldElement> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        if self.repr.m == 1 {
            return Ok(BaseFieldElement(vec![fp::inv(self.p(), a.0[0]).unwrap()]));
        }
        // a^(q-2), q fits u64
        Ok(self.pow_u64(a, self.repr.q - 2))
    }

    fn characteristic(&self) -> u64 {
        self.p()
    }

    fn degree_over_prime(&self) -> usize {
        self.repr.m
    }

    fn order(&self) -> BitInt {
        BitInt::from_u64(self.repr.q)
    }

    fn order_u64(&self) -> Option<u64> {
        Some(self.repr.q)
    }

    fn from_u64(&self, n: u64) -> BaseFieldElement {
        let mut c = vec![0; self.repr.m];
        c[0] = n % self.p();
        BaseFieldElement(c)
    }

    fn element_from_index(&self, idx: u64) -> BaseFieldElement {
        let p = self.p();
        let mut idx = idx % self.repr.q;
        let mut c = vec![0; self.repr.m];
        for ci in c.iter_mut() {
            *ci = idx % p;
            idx /= p;
        }
        BaseFieldElement(c)
    }

    fn random(&self, rng: &mut SplitMix64) -> BaseFieldElement {
        let p = self.p();
        BaseFieldElement((0..self.repr.m).map(|_| rng.below(p)).collect())
    }
}
