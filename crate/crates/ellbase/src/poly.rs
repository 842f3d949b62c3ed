use crate::bitint::BitInt;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::rng::SplitMix64;

/// Dense polynomial over a field K, coefficients low degree first,
/// canonical form: no trailing zeros (the zero polynomial is empty).
#[derive(Debug, Clone)]
pub struct Polynomial<K: Field> {
    pub coeffs: Vec<K::Elem>,
}

impl<K: Field> PartialEq for Polynomial<K> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

/// Below this length, products fall back to the schoolbook routine.
pub const KARATSUBA_THRESHOLD: usize = 16;

impl<K: Field> Polynomial<K> {
    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one(k: &K) -> Self {
        Polynomial { coeffs: vec![k.one()] }
    }

    pub fn constant(k: &K, c: K::Elem) -> Self {
        let mut p = Polynomial { coeffs: vec![c] };
        p.normalize(k);
        p
    }

    /// x
    pub fn x(k: &K) -> Self {
        Polynomial { coeffs: vec![k.zero(), k.one()] }
    }

    /// x - a
    pub fn x_minus(k: &K, a: &K::Elem) -> Self {
        Polynomial { coeffs: vec![k.neg(a), k.one()] }
    }

    pub fn from_coeffs(k: &K, coeffs: Vec<K::Elem>) -> Self {
        let mut p = Polynomial { coeffs };
        p.normalize(k);
        p
    }

    pub fn normalize(&mut self, k: &K) {
        while self.coeffs.last().map_or(false, |c| k.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&K::Elem> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: &K, i: usize) -> K::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| k.zero())
    }

    pub fn add(&self, k: &K, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(k.add(&self.coeff(k, i), &other.coeff(k, i)));
        }
        Polynomial::from_coeffs(k, out)
    }

    pub fn sub(&self, k: &K, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(k.sub(&self.coeff(k, i), &other.coeff(k, i)));
        }
        Polynomial::from_coeffs(k, out)
    }

    pub fn neg(&self, k: &K) -> Self {
        Polynomial { coeffs: self.coeffs.iter().map(|c| k.neg(c)).collect() }
    }

    pub fn scale(&self, k: &K, c: &K::Elem) -> Self {
        let mut p = Polynomial { coeffs: self.coeffs.iter().map(|a| k.mul(a, c)).collect() };
        p.normalize(k);
        p
    }

    /// Multiply by x^n.
    pub fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + n);
        // leading zeros are placeholders; the caller's field is unknown here,
        // so reuse an existing coefficient to synthesize zero is not possible.
        // shift is only called through shift_with.
        coeffs.extend(self.coeffs.iter().cloned());
        let _ = n;
        Polynomial { coeffs }
    }

    pub fn shift_with(&self, k: &K, n: usize) -> Self {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![k.zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn mul(&self, k: &K, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let coeffs = mul_vecs(k, &self.coeffs, &other.coeffs);
        Polynomial::from_coeffs(k, coeffs)
    }

    /// Quotient and remainder; `other` must be nonzero.
    pub fn divrem(&self, k: &K, other: &Self) -> Result<(Self, Self)> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = match self.degree() {
            None => return Ok((Polynomial::zero(), Polynomial::zero())),
            Some(d) => d,
        };
        let dv = other.degree().unwrap();
        if dd < dv {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let lead_inv = k.inv(other.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![k.zero(); dd - dv + 1];
        for i in (dv..=dd).rev() {
            let c = k.mul(&rem[i], &lead_inv);
            if !k.is_zero(&c) {
                quot[i - dv] = c.clone();
                for (j, oc) in other.coeffs.iter().enumerate() {
                    let t = k.mul(&c, oc);
                    rem[i - dv + j] = k.sub(&rem[i - dv + j], &t);
                }
            }
        }
        rem.truncate(dv);
        Ok((Polynomial::from_coeffs(k, quot), Polynomial::from_coeffs(k, rem)))
    }

    pub fn rem(&self, k: &K, other: &Self) -> Result<Self> {
        Ok(self.divrem(k, other)?.1)
    }

    /// Exact division; errors if a remainder is left.
    pub fn div_exact(&self, k: &K, other: &Self) -> Result<Self> {
        let (q, r) = self.divrem(k, other)?;
        if !r.is_zero() {
            return Err(Error::InexactDivision);
        }
        Ok(q)
    }

    pub fn monic(&self, k: &K) -> Result<Self> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        if k.is_one(lead) {
            return Ok(self.clone());
        }
        let inv = k.inv(lead)?;
        Ok(self.scale(k, &inv))
    }

    /// Monic gcd.
    pub fn gcd(&self, k: &K, other: &Self) -> Result<Self> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(k, &b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic(k)
        }
    }

    /// Extended gcd: returns (g, u, v) with u*self + v*other = g, g monic.
    pub fn xgcd(&self, k: &K, other: &Self) -> Result<(Self, Self, Self)> {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Polynomial::one(k);
        let mut s1 = Polynomial::zero();
        let mut t0 = Polynomial::zero();
        let mut t1 = Polynomial::one(k);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(k, &r1)?;
            let s = s0.sub(k, &q.mul(k, &s1));
            let t = t0.sub(k, &q.mul(k, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let lead_inv = k.inv(r0.leading().unwrap())?;
        Ok((
            r0.scale(k, &lead_inv),
            s0.scale(k, &lead_inv),
            t0.scale(k, &lead_inv),
        ))
    }

    /// Inverse of self modulo `modulus`; fails when not coprime.
    pub fn inv_mod(&self, k: &K, modulus: &Self) -> Result<Self> {
        let a = self.rem(k, modulus)?;
        if a.is_zero() {
            return Err(Error::NotInvertible);
        }
        let (g, u, _) = a.xgcd(k, modulus)?;
        if g.degree() != Some(0) {
            return Err(Error::NotInvertible);
        }
        u.rem(k, modulus)
    }

    pub fn mul_mod(&self, k: &K, other: &Self, modulus: &Self) -> Result<Self> {
        self.mul(k, other).rem(k, modulus)
    }

    pub fn derivative(&self, k: &K) -> Self {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(k.mul(&k.from_u64(i as u64), c));
        }
        Polynomial::from_coeffs(k, out)
    }

    /// Horner evaluation.
    pub fn eval(&self, k: &K, x: &K::Elem) -> K::Elem {
        let mut acc = k.zero();
        for c in self.coeffs.iter().rev() {
            acc = k.mul(&acc, x);
            acc = k.add(&acc, c);
        }
        acc
    }

    /// self^e mod modulus.
    pub fn powmod_u64(&self, k: &K, mut e: u64, modulus: &Self) -> Result<Self> {
        let mut base = self.rem(k, modulus)?;
        let mut acc = Polynomial::one(k);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(k, &base, modulus)?;
            }
            base = base.mul_mod(k, &base, modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn powmod_bits(&self, k: &K, e: &BitInt, modulus: &Self) -> Result<Self> {
        let n = e.bit_len();
        if n == 0 {
            return Ok(Polynomial::one(k));
        }
        let base = self.rem(k, modulus)?;
        let mut acc = base.clone();
        for i in (0..n - 1).rev() {
            acc = acc.mul_mod(k, &acc, modulus)?;
            if e.bit(i) {
                acc = acc.mul_mod(k, &base, modulus)?;
            }
        }
        Ok(acc)
    }

    /// Irreducibility over a field whose order fits u64 (Rabin's test).
    pub fn is_irreducible(&self, k: &K) -> bool {
        let q = k.order_u64().expect("irreducibility test needs a word-size field order");
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let me = match self.monic(k) {
            Ok(m) => m,
            Err(_) => return false,
        };
        let x = Polynomial::x(k);
        // x^(q^i) mod f by repeated q-th powers
        let mut frob = vec![x.clone()];
        let mut cur = x.clone();
        for _ in 0..n {
            cur = match cur.powmod_u64(k, q, &me) {
                Ok(c) => c,
                Err(_) => return false,
            };
            frob.push(cur.clone());
        }
        if frob[n] != x.rem(k, &me).unwrap() {
            return false;
        }
        let mut factors = vec![];
        let mut nn = n;
        let mut l = 2;
        while l * l <= nn {
            if nn % l == 0 {
                factors.push(l);
                while nn % l == 0 {
                    nn /= l;
                }
            }
            l += 1;
        }
        if nn > 1 {
            factors.push(nn);
        }
        for &l in &factors {
            let diff = frob[n / l].sub(k, &x);
            match diff.gcd(k, &me) {
                Ok(g) => {
                    if g.degree() != Some(0) {
                        return false;
                    }
                }
                Err(_) => return false,
            }
        }
        true
    }
}

fn mul_vecs<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        return mul_schoolbook(k, a, b);
    }
    mul_karatsuba(k, a, b)
}

fn mul_schoolbook<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if k.is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let t = k.mul(ai, bj);
            out[i + j] = k.add(&out[i + j], &t);
        }
    }
    out
}

fn mul_karatsuba<K: Field>(k: &K, a: &[K::Elem], b: &[K::Elem]) -> Vec<K::Elem> {
    let n = a.len().max(b.len());
    let half = n / 2;
    if a.len() <= half || b.len() <= half {
        return mul_schoolbook(k, a, b);
    }
    let (a0, a1) = a.split_at(half);
    let (b0, b1) = b.split_at(half);
    let z0 = mul_vecs(k, a0, b0);
    let z2 = mul_vecs(k, a1, b1);
    let a01: Vec<K::Elem> = (0..half.max(a1.len()))
        .map(|i| {
            let x = a0.get(i).cloned().unwrap_or_else(|| k.zero());
            let y = a1.get(i).cloned().unwrap_or_else(|| k.zero());
            k.add(&x, &y)
        })
        .collect();
    let b01: Vec<K::Elem> = (0..half.max(b1.len()))
        .map(|i| {
            let x = b0.get(i).cloned().unwrap_or_else(|| k.zero());
            let y = b1.get(i).cloned().unwrap_or_else(|| k.zero());
            k.add(&x, &y)
        })
        .collect();
    let mut z1 = mul_vecs(k, &a01, &b01);
    for (i, c) in z0.iter().enumerate() {
        z1[i] = k.sub(&z1[i], c);
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] = k.sub(&z1[i], c);
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] = k.add(&out[i], &c);
    }
    for (i, c) in z1.into_iter().enumerate() {
        if i + half < out.len() {
            out[i + half] = k.add(&out[i + half], &c);
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        out[i + 2 * half] = k.add(&out[i + 2 * half], &c);
    }
    out
}

/// Evaluate f at every point, with a subproduct tree above a small threshold.
pub fn multipoint_eval<K: Field>(k: &K, f: &Polynomial<K>, pts: &[K::Elem]) -> Vec<K::Elem> {
    const NAIVE_BELOW: usize = 16;
    if pts.len() < NAIVE_BELOW {
        return pts.iter().map(|p| f.eval(k, p)).collect();
    }
    fn subtree<K: Field>(k: &K, pts: &[K::Elem]) -> Polynomial<K> {
        if pts.len() == 1 {
            return Polynomial::x_minus(k, &pts[0]);
        }
        let mid = pts.len() / 2;
        subtree(k, &pts[..mid]).mul(k, &subtree(k, &pts[mid..]))
    }
    fn go<K: Field>(k: &K, f: &Polynomial<K>, pts: &[K::Elem], out: &mut Vec<K::Elem>) {
        if pts.len() < NAIVE_BELOW {
            out.extend(pts.iter().map(|p| f.eval(k, p)));
            return;
        }
        let mid = pts.len() / 2;
        let left_mod = subtree(k, &pts[..mid]);
        let right_mod = subtree(k, &pts[mid..]);
        let fl = f.rem(k, &left_mod).unwrap();
        let fr = f.rem(k, &right_mod).unwrap();
        go(k, &fl, &pts[..mid], out);
        go(k, &fr, &pts[mid..], out);
    }
    let mut out = Vec::with_capacity(pts.len());
    go(k, f, pts, &mut out);
    out
}

/// One root of a polynomial that splits into linear factors over K
/// (Cantor-Zassenhaus style equal-degree splitting to degree one).
pub fn any_root<K: Field>(k: &K, f: &Polynomial<K>, rng: &mut SplitMix64) -> Result<K::Elem> {
    let mut f = f.monic(k)?;
    loop {
        match f.degree() {
            None | Some(0) => return Err(Error::SearchExhausted("root finding")),
            Some(1) => {
                // x + c -> root = -c
                return Ok(k.neg(&f.coeffs[0]));
            }
            Some(_) => {}
        }
        let split = split_once(k, &f, rng)?;
        f = split;
    }
}

fn split_once<K: Field>(k: &K, f: &Polynomial<K>, rng: &mut SplitMix64) -> Result<Polynomial<K>> {
    let n = f.degree().unwrap();
    let p = k.characteristic();
    for _ in 0..64 {
        // random polynomial of degree < n
        let a = Polynomial::from_coeffs(
            k,
            (0..n).map(|_| k.random(rng)).collect::<Vec<_>>(),
        );
        if a.is_zero() {
            continue;
        }
        let g = a.gcd(k, f)?;
        if let Some(dg) = g.degree() {
            if dg > 0 && dg < n {
                return keep_smaller(k, f, &g);
            }
        }
        let h = if p == 2 {
            // trace map over F_2: a + a^2 + a^4 + ... (one term per bit of |K|)
            let bits = k.degree_over_prime();
            let mut acc = a.rem(k, f)?;
            let mut cur = a.rem(k, f)?;
            for _ in 1..bits {
                cur = cur.mul_mod(k, &cur, f)?;
                acc = acc.add(k, &cur);
            }
            acc
        } else {
            // a^((|K|-1)/2) - 1
            let mut e = k.order();
            e.sub_u64(1);
            e.div2();
            let b = a.powmod_bits(k, &e, f)?;
            b.sub(k, &Polynomial::one(k))
        };
        let g = h.gcd(k, f)?;
        if let Some(dg) = g.degree() {
            if dg > 0 && dg < n {
                return keep_smaller(k, f, &g);
            }
        }
    }
    Err(Error::SearchExhausted("polynomial splitting"))
}

fn keep_smaller<K: Field>(k: &K, f: &Polynomial<K>, g: &Polynomial<K>) -> Result<Polynomial<K>> {
    let other = f.div_exact(k, g)?;
    if g.degree() <= other.degree() {
        Ok(g.clone())
    } else {
        Ok(other)
    }
}
