//! Degree-2 functions u_{A,B} on a Weierstrass curve, their slope invariant
//! Gamma(A,B,C), and exact evaluation (including at points with coordinates
//! in an extension of the coefficient field).

use crate::curve::{CurvePoint, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::ext::QuotientField;
use crate::field::{BaseField, ExtFieldElement, Field};
use crate::poly::Polynomial;

/// A rational function (n0(x) + y*n1(x)) / den(x) on a curve.
///
/// For a single u_{A,B} the degrees satisfy deg den <= 2, deg n0 <= 2,
/// deg n1 <= 0 (polar divisor `-[A]-[B]`).
#[derive(Debug, Clone)]
pub struct EllFunction<K: Field> {
    pub n0: Polynomial<K>,
    pub n1: Polynomial<K>,
    pub den: Polynomial<K>,
}

#[derive(Debug, Clone)]
pub enum GammaValue<K: Field> {
    Finite(K::Elem),
    Infinite,
}

impl<K: Field> PartialEq for GammaValue<K> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GammaValue::Infinite, GammaValue::Infinite) => true,
            (GammaValue::Finite(a), GammaValue::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl<K: Field> GammaValue<K> {
    pub fn finite(self) -> Option<K::Elem> {
        match self {
            GammaValue::Finite(v) => Some(v),
            GammaValue::Infinite => None,
        }
    }
}

impl<K: Field> EllFunction<K> {
    pub fn constant(k: &K, c: K::Elem) -> Self {
        EllFunction {
            n0: Polynomial::constant(k, c),
            n1: Polynomial::zero(),
            den: Polynomial::one(k),
        }
    }

    /// Evaluate at an affine point with coordinates in K.
    pub fn eval(&self, k: &K, p: &CurvePoint<K>) -> Result<K::Elem> {
        match p {
            CurvePoint::Infinity => self.eval_at_infinity(k),
            CurvePoint::Affine(x, y) => {
                let d = self.den.eval(k, x);
                if k.is_zero(&d) {
                    return Err(Error::PoleEvaluation);
                }
                let n = k.add(&self.n0.eval(k, x), &k.mul(y, &self.n1.eval(k, x)));
                Ok(k.mul(&n, &k.inv(&d)?))
            }
        }
    }

    /// Value at O, decided by pole orders: x has order -2 and y order -3.
    fn eval_at_infinity(&self, k: &K) -> Result<K::Elem> {
        let o0 = self.n0.degree().map(|d| 2 * d as i64);
        let o1 = self.n1.degree().map(|d| 3 + 2 * d as i64);
        let od = match self.den.degree() {
            None => return Err(Error::DivisionByZero),
            Some(d) => 2 * d as i64,
        };
        let onum = match (o0, o1) {
            (None, None) => return Ok(k.zero()),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.max(b),
        };
        if onum > od {
            return Err(Error::PoleEvaluation);
        }
        if onum < od {
            return Ok(k.zero());
        }
        // same pole order; only the even (n0) part can tie an even od
        if onum % 2 == 0 {
            Ok(k.mul(self.n0.leading().unwrap(), &k.inv(self.den.leading().unwrap())?))
        } else {
            // odd total order cannot equal the even denominator order
            Err(Error::PoleEvaluation)
        }
    }

    /// Structural equality as rational functions, by cross-multiplication.
    pub fn equivalent(&self, k: &K, other: &Self) -> bool {
        let lhs0 = self.n0.mul(k, &other.den);
        let rhs0 = other.n0.mul(k, &self.den);
        let lhs1 = self.n1.mul(k, &other.den);
        let rhs1 = other.n1.mul(k, &self.den);
        lhs0 == rhs0 && lhs1 == rhs1
    }
}

impl EllFunction<BaseField> {
    /// Evaluate at a point with coordinates in L, lifting the coefficients.
    pub fn eval_ext(
        &self,
        l: &QuotientField,
        x: &ExtFieldElement,
        y: &ExtFieldElement,
    ) -> Result<ExtFieldElement> {
        let d = l.eval_lifted(&self.den, x);
        if l.is_zero(&d) {
            return Err(Error::PoleEvaluation);
        }
        let n = l.add(
            &l.eval_lifted(&self.n0, x),
            &l.mul(y, &l.eval_lifted(&self.n1, x)),
        );
        Ok(l.mul(&n, &l.inv(&d)?))
    }
}

fn coords<K: Field>(p: &CurvePoint<K>) -> (&K::Elem, &K::Elem) {
    match p {
        CurvePoint::Affine(x, y) => (x, y),
        CurvePoint::Infinity => unreachable!("affine access on O"),
    }
}

/// The function u_{A,B} for distinct A, B, via the explicit four-branch
/// formulas.
pub fn u_func<K: Field>(
    e: &WeierstrassCurve<K>,
    a: &CurvePoint<K>,
    b: &CurvePoint<K>,
) -> Result<EllFunction<K>> {
    let k = &e.field;
    if a == b {
        return Err(Error::EqualPoints);
    }
    if !e.contains(a) || !e.contains(b) {
        return Err(Error::PointNotOnCurve);
    }
    if b.is_infinity() {
        // u_{A,O} = -u_{O,A} - a1
        let u = u_func(e, &CurvePoint::Infinity, a)?;
        let n0 = u.n0.neg(k).sub(k, &u.den.scale(k, &e.a1));
        return Ok(EllFunction { n0, n1: u.n1.neg(k), den: u.den });
    }
    if a.is_infinity() {
        // (y + y(B) + a1 x(B) + a3)/(x - x(B))
        let (xb, yb) = coords(b);
        let c = k.add(&k.add(yb, &k.mul(&e.a1, xb)), &e.a3);
        return Ok(EllFunction {
            n0: Polynomial::constant(k, c),
            n1: Polynomial::one(k),
            den: Polynomial::x_minus(k, xb),
        });
    }
    if *b == e.neg_point(a) {
        // (a1 y(A) - 3x(A)^2 - 2a2 x(A) - a4)/(2y(A)+a1 x(A)+a3)
        //   - (a1 x + a3 + 2y(A))/(x - x(A))
        let (xa, ya) = coords(a);
        let num = {
            let t = k.mul(&e.a1, ya);
            let t = k.sub(&t, &k.mul(&k.from_u64(3), &k.square(xa)));
            let t = k.sub(&t, &k.double(&k.mul(&e.a2, xa)));
            k.sub(&t, &e.a4)
        };
        let den = k.add(&k.add(&k.double(ya), &k.mul(&e.a1, xa)), &e.a3);
        // A = -A would contradict A != B here, so den != 0
        let c = k.mul(&num, &k.inv(&den)?);
        let lin = Polynomial::x_minus(k, xa);
        // n0 = c*(x - x(A)) - (a1 x + a3 + 2 y(A))
        let sub = Polynomial::from_coeffs(
            k,
            vec![k.add(&e.a3, &k.double(ya)), e.a1.clone()],
        );
        let n0 = lin.scale(k, &c).sub(k, &sub);
        return Ok(EllFunction { n0, n1: Polynomial::zero(), den: lin });
    }
    // generic branch
    let (xa, ya) = coords(a);
    let (xb, yb) = coords(b);
    let c = {
        let num = k.add(&k.add(yb, ya), &k.add(&k.mul(&e.a1, xa), &e.a3));
        let den = k.sub(xb, xa);
        k.mul(&num, &k.inv(&den)?)
    };
    let lin_a = Polynomial::x_minus(k, xa);
    let lin_b = Polynomial::x_minus(k, xb);
    let den = lin_a.mul(k, &lin_b);
    // numerator of the second summand:
    //   (x(B)-x(A)) (y + a1 x + a3) + (y(B)-y(A)) x + y(A)x(B) - y(B)x(A)
    let dx = k.sub(xb, xa);
    let n1 = Polynomial::constant(k, dx.clone());
    let mut n0 = Polynomial::from_coeffs(k, vec![k.mul(&dx, &e.a3), k.mul(&dx, &e.a1)]);
    n0 = n0.add(
        k,
        &Polynomial::from_coeffs(k, vec![k.zero(), k.sub(yb, ya)]),
    );
    n0 = n0.add(
        k,
        &Polynomial::constant(k, k.sub(&k.mul(ya, xb), &k.mul(yb, xa))),
    );
    // plus the constant c over the full denominator
    let n0 = n0.add(k, &den.scale(k, &c));
    Ok(EllFunction { n0, n1, den })
}

/// Gamma(A,B,C) = u_{A,B}(C): finite iff the three points are distinct.
pub fn gamma<K: Field>(
    e: &WeierstrassCurve<K>,
    a: &CurvePoint<K>,
    b: &CurvePoint<K>,
    c: &CurvePoint<K>,
) -> Result<GammaValue<K>> {
    let mut distinct = 1usize;
    if b != a {
        distinct += 1;
    }
    if c != a && c != b {
        distinct += 1;
    }
    if distinct < 2 {
        return Err(Error::TooFewDistinctPoints);
    }
    if distinct == 2 {
        return Ok(GammaValue::Infinite);
    }
    // translate so the first point is O
    let (b, c) = if a.is_infinity() {
        (b.clone(), c.clone())
    } else {
        let na = e.neg_point(a);
        (e.add_unchecked(b, &na), e.add_unchecked(c, &na))
    };
    Ok(GammaValue::Finite(gamma_origin(e, &b, &c)?))
}

/// Gamma(O, B, C) for distinct nonzero B, C.
pub fn gamma_origin<K: Field>(
    e: &WeierstrassCurve<K>,
    b: &CurvePoint<K>,
    c: &CurvePoint<K>,
) -> Result<K::Elem> {
    let k = &e.field;
    let (xb, yb) = coords(b);
    if *c == e.neg_point(b) {
        // tangent branch: -(3x^2 + a1(y + a1 x + a3) + 2a2 x + a4)/(2y + a1 x + a3)
        let s = k.add(&k.add(yb, &k.mul(&e.a1, xb)), &e.a3);
        let num = {
            let t = k.mul(&k.from_u64(3), &k.square(xb));
            let t = k.add(&t, &k.mul(&e.a1, &s));
            let t = k.add(&t, &k.double(&k.mul(&e.a2, xb)));
            k.add(&t, &e.a4)
        };
        let den = k.add(&k.add(&k.double(yb), &k.mul(&e.a1, xb)), &e.a3);
        // den = 0 would mean B is 2-torsion, i.e. C = -B = B, excluded by distinctness
        return Ok(k.neg(&k.mul(&num, &k.inv(&den)?)));
    }
    let (xc, yc) = coords(c);
    let num = k.add(&k.add(yc, yb), &k.add(&k.mul(&e.a1, xb), &e.a3));
    let den = k.sub(xc, xb);
    Ok(k.mul(&num, &k.inv(&den)?))
}

/// u_{A,B}(P), robust at the removable zeros of the stored denominator:
/// off the true poles A and B the value equals Gamma(A, B, P), which the
/// translated slope formula computes for any three distinct points.
pub fn eval_u<K: Field>(
    e: &WeierstrassCurve<K>,
    a: &CurvePoint<K>,
    b: &CurvePoint<K>,
    p: &CurvePoint<K>,
) -> Result<K::Elem> {
    if p == a || p == b {
        return Err(Error::PoleEvaluation);
    }
    let f = u_func(e, a, b)?;
    if let Ok(v) = f.eval(&e.field, p) {
        return Ok(v);
    }
    match gamma(e, a, b, p)? {
        GammaValue::Finite(v) => Ok(v),
        GammaValue::Infinite => Err(Error::PoleEvaluation),
    }
}

/// x_A(P) = x(P - A); the translate-then-evaluate reading of x_A.
pub fn x_translated<K: Field>(
    e: &WeierstrassCurve<K>,
    a: &CurvePoint<K>,
    p: &CurvePoint<K>,
) -> Result<K::Elem> {
    let shifted = e.add_unchecked(p, &e.neg_point(a));
    match shifted {
        CurvePoint::Infinity => Err(Error::PoleEvaluation),
        CurvePoint::Affine(x, _) => Ok(x),
    }
}

/// y_A(P) = y(P - A).
pub fn y_translated<K: Field>(
    e: &WeierstrassCurve<K>,
    a: &CurvePoint<K>,
    p: &CurvePoint<K>,
) -> Result<K::Elem> {
    let shifted = e.add_unchecked(p, &e.neg_point(a));
    match shifted {
        CurvePoint::Infinity => Err(Error::PoleEvaluation),
        CurvePoint::Affine(_, y) => Ok(y),
    }
}
