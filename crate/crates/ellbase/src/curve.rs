//! General-Weierstrass curves: group law, point counting, torsion
//! search, and the quotient isogeny in explicit rational maps.

use crate::error::{Error, Result};
use crate::field::{BaseField, Field};
use crate::poly::Polynomial;
use crate::rng::SplitMix64;
use crate::solve::quadratic_roots;

/// General Weierstrass curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
#[derive(Debug, Clone)]
pub struct WeierstrassCurve<K: Field> {
    pub field: K,
    pub a1: K::Elem,
    pub a2: K::Elem,
    pub a3: K::Elem,
    pub a4: K::Elem,
    pub a6: K::Elem,
}

impl<K: Field> PartialEq for WeierstrassCurve<K> {
    fn eq(&self, other: &Self) -> bool {
        self.a1 == other.a1
            && self.a2 == other.a2
            && self.a3 == other.a3
            && self.a4 == other.a4
            && self.a6 == other.a6
    }
}

#[derive(Debug, Clone)]
pub enum CurvePoint<K: Field> {
    Infinity,
    Affine(K::Elem, K::Elem),
}

impl<K: Field> PartialEq for CurvePoint<K> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => true,
            (CurvePoint::Affine(x1, y1), CurvePoint::Affine(x2, y2)) => x1 == x2 && y1 == y2,
            _ => false,
        }
    }
}

impl<K: Field> CurvePoint<K> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&K::Elem> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, _) => Some(x),
        }
    }

    pub fn y(&self) -> Option<&K::Elem> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(_, y) => Some(y),
        }
    }
}

impl<K: Field> WeierstrassCurve<K> {
    pub fn new(
        field: K,
        a1: K::Elem,
        a2: K::Elem,
        a3: K::Elem,
        a4: K::Elem,
        a6: K::Elem,
    ) -> Result<Self> {
        let e = WeierstrassCurve { field, a1, a2, a3, a4, a6 };
        if e.field.is_zero(&e.discriminant()) {
            return Err(Error::SingularCurve);
        }
        Ok(e)
    }

    pub fn b_invariants(&self) -> (K::Elem, K::Elem, K::Elem, K::Elem) {
        let k = &self.field;
        let b2 = k.add(&k.square(&self.a1), &k.double(&k.double(&self.a2)));
        let b4 = k.add(&k.double(&self.a4), &k.mul(&self.a1, &self.a3));
        let b6 = k.add(&k.square(&self.a3), &k.double(&k.double(&self.a6)));
        // b8 = a1^2 a6 + 4 a2 a6 - a1 a3 a4 + a2 a3^2 - a4^2
        let t1 = k.mul(&k.square(&self.a1), &self.a6);
        let t2 = k.double(&k.double(&k.mul(&self.a2, &self.a6)));
        let t3 = k.mul(&self.a1, &k.mul(&self.a3, &self.a4));
        let t4 = k.mul(&self.a2, &k.square(&self.a3));
        let t5 = k.square(&self.a4);
        let b8 = k.sub(&k.add(&k.sub(&k.add(&t1, &t2), &t3), &t4), &t5);
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> K::Elem {
        let k = &self.field;
        let (b2, b4, b6, b8) = self.b_invariants();
        // -b2^2 b8 - 8 b4^3 + 9 b2 b4 b6 - 27 b6^2
        let t1 = k.mul(&k.square(&b2), &b8);
        let b4cube = k.mul(&k.square(&b4), &b4);
        let t2 = k.mul(&k.from_u64(8), &b4cube);
        let t3 = k.mul(&k.from_u64(27), &k.square(&b6));
        let t4 = k.mul(&k.from_u64(9), &k.mul(&b2, &k.mul(&b4, &b6)));
        k.add(&k.sub(&k.sub(&k.neg(&t1), &t2), &t3), &t4)
    }

    /// x^3 + a2 x^2 + a4 x + a6
    pub fn rhs(&self, x: &K::Elem) -> K::Elem {
        let k = &self.field;
        let x2 = k.square(x);
        let x3 = k.mul(&x2, x);
        let mut r = k.add(&x3, &k.mul(&self.a2, &x2));
        r = k.add(&r, &k.mul(&self.a4, x));
        k.add(&r, &self.a6)
    }

    pub fn contains(&self, p: &CurvePoint<K>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine(x, y) => {
                let k = &self.field;
                let lhs = k.add(
                    &k.square(y),
                    &k.add(&k.mul(&self.a1, &k.mul(x, y)), &k.mul(&self.a3, y)),
                );
                lhs == self.rhs(x)
            }
        }
    }

    fn check_on_curve(&self, p: &CurvePoint<K>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn neg_point(&self, p: &CurvePoint<K>) -> CurvePoint<K> {
        let k = &self.field;
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => {
                // (x, -y - a1 x - a3)
                let ny = k.sub(&k.sub(&k.neg(y), &k.mul(&self.a1, x)), &self.a3);
                CurvePoint::Affine(x.clone(), ny)
            }
        }
    }

    pub fn add_points(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        self.check_on_curve(p)?;
        self.check_on_curve(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn add_unchecked(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> CurvePoint<K> {
        let k = &self.field;
        let (x1, y1) = match p {
            CurvePoint::Infinity => return q.clone(),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            CurvePoint::Infinity => return p.clone(),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let lambda = if x1 == x2 {
            if *q == self.neg_point(p) {
                return CurvePoint::Infinity;
            }
            // tangent: (3x^2 + 2 a2 x + a4 - a1 y) / (2y + a1 x + a3)
            let num = {
                let t = k.mul(&k.from_u64(3), &k.square(x1));
                let t = k.add(&t, &k.double(&k.mul(&self.a2, x1)));
                let t = k.add(&t, &self.a4);
                k.sub(&t, &k.mul(&self.a1, y1))
            };
            let den = k.add(&k.add(&k.double(y1), &k.mul(&self.a1, x1)), &self.a3);
            k.mul(&num, &k.inv(&den).expect("2-torsion handled above"))
        } else {
            let num = k.sub(y2, y1);
            let den = k.sub(x2, x1);
            k.mul(&num, &k.inv(&den).expect("x1 != x2"))
        };
        // x3 = lambda^2 + a1 lambda - a2 - x1 - x2
        let x3 = {
            let t = k.add(&k.square(&lambda), &k.mul(&self.a1, &lambda));
            k.sub(&k.sub(&k.sub(&t, &self.a2), x1), x2)
        };
        // y3 = lambda (x1 - x3) - y1 - a1 x3 - a3
        let y3 = {
            let t = k.mul(&lambda, &k.sub(x1, &x3));
            k.sub(&k.sub(&k.sub(&t, y1), &k.mul(&self.a1, &x3)), &self.a3)
        };
        CurvePoint::Affine(x3, y3)
    }

    pub fn sub_points(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        self.add_points(p, &self.neg_point(q))
    }

    pub fn scalar_mul(&self, p: &CurvePoint<K>, n: i128) -> Result<CurvePoint<K>> {
        self.check_on_curve(p)?;
        Ok(self.scalar_mul_unchecked(p, n))
    }

    pub fn scalar_mul_unchecked(&self, p: &CurvePoint<K>, n: i128) -> CurvePoint<K> {
        let (mut n, mut base) = if n < 0 {
            (n.unsigned_abs(), self.neg_point(p))
        } else {
            (n as u128, p.clone())
        };
        let mut acc = CurvePoint::Infinity;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Points with the given x-coordinate.
    pub fn lift_x(&self, x: &K::Elem) -> Vec<CurvePoint<K>> {
        let k = &self.field;
        // y^2 + (a1 x + a3) y - rhs(x) = 0
        let b = k.add(&k.mul(&self.a1, x), &self.a3);
        let c = k.neg(&self.rhs(x));
        quadratic_roots(k, &b, &c)
            .into_iter()
            .map(|y| CurvePoint::Affine(x.clone(), y))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Point counting and torsion search over F_q
// ---------------------------------------------------------------------------

pub const ORDER_BOUND: u64 = 1 << 32;
const ENUMERATION_BOUND: u64 = 1 << 16;

pub type Curve = WeierstrassCurve<BaseField>;
pub type Point = CurvePoint<BaseField>;

impl WeierstrassCurve<BaseField> {
    /// #E(F_q): exhaustive x-scan with quadratic character counting for small
    /// q, baby-step giant-step in the Hasse interval above that.
    pub fn group_order(&self) -> Result<u64> {
        let q = self.field.q();
        if q > ORDER_BOUND {
            return Err(Error::BoundExceeded { q, bound: ORDER_BOUND });
        }
        if q <= ENUMERATION_BOUND {
            return Ok(self.group_order_enumerate());
        }
        self.group_order_bsgs()
    }

    fn group_order_enumerate(&self) -> u64 {
        let k = &self.field;
        let q = k.q();
        let mut count = 1u64; // infinity
        for i in 0..q {
            let x = k.element_from_index(i);
            count += self.lift_x(&x).len() as u64;
        }
        count
    }

    fn group_order_bsgs(&self) -> Result<u64> {
        let q = self.field.q();
        let sq = (q as f64).sqrt() as u64 + 1;
        let lo = q + 1 - 2 * sq;
        let width = 4 * sq + 1;
        let mut rng = SplitMix64::new(q ^ 0x9e37);
        let mut l = 1u64; // lcm of point orders found so far
        for _ in 0..64 {
            let p = self.random_point(&mut rng);
            let ord = self.point_order_in_interval(&p, lo, width)?;
            l = lcm(l, ord);
            // multiples of l in [lo, lo+width)
            let first = lo.div_ceil(l) * l;
            if first >= lo + width {
                return Err(Error::SearchExhausted("bsgs: no multiple in Hasse interval"));
            }
            if first + l >= lo + width {
                return Ok(first);
            }
        }
        Err(Error::SearchExhausted("bsgs"))
    }

    /// Exact order of P, using that it divides some value in [lo, lo+width).
    fn point_order_in_interval(&self, p: &Point, lo: u64, width: u64) -> Result<u64> {
        // find all n in the interval with nP = O via baby-step giant-step:
        // n = lo + i*m + j, 0 <= j < m
        let m = (width as f64).sqrt() as u64 + 1;
        let mut babies = std::collections::HashMap::new();
        let mut jp = CurvePoint::Infinity;
        for j in 0..m {
            if let CurvePoint::Affine(x, y) = &jp {
                babies.entry((format!("{:?}", x), format!("{:?}", y))).or_insert(j);
            } else {
                babies.entry(("inf".into(), "inf".into())).or_insert(j);
            }
            jp = self.add_unchecked(&jp, p);
        }
        let base = self.scalar_mul_unchecked(p, lo as i128);
        let step = self.neg_point(&self.scalar_mul_unchecked(p, m as i128));
        let mut giant = base;
        let mut kills = vec![];
        let imax = width / m + 1;
        for i in 0..=imax {
            let key = match &giant {
                CurvePoint::Infinity => ("inf".into(), "inf".into()),
                CurvePoint::Affine(x, y) => (format!("{:?}", x), format!("{:?}", y)),
            };
            if let Some(&j) = babies.get(&key) {
                // base + i*step = jP means (lo + i*m - ... ) careful: giant = (lo - i*m)P?
                // giant_i = (lo)P - i*(mP), equality giant_i = jP gives (lo - i*m - j)P = O
                // we instead want lo + i*m + j: use the mirrored candidate below
                let n = lo as i128 - (i as i128) * (m as i128) - j as i128;
                if n > 0 {
                    kills.push(n as u64);
                }
                let n2 = lo as i128 - (i as i128) * (m as i128) + j as i128;
                if n2 > 0 {
                    kills.push(n2 as u64);
                }
            }
            giant = self.add_unchecked(&giant, &step);
        }
        // also scan upward from lo with positive steps
        let pos_step = self.scalar_mul_unchecked(p, m as i128);
        let mut giant = self.scalar_mul_unchecked(p, lo as i128);
        for i in 0..=imax {
            let key = match &giant {
                CurvePoint::Infinity => ("inf".into(), "inf".into()),
                CurvePoint::Affine(x, y) => (format!("{:?}", x), format!("{:?}", y)),
            };
            if let Some(&j) = babies.get(&key) {
                // (lo + i*m)P = jP => (lo + i*m - j)P = O
                let n = lo as i128 + (i as i128) * (m as i128) - j as i128;
                if n > 0 {
                    kills.push(n as u64);
                }
            }
            giant = self.add_unchecked(&giant, &pos_step);
        }
        let mut candidates: Vec<u64> = kills
            .into_iter()
            .filter(|&n| self.scalar_mul_unchecked(p, n as i128).is_infinity())
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        let n0 = *candidates.first().ok_or(Error::SearchExhausted("bsgs kills"))?;
        Ok(self.exact_order_dividing(p, n0))
    }

    /// Given nP = O, strip prime factors to get the exact order of P.
    pub fn exact_order_dividing(&self, p: &Point, n: u64) -> u64 {
        let mut ord = n;
        for (l, _) in factorize(n) {
            while ord % l == 0 && self.scalar_mul_unchecked(p, (ord / l) as i128).is_infinity() {
                ord /= l;
            }
        }
        ord
    }

    pub fn random_point(&self, rng: &mut SplitMix64) -> Point {
        let k = &self.field;
        loop {
            let x = k.random(rng);
            let pts = self.lift_x(&x);
            if pts.is_empty() {
                continue;
            }
            let pick = rng.below(pts.len() as u64) as usize;
            return pts[pick].clone();
        }
    }

    /// A point of exact order n, by random sampling. The sampled point's
    /// exact order is computed first, so non-cyclic group structures work.
    pub fn find_point_of_order(&self, n: u64, rng: &mut SplitMix64) -> Result<Point> {
        if n == 0 {
            return Err(Error::NoSuchPoint { order: 0 });
        }
        if n == 1 {
            return Ok(CurvePoint::Infinity);
        }
        let m = self.group_order()?;
        if m % n != 0 {
            return Err(Error::NoSuchPoint { order: n });
        }
        let n_factors = factorize(n);
        for _ in 0..1024 {
            let p = self.random_point(rng);
            let ord = self.exact_order_dividing(&p, m);
            if ord % n != 0 {
                continue;
            }
            let q = self.scalar_mul_unchecked(&p, (ord / n) as i128);
            debug_assert!(self.scalar_mul_unchecked(&q, n as i128).is_infinity());
            debug_assert!(n_factors
                .iter()
                .all(|&(l, _)| !self.scalar_mul_unchecked(&q, (n / l) as i128).is_infinity()));
            return Ok(q);
        }
        Err(Error::NoSuchPoint { order: n })
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = vec![];
    let mut l = 2;
    while l * l <= n {
        if n % l == 0 {
            let mut e = 0;
            while n % l == 0 {
                n /= l;
                e += 1;
            }
            out.push((l, e));
        }
        l += 1 + (l & 1); // 2, 3, 5, 7, ...
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

// ---------------------------------------------------------------------------
// Velu's quotient isogeny
// ---------------------------------------------------------------------------

/// The quotient isogeny `I: E -> E/<t>` as explicit rational maps.
///
/// x-map is x_num/x_den; y-map is (y_num1(x) * y + y_num0(x)) / y_den(x).
#[derive(Debug, Clone)]
pub struct Isogeny<K: Field> {
    pub domain: WeierstrassCurve<K>,
    pub codomain: WeierstrassCurve<K>,
    pub degree: usize,
    pub x_num: Polynomial<K>,
    pub x_den: Polynomial<K>,
    pub y_num1: Polynomial<K>,
    pub y_num0: Polynomial<K>,
    pub y_den: Polynomial<K>,
}

impl<K: Field> Isogeny<K> {
    pub fn eval(&self, p: &CurvePoint<K>) -> Result<CurvePoint<K>> {
        if !self.domain.contains(p) {
            return Err(Error::PointNotOnCurve);
        }
        let k = &self.domain.field;
        let (x, y) = match p {
            CurvePoint::Infinity => return Ok(CurvePoint::Infinity),
            CurvePoint::Affine(x, y) => (x, y),
        };
        let den = self.x_den.eval(k, x);
        if k.is_zero(&den) {
            // kernel point
            return Ok(CurvePoint::Infinity);
        }
        let xx = k.mul(&self.x_num.eval(k, x), &k.inv(&den)?);
        let ydn = self.y_den.eval(k, x);
        let ynum = k.add(&k.mul(&self.y_num1.eval(k, x), y), &self.y_num0.eval(k, x));
        let yy = k.mul(&ynum, &k.inv(&ydn)?);
        Ok(CurvePoint::Affine(xx, yy))
    }
}

/// Velu's formulas for the cyclic kernel generated by `t` of exact order d.
pub fn velu_isogeny<K: Field>(
    e: &WeierstrassCurve<K>,
    t: &CurvePoint<K>,
    d: usize,
) -> Result<Isogeny<K>> {
    let k = e.field.clone();
    if d < 2 || !e.contains(t) {
        return Err(if e.contains(t) { Error::KernelNotCyclic } else { Error::PointNotOnCurve });
    }
    // kernel multiples kt, k = 1..d-1
    let mut multiples = Vec::with_capacity(d - 1);
    let mut cur = t.clone();
    for _ in 1..d {
        if cur.is_infinity() {
            return Err(Error::KernelNotCyclic);
        }
        multiples.push(cur.clone());
        cur = e.add_unchecked(&cur, t);
    }
    if !cur.is_infinity() {
        return Err(Error::KernelNotCyclic);
    }

    // representatives S: one of {Q, -Q} per pair, plus any 2-torsion point
    let half = (d - 1) / 2;
    let mut reps: Vec<(CurvePoint<K>, bool)> = (0..half)
        .map(|i| (multiples[i].clone(), false))
        .collect();
    if d % 2 == 0 {
        reps.push((multiples[d / 2 - 1].clone(), true));
    }

    let mut t_sum = k.zero();
    let mut w_sum = k.zero();
    struct Term<E> {
        xq: E,
        yq: E,
        tq: E,
        uq: E,
        gx: E,
        gy: E,
        two_torsion: bool,
    }
    let mut terms: Vec<Term<K::Elem>> = vec![];
    for (q, is2) in &reps {
        let (xq, yq) = match q {
            CurvePoint::Affine(x, y) => (x.clone(), y.clone()),
            CurvePoint::Infinity => return Err(Error::KernelNotCyclic),
        };
        let gx = {
            let t1 = k.mul(&k.from_u64(3), &k.square(&xq));
            let t2 = k.double(&k.mul(&e.a2, &xq));
            let t3 = k.sub(&k.add(&k.add(&t1, &t2), &e.a4), &k.mul(&e.a1, &yq));
            t3
        };
        let gy = k.sub(&k.sub(&k.neg(&k.double(&yq)), &k.mul(&e.a1, &xq)), &e.a3);
        let tq = if *is2 {
            gx.clone()
        } else {
            k.sub(&k.double(&gx), &k.mul(&e.a1, &gy))
        };
        let uq = k.square(&gy);
        t_sum = k.add(&t_sum, &tq);
        w_sum = k.add(&w_sum, &k.add(&uq, &k.mul(&xq, &tq)));
        terms.push(Term { xq, yq, tq, uq, gx, gy, two_torsion: *is2 });
    }

    let (b2, _, _, _) = e.b_invariants();
    let a4p = k.sub(&e.a4, &k.mul(&k.from_u64(5), &t_sum));
    let a6p = {
        let t1 = k.mul(&b2, &t_sum);
        let t2 = k.mul(&k.from_u64(7), &w_sum);
        k.sub(&k.sub(&e.a6, &t1), &t2)
    };
    let codomain = WeierstrassCurve::new(
        k.clone(),
        e.a1.clone(),
        e.a2.clone(),
        e.a3.clone(),
        a4p,
        a6p,
    )?;

    // x-map denominator: prod (x - xq)^(2 or 1); y-map denominator: ^(3 or 2)
    let mut x_den = Polynomial::one(&k);
    let mut y_den = Polynomial::one(&k);
    for t in &terms {
        let lin = Polynomial::x_minus(&k, &t.xq);
        let sq = lin.mul(&k, &lin);
        if t.two_torsion {
            x_den = x_den.mul(&k, &lin);
            y_den = y_den.mul(&k, &sq);
        } else {
            x_den = x_den.mul(&k, &sq);
            y_den = y_den.mul(&k, &sq.mul(&k, &lin));
        }
    }

    // X = x + sum tq/(x-xq) + uq/(x-xq)^2
    let mut x_num = Polynomial::x(&k).mul(&k, &x_den);
    for t in &terms {
        let lin = Polynomial::x_minus(&k, &t.xq);
        let e1 = if t.two_torsion { 1 } else { 2 };
        let den_over_1 = x_den.div_exact(&k, &lin)?;
        x_num = x_num.add(&k, &den_over_1.scale(&k, &t.tq));
        if e1 == 2 {
            let den_over_2 = den_over_1.div_exact(&k, &lin)?;
            x_num = x_num.add(&k, &den_over_2.scale(&k, &t.uq));
        }
    }

    // Y = y - sum [ uq(2y + a1 x + a3)/(x-xq)^3
    //             + tq(a1(x-xq) + (y-yq))/(x-xq)^2
    //             + (a1 uq - gx gy)/(x-xq)^2 ]
    let mut y_num1 = y_den.clone();
    let mut y_num0 = Polynomial::zero();
    let a1x_a3 = Polynomial::from_coeffs(&k, vec![e.a3.clone(), e.a1.clone()]);
    for t in &terms {
        let lin = Polynomial::x_minus(&k, &t.xq);
        let d1 = y_den.div_exact(&k, &lin)?; // y_den/(x-xq)
        let d2 = d1.div_exact(&k, &lin)?; // y_den/(x-xq)^2
        if !t.two_torsion {
            let d3 = d2.div_exact(&k, &lin)?; // y_den/(x-xq)^3
            // y part: 2 uq /(x-xq)^3
            y_num1 = y_num1.sub(&k, &d3.scale(&k, &k.double(&t.uq)));
            // y-free: uq (a1 x + a3)/(x-xq)^3
            y_num0 = y_num0.sub(&k, &d3.mul(&k, &a1x_a3).scale(&k, &t.uq));
            // gx*gy - a1*uq correction at ^2
            let c = k.sub(&k.mul(&e.a1, &t.uq), &k.mul(&t.gx, &t.gy));
            y_num0 = y_num0.sub(&k, &d2.scale(&k, &c));
        } else {
            let c = k.sub(&k.mul(&e.a1, &t.uq), &k.mul(&t.gx, &t.gy));
            y_num0 = y_num0.sub(&k, &d2.scale(&k, &c));
        }
        // tq terms: y part tq/(x-xq)^2, free part tq*a1/(x-xq) - tq yq/(x-xq)^2
        y_num1 = y_num1.sub(&k, &d2.scale(&k, &t.tq));
        y_num0 = y_num0.sub(&k, &d1.scale(&k, &k.mul(&t.tq, &e.a1)));
        y_num0 = y_num0.add(&k, &d2.scale(&k, &k.mul(&t.tq, &t.yq)));
    }

    let iso = Isogeny {
        domain: e.clone(),
        codomain,
        degree: d,
        x_num,
        x_den,
        y_num1,
        y_num0,
        y_den,
    };
    Ok(iso)
}

/// Map a handful of random points and check the codomain equation plus
/// additivity; builders call this after velu_isogeny.
pub fn spot_check_isogeny(
    iso: &Isogeny<BaseField>,
    rng: &mut SplitMix64,
    trials: usize,
) -> Result<()> {
    for _ in 0..trials {
        let p = iso.domain.random_point(rng);
        let q = iso.domain.random_point(rng);
        let ip = iso.eval(&p)?;
        let iq = iso.eval(&q)?;
        if !iso.codomain.contains(&ip) || !iso.codomain.contains(&iq) {
            return Err(Error::PointNotOnCurve);
        }
        let sum = iso.domain.add_unchecked(&p, &q);
        let isum = iso.eval(&sum)?;
        if isum != iso.codomain.add_unchecked(&ip, &iq) {
            return Err(Error::KernelNotCyclic);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// the running example: y^2 + xy + 5y = x^3 + 3x^2 + 3x + 2 over F_7
    pub fn example_curve() -> Curve {
        let k = BaseField::prime_field(7).unwrap();
        WeierstrassCurve::new(
            k.clone(),
            k.from_u64(1),
            k.from_u64(3),
            k.from_u64(5),
            k.from_u64(3),
            k.from_u64(2),
        )
        .unwrap()
    }

    fn pt(k: &BaseField, x: u64, y: u64) -> Point {
        CurvePoint::Affine(k.from_u64(x), k.from_u64(y))
    }

    #[test]
    fn group_law_example_values() {
        let e = example_curve();
        let k = e.field.clone();
        let t = pt(&k, 3, 1);
        assert!(e.contains(&t));
        // neg((3,1)) = (3, 5): -1 - 3 - 5 = -9 = 5 mod 7
        assert_eq!(e.neg_point(&t), pt(&k, 3, 5));
        // P + O = P
        assert_eq!(e.add_points(&t, &CurvePoint::Infinity).unwrap(), t);
        // 2t = (4,0) by the doubling formula
        assert_eq!(e.scalar_mul(&t, 2).unwrap(), pt(&k, 4, 0));
        // 5t = O
        assert!(e.scalar_mul(&t, 5).unwrap().is_infinity());
        // 0*P = O
        assert!(e.scalar_mul(&t, 0).unwrap().is_infinity());
        // order 10, R = (1,2) has order 10
        assert_eq!(e.group_order().unwrap(), 10);
        let r = pt(&k, 1, 2);
        assert!(e.scalar_mul(&r, 10).unwrap().is_infinity());
        assert!(!e.scalar_mul(&r, 5).unwrap().is_infinity());
        assert!(!e.scalar_mul(&r, 2).unwrap().is_infinity());
    }

    #[test]
    fn group_law_properties() {
        for q in [7u64, 32, 81] {
            let k = BaseField::of_order(q).unwrap();
            let mut rng = SplitMix64::new(q * 31 + 5);
            // find a nonsingular curve
            let e = loop {
                let c = WeierstrassCurve::new(
                    k.clone(),
                    k.random(&mut rng),
                    k.random(&mut rng),
                    k.random(&mut rng),
                    k.random(&mut rng),
                    k.random(&mut rng),
                );
                if let Ok(c) = c {
                    break c;
                }
            };
            for _ in 0..500 {
                let p = e.random_point(&mut rng);
                let q2 = e.random_point(&mut rng);
                let r = e.random_point(&mut rng);
                let lhs = e.add_unchecked(&e.add_unchecked(&p, &q2), &r);
                let rhs = e.add_unchecked(&p, &e.add_unchecked(&q2, &r));
                assert_eq!(lhs, rhs, "associativity over F_{}", q);
                assert_eq!(e.add_unchecked(&p, &q2), e.add_unchecked(&q2, &p));
                assert_eq!(e.neg_point(&e.neg_point(&p)), p);
                assert!(e.add_unchecked(&p, &e.neg_point(&p)).is_infinity());
            }
        }
    }

    #[test]
    fn order_in_hasse_and_kills_points() {
        for q in [7u64, 32, 81, 1009] {
            let k = BaseField::of_order(q).unwrap();
            let mut rng = SplitMix64::new(q + 99);
            let e = loop {
                let c = WeierstrassCurve::new(
                    k.clone(),
                    k.random(&mut rng),
                    k.random(&mut rng),
                    k.random(&mut rng),
                    k.random(&mut rng),
                    k.random(&mut rng),
                );
                if let Ok(c) = c {
                    break c;
                }
            };
            let m = e.group_order().unwrap();
            let sq = (q as f64).sqrt();
            assert!((m as f64 - q as f64 - 1.0).abs() <= 2.0 * sq + 1e-9);
            for _ in 0..20 {
                let p = e.random_point(&mut rng);
                assert!(e.scalar_mul_unchecked(&p, m as i128).is_infinity());
            }
        }
    }

    #[test]
    fn bsgs_matches_enumeration() {
        // force the BSGS path on curves whose order we can also enumerate
        for (q, cases) in [(1009u64, 5usize), (65537, 2), (100003, 1)] {
            let k = BaseField::prime_field(q).unwrap();
            let mut rng = SplitMix64::new(77 + q);
            for _ in 0..cases {
                let e = loop {
                    let c = WeierstrassCurve::new(
                        k.clone(),
                        k.random(&mut rng),
                        k.random(&mut rng),
                        k.random(&mut rng),
                        k.random(&mut rng),
                        k.random(&mut rng),
                    );
                    if let Ok(c) = c {
                        break c;
                    }
                };
                assert_eq!(e.group_order_bsgs().unwrap(), e.group_order_enumerate(), "q={}", q);
            }
        }
    }

    #[test]
    fn enumeration_char3_curve() {
        // y^2 = x^3 + x over F_3: count by hand: x=0 -> y=0; x=1 -> y^2=2 (no);
        // x=2 -> y^2 = 8+2 = 10 = 1 -> y=1,2. So 1 + 1 + 2 = 4 points.
        let k = BaseField::prime_field(3).unwrap();
        let e = WeierstrassCurve::new(
            k.clone(),
            k.zero(),
            k.zero(),
            k.zero(),
            k.from_u64(1),
            k.zero(),
        )
        .unwrap();
        assert_eq!(e.group_order().unwrap(), 4);
    }

    #[test]
    fn find_points_of_requested_order() {
        let e = example_curve();
        let mut rng = SplitMix64::new(1);
        for n in [1u64, 2, 5, 10] {
            let p = e.find_point_of_order(n, &mut rng).unwrap();
            assert_eq!(e.exact_order_dividing(&p, n), n);
        }
        assert!(matches!(
            e.find_point_of_order(3, &mut rng),
            Err(Error::NoSuchPoint { order: 3 })
        ));
    }

    #[test]
    fn velu_reference_quotient() {
        let e = example_curve();
        let k = e.field.clone();
        let t = pt(&k, 3, 1);
        let iso = velu_isogeny(&e, &t, 5).unwrap();
        // reference codomain y^2 + xy + 5y = x^3 + 3x^2 + 4x + 6
        assert_eq!(iso.codomain.a4, k.from_u64(4));
        assert_eq!(iso.codomain.a6, k.from_u64(6));
        // x-map (x^5 + 2x^2 + 5x + 6)/(x^4 + 3x^2 + 4)
        let xn: Vec<u64> = iso.x_num.coeffs.iter().map(|c| c.0[0]).collect();
        let xd: Vec<u64> = iso.x_den.coeffs.iter().map(|c| c.0[0]).collect();
        assert_eq!(xn, vec![6, 5, 2, 0, 0, 1]);
        assert_eq!(xd, vec![4, 0, 3, 0, 1]);
        // y-map ((x^6+4x^4+3x^3+6x^2+3x+4) y + 3x^5+x^4+x^3+3x^2+4x+1)/(x^6+x^4+5x^2+6)
        let y1: Vec<u64> = iso.y_num1.coeffs.iter().map(|c| c.0[0]).collect();
        let y0: Vec<u64> = iso.y_num0.coeffs.iter().map(|c| c.0[0]).collect();
        let yd: Vec<u64> = iso.y_den.coeffs.iter().map(|c| c.0[0]).collect();
        assert_eq!(y1, vec![4, 3, 6, 3, 4, 0, 1]);
        assert_eq!(y0, vec![1, 4, 3, 1, 1, 3]);
        assert_eq!(yd, vec![6, 0, 5, 0, 1, 0, 1]);
        // degree shape: numerator degree d, denominator degree d-1
        assert_eq!(iso.x_num.degree(), Some(5));
        assert_eq!(iso.x_den.degree(), Some(4));
        // kernel is exactly the multiples of t
        assert!(iso.eval(&CurvePoint::Infinity).unwrap().is_infinity());
        let mut kt = t.clone();
        for _ in 1..5 {
            assert!(iso.eval(&kt).unwrap().is_infinity());
            kt = e.add_unchecked(&kt, &t);
        }
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let p = e.random_point(&mut rng);
            let in_kernel = e.scalar_mul_unchecked(&p, 5).is_infinity();
            assert_eq!(iso.eval(&p).unwrap().is_infinity(), in_kernel);
        }
        spot_check_isogeny(&iso, &mut rng, 10).unwrap();
        // isogenous curves share their order
        assert_eq!(iso.codomain.group_order().unwrap(), 10);
    }

    #[test]
    fn velu_even_degree_kernel() {
        // kernels containing a 2-torsion element: d = 2 and d = 10
        let e = example_curve();
        let mut rng = SplitMix64::new(8);
        let two = e.find_point_of_order(2, &mut rng).unwrap();
        assert!(e.scalar_mul(&two, 2).unwrap().is_infinity());
        let iso = velu_isogeny(&e, &two, 2).unwrap();
        spot_check_isogeny(&iso, &mut rng, 10).unwrap();
        assert_eq!(iso.codomain.group_order().unwrap(), 10);
        let ten = e.find_point_of_order(10, &mut rng).unwrap();
        let iso10 = velu_isogeny(&e, &ten, 10).unwrap();
        spot_check_isogeny(&iso10, &mut rng, 10).unwrap();
        assert_eq!(iso10.codomain.group_order().unwrap(), 10);
    }
}
