//! Square roots and quadratic equations over any of the crate's fields.

use crate::field::Field;

/// Square root in a field of odd characteristic (Tonelli-Shanks), or the
/// unique root in characteristic 2. Returns None when `a` is a non-residue.
pub fn sqrt<K: Field>(k: &K, a: &K::Elem) -> Option<K::Elem> {
    if k.is_zero(a) {
        return Some(k.zero());
    }
    if k.characteristic() == 2 {
        // squaring is bijective: sqrt(a) = a^(2^(n-1))
        let n = k.degree_over_prime();
        let mut r = a.clone();
        for _ in 0..n.saturating_sub(1) {
            r = k.square(&r);
        }
        debug_assert_eq!(k.square(&r), *a);
        return Some(r);
    }
    // Euler criterion: a^((|K|-1)/2)
    let mut half = k.order();
    half.sub_u64(1);
    half.div2();
    let chi = k.pow_bits(a, &half);
    if !k.is_one(&chi) {
        return None;
    }
    // |K| - 1 = 2^s * t with t odd
    let mut t = k.order();
    t.sub_u64(1);
    let mut s = 0u32;
    while t.is_even() {
        t.div2();
        s += 1;
    }
    if s == 1 {
        // |K| = 3 mod 4: a^((|K|+1)/4)
        let mut e = k.order();
        e.add_u64(1);
        e.div2();
        e.div2();
        return Some(k.pow_bits(a, &e));
    }
    // find a non-residue by deterministic scan
    let z;
    let mut idx = 2u64;
    loop {
        let cand = k.element_from_index(idx);
        idx += 1;
        if k.is_zero(&cand) {
            continue;
        }
        if !k.is_one(&k.pow_bits(&cand, &half)) {
            z = cand;
            break;
        }
    }
    let mut c = k.pow_bits(&z, &t);
    // x = a^((t+1)/2), w = a^t
    let mut e = t.clone();
    e.add_u64(1);
    e.div2();
    let mut x = k.pow_bits(a, &e);
    let mut w = k.pow_bits(a, &t);
    let mut m = s;
    while !k.is_one(&w) {
        // least i with w^(2^i) = 1
        let mut i = 0u32;
        let mut ww = w.clone();
        while !k.is_one(&ww) {
            ww = k.square(&ww);
            i += 1;
        }
        let mut b = c.clone();
        for _ in 0..m - i - 1 {
            b = k.square(&b);
        }
        x = k.mul(&x, &b);
        c = k.square(&b);
        w = k.mul(&w, &c);
        m = i;
    }
    debug_assert_eq!(k.square(&x), *a);
    Some(x)
}

/// Absolute trace to F_2 in characteristic 2, returned as a field element
/// (either 0 or 1).
fn trace2<K: Field>(k: &K, a: &K::Elem) -> K::Elem {
    let n = k.degree_over_prime();
    let mut acc = a.clone();
    let mut cur = a.clone();
    for _ in 1..n {
        cur = k.square(&cur);
        acc = k.add(&acc, &cur);
    }
    acc
}

/// Solve z^2 + z = c in characteristic 2; None if the trace obstruction fails.
fn artin_schreier<K: Field>(k: &K, c: &K::Elem) -> Option<K::Elem> {
    if !k.is_zero(&trace2(k, c)) {
        return None;
    }
    let n = k.degree_over_prime();
    if n % 2 == 1 {
        // half trace
        let mut acc = c.clone();
        let mut cur = c.clone();
        for _ in 0..(n - 1) / 2 {
            cur = k.square(&cur);
            cur = k.square(&cur);
            acc = k.add(&acc, &cur);
        }
        debug_assert_eq!(k.add(&k.square(&acc), &acc), *c);
        return Some(acc);
    }
    // even degree: z = sum_i P_i * theta^(2^i) with P_i the prefix traces
    // and theta any element of absolute trace 1
    let mut theta = k.one();
    let mut idx = 1u64;
    loop {
        if k.is_one(&trace2(k, &theta)) {
            break;
        }
        idx += 1;
        theta = k.element_from_index(idx);
    }
    let mut z = k.zero();
    let mut prefix = k.zero();
    let mut c_pow = c.clone();
    let mut theta_pow = theta.clone();
    for i in 0..n {
        if i > 0 {
            c_pow = k.square(&c_pow);
            theta_pow = k.square(&theta_pow);
        }
        prefix = k.add(&prefix, &c_pow);
        z = k.add(&z, &k.mul(&prefix, &theta_pow));
    }
    debug_assert_eq!(k.add(&k.square(&z), &z), *c);
    Some(z)
}

/// Roots of y^2 + b*y + c = 0 in K, deduplicated (0, 1 or 2 of them).
pub fn quadratic_roots<K: Field>(k: &K, b: &K::Elem, c: &K::Elem) -> Vec<K::Elem> {
    if k.characteristic() == 2 {
        if k.is_zero(b) {
            // y^2 = -c = c
            return vec![sqrt(k, &k.neg(c)).expect("squaring is bijective in char 2")];
        }
        // y = b*z with z^2 + z = c / b^2
        let b2 = k.square(b);
        let rhs = k.mul(c, &k.inv(&b2).expect("b nonzero"));
        return match artin_schreier(k, &rhs) {
            None => vec![],
            Some(z) => {
                let y1 = k.mul(b, &z);
                let y2 = k.add(&y1, b);
                vec![y1, y2]
            }
        };
    }
    // odd characteristic: discriminant b^2 - 4c
    let four_c = k.double(&k.double(c));
    let disc = k.sub(&k.square(b), &four_c);
    let two_inv = k.inv(&k.from_u64(2)).expect("char is odd");
    match sqrt(k, &disc) {
        None => vec![],
        Some(r) if k.is_zero(&r) => {
            vec![k.mul(&k.neg(b), &two_inv)]
        }
        Some(r) => {
            let y1 = k.mul(&k.sub(&r, b), &two_inv);
            let y2 = k.mul(&k.sub(&k.neg(&r), b), &two_inv);
            vec![y1, y2]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;
    use crate::rng::SplitMix64;

    #[test]
    fn f7_quadratics() {
        let k = BaseField::prime_field(7).unwrap();
        // y^2 = 2 has roots {3, 4}: exhaustive check
        let mut brute: Vec<u64> = (0..7).filter(|&y| (y * y) % 7 == 2).collect();
        brute.sort();
        assert_eq!(brute, vec![3, 4]);
        let mut roots: Vec<u64> =
            quadratic_roots(&k, &k.zero(), &k.from_u64(5 /* -2 */)).iter().map(|r| r.0[0]).collect();
        roots.sort();
        assert_eq!(roots, vec![3, 4]);
        // y^2 - 2y + 1 = 0: double root 1
        let roots = quadratic_roots(&k, &k.from_u64(5), &k.from_u64(1));
        assert_eq!(roots, vec![k.from_u64(1)]);
        // y^2 = 3: 3 is a non-residue mod 7 (exhaustive)
        assert!((0..7).all(|y| (y * y) % 7 != 3));
        assert!(quadratic_roots(&k, &k.zero(), &k.from_u64(4 /* -3 */)).is_empty());
    }

    #[test]
    fn random_quadratics_all_chars() {
        for q in [7u64, 32, 81, 9, 25, 64] {
            let k = BaseField::of_order(q).unwrap();
            let mut rng = SplitMix64::new(q + 1);
            for _ in 0..200 {
                let b = k.random(&mut rng);
                let c = k.random(&mut rng);
                let roots = quadratic_roots(&k, &b, &c);
                for y in &roots {
                    let lhs = k.add(&k.add(&k.square(y), &k.mul(&b, y)), &c);
                    assert!(k.is_zero(&lhs), "root check failed q={}", q);
                }
                // cross-check root count by exhaustive search (q small)
                let mut count = 0;
                for i in 0..q {
                    let y = k.element_from_index(i);
                    let lhs = k.add(&k.add(&k.square(&y), &k.mul(&b, &y)), &c);
                    if k.is_zero(&lhs) {
                        count += 1;
                    }
                }
                let expected = match count {
                    0 => 0,
                    1 => 1,
                    2 => 2,
                    _ => panic!("quadratic with {} roots", count),
                };
                assert_eq!(roots.len(), expected, "q={} b={:?} c={:?}", q, b, c);
            }
        }
    }

    #[test]
    fn sqrt_roundtrip_extension() {
        let k = BaseField::of_order(81).unwrap();
        let mut rng = SplitMix64::new(4);
        for _ in 0..200 {
            let a = k.random(&mut rng);
            let sq = k.square(&a);
            let r = sqrt(&k, &sq).expect("square must have a root");
            assert!(r == a || r == k.neg(&a));
        }
    }
}
