//! The composite model: base change to F_Q, import/export of F_{q^d}
//! elements, and the recovered q-Frobenius.

use ellbase::*;

#[test]
fn xi_model_f7_d5() {
    // f = 3, so elements live as 5 coordinates over F_343
    let xi = XiModel::build(7, 5, 42).unwrap();
    assert_eq!(xi.plan.f, 3);
    assert_eq!(xi.plan.f_inverse, 2);
    assert_eq!(xi.blowup_factor(), 3);
    assert_eq!(xi.theta.omega.fq.q(), 343);
    assert_eq!(xi.theta.omega.d, 5);

    let small = xi.small_field.clone();
    let oracle = xi.small_oracle().unwrap();
    let mut rng = SplitMix64::new(9);
    for _ in 0..40 {
        let a: Vec<BaseFieldElement> = (0..5).map(|_| small.random(&mut rng)).collect();
        let b: Vec<BaseFieldElement> = (0..5).map(|_| small.random(&mut rng)).collect();
        let ia = xi.import(&a).unwrap();
        let ib = xi.import(&b).unwrap();
        // round trip
        assert_eq!(xi.export(&ia).unwrap(), a);
        // multiplication agrees with the independent F_{q^d} oracle
        let prod = xi.multiply(&ia, &ib);
        let expect = oracle.mul(&a, &b);
        assert_eq!(xi.export(&prod).unwrap(), expect);
        // frobenius_q = q-th power; applied d times it is the identity
        let fr = xi.frobenius_q(&ia);
        assert_eq!(xi.export(&fr).unwrap(), oracle.frobenius(&a));
        let mut cur = ia.clone();
        for _ in 0..5 {
            cur = xi.frobenius_q(&cur);
        }
        assert_eq!(cur.coords, ia.coords);
        // addition is coordinatewise
        let big = &xi.theta.omega.fq;
        let sum = CoordVector::new(
            Basis::Theta,
            ia.coords.iter().zip(&ib.coords).map(|(x, y)| big.add(x, y)).collect(),
        );
        let expect_sum: Vec<BaseFieldElement> =
            a.iter().zip(&b).map(|(x, y)| small.add(x, y)).collect();
        assert_eq!(xi.export(&sum).unwrap(), expect_sum);
    }
}

#[test]
fn xi_model_small_char2() {
    // q = 2, d = 3: f = 5, Q = 32
    let xi = XiModel::build(2, 3, 7).unwrap();
    assert_eq!(xi.plan.f, 5);
    assert_eq!(xi.plan.f_inverse, 2);
    let small = xi.small_field.clone();
    let oracle = xi.small_oracle().unwrap();
    let mut rng = SplitMix64::new(3);
    for _ in 0..30 {
        let a: Vec<BaseFieldElement> = (0..3).map(|_| small.random(&mut rng)).collect();
        let b: Vec<BaseFieldElement> = (0..3).map(|_| small.random(&mut rng)).collect();
        let ia = xi.import(&a).unwrap();
        let ib = xi.import(&b).unwrap();
        let prod = xi.multiply(&ia, &ib);
        assert_eq!(xi.export(&prod).unwrap(), oracle.mul(&a, &b));
        assert_eq!(xi.export(&xi.frobenius_q(&ia)).unwrap(), oracle.frobenius(&a));
    }
}

#[test]
fn xi_model_nonprime_q() {
    // q = 4 = 2^2, d = 3: the F_q -> F_Q embedding is nontrivial
    let xi = XiModel::build(4, 3, 11).unwrap();
    let small = xi.small_field.clone();
    assert_eq!(small.q(), 4);
    let oracle = xi.small_oracle().unwrap();
    let mut rng = SplitMix64::new(1);
    for _ in 0..25 {
        let a: Vec<BaseFieldElement> = (0..3).map(|_| small.random(&mut rng)).collect();
        let b: Vec<BaseFieldElement> = (0..3).map(|_| small.random(&mut rng)).collect();
        let ia = xi.import(&a).unwrap();
        let ib = xi.import(&b).unwrap();
        assert_eq!(xi.export(&ia).unwrap(), a);
        let prod = xi.multiply(&ia, &ib);
        assert_eq!(xi.export(&prod).unwrap(), oracle.mul(&a, &b));
        assert_eq!(xi.export(&xi.frobenius_q(&ia)).unwrap(), oracle.frobenius(&a));
    }
}
