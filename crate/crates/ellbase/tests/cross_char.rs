//! Oracle equivalence and exact operation counts across characteristics,
//! degrees, and curve models.

use ellbase::counters::{frobenius_formulas, mult_formulas};
use ellbase::*;

fn check_context(ctx: &OmegaContext, trials: usize, seed: u64) {
    let k = &ctx.fq;
    let d = ctx.d;
    let mut rng = SplitMix64::new(seed);
    let shape = ctx.a1_shape();
    let a3nz = ctx.a3_nonzero();
    // frobenius charged counts
    let (fadds, fmults) = frobenius_formulas::charged(d as u64, shape);
    // multiply charged counts
    let expected = mult_formulas::expected(d as u64, shape, a3nz);
    for _ in 0..trials {
        let va = ctx.random_vector(Basis::Omega, &mut rng);
        let vb = ctx.random_vector(Basis::Omega, &mut rng);
        let (prod, tally) = ctx.multiply(&va, &vb);
        assert_eq!(
            prod.coords,
            ctx.oracle_multiply(&va, &vb).coords,
            "multiply oracle mismatch q={} d={}",
            k.q(),
            d
        );
        assert_eq!(
            (tally.adds, tally.a1_adds, tally.a3_adds, tally.mults, tally.a1_mults, tally.invs),
            (
                expected.adds,
                expected.a1_adds,
                expected.a3_adds,
                expected.mults,
                expected.a1_mults,
                expected.invs
            ),
            "multiply counters q={} d={} shape={:?}",
            k.q(),
            d,
            shape
        );
        let (fwd, ftally) = ctx.frobenius(&va);
        assert_eq!(fwd.coords, ctx.oracle_frobenius(&va).coords);
        assert_eq!(
            (ftally.total_adds(), ftally.total_mults()),
            (fadds, fmults),
            "frobenius counters q={} d={}",
            k.q(),
            d
        );
        let (back, _) = ctx.frobenius_inverse(&fwd);
        assert_eq!(back.coords, va.coords);
        // distributivity
        let vc = ctx.random_vector(Basis::Omega, &mut rng);
        let sum = CoordVector::new(
            Basis::Omega,
            vb.coords.iter().zip(&vc.coords).map(|(x, y)| k.add(x, y)).collect(),
        );
        let (lhs, _) = ctx.multiply(&va, &sum);
        let (p1, _) = ctx.multiply(&va, &vb);
        let (p2, _) = ctx.multiply(&va, &vc);
        let rhs: Vec<_> = p1.coords.iter().zip(&p2.coords).map(|(x, y)| k.add(x, y)).collect();
        assert_eq!(lhs.coords, rhs);
    }
}

#[test]
fn counters_and_oracle_across_models_and_degrees() {
    // q = 1009 (char > 3), q = 81 (char 3), q = 32 (char 2); the smallest
    // degrees exercise the algorithm without any fundamental-domain orbit
    let cases: &[(u64, &[usize])] = &[
        (1009, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13]),
        (81, &[4, 5, 6, 7, 8, 9, 10, 11, 13]),
        (32, &[4, 5, 6, 7, 9, 11, 12, 13]),
    ];
    let mut built = 0;
    for &(q, ds) in cases {
        let k = BaseField::of_order(q).unwrap();
        for &d in ds {
            for model in CurveModel::applicable(k.p()) {
                let mut rng = SplitMix64::new(q * 1000 + d as u64);
                match model.find_context(&k, d, &mut rng) {
                    Ok(ctx) => {
                        assert_eq!(ctx.a1_shape(), model.a1_shape(), "q={} d={} {}", q, d, model.name());
                        assert_eq!(ctx.a3_nonzero(), model.a3_nonzero());
                        check_context(&ctx, 6, q + d as u64);
                        built += 1;
                    }
                    Err(Error::SearchExhausted(_)) | Err(Error::NoSuchPoint { .. }) => {
                        // no curve of this shape carries order-d torsion here
                        continue;
                    }
                    Err(e) => panic!("q={} d={} model {}: {:?}", q, d, model.name(), e),
                }
            }
        }
    }
    assert!(built >= 30, "only {} contexts built", built);
}

#[test]
fn general_model_closed_forms() {
    // Lemma-style totals on true general curves (a1 not in {0,1}, a3 != 0)
    let k = BaseField::prime_field(1009).unwrap();
    for d in 4..=13usize {
        let mut rng = SplitMix64::new(d as u64 * 77 + 1);
        let ctx = CurveModel::General.find_context(&k, d, &mut rng).unwrap();
        let va = ctx.random_vector(Basis::Omega, &mut rng);
        let vb = ctx.random_vector(Basis::Omega, &mut rng);
        let (_, tally) = ctx.multiply(&va, &vb);
        let (adds, mults, invs) = mult_formulas::general_model(d as u64);
        assert_eq!(tally.total_adds(), adds, "adds at d={}", d);
        assert_eq!(tally.total_mults(), mults, "mults at d={}", d);
        assert_eq!(tally.invs, invs, "invs at d={}", d);
        let (_, ftally) = ctx.frobenius(&va);
        assert_eq!(ftally.total_adds(), 2 * d as u64 - 3);
        assert_eq!(ftally.total_mults(), d as u64 - 1);
        let (_, fitally) = ctx.frobenius_inverse(&va);
        assert_eq!(fitally.total_adds(), 2 * d as u64 - 3);
        assert_eq!(fitally.total_mults(), d as u64 - 1);
    }
}

#[test]
fn theta_and_psi_across_characteristics() {
    let cases: &[(u64, usize, u64)] = &[(1009, 5, 3), (1009, 7, 4), (81, 5, 9), (32, 7, 2), (23, 11, 5), (49, 9, 8)];
    for &(q, d, seed) in cases {
        let k = BaseField::of_order(q).unwrap();
        let mut rng = SplitMix64::new(seed);
        let model = CurveModel::applicable(k.p())[0];
        let ctx = match model.find_context(&k, d, &mut rng) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let th = match ThetaContext::build(ctx, None, seed) {
            Ok(t) => t,
            Err(e) => panic!("theta build q={} d={}: {:?}", q, d, e),
        };
        let kf = th.fq().clone();
        // normalization holds
        let acdb = kf.add(
            &kf.mul(&th.frak_a, &th.frak_c),
            &kf.mul(&kf.from_u64(d as u64), &th.frak_b),
        );
        assert_eq!(acdb, kf.one(), "a c + d b = 1 at q={} d={}", q, d);
        let mut rng2 = SplitMix64::new(seed + 1);
        for _ in 0..40 {
            let va = th.omega.random_vector(Basis::Theta, &mut rng2);
            let vb = th.omega.random_vector(Basis::Theta, &mut rng2);
            let (prod, tally) = th.multiply(&va, &vb);
            assert_eq!(tally.convolutions, 5);
            let oracle = th.omega.ell.mul(&th.to_field_element(&va), &th.to_field_element(&vb));
            assert_eq!(th.to_field_element(&prod), oracle, "theta mult q={} d={}", q, d);
            // identity element
            let one = CoordVector::new(Basis::Theta, th.one_vector.clone());
            let (pid, _) = th.multiply(&va, &one);
            assert_eq!(pid.coords, va.coords);
        }
        // psi bridge for odd degrees
        if d % 2 == 1 && th.omega.two_db_nonzero {
            let psi = PsiContext::build(&th.omega).unwrap();
            for _ in 0..40 {
                let v = th.omega.random_vector(Basis::Omega, &mut rng2);
                let fast = psi.omega_to_psi_fast(&v);
                assert_eq!(fast.coords, th.omega.omega_to_psi(&v).coords);
                let back = psi.psi_to_omega_fast(&fast).unwrap();
                assert_eq!(back.coords, v.coords);
                if v.coords.iter().any(|c| !kf.is_zero(c)) {
                    let inv = psi.invert(&v, Some(&th)).unwrap();
                    let (prod, _) = th.omega.multiply(&v, &inv);
                    let mut e0 = vec![kf.zero(); d];
                    e0[0] = kf.one();
                    assert_eq!(prod.coords, e0);
                }
            }
            // lagrange inversion cross-check in the normal basis
            for _ in 0..20 {
                let v = th.omega.random_vector(Basis::Theta, &mut rng2);
                if v.coords.iter().all(|c| kf.is_zero(c)) {
                    continue;
                }
                let (li, _) = lagrange_invert(&th, &v).unwrap();
                let bi = psi.invert(&v, Some(&th)).unwrap();
                assert_eq!(li.coords, bi.coords, "inversion routes q={} d={}", q, d);
            }
        }
    }
}

#[test]
fn even_degree_generic_inversion() {
    // the fast bridge needs odd d; even degrees invert through the matrix
    // converter
    let k = BaseField::prime_field(13).unwrap();
    let mut rng = SplitMix64::new(40);
    let ctx = CurveModel::General.find_context(&k, 6, &mut rng).unwrap();
    assert!(matches!(PsiContext::build(&ctx), Err(Error::EvenDegree(6))));
    let mut e0 = vec![k.zero(); 6];
    e0[0] = k.one();
    for _ in 0..100 {
        let v = ctx.random_vector(Basis::Omega, &mut rng);
        if v.coords.iter().all(|c| k.is_zero(c)) {
            continue;
        }
        let inv = ctx.invert_generic(&v).unwrap();
        let (prod, _) = ctx.multiply(&v, &inv);
        assert_eq!(prod.coords, e0);
    }
    let zero = CoordVector::new(Basis::Omega, vec![k.zero(); 6]);
    assert!(matches!(ctx.invert_generic(&zero), Err(Error::ZeroInversion)));
}

#[test]
fn fast_conversion_over_full_odd_range() {
    // odd d from 3 to 31 over per-degree convenient prime fields
    for d in (3..=31usize).step_by(2) {
        // smallest prime q with 2 sqrt(q) >= d_q and decent margin
        let mut q = (d * d / 4).max(5) as u64;
        let (ctx, kf);
        'search: loop {
            q += 1;
            if !field::is_prime_u64(q) {
                continue;
            }
            let flags = existence_check(q, d as u64).unwrap();
            if !flags.omega_guaranteed {
                continue;
            }
            let k = BaseField::prime_field(q).unwrap();
            let mut rng = SplitMix64::new(d as u64);
            for model in CurveModel::applicable(k.p()) {
                if let Ok(c) = model.find_context(&k, d, &mut rng) {
                    if c.two_db_nonzero {
                        kf = k;
                        ctx = c;
                        break 'search;
                    }
                }
            }
        }
        let psi = PsiContext::build(&ctx).unwrap();
        let mut rng = SplitMix64::new(d as u64 + 1000);
        let reps = if d <= 15 { 500 } else { 120 };
        for _ in 0..reps {
            let v = ctx.random_vector(Basis::Omega, &mut rng);
            let fast = psi.omega_to_psi_fast(&v);
            assert_eq!(fast.coords, ctx.omega_to_psi(&v).coords, "d={} q={}", d, kf.q());
            let back = psi.psi_to_omega_fast(&fast).unwrap();
            assert_eq!(back.coords, v.coords, "d={} q={}", d, kf.q());
        }
        // the twelve slope symmetries on every torsion pair up to d = 31
        let e = &ctx.curve;
        let di = d as isize;
        let gam = |i: isize, j: isize| {
            let i = i.rem_euclid(di) as usize;
            let j = j.rem_euclid(di) as usize;
            let b = CurvePoint::Affine(ctx.nu[i].clone(), ctx.rho[i].clone());
            let c = CurvePoint::Affine(ctx.nu[j].clone(), ctx.rho[j].clone());
            gamma_origin(e, &b, &c).unwrap()
        };
        for kk in 1..di {
            for l in 1..di {
                if kk == l {
                    continue;
                }
                let g = gam(kk, l);
                assert_eq!(g, gam(-l, -kk));
                assert_eq!(g, gam(kk, kk - l));
                assert_eq!(g, gam(l - kk, -kk));
                assert_eq!(g, gam(l - kk, l));
                assert_eq!(g, gam(-l, kk - l));
                assert_eq!(g, kf.sub(&kf.neg(&gam(l, kk)), &e.a1));
            }
        }
    }
}
