//! Invariant suites run against a loaded bundle, grouped and reported.

use ellbase::bundle::LoadedBundle;
use ellbase::counters::{frobenius_formulas, mult_formulas};
use ellbase::*;

pub struct GroupResult {
    pub name: &'static str,
    pub checks: u64,
    pub failures: u64,
    pub detail: Vec<String>,
}

impl GroupResult {
    fn new(name: &'static str) -> Self {
        GroupResult { name, checks: 0, failures: 0, detail: vec![] }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.detail.len() < 8 {
                self.detail.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn run(loaded: &LoadedBundle, trials: u64) -> Vec<GroupResult> {
    let mut out = vec![];
    out.push(structure_group(loaded));
    if trials > 0 {
        out.push(group_law(loaded, trials));
        out.push(identities(loaded, trials));
        out.push(gamma_symmetries(loaded));
        out.push(reduction_consistency(loaded));
        out.push(frobenius_oracle(loaded, trials));
        out.push(multiply_oracle(loaded, trials));
        if loaded.theta.is_some() {
            out.push(theta_group(loaded, trials));
        }
        if loaded.omega.d % 2 == 1 && loaded.omega.d >= 3 && loaded.omega.two_db_nonzero {
            out.push(psi_group(loaded, trials));
        }
    }
    out
}

fn structure_group(loaded: &LoadedBundle) -> GroupResult {
    let mut g = GroupResult::new("structure");
    let ctx = &loaded.omega;
    let e = &ctx.curve;
    let k = &ctx.fq;
    g.check(e.contains(&ctx.t), || "t not on E".into());
    g.check(ctx.isogeny.codomain.contains(&ctx.a), || "a not on E'".into());
    // t has exact order d
    let mut cur = ctx.t.clone();
    let mut ord = 1;
    while !cur.is_infinity() && ord <= ctx.d + 1 {
        cur = e.add_unchecked(&cur, &ctx.t);
        ord += 1;
    }
    g.check(ord == ctx.d, || format!("t order {} != d {}", ord, ctx.d));
    g.check(ctx.pi.is_irreducible(k), || "Pi not irreducible".into());
    // b on the curve over L and phi(b) = b + t
    let tau = ctx.ell.x_elem();
    let b = CurvePoint::Affine(tau.clone(), ctx.y_b.clone());
    let e_l = ellbase::omega::lift_curve(&ctx.ell, e);
    g.check(e_l.contains(&b), || "b not on E(L)".into());
    let phi_b = CurvePoint::Affine(ctx.ell.frobenius(&tau), ctx.ell.frobenius(&ctx.y_b));
    let b_plus_t = e_l.add_unchecked(&b, &ellbase::omega::lift_point(&ctx.ell, &ctx.t));
    g.check(phi_b == b_plus_t, || "phi(b) != b + t".into());
    if let Some(th) = &loaded.theta {
        // sum of theta_k is 1 and the normalization holds
        let (om, _) = th.theta_to_omega(&CoordVector::new(
            Basis::Theta,
            vec![k.one(); ctx.d],
        ));
        let mut e0 = vec![k.zero(); ctx.d];
        e0[0] = k.one();
        g.check(om.coords == e0, || "sum of theta_k != 1".into());
        let acdb = k.add(
            &k.mul(&th.frak_a, &th.frak_c),
            &k.mul(&k.from_u64(ctx.d as u64), &th.frak_b),
        );
        g.check(acdb == k.one(), || "a*c + d*b != 1".into());
    }
    g
}

fn group_law(loaded: &LoadedBundle, trials: u64) -> GroupResult {
    let mut g = GroupResult::new("group-law");
    let e = &loaded.omega.curve;
    let mut rng = SplitMix64::new(0xA11CE);
    for _ in 0..trials {
        let p = e.random_point(&mut rng);
        let q = e.random_point(&mut rng);
        let r = e.random_point(&mut rng);
        let lhs = e.add_unchecked(&e.add_unchecked(&p, &q), &r);
        let rhs = e.add_unchecked(&p, &e.add_unchecked(&q, &r));
        g.check(lhs == rhs, || "associativity".into());
        g.check(
            e.add_unchecked(&p, &q) == e.add_unchecked(&q, &p),
            || "commutativity".into(),
        );
        g.check(e.neg_point(&e.neg_point(&p)) == p, || "neg involution".into());
        g.check(
            e.add_unchecked(&p, &e.neg_point(&p)).is_infinity(),
            || "P + (-P) != O".into(),
        );
    }
    g
}

fn identities(loaded: &LoadedBundle, trials: u64) -> GroupResult {
    let mut g = GroupResult::new("identities");
    let e = &loaded.omega.curve;
    let k = &loaded.omega.fq;
    let mut rng = SplitMix64::new(0x1D);
    let mut sampled = 0;
    while sampled < trials {
        let a = e.random_point(&mut rng);
        let b = e.random_point(&mut rng);
        let c = e.random_point(&mut rng);
        if a == b || b == c || a == c {
            continue;
        }
        sampled += 1;
        let g_abc = match gamma(e, &a, &b, &c).unwrap() {
            GammaValue::Finite(v) => v,
            GammaValue::Infinite => continue,
        };
        // (moins)
        if let GammaValue::Finite(gn) =
            gamma(e, &e.neg_point(&a), &e.neg_point(&b), &e.neg_point(&c)).unwrap()
        {
            g.check(gn == k.sub(&k.neg(&g_abc), &e.a1), || "eq moins".into());
        }
        // (sym)
        g.check(
            ell_functions::eval_u(e, &b, &c, &a).unwrap() == g_abc,
            || "eq sym u_BC(A)".into(),
        );
        g.check(
            ell_functions::eval_u(e, &c, &a, &b).unwrap() == g_abc,
            || "eq sym u_CA(B)".into(),
        );
        // translation invariance
        let p = e.random_point(&mut rng);
        let gt = gamma(
            e,
            &e.add_unchecked(&a, &p),
            &e.add_unchecked(&b, &p),
            &e.add_unchecked(&c, &p),
        )
        .unwrap();
        g.check(gt == GammaValue::Finite(g_abc.clone()), || "translation".into());
        // (somme), (prod), (carre) at a random non-pole point
        let pev = e.random_point(&mut rng);
        let vab = ell_functions::eval_u(e, &a, &b, &pev);
        let vbc = ell_functions::eval_u(e, &b, &c, &pev);
        let vca = ell_functions::eval_u(e, &c, &a, &pev);
        if let (Ok(vab), Ok(vbc), Ok(vca)) = (vab, vbc, vca) {
            let lhs = k.add(&k.add(&vab, &vbc), &vca);
            g.check(lhs == k.sub(&g_abc, &e.a1), || "eq somme".into());
        }
        let g_acb = match gamma(e, &a, &c, &b).unwrap() {
            GammaValue::Finite(v) => v,
            GammaValue::Infinite => continue,
        };
        let xs = (
            ell_functions::eval_u(e, &a, &b, &pev),
            ell_functions::eval_u(e, &a, &c, &pev),
            ell_functions::x_translated(e, &a, &pev),
            ell_functions::x_translated(e, &b, &pev),
            ell_functions::x_translated(e, &a, &b),
            ell_functions::x_translated(e, &a, &c),
        );
        if let (Ok(vab), Ok(vac), Ok(xa), Ok(xb), Ok(xab), Ok(xac)) = xs {
            let lhs = k.mul(&vab, &vac);
            let mut rhs = k.add(&xa, &k.mul(&g_abc, &vac));
            rhs = k.add(&rhs, &k.mul(&g_acb, &vab));
            rhs = k.add(&rhs, &e.a2);
            rhs = k.add(&rhs, &k.add(&xab, &xac));
            g.check(lhs == rhs, || "eq prod".into());
            let lhs2 = k.square(&vab);
            let mut rhs2 = k.add(&xa, &xb);
            rhs2 = k.sub(&rhs2, &k.mul(&e.a1, &vab));
            rhs2 = k.add(&rhs2, &xab);
            rhs2 = k.add(&rhs2, &e.a2);
            g.check(lhs2 == rhs2, || "eq carre".into());
        }
    }
    g
}

fn gamma_symmetries(loaded: &LoadedBundle) -> GroupResult {
    let mut g = GroupResult::new("gamma-symmetries");
    let ctx = &loaded.omega;
    let e = &ctx.curve;
    let k = &ctx.fq;
    let d = ctx.d as isize;
    let gam = |i: isize, j: isize| -> BaseFieldElement {
        let i = i.rem_euclid(d) as usize;
        let j = j.rem_euclid(d) as usize;
        let b = CurvePoint::Affine(ctx.nu[i].clone(), ctx.rho[i].clone());
        let c = CurvePoint::Affine(ctx.nu[j].clone(), ctx.rho[j].clone());
        gamma_origin(e, &b, &c).unwrap()
    };
    for kk in 1..d {
        for l in 1..d {
            if kk == l {
                continue;
            }
            let v = gam(kk, l);
            g.check(v == gam(-l, -kk), || "G(k,l)=G(-l,-k)".into());
            g.check(v == gam(kk, kk - l), || "G(k,l)=G(k,k-l)".into());
            g.check(v == gam(l - kk, -kk), || "G(k,l)=G(l-k,-k)".into());
            g.check(v == gam(l - kk, l), || "G(k,l)=G(l-k,l)".into());
            g.check(v == gam(-l, kk - l), || "G(k,l)=G(-l,k-l)".into());
            g.check(
                v == k.sub(&k.neg(&gam(l, kk)), &e.a1),
                || "G(k,l)=-G(l,k)-a1".into(),
            );
        }
    }
    g
}

fn reduction_consistency(loaded: &LoadedBundle) -> GroupResult {
    let mut g = GroupResult::new("reduction-consistency");
    let ctx = &loaded.omega;
    let k = &ctx.fq;
    let d = ctx.d;
    // kappa really is the omega expression of xi_0 = x(b)
    let kap = CoordVector::new(Basis::Omega, ctx.kappa.clone());
    let psi = ctx.omega_to_psi(&kap);
    let mut e1 = vec![k.zero(); d];
    e1[1] = k.one();
    g.check(psi.coords == e1, || "kappa does not express xi_0".into());
    // the recorded first coordinates of Phi^{-k}(xi_0) match recomputation
    let mut cur = kap.clone();
    g.check(ctx.phi_xi0_first[0] == cur.coords[0], || "phi_xi0_first[0]".into());
    for i in 1..d {
        cur = ctx.frobenius_inverse(&cur).0;
        g.check(
            ctx.phi_xi0_first[i] == cur.coords[0],
            || format!("phi_xi0_first[{}]", i),
        );
    }
    if let Some(th) = &loaded.theta {
        // iota is the theta expression of xi_0
        let (iota2, _) = th.omega_to_theta(&kap);
        g.check(iota2.coords == th.iota, || "iota != theta coords of xi_0".into());
        // the constant sum evaluates equal at 5 distinct points
        let e = &ctx.curve;
        let mut kt = vec![CurvePoint::Infinity];
        for i in 1..d {
            kt.push(CurvePoint::Affine(ctx.nu[i].clone(), ctx.rho[i].clone()));
        }
        let mut rng = SplitMix64::new(0xCC);
        let mut vals = vec![];
        let mut attempts = 0;
        while vals.len() < 5 && attempts < 10_000 {
            attempts += 1;
            let p = e.random_point(&mut rng);
            if kt.contains(&p) {
                continue;
            }
            let mut acc = k.zero();
            let mut ok = true;
            for i in 0..d {
                match ell_functions::eval_u(e, &kt[i], &kt[(i + 1) % d], &p) {
                    Ok(v) => acc = k.add(&acc, &v),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                vals.push(acc);
            }
        }
        for v in &vals {
            g.check(*v == th.frak_c, || "constant sum differs from frak_c".into());
        }
        // lambda_{d-2} - a1 = frak_c
        g.check(
            k.sub(&th.lambda[d - 2], &ctx.curve.a1) == th.frak_c,
            || "lambda tail identity".into(),
        );
    }
    g
}

fn frobenius_oracle(loaded: &LoadedBundle, trials: u64) -> GroupResult {
    let mut g = GroupResult::new("frobenius-oracle");
    let ctx = &loaded.omega;
    let d = ctx.d as u64;
    let (fadds, fmults) = frobenius_formulas::charged(d, ctx.a1_shape());
    let mut rng = SplitMix64::new(0xF0);
    for _ in 0..trials {
        let v = ctx.random_vector(Basis::Omega, &mut rng);
        let (fwd, tally) = ctx.frobenius(&v);
        g.check(fwd.coords == ctx.oracle_frobenius(&v).coords, || "forward oracle".into());
        g.check(
            (tally.total_adds(), tally.total_mults()) == (fadds, fmults),
            || format!("frobenius counters {:?}", tally),
        );
        let (back, _) = ctx.frobenius_inverse(&fwd);
        g.check(back.coords == v.coords, || "inverse composition".into());
    }
    g
}

fn multiply_oracle(loaded: &LoadedBundle, trials: u64) -> GroupResult {
    let mut g = GroupResult::new("multiply-oracle");
    let ctx = &loaded.omega;
    let expected = mult_formulas::expected(ctx.d as u64, ctx.a1_shape(), ctx.a3_nonzero());
    let mut rng = SplitMix64::new(0x4D);
    for _ in 0..trials {
        let va = ctx.random_vector(Basis::Omega, &mut rng);
        let vb = ctx.random_vector(Basis::Omega, &mut rng);
        let (prod, tally) = ctx.multiply(&va, &vb);
        g.check(
            prod.coords == ctx.oracle_multiply(&va, &vb).coords,
            || "product oracle".into(),
        );
        g.check(
            ctx.multiply(&vb, &va).0.coords == prod.coords,
            || "commutativity".into(),
        );
        g.check(
            (tally.adds, tally.a1_adds, tally.a3_adds, tally.mults, tally.a1_mults, tally.invs)
                == (
                    expected.adds,
                    expected.a1_adds,
                    expected.a3_adds,
                    expected.mults,
                    expected.a1_mults,
                    expected.invs,
                ),
            || format!("counters {:?} expected {:?}", tally, expected),
        );
    }
    g
}

fn theta_group(loaded: &LoadedBundle, trials: u64) -> GroupResult {
    let mut g = GroupResult::new("theta");
    let th = loaded.theta.as_ref().unwrap();
    let mut rng = SplitMix64::new(0x7E);
    for _ in 0..trials {
        let va = th.omega.random_vector(Basis::Theta, &mut rng);
        let vb = th.omega.random_vector(Basis::Theta, &mut rng);
        let (prod, tally) = th.multiply(&va, &vb);
        let oracle = th.omega.ell.mul(&th.to_field_element(&va), &th.to_field_element(&vb));
        g.check(th.to_field_element(&prod) == oracle, || "theta product oracle".into());
        g.check(tally.convolutions == 5, || "convolution count".into());
        // frobenius shift = oracle q-th power, and it is multiplicative
        let sh = th.frobenius(&va, 1);
        g.check(
            th.to_field_element(&sh) == th.omega.ell.frobenius(&th.to_field_element(&va)),
            || "theta frobenius oracle".into(),
        );
        let (pf, _) = th.multiply(&th.frobenius(&va, 1), &th.frobenius(&vb, 1));
        g.check(pf.coords == th.frobenius(&prod, 1).coords, || "frobenius homomorphism".into());
        // identity and round trips
        let one = CoordVector::new(Basis::Theta, th.one_vector.clone());
        g.check(th.multiply(&va, &one).0.coords == va.coords, || "theta identity".into());
        let (om, _) = th.theta_to_omega(&va);
        let (back, _) = th.omega_to_theta(&om);
        g.check(back.coords == va.coords, || "round trip".into());
        // cross-basis consistency
        let (ov, _) = th.theta_to_omega(&va);
        let (ow, _) = th.theta_to_omega(&vb);
        let (op, _) = th.omega.multiply(&ov, &ow);
        let (tp, _) = th.omega_to_theta(&op);
        g.check(tp.coords == prod.coords, || "cross-basis product".into());
    }
    g
}

fn psi_group(loaded: &LoadedBundle, trials: u64) -> GroupResult {
    let mut g = GroupResult::new("psi-bridge");
    let ctx = &loaded.omega;
    let k = &ctx.fq;
    let psi = match PsiContext::build(ctx) {
        Ok(p) => p,
        Err(e) => {
            let mut gr = GroupResult::new("psi-bridge");
            gr.check(false, || format!("psi build failed: {e}"));
            return gr;
        }
    };
    // Y1 - y Y0 vanishes at b (hence at all conjugates b + kt)
    let tau = ctx.ell.x_elem();
    let lhs = ctx.ell.eval_lifted(&psi.y1, &tau);
    let rhs = ctx.ell.mul(&ctx.y_b, &ctx.ell.eval_lifted(&psi.y0, &tau));
    g.check(lhs == rhs, || "Y1(tau) != y_b Y0(tau)".into());
    g.check(
        psi.y1.gcd(k, &psi.y0).unwrap().degree() == Some(0),
        || "gcd(Y1, Y0) != 1".into(),
    );
    g.check(
        psi.y0.gcd(k, &ctx.pi).unwrap().degree() == Some(0),
        || "gcd(Y0, Pi) != 1".into(),
    );
    let mut rng = SplitMix64::new(0x51);
    for _ in 0..trials {
        let v = ctx.random_vector(Basis::Omega, &mut rng);
        let fast = psi.omega_to_psi_fast(&v);
        g.check(fast.coords == ctx.omega_to_psi(&v).coords, || "fast omega->psi".into());
        match psi.psi_to_omega_fast(&fast) {
            Ok(back) => g.check(back.coords == v.coords, || "fast psi->omega".into()),
            Err(e) => g.check(false, || format!("psi->omega failed: {e}")),
        }
        if v.coords.iter().any(|c| !k.is_zero(c)) {
            let inv = psi.invert(&v, loaded.theta.as_ref()).unwrap();
            let (prod, _) = ctx.multiply(&v, &inv);
            let mut e0 = vec![k.zero(); ctx.d];
            e0[0] = k.one();
            g.check(prod.coords == e0, || "inverse".into());
            if let Some(th) = &loaded.theta {
                let vt = th.omega.random_vector(Basis::Theta, &mut rng);
                if vt.coords.iter().any(|c| !k.is_zero(c)) {
                    let (li, _) = lagrange_invert(th, &vt).unwrap();
                    let bi = psi.invert(&vt, Some(th)).unwrap();
                    g.check(li.coords == bi.coords, || "inversion routes differ".into());
                }
            }
        }
    }
    g
}
