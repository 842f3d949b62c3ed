//! The elliptic normal basis: Frobenius is an exact cyclic shift and the
//! multiplication tensor is five cyclic convolutions.

use crate::conv::{convolution_inverse, cyclic_convolution, ConvolutionStrategy};
use crate::counters::OpTally;
use crate::curve::{CurvePoint, Point};
use crate::ell_functions::{eval_u, gamma_origin, u_func};
use crate::error::{Error, Result};
use crate::field::{BaseField, BaseFieldElement, ExtFieldElement, Field};
use crate::omega::{Basis, CoordVector, OmegaContext};
use crate::rng::SplitMix64;

pub struct ThetaContext {
    pub omega: OmegaContext,
    pub r_point: Point,
    pub frak_c: BaseFieldElement,
    pub frak_a: BaseFieldElement,
    pub frak_b: BaseFieldElement,
    /// `lambda[k]` = sum of Gamma_{i,i+1} for i = 1..k; `lambda[0] = 0`; defined up to
    /// k = d-2.
    pub lambda: Vec<BaseFieldElement>,
    /// Coordinates of xi_0 in the normal basis.
    pub iota: Vec<BaseFieldElement>,
    /// `u_R[k] = u_0(R + kt)`, `x_R[k] = x(R + kt)`.
    pub u_r: Vec<BaseFieldElement>,
    pub u_r_inv: Vec<BaseFieldElement>,
    pub x_r: Vec<BaseFieldElement>,
    /// Tensor constants a^2 * iota and a^2 * x_R.
    pub a2_iota: Vec<BaseFieldElement>,
    pub a2_x_r: Vec<BaseFieldElement>,
    pub strategy: ConvolutionStrategy,
    /// `mu[k]`: omega_0-coordinate of theta_k, for the O(d) change of basis.
    mu: Vec<BaseFieldElement>,
    /// `mconst[k] = k*b/a + lambda[k-1]` for k >= 1: the all-ones component
    /// subtracted when expressing omega_k in the normal basis.
    mconst: Vec<BaseFieldElement>,
    frak_a_inv: BaseFieldElement,
    /// Theta coordinates of the field element 1 (the all-ones vector).
    pub one_vector: Vec<BaseFieldElement>,
}

impl ThetaContext {
    pub fn build(
        omega: OmegaContext,
        r_choice: Option<Point>,
        seed: u64,
    ) -> Result<ThetaContext> {
        if let Some(r) = r_choice {
            return Self::build_with_r(omega, r).map_err(|(_, e)| e);
        }
        let mut rng = SplitMix64::new(seed ^ 0x7411);
        let mut omega = omega;
        for _ in 0..256 {
            let r = omega.curve.random_point(&mut rng);
            if omega
                .curve
                .scalar_mul_unchecked(&r, omega.d as i128)
                .is_infinity()
            {
                continue;
            }
            match Self::build_with_r(omega, r) {
                Ok(ctx) => return Ok(ctx),
                Err((o, Error::NotInvertible)) | Err((o, Error::BadR)) => {
                    omega = o;
                    continue;
                }
                Err((_, e)) => return Err(e),
            }
        }
        Err(Error::SearchExhausted("theta point R"))
    }

    #[allow(clippy::result_large_err)]
    fn build_with_r(
        omega: OmegaContext,
        r: Point,
    ) -> std::result::Result<ThetaContext, (OmegaContext, Error)> {
        match Self::try_build(&omega, &r) {
            Ok(parts) => {
                let (frak_c, frak_a, frak_b, lambda, iota, u_r, u_r_inv, x_r, mu, mconst, one_vector) =
                    parts;
                let k = omega.fq.clone();
                let a2 = k.square(&frak_a);
                let a2_iota = iota.iter().map(|c| k.mul(&a2, c)).collect();
                let a2_x_r = x_r.iter().map(|c| k.mul(&a2, c)).collect();
                let frak_a_inv = k.inv(&frak_a).expect("frak_a nonzero");
                Ok(ThetaContext {
                    omega,
                    r_point: r,
                    frak_c,
                    frak_a,
                    frak_b,
                    lambda,
                    iota,
                    u_r,
                    u_r_inv,
                    x_r,
                    a2_iota,
                    a2_x_r,
                    strategy: ConvolutionStrategy::Naive,
                    mu,
                    mconst,
                    frak_a_inv,
                    one_vector,
                })
            }
            Err(e) => Err((omega, e)),
        }
    }

    #[allow(clippy::type_complexity)]
    fn try_build(
        omega: &OmegaContext,
        r: &Point,
    ) -> Result<(
        BaseFieldElement,
        BaseFieldElement,
        BaseFieldElement,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
        Vec<BaseFieldElement>,
    )> {
        let e = &omega.curve;
        let k = &omega.fq;
        let d = omega.d;
        if e.scalar_mul_unchecked(r, d as i128).is_infinity() {
            return Err(Error::BadR);
        }

        // torsion multiples kt as points, k = 0..d-1 (index 0 is O)
        let mut kt: Vec<Point> = Vec::with_capacity(d);
        kt.push(CurvePoint::Infinity);
        for i in 1..d {
            kt.push(CurvePoint::Affine(omega.nu[i].clone(), omega.rho[i].clone()));
        }

        // the ring sum u_{kt,(k+1)t}: evaluate at two independent non-pole
        // points and insist on the same value
        let eval_sum = |p: &Point| -> Result<BaseFieldElement> {
            let mut acc = k.zero();
            for i in 0..d {
                acc = k.add(&acc, &eval_u(e, &kt[i], &kt[(i + 1) % d], p)?);
            }
            Ok(acc)
        };
        let mut probes = vec![];
        let mut rng = SplitMix64::new(0xC0);
        let mut attempts = 0;
        while probes.len() < 2 {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::SearchExhausted("constant-sum probes"));
            }
            let p = e.random_point(&mut rng);
            if kt.contains(&p) {
                continue;
            }
            if let Ok(v) = eval_sum(&p) {
                probes.push(v);
            }
        }
        if probes[0] != probes[1] {
            return Err(Error::SingularSystem);
        }
        let frak_c = probes[0].clone();

        // normalization a*c + d*b = 1
        let (frak_a, frak_b) = if !k.is_zero(&frak_c) {
            (k.inv(&frak_c)?, k.zero())
        } else {
            let d_inv = k
                .inv(&k.from_u64(d as u64))
                .map_err(|_| Error::SingularSystem)?;
            let one_minus_c = k.sub(&k.one(), &frak_c);
            (k.one(), k.mul(&d_inv, &one_minus_c))
        };

        // lambda table and the c = lambda_{d-2} - a1 cross-check
        let mut lambda = vec![k.zero(); d.saturating_sub(1).max(1)];
        for i in 1..=d.saturating_sub(2) {
            let g = gamma_origin(e, &kt[i], &kt[(i + 1) % d])?;
            lambda[i] = k.add(&lambda[i - 1], &g);
        }
        if d >= 2 {
            let check = k.sub(&lambda[d - 2], &e.a1);
            if check != frak_c {
                return Err(Error::SingularSystem);
            }
        }

        // change-of-basis constants
        let frak_a_inv = k.inv(&frak_a)?;
        let b_over_a = k.mul(&frak_b, &frak_a_inv);
        let mut mu = vec![k.zero(); d];
        mu[0] = frak_b.clone();
        for i in 1..d - 1 {
            let g = gamma_origin(e, &kt[i], &kt[i + 1])?;
            mu[i] = k.add(&k.mul(&frak_a, &g), &frak_b);
        }
        mu[d - 1] = k.sub(&frak_b, &k.mul(&e.a1, &frak_a));
        let mut mconst = vec![k.zero(); d];
        for i in 1..d {
            let kba = k.mul(&k.from_u64(i as u64), &b_over_a);
            mconst[i] = k.add(&kba, &lambda[i - 1]);
        }

        // evaluation vectors at the orbit of R
        let mut u_r = Vec::with_capacity(d);
        let mut x_r = Vec::with_capacity(d);
        let mut cur = r.clone();
        for _ in 0..d {
            let val = eval_u(e, &CurvePoint::Infinity, &kt[1], &cur).map_err(|_| Error::BadR)?;
            u_r.push(k.add(&k.mul(&frak_a, &val), &frak_b));
            match &cur {
                CurvePoint::Affine(x, _) => x_r.push(x.clone()),
                CurvePoint::Infinity => return Err(Error::BadR),
            }
            cur = e.add_unchecked(&cur, &kt[1]);
        }
        let u_r_inv = convolution_inverse(k, &u_r)?;

        // iota = theta coordinates of xi_0, through the omega coordinates
        let iota = omega_to_theta_raw(k, d, &frak_a_inv, &mconst, &omega.kappa);
        let one_vector = omega_to_theta_raw(k, d, &frak_a_inv, &mconst, &unit_vec(k, d, 0));

        Ok((
            frak_c, frak_a, frak_b, lambda, iota, u_r, u_r_inv, x_r, mu, mconst, one_vector,
        ))
    }

    /// Assemble from recorded tables; only lengths and invertibility of
    /// frak_a are enforced here, the invariant suites do the checking.
    #[allow(clippy::too_many_arguments)]
    pub fn from_recorded(
        omega: OmegaContext,
        r_point: Point,
        frak_c: BaseFieldElement,
        frak_a: BaseFieldElement,
        frak_b: BaseFieldElement,
        lambda: Vec<BaseFieldElement>,
        iota: Vec<BaseFieldElement>,
        u_r: Vec<BaseFieldElement>,
        u_r_inv: Vec<BaseFieldElement>,
        x_r: Vec<BaseFieldElement>,
    ) -> Result<ThetaContext> {
        let k = omega.fq.clone();
        let d = omega.d;
        if lambda.len() != d - 1 || iota.len() != d || u_r.len() != d || u_r_inv.len() != d || x_r.len() != d
        {
            return Err(Error::Malformed("theta table length mismatch".into()));
        }
        let frak_a_inv = k.inv(&frak_a)?;
        let b_over_a = k.mul(&frak_b, &frak_a_inv);
        let mut mu = vec![k.zero(); d];
        mu[0] = frak_b.clone();
        for i in 1..d - 1 {
            let b = CurvePoint::Affine(omega.nu[i].clone(), omega.rho[i].clone());
            let c = CurvePoint::Affine(omega.nu[i + 1].clone(), omega.rho[i + 1].clone());
            let g = gamma_origin(&omega.curve, &b, &c)?;
            mu[i] = k.add(&k.mul(&frak_a, &g), &frak_b);
        }
        mu[d - 1] = k.sub(&frak_b, &k.mul(&omega.curve.a1, &frak_a));
        let mut mconst = vec![k.zero(); d];
        for i in 1..d {
            let kba = k.mul(&k.from_u64(i as u64), &b_over_a);
            mconst[i] = k.add(&kba, &lambda[i - 1]);
        }
        let one_vector = omega_to_theta_raw(&k, d, &frak_a_inv, &mconst, &unit_vec(&k, d, 0));
        let a2 = k.square(&frak_a);
        let a2_iota = iota.iter().map(|c| k.mul(&a2, c)).collect();
        let a2_x_r = x_r.iter().map(|c| k.mul(&a2, c)).collect();
        Ok(ThetaContext {
            omega,
            r_point,
            frak_c,
            frak_a,
            frak_b,
            lambda,
            iota,
            u_r,
            u_r_inv,
            x_r,
            a2_iota,
            a2_x_r,
            strategy: ConvolutionStrategy::Naive,
            mu,
            mconst,
            frak_a_inv,
            one_vector,
        })
    }

    pub fn d(&self) -> usize {
        self.omega.d
    }

    pub fn fq(&self) -> &BaseField {
        &self.omega.fq
    }

    // -- O(d) coordinate changes -------------------------------------------

    /// omega -> theta: 2d-1 multiplications and 3d-2 additions.
    pub fn omega_to_theta(&self, v: &CoordVector) -> (CoordVector, OpTally) {
        debug_assert_eq!(v.basis, Basis::Omega);
        let k = self.fq();
        let d = self.d();
        let mut tally = OpTally::default();
        let out = omega_to_theta_raw(k, d, &self.frak_a_inv, &self.mconst, &v.coords);
        tally.mults += 2 * d as u64 - 1;
        tally.adds += 3 * d as u64 - 2;
        (CoordVector::new(Basis::Theta, out), tally)
    }

    /// theta -> omega: 2d-1 multiplications and 2d-2 additions.
    pub fn theta_to_omega(&self, v: &CoordVector) -> (CoordVector, OpTally) {
        debug_assert_eq!(v.basis, Basis::Theta);
        let k = self.fq();
        let d = self.d();
        let c = &v.coords;
        let mut tally = OpTally::default();
        // gamma_0 = sum c_k mu_k
        let mut g0 = k.zero();
        for (ci, mi) in c.iter().zip(&self.mu) {
            g0 = k.add(&g0, &k.mul(ci, mi));
        }
        // gamma_j = a * (c_{j-1} - c_j)
        let mut out = Vec::with_capacity(d);
        out.push(g0);
        for j in 1..d {
            out.push(k.mul(&self.frak_a, &k.sub(&c[j - 1], &c[j])));
        }
        tally.mults += 2 * d as u64 - 1;
        tally.adds += 2 * d as u64 - 2;
        (CoordVector::new(Basis::Omega, out), tally)
    }

    /// Frobenius power: a pure cyclic shift, zero arithmetic.
    pub fn frobenius(&self, v: &CoordVector, power: i64) -> CoordVector {
        debug_assert_eq!(v.basis, Basis::Theta);
        let d = self.d();
        let shift = power.rem_euclid(d as i64) as usize;
        let coords = (0..d)
            .map(|i| v.coords[(i + shift) % d].clone())
            .collect();
        CoordVector::new(Basis::Theta, coords)
    }

    // -- the five-convolution tensor ----------------------------------------

    pub fn multiply(&self, va: &CoordVector, vb: &CoordVector) -> (CoordVector, OpTally) {
        debug_assert_eq!(va.basis, Basis::Theta);
        debug_assert_eq!(vb.basis, Basis::Theta);
        let k = self.fq();
        let d = self.d();
        let mut tally = OpTally::default();
        fn conv(
            th: &ThetaContext,
            tally: &mut OpTally,
            x: &[BaseFieldElement],
            y: &[BaseFieldElement],
        ) -> Vec<BaseFieldElement> {
            let d = th.d();
            tally.convolutions += 1;
            tally.mults += (d * d) as u64;
            tally.adds += (d * (d - 1)) as u64;
            cyclic_convolution(th.fq(), x, y, th.strategy).expect("equal lengths")
        }
        let shift_diff = |x: &[BaseFieldElement]| -> Vec<BaseFieldElement> {
            (0..d)
                .map(|i| k.sub(&x[i], &x[(i + d - 1) % d]))
                .collect()
        };
        // da = alpha - sigma(alpha), db = beta - sigma(beta)
        let da = shift_diff(&va.coords);
        let db = shift_diff(&vb.coords);
        tally.adds += 2 * d as u64;
        // h = da (.) db
        let h: Vec<BaseFieldElement> = da.iter().zip(&db).map(|(x, y)| k.mul(x, y)).collect();
        tally.mults += d as u64;
        // c1 = (a^2 iota) * h
        let c1 = conv(self, &mut tally, &self.a2_iota, &h);
        // evaluations of A and B at the orbit of R
        let ea = conv(self, &mut tally, &self.u_r, &va.coords);
        let eb = conv(self, &mut tally, &self.u_r, &vb.coords);
        let e_prod: Vec<BaseFieldElement> = ea.iter().zip(&eb).map(|(x, y)| k.mul(x, y)).collect();
        tally.mults += d as u64;
        // subtract the evaluation of C: (a^2 x_R) * h
        let c_eval = conv(self, &mut tally, &self.a2_x_r, &h);
        let diff: Vec<BaseFieldElement> = e_prod
            .iter()
            .zip(&c_eval)
            .map(|(x, y)| k.sub(x, y))
            .collect();
        tally.adds += d as u64;
        // interpolate D and add the reduced C
        let d_coords = conv(self, &mut tally, &self.u_r_inv, &diff);
        let out: Vec<BaseFieldElement> = c1
            .iter()
            .zip(&d_coords)
            .map(|(x, y)| k.add(x, y))
            .collect();
        tally.adds += d as u64;
        (CoordVector::new(Basis::Theta, out), tally)
    }

    /// Express sum alpha_i xi_i in the normal basis: iota * alpha.
    pub fn reduce_xi_combination(&self, alpha: &[BaseFieldElement]) -> Result<CoordVector> {
        let out = cyclic_convolution(self.fq(), &self.iota, alpha, self.strategy)?;
        Ok(CoordVector::new(Basis::Theta, out))
    }

    /// Evaluate sum alpha_i u_i (kind=U) or sum alpha_i x_i (kind=X) at the
    /// points R + jt.
    pub fn evaluate_at_orbit(
        &self,
        alpha: &[BaseFieldElement],
        kind: OrbitKind,
    ) -> Result<Vec<BaseFieldElement>> {
        let table = match kind {
            OrbitKind::U => &self.u_r,
            OrbitKind::X => &self.x_r,
        };
        cyclic_convolution(self.fq(), table, alpha, self.strategy)
    }

    /// Interpolation: coefficients of f = sum alpha_i u_i from its values at
    /// R + jt.
    pub fn interpolate_at_orbit(&self, values: &[BaseFieldElement]) -> Result<Vec<BaseFieldElement>> {
        cyclic_convolution(self.fq(), &self.u_r_inv, values, self.strategy)
    }

    // -- oracle plumbing -----------------------------------------------------

    /// The field element of L behind a theta vector.
    pub fn to_field_element(&self, v: &CoordVector) -> ExtFieldElement {
        let (om, _) = self.theta_to_omega(v);
        self.omega.to_field_element(&om)
    }

    pub fn from_field_element(&self, e: &ExtFieldElement) -> CoordVector {
        let psi = CoordVector::new(Basis::Psi, e.clone());
        let om = self.omega.psi_to_omega(&psi);
        self.omega_to_theta(&om).0
    }

    /// theta_k as elements of L (for basis checks in tests).
    pub fn theta_elements(&self) -> Result<Vec<ExtFieldElement>> {
        let e = &self.omega.curve;
        let l = &self.omega.ell;
        let d = self.d();
        let tau = l.x_elem();
        let mut kt: Vec<Point> = Vec::with_capacity(d);
        kt.push(CurvePoint::Infinity);
        for i in 1..d {
            kt.push(CurvePoint::Affine(self.omega.nu[i].clone(), self.omega.rho[i].clone()));
        }
        let mut out = Vec::with_capacity(d);
        for i in 0..d {
            let u = u_func(e, &kt[i], &kt[(i + 1) % d])?;
            let val = u.eval_ext(l, &tau, &self.omega.y_b)?;
            let scaled = l.add(
                &l.mul(&l.embed_base(&self.frak_a), &val),
                &l.embed_base(&self.frak_b),
            );
            out.push(scaled);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    U,
    X,
}

fn unit_vec(k: &BaseField, d: usize, i: usize) -> Vec<BaseFieldElement> {
    let mut v = vec![k.zero(); d];
    v[i] = k.one();
    v
}

/// omega -> theta without a context: gamma_j = a^- * S_j + c* where S_j is
/// the suffix sum of the omega coordinates and c* collects the all-ones rows.
fn omega_to_theta_raw(
    k: &BaseField,
    d: usize,
    frak_a_inv: &BaseFieldElement,
    mconst: &[BaseFieldElement],
    alpha: &[BaseFieldElement],
) -> Vec<BaseFieldElement> {
    // c* = alpha_0 - sum_{k>=1} alpha_k mconst_k
    let mut cstar = alpha[0].clone();
    for i in 1..d {
        cstar = k.sub(&cstar, &k.mul(&alpha[i], &mconst[i]));
    }
    // suffix sums S_j = sum_{k > j} alpha_k
    let mut out = vec![k.zero(); d];
    let mut suffix = k.zero();
    for j in (0..d).rev() {
        out[j] = k.add(&k.mul(frak_a_inv, &suffix), &cstar);
        if j > 0 {
            suffix = k.add(&suffix, &alpha[j]);
        }
    }
    out
}
