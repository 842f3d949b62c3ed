//! The polynomial basis attached to an elliptic basis, with fast coordinate
//! changes in both directions, inversion, and division.

use crate::error::{Error, Result};
use crate::field::{BaseField, BaseFieldElement, Field};
use crate::omega::{solve_linear, Basis, CoordVector, OmegaContext};
use crate::poly::{multipoint_eval, Polynomial};
use crate::theta::ThetaContext;

pub struct PsiContext<'a> {
    pub omega: &'a OmegaContext,
    /// Monic, degree (d+1)/2.
    pub y1: Polynomial<BaseField>,
    /// Degree <= (d-3)/2, coprime to y1 and to Pi.
    pub y0: Polynomial<BaseField>,
    /// y1 * y0^{-1} mod Pi: the image of y in the quotient.
    pub m_poly: Polynomial<BaseField>,
    /// D = prod_{1 <= k <= (d-1)/2} (x - nu_k).
    pub d_poly: Polynomial<BaseField>,
    pub d_inv_mod_pi: Polynomial<BaseField>,
    /// D_k(nu_k) for 1 <= k <= (d-1)/2 (index 0 unused).
    pub dk_at_nuk: Vec<BaseFieldElement>,
    /// 1/(s_k - s_{-k}) for 1 <= k <= (d-1)/2.
    s_diff_inv: Vec<BaseFieldElement>,
    y0_inv_mod_y1: Polynomial<BaseField>,
    half: usize,
}

impl<'a> PsiContext<'a> {
    pub fn build(omega: &'a OmegaContext) -> Result<PsiContext<'a>> {
        let d = omega.d;
        if d % 2 == 0 {
            return Err(Error::EvenDegree(d));
        }
        if d < 3 {
            return Err(Error::EvenDegree(d));
        }
        if !omega.two_db_nonzero {
            return Err(Error::TwoTorsionObstruction);
        }
        let k = &omega.fq;
        let ell = &omega.ell;
        let half = (d - 1) / 2;

        // Solve for Y1 (monic, degree (d+1)/2) and Y0 (degree <= (d-3)/2)
        // with Y1(tau) = y_b * Y0(tau) in L: d linear conditions over F_q in
        // the (d+1)/2 + (d-1)/2 = d unknown coefficients.
        let tau = ell.x_elem();
        let mut tau_pow = vec![ell.one()];
        for _ in 1..=half + 1 {
            tau_pow.push(ell.mul(tau_pow.last().unwrap(), &tau));
        }
        let mut cols: Vec<Vec<BaseFieldElement>> = Vec::with_capacity(d);
        // Y1 coefficients c_0..c_half multiply tau^i
        for tp in tau_pow.iter().take(half + 1) {
            cols.push(tp.clone());
        }
        // Y0 coefficients e_0..e_{half-1} multiply -y_b tau^j
        for tp in tau_pow.iter().take(half) {
            let t = ell.neg(&ell.mul(&omega.y_b, tp));
            cols.push(t);
        }
        // rhs = -tau^{(d+1)/2} (moving the monic leading term over)
        let rhs = ell.neg(&tau_pow[half + 1]);
        let sol = solve_linear(k, &cols, &rhs).ok_or(Error::SingularSystem)?;
        let y1 = {
            let mut cs = sol[..=half].to_vec();
            cs.push(k.one());
            Polynomial::from_coeffs(k, cs)
        };
        let y0 = Polynomial::from_coeffs(k, sol[half + 1..].to_vec());
        if y0.is_zero() {
            return Err(Error::SingularSystem);
        }
        // structural checks: coprimality and the defining identity in L
        if y1.gcd(k, &y0)?.degree() != Some(0) {
            return Err(Error::SingularSystem);
        }
        if y0.gcd(k, &omega.pi)?.degree() != Some(0) {
            return Err(Error::SingularSystem);
        }
        let lhs = ell.eval_lifted(&y1, &tau);
        let rhs_check = ell.mul(&omega.y_b, &ell.eval_lifted(&y0, &tau));
        if lhs != rhs_check {
            return Err(Error::SingularSystem);
        }

        let m_poly = y1.mul_mod(k, &y0.inv_mod(k, &omega.pi)?, &omega.pi)?;

        // D and the derivative evaluations D_k(nu_k) = D'(nu_k)
        let mut d_poly = Polynomial::one(k);
        for i in 1..=half {
            d_poly = d_poly.mul(k, &Polynomial::x_minus(k, &omega.nu[i]));
        }
        let d_inv_mod_pi = d_poly.inv_mod(k, &omega.pi)?;
        let dprime = d_poly.derivative(k);
        let pts: Vec<BaseFieldElement> = (1..=half).map(|i| omega.nu[i].clone()).collect();
        let evals = multipoint_eval(k, &dprime, &pts);
        let mut dk_at_nuk = vec![k.zero()];
        dk_at_nuk.extend(evals);

        // s_k - s_{-k} = 2 y(kt) + a1 nu_k + a3 is nonzero for odd d
        let mut s_diff_inv = vec![k.zero()];
        for i in 1..=half {
            let diff = k.sub(&omega.s[i], &omega.s[d - i]);
            s_diff_inv.push(k.inv(&diff).map_err(|_| Error::TwoTorsionObstruction)?);
        }

        let y0_inv_mod_y1 = y0.inv_mod(k, &y1)?;

        Ok(PsiContext {
            omega,
            y1,
            y0,
            m_poly,
            d_poly,
            d_inv_mod_pi,
            dk_at_nuk,
            s_diff_inv,
            y0_inv_mod_y1,
            half,
        })
    }

    /// Fast omega -> psi: combine f = alpha_0 + sum alpha_k (y+s_k)/(x-nu_k)
    /// over the common denominator D with a balanced subproduct tree, then
    /// reduce (U + M V)/D modulo Pi.
    pub fn omega_to_psi_fast(&self, v: &CoordVector) -> CoordVector {
        debug_assert_eq!(v.basis, Basis::Omega);
        let k = &self.omega.fq;
        let d = self.omega.d;
        let alpha = &v.coords;
        // leaves: for k = 1..=half the paired residue
        //   [alpha_k s_k + alpha_{-k} s_{-k}] + y [alpha_k + alpha_{-k}] over (x - nu_k)
        let leaves: Vec<(Polynomial<BaseField>, Polynomial<BaseField>, Polynomial<BaseField>)> =
            (1..=self.half)
                .map(|i| {
                    let u = k.add(
                        &k.mul(&alpha[i], &self.omega.s[i]),
                        &k.mul(&alpha[d - i], &self.omega.s[d - i]),
                    );
                    let w = k.add(&alpha[i], &alpha[d - i]);
                    (
                        Polynomial::constant(k, u),
                        Polynomial::constant(k, w),
                        Polynomial::x_minus(k, &self.omega.nu[i]),
                    )
                })
                .collect();
        let (u_poly, v_poly, den) = combine_fractions(k, &leaves);
        debug_assert_eq!(den, self.d_poly);
        // U = alpha_0 D + U*, W = (U + M V) / D mod Pi
        let u_full = self.d_poly.scale(k, &alpha[0]).add(k, &u_poly);
        let num = u_full.add(k, &self.m_poly.mul_mod(k, &v_poly, &self.omega.pi).unwrap());
        let w = num
            .mul_mod(k, &self.d_inv_mod_pi, &self.omega.pi)
            .unwrap();
        let mut coords = w.coeffs;
        coords.resize(d, k.zero());
        CoordVector::new(Basis::Psi, coords)
    }

    /// Fast psi -> omega through N = W D Y0 mod Pi and the paired 2x2 solves.
    pub fn psi_to_omega_fast(&self, v: &CoordVector) -> Result<CoordVector> {
        debug_assert_eq!(v.basis, Basis::Psi);
        let k = &self.omega.fq;
        let d = self.omega.d;
        let w = Polynomial::from_coeffs(k, v.coords.clone());
        let n = w
            .mul_mod(k, &self.d_poly, &self.omega.pi)?
            .mul_mod(k, &self.y0, &self.omega.pi)?;
        // N^ = N / Y0 mod Y1, degree <= (d-1)/2
        let nhat = n
            .rem(k, &self.y1)?
            .mul_mod(k, &self.y0_inv_mod_y1, &self.y1)?;
        if nhat.degree().map_or(false, |dg| dg > self.half) {
            return Err(Error::InexactDivision);
        }
        // alpha_0: the unique constant with N^ - alpha_0 D of degree <= (d-3)/2
        let alpha0 = nhat.coeff(k, self.half);
        let a0_poly = nhat.sub(k, &self.d_poly.scale(k, &alpha0));
        if a0_poly.degree().map_or(false, |dg| dg + 1 > self.half) {
            return Err(Error::InexactDivision);
        }
        // A1 = (N - alpha_0 D Y0 - A0 Y0) / Y1, exactly
        let mut rem = n.sub(k, &self.d_poly.scale(k, &alpha0).mul(k, &self.y0));
        rem = rem.sub(k, &a0_poly.mul(k, &self.y0));
        let a1_poly = rem.div_exact(k, &self.y1)?;
        // evaluate A0 and A1 at the nu_k
        let pts: Vec<BaseFieldElement> = (1..=self.half).map(|i| self.omega.nu[i].clone()).collect();
        let a0_vals = multipoint_eval(k, &a0_poly, &pts);
        let a1_vals = multipoint_eval(k, &a1_poly, &pts);
        let mut alpha = vec![k.zero(); d];
        alpha[0] = alpha0;
        for i in 1..=self.half {
            let dk_inv = k.inv(&self.dk_at_nuk[i])?;
            let c0 = k.mul(&a0_vals[i - 1], &dk_inv);
            let c1 = k.mul(&a1_vals[i - 1], &dk_inv);
            // alpha_k s_k + alpha_{-k} s_{-k} = c0; alpha_k + alpha_{-k} = c1
            let num = k.sub(&c0, &k.mul(&self.omega.s[d - i], &c1));
            let ak = k.mul(&num, &self.s_diff_inv[i]);
            alpha[i] = ak.clone();
            alpha[d - i] = k.sub(&c1, &ak);
        }
        Ok(CoordVector::new(Basis::Omega, alpha))
    }

    /// Inverse in the requested basis via the polynomial route.
    pub fn invert(&self, v: &CoordVector, theta: Option<&ThetaContext>) -> Result<CoordVector> {
        let k = &self.omega.fq;
        let omega_vec = match v.basis {
            Basis::Omega => v.clone(),
            Basis::Theta => {
                let th = theta.expect("theta context required for theta vectors");
                th.theta_to_omega(v).0
            }
            Basis::Psi => self.psi_to_omega_fast(v)?,
        };
        if omega_vec.coords.iter().all(|c| k.is_zero(c)) {
            return Err(Error::ZeroInversion);
        }
        let psi = self.omega_to_psi_fast(&omega_vec);
        let poly = Polynomial::from_coeffs(k, psi.coords);
        let inv = poly.inv_mod(k, &self.omega.pi)?;
        let mut coords = inv.coeffs;
        coords.resize(self.omega.d, k.zero());
        let inv_omega = self.psi_to_omega_fast(&CoordVector::new(Basis::Psi, coords))?;
        Ok(match v.basis {
            Basis::Omega => inv_omega,
            Basis::Theta => theta.unwrap().omega_to_theta(&inv_omega).0,
            Basis::Psi => self.omega_to_psi_fast(&inv_omega),
        })
    }

    /// Division a/b in the basis of the inputs.
    pub fn divide(
        &self,
        va: &CoordVector,
        vb: &CoordVector,
        theta: Option<&ThetaContext>,
    ) -> Result<CoordVector> {
        let inv = self.invert(vb, theta)?;
        match va.basis {
            Basis::Omega => Ok(self.omega.multiply(va, &inv).0),
            Basis::Theta => Ok(theta.expect("theta context").multiply(va, &inv).0),
            Basis::Psi => {
                let k = &self.omega.fq;
                let pa = Polynomial::from_coeffs(k, va.coords.clone());
                let pb = Polynomial::from_coeffs(k, inv.coords.clone());
                let prod = pa.mul_mod(k, &pb, &self.omega.pi)?;
                let mut coords = prod.coeffs;
                coords.resize(self.omega.d, k.zero());
                Ok(CoordVector::new(Basis::Psi, coords))
            }
        }
    }
}

/// Balanced combination of partial fractions (u_i + y v_i)/den_i.
fn combine_fractions(
    k: &BaseField,
    leaves: &[(Polynomial<BaseField>, Polynomial<BaseField>, Polynomial<BaseField>)],
) -> (Polynomial<BaseField>, Polynomial<BaseField>, Polynomial<BaseField>) {
    match leaves.len() {
        0 => (Polynomial::zero(), Polynomial::zero(), Polynomial::one(k)),
        1 => leaves[0].clone(),
        n => {
            let (lu, lv, ld) = combine_fractions(k, &leaves[..n / 2]);
            let (ru, rv, rd) = combine_fractions(k, &leaves[n / 2..]);
            (
                lu.mul(k, &rd).add(k, &ru.mul(k, &ld)),
                lv.mul(k, &rd).add(k, &rv.mul(k, &ld)),
                ld.mul(k, &rd),
            )
        }
    }
}

/// Inversion by Lagrange's theorem: one Frobenius-powered addition chain on
/// d-1 in the normal basis, one norm inversion in F_q, one scaling.
/// Returns the counted number of normal-basis multiplications as well.
pub fn lagrange_invert(theta: &ThetaContext, v: &CoordVector) -> Result<(CoordVector, u64)> {
    let k = theta.fq();
    let d = theta.d();
    if v.coords.iter().all(|c| k.is_zero(c)) {
        return Err(Error::ZeroInversion);
    }
    debug_assert_eq!(v.basis, Basis::Theta);
    let mut mult_count = 0u64;
    let mut mul = |a: &CoordVector, b: &CoordVector| -> CoordVector {
        mult_count += 1;
        theta.multiply(a, b).0
    };
    // chain for c_e = alpha^(q + q^2 + ... + q^e), e = d-1, via
    // c_{2m} = Phi^m(c_m) c_m and c_{m+1} = Phi(c_m) c_1.
    let e = (d - 1) as u64;
    let c1 = theta.frobenius(v, 1);
    let mut acc = c1.clone();
    let mut len = 1u64;
    let bits = 64 - e.leading_zeros();
    for i in (0..bits - 1).rev() {
        let shifted = theta.frobenius(&acc, len as i64);
        acc = mul(&shifted, &acc);
        len *= 2;
        if (e >> i) & 1 == 1 {
            let shifted = theta.frobenius(&acc, 1);
            acc = mul(&shifted, &c1);
            len += 1;
        }
    }
    debug_assert_eq!(len, e);
    // norm = alpha * acc lies in F_q: its theta vector is constant
    let norm_vec = mul(&acc, v);
    let n0 = norm_vec.coords[0].clone();
    if norm_vec.coords.iter().any(|c| *c != n0) {
        return Err(Error::SingularSystem);
    }
    if k.is_zero(&n0) {
        return Err(Error::ZeroInversion);
    }
    let n_inv = k.inv(&n0)?;
    let coords = acc.coords.iter().map(|c| k.mul(c, &n_inv)).collect();
    Ok((CoordVector::new(Basis::Theta, coords), mult_count))
}
