//! Arithmetic feasibility: the d_q invariant, the existence bounds, the
//! auxiliary base change, and the composite model for arbitrary (q, d).

use serde::{Deserialize, Serialize};

use crate::curve::{factorize, gcd_u64, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::ext::QuotientField;
use crate::field::{prime_power, BaseField, BaseFieldElement, ExtFieldElement, Field};
use crate::omega::{CoordVector, OmegaContext};
use crate::poly::{any_root, Polynomial};
use crate::rng::SplitMix64;
use crate::theta::ThetaContext;

/// Per-prime valuation profile of d_q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DqProfile {
    pub q: u64,
    pub d: u64,
    /// (prime, v_l(d), v_l(q-1), v_l(d_q))
    pub valuations: Vec<(u64, u32, u32, u32)>,
    pub dq: u64,
}

fn valuation(mut n: u64, l: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % l == 0 {
        n /= l;
        v += 1;
    }
    v
}

/// d_q per the three valuation rules: v_l(d_q) = v_l(d) when l is prime to
/// q-1, zero when v_l(d) = 0, and max(2 v_l(q-1) + 1, 2 v_l(d)) when l
/// divides both.
pub fn compute_dq(q: u64, d: u64) -> Result<DqProfile> {
    prime_power(q)?;
    if d < 2 {
        return Err(Error::Malformed("d must be >= 2".into()));
    }
    let mut dq = 1u64;
    let mut valuations = vec![];
    for (l, vd) in factorize(d) {
        let vq1 = valuation(q - 1, l);
        let vdq = if vq1 == 0 {
            vd
        } else {
            (2 * vq1 + 1).max(2 * vd)
        };
        valuations.push((l, vd, vq1, vdq));
        for _ in 0..vdq {
            dq = dq.checked_mul(l).ok_or(Error::Malformed("d_q overflow".into()))?;
        }
    }
    Ok(DqProfile { q, d, valuations, dq })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistenceFlags {
    /// d_q <= 2 sqrt(q): an elliptic basis is guaranteed to exist.
    pub omega_guaranteed: bool,
    /// d_q <= sqrt(q): the normal basis (and a suitable R) are guaranteed.
    pub theta_guaranteed: bool,
}

pub fn existence_check(q: u64, d: u64) -> Result<ExistenceFlags> {
    let dq = compute_dq(q, d)?.dq;
    let dq2 = dq.checked_mul(dq);
    Ok(ExistenceFlags {
        omega_guaranteed: dq2.map_or(false, |s| s <= 4 * q),
        theta_guaranteed: dq2.map_or(false, |s| s <= q),
    })
}

/// Euler's phi by trial division.
pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (l, _) in factorize(n) {
        out = out / l * (l - 1);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseChangePlan {
    pub q: u64,
    pub d: u64,
    /// Auxiliary degree: gcd(f, d phi(d)) = 1 and d_q <= q^(f/2).
    pub f: u64,
    /// 1 <= F <= d-1 with f F = 1 mod d.
    pub f_inverse: u64,
    /// Q = q^f (as a string, since it can exceed u64 for stress inputs).
    pub q_big: String,
}

/// Cap generously above the known O((log d)^2 (log log d)^2) bound.
pub fn base_change_cap(d: u64) -> u64 {
    let lg = 64 - d.leading_zeros() as u64;
    4 * (lg + 1) * (lg + 1) + 16
}

/// Smallest f with gcd(f, d phi(d)) = 1 and d_q^2 <= q^f.
pub fn find_base_change(q: u64, d: u64) -> Result<BaseChangePlan> {
    let dq = compute_dq(q, d)?.dq;
    let dphi = d.checked_mul(euler_phi(d)).ok_or(Error::Malformed("d phi(d) overflow".into()))?;
    let cap = base_change_cap(d);
    let dq2 = dq as u128 * dq as u128;
    let mut qf: u128 = 1;
    let mut overflowed = false;
    for f in 1..=cap {
        if !overflowed {
            qf = match qf.checked_mul(q as u128) {
                Some(v) => v,
                None => {
                    overflowed = true;
                    qf
                }
            };
        }
        if gcd_u64(f, dphi) != 1 {
            continue;
        }
        if overflowed || dq2 <= qf {
            let f_inverse = mod_inverse(f % d, d).expect("gcd(f, d) = 1");
            let q_big = {
                let mut b = crate::bitint::BitInt::from_u64(1);
                for _ in 0..f {
                    b.mul_u64(q);
                }
                bitint_to_decimal(&b)
            };
            return Ok(BaseChangePlan { q, d, f, f_inverse, q_big });
        }
    }
    Err(Error::SearchCapExceeded { cap })
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(1);
    }
    let (mut r0, mut r1) = (a as i128, m as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let qq = r0 / r1;
        (r0, r1) = (r1, r0 - qq * r1);
        (s0, s1) = (s1, s0 - qq * s1);
    }
    if r0 != 1 {
        return None;
    }
    let mut s = s0 % m as i128;
    if s < 0 {
        s += m as i128;
    }
    Some(s as u64)
}

fn bitint_to_decimal(b: &crate::bitint::BitInt) -> String {
    // repeated division by 10 over the bits; desk-scale sizes only
    let mut bits: Vec<bool> = (0..b.bit_len()).map(|i| b.bit(i)).collect();
    if bits.is_empty() {
        return "0".into();
    }
    let mut digits = vec![0u8];
    for bit in bits.drain(..).rev() {
        // digits = digits * 2 + bit
        let mut carry = if bit { 1u8 } else { 0 };
        for d in digits.iter_mut() {
            let v = *d * 2 + carry;
            *d = v % 10;
            carry = v / 10;
        }
        if carry > 0 {
            digits.push(carry);
        }
    }
    digits.iter().rev().map(|d| (b'0' + d) as char).collect()
}

// ---------------------------------------------------------------------------
// The composite model: base change + elliptic normal basis over F_Q
// ---------------------------------------------------------------------------

/// Model of F_{q^d} built over the auxiliary extension F_Q, Q = q^f.
/// Elements are stored as d theta coordinates over F_Q (a blow-up of f);
/// the q-Frobenius is the F-fold cyclic shift.
pub struct XiModel {
    pub plan: BaseChangePlan,
    /// The user-facing field `F_{q^d} = F_q[x]/h`.
    pub small_field: BaseField,
    pub h_poly: Polynomial<BaseField>,
    pub theta: ThetaContext,
    /// Image of the F_q generator w inside F_Q (powers cached).
    w_embed_powers: Vec<BaseFieldElement>,
    /// Powers r^i of the embedded root of h inside L_big, i < d.
    root_powers: Vec<ExtFieldElement>,
    /// Row-echelon solver data for export: columns are the flattened
    /// F_p-coordinate vectors of w^j r^i.
    export_matrix: Vec<Vec<u64>>,
    export_pivots: Vec<usize>,
    p: u64,
}

impl XiModel {
    pub fn build(q: u64, d: u64, seed: u64) -> Result<XiModel> {
        let plan = find_base_change(q, d)?;
        let (p, m) = prime_power(q)?;
        let mf = m as u64 * plan.f;
        if mf > 48 {
            return Err(Error::Malformed("composite model degree too large for the desk build".into()));
        }
        let small_field = BaseField::extension(p, m)?;
        let big_field = BaseField::extension(p, mf as u32)?;
        let mut rng = SplitMix64::new(seed);

        // h: canonical irreducible of degree d over F_q
        let h_poly = minimal_irreducible(&small_field, d as usize)?;

        // a theta context of degree d over F_Q
        let theta = build_theta_over(&big_field, d as usize, &mut rng)?;
        let ell = theta.omega.ell.clone();

        // embed F_q into F_Q: w -> a root of the F_q modulus
        let g_lifted = Polynomial::from_coeffs(
            &big_field,
            small_field.modulus().iter().map(|&c| big_field.from_u64(c)).collect(),
        );
        let w_root = if m == 1 {
            big_field.zero()
        } else {
            any_root(&big_field, &g_lifted, &mut rng)?
        };
        let mut w_embed_powers = vec![big_field.one()];
        for _ in 1..m {
            w_embed_powers.push(big_field.mul(w_embed_powers.last().unwrap(), &w_root));
        }

        // lift h to F_Q[x] and find a root r in L_big
        let embed_small = |c: &BaseFieldElement| -> BaseFieldElement {
            let mut acc = big_field.zero();
            for (i, &digit) in c.0.iter().enumerate() {
                let t = big_field.mul(&big_field.from_u64(digit), &w_embed_powers[i]);
                acc = big_field.add(&acc, &t);
            }
            acc
        };
        let h_lifted = Polynomial::from_coeffs(
            &ell.base().clone(),
            h_poly.coeffs.iter().map(embed_small).collect(),
        );
        let h_in_l = Polynomial::from_coeffs(
            &ell,
            h_lifted.coeffs.iter().map(|c| ell.embed_base(c)).collect::<Vec<_>>(),
        );
        let r = any_root(&ell, &h_in_l, &mut rng)?;
        let mut root_powers = vec![ell.one()];
        for _ in 1..d {
            root_powers.push(ell.mul(root_powers.last().unwrap(), &r));
        }

        // export solver: columns w^j r^i flattened over F_p
        let nrows = (d as usize) * mf as usize;
        let ncols = (d as usize) * m as usize;
        let mut cols: Vec<Vec<u64>> = Vec::with_capacity(ncols);
        for rp in &root_powers {
            for wj in &w_embed_powers {
                let elem: ExtFieldElement =
                    rp.iter().map(|c| big_field.mul(c, wj)).collect();
                cols.push(flatten(&elem, nrows));
            }
        }
        let (export_matrix, export_pivots) = row_echelon(p, cols, nrows);

        Ok(XiModel {
            plan,
            small_field,
            h_poly,
            theta,
            w_embed_powers,
            root_powers,
            export_matrix,
            export_pivots,
            p,
        })
    }

    pub fn blowup_factor(&self) -> u64 {
        self.plan.f
    }

    /// Import an element of F_{q^d} (coefficients of powers of the root of h).
    pub fn import(&self, coeffs: &[BaseFieldElement]) -> Result<CoordVector> {
        if coeffs.len() != self.plan.d as usize {
            return Err(Error::LengthMismatch { left: coeffs.len(), right: self.plan.d as usize });
        }
        let ell = &self.theta.omega.ell;
        let big = ell.base();
        let mut acc = ell.zero();
        for (ci, rp) in coeffs.iter().zip(&self.root_powers) {
            let mut lifted = big.zero();
            for (j, &digit) in ci.0.iter().enumerate() {
                let t = big.mul(&big.from_u64(digit), &self.w_embed_powers[j]);
                lifted = big.add(&lifted, &t);
            }
            let term: ExtFieldElement = rp.iter().map(|c| big.mul(c, &lifted)).collect();
            acc = ell.add(&acc, &term);
        }
        Ok(self.theta.from_field_element(&acc))
    }

    /// Export back to F_{q^d} coordinates; errors if the element is not in
    /// the embedded subfield.
    pub fn export(&self, v: &CoordVector) -> Result<Vec<BaseFieldElement>> {
        let elem = self.theta.to_field_element(v);
        let rhs = flatten(&elem, self.theta.omega.d * self.theta.omega.fq.m());
        let sol = solve_echelon(self.p, &self.export_matrix, &self.export_pivots, &rhs)
            .ok_or(Error::Malformed("element is not in the embedded subfield".into()))?;
        // regroup into d coefficients of m digits
        let m = self.small_field.m();
        let out = sol
            .chunks(m)
            .map(|ch| BaseFieldElement(ch.to_vec()))
            .collect();
        Ok(out)
    }

    /// The q-Frobenius of the small field: Phi_Q^F, a cyclic shift by F.
    pub fn frobenius_q(&self, v: &CoordVector) -> CoordVector {
        self.theta.frobenius(v, self.plan.f_inverse as i64)
    }

    pub fn multiply(&self, a: &CoordVector, b: &CoordVector) -> CoordVector {
        self.theta.multiply(a, b).0
    }

    /// Independent oracle field `F_{q^d} = F_q[x]/h` for cross-checks.
    pub fn small_oracle(&self) -> Result<QuotientField> {
        QuotientField::new(self.small_field.clone(), self.h_poly.clone())
    }
}

fn flatten(e: &ExtFieldElement, nrows: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(nrows);
    for c in e {
        out.extend(c.0.iter().copied());
    }
    debug_assert_eq!(out.len(), nrows);
    out
}

/// Gaussian elimination over F_p on column vectors; returns reduced rows of
/// the augmented-identity transform and pivot rows, for repeated solves.
fn row_echelon(p: u64, cols: Vec<Vec<u64>>, nrows: usize) -> (Vec<Vec<u64>>, Vec<usize>) {
    use crate::field::fp;
    let ncols = cols.len();
    // work on the transpose: rows of the matrix A (nrows x ncols)
    let mut a: Vec<Vec<u64>> = (0..nrows)
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    let mut pivots = vec![];
    let mut rank_row = 0;
    // track the row operations applied, as an augmented identity
    for r in 0..nrows {
        a[r].extend((0..nrows).map(|i| if i == r { 1 } else { 0 }));
    }
    for col in 0..ncols {
        let piv = (rank_row..nrows).find(|&r| a[r][col] != 0);
        let piv = match piv {
            Some(r) => r,
            None => continue,
        };
        a.swap(rank_row, piv);
        let inv = fp::inv(p, a[rank_row][col]).unwrap();
        for v in a[rank_row].iter_mut() {
            *v = fp::mul(p, *v, inv);
        }
        for r in 0..nrows {
            if r != rank_row && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..ncols + nrows {
                    let t = fp::mul(p, f, a[rank_row][j]);
                    a[r][j] = fp::sub(p, a[r][j], t);
                }
            }
        }
        pivots.push(col);
        rank_row += 1;
        if rank_row == nrows {
            break;
        }
    }
    (a, pivots)
}

/// Solve A x = rhs given the echelon transform from row_echelon; None when
/// inconsistent.
fn solve_echelon(
    p: u64,
    echelon: &[Vec<u64>],
    pivots: &[usize],
    rhs: &[u64],
) -> Option<Vec<u64>> {
    use crate::field::fp;
    let nrows = rhs.len();
    let ncols = echelon[0].len() - nrows;
    // transformed rhs
    let trhs: Vec<u64> = echelon
        .iter()
        .map(|row| {
            let mut acc = 0u64;
            for (j, &v) in rhs.iter().enumerate() {
                acc = fp::add(p, acc, fp::mul(p, row[ncols + j], v));
            }
            acc
        })
        .collect();
    let mut x = vec![0u64; ncols];
    for (r, &col) in pivots.iter().enumerate() {
        x[col] = trhs[r];
    }
    // consistency: rows beyond the rank must have zero rhs
    for r in pivots.len()..nrows {
        if trhs[r] != 0 {
            return None;
        }
    }
    // back-substitute the non-pivot structure: echelon rows are fully reduced,
    // so x as assigned already satisfies A x = rhs when consistent; verify.
    for (r, row) in echelon.iter().enumerate().take(pivots.len()) {
        let mut acc = 0u64;
        for c in 0..ncols {
            acc = fp::add(p, acc, fp::mul(p, row[c], x[c]));
        }
        if acc != trhs[r] {
            return None;
        }
    }
    Some(x)
}

/// Lexicographically first monic irreducible of the given degree.
pub fn minimal_irreducible(k: &BaseField, degree: usize) -> Result<Polynomial<BaseField>> {
    let q = k.q();
    let mut counter = vec![0u64; degree];
    loop {
        let mut coeffs: Vec<BaseFieldElement> =
            counter.iter().map(|&i| k.element_from_index(i)).collect();
        coeffs.push(k.one());
        let f = Polynomial::from_coeffs(k, coeffs);
        if f.is_irreducible(k) {
            return Ok(f);
        }
        let mut i = 0;
        loop {
            if i == degree {
                return Err(Error::SearchExhausted("minimal irreducible"));
            }
            counter[i] += 1;
            if counter[i] < q {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// Search a curve over the given field with a point of order d and build the
/// full normal-basis context.
pub fn build_theta_over(
    field: &BaseField,
    d: usize,
    rng: &mut SplitMix64,
) -> Result<ThetaContext> {
    for _ in 0..4096 {
        let e = match WeierstrassCurve::new(
            field.clone(),
            field.random(rng),
            field.random(rng),
            field.random(rng),
            field.random(rng),
            field.random(rng),
        ) {
            Ok(e) => e,
            Err(_) => continue,
        };
        let m = match e.group_order() {
            Ok(m) => m,
            Err(_) => continue,
        };
        if m % d as u64 != 0 {
            continue;
        }
        let t = match e.find_point_of_order(d as u64, rng) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let omega = match OmegaContext::build(&e, &t, None, rng.next_u64()) {
            Ok(o) => o,
            Err(_) => continue,
        };
        match ThetaContext::build(omega, None, rng.next_u64()) {
            Ok(th) => return Ok(th),
            Err(_) => continue,
        }
    }
    Err(Error::SearchExhausted("curve search"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dq_examples() {
        // q = 654323: q - 1 = 2 * 19 * 67 * 257, d = 14 -> d_q = 2^3 * 7 = 56
        let prof = compute_dq(654323, 14).unwrap();
        assert_eq!(prof.dq, 56);
        // d prime to q-1
        assert_eq!(compute_dq(7, 5).unwrap().dq, 5);
        // q=7, d=6: both 2 and 3 divide gcd(6, 6)
        assert_eq!(compute_dq(7, 6).unwrap().dq, 216);
        assert!(compute_dq(12, 5).is_err());
    }

    #[test]
    fn existence_examples() {
        let f = existence_check(7, 5).unwrap();
        assert!(f.omega_guaranteed); // 25 <= 28
        assert!(!f.theta_guaranteed); // 25 > 7
        let f = existence_check(654323, 14).unwrap();
        assert!(f.omega_guaranteed && f.theta_guaranteed);
        let f = existence_check(2, 3).unwrap();
        assert!(!f.omega_guaranteed && !f.theta_guaranteed); // 9 > 8
    }

    #[test]
    fn base_change_examples() {
        let p = find_base_change(2, 3).unwrap();
        assert_eq!((p.f, p.f_inverse), (5, 2));
        let p = find_base_change(7, 5).unwrap();
        assert_eq!((p.f, p.f_inverse), (3, 2));
        // no base change needed when d_q <= sqrt(q)
        let p = find_base_change(654323, 14).unwrap();
        assert_eq!((p.f, p.f_inverse), (1, 1));
    }

    #[test]
    fn extdq_lemma_bullets() {
        // over q in small prime powers <= 64 and d <= 30
        let qs: Vec<u64> = (2..=64).filter(|&q| prime_power(q).is_ok()).collect();
        for &q in &qs {
            for d in 2..=30u64 {
                let dq = compute_dq(q, d).unwrap().dq;
                if gcd_u64(d, q - 1) == 1 {
                    assert_eq!(dq, d, "q={} d={}", q, d);
                }
                // d_q <= d^2 (q-1)^2
                assert!(
                    dq as u128 <= (d as u128).pow(2) * ((q - 1) as u128).pow(2),
                    "q={} d={}",
                    q,
                    d
                );
                // squarefree q-1 implies d_q <= d^3
                let squarefree = factorize(q - 1).iter().all(|&(_, e)| e == 1);
                if squarefree {
                    assert!(dq as u128 <= (d as u128).pow(3), "q={} d={}", q, d);
                }
                // v_l(d_q) = 0 exactly when v_l(d) = 0
                for (l, vd, _, vdq) in compute_dq(q, d).unwrap().valuations {
                    assert_eq!(vd == 0, vdq == 0, "q={} d={} l={}", q, d, l);
                }
                // d_{q^f} = d_q for f coprime to d phi(d): test small f where
                // q^f still fits
                let dphi = d * euler_phi(d);
                for f in 2..=6u32 {
                    if gcd_u64(f as u64, dphi) != 1 {
                        continue;
                    }
                    if let Some(qf) = q.checked_pow(f) {
                        if prime_power(qf).is_ok() {
                            assert_eq!(
                                compute_dq(qf, d).unwrap().dq,
                                dq,
                                "q={} d={} f={}",
                                q,
                                d,
                                f
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn base_change_satisfies_conditions_under_cap() {
        for q in [2u64, 3, 5] {
            for d in 2..=200u64 {
                let plan = find_base_change(q, d).unwrap();
                let dphi = d * euler_phi(d);
                assert_eq!(gcd_u64(plan.f, dphi), 1);
                assert!((plan.f * plan.f_inverse) % d == 1);
                assert!(plan.f <= base_change_cap(d), "q={} d={} f={}", q, d, plan.f);
                // d_q^2 <= q^f
                let dq = compute_dq(q, d).unwrap().dq;
                let mut qf = crate::bitint::BitInt::from_u64(1);
                for _ in 0..plan.f {
                    qf.mul_u64(q);
                }
                let mut dq2 = crate::bitint::BitInt::from_u64(dq);
                dq2.mul_u64(dq);
                assert_ne!(
                    dq2.cmp_value(&qf),
                    std::cmp::Ordering::Greater,
                    "q={} d={}",
                    q,
                    d
                );
            }
        }
    }
}
