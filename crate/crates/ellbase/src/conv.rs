//! Cyclic convolution in F_q[Z/dZ], the workhorse of the normal-basis
//! multiplication tensor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BaseField, BaseFieldElement, Field};
use crate::poly::Polynomial;

/// Pluggable convolution algorithm. Quasi-linear methods can slot in here;
/// at desk scale the naive and Karatsuba routes are the ones validated by
/// the operation-count harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ConvolutionStrategy {
    #[default]
    Naive,
    Karatsuba,
}

/// c_j = sum_i a_i * b_((j-i) mod d)
pub fn cyclic_convolution(
    k: &BaseField,
    a: &[BaseFieldElement],
    b: &[BaseFieldElement],
    strategy: ConvolutionStrategy,
) -> Result<Vec<BaseFieldElement>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let d = a.len();
    if d == 0 {
        return Ok(vec![]);
    }
    match strategy {
        ConvolutionStrategy::Naive => {
            let mut out = vec![k.zero(); d];
            for (i, ai) in a.iter().enumerate() {
                if k.is_zero(ai) {
                    continue;
                }
                for (j, bj) in b.iter().enumerate() {
                    let idx = (i + j) % d;
                    let t = k.mul(ai, bj);
                    out[idx] = k.add(&out[idx], &t);
                }
            }
            Ok(out)
        }
        ConvolutionStrategy::Karatsuba => {
            let pa = Polynomial::from_coeffs(k, a.to_vec());
            let pb = Polynomial::from_coeffs(k, b.to_vec());
            let prod = pa.mul(k, &pb);
            let mut out = vec![k.zero(); d];
            for (i, c) in prod.coeffs.into_iter().enumerate() {
                out[i % d] = k.add(&out[i % d], &c);
            }
            Ok(out)
        }
    }
}

/// Inverse of `a` for the convolution product, when gcd(sum a_i x^i, x^d - 1) = 1.
pub fn convolution_inverse(
    k: &BaseField,
    a: &[BaseFieldElement],
) -> Result<Vec<BaseFieldElement>> {
    let d = a.len();
    if d == 0 {
        return Err(Error::NotInvertible);
    }
    let pa = Polynomial::from_coeffs(k, a.to_vec());
    if pa.is_zero() {
        return Err(Error::NotInvertible);
    }
    // x^d - 1
    let mut xu = vec![k.neg(&k.one())];
    xu.resize(d, k.zero());
    xu.push(k.one());
    let modulus = Polynomial::from_coeffs(k, xu);
    let inv = pa.inv_mod(k, &modulus).map_err(|_| Error::NotInvertible)?;
    let mut out = inv.coeffs;
    out.resize(d, k.zero());
    Ok(out)
}
