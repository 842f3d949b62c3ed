/// Unsigned integer with enough headroom for field orders q^d at desk scale.
///
/// Only the handful of operations needed to drive square-and-multiply
/// exponent loops are implemented. Limbs are little-endian base 2^64.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitInt {
    limbs: Vec<u64>,
}

impl BitInt {
    pub fn from_u64(n: u64) -> Self {
        let mut v = BitInt { limbs: vec![n] };
        v.trim();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn to_u64(&self) -> Option<u64> {
        if self.limbs.len() <= 1 {
            Some(*self.limbs.first().unwrap_or(&0))
        } else {
            None
        }
    }

    fn trim(&mut self) {
        while self.limbs.len() > 1 && *self.limbs.last().unwrap() == 0 {
            self.limbs.pop();
        }
    }

    pub fn mul_u64(&mut self, m: u64) {
        let mut carry: u128 = 0;
        for l in self.limbs.iter_mut() {
            let t = (*l as u128) * (m as u128) + carry;
            *l = t as u64;
            carry = t >> 64;
        }
        if carry > 0 {
            self.limbs.push(carry as u64);
        }
        self.trim();
    }

    pub fn add_u64(&mut self, a: u64) {
        let mut carry = a as u128;
        for l in self.limbs.iter_mut() {
            if carry == 0 {
                break;
            }
            let t = *l as u128 + carry;
            *l = t as u64;
            carry = t >> 64;
        }
        if carry > 0 {
            self.limbs.push(carry as u64);
        }
    }

    /// Subtract a small constant; self must be >= a.
    pub fn sub_u64(&mut self, a: u64) {
        let mut borrow = a;
        for l in self.limbs.iter_mut() {
            if borrow == 0 {
                break;
            }
            let (r, under) = l.overflowing_sub(borrow);
            *l = r;
            borrow = if under { 1 } else { 0 };
        }
        assert_eq!(borrow, 0, "BitInt underflow");
        self.trim();
    }

    pub fn is_even(&self) -> bool {
        self.limbs[0] & 1 == 0
    }

    pub fn div2(&mut self) {
        let mut carry = 0u64;
        for l in self.limbs.iter_mut().rev() {
            let new_carry = *l & 1;
            *l = (*l >> 1) | (carry << 63);
            carry = new_carry;
        }
        self.trim();
    }

    pub fn bit_len(&self) -> usize {
        let top = *self.limbs.last().unwrap();
        if top == 0 {
            // canonical zero
            return 0;
        }
        (self.limbs.len() - 1) * 64 + (64 - top.leading_zeros() as usize)
    }

    pub fn bit(&self, i: usize) -> bool {
        let (limb, off) = (i / 64, i % 64);
        if limb >= self.limbs.len() {
            return false;
        }
        (self.limbs[limb] >> off) & 1 == 1
    }

    /// base^exp for small operands, as a BitInt.
    pub fn pow_u64(base: u64, exp: u32) -> Self {
        let mut r = BitInt::from_u64(1);
        for _ in 0..exp {
            r.mul_u64(base);
        }
        r
    }

    pub fn cmp_value(&self, other: &BitInt) -> std::cmp::Ordering {
        let la = self.bit_len();
        let lb = other.bit_len();
        if la != lb {
            return la.cmp(&lb);
        }
        for i in (0..la).rev() {
            match (self.bit(i), other.bit(i)) {
                (true, false) => return std::cmp::Ordering::Greater,
                (false, true) => return std::cmp::Ordering::Less,
                _ => {}
            }
        }
        std::cmp::Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_and_bits() {
        let mut n = BitInt::pow_u64(1009, 13);
        // 1009^13 mod 2 = 1
        assert!(!n.is_even());
        n.sub_u64(1);
        assert!(n.is_even());
        n.div2();
        // spot-check against u128 for a smaller case
        let small = BitInt::pow_u64(7, 15);
        assert_eq!(small.to_u64(), Some(7u64.pow(15)));
        let mut big = BitInt::pow_u64(2, 100);
        assert_eq!(big.bit_len(), 101);
        assert!(big.bit(100));
        assert!(!big.bit(99));
        big.sub_u64(1);
        assert_eq!(big.bit_len(), 100);
        assert!(big.bit(0) && big.bit(99));
    }
}
