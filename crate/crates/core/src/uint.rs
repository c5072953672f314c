//! Fixed-width 256-bit unsigned integers for signer-vector counters.
//!
//! Counters live in `[0, p)` for a prime `p` of up to 255 bits, so a single
//! fixed width covers every backend and addition never overflows the
//! representation. Limbs are stored little-endian.

use std::cmp::Ordering;
use std::fmt;

/// Unsigned 256-bit integer, four little-endian `u64` limbs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct U256(pub [u64; 4]);

impl U256 {
    pub const ZERO: U256 = U256([0, 0, 0, 0]);
    pub const ONE: U256 = U256([1, 0, 0, 0]);
    pub const MAX: U256 = U256([u64::MAX; 4]);

    pub const fn from_u64(v: u64) -> Self {
        U256([v, 0, 0, 0])
    }

    pub const fn from_u128(v: u128) -> Self {
        U256([v as u64, (v >> 64) as u64, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0, 0]
    }

    /// Value as `u64` if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        if self.0[1] == 0 && self.0[2] == 0 && self.0[3] == 0 {
            Some(self.0[0])
        } else {
            None
        }
    }

    /// Value as `u128` if it fits.
    pub fn to_u128(&self) -> Option<u128> {
        if self.0[2] == 0 && self.0[3] == 0 {
            Some((self.0[0] as u128) | ((self.0[1] as u128) << 64))
        } else {
            None
        }
    }

    /// Position of the highest set bit plus one; 0 for zero.
    pub fn bits(&self) -> u32 {
        for i in (0..4).rev() {
            if self.0[i] != 0 {
                return 64 * i as u32 + (64 - self.0[i].leading_zeros());
            }
        }
        0
    }

    pub fn bit(&self, i: u32) -> bool {
        debug_assert!(i < 256);
        (self.0[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    /// Plain wrapping addition, returning the carry out of the top limb.
    fn add_carry(&self, rhs: &U256) -> (U256, bool) {
        let mut out = [0u64; 4];
        let mut carry = false;
        for i in 0..4 {
            let (s, c1) = self.0[i].overflowing_add(rhs.0[i]);
            let (s, c2) = s.overflowing_add(carry as u64);
            out[i] = s;
            carry = c1 || c2;
        }
        (U256(out), carry)
    }

    fn sub_borrow(&self, rhs: &U256) -> (U256, bool) {
        let mut out = [0u64; 4];
        let mut borrow = false;
        for i in 0..4 {
            let (d, b1) = self.0[i].overflowing_sub(rhs.0[i]);
            let (d, b2) = d.overflowing_sub(borrow as u64);
            out[i] = d;
            borrow = b1 || b2;
        }
        (U256(out), borrow)
    }

    /// `(self + rhs) mod p` for operands already reduced below `p`.
    ///
    /// Returns the reduced sum and whether the modulus was applied (a wrap).
    /// Callers on the honest protocol path assert that wraps never happen.
    pub fn add_mod(&self, rhs: &U256, p: &U256) -> (U256, bool) {
        debug_assert!(self < p && rhs < p);
        let (sum, carry) = self.add_carry(rhs);
        if carry || &sum >= p {
            let (reduced, borrow) = sum.sub_borrow(p);
            debug_assert!(borrow == carry || !carry);
            (reduced, true)
        } else {
            (sum, false)
        }
    }

    /// Saturating conversion to `f64`, for reporting only.
    pub fn to_f64_lossy(&self) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &l)| l as f64 * 2f64.powi(64 * i as i32))
            .sum()
    }
}

impl PartialOrd for U256 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for U256 {
    fn cmp(&self, other: &Self) -> Ordering {
        for i in (0..4).rev() {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl From<u64> for U256 {
    fn from(v: u64) -> Self {
        U256::from_u64(v)
    }
}

impl fmt::Display for U256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // Repeated short division by 10^19 keeps the loop count small.
        const CHUNK: u64 = 10_000_000_000_000_000_000;
        let mut limbs = self.0;
        let mut chunks: Vec<u64> = Vec::new();
        while limbs != [0, 0, 0, 0] {
            let mut rem: u128 = 0;
            for i in (0..4).rev() {
                let acc = (rem << 64) | limbs[i] as u128;
                limbs[i] = (acc / CHUNK as u128) as u64;
                rem = acc % CHUNK as u128;
            }
            chunks.push(rem as u64);
        }
        let mut s = chunks.pop().unwrap().to_string();
        while let Some(c) = chunks.pop() {
            s.push_str(&format!("{c:019}"));
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for U256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_small() -> U256 {
        U256::from_u64(97)
    }

    #[test]
    fn add_mod_wraps_at_p() {
        let p = p_small();
        let (v, wrapped) = U256::from_u64(96).add_mod(&U256::ONE, &p);
        assert!(wrapped);
        assert_eq!(v, U256::ZERO);
    }

    #[test]
    fn add_mod_plain() {
        let p = p_small();
        let (v, wrapped) = U256::from_u64(40).add_mod(&U256::from_u64(41), &p);
        assert!(!wrapped);
        assert_eq!(v, U256::from_u64(81));
    }

    #[test]
    fn add_mod_with_carry_out() {
        // p = 2^256 - 1 so the intermediate sum overflows the top limb:
        // (2^256 - 2) + (2^256 - 2) = 2^257 - 4, reduced once to 2^256 - 3.
        let p = U256::MAX;
        let a = U256([u64::MAX - 1, u64::MAX, u64::MAX, u64::MAX]);
        let (v, wrapped) = a.add_mod(&a, &p);
        assert!(wrapped);
        assert_eq!(v, U256([u64::MAX - 2, u64::MAX, u64::MAX, u64::MAX]));
    }

    #[test]
    fn ordering_is_big_endian_on_limbs() {
        assert!(U256([0, 0, 0, 1]) > U256([u64::MAX, u64::MAX, u64::MAX, 0]));
        assert!(U256::from_u64(5) < U256::from_u64(6));
    }

    #[test]
    fn display_decimal() {
        assert_eq!(U256::ZERO.to_string(), "0");
        assert_eq!(U256::from_u64(1278).to_string(), "1278");
        let v = U256::from_u128(340_282_366_920_938_463_463_374_607_431_768_211_455u128);
        assert_eq!(v.to_string(), "340282366920938463463374607431768211455");
    }

    #[test]
    fn bits_and_bit() {
        assert_eq!(U256::ZERO.bits(), 0);
        assert_eq!(U256::ONE.bits(), 1);
        assert_eq!(U256([0, 1, 0, 0]).bits(), 65);
        assert!(U256([0, 1, 0, 0]).bit(64));
        assert!(!U256([0, 1, 0, 0]).bit(63));
    }

    #[test]
    fn u64_u128_round_trips() {
        assert_eq!(U256::from_u64(77).to_u64(), Some(77));
        assert_eq!(U256([0, 3, 0, 0]).to_u64(), None);
        let v = 1u128 << 100;
        assert_eq!(U256::from_u128(v).to_u128(), Some(v));
        assert_eq!(U256([0, 0, 1, 0]).to_u128(), None);
    }
}
