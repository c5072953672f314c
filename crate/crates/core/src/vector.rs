//! Signer vectors: per-guardian counters of how many times each signature
//! share has been folded into an aggregate, reduced mod the group order.
//!
//! # Wire format
//!
//! `encode_compact` serializes a vector as the concatenation of its entries,
//! each a variable-length integer: little-endian 7-bit groups, one group per
//! byte, bit 7 set on every byte except the last. Encodings are minimal
//! (no trailing zero groups; the value 0 is the single byte `0x00`), so the
//! encoding of a vector is canonical. There is no header; the decoder is
//! given the guardian count `n` and the modulus `p` out of band and consumes
//! exactly `n` entries. A 256-bit entry takes at most 37 bytes; entries in
//! the hundreds — the common case — take one or two.

use thiserror::Error;

use crate::uint::U256;

/// Largest number of 7-bit groups a 256-bit value can span.
const MAX_VARINT_GROUPS: usize = 37;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum VectorError {
    #[error("guardian index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("vector must not be empty")]
    Empty,
    #[error("decode: input truncated")]
    Truncated,
    #[error("decode: non-canonical varint")]
    NonCanonical,
    #[error("decode: entry does not fit in 256 bits")]
    Overflow,
    #[error("decode: entry not below the group order")]
    EntryOutOfRange,
    #[error("decode: {0} trailing bytes after the last entry")]
    TrailingBytes(usize),
}

/// Result of an in-place merge: how many entries wrapped mod p.
///
/// Honest protocol executions never wrap; the simulator asserts as much.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MergeOutcome {
    pub wrapped_entries: usize,
}

/// The signer vector `c`: entry `u` counts how many times guardian `u`'s
/// signature is folded into the aggregate, mod the group order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignerVector {
    entries: Vec<U256>,
}

impl SignerVector {
    /// Unit vector for guardian `i` in a network of `n`: entry `i` is 1,
    /// the rest 0.
    pub fn init(i: usize, n: usize) -> Result<Self, VectorError> {
        if n == 0 {
            return Err(VectorError::Empty);
        }
        if i >= n {
            return Err(VectorError::IndexOutOfRange { index: i, n });
        }
        let mut entries = vec![U256::ZERO; n];
        entries[i] = U256::ONE;
        Ok(SignerVector { entries })
    }

    pub fn zero(n: usize) -> Self {
        SignerVector {
            entries: vec![U256::ZERO; n],
        }
    }

    pub fn from_entries(entries: Vec<U256>) -> Self {
        SignerVector { entries }
    }

    /// Unit vector scaled by `k`: entry `i` is `k`, the rest 0.
    /// `k` must already be reduced below `p`.
    pub fn scaled_unit(i: usize, n: usize, k: U256, p: &U256) -> Result<Self, VectorError> {
        if &k >= p {
            return Err(VectorError::EntryOutOfRange);
        }
        let mut v = SignerVector::init(i, n)?;
        v.entries[i] = k;
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, u: usize) -> &U256 {
        &self.entries[u]
    }

    pub fn entries(&self) -> &[U256] {
        &self.entries
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.iter().all(U256::is_zero)
    }

    /// Entrywise `(self + other) mod p`.
    pub fn add_mod_p(&self, other: &SignerVector, p: &U256) -> Result<SignerVector, VectorError> {
        let mut out = self.clone();
        out.merge_in_place(other, p)?;
        Ok(out)
    }

    /// Entrywise `self += other mod p`, reporting wraps.
    pub fn merge_in_place(
        &mut self,
        other: &SignerVector,
        p: &U256,
    ) -> Result<MergeOutcome, VectorError> {
        if self.len() != other.len() {
            return Err(VectorError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let mut wrapped = 0usize;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if b.is_zero() {
                continue;
            }
            let (sum, w) = a.add_mod(b, p);
            *a = sum;
            wrapped += w as usize;
        }
        Ok(MergeOutcome {
            wrapped_entries: wrapped,
        })
    }

    /// Number of unique signers: entries strictly greater than zero.
    pub fn unique_signers(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero()).count()
    }

    pub fn max_entry(&self) -> U256 {
        self.entries.iter().copied().max().unwrap_or(U256::ZERO)
    }

    /// Canonical compact wire encoding; see the module docs.
    pub fn encode_compact(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.entries.len() * 2);
        for e in &self.entries {
            encode_varint_u256(e, &mut out);
        }
        out
    }

    /// Strict decode of `encode_compact` output: exactly `n` canonical
    /// varints, each below `p`, with no bytes left over.
    pub fn decode_compact(bytes: &[u8], n: usize, p: &U256) -> Result<SignerVector, VectorError> {
        if n == 0 {
            return Err(VectorError::Empty);
        }
        let mut entries = Vec::with_capacity(n);
        let mut pos = 0usize;
        for _ in 0..n {
            let (value, used) = decode_varint_u256(&bytes[pos..])?;
            if &value >= p {
                return Err(VectorError::EntryOutOfRange);
            }
            entries.push(value);
            pos += used;
        }
        if pos != bytes.len() {
            return Err(VectorError::TrailingBytes(bytes.len() - pos));
        }
        Ok(SignerVector { entries })
    }
}

/// Append the minimal varint encoding of `v`.
pub fn encode_varint_u256(v: &U256, out: &mut Vec<u8>) {
    let mut limbs = v.0;
    loop {
        let group = (limbs[0] & 0x7f) as u8;
        shr7(&mut limbs);
        if limbs == [0, 0, 0, 0] {
            out.push(group);
            return;
        }
        out.push(group | 0x80);
    }
}

/// Convenience for `u64` values (message framing uses the same varint form).
pub fn encode_varint_u64(v: u64, out: &mut Vec<u8>) {
    encode_varint_u256(&U256::from_u64(v), out);
}

pub fn varint_len_u64(v: u64) -> usize {
    let mut out = Vec::with_capacity(10);
    encode_varint_u64(v, &mut out);
    out.len()
}

/// Decode one canonical varint; returns the value and the bytes consumed.
pub fn decode_varint_u256(bytes: &[u8]) -> Result<(U256, usize), VectorError> {
    let mut limbs = [0u64; 4];
    for (i, &byte) in bytes.iter().enumerate() {
        if i >= MAX_VARINT_GROUPS {
            return Err(VectorError::Overflow);
        }
        let group = (byte & 0x7f) as u64;
        let shift = 7 * i;
        // The 37th group only has 256 - 7*36 = 4 usable bits.
        if shift + 7 > 256 && group >> (256 - shift) != 0 {
            return Err(VectorError::Overflow);
        }
        let limb = shift / 64;
        let off = shift % 64;
        limbs[limb] |= group << off;
        if off > 57 && limb + 1 < 4 {
            limbs[limb + 1] |= group >> (64 - off);
        }
        if byte & 0x80 == 0 {
            if i > 0 && group == 0 {
                return Err(VectorError::NonCanonical);
            }
            return Ok((U256(limbs), i + 1));
        }
    }
    Err(VectorError::Truncated)
}

pub fn decode_varint_u64(bytes: &[u8]) -> Result<(u64, usize), VectorError> {
    let (v, used) = decode_varint_u256(bytes)?;
    v.to_u64().map(|v| (v, used)).ok_or(VectorError::Overflow)
}

fn shr7(limbs: &mut [u64; 4]) {
    for i in 0..4 {
        limbs[i] >>= 7;
        if i + 1 < 4 {
            limbs[i] |= limbs[i + 1] << 57;
        }
    }
}
