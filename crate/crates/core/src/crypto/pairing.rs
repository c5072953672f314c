//! Real pairing backend on BLS12-381.
//!
//! Signatures and message hashes live in G1 (48-byte compressed points),
//! public keys in G2 (96 bytes), and verification compares one pairing
//! against a product of precomputed target-group values:
//!
//! `e(sigma, g2) == prod_u e(h_u, pk_u)^(c_u)`
//!
//! The message hashed for guardian `u` is domain-separated on its public
//! key to block rogue-key aggregation: a 4-byte big-endian length prefix,
//! the compressed public key, the 8-byte big-endian checkpoint height, and
//! the 32-byte checkpoint hash, mapped to G1 with the XMD:SHA-256 SSWU
//! hash-to-curve suite.

use bls12_381::hash_to_curve::{ExpandMsgXmd, HashToCurve};
use bls12_381::{pairing, G1Affine, G1Projective, G2Affine, G2Projective, Gt, Scalar};
use rand::RngCore;
use sha2::Sha256;

use super::{Backend, CheckpointId, CryptoError, GroupParams, KeyPair, GROUP_ORDER};
use crate::uint::U256;
use crate::vector::SignerVector;

const HASH_DST: &[u8] = b"AGGSIG_GOSSIP_BLS12381G1_XMD:SHA-256_SSWU_RO_CHECKPOINT_";
const FORGE_DST: &[u8] = b"AGGSIG_GOSSIP_BLS12381G1_XMD:SHA-256_SSWU_RO_FORGERY_";

pub struct PairingBackend;

pub struct PairingTable {
    checkpoint: CheckpointId,
    entries: Vec<Gt>,
}

impl PairingTable {
    pub fn entry(&self, u: usize) -> &Gt {
        &self.entries[u]
    }
}

/// Hash a (public key, checkpoint) pair onto G1. Deterministic, and distinct
/// public keys yield independent points.
pub fn hash_to_group(pk: &G2Affine, checkpoint: &CheckpointId) -> G1Projective {
    let pk_bytes = pk.to_compressed();
    let mut msg = Vec::with_capacity(4 + pk_bytes.len() + 40);
    msg.extend_from_slice(&(pk_bytes.len() as u32).to_be_bytes());
    msg.extend_from_slice(&pk_bytes);
    msg.extend_from_slice(&checkpoint.message_bytes());
    <G1Projective as HashToCurve<ExpandMsgXmd<Sha256>>>::hash_to_curve(&msg, HASH_DST)
}

/// Variable-time exponentiation in the target group. Exponents here are
/// signer counts, typically a few bits, so square-and-multiply over the
/// significant bits is far cheaper than a full-width scalar ladder.
fn gt_pow_vartime(base: &Gt, exp: &U256) -> Gt {
    debug_assert!(!exp.is_zero());
    let top = exp.bits();
    let mut acc = *base;
    for i in (0..top - 1).rev() {
        acc = acc.double();
        if exp.bit(i) {
            acc += base;
        }
    }
    acc
}

/// Key pair with a chosen secret scalar; test and fixture helper.
pub fn keypair_from_scalar(sk: Scalar) -> KeyPair<PairingBackend> {
    let pk = G2Affine::from(G2Projective::generator() * sk);
    KeyPair { sk, pk }
}

impl Backend for PairingBackend {
    type SecretKey = Scalar;
    type PublicKey = G2Affine;
    type Sig = G1Projective;
    type Table = PairingTable;

    const NAME: &'static str = "pairing";
    const SIG_WIRE_LEN: usize = 48;

    fn params() -> GroupParams {
        GroupParams {
            name: Self::NAME,
            order: GROUP_ORDER,
            sig_wire_len: Self::SIG_WIRE_LEN,
            pk_wire_len: 96,
        }
    }

    fn keygen<R: RngCore>(rng: &mut R) -> KeyPair<Self> {
        let sk = loop {
            let mut wide = [0u8; 64];
            rng.fill_bytes(&mut wide);
            let sk = Scalar::from_bytes_wide(&wide);
            if sk != Scalar::zero() {
                break sk;
            }
        };
        keypair_from_scalar(sk)
    }

    fn sign(kp: &KeyPair<Self>, _signer: usize, _n: usize, checkpoint: &CheckpointId) -> Self::Sig {
        hash_to_group(&kp.pk, checkpoint) * kp.sk
    }

    fn scaled_sig(
        kp: &KeyPair<Self>,
        signer: usize,
        n: usize,
        checkpoint: &CheckpointId,
        factor: u64,
    ) -> Self::Sig {
        Self::sign(kp, signer, n, checkpoint) * Scalar::from(factor)
    }

    fn precompute_pairings(pks: &[Self::PublicKey], checkpoint: &CheckpointId) -> Self::Table {
        let entries = pks
            .iter()
            .map(|pk| {
                let h = G1Affine::from(hash_to_group(pk, checkpoint));
                pairing(&h, pk)
            })
            .collect();
        PairingTable {
            checkpoint: *checkpoint,
            entries,
        }
    }

    fn table_size(table: &Self::Table) -> usize {
        table.entries.len()
    }

    fn table_checkpoint(table: &Self::Table) -> &CheckpointId {
        &table.checkpoint
    }

    fn verify_wire(
        sig: &Self::Sig,
        vector: &SignerVector,
        _wire: &[u8],
        table: &Self::Table,
    ) -> Result<bool, CryptoError> {
        if vector.len() != table.entries.len() {
            return Err(CryptoError::LengthMismatch {
                vector: vector.len(),
                table: table.entries.len(),
            });
        }
        let lhs = pairing(&G1Affine::from(sig), &G2Affine::generator());
        let mut rhs = Gt::identity();
        for (u, count) in vector.entries().iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            rhs += gt_pow_vartime(&table.entries[u], count);
        }
        Ok(lhs == rhs)
    }

    fn combine<'a, I>(
        own: &Self::Sig,
        incoming: I,
        _merged: &SignerVector,
        _merged_wire: &[u8],
        _checkpoint: &CheckpointId,
    ) -> Self::Sig
    where
        I: Iterator<Item = &'a Self::Sig>,
    {
        let mut acc = *own;
        for sig in incoming {
            acc += sig;
        }
        acc
    }

    fn sig_to_bytes(sig: &Self::Sig) -> Vec<u8> {
        G1Affine::from(sig).to_compressed().to_vec()
    }

    fn sig_from_bytes(bytes: &[u8]) -> Result<Self::Sig, CryptoError> {
        let arr: [u8; 48] = bytes
            .try_into()
            .map_err(|_| CryptoError::MalformedSignature)?;
        Option::<G1Affine>::from(G1Affine::from_compressed(&arr))
            .map(G1Projective::from)
            .ok_or(CryptoError::MalformedSignature)
    }

    fn forged_sig<R: RngCore>(rng: &mut R) -> Self::Sig {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        <G1Projective as HashToCurve<ExpandMsgXmd<Sha256>>>::hash_to_curve(&seed, FORGE_DST)
    }
}
