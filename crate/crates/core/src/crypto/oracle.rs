//! Accounting-oracle backend.
//!
//! A "signature" here is a 32-byte SHA-256 commitment binding the checkpoint
//! to the exact signer multiset (the canonical compact encoding of the
//! signer vector). Verification recomputes the commitment from the claimed
//! vector and compares: an aggregate passes if and only if its multiset
//! equals the claimed vector entrywise, which is precisely the accounting
//! semantics the gossip simulation needs. Honest sign/aggregate chains
//! always commit to their own vector, so they pass by construction; any
//! mismatching or fabricated commitment fails (up to hash collisions).
//!
//! The wire width is a constant 32 bytes, standing in for a compressed
//! group element, so message-size accounting stays faithful to the real
//! protocol rather than doubling up on the vector.

use rand::RngCore;
use sha2::{Digest, Sha256};

use super::{Backend, CheckpointId, CryptoError, GroupParams, KeyPair, GROUP_ORDER};
use crate::uint::U256;
use crate::vector::SignerVector;

const SIG_TAG: &[u8] = b"aggsig-gossip/oracle-sig/v1";

pub struct OracleBackend;

/// Commitment to (checkpoint, signer multiset).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSig(pub [u8; 32]);

pub struct OracleTable {
    checkpoint: CheckpointId,
    guardians: usize,
}

fn commit(checkpoint: &CheckpointId, vector_wire: &[u8]) -> OracleSig {
    let mut h = Sha256::new();
    h.update(SIG_TAG);
    h.update(checkpoint.message_bytes());
    h.update(vector_wire);
    OracleSig(h.finalize().into())
}

impl Backend for OracleBackend {
    type SecretKey = [u8; 32];
    type PublicKey = [u8; 32];
    type Sig = OracleSig;
    type Table = OracleTable;

    const NAME: &'static str = "oracle";
    const SIG_WIRE_LEN: usize = 32;

    fn params() -> GroupParams {
        GroupParams {
            name: Self::NAME,
            order: GROUP_ORDER,
            sig_wire_len: Self::SIG_WIRE_LEN,
            pk_wire_len: 32,
        }
    }

    fn keygen<R: RngCore>(rng: &mut R) -> KeyPair<Self> {
        let mut sk = [0u8; 32];
        rng.fill_bytes(&mut sk);
        let mut h = Sha256::new();
        h.update(b"aggsig-gossip/oracle-pk/v1");
        h.update(sk);
        KeyPair {
            sk,
            pk: h.finalize().into(),
        }
    }

    fn sign(_kp: &KeyPair<Self>, signer: usize, n: usize, checkpoint: &CheckpointId) -> Self::Sig {
        let unit = SignerVector::init(signer, n).expect("signer index in range");
        commit(checkpoint, &unit.encode_compact())
    }

    fn scaled_sig(
        _kp: &KeyPair<Self>,
        signer: usize,
        n: usize,
        checkpoint: &CheckpointId,
        factor: u64,
    ) -> Self::Sig {
        let scaled = SignerVector::scaled_unit(signer, n, U256::from_u64(factor), &GROUP_ORDER)
            .expect("signer index in range");
        commit(checkpoint, &scaled.encode_compact())
    }

    fn precompute_pairings(pks: &[Self::PublicKey], checkpoint: &CheckpointId) -> Self::Table {
        OracleTable {
            checkpoint: *checkpoint,
            guardians: pks.len(),
        }
    }

    fn table_size(table: &Self::Table) -> usize {
        table.guardians
    }

    fn table_checkpoint(table: &Self::Table) -> &CheckpointId {
        &table.checkpoint
    }

    fn verify_wire(
        sig: &Self::Sig,
        vector: &SignerVector,
        wire: &[u8],
        table: &Self::Table,
    ) -> Result<bool, CryptoError> {
        if vector.len() != table.guardians {
            return Err(CryptoError::LengthMismatch {
                vector: vector.len(),
                table: table.guardians,
            });
        }
        debug_assert_eq!(wire, vector.encode_compact(), "wire must encode vector");
        Ok(*sig == commit(&table.checkpoint, wire))
    }

    fn combine<'a, I>(
        _own: &Self::Sig,
        _incoming: I,
        _merged: &SignerVector,
        merged_wire: &[u8],
        checkpoint: &CheckpointId,
    ) -> Self::Sig
    where
        I: Iterator<Item = &'a Self::Sig>,
    {
        commit(checkpoint, merged_wire)
    }

    fn sig_to_bytes(sig: &Self::Sig) -> Vec<u8> {
        sig.0.to_vec()
    }

    fn sig_from_bytes(bytes: &[u8]) -> Result<Self::Sig, CryptoError> {
        bytes
            .try_into()
            .map(OracleSig)
            .map_err(|_| CryptoError::MalformedSignature)
    }

    fn forged_sig<R: RngCore>(rng: &mut R) -> Self::Sig {
        let mut bytes = [0u8; 32];
        rng.fill_bytes(&mut bytes);
        OracleSig(bytes)
    }
}
