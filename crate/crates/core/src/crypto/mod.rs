//! BLS sign/aggregate/verify over a bilinear pairing, behind a backend trait.
//!
//! Two interchangeable backends implement the same contract:
//!
//! * [`pairing::PairingBackend`] — real BLS12-381 pairing arithmetic. Used by
//!   the cryptographic test batteries (dozens of guardians at most; one
//!   verification costs a pairing plus one target-group exponentiation per
//!   listed signer).
//! * [`oracle::OracleBackend`] — an accounting oracle whose "signature" is a
//!   binding commitment to the exact signer multiset. It accepts precisely
//!   the aggregates that honest sign/aggregate chains produce and rejects
//!   everything else, at a tiny fraction of the cost, which makes
//!   thousand-node simulations practical.
//!
//! Both backends share the same 255-bit prime group order, so signer-vector
//! arithmetic is identical across them.

use rand::RngCore;
use thiserror::Error;

use crate::uint::U256;
use crate::vector::SignerVector;

pub mod oracle;
pub mod pairing;

pub use oracle::OracleBackend;
pub use pairing::PairingBackend;

/// Order of the signature group: the BLS12-381 scalar field modulus, a
/// 255-bit prime. Little-endian limbs.
pub const GROUP_ORDER: U256 = U256([
    0xffff_ffff_0000_0001,
    0x53bd_a402_fffe_5bfe,
    0x3339_d808_09a1_d805,
    0x73ed_a753_299d_7d48,
]);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("signer vector has {vector} entries but the pairing table covers {table} guardians")]
    LengthMismatch { vector: usize, table: usize },
    #[error("checkpoint height {height} is not a multiple of the interval {interval}")]
    MisalignedCheckpoint { height: u64, interval: u64 },
    #[error("malformed signature encoding")]
    MalformedSignature,
}

/// Identity of one checkpoint block: its height and header hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CheckpointId {
    height: u64,
    hash: [u8; 32],
}

impl CheckpointId {
    /// A checkpoint sits at a height that is a multiple of the interval.
    pub fn new(height: u64, hash: [u8; 32], interval: u64) -> Result<Self, CryptoError> {
        if interval == 0 || height % interval != 0 {
            return Err(CryptoError::MisalignedCheckpoint { height, interval });
        }
        Ok(CheckpointId { height, hash })
    }

    /// Reassemble a checkpoint from wire bytes. Alignment to the interval is
    /// not re-checked here: a garbled checkpoint cannot match any honest
    /// node's own and is discarded upstream.
    pub fn from_message_bytes(bytes: &[u8; 40]) -> Self {
        let mut height = [0u8; 8];
        height.copy_from_slice(&bytes[..8]);
        let mut hash = [0u8; 32];
        hash.copy_from_slice(&bytes[8..]);
        CheckpointId {
            height: u64::from_be_bytes(height),
            hash,
        }
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    pub fn hash(&self) -> &[u8; 32] {
        &self.hash
    }

    /// The signed message: 8-byte big-endian height, then the 32-byte hash.
    pub fn message_bytes(&self) -> [u8; 40] {
        let mut out = [0u8; 40];
        out[..8].copy_from_slice(&self.height.to_be_bytes());
        out[8..].copy_from_slice(&self.hash);
        out
    }
}

/// Static description of a backend's group parameters and wire widths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    pub name: &'static str,
    /// Prime order `p` of the source and target groups.
    pub order: U256,
    pub sig_wire_len: usize,
    pub pk_wire_len: usize,
}

pub struct KeyPair<B: Backend + ?Sized> {
    pub sk: B::SecretKey,
    pub pk: B::PublicKey,
}

impl<B: Backend> Clone for KeyPair<B> {
    fn clone(&self) -> Self {
        KeyPair {
            sk: self.sk.clone(),
            pk: self.pk.clone(),
        }
    }
}

impl<B: Backend> std::fmt::Debug for KeyPair<B> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair").field("pk", &self.pk).finish()
    }
}

/// One signature scheme: key generation, per-checkpoint signing, pairing
/// precomputation, aggregate verification, and aggregation.
pub trait Backend: Sized + Send + Sync + 'static {
    type SecretKey: Clone + Send + Sync;
    type PublicKey: Clone + PartialEq + Send + Sync + std::fmt::Debug;
    type Sig: Clone + PartialEq + Send + Sync + std::fmt::Debug;
    type Table: Send + Sync;

    const NAME: &'static str;
    /// Fixed serialized width of one signature, in bytes.
    const SIG_WIRE_LEN: usize;

    fn params() -> GroupParams;

    /// Draw a key pair; identical seeds yield identical pairs.
    fn keygen<R: RngCore>(rng: &mut R) -> KeyPair<Self>;

    /// Sign the checkpoint as guardian `signer` of `n`.
    fn sign(kp: &KeyPair<Self>, signer: usize, n: usize, checkpoint: &CheckpointId) -> Self::Sig;

    /// Signature raised to the `factor`-th power; verifies against the
    /// signer vector `factor * e_signer`.
    fn scaled_sig(
        kp: &KeyPair<Self>,
        signer: usize,
        n: usize,
        checkpoint: &CheckpointId,
        factor: u64,
    ) -> Self::Sig;

    /// Precompute the per-guardian pairing values for one checkpoint; the
    /// result is reused across every verification for that checkpoint.
    fn precompute_pairings(pks: &[Self::PublicKey], checkpoint: &CheckpointId) -> Self::Table;

    fn table_size(table: &Self::Table) -> usize;
    fn table_checkpoint(table: &Self::Table) -> &CheckpointId;

    /// Check an aggregate against its claimed signer vector. `wire` is the
    /// canonical compact encoding of `vector`, which the gossip hot path
    /// already has in hand.
    fn verify_wire(
        sig: &Self::Sig,
        vector: &SignerVector,
        wire: &[u8],
        table: &Self::Table,
    ) -> Result<bool, CryptoError>;

    /// Fold already-verified incoming signatures into `own`. `merged` (and
    /// its canonical encoding `merged_wire`) is the entrywise mod-p sum of
    /// all the corresponding signer vectors, computed by the caller.
    fn combine<'a, I>(
        own: &Self::Sig,
        incoming: I,
        merged: &SignerVector,
        merged_wire: &[u8],
        checkpoint: &CheckpointId,
    ) -> Self::Sig
    where
        I: Iterator<Item = &'a Self::Sig>,
        Self::Sig: 'a;

    fn sig_to_bytes(sig: &Self::Sig) -> Vec<u8>;
    fn sig_from_bytes(bytes: &[u8]) -> Result<Self::Sig, CryptoError>;

    /// A syntactically well-formed signature that fails verification against
    /// every honestly-formed signer vector (byzantine message material).
    /// Draws exactly 32 bytes from `rng` on every backend.
    fn forged_sig<R: RngCore>(rng: &mut R) -> Self::Sig;
}

/// Verify an aggregate against a signer vector, encoding the vector here.
/// The gossip path calls [`Backend::verify_wire`] with the received bytes
/// instead.
pub fn verify_aggregate<B: Backend>(
    sig: &B::Sig,
    vector: &SignerVector,
    table: &B::Table,
) -> Result<bool, CryptoError> {
    B::verify_wire(sig, vector, &vector.encode_compact(), table)
}

/// Aggregate `own` with a batch of verified incoming pairs: signatures are
/// combined in the group, vectors added entrywise mod p.
pub fn aggregate<B: Backend>(
    own: (&B::Sig, &SignerVector),
    incoming: &[(&B::Sig, &SignerVector)],
    checkpoint: &CheckpointId,
) -> Result<(B::Sig, SignerVector), crate::vector::VectorError> {
    let p = B::params().order;
    let mut merged = own.1.clone();
    for (_, vec) in incoming {
        merged.merge_in_place(vec, &p)?;
    }
    let wire = merged.encode_compact();
    let sig = B::combine(
        own.0,
        incoming.iter().map(|(sig, _)| *sig),
        &merged,
        &wire,
        checkpoint,
    );
    Ok((sig, merged))
}
