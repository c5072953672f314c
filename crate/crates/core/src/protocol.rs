//! The per-guardian gossip state machine.
//!
//! Every iteration a guardian sends its current aggregate and signer vector
//! to all neighbors, then — unless it already finalized, in which case it
//! stops for good after that last send — verifies whatever arrived, folds
//! the valid aggregates into its own, recounts unique signers, and marks the
//! checkpoint finalized once the count passes the supermajority threshold.
//!
//! # Wire format
//!
//! A gossip message serializes as: varint sender index, 40-byte checkpoint
//! (8-byte big-endian height, 32-byte hash), fixed-width signature
//! (backend-dependent), then the compact signer-vector encoding to the end
//! of the buffer.

use thiserror::Error;

use crate::crypto::{Backend, CheckpointId, CryptoError, KeyPair};
use crate::uint::U256;
use crate::vector::{
    decode_varint_u64, encode_varint_u64, varint_len_u64, SignerVector, VectorError,
};

/// Smallest count strictly greater than two thirds of `n`.
///
/// The prose rule is "more than 2/3 of the guardians"; the strict reading is
/// the one the pigeonhole safety argument needs, so equality at exactly
/// `2n/3` does not finalize.
pub fn finalization_threshold(n: usize) -> usize {
    (2 * n) / 3 + 1
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MessageDecodeError {
    #[error("message truncated")]
    Truncated,
    #[error("bad signature bytes: {0}")]
    Signature(#[from] CryptoError),
    #[error("bad signer vector: {0}")]
    Vector(#[from] VectorError),
}

/// One gossip payload: `(sigma, c)` plus routing metadata. The signer vector
/// travels in its compact encoding.
pub struct GossipMessage<B: Backend> {
    pub sender: usize,
    pub sigma: B::Sig,
    pub encoded_vector: Vec<u8>,
    pub checkpoint: CheckpointId,
}

impl<B: Backend> Clone for GossipMessage<B> {
    fn clone(&self) -> Self {
        GossipMessage {
            sender: self.sender,
            sigma: self.sigma.clone(),
            encoded_vector: self.encoded_vector.clone(),
            checkpoint: self.checkpoint,
        }
    }
}

impl<B: Backend> PartialEq for GossipMessage<B> {
    fn eq(&self, other: &Self) -> bool {
        self.sender == other.sender
            && self.sigma == other.sigma
            && self.encoded_vector == other.encoded_vector
            && self.checkpoint == other.checkpoint
    }
}

impl<B: Backend> std::fmt::Debug for GossipMessage<B> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GossipMessage")
            .field("sender", &self.sender)
            .field("sigma", &self.sigma)
            .field("vector_bytes", &self.encoded_vector.len())
            .field("checkpoint", &self.checkpoint)
            .finish()
    }
}

impl<B: Backend> GossipMessage<B> {
    pub fn new(
        sender: usize,
        sigma: B::Sig,
        encoded_vector: Vec<u8>,
        checkpoint: CheckpointId,
    ) -> Self {
        GossipMessage {
            sender,
            sigma,
            encoded_vector,
            checkpoint,
        }
    }

    /// Serialized size in bytes, without materializing the buffer.
    pub fn wire_len(&self) -> usize {
        varint_len_u64(self.sender as u64) + 40 + B::SIG_WIRE_LEN + self.encoded_vector.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.wire_len());
        encode_varint_u64(self.sender as u64, &mut out);
        out.extend_from_slice(&self.checkpoint.message_bytes());
        out.extend_from_slice(&B::sig_to_bytes(&self.sigma));
        out.extend_from_slice(&self.encoded_vector);
        debug_assert_eq!(out.len(), self.wire_len());
        out
    }

    /// Strict decode. The vector bytes are validated against `n` and the
    /// group order but kept in encoded form.
    pub fn from_bytes(bytes: &[u8], n: usize) -> Result<Self, MessageDecodeError> {
        let (sender, used) = decode_varint_u64(bytes).map_err(|_| MessageDecodeError::Truncated)?;
        let rest = &bytes[used..];
        if rest.len() < 40 + B::SIG_WIRE_LEN {
            return Err(MessageDecodeError::Truncated);
        }
        let cp_bytes: [u8; 40] = rest[..40].try_into().unwrap();
        let checkpoint = CheckpointId::from_message_bytes(&cp_bytes);
        let sigma = B::sig_from_bytes(&rest[40..40 + B::SIG_WIRE_LEN])?;
        let encoded_vector = rest[40 + B::SIG_WIRE_LEN..].to_vec();
        SignerVector::decode_compact(&encoded_vector, n, &B::params().order)?;
        Ok(GossipMessage {
            sender: sender as usize,
            sigma,
            encoded_vector,
            checkpoint,
        })
    }
}

/// Per-step instrumentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepReport {
    /// Messages that decoded and passed aggregate verification.
    pub verified: u32,
    /// Messages dropped: undecodable, duplicate sender, wrong checkpoint,
    /// all-zero vector, or failed verification.
    pub discarded: u32,
    /// Unique signers after this step.
    pub unique_signers: usize,
    /// Largest signer-vector entry after this step.
    pub max_entry: U256,
    /// Entries that wrapped mod p while folding; always 0 on honest paths.
    pub wrapped_entries: u32,
}

/// One guardian's protocol state for a single checkpoint.
pub struct GuardianState<B: Backend> {
    index: usize,
    n: usize,
    keypair: KeyPair<B>,
    sigma: B::Sig,
    vector: SignerVector,
    encoded_vector: Vec<u8>,
    finalized: bool,
    finalized_at: Option<u32>,
    exited: bool,
    neighbors: Vec<usize>,
    checkpoint: CheckpointId,
    iteration: u32,
}

impl<B: Backend> GuardianState<B> {
    /// Sign the checkpoint and initialize the signer vector to the unit
    /// vector at this guardian's index.
    pub fn init(
        index: usize,
        n: usize,
        keypair: KeyPair<B>,
        neighbors: Vec<usize>,
        checkpoint: CheckpointId,
    ) -> Result<Self, VectorError> {
        let vector = SignerVector::init(index, n)?;
        let sigma = B::sign(&keypair, index, n, &checkpoint);
        let encoded_vector = vector.encode_compact();
        let mut neighbors = neighbors;
        neighbors.sort_unstable();
        neighbors.dedup();
        Ok(GuardianState {
            index,
            n,
            keypair,
            sigma,
            vector,
            encoded_vector,
            finalized: false,
            finalized_at: None,
            exited: false,
            neighbors,
            checkpoint,
            iteration: 0,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn guardian_count(&self) -> usize {
        self.n
    }

    pub fn keypair(&self) -> &KeyPair<B> {
        &self.keypair
    }

    pub fn sigma(&self) -> &B::Sig {
        &self.sigma
    }

    pub fn vector(&self) -> &SignerVector {
        &self.vector
    }

    pub fn finalized(&self) -> bool {
        self.finalized
    }

    /// Iteration at which the threshold was first reached.
    pub fn finalized_at(&self) -> Option<u32> {
        self.finalized_at
    }

    /// True once the node has left the gossip loop (sent its final message).
    pub fn exited(&self) -> bool {
        self.exited
    }

    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    pub fn checkpoint(&self) -> &CheckpointId {
        &self.checkpoint
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    /// The message this node gossips this iteration, or nothing once it has
    /// exited the loop. A node that finalized in iteration `t` still emits
    /// in `t + 1` — the send precedes the break — and nothing afterwards.
    pub fn outgoing(&self) -> Option<GossipMessage<B>> {
        if self.exited {
            return None;
        }
        Some(GossipMessage::new(
            self.index,
            self.sigma.clone(),
            self.encoded_vector.clone(),
            self.checkpoint,
        ))
    }

    /// The break after the send: a finalized node leaves the loop and will
    /// drop any later inbox unread. No-op when `break_on_finalize` is off
    /// (the idealized no-break mode used by the propagation oracle).
    pub fn advance_after_send(&mut self, break_on_finalize: bool) {
        if break_on_finalize && self.finalized {
            self.exited = true;
        }
    }

    /// Verify, aggregate, count, and maybe finalize over one round's inbox.
    ///
    /// Invalid messages — wrong checkpoint, duplicate sender, undecodable or
    /// all-zero vectors, failed verification — are counted and discarded;
    /// nothing they carry touches the state.
    pub fn receive_and_step<'a, I>(
        &mut self,
        inbox: I,
        table: &B::Table,
        threshold: usize,
    ) -> StepReport
    where
        I: IntoIterator<Item = &'a GossipMessage<B>>,
        B: 'a,
    {
        self.iteration += 1;
        let order = B::params().order;
        let prev_unique = self.vector.unique_signers();

        let mut verified: u32 = 0;
        let mut discarded: u32 = 0;
        let mut seen_senders: Vec<usize> = Vec::new();
        let mut valid: Vec<(&'a B::Sig, SignerVector)> = Vec::new();

        for msg in inbox {
            if msg.checkpoint != self.checkpoint || seen_senders.contains(&msg.sender) {
                discarded += 1;
                continue;
            }
            seen_senders.push(msg.sender);
            let vector = match SignerVector::decode_compact(&msg.encoded_vector, self.n, &order) {
                Ok(v) => v,
                Err(_) => {
                    discarded += 1;
                    continue;
                }
            };
            // An all-zero vector satisfies the verification equation with an
            // identity sigma but carries no information; reject outright.
            if vector.is_all_zero() {
                discarded += 1;
                continue;
            }
            match B::verify_wire(&msg.sigma, &vector, &msg.encoded_vector, table) {
                Ok(true) => {
                    verified += 1;
                    valid.push((&msg.sigma, vector));
                }
                Ok(false) | Err(_) => discarded += 1,
            }
        }

        let mut wrapped: u32 = 0;
        if !valid.is_empty() {
            for (_, vector) in &valid {
                let outcome = self
                    .vector
                    .merge_in_place(vector, &order)
                    .expect("decoded vectors share n");
                wrapped += outcome.wrapped_entries as u32;
            }
            self.encoded_vector = self.vector.encode_compact();
            self.sigma = B::combine(
                &self.sigma,
                valid.iter().map(|(sig, _)| *sig),
                &self.vector,
                &self.encoded_vector,
                &self.checkpoint,
            );
        }

        let unique_signers = self.vector.unique_signers();
        debug_assert!(
            wrapped > 0 || unique_signers >= prev_unique,
            "unique signer count decreased without a mod-p wrap"
        );
        if !self.finalized && unique_signers >= threshold {
            self.finalized = true;
            self.finalized_at = Some(self.iteration);
        }

        StepReport {
            verified,
            discarded,
            unique_signers,
            max_entry: self.vector.max_entry(),
            wrapped_entries: wrapped,
        }
    }
}
