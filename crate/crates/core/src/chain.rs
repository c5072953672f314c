//! Minimal blockchain model: hash-linked headers, local integrity
//! verification, and the leapfrog finalization ledger.
//!
//! Settlement (who produces blocks) is out of scope; chains here are given
//! inputs. What matters is that agreeing on one checkpoint hash pins the
//! whole prefix: every header embeds the hash of its predecessor, so a later
//! finalized checkpoint transitively finalizes all earlier blocks even when
//! an intermediate checkpoint never reached consensus.

use std::collections::BTreeMap;

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crypto::CheckpointId;

/// Default checkpoint interval.
pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("height {height} is not a multiple of the checkpoint interval {interval}")]
    NotACheckpointHeight { height: u64, interval: u64 },
    #[error("checkpoint at height {height} is already finalized with a different hash")]
    ConflictingFinalization { height: u64 },
    #[error("checkpoint at height {height} was skipped and cannot change status")]
    AlreadySkipped { height: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub height: u64,
    pub prev_hash: [u8; 32],
    pub payload_digest: [u8; 32],
}

impl BlockHeader {
    /// Block hash: digest of height, previous hash, and payload digest.
    pub fn hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.height.to_be_bytes());
        h.update(self.prev_hash);
        h.update(self.payload_digest);
        h.finalize().into()
    }
}

/// Genesis plus `length - 1` linked headers with random payload digests.
pub fn build_chain<R: RngCore>(length: usize, rng: &mut R) -> Vec<BlockHeader> {
    assert!(length >= 1, "a chain has at least the genesis block");
    let mut headers = Vec::with_capacity(length);
    let mut payload = [0u8; 32];
    rng.fill_bytes(&mut payload);
    headers.push(BlockHeader {
        height: 0,
        prev_hash: [0u8; 32],
        payload_digest: payload,
    });
    for height in 1..length as u64 {
        let prev_hash = headers.last().unwrap().hash();
        let mut payload = [0u8; 32];
        rng.fill_bytes(&mut payload);
        headers.push(BlockHeader {
            height,
            prev_hash,
            payload_digest: payload,
        });
    }
    headers
}

/// Purely local integrity check: every embedded previous-block hash must be
/// the hash of the previous header, and heights must be consecutive from 0.
/// No communication with other nodes is involved.
pub fn verify_integrity(chain: &[BlockHeader]) -> bool {
    chain.iter().enumerate().all(|(i, header)| {
        header.height == i as u64
            && (i == 0 || header.prev_hash == chain[i - 1].hash())
    })
}

/// The checkpoint identity at `height` along a chain.
pub fn checkpoint_at(chain: &[BlockHeader], height: u64, interval: u64) -> Option<CheckpointId> {
    let header = chain.get(height as usize)?;
    CheckpointId::new(height, header.hash(), interval).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckpointStatus {
    Pending,
    Finalized { hash: [u8; 32] },
    Skipped,
}

/// Per-checkpoint finalization status with the leapfrog rule: finalizing a
/// checkpoint marks every earlier pending one as skipped, and the finalized
/// prefix of the chain is always `0 ..= max finalized checkpoint height`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalizationLedger {
    interval: u64,
    statuses: BTreeMap<u64, CheckpointStatus>,
}

impl FinalizationLedger {
    pub fn new(interval: u64) -> Self {
        assert!(interval > 0);
        FinalizationLedger {
            interval,
            statuses: BTreeMap::new(),
        }
    }

    pub fn interval(&self) -> u64 {
        self.interval
    }

    fn check_height(&self, height: u64) -> Result<(), ChainError> {
        if height % self.interval != 0 || height == 0 {
            return Err(ChainError::NotACheckpointHeight {
                height,
                interval: self.interval,
            });
        }
        Ok(())
    }

    pub fn status(&self, height: u64) -> CheckpointStatus {
        self.statuses
            .get(&height)
            .copied()
            .unwrap_or(CheckpointStatus::Pending)
    }

    /// Record that an attempt at this checkpoint is underway (or failed to
    /// converge). Pending is the default state, so this mostly documents
    /// intent; it refuses to demote a finalized checkpoint.
    pub fn mark_pending(&mut self, height: u64) -> Result<(), ChainError> {
        self.check_height(height)?;
        match self.status(height) {
            CheckpointStatus::Finalized { .. } => {
                Err(ChainError::ConflictingFinalization { height })
            }
            CheckpointStatus::Skipped => Err(ChainError::AlreadySkipped { height }),
            CheckpointStatus::Pending => {
                self.statuses.insert(height, CheckpointStatus::Pending);
                Ok(())
            }
        }
    }

    /// Finalize a checkpoint. Earlier pending checkpoints become skipped;
    /// a finalized status is immutable (re-finalizing with the same hash is
    /// a no-op, with a different hash a safety violation).
    pub fn finalize(&mut self, height: u64, hash: [u8; 32]) -> Result<(), ChainError> {
        self.check_height(height)?;
        match self.status(height) {
            CheckpointStatus::Finalized { hash: existing } if existing == hash => return Ok(()),
            CheckpointStatus::Finalized { .. } => {
                return Err(ChainError::ConflictingFinalization { height })
            }
            CheckpointStatus::Skipped => return Err(ChainError::AlreadySkipped { height }),
            CheckpointStatus::Pending => {}
        }
        let mut h = self.interval;
        while h < height {
            if matches!(self.status(h), CheckpointStatus::Pending) {
                self.statuses.insert(h, CheckpointStatus::Skipped);
            }
            h += self.interval;
        }
        self.statuses.insert(height, CheckpointStatus::Finalized { hash });
        Ok(())
    }

    /// Height of the highest finalized checkpoint.
    pub fn finalized_up_to(&self) -> Option<u64> {
        self.statuses
            .iter()
            .rev()
            .find(|(_, s)| matches!(s, CheckpointStatus::Finalized { .. }))
            .map(|(h, _)| *h)
    }

    /// A block is final iff it sits at or below the highest finalized
    /// checkpoint, regardless of lower checkpoints' status.
    pub fn is_block_final(&self, height: u64) -> bool {
        self.finalized_up_to().is_some_and(|top| height <= top)
    }

    /// The finalized block set as a prefix `0 ..= finalized_up_to()`.
    pub fn finalized_prefix_is_closed(&self) -> bool {
        match self.finalized_up_to() {
            None => true,
            Some(top) => (0..=top).all(|h| self.is_block_final(h)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn single_block_chain_is_genesis_only() {
        let chain = build_chain(1, &mut rng(1));
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0].height, 0);
        assert!(verify_integrity(&chain));
    }

    #[test]
    fn checkpoints_fall_on_interval_multiples() {
        let chain = build_chain(201, &mut rng(2));
        assert!(checkpoint_at(&chain, 100, 100).is_some());
        assert!(checkpoint_at(&chain, 200, 100).is_some());
        assert!(checkpoint_at(&chain, 150, 100).is_none());
        assert!(checkpoint_at(&chain, 300, 100).is_none());
    }

    #[test]
    fn same_seed_builds_identical_chains() {
        assert_eq!(build_chain(50, &mut rng(42)), build_chain(50, &mut rng(42)));
        assert_ne!(build_chain(50, &mut rng(42)), build_chain(50, &mut rng(43)));
    }

    #[test]
    fn integrity_holds_on_fresh_chain() {
        assert!(verify_integrity(&build_chain(30, &mut rng(3))));
    }

    #[test]
    fn corrupted_prev_hash_is_detected() {
        let mut chain = build_chain(30, &mut rng(4));
        chain[5].prev_hash[0] ^= 1;
        assert!(!verify_integrity(&chain));
    }

    #[test]
    fn corrupted_payload_breaks_the_next_link() {
        let mut chain = build_chain(30, &mut rng(5));
        chain[5].payload_digest[0] ^= 1;
        // Block 5 itself still links to 4; the break shows at block 6,
        // whose embedded hash no longer matches block 5's new hash.
        assert_eq!(chain[5].prev_hash, chain[4].hash());
        assert_ne!(chain[6].prev_hash, chain[5].hash());
        assert!(!verify_integrity(&chain));
        // Detection is local: blocks 5 and 6 alone suffice.
        assert!(!verify_integrity_window(&chain, 5));
    }

    fn verify_integrity_window(chain: &[BlockHeader], i: usize) -> bool {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(chain.len() - 1);
        (lo + 1..=hi).all(|k| chain[k].prev_hash == chain[k - 1].hash())
    }

    #[test]
    fn finalize_in_order() {
        let mut ledger = FinalizationLedger::new(100);
        ledger.finalize(100, [1; 32]).unwrap();
        ledger.finalize(200, [2; 32]).unwrap();
        assert_eq!(ledger.status(100), CheckpointStatus::Finalized { hash: [1; 32] });
        assert_eq!(ledger.status(200), CheckpointStatus::Finalized { hash: [2; 32] });
        assert_eq!(ledger.finalized_up_to(), Some(200));
    }

    #[test]
    fn leapfrog_skips_pending_checkpoint() {
        let mut ledger = FinalizationLedger::new(100);
        ledger.mark_pending(100).unwrap();
        ledger.finalize(200, [2; 32]).unwrap();
        assert_eq!(ledger.status(100), CheckpointStatus::Skipped);
        assert!(ledger.is_block_final(100));
        assert!(ledger.is_block_final(200));
        assert!(ledger.is_block_final(150));
        assert!(!ledger.is_block_final(201));
        assert!(ledger.finalized_prefix_is_closed());
    }

    #[test]
    fn finalized_status_is_immutable() {
        let mut ledger = FinalizationLedger::new(100);
        ledger.finalize(200, [2; 32]).unwrap();
        assert_eq!(ledger.finalize(200, [2; 32]), Ok(()));
        assert_eq!(
            ledger.finalize(200, [3; 32]),
            Err(ChainError::ConflictingFinalization { height: 200 })
        );
        assert_eq!(
            ledger.mark_pending(200),
            Err(ChainError::ConflictingFinalization { height: 200 })
        );
    }

    #[test]
    fn non_checkpoint_heights_are_rejected() {
        let mut ledger = FinalizationLedger::new(100);
        assert_eq!(
            ledger.finalize(150, [1; 32]),
            Err(ChainError::NotACheckpointHeight {
                height: 150,
                interval: 100
            })
        );
    }

    #[test]
    fn prefix_stays_closed_under_out_of_order_finalization() {
        let mut ledger = FinalizationLedger::new(100);
        ledger.finalize(300, [3; 32]).unwrap();
        assert_eq!(ledger.status(100), CheckpointStatus::Skipped);
        assert_eq!(ledger.status(200), CheckpointStatus::Skipped);
        assert!(ledger.finalized_prefix_is_closed());
        // A skipped checkpoint cannot be resurrected.
        assert_eq!(
            ledger.finalize(100, [1; 32]),
            Err(ChainError::AlreadySkipped { height: 100 })
        );
    }
}
