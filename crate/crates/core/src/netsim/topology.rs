//! Random guardian connectivity graphs.
//!
//! Nodes join one at a time, the way peers bootstrap in a production
//! network: each newcomer links to a random subset of the existing nodes.
//! The subset size tracks the running edge deficit against the target
//! average degree, so the realized mean degree lands on the target (small
//! graphs degenerate correctly: four nodes at average degree three form the
//! complete graph). A per-node degree cap of twice the target bounds hub
//! formation. Disconnected draws are regenerated from a derived seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("need at least two nodes, got {n}")]
    TooFewNodes { n: usize },
    #[error("average degree {avg_degree} infeasible for {n} nodes")]
    InfeasibleDegree { n: usize, avg_degree: usize },
    #[error("no connected graph found after {attempts} attempts")]
    Disconnected { attempts: usize },
}

/// Undirected guardian connectivity graph. Stored irreflexively; the unit
/// diagonal of the connectivity matrix is added only when exporting it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl NetworkTopology {
    /// Build directly from an edge list; used by tests and the analysis
    /// tools for hand-crafted graphs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        let mut edge_count = 0;
        for &(a, b) in edges {
            assert!(a != b && a < n && b < n, "bad edge ({a}, {b})");
            if !neighbors[a].contains(&b) {
                neighbors[a].push(b);
                neighbors[b].push(a);
                edge_count += 1;
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        NetworkTopology {
            neighbors,
            edge_count,
        }
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn average_degree(&self) -> f64 {
        2.0 * self.edge_count as f64 / self.n() as f64
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in &self.neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    }

    /// Edges as `(i, j)` pairs with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

const MAX_ATTEMPTS: usize = 32;

pub fn generate_topology(
    n: usize,
    avg_degree: usize,
    seed: u64,
) -> Result<NetworkTopology, TopologyError> {
    if n < 2 {
        return Err(TopologyError::TooFewNodes { n });
    }
    if avg_degree == 0 || avg_degree >= n {
        return Err(TopologyError::InfeasibleDegree { n, avg_degree });
    }
    for attempt in 0..MAX_ATTEMPTS {
        let topo = grow(n, avg_degree, attempt_seed(seed, attempt as u64));
        if topo.is_connected() {
            debug_assert!({
                let avg = topo.average_degree();
                avg >= 0.85 * avg_degree as f64 && avg <= 1.15 * avg_degree as f64
            });
            return Ok(topo);
        }
    }
    Err(TopologyError::Disconnected {
        attempts: MAX_ATTEMPTS,
    })
}

fn attempt_seed(seed: u64, attempt: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"aggsig-gossip/topology/v1");
    h.update(seed.to_be_bytes());
    h.update(attempt.to_be_bytes());
    h.finalize().into()
}

fn grow(n: usize, avg_degree: usize, seed: [u8; 32]) -> NetworkTopology {
    let mut rng = ChaCha8Rng::from_seed(seed);
    let cap = 2 * avg_degree;
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edge_count = 0usize;

    for i in 1..n {
        // Keep total edges on the running target of avg_degree * nodes / 2,
        // rounding half up; every joiner links at least once.
        let target_edges = (avg_degree * (i + 1) + 1) / 2;
        let want = target_edges.saturating_sub(edge_count).clamp(1, i);

        let mut candidates: Vec<usize> = (0..i).filter(|&j| neighbors[j].len() < cap).collect();
        let want = if candidates.is_empty() {
            // All existing nodes at the cap: link once anyway so the graph
            // stays connected.
            candidates = (0..i).collect();
            1
        } else {
            want.min(candidates.len())
        };

        for k in 0..want {
            let pick = rng.gen_range(k..candidates.len());
            candidates.swap(k, pick);
            let j = candidates[k];
            neighbors[i].push(j);
            neighbors[j].push(i);
            edge_count += 1;
        }
    }

    for list in &mut neighbors {
        list.sort_unstable();
    }
    NetworkTopology {
        neighbors,
        edge_count,
    }
}
