//! Executable INDEX reductions in the XOR update model.
//!
//! Alice holds a bit vector x and encodes it as a graph: one potential edge
//! per index, plus a hub node v* = n+1 keeping everything connected (or
//! keeping the graph bipartite in the second variant). Bob holds a target
//! index i* and receives from Merlin an n-bit list claimed to equal the
//! adjacency of u_{i*} in Alice's graph. Bob XORs the list's edges onto the
//! stream and runs a connectivity (bipartiteness) decision procedure:
//!
//! * disconnectivity variant: the final graph is disconnected exactly when
//!   the list equals the true adjacency (u_{i*} ends up isolated);
//! * bipartiteness variant: Bob additionally toggles (u_{i*}, v*); the
//!   final graph is bipartite exactly when the list is truthful, any lie
//!   creating a triangle through v*.
//!
//! Bob then answers 1 iff the decision procedure says so and the list
//! claims the target edge. The decision procedure is pluggable; the trusted
//! oracle stands in for a hypothetical streaming scheme.

use crate::stream::{
    accumulate, oracle_bipartite, oracle_connected, GraphMatrix, StreamHeader, StreamUpdate,
    UpdateModel,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionVariant {
    Disconnectivity,
    Bipartiteness,
}

impl ReductionVariant {
    pub fn name(self) -> &'static str {
        match self {
            ReductionVariant::Disconnectivity => "disconnectivity",
            ReductionVariant::Bipartiteness => "bipartiteness",
        }
    }
}

/// Number of potential edges indexed by the bit vector.
pub fn bit_count(variant: ReductionVariant, n: u32) -> u64 {
    match variant {
        ReductionVariant::Disconnectivity => n as u64 * (n as u64 - 1) / 2,
        ReductionVariant::Bipartiteness => (n as u64 / 2) * (n as u64 / 2),
    }
}

/// Colexicographic bijection from 1-based indices to pairs (u, v), u < v,
/// ordered by (v, u).
pub fn edge_index(n: u32, i: u64) -> Result<(u32, u32)> {
    let total = n as u64 * (n as u64 - 1) / 2;
    if i < 1 || i > total {
        return Err(Error::InvalidParameter(format!(
            "edge index {i} outside [1, {total}]"
        )));
    }
    let mut v = 2u32;
    while (v as u64) * (v as u64 - 1) / 2 < i {
        v += 1;
    }
    let u = (i - (v as u64 - 1) * (v as u64 - 2) / 2) as u32;
    Ok((u, v))
}

pub fn index_of_edge(n: u32, u: u32, v: u32) -> Result<u64> {
    if u < 1 || v <= u || v > n {
        return Err(Error::InvalidParameter(format!(
            "({u}, {v}) is not an ordered pair inside [1, {n}]"
        )));
    }
    Ok((v as u64 - 1) * (v as u64 - 2) / 2 + u as u64)
}

/// Bipartite bijection: left nodes are {1..n/2}, right nodes are
/// {n/2+1..n}; indices run right-node-major.
pub fn bipartite_edge_index(n: u32, i: u64) -> Result<(u32, u32)> {
    let half = n as u64 / 2;
    let total = half * half;
    if !n.is_multiple_of(2) || i < 1 || i > total {
        return Err(Error::InvalidParameter(format!(
            "bipartite edge index {i} outside [1, {total}] (n must be even)"
        )));
    }
    let j = i - 1;
    let u = (j % half) as u32 + 1;
    let v = (n as u64 / 2 + j / half + 1) as u32;
    Ok((u, v))
}

pub fn bipartite_index_of_edge(n: u32, u: u32, v: u32) -> Result<u64> {
    let half = n / 2;
    if !n.is_multiple_of(2) || u < 1 || u > half || v <= half || v > n {
        return Err(Error::InvalidParameter(format!(
            "({u}, {v}) is not a left-right pair for n = {n}"
        )));
    }
    Ok((v as u64 - half as u64 - 1) * half as u64 + u as u64)
}

/// One INDEX instance: Alice's bits and Bob's target index.
#[derive(Debug, Clone)]
pub struct IndexInstance {
    pub variant: ReductionVariant,
    pub n: u32,
    pub bits: Vec<bool>,
    pub i_star: u64,
}

impl IndexInstance {
    pub fn new(
        variant: ReductionVariant,
        n: u32,
        bits: Vec<bool>,
        i_star: u64,
    ) -> Result<IndexInstance> {
        if n < 2 {
            return Err(Error::InvalidParameter("n must be >= 2".into()));
        }
        if variant == ReductionVariant::Bipartiteness && !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "bipartite variant needs even n".into(),
            ));
        }
        let want = bit_count(variant, n);
        if bits.len() as u64 != want {
            return Err(Error::InvalidParameter(format!(
                "bit vector must have {want} entries, got {}",
                bits.len()
            )));
        }
        if i_star < 1 || i_star > want {
            return Err(Error::InvalidParameter(format!(
                "target index {i_star} outside [1, {want}]"
            )));
        }
        Ok(IndexInstance {
            variant,
            n,
            bits,
            i_star,
        })
    }

    /// The hub node added by Alice.
    pub fn hub(&self) -> u32 {
        self.n + 1
    }

    /// Bob's target edge (u_{i*}, v_{i*}).
    pub fn target_edge(&self) -> (u32, u32) {
        match self.variant {
            ReductionVariant::Disconnectivity => edge_index(self.n, self.i_star).unwrap(),
            ReductionVariant::Bipartiteness => {
                bipartite_edge_index(self.n, self.i_star).unwrap()
            }
        }
    }

    pub fn target_bit(&self) -> bool {
        self.bits[(self.i_star - 1) as usize]
    }

    fn edge_of_index(&self, i: u64) -> (u32, u32) {
        match self.variant {
            ReductionVariant::Disconnectivity => edge_index(self.n, i).unwrap(),
            ReductionVariant::Bipartiteness => bipartite_edge_index(self.n, i).unwrap(),
        }
    }
}

/// Alice's XOR stream over n+1 nodes: the bit-indexed edges first, then the
/// hub star. All tokens are distinct.
pub fn build_alice_stream(inst: &IndexInstance) -> (StreamHeader, Vec<StreamUpdate>) {
    let hub = inst.hub();
    let mut header = StreamHeader::new(hub, UpdateModel::Xor, 1).unwrap();
    let mut updates = Vec::new();
    for (idx, &bit) in inst.bits.iter().enumerate() {
        if bit {
            let (u, v) = inst.edge_of_index(idx as u64 + 1);
            updates.push(StreamUpdate::xor(u, v));
        }
    }
    match inst.variant {
        ReductionVariant::Disconnectivity => {
            for v in 1..=inst.n {
                updates.push(StreamUpdate::xor(v, hub));
            }
        }
        ReductionVariant::Bipartiteness => {
            for v in (inst.n / 2 + 1)..=inst.n {
                updates.push(StreamUpdate::xor(v, hub));
            }
        }
    }
    header.declared_length = Some(updates.len() as u64);
    (header, updates)
}

/// Merlin's help: an n-bit adjacency claim for u_{i*}, one bit per node of
/// the (n+1)-node graph other than u_{i*} itself, in ascending node order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerlinList {
    pub u_star: u32,
    pub neighbor_bits: Vec<bool>,
}

impl MerlinList {
    /// The nodes the bit positions refer to, ascending.
    pub fn positions(n: u32, u_star: u32) -> Vec<u32> {
        (1..=n + 1).filter(|&v| v != u_star).collect()
    }

    pub fn claimed_neighbors(&self, n: u32) -> Vec<u32> {
        Self::positions(n, self.u_star)
            .into_iter()
            .zip(&self.neighbor_bits)
            .filter(|(_, &b)| b)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn claims_edge_to(&self, n: u32, v: u32) -> bool {
        Self::positions(n, self.u_star)
            .iter()
            .position(|&w| w == v)
            .map(|idx| self.neighbor_bits[idx])
            .unwrap_or(false)
    }
}

/// The honest strategy: read the true adjacency of u_{i*} out of Alice's
/// accumulated graph.
pub fn honest_merlin(inst: &IndexInstance) -> MerlinList {
    let (header, updates) = build_alice_stream(inst);
    let g2 = accumulate(&header, &updates).expect("alice stream is valid by construction");
    let (u_star, _) = inst.target_edge();
    let neighbor_bits = MerlinList::positions(inst.n, u_star)
        .into_iter()
        .map(|v| g2.has_edge(u_star, v))
        .collect();
    MerlinList {
        u_star,
        neighbor_bits,
    }
}

/// Bit positions that could possibly be neighbors of u_star given the
/// public construction. For the disconnectivity variant every position is
/// possible; for the bipartite variant only right-side nodes are (the hub
/// touches only the right side, and u_star sits on the left).
pub fn legal_positions(inst: &IndexInstance, u_star: u32) -> Vec<usize> {
    let positions = MerlinList::positions(inst.n, u_star);
    match inst.variant {
        ReductionVariant::Disconnectivity => (0..positions.len()).collect(),
        ReductionVariant::Bipartiteness => positions
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v > inst.n / 2 && v <= inst.n)
            .map(|(i, _)| i)
            .collect(),
    }
}

/// The graph Bob's decision procedure sees: Alice's stream followed by the
/// list's edges (plus the hub edge in the bipartite variant) as XOR tokens.
pub fn graph_after_list(inst: &IndexInstance, list: &MerlinList) -> Result<GraphMatrix> {
    if list.neighbor_bits.len() != inst.n as usize {
        return Err(Error::InvalidParameter(format!(
            "merlin list must carry exactly {} bits, got {}",
            inst.n,
            list.neighbor_bits.len()
        )));
    }
    let (header, mut updates) = build_alice_stream(inst);
    let mut header = header;
    for v in list.claimed_neighbors(inst.n) {
        updates.push(StreamUpdate::xor(list.u_star.min(v), list.u_star.max(v)));
    }
    if inst.variant == ReductionVariant::Bipartiteness && !list.claims_edge_to(inst.n, inst.hub())
    {
        updates.push(StreamUpdate::xor(list.u_star, inst.hub()));
    }
    header.declared_length = Some(updates.len() as u64);
    accumulate(&header, &updates)
}

/// Bob's output: 1 iff the decision procedure accepts the final graph and
/// the list claims the target edge. Lists claiming structurally impossible
/// neighbors are refuted outright.
pub fn bob_decide(
    inst: &IndexInstance,
    list: &MerlinList,
    decide: impl Fn(&GraphMatrix) -> bool,
) -> Result<bool> {
    if list.neighbor_bits.len() != inst.n as usize {
        return Err(Error::InvalidParameter(format!(
            "merlin list must carry exactly {} bits, got {}",
            inst.n,
            list.neighbor_bits.len()
        )));
    }
    let legal = legal_positions(inst, list.u_star);
    let legal_set: std::collections::HashSet<usize> = legal.into_iter().collect();
    for (idx, &bit) in list.neighbor_bits.iter().enumerate() {
        if bit && !legal_set.contains(&idx) {
            return Ok(false);
        }
    }
    let g3 = graph_after_list(inst, list)?;
    let (_, v_target) = inst.target_edge();
    Ok(decide(&g3) && list.claims_edge_to(inst.n, v_target))
}

/// The trusted decision procedures the reduction plugs in by default.
pub fn oracle_decide(variant: ReductionVariant) -> impl Fn(&GraphMatrix) -> bool {
    move |g| match variant {
        ReductionVariant::Disconnectivity => !oracle_connected(g),
        ReductionVariant::Bipartiteness => oracle_bipartite(g),
    }
}

/// Deterministic random instance for harnesses.
pub fn random_instance(
    variant: ReductionVariant,
    n: u32,
    density: f64,
    seed: u64,
) -> IndexInstance {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let count = bit_count(variant, n);
    let bits = (0..count).map(|_| rng.gen_bool(density)).collect();
    let i_star = rng.gen_range(1..=count);
    IndexInstance::new(variant, n, bits, i_star).unwrap()
}
