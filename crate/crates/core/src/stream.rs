//! Stream update models, deterministic generators, graph accumulation, and
//! the brute-force oracles used as ground truth in every scheme test.
//!
//! Two update models are supported. In the strict turnstile model each
//! update carries a signed multiplicity delta; final multiplicities must land
//! in [0, B] (intermediate negatives are permitted). In the XOR model each
//! token toggles edge membership.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateModel {
    StrictTurnstile,
    Xor,
}

impl UpdateModel {
    pub fn code(self) -> u8 {
        match self {
            UpdateModel::StrictTurnstile => 1,
            UpdateModel::Xor => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(UpdateModel::StrictTurnstile),
            2 => Ok(UpdateModel::Xor),
            other => Err(Error::InvalidParameter(format!(
                "unknown update model code {other}"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UpdateModel::StrictTurnstile => "turnstile",
            UpdateModel::Xor => "xor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub n: u32,
    pub model: UpdateModel,
    pub b: u32,
    pub declared_length: Option<u64>,
}

impl StreamHeader {
    pub fn new(n: u32, model: UpdateModel, b: u32) -> Result<StreamHeader> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if b < 1 {
            return Err(Error::InvalidParameter("B must be >= 1".into()));
        }
        Ok(StreamHeader {
            n,
            model,
            b,
            declared_length: None,
        })
    }
}

/// One stream token. In the XOR model `delta` is fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamUpdate {
    pub u: u32,
    pub v: u32,
    pub delta: i64,
}

impl StreamUpdate {
    pub fn turnstile(u: u32, v: u32, delta: i64) -> StreamUpdate {
        StreamUpdate { u, v, delta }
    }

    pub fn xor(u: u32, v: u32) -> StreamUpdate {
        StreamUpdate { u, v, delta: 1 }
    }

    /// Checks node range, the no-self-loop rule, and the per-update
    /// multiplicity bound.
    pub fn validate(&self, header: &StreamHeader) -> Result<()> {
        if self.u < 1 || self.u > header.n || self.v < 1 || self.v > header.n {
            return Err(Error::MalformedStream(format!(
                "node out of range in update ({}, {})",
                self.u, self.v
            )));
        }
        if self.u == self.v {
            return Err(Error::MalformedStream(format!(
                "self-loop on node {}",
                self.u
            )));
        }
        match header.model {
            UpdateModel::StrictTurnstile => {
                if self.delta.unsigned_abs() > header.b as u64 {
                    return Err(Error::MalformedStream(format!(
                        "|delta| = {} exceeds B = {}",
                        self.delta.unsigned_abs(),
                        header.b
                    )));
                }
            }
            UpdateModel::Xor => {
                if self.delta != 1 {
                    return Err(Error::MalformedStream(
                        "XOR updates carry no delta".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric multiplicity matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMatrix {
    n: u32,
    mult: Vec<i64>,
}

impl GraphMatrix {
    pub fn empty(n: u32) -> GraphMatrix {
        GraphMatrix {
            n,
            mult: vec![0; (n as usize) * (n as usize)],
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> i64 {
        self.mult[(u as usize - 1) * self.n as usize + (v as usize - 1)]
    }

    #[inline]
    fn add(&mut self, u: u32, v: u32, delta: i64) {
        self.mult[(u as usize - 1) * self.n as usize + (v as usize - 1)] += delta;
        self.mult[(v as usize - 1) * self.n as usize + (u as usize - 1)] += delta;
    }

    #[inline]
    fn toggle(&mut self, u: u32, v: u32) {
        let cur = self.get(u, v);
        let new = 1 - cur;
        self.mult[(u as usize - 1) * self.n as usize + (v as usize - 1)] = new;
        self.mult[(v as usize - 1) * self.n as usize + (u as usize - 1)] = new;
    }

    /// Non-zero entries (u < v) with their multiplicities.
    pub fn edges(&self) -> Vec<(u32, u32, i64)> {
        let mut out = Vec::new();
        for u in 1..=self.n {
            for v in (u + 1)..=self.n {
                let m = self.get(u, v);
                if m != 0 {
                    out.push((u, v, m));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.get(u, v) >= 1
    }

    /// Builds a graph directly from an edge list (multiplicity 1 each);
    /// convenient for oracle tests.
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> GraphMatrix {
        let mut g = GraphMatrix::empty(n);
        for &(u, v) in edges {
            g.add(u, v, 1);
        }
        g
    }
}

/// Folds a validated stream into the final graph, enforcing the
/// end-of-stream invariants of the update model.
pub fn accumulate(header: &StreamHeader, updates: &[StreamUpdate]) -> Result<GraphMatrix> {
    let mut g = GraphMatrix::empty(header.n);
    if let Some(len) = header.declared_length {
        if len != updates.len() as u64 {
            return Err(Error::MalformedStream(format!(
                "declared length {len} but got {} updates",
                updates.len()
            )));
        }
    }
    for upd in updates {
        upd.validate(header)?;
        match header.model {
            UpdateModel::StrictTurnstile => g.add(upd.u, upd.v, upd.delta),
            UpdateModel::Xor => g.toggle(upd.u, upd.v),
        }
    }
    if header.model == UpdateModel::StrictTurnstile {
        for u in 1..=header.n {
            for v in (u + 1)..=header.n {
                let m = g.get(u, v);
                if m < 0 {
                    return Err(Error::MalformedStream(format!(
                        "edge ({u}, {v}) deleted more times than inserted (final multiplicity {m})"
                    )));
                }
                if m > header.b as i64 {
                    return Err(Error::MalformedStream(format!(
                        "edge ({u}, {v}) multiplicity {m} exceeds B = {}",
                        header.b
                    )));
                }
            }
        }
    }
    Ok(g)
}

/// Sum over unordered node triples of the product of the three edge
/// multiplicities.
pub fn oracle_triangles(g: &GraphMatrix) -> u64 {
    let n = g.n();
    let mut total: i128 = 0;
    for u in 1..=n {
        for v in (u + 1)..=n {
            let muv = g.get(u, v) as i128;
            if muv == 0 {
                continue;
            }
            for z in (v + 1)..=n {
                total += muv * g.get(v, z) as i128 * g.get(z, u) as i128;
            }
        }
    }
    u64::try_from(total).expect("triangle count fits u64 for valid streams")
}

/// Direct simulation of the incremental 4-cycle expression: for each update
/// i, add delta_i times the number of length-3 walks from u_i to v_i in the
/// graph before the update. O(m * n^2); this is the protocol's ground truth
/// by definition.
pub fn oracle_fourcycles_incremental(
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<i128> {
    if header.model != UpdateModel::StrictTurnstile {
        return Err(Error::MalformedStream(
            "4-cycle oracle requires the strict turnstile model".into(),
        ));
    }
    let n = header.n as usize;
    let mut e = vec![0i64; n * n];
    let mut total: i128 = 0;
    for upd in updates {
        upd.validate(header)?;
        let (u, v) = (upd.u as usize - 1, upd.v as usize - 1);
        let mut walks: i128 = 0;
        for z1 in 0..n {
            let a = e[u * n + z1];
            if a == 0 {
                continue;
            }
            let mut inner: i128 = 0;
            for z2 in 0..n {
                inner += e[z1 * n + z2] as i128 * e[z2 * n + v] as i128;
            }
            walks += a as i128 * inner;
        }
        total += upd.delta as i128 * walks;
        e[u * n + v] += upd.delta;
        e[v * n + u] += upd.delta;
    }
    for u in 0..n {
        for v in (u + 1)..n {
            let m = e[u * n + v];
            if m < 0 || m > header.b as i64 {
                return Err(Error::MalformedStream(format!(
                    "final multiplicity {m} outside [0, B] at ({}, {})",
                    u + 1,
                    v + 1
                )));
            }
        }
    }
    Ok(total)
}

/// Exhaustive enumeration of simple 4-cycles (test oracle for the
/// incremental expression on simple insert-only streams).
pub fn count_simple_fourcycles(g: &GraphMatrix) -> u64 {
    let n = g.n();
    let mut count = 0u64;
    // Unordered 4-cycles a-b-c-d-a, counted once by fixing a as the smallest
    // node and requiring b < d for the two neighbors of a on the cycle.
    for a in 1..=n {
        for b in (a + 1)..=n {
            if !g.has_edge(a, b) {
                continue;
            }
            for d in (b + 1)..=n {
                if !g.has_edge(a, d) {
                    continue;
                }
                for c in (a + 1)..=n {
                    if c != b && c != d && g.has_edge(b, c) && g.has_edge(c, d) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

const MATCHING_ORACLE_LIMIT: u32 = 24;
const TUTTE_ORACLE_LIMIT: u32 = 20;

/// Maximum-cardinality matching by exhaustive bitmask search, returning the
/// lexicographically least maximum matching (edges sorted ascending).
pub fn oracle_max_matching(g: &GraphMatrix) -> Result<(u64, Vec<(u32, u32)>)> {
    let n = g.n();
    if n > MATCHING_ORACLE_LIMIT {
        return Err(Error::OracleScale {
            n,
            limit: MATCHING_ORACLE_LIMIT,
        });
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            if g.has_edge(u, v) {
                edges.push((u, v));
            }
        }
    }
    let full: u32 = ((1u64 << n) - 1) as u32;
    let mut memo: HashMap<u32, u32> = HashMap::new();
    let k = max_matching_size(full, &edges, &mut memo);

    // Greedy lexicographic reconstruction: every edge of every maximum
    // matching is >= the smallest edge contained in any maximum matching,
    // so repeatedly committing the smallest feasible edge is exact.
    let mut matching = Vec::new();
    let mut mask = full;
    let mut needed = k;
    while needed > 0 {
        let mut advanced = false;
        for &(u, v) in &edges {
            let bits = (1u32 << (u - 1)) | (1u32 << (v - 1));
            if mask & bits != bits {
                continue;
            }
            if 1 + max_matching_size(mask & !bits, &edges, &mut memo) == needed {
                matching.push((u, v));
                mask &= !bits;
                needed -= 1;
                advanced = true;
                break;
            }
        }
        assert!(advanced, "matching reconstruction must make progress");
    }
    Ok((k as u64, matching))
}

fn max_matching_size(mask: u32, edges: &[(u32, u32)], memo: &mut HashMap<u32, u32>) -> u32 {
    if mask == 0 {
        return 0;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let low = mask.trailing_zeros() + 1; // 1-based node with lowest index
    let without = max_matching_size(mask & !(1 << (low - 1)), edges, memo);
    let mut best = without;
    for &(u, v) in edges {
        if u != low && v != low {
            continue;
        }
        let bits = (1u32 << (u - 1)) | (1u32 << (v - 1));
        if mask & bits == bits {
            best = best.max(1 + max_matching_size(mask & !bits, edges, memo));
        }
    }
    memo.insert(mask, best);
    best
}

/// Minimizer of (|U| - odd(G-U) + n) / 2 over all U, with the
/// lexicographically least minimizing subset; asserts agreement with the
/// exhaustive matching oracle (Tutte-Berge duality).
pub fn oracle_tutte_berge(g: &GraphMatrix) -> Result<(u64, Vec<u32>)> {
    let n = g.n();
    if n > TUTTE_ORACLE_LIMIT {
        return Err(Error::OracleScale {
            n,
            limit: TUTTE_ORACLE_LIMIT,
        });
    }
    let mut best_value = u64::MAX;
    let mut best_set: Vec<u32> = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let exclude: Vec<u32> = (1..=n).filter(|&v| mask & (1 << (v - 1)) != 0).collect();
        let (_, odd) = oracle_components(g, &exclude);
        let numerator = exclude.len() as i64 - odd as i64 + n as i64;
        debug_assert!(numerator >= 0 && numerator % 2 == 0);
        let value = (numerator / 2) as u64;
        if value < best_value || (value == best_value && exclude < best_set) {
            best_value = value;
            best_set = exclude;
        }
    }
    let (k, _) = oracle_max_matching(g)?;
    assert_eq!(
        best_value, k,
        "Tutte-Berge value must equal the maximum matching size"
    );
    Ok((best_value, best_set))
}

/// Connected-component labels (smallest node id per component) on the nodes
/// outside `exclude`, plus the number of odd-cardinality components.
pub fn oracle_components(g: &GraphMatrix, exclude: &[u32]) -> (Vec<Option<u32>>, u32) {
    let n = g.n() as usize;
    let mut excluded = vec![false; n + 1];
    for &u in exclude {
        excluded[u as usize] = true;
    }
    let mut parent: Vec<u32> = (0..=n as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for u in 1..=n as u32 {
        if excluded[u as usize] {
            continue;
        }
        for v in (u + 1)..=n as u32 {
            if excluded[v as usize] || !g.has_edge(u, v) {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                // Union by smaller id so every root is its component minimum.
                let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut labels: Vec<Option<u32>> = vec![None; n];
    let mut sizes: HashMap<u32, u32> = HashMap::new();
    for u in 1..=n as u32 {
        if excluded[u as usize] {
            continue;
        }
        let root = find(&mut parent, u);
        labels[u as usize - 1] = Some(root);
        *sizes.entry(root).or_insert(0) += 1;
    }
    let odd = sizes.values().filter(|&&s| s % 2 == 1).count() as u32;
    (labels, odd)
}

pub fn oracle_connected(g: &GraphMatrix) -> bool {
    let (labels, _) = oracle_components(g, &[]);
    let mut roots = labels.iter().flatten();
    match roots.next() {
        None => true,
        Some(first) => labels.iter().flatten().all(|r| r == first),
    }
}

pub fn oracle_bipartite(g: &GraphMatrix) -> bool {
    let n = g.n() as usize;
    let mut color = vec![-1i8; n + 1];
    for start in 1..=n as u32 {
        if color[start as usize] != -1 {
            continue;
        }
        color[start as usize] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 1..=n as u32 {
                if v == u || !g.has_edge(u, v) {
                    continue;
                }
                if color[v as usize] == -1 {
                    color[v as usize] = 1 - color[u as usize];
                    queue.push_back(v);
                } else if color[v as usize] == color[u as usize] {
                    return false;
                }
            }
        }
    }
    true
}

/// Parameters for the deterministic stream generator.
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub n: u32,
    pub m: u64,
    pub b: u32,
    pub model: UpdateModel,
    pub deletion_fraction: f64,
    pub seed: u64,
}

/// Deterministic pseudorandom stream. Turnstile streams are valid by
/// construction: deletions only remove previously net-inserted copies, so
/// final multiplicities always land in [0, B].
pub fn generate(spec: &GenSpec) -> Result<(StreamHeader, Vec<StreamUpdate>)> {
    let header = StreamHeader::new(spec.n, spec.model, spec.b)?;
    if !(0.0..=1.0).contains(&spec.deletion_fraction) {
        return Err(Error::InvalidParameter(
            "deletion_fraction must be in [0, 1]".into(),
        ));
    }
    let pairs = spec.n as u64 * (spec.n as u64 - 1) / 2;
    if spec.model == UpdateModel::StrictTurnstile
        && spec.deletion_fraction == 0.0
        && spec.m > pairs * spec.b as u64
    {
        return Err(Error::InvalidParameter(format!(
            "{} insert-only updates cannot fit {pairs} pairs at B = {}",
            spec.m, spec.b
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut updates = Vec::with_capacity(spec.m as usize);
    match spec.model {
        UpdateModel::Xor => {
            for _ in 0..spec.m {
                let (u, v) = random_pair(&mut rng, spec.n);
                updates.push(StreamUpdate::xor(u, v));
            }
        }
        UpdateModel::StrictTurnstile => {
            let mut cur: HashMap<(u32, u32), u32> = HashMap::new();
            while updates.len() < spec.m as usize {
                let try_delete = rng.gen::<f64>() < spec.deletion_fraction;
                if try_delete {
                    let mut occupied: Vec<(u32, u32)> = cur
                        .iter()
                        .filter(|(_, &c)| c > 0)
                        .map(|(&e, _)| e)
                        .collect();
                    if !occupied.is_empty() {
                        occupied.sort_unstable();
                        let e = occupied[rng.gen_range(0..occupied.len())];
                        *cur.get_mut(&e).unwrap() -= 1;
                        updates.push(StreamUpdate::turnstile(e.0, e.1, -1));
                        continue;
                    }
                }
                // Insert: rejection-sample a pair below the multiplicity cap.
                let mut attempts = 0;
                let mut slot = None;
                loop {
                    let e = random_pair(&mut rng, spec.n);
                    if *cur.get(&e).unwrap_or(&0) < spec.b {
                        slot = Some(e);
                        break;
                    }
                    attempts += 1;
                    if attempts > 200 {
                        break;
                    }
                }
                let slot = slot.or_else(|| {
                    all_pairs(spec.n)
                        .into_iter()
                        .find(|e| *cur.get(e).unwrap_or(&0) < spec.b)
                });
                match slot {
                    Some(e) => {
                        *cur.entry(e).or_insert(0) += 1;
                        updates.push(StreamUpdate::turnstile(e.0, e.1, 1));
                    }
                    None => {
                        // Graph saturated at B everywhere: delete instead.
                        let mut occupied: Vec<(u32, u32)> =
                            cur.iter().filter(|(_, &c)| c > 0).map(|(&e, _)| e).collect();
                        occupied.sort_unstable();
                        let e = occupied[rng.gen_range(0..occupied.len())];
                        *cur.get_mut(&e).unwrap() -= 1;
                        updates.push(StreamUpdate::turnstile(e.0, e.1, -1));
                    }
                }
            }
        }
    }
    Ok((header, updates))
}

fn random_pair(rng: &mut ChaCha20Rng, n: u32) -> (u32, u32) {
    let u = rng.gen_range(1..=n);
    let mut v = rng.gen_range(1..=n - 1);
    if v >= u {
        v += 1;
    }
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn all_pairs(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            out.push((u, v));
        }
    }
    out
}

/// Text stream format: header line `n=<n> model=<turnstile|xor> B=<B>`,
/// then one update per line (`u v delta` for turnstile, `u v` for xor).
pub fn write_text(header: &StreamHeader, updates: &[StreamUpdate]) -> String {
    let mut out = format!(
        "n={} model={} B={}\n",
        header.n,
        header.model.name(),
        header.b
    );
    for upd in updates {
        match header.model {
            UpdateModel::StrictTurnstile => {
                out.push_str(&format!("{} {} {}\n", upd.u, upd.v, upd.delta))
            }
            UpdateModel::Xor => out.push_str(&format!("{} {}\n", upd.u, upd.v)),
        }
    }
    out
}

pub fn parse_text(text: &str) -> Result<(StreamHeader, Vec<StreamUpdate>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header_line = lines
        .next()
        .ok_or_else(|| Error::MalformedStream("empty stream file".into()))?;
    let mut n = None;
    let mut model = None;
    let mut b = None;
    let mut declared = None;
    for part in header_line.split_whitespace() {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::MalformedStream(format!("bad header token '{part}'")))?;
        match key {
            "n" => n = Some(parse_num(value)? as u32),
            "B" => b = Some(parse_num(value)? as u32),
            "m" => declared = Some(parse_num(value)?),
            "model" => {
                model = Some(match value {
                    "turnstile" => UpdateModel::StrictTurnstile,
                    "xor" => UpdateModel::Xor,
                    other => {
                        return Err(Error::MalformedStream(format!(
                            "unknown model '{other}'"
                        )))
                    }
                })
            }
            other => {
                return Err(Error::MalformedStream(format!(
                    "unknown header key '{other}'"
                )))
            }
        }
    }
    let mut header = StreamHeader::new(
        n.ok_or_else(|| Error::MalformedStream("header missing n".into()))?,
        model.ok_or_else(|| Error::MalformedStream("header missing model".into()))?,
        b.ok_or_else(|| Error::MalformedStream("header missing B".into()))?,
    )?;
    header.declared_length = declared;
    let mut updates = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let upd = match (header.model, fields.as_slice()) {
            (UpdateModel::StrictTurnstile, [u, v, d]) => StreamUpdate::turnstile(
                parse_num(u)? as u32,
                parse_num(v)? as u32,
                d.parse::<i64>()
                    .map_err(|_| Error::MalformedStream(format!("bad delta '{d}'")))?,
            ),
            (UpdateModel::Xor, [u, v]) => {
                StreamUpdate::xor(parse_num(u)? as u32, parse_num(v)? as u32)
            }
            _ => {
                return Err(Error::MalformedStream(format!(
                    "bad update line '{line}' for model {}",
                    header.model.name()
                )))
            }
        };
        upd.validate(&header)?;
        updates.push(upd);
    }
    Ok((header, updates))
}

fn parse_num(s: &str) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::MalformedStream(format!("bad number '{s}'")))
}
