//! Exact maximum matching via Tutte-Berge certification.
//!
//! The prover claims k and certifies it from both sides in one annotation:
//!
//! * Part one (lower bound): a matching M of k edges, shown to lie inside E
//!   through a functional-subset polynomial read off the edge LDE.
//! * Part two (upper bound): a Tutte-Berge witness U* with component labels
//!   L for G - U*, spanning trees certifying each label class is connected
//!   (property A), and a polynomial zero-sum certifying no edge crosses two
//!   label classes (property B). The verifier then counts odd label classes
//!   and checks 2k = |U*| - odd + n.
//!
//! Both subset checks and the property-B check ride on the same n-element
//! sketch of E~(u, r) that the verifier maintains during the stream.

use crate::field::{FieldContext, FieldElement, SchemeKind};
use crate::poly::{LagrangeTable, PointValuePoly};
use crate::stream::{
    accumulate, oracle_components, oracle_max_matching, oracle_tutte_berge, GraphMatrix,
    StreamHeader, StreamUpdate, UpdateModel,
};
use crate::{Error, Result, Verdict};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// Streaming verifier state for the matching scheme: the n values E~(u, r)
/// maintained exactly as in the triangle sketch, without the accumulator.
#[derive(Debug, Clone)]
pub struct MatchingSketch {
    field: FieldContext,
    r: FieldElement,
    table: LagrangeTable,
    evals: Vec<FieldElement>,
    mul_count: u64,
    updates_processed: u64,
}

impl MatchingSketch {
    pub fn new(field: &FieldContext, secret_r: FieldElement) -> Result<MatchingSketch> {
        if field.kind() != SchemeKind::Matching {
            return Err(Error::InvalidParameter(format!(
                "matching sketch needs a matching field, got {}",
                field.kind().name()
            )));
        }
        let r = field.check_element(secret_r)?;
        let table = LagrangeTable::build(field, r, field.n())?;
        Ok(MatchingSketch {
            field: *field,
            r,
            table,
            evals: vec![field.zero(); field.n() as usize],
            mul_count: 0,
            updates_processed: 0,
        })
    }

    pub fn update(&mut self, upd: &StreamUpdate) -> Result<()> {
        let header = StreamHeader {
            n: self.field.n(),
            model: UpdateModel::StrictTurnstile,
            b: self.field.multiplicity_bound(),
            declared_length: None,
        };
        upd.validate(&header)?;
        let delta = self.field.element_from_i64(upd.delta);
        self.evals[upd.u as usize - 1] += delta * self.table.lam(upd.v);
        self.evals[upd.v as usize - 1] += delta * self.table.lam(upd.u);
        self.mul_count += 2;
        self.updates_processed += 1;
        Ok(())
    }

    pub fn consume(&mut self, updates: &[StreamUpdate]) -> Result<()> {
        for upd in updates {
            self.update(upd)?;
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    pub fn r(&self) -> FieldElement {
        self.r
    }

    pub fn evals(&self) -> &[FieldElement] {
        &self.evals
    }

    pub fn table(&self) -> &LagrangeTable {
        &self.table
    }

    pub fn mul_count(&self) -> u64 {
        self.mul_count
    }

    pub fn updates_processed(&self) -> u64 {
        self.updates_processed
    }

    pub fn state_field_elements(&self) -> usize {
        self.evals.len() + self.table.stored_elements() + 1
    }
}

/// Ordered edge claim; heads are the readable coordinates of the
/// functional-subset polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedEdge {
    pub tail: u32,
    pub head: u32,
}

/// A set of ordered pairs with pairwise-distinct heads. Head uniqueness is
/// what makes p(v) = E(tail(v), v) readable at the integer point v.
#[derive(Debug, Clone)]
pub struct FunctionalPairSet {
    n: u32,
    pairs: Vec<OrientedEdge>,
}

impl FunctionalPairSet {
    pub fn new(n: u32, pairs: Vec<OrientedEdge>) -> Result<FunctionalPairSet> {
        let mut heads = HashSet::new();
        for e in &pairs {
            if e.tail < 1 || e.tail > n || e.head < 1 || e.head > n {
                return Err(Error::InvalidParameter(format!(
                    "pair ({}, {}) outside [1, {n}]",
                    e.tail, e.head
                )));
            }
            if e.tail == e.head {
                return Err(Error::InvalidParameter(format!(
                    "self-pair on node {}",
                    e.tail
                )));
            }
            if !heads.insert(e.head) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate head {}",
                    e.head
                )));
            }
        }
        Ok(FunctionalPairSet { n, pairs })
    }

    pub fn pairs(&self) -> &[OrientedEdge] {
        &self.pairs
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Replays the stream once, maintaining the node evaluations E~(u, x) for
/// every requested point x in parallel. Row j of the result holds
/// E~(u, points[j]) for u in 1..n at end of stream.
pub(crate) fn lde_rows(
    field: &FieldContext,
    updates: &[StreamUpdate],
    points: &[FieldElement],
) -> Result<Vec<Vec<FieldElement>>> {
    let n = field.n() as usize;
    let tables: Vec<LagrangeTable> = points
        .iter()
        .map(|&x| LagrangeTable::build(field, x, field.n()))
        .collect::<Result<_>>()?;
    let mut rows = vec![vec![field.zero(); n]; points.len()];
    for upd in updates {
        let (u, v) = (upd.u as usize - 1, upd.v as usize - 1);
        let delta = field.element_from_i64(upd.delta);
        for (row, table) in rows.iter_mut().zip(&tables) {
            row[u] += delta * table.lam(upd.v);
            row[v] += delta * table.lam(upd.u);
        }
    }
    Ok(rows)
}

fn proof_points(field: &FieldContext) -> Vec<FieldElement> {
    (0..=2 * field.n() as u64).map(|x| field.element(x)).collect()
}

/// Values on {0..2n} of p(Y) = sum_u P~(u, Y) * E~(u, Y), where P~ is the
/// pair-indicator LDE. At an integer head v this reads E(tail(v), v).
pub fn functional_subset_prove(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
    pairs: &FunctionalPairSet,
) -> Result<PointValuePoly> {
    accumulate(header, updates)?;
    let rows = lde_rows(field, updates, &proof_points(field))?;
    functional_subset_values(field, &rows, pairs)
}

fn functional_subset_values(
    field: &FieldContext,
    rows: &[Vec<FieldElement>],
    pairs: &FunctionalPairSet,
) -> Result<PointValuePoly> {
    let points = proof_points(field);
    let mut values = Vec::with_capacity(points.len());
    for (j, &y) in points.iter().enumerate() {
        let table = LagrangeTable::build(field, y, field.n())?;
        let mut acc = field.zero();
        for e in pairs.pairs() {
            acc += table.lam(e.head) * rows[j][e.tail as usize - 1];
        }
        values.push(acc);
    }
    PointValuePoly::new(field, values)
}

/// Outcome of a functional-subset check: the per-head multiplicities read
/// off the polynomial, or rejection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetVerdict {
    Accept(Vec<(u32, u64)>),
    Reject,
}

/// Checks t(r) against sum_u P~(u, r) * E~(u, r) computed from the stored
/// sketch in O(|pairs| + n), then reads head multiplicities at the integer
/// points.
pub fn functional_subset_verify(
    sketch: &MatchingSketch,
    pairs: &FunctionalPairSet,
    t: &PointValuePoly,
) -> Result<SubsetVerdict> {
    let n = sketch.field.n() as usize;
    if t.field() != &sketch.field {
        return Err(Error::FieldMismatch);
    }
    if t.values().len() != 2 * n + 1 {
        return Err(Error::MalformedProof(format!(
            "subset polynomial must carry {} values, got {}",
            2 * n + 1,
            t.values().len()
        )));
    }
    let mut rhs = sketch.field.zero();
    for e in pairs.pairs() {
        rhs += sketch.table.lam(e.head) * sketch.evals[e.tail as usize - 1];
    }
    if t.eval(sketch.r)? != rhs {
        return Ok(SubsetVerdict::Reject);
    }
    let reads = pairs
        .pairs()
        .iter()
        .map(|e| (e.head, t.value_at(e.head as usize).value()))
        .collect();
    Ok(SubsetVerdict::Accept(reads))
}

/// Per-label spanning tree, stored as (child, parent) arcs; the root is the
/// unique labelled node with no parent entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTree {
    pub label: u32,
    pub parents: Vec<(u32, u32)>,
}

/// The full annotation, sent after the final stream token in the fixed
/// order (k, M, tM, U*, L, trees, tT, sB).
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingProof {
    pub k: u64,
    pub matching: Vec<OrientedEdge>,
    pub t_matching: PointValuePoly,
    pub u_star: Vec<u32>,
    pub labels: Vec<(u32, u32)>,
    pub trees: Vec<LabelTree>,
    pub t_trees: PointValuePoly,
    pub s_b: PointValuePoly,
}

impl MatchingProof {
    /// Node ids the verifier stores explicitly (M, U*, L, trees), counted
    /// for the space reports.
    pub fn stored_ids(&self) -> usize {
        self.matching.len() * 2
            + self.u_star.len()
            + self.labels.len() * 2
            + self
                .trees
                .iter()
                .map(|t| 1 + 2 * t.parents.len())
                .sum::<usize>()
    }
}

/// E~(u, r) evaluations of the disallowed-pair indicator D via the H trick:
/// D~(u, r) = H - sum_{v: label(v) = label(u)} lambda_v(r) for u outside
/// U*, zero inside, where H sums lambda_v(r) over all labelled nodes. O(n).
pub fn fast_d_evals(
    field: &FieldContext,
    u_star: &[u32],
    labels: &[(u32, u32)],
    table: &LagrangeTable,
) -> Vec<FieldElement> {
    let n = field.n() as usize;
    let in_ustar: HashSet<u32> = u_star.iter().copied().collect();
    let mut label_of: HashMap<u32, u32> = HashMap::new();
    let mut label_sum: HashMap<u32, FieldElement> = HashMap::new();
    let mut h = field.zero();
    for &(node, label) in labels {
        label_of.insert(node, label);
        let entry = label_sum.entry(label).or_insert_with(|| field.zero());
        *entry += table.lam(node);
        h += table.lam(node);
    }
    (1..=n as u32)
        .map(|u| {
            if in_ustar.contains(&u) {
                return field.zero();
            }
            match label_of.get(&u) {
                Some(l) => h - label_sum[l],
                None => field.zero(),
            }
        })
        .collect()
}

fn matching_orientation(edges: &[(u32, u32)]) -> Vec<OrientedEdge> {
    edges
        .iter()
        .map(|&(u, v)| OrientedEdge { tail: u, head: v })
        .collect()
}

fn tree_arcs(trees: &[LabelTree]) -> Vec<OrientedEdge> {
    trees
        .iter()
        .flat_map(|t| t.parents.iter().map(|&(child, parent)| OrientedEdge {
            tail: parent,
            head: child,
        }))
        .collect()
}

/// Honest prover. The witnesses come from the exhaustive oracles (maximum
/// matching, Tutte-Berge minimizer, component labels); the presence
/// polynomials and the property-B polynomial come from 2n+1 stream replays.
pub fn prove_matching(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<MatchingProof> {
    let (g, witness) = prove_witness(field, header, updates)?;
    assemble_proof(field, updates, &g, witness)
}

/// The graph-side witness of the honest proof, before the polynomial parts.
struct Witness {
    k: u64,
    matching: Vec<OrientedEdge>,
    u_star: Vec<u32>,
    labels: Vec<(u32, u32)>,
    trees: Vec<LabelTree>,
}

fn prove_witness(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<(GraphMatrix, Witness)> {
    if field.kind() != SchemeKind::Matching {
        return Err(Error::InvalidParameter(
            "matching prover needs a matching field".into(),
        ));
    }
    if header.model != UpdateModel::StrictTurnstile {
        return Err(Error::MalformedStream(
            "matching scheme runs on strict turnstile streams".into(),
        ));
    }
    let g = accumulate(header, updates)?;
    let (k, m_edges) = oracle_max_matching(&g)?;
    let (value, u_star) = oracle_tutte_berge(&g)?;
    debug_assert_eq!(value, k);
    let (label_roots, _) = oracle_components(&g, &u_star);
    let mut labels: Vec<(u32, u32)> = Vec::new();
    let mut classes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (idx, root) in label_roots.iter().enumerate() {
        if let Some(root) = root {
            let node = idx as u32 + 1;
            labels.push((node, *root));
            classes.entry(*root).or_default().push(node);
        }
    }
    let trees = classes
        .iter()
        .map(|(&label, nodes)| LabelTree {
            label,
            parents: bfs_tree(&g, label, nodes),
        })
        .collect();
    Ok((
        g,
        Witness {
            k,
            matching: matching_orientation(&m_edges),
            u_star,
            labels,
            trees,
        },
    ))
}

fn assemble_proof(
    field: &FieldContext,
    updates: &[StreamUpdate],
    _g: &GraphMatrix,
    witness: Witness,
) -> Result<MatchingProof> {
    let n = field.n();
    let rows = lde_rows(field, updates, &proof_points(field))?;
    let m_pairs = FunctionalPairSet::new(n, witness.matching.clone())?;
    let t_matching = functional_subset_values(field, &rows, &m_pairs)?;
    let tree_pairs = FunctionalPairSet::new(n, tree_arcs(&witness.trees))?;
    let t_trees = functional_subset_values(field, &rows, &tree_pairs)?;

    // s_B values: sum_u D~(u, y) E~(u, y) at every proof point y.
    let points = proof_points(field);
    let mut s_b_values = Vec::with_capacity(points.len());
    for (j, &y) in points.iter().enumerate() {
        let table = LagrangeTable::build(field, y, n)?;
        let d = fast_d_evals(field, &witness.u_star, &witness.labels, &table);
        let mut acc = field.zero();
        for u in 0..n as usize {
            acc += d[u] * rows[j][u];
        }
        s_b_values.push(acc);
    }
    Ok(MatchingProof {
        k: witness.k,
        matching: witness.matching,
        t_matching,
        u_star: witness.u_star,
        labels: witness.labels,
        trees: witness.trees,
        t_trees,
        s_b: PointValuePoly::new(field, s_b_values)?,
    })
}

/// BFS spanning tree of one component, rooted at its minimum node; arcs are
/// (child, parent).
fn bfs_tree(g: &GraphMatrix, root: u32, nodes: &[u32]) -> Vec<(u32, u32)> {
    let members: HashSet<u32> = nodes.iter().copied().collect();
    let mut parents = Vec::new();
    let mut seen: HashSet<u32> = HashSet::from([root]);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in nodes {
            if !seen.contains(&v) && members.contains(&v) && g.has_edge(u, v) {
                seen.insert(v);
                parents.push((v, u));
                queue.push_back(v);
            }
        }
    }
    parents
}

/// Runs the full verification sequence; content-level failures reject,
/// shape-level failures are malformed.
pub fn verify_matching(sketch: &MatchingSketch, proof: &MatchingProof) -> Result<Verdict> {
    let field = &sketch.field;
    let n = field.n();
    let b_bound = field.multiplicity_bound() as u64;

    // Shape checks first: everything must parse against n.
    for e in &proof.matching {
        if e.tail < 1 || e.tail > n || e.head < 1 || e.head > n || e.tail == e.head {
            return Err(Error::MalformedProof(format!(
                "matching edge ({}, {}) out of range",
                e.tail, e.head
            )));
        }
    }
    for &u in &proof.u_star {
        if u < 1 || u > n {
            return Err(Error::MalformedProof(format!("U* node {u} out of range")));
        }
    }
    for &(node, _) in &proof.labels {
        if node < 1 || node > n {
            return Err(Error::MalformedProof(format!(
                "labelled node {node} out of range"
            )));
        }
    }
    for tree in &proof.trees {
        for &(child, parent) in &tree.parents {
            if child < 1 || child > n || parent < 1 || parent > n || child == parent {
                return Err(Error::MalformedProof(format!(
                    "tree arc ({child}, {parent}) out of range"
                )));
            }
        }
    }

    // Step 1, property 1: every node meets at most one matching edge.
    let mut incidence: HashMap<u32, u32> = HashMap::new();
    for e in &proof.matching {
        for node in [e.tail, e.head] {
            let c = incidence.entry(node).or_insert(0);
            *c += 1;
            if *c > 1 {
                return Ok(Verdict::Reject);
            }
        }
    }

    // Step 2, property 2: M inside E with multiplicities in [1, B].
    let m_pairs = match FunctionalPairSet::new(n, proof.matching.clone()) {
        Ok(p) => p,
        Err(_) => return Ok(Verdict::Reject), // duplicate heads can only mean a cheating prover
    };
    match functional_subset_verify(sketch, &m_pairs, &proof.t_matching)? {
        SubsetVerdict::Reject => return Ok(Verdict::Reject),
        SubsetVerdict::Accept(reads) => {
            if reads.iter().any(|&(_, m)| m < 1 || m > b_bound) {
                return Ok(Verdict::Reject);
            }
        }
    }

    // Step 3: U* well-formed and L covers V \ U* exactly once.
    let u_star: BTreeSet<u32> = proof.u_star.iter().copied().collect();
    if u_star.len() != proof.u_star.len() {
        return Err(Error::MalformedProof("duplicate node in U*".into()));
    }
    let mut covered: BTreeSet<u32> = BTreeSet::new();
    for &(node, _) in &proof.labels {
        if u_star.contains(&node) || !covered.insert(node) {
            return Ok(Verdict::Reject);
        }
    }
    if covered.len() as u64 != n as u64 - u_star.len() as u64 {
        return Ok(Verdict::Reject);
    }

    // Step 4, property A structure: per label, arcs stay inside the class,
    // every non-root has exactly one parent, exactly one root, and the arcs
    // connect the whole class.
    let mut class_nodes: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for &(node, label) in &proof.labels {
        class_nodes.entry(label).or_default().insert(node);
    }
    let tree_labels: Vec<u32> = proof.trees.iter().map(|t| t.label).collect();
    let distinct_tree_labels: BTreeSet<u32> = tree_labels.iter().copied().collect();
    if distinct_tree_labels.len() != tree_labels.len()
        || distinct_tree_labels != class_nodes.keys().copied().collect()
    {
        return Ok(Verdict::Reject);
    }
    for tree in &proof.trees {
        let members = &class_nodes[&tree.label];
        let mut children: BTreeSet<u32> = BTreeSet::new();
        for &(child, parent) in &tree.parents {
            if !members.contains(&child) || !members.contains(&parent) {
                return Ok(Verdict::Reject);
            }
            if !children.insert(child) {
                return Ok(Verdict::Reject); // two parents for one node
            }
        }
        let roots: Vec<u32> = members.iter().copied().filter(|m| !children.contains(m)).collect();
        if roots.len() != 1 {
            return Ok(Verdict::Reject);
        }
        if !arcs_span(members, &tree.parents) {
            return Ok(Verdict::Reject);
        }
    }

    // Step 5: the tree arcs all lie inside E.
    let tree_pairs = match FunctionalPairSet::new(n, tree_arcs(&proof.trees)) {
        Ok(p) => p,
        Err(_) => return Ok(Verdict::Reject),
    };
    match functional_subset_verify(sketch, &tree_pairs, &proof.t_trees)? {
        SubsetVerdict::Reject => return Ok(Verdict::Reject),
        SubsetVerdict::Accept(reads) => {
            if reads.iter().any(|&(_, m)| m < 1 || m > b_bound) {
                return Ok(Verdict::Reject);
            }
        }
    }

    // Step 6, property B: s_B(r) must equal sum_u D~(u, r) E~(u, r), and the
    // claimed cross-label mass over the node domain must vanish.
    if proof.s_b.field() != field {
        return Err(Error::FieldMismatch);
    }
    if proof.s_b.values().len() != 2 * n as usize + 1 {
        return Err(Error::MalformedProof("property-B polynomial has wrong length".into()));
    }
    let d = fast_d_evals(field, &proof.u_star, &proof.labels, &sketch.table);
    let mut rhs = field.zero();
    for (du, eu) in d.iter().zip(&sketch.evals) {
        rhs += *du * *eu;
    }
    if proof.s_b.eval(sketch.r)? != rhs {
        return Ok(Verdict::Reject);
    }
    if !proof.s_b.range_sum(1, n as usize)?.is_zero() {
        return Ok(Verdict::Reject);
    }

    // Step 7: odd-component count and the Tutte-Berge identity.
    let mut label_multiplicity: HashMap<u32, u32> = HashMap::new();
    for &(_, label) in &proof.labels {
        *label_multiplicity.entry(label).or_insert(0) += 1;
    }
    let odd = label_multiplicity.values().filter(|&&c| c % 2 == 1).count() as i64;
    if proof.k as i64 * 2 != proof.u_star.len() as i64 - odd + n as i64 {
        return Ok(Verdict::Reject);
    }
    if proof.k != proof.matching.len() as u64 {
        return Ok(Verdict::Reject);
    }
    Ok(Verdict::Accept(proof.k))
}

fn arcs_span(members: &BTreeSet<u32>, arcs: &[(u32, u32)]) -> bool {
    let mut parent: HashMap<u32, u32> = members.iter().map(|&m| (m, m)).collect();
    fn find(parent: &mut HashMap<u32, u32>, x: u32) -> u32 {
        let mut root = x;
        while parent[&root] != root {
            root = parent[&root];
        }
        let mut cur = x;
        while parent[&cur] != root {
            let next = parent[&cur];
            parent.insert(cur, root);
            cur = next;
        }
        root
    }
    let mut components = members.len();
    for &(child, par) in arcs {
        let (rc, rp) = (find(&mut parent, child), find(&mut parent, par));
        if rc != rp {
            parent.insert(rc, rp);
            components -= 1;
        }
    }
    components == 1
}

// ---------------------------------------------------------------------------
// Adversarial provers for the soundness harnesses. Each returns None when the
// instance lacks the structure the attack needs.
// ---------------------------------------------------------------------------

/// Family 1: claim k+1 with a fabricated matching edge absent from E. The
/// presence polynomial is forged at the fake head so the multiplicity read
/// passes; rejection must come from the algebraic subset check (or the
/// final Tutte-Berge identity when part two stays honest).
pub fn attack_phantom_edge(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<Option<MatchingProof>> {
    let g = accumulate(header, updates)?;
    let honest = prove_matching(field, header, updates)?;
    let Some(fake) = find_phantom_edge(&g, &honest) else {
        return Ok(None);
    };
    let mut forged = honest;
    forged.matching.push(fake);
    forged.k += 1;
    forged.t_matching = forge_subset_poly(field, updates, &forged.matching, fake.head)?;
    Ok(Some(forged))
}

/// Family 2: inflate k with a forged U*. Moving an isolated node of G - U*
/// into U* raises the Tutte-Berge bound to k+1 with a fully honest part-two
/// certificate for the forged witness; only the phantom matching edge lies,
/// so rejection rides on the subset algebra alone.
pub fn attack_inflated_k_forged_ustar(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<Option<MatchingProof>> {
    let g = accumulate(header, updates)?;
    let honest = prove_matching(field, header, updates)?;

    // An isolated node of G - U* (a singleton label class), paired with a
    // phantom edge that avoids it.
    let mut class_sizes: HashMap<u32, u32> = HashMap::new();
    for &(_, label) in &honest.labels {
        *class_sizes.entry(label).or_insert(0) += 1;
    }
    let mut singletons: Vec<u32> = honest
        .labels
        .iter()
        .filter(|(_, l)| class_sizes[l] == 1)
        .map(|&(node, _)| node)
        .collect();
    singletons.sort_unstable();
    let Some((singleton, fake)) = singletons.iter().find_map(|&s| {
        find_phantom_edge_avoiding(&g, &honest, s).map(|fake| (s, fake))
    }) else {
        return Ok(None);
    };

    let mut forged = honest;
    forged.u_star.push(singleton);
    forged.u_star.sort_unstable();
    forged.labels.retain(|&(node, _)| node != singleton);
    // A singleton class is labelled by its own node id; drop its empty tree.
    forged.trees.retain(|t| t.label != singleton);
    forged.matching.push(fake);
    forged.k += 1;
    forged.t_matching = forge_subset_poly(field, updates, &forged.matching, fake.head)?;
    // Part two (U*, labels, trees, t_trees, s_B) describes G - U*' honestly:
    // s_B must be recomputed for the shrunken label list.
    let rows = lde_rows(field, updates, &proof_points(field))?;
    let points = proof_points(field);
    let mut s_b_values = Vec::with_capacity(points.len());
    for (j, &y) in points.iter().enumerate() {
        let table = LagrangeTable::build(field, y, field.n())?;
        let d = fast_d_evals(field, &forged.u_star, &forged.labels, &table);
        let mut acc = field.zero();
        for u in 0..field.n() as usize {
            acc += d[u] * rows[j][u];
        }
        s_b_values.push(acc);
    }
    forged.s_b = PointValuePoly::new(field, s_b_values)?;
    Ok(Some(forged))
}

/// Family 3a: merge two true component labels. Property B still holds (no
/// edge crosses the true components), but the merged class is disconnected:
/// the forged connecting arc is absent from E and its presence polynomial is
/// forged at the arc head, so rejection rides on the subset algebra.
pub fn attack_merged_labels(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<Option<MatchingProof>> {
    let g = accumulate(header, updates)?;
    let honest = prove_matching(field, header, updates)?;

    let mut class_sizes: BTreeMap<u32, u32> = BTreeMap::new();
    for &(_, label) in &honest.labels {
        *class_sizes.entry(label).or_insert(0) += 1;
    }
    // Pick two labels whose merge keeps the odd-class count unchanged (not
    // both odd), so the final identity check stays consistent.
    let labels_sorted: Vec<(u32, u32)> =
        class_sizes.iter().map(|(&l, &s)| (l, s)).collect();
    let mut pick = None;
    'outer: for i in 0..labels_sorted.len() {
        for j in (i + 1)..labels_sorted.len() {
            if labels_sorted[i].1 % 2 == 1 && labels_sorted[j].1 % 2 == 1 {
                continue;
            }
            pick = Some((labels_sorted[i].0, labels_sorted[j].0));
            break 'outer;
        }
    }
    let Some((keep, merge)) = pick else {
        return Ok(None);
    };

    let mut forged = honest;
    for entry in forged.labels.iter_mut() {
        if entry.1 == merge {
            entry.1 = keep;
        }
    }
    // Join the two trees with a fabricated arc from the kept class to the
    // merged class's root, which cannot be an edge of E.
    let merge_tree_idx = forged.trees.iter().position(|t| t.label == merge).unwrap();
    let keep_tree_idx = forged.trees.iter().position(|t| t.label == keep).unwrap();
    let merge_tree = forged.trees.remove(merge_tree_idx);
    let merged_root = merge;
    let connector = keep; // root of the kept class
    debug_assert!(!g.has_edge(connector, merged_root));
    let keep_tree_idx = if merge_tree_idx < keep_tree_idx {
        keep_tree_idx - 1
    } else {
        keep_tree_idx
    };
    let keep_tree = &mut forged.trees[keep_tree_idx];
    keep_tree.parents.extend(merge_tree.parents);
    keep_tree.parents.push((merged_root, connector));

    forged.t_trees = forge_subset_poly_arcs(field, updates, &forged.trees, merged_root)?;
    // Property B for the merged labelling is still genuinely true, so the
    // honest s_B for the forged labels passes; recompute it.
    let rows = lde_rows(field, updates, &proof_points(field))?;
    let points = proof_points(field);
    let mut s_b_values = Vec::with_capacity(points.len());
    for (j, &y) in points.iter().enumerate() {
        let table = LagrangeTable::build(field, y, field.n())?;
        let d = fast_d_evals(field, &forged.u_star, &forged.labels, &table);
        let mut acc = field.zero();
        for u in 0..field.n() as usize {
            acc += d[u] * rows[j][u];
        }
        s_b_values.push(acc);
    }
    forged.s_b = PointValuePoly::new(field, s_b_values)?;
    Ok(Some(forged))
}

/// Family 3b: split one true component into two label classes along a tree
/// arc (property A intact per class, property B violated). The prover zeroes
/// the range sum by shifting one value of s_B, so rejection rides on the
/// property-B algebra check.
pub fn attack_split_labels(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<Option<MatchingProof>> {
    accumulate(header, updates)?;
    let honest = prove_matching(field, header, updates)?;

    // Find a tree arc whose removal splits a class with parity-safe pieces
    // (the odd-class count must stay identical).
    let mut chosen: Option<(usize, usize, Vec<u32>)> = None;
    'outer: for (t_idx, tree) in honest.trees.iter().enumerate() {
        let members: Vec<u32> = honest
            .labels
            .iter()
            .filter(|&&(_, l)| l == tree.label)
            .map(|&(node, _)| node)
            .collect();
        for (a_idx, &(child, _)) in tree.parents.iter().enumerate() {
            let (side_a, side_b) = split_by_arc(&members, &tree.parents, child);
            let total = members.len();
            let parity_safe = if total % 2 == 1 {
                true // odd splits into odd+even: odd count unchanged
            } else {
                side_a.len() % 2 == 0 // even must split into even+even
            };
            if parity_safe && !side_a.is_empty() && !side_b.is_empty() {
                chosen = Some((t_idx, a_idx, side_a));
                break 'outer;
            }
        }
    }
    let Some((t_idx, a_idx, subtree)) = chosen else {
        return Ok(None);
    };

    let mut forged = honest;
    // The tree root (the class minimum) is never inside a proper subtree,
    // so the rest keeps its old label and the subtree class gets a fresh
    // one: its own minimum node.
    let new_label = *subtree.iter().min().unwrap();
    let cut_child = forged.trees[t_idx].parents[a_idx].0;
    let subtree_set: HashSet<u32> = subtree.iter().copied().collect();
    debug_assert_ne!(new_label, forged.trees[t_idx].label);
    for entry in forged.labels.iter_mut() {
        if subtree_set.contains(&entry.0) {
            entry.1 = new_label;
        }
    }
    // Split the tree: the cut arc disappears, arcs inside the subtree move
    // to the new class.
    let old_parents = std::mem::take(&mut forged.trees[t_idx].parents);
    let mut kept = Vec::new();
    let mut moved = Vec::new();
    for (child, parent) in old_parents {
        if child == cut_child {
            continue;
        }
        if subtree_set.contains(&child) {
            moved.push((child, parent));
        } else {
            kept.push((child, parent));
        }
    }
    forged.trees[t_idx].parents = kept;
    forged.trees.push(LabelTree {
        label: new_label,
        parents: moved,
    });
    forged.trees.sort_by_key(|t| t.label);

    // t_trees stays honest: the remaining arcs are genuine edges.
    let rows = lde_rows(field, updates, &proof_points(field))?;
    let arcs = FunctionalPairSet::new(field.n(), tree_arcs(&forged.trees))?;
    forged.t_trees = functional_subset_values(field, &rows, &arcs)?;

    // Honest s_B for the forged labels now has a nonzero range sum (the cut
    // edge crosses the two classes); shift one value to hide it.
    let points = proof_points(field);
    let mut s_b_values = Vec::with_capacity(points.len());
    for (j, &y) in points.iter().enumerate() {
        let table = LagrangeTable::build(field, y, field.n())?;
        let d = fast_d_evals(field, &forged.u_star, &forged.labels, &table);
        let mut acc = field.zero();
        for u in 0..field.n() as usize {
            acc += d[u] * rows[j][u];
        }
        s_b_values.push(acc);
    }
    let mut leak = field.zero();
    for &v in &s_b_values[1..=field.n() as usize] {
        leak += v;
    }
    if leak.is_zero() {
        return Ok(None); // nothing to hide; instance unusable for this attack
    }
    s_b_values[1] -= leak;
    forged.s_b = PointValuePoly::new(field, s_b_values)?;
    Ok(Some(forged))
}

fn split_by_arc(
    members: &[u32],
    parents: &[(u32, u32)],
    cut_child: u32,
) -> (Vec<u32>, Vec<u32>) {
    // Children reachable from cut_child downward form the subtree.
    let mut children_of: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(child, parent) in parents {
        children_of.entry(parent).or_default().push(child);
    }
    let mut subtree = vec![cut_child];
    let mut stack = vec![cut_child];
    while let Some(u) = stack.pop() {
        if let Some(kids) = children_of.get(&u) {
            for &k in kids {
                subtree.push(k);
                stack.push(k);
            }
        }
    }
    let sub: HashSet<u32> = subtree.iter().copied().collect();
    let rest: Vec<u32> = members.iter().copied().filter(|m| !sub.contains(m)).collect();
    (subtree, rest)
}

fn find_phantom_edge(g: &GraphMatrix, honest: &MatchingProof) -> Option<OrientedEdge> {
    find_phantom_edge_avoiding(g, honest, 0)
}

fn find_phantom_edge_avoiding(
    g: &GraphMatrix,
    honest: &MatchingProof,
    avoid: u32,
) -> Option<OrientedEdge> {
    let matched: HashSet<u32> = honest
        .matching
        .iter()
        .flat_map(|e| [e.tail, e.head])
        .collect();
    let n = g.n();
    for u in 1..=n {
        for v in (u + 1)..=n {
            if u != avoid
                && v != avoid
                && !matched.contains(&u)
                && !matched.contains(&v)
                && g.get(u, v) == 0
            {
                return Some(OrientedEdge { tail: u, head: v });
            }
        }
    }
    None
}

/// Honest subset polynomial for the pair set, with the value at
/// `fake_head` overwritten to 1 so the presence read passes.
fn forge_subset_poly(
    field: &FieldContext,
    updates: &[StreamUpdate],
    oriented: &[OrientedEdge],
    fake_head: u32,
) -> Result<PointValuePoly> {
    let rows = lde_rows(field, updates, &proof_points(field))?;
    let pairs = FunctionalPairSet::new(field.n(), oriented.to_vec())?;
    let honest = functional_subset_values(field, &rows, &pairs)?;
    let mut values = honest.values().to_vec();
    values[fake_head as usize] = field.one();
    PointValuePoly::new(field, values)
}

fn forge_subset_poly_arcs(
    field: &FieldContext,
    updates: &[StreamUpdate],
    trees: &[LabelTree],
    fake_head: u32,
) -> Result<PointValuePoly> {
    let rows = lde_rows(field, updates, &proof_points(field))?;
    let pairs = FunctionalPairSet::new(field.n(), tree_arcs(trees))?;
    let honest = functional_subset_values(field, &rows, &pairs)?;
    let mut values = honest.values().to_vec();
    values[fake_head as usize] = field.one();
    PointValuePoly::new(field, values)
}
