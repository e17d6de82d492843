//! Exact triangle counting over strict turnstile streams.
//!
//! The stream defines a univariate polynomial
//!   g(Z) = sum_i delta_i * E~_i(u_i, Z) * E~_i(v_i, Z)
//! where E~_i is the low-degree extension of the edge-multiplicity function
//! of the graph before update i, and sum_{z in 1..n} g(z) is the triangle
//! count. The verifier evaluates g at a secret point r with O(1) field
//! multiplications per update; the prover sends g's values on {0..2n} after
//! the final token; the verifier checks s(r) = g(r) and reads off the count.
//!
//! The verifier state is deliberately not a linear sketch: the running
//! accumulator depends on the stream order, even though the accepted count
//! does not.

use crate::field::{FieldContext, FieldElement, SchemeKind};
use crate::poly::{LagrangeTable, PointValuePoly};
use crate::stream::{StreamHeader, StreamUpdate, UpdateModel};
use crate::{Error, Result, Verdict};

/// Streaming verifier state: n node evaluations E~_i(u, r), the running
/// accumulator g_i(r), and the precomputed Lagrange row at r.
#[derive(Debug, Clone)]
pub struct TriangleSketch {
    field: FieldContext,
    r: FieldElement,
    table: LagrangeTable,
    evals: Vec<FieldElement>,
    acc: FieldElement,
    mul_count: u64,
    updates_processed: u64,
}

impl TriangleSketch {
    pub fn new(field: &FieldContext, secret_r: FieldElement) -> Result<TriangleSketch> {
        if field.kind() != SchemeKind::Triangles {
            return Err(Error::InvalidParameter(format!(
                "triangle sketch needs a triangles field, got {}",
                field.kind().name()
            )));
        }
        let r = field.check_element(secret_r)?;
        let table = LagrangeTable::build(field, r, field.n())?;
        Ok(TriangleSketch {
            field: *field,
            r,
            table,
            evals: vec![field.zero(); field.n() as usize],
            acc: field.zero(),
            mul_count: 0,
            updates_processed: 0,
        })
    }

    /// Processes one update. Order contract: the accumulator term uses the
    /// node evaluations from before this update (E~_i is the graph state
    /// prior to update i), then the two touched evaluations advance.
    /// Exactly four field multiplications.
    pub fn update(&mut self, upd: &StreamUpdate) -> Result<()> {
        let header = StreamHeader {
            n: self.field.n(),
            model: UpdateModel::StrictTurnstile,
            b: self.field.multiplicity_bound(),
            declared_length: None,
        };
        upd.validate(&header)?;
        let (u, v) = (upd.u as usize - 1, upd.v as usize - 1);
        let delta = self.field.element_from_i64(upd.delta);
        self.acc += delta * (self.evals[u] * self.evals[v]);
        self.evals[u] += delta * self.table.lam(upd.v);
        self.evals[v] += delta * self.table.lam(upd.u);
        self.mul_count += 4;
        self.updates_processed += 1;
        Ok(())
    }

    pub fn consume(&mut self, updates: &[StreamUpdate]) -> Result<()> {
        for upd in updates {
            self.update(upd)?;
        }
        Ok(())
    }

    /// Checks s(r) = g(r) and, on success, returns sum_{z in 1..n} s(z) as
    /// the triangle count. A wrong-shape proof is malformed, not rejected.
    pub fn verify(&self, proof: &TriangleProof) -> Result<Verdict> {
        let n = self.field.n() as usize;
        if proof.s.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if proof.s.values().len() != 2 * n + 1 {
            return Err(Error::MalformedProof(format!(
                "triangle proof must carry {} values, got {}",
                2 * n + 1,
                proof.s.values().len()
            )));
        }
        if proof.s.eval(self.r)? != self.acc {
            return Ok(Verdict::Reject);
        }
        let count = proof.s.range_sum(1, n)?;
        Ok(Verdict::Accept(count.value()))
    }

    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    pub fn r(&self) -> FieldElement {
        self.r
    }

    pub fn acc(&self) -> FieldElement {
        self.acc
    }

    pub fn evals(&self) -> &[FieldElement] {
        &self.evals
    }

    pub fn mul_count(&self) -> u64 {
        self.mul_count
    }

    pub fn updates_processed(&self) -> u64 {
        self.updates_processed
    }

    /// Total stored field elements: n evaluations + n table entries + r and
    /// the accumulator.
    pub fn state_field_elements(&self) -> usize {
        self.evals.len() + self.table.stored_elements() + 2
    }
}

/// The annotation: g's claimed values on {0..2n}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleProof {
    pub s: PointValuePoly,
}

/// Honest prover: evaluates g at every point of {0..2n} by running 2n+1
/// sketch replicas through a single pass over the stream (in-domain points
/// fall back to direct Lagrange products). O(m*n) after table setup.
pub fn prove(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<TriangleProof> {
    if field.kind() != SchemeKind::Triangles {
        return Err(Error::InvalidParameter(
            "triangle prover needs a triangles field".into(),
        ));
    }
    if header.model != UpdateModel::StrictTurnstile {
        return Err(Error::MalformedStream(
            "triangles scheme runs on strict turnstile streams".into(),
        ));
    }
    // Validates the stream (including end-of-stream multiplicity bounds).
    crate::stream::accumulate(header, updates)?;

    let n = field.n() as usize;
    let points = 2 * n + 1;
    let tables: Vec<LagrangeTable> = (0..points)
        .map(|x| LagrangeTable::build(field, field.element(x as u64), field.n()))
        .collect::<Result<_>>()?;
    let mut evals = vec![vec![field.zero(); n]; points];
    let mut accs = vec![field.zero(); points];
    for upd in updates {
        let (u, v) = (upd.u as usize - 1, upd.v as usize - 1);
        let delta = field.element_from_i64(upd.delta);
        for x in 0..points {
            let row = &mut evals[x];
            accs[x] += delta * (row[u] * row[v]);
            row[u] += delta * tables[x].lam(upd.v);
            row[v] += delta * tables[x].lam(upd.u);
        }
    }
    Ok(TriangleProof {
        s: PointValuePoly::new(field, accs)?,
    })
}

/// Adversarial prover: honest proof with one value shifted; used by the
/// soundness harnesses. The result differs from g as a polynomial, so a
/// fresh verifier accepts it with probability at most 2n/p.
pub fn prove_corrupted(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
    point: usize,
    shift: u64,
) -> Result<TriangleProof> {
    let honest = prove(field, header, updates)?;
    Ok(corrupt_proof(field, &honest, point, shift))
}

/// Shifts the proof value at one abscissa by a nonzero amount.
pub fn corrupt_proof(
    field: &FieldContext,
    proof: &TriangleProof,
    point: usize,
    shift: u64,
) -> TriangleProof {
    let mut values = proof.s.values().to_vec();
    values[point] += field.element(shift);
    TriangleProof {
        s: PointValuePoly::new(field, values).expect("same shape as honest proof"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{accumulate, generate, oracle_triangles, GenSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn setup(n: u32, b: u32) -> (FieldContext, StreamHeader) {
        let field = FieldContext::for_scheme(SchemeKind::Triangles, n, b).unwrap();
        let header = StreamHeader::new(n, UpdateModel::StrictTurnstile, b).unwrap();
        (field, header)
    }

    fn k3_updates() -> Vec<StreamUpdate> {
        [(1, 2), (2, 3), (1, 3)]
            .iter()
            .map(|&(u, v)| StreamUpdate::turnstile(u, v, 1))
            .collect()
    }

    /// Replay oracle: recomputes sum_i delta_i E~_i(u_i,r) E~_i(v_i,r) from
    /// scratch, with each E~_i built directly from the prefix graph.
    fn replay_g_at_r(
        field: &FieldContext,
        updates: &[StreamUpdate],
        r: FieldElement,
    ) -> FieldElement {
        let n = field.n() as usize;
        let table = LagrangeTable::build(field, r, field.n()).unwrap();
        let lde_at = |prefix: &[StreamUpdate], node: u32| {
            let mut mult = vec![0i64; n * n];
            for upd in prefix {
                let (a, b) = (upd.u as usize - 1, upd.v as usize - 1);
                mult[a * n + b] += upd.delta;
                mult[b * n + a] += upd.delta;
            }
            let mut acc = field.zero();
            for v in 1..=field.n() {
                let m = mult[(node as usize - 1) * n + (v as usize - 1)];
                acc += field.element_from_i64(m) * table.lam(v);
            }
            acc
        };
        let mut total = field.zero();
        for i in 0..updates.len() {
            let upd = updates[i];
            let eu = lde_at(&updates[..i], upd.u);
            let ev = lde_at(&updates[..i], upd.v);
            total += field.element_from_i64(upd.delta) * eu * ev;
        }
        total
    }

    #[test]
    fn fresh_sketch_is_zeroed_and_audited() {
        let (field, _) = setup(5, 1);
        let sketch = TriangleSketch::new(&field, field.element(42)).unwrap();
        assert!(sketch.acc().is_zero());
        assert!(sketch.evals().iter().all(|e| e.is_zero()));
        assert_eq!(sketch.state_field_elements(), 5 + 5 + 2);
    }

    #[test]
    fn first_update_leaves_acc_zero() {
        let (field, _) = setup(5, 1);
        let mut sketch = TriangleSketch::new(&field, field.element(42)).unwrap();
        sketch.update(&StreamUpdate::turnstile(2, 4, 1)).unwrap();
        assert!(sketch.acc().is_zero());
    }

    #[test]
    fn sketch_rejects_wrong_field_kind_and_self_loops() {
        let matching = FieldContext::for_scheme(SchemeKind::Matching, 5, 1).unwrap();
        assert!(TriangleSketch::new(&matching, matching.element(1)).is_err());

        let (field, _) = setup(5, 1);
        let mut sketch = TriangleSketch::new(&field, field.element(3)).unwrap();
        assert!(sketch.update(&StreamUpdate::turnstile(2, 2, 1)).is_err());
    }

    #[test]
    fn double_insert_tracks_direct_lde() {
        // Insert (1,2) twice at n=3: evals[1] must equal 2 * lambda_2(r).
        let (field, _) = setup(3, 2);
        let r = field.element(5);
        let mut sketch = TriangleSketch::new(&field, r).unwrap();
        sketch.update(&StreamUpdate::turnstile(1, 2, 1)).unwrap();
        sketch.update(&StreamUpdate::turnstile(1, 2, 1)).unwrap();
        let table = LagrangeTable::build(&field, r, 3).unwrap();
        let two = field.element(2);
        assert_eq!(sketch.evals()[0], two * table.lam(2));
        assert_eq!(sketch.evals()[1], two * table.lam(1));
    }

    #[test]
    fn k3_completeness_at_any_r() {
        let (field, header) = setup(3, 1);
        let proof = prove(&field, &header, &k3_updates()).unwrap();
        // sum_{z=1..3} s(z) = 1 regardless of the verifier's secret.
        assert_eq!(proof.s.range_sum(1, 3).unwrap().value(), 1);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..20 {
            let mut sketch = TriangleSketch::new(&field, field.sample(&mut rng)).unwrap();
            sketch.consume(&k3_updates()).unwrap();
            assert_eq!(sketch.verify(&proof).unwrap(), Verdict::Accept(1));
        }
    }

    #[test]
    fn empty_stream_proof_is_zero() {
        let (field, header) = setup(4, 1);
        let proof = prove(&field, &header, &[]).unwrap();
        assert!(proof.s.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn acc_matches_replay_oracle_per_prefix() {
        let (field, _) = setup(8, 2);
        let spec = GenSpec {
            n: 8,
            m: 40,
            b: 2,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.25,
            seed: 13,
        };
        let (_, updates) = generate(&spec).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let r = field.sample(&mut rng);
        let mut sketch = TriangleSketch::new(&field, r).unwrap();
        for i in 0..updates.len() {
            sketch.update(&updates[i]).unwrap();
            if i % 7 == 0 || i + 1 == updates.len() {
                let expect = replay_g_at_r(&field, &updates[..=i], r);
                assert_eq!(sketch.acc(), expect, "prefix {}", i + 1);
            }
        }
    }

    #[test]
    fn completeness_random_streams_with_deletions() {
        let mut rng = ChaCha20Rng::seed_from_u64(30);
        for trial in 0..25 {
            let n = rng.gen_range(4..=16);
            let b = rng.gen_range(1..=3);
            let spec = GenSpec {
                n,
                m: rng.gen_range(10..=60),
                b,
                model: UpdateModel::StrictTurnstile,
                deletion_fraction: 0.2,
                seed: 1000 + trial,
            };
            let (header, updates) = generate(&spec).unwrap();
            let field = FieldContext::for_scheme(SchemeKind::Triangles, n, b).unwrap();
            let proof = prove(&field, &header, &updates).unwrap();
            let mut sketch = TriangleSketch::new(&field, field.sample(&mut rng)).unwrap();
            sketch.consume(&updates).unwrap();
            let expected = oracle_triangles(&accumulate(&header, &updates).unwrap());
            assert_eq!(
                sketch.verify(&proof).unwrap(),
                Verdict::Accept(expected),
                "trial {trial}"
            );
        }
    }

    #[test]
    fn sketch_is_order_sensitive_but_verdict_is_not() {
        // Concrete permutation pair whose accumulators differ: ending K3's
        // stream on a different edge moves which lambda^2 lands in acc.
        let (field, header) = setup(3, 1);
        let order_a = k3_updates(); // (1,2) (2,3) (1,3) -> acc = lambda_2(r)^2
        let order_b: Vec<StreamUpdate> = [(1, 3), (2, 3), (1, 2)]
            .iter()
            .map(|&(u, v)| StreamUpdate::turnstile(u, v, 1))
            .collect(); // acc = lambda_3(r)^2
        let r = field.element(101);
        let mut sa = TriangleSketch::new(&field, r).unwrap();
        sa.consume(&order_a).unwrap();
        let mut sb = TriangleSketch::new(&field, r).unwrap();
        sb.consume(&order_b).unwrap();
        assert_ne!(sa.acc(), sb.acc(), "state must depend on stream order");

        // Both orders still verify to the same accepted count.
        let pa = prove(&field, &header, &order_a).unwrap();
        let pb = prove(&field, &header, &order_b).unwrap();
        assert_eq!(sa.verify(&pa).unwrap(), Verdict::Accept(1));
        assert_eq!(sb.verify(&pb).unwrap(), Verdict::Accept(1));
    }

    #[test]
    fn malformed_proof_is_not_a_rejection() {
        let (field, header) = setup(4, 1);
        let proof = prove(&field, &header, &k3_updates()).unwrap();
        let mut sketch = TriangleSketch::new(&field, field.element(9)).unwrap();
        sketch.consume(&k3_updates()).unwrap();

        let short = TriangleProof {
            s: PointValuePoly::new(&field, proof.s.values()[..5].to_vec()).unwrap(),
        };
        assert!(matches!(
            sketch.verify(&short),
            Err(Error::MalformedProof(_))
        ));
    }

    #[test]
    fn corrupted_point_rejected_almost_always() {
        let (field, header) = setup(6, 1);
        let spec = GenSpec {
            n: 6,
            m: 14,
            b: 1,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.0,
            seed: 4,
        };
        let (_, updates) = generate(&spec).unwrap();
        let bad = prove_corrupted(&field, &header, &updates, 0, 1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        let mut rejects = 0;
        let trials = 300;
        for _ in 0..trials {
            let mut sketch = TriangleSketch::new(&field, field.sample(&mut rng)).unwrap();
            sketch.consume(&updates).unwrap();
            if sketch.verify(&bad).unwrap() == Verdict::Reject {
                rejects += 1;
            }
        }
        // Acceptance probability is exactly 2n/p = 12/1297 per trial.
        assert!(rejects >= trials * 95 / 100, "only {rejects}/{trials} rejected");
    }

    #[test]
    fn honest_proof_of_flipped_stream_rejected() {
        // The proof is honestly computed, but for a stream with one edge
        // swapped; it interpolates a different g and loses to the same
        // polynomial-distance bound.
        let (field, header) = setup(6, 1);
        let spec = GenSpec {
            n: 6,
            m: 12,
            b: 1,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.0,
            seed: 6,
        };
        let (_, updates) = generate(&spec).unwrap();
        let g = accumulate(&header, &updates).unwrap();
        let absent = (1..=6u32)
            .flat_map(|u| ((u + 1)..=6).map(move |v| (u, v)))
            .find(|&(u, v)| g.get(u, v) == 0)
            .expect("a sparse stream leaves some pair empty");
        let mut flipped = updates.clone();
        flipped[3] = StreamUpdate::turnstile(absent.0, absent.1, 1);
        let alien = prove(&field, &header, &flipped).unwrap();
        assert_ne!(alien, prove(&field, &header, &updates).unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(88);
        let trials = 300;
        let mut rejects = 0;
        for _ in 0..trials {
            let mut sketch = TriangleSketch::new(&field, field.sample(&mut rng)).unwrap();
            sketch.consume(&updates).unwrap();
            if sketch.verify(&alien).unwrap() == Verdict::Reject {
                rejects += 1;
            }
        }
        assert!(rejects >= trials * 95 / 100, "only {rejects}/{trials} rejected");
    }

    #[test]
    fn mul_counter_is_four_per_update() {
        let (field, _) = setup(5, 3);
        let mut sketch = TriangleSketch::new(&field, field.element(200)).unwrap();
        let spec = GenSpec {
            n: 5,
            m: 33,
            b: 3,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.3,
            seed: 2,
        };
        let (_, updates) = generate(&spec).unwrap();
        sketch.consume(&updates).unwrap();
        assert_eq!(sketch.mul_count(), 4 * updates.len() as u64);
        assert_eq!(sketch.updates_processed(), updates.len() as u64);
    }
}
