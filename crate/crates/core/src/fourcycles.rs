//! Exact 4-cycle counting via a 3-message bivariate sum-check.
//!
//! The stream defines
//!   g(Z1, Z2) = sum_i delta_i * E~_i(u_i, Z1) * E~_i(Z1, Z2) * E~_i(Z2, v_i)
//! and the target quantity is the sum of g over the integer node grid. The
//! verifier
//! picks two secret points (r1, r2) before the stream and evaluates
//! g(r1, r2) in one pass. The prover then sends s1(Z1) (claimed row sums),
//! receives the challenge r1, and answers with s2(Z2) claimed to equal
//! g(r1, Z2). The verifier checks the sum-check chain
//!   sum_{z2} s2(z2) = s1(r1)  and  s2(r2) = g(r1, r2)
//! and outputs the sum of s1 over 1..n.
//!
//! Message order (s1, then the challenge, then s2) is enforced by
//! [`FourCycleSession`]; r2 never leaves the verifier.

use crate::field::{FieldContext, FieldElement, SchemeKind};
use crate::poly::{LagrangeTable, PointValuePoly};
use crate::stream::{accumulate, StreamHeader, StreamUpdate, UpdateModel};
use crate::{Error, Result, Verdict};

/// Streaming evaluation state for g(r1, r2): the two partial-evaluation
/// rows A (holding E~(u, r1)) and Bv (holding E~(u, r2)), the double evaluation
/// C = E~(r1, r2), and the running sum S.
#[derive(Debug, Clone)]
pub struct FourCycleSketch {
    field: FieldContext,
    r1: FieldElement,
    r2: FieldElement,
    table_r1: LagrangeTable,
    table_r2: LagrangeTable,
    a: Vec<FieldElement>,
    bv: Vec<FieldElement>,
    c: FieldElement,
    s: FieldElement,
    mul_count: u64,
    updates_processed: u64,
}

impl FourCycleSketch {
    pub fn new(
        field: &FieldContext,
        secret_r1: FieldElement,
        secret_r2: FieldElement,
    ) -> Result<FourCycleSketch> {
        if field.kind() != SchemeKind::FourCycles {
            return Err(Error::InvalidParameter(format!(
                "4-cycle sketch needs a fourcycles field, got {}",
                field.kind().name()
            )));
        }
        let r1 = field.check_element(secret_r1)?;
        let r2 = field.check_element(secret_r2)?;
        Ok(FourCycleSketch {
            field: *field,
            r1,
            r2,
            table_r1: LagrangeTable::build(field, r1, field.n())?,
            table_r2: LagrangeTable::build(field, r2, field.n())?,
            a: vec![field.zero(); field.n() as usize],
            bv: vec![field.zero(); field.n() as usize],
            c: field.zero(),
            s: field.zero(),
            mul_count: 0,
            updates_processed: 0,
        })
    }

    /// Order contract: the S term uses the pre-update values of A, C, Bv,
    /// then all four state pieces advance. Constant multiplications.
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
        self.s += delta * self.a[u] * self.c * self.bv[v];
        self.a[u] += delta * self.table_r1.lam(upd.v);
        self.a[v] += delta * self.table_r1.lam(upd.u);
        self.bv[u] += delta * self.table_r2.lam(upd.v);
        self.bv[v] += delta * self.table_r2.lam(upd.u);
        self.c += delta
            * (self.table_r1.lam(upd.u) * self.table_r2.lam(upd.v)
                + self.table_r1.lam(upd.v) * self.table_r2.lam(upd.u));
        self.mul_count += 10;
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

    pub fn r1(&self) -> FieldElement {
        self.r1
    }

    pub fn r2(&self) -> FieldElement {
        self.r2
    }

    pub fn g_at_secret(&self) -> FieldElement {
        self.s
    }

    pub fn a(&self) -> &[FieldElement] {
        &self.a
    }

    pub fn bv(&self) -> &[FieldElement] {
        &self.bv
    }

    pub fn c(&self) -> FieldElement {
        self.c
    }

    pub fn mul_count(&self) -> u64 {
        self.mul_count
    }

    pub fn updates_processed(&self) -> u64 {
        self.updates_processed
    }

    pub fn state_field_elements(&self) -> usize {
        self.a.len()
            + self.bv.len()
            + self.table_r1.stored_elements()
            + self.table_r2.stored_elements()
            + 4
    }
}

/// The recorded 3-message exchange: s1, the disclosed challenge, s2.
#[derive(Debug, Clone, PartialEq)]
pub struct FourCycleTranscript {
    pub s1: PointValuePoly,
    pub challenge_r1: FieldElement,
    pub s2: PointValuePoly,
}

enum SessionState {
    AwaitS1,
    AwaitS2 { s1: PointValuePoly },
    Done,
}

/// Verifier-side protocol driver enforcing the message order
/// s1 -> challenge -> s2. r1 is disclosed only after s1 arrives; r2 never.
pub struct FourCycleSession {
    sketch: FourCycleSketch,
    state: SessionState,
}

impl FourCycleSession {
    pub fn new(sketch: FourCycleSketch) -> FourCycleSession {
        FourCycleSession {
            sketch,
            state: SessionState::AwaitS1,
        }
    }

    /// Accepts the first prover message and discloses the challenge.
    pub fn receive_s1(&mut self, s1: PointValuePoly) -> Result<FieldElement> {
        if !matches!(self.state, SessionState::AwaitS1) {
            return Err(Error::ProtocolViolation(
                "s1 must be the first prover message".into(),
            ));
        }
        check_poly_shape(&self.sketch.field, &s1)?;
        let r1 = self.sketch.r1;
        self.state = SessionState::AwaitS2 { s1 };
        Ok(r1)
    }

    /// Accepts the second prover message and completes verification.
    pub fn receive_s2(&mut self, s2: PointValuePoly) -> Result<(Verdict, FourCycleTranscript)> {
        let s1 = match std::mem::replace(&mut self.state, SessionState::Done) {
            SessionState::AwaitS2 { s1 } => s1,
            other => {
                self.state = other;
                return Err(Error::ProtocolViolation(
                    "s2 must follow s1 and the challenge".into(),
                ));
            }
        };
        let transcript = FourCycleTranscript {
            s1,
            challenge_r1: self.sketch.r1,
            s2,
        };
        let verdict = verify_transcript(&self.sketch, &transcript)?;
        Ok((verdict, transcript))
    }

    pub fn sketch(&self) -> &FourCycleSketch {
        &self.sketch
    }
}

fn check_poly_shape(field: &FieldContext, poly: &PointValuePoly) -> Result<()> {
    if poly.field() != field {
        return Err(Error::FieldMismatch);
    }
    let want = 2 * field.n() as usize + 1;
    if poly.values().len() != want {
        return Err(Error::MalformedProof(format!(
            "sum-check message must carry {want} values, got {}",
            poly.values().len()
        )));
    }
    Ok(())
}

/// Full transcript check against a streamed sketch: the recorded challenge
/// must be the sketch's r1, the chain identity must hold, and s2 must agree
/// with the streaming evaluation at r2.
pub fn verify_transcript(
    sketch: &FourCycleSketch,
    transcript: &FourCycleTranscript,
) -> Result<Verdict> {
    if transcript.challenge_r1 != sketch.r1 {
        return Err(Error::ProtocolViolation(
            "transcript challenge does not match the verifier's r1".into(),
        ));
    }
    check_poly_shape(&sketch.field, &transcript.s1)?;
    check_poly_shape(&sketch.field, &transcript.s2)?;
    let n = sketch.field.n() as usize;
    if transcript.s2.range_sum(1, n)? != transcript.s1.eval(sketch.r1)? {
        return Ok(Verdict::Reject);
    }
    if transcript.s2.eval(sketch.r2)? != sketch.s {
        return Ok(Verdict::Reject);
    }
    let count = transcript.s1.range_sum(1, n)?;
    Ok(Verdict::Accept(count.value()))
}

/// Round-1 prover message: s1(y), the sum of g(y, z2) over z2 in 1..n, on
/// {0..2n}, computed by maintaining the dense integer matrix E_i alongside
/// the 2n+1 partial-evaluation rows holding E~_i(y, z). O(m * n^2).
pub fn prove_round1(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
) -> Result<PointValuePoly> {
    check_scheme(field, header)?;
    accumulate(header, updates)?;
    let n = field.n() as usize;
    let points = 2 * n + 1;
    let tables: Vec<LagrangeTable> = (0..points)
        .map(|x| LagrangeTable::build(field, field.element(x as u64), field.n()))
        .collect::<Result<_>>()?;
    let mut rows = vec![vec![field.zero(); n]; points];
    let mut accs = vec![field.zero(); points];
    let mut e = vec![0i64; n * n];
    for upd in updates {
        let (u, v) = (upd.u as usize - 1, upd.v as usize - 1);
        let delta = field.element_from_i64(upd.delta);
        // Column of E_i at v_i, embedded once per update.
        let col: Vec<FieldElement> = (0..n)
            .map(|z| field.element_from_i64(e[z * n + v]))
            .collect();
        for (x, row) in rows.iter_mut().enumerate() {
            let mut inner = field.zero();
            for z2 in 0..n {
                if !col[z2].is_zero() {
                    inner += row[z2] * col[z2];
                }
            }
            accs[x] += delta * row[u] * inner;
            row[u] += delta * tables[x].lam(upd.v);
            row[v] += delta * tables[x].lam(upd.u);
        }
        e[u * n + v] += upd.delta;
        e[v * n + u] += upd.delta;
    }
    PointValuePoly::new(field, accs)
}

/// Round-2 prover message: s2(y) = g(r1, y) on {0..2n}, via 2n+1 streaming
/// replays of the sketch recurrence at (r1, y) sharing the A row.
pub fn prove_round2(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
    r1: FieldElement,
) -> Result<PointValuePoly> {
    check_scheme(field, header)?;
    accumulate(header, updates)?;
    let r1 = field.check_element(r1)?;
    let n = field.n() as usize;
    let points = 2 * n + 1;
    let table_r1 = LagrangeTable::build(field, r1, field.n())?;
    let tables: Vec<LagrangeTable> = (0..points)
        .map(|x| LagrangeTable::build(field, field.element(x as u64), field.n()))
        .collect::<Result<_>>()?;
    let mut a = vec![field.zero(); n];
    let mut bv = vec![vec![field.zero(); n]; points];
    let mut c = vec![field.zero(); points];
    let mut s = vec![field.zero(); points];
    for upd in updates {
        let (u, v) = (upd.u as usize - 1, upd.v as usize - 1);
        let delta = field.element_from_i64(upd.delta);
        for x in 0..points {
            s[x] += delta * a[u] * c[x] * bv[x][v];
        }
        a[u] += delta * table_r1.lam(upd.v);
        a[v] += delta * table_r1.lam(upd.u);
        for x in 0..points {
            bv[x][u] += delta * tables[x].lam(upd.v);
            bv[x][v] += delta * tables[x].lam(upd.u);
            c[x] += delta
                * (table_r1.lam(upd.u) * tables[x].lam(upd.v)
                    + table_r1.lam(upd.v) * tables[x].lam(upd.u));
        }
    }
    PointValuePoly::new(field, s)
}

fn check_scheme(field: &FieldContext, header: &StreamHeader) -> Result<()> {
    if field.kind() != SchemeKind::FourCycles {
        return Err(Error::InvalidParameter(
            "4-cycle prover needs a fourcycles field".into(),
        ));
    }
    if header.model != UpdateModel::StrictTurnstile {
        return Err(Error::MalformedStream(
            "4-cycle scheme runs on strict turnstile streams".into(),
        ));
    }
    Ok(())
}

/// Runs the whole protocol locally (prover and verifier in-process) and
/// returns the verdict with the transcript.
pub fn run_local(
    field: &FieldContext,
    header: &StreamHeader,
    updates: &[StreamUpdate],
    sketch: FourCycleSketch,
) -> Result<(Verdict, FourCycleTranscript)> {
    let mut session = FourCycleSession::new(sketch);
    let s1 = prove_round1(field, header, updates)?;
    let r1 = session.receive_s1(s1)?;
    let s2 = prove_round2(field, header, updates, r1)?;
    session.receive_s2(s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{generate, oracle_fourcycles_incremental, GenSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn setup(n: u32, b: u32) -> (FieldContext, StreamHeader) {
        let field = FieldContext::for_scheme(SchemeKind::FourCycles, n, b).unwrap();
        let header = StreamHeader::new(n, UpdateModel::StrictTurnstile, b).unwrap();
        (field, header)
    }

    fn sketch_for(field: &FieldContext, seed: u64, updates: &[StreamUpdate]) -> FourCycleSketch {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let r1 = field.sample(&mut rng);
        let r2 = field.sample(&mut rng);
        let mut sketch = FourCycleSketch::new(field, r1, r2).unwrap();
        sketch.consume(updates).unwrap();
        sketch
    }

    fn embed_i128(field: &FieldContext, x: i128) -> FieldElement {
        let p = field.modulus() as i128;
        field.element(x.rem_euclid(p) as u64)
    }

    fn c4_updates() -> Vec<StreamUpdate> {
        [(1, 2), (2, 3), (3, 4), (1, 4)]
            .iter()
            .map(|&(u, v)| StreamUpdate::turnstile(u, v, 1))
            .collect()
    }

    fn k4_updates() -> Vec<StreamUpdate> {
        [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
            .iter()
            .map(|&(u, v)| StreamUpdate::turnstile(u, v, 1))
            .collect()
    }

    #[test]
    fn empty_stream_gives_zero_state_and_polys() {
        let (field, header) = setup(5, 1);
        let sketch = sketch_for(&field, 1, &[]);
        assert!(sketch.g_at_secret().is_zero());
        let s1 = prove_round1(&field, &header, &[]).unwrap();
        assert!(s1.values().iter().all(|v| v.is_zero()));
        let s2 = prove_round2(&field, &header, &[], field.element(9)).unwrap();
        assert!(s2.values().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn c4_and_k4_counts() {
        for (updates, expect) in [(c4_updates(), 1u64), (k4_updates(), 3u64)] {
            let (field, header) = setup(4, 1);
            let sketch = sketch_for(&field, 2, &updates);
            let (verdict, transcript) = run_local(&field, &header, &updates, sketch).unwrap();
            assert_eq!(verdict, Verdict::Accept(expect));
            assert_eq!(transcript.s1.range_sum(1, 4).unwrap().value(), expect);
        }
    }

    #[test]
    fn sketch_state_matches_direct_partial_evaluations() {
        let (field, header) = setup(7, 2);
        let spec = GenSpec {
            n: 7,
            m: 30,
            b: 2,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.2,
            seed: 5,
        };
        let (_, updates) = generate(&spec).unwrap();
        let sketch = sketch_for(&field, 3, &updates);
        let g = accumulate(&header, &updates).unwrap();
        let t1 = LagrangeTable::build(&field, sketch.r1(), 7).unwrap();
        let t2 = LagrangeTable::build(&field, sketch.r2(), 7).unwrap();
        // A[u] = sum_v E(u,v) lambda_v(r1); Bv likewise at r2.
        for u in 1..=7u32 {
            let mut want1 = field.zero();
            let mut want2 = field.zero();
            for v in 1..=7u32 {
                let m = field.element_from_i64(g.get(u, v));
                want1 += m * t1.lam(v);
                want2 += m * t2.lam(v);
            }
            assert_eq!(sketch.a()[u as usize - 1], want1);
            assert_eq!(sketch.bv()[u as usize - 1], want2);
        }
        // C = sum_{u,v} E(u,v) lambda_u(r1) lambda_v(r2).
        let mut want_c = field.zero();
        for u in 1..=7u32 {
            for v in 1..=7u32 {
                want_c += field.element_from_i64(g.get(u, v)) * t1.lam(u) * t2.lam(v);
            }
        }
        assert_eq!(sketch.c(), want_c);
    }

    #[test]
    fn chain_identity_and_oracle_equivalence() {
        let mut rng = ChaCha20Rng::seed_from_u64(50);
        for trial in 0..20 {
            let n = rng.gen_range(4..=8);
            let pairs = (n as u64) * (n as u64 - 1) / 2;
            let spec = GenSpec {
                n,
                m: rng.gen_range(5..=pairs),
                b: 1,
                model: UpdateModel::StrictTurnstile,
                deletion_fraction: if trial % 2 == 0 { 0.0 } else { 0.2 },
                seed: 300 + trial,
            };
            let (header, updates) = generate(&spec).unwrap();
            let field = FieldContext::for_scheme(SchemeKind::FourCycles, n, 1).unwrap();
            let s1 = prove_round1(&field, &header, &updates).unwrap();
            let oracle = oracle_fourcycles_incremental(&header, &updates).unwrap();
            assert_eq!(
                s1.range_sum(1, n as usize).unwrap(),
                embed_i128(&field, oracle),
                "trial {trial}: claimed total differs from the oracle"
            );
            // Chain identity: sum_{z2} s2(z2) = s1(r1) for any challenge.
            let r1 = field.sample(&mut rng);
            let s2 = prove_round2(&field, &header, &updates, r1).unwrap();
            assert_eq!(
                s2.range_sum(1, n as usize).unwrap(),
                s1.eval(r1).unwrap(),
                "trial {trial}: chain identity broken"
            );
        }
    }

    #[test]
    fn honest_protocol_accepts_with_oracle_count() {
        let mut rng = ChaCha20Rng::seed_from_u64(51);
        for trial in 0..15 {
            let n = rng.gen_range(4..=9);
            let pairs = (n as u64) * (n as u64 - 1) / 2;
            let spec = GenSpec {
                n,
                m: rng.gen_range(5..=pairs),
                b: 1,
                model: UpdateModel::StrictTurnstile,
                deletion_fraction: 0.0,
                seed: 400 + trial,
            };
            let (header, updates) = generate(&spec).unwrap();
            let field = FieldContext::for_scheme(SchemeKind::FourCycles, n, 1).unwrap();
            let sketch = sketch_for(&field, 600 + trial, &updates);
            let (verdict, _) = run_local(&field, &header, &updates, sketch).unwrap();
            let oracle = oracle_fourcycles_incremental(&header, &updates).unwrap();
            assert!(oracle >= 0, "insert-only oracle is a plain count");
            assert_eq!(verdict, Verdict::Accept(oracle as u64), "trial {trial}");
        }
    }

    #[test]
    fn session_enforces_message_order() {
        let (field, header) = setup(4, 1);
        let updates = c4_updates();
        let s1 = prove_round1(&field, &header, &updates).unwrap();
        let s2_shape = s1.clone();

        // s2 before s1.
        let mut session = FourCycleSession::new(sketch_for(&field, 7, &updates));
        assert!(matches!(
            session.receive_s2(s2_shape.clone()),
            Err(Error::ProtocolViolation(_))
        ));

        // Double s1.
        let mut session = FourCycleSession::new(sketch_for(&field, 7, &updates));
        session.receive_s1(s1.clone()).unwrap();
        assert!(matches!(
            session.receive_s1(s1.clone()),
            Err(Error::ProtocolViolation(_))
        ));

        // Completed session takes nothing further.
        let mut session = FourCycleSession::new(sketch_for(&field, 7, &updates));
        let r1 = session.receive_s1(s1).unwrap();
        let s2 = prove_round2(&field, &header, &updates, r1).unwrap();
        let (verdict, _) = session.receive_s2(s2.clone()).unwrap();
        assert_eq!(verdict, Verdict::Accept(1));
        assert!(matches!(
            session.receive_s2(s2),
            Err(Error::ProtocolViolation(_))
        ));
    }

    #[test]
    fn challenge_disclosed_only_after_s1() {
        // The session's public API simply has no way to learn r1 before s1
        // arrives; this pins the property against the transcript shape too.
        let (field, header) = setup(4, 1);
        let updates = c4_updates();
        let sketch = sketch_for(&field, 8, &updates);
        let r1 = sketch.r1();
        let r2 = sketch.r2();
        let (_, transcript) = run_local(&field, &header, &updates, sketch).unwrap();
        assert_eq!(transcript.challenge_r1, r1);
        // r2 appears nowhere in the transcript.
        assert_ne!(transcript.challenge_r1, r2);
    }

    #[test]
    fn corrupted_messages_rejected() {
        let (field, header) = setup(6, 1);
        let spec = GenSpec {
            n: 6,
            m: 14,
            b: 1,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.0,
            seed: 12,
        };
        let (_, updates) = generate(&spec).unwrap();
        let s1 = prove_round1(&field, &header, &updates).unwrap();

        let corrupt = |poly: &PointValuePoly, at: usize| {
            let mut values = poly.values().to_vec();
            values[at] += field.one();
            PointValuePoly::new(&field, values).unwrap()
        };

        let trials = 200;
        let mut rejects_s1 = 0;
        let mut rejects_s2 = 0;
        for seed in 0..trials {
            let sketch = sketch_for(&field, 900 + seed, &updates);
            let mut session = FourCycleSession::new(sketch);
            let r1 = session.receive_s1(corrupt(&s1, 0)).unwrap();
            let s2 = prove_round2(&field, &header, &updates, r1).unwrap();
            if session.receive_s2(s2).unwrap().0 == Verdict::Reject {
                rejects_s1 += 1;
            }

            let sketch = sketch_for(&field, 900 + seed, &updates);
            let mut session = FourCycleSession::new(sketch);
            let r1 = session.receive_s1(s1.clone()).unwrap();
            let s2 = prove_round2(&field, &header, &updates, r1).unwrap();
            if session.receive_s2(corrupt(&s2, 3)).unwrap().0 == Verdict::Reject {
                rejects_s2 += 1;
            }
        }
        assert!(rejects_s1 >= trials * 98 / 100, "s1: {rejects_s1}/{trials}");
        assert!(rejects_s2 >= trials * 98 / 100, "s2: {rejects_s2}/{trials}");
    }

    #[test]
    fn stale_challenge_s2_rejected() {
        // s2 honestly computed for a different challenge r1' != r1.
        let (field, header) = setup(6, 1);
        let spec = GenSpec {
            n: 6,
            m: 12,
            b: 1,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.0,
            seed: 13,
        };
        let (_, updates) = generate(&spec).unwrap();
        let s1 = prove_round1(&field, &header, &updates).unwrap();
        let mut rejects = 0;
        let trials = 150;
        for seed in 0..trials {
            let sketch = sketch_for(&field, 7000 + seed, &updates);
            let mut session = FourCycleSession::new(sketch);
            let r1 = session.receive_s1(s1.clone()).unwrap();
            let wrong_r1 = r1 + field.one();
            let s2 = prove_round2(&field, &header, &updates, wrong_r1).unwrap();
            if session.receive_s2(s2).unwrap().0 == Verdict::Reject {
                rejects += 1;
            }
        }
        assert!(rejects >= trials * 98 / 100, "{rejects}/{trials}");
    }

    #[test]
    fn transcript_replay_requires_matching_challenge() {
        let (field, header) = setup(4, 1);
        let updates = c4_updates();
        let sketch = sketch_for(&field, 21, &updates);
        let (_, transcript) = run_local(&field, &header, &updates, sketch).unwrap();

        // Fresh sketch with a different r1 cannot check this transcript.
        let other = sketch_for(&field, 22, &updates);
        assert!(matches!(
            verify_transcript(&other, &transcript),
            Err(Error::ProtocolViolation(_))
        ));

        // Pinned to the recorded challenge (fresh r2) it verifies.
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        let mut pinned =
            FourCycleSketch::new(&field, transcript.challenge_r1, field.sample(&mut rng))
                .unwrap();
        pinned.consume(&updates).unwrap();
        assert_eq!(
            verify_transcript(&pinned, &transcript).unwrap(),
            Verdict::Accept(1)
        );
    }

    #[test]
    fn constant_work_per_update() {
        let (field, _) = setup(5, 2);
        let spec = GenSpec {
            n: 5,
            m: 40,
            b: 2,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.3,
            seed: 3,
        };
        let (_, updates) = generate(&spec).unwrap();
        let sketch = sketch_for(&field, 2, &updates);
        assert_eq!(sketch.mul_count(), 10 * updates.len() as u64);
        assert_eq!(sketch.state_field_elements(), 4 * 5 + 4);
    }
}
