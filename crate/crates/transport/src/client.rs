//! The streaming verifier client.
//!
//! Forwards each update to the prover while feeding the local sketch (a
//! single pass; no update is retained), then consumes the annotation, runs
//! the scheme verifier, and reports the verdict in a RESULT frame. Secrets
//! (r, r2) never touch the wire; the 4-cycle challenge r1 is the only
//! disclosed randomness.

use annostream_core::field::{FieldContext, SchemeKind};
use annostream_core::stream::{StreamUpdate, UpdateModel};
use annostream_core::{fourcycles, matching, triangles, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::cost::CostReport;
use crate::frame::{Frame, FrameType};
use crate::wire;
use crate::{Result, TransportError};

use std::io::{Read, Write};
use std::net::TcpStream;

/// One recorded frame with its direction (true = sent by the verifier).
#[derive(Debug, Clone)]
pub struct TaggedFrame {
    pub sent: bool,
    pub frame: Frame,
}

#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub verdict: Verdict,
    pub cost: CostReport,
    pub frames: Vec<TaggedFrame>,
}

impl SessionOutcome {
    /// The protocol-order frame log (both directions) for transcripts.
    pub fn transcript_frames(&self) -> Vec<Frame> {
        self.frames.iter().map(|t| t.frame.clone()).collect()
    }
}

struct Recorder<'a, S: Read + Write> {
    io: &'a mut S,
    frames: Vec<TaggedFrame>,
}

impl<'a, S: Read + Write> Recorder<'a, S> {
    fn send(&mut self, frame: Frame) -> Result<()> {
        frame.write_to(self.io)?;
        self.io.flush()?;
        self.frames.push(TaggedFrame { sent: true, frame });
        Ok(())
    }

    fn recv_section(&mut self) -> Result<Vec<u8>> {
        let frame = Frame::read_from(self.io)?;
        let payload = frame.payload.clone();
        match frame.ftype {
            FrameType::ProofSection => {
                self.frames.push(TaggedFrame { sent: false, frame });
                Ok(payload)
            }
            FrameType::Error => Err(TransportError::Remote(
                String::from_utf8_lossy(&payload).into_owned(),
            )),
            other => Err(TransportError::Protocol(format!(
                "expected PROOF_SECTION, got {other:?}"
            ))),
        }
    }
}

/// Runs one verification session over any duplex byte stream.
///
/// The seed fixes the verifier's secret randomness, making every run
/// reproducible; it is never sent to the prover.
pub fn verify_session<S: Read + Write>(
    io: &mut S,
    kind: SchemeKind,
    n: u32,
    b: u32,
    model: UpdateModel,
    updates: impl IntoIterator<Item = StreamUpdate>,
    seed: u64,
) -> Result<SessionOutcome> {
    let field = FieldContext::for_scheme(kind, n, b)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rec = Recorder {
        io,
        frames: Vec::new(),
    };
    rec.send(Frame::new(
        FrameType::Header,
        wire::encode_header(&field, model),
    ))?;

    match kind {
        SchemeKind::Triangles => {
            let mut sketch = triangles::TriangleSketch::new(&field, field.sample(&mut rng))?;
            for upd in updates {
                rec.send(Frame::new(
                    FrameType::Update,
                    wire::encode_update(model, &upd),
                ))?;
                sketch.update(&upd)?;
            }
            rec.send(Frame::new(FrameType::End, vec![]))?;

            let payload = rec.recv_section()?;
            let hcost_bits = payload.len() as u64 * 8;
            let proof = triangles::TriangleProof {
                s: wire::decode_poly(&field, &payload)?,
            };
            let verdict = sketch.verify(&proof)?;
            rec.send(Frame::new(FrameType::Result, wire::encode_result(&verdict)))?;
            let cost = CostReport::new(
                hcost_bits,
                sketch.state_field_elements() as u64,
                per_update(sketch.mul_count(), sketch.updates_processed()),
            );
            Ok(SessionOutcome {
                verdict,
                cost,
                frames: rec.frames,
            })
        }
        SchemeKind::Matching => {
            let mut sketch = matching::MatchingSketch::new(&field, field.sample(&mut rng))?;
            for upd in updates {
                rec.send(Frame::new(
                    FrameType::Update,
                    wire::encode_update(model, &upd),
                ))?;
                sketch.update(&upd)?;
            }
            rec.send(Frame::new(FrameType::End, vec![]))?;

            let mut sections = Vec::with_capacity(8);
            let mut hcost_bits = 0u64;
            for _ in 0..8 {
                let payload = rec.recv_section()?;
                hcost_bits += payload.len() as u64 * 8;
                sections.push(payload);
            }
            let proof = wire::decode_matching_proof(&field, &sections)?;
            let verdict = matching::verify_matching(&sketch, &proof)?;
            rec.send(Frame::new(FrameType::Result, wire::encode_result(&verdict)))?;
            let cost = CostReport::new(
                hcost_bits,
                (sketch.state_field_elements() + proof.stored_ids()) as u64,
                per_update(sketch.mul_count(), sketch.updates_processed()),
            );
            Ok(SessionOutcome {
                verdict,
                cost,
                frames: rec.frames,
            })
        }
        SchemeKind::FourCycles => {
            let r1 = field.sample(&mut rng);
            let r2 = field.sample(&mut rng);
            let mut sketch = fourcycles::FourCycleSketch::new(&field, r1, r2)?;
            for upd in updates {
                rec.send(Frame::new(
                    FrameType::Update,
                    wire::encode_update(model, &upd),
                ))?;
                sketch.update(&upd)?;
            }
            rec.send(Frame::new(FrameType::End, vec![]))?;

            let mul_count = sketch.mul_count();
            let updates_processed = sketch.updates_processed();
            let vcost = sketch.state_field_elements() as u64;
            let mut session = fourcycles::FourCycleSession::new(sketch);

            let s1_payload = rec.recv_section()?;
            let mut hcost_bits = s1_payload.len() as u64 * 8;
            let s1 = wire::decode_poly(&field, &s1_payload)?;
            let challenge = session.receive_s1(s1)?;
            rec.send(Frame::new(
                FrameType::Challenge,
                wire::encode_element(challenge),
            ))?;

            let s2_payload = rec.recv_section()?;
            hcost_bits += s2_payload.len() as u64 * 8;
            let s2 = wire::decode_poly(&field, &s2_payload)?;
            let (verdict, _transcript) = session.receive_s2(s2)?;
            rec.send(Frame::new(FrameType::Result, wire::encode_result(&verdict)))?;
            let cost = CostReport::new(hcost_bits, vcost, per_update(mul_count, updates_processed));
            Ok(SessionOutcome {
                verdict,
                cost,
                frames: rec.frames,
            })
        }
    }
}

fn per_update(muls: u64, updates: u64) -> f64 {
    if updates == 0 {
        0.0
    } else {
        muls as f64 / updates as f64
    }
}

/// Convenience wrapper connecting over TCP.
pub fn verify_tcp(
    addr: &str,
    kind: SchemeKind,
    n: u32,
    b: u32,
    model: UpdateModel,
    updates: impl IntoIterator<Item = StreamUpdate>,
    seed: u64,
) -> Result<SessionOutcome> {
    let mut stream = TcpStream::connect(addr)?;
    stream.set_nodelay(true)?;
    verify_session(&mut stream, kind, n, b, model, updates, seed)
}
