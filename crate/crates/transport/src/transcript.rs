//! Byte-exact transcript recording and replay.
//!
//! A transcript file is the 8-byte magic "ANNOSTR1" followed by the
//! session's frames in protocol order. Non-interactive schemes replay under
//! a fresh secret r (the reusability property); the interactive 4-cycle
//! scheme replays pinned to the recorded challenge, a documented weaker
//! guarantee (the recorded prover already saw that challenge).

use annostream_core::field::SchemeKind;
use annostream_core::stream::StreamUpdate;
use annostream_core::{fourcycles, matching, triangles, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::frame::{Frame, FrameType};
use crate::wire;
use crate::{Result, TransportError};

use std::io::Read;
use std::path::Path;

pub const MAGIC: [u8; 8] = *b"ANNOSTR1";

pub fn transcript_bytes(frames: &[Frame]) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    for frame in frames {
        out.extend_from_slice(&frame.to_bytes());
    }
    out
}

pub fn write_transcript(path: &Path, frames: &[Frame]) -> Result<()> {
    std::fs::write(path, transcript_bytes(frames))?;
    Ok(())
}

pub fn parse_transcript(bytes: &[u8]) -> Result<Vec<Frame>> {
    if bytes.len() < 8 || bytes[..8] != MAGIC {
        return Err(TransportError::MalformedTranscript(
            "missing ANNOSTR1 magic".into(),
        ));
    }
    let mut cursor = std::io::Cursor::new(&bytes[8..]);
    let mut frames = Vec::new();
    loop {
        let pos = cursor.position();
        if pos as usize == bytes.len() - 8 {
            break;
        }
        match Frame::read_from(&mut cursor) {
            Ok(frame) => frames.push(frame),
            Err(TransportError::Io(e)) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
                return Err(TransportError::MalformedTranscript(format!(
                    "truncated frame at offset {}",
                    8 + pos
                )))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(frames)
}

pub fn read_transcript(path: &Path) -> Result<Vec<Frame>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_transcript(&bytes)
}

/// The decoded protocol content of a transcript.
struct TranscriptContent {
    field: annostream_core::field::FieldContext,
    updates: Vec<StreamUpdate>,
    sections: Vec<Vec<u8>>,
    challenge: Option<Vec<u8>>,
}

fn decode_content(frames: &[Frame]) -> Result<TranscriptContent> {
    let mut iter = frames.iter();
    let first = iter
        .next()
        .ok_or_else(|| TransportError::MalformedTranscript("empty transcript".into()))?;
    if first.ftype != FrameType::Header {
        return Err(TransportError::MalformedTranscript(
            "transcript must open with HEADER".into(),
        ));
    }
    let (field, header) = wire::decode_header(&first.payload)?;
    let mut updates = Vec::new();
    let mut sections = Vec::new();
    let mut challenge = None;
    let mut seen_end = false;
    for frame in iter {
        match frame.ftype {
            FrameType::Update if !seen_end => {
                updates.push(wire::decode_update(header.model, &frame.payload)?)
            }
            FrameType::End if !seen_end => seen_end = true,
            FrameType::ProofSection if seen_end => sections.push(frame.payload.clone()),
            FrameType::Challenge if seen_end => challenge = Some(frame.payload.clone()),
            FrameType::Result => {}
            other => {
                return Err(TransportError::MalformedTranscript(format!(
                    "unexpected {other:?} frame (end seen: {seen_end})"
                )))
            }
        }
    }
    if !seen_end {
        return Err(TransportError::MalformedTranscript(
            "transcript has no END frame".into(),
        ));
    }
    Ok(TranscriptContent {
        field,
        updates,
        sections,
        challenge,
    })
}

/// Re-verifies a recorded session. Non-interactive schemes draw a fresh
/// secret from `fresh_seed`; the 4-cycle replay pins the recorded
/// challenge and draws only a fresh r2.
pub fn replay(frames: &[Frame], fresh_seed: u64) -> Result<Verdict> {
    let content = decode_content(frames)?;
    let field = content.field;
    let mut rng = ChaCha20Rng::seed_from_u64(fresh_seed);
    match field.kind() {
        SchemeKind::Triangles => {
            if content.sections.len() != 1 {
                return Err(TransportError::MalformedTranscript(format!(
                    "triangles transcript needs 1 proof section, got {}",
                    content.sections.len()
                )));
            }
            let mut sketch = triangles::TriangleSketch::new(&field, field.sample(&mut rng))?;
            sketch.consume(&content.updates)?;
            let proof = triangles::TriangleProof {
                s: wire::decode_poly(&field, &content.sections[0])?,
            };
            Ok(sketch.verify(&proof)?)
        }
        SchemeKind::Matching => {
            if content.sections.len() != 8 {
                return Err(TransportError::MalformedTranscript(format!(
                    "matching transcript needs 8 proof sections, got {}",
                    content.sections.len()
                )));
            }
            let mut sketch = matching::MatchingSketch::new(&field, field.sample(&mut rng))?;
            sketch.consume(&content.updates)?;
            let proof = wire::decode_matching_proof(&field, &content.sections)?;
            Ok(matching::verify_matching(&sketch, &proof)?)
        }
        SchemeKind::FourCycles => {
            let challenge = content.challenge.ok_or_else(|| {
                TransportError::MalformedTranscript("4-cycle transcript lacks a challenge".into())
            })?;
            if content.sections.len() != 2 {
                return Err(TransportError::MalformedTranscript(format!(
                    "4-cycle transcript needs 2 proof sections, got {}",
                    content.sections.len()
                )));
            }
            let r1 = wire::decode_element(&field, &challenge)?;
            let r2 = field.sample(&mut rng);
            let mut sketch = fourcycles::FourCycleSketch::new(&field, r1, r2)?;
            sketch.consume(&content.updates)?;
            let transcript = fourcycles::FourCycleTranscript {
                s1: wire::decode_poly(&field, &content.sections[0])?,
                challenge_r1: r1,
                s2: wire::decode_poly(&field, &content.sections[1])?,
            };
            Ok(fourcycles::verify_transcript(&sketch, &transcript)?)
        }
    }
}

pub fn replay_file(path: &Path, fresh_seed: u64) -> Result<Verdict> {
    let frames = read_transcript(path)?;
    replay(&frames, fresh_seed)
}
