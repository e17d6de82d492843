//! Payload encodings for the frame types.
//!
//! Field elements are 8-byte LE canonical values. Node ids are 4-byte LE.
//! Polynomials inside PROOF_SECTION frames are bare element sequences (the
//! count is implied by the payload length), which keeps the measured
//! annotation at exactly its information content.

use annostream_core::field::{FieldContext, FieldElement};
use annostream_core::matching::{LabelTree, MatchingProof, OrientedEdge};
use annostream_core::poly::PointValuePoly;
use annostream_core::stream::{StreamHeader, StreamUpdate, UpdateModel};
use annostream_core::Verdict;

use crate::{Result, TransportError};

/// HEADER payload: FieldContext (17 bytes) + update model (1 byte).
pub fn encode_header(field: &FieldContext, model: UpdateModel) -> Vec<u8> {
    let mut out = field.to_bytes().to_vec();
    out.push(model.code());
    out
}

pub fn decode_header(payload: &[u8]) -> Result<(FieldContext, StreamHeader)> {
    if payload.len() != 18 {
        return Err(TransportError::MalformedFrame(format!(
            "header payload must be 18 bytes, got {}",
            payload.len()
        )));
    }
    let field = FieldContext::from_bytes(&payload[..17])?;
    let model = UpdateModel::from_code(payload[17])?;
    let header = StreamHeader::new(field.n(), model, field.multiplicity_bound())?;
    Ok((field, header))
}

/// UPDATE payload: u (4 LE), v (4 LE), then delta (8 LE signed) for
/// turnstile streams.
pub fn encode_update(model: UpdateModel, upd: &StreamUpdate) -> Vec<u8> {
    let mut out = Vec::with_capacity(16);
    out.extend_from_slice(&upd.u.to_le_bytes());
    out.extend_from_slice(&upd.v.to_le_bytes());
    if model == UpdateModel::StrictTurnstile {
        out.extend_from_slice(&upd.delta.to_le_bytes());
    }
    out
}

pub fn decode_update(model: UpdateModel, payload: &[u8]) -> Result<StreamUpdate> {
    let want = if model == UpdateModel::StrictTurnstile { 16 } else { 8 };
    if payload.len() != want {
        return Err(TransportError::MalformedFrame(format!(
            "update payload must be {want} bytes, got {}",
            payload.len()
        )));
    }
    let u = u32::from_le_bytes(payload[0..4].try_into().unwrap());
    let v = u32::from_le_bytes(payload[4..8].try_into().unwrap());
    Ok(match model {
        UpdateModel::StrictTurnstile => StreamUpdate::turnstile(
            u,
            v,
            i64::from_le_bytes(payload[8..16].try_into().unwrap()),
        ),
        UpdateModel::Xor => StreamUpdate::xor(u, v),
    })
}

/// CHALLENGE payload: one field element.
pub fn encode_element(e: FieldElement) -> Vec<u8> {
    e.to_le_bytes().to_vec()
}

pub fn decode_element(field: &FieldContext, payload: &[u8]) -> Result<FieldElement> {
    if payload.len() != 8 {
        return Err(TransportError::MalformedFrame(format!(
            "element payload must be 8 bytes, got {}",
            payload.len()
        )));
    }
    let raw = u64::from_le_bytes(payload.try_into().unwrap());
    Ok(field.element_canonical(raw)?)
}

/// PROOF_SECTION payload for a polynomial: its values in order, 8 bytes
/// each, no count prefix.
pub fn encode_poly(poly: &PointValuePoly) -> Vec<u8> {
    poly.to_raw_values()
}

pub fn decode_poly(field: &FieldContext, payload: &[u8]) -> Result<PointValuePoly> {
    Ok(PointValuePoly::from_raw_values(field, payload)?)
}

/// RESULT payload: status byte (1 = accept, 0 = reject) + value (8 LE).
pub fn encode_result(verdict: &Verdict) -> Vec<u8> {
    let mut out = Vec::with_capacity(9);
    match verdict {
        Verdict::Accept(v) => {
            out.push(1);
            out.extend_from_slice(&v.to_le_bytes());
        }
        Verdict::Reject => {
            out.push(0);
            out.extend_from_slice(&0u64.to_le_bytes());
        }
    }
    out
}

pub fn decode_result(payload: &[u8]) -> Result<Verdict> {
    if payload.len() != 9 {
        return Err(TransportError::MalformedFrame(format!(
            "result payload must be 9 bytes, got {}",
            payload.len()
        )));
    }
    let value = u64::from_le_bytes(payload[1..9].try_into().unwrap());
    match payload[0] {
        1 => Ok(Verdict::Accept(value)),
        0 => Ok(Verdict::Reject),
        other => Err(TransportError::MalformedFrame(format!(
            "unknown result status {other}"
        ))),
    }
}

fn take4(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// The matching annotation as PROOF_SECTION payloads in the fixed order
/// (k, M, tM, U*, L, trees, tT, sB).
pub fn encode_matching_proof(proof: &MatchingProof) -> Vec<Vec<u8>> {
    let mut sections = Vec::with_capacity(8);
    sections.push(proof.k.to_le_bytes().to_vec());

    let mut m = Vec::with_capacity(proof.matching.len() * 8);
    for e in &proof.matching {
        m.extend_from_slice(&e.tail.to_le_bytes());
        m.extend_from_slice(&e.head.to_le_bytes());
    }
    sections.push(m);
    sections.push(encode_poly(&proof.t_matching));

    let mut ustar = Vec::with_capacity(proof.u_star.len() * 4);
    for &u in &proof.u_star {
        ustar.extend_from_slice(&u.to_le_bytes());
    }
    sections.push(ustar);

    let mut labels = Vec::with_capacity(proof.labels.len() * 8);
    for &(node, label) in &proof.labels {
        labels.extend_from_slice(&node.to_le_bytes());
        labels.extend_from_slice(&label.to_le_bytes());
    }
    sections.push(labels);

    let mut trees = Vec::new();
    trees.extend_from_slice(&(proof.trees.len() as u32).to_le_bytes());
    for tree in &proof.trees {
        trees.extend_from_slice(&tree.label.to_le_bytes());
        trees.extend_from_slice(&(tree.parents.len() as u32).to_le_bytes());
        for &(child, parent) in &tree.parents {
            trees.extend_from_slice(&child.to_le_bytes());
            trees.extend_from_slice(&parent.to_le_bytes());
        }
    }
    sections.push(trees);
    sections.push(encode_poly(&proof.t_trees));
    sections.push(encode_poly(&proof.s_b));
    sections
}

pub fn decode_matching_proof(
    field: &FieldContext,
    sections: &[Vec<u8>],
) -> Result<MatchingProof> {
    if sections.len() != 8 {
        return Err(TransportError::MalformedFrame(format!(
            "matching proof needs 8 sections, got {}",
            sections.len()
        )));
    }
    if sections[0].len() != 8 {
        return Err(TransportError::MalformedFrame("bad k section".into()));
    }
    let k = u64::from_le_bytes(sections[0][..8].try_into().unwrap());

    if !sections[1].len().is_multiple_of(8) {
        return Err(TransportError::MalformedFrame("bad matching section".into()));
    }
    let matching = sections[1]
        .chunks_exact(8)
        .map(|c| OrientedEdge {
            tail: take4(c, 0),
            head: take4(c, 4),
        })
        .collect();
    let t_matching = decode_poly(field, &sections[2])?;

    if !sections[3].len().is_multiple_of(4) {
        return Err(TransportError::MalformedFrame("bad U* section".into()));
    }
    let u_star = sections[3].chunks_exact(4).map(|c| take4(c, 0)).collect();

    if !sections[4].len().is_multiple_of(8) {
        return Err(TransportError::MalformedFrame("bad label section".into()));
    }
    let labels = sections[4]
        .chunks_exact(8)
        .map(|c| (take4(c, 0), take4(c, 4)))
        .collect();

    let trees = decode_trees(&sections[5])?;
    let t_trees = decode_poly(field, &sections[6])?;
    let s_b = decode_poly(field, &sections[7])?;
    Ok(MatchingProof {
        k,
        matching,
        t_matching,
        u_star,
        labels,
        trees,
        t_trees,
        s_b,
    })
}

fn decode_trees(bytes: &[u8]) -> Result<Vec<LabelTree>> {
    let bad = || TransportError::MalformedFrame("bad tree section".into());
    if bytes.len() < 4 {
        return Err(bad());
    }
    let count = take4(bytes, 0) as usize;
    let mut at = 4;
    let mut trees = Vec::with_capacity(count);
    for _ in 0..count {
        if bytes.len() < at + 8 {
            return Err(bad());
        }
        let label = take4(bytes, at);
        let arcs = take4(bytes, at + 4) as usize;
        at += 8;
        if bytes.len() < at + arcs * 8 {
            return Err(bad());
        }
        let mut parents = Vec::with_capacity(arcs);
        for _ in 0..arcs {
            parents.push((take4(bytes, at), take4(bytes, at + 4)));
            at += 8;
        }
        trees.push(LabelTree { label, parents });
    }
    if at != bytes.len() {
        return Err(bad());
    }
    Ok(trees)
}
