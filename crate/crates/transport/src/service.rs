//! The untrusted prover service.
//!
//! Per connection: consume HEADER + UPDATE* + END, then emit the scheme's
//! PROOF_SECTION frames (awaiting the CHALLENGE between the two 4-cycle
//! rounds). Sessions are independent; malformed traffic gets an ERROR frame
//! before the connection closes. The prover is the powerful party: it
//! buffers the whole stream and replays it while proving.

use annostream_core::field::{FieldContext, SchemeKind};
use annostream_core::poly::PointValuePoly;
use annostream_core::stream::StreamUpdate;
use annostream_core::{fourcycles, matching, triangles};

use crate::frame::{Frame, FrameType};
use crate::wire;
use crate::{Result, TransportError};

use std::io::{Read, Write};
use std::net::TcpListener;

/// What the prover does with the honest annotation before sending it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackMode {
    Honest,
    /// Shift one value of one proof polynomial by 1. The section index
    /// counts the scheme's polynomials in send order (triangles: {0};
    /// matching: {0: tM, 1: tT, 2: sB}; fourcycles: {0: s1, 1: s2}).
    CorruptPoint { section: usize, point: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct ProverService {
    attack: AttackMode,
}

impl ProverService {
    pub fn honest() -> ProverService {
        ProverService {
            attack: AttackMode::Honest,
        }
    }

    pub fn with_attack(attack: AttackMode) -> ProverService {
        ProverService { attack }
    }

    /// Runs one session over any duplex byte stream. On error an ERROR
    /// frame is sent best-effort before returning.
    pub fn handle<S: Read + Write>(&self, io: &mut S) -> Result<()> {
        match self.session(io) {
            Ok(()) => Ok(()),
            Err(err) => {
                let msg = err.to_string();
                let _ = Frame::new(FrameType::Error, msg.into_bytes()).write_to(io);
                let _ = io.flush();
                Err(err)
            }
        }
    }

    fn session<S: Read + Write>(&self, io: &mut S) -> Result<()> {
        let first = Frame::read_from(io)?;
        if first.ftype != FrameType::Header {
            return Err(TransportError::Protocol(
                "session must open with a HEADER frame".into(),
            ));
        }
        let (field, header) = wire::decode_header(&first.payload)?;
        // The field is a deterministic function of (scheme, n, B); insist
        // the client picked the canonical one.
        let expect =
            FieldContext::for_scheme(field.kind(), field.n(), field.multiplicity_bound())?;
        if expect != field {
            return Err(TransportError::Protocol(format!(
                "non-canonical field modulus {} for {} n={} B={}",
                field.modulus(),
                field.kind().name(),
                field.n(),
                field.multiplicity_bound()
            )));
        }

        let mut updates: Vec<StreamUpdate> = Vec::new();
        loop {
            let frame = Frame::read_from(io)?;
            match frame.ftype {
                FrameType::Update => {
                    let upd = wire::decode_update(header.model, &frame.payload)?;
                    upd.validate(&header)?;
                    updates.push(upd);
                }
                FrameType::End => break,
                other => {
                    return Err(TransportError::Protocol(format!(
                        "expected UPDATE or END, got {other:?}"
                    )))
                }
            }
        }

        match field.kind() {
            SchemeKind::Triangles => {
                let proof = triangles::prove(&field, &header, &updates)?;
                let poly = self.maybe_corrupt(&field, proof.s, 0);
                send_section(io, &poly)?;
            }
            SchemeKind::Matching => {
                let mut proof = matching::prove_matching(&field, &header, &updates)?;
                proof.t_matching = self.maybe_corrupt(&field, proof.t_matching, 0);
                proof.t_trees = self.maybe_corrupt(&field, proof.t_trees, 1);
                proof.s_b = self.maybe_corrupt(&field, proof.s_b, 2);
                for payload in wire::encode_matching_proof(&proof) {
                    Frame::new(FrameType::ProofSection, payload).write_to(io)?;
                }
                io.flush()?;
            }
            SchemeKind::FourCycles => {
                let s1 = fourcycles::prove_round1(&field, &header, &updates)?;
                send_section(io, &self.maybe_corrupt(&field, s1, 0))?;
                let challenge = Frame::read_from(io)?;
                if challenge.ftype != FrameType::Challenge {
                    return Err(TransportError::Protocol(format!(
                        "expected CHALLENGE, got {:?}",
                        challenge.ftype
                    )));
                }
                let r1 = wire::decode_element(&field, &challenge.payload)?;
                let s2 = fourcycles::prove_round2(&field, &header, &updates, r1)?;
                send_section(io, &self.maybe_corrupt(&field, s2, 1))?;
            }
        }

        // The verifier reports its verdict for logging; a closed connection
        // is also fine.
        match Frame::read_from(io) {
            Ok(frame) if frame.ftype == FrameType::Result => Ok(()),
            Ok(frame) => Err(TransportError::Protocol(format!(
                "expected RESULT after the annotation, got {:?}",
                frame.ftype
            ))),
            Err(TransportError::Io(e)) if e.kind() == std::io::ErrorKind::UnexpectedEof => Ok(()),
            Err(e) => Err(e),
        }
    }

    fn maybe_corrupt(
        &self,
        field: &FieldContext,
        poly: PointValuePoly,
        section: usize,
    ) -> PointValuePoly {
        match self.attack {
            AttackMode::CorruptPoint { section: s, point } if s == section => {
                let mut values = poly.values().to_vec();
                let idx = point % values.len();
                values[idx] += field.one();
                PointValuePoly::new(field, values).expect("same shape")
            }
            _ => poly,
        }
    }
}

fn send_section<S: Read + Write>(io: &mut S, poly: &PointValuePoly) -> Result<()> {
    Frame::new(FrameType::ProofSection, wire::encode_poly(poly)).write_to(io)?;
    io.flush()?;
    Ok(())
}

/// Accept loop: one thread per connection, sessions fully independent.
pub fn serve_listener(listener: TcpListener, attack: AttackMode) -> Result<()> {
    for stream in listener.incoming() {
        let mut stream = stream?;
        let service = ProverService::with_attack(attack);
        std::thread::spawn(move || {
            let _ = stream.set_nodelay(true);
            let _ = service.handle(&mut stream);
        });
    }
    Ok(())
}

/// One session over stdin/stdout, for subprocess pipe mode.
pub fn serve_stdio(attack: AttackMode) -> Result<()> {
    let mut io = DuplexIo {
        reader: std::io::stdin().lock(),
        writer: std::io::stdout().lock(),
    };
    ProverService::with_attack(attack).handle(&mut io)
}

/// Glues a reader and a writer into one duplex endpoint.
pub struct DuplexIo<R, W> {
    pub reader: R,
    pub writer: W,
}

impl<R: Read, W: Write> Read for DuplexIo<R, W> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        self.reader.read(buf)
    }
}

impl<R: Read, W: Write> Write for DuplexIo<R, W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.writer.write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.writer.flush()
    }
}
