//! Length-prefixed frame codec: length (4-byte LE), type (1 byte), payload.

use crate::{Result, TransportError};
use std::io::{Read, Write};

/// Frames larger than this are rejected outright.
pub const MAX_PAYLOAD: u32 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum FrameType {
    Header = 1,
    Update = 2,
    End = 3,
    ProofSection = 4,
    Challenge = 5,
    Result = 6,
    Error = 7,
}

impl FrameType {
    pub fn from_code(code: u8) -> Result<FrameType> {
        Ok(match code {
            1 => FrameType::Header,
            2 => FrameType::Update,
            3 => FrameType::End,
            4 => FrameType::ProofSection,
            5 => FrameType::Challenge,
            6 => FrameType::Result,
            7 => FrameType::Error,
            other => {
                return Err(TransportError::MalformedFrame(format!(
                    "unknown frame type {other}"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub ftype: FrameType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(ftype: FrameType, payload: Vec<u8>) -> Frame {
        Frame { ftype, payload }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.payload.len());
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        out.push(self.ftype as u8);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Frame> {
        let mut len_bytes = [0u8; 4];
        r.read_exact(&mut len_bytes)?;
        let len = u32::from_le_bytes(len_bytes);
        if len > MAX_PAYLOAD {
            return Err(TransportError::MalformedFrame(format!(
                "payload of {len} bytes exceeds the {MAX_PAYLOAD} limit"
            )));
        }
        let mut type_byte = [0u8; 1];
        r.read_exact(&mut type_byte)?;
        let ftype = FrameType::from_code(type_byte[0])?;
        let mut payload = vec![0u8; len as usize];
        r.read_exact(&mut payload)?;
        Ok(Frame { ftype, payload })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trip_basic() {
        let frame = Frame::new(FrameType::ProofSection, vec![1, 2, 3, 4]);
        let bytes = frame.to_bytes();
        let mut cursor = std::io::Cursor::new(bytes);
        assert_eq!(Frame::read_from(&mut cursor).unwrap(), frame);
    }

    #[test]
    fn rejects_unknown_type_and_truncation() {
        let mut bytes = Frame::new(FrameType::End, vec![]).to_bytes();
        bytes[4] = 99;
        assert!(Frame::read_from(&mut std::io::Cursor::new(bytes)).is_err());

        let bytes = Frame::new(FrameType::Update, vec![0; 16]).to_bytes();
        let truncated = &bytes[..bytes.len() - 3];
        assert!(Frame::read_from(&mut std::io::Cursor::new(truncated.to_vec())).is_err());
    }

    #[test]
    fn rejects_oversized_declaration() {
        let mut bytes = vec![];
        bytes.extend_from_slice(&(MAX_PAYLOAD + 1).to_le_bytes());
        bytes.push(FrameType::Update as u8);
        assert!(Frame::read_from(&mut std::io::Cursor::new(bytes)).is_err());
    }

    proptest! {
        #[test]
        fn codec_round_trips_byte_exactly(
            code in 1u8..=7,
            payload in proptest::collection::vec(any::<u8>(), 0..300),
        ) {
            let frame = Frame::new(FrameType::from_code(code).unwrap(), payload);
            let bytes = frame.to_bytes();
            let decoded = Frame::read_from(&mut std::io::Cursor::new(bytes.clone())).unwrap();
            prop_assert_eq!(&decoded, &frame);
            prop_assert_eq!(decoded.to_bytes(), bytes);
        }
    }
}
