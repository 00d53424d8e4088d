//! Capture file format.
//!
//! ```text
//! file   := "WSIM1" seed:u64 created:u64 record*
//! record := tick:u64 channel:u8 length:u32 frame_bytes[length]
//! ```
//!
//! Integers are big-endian. Records are stored in tick order. A record whose
//! bytes do not decode as a frame is skipped on read and counted, so one bad
//! frame does not lose the rest of the capture.

use std::fs;
use std::io;
use std::path::Path;

use super::{decode_frame, encode_frame, Frame};
use crate::medium::{Payload, Tick};

pub const CAPTURE_MAGIC: &[u8; 5] = b"WSIM1";
const HEADER_LEN: usize = 5 + 8 + 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureRecord {
    pub tick: Tick,
    pub channel: u8,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureFile {
    pub seed: u64,
    pub created: u64,
    pub records: Vec<CaptureRecord>,
    /// Records dropped on read because they failed to decode or were cut short.
    pub skipped: usize,
}

impl CaptureFile {
    /// Decoded frames in capture order.
    pub fn frames(&self) -> impl Iterator<Item = (Tick, &Frame)> {
        self.records.iter().filter_map(|r| match &r.payload {
            Payload::Frame(f) => Some((r.tick, f)),
            Payload::Raw(_) => None,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CaptureError {
    #[error("capture i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not a capture file (bad magic)")]
    BadMagic,
    #[error("records are not sorted by tick (record {index})")]
    Unsorted { index: usize },
}

pub fn write_capture(path: &Path, seed: u64, created: u64, records: &[CaptureRecord]) -> Result<(), CaptureError> {
    if let Some(index) = records.windows(2).position(|w| w[1].tick < w[0].tick) {
        return Err(CaptureError::Unsorted { index: index + 1 });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + records.len() * 64);
    out.extend_from_slice(CAPTURE_MAGIC);
    out.extend_from_slice(&seed.to_be_bytes());
    out.extend_from_slice(&created.to_be_bytes());
    for record in records {
        let bytes = match &record.payload {
            Payload::Frame(f) => encode_frame(f),
            Payload::Raw(raw) => raw.clone(),
        };
        out.extend_from_slice(&record.tick.to_be_bytes());
        out.push(record.channel);
        out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
        out.extend_from_slice(&bytes);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_capture(path: &Path) -> Result<CaptureFile, CaptureError> {
    parse_capture(&fs::read(path)?)
}

pub(crate) fn parse_capture(data: &[u8]) -> Result<CaptureFile, CaptureError> {
    if data.len() < HEADER_LEN || &data[..5] != CAPTURE_MAGIC {
        return Err(CaptureError::BadMagic);
    }
    let seed = u64::from_be_bytes(data[5..13].try_into().unwrap());
    let created = u64::from_be_bytes(data[13..21].try_into().unwrap());

    let mut records = Vec::new();
    let mut skipped = 0;
    let mut rest = &data[HEADER_LEN..];
    while !rest.is_empty() {
        if rest.len() < 13 {
            skipped += 1;
            break;
        }
        let tick = u64::from_be_bytes(rest[..8].try_into().unwrap());
        let channel = rest[8];
        let len = u32::from_be_bytes(rest[9..13].try_into().unwrap()) as usize;
        rest = &rest[13..];
        if rest.len() < len {
            skipped += 1;
            break;
        }
        match decode_frame(&rest[..len]) {
            Ok(frame) => records.push(CaptureRecord { tick, channel, payload: Payload::Frame(frame) }),
            Err(err) => {
                log::warn!("skipping capture record at tick {tick}: {err}");
                skipped += 1;
            }
        }
        rest = &rest[len..];
    }
    Ok(CaptureFile { seed, created, records, skipped })
}
