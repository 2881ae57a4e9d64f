//! Binary checkpoint container.
//!
//! Layout (all integers little-endian):
//!
//! | bytes | content                         |
//! |-------|---------------------------------|
//! | 5     | magic `PRLB1`                   |
//! | 4     | format version (`u32`)          |
//! | 8     | sweep position (`u64`)          |
//! | 8     | block length `L` (`u64`)        |
//! | L     | counter block                   |
//! | 32    | SHA-256 of the counter block    |

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 5] = b"PRLB1";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    /// Next integer to be processed; everything below it is accounted for.
    pub position: u64,
    pub block: Vec<u8>,
}

impl Checkpoint {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.block.len() + 57);
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.position.to_le_bytes());
        out.extend_from_slice(&(self.block.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.block);
        out.extend_from_slice(&Sha256::digest(&self.block));
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::CheckpointFormat(m.to_string());
        if bytes.len() < 25 || &bytes[..5] != CHECKPOINT_MAGIC {
            return Err(bad("bad magic header"));
        }
        let version = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
        if version != CHECKPOINT_VERSION {
            return Err(Error::CheckpointFormat(format!(
                "unsupported version {version}"
            )));
        }
        let position = u64::from_le_bytes(bytes[9..17].try_into().unwrap());
        let len = u64::from_le_bytes(bytes[17..25].try_into().unwrap()) as usize;
        if bytes.len() != 25 + len + 32 {
            return Err(bad("truncated or oversized file"));
        }
        let block = bytes[25..25 + len].to_vec();
        if Sha256::digest(&block).as_slice() != &bytes[25 + len..] {
            return Err(bad("checksum mismatch"));
        }
        Ok(Self { position, block })
    }

    /// Writes through a temporary sibling and renames, so a crash never
    /// leaves a half-written checkpoint behind.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.encode())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }
}

#[derive(Debug, Default, Clone)]
pub struct BlockWriter {
    buf: Vec<u8>,
}

impl BlockWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub fn opt_u64(&mut self, v: Option<u64>) {
        match v {
            Some(x) => {
                self.u8(1);
                self.u64(x);
            }
            None => self.u8(0),
        }
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug, Clone)]
pub struct BlockReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> BlockReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::CheckpointFormat("counter block too short".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn opt_u64(&mut self) -> Result<Option<u64>> {
        match self.u8()? {
            0 => Ok(None),
            1 => Ok(Some(self.u64()?)),
            t => Err(Error::CheckpointFormat(format!("bad option tag {t}"))),
        }
    }

    pub fn is_done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut w = BlockWriter::new();
        w.u64(7);
        w.f64(-0.5);
        w.opt_u64(None);
        w.opt_u64(Some(3));
        let cp = Checkpoint {
            position: 1_000_000,
            block: w.finish(),
        };
        let back = Checkpoint::decode(&cp.encode()).unwrap();
        assert_eq!(back, cp);
        let mut r = BlockReader::new(&back.block);
        assert_eq!(r.u64().unwrap(), 7);
        assert_eq!(r.f64().unwrap(), -0.5);
        assert_eq!(r.opt_u64().unwrap(), None);
        assert_eq!(r.opt_u64().unwrap(), Some(3));
        assert!(r.is_done());
    }

    #[test]
    fn corrupt_files_rejected() {
        let cp = Checkpoint {
            position: 5,
            block: vec![1, 2, 3],
        };
        let mut bytes = cp.encode();
        bytes[0] = b'X';
        assert!(matches!(Checkpoint::decode(&bytes), Err(Error::CheckpointFormat(_))));
        let mut bytes = cp.encode();
        bytes[26] ^= 1;
        assert!(Checkpoint::decode(&bytes).is_err());
        let mut bytes = cp.encode();
        bytes[5] = 9;
        assert!(Checkpoint::decode(&bytes).is_err());
        assert!(Checkpoint::decode(&cp.encode()[..20]).is_err());
    }
}
