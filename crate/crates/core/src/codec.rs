//! Little-endian helpers for the checkpoint blobs.

use crate::error::{Error, Result};
use crate::sketch::{HashedPair, Threshold};

const TAG_PAIR: u8 = 0;
const TAG_NONE: u8 = 1;

pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub(crate) fn new(magic: &[u8; 4]) -> Self {
        Self {
            buf: magic.to_vec(),
        }
    }

    pub(crate) fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub(crate) fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub(crate) fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub(crate) fn pair(&mut self, p: HashedPair) {
        self.u32(p.hash);
        self.u32(p.element);
    }

    /// Tag byte (0 = pair, 1 = absent/top) followed by the pair or zeros.
    pub(crate) fn optional_pair(&mut self, p: Option<HashedPair>) {
        match p {
            Some(p) => {
                self.u8(TAG_PAIR);
                self.pair(p);
            }
            None => {
                self.u8(TAG_NONE);
                self.u32(0);
                self.u32(0);
            }
        }
    }

    pub(crate) fn threshold(&mut self, t: Threshold) {
        self.optional_pair(match t {
            Threshold::Pair(p) => Some(p),
            Threshold::Top => None,
        });
    }

    pub(crate) fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != magic {
            return Err(Error::Decode(format!(
                "expected magic {:?}",
                String::from_utf8_lossy(magic)
            )));
        }
        Ok(Self { bytes, pos: 4 })
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Decode("truncated blob".into()))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length checked"))
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    pub(crate) fn pair(&mut self) -> Result<HashedPair> {
        let hash = self.u32()?;
        let element = self.u32()?;
        Ok(HashedPair { hash, element })
    }

    pub(crate) fn optional_pair(&mut self) -> Result<Option<HashedPair>> {
        let tag = self.u8()?;
        let p = self.pair()?;
        match tag {
            TAG_PAIR => Ok(Some(p)),
            TAG_NONE => Ok(None),
            t => Err(Error::Decode(format!("unknown tag {t}"))),
        }
    }

    pub(crate) fn threshold(&mut self) -> Result<Threshold> {
        Ok(match self.optional_pair()? {
            Some(p) => Threshold::Pair(p),
            None => Threshold::Top,
        })
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Decode(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}
